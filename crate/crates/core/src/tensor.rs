//! Fixed-size tensor algebra on top of `nalgebra`: the axial-vector map,
//! proper rotations and the planar decomposition of ambient tensors
//! relative to an orthonormal surface frame.

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::error::{Result, ShellError};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
/// Material surface coordinates `(x1, x2)`.
pub type Coords2 = Vector2<f64>;

/// Absolute tolerance on `|A + A^T|_F` accepted by [`axl`].
pub const SKEW_TOL: f64 = 1e-10;
/// Tolerance on the rotation invariants `R^T R = 1`, `det R = 1`.
pub const ROTATION_TOL: f64 = 1e-12;
/// Orthogonality drift above which [`Rotation::compose`] re-projects.
pub const REORTHONORMALIZE_TOL: f64 = 1e-9;

/// `u ⊗ v`, i.e. the matrix `u v^T`.
#[inline]
pub fn outer(u: &Vec3, v: &Vec3) -> Mat3 {
    u * v.transpose()
}

/// Skew matrix of `v`: `skew(v) u = v × u`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Axial vector of a skew-symmetric matrix.
pub fn axl(a: &Mat3) -> Result<Vec3> {
    let defect = (a + a.transpose()).norm();
    if defect > SKEW_TOL {
        return Err(ShellError::NotSkew(defect));
    }
    Ok(axl_of_skew_part(a))
}

/// Axial vector of the skew part of `a`, i.e. `½ e_ijk a_kj`.
pub fn axl_of_skew_part(a: &Mat3) -> Vec3 {
    Vec3::new(
        0.5 * (a[(2, 1)] - a[(1, 2)]),
        0.5 * (a[(0, 2)] - a[(2, 0)]),
        0.5 * (a[(1, 0)] - a[(0, 1)]),
    )
}

pub fn sym(a: &Mat3) -> Mat3 {
    0.5 * (a + a.transpose())
}

pub fn skw(a: &Mat3) -> Mat3 {
    0.5 * (a - a.transpose())
}

/// Frobenius product `A : B = tr(A^T B)`.
#[inline]
pub fn dot(a: &Mat3, b: &Mat3) -> f64 {
    a.component_mul(b).sum()
}

fn orthogonality_defect(m: &Mat3) -> f64 {
    (m.transpose() * m - Mat3::identity()).norm()
}

/// A proper orthogonal tensor stored as its full matrix.
///
/// Columns are the directors: `R = d_i ⊗ e_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Checked constructor: `R^T R = 1` and `det R = 1` within [`ROTATION_TOL`]
    /// scaled by `tol_scale`.
    pub fn from_matrix_tol(m: Mat3, tol: f64) -> Result<Self> {
        let defect = orthogonality_defect(&m).max((m.determinant() - 1.0).abs());
        if !defect.is_finite() || defect > tol {
            return Err(ShellError::FrameNotOrthonormal(defect));
        }
        Ok(Rotation(m))
    }

    pub fn from_matrix(m: Mat3) -> Result<Self> {
        Self::from_matrix_tol(m, ROTATION_TOL)
    }

    /// Builds the rotation whose columns are `d1, d2, d3`.
    pub fn from_directors(d1: &Vec3, d2: &Vec3, d3: &Vec3, tol: f64) -> Result<Self> {
        Self::from_matrix_tol(Mat3::from_columns(&[*d1, *d2, *d3]), tol)
    }

    /// Nearest rotation in the Frobenius sense (polar factor).
    pub fn project(m: &Mat3) -> Self {
        let svd = m.svd(true, true);
        let u = svd.u.expect("svd u");
        let v_t = svd.v_t.expect("svd v_t");
        let mut r = u * v_t;
        if r.determinant() < 0.0 {
            let mut u = u;
            u.column_mut(2).neg_mut();
            r = u * v_t;
        }
        Rotation(r)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn director(&self, i: usize) -> Vec3 {
        self.0.column(i).into_owned()
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    /// `self * other`, re-projected onto SO(3) if the product drifted.
    pub fn compose(&self, other: &Rotation) -> Self {
        let m = self.0 * other.0;
        if orthogonality_defect(&m) > REORTHONORMALIZE_TOL {
            Rotation::project(&m)
        } else {
            Rotation(m)
        }
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    pub fn defect(&self) -> f64 {
        orthogonality_defect(&self.0).max((self.0.determinant() - 1.0).abs())
    }
}

/// Rodrigues formula `exp(skew(v))`.
pub fn rotation_exp(v: &Vec3) -> Rotation {
    let theta2 = v.norm_squared();
    let k = skew(v);
    let k2 = k * k;
    let (s, c) = if theta2 < 1e-8 {
        // Taylor series of sin(θ)/θ and (1 - cos θ)/θ².
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        let theta = theta2.sqrt();
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Rotation(Mat3::identity() + s * k + c * k2)
}

/// Left Jacobian of the exponential map:
/// `d/dt exp(v + t w)|_{t=0} = skew(J_l(v) w) exp(v)`.
pub fn left_jacobian(v: &Vec3) -> Mat3 {
    let theta2 = v.norm_squared();
    let k = skew(v);
    let (a, b) = if theta2 < 1e-8 {
        (
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
            1.0 / 6.0 - theta2 / 120.0 + theta2 * theta2 / 5040.0,
        )
    } else {
        let theta = theta2.sqrt();
        ((1.0 - theta.cos()) / theta2, (theta - theta.sin()) / (theta2 * theta))
    };
    Mat3::identity() + a * k + b * k * k
}

/// Orthonormal frame `{d1⁰, d2⁰, n⁰}` used to split ambient tensors.
#[derive(Debug, Clone, Copy)]
pub struct PlanarFrame {
    pub d1: Vec3,
    pub d2: Vec3,
    pub n: Vec3,
}

impl PlanarFrame {
    pub fn new(d1: Vec3, d2: Vec3, n: Vec3) -> Result<Self> {
        let q = Mat3::from_columns(&[d1, d2, n]);
        let defect = orthogonality_defect(&q);
        if defect > 1e-10 {
            return Err(ShellError::FrameNotOrthonormal(defect));
        }
        Ok(Self { d1, d2, n })
    }

    /// Planar identity `a = d_α ⊗ d_α`.
    pub fn planar_identity(&self) -> Mat3 {
        outer(&self.d1, &self.d1) + outer(&self.d2, &self.d2)
    }

    /// Planar alternator `c = d1 ⊗ d2 − d2 ⊗ d1`.
    pub fn alternator(&self) -> Mat3 {
        outer(&self.d1, &self.d2) - outer(&self.d2, &self.d1)
    }
}

/// Orthogonal splitting of an ambient tensor with respect to a surface frame.
#[derive(Debug, Clone, Copy)]
pub struct PlanarParts {
    /// Trace of the tangential block.
    pub trace: f64,
    /// Deviatoric symmetric part of the tangential block (ambient form).
    pub deviator: Mat3,
    /// `s` with tangential skew part `= −s c`, i.e. `½(T₂₁ − T₁₂)`.
    pub skew: f64,
    /// `T^T n`: the normal row, including the `n·T n` entry.
    pub normal_row: Vec3,
    /// Tangential part of `T n`.
    pub normal_column: Vec3,
}

impl PlanarParts {
    pub fn reconstruct(&self, frame: &PlanarFrame) -> Mat3 {
        0.5 * self.trace * frame.planar_identity() + self.deviator - self.skew * frame.alternator()
            + outer(&frame.n, &self.normal_row)
            + outer(&self.normal_column, &frame.n)
    }

    /// Squared Frobenius norm as the sum of the parts' norms.
    pub fn norm_squared(&self) -> f64 {
        0.5 * self.trace * self.trace
            + self.deviator.norm_squared()
            + 2.0 * self.skew * self.skew
            + self.normal_row.norm_squared()
            + self.normal_column.norm_squared()
    }
}

pub fn planar_parts(t: &Mat3, frame: &PlanarFrame) -> PlanarParts {
    let a = frame.planar_identity();
    let block = a * t * a;
    let trace = block.trace();
    let skew_part = skw(&block);
    // skew_part = −s c, and c : c = 2.
    let s = -0.5 * dot(&skew_part, &frame.alternator());
    PlanarParts {
        trace,
        deviator: sym(&block) - 0.5 * trace * a,
        skew: s,
        normal_row: t.transpose() * frame.n,
        normal_column: a * (t * frame.n),
    }
}
