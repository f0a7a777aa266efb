//! Director frames, the deformation gradient and the strain measures
//! `Ee = Qeᵀ F − a`, `Ke = K − K⁰`.
//!
//! Curvature vectors are stored in the body frame: `κ_α = axl(Rᵀ ∂_α R)`,
//! so that `K = Q⁰ κ_α ⊗ a^α` and the components `K_{iα}` in the basis
//! `d_i⁰ ⊗ a^α` are the Cartesian components of `κ_α`.

use crate::error::{Result, ShellError};
use crate::fields::{Series, VecSeries};
use crate::geometry::{SurfaceChart, SurfaceFrame};
use crate::tensor::{axl_of_skew_part, left_jacobian, outer, rotation_exp, skew, Coords2, Mat3, Rotation, Vec3};

/// Tolerance on `|d3⁰ − n⁰|` for reference frames.
pub const DIRECTOR_NORMAL_TOL: f64 = 1e-10;

/// Components `T_{iα}` of a tensor in the basis `d_i⁰ ⊗ a^α`.
pub type Components = [[f64; 2]; 3];

/// A rotation field `R(x) = d_i(x) ⊗ e_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameField {
    /// The chart frame `{a1/|a1|, n⁰ × a1/|a1|, n⁰}`.
    Reference(SurfaceChart),
    /// `exp(ψ(x)) · base(x)`.
    Rotated { psi: VecSeries, base: Box<FrameField> },
    /// `base(x) · exp(θ(x) e3)`: rotation by `θ` about the base's own `d3`.
    Drilled { theta: Series, base: Box<FrameField> },
}

impl FrameField {
    pub fn rotated(psi: VecSeries, base: FrameField) -> Self {
        FrameField::Rotated {
            psi,
            base: Box::new(base),
        }
    }

    pub fn drilled(theta: Series, base: FrameField) -> Self {
        FrameField::Drilled {
            theta,
            base: Box::new(base),
        }
    }

    /// A constant rotation `q` superposed on `base`.
    pub fn rigidly_rotated(q: &Rotation, base: FrameField) -> Self {
        let v = rotation_log(q);
        let psi = VecSeries::new(Series::constant(v[0]), Series::constant(v[1]), Series::constant(v[2]));
        Self::rotated(psi, base)
    }

    pub fn rotation(&self, x: Coords2) -> Result<Rotation> {
        Ok(match self {
            FrameField::Reference(chart) => chart_frame(chart, x)?.0,
            FrameField::Rotated { psi, base } => rotation_exp(&psi.value(x)).compose(&base.rotation(x)?),
            FrameField::Drilled { theta, base } => {
                base.rotation(x)?.compose(&rotation_exp(&(theta.value(x) * Vec3::z())))
            }
        })
    }

    /// `R` and `∂_α R` in the derivative mode of `chart`.
    pub fn with_partials(&self, chart: &SurfaceChart, x: Coords2) -> Result<(Rotation, [Mat3; 2])> {
        if chart.is_analytic() {
            return self.analytic(x);
        }
        let h = chart.fd_step();
        let r = self.rotation(x)?;
        let mut d = [Mat3::zeros(); 2];
        for (k, dk) in d.iter_mut().enumerate() {
            let mut e = Coords2::zeros();
            e[k] = h;
            *dk = (self.rotation(x + e)?.matrix() - self.rotation(x - e)?.matrix()) / (2.0 * h);
        }
        Ok((r, d))
    }

    fn analytic(&self, x: Coords2) -> Result<(Rotation, [Mat3; 2])> {
        match self {
            FrameField::Reference(chart) => chart_frame(chart, x),
            FrameField::Rotated { psi, base } => {
                let (b, db) = base.analytic(x)?;
                let v = psi.value(x);
                let dv = psi.partials(x);
                let q = rotation_exp(&v);
                let j = left_jacobian(&v);
                let r = q.compose(&b);
                let d = [0, 1].map(|k| skew(&(j * dv[k])) * r.matrix() + q.matrix() * db[k]);
                Ok((r, d))
            }
            FrameField::Drilled { theta, base } => {
                let (b, db) = base.analytic(x)?;
                let z = rotation_exp(&(theta.value(x) * Vec3::z()));
                let g = theta.gradient(x);
                let r = b.compose(&z);
                let d = [0, 1].map(|k| db[k] * z.matrix() + g[k] * b.matrix() * skew(&Vec3::z()) * z.matrix());
                Ok((r, d))
            }
        }
    }
}

/// Rotation vector of `q` (angle below π).
pub fn rotation_log(q: &Rotation) -> Vec3 {
    let m = q.matrix();
    let cos = ((m.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let angle = cos.acos();
    let w = axl_of_skew_part(m);
    if angle < 1e-12 {
        return w;
    }
    if angle > std::f64::consts::PI - 1e-6 {
        // Near a half turn: axis from the symmetric part.
        let s = (m + Mat3::identity()) / 2.0;
        let col = (0..3)
            .map(|i| s.column(i).into_owned())
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        let mut axis = col.normalize();
        if axis.dot(&w) < 0.0 {
            axis = -axis;
        }
        return angle * axis;
    }
    w * (angle / angle.sin())
}

/// Chart frame and its analytic partials.
fn chart_frame(chart: &SurfaceChart, x: Coords2) -> Result<(Rotation, [Mat3; 2])> {
    let (t, dt) = chart.tangents_with_partials(x);
    let n_partials = chart.normal_partials(x)?;
    let m = t[0].cross(&t[1]);
    let len = m.norm();
    if !(len >= 1e-12) {
        return Err(ShellError::DegenerateChart {
            x1: x[0],
            x2: x[1],
            reason: format!("|a1 x a2| = {len:e}"),
        });
    }
    let n = m / len;
    let l1 = t[0].norm();
    let d1 = t[0] / l1;
    let d2 = n.cross(&d1);
    let r = Rotation::from_directors(&d1, &d2, &n, 1e-10)?;
    let d = [0, 1].map(|k| {
        let dd1 = (dt[0][k] - d1 * d1.dot(&dt[0][k])) / l1;
        let dd2 = n_partials[k].cross(&d1) + n.cross(&dd1);
        Mat3::from_columns(&[dd1, dd2, n_partials[k]])
    });
    Ok((r, d))
}

/// Deformed position `y = Q (λ y⁰ + u) + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub rotation: Rotation,
    pub scale: f64,
    pub displacement: VecSeries,
    pub translation: Vec3,
}

impl Default for Placement {
    fn default() -> Self {
        Placement {
            rotation: Rotation::identity(),
            scale: 1.0,
            displacement: VecSeries::zero(),
            translation: Vec3::zeros(),
        }
    }
}

impl Placement {
    pub fn displaced(u: VecSeries) -> Self {
        Placement {
            displacement: u,
            ..Default::default()
        }
    }

    pub fn position(&self, chart: &SurfaceChart, x: Coords2) -> Vec3 {
        self.rotation
            .apply(&(self.scale * chart.position(x) + self.displacement.value(x)))
            + self.translation
    }

    pub fn partials(&self, chart: &SurfaceChart, x: Coords2) -> [Vec3; 2] {
        if chart.is_analytic() {
            let a = chart.tangents(x);
            let du = self.displacement.partials(x);
            return [0, 1].map(|k| self.rotation.apply(&(self.scale * a[k] + du[k])));
        }
        let h = chart.fd_step();
        [0, 1].map(|k| {
            let mut e = Coords2::zeros();
            e[k] = h;
            (self.position(chart, x + e) - self.position(chart, x - e)) / (2.0 * h)
        })
    }
}

/// Deformed configuration `(y, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformedConfig {
    pub placement: Placement,
    pub frame: FrameField,
}

impl DeformedConfig {
    /// `y = y⁰`, `R = Q⁰` for the given reference frame.
    pub fn reference(reference: &FrameField) -> Self {
        DeformedConfig {
            placement: Placement::default(),
            frame: reference.clone(),
        }
    }

    /// Rigid motion `y = Q y⁰ + t`, `R = Q Q⁰`.
    pub fn rigid(reference: &FrameField, q: Rotation, t: Vec3) -> Self {
        DeformedConfig {
            placement: Placement {
                rotation: q,
                translation: t,
                ..Default::default()
            },
            frame: FrameField::rigidly_rotated(&q, reference.clone()),
        }
    }
}

/// Pointwise strain state at a surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainState {
    pub frame0: SurfaceFrame,
    pub q0: Rotation,
    pub r: Rotation,
    pub qe: Rotation,
    pub f: Mat3,
    /// `axl(Rᵀ ∂_α R)`.
    pub kappa: [Vec3; 2],
    /// `axl(Q⁰ᵀ ∂_α Q⁰)`.
    pub kappa0: [Vec3; 2],
    pub ee: Mat3,
    pub ke: Mat3,
    pub k: Mat3,
    pub k0: Mat3,
    pub ee_components: Components,
    pub ke_components: Components,
}

impl StrainState {
    /// Assembles the state from pointwise data. `q0` must carry `d3⁰ = n⁰`.
    pub fn from_pointwise(
        frame0: SurfaceFrame,
        q0: Rotation,
        kappa0: [Vec3; 2],
        f: Mat3,
        r: Rotation,
        kappa: [Vec3; 2],
    ) -> Result<Self> {
        let dev = (q0.director(2) - frame0.normal).norm();
        if !(dev <= DIRECTOR_NORMAL_TOL) {
            return Err(ShellError::DirectorNotNormal(dev));
        }
        let qe = r.compose(&q0.transpose());
        let ee = qe.matrix().transpose() * f - frame0.a;
        let mut ee_components = [[0.0; 2]; 3];
        let mut ke_components = [[0.0; 2]; 3];
        for alpha in 0..2 {
            let dy = f * frame0.covariant[alpha];
            for i in 0..3 {
                ee_components[i][alpha] = dy.dot(&r.director(i)) - frame0.covariant[alpha].dot(&q0.director(i));
                ke_components[i][alpha] = kappa[alpha][i] - kappa0[alpha][i];
            }
        }
        let k = curvature_tensor(&q0, &kappa, &frame0);
        let k0 = curvature_tensor(&q0, &kappa0, &frame0);
        Ok(StrainState {
            frame0,
            q0,
            r,
            qe,
            f,
            kappa,
            kappa0,
            ee,
            ke: k - k0,
            k,
            k0,
            ee_components,
            ke_components,
        })
    }

    /// `Grad_s d3` with `∂_α d3 = R (κ_α × e3)`.
    pub fn grad_d3(&self) -> Mat3 {
        let d = [0, 1].map(|k| self.r.apply(&self.kappa[k].cross(&Vec3::z())));
        self.frame0.gradient(&d)
    }

    pub fn d3(&self) -> Vec3 {
        self.r.director(2)
    }

    /// Rebuilds the state with the same `F` and `R` replaced by `R exp(θ e3)`,
    /// given `θ` and `∂_α θ` at the point.
    pub fn drilled(&self, theta: f64, dtheta: [f64; 2]) -> Self {
        let z = rotation_exp(&(theta * Vec3::z()));
        let zt = z.matrix().transpose();
        let kappa = [0, 1].map(|k| zt * self.kappa[k] + dtheta[k] * Vec3::z());
        let r = self.r.compose(&z);
        Self::from_pointwise(self.frame0, self.q0, self.kappa0, self.f, r, kappa)
            .expect("reference frame unchanged by drilling")
    }

    /// Replaces `Ee`, `Ke` while keeping the reference data, for
    /// quantities that depend on the state only through `(Ee, Ke)`.
    pub fn with_strains(&self, ee: Mat3, ke: Mat3) -> Self {
        let mut s = *self;
        s.ee = ee;
        s.ke = ke;
        s.k = ke + s.k0;
        s.ee_components = components(&ee, &s.q0, &s.frame0);
        s.ke_components = components(&ke, &s.q0, &s.frame0);
        s
    }
}

fn curvature_tensor(q0: &Rotation, kappa: &[Vec3; 2], frame: &SurfaceFrame) -> Mat3 {
    outer(&q0.apply(&kappa[0]), &frame.contravariant[0]) + outer(&q0.apply(&kappa[1]), &frame.contravariant[1])
}

/// `T_{iα} = d_i⁰ · T a_α`.
pub fn components(t: &Mat3, q0: &Rotation, frame: &SurfaceFrame) -> Components {
    let mut c = [[0.0; 2]; 3];
    for (i, row) in c.iter_mut().enumerate() {
        for (alpha, v) in row.iter_mut().enumerate() {
            *v = q0.director(i).dot(&(t * frame.covariant[alpha]));
        }
    }
    c
}

/// `Σ T_{iα} d_i⁰ ⊗ a^α`.
pub fn from_components(c: &Components, q0: &Rotation, frame: &SurfaceFrame) -> Mat3 {
    let mut t = Mat3::zeros();
    for (i, row) in c.iter().enumerate() {
        for (alpha, v) in row.iter().enumerate() {
            t += *v * outer(&q0.director(i), &frame.contravariant[alpha]);
        }
    }
    t
}

/// `Qᵉ = R Q⁰ᵀ = d_i ⊗ d_i⁰`.
pub fn elastic_rotation(reference: &FrameField, deformed: &FrameField, x: Coords2) -> Result<Rotation> {
    let q0 = reference.rotation(x)?;
    let r = deformed.rotation(x)?;
    Ok(r.compose(&q0.transpose()))
}

/// Full strain state of `config` relative to the reference frame field.
pub fn strain_state(
    config: &DeformedConfig,
    reference: &FrameField,
    chart: &SurfaceChart,
    x: Coords2,
) -> Result<StrainState> {
    let frame0 = chart.frame_at(x)?;
    let (q0, dq0) = reference.with_partials(chart, x)?;
    let (r, dr) = config.frame.with_partials(chart, x)?;
    let kappa0 = [0, 1].map(|k| axl_of_skew_part(&(q0.matrix().transpose() * dq0[k])));
    let kappa = [0, 1].map(|k| axl_of_skew_part(&(r.matrix().transpose() * dr[k])));
    let f = frame0.gradient(&config.placement.partials(chart, x));
    StrainState::from_pointwise(frame0, q0, kappa0, f, r, kappa)
}

/// `Ee = Qeᵀ F − a`.
pub fn strain_tensor(
    config: &DeformedConfig,
    reference: &FrameField,
    chart: &SurfaceChart,
    x: Coords2,
) -> Result<Mat3> {
    Ok(strain_state(config, reference, chart, x)?.ee)
}

/// The three evaluations of `Ke`: the axial form `axl(Qeᵀ ∂_α Qe) ⊗ a^α`,
/// the split `K − K⁰`, and the director components
/// `½ e_ijk (∂_α d_j · d_k − ∂_α d_j⁰ · d_k⁰)`.
#[derive(Debug, Clone, Copy)]
pub struct CurvatureForms {
    pub axial: Mat3,
    pub split: Mat3,
    pub components: Mat3,
    pub k: Mat3,
    pub k0: Mat3,
}

pub fn bending_curvature(
    config: &DeformedConfig,
    reference: &FrameField,
    chart: &SurfaceChart,
    x: Coords2,
) -> Result<CurvatureForms> {
    let state = strain_state(config, reference, chart, x)?;
    let frame = &state.frame0;
    let (q0, dq0) = reference.with_partials(chart, x)?;
    let (r, dr) = config.frame.with_partials(chart, x)?;

    let qe = r.matrix() * q0.matrix().transpose();
    let axial_vectors = [0, 1].map(|k| {
        let dqe = dr[k] * q0.matrix().transpose() + r.matrix() * dq0[k].transpose();
        axl_of_skew_part(&(qe.transpose() * dqe))
    });
    let axial = outer(&axial_vectors[0], &frame.contravariant[0]) + outer(&axial_vectors[1], &frame.contravariant[1]);

    let director_components = |m: &Mat3, dm: &Mat3| {
        let d = |j: usize| m.column(j).into_owned();
        let dd = |j: usize| dm.column(j).into_owned();
        Vec3::new(dd(1).dot(&d(2)), dd(2).dot(&d(0)), dd(0).dot(&d(1)))
    };
    let mut comps = [[0.0; 2]; 3];
    for alpha in 0..2 {
        let kd = director_components(r.matrix(), &dr[alpha]);
        let k0d = director_components(q0.matrix(), &dq0[alpha]);
        for i in 0..3 {
            comps[i][alpha] = kd[i] - k0d[i];
        }
    }
    Ok(CurvatureForms {
        axial,
        split: state.k - state.k0,
        components: from_components(&comps, &q0, frame),
        k: state.k,
        k0: state.k0,
    })
}
