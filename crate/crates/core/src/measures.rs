//! First integrals `U1..U5` and the drill-invariant measures `𝓔, γ, Ψ, Φ`.
//!
//! `n⁰ × b` is the left action of the skew map `n⁰ × 1` on `b`, which
//! equals `−c b` since `b` has tangential range.

use crate::error::Result;
use crate::geometry::{SurfaceChart, SurfaceFrame};
use crate::kinematics::{DeformedConfig, StrainState};
use crate::tensor::{outer, skew, skw, sym, Coords2, Mat3, Vec3};

/// Point geometry frozen at a surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenGeometry {
    pub a: Mat3,
    pub b: Mat3,
    pub c: Mat3,
    pub n: Vec3,
    pub k0: Mat3,
}

impl FrozenGeometry {
    pub fn of(state: &StrainState) -> Self {
        FrozenGeometry {
            a: state.frame0.a,
            b: state.frame0.b,
            c: state.frame0.c,
            n: state.frame0.normal,
            k0: state.k0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstIntegrals {
    pub u1: Mat3,
    pub u2: Vec3,
    pub u3: Mat3,
    pub u4: Vec3,
    pub u5: Mat3,
}

impl FirstIntegrals {
    /// Component-wise maximum difference, one entry per `U_k`.
    pub fn max_difference(&self, other: &FirstIntegrals) -> [f64; 5] {
        [
            (self.u1 - other.u1).amax(),
            (self.u2 - other.u2).amax(),
            (self.u3 - other.u3).amax(),
            (self.u4 - other.u4).amax(),
            (self.u5 - other.u5).amax(),
        ]
    }
}

pub fn first_integrals_of(ee: &Mat3, ke: &Mat3, g: &FrozenGeometry) -> FirstIntegrals {
    let e = ee + g.a;
    let k = ke + g.k0;
    FirstIntegrals {
        u1: e.transpose() * e,
        u2: ee.transpose() * g.n,
        u3: e.transpose() * g.c * k,
        u4: ke.transpose() * g.n,
        u5: e.transpose() * g.a * k,
    }
}

pub fn first_integrals(state: &StrainState) -> FirstIntegrals {
    first_integrals_of(&state.ee, &state.ke, &FrozenGeometry::of(state))
}

/// `(FᵀF, Fᵀd3, Fᵀ Grad_s d3, Fᵀ(d3 × Grad_s d3))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientInvariants {
    pub ftf: Mat3,
    pub ftd3: Vec3,
    pub ft_grad_d3: Mat3,
    pub ft_d3_cross_grad_d3: Mat3,
}

impl GradientInvariants {
    pub fn new(f: &Mat3, d3: &Vec3, grad_d3: &Mat3) -> Self {
        GradientInvariants {
            ftf: f.transpose() * f,
            ftd3: f.transpose() * d3,
            ft_grad_d3: f.transpose() * grad_d3,
            ft_d3_cross_grad_d3: f.transpose() * skew(d3) * grad_d3,
        }
    }

    pub fn of_state(state: &StrainState) -> Self {
        Self::new(&state.f, &state.d3(), &state.grad_d3())
    }
}

/// Evaluates the invariants directly from the fields `y` and `d3`.
pub fn reduced_from_gradients(config: &DeformedConfig, chart: &SurfaceChart, x: Coords2) -> Result<GradientInvariants> {
    let frame = chart.frame_at(x)?;
    let f = frame.gradient(&config.placement.partials(chart, x));
    let (r, dr) = config.frame.with_partials(chart, x)?;
    let grad_d3 = frame.gradient(&[dr[0].column(2).into_owned(), dr[1].column(2).into_owned()]);
    Ok(GradientInvariants::new(&f, &r.director(2), &grad_d3))
}

/// The measures `𝓔, γ, Ψ, Φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedMeasures {
    pub strain: Mat3,
    pub shear: Vec3,
    pub psi: Mat3,
    pub phi: Mat3,
}

impl ReducedMeasures {
    pub fn zero() -> Self {
        ReducedMeasures {
            strain: Mat3::zeros(),
            shear: Vec3::zeros(),
            psi: Mat3::zeros(),
            phi: Mat3::zeros(),
        }
    }

    pub fn max_difference(&self, other: &ReducedMeasures) -> f64 {
        (self.strain - other.strain)
            .amax()
            .max((self.shear - other.shear).amax())
            .max((self.psi - other.psi).amax())
            .max((self.phi - other.phi).amax())
    }
}

/// `n⁰ × b`.
pub fn normal_cross_b(frame: &SurfaceFrame) -> Mat3 {
    skew(&frame.normal) * frame.b
}

/// Definitions in terms of `F` and `d3`.
pub fn measures_from_gradients(g: &GradientInvariants, frame: &SurfaceFrame) -> ReducedMeasures {
    let strain = 0.5 * (g.ftf - frame.a);
    let nxb = normal_cross_b(frame);
    ReducedMeasures {
        strain,
        shear: g.ftd3,
        psi: (g.ft_grad_d3 + frame.b) + strain * frame.b,
        phi: (g.ft_d3_cross_grad_d3 + nxb) + strain * nxb,
    }
}

/// Alternative forms in terms of `Ee`, `Ke`.
pub fn measures_from_strains(ee: &Mat3, ke: &Mat3, frame: &SurfaceFrame) -> ReducedMeasures {
    let (a, b, c) = (&frame.a, &frame.b, &frame.c);
    let e_par = a * ee;
    let k_par = a * ke;
    let quad = 0.5 * ee.transpose() * ee;
    let bracket = quad + skw(&e_par);
    let et_a = ee.transpose() + a;
    ReducedMeasures {
        strain: quad + sym(&e_par),
        shear: ee.transpose() * frame.normal,
        psi: et_a * c * ke + bracket * b,
        phi: et_a * k_par - bracket * c * b,
    }
}

pub fn strain_measures(state: &StrainState) -> ReducedMeasures {
    measures_from_gradients(&GradientInvariants::of_state(state), &state.frame0)
}

/// `dev₂ sym T = sym(aTa) − ½ tr(aTa) a`.
pub fn dev2_sym(t: &Mat3, a: &Mat3) -> Mat3 {
    let p = a * t * a;
    sym(&p) - 0.5 * p.trace() * a
}

/// Planar tensor `Σ t_{αβ} d_α ⊗ d_β` from an orthonormal tangent pair.
pub fn planar_tensor(t: [[f64; 2]; 2], d: [Vec3; 2]) -> Mat3 {
    let mut m = Mat3::zeros();
    for i in 0..2 {
        for j in 0..2 {
            m += t[i][j] * outer(&d[i], &d[j]);
        }
    }
    m
}
