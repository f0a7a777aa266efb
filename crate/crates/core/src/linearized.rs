//! Infinitesimal kinematics: linearized strains and reduced measures, and
//! their first-order consistency with the nonlinear theory.

use serde::Serialize;

use crate::error::{Result, ShellError};
use crate::fields::{Series, VecSeries};
use crate::geometry::{SurfaceChart, SurfaceFrame};
use crate::kinematics::{strain_state, DeformedConfig, FrameField, Placement};
use crate::measures::{strain_measures, ReducedMeasures};
use crate::tensor::{outer, skew, skw, sym, Coords2, Mat3, Vec3};

/// Small displacement `u` and small rotation `ψ = ψ_t + ψ3 n⁰`, with the
/// drilling component `ψ3` kept as its own scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearState {
    pub u: VecSeries,
    pub psi: VecSeries,
    pub drill: Series,
}

impl LinearState {
    pub fn new(u: VecSeries, psi: VecSeries) -> Self {
        LinearState {
            u,
            psi,
            drill: Series::zero(),
        }
    }

    pub fn with_drill(mut self, drill: Series) -> Self {
        self.drill = drill;
        self
    }

    /// Total rotation vector and its coordinate partials.
    fn rotation_vector(&self, frame: &SurfaceFrame, dn: &[Vec3; 2], x: Coords2) -> (Vec3, [Vec3; 2]) {
        let t = self.drill.value(x);
        let dt = self.drill.gradient(x);
        let dp = self.psi.partials(x);
        let value = self.psi.value(x) + t * frame.normal;
        let partials = [0, 1].map(|k| dp[k] + dt[k] * frame.normal + t * dn[k]);
        (value, partials)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearStrains {
    pub ee: Mat3,
    pub ke: Mat3,
}

struct Pointwise {
    frame: SurfaceFrame,
    grad_u: Mat3,
    psi: Vec3,
    grad_psi: Mat3,
    grad_a_psi: Mat3,
}

fn pointwise(lin: &LinearState, chart: &SurfaceChart, x: Coords2) -> Result<Pointwise> {
    let frame = chart.frame_at(x)?;
    let dn = chart.normal_partials(x)?;
    let (psi, dpsi) = lin.rotation_vector(&frame, &dn, x);
    let n = frame.normal;
    // ∂(aψ) = ∂ψ − (∂ψ·n + ψ·∂n) n − (ψ·n) ∂n
    let da_psi = [0, 1].map(|k| dpsi[k] - (dpsi[k].dot(&n) + psi.dot(&dn[k])) * n - psi.dot(&n) * dn[k]);
    Ok(Pointwise {
        grad_u: frame.gradient(&lin.u.partials(x)),
        grad_psi: frame.gradient(&dpsi),
        grad_a_psi: frame.gradient(&da_psi),
        psi,
        frame,
    })
}

/// `Ee ≐ Grad u − ψ × a`, `Ke ≐ Grad ψ`.
pub fn linear_strains(lin: &LinearState, chart: &SurfaceChart, x: Coords2) -> Result<LinearStrains> {
    let p = pointwise(lin, chart, x)?;
    Ok(LinearStrains {
        ee: p.grad_u - skew(&p.psi) * p.frame.a,
        ke: p.grad_psi,
    })
}

/// `𝓔 ≐ sym(a Grad u)`, `γ ≐ (Grad u)ᵀ n⁰ + cψ`,
/// `Ψ ≐ c Grad(aψ) + skw(a Grad u) b`, and `Φ ≐ a Grad ψ − skw(aEe) c b`.
pub fn linear_measures(lin: &LinearState, chart: &SurfaceChart, x: Coords2) -> Result<ReducedMeasures> {
    let p = pointwise(lin, chart, x)?;
    let (a, b, c) = (&p.frame.a, &p.frame.b, &p.frame.c);
    let ee = p.grad_u - skew(&p.psi) * a;
    Ok(ReducedMeasures {
        strain: sym(&(a * p.grad_u)),
        shear: p.grad_u.transpose() * p.frame.normal + c * p.psi,
        psi: c * p.grad_a_psi + skw(&(a * p.grad_u)) * b,
        phi: a * p.grad_psi - skw(&(a * ee)) * c * b,
    })
}

/// First-order truncation of the strain-based measure formulas.
pub fn linearized_from_strains(s: &LinearStrains, frame: &SurfaceFrame) -> ReducedMeasures {
    let (a, b, c) = (&frame.a, &frame.b, &frame.c);
    let e_par = a * s.ee;
    ReducedMeasures {
        strain: sym(&e_par),
        shear: s.ee.transpose() * frame.normal,
        psi: a * c * s.ke + skw(&e_par) * b,
        phi: a * s.ke - skw(&e_par) * c * b,
    }
}

/// Nonlinear configuration `y = y⁰ + εu`, `R = exp(εψ_t) Q⁰ exp(εψ3 e3)`,
/// which agrees with `exp(εψ) Q⁰` to first order.
pub fn nonlinear_config(lin: &LinearState, reference: &FrameField, eps: f64) -> DeformedConfig {
    let rotated = FrameField::rotated(lin.psi.scaled(eps), reference.clone());
    let frame = if lin.drill.is_zero() {
        rotated
    } else {
        FrameField::drilled(lin.drill.scaled(eps), rotated)
    };
    DeformedConfig {
        placement: Placement::displaced(lin.u.scaled(eps)),
        frame,
    }
}

/// Defects `‖X(ε) − ε X_lin‖_max` of the strains and the four measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefectRow {
    pub eps: f64,
    pub ee: f64,
    pub ke: f64,
    pub strain: f64,
    pub shear: f64,
    pub psi: f64,
    pub phi: f64,
}

impl DefectRow {
    pub fn max(&self) -> f64 {
        [self.ee, self.ke, self.strain, self.shear, self.psi, self.phi]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn linearization_defects(
    lin: &LinearState,
    chart: &SurfaceChart,
    x: Coords2,
    eps: &[f64],
) -> Result<Vec<DefectRow>> {
    if eps.len() < 2 || eps.iter().any(|e| !(*e > 0.0)) {
        return Err(ShellError::InvalidArgument(
            "linearization needs at least two positive amplitudes".into(),
        ));
    }
    let reference = FrameField::Reference(chart.clone());
    let strains = linear_strains(lin, chart, x)?;
    let measures = linear_measures(lin, chart, x)?;
    eps.iter()
        .map(|&e| {
            let state = strain_state(&nonlinear_config(lin, &reference, e), &reference, chart, x)?;
            let m = strain_measures(&state);
            Ok(DefectRow {
                eps: e,
                ee: (state.ee - e * strains.ee).amax(),
                ke: (state.ke - e * strains.ke).amax(),
                strain: (m.strain - e * measures.strain).amax(),
                shear: (m.shear - e * measures.shear).amax(),
                psi: (m.psi - e * measures.psi).amax(),
                phi: (m.phi - e * measures.phi).amax(),
            })
        })
        .collect()
}

/// Successive ratios `defect(ε_k) / defect(ε_{k+1})` of the worst column.
pub fn convergence_ratios(rows: &[DefectRow]) -> Vec<f64> {
    rows.windows(2).map(|w| w[0].max() / w[1].max()).collect()
}

/// `‖Ψ_lin − c Φ_lin‖_max`.
pub fn psi_phi_defect(m: &ReducedMeasures, frame: &SurfaceFrame) -> f64 {
    (m.psi - frame.c * m.phi).amax()
}

/// Drill-only rigid field on a flat plate: `ψ = θ(x) e3` with the matching
/// in-plane displacement `u = 0`, for which `Ke = e3 ⊗ Grad θ`.
pub fn drill_gradient_tensor(grad_theta: [f64; 2], frame: &SurfaceFrame) -> Mat3 {
    outer(
        &frame.normal,
        &(grad_theta[0] * frame.contravariant[0] + grad_theta[1] * frame.contravariant[1]),
    )
}
