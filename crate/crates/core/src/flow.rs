//! Characteristic flow `dEe/ds = c(Ee + a)`, `dKe/ds = c(Ke + K⁰)` with
//! geometry frozen at a point, integrated by classical RK4.

use crate::error::{Result, ShellError};
use crate::measures::{first_integrals_of, FirstIntegrals, FrozenGeometry};
use crate::tensor::{outer, Mat3};

pub const MIN_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState {
    pub s: f64,
    pub ee: Mat3,
    pub ke: Mat3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub geometry: FrozenGeometry,
    pub samples: Vec<FlowState>,
}

fn rate(g: &FrozenGeometry, ee: &Mat3, ke: &Mat3) -> (Mat3, Mat3) {
    (g.c * (ee + g.a), g.c * (ke + g.k0))
}

/// Fixed-step RK4 from `s = 0` to `s_end`; the trajectory holds every step.
pub fn integrate_flow(geometry: FrozenGeometry, ee: Mat3, ke: Mat3, s_end: f64, steps: usize) -> Result<Trajectory> {
    if steps < MIN_STEPS {
        return Err(ShellError::InvalidArgument(format!(
            "flow needs at least {MIN_STEPS} steps, got {steps}"
        )));
    }
    if !s_end.is_finite() {
        return Err(ShellError::InvalidArgument("non-finite flow length".into()));
    }
    let h = s_end / steps as f64;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut cur = FlowState { s: 0.0, ee, ke };
    samples.push(cur);
    for i in 0..steps {
        let (e, k) = (cur.ee, cur.ke);
        let (e1, k1) = rate(&geometry, &e, &k);
        let (e2, k2) = rate(&geometry, &(e + 0.5 * h * e1), &(k + 0.5 * h * k1));
        let (e3, k3) = rate(&geometry, &(e + 0.5 * h * e2), &(k + 0.5 * h * k2));
        let (e4, k4) = rate(&geometry, &(e + h * e3), &(k + h * k3));
        cur = FlowState {
            s: (i + 1) as f64 * h,
            ee: e + h / 6.0 * (e1 + 2.0 * e2 + 2.0 * e3 + e4),
            ke: k + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4),
        };
        samples.push(cur);
    }
    Ok(Trajectory { geometry, samples })
}

/// Exact solution: `(Ee + a)(s) = (n ⊗ n + cos s a + sin s c)(Ee + a)(0)`,
/// likewise for `Ke + K⁰`.
pub fn closed_form(geometry: &FrozenGeometry, ee: &Mat3, ke: &Mat3, s: f64) -> FlowState {
    let g = geometry;
    let m = outer(&g.n, &g.n) + s.cos() * g.a + s.sin() * g.c;
    FlowState {
        s,
        ee: m * (ee + g.a) - g.a,
        ke: m * (ke + g.k0) - g.k0,
    }
}

impl Trajectory {
    pub fn first_integrals(&self) -> Vec<FirstIntegrals> {
        self.samples
            .iter()
            .map(|p| first_integrals_of(&p.ee, &p.ke, &self.geometry))
            .collect()
    }

    /// `max_s ‖U_k(s) − U_k(0)‖` (Frobenius), `k = 1..5`.
    pub fn first_integral_drift(&self) -> [f64; 5] {
        self.quantity_drift(|u| {
            [
                u.u1.as_slice().to_vec(),
                u.u2.as_slice().to_vec(),
                u.u3.as_slice().to_vec(),
                u.u4.as_slice().to_vec(),
                u.u5.as_slice().to_vec(),
            ]
        })
    }

    fn quantity_drift<const N: usize>(&self, q: impl Fn(&FirstIntegrals) -> [Vec<f64>; N]) -> [f64; N] {
        let all = self.first_integrals();
        let q0 = q(&all[0]);
        let mut drift = [0.0f64; N];
        for u in &all {
            let qk = q(u);
            for k in 0..N {
                let d: f64 = qk[k].iter().zip(&q0[k]).map(|(a, b)| (a - b).powi(2)).sum();
                drift[k] = drift[k].max(d.sqrt());
            }
        }
        drift
    }

    /// `max_s ‖X(s) − X(0)‖` for an arbitrary function of the flow state.
    pub fn drift_of(&self, q: impl Fn(&FlowState) -> Mat3) -> f64 {
        let q0 = q(&self.samples[0]);
        self.samples.iter().map(|p| (q(p) - q0).norm()).fold(0.0, f64::max)
    }

    /// Distance between the final and initial `(Ee, Ke)`.
    pub fn return_error(&self) -> f64 {
        let first = self.samples[0];
        let last = self.samples[self.samples.len() - 1];
        (last.ee - first.ee).norm().max((last.ke - first.ke).norm())
    }

    /// Largest distance from the closed-form solution over the trajectory.
    pub fn closed_form_error(&self) -> f64 {
        let first = self.samples[0];
        self.samples
            .iter()
            .map(|p| {
                let exact = closed_form(&self.geometry, &first.ee, &first.ke, p.s);
                (p.ee - exact.ee).norm().max((p.ke - exact.ke).norm())
            })
            .fold(0.0, f64::max)
    }

    /// `max_s ‖(Ee + a)ᵀ n⁰ s-row‖` and `‖Ee n⁰‖` style kernel defects.
    pub fn kernel_defect(&self) -> f64 {
        let n = self.geometry.n;
        self.samples
            .iter()
            .map(|p| (p.ee * n).norm().max((p.ke * n).norm()))
            .fold(0.0, f64::max)
    }
}
