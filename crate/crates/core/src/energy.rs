//! Isotropic shell energies, coefficient sets, the 12×12 quadratic form
//! and the stress resultants `N = Qe ∂W/∂Ee`, `M = Qe ∂W/∂Ke`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::eigen::{jacobi_eigen, SymmetricEigen};
use crate::error::{Result, ShellError};
use crate::geometry::SurfaceFrame;
use crate::kinematics::StrainState;
use crate::measures::{dev2_sym, measures_from_strains, ReducedMeasures};
use crate::tensor::{dot, outer, skw, Coords2, Mat3, Vec3};

pub const DEFAULT_ALPHA_S: f64 = 5.0 / 6.0;
pub const DEFAULT_ALPHA_T: f64 = 7.0 / 10.0;
pub const DEFAULT_KAPPA: f64 = 5.0 / 6.0;

fn default_alpha_s() -> f64 {
    DEFAULT_ALPHA_S
}
fn default_alpha_t() -> f64 {
    DEFAULT_ALPHA_T
}
fn default_kappa() -> f64 {
    DEFAULT_KAPPA
}

/// Material and thickness data of a homogeneous isotropic shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineeringParams {
    #[serde(rename = "E")]
    pub young: f64,
    pub nu: f64,
    pub h: f64,
    #[serde(default = "default_alpha_s")]
    pub alpha_s: f64,
    #[serde(default = "default_alpha_t")]
    pub alpha_t: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
}

impl EngineeringParams {
    pub fn new(young: f64, nu: f64, h: f64) -> Result<Self> {
        let p = EngineeringParams {
            young,
            nu,
            h,
            alpha_s: DEFAULT_ALPHA_S,
            alpha_t: DEFAULT_ALPHA_T,
            kappa: DEFAULT_KAPPA,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ShellError::InvalidArgument(m));
        if !(self.young > 0.0) {
            return bad(format!("Young modulus must be positive, got {}", self.young));
        }
        if !(self.nu > -1.0 && self.nu < 0.5) {
            return bad(format!("Poisson ratio must lie in (-1, 1/2), got {}", self.nu));
        }
        if !(self.h > 0.0) {
            return bad(format!("thickness must be positive, got {}", self.h));
        }
        for (name, v) in [
            ("alpha_s", self.alpha_s),
            ("alpha_t", self.alpha_t),
            ("kappa", self.kappa),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }

    /// Stretching stiffness `C = Eh/(1−ν²)`.
    pub fn stretching(&self) -> f64 {
        self.young * self.h / (1.0 - self.nu * self.nu)
    }

    /// Bending stiffness `D = Eh³/(12(1−ν²))`.
    pub fn bending(&self) -> f64 {
        self.young * self.h.powi(3) / (12.0 * (1.0 - self.nu * self.nu))
    }

    /// Three-dimensional Lamé moduli `(λ, μ)`.
    pub fn lame(&self) -> (f64, f64) {
        let (e, nu) = (self.young, self.nu);
        (e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu)))
    }
}

/// Coefficients `α1..α4`, `β1..β4` of the general isotropic quadratic energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyCoefficients {
    pub alpha: [f64; 4],
    pub beta: [f64; 4],
}

impl EnergyCoefficients {
    pub fn pietraszkiewicz(p: &EngineeringParams) -> Self {
        let (c, d, nu) = (p.stretching(), p.bending(), p.nu);
        EnergyCoefficients {
            alpha: [c * nu, 0.0, c * (1.0 - nu), p.alpha_s * c * (1.0 - nu)],
            beta: [d * nu, 0.0, d * (1.0 - nu), p.alpha_t * d * (1.0 - nu)],
        }
    }

    pub fn drill_free(p: &EngineeringParams) -> Self {
        let (c, d, nu) = (p.stretching(), p.bending(), p.nu);
        EnergyCoefficients {
            alpha: [
                c * nu,
                0.5 * c * (1.0 - nu),
                0.5 * c * (1.0 - nu),
                0.5 * c * (1.0 - nu) * p.kappa,
            ],
            beta: [-0.5 * d * (1.0 - nu), -d * nu, d, 0.0],
        }
    }

    /// The drill-free set written with the Lamé moduli.
    pub fn drill_free_lame(p: &EngineeringParams) -> Self {
        let (lambda, mu) = p.lame();
        let h = p.h;
        let h3 = h.powi(3) / 12.0;
        let plane = 2.0 * mu * lambda / (2.0 * mu + lambda);
        EnergyCoefficients {
            alpha: [h * plane, h * mu, h * mu, h * mu * p.kappa],
            beta: [
                -h3 * mu,
                -h3 * plane,
                h3 * 4.0 * mu * (mu + lambda) / (2.0 * mu + lambda),
                0.0,
            ],
        }
    }

    /// The strict inequalities under which the energy is coercive.
    pub fn coercivity_conditions(&self) -> [bool; 8] {
        let [a1, a2, a3, a4] = self.alpha;
        let [b1, b2, b3, b4] = self.beta;
        [
            2.0 * a1 + a2 + a3 > 0.0,
            a2 + a3 > 0.0,
            a3 - a2 > 0.0,
            a4 > 0.0,
            2.0 * b1 + b2 + b3 > 0.0,
            b2 + b3 > 0.0,
            b3 - b2 > 0.0,
            b4 > 0.0,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|v| v.is_finite())
    }
}

/// `2W` of the general pattern for one of the two tensors.
fn general_part(t: &Mat3, frame: &SurfaceFrame, k: &[f64; 4]) -> f64 {
    let p = frame.a * t;
    let tr = p.trace();
    let row = t.transpose() * frame.normal;
    k[0] * tr * tr + k[1] * (p * p).trace() + k[2] * dot(&p, &p) + k[3] * row.norm_squared()
}

fn general_gradient(t: &Mat3, frame: &SurfaceFrame, k: &[f64; 4]) -> Mat3 {
    let a = &frame.a;
    let p = a * t;
    let row = t.transpose() * frame.normal;
    (k[0] * p.trace() * a + k[1] * a * p.transpose() + k[2] * p + k[3] * outer(&frame.normal, &row)) * a
}

/// The general isotropic quadratic energy `W(Ee, Ke)`.
pub fn energy_general(ee: &Mat3, ke: &Mat3, frame: &SurfaceFrame, coeff: &EnergyCoefficients) -> f64 {
    0.5 * (general_part(ee, frame, &coeff.alpha) + general_part(ke, frame, &coeff.beta))
}

/// `(∂W/∂Ee, ∂W/∂Ke)` of [`energy_general`], restricted to tensors with
/// `n⁰` in their right kernel.
pub fn gradient_general(ee: &Mat3, ke: &Mat3, frame: &SurfaceFrame, coeff: &EnergyCoefficients) -> (Mat3, Mat3) {
    (
        general_gradient(ee, frame, &coeff.alpha),
        general_gradient(ke, frame, &coeff.beta),
    )
}

fn membrane_and_shear(m: &ReducedMeasures, p: &EngineeringParams) -> f64 {
    let (c, nu) = (p.stretching(), p.nu);
    let tr = m.strain.trace();
    c * ((1.0 - nu) * m.strain.norm_squared() + nu * tr * tr) + 0.5 * c * (1.0 - nu) * p.kappa * m.shear.norm_squared()
}

/// Energy in terms of `𝓔, γ, Φ`.
pub fn energy_phi(m: &ReducedMeasures, p: &EngineeringParams) -> f64 {
    let (d, nu) = (p.bending(), p.nu);
    let phi = &m.phi;
    let tr = phi.trace();
    0.5 * (membrane_and_shear(m, p) + d * (phi.norm_squared() - nu * (phi * phi).trace() - 0.5 * (1.0 - nu) * tr * tr))
}

/// Energy in terms of `𝓔, γ, Ψ`, expanded form.
pub fn energy_psi_expanded(m: &ReducedMeasures, p: &EngineeringParams) -> f64 {
    let (d, nu) = (p.bending(), p.nu);
    let psi = &m.psi;
    let tr = psi.trace();
    0.5 * (membrane_and_shear(m, p)
        + d * (0.5 * (1.0 - nu) * psi.norm_squared() + 0.5 * (1.0 - nu) * (psi * psi).trace() + nu * tr * tr))
}

/// Energy in terms of `𝓔, γ, Ψ`, trace/deviator form.
pub fn energy_psi_deviatoric(m: &ReducedMeasures, a: &Mat3, p: &EngineeringParams) -> f64 {
    let (d, nu) = (p.bending(), p.nu);
    let tr = m.psi.trace();
    0.5 * (membrane_and_shear(m, p)
        + d * (0.5 * (1.0 + nu) * tr * tr + (1.0 - nu) * dev2_sym(&m.psi, a).norm_squared()))
}

/// The trace/deviator `Ψ`-energy written out in `Ee`, `Ke`.
pub fn energy_composed(ee: &Mat3, ke: &Mat3, frame: &SurfaceFrame, p: &EngineeringParams) -> f64 {
    let (a, b, c) = (&frame.a, &frame.b, &frame.c);
    let (cc, d, nu) = (p.stretching(), p.bending(), p.nu);
    let e_par = a * ee;
    let k_par = a * ke;
    let quad = 0.5 * ee.transpose() * ee;
    let norm2 = ee.norm_squared();
    let stretch_tr = 0.5 * norm2 + e_par.trace();
    let stretch_dev = quad - 0.25 * norm2 * a + dev2_sym(&e_par, a);
    let bend = e_par.transpose() * c * k_par + c * k_par + (quad + skw(&e_par)) * b;
    let shear = ee.transpose() * frame.normal;
    0.5 * (cc * (0.5 * (1.0 + nu) * stretch_tr * stretch_tr + (1.0 - nu) * stretch_dev.norm_squared())
        + 0.5 * cc * (1.0 - nu) * p.kappa * shear.norm_squared()
        + d * (0.5 * (1.0 + nu) * bend.trace().powi(2) + (1.0 - nu) * dev2_sym(&bend, a).norm_squared()))
}

/// Quadratic drill-free energy written out in `Ee`, `Ke`.
pub fn energy_quadratic_drill_free(ee: &Mat3, ke: &Mat3, frame: &SurfaceFrame, p: &EngineeringParams) -> f64 {
    let a = &frame.a;
    let (c, d, nu) = (p.stretching(), p.bending(), p.nu);
    let e = a * ee;
    let k = a * ke;
    let shear = ee.transpose() * frame.normal;
    0.5 * (c * (nu * e.trace().powi(2) + 0.5 * (1.0 - nu) * (e * e).trace() + 0.5 * (1.0 - nu) * dot(&e, &e))
        + 0.5 * c * (1.0 - nu) * p.kappa * shear.norm_squared()
        + d * (dot(&k, &k) - 0.5 * (1.0 - nu) * k.trace().powi(2) - nu * (k * k).trace()))
}

/// Which of the drill-invariant energies to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReducedForm {
    Phi,
    PsiExpanded,
    PsiDeviatoric,
    Composed,
    QuadraticDrillFree,
}

impl ReducedForm {
    pub const ALL: [ReducedForm; 5] = [
        ReducedForm::Phi,
        ReducedForm::PsiExpanded,
        ReducedForm::PsiDeviatoric,
        ReducedForm::Composed,
        ReducedForm::QuadraticDrillFree,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ReducedForm::Phi => "phi",
            ReducedForm::PsiExpanded => "psi_expanded",
            ReducedForm::PsiDeviatoric => "psi_deviatoric",
            ReducedForm::Composed => "composed",
            ReducedForm::QuadraticDrillFree => "quadratic_drill_free",
        }
    }
}

/// A strain-energy density `W(Ee, Ke)` per unit reference area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyModel {
    General(EnergyCoefficients),
    Reduced {
        form: ReducedForm,
        params: EngineeringParams,
    },
}

impl EnergyModel {
    pub fn name(&self) -> &'static str {
        match self {
            EnergyModel::General(_) => "general",
            EnergyModel::Reduced { form, .. } => form.name(),
        }
    }

    /// Coefficients when the density is exactly quadratic.
    pub fn quadratic_coefficients(&self) -> Option<EnergyCoefficients> {
        match self {
            EnergyModel::General(c) => Some(*c),
            EnergyModel::Reduced {
                form: ReducedForm::QuadraticDrillFree,
                params,
            } => Some(EnergyCoefficients::drill_free(params)),
            _ => None,
        }
    }

    pub fn density_strains(&self, ee: &Mat3, ke: &Mat3, frame: &SurfaceFrame) -> f64 {
        match self {
            EnergyModel::General(c) => energy_general(ee, ke, frame, c),
            EnergyModel::Reduced { form, params } => match form {
                ReducedForm::Phi => energy_phi(&measures_from_strains(ee, ke, frame), params),
                ReducedForm::PsiExpanded => energy_psi_expanded(&measures_from_strains(ee, ke, frame), params),
                ReducedForm::PsiDeviatoric => {
                    energy_psi_deviatoric(&measures_from_strains(ee, ke, frame), &frame.a, params)
                }
                ReducedForm::Composed => energy_composed(ee, ke, frame, params),
                ReducedForm::QuadraticDrillFree => energy_quadratic_drill_free(ee, ke, frame, params),
            },
        }
    }

    pub fn density(&self, state: &StrainState) -> f64 {
        self.density_strains(&state.ee, &state.ke, &state.frame0)
    }

    /// Drill-invariant forms evaluated on given measures; `None` for the
    /// general and explicitly strain-based forms.
    pub fn density_measures(&self, m: &ReducedMeasures, frame: &SurfaceFrame) -> Option<f64> {
        match self {
            EnergyModel::Reduced { form, params } => match form {
                ReducedForm::Phi => Some(energy_phi(m, params)),
                ReducedForm::PsiExpanded => Some(energy_psi_expanded(m, params)),
                ReducedForm::PsiDeviatoric => Some(energy_psi_deviatoric(m, &frame.a, params)),
                _ => None,
            },
            _ => None,
        }
    }

    /// `(∂W/∂Ee, ∂W/∂Ke)`: analytic for quadratic densities, central
    /// differences otherwise.
    pub fn gradient(&self, ee: &Mat3, ke: &Mat3, frame: &SurfaceFrame) -> (Mat3, Mat3) {
        match self.quadratic_coefficients() {
            Some(c) => gradient_general(ee, ke, frame, &c),
            None => fd_gradient(self, ee, ke, frame),
        }
    }
}

/// Orthonormal basis `{d_i}` with `d3 = n⁰` for component perturbations.
fn component_directions(frame: &SurfaceFrame) -> ([Vec3; 3], [Vec3; 2], [Vec3; 2]) {
    let o = frame.orthonormal();
    ([o.d1, o.d2, o.n], frame.contravariant, frame.covariant)
}

/// Central-difference gradient over the 12 components `T_{iα}` in the
/// basis `d_i ⊗ a^α`, step `1e-6 (1 + ‖(Ee, Ke)‖)`.
pub fn fd_gradient(model: &EnergyModel, ee: &Mat3, ke: &Mat3, frame: &SurfaceFrame) -> (Mat3, Mat3) {
    let (d, up, down) = component_directions(frame);
    let step = 1e-6 * (1.0 + (ee.norm_squared() + ke.norm_squared()).sqrt());
    let mut g = [Mat3::zeros(), Mat3::zeros()];
    for which in 0..2 {
        for i in 0..3 {
            for alpha in 0..2 {
                let dir = outer(&d[i], &up[alpha]) * step;
                let (wp, wm) = if which == 0 {
                    (
                        model.density_strains(&(ee + dir), ke, frame),
                        model.density_strains(&(ee - dir), ke, frame),
                    )
                } else {
                    (
                        model.density_strains(ee, &(ke + dir), frame),
                        model.density_strains(ee, &(ke - dir), frame),
                    )
                };
                g[which] += (wp - wm) / (2.0 * step) * outer(&d[i], &down[alpha]);
            }
        }
    }
    (g[0], g[1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressResultants {
    pub n: Mat3,
    pub m: Mat3,
}

pub fn stress_resultants(state: &StrainState, model: &EnergyModel) -> StressResultants {
    let (ge, gk) = model.gradient(&state.ee, &state.ke, &state.frame0);
    let q = state.qe.matrix();
    StressResultants { n: q * ge, m: q * gk }
}

pub fn stress_resultants_fd(state: &StrainState, model: &EnergyModel) -> StressResultants {
    let (ge, gk) = fd_gradient(model, &state.ee, &state.ke, &state.frame0);
    let q = state.qe.matrix();
    StressResultants { n: q * ge, m: q * gk }
}

/// Flat reference frame `{e1, e2, e3}` used for the coefficient-level form.
pub fn flat_frame() -> SurfaceFrame {
    SurfaceFrame::from_basis(Coords2::zeros(), [Vec3::x(), Vec3::y()], [Vec3::zeros(); 2])
        .expect("flat frame is regular")
}

/// Component index `p ∈ 0..12` ↦ (is_curvature, i, α).
pub fn component_label(p: usize) -> (bool, usize, usize) {
    (p >= 6, (p % 6) / 2, p % 2)
}

fn unit_strains(x: &[f64]) -> (Mat3, Mat3) {
    let mut e = Mat3::zeros();
    let mut k = Mat3::zeros();
    for (p, v) in x.iter().enumerate() {
        let (curv, i, alpha) = component_label(p);
        if curv {
            k[(i, alpha)] += v;
        } else {
            e[(i, alpha)] += v;
        }
    }
    (e, k)
}

/// Symmetric `H` with `2W = xᵀ H x` over `x = (E_{iα}, K_{iα})` in an
/// orthonormal basis, assembled by polarization.
pub fn quadratic_form(coeff: &EnergyCoefficients) -> DMatrix<f64> {
    let frame = flat_frame();
    let w2 = |x: &[f64]| {
        let (e, k) = unit_strains(x);
        2.0 * energy_general(&e, &k, &frame, coeff)
    };
    let basis = |p: usize| {
        let mut v = vec![0.0; 12];
        v[p] = 1.0;
        v
    };
    let mut h = DMatrix::zeros(12, 12);
    for p in 0..12 {
        h[(p, p)] = w2(&basis(p));
    }
    for p in 0..12 {
        for q in p + 1..12 {
            let mut v = basis(p);
            v[q] = 1.0;
            let val = 0.5 * (w2(&v) - h[(p, p)] - h[(q, q)]);
            h[(p, q)] = val;
            h[(q, p)] = val;
        }
    }
    h
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub form: DMatrix<f64>,
    pub eigen: SymmetricEigen,
}

impl Spectrum {
    pub fn max_abs(&self) -> f64 {
        self.eigen.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Eigenvalues with `|λ| ≤ rel · max|λ|`.
    pub fn zero_count(&self, rel: f64) -> usize {
        let tol = rel * self.max_abs();
        self.eigen.values.iter().filter(|v| v.abs() <= tol).count()
    }

    /// Orthonormal basis of the numerical null space (columns).
    pub fn null_space(&self, rel: f64) -> DMatrix<f64> {
        let tol = rel * self.max_abs();
        let cols: Vec<_> = (0..12)
            .filter(|&k| self.eigen.values[k].abs() <= tol)
            .map(|k| self.eigen.vectors.column(k).into_owned())
            .collect();
        if cols.is_empty() {
            DMatrix::zeros(12, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }

    /// Coercivity constant `½ λ_min` (negative when not coercive).
    pub fn coercivity_constant(&self) -> f64 {
        0.5 * self.eigen.values[0]
    }
}

pub fn quadratic_form_spectrum(coeff: &EnergyCoefficients) -> Spectrum {
    let form = quadratic_form(coeff);
    let eigen = jacobi_eigen(&form);
    Spectrum { form, eigen }
}

/// The drill modes of the drill-free quadratic form, as 12-vectors:
/// planar skew `E`, `K_31`, `K_32`, planar trace `K`.
pub fn expected_drill_free_null_modes() -> DMatrix<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = DMatrix::zeros(12, 4);
    // E_12 = −E_21: indices (i=0,α=1) = 1 and (i=1,α=0) = 2.
    m[(1, 0)] = s;
    m[(2, 0)] = -s;
    // K_31, K_32: indices 6 + 4, 6 + 5.
    m[(10, 1)] = 1.0;
    m[(11, 2)] = 1.0;
    // K_11 = K_22: indices 6 + 0 and 6 + 3.
    m[(6, 3)] = s;
    m[(9, 3)] = s;
    m
}

/// Largest principal-angle sine between two column spaces of equal rank.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return f64::INFINITY;
    }
    let p = b * b.transpose();
    let resid = a - &p * a;
    resid.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `axl(skw(N Fᵀ − F Nᵀ))`, the drilling couple a balanced state must cancel.
pub fn couple_axial(n: &Mat3, f: &Mat3) -> Vec3 {
    crate::tensor::axl_of_skew_part(&(n * f.transpose() - f * n.transpose()))
}
