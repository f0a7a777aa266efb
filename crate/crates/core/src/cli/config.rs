//! Run configuration: schema, validation and resolution into a plan.

use serde::Deserialize;
use std::f64::consts::TAU;

use crate::energy::{
    EnergyCoefficients, EnergyModel, EngineeringParams, ReducedForm, DEFAULT_ALPHA_S, DEFAULT_ALPHA_T, DEFAULT_KAPPA,
};
use crate::fields::{Series, VecSeries};
use crate::geometry::{ChartShape, DerivativeMode, Rect, SurfaceChart};
use crate::minimizer::{LoadSpec, MinimizeOptions};

use super::Verb;

/// Invalid configuration (exit code 2).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid config: {0}")]
pub struct ConfigError(pub String);

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub shape: ChartShape,
    #[serde(default = "Rect::unit")]
    pub domain: Rect,
    #[serde(default = "analytic")]
    pub derivatives: DerivativeMode,
}

fn analytic() -> DerivativeMode {
    DerivativeMode::Analytic
}

impl ChartSpec {
    fn build(&self) -> Result<SurfaceChart, ConfigError> {
        let d = Rect::new(self.domain.x1, self.domain.x2).map_err(|e| ConfigError(e.to_string()))?;
        if !d.x1.iter().chain(&d.x2).all(|v| v.is_finite()) {
            return invalid("non-finite chart domain");
        }
        SurfaceChart::new(self.shape.clone(), d, self.derivatives).map_err(|e| ConfigError(e.to_string()))
    }
}

/// Displacement `u`, rotation vector `ψ` (`R = exp(ψ) Q⁰`) and drilling
/// angle `θ` about `d3`, as closed-form series.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default)]
    pub displacement: VecSeries,
    #[serde(default)]
    pub rotation: VecSeries,
    #[serde(default)]
    pub drill: Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Pietraszkiewicz,
    DrillFree,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormName {
    General,
    Phi,
    PsiExpanded,
    PsiDeviatoric,
    Composed,
    QuadraticDrillFree,
}

impl FormName {
    fn reduced(self) -> Option<ReducedForm> {
        match self {
            FormName::General => None,
            FormName::Phi => Some(ReducedForm::Phi),
            FormName::PsiExpanded => Some(ReducedForm::PsiExpanded),
            FormName::PsiDeviatoric => Some(ReducedForm::PsiDeviatoric),
            FormName::Composed => Some(ReducedForm::Composed),
            FormName::QuadraticDrillFree => Some(ReducedForm::QuadraticDrillFree),
        }
    }
}

/// Either the nested form or one of the two flat coefficient encodings
/// `{alpha, beta}` and `{E, nu, h, alpha_s, alpha_t, kappa, model}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "ModelInput")]
pub struct ModelSpec {
    pub family: Family,
    #[serde(default)]
    pub params: Option<EngineeringParams>,
    #[serde(default)]
    pub coefficients: Option<EnergyCoefficients>,
    /// Energy form; defaults to `general` except for the drill-free
    /// family, which defaults to `psi_deviatoric`.
    #[serde(default)]
    pub form: Option<FormName>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NestedModel {
    family: Family,
    #[serde(default)]
    params: Option<EngineeringParams>,
    #[serde(default)]
    coefficients: Option<EnergyCoefficients>,
    #[serde(default)]
    form: Option<FormName>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatCoefficients {
    alpha: [f64; 4],
    beta: [f64; 4],
    #[serde(default)]
    form: Option<FormName>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatParams {
    #[serde(rename = "E")]
    young: f64,
    nu: f64,
    h: f64,
    #[serde(default)]
    alpha_s: Option<f64>,
    #[serde(default)]
    alpha_t: Option<f64>,
    #[serde(default)]
    kappa: Option<f64>,
    model: Family,
    #[serde(default)]
    form: Option<FormName>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ModelInput {
    Nested(NestedModel),
    Coefficients(FlatCoefficients),
    Params(FlatParams),
}

impl TryFrom<ModelInput> for ModelSpec {
    type Error = String;

    fn try_from(input: ModelInput) -> Result<Self, String> {
        Ok(match input {
            ModelInput::Nested(m) => ModelSpec {
                family: m.family,
                params: m.params,
                coefficients: m.coefficients,
                form: m.form,
            },
            ModelInput::Coefficients(c) => ModelSpec {
                family: Family::Custom,
                params: None,
                coefficients: Some(EnergyCoefficients {
                    alpha: c.alpha,
                    beta: c.beta,
                }),
                form: c.form,
            },
            ModelInput::Params(p) => {
                if p.model == Family::Custom {
                    return Err("`model` must be \"pietraszkiewicz\" or \"drill_free\"".into());
                }
                ModelSpec {
                    family: p.model,
                    params: Some(EngineeringParams {
                        young: p.young,
                        nu: p.nu,
                        h: p.h,
                        alpha_s: p.alpha_s.unwrap_or(DEFAULT_ALPHA_S),
                        alpha_t: p.alpha_t.unwrap_or(DEFAULT_ALPHA_T),
                        kappa: p.kappa.unwrap_or(DEFAULT_KAPPA),
                    }),
                    coefficients: None,
                    form: p.form,
                }
            }
        })
    }
}

impl ModelSpec {
    fn params(&self) -> Result<EngineeringParams, ConfigError> {
        let p = match self.params {
            Some(p) => p,
            None => return invalid("model.params required for this family"),
        };
        p.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(p)
    }

    fn model_with(&self, form: FormName) -> Result<EnergyModel, ConfigError> {
        match self.family {
            Family::Custom => {
                if self.params.is_some() {
                    return invalid("model.params not allowed for the custom family");
                }
                let c = match self.coefficients {
                    Some(c) => c,
                    None => return invalid("model.coefficients required for the custom family"),
                };
                if !c.is_finite() {
                    return invalid("non-finite coefficients");
                }
                if form != FormName::General {
                    return invalid("custom coefficients only define the general form");
                }
                Ok(EnergyModel::General(c))
            }
            Family::Pietraszkiewicz | Family::DrillFree => {
                if self.coefficients.is_some() {
                    return invalid("model.coefficients only allowed for the custom family");
                }
                let p = self.params()?;
                match (self.family, form.reduced()) {
                    (Family::Pietraszkiewicz, None) => {
                        Ok(EnergyModel::General(EnergyCoefficients::pietraszkiewicz(&p)))
                    }
                    (Family::Pietraszkiewicz, Some(_)) => {
                        invalid("the pietraszkiewicz family only has the general form")
                    }
                    (_, None) => Ok(EnergyModel::General(EnergyCoefficients::drill_free(&p))),
                    (_, Some(form)) => Ok(EnergyModel::Reduced { form, params: p }),
                }
            }
        }
    }

    fn default_form(&self) -> FormName {
        match self.family {
            Family::DrillFree => FormName::PsiDeviatoric,
            _ => FormName::General,
        }
    }

    pub fn model(&self) -> Result<EnergyModel, ConfigError> {
        self.model_with(self.form.unwrap_or_else(|| self.default_form()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub grid: [usize; 2],
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { grid: [5, 5] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    #[serde(default = "default_s_end")]
    pub s_end: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_s_end() -> f64 {
    TAU
}
fn default_steps() -> usize {
    256
}

impl Default for FlowSpec {
    fn default() -> Self {
        FlowSpec {
            s_end: default_s_end(),
            steps: default_steps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearizeSpec {
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
}

fn default_eps() -> Vec<f64> {
    vec![0.02, 0.01, 0.005]
}

impl Default for LinearizeSpec {
    fn default() -> Self {
        LinearizeSpec { eps: default_eps() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrillAuditSpec {
    #[serde(default = "default_audit_trials")]
    pub trials: usize,
    /// Nodal angles drawn uniformly from `[−amplitude, amplitude]`.
    #[serde(default = "default_audit_amplitude")]
    pub amplitude: f64,
}

fn default_audit_trials() -> usize {
    5
}
fn default_audit_amplitude() -> f64 {
    std::f64::consts::PI
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub n: [usize; 2],
    /// Node counts per direction for a refinement study of the
    /// equilibrium residual, each roughly halving the spacing.
    #[serde(default)]
    pub refinement: Option<Vec<usize>>,
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec {
            n: [17, 17],
            refinement: None,
        }
    }
}

/// Check thresholds. Upper bounds are multiplied by `--tol-scale`;
/// ratio windows and the negative-control threshold are not.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub geometry_analytic: f64,
    pub geometry_fd: f64,
    pub invariance_analytic: f64,
    pub invariance_fd: f64,
    pub detection_threshold: f64,
    pub detection_fraction: f64,
    pub identity: f64,
    pub flow_drift: f64,
    pub flow_return: f64,
    pub flow_ratio: [f64; 2],
    pub stress_gradient: f64,
    pub linear_ratio: [f64; 2],
    pub psi3_independence: f64,
    pub psi_phi: f64,
    pub spectrum_zero: f64,
    pub eigen_residual: f64,
    pub null_space: f64,
    pub gradient_norm: f64,
    pub drill_null: f64,
    pub refinement_ratio: [f64; 2],
    pub fd_ratio: [f64; 2],
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            geometry_analytic: 1e-10,
            geometry_fd: 1e-6,
            invariance_analytic: 1e-8,
            invariance_fd: 1e-5,
            detection_threshold: 1e-4,
            detection_fraction: 0.95,
            identity: 1e-9,
            flow_drift: 1e-7,
            flow_return: 1e-7,
            flow_ratio: [12.0, 20.0],
            stress_gradient: 1e-6,
            linear_ratio: [3.5, 4.5],
            psi3_independence: 1e-12,
            psi_phi: 1e-10,
            spectrum_zero: 1e-12,
            eigen_residual: 1e-10,
            null_space: 1e-8,
            gradient_norm: 1e-6,
            drill_null: 1e-9,
            refinement_ratio: [3.0, 5.0],
            fd_ratio: [3.5, 4.5],
        }
    }
}

impl Tolerances {
    pub fn scaled(&self, s: f64) -> Self {
        Tolerances {
            geometry_analytic: s * self.geometry_analytic,
            geometry_fd: s * self.geometry_fd,
            invariance_analytic: s * self.invariance_analytic,
            invariance_fd: s * self.invariance_fd,
            identity: s * self.identity,
            flow_drift: s * self.flow_drift,
            flow_return: s * self.flow_return,
            stress_gradient: s * self.stress_gradient,
            psi3_independence: s * self.psi3_independence,
            psi_phi: s * self.psi_phi,
            spectrum_zero: s * self.spectrum_zero,
            eigen_residual: s * self.eigen_residual,
            null_space: s * self.null_space,
            gradient_norm: s * self.gradient_norm,
            drill_null: s * self.drill_null,
            ..*self
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bounds = [
            self.geometry_analytic,
            self.geometry_fd,
            self.invariance_analytic,
            self.invariance_fd,
            self.detection_threshold,
            self.identity,
            self.flow_drift,
            self.flow_return,
            self.stress_gradient,
            self.psi3_independence,
            self.psi_phi,
            self.spectrum_zero,
            self.eigen_residual,
            self.null_space,
            self.gradient_norm,
            self.drill_null,
        ];
        if !bounds.iter().all(|t| t.is_finite() && *t > 0.0) {
            return invalid("tolerances must be positive and finite");
        }
        if !(self.detection_fraction > 0.0 && self.detection_fraction <= 1.0) {
            return invalid("detection_fraction must lie in (0, 1]");
        }
        for w in [self.flow_ratio, self.linear_ratio, self.refinement_ratio, self.fd_ratio] {
            if !(w[0].is_finite() && w[1].is_finite() && w[0] <= w[1]) {
                return invalid("ratio windows must be finite [low, high] pairs");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; must match the command-line verb when present.
    #[serde(default)]
    pub verb: Option<Verb>,
    #[serde(default)]
    pub chart: Option<ChartSpec>,
    /// Chart set for seeded audits; defaults to plate, cylinder and
    /// sphere patch.
    #[serde(default)]
    pub charts: Option<Vec<ChartSpec>>,
    #[serde(default)]
    pub fields: FieldSpec,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    /// Forms audited by `check-invariance`; defaults to the model's form.
    #[serde(default)]
    pub forms: Option<Vec<FormName>>,
    #[serde(default)]
    pub samples: SampleSpec,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub flow: FlowSpec,
    #[serde(default)]
    pub linearize: LinearizeSpec,
    #[serde(default)]
    pub mesh: MeshSpec,
    #[serde(default)]
    pub loads: LoadSpec,
    #[serde(default)]
    pub solver: MinimizeOptions,
    #[serde(default)]
    pub drill_audit: Option<DrillAuditSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Fully validated inputs of one run.
#[derive(Debug, Clone)]
pub struct Plan {
    pub verb: Verb,
    pub seed: u64,
    pub tol_scale: f64,
    pub tol: Tolerances,
    pub chart: SurfaceChart,
    pub charts: Vec<SurfaceChart>,
    pub fields: FieldSpec,
    pub model: Option<EnergyModel>,
    pub forms: Vec<(String, EnergyModel)>,
    pub samples: [usize; 2],
    pub trials: usize,
    pub flow: FlowSpec,
    pub eps: Vec<f64>,
    pub mesh: MeshSpec,
    pub loads: LoadSpec,
    pub solver: MinimizeOptions,
    pub drill_audit: Option<DrillAuditSpec>,
}

pub const DEFAULT_TRIALS: usize = 100;
const MAX_MESH_NODES: usize = 129;

fn form_label(f: FormName) -> &'static str {
    match f {
        FormName::General => "general",
        _ => f.reduced().expect("reduced form").name(),
    }
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))
}

impl RunConfig {
    pub fn plan(&self, verb: Verb, seed: Option<u64>, tol_scale: f64) -> Result<Plan, ConfigError> {
        if let Some(v) = self.verb {
            if v != verb {
                return invalid(format!("config is for `{}`, not `{}`", v.name(), verb.name()));
            }
        }
        if !(tol_scale.is_finite() && tol_scale > 0.0) {
            return invalid("--tol-scale must be positive and finite");
        }
        self.tolerances.validate()?;
        let chart = match &self.chart {
            Some(c) => c.build()?,
            None if verb.needs_chart() => return invalid(format!("`{}` needs a chart", verb.name())),
            None => SurfaceChart::plate(Rect::unit()),
        };
        let charts = match &self.charts {
            Some(list) if list.is_empty() => return invalid("charts must not be empty"),
            Some(list) => list.iter().map(|c| c.build()).collect::<Result<_, _>>()?,
            None => crate::audit::standard_charts(),
        };
        let model = match &self.model {
            Some(m) => Some(m.model()?),
            None if verb.needs_model() => return invalid(format!("`{}` needs a model", verb.name())),
            None => None,
        };
        let forms = match (&self.model, &self.forms) {
            (Some(m), Some(list)) => {
                if list.is_empty() {
                    return invalid("forms must not be empty");
                }
                list.iter()
                    .map(|f| Ok((form_label(*f).to_string(), m.model_with(*f)?)))
                    .collect::<Result<_, ConfigError>>()?
            }
            (None, Some(_)) => return invalid("forms need a model"),
            (_, None) => model.iter().map(|m| (m.name().to_string(), *m)).collect(),
        };
        let [s1, s2] = self.samples.grid;
        if s1 == 0 || s2 == 0 || s1 * s2 > 1_000_000 {
            return invalid("samples.grid must be positive and at most 10^6 points");
        }
        let trials = self.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 || trials > 1_000_000 {
            return invalid("trials must lie in 1..=10^6");
        }
        if !(self.flow.s_end.is_finite()) || self.flow.steps < 2 * crate::flow::MIN_STEPS {
            return invalid(format!(
                "flow needs a finite s_end and at least {} steps",
                2 * crate::flow::MIN_STEPS
            ));
        }
        if !self.flow.steps.is_multiple_of(2) {
            return invalid("flow.steps must be even");
        }
        let eps = &self.linearize.eps;
        if eps.len() < 2 || eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return invalid("linearize.eps needs at least two positive amplitudes");
        }
        let mesh_ok = |n: usize| (5..=MAX_MESH_NODES).contains(&n);
        if !self.mesh.n.iter().all(|n| mesh_ok(*n)) {
            return invalid(format!("mesh.n must lie in 5..={MAX_MESH_NODES}"));
        }
        if let Some(r) = &self.mesh.refinement {
            if r.len() < 2 || !r.iter().all(|n| mesh_ok(*n)) || !r.windows(2).all(|w| w[1] == 2 * w[0] - 1) {
                return invalid("mesh.refinement needs at least two sizes with n_next = 2 n − 1");
            }
            if (r[0] - 1) % 4 != 0 {
                return invalid("mesh.refinement must start at n = 4k + 1 to share quarter-point nodes");
            }
        }
        self.loads.boundary.validate().map_err(|e| ConfigError(e.to_string()))?;
        self.solver.validate().map_err(|e| ConfigError(e.to_string()))?;
        if let Some(a) = &self.drill_audit {
            if a.trials == 0 || !(a.amplitude.is_finite() && a.amplitude > 0.0) {
                return invalid("drill_audit needs positive trials and amplitude");
            }
        }
        Ok(Plan {
            verb,
            seed: seed.or(self.seed).unwrap_or(0),
            tol_scale,
            tol: self.tolerances.scaled(tol_scale),
            chart,
            charts,
            fields: self.fields.clone(),
            model,
            forms,
            samples: self.samples.grid,
            trials,
            flow: self.flow,
            eps: eps.clone(),
            mesh: self.mesh.clone(),
            loads: self.loads.clone(),
            solver: self.solver,
            drill_audit: self.drill_audit,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse(r#"{"chart": {"shape": {"kind": "plate"}}, "bogus": 1}"#).is_err());
        assert!(
            parse(r#"{"model": {"family": "drill_free", "params": {"E": 1, "nu": 0.3, "h": 0.1, "x": 0}}}"#).is_err()
        );
    }

    #[test]
    fn flat_coefficient_encodings() {
        let flat = parse(r#"{"model": {"E": 1, "nu": 0.3, "h": 0.1, "model": "pietraszkiewicz"}}"#).unwrap();
        let nested =
            parse(r#"{"model": {"family": "pietraszkiewicz", "params": {"E": 1, "nu": 0.3, "h": 0.1}}}"#).unwrap();
        assert_eq!(flat.model, nested.model);
        let flat = parse(r#"{"model": {"E": 1, "nu": 0.3, "h": 0.1, "kappa": 0.9, "model": "drill_free"}}"#).unwrap();
        let m = flat.model.unwrap();
        assert_eq!(
            (m.family, m.params.unwrap().kappa, m.params.unwrap().alpha_s),
            (Family::DrillFree, 0.9, 5.0 / 6.0)
        );
        let coeffs = parse(r#"{"model": {"alpha": [1, 2, 3, 4], "beta": [5, 6, 7, 8]}}"#)
            .unwrap()
            .model
            .unwrap();
        assert_eq!(coeffs.family, Family::Custom);
        assert_eq!(coeffs.coefficients.unwrap().beta, [5.0, 6.0, 7.0, 8.0]);
        assert!(parse(r#"{"model": {"E": 1, "nu": 0.3, "h": 0.1, "model": "custom"}}"#).is_err());
        assert!(parse(r#"{"model": {"E": 1, "nu": 0.3, "h": 0.1, "model": "drill_free", "extra": 1}}"#).is_err());
        assert!(parse(r#"{"model": {"alpha": [1, 2, 3, 4]}}"#).is_err());
    }

    #[test]
    fn model_resolution() {
        let cfg = parse(r#"{"model": {"family": "drill_free", "params": {"E": 1, "nu": 0.3, "h": 0.1}}}"#).unwrap();
        let plan = cfg.plan(Verb::Spectrum, None, 1.0).unwrap();
        assert_eq!(plan.model.unwrap().name(), "psi_deviatoric");
        let bad = parse(
            r#"{"model": {"family": "pietraszkiewicz", "params": {"E": 1, "nu": 0.3, "h": 0.1}, "form": "phi"}}"#,
        )
        .unwrap();
        assert!(bad.plan(Verb::Spectrum, None, 1.0).is_err());
        let custom =
            parse(r#"{"model": {"family": "custom", "coefficients": {"alpha": [1,1,1,1], "beta": [1,1,1,1]}}}"#)
                .unwrap();
        assert_eq!(
            custom.plan(Verb::Spectrum, None, 1.0).unwrap().model.unwrap().name(),
            "general"
        );
    }

    #[test]
    fn plan_validation() {
        let cfg = RunConfig::default();
        assert!(cfg.plan(Verb::Spectrum, None, 1.0).is_err());
        assert!(cfg.plan(Verb::CheckIntegrals, None, 0.0).is_err());
        let plan = cfg.plan(Verb::CheckIntegrals, Some(9), 2.0).unwrap();
        assert_eq!(plan.seed, 9);
        assert_eq!(plan.tol.flow_drift, 2e-7);
        assert_eq!(plan.tol.flow_ratio, [12.0, 20.0]);
        let cfg = parse(r#"{"verb": "geometry"}"#).unwrap();
        assert!(cfg.plan(Verb::CheckIntegrals, None, 1.0).is_err());
        let cfg = parse(r#"{"mesh": {"n": [17, 17], "refinement": [17, 34]}}"#).unwrap();
        assert!(cfg.plan(Verb::CheckIntegrals, None, 1.0).is_err());
    }
}
