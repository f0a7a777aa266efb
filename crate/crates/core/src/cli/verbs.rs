//! One function per verb: compute tables and checks from a plan.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::audit::{random_trial, Trial};
use crate::drilling::invariance_residual;
use crate::energy::{
    expected_drill_free_null_modes, quadratic_form_spectrum, stress_resultants, stress_resultants_fd,
    subspace_distance, EnergyCoefficients, EnergyModel, StressResultants,
};
use crate::error::Result;
use crate::flow::integrate_flow;
use crate::geometry::{surface_gradient, ChartPosition, ChartShape, DerivativeMode, SurfaceChart};
use crate::kinematics::{strain_state, DeformedConfig, FrameField, Placement, StrainState};
use crate::linearized::{convergence_ratios, linear_measures, linearization_defects, psi_phi_defect, LinearState};
use crate::measures::{
    first_integrals, measures_from_strains, reduced_from_gradients, strain_measures, FrozenGeometry,
};
use crate::minimizer::{equilibrium_residual, minimize, DofField, Problem, ShellMesh};
use crate::tensor::{Coords2, Mat3};

use super::config::Plan;
use super::report::{matrix_cells, matrix_columns, num, vector_cells, vector_columns, Bound, Check, Table};

/// Verb result before it is wrapped into a report.
#[derive(Debug, Default)]
pub struct VerbOutput {
    pub checks: Vec<Check>,
    pub summary: Value,
    pub tables: Vec<(String, Table)>,
    pub json: Vec<(String, String)>,
}

pub fn chart_name(chart: &SurfaceChart) -> &'static str {
    match chart.shape {
        ChartShape::Plate => "plate",
        ChartShape::Cylinder { .. } => "cylinder",
        ChartShape::Sphere { .. } => "sphere",
        ChartShape::Graph { .. } => "graph",
    }
}

fn mode_name(chart: &SurfaceChart) -> &'static str {
    if chart.is_analytic() {
        "analytic"
    } else {
        "fd"
    }
}

/// Cell-centred sample grid over the chart rectangle.
pub fn sample_points(chart: &SurfaceChart, grid: [usize; 2]) -> Vec<Coords2> {
    let mut pts = Vec::with_capacity(grid[0] * grid[1]);
    for j in 0..grid[1] {
        for i in 0..grid[0] {
            let s = (i as f64 + 0.5) / grid[0] as f64;
            let t = (j as f64 + 0.5) / grid[1] as f64;
            pts.push(chart.domain.lerp(s, t));
        }
    }
    pts
}

fn configured_deformation(plan: &Plan) -> (FrameField, DeformedConfig) {
    let reference = FrameField::Reference(plan.chart.clone());
    let frame = FrameField::rotated(plan.fields.rotation.clone(), reference.clone());
    let frame = if plan.fields.drill.is_zero() {
        frame
    } else {
        FrameField::drilled(plan.fields.drill.clone(), frame)
    };
    let config = DeformedConfig {
        placement: Placement::displaced(plan.fields.displacement.clone()),
        frame,
    };
    (reference, config)
}

/// Seeded trials cycling through the plan's chart set.
fn trials(plan: &Plan, rng: &mut ChaCha8Rng) -> Result<Vec<Trial>> {
    (0..plan.trials)
        .map(|t| random_trial(rng, &plan.charts[t % plan.charts.len()]))
        .collect()
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter()
        .fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

fn xy(x: Coords2) -> Vec<String> {
    vec![num(x[0]), num(x[1])]
}

fn cols<S: Into<String>>(base: impl IntoIterator<Item = S>, rest: &[Vec<String>]) -> Vec<String> {
    base.into_iter()
        .map(Into::into)
        .chain(rest.iter().flatten().cloned())
        .collect()
}

// ---- geometry ----

pub fn geometry(plan: &Plan) -> Result<VerbOutput> {
    let chart = &plan.chart;
    let pts = sample_points(chart, plan.samples);
    let rows: Vec<_> = pts
        .par_iter()
        .map(|&x| -> Result<_> {
            let f = chart.frame_at(x)?;
            let n = f.normal;
            let mut inv: f64 = (n.norm() - 1.0).abs();
            for al in 0..2 {
                inv = inv.max(n.dot(&f.covariant[al]).abs());
                for be in 0..2 {
                    let delta = if al == be { 1.0 } else { 0.0 };
                    inv = inv.max((f.contravariant[al].dot(&f.covariant[be]) - delta).abs());
                }
            }
            let proj = Mat3::identity() - n * n.transpose();
            inv = inv
                .max((f.a - proj).amax())
                .max((f.b - f.b.transpose()).amax())
                .max((f.b * n).amax())
                .max((f.c + f.c.transpose()).amax())
                .max((f.c * f.c + f.a).amax());
            let grad_y = surface_gradient(&ChartPosition(chart.clone()), chart, x)?;
            let grad_n = f.gradient(&chart.normal_partials(x)?);
            let ident = (grad_y - f.a).amax().max((f.a.transpose() * grad_n + f.b).amax());
            let k = f.principal_curvatures();
            Ok((x, f, k, inv, ident))
        })
        .collect::<Result<_>>()?;
    let tol = if chart.is_analytic() {
        plan.tol.geometry_analytic
    } else {
        plan.tol.geometry_fd
    };
    let mut table = Table::new(cols(
        ["x1", "x2"],
        &[
            vector_columns("y"),
            vector_columns("n"),
            vector_columns("a1"),
            vector_columns("a2"),
            ["k_min", "k_max", "mean_curvature", "gauss_curvature", "area_density"]
                .map(String::from)
                .to_vec(),
        ],
    ));
    for (x, f, k, _, _) in &rows {
        table.push(cols(
            xy(*x),
            &[
                vector_cells(&chart.position(*x)),
                vector_cells(&f.normal),
                vector_cells(&f.covariant[0]),
                vector_cells(&f.covariant[1]),
                vec![
                    num(k[0]),
                    num(k[1]),
                    num(0.5 * (k[0] + k[1])),
                    num(k[0] * k[1]),
                    num(f.area_density),
                ],
            ],
        ));
    }
    let mut checks = vec![
        Check::new("frame_invariants", max_of(rows.iter().map(|r| r.3)), Bound::AtMost(tol)),
        Check::new(
            "reference_identities",
            max_of(rows.iter().map(|r| r.4)),
            Bound::AtMost(tol),
        ),
    ];
    let mut summary = json!({
        "chart": chart_name(chart),
        "derivatives": mode_name(chart),
        "points": pts.len(),
    });
    if chart.is_analytic() {
        // Central-difference frames at a coarse step and its half; the
        // discrepancy from the analytic frame should shrink fourfold.
        let h = 3e-3 * chart.domain.diameter();
        let discrepancy = |step: f64| -> Result<f64> {
            let fd = chart.with_mode(DerivativeMode::CentralDifference { step });
            let mut d: f64 = 0.0;
            for x in &pts {
                let (fa, fb) = (chart.frame_at(*x)?, fd.frame_at(*x)?);
                let t = (0..2).map(|k| (fa.covariant[k] - fb.covariant[k]).norm()).sum::<f64>();
                d = d.max((fa.b - fb.b).norm() + t);
            }
            Ok(d)
        };
        let (d1, d2) = (discrepancy(h)?, discrepancy(0.5 * h)?);
        summary["fd_discrepancy"] = json!([d1, d2]);
        if d1 > 1e-9 {
            checks.push(Check::new(
                "fd_convergence_ratio",
                d1 / d2,
                Bound::Within(plan.tol.fd_ratio),
            ));
        }
    }
    Ok(VerbOutput {
        checks,
        summary,
        tables: vec![("geometry.csv".into(), table)],
        json: vec![],
    })
}

// ---- measures ----

/// `max |U_k − (F-based invariant)|` over `k = 1, 2, 3, 5` and the
/// agreement of the two expressions for the measures.
fn identity_defects(config: &DeformedConfig, chart: &SurfaceChart, x: Coords2, s: &StrainState) -> Result<(f64, f64)> {
    let u = first_integrals(s);
    let g = reduced_from_gradients(config, chart, x)?;
    let ident = (u.u1 - g.ftf)
        .amax()
        .max((u.u2 - g.ftd3).amax())
        .max((u.u3 - g.ft_grad_d3).amax())
        .max((u.u5 - g.ft_d3_cross_grad_d3).amax());
    let alt = strain_measures(s).max_difference(&measures_from_strains(&s.ee, &s.ke, &s.frame0));
    Ok((ident, alt))
}

pub fn measures(plan: &Plan) -> Result<VerbOutput> {
    let chart = &plan.chart;
    let (reference, config) = configured_deformation(plan);
    let pts = sample_points(chart, plan.samples);
    let rows: Vec<_> = pts
        .par_iter()
        .map(|&x| -> Result<_> {
            let s = strain_state(&config, &reference, chart, x)?;
            let d = identity_defects(&config, chart, x, &s)?;
            Ok((x, s, d))
        })
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let audit: Vec<(f64, f64)> = trials(plan, &mut rng)?
        .par_iter()
        .map(|t| identity_defects(&t.config, &t.chart, t.x, &t.state))
        .collect::<Result<_>>()?;

    let mut table = Table::new(cols(
        ["x1", "x2"],
        &[
            matrix_columns("ee"),
            matrix_columns("ke"),
            matrix_columns("strain"),
            vector_columns("shear"),
            matrix_columns("psi"),
            matrix_columns("phi"),
            matrix_columns("u1"),
            vector_columns("u2"),
            matrix_columns("u3"),
            vector_columns("u4"),
            matrix_columns("u5"),
        ],
    ));
    for (x, s, _) in &rows {
        let m = strain_measures(s);
        let u = first_integrals(s);
        table.push(cols(
            xy(*x),
            &[
                matrix_cells(&s.ee),
                matrix_cells(&s.ke),
                matrix_cells(&m.strain),
                vector_cells(&m.shear),
                matrix_cells(&m.psi),
                matrix_cells(&m.phi),
                matrix_cells(&u.u1),
                vector_cells(&u.u2),
                matrix_cells(&u.u3),
                vector_cells(&u.u4),
                matrix_cells(&u.u5),
            ],
        ));
    }
    let tol = Bound::AtMost(plan.tol.identity);
    let checks = vec![
        Check::new("gradient_identities", max_of(rows.iter().map(|r| r.2 .0)), tol),
        Check::new("alternative_forms", max_of(rows.iter().map(|r| r.2 .1)), tol),
        Check::new("gradient_identities_random", max_of(audit.iter().map(|a| a.0)), tol),
        Check::new("alternative_forms_random", max_of(audit.iter().map(|a| a.1)), tol),
    ];
    Ok(VerbOutput {
        checks,
        summary: json!({
            "chart": chart_name(chart),
            "points": pts.len(),
            "random_trials": plan.trials,
            "charts": plan.charts.iter().map(chart_name).collect::<Vec<_>>(),
        }),
        tables: vec![("measures.csv".into(), table)],
        json: vec![],
    })
}

// ---- check-invariance ----

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// `α2 = α3`, `β4 = 0` and `2β1 + β2 + β3 = 0`: no stiffness against the
/// planar skew strain, the `K_{3α}` rows or the planar trace of `Ke`.
pub fn has_drill_free_structure(c: &EnergyCoefficients) -> bool {
    let [_, a2, a3, _] = c.alpha;
    let [b1, b2, b3, b4] = c.beta;
    let scale = c.beta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    approx_eq(a2, a3) && b4.abs() <= 1e-12 * scale && (2.0 * b1 + b2 + b3).abs() <= 1e-12 * scale
}

/// Whether a model is expected to be invariant under drilling.
pub fn expected_invariant(model: &EnergyModel) -> bool {
    match model {
        EnergyModel::Reduced { .. } => true,
        EnergyModel::General(c) => has_drill_free_structure(c),
    }
}

pub fn check_invariance(plan: &Plan) -> Result<VerbOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let trials = trials(plan, &mut rng)?;
    let residuals: Vec<Vec<f64>> = trials
        .par_iter()
        .map(|t| {
            plan.forms
                .iter()
                .map(|(_, m)| invariance_residual(|s| m.density(s), &t.state, &t.drill, t.x))
                .collect()
        })
        .collect();
    let mut header: Vec<String> = [
        "trial",
        "chart",
        "derivatives",
        "x1",
        "x2",
        "k3_norm",
        "drill_gradient_norm",
    ]
    .map(String::from)
    .to_vec();
    header.extend(plan.forms.iter().map(|(l, _)| format!("residual_{l}")));
    let mut table = Table::new(header);
    for (k, (t, r)) in trials.iter().zip(&residuals).enumerate() {
        let c = t.state.ke_components[2];
        let g = t.drill.gradient(t.x);
        let mut row = vec![
            k.to_string(),
            chart_name(&t.chart).into(),
            mode_name(&t.chart).into(),
            num(t.x[0]),
            num(t.x[1]),
            num((c[0] * c[0] + c[1] * c[1]).sqrt()),
            num((g[0] * g[0] + g[1] * g[1]).sqrt()),
        ];
        row.extend(r.iter().map(|v| num(*v)));
        table.push(row);
    }
    let mut checks = Vec::new();
    let mut forms = serde_json::Map::new();
    for (f, (label, model)) in plan.forms.iter().enumerate() {
        let col = |analytic: bool| -> Vec<f64> {
            trials
                .iter()
                .zip(&residuals)
                .filter(|(t, _)| t.chart.is_analytic() == analytic)
                .map(|(_, r)| r[f])
                .collect()
        };
        let all: Vec<f64> = residuals.iter().map(|r| r[f]).collect();
        let invariant = expected_invariant(model);
        let detected = all.iter().filter(|r| **r > plan.tol.detection_threshold).count() as f64 / all.len() as f64;
        if invariant {
            for (analytic, tol, suffix) in [
                (true, plan.tol.invariance_analytic, "analytic"),
                (false, plan.tol.invariance_fd, "fd"),
            ] {
                let v = col(analytic);
                if !v.is_empty() {
                    checks.push(Check::new(
                        format!("{label}_invariance_{suffix}"),
                        max_of(v),
                        Bound::AtMost(tol),
                    ));
                }
            }
        } else {
            checks.push(Check::new(
                format!("{label}_drilling_detected"),
                detected,
                Bound::AtLeast(plan.tol.detection_fraction),
            ));
        }
        forms.insert(
            label.clone(),
            json!({
                "expected_invariant": invariant,
                "max_residual": max_of(all.iter().copied()),
                "min_residual": all.iter().copied().fold(f64::INFINITY, f64::min),
                "fraction_above_threshold": detected,
            }),
        );
    }
    Ok(VerbOutput {
        checks,
        summary: json!({
            "trials": plan.trials,
            "charts": plan.charts.iter().map(chart_name).collect::<Vec<_>>(),
            "forms": forms,
        }),
        tables: vec![("invariance.csv".into(), table)],
        json: vec![],
    })
}

// ---- check-integrals ----

pub fn check_integrals(plan: &Plan) -> Result<VerbOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let trials = trials(plan, &mut rng)?;
    let (s_end, steps) = (plan.flow.s_end, plan.flow.steps);
    let rows: Vec<_> = trials
        .par_iter()
        .map(|t| -> Result<_> {
            let g = FrozenGeometry::of(&t.state);
            let full = integrate_flow(g, t.state.ee, t.state.ke, s_end, steps)?;
            let half = integrate_flow(g, t.state.ee, t.state.ke, s_end, steps / 2)?;
            let drift = full.first_integral_drift();
            let worst = |d: [f64; 5]| d.into_iter().fold(0.0, f64::max);
            let end_error = |tr: &crate::flow::Trajectory| {
                let last = tr.samples[tr.samples.len() - 1];
                let exact = crate::flow::closed_form(&g, &t.state.ee, &t.state.ke, s_end);
                (last.ee - exact.ee).norm().max((last.ke - exact.ke).norm())
            };
            Ok((
                drift,
                worst(half.first_integral_drift()),
                end_error(&full),
                end_error(&half),
            ))
        })
        .collect::<Result<_>>()?;
    let mut header: Vec<String> = ["trial", "chart", "x1", "x2"].map(String::from).to_vec();
    header.extend((1..=5).map(|k| format!("drift_u{k}")));
    header.extend(
        [
            "drift_max",
            "drift_max_half_steps",
            "drift_ratio",
            "return_error",
            "return_error_half_steps",
        ]
        .map(String::from),
    );
    let mut table = Table::new(header);
    let (mut drift, mut ratio, mut ret, mut ret_ratio) = (vec![], vec![], vec![], vec![]);
    for (k, (t, (d, dh, e, eh))) in trials.iter().zip(&rows).enumerate() {
        let dmax = d.iter().copied().fold(0.0, f64::max);
        drift.push(dmax);
        ratio.push(dh / dmax);
        ret.push(*e);
        ret_ratio.push(eh / e);
        let mut row = vec![k.to_string(), chart_name(&t.chart).into(), num(t.x[0]), num(t.x[1])];
        row.extend(d.iter().map(|v| num(*v)));
        row.extend([num(dmax), num(*dh), num(dh / dmax), num(*e), num(*eh)]);
        table.push(row);
    }
    let lo_hi = |v: &[f64]| {
        json!([
            v.iter().copied().fold(f64::INFINITY, f64::min),
            max_of(v.iter().copied())
        ])
    };
    Ok(VerbOutput {
        checks: vec![
            Check::new(
                "first_integral_drift",
                max_of(drift.iter().copied()),
                Bound::AtMost(plan.tol.flow_drift),
            ),
            Check::all("drift_ratio", &ratio, Bound::Within(plan.tol.flow_ratio)),
            Check::new(
                "return_error",
                max_of(ret.iter().copied()),
                Bound::AtMost(plan.tol.flow_return),
            ),
        ],
        summary: json!({
            "trials": plan.trials,
            "s_end": s_end,
            "steps": steps,
            "drift_ratio_range": lo_hi(&ratio),
            "return_error_ratio_range": lo_hi(&ret_ratio),
        }),
        tables: vec![("flow_drift.csv".into(), table)],
        json: vec![],
    })
}

// ---- energy ----

fn stress_cells(s: &StressResultants) -> Vec<f64> {
    s.n.iter().chain(s.m.iter()).copied().collect()
}

/// `‖(N, M) − (N, M)_fd‖ / ‖(N, M)‖`, absolute when the analytic value vanishes.
fn stress_gradient_error(state: &StrainState, model: &EnergyModel) -> f64 {
    let a = stress_cells(&stress_resultants(state, model));
    let b = stress_cells(&stress_resultants_fd(state, model));
    let diff: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

pub fn energy(plan: &Plan) -> Result<VerbOutput> {
    let model = plan.model.expect("planned model");
    let chart = &plan.chart;
    let (reference, config) = configured_deformation(plan);
    let pts = sample_points(chart, plan.samples);
    let rows: Vec<_> = pts
        .par_iter()
        .map(|&x| -> Result<_> {
            let s = strain_state(&config, &reference, chart, x)?;
            Ok((x, s, model.density(&s), stress_resultants(&s, &model)))
        })
        .collect::<Result<_>>()?;
    let cell = chart.domain.width(0) * chart.domain.width(1) / pts.len() as f64;
    let integrated: f64 = rows.iter().map(|(_, s, w, _)| w * s.frame0.area_density * cell).sum();
    let mut table = Table::new(cols(["x1", "x2", "w"], &[matrix_columns("n"), matrix_columns("m")]));
    for (x, _, w, st) in &rows {
        table.push(cols(
            cols(xy(*x), &[vec![num(*w)]]),
            &[matrix_cells(&st.n), matrix_cells(&st.m)],
        ));
    }
    let finite = rows.iter().all(|r| r.2.is_finite());
    let mut checks = vec![Check::new(
        "finite_energy",
        if finite { 0.0 } else { f64::NAN },
        Bound::AtMost(0.0),
    )];
    let analytic = model.quadratic_coefficients().is_some();
    if analytic {
        let tol = Bound::AtMost(plan.tol.stress_gradient);
        let here: Vec<f64> = rows.par_iter().map(|r| stress_gradient_error(&r.1, &model)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
        let random: Vec<f64> = trials(plan, &mut rng)?
            .par_iter()
            .map(|t| stress_gradient_error(&t.state, &model))
            .collect();
        checks.push(Check::new("stress_gradient", max_of(here), tol));
        checks.push(Check::new("stress_gradient_random", max_of(random), tol));
    }
    Ok(VerbOutput {
        checks,
        summary: json!({
            "model": model.name(),
            "points": pts.len(),
            "integrated_energy": integrated,
            "quadrature": "midpoint on the sample grid",
            "analytic_gradient": analytic,
        }),
        tables: vec![("energy.csv".into(), table)],
        json: vec![],
    })
}

// ---- linearize ----

pub fn linearize(plan: &Plan) -> Result<VerbOutput> {
    let chart = &plan.chart;
    let f = &plan.fields;
    let lin = LinearState::new(f.displacement.clone(), f.rotation.clone()).with_drill(f.drill.clone());
    let undrilled = LinearState::new(f.displacement.clone(), f.rotation.clone());
    let pts = sample_points(chart, plan.samples);
    let rows: Vec<_> = pts
        .par_iter()
        .map(|&x| -> Result<_> {
            let defects = linearization_defects(&lin, chart, x, &plan.eps)?;
            let m = linear_measures(&lin, chart, x)?;
            let psi3 = m.max_difference(&linear_measures(&undrilled, chart, x)?);
            let psi_phi = psi_phi_defect(&m, &chart.frame_at(x)?);
            Ok((x, defects, psi3, psi_phi))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(
        [
            "x1", "x2", "eps", "ee", "ke", "strain", "shear", "psi", "phi", "max", "ratio",
        ]
        .map(String::from),
    );
    let mut ratios = Vec::new();
    for (x, defects, _, _) in &rows {
        let r = convergence_ratios(defects);
        for (k, d) in defects.iter().enumerate() {
            let ratio = if k == 0 { String::new() } else { num(r[k - 1]) };
            table.push(cols(
                xy(*x),
                &[
                    [d.eps, d.ee, d.ke, d.strain, d.shear, d.psi, d.phi, d.max()]
                        .map(num)
                        .to_vec(),
                    vec![ratio],
                ],
            ));
        }
        ratios.extend(r);
    }
    Ok(VerbOutput {
        checks: vec![
            Check::all("linearization_order", &ratios, Bound::Within(plan.tol.linear_ratio)),
            Check::new(
                "psi3_independence",
                max_of(rows.iter().map(|r| r.2)),
                Bound::AtMost(plan.tol.psi3_independence),
            ),
            Check::new(
                "psi_phi_identity",
                max_of(rows.iter().map(|r| r.3)),
                Bound::AtMost(plan.tol.psi_phi),
            ),
        ],
        summary: json!({
            "chart": chart_name(chart),
            "points": pts.len(),
            "eps": plan.eps,
        }),
        tables: vec![("linearize.csv".into(), table)],
        json: vec![],
    })
}

// ---- minimize ----

fn dof_table(mesh: &ShellMesh, dofs: &DofField) -> Table {
    let mut t = Table::new(cols(["node", "x1", "x2"], &[vector_columns("y"), matrix_columns("r")]));
    for (a, x) in mesh.nodes.iter().enumerate() {
        t.push(cols(
            cols([a.to_string()], &[xy(*x)]),
            &[vector_cells(&dofs.y[a]), matrix_cells(dofs.r[a].matrix())],
        ));
    }
    t
}

/// Quarter points of the domain, shared by meshes with `n = 4k + 1`.
pub fn quarter_points(chart: &SurfaceChart) -> Vec<Coords2> {
    let q = [0.25, 0.5, 0.75];
    q.iter()
        .flat_map(|t| q.iter().map(|s| chart.domain.lerp(*s, *t)))
        .collect()
}

pub fn minimize_verb(plan: &Plan) -> Result<VerbOutput> {
    let model = plan.model.expect("planned model");
    let chart = &plan.chart;
    let [n1, n2] = plan.mesh.n;
    let problem = Problem::new(ShellMesh::new(chart.clone(), n1, n2)?, model, plan.loads.clone())?;
    let start = &problem.mesh.reference;
    let result = minimize(&problem, start, &plan.solver)?;
    let residual = equilibrium_residual(&problem, &result.dofs)?;
    let energies: Vec<f64> = result.history.iter().map(|h| h.energy).collect();
    let rise = energies.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let mut checks = vec![
        Check::new(
            "gradient_norm",
            result.final_gradient_norm(),
            Bound::AtMost(plan.tol.gradient_norm),
        ),
        Check::new("energy_increase", rise, Bound::AtMost(0.0)),
    ];
    let unloaded = problem.load_vector.iter().all(|l| l.norm() == 0.0);
    let displacement = max_of(result.dofs.y.iter().zip(&start.y).map(|(y, y0)| (y - y0).norm()));
    if unloaded {
        checks.push(Check::new(
            "unloaded_energy",
            result.final_energy().abs(),
            Bound::AtMost(0.0),
        ));
        checks.push(Check::new("unloaded_displacement", displacement, Bound::AtMost(0.0)));
    }
    let mut summary = json!({
        "model": model.name(),
        "mesh": plan.mesh.n,
        "iterations": result.iterations(),
        "converged": result.converged,
        "final_energy": result.final_energy(),
        "final_gradient_norm": result.final_gradient_norm(),
        "max_displacement": displacement,
        "residual_max_force": residual.max_force,
        "residual_max_moment": residual.max_moment,
        "warnings": result.warnings,
    });
    if let Some(audit) = plan.drill_audit {
        let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
        let i0 = result.final_energy();
        let mut changes = Vec::with_capacity(audit.trials);
        for _ in 0..audit.trials {
            let theta: Vec<f64> = (0..problem.mesh.node_count())
                .map(|_| rng.gen_range(-audit.amplitude..audit.amplitude))
                .collect();
            let i1 = problem.energy(&result.dofs.drilled(&theta))?;
            let scale = if i0 != 0.0 { i0.abs() } else { 1.0 };
            changes.push((i1 - i0).abs() / scale);
        }
        checks.push(Check::new(
            "drill_null_mode",
            max_of(changes.iter().copied()),
            Bound::AtMost(plan.tol.drill_null),
        ));
        summary["drill_audit"] =
            json!({ "trials": audit.trials, "amplitude": audit.amplitude, "relative_changes": changes });
    }
    if let Some(sizes) = &plan.mesh.refinement {
        let pts = quarter_points(chart);
        let mut study = Vec::new();
        for &n in sizes {
            let p = Problem::new(ShellMesh::new(chart.clone(), n, n)?, model, plan.loads.clone())?;
            let r = minimize(&p, &p.mesh.reference, &plan.solver)?;
            let res = equilibrium_residual(&p, &r.dofs)?;
            let at = res.max_force_at(&pts).unwrap_or(f64::NAN);
            study.push((n, at, r.final_gradient_norm()));
        }
        let ratios: Vec<f64> = study.windows(2).map(|w| w[0].1 / w[1].1).collect();
        checks.push(Check::all(
            "refinement_ratio",
            &ratios,
            Bound::Within(plan.tol.refinement_ratio),
        ));
        summary["refinement"] = json!({
            "nodes": study.iter().map(|s| s.0).collect::<Vec<_>>(),
            "max_force_at_quarter_points": study.iter().map(|s| s.1).collect::<Vec<_>>(),
            "final_gradient_norms": study.iter().map(|s| s.2).collect::<Vec<_>>(),
            "ratios": ratios,
        });
    }
    let mut history = Table::new(["iteration", "energy", "gradient_norm", "step", "damping"]);
    for h in &result.history {
        history.push(vec![
            h.iteration.to_string(),
            num(h.energy),
            num(h.gradient_norm),
            num(h.step),
            num(h.damping),
        ]);
    }
    let mut residual_json = serde_json::to_string_pretty(&residual).expect("residual serializes");
    residual_json.push('\n');
    Ok(VerbOutput {
        checks,
        summary,
        tables: vec![
            ("dofs.csv".into(), dof_table(&problem.mesh, &result.dofs)),
            ("history.csv".into(), history),
        ],
        json: vec![("residual.json".into(), residual_json)],
    })
}

// ---- spectrum ----

/// Coefficients of the quadratic part of a model.
pub fn quadratic_part(model: &EnergyModel) -> EnergyCoefficients {
    match model {
        EnergyModel::General(c) => *c,
        EnergyModel::Reduced { params, .. } => EnergyCoefficients::drill_free(params),
    }
}

pub fn spectrum(plan: &Plan) -> Result<VerbOutput> {
    let model = plan.model.expect("planned model");
    let coeff = quadratic_part(&model);
    let spec = quadratic_form_spectrum(&coeff);
    let lmax = spec.max_abs();
    let values = &spec.eigen.values;
    let vectors = &spec.eigen.vectors;
    let eig_res = max_of((0..12).map(|k| {
        let v = vectors.column(k);
        (&spec.form * v - values[k] * v).norm() / lmax
    }));
    let rel = plan.tol.spectrum_zero;
    let zeros = spec.zero_count(rel);
    let conditions = coeff.coercivity_conditions();
    let drill_free = has_drill_free_structure(&coeff);
    let mut checks = vec![Check::new(
        "eigen_residual",
        eig_res,
        Bound::AtMost(plan.tol.eigen_residual),
    )];
    if drill_free {
        let null = spec.null_space(rel);
        let expected = expected_drill_free_null_modes();
        let dist = subspace_distance(&null, &expected).max(subspace_distance(&expected, &null));
        checks.push(Check::new("zero_eigenvalues", zeros as f64, Bound::Within([4.0, 4.0])));
        checks.push(Check::new("null_space", dist, Bound::AtMost(plan.tol.null_space)));
        checks.push(Check::new("remaining_positive", values[4] / lmax, Bound::AtLeast(rel)));
    } else if conditions.iter().all(|c| *c) {
        checks.push(Check::new("smallest_eigenvalue", values[0] / lmax, Bound::AtLeast(rel)));
    } else {
        checks.push(Check::new("smallest_eigenvalue", values[0] / lmax, Bound::AtMost(rel)));
    }
    let mut header: Vec<String> = vec!["index".into(), "eigenvalue".into()];
    header.extend((0..12).map(|p| format!("v{p}")));
    let mut table = Table::new(header);
    for k in 0..12 {
        let mut row = vec![k.to_string(), num(values[k])];
        row.extend(vectors.column(k).iter().map(|v| num(*v)));
        table.push(row);
    }
    Ok(VerbOutput {
        checks,
        summary: json!({
            "model": model.name(),
            "alpha": coeff.alpha,
            "beta": coeff.beta,
            "eigenvalues": values.to_vec(),
            "zero_count": zeros,
            "positive_count": values.iter().filter(|v| **v > rel * lmax).count(),
            "coercivity_constant": spec.coercivity_constant(),
            "coercivity_conditions": conditions,
            "drill_free_structure": drill_free,
        }),
        tables: vec![("eigenvalues.csv".into(), table)],
        json: vec![],
    })
}
