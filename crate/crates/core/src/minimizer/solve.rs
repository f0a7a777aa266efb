//! Damped Newton descent with multiplicative rotation updates and an
//! Armijo backtracking line search.

use nalgebra::DMatrix;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use serde::{Deserialize, Serialize};

use crate::energy::EnergyModel;
use crate::error::{Result, ShellError};
use crate::tensor::Vec3;

use super::assemble::{apply_step, assemble_energy, element_derivatives, DiscreteEnergy, ELEMENT_DOFS};
use super::loads::{dirichlet_mask, load_vector, LoadSpec};
use super::mesh::{DofField, ShellMesh};

/// Mesh, energy, loads and constraints of one run.
#[derive(Debug, Clone)]
pub struct Problem {
    pub mesh: ShellMesh,
    pub energy: DiscreteEnergy,
    pub loads: LoadSpec,
    pub load_vector: Vec<Vec3>,
    pub fixed: Vec<bool>,
}

impl Problem {
    pub fn new(mesh: ShellMesh, model: EnergyModel, loads: LoadSpec) -> Result<Self> {
        loads.boundary.validate()?;
        let load_vector = load_vector(&mesh, &loads);
        let fixed = dirichlet_mask(&mesh, &loads.boundary);
        Ok(Problem {
            energy: DiscreteEnergy::new(model),
            mesh,
            loads,
            load_vector,
            fixed,
        })
    }

    pub fn energy(&self, dofs: &DofField) -> Result<f64> {
        assemble_energy(&self.mesh, &self.energy, &self.load_vector, dofs)
    }

    /// Gradient with the Dirichlet components zeroed.
    pub fn gradient(&self, dofs: &DofField) -> Vec<f64> {
        let mut g = super::assemble::assemble_gradient(&self.mesh, &self.energy, &self.load_vector, dofs);
        for (v, f) in g.iter_mut().zip(&self.fixed) {
            if *f {
                *v = 0.0;
            }
        }
        g
    }

    pub fn has_dirichlet(&self) -> bool {
        self.fixed.iter().any(|f| *f)
    }

    /// Pinned positions and frames must carry their reference values.
    pub fn check_admissible(&self, dofs: &DofField) -> Result<()> {
        self.mesh.validate(dofs)?;
        let reference = &self.mesh.reference;
        for a in 0..dofs.len() {
            let pos = (0..3).any(|c| self.fixed[6 * a + c]);
            let rot = (3..6).any(|c| self.fixed[6 * a + c]);
            if pos && (dofs.y[a] - reference.y[a]).norm() > 1e-12 {
                return Err(ShellError::InvalidDofs(format!(
                    "node {a} violates its position constraint"
                )));
            }
            if rot && (dofs.r[a].matrix() - reference.r[a].matrix()).norm() > 1e-12 {
                return Err(ShellError::InvalidDofs(format!(
                    "node {a} violates its rotation constraint"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeOptions {
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_gradient_tol")]
    pub gradient_tol: f64,
    #[serde(default = "default_armijo")]
    pub armijo: f64,
    #[serde(default = "default_contraction")]
    pub contraction: f64,
    #[serde(default = "default_max_backtracks")]
    pub max_backtracks: usize,
    /// Initial Levenberg shift relative to the largest Hessian diagonal.
    #[serde(default = "default_damping")]
    pub initial_damping: f64,
}

fn default_max_iterations() -> usize {
    50
}
fn default_gradient_tol() -> f64 {
    1e-9
}
fn default_armijo() -> f64 {
    1e-4
}
fn default_contraction() -> f64 {
    0.5
}
fn default_max_backtracks() -> usize {
    40
}
fn default_damping() -> f64 {
    1e-8
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_iterations: default_max_iterations(),
            gradient_tol: default_gradient_tol(),
            armijo: default_armijo(),
            contraction: default_contraction(),
            max_backtracks: default_max_backtracks(),
            initial_damping: default_damping(),
        }
    }
}

impl MinimizeOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.gradient_tol > 0.0
            && self.armijo > 0.0
            && self.armijo < 1.0
            && self.contraction > 0.0
            && self.contraction < 1.0
            && self.initial_damping >= 0.0
            && self.max_backtracks > 0;
        if ok {
            Ok(())
        } else {
            Err(ShellError::InvalidArgument(format!("invalid solver options {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub energy: f64,
    pub gradient_norm: f64,
    /// Accepted line-search step leading to the next record (0 on the last).
    pub step: f64,
    pub damping: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub dofs: DofField,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl MinimizeResult {
    pub fn final_energy(&self) -> f64 {
        self.history.last().map_or(0.0, |r| r.energy)
    }

    pub fn final_gradient_norm(&self) -> f64 {
        self.history.last().map_or(0.0, |r| r.gradient_norm)
    }

    pub fn iterations(&self) -> usize {
        self.history.len().saturating_sub(1)
    }

    pub fn energy_monotone(&self) -> bool {
        self.history.windows(2).all(|w| w[1].energy <= w[0].energy)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `I` from `init` over the admissible set.
pub fn minimize(problem: &Problem, init: &DofField, options: &MinimizeOptions) -> Result<MinimizeResult> {
    options.validate()?;
    problem.check_admissible(init)?;
    let mut warnings = Vec::new();
    if !problem.has_dirichlet() {
        warnings.push("no Dirichlet constraints: rigid-body modes are unrestrained".to_string());
    }
    let ndof = problem.fixed.len();
    let mut free_index = vec![usize::MAX; ndof];
    let mut nfree = 0;
    for (k, f) in problem.fixed.iter().enumerate() {
        if !f {
            free_index[k] = nfree;
            nfree += 1;
        }
    }
    let mesh = &problem.mesh;
    let mut dofs = init.clone();
    let mut energy = problem.energy(&dofs)?;
    let mut damping = options.initial_damping;
    let mut history = Vec::new();
    let mut converged = false;
    for iteration in 0..=options.max_iterations {
        let derivs = element_derivatives(mesh, &problem.energy, &dofs);
        let mut g = vec![0.0; ndof];
        for (cell, (eg, _)) in mesh.cells.iter().zip(&derivs) {
            for k in 0..ELEMENT_DOFS {
                g[6 * cell.nodes[k / 6] + k % 6] += eg[k];
            }
        }
        for (a, l) in problem.load_vector.iter().enumerate() {
            for c in 0..3 {
                g[6 * a + c] -= l[c];
            }
        }
        let gf: Vec<f64> = (0..ndof).filter(|k| !problem.fixed[*k]).map(|k| g[k]).collect();
        let gnorm = dot(&gf, &gf).sqrt();
        history.push(IterationRecord {
            iteration,
            energy,
            gradient_norm: gnorm,
            step: 0.0,
            damping,
        });
        if gnorm <= options.gradient_tol {
            converged = true;
            break;
        }
        if iteration == options.max_iterations || nfree == 0 {
            break;
        }

        let mut entries = Vec::new();
        let mut max_diag: f64 = 0.0;
        for (cell, (_, eh)) in mesh.cells.iter().zip(&derivs) {
            for i in 0..ELEMENT_DOFS {
                let gi = free_index[6 * cell.nodes[i / 6] + i % 6];
                if gi == usize::MAX {
                    continue;
                }
                for j in 0..ELEMENT_DOFS {
                    let gj = free_index[6 * cell.nodes[j / 6] + j % 6];
                    if gj != usize::MAX {
                        entries.push((gi, gj, eh[(i, j)]));
                    }
                }
                max_diag = max_diag.max(eh[(i, i)]);
            }
        }
        let scale = if max_diag > 0.0 { max_diag } else { 1.0 };
        let rhs = DMatrix::from_iterator(nfree, 1, gf.iter().map(|v| -v));
        let mut direction = None;
        for _ in 0..40 {
            let mut coo = CooMatrix::new(nfree, nfree);
            for &(i, j, v) in &entries {
                coo.push(i, j, v);
            }
            for i in 0..nfree {
                coo.push(i, i, damping.max(1e-14) * scale);
            }
            let csc = CscMatrix::from(&coo);
            match CscCholesky::factor(&csc) {
                Ok(chol) => {
                    let p = chol.solve(&rhs);
                    let p: Vec<f64> = p.iter().cloned().collect();
                    if p.iter().all(|v| v.is_finite()) && dot(&gf, &p) < 0.0 {
                        direction = Some(p);
                        break;
                    }
                }
                Err(_) => {}
            }
            damping = (damping * 10.0).max(1e-8);
        }
        let Some(pf) = direction else {
            return Err(ShellError::LineSearchFailed {
                iteration,
                gradient_norm: gnorm,
            });
        };
        let mut p = vec![0.0; ndof];
        for k in 0..ndof {
            if free_index[k] != usize::MAX {
                p[k] = pf[free_index[k]];
            }
        }
        let slope = dot(&gf, &pf);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..options.max_backtracks {
            let trial = apply_step(&dofs, &p, t);
            match problem.energy(&trial) {
                Ok(e) if e <= energy + options.armijo * t * slope => {
                    accepted = Some((trial, e));
                    break;
                }
                Ok(_) | Err(ShellError::NonFiniteEnergy) => t *= options.contraction,
                Err(e) => return Err(e),
            }
        }
        let Some((trial, e)) = accepted else {
            return Err(ShellError::LineSearchFailed {
                iteration,
                gradient_norm: gnorm,
            });
        };
        if let Some(last) = history.last_mut() {
            last.step = t;
        }
        damping = if t == 1.0 {
            (damping / 10.0).max(1e-12)
        } else {
            damping * 10.0
        };
        dofs = trial;
        energy = e;
    }
    Ok(MinimizeResult {
        dofs,
        history,
        converged,
        warnings,
    })
}
