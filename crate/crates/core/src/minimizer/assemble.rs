//! Discrete functional `I = Σ_cells Σ_gauss W √a w − L · y` and its
//! element-local finite-difference derivatives.

use nalgebra::SMatrix;
use rayon::prelude::*;

use crate::energy::{EnergyModel, ReducedForm};
use crate::error::{Result, ShellError};
use crate::kinematics::from_components;
use crate::measures::ReducedMeasures;
use crate::tensor::{rotation_exp, Mat3, Vec3};

use super::mesh::{Cell, DofField, GaussPoint, LocalFields, ShellMesh};

pub const ELEMENT_DOFS: usize = 24;
pub const GRADIENT_STEP: f64 = 1e-6;
pub const HESSIAN_STEP: f64 = 1e-4;

pub type ElementMatrix = SMatrix<f64, ELEMENT_DOFS, ELEMENT_DOFS>;

/// How a Gauss-point density is evaluated from the interpolated fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityRoute {
    /// `E_{iα}`, `K_{iα}` from director components relative to the
    /// discrete reference, then `W(Ee, Ke)`.
    Components,
    /// `𝓔, γ, Ψ, Φ` from `F`, `d3`, `Grad d3` relative to the discrete
    /// reference; exactly blind to nodal drilling rotations.
    Measures,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteEnergy {
    pub model: EnergyModel,
    pub route: DensityRoute,
}

impl DiscreteEnergy {
    /// Measure-based forms go through the measures; the composed form is
    /// evaluated through its trace/deviator `Ψ` equivalent.
    pub fn new(model: EnergyModel) -> Self {
        match model {
            EnergyModel::Reduced {
                form: ReducedForm::Phi | ReducedForm::PsiExpanded | ReducedForm::PsiDeviatoric,
                ..
            } => DiscreteEnergy {
                model,
                route: DensityRoute::Measures,
            },
            EnergyModel::Reduced {
                form: ReducedForm::Composed,
                params,
            } => DiscreteEnergy {
                model: EnergyModel::Reduced {
                    form: ReducedForm::PsiDeviatoric,
                    params,
                },
                route: DensityRoute::Measures,
            },
            _ => DiscreteEnergy {
                model,
                route: DensityRoute::Components,
            },
        }
    }

    pub fn density(&self, g: &GaussPoint, f: &LocalFields) -> f64 {
        match self.route {
            DensityRoute::Components => {
                let (e, k) = f.raw_components();
                let (e0, k0) = g.reference_components;
                let mut de = [[0.0; 2]; 3];
                let mut dk = [[0.0; 2]; 3];
                for i in 0..3 {
                    for alpha in 0..2 {
                        de[i][alpha] = e[i][alpha] - e0[i][alpha];
                        dk[i][alpha] = k[i][alpha] - k0[i][alpha];
                    }
                }
                let ee = from_components(&de, &g.q0, &g.frame);
                let ke = from_components(&dk, &g.q0, &g.frame);
                self.model.density_strains(&ee, &ke, &g.frame)
            }
            DensityRoute::Measures => {
                let m = discrete_measures(g, f);
                self.model
                    .density_measures(&m, &g.frame)
                    .expect("measure route holds a measure-based form")
            }
        }
    }
}

/// Reduced measures relative to the discrete reference: `b_h = −F⁰ᵀ Grad d3⁰`
/// and `(n × b)_h = −F⁰ᵀ(d3⁰ × Grad d3⁰)` replace `b` and `n⁰ × b`.
pub fn discrete_measures(g: &GaussPoint, f: &LocalFields) -> ReducedMeasures {
    let inv = f.gradient_invariants(&g.frame);
    let r = &g.reference_invariants;
    let strain = 0.5 * (inv.ftf - r.ftf);
    let b = -r.ft_grad_d3;
    let nb = -r.ft_d3_cross_grad_d3;
    ReducedMeasures {
        strain,
        shear: inv.ftd3 - r.ftd3,
        psi: inv.ft_grad_d3 + b + strain * b,
        phi: inv.ft_d3_cross_grad_d3 + nb + strain * nb,
    }
}

/// Nodal data of one cell.
#[derive(Debug, Clone, Copy)]
pub struct ElementDofs {
    pub y: [Vec3; 4],
    pub r: [Mat3; 4],
}

impl ElementDofs {
    pub fn gather(cell: &Cell, dofs: &DofField) -> Self {
        ElementDofs {
            y: cell.nodes.map(|a| dofs.y[a]),
            r: cell.nodes.map(|a| *dofs.r[a].matrix()),
        }
    }

    /// Adds `h` to local dof `k`: position or left rotation `exp(h e_c) R`.
    pub fn perturbed(&self, k: usize, h: f64) -> Self {
        let mut p = *self;
        let (a, c) = (k / 6, k % 6);
        if c < 3 {
            p.y[a][c] += h;
        } else {
            p.r[a] = rotation_exp(&(h * Vec3::ith(c - 3, 1.0))).matrix() * p.r[a];
        }
        p
    }
}

pub fn element_energy(energy: &DiscreteEnergy, cell: &Cell, d: &ElementDofs) -> f64 {
    cell.gauss
        .iter()
        .map(|g| {
            let f = LocalFields::interpolate(&g.shape, &g.dshape, &d.y, &d.r);
            g.weight * energy.density(g, &f)
        })
        .sum()
}

pub fn element_gradient(energy: &DiscreteEnergy, cell: &Cell, d: &ElementDofs) -> [f64; ELEMENT_DOFS] {
    let h = GRADIENT_STEP;
    let mut g = [0.0; ELEMENT_DOFS];
    for (k, gk) in g.iter_mut().enumerate() {
        *gk = (element_energy(energy, cell, &d.perturbed(k, h)) - element_energy(energy, cell, &d.perturbed(k, -h)))
            / (2.0 * h);
    }
    g
}

/// Symmetric central-difference Hessian in the update coordinates.
pub fn element_hessian(energy: &DiscreteEnergy, cell: &Cell, d: &ElementDofs) -> ElementMatrix {
    let h = HESSIAN_STEP;
    let w = |p: &ElementDofs| element_energy(energy, cell, p);
    let w0 = w(d);
    let plus: Vec<ElementDofs> = (0..ELEMENT_DOFS).map(|k| d.perturbed(k, h)).collect();
    let minus: Vec<ElementDofs> = (0..ELEMENT_DOFS).map(|k| d.perturbed(k, -h)).collect();
    let mut m = ElementMatrix::zeros();
    for i in 0..ELEMENT_DOFS {
        m[(i, i)] = (w(&plus[i]) - 2.0 * w0 + w(&minus[i])) / (h * h);
        for j in i + 1..ELEMENT_DOFS {
            let v = (w(&plus[i].perturbed(j, h)) - w(&plus[i].perturbed(j, -h)) - w(&minus[i].perturbed(j, h))
                + w(&minus[i].perturbed(j, -h)))
                / (4.0 * h * h);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// `Σ_cells W` in the cell order, summed serially for reproducibility.
pub fn strain_energy(mesh: &ShellMesh, energy: &DiscreteEnergy, dofs: &DofField) -> f64 {
    let parts: Vec<f64> = mesh
        .cells
        .par_iter()
        .map(|c| element_energy(energy, c, &ElementDofs::gather(c, dofs)))
        .collect();
    parts.iter().sum()
}

/// `I = Σ W − L · y`.
pub fn assemble_energy(mesh: &ShellMesh, energy: &DiscreteEnergy, loads: &[Vec3], dofs: &DofField) -> Result<f64> {
    mesh.validate(dofs)?;
    let work: f64 = loads.iter().zip(&dofs.y).map(|(l, y)| l.dot(y)).sum();
    let i = strain_energy(mesh, energy, dofs) - work;
    if i.is_finite() {
        Ok(i)
    } else {
        Err(ShellError::NonFiniteEnergy)
    }
}

/// Global gradient over all `6 n` dofs (loads included).
pub fn assemble_gradient(mesh: &ShellMesh, energy: &DiscreteEnergy, loads: &[Vec3], dofs: &DofField) -> Vec<f64> {
    let parts: Vec<[f64; ELEMENT_DOFS]> = mesh
        .cells
        .par_iter()
        .map(|c| element_gradient(energy, c, &ElementDofs::gather(c, dofs)))
        .collect();
    let mut g = vec![0.0; 6 * mesh.node_count()];
    for (cell, eg) in mesh.cells.iter().zip(&parts) {
        scatter_vector(&mut g, cell, eg);
    }
    for (a, l) in loads.iter().enumerate() {
        for c in 0..3 {
            g[6 * a + c] -= l[c];
        }
    }
    g
}

fn scatter_vector(g: &mut [f64], cell: &Cell, eg: &[f64; ELEMENT_DOFS]) {
    for (k, v) in eg.iter().enumerate() {
        g[6 * cell.nodes[k / 6] + k % 6] += v;
    }
}

/// Element gradients and Hessians, in cell order.
pub fn element_derivatives(
    mesh: &ShellMesh,
    energy: &DiscreteEnergy,
    dofs: &DofField,
) -> Vec<([f64; ELEMENT_DOFS], ElementMatrix)> {
    mesh.cells
        .par_iter()
        .map(|c| {
            let d = ElementDofs::gather(c, dofs);
            (element_gradient(energy, c, &d), element_hessian(energy, c, &d))
        })
        .collect()
}

/// Applies `y ← y + t p_y`, `R ← exp(t p_ω) R`.
pub fn apply_step(dofs: &DofField, p: &[f64], t: f64) -> DofField {
    let mut out = dofs.clone();
    for a in 0..dofs.len() {
        let s = &p[6 * a..6 * a + 6];
        out.y[a] += t * Vec3::new(s[0], s[1], s[2]);
        let w = t * Vec3::new(s[3], s[4], s[5]);
        if w != Vec3::zeros() {
            out.r[a] = rotation_exp(&w).compose(&dofs.r[a]);
        }
    }
    out
}
