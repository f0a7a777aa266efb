//! Pointwise equilibrium residuals `Div N + f` and
//! `Div M + axl(N Fᵀ − F Nᵀ) + l` (with `l = 0`) at interior nodes, from
//! grid central differences of the nodal dofs.

use serde::Serialize;

use crate::energy::{couple_axial, stress_resultants, StressResultants};
use crate::error::{Result, ShellError};
use crate::geometry::SurfaceFrame;
use crate::kinematics::{from_components, FrameField, StrainState};
use crate::tensor::{axl_of_skew_part, Coords2, Mat3, Vec3};

use super::mesh::DofField;
use super::solve::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeResidual {
    pub node: usize,
    pub x1: f64,
    pub x2: f64,
    pub force: [f64; 3],
    pub moment: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub nodes: Vec<NodeResidual>,
    pub max_force: f64,
    pub max_moment: f64,
}

fn norm(v: &[f64; 3]) -> f64 {
    Vec3::from(*v).norm()
}

impl ResidualReport {
    /// Largest force residual over the nodes sitting at `points`; `None`
    /// when some point is not an evaluated node.
    pub fn max_force_at(&self, points: &[Coords2]) -> Option<f64> {
        let mut worst: f64 = 0.0;
        for p in points {
            let n = self
                .nodes
                .iter()
                .find(|n| (n.x1 - p[0]).abs() < 1e-9 && (n.x2 - p[1]).abs() < 1e-9)?;
            worst = worst.max(norm(&n.force));
        }
        Some(worst)
    }
}

struct NodalStress {
    frame: SurfaceFrame,
    f: Mat3,
    stress: StressResultants,
}

fn nodal_stress(problem: &Problem, dofs: &DofField, i: usize, j: usize) -> Result<NodalStress> {
    let mesh = &problem.mesh;
    let h = mesh.spacing();
    let a = mesh.node_index(i, j);
    let nb = [
        (mesh.node_index(i + 1, j), mesh.node_index(i - 1, j)),
        (mesh.node_index(i, j + 1), mesh.node_index(i, j - 1)),
    ];
    let x = mesh.nodes[a];
    let frame = mesh.chart.frame_at(x)?;
    // Strains relative to the same difference stencil applied to the
    // reference dofs, so the reference state is exactly unstrained.
    let grid = |d: &DofField| {
        let dy = [0, 1].map(|k| (d.y[nb[k].0] - d.y[nb[k].1]) / (2.0 * h[k]));
        let r = d.r[a];
        let kappa = [0, 1].map(|k| {
            let dr = (d.r[nb[k].0].matrix() - d.r[nb[k].1].matrix()) / (2.0 * h[k]);
            axl_of_skew_part(&(r.matrix().transpose() * dr))
        });
        (dy, r, kappa)
    };
    let (dy, r, kappa) = grid(dofs);
    let (dy0, r0, kappa0_h) = grid(&mesh.reference);
    let mut e = [[0.0; 2]; 3];
    let mut k = [[0.0; 2]; 3];
    for alpha in 0..2 {
        for i in 0..3 {
            e[i][alpha] = dy[alpha].dot(&r.director(i)) - dy0[alpha].dot(&r0.director(i));
            k[i][alpha] = kappa[alpha][i] - kappa0_h[alpha][i];
        }
    }
    let (q0, dq0) = FrameField::Reference(mesh.chart.clone()).with_partials(&mesh.chart, x)?;
    let kappa0 = [0, 1].map(|k| axl_of_skew_part(&(q0.matrix().transpose() * dq0[k])));
    let f = frame.gradient(&dy);
    let state = StrainState::from_pointwise(frame, q0, kappa0, f, r, kappa)?
        .with_strains(from_components(&e, &q0, &frame), from_components(&k, &q0, &frame));
    Ok(NodalStress {
        frame,
        f,
        stress: stress_resultants(&state, &problem.energy.model),
    })
}

/// Residuals at nodes at least two grid lines away from the boundary.
pub fn equilibrium_residual(problem: &Problem, dofs: &DofField) -> Result<ResidualReport> {
    problem.mesh.validate(dofs)?;
    let mesh = &problem.mesh;
    let [n1, n2] = mesh.n;
    if n1 < 5 || n2 < 5 {
        return Err(ShellError::InvalidArgument(
            "residual check needs at least 5 nodes per direction".into(),
        ));
    }
    let mut stress: Vec<Option<NodalStress>> = (0..mesh.node_count()).map(|_| None).collect();
    for j in 1..n2 - 1 {
        for i in 1..n1 - 1 {
            stress[mesh.node_index(i, j)] = Some(nodal_stress(problem, dofs, i, j)?);
        }
    }
    let h = mesh.spacing();
    let flux = |a: usize, alpha: usize, m: bool| {
        let s = stress[a].as_ref().expect("interior stress");
        let t = if m { s.stress.m } else { s.stress.n };
        s.frame.area_density * (t * s.frame.contravariant[alpha])
    };
    let mut nodes = Vec::new();
    for j in 2..n2 - 2 {
        for i in 2..n1 - 2 {
            let a = mesh.node_index(i, j);
            let nb = [
                (mesh.node_index(i + 1, j), mesh.node_index(i - 1, j)),
                (mesh.node_index(i, j + 1), mesh.node_index(i, j - 1)),
            ];
            let s = stress[a].as_ref().expect("interior stress");
            let div = |m: bool| {
                (0..2)
                    .map(|k| (flux(nb[k].0, k, m) - flux(nb[k].1, k, m)) / (2.0 * h[k]))
                    .sum::<Vec3>()
                    / s.frame.area_density
            };
            let x = mesh.nodes[a];
            let force = div(false) + problem.loads.surface_force.value(x);
            let moment = div(true) + couple_axial(&s.stress.n, &s.f);
            nodes.push(NodeResidual {
                node: a,
                x1: x[0],
                x2: x[1],
                force: force.into(),
                moment: moment.into(),
            });
        }
    }
    let max_force = nodes.iter().map(|n| norm(&n.force)).fold(0.0, f64::max);
    let max_moment = nodes.iter().map(|n| norm(&n.moment)).fold(0.0, f64::max);
    Ok(ResidualReport {
        nodes,
        max_force,
        max_moment,
    })
}
