//! Dead loads, boundary partition and the load potential `Λ = L · y`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShellError};
use crate::fields::VecSeries;
use crate::tensor::{Coords2, Vec3};

use super::mesh::ShellMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeCondition {
    /// Part of `∂S_f`: traction prescribed (possibly zero).
    #[default]
    Free,
    /// Part of `∂S_d`: `y = y⁰` and `R = Q⁰`.
    Clamped,
    /// Part of `∂S_d` for positions only: `y = y⁰`, frames free.
    Pinned,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    #[serde(default)]
    pub condition: EdgeCondition,
    /// Force per unit reference length, active on free edges only.
    #[serde(default)]
    pub traction: Option<VecSeries>,
}

/// Edges in the order `x1 = min, x1 = max, x2 = min, x2 = max`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    #[serde(default)]
    pub x1_min: EdgeSpec,
    #[serde(default)]
    pub x1_max: EdgeSpec,
    #[serde(default)]
    pub x2_min: EdgeSpec,
    #[serde(default)]
    pub x2_max: EdgeSpec,
}

impl BoundarySpec {
    pub fn clamped() -> Self {
        let e = EdgeSpec {
            condition: EdgeCondition::Clamped,
            traction: None,
        };
        BoundarySpec {
            x1_min: e.clone(),
            x1_max: e.clone(),
            x2_min: e.clone(),
            x2_max: e,
        }
    }

    pub fn edges(&self) -> [&EdgeSpec; 4] {
        [&self.x1_min, &self.x1_max, &self.x2_min, &self.x2_max]
    }

    pub fn validate(&self) -> Result<()> {
        for e in self.edges() {
            if e.condition != EdgeCondition::Free && e.traction.is_some() {
                return Err(ShellError::InvalidArgument(
                    "tractions may only act on free edges".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSpec {
    /// Surface force `f` per unit reference area.
    #[serde(default)]
    pub surface_force: VecSeries,
    #[serde(default)]
    pub boundary: BoundarySpec,
}

impl LoadSpec {
    pub fn clamped_with_force(f: VecSeries) -> Self {
        LoadSpec {
            surface_force: f,
            boundary: BoundarySpec::clamped(),
        }
    }
}

/// Nodes on edge `e` (same order as [`BoundarySpec::edges`]).
pub fn edge_nodes(mesh: &ShellMesh, e: usize) -> Vec<usize> {
    let [n1, n2] = mesh.n;
    match e {
        0 => (0..n2).map(|j| mesh.node_index(0, j)).collect(),
        1 => (0..n2).map(|j| mesh.node_index(n1 - 1, j)).collect(),
        2 => (0..n1).map(|i| mesh.node_index(i, 0)).collect(),
        _ => (0..n1).map(|i| mesh.node_index(i, n2 - 1)).collect(),
    }
}

/// `fixed[6a + c]`: dof `c` of node `a` is pinned (0..3 position, 3..6 rotation).
pub fn dirichlet_mask(mesh: &ShellMesh, bc: &BoundarySpec) -> Vec<bool> {
    let mut fixed = vec![false; 6 * mesh.node_count()];
    for (e, spec) in bc.edges().iter().enumerate() {
        let comps = match spec.condition {
            EdgeCondition::Free => 0..0,
            EdgeCondition::Pinned => 0..3,
            EdgeCondition::Clamped => 0..6,
        };
        for a in edge_nodes(mesh, e) {
            for c in comps.clone() {
                fixed[6 * a + c] = true;
            }
        }
    }
    fixed
}

/// Nodal load vector `L` with `Λ(y) = Σ_a L_a · y_a` (exact for the
/// bilinear interpolant of `y` under the quadrature used).
pub fn load_vector(mesh: &ShellMesh, loads: &LoadSpec) -> Vec<Vec3> {
    let mut l = vec![Vec3::zeros(); mesh.node_count()];
    for cell in &mesh.cells {
        for g in &cell.gauss {
            let f = loads.surface_force.value(g.x);
            for (a, &node) in cell.nodes.iter().enumerate() {
                l[node] += g.shape[a] * g.weight * f;
            }
        }
    }
    let g = 0.5 / 3f64.sqrt();
    for (e, spec) in loads.boundary.edges().iter().enumerate() {
        let Some(t) = &spec.traction else { continue };
        if spec.condition != EdgeCondition::Free {
            continue;
        }
        let nodes = edge_nodes(mesh, e);
        let axis = if e < 2 { 1 } else { 0 };
        for w in nodes.windows(2) {
            let (xa, xb) = (mesh.nodes[w[0]], mesh.nodes[w[1]]);
            for s in [0.5 - g, 0.5 + g] {
                let x: Coords2 = xa + s * (xb - xa);
                let ds = mesh.chart.tangents(x)[axis].norm() * (xb - xa).norm() * 0.5;
                let f = t.value(x);
                l[w[0]] += (1.0 - s) * ds * f;
                l[w[1]] += s * ds * f;
            }
        }
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Series;
    use crate::geometry::{Rect, SurfaceChart};

    #[test]
    fn constant_force_sums_to_total() {
        let mesh = ShellMesh::new(SurfaceChart::plate(Rect::unit()), 4, 5).unwrap();
        let f = VecSeries::new(Series::zero(), Series::zero(), Series::constant(2.0));
        let l = load_vector(&mesh, &LoadSpec::clamped_with_force(f));
        let total: Vec3 = l.iter().sum();
        assert!((total - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn edge_traction_sums_to_edge_force() {
        let mesh = ShellMesh::new(SurfaceChart::plate(Rect::new([0.0, 2.0], [0.0, 1.0]).unwrap()), 5, 3).unwrap();
        let mut loads = LoadSpec::default();
        loads.boundary.x1_min.condition = EdgeCondition::Clamped;
        loads.boundary.x1_max.traction = Some(VecSeries::new(Series::constant(1.0), Series::zero(), Series::zero()));
        let l = load_vector(&mesh, &loads);
        let total: Vec3 = l.iter().sum();
        assert!((total - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-14);
        let mask = dirichlet_mask(&mesh, &loads.boundary);
        assert_eq!(mask.iter().filter(|m| **m).count(), 3 * 6);
    }

    #[test]
    fn traction_on_a_clamped_edge_is_rejected() {
        let mut bc = BoundarySpec::clamped();
        bc.x2_max.traction = Some(VecSeries::zero());
        assert!(bc.validate().is_err());
    }
}
