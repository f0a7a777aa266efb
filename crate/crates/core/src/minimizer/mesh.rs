//! Structured bilinear meshes over the chart rectangle and nodal dofs.

use crate::error::{Result, ShellError};
use crate::geometry::{SurfaceChart, SurfaceFrame};
use crate::kinematics::FrameField;
use crate::measures::GradientInvariants;
use crate::tensor::{Coords2, Mat3, Rotation, Vec3};

const GAUSS: f64 = 0.577_350_269_189_625_8;

/// Interpolated fields at a point of a cell: `y`, `∂_α y`, `d_i`, `∂_α d_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFields {
    pub y: Vec3,
    pub dy: [Vec3; 2],
    pub d: [Vec3; 3],
    pub dd: [[Vec3; 3]; 2],
}

impl LocalFields {
    pub fn interpolate(shape: &[f64; 4], dshape: &[[f64; 2]; 4], y: &[Vec3; 4], r: &[Mat3; 4]) -> Self {
        let mut f = LocalFields {
            y: Vec3::zeros(),
            dy: [Vec3::zeros(); 2],
            d: [Vec3::zeros(); 3],
            dd: [[Vec3::zeros(); 3]; 2],
        };
        for a in 0..4 {
            f.y += shape[a] * y[a];
            for alpha in 0..2 {
                f.dy[alpha] += dshape[a][alpha] * y[a];
            }
            for i in 0..3 {
                let col = r[a].column(i);
                f.d[i] += shape[a] * col;
                for alpha in 0..2 {
                    f.dd[alpha][i] += dshape[a][alpha] * col;
                }
            }
        }
        f
    }

    /// Director components `E_{iα}` and `K_{iα}` with `K_{iα} = ½ e_ijk ∂_α d_j · d_k`,
    /// before subtracting the reference values.
    pub fn raw_components(&self) -> ([[f64; 2]; 3], [[f64; 2]; 3]) {
        let mut e = [[0.0; 2]; 3];
        let mut k = [[0.0; 2]; 3];
        for alpha in 0..2 {
            let dd = &self.dd[alpha];
            for i in 0..3 {
                e[i][alpha] = self.dy[alpha].dot(&self.d[i]);
                let (j, l) = ((i + 1) % 3, (i + 2) % 3);
                k[i][alpha] = 0.5 * (dd[j].dot(&self.d[l]) - dd[l].dot(&self.d[j]));
            }
        }
        (e, k)
    }

    pub fn gradient_invariants(&self, frame: &SurfaceFrame) -> GradientInvariants {
        let f = frame.gradient(&self.dy);
        let g = frame.gradient(&[self.dd[0][2], self.dd[1][2]]);
        GradientInvariants::new(&f, &self.d[2], &g)
    }
}

/// Quadrature point with cached reference data.
#[derive(Debug, Clone, Copy)]
pub struct GaussPoint {
    pub x: Coords2,
    pub frame: SurfaceFrame,
    pub q0: Rotation,
    /// Gauss weight times `√a` times the cell Jacobian.
    pub weight: f64,
    pub shape: [f64; 4],
    /// `∂N_a/∂x_α`.
    pub dshape: [[f64; 2]; 4],
    pub reference: LocalFields,
    pub reference_components: ([[f64; 2]; 3], [[f64; 2]; 3]),
    pub reference_invariants: GradientInvariants,
}

#[derive(Debug, Clone)]
pub struct Cell {
    /// Counter-clockwise: `(i, j), (i+1, j), (i+1, j+1), (i, j+1)`.
    pub nodes: [usize; 4],
    pub gauss: [GaussPoint; 4],
}

/// Per-node positions and director frames.
#[derive(Debug, Clone, PartialEq)]
pub struct DofField {
    pub y: Vec<Vec3>,
    pub r: Vec<Rotation>,
}

impl DofField {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Rigid motion `y ↦ Q y + t`, `R ↦ Q R`.
    pub fn rigidly_moved(&self, q: &Rotation, t: &Vec3) -> Self {
        DofField {
            y: self.y.iter().map(|y| q.apply(y) + t).collect(),
            r: self.r.iter().map(|r| q.compose(r)).collect(),
        }
    }

    /// Superposes nodal rotations `R_a ↦ R_a exp(θ_a e3)` about each `d3`.
    pub fn drilled(&self, theta: &[f64]) -> Self {
        DofField {
            y: self.y.clone(),
            r: self
                .r
                .iter()
                .zip(theta)
                .map(|(r, t)| r.compose(&crate::tensor::rotation_exp(&(*t * Vec3::z()))))
                .collect(),
        }
    }
}

/// Chart rectangle split into `(n1 − 1) × (n2 − 1)` bilinear cells.
#[derive(Debug, Clone)]
pub struct ShellMesh {
    pub chart: SurfaceChart,
    pub n: [usize; 2],
    pub nodes: Vec<Coords2>,
    pub cells: Vec<Cell>,
    pub reference: DofField,
}

impl ShellMesh {
    pub fn new(chart: SurfaceChart, n1: usize, n2: usize) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(ShellError::InvalidArgument(format!(
                "mesh needs at least 2 nodes per direction, got {n1} x {n2}"
            )));
        }
        let dom = chart.domain;
        let h = [dom.width(0) / (n1 - 1) as f64, dom.width(1) / (n2 - 1) as f64];
        let mut nodes = Vec::with_capacity(n1 * n2);
        for j in 0..n2 {
            for i in 0..n1 {
                nodes.push(Coords2::new(dom.x1[0] + i as f64 * h[0], dom.x2[0] + j as f64 * h[1]));
            }
        }
        let frame_field = FrameField::Reference(chart.clone());
        let reference = DofField {
            y: nodes.iter().map(|x| chart.position(*x)).collect(),
            r: nodes.iter().map(|x| frame_field.rotation(*x)).collect::<Result<_>>()?,
        };
        let mut cells = Vec::with_capacity((n1 - 1) * (n2 - 1));
        for j in 0..n2 - 1 {
            for i in 0..n1 - 1 {
                let ids = [i + n1 * j, i + 1 + n1 * j, i + 1 + n1 * (j + 1), i + n1 * (j + 1)];
                let y0 = ids.map(|a| reference.y[a]);
                let r0 = ids.map(|a| *reference.r[a].matrix());
                let corner = nodes[ids[0]];
                let mut gauss = Vec::with_capacity(4);
                for (gx, gy) in [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)] {
                    let (xi, eta) = (gx * GAUSS, gy * GAUSS);
                    let signs = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
                    let shape = signs.map(|(s, t)| 0.25 * (1.0 + s * xi) * (1.0 + t * eta));
                    let dshape = signs.map(|(s, t)| {
                        [
                            0.25 * s * (1.0 + t * eta) * 2.0 / h[0],
                            0.25 * t * (1.0 + s * xi) * 2.0 / h[1],
                        ]
                    });
                    let x = corner + Coords2::new(0.5 * (1.0 + xi) * h[0], 0.5 * (1.0 + eta) * h[1]);
                    let frame = chart.frame_at(x)?;
                    let q0 = frame_field.rotation(x)?;
                    let local = LocalFields::interpolate(&shape, &dshape, &y0, &r0);
                    gauss.push(GaussPoint {
                        x,
                        frame,
                        q0,
                        weight: frame.area_density * 0.25 * h[0] * h[1],
                        shape,
                        dshape,
                        reference: local,
                        reference_components: local.raw_components(),
                        reference_invariants: local.gradient_invariants(&frame),
                    });
                }
                cells.push(Cell {
                    nodes: ids,
                    gauss: [gauss[0], gauss[1], gauss[2], gauss[3]],
                });
            }
        }
        Ok(ShellMesh {
            chart,
            n: [n1, n2],
            nodes,
            cells,
            reference,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        i + self.n[0] * j
    }

    /// Grid spacing in parameter coordinates.
    pub fn spacing(&self) -> [f64; 2] {
        let d = self.chart.domain;
        [d.width(0) / (self.n[0] - 1) as f64, d.width(1) / (self.n[1] - 1) as f64]
    }

    /// Reference surface area by quadrature.
    pub fn area(&self) -> f64 {
        self.cells.iter().flat_map(|c| c.gauss.iter()).map(|g| g.weight).sum()
    }

    pub fn validate(&self, dofs: &DofField) -> Result<()> {
        let n = self.node_count();
        if dofs.y.len() != n || dofs.r.len() != n {
            return Err(ShellError::InvalidDofs(format!(
                "expected {n} nodes, got {} positions and {} frames",
                dofs.y.len(),
                dofs.r.len()
            )));
        }
        if dofs.y.iter().any(|y| !y.iter().all(|v| v.is_finite())) {
            return Err(ShellError::InvalidDofs("non-finite nodal position".into()));
        }
        if let Some(d) = dofs.r.iter().map(|r| r.defect()).find(|d| !(*d <= 1e-8)) {
            return Err(ShellError::InvalidDofs(format!(
                "nodal frame not a rotation: defect {d:e}"
            )));
        }
        Ok(())
    }
}
