//! Reference-surface geometry from a closed-form chart `y⁰(x1, x2)`.
//!
//! Conventions: `a_α = ∂_α y⁰`, `n⁰ = a1 × a2 / |a1 × a2|`,
//! `a = a_α ⊗ a^α`, `b = −∂_α n⁰ ⊗ a^α`, `c = −n⁰ × a`.
//! Curvature signs follow the chart orientation through `n⁰`.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ShellError};
use crate::fields::Series;
use crate::tensor::{outer, skew, Coords2, Mat3, PlanarFrame, Vec3};

/// Metric condition number above which a chart point is rejected.
pub const MAX_METRIC_CONDITION: f64 = 1e8;
/// Relative default step for central differences (times domain diameter).
pub const DEFAULT_FD_REL_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x1: [f64; 2],
    pub x2: [f64; 2],
}

impl Rect {
    pub fn new(x1: [f64; 2], x2: [f64; 2]) -> Result<Self> {
        if !(x1[0] < x1[1] && x2[0] < x2[1]) {
            return Err(ShellError::InvalidArgument(format!("empty rectangle {x1:?} x {x2:?}")));
        }
        Ok(Rect { x1, x2 })
    }

    pub fn unit() -> Self {
        Rect {
            x1: [0.0, 1.0],
            x2: [0.0, 1.0],
        }
    }

    pub fn contains(&self, x: Coords2) -> bool {
        let slack = 1e-12 * self.diameter();
        x[0] >= self.x1[0] - slack
            && x[0] <= self.x1[1] + slack
            && x[1] >= self.x2[0] - slack
            && x[1] <= self.x2[1] + slack
    }

    pub fn diameter(&self) -> f64 {
        (self.width(0).powi(2) + self.width(1).powi(2)).sqrt()
    }

    pub fn width(&self, axis: usize) -> f64 {
        match axis {
            0 => self.x1[1] - self.x1[0],
            _ => self.x2[1] - self.x2[0],
        }
    }

    /// Maps `(s, t) ∈ [0, 1]²` onto the rectangle.
    pub fn lerp(&self, s: f64, t: f64) -> Coords2 {
        Coords2::new(self.x1[0] + s * self.width(0), self.x2[0] + t * self.width(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChartShape {
    /// `(x1, x2, 0)`.
    Plate,
    /// `(r cos(x1/r), r sin(x1/r), x2)`: axis `e3`, outward normal.
    Cylinder { radius: f64 },
    /// `r (cos x2 cos x1, cos x2 sin x1, sin x2)`: longitude/latitude, outward normal.
    Sphere { radius: f64 },
    /// `(x1, x2, f(x1, x2))`.
    Graph { height: Series },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    CentralDifference { step: f64 },
}

/// Closed-form reference chart over a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceChart {
    pub shape: ChartShape,
    pub domain: Rect,
    pub mode: DerivativeMode,
}

/// Pointwise reference-surface data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceFrame {
    pub point: Coords2,
    pub covariant: [Vec3; 2],
    pub contravariant: [Vec3; 2],
    pub normal: Vec3,
    /// First fundamental tensor (tangent-plane projector).
    pub a: Mat3,
    /// Second fundamental tensor.
    pub b: Mat3,
    /// Alternator tensor.
    pub c: Mat3,
    /// `√a = |a1 × a2|`.
    pub area_density: f64,
}

impl SurfaceFrame {
    /// Builds the frame from the covariant basis and the partials of the
    /// unit normal. `normal` overrides the normal computed from the basis
    /// (it must be unit and orthogonal to the tangents within rounding).
    pub fn from_basis(point: Coords2, covariant: [Vec3; 2], normal_partials: [Vec3; 2]) -> Result<Self> {
        let degenerate = |reason: String| ShellError::DegenerateChart {
            x1: point[0],
            x2: point[1],
            reason,
        };
        let m = covariant[0].cross(&covariant[1]);
        let area_density = m.norm();
        if !(area_density >= 1e-12) {
            return Err(degenerate(format!("|a1 x a2| = {area_density:e}")));
        }
        let normal = m / area_density;
        let metric = Matrix2::new(
            covariant[0].dot(&covariant[0]),
            covariant[0].dot(&covariant[1]),
            covariant[1].dot(&covariant[0]),
            covariant[1].dot(&covariant[1]),
        );
        let eig = metric.symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        if hi / lo > MAX_METRIC_CONDITION {
            return Err(degenerate(format!("metric condition number {:e}", hi / lo)));
        }
        let inv = metric
            .try_inverse()
            .ok_or_else(|| degenerate("singular metric".into()))?;
        let contravariant = [
            inv[(0, 0)] * covariant[0] + inv[(0, 1)] * covariant[1],
            inv[(1, 0)] * covariant[0] + inv[(1, 1)] * covariant[1],
        ];
        let a = outer(&covariant[0], &contravariant[0]) + outer(&covariant[1], &contravariant[1]);
        let b = -(outer(&normal_partials[0], &contravariant[0]) + outer(&normal_partials[1], &contravariant[1]));
        let c = -skew(&normal) * a;
        Ok(SurfaceFrame {
            point,
            covariant,
            contravariant,
            normal,
            a,
            b,
            c,
            area_density,
        })
    }

    /// Surface gradient `∂_α f ⊗ a^α` from the coordinate partials of `f`.
    pub fn gradient(&self, partials: &[Vec3; 2]) -> Mat3 {
        outer(&partials[0], &self.contravariant[0]) + outer(&partials[1], &self.contravariant[1])
    }

    /// Orthonormal tangent frame `{a1/|a1|, n × a1/|a1|, n}`.
    pub fn orthonormal(&self) -> PlanarFrame {
        let d1 = self.covariant[0].normalize();
        let d2 = self.normal.cross(&d1);
        PlanarFrame { d1, d2, n: self.normal }
    }

    pub fn metric(&self) -> Matrix2<f64> {
        let g = &self.covariant;
        Matrix2::new(g[0].dot(&g[0]), g[0].dot(&g[1]), g[1].dot(&g[0]), g[1].dot(&g[1]))
    }

    /// Eigenvalues of `b` restricted to the tangent plane, ascending.
    pub fn principal_curvatures(&self) -> [f64; 2] {
        let f = self.orthonormal();
        let bs = crate::tensor::sym(&self.b);
        let m = Matrix2::new(
            f.d1.dot(&(bs * f.d1)),
            f.d1.dot(&(bs * f.d2)),
            f.d2.dot(&(bs * f.d1)),
            f.d2.dot(&(bs * f.d2)),
        );
        let e = m.symmetric_eigenvalues();
        [e.min(), e.max()]
    }
}

impl SurfaceChart {
    pub fn new(shape: ChartShape, domain: Rect, mode: DerivativeMode) -> Result<Self> {
        match &shape {
            ChartShape::Cylinder { radius } | ChartShape::Sphere { radius } if !(*radius > 0.0) => {
                return Err(ShellError::InvalidArgument(format!(
                    "radius must be positive, got {radius}"
                )))
            }
            ChartShape::Sphere { .. } => {
                let half_pi = std::f64::consts::FRAC_PI_2;
                if domain.x2[0] <= -half_pi || domain.x2[1] >= half_pi {
                    return Err(ShellError::InvalidArgument("sphere patch must avoid the poles".into()));
                }
            }
            _ => {}
        }
        if let DerivativeMode::CentralDifference { step } = mode {
            if !(step > 0.0) {
                return Err(ShellError::InvalidArgument(format!(
                    "finite-difference step must be positive, got {step}"
                )));
            }
        }
        Ok(SurfaceChart { shape, domain, mode })
    }

    pub fn plate(domain: Rect) -> Self {
        Self::new(ChartShape::Plate, domain, DerivativeMode::Analytic).unwrap()
    }

    pub fn with_mode(&self, mode: DerivativeMode) -> Self {
        SurfaceChart { mode, ..self.clone() }
    }

    /// Default central-difference step for this chart.
    pub fn default_step(&self) -> f64 {
        DEFAULT_FD_REL_STEP * self.domain.diameter()
    }

    /// Step used by central differences: the configured step in
    /// finite-difference mode, the default step otherwise.
    pub fn fd_step(&self) -> f64 {
        match self.mode {
            DerivativeMode::CentralDifference { step } => step,
            DerivativeMode::Analytic => self.default_step(),
        }
    }

    pub fn is_analytic(&self) -> bool {
        self.mode == DerivativeMode::Analytic
    }

    pub fn position(&self, x: Coords2) -> Vec3 {
        let (x1, x2) = (x[0], x[1]);
        match &self.shape {
            ChartShape::Plate => Vec3::new(x1, x2, 0.0),
            ChartShape::Cylinder { radius: r } => Vec3::new(r * (x1 / r).cos(), r * (x1 / r).sin(), x2),
            ChartShape::Sphere { radius: r } => {
                Vec3::new(r * x2.cos() * x1.cos(), r * x2.cos() * x1.sin(), r * x2.sin())
            }
            ChartShape::Graph { height } => Vec3::new(x1, x2, height.value(x)),
        }
    }

    fn analytic_tangents(&self, x: Coords2) -> [Vec3; 2] {
        let (x1, x2) = (x[0], x[1]);
        match &self.shape {
            ChartShape::Plate => [Vec3::x(), Vec3::y()],
            ChartShape::Cylinder { radius: r } => [Vec3::new(-(x1 / r).sin(), (x1 / r).cos(), 0.0), Vec3::z()],
            ChartShape::Sphere { radius: r } => [
                Vec3::new(-r * x2.cos() * x1.sin(), r * x2.cos() * x1.cos(), 0.0),
                Vec3::new(-r * x2.sin() * x1.cos(), -r * x2.sin() * x1.sin(), r * x2.cos()),
            ],
            ChartShape::Graph { height } => {
                let g = height.gradient(x);
                [Vec3::new(1.0, 0.0, g[0]), Vec3::new(0.0, 1.0, g[1])]
            }
        }
    }

    /// `∂_β a_α`, indexed `[α][β]`.
    fn analytic_second(&self, x: Coords2) -> [[Vec3; 2]; 2] {
        let (x1, x2) = (x[0], x[1]);
        let z = Vec3::zeros();
        match &self.shape {
            ChartShape::Plate => [[z, z], [z, z]],
            ChartShape::Cylinder { radius: r } => {
                let d11 = Vec3::new(-(x1 / r).cos() / r, -(x1 / r).sin() / r, 0.0);
                [[d11, z], [z, z]]
            }
            ChartShape::Sphere { radius: r } => {
                let (c1, s1, c2, s2) = (x1.cos(), x1.sin(), x2.cos(), x2.sin());
                let d11 = Vec3::new(-r * c2 * c1, -r * c2 * s1, 0.0);
                let d12 = Vec3::new(r * s2 * s1, -r * s2 * c1, 0.0);
                let d22 = Vec3::new(-r * c2 * c1, -r * c2 * s1, -r * s2);
                [[d11, d12], [d12, d22]]
            }
            ChartShape::Graph { height } => {
                let h = height.hessian(x);
                [
                    [Vec3::new(0.0, 0.0, h[0][0]), Vec3::new(0.0, 0.0, h[0][1])],
                    [Vec3::new(0.0, 0.0, h[1][0]), Vec3::new(0.0, 0.0, h[1][1])],
                ]
            }
        }
    }

    fn offsets(&self) -> [Coords2; 2] {
        let h = self.fd_step();
        [Coords2::new(h, 0.0), Coords2::new(0.0, h)]
    }

    /// Covariant basis `a_α` in the chart's derivative mode.
    pub fn tangents(&self, x: Coords2) -> [Vec3; 2] {
        match self.mode {
            DerivativeMode::Analytic => self.analytic_tangents(x),
            DerivativeMode::CentralDifference { step } => {
                let e = self.offsets();
                [0, 1].map(|k| (self.position(x + e[k]) - self.position(x - e[k])) / (2.0 * step))
            }
        }
    }

    /// Covariant basis and its partials `∂_β a_α` (`[α][β]`).
    pub fn tangents_with_partials(&self, x: Coords2) -> ([Vec3; 2], [[Vec3; 2]; 2]) {
        match self.mode {
            DerivativeMode::Analytic => (self.analytic_tangents(x), self.analytic_second(x)),
            DerivativeMode::CentralDifference { step } => {
                let e = self.offsets();
                let plus = [self.tangents(x + e[0]), self.tangents(x + e[1])];
                let minus = [self.tangents(x - e[0]), self.tangents(x - e[1])];
                let d = |alpha: usize, beta: usize| (plus[beta][alpha] - minus[beta][alpha]) / (2.0 * step);
                (self.tangents(x), [[d(0, 0), d(0, 1)], [d(1, 0), d(1, 1)]])
            }
        }
    }

    fn raw_normal(&self, x: Coords2) -> Result<Vec3> {
        let t = self.tangents(x);
        let m = t[0].cross(&t[1]);
        let len = m.norm();
        if !(len >= 1e-12) {
            return Err(ShellError::DegenerateChart {
                x1: x[0],
                x2: x[1],
                reason: format!("|a1 x a2| = {len:e}"),
            });
        }
        Ok(m / len)
    }

    /// Partials `∂_α n⁰`.
    pub fn normal_partials(&self, x: Coords2) -> Result<[Vec3; 2]> {
        match self.mode {
            DerivativeMode::Analytic => {
                let (t, dt) = self.tangents_with_partials(x);
                let m = t[0].cross(&t[1]);
                let len = m.norm();
                let n = m / len;
                Ok([0, 1].map(|beta| {
                    let dm = dt[0][beta].cross(&t[1]) + t[0].cross(&dt[1][beta]);
                    (dm - n * n.dot(&dm)) / len
                }))
            }
            DerivativeMode::CentralDifference { step } => {
                let e = self.offsets();
                let mut out = [Vec3::zeros(); 2];
                for k in 0..2 {
                    out[k] = (self.raw_normal(x + e[k])? - self.raw_normal(x - e[k])?) / (2.0 * step);
                }
                Ok(out)
            }
        }
    }

    pub fn frame_at(&self, x: Coords2) -> Result<SurfaceFrame> {
        if !self.domain.contains(x) {
            return Err(ShellError::OutsideDomain(x[0], x[1]));
        }
        SurfaceFrame::from_basis(x, self.tangents(x), self.normal_partials(x)?)
    }
}

/// A vector-valued field on the parameter domain.
pub trait VectorField: Send + Sync {
    fn value(&self, x: Coords2) -> Vec3;

    /// Exact coordinate partials, when the field knows them.
    fn analytic_partials(&self, _x: Coords2) -> Option<[Vec3; 2]> {
        None
    }
}

/// A tensor-valued field on the parameter domain.
pub trait TensorField: Send + Sync {
    fn value(&self, x: Coords2) -> Mat3;
}

/// Adapter turning a closure into a [`VectorField`] without analytic partials.
pub struct FnVectorField<F>(pub F);

impl<F: Fn(Coords2) -> Vec3 + Send + Sync> VectorField for FnVectorField<F> {
    fn value(&self, x: Coords2) -> Vec3 {
        (self.0)(x)
    }
}

/// Adapter turning a closure into a [`TensorField`].
pub struct FnTensorField<F>(pub F);

impl<F: Fn(Coords2) -> Mat3 + Send + Sync> TensorField for FnTensorField<F> {
    fn value(&self, x: Coords2) -> Mat3 {
        (self.0)(x)
    }
}

impl VectorField for crate::fields::VecSeries {
    fn value(&self, x: Coords2) -> Vec3 {
        crate::fields::VecSeries::value(self, x)
    }

    fn analytic_partials(&self, x: Coords2) -> Option<[Vec3; 2]> {
        Some(self.partials(x))
    }
}

/// The chart's own position map, i.e. the reference configuration `y⁰`.
pub struct ChartPosition(pub SurfaceChart);

impl VectorField for ChartPosition {
    fn value(&self, x: Coords2) -> Vec3 {
        self.0.position(x)
    }

    fn analytic_partials(&self, x: Coords2) -> Option<[Vec3; 2]> {
        Some(self.0.tangents(x))
    }
}

/// Coordinate partials in the chart's derivative mode.
pub fn field_partials(field: &dyn VectorField, chart: &SurfaceChart, x: Coords2) -> [Vec3; 2] {
    if chart.is_analytic() {
        if let Some(p) = field.analytic_partials(x) {
            return p;
        }
    }
    let h = chart.fd_step();
    let e = [Coords2::new(h, 0.0), Coords2::new(0.0, h)];
    e.map(|d| (field.value(x + d) - field.value(x - d)) / (2.0 * h))
}

/// `Grad_s f = ∂_α f ⊗ a^α`.
pub fn surface_gradient(field: &dyn VectorField, chart: &SurfaceChart, x: Coords2) -> Result<Mat3> {
    let frame = chart.frame_at(x)?;
    Ok(frame.gradient(&field_partials(field, chart, x)))
}

/// `Div_s T = (1/√a) ∂_α(√a T a^α)`, the adjoint of [`surface_gradient`]
/// for tensors with `T n⁰ = 0`.
pub fn surface_divergence(field: &dyn TensorField, chart: &SurfaceChart, x: Coords2) -> Result<Vec3> {
    let frame = chart.frame_at(x)?;
    let h = chart.fd_step();
    let flux = |y: Coords2, alpha: usize| -> Result<Vec3> {
        let f = SurfaceFrame::from_basis(y, chart.tangents(y), chart.normal_partials(y)?)?;
        Ok(f.area_density * (field.value(y) * f.contravariant[alpha]))
    };
    let mut div = Vec3::zeros();
    for alpha in 0..2 {
        let mut e = Coords2::zeros();
        e[alpha] = h;
        div += (flux(x + e, alpha)? - flux(x - e, alpha)?) / (2.0 * h);
    }
    Ok(div / frame.area_density)
}
