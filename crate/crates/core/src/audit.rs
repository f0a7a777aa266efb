//! Seeded generators of smooth configurations, drill fields and sample
//! points for property audits.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::drilling::DrillField;
use crate::error::Result;
use crate::fields::{Series, VecSeries};
use crate::geometry::{ChartShape, DerivativeMode, Rect, SurfaceChart};
use crate::kinematics::{strain_state, DeformedConfig, FrameField, Placement, StrainState};
use crate::tensor::Coords2;

/// Plate, cylinder and sphere patch, all with analytic derivatives.
pub fn standard_charts() -> Vec<SurfaceChart> {
    vec![
        SurfaceChart::plate(Rect::unit()),
        SurfaceChart::new(
            ChartShape::Cylinder { radius: 0.9 },
            Rect::unit(),
            DerivativeMode::Analytic,
        )
        .expect("valid cylinder"),
        SurfaceChart::new(
            ChartShape::Sphere { radius: 1.1 },
            Rect::new([0.0, 1.0], [-0.5, 0.5]).expect("valid rectangle"),
            DerivativeMode::Analytic,
        )
        .expect("valid sphere patch"),
    ]
}

/// Linear, bilinear and trigonometric terms with amplitudes up to `scale`.
pub fn random_series(rng: &mut ChaCha8Rng, scale: f64) -> Series {
    Series::monomial(scale * rng.gen_range(-1.0..1.0), 1, 0)
        .plus(Series::monomial(scale * rng.gen_range(-1.0..1.0), 0, 1))
        .plus(Series::monomial(scale * rng.gen_range(-1.0..1.0), 1, 1))
        .plus(Series::sine(
            scale * rng.gen_range(-1.0..1.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.0..1.0),
        ))
}

pub fn random_vec_series(rng: &mut ChaCha8Rng, scale: f64) -> VecSeries {
    VecSeries::new(
        random_series(rng, scale),
        random_series(rng, scale),
        random_series(rng, scale),
    )
}

/// `y = y⁰ + u`, `R = exp(ψ) Q⁰` with smooth random `u`, `ψ`.
pub fn random_config(rng: &mut ChaCha8Rng, reference: &FrameField) -> DeformedConfig {
    let u = random_vec_series(rng, 0.3);
    let psi = random_vec_series(rng, 0.8);
    DeformedConfig {
        placement: Placement::displaced(u),
        frame: FrameField::rotated(psi, reference.clone()),
    }
}

/// Interior point with a margin of 5% of each side.
pub fn random_point(rng: &mut ChaCha8Rng, chart: &SurfaceChart) -> Coords2 {
    chart.domain.lerp(rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95))
}

#[derive(Debug, Clone)]
pub struct Trial {
    pub chart: SurfaceChart,
    pub config: DeformedConfig,
    pub drill: DrillField,
    pub x: Coords2,
    pub state: StrainState,
}

/// One (chart, state, drill) triple on the given chart.
pub fn random_trial(rng: &mut ChaCha8Rng, chart: &SurfaceChart) -> Result<Trial> {
    let reference = FrameField::Reference(chart.clone());
    let config = random_config(rng, &reference);
    let drill = DrillField::new(random_series(rng, 2.0));
    let x = random_point(rng, chart);
    let state = strain_state(&config, &reference, chart, x)?;
    Ok(Trial {
        chart: chart.clone(),
        config,
        drill,
        x,
        state,
    })
}
