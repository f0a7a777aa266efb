//! Drilling rotations about `d3` and the induced transformation of the
//! strain state.

use crate::fields::Series;
use crate::kinematics::StrainState;
use crate::tensor::{outer, skew, Coords2, Mat3, Rotation, Vec3};

/// `R_θ = d3 ⊗ d3 + cos θ (1 − d3 ⊗ d3) + sin θ (d3 × 1)`, for unit `d3`.
pub fn drilling_rotation(theta: f64, d3: &Vec3) -> Rotation {
    let p = outer(d3, d3);
    let m = p + theta.cos() * (Mat3::identity() - p) + theta.sin() * skew(d3);
    Rotation::project(&m)
}

/// Drilling angle field `θ(x1, x2)` with exact partials.
#[derive(Debug, Clone, PartialEq)]
pub struct DrillField {
    pub theta: Series,
}

impl DrillField {
    pub fn new(theta: Series) -> Self {
        DrillField { theta }
    }

    pub fn value(&self, x: Coords2) -> f64 {
        self.theta.value(x)
    }

    pub fn gradient(&self, x: Coords2) -> [f64; 2] {
        self.theta.gradient(x)
    }
}

/// Superposes the drilling rotation on the deformed directors,
/// `d_iᶿ = R_θ d_i`, and re-evaluates the component formulas for
/// `E_{iα}` and `K_{iα}` with the rotated directors.
pub fn transform_state(state: &StrainState, drill: &DrillField, x: Coords2) -> StrainState {
    let theta = drill.value(x);
    let dtheta = drill.gradient(x);
    let (c, s) = (theta.cos(), theta.sin());
    let r = state.r.matrix();
    let d = [0, 1, 2].map(|i| r.column(i).into_owned());
    // ∂_α d_j = R (κ_α × e_j)
    let dd = |alpha: usize, j: usize| r * state.kappa[alpha].cross(&Vec3::ith(j, 1.0));

    let rt = drilling_rotation(theta, &d[2]);
    let d_theta = [rt.apply(&d[0]), rt.apply(&d[1]), d[2]];
    let mut kappa = [Vec3::zeros(); 2];
    for (alpha, k) in kappa.iter_mut().enumerate() {
        let g = dtheta[alpha];
        let dd1 = c * dd(alpha, 0) + s * dd(alpha, 1) + g * (-s * d[0] + c * d[1]);
        let dd2 = -s * dd(alpha, 0) + c * dd(alpha, 1) + g * (-c * d[0] - s * d[1]);
        let dd3 = dd(alpha, 2);
        *k = Vec3::new(dd2.dot(&d_theta[2]), dd3.dot(&d_theta[0]), dd1.dot(&d_theta[1]));
    }
    let r_new = Rotation::project(&Mat3::from_columns(&d_theta));
    StrainState::from_pointwise(state.frame0, state.q0, state.kappa0, state.f, r_new, kappa)
        .expect("reference frame unchanged by drilling")
}

/// `|W(s) − W(s_θ)| / max(1, |W(s)|)`.
pub fn invariance_residual<W: Fn(&StrainState) -> f64>(
    energy: W,
    state: &StrainState,
    drill: &DrillField,
    x: Coords2,
) -> f64 {
    let w0 = energy(state);
    let w1 = energy(&transform_state(state, drill, x));
    (w0 - w1).abs() / w0.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::VecSeries;
    use crate::geometry::{Rect, SurfaceChart};
    use crate::kinematics::{strain_state, DeformedConfig, FrameField, Placement};
    use crate::tensor::rotation_exp;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn plate_state(config: Option<DeformedConfig>, x: Coords2) -> StrainState {
        let chart = SurfaceChart::plate(Rect::unit());
        let reference = FrameField::Reference(chart.clone());
        let config = config.unwrap_or_else(|| DeformedConfig::reference(&reference));
        strain_state(&config, &reference, &chart, x).unwrap()
    }

    #[test]
    fn drilling_rotation_cases() {
        assert!((drilling_rotation(0.0, &Vec3::z()).matrix() - Mat3::identity()).norm() < 1e-15);
        let q = drilling_rotation(FRAC_PI_2, &Vec3::z());
        assert!((q.apply(&Vec3::x()) - Vec3::y()).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let d3 = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
            .normalize();
            let theta = rng.gen_range(-3.0..3.0);
            let a = drilling_rotation(theta, &d3);
            let b = rotation_exp(&(theta * d3));
            assert!((a.matrix() - b.matrix()).norm() < 1e-13);
            assert!((a.apply(&d3) - d3).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_drill_is_identity() {
        let x = Coords2::new(0.4, 0.4);
        let s = plate_state(None, x);
        let t = transform_state(&s, &DrillField::new(Series::zero()), x);
        assert!((t.ee - s.ee).norm() < 1e-15);
        assert!((t.ke - s.ke).norm() < 1e-15);
    }

    #[test]
    fn constant_drill_on_the_reference_plate() {
        let x = Coords2::new(0.4, 0.4);
        let s = plate_state(None, x);
        let theta = 0.7;
        let t = transform_state(&s, &DrillField::new(Series::constant(theta)), x);
        // E_{iα} = e_α · d_iᶿ − δ_iα.
        let (c, sn) = (theta.cos(), theta.sin());
        let expected = Mat3::new(c - 1.0, sn, 0.0, -sn, c - 1.0, 0.0, 0.0, 0.0, 0.0);
        assert!((t.ee - expected).norm() < 1e-14);
        assert!(t.ke.norm() < 1e-14);
    }

    #[test]
    fn linear_drill_adds_to_k31() {
        let x = Coords2::new(0.4, 0.4);
        let s = plate_state(None, x);
        let t = transform_state(&s, &DrillField::new(Series::monomial(1.0, 1, 0)), x);
        let mut expected = s.ke_components;
        expected[2][0] += 1.0;
        for i in 0..3 {
            for a in 0..2 {
                assert!((t.ke_components[i][a] - expected[i][a]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn component_route_matches_field_route_and_body_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let chart = SurfaceChart::plate(Rect::new([-1.0, 1.0], [0.0, 2.0]).unwrap());
        let reference = FrameField::Reference(chart.clone());
        for _ in 0..20 {
            let s = |r: &mut ChaCha8Rng| {
                Series::monomial(r.gen_range(-0.5..0.5), 1, 0)
                    .plus(Series::monomial(r.gen_range(-0.5..0.5), 0, 2))
                    .plus(Series::sine(r.gen_range(-0.5..0.5), 1.0, -1.0, 0.3))
            };
            let psi = VecSeries::new(s(&mut rng), s(&mut rng), s(&mut rng));
            let u = VecSeries::new(s(&mut rng), s(&mut rng), s(&mut rng));
            let theta = s(&mut rng).plus(Series::constant(rng.gen_range(-2.0..2.0)));
            let config = DeformedConfig {
                placement: Placement::displaced(u),
                frame: FrameField::rotated(psi, reference.clone()),
            };
            let drilled_config = DeformedConfig {
                placement: config.placement.clone(),
                frame: FrameField::drilled(theta.clone(), config.frame.clone()),
            };
            let x = chart.domain.lerp(rng.gen(), rng.gen());
            let state = strain_state(&config, &reference, &chart, x).unwrap();
            let drill = DrillField::new(theta.clone());
            let via_components = transform_state(&state, &drill, x);
            let via_field = strain_state(&drilled_config, &reference, &chart, x).unwrap();
            let via_body = state.drilled(theta.value(x), theta.gradient(x));
            for other in [&via_field, &via_body] {
                assert!((via_components.ee - other.ee).norm() < 1e-12);
                assert!((via_components.ke - other.ke).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn drills_compose_additively() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let chart = SurfaceChart::plate(Rect::unit());
        let reference = FrameField::Reference(chart.clone());
        let psi = VecSeries::new(
            Series::monomial(0.3, 1, 1),
            Series::sine(0.4, 1.0, 2.0, 0.0),
            Series::monomial(-0.2, 0, 1),
        );
        let config = DeformedConfig {
            placement: Placement::displaced(VecSeries::new(
                Series::monomial(0.1, 2, 0),
                Series::zero(),
                Series::monomial(0.2, 1, 1),
            )),
            frame: FrameField::rotated(psi, reference.clone()),
        };
        for _ in 0..20 {
            let x = chart.domain.lerp(rng.gen(), rng.gen());
            let s = strain_state(&config, &reference, &chart, x).unwrap();
            let t1 = Series::sine(rng.gen_range(-2.0..2.0), 1.0, 0.5, 0.0);
            let t2 = Series::monomial(rng.gen_range(-2.0..2.0), 1, 1);
            let both = transform_state(
                &transform_state(&s, &DrillField::new(t1.clone()), x),
                &DrillField::new(t2.clone()),
                x,
            );
            let sum = transform_state(&s, &DrillField::new(t1.plus(t2)), x);
            assert!((both.ee - sum.ee).norm() < 1e-11);
            assert!((both.ke - sum.ke).norm() < 1e-11);
        }
    }

    #[test]
    fn zero_drill_residual_vanishes_for_any_functional() {
        let x = Coords2::new(0.2, 0.3);
        let s = plate_state(None, x);
        let w = |st: &StrainState| st.ee.norm_squared() + st.ke[(2, 0)].powi(3) + 1.0;
        assert_eq!(invariance_residual(w, &s, &DrillField::new(Series::zero()), x), 0.0);
    }
}
