//! Property tests over seeded random configurations.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shellkit::audit::{random_point, random_trial, standard_charts};
use shellkit::cli::report::num;
use shellkit::drilling::{transform_state, DrillField};
use shellkit::energy::{EnergyModel, EngineeringParams, ReducedForm};
use shellkit::kinematics::{strain_state, DeformedConfig, FrameField};
use shellkit::measures::{first_integrals, strain_measures};
use shellkit::tensor::{rotation_exp, Vec3};

fn params() -> EngineeringParams {
    EngineeringParams::new(100.0, 0.3, 0.1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measures_ignore_drilling(seed in any::<u64>(), chart in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_trial(&mut rng, &standard_charts()[chart]).unwrap();
        let drilled = transform_state(&t.state, &t.drill, t.x);
        let d = strain_measures(&t.state).max_difference(&strain_measures(&drilled));
        prop_assert!(d <= 1e-10, "difference {d:e}");
    }

    #[test]
    fn drill_free_forms_ignore_drilling(seed in any::<u64>(), chart in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_trial(&mut rng, &standard_charts()[chart]).unwrap();
        let drilled = transform_state(&t.state, &t.drill, t.x);
        for form in [ReducedForm::Phi, ReducedForm::PsiExpanded, ReducedForm::PsiDeviatoric, ReducedForm::Composed] {
            let m = EnergyModel::Reduced { form, params: params() };
            let (w0, w1) = (m.density(&t.state), m.density(&drilled));
            prop_assert!((w0 - w1).abs() <= 1e-9 * (1.0 + w0.abs()), "{}: {w0} vs {w1}", form.name());
        }
    }

    #[test]
    fn rigid_motions_are_strain_free(
        seed in any::<u64>(),
        chart in 0usize..3,
        axis in prop::array::uniform3(-3.0f64..3.0),
        shift in prop::array::uniform3(-5.0f64..5.0),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chart = &standard_charts()[chart];
        let reference = FrameField::Reference(chart.clone());
        let q = rotation_exp(&Vec3::from(axis));
        let config = DeformedConfig::rigid(&reference, q, Vec3::from(shift));
        let x = random_point(&mut rng, chart);
        let s = strain_state(&config, &reference, chart, x).unwrap();
        prop_assert!(s.ee.amax() <= 1e-12 && s.ke.amax() <= 1e-12);
        let m = strain_measures(&s);
        prop_assert!(m.max_difference(&shellkit::measures::ReducedMeasures::zero()) <= 1e-12);
    }

    #[test]
    fn constant_drill_keeps_first_integrals_u1(seed in any::<u64>(), theta in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_trial(&mut rng, &standard_charts()[0]).unwrap();
        let drill = DrillField::new(shellkit::fields::Series::constant(theta));
        let drilled = transform_state(&t.state, &drill, t.x);
        let d = first_integrals(&t.state).max_difference(&first_integrals(&drilled));
        // FᵀF and Fᵀd3 do not see the drill about d3.
        prop_assert!(d[0] <= 1e-10 && d[1] <= 1e-10, "{d:?}");
    }

    #[test]
    fn csv_numbers_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let s = num(v);
        prop_assert_eq!(s.parse::<f64>().unwrap(), v);
        prop_assert!(!s.contains(','));
    }
}
