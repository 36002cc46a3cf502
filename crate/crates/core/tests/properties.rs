use proptest::prelude::*;

use latent_slice::baseline::{stepping_out, SteppingOutConfig};
use latent_slice::discrete::{
    detailed_balance_residual, discrete_step, transition_row, TabulatedPmf,
};
use latent_slice::latent::{shrink_sample, ShrinkBox};
use latent_slice::models::CorrelatedGaussian;
use latent_slice::rng::shifted_exponential_map;
use latent_slice::{LatentSliceConfig, LatentSliceSampler, LogDensity, RngState};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn shrinkage_stays_around_the_anchor(
        seed in any::<u64>(),
        anchor in prop::collection::vec(-5.0f64..5.0, 1..6),
        radius in 0.01f64..2.0,
    ) {
        let d = anchor.len();
        let lower: Vec<f64> = anchor.iter().map(|a| a - 3.0).collect();
        let upper: Vec<f64> = anchor.iter().map(|a| a + 4.0).collect();
        let mut bounds = ShrinkBox::new(lower, upper).unwrap();
        let start = bounds.volume();
        let mut rng = RngState::new(seed);
        let in_ball = |y: &[f64]| y.iter().zip(&anchor).map(|(a, b)| (a - b).powi(2)).sum::<f64>() < radius * radius;
        let out = shrink_sample(&mut rng, &mut bounds, &anchor, in_ball, 100_000).unwrap();
        prop_assert!(in_ball(&out.point));
        prop_assert!(bounds.contains(&anchor));
        prop_assert!(bounds.contains(&out.point));
        prop_assert!(bounds.volume() <= start && bounds.volume() > 0.0);
        prop_assert_eq!(out.point.len(), d);
    }

    #[test]
    fn window_kernel_rows_and_balance(
        mass in prop::collection::vec(0.001f64..10.0, 1..12),
        floor in 0usize..4,
        k in 1usize..6,
        seed in any::<u64>(),
    ) {
        let t = TabulatedPmf::from_mass(floor, &mass);
        prop_assert!(detailed_balance_residual(&t, k) < 1e-12);
        let mut rng = RngState::new(seed);
        for x in floor..floor + mass.len() {
            let row = transition_row::<f64, _>(x, &t, k);
            let total: f64 = row.iter().map(|(_, p)| p).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            let y = discrete_step(x, &t, k, &mut rng).unwrap();
            prop_assert!(y >= floor && y < floor + mass.len() && y.abs_diff(x) < k);
        }
    }

    #[test]
    fn stepping_out_bracket_is_a_whole_number_of_steps(
        seed in any::<u64>(),
        x in -3.0f64..3.0,
        width in 0.05f64..3.0,
        m in 1usize..20,
    ) {
        let cfg = SteppingOutConfig::new(width, m).unwrap();
        let mut rng = RngState::new(seed);
        let log_w = -0.5 * x * x - 1.0;
        let (l, r) = stepping_out(x, log_w, |t: f64| -0.5 * t * t, &cfg, &mut rng);
        prop_assert!(l <= x && x <= r);
        let steps = (r - l) / width;
        prop_assert!((steps - steps.round()).abs() < 1e-9);
        prop_assert!(steps.round() as usize >= 1 && steps.round() as usize <= m);
    }

    #[test]
    fn latent_step_keeps_state_consistent(seed in any::<u64>(), lambda in 0.01f64..5.0) {
        let target = CorrelatedGaussian::<f64>::default();
        let sampler = LatentSliceSampler::new(LatentSliceConfig::with_lambda(lambda)).unwrap();
        let mut state = sampler.initial_state(&target, vec![0.3, -0.1]).unwrap();
        let mut rng = RngState::new(seed);
        for _ in 0..20 {
            let report = sampler.step(&mut state, &target, &mut rng).unwrap();
            prop_assert!(state.log_pi_y() > report.log_level);
            prop_assert_eq!(state.log_pi_y(), target.log_density(state.y()));
            prop_assert!(state.s().iter().all(|&s| s > 0.0 && s.is_finite()));
        }
    }

    #[test]
    fn shifted_exponential_exceeds_its_shift(rate in 0.001f64..100.0, shift in 0.0f64..50.0, u in 0.0f64..1.0) {
        prop_assert!(shifted_exponential_map(rate, shift, u) >= shift);
    }
}
