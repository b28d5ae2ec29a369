//! Property-based invariants.

use atlab_core::composition::{plane_wave_profile, CompositionSpec};
use atlab_core::exit::{exit_oracle, getoor_mean, BallDomain};
use atlab_core::fd::{fd_time_derivative, roundoff_bound, FdStencil};
use atlab_core::lab::ExperimentConfig;
use atlab_core::quad::{integrate, Tolerance};
use atlab_core::rng::{pairwise_sum, Moments};
use atlab_core::semigroup::PlaneWave;
use atlab_core::skbm::{q_apply, SpectralCoefficients, SpectralDomain};
use atlab_core::AlphaIndex;
use proptest::prelude::*;

fn coprime(l: u32, m: u32) -> bool {
    let (mut a, mut b) = (l, m);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a == 1
}

fn alpha_strategy() -> impl Strategy<Value = AlphaIndex> {
    (1u32..=4, 1u32..=6)
        .prop_filter("0 < l/m <= 2 in lowest terms", |&(l, m)| l <= 2 * m && coprime(l, m))
        .prop_map(|(l, m)| AlphaIndex::new(l, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_display_round_trips(a in alpha_strategy()) {
        let back: AlphaIndex = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn profile_is_a_decreasing_probability(k in 0.1f64..3.0, t in 0.05f64..4.0, dt in 0.01f64..1.0) {
        let spec = CompositionSpec::cauchy_time(PlaneWave::scalar(k));
        let g0 = plane_wave_profile(&spec, t).unwrap().value;
        let g1 = plane_wave_profile(&spec, t + dt).unwrap().value;
        prop_assert!(g0 > 0.0 && g0 <= 1.0);
        prop_assert!(g1 < g0);
    }

    #[test]
    fn profile_is_invariant_under_kappa_sign(k in 0.1f64..3.0, t in 0.1f64..3.0) {
        let a = plane_wave_profile(&CompositionSpec::btp(PlaneWave::scalar(k)), t).unwrap().value;
        let b = plane_wave_profile(&CompositionSpec::btp(PlaneWave::scalar(-k)), t).unwrap().value;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn getoor_reduces_to_brownian_oracle(n in 1usize..5, r in 0.2f64..3.0, frac in 0.0f64..0.99) {
        let y = frac * r;
        let ball = BallDomain::centered(n, r).unwrap();
        let mut x = vec![0.0; n];
        x[0] = y;
        let oracle = exit_oracle(&ball, &x).unwrap();
        let getoor = getoor_mean(AlphaIndex::new(2, 1).unwrap(), n, r, y).unwrap();
        prop_assert!((oracle - getoor).abs() <= 1e-13 * oracle.max(1.0));
    }

    #[test]
    fn moments_merge_matches_sequential(xs in prop::collection::vec(-1e3f64..1e3, 2..200), split in 0usize..200) {
        let split = split.min(xs.len());
        let mut all = Moments::default();
        let (mut left, mut right) = (Moments::default(), Moments::default());
        for (i, &x) in xs.iter().enumerate() {
            all.push(x);
            if i < split { left.push(x) } else { right.push(x) }
        }
        let merged = left.merge(&right);
        prop_assert_eq!(merged.n, all.n);
        prop_assert!((merged.mean - all.mean).abs() <= 1e-9 * (1.0 + all.mean.abs()));
        prop_assert!((merged.variance() - all.variance()).abs() <= 1e-8 * (1.0 + all.variance()));
    }

    #[test]
    fn pairwise_sum_matches_naive(xs in prop::collection::vec(-1.0f64..1.0, 0..500)) {
        let naive: f64 = xs.iter().sum();
        prop_assert!((pairwise_sum(&xs) - naive).abs() <= 1e-12 * xs.len().max(1) as f64);
    }

    #[test]
    fn quadrature_is_exact_on_cubics(c in prop::array::uniform4(-5.0f64..5.0), a in -2.0f64..0.0, b in 0.1f64..2.0) {
        let p = |x: f64| c[0] + x * (c[1] + x * (c[2] + x * c[3]));
        let anti = |x: f64| x * (c[0] + x * (c[1] / 2.0 + x * (c[2] / 3.0 + x * c[3] / 4.0)));
        let r = integrate(p, a, b, Tolerance::default()).unwrap();
        prop_assert!((r.value - (anti(b) - anti(a))).abs() <= 1e-12 * (1.0 + r.value.abs()));
    }

    #[test]
    fn fd_recovers_exponential_rates(rate in -2.0f64..2.0, q in 1usize..=4, t in 0.5f64..3.0) {
        let st = FdStencil::default_for(q);
        let d = fd_time_derivative(|s| (rate * s).exp(), t, &st).unwrap();
        let exact = rate.powi(q as i32) * (rate * t).exp();
        let err = (d.value - exact).abs();
        let reach = st.half_width() * st.step_at(t);
        let scale = (rate.abs() * (t + reach)).exp();
        prop_assert!(err <= d.error + roundoff_bound(&st, t, scale), "{:?} vs {}", d, exact);
        prop_assert!(err <= 1e-4 * (1.0 + exact.abs()), "{:?} vs {}", d, exact);
    }

    #[test]
    fn skbm_is_bounded_by_initial_mass(
        c in prop::collection::vec(-1.0f64..1.0, 1..6),
        t in 0.0f64..3.0,
        x in 0.0f64..std::f64::consts::PI,
        a in alpha_strategy(),
    ) {
        let domain = SpectralDomain::unit_pi();
        let terms: Vec<(Vec<u32>, f64)> = c.iter().enumerate().map(|(i, &v)| (vec![i as u32 + 1], v)).collect();
        let f = SpectralCoefficients::from_sine_sum(&domain, &terms).unwrap();
        let u = q_apply(&domain, &f, a, t, &[x]).unwrap();
        let mass: f64 = c.iter().map(|v| v.abs()).sum();
        prop_assert!(u.abs() <= mass + 1e-12);
        if t == 0.0 {
            prop_assert!((u - f.eval(&domain, &[x])).abs() <= 1e-12);
        }
    }

    #[test]
    fn config_hash_survives_toml_round_trip(seed in 0..=i64::MAX as u64, samples in 1000usize..10_000_000, k in 0.1f64..5.0) {
        let text = format!("experiment = \"thm21\"\nseed = {seed}\nsamples = {samples}\nkappa = [{k:?}, 1.0]\n");
        let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
        let again = ExperimentConfig::from_toml_str(&toml::to_string(&cfg).unwrap()).unwrap();
        prop_assert_eq!(cfg.hash(), again.hash());
    }
}
