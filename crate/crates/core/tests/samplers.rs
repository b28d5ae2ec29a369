//! Distributional tests of the exact samplers.

use std::f64::consts::PI;

use atlab_core::rng::RngStream;
use atlab_core::sampling::{
    gaussian_vector, sample_path, sample_subordinator, sample_symmetric_stable, PathKind, SubordinatorIndex,
};
use atlab_core::stats::{ks_one_sample, ks_two_sample};
use atlab_core::AlphaIndex;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

const N: usize = 50_000;
const P_MIN: f64 = 1e-3;

fn alpha(l: u32, m: u32) -> AlphaIndex {
    AlphaIndex::new(l, m).unwrap()
}

fn stable_draws(a: AlphaIndex, t: f64, stream: u64) -> Vec<f64> {
    let mut rng = RngStream::new(11, stream);
    (0..N).map(|_| sample_symmetric_stable(a, t, &mut rng).unwrap()).collect()
}

/// `sqrt(2 T) Z` with `T` the `alpha/2` subordinator.
fn subordinated_draws(a: AlphaIndex, t: f64, stream: u64) -> Vec<f64> {
    let beta = SubordinatorIndex::from_alpha(a).unwrap();
    let mut rng = RngStream::new(12, stream);
    (0..N)
        .map(|_| {
            let s = sample_subordinator(beta, t, &mut rng).unwrap();
            (2.0 * s).sqrt() * gaussian_vector(1, &mut rng)[0]
        })
        .collect()
}

#[test]
fn cauchy_matches_arctan_law() {
    for t in [0.5, 2.0] {
        let xs = stable_draws(alpha(1, 1), t, 1);
        let (d, p) = ks_one_sample(&xs, |x| 0.5 + (x / t).atan() / PI);
        assert!(p > P_MIN, "t={t}: D={d:.4} p={p:.2e}");
    }
}

#[test]
fn brownian_case_has_variance_two_t() {
    let t = 1.5;
    let xs = stable_draws(alpha(2, 1), t, 2);
    let normal = Normal::new(0.0, (2.0 * t).sqrt()).unwrap();
    let (d, p) = ks_one_sample(&xs, |x| normal.cdf(x));
    assert!(p > P_MIN, "D={d:.4} p={p:.2e}");
}

#[test]
fn half_subordinator_is_levy() {
    // T_t = t^2 / (4 Z^2), so P(T_t <= s) = erfc(t / (2 sqrt(s))).
    let t = 0.8;
    let mut rng = RngStream::new(13, 0);
    let xs: Vec<f64> = (0..N).map(|_| sample_subordinator(SubordinatorIndex::HALF, t, &mut rng).unwrap()).collect();
    let (d, p) = ks_one_sample(&xs, |s| erfc(t / (2.0 * s.sqrt())));
    assert!(p > P_MIN, "D={d:.4} p={p:.2e}");
}

#[test]
fn chambers_mallows_stuck_matches_subordination() {
    for (k, a) in [alpha(1, 3), alpha(1, 2), alpha(3, 2)].into_iter().enumerate() {
        let direct = stable_draws(a, 1.0, 10 + k as u64);
        let via = subordinated_draws(a, 1.0, 20 + k as u64);
        let (d, p) = ks_two_sample(&direct, &via);
        assert!(p > P_MIN, "alpha={a}: D={d:.4} p={p:.2e}");
    }
}

#[test]
fn stable_scaling_in_time() {
    // Y(t) has the law of t^(1/alpha) Y(1).
    let a = alpha(1, 2);
    let t: f64 = 3.0;
    let at_t = stable_draws(a, t, 30);
    let scaled: Vec<f64> = stable_draws(a, 1.0, 31).into_iter().map(|y| t.powf(2.0) * y).collect();
    let (d, p) = ks_two_sample(&at_t, &scaled);
    assert!(p > P_MIN, "D={d:.4} p={p:.2e}");
}

#[test]
fn path_endpoint_matches_marginal() {
    let a = alpha(1, 1);
    let grid: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
    let mut rng = RngStream::new(14, 0);
    let ends: Vec<f64> = (0..N / 5)
        .map(|_| {
            let path = sample_path(PathKind::SymmetricStable(a), &grid, &[0.0], &mut rng).unwrap();
            path.value(path.len() - 1)[0]
        })
        .collect();
    let (d, p) = ks_one_sample(&ends, |x| 0.5 + x.atan() / PI);
    assert!(p > P_MIN, "D={d:.4} p={p:.2e}");
}

#[test]
fn subordinator_paths_are_increasing() {
    let grid: Vec<f64> = (0..=50).map(|i| i as f64 * 0.02).collect();
    let mut rng = RngStream::new(15, 0);
    for _ in 0..200 {
        let path = sample_path(PathKind::Subordinator(SubordinatorIndex::HALF), &grid, &[0.0], &mut rng).unwrap();
        assert!(path.values.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn streams_are_reproducible_and_distinct() {
    let a = stable_draws(alpha(1, 2), 1.0, 40);
    let b = stable_draws(alpha(1, 2), 1.0, 40);
    let c = stable_draws(alpha(1, 2), 1.0, 41);
    assert_eq!(a, b);
    assert_ne!(a, c);
}
