//! Mean exit time of the Cauchy-time Brownian motion from a ball.
//!
//! The exit time of `X(|C(t)|)` from `D` is the exit time of `C` from
//! `(-τ, τ)` with `τ` the Brownian exit time, so its mean solves `Δu = -1`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::alpha::AlphaIndex;
use crate::error::{Error, Result};
use crate::rng::{monte_carlo, Estimate, McSettings, Moments};
use crate::sampling::sample_symmetric_stable;

/// Open ball of radius `radius` around `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallDomain {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BallDomain {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::invalid("ball dimension must be at least 1"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(BallDomain { center, radius })
    }

    /// Ball of radius `radius` centred at the origin of `R^dim`.
    pub fn centered(dim: usize, radius: f64) -> Result<Self> {
        Self::new(vec![0.0; dim], radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn dist_sq(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum()
    }

    fn check_point(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!(
                "point has dimension {}, ball has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(self.dist_sq(x))
    }
}

/// `(R² - |x - center|²) / (2n)`, the solution of `Δu = -1` vanishing on the sphere.
pub fn exit_oracle(ball: &BallDomain, x: &[f64]) -> Result<f64> {
    let d2 = ball.check_point(x)?;
    let r2 = ball.radius * ball.radius;
    if d2 > r2 {
        return Err(Error::invalid("point lies outside the closed ball"));
    }
    Ok((r2 - d2) / (2.0 * ball.dim() as f64))
}

/// Getoor's mean exit time of the symmetric alpha-stable process from the
/// ball of radius `r` in `R^n`, started at distance `y` from the centre:
/// `(r² - y²)^{α/2} Γ(n/2) / (2^α Γ(1 + α/2) Γ((n + α)/2))`.
pub fn getoor_mean(alpha: AlphaIndex, n: usize, r: f64, y: f64) -> Result<f64> {
    if n == 0 || !(r > 0.0) || !(y.abs() <= r) {
        return Err(Error::invalid(format!("need n >= 1 and |y| <= r, got n={n}, r={r}, y={y}")));
    }
    let a = alpha.value();
    let n = n as f64;
    Ok((r * r - y * y).powf(0.5 * a) * gamma(0.5 * n) / (2f64.powf(a) * gamma(1.0 + 0.5 * a) * gamma(0.5 * (n + a))))
}

/// `E[T | τ]`: mean exit time of the Cauchy process from `(-τ, τ)` started at 0, which is `τ`.
pub fn getoor_conditional_mean(tau: f64) -> f64 {
    tau.max(0.0)
}

/// Estimates at one step of the refinement ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitLevel {
    pub h: f64,
    /// Brownian exit time `τ` (estimator b).
    pub collapsed: Estimate,
    /// Cauchy exit time from `(-τ, τ)` (estimator a).
    pub two_stage: Estimate,
    /// Paired difference `two_stage - collapsed`.
    pub difference: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitTimeReport {
    pub ball: BallDomain,
    pub x: Vec<f64>,
    pub oracle: f64,
    /// Steps `h, h/2, h/4`, driven by common random numbers.
    pub levels: Vec<ExitLevel>,
    /// Per-path `(√2 X(h/4) - X(h/2)) / (√2 - 1)`, removing an `O(√h)` monitoring bias.
    pub collapsed_extrapolated: Estimate,
    pub two_stage_extrapolated: Estimate,
    pub extrapolated_difference: Estimate,
}

impl ExitTimeReport {
    fn trend_converges(&self, pick: impl Fn(&ExitLevel) -> Estimate) -> bool {
        let e: Vec<Estimate> = self.levels.iter().map(pick).collect();
        (e[1].mean - e[2].mean).abs() < (e[0].mean - e[1].mean).abs() + 2.0 * e[2].stderr
    }

    /// `|est(h/2) - est(h/4)| < |est(h) - est(h/2)| + 2 stderr` for both estimators.
    pub fn refinement_converges(&self) -> bool {
        self.trend_converges(|l| l.collapsed) && self.trend_converges(|l| l.two_stage)
    }

    /// Relative deviation of the extrapolated collapsed mean from the oracle.
    pub fn relative_error(&self) -> f64 {
        (self.collapsed_extrapolated.mean - self.oracle).abs() / self.oracle
    }

    /// Both estimators agree within `k` paired standard errors after extrapolation.
    pub fn estimators_agree(&self, k: f64) -> bool {
        self.extrapolated_difference.within(0.0, k)
    }
}

const STRIDES: [u64; 3] = [4, 2, 1];

fn extrapolate(half: f64, quarter: f64) -> f64 {
    let r = std::f64::consts::SQRT_2;
    (r * quarter - half) / (r - 1.0)
}

/// Monte Carlo exit time over the ladder `h, h/2, h/4`.
///
/// Each path runs one Brownian skeleton at step `h/4`; the coarser levels
/// test the boundary only at their own grid times. The Cauchy clock is one
/// skeleton at step `h/4` as well, tested per level against that level's `τ`.
pub fn exit_time_mc(ball: &BallDomain, x: &[f64], h: f64, mc: &McSettings) -> Result<ExitTimeReport> {
    mc.require(1000)?;
    let d2 = ball.check_point(x)?;
    let r2 = ball.radius * ball.radius;
    if d2 >= r2 {
        return Err(Error::invalid("exit time needs a strictly interior start"));
    }
    let oracle = exit_oracle(ball, x)?;
    if !(h.is_finite() && h > 0.0) || oracle / h < 10.0 {
        return Err(Error::invalid(format!(
            "step {h} too coarse: fewer than 10 expected steps before exit (mean {oracle})"
        )));
    }
    let fine = 0.25 * h;
    let sd = (2.0 * fine).sqrt();
    let start: Vec<f64> = x.iter().zip(&ball.center).map(|(a, c)| a - c).collect();

    let out: [Moments; 12] = monte_carlo(mc.samples, mc.seed, mc.stream, |rng| {
        let mut pos = start.clone();
        let mut tau = [0.0; 3];
        let mut k: u64 = 0;
        while tau[0] == 0.0 {
            k += 1;
            for p in pos.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *p += sd * z;
            }
            if pos.iter().map(|p| p * p).sum::<f64>() >= r2 {
                for (j, stride) in STRIDES.iter().enumerate() {
                    if tau[j] == 0.0 && k % stride == 0 {
                        tau[j] = k as f64 * fine;
                    }
                }
            }
        }

        let mut c = 0.0f64;
        let mut exit = [0.0; 3];
        let mut k: u64 = 0;
        while exit.contains(&0.0) {
            k += 1;
            c += sample_symmetric_stable(AlphaIndex::CAUCHY, fine, rng).expect("positive step");
            for (j, stride) in STRIDES.iter().enumerate() {
                if exit[j] == 0.0 && k % stride == 0 && c.abs() >= tau[j] {
                    exit[j] = k as f64 * fine;
                }
            }
        }
        let tau_x = extrapolate(tau[1], tau[2]);
        let exit_x = extrapolate(exit[1], exit[2]);
        [
            tau[0],
            tau[1],
            tau[2],
            exit[0],
            exit[1],
            exit[2],
            exit[0] - tau[0],
            exit[1] - tau[1],
            exit[2] - tau[2],
            exit_x - tau_x,
            tau_x,
            exit_x,
        ]
    });

    let levels = (0..3)
        .map(|j| ExitLevel {
            h: h / STRIDES[0] as f64 * STRIDES[j] as f64,
            collapsed: out[j].estimate(),
            two_stage: out[3 + j].estimate(),
            difference: out[6 + j].estimate(),
        })
        .collect::<Vec<_>>();

    Ok(ExitTimeReport {
        ball: ball.clone(),
        x: x.to_vec(),
        oracle,
        collapsed_extrapolated: out[10].estimate(),
        two_stage_extrapolated: out[11].estimate(),
        extrapolated_difference: out[9].estimate(),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_examples() {
        let b1 = BallDomain::centered(1, 1.0).unwrap();
        let b2 = BallDomain::centered(2, 1.0).unwrap();
        assert_eq!(exit_oracle(&b1, &[0.0]).unwrap(), 0.5);
        assert_eq!(exit_oracle(&b2, &[0.0, 0.0]).unwrap(), 0.25);
        assert_eq!(exit_oracle(&b2, &[0.6, 0.8]).unwrap(), 0.0);
        assert!(exit_oracle(&b1, &[1.5]).is_err());
    }

    #[test]
    fn getoor_reduces_to_both_oracles() {
        for n in 1..4 {
            let ball = BallDomain::centered(n, 1.3).unwrap();
            let mut x = vec![0.0; n];
            x[0] = 0.4;
            let g = getoor_mean(AlphaIndex::BROWNIAN, n, 1.3, 0.4).unwrap();
            assert!((g - exit_oracle(&ball, &x).unwrap()).abs() < 1e-14);
        }
        for tau in [1.0, 0.5, 1e-3] {
            let g = getoor_mean(AlphaIndex::CAUCHY, 1, tau, 0.0).unwrap();
            assert!((g - getoor_conditional_mean(tau)).abs() < 1e-14 * tau.max(1.0));
        }
        assert_eq!(getoor_conditional_mean(0.0), 0.0);
    }

    #[test]
    fn rejects_bad_runs() {
        let b = BallDomain::centered(1, 1.0).unwrap();
        assert!(exit_time_mc(&b, &[0.0], 1e-3, &McSettings::new(999, 1, 0)).is_err());
        assert!(exit_time_mc(&b, &[0.0], 0.1, &McSettings::new(1000, 1, 0)).is_err());
        assert!(exit_time_mc(&b, &[1.0], 1e-3, &McSettings::new(1000, 1, 0)).is_err());
    }
}
