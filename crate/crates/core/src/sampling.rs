//! Exact samplers for symmetric stable laws, stable subordinators, Brownian
//! increments and the fixed-time marginal of an alpha-time process.
//!
//! Normalisation: `E[exp(i xi Y(t))] = exp(-t |xi|^alpha)` with no symmetry
//! factor, so the alpha = 2 case is Brownian motion with generator `Δ`
//! (variance `2t` per coordinate).

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::alpha::AlphaIndex;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Index `beta = num/den` of a one-sided stable subordinator, `0 < beta < 1`,
/// with Laplace transform `E[exp(-lambda T_t)] = exp(-t lambda^beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubordinatorIndex {
    num: u32,
    den: u32,
}

impl SubordinatorIndex {
    pub const HALF: SubordinatorIndex = SubordinatorIndex { num: 1, den: 2 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num >= den {
            return Err(Error::invalid(format!(
                "subordinator index {num}/{den} must lie strictly inside (0, 1)"
            )));
        }
        let a = AlphaIndex::new(num, den)?;
        Ok(SubordinatorIndex { num: a.l(), den: a.m() })
    }

    /// The subordinator `alpha/2` that turns Brownian motion into the
    /// symmetric alpha-stable process. Fails for `alpha = 2`.
    pub fn from_alpha(alpha: AlphaIndex) -> Result<Self> {
        let (n, d) = alpha.half();
        Self::new(n, d)
    }

    pub fn value(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("time must be positive and finite, got {t}")))
    }
}

/// Standard symmetric stable variable with characteristic function `exp(-|xi|^alpha)`.
fn standard_symmetric_stable(alpha: AlphaIndex, rng: &mut RngStream) -> f64 {
    if alpha.is_cauchy() {
        return (PI * (rng.open01() - 0.5)).tan();
    }
    if alpha.is_brownian() {
        let z: f64 = rng.sample(StandardNormal);
        return std::f64::consts::SQRT_2 * z;
    }
    // Chambers–Mallows–Stuck, symmetric case.
    let a = alpha.value();
    let v = PI * (rng.open01() - 0.5);
    let w: f64 = rng.sample(Exp1);
    let lead = (a * v).sin() / v.cos().powf(1.0 / a);
    let tail = (((1.0 - a) * v).cos() / w).powf((1.0 - a) / a);
    lead * tail
}

/// One draw of `Y(t)` for the symmetric alpha-stable process started at 0.
pub fn sample_symmetric_stable(alpha: AlphaIndex, t: f64, rng: &mut RngStream) -> Result<f64> {
    check_time(t)?;
    let scale = if alpha.is_cauchy() { t } else { t.powf(1.0 / alpha.value()) };
    Ok(scale * standard_symmetric_stable(alpha, rng))
}

/// One draw of the subordinator `T_t` (Kanter's representation).
pub fn sample_subordinator(beta: SubordinatorIndex, t: f64, rng: &mut RngStream) -> Result<f64> {
    check_time(t)?;
    let b = beta.value();
    let u = rng.open01();
    let e: f64 = rng.sample(Exp1);
    let a = (b * PI * u).sin().powf(b / (1.0 - b)) * ((1.0 - b) * PI * u).sin()
        / (PI * u).sin().powf(1.0 / (1.0 - b));
    let s = (a / e).powf((1.0 - b) / b) * t.powf(1.0 / b);
    // Extreme uniforms can underflow the product; the law has no atom at 0.
    Ok(s.max(f64::MIN_POSITIVE))
}

/// Standard normal vector of length `dim`.
pub fn gaussian_vector(dim: usize, rng: &mut RngStream) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// Exact draw of `X^x(|Y(t)|)` for `n`-dimensional Brownian outer process
/// (generator `Δ`) started at `x`.
pub fn sample_alpha_time_marginal(
    alpha: AlphaIndex,
    t: f64,
    x: &[f64],
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let clock = sample_symmetric_stable(alpha, t, rng)?.abs();
    let sd = (2.0 * clock).sqrt();
    Ok(x.iter()
        .map(|&xi| {
            let z: f64 = rng.sample(StandardNormal);
            xi + sd * z
        })
        .collect())
}

/// Which process a [`PathSkeleton`] discretises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathKind {
    SymmetricStable(AlphaIndex),
    Subordinator(SubordinatorIndex),
    Brownian { dim: usize },
}

impl PathKind {
    fn dim(&self) -> usize {
        match self {
            PathKind::Brownian { dim } => *dim,
            _ => 1,
        }
    }
}

/// Values of a process on a time grid, `values` stored row-major by time.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSkeleton {
    pub times: Vec<f64>,
    pub dim: usize,
    pub values: Vec<f64>,
}

impl PathSkeleton {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }
}

/// Samples a skeleton with exact independent-increment marginals on `grid`.
pub fn sample_path(kind: PathKind, grid: &[f64], start: &[f64], rng: &mut RngStream) -> Result<PathSkeleton> {
    if grid.is_empty() {
        return Err(Error::invalid("empty time grid"));
    }
    if grid[0] != 0.0 {
        return Err(Error::invalid(format!("time grid must start at 0, starts at {}", grid[0])));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("time grid must be strictly increasing"));
    }
    let dim = kind.dim();
    if start.len() != dim {
        return Err(Error::invalid(format!(
            "start point has dimension {}, process has dimension {dim}",
            start.len()
        )));
    }
    let mut values = Vec::with_capacity(grid.len() * dim);
    values.extend_from_slice(start);
    for w in grid.windows(2) {
        let dt = w[1] - w[0];
        let base = values.len() - dim;
        match kind {
            PathKind::SymmetricStable(alpha) => {
                let step = sample_symmetric_stable(alpha, dt, rng)?;
                values.push(values[base] + step);
            }
            PathKind::Subordinator(beta) => {
                let step = sample_subordinator(beta, dt, rng)?;
                values.push(values[base] + step);
            }
            PathKind::Brownian { .. } => {
                let sd = (2.0 * dt).sqrt();
                for k in 0..dim {
                    let z: f64 = rng.sample(StandardNormal);
                    values.push(values[base + k] + sd * z);
                }
            }
        }
    }
    Ok(PathSkeleton {
        times: grid.to_vec(),
        dim,
        values,
    })
}
