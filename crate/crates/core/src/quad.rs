//! Adaptive Gauss–Kronrod quadrature and block-summed Fourier integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 constants).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value of an integral with an error bound and the evaluation count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

/// Absolute / relative tolerance pair; the target is `max(abs, rel * |I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-14,
            rel: 1e-13,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn abs(abs: f64) -> Self {
        Tolerance {
            abs,
            rel: 0.0,
            ..Default::default()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

fn kronrod15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod on a finite interval `[a, b]`.
///
/// Endpoint singularities in derivatives (e.g. `x^alpha` cusps) are handled by
/// repeated bisection of the worst segment.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    let (value, error) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut evals = 15;
    while total_err > tol.target(total) {
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature {
                estimate: total,
                achieved: total_err,
                requested: tol.target(total),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval collapsed to adjacent floats; nothing left to refine.
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod15(&f, worst.a, mid);
        let (v2, e2) = kronrod15(&f, mid, worst.b);
        evals += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum in position order so the result does not carry the update drift.
    let mut segs: Vec<Segment> = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = segs.iter().map(|s| s.value).sum();
    let error: f64 = segs.iter().map(|s| s.error).sum();
    Ok(QuadResult { value, error, evals })
}

/// `∫_a^∞ f` through the map `x = a + u/(1-u)`.
pub fn integrate_to_inf(f: impl Fn(f64) -> f64, a: f64, tol: Tolerance) -> Result<QuadResult> {
    integrate(
        |u| {
            let w = 1.0 - u;
            let x = a + u / w;
            let fx = f(x);
            if fx == 0.0 {
                0.0
            } else {
                fx / (w * w)
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Limit of a sequence of partial sums by Wynn's epsilon algorithm.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n < 3 {
        return *sums.last().unwrap_or(&0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = sums[n - 1];
    for col in 1..n {
        let len = cur.len() - 1;
        let mut next = Vec::with_capacity(len);
        for k in 0..len {
            let d = cur[k + 1] - cur[k];
            if d == 0.0 || !d.is_finite() {
                return if col % 2 == 1 { cur[k + 1] } else { best };
            }
            next.push(prev[k + 1] + 1.0 / d);
        }
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
    }
    best
}

/// Kind of oscillatory weight in [`fourier_half_line`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oscillation {
    Cos,
    Sin,
}

/// `∫_0^∞ h(x) cos(ωx) dx` or the sine analogue, for `h` eventually monotone
/// and decaying.
///
/// The half line is cut at consecutive zeros of the weight; each block is
/// integrated adaptively and the alternating block sums are accelerated with
/// Wynn's epsilon algorithm. The returned error combines the per-block
/// quadrature bounds with the spread of the last extrapolants.
pub fn fourier_half_line(
    h: impl Fn(f64) -> f64,
    omega: f64,
    kind: Oscillation,
    tol: f64,
) -> Result<QuadResult> {
    let omega = omega.abs();
    if omega == 0.0 {
        return match kind {
            Oscillation::Sin => Ok(QuadResult {
                value: 0.0,
                error: 0.0,
                evals: 0,
            }),
            Oscillation::Cos => integrate_to_inf(h, 0.0, Tolerance { abs: tol, rel: 0.0, ..Default::default() }),
        };
    }
    let period = std::f64::consts::PI / omega;
    let first_zero = match kind {
        Oscillation::Cos => 0.5 * period,
        Oscillation::Sin => period,
    };
    let weight = |x: f64| match kind {
        Oscillation::Cos => (omega * x).cos(),
        Oscillation::Sin => (omega * x).sin(),
    };
    let block_tol = Tolerance {
        abs: tol * 1e-2,
        rel: 1e-15,
        max_intervals: 2000,
    };
    const MAX_BLOCKS: usize = 200_000;
    const WINDOW: usize = 30;

    let mut sums: Vec<f64> = Vec::new();
    let mut quad_err = 0.0;
    let mut evals = 0;
    let mut running = 0.0;
    let mut small_terms = 0;
    let mut extrapolants: Vec<f64> = Vec::new();
    let mut lo = 0.0;
    let mut hi = first_zero;
    for _ in 0..MAX_BLOCKS {
        let r = integrate(|x| h(x) * weight(x), lo, hi, block_tol)?;
        evals += r.evals;
        quad_err += r.error;
        running += r.value;
        sums.push(running);

        // Fast-decaying amplitudes: plain summation has already converged.
        if r.value.abs() < tol * 1e-3 && h(hi).abs() * period < tol * 1e-3 {
            small_terms += 1;
            if small_terms >= 3 {
                return Ok(QuadResult {
                    value: running,
                    error: quad_err + r.value.abs(),
                    evals,
                });
            }
        } else {
            small_terms = 0;
        }

        if sums.len() >= 8 {
            let start = sums.len().saturating_sub(WINDOW);
            extrapolants.push(wynn_epsilon(&sums[start..]));
            let k = extrapolants.len();
            if k >= 3 {
                let d1 = (extrapolants[k - 1] - extrapolants[k - 2]).abs();
                let d2 = (extrapolants[k - 2] - extrapolants[k - 3]).abs();
                if d1.max(d2) < tol {
                    return Ok(QuadResult {
                        value: extrapolants[k - 1],
                        error: quad_err + d1.max(d2),
                        evals,
                    });
                }
            }
        }
        lo = hi;
        hi += period;
    }
    let value = extrapolants.last().copied().unwrap_or(running);
    Err(Error::Quadrature {
        estimate: value,
        achieved: quad_err,
        requested: tol,
    })
}
