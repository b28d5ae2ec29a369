//! Central finite differences with Richardson extrapolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Central stencil for a `q`-th derivative: step, extrapolation depth and order.
///
/// The physical step at time `t` is `base_step * max(t, 1)`; the ladder uses
/// `step, step/2, ..., step/2^levels`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdStencil {
    pub order: usize,
    pub base_step: f64,
    pub richardson_levels: usize,
}

/// Derivative estimate and the spread of the last two extrapolants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

impl FdStencil {
    pub fn new(order: usize, base_step: f64, richardson_levels: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("derivative order must be at least 1"));
        }
        if !(base_step.is_finite() && base_step > 0.0) {
            return Err(Error::invalid(format!("base step must be positive, got {base_step}")));
        }
        Ok(FdStencil {
            order,
            base_step,
            richardson_levels,
        })
    }

    /// Default stencil for order `q`, two Richardson levels.
    ///
    /// Steps come from the refinement study in `tests/fd_refinement.rs`: each
    /// is the smallest step whose residuals stay truncation-dominated, so a
    /// refined stencil does not inflate them by round-off.
    pub fn default_for(order: usize) -> Self {
        let base_step = match order {
            0 | 1 => 2e-2,
            2 => 8e-2,
            3 => 8e-2,
            4 => 1.5e-1,
            5 => 2e-1,
            _ => 2.5e-1,
        };
        FdStencil {
            order: order.max(1),
            base_step,
            richardson_levels: 2,
        }
    }

    /// Same stencil with half the step and one more extrapolation level.
    pub fn refined(&self) -> Self {
        FdStencil {
            base_step: 0.5 * self.base_step,
            richardson_levels: self.richardson_levels + 1,
            ..*self
        }
    }

    pub fn step_at(&self, t: f64) -> f64 {
        self.base_step * t.abs().max(1.0)
    }

    /// Farthest stencil offset, in units of the step.
    pub fn half_width(&self) -> f64 {
        self.order.div_ceil(2) as f64
    }

    /// Derivatives of order 6 and above lose most of their digits to round-off.
    pub fn low_precision(&self) -> bool {
        self.order >= 6
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Bound on the round-off in a [`fd_time_derivative`] estimate when the
/// function values are accurate to one ulp of `scale`:
/// `4 ε 2^q scale / h_fine^q`, with `h_fine` the last step of the ladder. The
/// factor 4 covers the Richardson weights.
pub fn roundoff_bound(stencil: &FdStencil, t: f64, scale: f64) -> f64 {
    let fine = stencil.step_at(t) / 2f64.powi(stencil.richardson_levels as i32);
    let q = stencil.order as i32;
    4.0 * f64::EPSILON * 2f64.powi(q) * scale.abs() / fine.powi(q)
}

/// Plain central difference of order `q` with step `h`: `δ^q/h^q` for even
/// `q`, `μδ^q/h^q` for odd `q`. Both have error expansions in even powers of `h`.
pub fn central_difference(f: &impl Fn(f64) -> f64, q: usize, x: f64, h: f64) -> f64 {
    let hq = h.powi(q as i32);
    if q % 2 == 0 {
        let half = (q / 2) as f64;
        let mut acc = 0.0;
        for k in 0..=q {
            let w = binomial(q, k) * if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += w * f(x + (half - k as f64) * h);
        }
        acc / hq
    } else {
        // μδ^q f(x) = (δ^q f(x + h/2) + δ^q f(x - h/2)) / 2
        let half = q as f64 / 2.0;
        let mut acc = 0.0;
        for k in 0..=q {
            let w = binomial(q, k) * if k % 2 == 0 { 1.0 } else { -1.0 };
            let off = half - k as f64;
            acc += w * (f(x + (off + 0.5) * h) + f(x + (off - 0.5) * h));
        }
        0.5 * acc / hq
    }
}

/// Richardson-extrapolated central difference with `levels` halvings of `h`.
pub fn richardson(f: &impl Fn(f64) -> f64, q: usize, x: f64, h: f64, levels: usize) -> Derivative {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels + 1);
    for i in 0..=levels {
        let hi = h / f64::powi(2.0, i as i32);
        let mut row = vec![central_difference(f, q, x, hi)];
        for j in 1..=i {
            let factor = f64::powi(4.0, j as i32);
            let prev = &table[i - 1];
            let v = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
            row.push(v);
        }
        table.push(row);
    }
    let last = &table[levels];
    let value = last[levels];
    let error = if levels == 0 {
        f64::NAN
    } else {
        let a = (value - last[levels - 1]).abs();
        let b = (value - table[levels - 1][levels - 1]).abs();
        a.max(b)
    };
    Derivative { value, error }
}

/// `q`-th derivative in `t` of `g` at `t > 0`; the stencil may not reach `t <= 0`.
pub fn fd_time_derivative(g: impl Fn(f64) -> f64, t: f64, stencil: &FdStencil) -> Result<Derivative> {
    let h = stencil.step_at(t);
    let lowest = t - stencil.half_width() * h;
    if !(t > 0.0) || lowest <= 0.0 {
        return Err(Error::StencilCrossesZero {
            t,
            step: h,
            order: stencil.order,
            lowest,
        });
    }
    Ok(richardson(&g, stencil.order, t, h, stencil.richardson_levels))
}

/// Derivative in an unconstrained variable (e.g. the space argument of a density).
pub fn fd_derivative(f: impl Fn(f64) -> f64, x: f64, stencil: &FdStencil) -> Derivative {
    richardson(&f, stencil.order, x, stencil.step_at(x), stencil.richardson_levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_second_derivative() {
        let d = fd_time_derivative(|t| t * t * t, 1.0, &FdStencil::default_for(2)).unwrap();
        assert!((d.value - 6.0).abs() < 1e-9, "{d:?}");
    }

    #[test]
    fn exp_fourth_derivative() {
        let d = fd_time_derivative(|t: f64| (-t).exp(), 1.0, &FdStencil::default_for(4)).unwrap();
        assert!((d.value - (-1.0f64).exp()).abs() < 1e-6, "{d:?}");
    }

    #[test]
    fn reciprocal_second_derivative() {
        // Near the pole the default step is too coarse.
        let d = fd_time_derivative(|t| 1.0 / t, 0.5, &FdStencil::new(2, 1e-2, 2).unwrap()).unwrap();
        assert!((d.value - 16.0).abs() < 1e-7, "{d:?}");
    }

    #[test]
    fn odd_orders() {
        let d = fd_time_derivative(|t: f64| t.sin(), 1.0, &FdStencil::default_for(1)).unwrap();
        assert!((d.value - 1f64.cos()).abs() < 1e-11);
        let d = fd_time_derivative(|t: f64| t.sin(), 1.0, &FdStencil::default_for(3)).unwrap();
        assert!((d.value + 1f64.cos()).abs() < 1e-8, "{d:?}");
    }

    #[test]
    fn sixth_order_is_flagged_but_usable() {
        let s = FdStencil::default_for(6);
        assert!(s.low_precision());
        let d = fd_time_derivative(|t: f64| (2.0 * t).exp(), 1.0, &s).unwrap();
        let exact = 64.0 * 2f64.exp();
        assert!(((d.value - exact) / exact).abs() < 1e-4, "{d:?}");
    }

    #[test]
    fn stencil_may_not_cross_zero() {
        let s = FdStencil::default_for(6);
        let err = fd_time_derivative(|t| t, 0.2, &s).unwrap_err();
        assert!(matches!(err, Error::StencilCrossesZero { .. }));
        assert!(fd_time_derivative(|t| t, 0.0, &FdStencil::default_for(2)).is_err());
    }

    #[test]
    fn constants_have_exactly_zero_derivative() {
        for q in 1..=6 {
            let d = fd_time_derivative(|_| 1.0, 2.0, &FdStencil::default_for(q)).unwrap();
            assert_eq!(d.value, 0.0, "order {q}");
        }
    }

    #[test]
    fn invalid_stencils() {
        assert!(FdStencil::new(0, 0.1, 2).is_err());
        assert!(FdStencil::new(2, 0.0, 2).is_err());
        assert!(FdStencil::new(2, f64::NAN, 2).is_err());
    }
}
