//! Stable transition densities, their even derivatives at the origin,
//! stable-subordinator densities, and the weighted kernel integral
//! `g(t; alpha, beta) = 2 ∫_0^∞ p_t^alpha(0, s) e^{-beta s} ds`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::alpha::AlphaIndex;
use crate::error::{Error, Result};
use crate::fd::{fd_derivative, fd_time_derivative, FdStencil};
use crate::quad::{self, fourier_half_line, integrate, Oscillation, Tolerance};
use crate::sampling::SubordinatorIndex;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// A density value with the quadrature error bound behind it (zero for
/// closed forms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub alpha: AlphaIndex,
    pub t: f64,
    pub s: f64,
    pub value: f64,
    pub error: f64,
}

/// `p_t^alpha(0, s)` with its error bound.
pub fn stable_density_point(alpha: AlphaIndex, t: f64, s: f64) -> Result<DensityPoint> {
    check_positive("t", t)?;
    if !s.is_finite() {
        return Err(Error::invalid(format!("s must be finite, got {s}")));
    }
    let s_abs = s.abs();
    let (value, error) = if alpha.is_cauchy() {
        (t / (PI * (s_abs * s_abs + t * t)), 0.0)
    } else if alpha.is_brownian() {
        ((-s_abs * s_abs / (4.0 * t)).exp() / (4.0 * PI * t).sqrt(), 0.0)
    } else {
        let a = alpha.value();
        let scale = stable_density_even_deriv_at_zero(alpha, t, 0)?;
        let r = fourier_half_line(|xi| (-t * xi.powf(a)).exp(), s_abs, Oscillation::Cos, 1e-15 * PI * scale)?;
        (r.value / PI, r.error / PI)
    };
    Ok(DensityPoint {
        alpha,
        t,
        s,
        value,
        error,
    })
}

/// Transition density `p_t^alpha(0, s)` of the symmetric stable process with
/// characteristic function `exp(-t|xi|^alpha)`.
///
/// Closed forms for alpha = 1 (Cauchy) and alpha = 2 (Gaussian, variance 2t);
/// otherwise Fourier cosine inversion `(1/π) ∫_0^∞ cos(s xi) e^{-t xi^alpha} dxi`.
/// Even in `s` by construction.
pub fn stable_density(alpha: AlphaIndex, t: f64, s: f64) -> Result<f64> {
    stable_density_point(alpha, t, s).map(|p| p.value)
}

/// `d^{2j}/ds^{2j} p_t^alpha(0, s)` at `s = 0`:
/// `(-1)^j Γ((2j+1)/alpha) / (π alpha t^{(2j+1)/alpha})`.
pub fn stable_density_even_deriv_at_zero(alpha: AlphaIndex, t: f64, j: u32) -> Result<f64> {
    check_positive("t", t)?;
    let a = alpha.value();
    let p = f64::from(2 * j + 1) / a;
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    let magnitude = if p < 170.0 {
        gamma(p) / (PI * a * t.powf(p))
    } else {
        (ln_gamma(p) - (PI * a).ln() - p * t.ln()).exp()
    };
    Ok(sign * magnitude)
}

/// Density `u_t^beta(s)` of the stable subordinator with Laplace transform
/// `exp(-t lambda^beta)`.
///
/// beta = 1/2 uses the Lévy closed form `t (4π s³)^{-1/2} e^{-t²/(4s)}`. Other
/// indices integrate Kanter's non-oscillatory representation
/// `f(x) = (c/π) x^{-1-c} ∫_0^π A(u) e^{-A(u) x^{-c}} du`, `c = beta/(1-beta)`.
pub fn subordinator_density(beta: SubordinatorIndex, t: f64, s: f64) -> Result<f64> {
    check_positive("t", t)?;
    check_positive("s", s)?;
    if beta == SubordinatorIndex::HALF {
        return Ok(t * (-t * t / (4.0 * s)).exp() / (4.0 * PI * s * s * s).sqrt());
    }
    let b = beta.value();
    let scale = t.powf(1.0 / b);
    let x = s / scale;
    let c = b / (1.0 - b);
    let xc = x.powf(-c);
    let kanter = |u: f64| {
        (b * u).sin().powf(c) * ((1.0 - b) * u).sin() / u.sin().powf(1.0 / (1.0 - b))
    };
    let r = integrate(
        |u| {
            let a = kanter(u);
            let e = a * xc;
            if e > 745.0 {
                0.0
            } else {
                a * (-e).exp()
            }
        },
        0.0,
        PI,
        Tolerance {
            abs: 1e-300,
            rel: 1e-13,
            max_intervals: 4000,
        },
    )?;
    Ok(c / PI * xc / x * r.value / scale)
}

/// `g(t; alpha, beta)` together with the quadrature error behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedKernelIntegral {
    pub alpha: AlphaIndex,
    pub beta: f64,
    pub t: f64,
    pub value: f64,
    pub error: f64,
}

/// `2 ∫_0^∞ p_t^alpha(0,s) e^{-beta s} ds` in Parseval form.
///
/// Fourier transform of `e^{-beta|s|}` is the Poisson kernel, giving
/// `(2 beta/π) ∫_0^∞ e^{-t xi^alpha}/(beta² + xi²) dxi`; the substitution
/// `xi = beta tan θ` turns this into `(2/π) ∫_0^{π/2} exp(-t (beta tan θ)^alpha) dθ`,
/// a bounded integrand on a finite interval.
pub fn weighted_kernel_integral(alpha: AlphaIndex, beta: f64, t: f64) -> Result<WeightedKernelIntegral> {
    check_positive("t", t)?;
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::invalid(format!("beta must be non-negative, got {beta}")));
    }
    if beta == 0.0 {
        return Ok(WeightedKernelIntegral {
            alpha,
            beta,
            t,
            value: 1.0,
            error: 0.0,
        });
    }
    let a = alpha.value();
    let r = integrate(
        |theta| (-t * (beta * theta.tan()).powf(a)).exp(),
        0.0,
        0.5 * PI,
        Tolerance {
            abs: 1e-16,
            rel: 1e-15,
            max_intervals: 2000,
        },
    )?;
    Ok(WeightedKernelIntegral {
        alpha,
        beta,
        t,
        value: 2.0 / PI * r.value,
        error: 2.0 / PI * r.error,
    })
}

/// Direct `s`-quadrature of `2 ∫_0^∞ p_t^alpha(0,s) e^{-beta s} ds`.
///
/// Cross-check for [`weighted_kernel_integral`]. The half line is cut at `S`
/// where the tail bound `p(S) e^{-beta S}/beta` (valid because symmetric stable
/// densities are unimodal) drops below `1e-14`; the bound is added to the
/// reported error.
pub fn weighted_kernel_integral_direct(alpha: AlphaIndex, beta: f64, t: f64) -> Result<WeightedKernelIntegral> {
    check_positive("t", t)?;
    check_positive("beta", beta)?;
    let p = |s: f64| stable_density(alpha, t, s);
    let mut cut = t.max(1.0);
    let tail = loop {
        let bound = p(cut)? * (-beta * cut).exp() / beta;
        if bound < 1e-14 || cut > 1e7 {
            break bound;
        }
        cut *= 1.5;
    };
    // Density evaluations may fail; remember the first error and report it.
    let failure = std::cell::RefCell::new(None);
    let integrand = |s: f64| match p(s) {
        Ok(v) => v * (-beta * s).exp(),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    // Split at the kernel's natural scale so the near-origin peak gets resolved.
    let knee = t.powf(1.0 / alpha.value()).min(cut);
    let tol = Tolerance {
        abs: 1e-14,
        rel: 1e-13,
        max_intervals: 2000,
    };
    let r1 = integrate(integrand, 0.0, knee, tol)?;
    let r2 = integrate(integrand, knee, cut, tol)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(WeightedKernelIntegral {
        alpha,
        beta,
        t,
        value: 2.0 * (r1.value + r2.value),
        error: 2.0 * (r1.error + r2.error + tail),
    })
}

/// `∫_0^∞ e^{-lambda s} u_t^beta(s) ds` by quadrature of the subordinator
/// density; the closed form it should reproduce is `exp(-t lambda^beta)`.
pub fn subordinator_laplace_transform(beta: SubordinatorIndex, t: f64, lambda: f64) -> Result<quad::QuadResult> {
    check_positive("lambda", lambda)?;
    let density = |s: f64| subordinator_density(beta, t, s).unwrap_or(f64::NAN);
    let tol = Tolerance {
        abs: 1e-14,
        rel: 1e-13,
        max_intervals: 4000,
    };
    let scale = t.powf(1.0 / beta.value());
    let head = integrate(|s| if s > 0.0 { density(s) * (-lambda * s).exp() } else { 0.0 }, 0.0, scale, tol)?;
    let tail = quad::integrate_to_inf(|s| density(s) * (-lambda * s).exp(), scale, tol)?;
    let value = head.value + tail.value;
    if !value.is_finite() {
        return Err(Error::Quadrature {
            estimate: value,
            achieved: f64::INFINITY,
            requested: tol.abs,
        });
    }
    Ok(quad::QuadResult {
        value,
        error: head.error + tail.error,
        evals: head.evals + tail.evals,
    })
}

/// Finite-difference residual of the kernel PDE satisfied by `p_t^alpha(0, s)`.
///
/// * alpha = 1: `(∂²_s + ∂²_t) p` (harmonic in `(s, t)`).
/// * alpha = 2: `∂_t p − ∂²_s p` (heat equation, generator `Δ`).
/// * alpha = l/m otherwise: `(∂²_s)^l p + (−1)^{l+1} ∂^{2m}_t p`.
///
/// `fd` supplies the base step and extrapolation depth; orders are set per term.
pub fn density_pde_residual(alpha: AlphaIndex, t: f64, s: f64, fd: &FdStencil) -> Result<f64> {
    check_positive("t", t)?;
    let valid = [AlphaIndex::CAUCHY, AlphaIndex::HALF, AlphaIndex::BROWNIAN];
    if !valid.contains(&alpha) {
        return Err(Error::invalid(format!(
            "kernel PDE residual is implemented for alpha in {{1, 1/2, 2}}, got {alpha}"
        )));
    }
    let eval = |tt: f64, ss: f64| stable_density(alpha, tt, ss).unwrap_or(f64::NAN);
    let with_order = |q: usize| FdStencil { order: q, ..*fd };
    let (s_order, t_order, t_sign) = if alpha.is_brownian() {
        (2, 1, -1.0)
    } else {
        let l = alpha.l() as usize;
        let m = alpha.m() as usize;
        (2 * l, 2 * m, if l % 2 == 1 { 1.0 } else { -1.0 })
    };
    let ds = fd_derivative(|ss| eval(t, ss), s, &with_order(s_order));
    let dt = fd_time_derivative(|tt| eval(tt, s), t, &with_order(t_order))?;
    let residual = if alpha.is_brownian() {
        dt.value - ds.value
    } else {
        ds.value + t_sign * dt.value
    };
    if residual.is_nan() {
        return Err(Error::Quadrature {
            estimate: residual,
            achieved: f64::NAN,
            requested: 0.0,
        });
    }
    Ok(residual)
}

/// Finite-difference residual `∂_s u − ∂²_t u` of the 1/2-subordinator density
/// (the alpha = 1 case of the subordinator kernel PDE).
pub fn subordinator_pde_residual(t: f64, s: f64, fd: &FdStencil) -> Result<f64> {
    check_positive("t", t)?;
    check_positive("s", s)?;
    let u = |tt: f64, ss: f64| {
        // Closed form is smooth across t = 0 and s-stencils are checked below.
        tt * (-tt * tt / (4.0 * ss)).exp() / (4.0 * PI * ss * ss * ss).sqrt()
    };
    let ds_stencil = FdStencil { order: 1, ..*fd };
    let dt_stencil = FdStencil { order: 2, ..*fd };
    // `s` is positional for a density supported on (0, ∞): keep the stencil inside.
    let ds = fd_time_derivative(|ss| u(t, ss), s, &ds_stencil)?;
    let dt = fd_time_derivative(|tt| u(tt, s), t, &dt_stencil)?;
    Ok(ds.value - dt.value)
}
