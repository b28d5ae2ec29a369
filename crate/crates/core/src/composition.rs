//! `u(t,x)` for each iterated-process construction: quadrature over the
//! representation `u = 2 ∫_0^∞ p_t^alpha(0,s) v(s,x) ds` and Monte Carlo over
//! exact fixed-time marginals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::alpha::AlphaIndex;
use crate::density::{stable_density, weighted_kernel_integral};
use crate::error::{Error, Result};
use crate::quad::{fourier_half_line, integrate, integrate_to_inf, Oscillation, Tolerance};
use crate::rng::{monte_carlo, Estimate, McSettings};
use crate::sampling::{gaussian_vector, sample_symmetric_stable};
use crate::semigroup::{heat_semigroup_apply, ConstantPotential, PlaneWave, TestFunction};

/// Which construction `u(t,x)` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum Variant {
    /// `E[f(X(|C(t)|))]`, Cauchy clock.
    CauchyTime,
    /// `E[f(X(ε|C(t)|)) e^{-|C(t)|/ε}]`.
    EpsWeighted { epsilon: f64 },
    /// `E[f(X(|C(t)|)) exp(∫_0^{|C(t)|} c dr)]` for a constant `c <= 0`.
    FeynmanKac { c: ConstantPotential },
    /// Imaginary-time Brownian kernel on a Cauchy clock with phase `e^{iC(t)}`.
    Ictbap,
    /// `E[f(X(|Y(t)|))]` for a general symmetric alpha-stable clock.
    AlphaTime,
    /// Brownian clock (alpha = 2).
    Btp,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::CauchyTime => "cauchy-time",
            Variant::EpsWeighted { .. } => "eps-weighted",
            Variant::FeynmanKac { .. } => "feynman-kac",
            Variant::Ictbap => "ictbap",
            Variant::AlphaTime => "alpha-time",
            Variant::Btp => "btp",
        }
    }
}

/// A fully specified composition: variant, clock index and initial function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionSpec {
    variant: Variant,
    alpha: AlphaIndex,
    f: TestFunction,
}

impl CompositionSpec {
    /// Validates the variant/clock/function combination.
    pub fn new(variant: Variant, alpha: AlphaIndex, f: TestFunction) -> Result<Self> {
        match variant {
            Variant::CauchyTime | Variant::EpsWeighted { .. } | Variant::FeynmanKac { .. } | Variant::Ictbap
                if !alpha.is_cauchy() =>
            {
                return Err(Error::invalid(format!(
                    "{} requires a Cauchy clock (alpha = 1), got alpha = {alpha}",
                    variant.name()
                )))
            }
            Variant::Btp if !alpha.is_brownian() => {
                return Err(Error::invalid(format!("btp requires alpha = 2, got alpha = {alpha}")))
            }
            Variant::EpsWeighted { epsilon } if !(epsilon.is_finite() && epsilon > 0.0) => {
                return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")))
            }
            Variant::Ictbap if !matches!(f, TestFunction::PlaneWave(_)) => {
                return Err(Error::invalid("ictbap is implemented for plane waves only"))
            }
            _ => {}
        }
        Ok(CompositionSpec { variant, alpha, f })
    }

    pub fn cauchy_time(f: impl Into<TestFunction>) -> Self {
        CompositionSpec {
            variant: Variant::CauchyTime,
            alpha: AlphaIndex::CAUCHY,
            f: f.into(),
        }
    }

    pub fn eps_weighted(f: impl Into<TestFunction>, epsilon: f64) -> Result<Self> {
        Self::new(Variant::EpsWeighted { epsilon }, AlphaIndex::CAUCHY, f.into())
    }

    pub fn feynman_kac(f: impl Into<TestFunction>, c: ConstantPotential) -> Self {
        CompositionSpec {
            variant: Variant::FeynmanKac { c },
            alpha: AlphaIndex::CAUCHY,
            f: f.into(),
        }
    }

    pub fn ictbap(f: PlaneWave) -> Self {
        CompositionSpec {
            variant: Variant::Ictbap,
            alpha: AlphaIndex::CAUCHY,
            f: f.into(),
        }
    }

    pub fn alpha_time(alpha: AlphaIndex, f: impl Into<TestFunction>) -> Self {
        CompositionSpec {
            variant: Variant::AlphaTime,
            alpha,
            f: f.into(),
        }
    }

    pub fn btp(f: impl Into<TestFunction>) -> Self {
        CompositionSpec {
            variant: Variant::Btp,
            alpha: AlphaIndex::BROWNIAN,
            f: f.into(),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn alpha(&self) -> AlphaIndex {
        self.alpha
    }

    pub fn f(&self) -> &TestFunction {
        &self.f
    }

    /// Decay rate `beta` of `v(s,x) = e^{-beta s} f(x)` for plane waves:
    /// `|κ|²`, `1/ε + ε|κ|²` or `|κ|² - c`. `None` for bumps and ICTBAP.
    pub fn plane_wave_beta(&self) -> Option<f64> {
        let TestFunction::PlaneWave(p) = &self.f else {
            return None;
        };
        let k2 = p.kappa_sq();
        match self.variant {
            Variant::CauchyTime | Variant::AlphaTime | Variant::Btp => Some(k2),
            Variant::EpsWeighted { epsilon } => Some(1.0 / epsilon + epsilon * k2),
            Variant::FeynmanKac { c } => Some(k2 - c.value()),
            Variant::Ictbap => None,
        }
    }

    /// `v(s, x)` for the real-clock variants.
    fn v(&self, s: f64, x: &[f64]) -> Result<f64> {
        match self.variant {
            Variant::EpsWeighted { epsilon } => Ok((-s / epsilon).exp() * heat_semigroup_apply(&self.f, epsilon * s, x)?),
            Variant::FeynmanKac { c } => Ok((c.value() * s).exp() * heat_semigroup_apply(&self.f, s, x)?),
            Variant::Ictbap => Err(Error::invalid("ictbap has a complex kernel; use u_ictbap")),
            _ => heat_semigroup_apply(&self.f, s, x),
        }
    }
}

/// Quadrature value of `u(t,x)` with its error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadValue {
    pub value: f64,
    pub error: f64,
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("t must be positive, got {t}")))
    }
}

/// Scalar profile `g(t)` with `u(t,x) = cos(κ·x) g(t)` for plane waves.
pub fn plane_wave_profile(spec: &CompositionSpec, t: f64) -> Result<QuadValue> {
    check_t(t)?;
    if spec.variant == Variant::Ictbap {
        let TestFunction::PlaneWave(p) = &spec.f else {
            unreachable!("validated at construction")
        };
        return Ok(QuadValue {
            value: (-t * (1.0 - p.kappa_sq()).abs()).exp(),
            error: 0.0,
        });
    }
    let beta = spec
        .plane_wave_beta()
        .ok_or_else(|| Error::invalid("plane-wave profile requested for a non-plane-wave function"))?;
    let w = weighted_kernel_integral(spec.alpha, beta, t)?;
    Ok(QuadValue {
        value: w.value,
        error: w.error,
    })
}

/// `u(t,x)` by quadrature.
///
/// Plane waves reduce to `cos(κ·x) g(t; alpha, beta)`. Bumps integrate
/// `2 ∫ p_t(0,s) v(s,x) ds` over the mapped half line; the reported error
/// includes the mapped tail.
pub fn u_quadrature(spec: &CompositionSpec, t: f64, x: &[f64]) -> Result<QuadValue> {
    check_t(t)?;
    if x.len() != spec.f.dim() {
        return Err(Error::invalid("point dimension does not match the initial function"));
    }
    if let TestFunction::PlaneWave(p) = &spec.f {
        let g = plane_wave_profile(spec, t)?;
        let c = p.eval(x);
        return Ok(QuadValue {
            value: c * g.value,
            error: c.abs() * g.error,
        });
    }
    let failure = std::cell::RefCell::new(None);
    let integrand = |s: f64| {
        let r = stable_density(spec.alpha, t, s).and_then(|p| Ok(p * spec.v(s, x)?));
        match r {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let knee = t.powf(1.0 / spec.alpha.value());
    let tol = Tolerance {
        abs: 1e-13,
        rel: 1e-12,
        max_intervals: 2000,
    };
    let head = integrate(integrand, 0.0, knee, tol)?;
    let tail = integrate_to_inf(integrand, knee, tol)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(QuadValue {
        value: 2.0 * (head.value + tail.value),
        error: 2.0 * (head.error + tail.error),
    })
}

/// Monte Carlo estimate of `u(t,x)` from exact marginals.
///
/// Each sample draws `C = Y(t)`, sets the Brownian clock to `|C|` (or `ε|C|`),
/// draws the Brownian value there and applies the variant's weight. ICTBAP
/// samples `cos(κ·x) cos((1 - |κ|²) C)`, the real part of its Fourier-mode
/// functional; the imaginary part has mean zero by symmetry of `C`.
pub fn u_mc(spec: &CompositionSpec, t: f64, x: &[f64], mc: &McSettings) -> Result<Estimate> {
    check_t(t)?;
    mc.require(100)?;
    let dim = spec.f.dim();
    if x.len() != dim {
        return Err(Error::invalid("point dimension does not match the initial function"));
    }
    let alpha = spec.alpha;
    let out = match spec.variant {
        Variant::Ictbap => {
            let TestFunction::PlaneWave(p) = &spec.f else {
                unreachable!("validated at construction")
            };
            let theta = 1.0 - p.kappa_sq();
            let amp = p.eval(x);
            monte_carlo::<1, _>(mc.samples, mc.seed, mc.stream, |rng| {
                let c = sample_symmetric_stable(alpha, t, rng).expect("t validated");
                [amp * (theta * c).cos()]
            })
        }
        variant => monte_carlo::<1, _>(mc.samples, mc.seed, mc.stream, |rng| {
            let c = sample_symmetric_stable(alpha, t, rng).expect("t validated").abs();
            let (clock, weight) = match variant {
                Variant::EpsWeighted { epsilon } => (epsilon * c, (-c / epsilon).exp()),
                Variant::FeynmanKac { c: pot } => (c, (pot.value() * c).exp()),
                _ => (c, 1.0),
            };
            let sd = (2.0 * clock).sqrt();
            let g = gaussian_vector(dim, rng);
            let y: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + sd * gi).collect();
            [weight * spec.f.eval(&y)]
        }),
    };
    let est = out[0].estimate();
    if !(est.mean.is_finite() && est.stderr.is_finite()) {
        return Err(Error::invalid(format!(
            "variance overflow in {} Monte Carlo estimate",
            spec.variant.name()
        )));
    }
    Ok(est)
}

/// ICTBAP value: closed form plus the cross-validating complex quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IctbapValue {
    pub closed_form: f64,
    pub quadrature_re: f64,
    pub quadrature_im: f64,
    pub quadrature_error: f64,
}

impl IctbapValue {
    pub fn quadrature(&self) -> Complex64 {
        Complex64::new(self.quadrature_re, self.quadrature_im)
    }
}

/// `u(t,x) = ∫_{-∞}^0 v p ds + ∫_0^∞ v p ds` with
/// `v(s,x) = e^{is(1-|κ|²)} cos(κ·x)` and the Cauchy kernel `p = t/(π(s²+t²))`.
///
/// The closed form is `cos(κ·x) e^{-t|1-|κ|²|}` (Cauchy characteristic function).
pub fn u_ictbap(kappa: &PlaneWave, t: f64, x: &[f64]) -> Result<IctbapValue> {
    check_t(t)?;
    if x.len() != kappa.dim() {
        return Err(Error::invalid("point dimension does not match the wavevector"));
    }
    let theta = 1.0 - kappa.kappa_sq();
    let amp = kappa.eval(x);
    let closed_form = amp * (-t * theta.abs()).exp();

    let p = |s: f64| t / (std::f64::consts::PI * (s * s + t * t));
    let tol = 1e-11;
    let cos_part = fourier_half_line(p, theta, Oscillation::Cos, tol)?;
    let sin_part = fourier_half_line(p, theta, Oscillation::Sin, tol)?;
    let sin_signed = theta.signum() * sin_part.value;
    // s > 0 half: C + iS; s < 0 half (s -> -s): C - iS.
    let positive = Complex64::new(cos_part.value, sin_signed);
    let negative = Complex64::new(cos_part.value, -sin_signed);
    let total = (positive + negative) * amp;
    Ok(IctbapValue {
        closed_form,
        quadrature_re: total.re,
        quadrature_im: total.im,
        quadrature_error: 2.0 * amp.abs() * (cos_part.error + sin_part.error),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::GaussianBump;

    #[test]
    fn spec_validation() {
        let f: TestFunction = PlaneWave::scalar(1.0).into();
        assert!(CompositionSpec::new(Variant::CauchyTime, AlphaIndex::HALF, f.clone()).is_err());
        assert!(CompositionSpec::new(Variant::Btp, AlphaIndex::CAUCHY, f.clone()).is_err());
        assert!(CompositionSpec::eps_weighted(f.clone(), 0.0).is_err());
        let bump: TestFunction = GaussianBump::new(vec![0.0], 1.0).unwrap().into();
        assert!(CompositionSpec::new(Variant::Ictbap, AlphaIndex::CAUCHY, bump).is_err());
        assert!(CompositionSpec::new(Variant::AlphaTime, AlphaIndex::THIRD, f).is_ok());
    }

    #[test]
    fn flat_function_is_preserved() {
        let spec = CompositionSpec::cauchy_time(PlaneWave::scalar(0.0));
        for t in [0.1, 1.0, 5.0] {
            assert_eq!(u_quadrature(&spec, t, &[0.3]).unwrap().value, 1.0);
        }
    }

    #[test]
    fn betas_per_variant() {
        let f = PlaneWave::scalar(2.0);
        assert_eq!(CompositionSpec::cauchy_time(f.clone()).plane_wave_beta(), Some(4.0));
        assert_eq!(CompositionSpec::eps_weighted(f.clone(), 0.5).unwrap().plane_wave_beta(), Some(4.0));
        let c = ConstantPotential::new(-1.0).unwrap();
        assert_eq!(CompositionSpec::feynman_kac(f.clone(), c).plane_wave_beta(), Some(5.0));
        assert_eq!(CompositionSpec::ictbap(f).plane_wave_beta(), None);
    }

    #[test]
    fn ictbap_examples() {
        let one = PlaneWave::scalar(1.0);
        for t in [0.5, 2.0] {
            let v = u_ictbap(&one, t, &[0.0]).unwrap();
            assert_eq!(v.closed_form, 1.0);
            assert!((v.quadrature_re - 1.0).abs() <= v.quadrature_error.max(1e-10));
        }
        let root2 = PlaneWave::scalar(2f64.sqrt());
        let v = u_ictbap(&root2, 1.0, &[0.0]).unwrap();
        assert!((v.closed_form - (-1.0f64).exp()).abs() < 1e-15);
        assert!((v.quadrature_re - v.closed_form).abs() < 1e-9, "{v:?}");
        assert_eq!(v.quadrature_im, 0.0);
        let zero = PlaneWave::scalar(0.0);
        let v = u_ictbap(&zero, 2.0, &[0.0]).unwrap();
        assert!((v.closed_form - (-2.0f64).exp()).abs() < 1e-15);
        assert!((v.quadrature_re - v.closed_form).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn bump_quadrature_at_small_t_approaches_f() {
        let bump = GaussianBump::new(vec![0.0], 1.0).unwrap();
        let spec = CompositionSpec::cauchy_time(bump.clone());
        let u = u_quadrature(&spec, 1e-3, &[0.2]).unwrap();
        assert!((u.value - bump.eval(&[0.2])).abs() < 1e-2);
    }

    #[test]
    fn bump_btp_matches_plane_wave_route_in_the_flat_limit() {
        // A very wide bump is locally ≈ 1, so u ≈ 1 for moderate t.
        let bump = GaussianBump::new(vec![0.0], 1e8).unwrap();
        let u = u_quadrature(&CompositionSpec::btp(bump), 1.0, &[0.0]).unwrap();
        assert!((u.value - 1.0).abs() < 1e-6, "{u:?}");
    }

    #[test]
    fn mc_rejects_small_runs() {
        let spec = CompositionSpec::cauchy_time(PlaneWave::scalar(1.0));
        assert!(u_mc(&spec, 1.0, &[0.0], &McSettings::new(50, 1, 1)).is_err());
    }
}
