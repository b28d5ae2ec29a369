//! Closed-form heat and Feynman–Kac semigroups on the test-function families,
//! plus a Monte Carlo semigroup oracle.
//!
//! The outer process is Brownian motion with generator `Δ`, so
//! `T_s cos(κ·x) = e^{-|κ|² s} cos(κ·x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{monte_carlo, Estimate, McSettings};
use crate::sampling::gaussian_vector;

/// `f(x) = cos(κ·x)`; `Δf = -|κ|² f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub kappa: Vec<f64>,
}

impl PlaneWave {
    pub fn new(kappa: Vec<f64>) -> Result<Self> {
        if kappa.is_empty() || kappa.iter().any(|k| !k.is_finite()) {
            return Err(Error::invalid("wavevector must be non-empty and finite"));
        }
        Ok(PlaneWave { kappa })
    }

    /// One-dimensional wave `cos(k x)`.
    pub fn scalar(k: f64) -> Self {
        PlaneWave { kappa: vec![k] }
    }

    pub fn dim(&self) -> usize {
        self.kappa.len()
    }

    /// `|κ|²`, the eigenvalue of `-Δ`.
    pub fn kappa_sq(&self) -> f64 {
        self.kappa.iter().map(|k| k * k).sum()
    }

    pub fn phase(&self, x: &[f64]) -> f64 {
        self.kappa.iter().zip(x).map(|(k, xi)| k * xi).sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.phase(x).cos()
    }
}

/// `f(x) = exp(-|x - center|² / width)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub center: Vec<f64>,
    pub width: f64,
}

impl GaussianBump {
    pub fn new(center: Vec<f64>, width: f64) -> Result<Self> {
        if center.is_empty() || !(width.is_finite() && width > 0.0) {
            return Err(Error::invalid("bump needs a non-empty center and a positive width"));
        }
        Ok(GaussianBump { center, width })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn dist_sq(&self, x: &[f64]) -> f64 {
        self.center.iter().zip(x).map(|(c, xi)| (xi - c) * (xi - c)).sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (-self.dist_sq(x) / self.width).exp()
    }
}

/// Test functions with closed-form heat semigroups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TestFunction {
    PlaneWave(PlaneWave),
    GaussianBump(GaussianBump),
}

impl TestFunction {
    pub fn dim(&self) -> usize {
        match self {
            TestFunction::PlaneWave(p) => p.dim(),
            TestFunction::GaussianBump(b) => b.dim(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::PlaneWave(p) => p.eval(x),
            TestFunction::GaussianBump(b) => b.eval(x),
        }
    }

    pub fn sup(&self) -> f64 {
        1.0
    }
}

impl From<PlaneWave> for TestFunction {
    fn from(p: PlaneWave) -> Self {
        TestFunction::PlaneWave(p)
    }
}

impl From<GaussianBump> for TestFunction {
    fn from(b: GaussianBump) -> Self {
        TestFunction::GaussianBump(b)
    }
}

/// Constant potential `c <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantPotential(f64);

impl ConstantPotential {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c <= 0.0 {
            Ok(ConstantPotential(c))
        } else {
            Err(Error::invalid(format!("potential must be a finite constant <= 0, got {c}")))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

fn check_point(dim: usize, x: &[f64]) -> Result<()> {
    if x.len() != dim {
        return Err(Error::invalid(format!(
            "point has dimension {}, function has dimension {dim}",
            x.len()
        )));
    }
    Ok(())
}

fn check_time(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("semigroup time must be >= 0, got {s}")))
    }
}

/// `T_s f(x) = E[f(x + B_s)]`, `B` with generator `Δ`.
pub fn heat_semigroup_apply(f: &TestFunction, s: f64, x: &[f64]) -> Result<f64> {
    check_time(s)?;
    check_point(f.dim(), x)?;
    Ok(match f {
        TestFunction::PlaneWave(p) => (-p.kappa_sq() * s).exp() * p.eval(x),
        TestFunction::GaussianBump(b) => {
            let n = b.dim() as f64;
            let w = b.width + 4.0 * s;
            (b.width / w).powf(0.5 * n) * (-b.dist_sq(x) / w).exp()
        }
    })
}

/// `Δ T_s f(x)` in closed form.
pub fn heat_semigroup_laplacian(f: &TestFunction, s: f64, x: &[f64]) -> Result<f64> {
    let v = heat_semigroup_apply(f, s, x)?;
    Ok(match f {
        TestFunction::PlaneWave(p) => -p.kappa_sq() * v,
        TestFunction::GaussianBump(b) => {
            let n = b.dim() as f64;
            let w = b.width + 4.0 * s;
            v * (4.0 * b.dist_sq(x) / (w * w) - 2.0 * n / w)
        }
    })
}

/// `Δ^j f(x) = (-|κ|²)^j cos(κ·x)`.
pub fn generator_power(f: &PlaneWave, j: u32, x: &[f64]) -> Result<f64> {
    check_point(f.dim(), x)?;
    Ok((-f.kappa_sq()).powi(j as i32) * f.eval(x))
}

/// `v(s,x) = E[f(X^x(s)) exp(∫_0^s c dr)] = e^{cs} e^{-|κ|² s} cos(κ·x)`.
pub fn fk_semigroup_apply(f: &PlaneWave, c: ConstantPotential, s: f64, x: &[f64]) -> Result<f64> {
    check_time(s)?;
    check_point(f.dim(), x)?;
    Ok((c.value() * s).exp() * (-f.kappa_sq() * s).exp() * f.eval(x))
}

/// Potential for the Monte Carlo semigroup oracle.
pub enum Potential<'a> {
    Constant(ConstantPotential),
    /// Position-dependent potential, integrated by a left Riemann sum along a
    /// Brownian skeleton with step `h` (bias `O(h)`).
    Path {
        c: &'a (dyn Fn(&[f64]) -> f64 + Sync),
        h: f64,
    },
}

/// Monte Carlo estimate of `E[f(X^x(s)) exp(∫_0^s c(X^x(r)) dr)]`.
pub fn mc_semigroup(
    f: &TestFunction,
    potential: &Potential<'_>,
    s: f64,
    x: &[f64],
    mc: &McSettings,
) -> Result<Estimate> {
    mc.require(100)?;
    check_time(s)?;
    check_point(f.dim(), x)?;
    let dim = f.dim();
    let out = match potential {
        Potential::Constant(c) => {
            let weight = (c.value() * s).exp();
            let sd = (2.0 * s).sqrt();
            monte_carlo::<1, _>(mc.samples, mc.seed, mc.stream, |rng| {
                let g = gaussian_vector(dim, rng);
                let y: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + sd * gi).collect();
                [weight * f.eval(&y)]
            })
        }
        Potential::Path { c, h } => {
            if !(*h > 0.0) {
                return Err(Error::invalid(format!("path step must be positive, got {h}")));
            }
            let steps = (s / h).ceil().max(1.0) as usize;
            let dt = s / steps as f64;
            let sd = (2.0 * dt).sqrt();
            monte_carlo::<1, _>(mc.samples, mc.seed, mc.stream, |rng| {
                let mut y = x.to_vec();
                let mut integral = 0.0;
                for _ in 0..steps {
                    integral += c(&y) * dt;
                    let g = gaussian_vector(dim, rng);
                    y.iter_mut().zip(&g).for_each(|(yi, gi)| *yi += sd * gi);
                }
                [f.eval(&y) * integral.exp()]
            })
        }
    };
    Ok(out[0].estimate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::{fd_time_derivative, FdStencil};

    fn wave(k: f64) -> TestFunction {
        PlaneWave::scalar(k).into()
    }

    #[test]
    fn heat_semigroup_examples() {
        assert_eq!(heat_semigroup_apply(&wave(0.0), 3.0, &[0.7]).unwrap(), 1.0);
        let v = heat_semigroup_apply(&wave(1.0), 1.0, &[0.0]).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        let bump: TestFunction = GaussianBump::new(vec![0.0], 1.0).unwrap().into();
        let v = heat_semigroup_apply(&bump, 0.25, &[0.0]).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(heat_semigroup_apply(&bump, 0.0, &[0.3]).unwrap(), bump.eval(&[0.3]));
    }

    #[test]
    fn generator_powers() {
        let p = PlaneWave::scalar(1.0);
        assert_eq!(generator_power(&p, 0, &[0.0]).unwrap(), 1.0);
        assert_eq!(generator_power(&p, 2, &[0.0]).unwrap(), 1.0);
        let p2 = PlaneWave::new(vec![1.0, 1.0]).unwrap();
        assert!((generator_power(&p2, 1, &[0.0, 0.0]).unwrap() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn fk_examples() {
        let p = PlaneWave::scalar(1.0);
        let c0 = ConstantPotential::new(0.0).unwrap();
        let c1 = ConstantPotential::new(-1.0).unwrap();
        assert!((fk_semigroup_apply(&p, c0, 1.0, &[0.0]).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((fk_semigroup_apply(&p, c1, 1.0, &[0.0]).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        let flat = PlaneWave::scalar(0.0);
        assert!((fk_semigroup_apply(&flat, c1, 2.0, &[5.0]).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert!(ConstantPotential::new(0.5).is_err());
    }

    #[test]
    fn semigroup_law() {
        let p = wave(1.3);
        let x = [0.4];
        let lhs = heat_semigroup_apply(&p, 0.7, &x).unwrap();
        let inner = (-1.3f64 * 1.3 * 0.3).exp();
        let rhs = inner * heat_semigroup_apply(&p, 0.4, &x).unwrap();
        assert!((lhs - rhs).abs() < 1e-15);

        // Bump: T_{s1+s2} f = T_{s1}(T_{s2} f); T_{s2} f is a scaled bump of width a + 4 s2.
        let a = 0.8;
        let (s1, s2) = (0.3, 0.45);
        let bump: TestFunction = GaussianBump::new(vec![0.1, -0.2], a).unwrap().into();
        let y = [0.5, 0.25];
        let direct = heat_semigroup_apply(&bump, s1 + s2, &y).unwrap();
        let amp = (a / (a + 4.0 * s2)).powf(1.0);
        let mid: TestFunction = GaussianBump::new(vec![0.1, -0.2], a + 4.0 * s2).unwrap().into();
        let composed = amp * heat_semigroup_apply(&mid, s1, &y).unwrap();
        assert!((direct - composed).abs() < 1e-12);
    }

    #[test]
    fn heat_equation_residual() {
        let fd = FdStencil::default_for(1);
        for f in [wave(1.5), GaussianBump::new(vec![0.0, 0.0], 0.6).unwrap().into()] {
            let x = vec![0.3; f.dim()];
            let ds = fd_time_derivative(|s| heat_semigroup_apply(&f, s, &x).unwrap(), 0.8, &fd).unwrap();
            let lap = heat_semigroup_laplacian(&f, 0.8, &x).unwrap();
            assert!((ds.value - lap).abs() < 1e-8, "{f:?}: {} vs {lap}", ds.value);
        }
    }

    #[test]
    fn fk_generator_residual() {
        let p = PlaneWave::scalar(1.2);
        let c = ConstantPotential::new(-0.7).unwrap();
        let x = [0.2];
        let fd = FdStencil::default_for(1);
        let ds = fd_time_derivative(|s| fk_semigroup_apply(&p, c, s, &x).unwrap(), 1.0, &fd).unwrap();
        let v = fk_semigroup_apply(&p, c, 1.0, &x).unwrap();
        let rhs = -p.kappa_sq() * v + c.value() * v;
        assert!((ds.value - rhs).abs() < 1e-8);
    }

    #[test]
    fn mc_oracle_constant_potential() {
        let p = wave(1.0);
        let mc = McSettings::new(200_000, 3, 1);
        let c0 = Potential::Constant(ConstantPotential::new(0.0).unwrap());
        let e = mc_semigroup(&p, &c0, 1.0, &[0.0], &mc).unwrap();
        assert!(e.within((-1.0f64).exp(), 4.0), "{e:?}");
        let c1 = Potential::Constant(ConstantPotential::new(-1.0).unwrap());
        let e = mc_semigroup(&p, &c1, 1.0, &[0.0], &mc).unwrap();
        assert!(e.within((-2.0f64).exp(), 4.0), "{e:?}");
        let e = mc_semigroup(&wave(0.0), &c0, 1.0, &[0.0], &mc).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
    }

    #[test]
    fn mc_oracle_path_potential_matches_constant() {
        let p = wave(1.0);
        let mc = McSettings::new(20_000, 5, 2);
        let c = |_: &[f64]| -1.0;
        let e = mc_semigroup(&p, &Potential::Path { c: &c, h: 0.05 }, 1.0, &[0.0], &mc).unwrap();
        assert!(e.within((-2.0f64).exp(), 4.0), "{e:?}");
    }

    #[test]
    fn mc_rejects_small_runs() {
        let c0 = Potential::Constant(ConstantPotential::new(0.0).unwrap());
        let err = mc_semigroup(&wave(1.0), &c0, 1.0, &[0.0], &McSettings::new(10, 1, 1)).unwrap_err();
        assert!(matches!(err, Error::TooFewSamples { .. }));
    }
}
