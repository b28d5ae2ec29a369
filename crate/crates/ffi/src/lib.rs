//! C ABI for `atlab-core`.
//!
//! Every fallible function returns an [`AtlabStatus`] and writes results
//! through out-pointers; on failure the message is available from
//! [`atlab_last_error_message`]. Handles are opaque and must be released with
//! their `_free` function. Stable indices are passed as a reduced fraction
//! `l/m`.

use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;
use std::slice;

use atlab_core::composition::{u_quadrature, CompositionSpec};
use atlab_core::density::{stable_density, weighted_kernel_integral};
use atlab_core::exit::{exit_oracle, getoor_mean, BallDomain};
use atlab_core::lab::{self, ExperimentConfig};
use atlab_core::rng::RngStream;
use atlab_core::sampling::{sample_subordinator, sample_symmetric_stable, SubordinatorIndex};
use atlab_core::semigroup::{ConstantPotential, PlaneWave};
use atlab_core::skbm::{q_apply, SpectralCoefficients, SpectralDomain};
use atlab_core::AlphaIndex;

mod status;

pub use status::{atlab_last_error_message, atlab_status_name, AtlabStatus};
use status::{guard, null, Fail};

/// Seeded random stream.
pub struct AtlabRng {
    inner: RngStream,
}

/// Sine expansion of an initial function on `(0, a)`.
pub struct AtlabSpectral {
    domain: SpectralDomain,
    coefficients: SpectralCoefficients,
}

/// Experiment configuration.
pub struct AtlabConfig {
    inner: ExperimentConfig,
}

/// Time change applied to a one-dimensional plane wave `cos(kappa x)`.
/// Passed to [`atlab_plane_wave_u`] as its integer value.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtlabVariant {
    CauchyTime = 0,
    /// `param` is epsilon.
    EpsWeighted = 1,
    /// `param` is the constant potential, `<= 0`.
    FeynmanKac = 2,
    Ictbap = 3,
    /// Uses the `l/m` index.
    AlphaTime = 4,
    Btp = 5,
}

impl AtlabVariant {
    fn from_raw(v: u32) -> Result<Self, Fail> {
        Ok(match v {
            0 => AtlabVariant::CauchyTime,
            1 => AtlabVariant::EpsWeighted,
            2 => AtlabVariant::FeynmanKac,
            3 => AtlabVariant::Ictbap,
            4 => AtlabVariant::AlphaTime,
            5 => AtlabVariant::Btp,
            _ => return Err(Fail(AtlabStatus::InvalidArgument, format!("unknown variant {v}"))),
        })
    }
}

fn alpha(l: u32, m: u32) -> Result<AlphaIndex, Fail> {
    Ok(AlphaIndex::new(l, m)?)
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn input<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(AtlabStatus::InvalidArgument, format!("`{name}` is not UTF-8")))
}

/// Library version, static and NUL-terminated.
#[no_mangle]
pub extern "C" fn atlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---------------------------------------------------------------------------
// Densities and oracles
// ---------------------------------------------------------------------------

/// Density `p_t^alpha(0, s)` of the symmetric stable law, `alpha = l/m`.
///
/// # Safety
/// `out_value` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn atlab_stable_density(l: u32, m: u32, t: f64, s: f64, out_value: *mut f64) -> AtlabStatus {
    guard(|| {
        *out(out_value, "out_value")? = stable_density(alpha(l, m)?, t, s)?;
        Ok(())
    })
}

/// `2 ∫_0^∞ p_t^alpha(0,s) e^{-beta s} ds` with its quadrature error.
///
/// # Safety
/// `out_value` and `out_error` must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn atlab_weighted_kernel_integral(
    l: u32,
    m: u32,
    beta: f64,
    t: f64,
    out_value: *mut f64,
    out_error: *mut f64,
) -> AtlabStatus {
    guard(|| {
        let (v, e) = (out(out_value, "out_value")?, out(out_error, "out_error")?);
        let r = weighted_kernel_integral(alpha(l, m)?, beta, t)?;
        *v = r.value;
        *e = r.error;
        Ok(())
    })
}

/// Mean exit time `(R² - |x|²)/(2n)` from the centred ball of radius `radius`
/// in `dim` dimensions; `x` has `dim` entries.
///
/// # Safety
/// `x` must point to `dim` readable doubles; `out_value` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn atlab_exit_oracle(
    dim: usize,
    radius: f64,
    x: *const f64,
    out_value: *mut f64,
) -> AtlabStatus {
    guard(|| {
        let x = input(x, dim, "x")?;
        let ball = BallDomain::centered(dim, radius)?;
        *out(out_value, "out_value")? = exit_oracle(&ball, x)?;
        Ok(())
    })
}

/// Mean exit time of the symmetric `l/m`-stable process from the ball of
/// radius `radius` in `n` dimensions, started at distance `y` from the centre.
///
/// # Safety
/// `out_value` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn atlab_getoor_mean(
    l: u32,
    m: u32,
    n: usize,
    radius: f64,
    y: f64,
    out_value: *mut f64,
) -> AtlabStatus {
    guard(|| {
        *out(out_value, "out_value")? = getoor_mean(alpha(l, m)?, n, radius, y)?;
        Ok(())
    })
}

/// `u(t, x)` for the plane wave `cos(kappa x)` under `variant`, by quadrature.
///
/// `param` is read by the eps-weighted and Feynman-Kac variants; `l/m` only
/// by the alpha-time variant. For ICTBAP the real part is returned.
///
/// # Safety
/// `out_value` and `out_error` must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn atlab_plane_wave_u(
    variant: u32,
    kappa: f64,
    param: f64,
    l: u32,
    m: u32,
    t: f64,
    x: f64,
    out_value: *mut f64,
    out_error: *mut f64,
) -> AtlabStatus {
    guard(|| {
        let (v, e) = (out(out_value, "out_value")?, out(out_error, "out_error")?);
        let f = PlaneWave::scalar(kappa);
        let spec = match AtlabVariant::from_raw(variant)? {
            AtlabVariant::CauchyTime => CompositionSpec::cauchy_time(f),
            AtlabVariant::EpsWeighted => CompositionSpec::eps_weighted(f, param)?,
            AtlabVariant::FeynmanKac => CompositionSpec::feynman_kac(f, ConstantPotential::new(param)?),
            AtlabVariant::Ictbap => CompositionSpec::ictbap(f),
            AtlabVariant::AlphaTime => CompositionSpec::alpha_time(alpha(l, m)?, f),
            AtlabVariant::Btp => CompositionSpec::btp(f),
        };
        let q = u_quadrature(&spec, t, &[x])?;
        *v = q.value;
        *e = q.error;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Random streams and samplers
// ---------------------------------------------------------------------------

/// New stream `(seed, stream_id)`. Never returns NULL.
#[no_mangle]
pub extern "C" fn atlab_rng_new(seed: u64, stream_id: u64) -> *mut AtlabRng {
    Box::into_raw(Box::new(AtlabRng {
        inner: RngStream::new(seed, stream_id),
    }))
}

/// # Safety
/// `rng` must come from [`atlab_rng_new`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn atlab_rng_free(rng: *mut AtlabRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// Fills `out` with `len` draws of `Y(t)` for the symmetric `l/m`-stable process.
///
/// # Safety
/// `rng` must be a live handle; `out` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn atlab_sample_stable(
    rng: *mut AtlabRng,
    l: u32,
    m: u32,
    t: f64,
    out: *mut f64,
    len: usize,
) -> AtlabStatus {
    guard(|| {
        let rng = &mut self::out(rng, "rng")?.inner;
        let a = alpha(l, m)?;
        for slot in output(out, len, "out")? {
            *slot = sample_symmetric_stable(a, t, rng)?;
        }
        Ok(())
    })
}

/// Fills `out` with `len` draws of the `num/den` stable subordinator at time `t`.
///
/// # Safety
/// `rng` must be a live handle; `out` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn atlab_sample_subordinator(
    rng: *mut AtlabRng,
    num: u32,
    den: u32,
    t: f64,
    out: *mut f64,
    len: usize,
) -> AtlabStatus {
    guard(|| {
        let rng = &mut self::out(rng, "rng")?.inner;
        let beta = SubordinatorIndex::new(num, den)?;
        for slot in output(out, len, "out")? {
            *slot = sample_subordinator(beta, t, rng)?;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Spectral semigroup on an interval
// ---------------------------------------------------------------------------

/// `f(x) = Σ amplitudes[i] sin(modes[i] π x / a)` on `(0, a)`.
///
/// # Safety
/// `modes` and `amplitudes` must hold `count` entries; `out_handle` must be
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn atlab_spectral_sine_sum(
    a: f64,
    modes: *const u32,
    amplitudes: *const f64,
    count: usize,
    out_handle: *mut *mut AtlabSpectral,
) -> AtlabStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        *slot = ptr::null_mut();
        let modes = input(modes, count, "modes")?;
        let amplitudes = input(amplitudes, count, "amplitudes")?;
        let domain = SpectralDomain::interval(a)?;
        let terms: Vec<(Vec<u32>, f64)> = modes.iter().zip(amplitudes).map(|(&k, &c)| (vec![k], c)).collect();
        let coefficients = SpectralCoefficients::from_sine_sum(&domain, &terms)?;
        *slot = Box::into_raw(Box::new(AtlabSpectral { domain, coefficients }));
        Ok(())
    })
}

/// Indicator of `[lo, hi]` on `(0, a)` truncated to `modes` sine modes.
///
/// # Safety
/// `out_handle` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn atlab_spectral_indicator(
    a: f64,
    lo: f64,
    hi: f64,
    modes: u32,
    out_handle: *mut *mut AtlabSpectral,
) -> AtlabStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        *slot = ptr::null_mut();
        let domain = SpectralDomain::interval(a)?;
        let coefficients = SpectralCoefficients::interval_indicator(&domain, lo, hi, modes)?;
        *slot = Box::into_raw(Box::new(AtlabSpectral { domain, coefficients }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from an `atlab_spectral_*` constructor and not be used
/// afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn atlab_spectral_free(handle: *mut AtlabSpectral) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Subordinate killed Brownian motion semigroup `Q_t f(x)` for `alpha = l/m`.
///
/// # Safety
/// `handle` must be live; `out_value` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn atlab_q_apply(
    handle: *const AtlabSpectral,
    l: u32,
    m: u32,
    t: f64,
    x: f64,
    out_value: *mut f64,
) -> AtlabStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        *out(out_value, "out_value")? = q_apply(&h.domain, &h.coefficients, alpha(l, m)?, t, &[x])?;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

/// Config with all defaults for the named experiment.
///
/// # Safety
/// `experiment` must be a NUL-terminated string; `out_handle` must be valid
/// for one write.
#[no_mangle]
pub unsafe extern "C" fn atlab_config_new(experiment: *const c_char, out_handle: *mut *mut AtlabConfig) -> AtlabStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        *slot = ptr::null_mut();
        let id = text(experiment, "experiment")?;
        lab::find_experiment(id)?;
        *slot = Box::into_raw(Box::new(AtlabConfig {
            inner: ExperimentConfig::new(id),
        }));
        Ok(())
    })
}

/// Config parsed from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out_handle` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn atlab_config_from_toml(toml: *const c_char, out_handle: *mut *mut AtlabConfig) -> AtlabStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        *slot = ptr::null_mut();
        let inner = ExperimentConfig::from_toml_str(text(toml, "toml")?)?;
        lab::find_experiment(&inner.experiment)?;
        *slot = Box::into_raw(Box::new(AtlabConfig { inner }));
        Ok(())
    })
}

/// # Safety
/// `config` must be live.
#[no_mangle]
pub unsafe extern "C" fn atlab_config_set_seed(config: *mut AtlabConfig, seed: u64) -> AtlabStatus {
    guard(|| {
        out(config, "config")?.inner.seed = Some(seed);
        Ok(())
    })
}

/// # Safety
/// `config` must be live.
#[no_mangle]
pub unsafe extern "C" fn atlab_config_set_workers(config: *mut AtlabConfig, workers: usize) -> AtlabStatus {
    guard(|| {
        if workers == 0 {
            return Err(Fail(AtlabStatus::InvalidArgument, "workers must be at least 1".into()));
        }
        out(config, "config")?.inner.workers = Some(workers);
        Ok(())
    })
}

/// # Safety
/// `config` must be live.
#[no_mangle]
pub unsafe extern "C" fn atlab_config_set_samples(config: *mut AtlabConfig, samples: usize) -> AtlabStatus {
    guard(|| {
        out(config, "config")?.inner.samples = Some(samples);
        Ok(())
    })
}

/// # Safety
/// `config` must come from an `atlab_config_*` constructor and not be used
/// afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn atlab_config_free(config: *mut AtlabConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the experiment in memory. `out_json` receives the JSON report, to be
/// released with [`atlab_string_free`]; `out_pass` is 1 when every criterion
/// passed. A run whose criteria fail still returns `ATLAB_STATUS_OK`.
///
/// # Safety
/// `config` must be live; the out-pointers must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn atlab_run_experiment(
    config: *const AtlabConfig,
    out_json: *mut *mut c_char,
    out_pass: *mut i32,
) -> AtlabStatus {
    guard(|| {
        let json_slot = out(out_json, "out_json")?;
        *json_slot = ptr::null_mut();
        let pass = out(out_pass, "out_pass")?;
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let report = lab::run(&cfg.inner)?;
        let json = CString::new(report.to_json()?).map_err(|e| Fail(AtlabStatus::Io, e.to_string()))?;
        *pass = i32::from(report.pass);
        *json_slot = json.into_raw();
        Ok(())
    })
}

/// Runs the experiment and writes `<id>.json` and `<id>.csv` into `out_dir`.
///
/// # Safety
/// `config` must be live; `out_dir` must be NUL-terminated; `out_pass` must be
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn atlab_run_experiment_to_dir(
    config: *const AtlabConfig,
    out_dir: *const c_char,
    out_pass: *mut i32,
) -> AtlabStatus {
    guard(|| {
        let pass = out(out_pass, "out_pass")?;
        let mut cfg = config.as_ref().ok_or_else(|| null("config"))?.inner.clone();
        cfg.out_dir = Some(PathBuf::from(text(out_dir, "out_dir")?));
        let (report, _, _) = lab::run_experiment(&cfg)?;
        *pass = i32::from(report.pass);
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn atlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
