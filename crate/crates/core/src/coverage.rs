//! Coverage probabilities for the nearest-UAV association rule and for
//! cell-free transmission, their lower bounds and massive-antenna limits.
//!
//! With `N` antennas the serving gain is `Gamma(N, 1)`, so coverage is
//! `P[Gamma(N, 1) >= beta Z]` for the normalized interference-plus-noise `Z`.
//! Writing `g(t) = t^(N-1) / (N-1)! * E[exp(-Z / t)]`, this probability equals
//! the `(N-1)`-th derivative of `g` at `t = 1 / beta`, which is taken by a
//! contour integral. The massive limit fixes the serving gain at one and is
//! obtained by Laplace inversion instead.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::erf::erf;
use statrs::function::factorial::factorial;
use statrs::function::gamma::gamma;

use crate::analytic::{
    density_factor, excess_interference_rayleigh, shot_exponent_apdl, AltitudeMeasure, LinearMeasure, MeanMeasure,
};
use crate::error::{Error, Result};
use crate::inversion::{
    ccdf_via_inversion, ccdf_via_inversion_batched, high_order_derivative_batched, Analyticity, DerivativeSpec,
    InversionSpec,
};
use crate::model::{AltitudeDistribution, AngleDistribution, Antennas, NetworkConfig, Scenario, WeightModel};
use crate::quadrature::{integrate_to_infinity, Batch, QuadratureSpec, Tail};

/// Numerical settings shared by all coverage evaluations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageOptions {
    pub quad: QuadratureSpec,
    pub inversion: InversionSpec,
    pub derivative: DerivativeSpec,
    /// Use closed forms where one exists (path-loss exponent 4 for cell-free coverage).
    pub use_closed_form: bool,
}

impl Default for CoverageOptions {
    fn default() -> Self {
        let quad = QuadratureSpec::default();
        CoverageOptions {
            quad,
            inversion: InversionSpec::default(),
            derivative: DerivativeSpec { value_rel_err: quad.rel_tol, ..DerivativeSpec::default() },
            use_closed_form: true,
        }
    }
}

impl CoverageOptions {
    pub fn without_closed_form(mut self) -> Self {
        self.use_closed_form = false;
        self
    }

    /// Options with quadrature relative tolerance `tol`; the contour derivative
    /// budgets its noise floor to match.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.quad = self.quad.with_rel_tol(tol);
        self.derivative.value_rel_err = tol;
        self
    }
}

/// How a coverage value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverageMethod {
    ClosedForm,
    ContourDerivative,
    LaplaceInversion,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageResult {
    pub value: f64,
    pub method: CoverageMethod,
}

impl CoverageResult {
    fn new(value: f64, method: CoverageMethod) -> Self {
        CoverageResult { value: value.clamp(0.0, 1.0), method }
    }
}

fn checked(cfg: &NetworkConfig) -> Result<()> {
    cfg.validate()
}

/// `E[G^(2/alpha)]` for the beamforming gain, `Gamma(N, 1)` or one in the limit.
fn gain_moment(antennas: Antennas, a: f64) -> f64 {
    WeightModel::Gamma { power: 1.0, antennas }.moment(a)
}

/// Takes the `(N-1)`-th derivative of `t^(N-1) / (N-1)! * psi(t)` at `1 / beta`,
/// where `psi` is evaluated on a batch of contour points.
fn derivative_of_scaled<P>(cfg: &NetworkConfig, n: u32, opts: &CoverageOptions, mut psi: P) -> Result<f64>
where
    P: FnMut(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let m = (n - 1) as usize;
    let norm = factorial(m as u64);
    let d = high_order_derivative_batched(
        |ts: &[Complex64]| {
            let values = psi(ts)?;
            Ok(values.into_iter().zip(ts).map(|(v, t)| v * t.powi(m as i32) / norm).collect())
        },
        m,
        1.0 / cfg.beta,
        &opts.derivative,
    )?;
    Ok(d.value)
}

/// `E_x[exp(-x a_k - b_k x^(alpha/2))]` for `x ~ Exp(1)`, for each pair `(a_k, b_k)`.
fn exponential_average(a: &[Complex64], b: &[Complex64], alpha: f64, quad: &QuadratureSpec) -> Result<Vec<Complex64>> {
    if b.iter().all(|v| v.norm() == 0.0) {
        return Ok(a.iter().map(|v| 1.0 / v).collect());
    }
    let half_alpha = 0.5 * alpha;
    let min_re = a.iter().map(|v| v.re).fold(f64::INFINITY, f64::min).max(1e-3);
    let scale = 1.0 / min_re;
    let r = integrate_to_infinity(
        |x: f64| {
            let xp = x.powf(half_alpha);
            Ok(Batch(a.iter().zip(b).map(|(ak, bk)| (-(ak * x) - bk * xp).exp()).collect()))
        },
        0.0,
        &[scale],
        Tail::Exponential { scale },
        quad,
    )?;
    Ok(r.value.0)
}

/// Coverage with nearest-UAV association when the angle is independent of distance.
pub fn p_cov_apil(cfg: &NetworkConfig, angle: &AngleDistribution, opts: &CoverageOptions) -> Result<CoverageResult> {
    checked(cfg)?;
    angle.validate()?;
    let n = match cfg.antennas {
        Antennas::Finite(n) => n,
        Antennas::Massive => return p_cov_apil_massive(cfg, angle, opts),
    };
    let v = cfg.delta();
    let kappa = PI * cfg.lambda * density_factor(cfg, angle, &opts.quad)?;
    let c = cfg.noise_mw / (cfg.power_mw * kappa.powf(0.5 * cfg.alpha));
    let quad = opts.quad;
    let value = derivative_of_scaled(cfg, n, opts, |ts| {
        let a = ts
            .iter()
            .map(|t| Ok(1.0 + excess_interference_rayleigh(1.0 / t, v, &quad)?))
            .collect::<Result<Vec<_>>>()?;
        let b: Vec<Complex64> = ts.iter().map(|t| c / t).collect();
        exponential_average(&a, &b, cfg.alpha, &quad)
    })?;
    Ok(CoverageResult::new(value, if n == 1 { CoverageMethod::ClosedForm } else { CoverageMethod::ContourDerivative }))
}

/// Jensen lower bound on [`p_cov_apil`]: the random serving distance is
/// replaced by its moments inside the conditional Laplace transform.
pub fn p_cov_apil_lower_bound(cfg: &NetworkConfig, angle: &AngleDistribution, opts: &CoverageOptions) -> Result<CoverageResult> {
    checked(cfg)?;
    angle.validate()?;
    let n = cfg
        .antennas
        .finite()
        .ok_or_else(|| Error::Unsupported("lower bound in the massive-antenna limit".into()))?;
    let v = cfg.delta();
    let kappa = PI * cfg.lambda * density_factor(cfg, angle, &opts.quad)?;
    let noise = cfg.noise_mw * gamma(1.0 + 0.5 * cfg.alpha) / (cfg.power_mw * kappa.powf(0.5 * cfg.alpha));
    let quad = opts.quad;
    let value = derivative_of_scaled(cfg, n, opts, |ts| {
        ts.iter()
            .map(|t| Ok((-noise / t - excess_interference_rayleigh(1.0 / t, v, &quad)?).exp()))
            .collect()
    })?;
    Ok(CoverageResult::new(value, if n == 1 { CoverageMethod::ClosedForm } else { CoverageMethod::ContourDerivative }))
}

/// Massive-antenna limit of [`p_cov_apil`]: the serving gain is deterministic,
/// so coverage is the CDF of the interference-plus-noise, found by inversion.
pub fn p_cov_apil_massive(cfg: &NetworkConfig, angle: &AngleDistribution, opts: &CoverageOptions) -> Result<CoverageResult> {
    checked(cfg)?;
    angle.validate()?;
    let v = cfg.delta();
    let kappa = PI * cfg.lambda * density_factor(cfg, angle, &opts.quad)?;
    let c = cfg.noise_mw / (cfg.power_mw * kappa.powf(0.5 * cfg.alpha));
    let quad = opts.quad;
    let value = ccdf_via_inversion_batched(
        |ss: &[Complex64]| {
            let a = ss
                .iter()
                .map(|s| Ok(1.0 + excess_interference_rayleigh(*s, v, &quad)?))
                .collect::<Result<Vec<_>>>()?;
            let b: Vec<Complex64> = ss.iter().map(|s| s * c).collect();
            exponential_average(&a, &b, cfg.alpha, &quad)
        },
        cfg.beta,
        Analyticity::RightHalfPlane,
        &opts.inversion,
    )?;
    Ok(CoverageResult::new(value, CoverageMethod::LaplaceInversion))
}

/// Kernel integral `d * integral_1^inf M'(d w) / (1 + t w^(alpha/2)) dw` for
/// every `t`: the interference exponent (over `pi * lambda`) of UAVs beyond
/// effective squared distance `d`.
fn interference_exponent<M: MeanMeasure + ?Sized>(
    measure: &M,
    d: f64,
    ts: &[Complex64],
    alpha: f64,
    quad: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    let half_alpha = 0.5 * alpha;
    let breaks: Vec<f64> = measure.breakpoints().into_iter().map(|b| b / d).filter(|w| *w > 1.0).collect();
    let r = integrate_to_infinity(
        |w: f64| {
            let density = measure.density(d * w)?;
            let wp = w.powf(half_alpha);
            Ok(Batch(ts.iter().map(|t| density / (1.0 + t * wp)).collect()))
        },
        1.0,
        &breaks,
        Tail::Algebraic { decay: half_alpha, scale: 1.0 },
        quad,
    )?;
    Ok(r.value.0.into_iter().map(|v| v * d).collect())
}

/// `E_D[h(D)]` for the effective squared distance `D` of the serving UAV, whose
/// density is `pi lambda M'(d) exp(-pi lambda M(d))`.
fn expect_serving<M, H>(measure: &M, lambda: f64, quad: &QuadratureSpec, mut h: H) -> Result<Batch>
where
    M: MeanMeasure + ?Sized,
    H: FnMut(f64) -> Result<Vec<Complex64>>,
{
    let pl = PI * lambda;
    let start = measure.support_start();
    let breaks = measure.breakpoints();
    let slope = measure.asymptotic_density();
    if !(slope > 0.0) {
        return Err(Error::InvalidInput("mean measure must grow without bound".into()));
    }
    let scale = 1.0 / (pl * slope);
    let mut all_breaks = breaks.clone();
    all_breaks.push(start + scale);
    let r = integrate_to_infinity(
        |d: f64| {
            let density = measure.density(d)?;
            if density == 0.0 {
                let zeros = h(d.max(start).max(f64::MIN_POSITIVE))?;
                return Ok(Batch(zeros.into_iter().map(|_| Complex64::new(0.0, 0.0)).collect()));
            }
            let weight = pl * density * (-pl * measure.cumulative(d)?).exp();
            let values = h(d)?;
            Ok(Batch(values.into_iter().map(|v| v * weight).collect()))
        },
        start,
        &all_breaks,
        Tail::Exponential { scale },
        quad,
    )?;
    Ok(r.value)
}

/// Coverage with nearest-UAV association for effective squared distances with
/// mean measure `pi * lambda * M`.
pub fn p_cov_from_measure<M: MeanMeasure + ?Sized>(cfg: &NetworkConfig, measure: &M, opts: &CoverageOptions) -> Result<CoverageResult> {
    checked(cfg)?;
    let pl = PI * cfg.lambda;
    let half_alpha = 0.5 * cfg.alpha;
    let noise = cfg.noise_mw / cfg.power_mw;
    let quad = opts.quad;
    match cfg.antennas {
        Antennas::Finite(n) => {
            let value = derivative_of_scaled(cfg, n, opts, |ts| {
                let out = expect_serving(measure, cfg.lambda, &quad, |d| {
                    let k = interference_exponent(measure, d, ts, cfg.alpha, &quad)?;
                    let dn = noise * d.powf(half_alpha);
                    Ok(ts.iter().zip(k).map(|(t, kv)| (-dn / t - pl * kv).exp()).collect())
                })?;
                Ok(out.0)
            })?;
            Ok(CoverageResult::new(value, if n == 1 { CoverageMethod::ClosedForm } else { CoverageMethod::ContourDerivative }))
        }
        Antennas::Massive => {
            let value = ccdf_via_inversion_batched(
                |ss: &[Complex64]| {
                    let ts: Vec<Complex64> = ss.iter().map(|s| 1.0 / s).collect();
                    let out = expect_serving(measure, cfg.lambda, &quad, |d| {
                        // The deterministic-gain exponent uses the same kernel at t = 1/s.
                        let k = interference_exponent(measure, d, &ts, cfg.alpha, &quad)?;
                        let dn = noise * d.powf(half_alpha);
                        Ok(ss.iter().zip(k).map(|(s, kv)| (-s * dn - pl * kv).exp()).collect())
                    })?;
                    Ok(out.0)
                },
                cfg.beta,
                Analyticity::RightHalfPlane,
                &opts.inversion,
            )?;
            Ok(CoverageResult::new(value, CoverageMethod::LaplaceInversion))
        }
    }
}

/// Coverage with nearest-UAV association when the altitude is independent of distance.
pub fn p_cov_apdl(cfg: &NetworkConfig, altitude: &AltitudeDistribution, opts: &CoverageOptions) -> Result<CoverageResult> {
    let measure = AltitudeMeasure::new(cfg, altitude, &opts.quad)?;
    p_cov_from_measure(cfg, &measure, opts)
}

/// Jensen lower bound on [`p_cov_from_measure`]: the noise term uses
/// `E[D^(alpha/2)]` and the interference exponent is averaged over `D`.
pub fn p_cov_lower_bound_from_measure<M: MeanMeasure + ?Sized>(
    cfg: &NetworkConfig,
    measure: &M,
    opts: &CoverageOptions,
) -> Result<CoverageResult> {
    checked(cfg)?;
    let n = cfg
        .antennas
        .finite()
        .ok_or_else(|| Error::Unsupported("lower bound in the massive-antenna limit".into()))?;
    let pl = PI * cfg.lambda;
    let half_alpha = 0.5 * cfg.alpha;
    let quad = opts.quad;
    let noise_moment = expect_serving(measure, cfg.lambda, &quad, |d| Ok(vec![Complex64::new(d.powf(half_alpha), 0.0)]))?.0[0].re;
    let noise = cfg.noise_mw / cfg.power_mw * noise_moment;
    let value = derivative_of_scaled(cfg, n, opts, |ts| {
        let mean_k = expect_serving(measure, cfg.lambda, &quad, |d| interference_exponent(measure, d, ts, cfg.alpha, &quad))?;
        Ok(ts.iter().zip(mean_k.0).map(|(t, kv)| (-noise / t - pl * kv).exp()).collect())
    })?;
    Ok(CoverageResult::new(value, if n == 1 { CoverageMethod::ClosedForm } else { CoverageMethod::ContourDerivative }))
}

/// Jensen lower bound on [`p_cov_apdl`].
pub fn p_cov_apdl_lower_bound(cfg: &NetworkConfig, altitude: &AltitudeDistribution, opts: &CoverageOptions) -> Result<CoverageResult> {
    let measure = AltitudeMeasure::new(cfg, altitude, &opts.quad)?;
    p_cov_lower_bound_from_measure(cfg, &measure, opts)
}

/// Cell-free coverage threshold on `S = sum_i G_i L_i |U_i|^-alpha`.
fn cell_free_threshold(cfg: &NetworkConfig) -> f64 {
    cfg.beta * cfg.noise_mw / cfg.power_mw
}

/// `exp(-a / (2 sqrt(tau)))`-type closed form for path-loss exponent 4:
/// `P[S >= tau] = erf(a / (2 sqrt(tau)))` when `L_S(s) = exp(-a sqrt(s))`.
fn erf_closed_form(a: f64, tau: f64) -> f64 {
    erf(a / (2.0 * tau.sqrt()))
}

/// Cell-free coverage `P[P * S / sigma^2 >= beta]` when the angle is independent
/// of distance: `S` is a stable variable with index `2 / alpha`.
pub fn p_cf_apil(cfg: &NetworkConfig, angle: &AngleDistribution, opts: &CoverageOptions) -> Result<CoverageResult> {
    checked(cfg)?;
    angle.validate()?;
    if cfg.noise_mw == 0.0 {
        return Ok(CoverageResult::new(1.0, CoverageMethod::ClosedForm));
    }
    let v = cfg.delta();
    let omega = density_factor(cfg, angle, &opts.quad)?;
    let a = PI * cfg.lambda * omega * gamma(1.0 - v) * gain_moment(cfg.antennas, v);
    let tau = cell_free_threshold(cfg);
    if opts.use_closed_form && (cfg.alpha - 4.0).abs() < 1e-12 {
        return Ok(CoverageResult::new(erf_closed_form(a, tau), CoverageMethod::ClosedForm));
    }
    // S / a^(1/v) has transform exp(-s^v); P[S < tau] = P[1/S' > a^(1/v) / tau].
    // For v > 1/2 that transform grows without bound in the left half plane,
    // so the inversion stays on a vertical line.
    let tau_unit = tau * a.powf(-1.0 / v);
    let cdf = ccdf_via_inversion(|s| Ok((-s.powf(v)).exp()), 1.0 / tau_unit, Analyticity::RightHalfPlane, &opts.inversion)?;
    Ok(CoverageResult::new(1.0 - cdf, CoverageMethod::LaplaceInversion))
}

/// Cell-free coverage when the altitude is independent of distance.
pub fn p_cf_apdl(cfg: &NetworkConfig, altitude: &AltitudeDistribution, opts: &CoverageOptions) -> Result<CoverageResult> {
    checked(cfg)?;
    altitude.validate()?;
    if cfg.noise_mw == 0.0 {
        return Ok(CoverageResult::new(1.0, CoverageMethod::ClosedForm));
    }
    let tau = cell_free_threshold(cfg);
    if let AltitudeDistribution::ProportionalToProjection { h0 } = *altitude {
        if opts.use_closed_form && (cfg.alpha - 4.0).abs() < 1e-12 && cfg.ell == 1.0 {
            // Every link sees the same elevation and no LoS penalty, so S is stable
            // with index 1/2 and scale cos^2(atan h0) sqrt(pi) E[G^(1/2)].
            let c2 = h0.atan().cos().powi(2);
            let a = PI * cfg.lambda * c2 * PI.sqrt() * gain_moment(cfg.antennas, 0.5);
            return Ok(CoverageResult::new(erf_closed_form(a, tau), CoverageMethod::ClosedForm));
        }
    }
    let weight = WeightModel::Gamma { power: 1.0, antennas: cfg.antennas };
    let pl = PI * cfg.lambda;
    let quad = opts.quad;
    let cdf = ccdf_via_inversion(
        |s| Ok((-pl * shot_exponent_apdl(s, 0.0, cfg, altitude, &weight, &quad)?).exp()),
        1.0 / tau,
        Analyticity::RightHalfPlane,
        &opts.inversion,
    )?;
    Ok(CoverageResult::new(1.0 - cdf, CoverageMethod::LaplaceInversion))
}

/// Nearest-UAV coverage for either scenario.
pub fn p_cov(cfg: &NetworkConfig, scenario: &Scenario, opts: &CoverageOptions) -> Result<CoverageResult> {
    match scenario {
        Scenario::AngleIndependent(angle) => p_cov_apil(cfg, angle, opts),
        Scenario::AltitudeIndependent(altitude) => p_cov_apdl(cfg, altitude, opts),
    }
}

/// Lower bound on nearest-UAV coverage for either scenario.
pub fn p_cov_lower_bound(cfg: &NetworkConfig, scenario: &Scenario, opts: &CoverageOptions) -> Result<CoverageResult> {
    match scenario {
        Scenario::AngleIndependent(angle) => p_cov_apil_lower_bound(cfg, angle, opts),
        Scenario::AltitudeIndependent(altitude) => p_cov_apdl_lower_bound(cfg, altitude, opts),
    }
}

/// Cell-free coverage for either scenario.
pub fn p_cf(cfg: &NetworkConfig, scenario: &Scenario, opts: &CoverageOptions) -> Result<CoverageResult> {
    match scenario {
        Scenario::AngleIndependent(angle) => p_cf_apil(cfg, angle, opts),
        Scenario::AltitudeIndependent(altitude) => p_cf_apdl(cfg, altitude, opts),
    }
}

/// The effective-distance mean measure of a scenario.
pub fn mean_measure_for(cfg: &NetworkConfig, scenario: &Scenario, quad: &QuadratureSpec) -> Result<Box<dyn MeanMeasure>> {
    Ok(match scenario {
        Scenario::AngleIndependent(angle) => Box::new(LinearMeasure::for_angle(cfg, angle, quad)?),
        Scenario::AltitudeIndependent(altitude) => Box::new(AltitudeMeasure::new(cfg, altitude, quad)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::db_to_linear;

    #[test]
    fn interference_limited_single_antenna() {
        let mut cfg = NetworkConfig::default();
        cfg.noise_mw = 0.0;
        let opts = CoverageOptions::default();
        let angle = AngleDistribution::degenerate_deg(20.0);
        for beta_db in [-10.0, 0.0, 10.0] {
            cfg.beta = db_to_linear(beta_db);
            let p = p_cov_apil(&cfg, &angle, &opts).unwrap().value;
            let ig = excess_interference_rayleigh(Complex64::new(cfg.beta, 0.0), cfg.delta(), &opts.quad).unwrap().re;
            assert!((p - 1.0 / (1.0 + ig)).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_measure_reproduces_angle_case() {
        let opts = CoverageOptions::default();
        let angle = AngleDistribution::degenerate_deg(20.0);
        for n in [1, 3] {
            let cfg = NetworkConfig { lambda: 1e-6, antennas: Antennas::Finite(n), ..NetworkConfig::default() };
            let measure = LinearMeasure::for_angle(&cfg, &angle, &opts.quad).unwrap();
            let a = p_cov_apil(&cfg, &angle, &opts).unwrap().value;
            let b = p_cov_from_measure(&cfg, &measure, &opts).unwrap().value;
            assert!((a - b).abs() < 1e-7, "{n}: {a} vs {b}");
        }
    }
}
