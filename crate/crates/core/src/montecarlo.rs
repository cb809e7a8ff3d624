//! Monte Carlo estimators that serve as the oracle for the analytic layer.
//!
//! Each estimator evaluates one per-drop statistic and reduces it in drop
//! order, so results are identical for any number of worker threads. Sweeps
//! over the SINR threshold reuse the same drops (common random numbers).
//!
//! UAVs outside the simulation disk are not sampled. Their interference is
//! replaced by its mean, which for a far field holding a small share of the
//! power is accurate well inside the Monte Carlo error.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::model::{AngleDistribution, Antennas, Elevation, NetworkConfig, Scenario, WeightModel};
use crate::quadrature::{integrate_to_infinity, QuadratureSpec, Tail};
use crate::sampler::{drop_rng, radius_for_count, DropSampler, LinkSample, StreamPurpose};

/// Simulation disk size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiskRadius {
    /// Sized to hold `McSpec::target_count` UAVs on average.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McSpec {
    pub drops: usize,
    pub seed: u64,
    pub radius: DiskRadius,
    /// Expected UAV count per drop when the radius is automatic.
    pub target_count: f64,
    /// Two-sided confidence level of the reported interval.
    pub ci_level: f64,
    /// Add the mean interference of UAVs beyond the disk.
    pub far_field: bool,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec { drops: 100_000, seed: 1, radius: DiskRadius::Auto, target_count: 1000.0, ci_level: 0.99, far_field: true }
    }
}

impl McSpec {
    pub fn with_drops(mut self, drops: usize) -> Self {
        self.drops = drops;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn disk_radius(&self, cfg: &NetworkConfig) -> f64 {
        match self.radius {
            DiskRadius::Auto => radius_for_count(cfg.lambda, self.target_count),
            DiskRadius::Fixed(r) => r,
        }
    }
}

/// Sample mean with a normal-approximation confidence interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub drops: usize,
}

impl McEstimate {
    /// Whether `value` lies within the reported interval.
    pub fn covers(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Pairwise (cascade) summation, deterministic for a given input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn critical_value(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!("confidence level must lie in (0, 1), got {level}")));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(0.5 + 0.5 * level))
}

/// Mean, standard error and interval of per-drop values.
pub fn summarize(values: &[f64], ci_level: f64, clamp_unit: bool) -> Result<McEstimate> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidInput("at least two drops are needed".into()));
    }
    let mean = pairwise_sum(values) / n as f64;
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    let z = critical_value(ci_level)?;
    let (mut lo, mut hi) = (mean - z * se, mean + z * se);
    if clamp_unit {
        lo = lo.max(0.0);
        hi = hi.min(1.0);
    }
    Ok(McEstimate { mean, std_error: se, ci_low: lo, ci_high: hi, drops: n })
}

/// Runs `per_drop` over every drop in parallel and returns results in drop order.
fn run_drops<T, F>(sampler: &DropSampler, spec: &McSpec, per_drop: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &[LinkSample]) -> T + Sync,
{
    if spec.drops < 2 {
        return Err(Error::InvalidInput(format!("need at least two drops, got {}", spec.drops)));
    }
    Ok((0..spec.drops as u64)
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            sampler.links_into(spec.seed, i, buf);
            per_drop(i, buf)
        })
        .collect())
}

/// Mean of `sum_i (rho_i + (1 - rho_i) ell) d_i^-alpha` over UAVs whose
/// projections fall outside radius `radius`, per unit weight.
pub fn far_field_mean(cfg: &NetworkConfig, scenario: &Scenario, radius: f64, quad: &QuadratureSpec) -> Result<f64> {
    let pl = PI * cfg.lambda;
    let r2 = radius * radius;
    let half_alpha = 0.5 * cfg.alpha;
    let gain = |theta: f64| {
        let p = cfg.los.probability(theta);
        p + (1.0 - p) * cfg.ell
    };
    match scenario {
        Scenario::AngleIndependent(angle) => {
            let e = angle.expect(|theta| Ok(gain(theta) * theta.cos().powf(cfg.alpha)), quad)?;
            Ok(pl * e * r2.powf(1.0 - half_alpha) / (half_alpha - 1.0))
        }
        Scenario::AltitudeIndependent(altitude) => {
            let v: f64 = altitude.expect(
                |elev: Elevation| {
                    let r = integrate_to_infinity(
                        |z: f64| {
                            let (d2, theta) = elev.geometry(z);
                            Ok(gain(theta) * d2.powf(-half_alpha))
                        },
                        r2,
                        &[],
                        Tail::Algebraic { decay: half_alpha, scale: r2 },
                        quad,
                    )?;
                    Ok(r.value)
                },
                quad,
            )?;
            Ok(pl * v)
        }
    }
}

fn far_field(cfg: &NetworkConfig, scenario: &Scenario, spec: &McSpec) -> Result<f64> {
    if spec.far_field {
        far_field_mean(cfg, scenario, spec.disk_radius(cfg), &QuadratureSpec::default())
    } else {
        Ok(0.0)
    }
}

/// `Gamma(n, 1)` as `-ln` of a product of `n` uniforms; one in the massive limit.
fn gamma_gain<R: Rng>(antennas: Antennas, rng: &mut R) -> f64 {
    match antennas {
        Antennas::Finite(n) => {
            let mut prod = 1.0;
            for _ in 0..n {
                prod *= 1.0 - rng.random::<f64>();
            }
            -prod.ln()
        }
        Antennas::Massive => 1.0,
    }
}

fn unit_exponential<R: Rng>(rng: &mut R) -> f64 {
    -(1.0 - rng.random::<f64>()).ln()
}

/// Draws `W` from a weight law.
fn draw_weight<R: Rng>(weight: &WeightModel, rng: &mut R) -> f64 {
    match *weight {
        WeightModel::Unit => 1.0,
        WeightModel::Exponential { power } => power * unit_exponential(rng),
        WeightModel::Gamma { power, antennas } => power * gamma_gain(antennas, rng),
    }
}

fn path_gain(cfg: &NetworkConfig, link: &LinkSample) -> f64 {
    let g = link.d2.powf(-0.5 * cfg.alpha);
    if link.los {
        g
    } else {
        cfg.ell * g
    }
}

/// Per-drop SINR of the typical user with nearest-UAV association.
pub fn sample_sinr(cfg: &NetworkConfig, scenario: &Scenario, spec: &McSpec) -> Result<Vec<f64>> {
    let sampler = DropSampler::new(cfg, scenario, spec.disk_radius(cfg))?;
    let tail = far_field(cfg, scenario, spec)?;
    let cfg = *cfg;
    run_drops(&sampler, spec, move |i, links| {
        let mut fading = drop_rng(spec.seed, i, StreamPurpose::Fading);
        let mut best = None;
        let mut best_gain = 0.0;
        let mut total = 0.0;
        let mut best_term = 0.0;
        for (k, link) in links.iter().enumerate() {
            let g = path_gain(&cfg, link);
            let term = g * unit_exponential(&mut fading);
            total += term;
            if g > best_gain {
                best_gain = g;
                best = Some(k);
                best_term = term;
            }
        }
        if best.is_none() {
            return 0.0;
        }
        let serving = best_gain * gamma_gain(cfg.antennas, &mut fading);
        let interference = (total - best_term).max(0.0) + tail;
        cfg.power_mw * serving / (cfg.noise_mw + cfg.power_mw * interference)
    })
}

/// Fraction of per-drop values at or above each threshold.
pub fn exceedance(values: &[f64], thresholds: &[f64], ci_level: f64) -> Result<Vec<McEstimate>> {
    thresholds
        .iter()
        .map(|t| {
            let ind: Vec<f64> = values.iter().map(|v| f64::from(*v >= *t)).collect();
            summarize(&ind, ci_level, true)
        })
        .collect()
}

/// Nearest-UAV coverage estimated at every threshold in `betas` (linear).
pub fn estimate_p_cov_sweep(cfg: &NetworkConfig, scenario: &Scenario, betas: &[f64], spec: &McSpec) -> Result<Vec<McEstimate>> {
    let sinr = sample_sinr(cfg, scenario, spec)?;
    exceedance(&sinr, betas, spec.ci_level)
}

/// Nearest-UAV coverage at the configured threshold.
pub fn estimate_p_cov(cfg: &NetworkConfig, scenario: &Scenario, spec: &McSpec) -> Result<McEstimate> {
    Ok(estimate_p_cov_sweep(cfg, scenario, &[cfg.beta], spec)?[0])
}

/// Per-drop received SNR `P * sum_i G_i L_i |U_i|^-alpha / sigma^2` under
/// cell-free transmission (infinite when the noise is zero).
pub fn sample_cell_free_snr(cfg: &NetworkConfig, scenario: &Scenario, spec: &McSpec) -> Result<Vec<f64>> {
    let sampler = DropSampler::new(cfg, scenario, spec.disk_radius(cfg))?;
    let mean_gain = WeightModel::Gamma { power: 1.0, antennas: cfg.antennas }.mean();
    let tail = far_field(cfg, scenario, spec)? * mean_gain;
    let cfg = *cfg;
    run_drops(&sampler, spec, move |i, links| {
        let mut fading = drop_rng(spec.seed, i, StreamPurpose::Fading);
        let mut total = 0.0;
        for link in links {
            total += path_gain(&cfg, link) * gamma_gain(cfg.antennas, &mut fading);
        }
        cfg.power_mw * (total + tail) / cfg.noise_mw
    })
}

/// Cell-free coverage at every threshold in `betas` (linear).
pub fn estimate_p_cf_sweep(cfg: &NetworkConfig, scenario: &Scenario, betas: &[f64], spec: &McSpec) -> Result<Vec<McEstimate>> {
    let snr = sample_cell_free_snr(cfg, scenario, spec)?;
    exceedance(&snr, betas, spec.ci_level)
}

/// Cell-free coverage at the configured threshold.
pub fn estimate_p_cf(cfg: &NetworkConfig, scenario: &Scenario, spec: &McSpec) -> Result<McEstimate> {
    Ok(estimate_p_cf_sweep(cfg, scenario, &[cfg.beta], spec)?[0])
}

/// Per drop: the shot noise `T_K` (all UAVs except the `K` with the nearest
/// projections) and the squared projected distance of the K-th nearest UAV.
fn sample_shot_noise(
    cfg: &NetworkConfig,
    scenario: &Scenario,
    weight: &WeightModel,
    k: usize,
    spec: &McSpec,
) -> Result<Vec<(f64, f64)>> {
    let sampler = DropSampler::new(cfg, scenario, spec.disk_radius(cfg))?;
    let tail = far_field(cfg, scenario, spec)? * weight.mean();
    let cfg = *cfg;
    let weight = *weight;
    run_drops(&sampler, spec, move |i, links| {
        let mut fading = drop_rng(spec.seed, i, StreamPurpose::Fading);
        let mut total = 0.0;
        // The K smallest projections with their contributions, ascending.
        let mut nearest: Vec<(f64, f64)> = Vec::with_capacity(k + 1);
        for link in links {
            let term = draw_weight(&weight, &mut fading) * path_gain(&cfg, link);
            total += term;
            if k > 0 && (nearest.len() < k || link.z < nearest[nearest.len() - 1].0) {
                let pos = nearest.partition_point(|(z, _)| *z < link.z);
                nearest.insert(pos, (link.z, term));
                nearest.truncate(k);
            }
        }
        let removed: f64 = nearest.iter().map(|(_, t)| t).sum();
        let dk = if k > 0 && nearest.len() == k { nearest[k - 1].0 } else { f64::NAN };
        ((total - removed).max(0.0) + tail, dk)
    })
}

/// Estimates `E[exp(-s T_K)]` for each `s`.
pub fn estimate_shot_laplace(
    cfg: &NetworkConfig,
    scenario: &Scenario,
    weight: &WeightModel,
    s_values: &[f64],
    k: usize,
    spec: &McSpec,
) -> Result<Vec<McEstimate>> {
    let samples = sample_shot_noise(cfg, scenario, weight, k, spec)?;
    s_values
        .iter()
        .map(|s| {
            let v: Vec<f64> = samples.iter().map(|(t, _)| (-s * t).exp()).collect();
            summarize(&v, spec.ci_level, true)
        })
        .collect()
}

/// Estimates `E[exp(-zeta sec^alpha(theta) |X_K|^alpha T_K)]` for a fixed
/// elevation `theta`, for each `zeta`.
pub fn estimate_shot_laplace_normalized(
    cfg: &NetworkConfig,
    theta: f64,
    weight: &WeightModel,
    zetas: &[f64],
    k: usize,
    spec: &McSpec,
) -> Result<Vec<McEstimate>> {
    if k == 0 {
        return Err(Error::InvalidInput("K must be at least one".into()));
    }
    let scenario = Scenario::AngleIndependent(AngleDistribution::Degenerate { theta });
    let samples = sample_shot_noise(cfg, &scenario, weight, k, spec)?;
    let sec_alpha = theta.cos().powf(-cfg.alpha);
    let half_alpha = 0.5 * cfg.alpha;
    zetas
        .iter()
        .map(|zeta| {
            let v: Vec<f64> = samples
                .iter()
                .map(|(t, dk)| if dk.is_nan() { 1.0 } else { (-zeta * sec_alpha * dk.powf(half_alpha) * t).exp() })
                .collect();
            summarize(&v, spec.ci_level, true)
        })
        .collect()
}

/// Per-drop strongest received weight `R* = max_i W_i L_i |U_i|^-alpha` (zero
/// for an empty drop).
pub fn sample_strongest(cfg: &NetworkConfig, scenario: &Scenario, weight: &WeightModel, spec: &McSpec) -> Result<Vec<f64>> {
    let sampler = DropSampler::new(cfg, scenario, spec.disk_radius(cfg))?;
    let cfg = *cfg;
    let weight = *weight;
    run_drops(&sampler, spec, move |i, links| {
        let mut fading = drop_rng(spec.seed, i, StreamPurpose::Fading);
        links
            .iter()
            .map(|l| draw_weight(&weight, &mut fading) * path_gain(&cfg, l))
            .fold(0.0, f64::max)
    })
}

/// Empirical `P[R* <= r]` at each grid point.
pub fn estimate_strongest_cdf(
    cfg: &NetworkConfig,
    scenario: &Scenario,
    weight: &WeightModel,
    grid: &[f64],
    spec: &McSpec,
) -> Result<Vec<McEstimate>> {
    let samples = sample_strongest(cfg, scenario, weight, spec)?;
    grid.iter()
        .map(|r| {
            let v: Vec<f64> = samples.iter().map(|x| f64::from(*x <= *r)).collect();
            summarize(&v, spec.ci_level, true)
        })
        .collect()
}

/// Outcome of a one-sample Kolmogorov-Smirnov test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

/// Kolmogorov-Smirnov test of `samples` against a continuous CDF, with the
/// asymptotic p-value (Stephens' small-sample correction).
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsOutcome> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::InvalidInput("KS test needs samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x);
        d = d.max(f - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - f);
    }
    let sn = (n as f64).sqrt();
    let lam = (sn + 0.12 + 0.11 / sn) * d;
    Ok(KsOutcome { statistic: d, p_value: kolmogorov_survival(lam) })
}

/// `P[K > x]` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-10);
    }

    #[test]
    fn kolmogorov_known_quantile() {
        // The 1% critical value of the Kolmogorov distribution is about 1.6276.
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 1e-4);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let cfg = NetworkConfig { lambda: 1e-5, ..NetworkConfig::default() };
        let scenario = Scenario::AngleIndependent(AngleDistribution::degenerate_deg(20.0));
        let spec = McSpec { drops: 500, target_count: 200.0, ..McSpec::default() };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| sample_sinr(&cfg, &scenario, &spec).unwrap());
        let b = three.install(|| sample_sinr(&cfg, &scenario, &spec).unwrap());
        assert_eq!(a, b);
    }
}
