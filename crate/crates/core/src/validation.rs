//! Monte Carlo against analytic cross-checks at the reference parameters.
//!
//! Each check compares one analytic quantity with its simulated estimate and
//! reports the discrepancy next to its allowance: a fixed absolute band, a
//! multiple of the standard error, or a KS p-value floor.

use std::f64::consts::PI;

use crate::analytic::{
    excess_interference_rayleigh, laplace_t0_apdl, laplace_t0_apil, laplace_tk_apdl, laplace_tk_apil, nearest_cdf_apdl,
};
use crate::coverage::{p_cf, p_cov, CoverageOptions};
use crate::error::Result;
use crate::model::{db_to_linear, AltitudeDistribution, AngleDistribution, Antennas, NetworkConfig, Scenario, WeightModel};
use crate::montecarlo::{
    estimate_p_cf, estimate_p_cov_sweep, estimate_shot_laplace, ks_test, sample_strongest, McEstimate, McSpec,
};
use crate::selftest::Check;
use num_complex::Complex64;

fn band(name: &str, analytic: f64, mc: &McEstimate, width: f64) -> Check {
    Check::new(name, (analytic - mc.mean).abs(), width, format!("analytic={analytic:.6} mc={:.6}", mc.mean))
}

fn ci(name: &str, analytic: f64, mc: &McEstimate) -> Check {
    let half = 0.5 * (mc.ci_high - mc.ci_low);
    Check::new(name, (analytic - mc.mean).abs(), half, format!("analytic={analytic:.6} mc={:.6} (99% CI)", mc.mean))
}

fn sigmas(name: &str, analytic: f64, mc: &McEstimate, k: f64) -> Check {
    Check::new(
        name,
        (analytic - mc.mean).abs(),
        k * mc.std_error,
        format!("analytic={analytic:.6} mc={:.6} se={:.2e}", mc.mean, mc.std_error),
    )
}

fn guard(name: &str, f: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    f().unwrap_or_else(|e| vec![Check::failed(name, e.to_string())])
}

/// Runs every cross-check with `drops` drops per Monte Carlo estimate.
pub fn run(drops: usize, seed: u64, opts: &CoverageOptions) -> Vec<Check> {
    let mc = McSpec::default().with_drops(drops).with_seed(seed);
    let quad = opts.quad;
    let table = NetworkConfig::default();
    let angle20 = Scenario::AngleIndependent(AngleDistribution::degenerate_deg(20.0));
    let alt40 = AltitudeDistribution::Degenerate { h: 40.0 };
    let mut out = Vec::new();

    out.extend(guard("coverage", || {
        let mut v = Vec::new();
        let apil = NetworkConfig { lambda: 1e-7, antennas: Antennas::Finite(4), ..table };
        let m = estimate_p_cov_sweep(&apil, &angle20, &[apil.beta], &mc)?;
        v.push(band("coverage apil N=4 theta=20deg", p_cov(&apil, &angle20, opts)?.value, &m[0], 0.01));
        let apdl = NetworkConfig { lambda: 1e-5, antennas: Antennas::Finite(4), ..table };
        let sc = Scenario::AltitudeIndependent(alt40);
        let m = estimate_p_cov_sweep(&apdl, &sc, &[apdl.beta], &mc)?;
        v.push(band("coverage apdl N=4 h=40m", p_cov(&apdl, &sc, opts)?.value, &m[0], 0.01));
        Ok(v)
    }));

    out.extend(guard("interference limited", || {
        let cfg = NetworkConfig { noise_mw: 0.0, ..table };
        let betas: Vec<f64> = [-10.0, 0.0, 10.0].iter().map(|b| db_to_linear(*b)).collect();
        let m = estimate_p_cov_sweep(&cfg, &angle20, &betas, &mc)?;
        let mut v = Vec::new();
        for (b, e) in betas.iter().zip(&m) {
            let closed = 1.0 / (1.0 + excess_interference_rayleigh(Complex64::new(*b, 0.0), cfg.delta(), &quad)?.re);
            v.push(ci(&format!("interference limited beta={:.0}dB", 10.0 * b.log10()), closed, e));
        }
        Ok(v)
    }));

    out.extend(guard("cell free", || {
        let cfg = NetworkConfig { alpha: 4.0, antennas: Antennas::Finite(4), ..table }.with_beta_db(40.0);
        let sc = Scenario::AngleIndependent(AngleDistribution::degenerate_deg(5.0));
        let a = p_cf(&cfg, &sc, opts)?.value;
        let mut v = vec![ci("cell free apil alpha=4 N=4", a, &estimate_p_cf(&cfg, &sc, &mc)?)];
        let cfg = table.with_beta_db(40.0);
        let sc = Scenario::AltitudeIndependent(alt40);
        v.push(band("cell free apdl N=1 h=40m", p_cf(&cfg, &sc, opts)?.value, &estimate_p_cf(&cfg, &sc, &mc)?, 0.01));
        Ok(v)
    }));

    out.extend(guard("shot noise", || {
        let weight = WeightModel::Exponential { power: 1.0 };
        let mut v = Vec::new();
        let apil = AngleDistribution::degenerate_deg(20.0);
        let scenario = Scenario::AngleIndependent(apil);
        let s_values = [1e6, 1e7, 1e8];
        for k in [0u32, 1] {
            let est = estimate_shot_laplace(&table, &scenario, &weight, &s_values, k as usize, &mc)?;
            for (s, e) in s_values.iter().zip(&est) {
                let a = if k == 0 {
                    laplace_t0_apil(*s, &table, &apil, &weight, &quad)?
                } else {
                    laplace_tk_apil(*s, k, &table, &apil, &weight, &quad)?
                };
                v.push(sigmas(&format!("laplace T{k} apil s={s:.0e}"), a, e, 3.0));
            }
        }
        let scenario = Scenario::AltitudeIndependent(alt40);
        for k in [0u32, 1] {
            let est = estimate_shot_laplace(&table, &scenario, &weight, &s_values, k as usize, &mc)?;
            for (s, e) in s_values.iter().zip(&est) {
                let a = if k == 0 {
                    laplace_t0_apdl(*s, &table, &alt40, &weight, &quad)?
                } else {
                    laplace_tk_apdl(*s, k, &table, &alt40, &weight, &quad)?
                };
                v.push(sigmas(&format!("laplace T{k} apdl s={s:.0e}"), a, e, 3.0));
            }
        }
        Ok(v)
    }));

    out.extend(guard("strongest signal", || {
        let ks_spec = McSpec { drops: drops.min(10_000), ..mc };
        let mut v = Vec::new();
        let cfg = NetworkConfig { ell: 1.0, ..table };
        let angle = AngleDistribution::degenerate_deg(20.0);
        let samples = sample_strongest(&cfg, &Scenario::AngleIndependent(angle), &WeightModel::Unit, &ks_spec)?;
        let rate = PI * cfg.lambda * 20f64.to_radians().cos().powi(2);
        let x: Vec<f64> = samples.iter().map(|r| r.powf(-cfg.delta())).collect();
        let ks = ks_test(&x, |y| 1.0 - (-rate * y).exp())?;
        v.push(Check::at_least("KS nearest distance apil", ks.p_value, 0.01, "p-value"));
        for ell in [0.0, 0.25] {
            let cfg = NetworkConfig { ell, ..table };
            let sc = Scenario::AltitudeIndependent(alt40);
            let samples = sample_strongest(&cfg, &sc, &WeightModel::Unit, &ks_spec)?;
            let ks = ks_test(&samples, |r| {
                nearest_cdf_apdl(r, &cfg, &alt40, &WeightModel::Unit, &quad).unwrap_or(f64::NAN)
            })?;
            v.push(Check::at_least(format!("KS strongest signal apdl ell={ell}"), ks.p_value, 0.01, "p-value"));
        }
        Ok(v)
    }));
    out
}
