use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_relative_eq;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use uav3d::analytic::{
    density_factor, excess_interference, laplace_t0_apdl, laplace_t0_apil, laplace_tk_apdl, laplace_tk_apil,
    laplace_tk_apil_normalized, laplace_tk_apil_normalized_closed, mean_measure_general, nearest_cdf_apdl,
    nearest_cdf_apil,
};
use uav3d::inversion::{invert_laplace, Analyticity, InversionSpec};
use uav3d::model::{db_to_linear, dbm_to_mw, AltitudeDistribution, AngleDistribution, LosModel, NetworkConfig, WeightModel};
use uav3d::quadrature::QuadratureSpec;

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

#[test]
fn los_probability_limits() {
    let los = LosModel::default();
    assert_relative_eq!(los.probability(0.0), 1.0 / (1.0 + 39.5971), max_relative = 1e-12);
    assert_relative_eq!(los.probability(0.0), 0.024632, epsilon = 1e-6);
    assert!((1.0 - los.probability(FRAC_PI_2)).abs() < 1e-15);
    let flat = LosModel { c1: 24.5811, c2: 1e-300 };
    assert_relative_eq!(flat.probability(0.3), 1.0, epsilon = 1e-15);
}

#[test]
fn unit_conversions() {
    assert_relative_eq!(dbm_to_mw(-92.5), 5.6234e-10, max_relative = 1e-4);
    assert_relative_eq!(db_to_linear(-10.0), 0.1, max_relative = 1e-14);
    assert_eq!(db_to_linear(0.0), 1.0);
}

#[test]
fn angle_expectations() {
    let gamma = AngleDistribution::gamma_tan_deg(4.0, 20.0);
    assert_relative_eq!(gamma.expect(|_| Ok(1.0), &quad()).unwrap(), 1.0, epsilon = 1e-10);
    let flat = AngleDistribution::Degenerate { theta: 0.0 };
    assert_relative_eq!(flat.expect(|t| Ok(t.cos().powi(2)), &quad()).unwrap(), 1.0, epsilon = 1e-15);

    let n = 1_000_000;
    let law = Gamma::<f64>::new(4.0, 20f64.to_radians().tan() / 4.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws: Vec<f64> = (0..n).map(|_| 1.0 / (1.0 + law.sample(&mut rng).powi(2))).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let sd = (draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let exact = gamma.expect(|t| Ok(t.cos().powi(2)), &quad()).unwrap();
    assert!((exact - mean).abs() < 3.0 * sd / (n as f64).sqrt(), "{exact} vs {mean}");
}

#[test]
fn density_factor_reductions() {
    let cfg = NetworkConfig::default();
    let no_nlos_loss = NetworkConfig { ell: 1.0, ..cfg };
    let gamma = AngleDistribution::gamma_tan_deg(4.0, 20.0);
    let cos2 = gamma.expect(|t| Ok(t.cos().powi(2)), &quad()).unwrap();
    assert_relative_eq!(density_factor(&no_nlos_loss, &gamma, &quad()).unwrap(), cos2, max_relative = 1e-9);
    let flat = AngleDistribution::Degenerate { theta: 0.0 };
    assert_relative_eq!(density_factor(&no_nlos_loss, &flat, &quad()).unwrap(), 1.0, max_relative = 1e-14);

    let theta = 20f64.to_radians();
    let shrink = 0.25f64.powf(2.0 / 2.75);
    let rho = 1.0 / (1.0 + 39.5971 * (-24.5811 * theta).exp());
    let expected = theta.cos().powi(2) * (rho * (1.0 - shrink) + shrink);
    assert_relative_eq!(density_factor(&cfg, &AngleDistribution::degenerate_deg(20.0), &quad()).unwrap(), expected, max_relative = 1e-12);
}

#[test]
fn mean_measure_reductions() {
    let h = 40.0;
    let altitude = AltitudeDistribution::Degenerate { h };
    let cfg = NetworkConfig { ell: 1.0, ..NetworkConfig::default() };
    let delta = cfg.delta();
    for r in [1e-3f64, 1e-4, 1e-5, 1e-6] {
        let expected = (r.powf(-delta) - h * h).max(0.0);
        let got = mean_measure_general(r, &cfg, &altitude, &WeightModel::Unit, &quad()).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-9, epsilon = 1e-9);
        let cdf = nearest_cdf_apdl(r, &cfg, &altitude, &WeightModel::Unit, &quad()).unwrap();
        assert_relative_eq!(cdf, (-PI * cfg.lambda * expected).exp(), max_relative = 1e-9);
    }

    // With NLoS links fully blocked, only LoS projections inside the radius count.
    let blocked = NetworkConfig { ell: 0.0, ..NetworkConfig::default() };
    let y: f64 = 3000.0;
    let r = y.powf(-0.5 * blocked.alpha);
    let oracle = simpson(|z| blocked.los.probability(h.atan2(z.sqrt())), 0.0, y - h * h, 20_000);
    let got = mean_measure_general(r, &blocked, &altitude, &WeightModel::Unit, &quad()).unwrap();
    assert_relative_eq!(got, oracle, max_relative = 1e-7);
}

#[test]
fn mean_measure_is_nonincreasing() {
    let cfg = NetworkConfig::default();
    let altitude = AltitudeDistribution::uniform_around(40.0, 5.0);
    let weight = WeightModel::Exponential { power: 1.0 };
    let values: Vec<f64> = (0..30)
        .map(|i| mean_measure_general(10f64.powf(-12.0 + 0.3 * i as f64), &cfg, &altitude, &weight, &quad()).unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
    assert!(*values.last().unwrap() < 1e-3 * values[0]);
}

#[test]
fn nearest_cdf_without_uavs() {
    let cfg = NetworkConfig { lambda: 1e-300, ..NetworkConfig::default() };
    let angle = AngleDistribution::degenerate_deg(20.0);
    let altitude = AltitudeDistribution::Degenerate { h: 40.0 };
    assert_relative_eq!(nearest_cdf_apil(1e-8, &cfg, &angle, &WeightModel::Unit, &quad()).unwrap(), 1.0);
    assert_relative_eq!(nearest_cdf_apdl(1e-8, &cfg, &altitude, &WeightModel::Unit, &quad()).unwrap(), 1.0);
}

#[test]
fn laplace_transforms_at_zero() {
    let cfg = NetworkConfig::default();
    let angle = AngleDistribution::degenerate_deg(20.0);
    let altitude = AltitudeDistribution::Degenerate { h: 40.0 };
    let w = WeightModel::Exponential { power: 1.0 };
    assert_eq!(laplace_t0_apil(0.0, &cfg, &angle, &w, &quad()).unwrap(), 1.0);
    assert_relative_eq!(laplace_t0_apdl(0.0, &cfg, &altitude, &w, &quad()).unwrap(), 1.0, epsilon = 1e-14);
    for k in 1..=3 {
        assert_relative_eq!(laplace_tk_apil(0.0, k, &cfg, &angle, &w, &quad()).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(laplace_tk_apdl(0.0, k, &cfg, &altitude, &w, &quad()).unwrap(), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn ground_level_altitude_matches_zero_angle() {
    let cfg = NetworkConfig::default();
    let w = WeightModel::Exponential { power: 1.0 };
    let angle = AngleDistribution::Degenerate { theta: 0.0 };
    let altitude = AltitudeDistribution::Degenerate { h: 0.0 };
    for s in [1e6, 1e7, 1e8] {
        let a = laplace_t0_apil(s, &cfg, &angle, &w, &quad()).unwrap();
        let b = laplace_t0_apdl(s, &cfg, &altitude, &w, &quad()).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-7);
    }
}

#[test]
fn excess_interference_vanishes_at_zero() {
    let v = 2.0 / 2.75;
    for w in [WeightModel::Unit, WeightModel::Exponential { power: 1.0 }] {
        assert!(excess_interference(1e-12, v, &w, &quad()).unwrap().abs() < 1e-9);
    }
}

#[test]
fn rayleigh_excess_interference_oracle() {
    // For W ~ Exp(1): integral_1^inf u z^(-1/v) / (1 + u z^(-1/v)) dz.
    let v = 2.0 / 2.75;
    let w = WeightModel::Exponential { power: 1.0 };
    for u in [0.1, 1.0, 10.0] {
        let head = simpson(|x| u * x.powf(-1.0 / v) / (1.0 + u * x.powf(-1.0 / v)), 1.0, 1e4, 400_000);
        let tail = u * 1e4f64.powf(1.0 - 1.0 / v) / (1.0 / v - 1.0);
        let got = excess_interference(u, v, &w, &quad()).unwrap();
        assert_relative_eq!(got, head + tail, max_relative = 1e-4);
    }
}

#[test]
fn normalized_transform_matches_closed_form() {
    let cfg = NetworkConfig::default();
    let w = WeightModel::Exponential { power: 1.0 };
    let theta = 20f64.to_radians();
    for k in [1, 2, 4] {
        for zeta in [0.1, 1.0, 10.0] {
            let a = laplace_tk_apil_normalized(zeta, k, &cfg, theta, &w, &quad()).unwrap();
            let b = laplace_tk_apil_normalized_closed(zeta, k, &cfg, theta, &w, &quad()).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-7);
        }
    }
}

#[test]
fn removing_points_raises_the_transform() {
    let cfg = NetworkConfig::default();
    let w = WeightModel::Exponential { power: 1.0 };
    let angle = AngleDistribution::degenerate_deg(20.0);
    let altitude = AltitudeDistribution::Degenerate { h: 40.0 };
    for i in 0..8 {
        let s = 10f64.powf(5.0 + 0.5 * i as f64);
        let mut prev_a = laplace_t0_apil(s, &cfg, &angle, &w, &quad()).unwrap();
        let mut prev_h = laplace_t0_apdl(s, &cfg, &altitude, &w, &quad()).unwrap();
        for k in 1..=3 {
            let a = laplace_tk_apil(s, k, &cfg, &angle, &w, &quad()).unwrap();
            let h = laplace_tk_apdl(s, k, &cfg, &altitude, &w, &quad()).unwrap();
            assert!(a >= prev_a - 1e-10 && h >= prev_h - 1e-10, "s={s} k={k}");
            prev_a = a;
            prev_h = h;
        }
    }
}

#[test]
fn inversion_known_pair() {
    let v = invert_laplace(|s: Complex64| Ok(1.0 / (s + 1.0)), 2.0, Analyticity::CutPlane, &InversionSpec::default()).unwrap();
    assert_relative_eq!(v, (-2.0f64).exp(), max_relative = 1e-9);
    assert_relative_eq!(v, 0.135335, epsilon = 1e-6);
}

#[test]
fn gamma_gain_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let law = Gamma::<f64>::new(4.0, 1.0).unwrap();
    let n = 400_000;
    let a: f64 = 2.0 / 2.75;
    let draws: Vec<f64> = (0..n).map(|_| law.sample(&mut rng).powf(a)).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let sd = (draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    let w = WeightModel::Gamma { power: 1.0, antennas: uav3d::model::Antennas::Finite(4) };
    assert!((w.moment(a) - mean).abs() < 3.0 * sd / (n as f64).sqrt());
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}
