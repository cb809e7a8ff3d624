//! Network parameters and the random marks attached to each UAV: elevation
//! angle or altitude, line-of-sight state and serving weight.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{expect_gamma, integrate, integrate_to_infinity, QuadValue, QuadratureSpec, Tail};

/// Converts a power in dBm to milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Converts a ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Number of antennas at the ground user; `Massive` selects the N -> inf limit,
/// where the normalized beamforming gain concentrates at one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Antennas {
    Finite(u32),
    Massive,
}

impl Antennas {
    pub fn finite(self) -> Option<u32> {
        match self {
            Antennas::Finite(n) => Some(n),
            Antennas::Massive => None,
        }
    }
}

impl fmt::Display for Antennas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Antennas::Finite(n) => write!(f, "{n}"),
            Antennas::Massive => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Antennas {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Antennas::Massive);
        }
        match t.parse::<u32>() {
            Ok(n) if n >= 1 => Ok(Antennas::Finite(n)),
            _ => Err(Error::Config(format!("antenna count must be a positive integer or \"inf\", got {s:?}"))),
        }
    }
}

/// Sigmoid line-of-sight probability as a function of the elevation angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LosModel {
    pub c1: f64,
    pub c2: f64,
}

impl Default for LosModel {
    fn default() -> Self {
        LosModel { c1: 24.5811, c2: 39.5971 }
    }
}

impl LosModel {
    /// Probability that a link at elevation `theta` (radians) is line of sight.
    pub fn probability(&self, theta: f64) -> f64 {
        1.0 / (1.0 + self.c2 * (-self.c1 * theta).exp())
    }
}

/// Deterministic system parameters shared by every scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkConfig {
    /// Density of UAV projections on the ground plane, per m^2.
    pub lambda: f64,
    pub power_mw: f64,
    pub noise_mw: f64,
    pub alpha: f64,
    /// Extra attenuation of non-line-of-sight links, in [0, 1].
    pub ell: f64,
    pub los: LosModel,
    pub antennas: Antennas,
    /// SINR threshold, linear scale.
    pub beta: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            lambda: 1e-6,
            power_mw: 50.0,
            noise_mw: dbm_to_mw(-92.5),
            alpha: 2.75,
            ell: 0.25,
            los: LosModel::default(),
            antennas: Antennas::Finite(1),
            beta: db_to_linear(-10.0),
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.power_mw > 0.0 && self.power_mw.is_finite()) {
            return bad(format!("transmit power must be positive, got {}", self.power_mw));
        }
        if !(self.noise_mw >= 0.0 && self.noise_mw.is_finite()) {
            return bad(format!("noise power must be non-negative, got {}", self.noise_mw));
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return bad(format!("path-loss exponent must exceed 2, got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.ell) {
            return bad(format!("NLoS attenuation must lie in [0, 1], got {}", self.ell));
        }
        if !(self.los.c1 > 0.0 && self.los.c2 > 0.0) {
            return bad(format!("LoS constants must be positive, got ({}, {})", self.los.c1, self.los.c2));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("SINR threshold must be positive, got {}", self.beta));
        }
        if let Antennas::Finite(0) = self.antennas {
            return bad("antenna count must be at least one".into());
        }
        Ok(())
    }

    /// `2 / alpha`, the exponent that appears throughout the distance laws.
    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    /// `ell^(2/alpha)`: how much an NLoS link shrinks the effective squared distance.
    pub fn nlos_shrink(&self) -> f64 {
        self.ell.powf(self.delta())
    }

    pub fn with_beta_db(mut self, beta_db: f64) -> Self {
        self.beta = db_to_linear(beta_db);
        self
    }

    pub fn with_antennas(mut self, antennas: Antennas) -> Self {
        self.antennas = antennas;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }
}

/// Law of the elevation angle when it is independent of the projected distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngleDistribution {
    /// Every UAV at the same angle (radians).
    Degenerate { theta: f64 },
    /// `tan(Theta) ~ Gamma(shape, tan(theta_bar) / shape)`, so `E[tan Theta] = tan(theta_bar)`.
    GammaTan { shape: f64, theta_bar: f64 },
}

impl AngleDistribution {
    pub fn degenerate_deg(theta_deg: f64) -> Self {
        AngleDistribution::Degenerate { theta: theta_deg.to_radians() }
    }

    pub fn gamma_tan_deg(shape: f64, theta_bar_deg: f64) -> Self {
        AngleDistribution::GammaTan { shape, theta_bar: theta_bar_deg.to_radians() }
    }

    pub fn validate(&self) -> Result<()> {
        let in_range = |t: f64| (0.0..FRAC_PI_2).contains(&t);
        match *self {
            AngleDistribution::Degenerate { theta } if in_range(theta) => Ok(()),
            AngleDistribution::GammaTan { shape, theta_bar } if in_range(theta_bar) && shape > 0.0 => Ok(()),
            other => Err(Error::InvalidInput(format!("angle law out of range: {other:?}"))),
        }
    }

    /// `E[f(Theta)]`.
    pub fn expect<F>(&self, mut f: F, quad: &QuadratureSpec) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        match *self {
            AngleDistribution::Degenerate { theta } => f(theta),
            AngleDistribution::GammaTan { shape, theta_bar } => {
                let mean = theta_bar.tan();
                if mean <= 0.0 {
                    return f(0.0);
                }
                expect_gamma(|u| f(u.atan()), shape, shape / mean, quad)
            }
        }
    }
}

/// How the altitude of a UAV is drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AltitudeDistribution {
    Degenerate { h: f64 },
    Uniform { lo: f64, hi: f64 },
    Exponential { rate: f64 },
    /// Altitude proportional to the projected distance, `H = h0 * |X|`,
    /// so every UAV is seen at the same elevation `atan(h0)`.
    ProportionalToProjection { h0: f64 },
}

/// Altitude or elevation of one UAV, enough to fix its 3D geometry once the
/// squared projected distance is known.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Elevation {
    Altitude(f64),
    Angle(f64),
}

impl Elevation {
    /// Squared 3D distance and elevation angle for squared projected distance `z`.
    pub fn geometry(&self, z: f64) -> (f64, f64) {
        match *self {
            Elevation::Altitude(h) => (z + h * h, h.atan2(z.sqrt())),
            Elevation::Angle(theta) => {
                let c = theta.cos();
                (z / (c * c), theta)
            }
        }
    }
}

impl AltitudeDistribution {
    pub fn uniform_around(h_bar: f64, half_width: f64) -> Self {
        AltitudeDistribution::Uniform { lo: h_bar - half_width, hi: h_bar + half_width }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            AltitudeDistribution::Degenerate { h } => h >= 0.0 && h.is_finite(),
            AltitudeDistribution::Uniform { lo, hi } => lo >= 0.0 && hi > lo && hi.is_finite(),
            AltitudeDistribution::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            AltitudeDistribution::ProportionalToProjection { h0 } => h0 >= 0.0 && h0.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("altitude law out of range: {self:?}")))
        }
    }

    /// `E[f(elevation)]` over the altitude law.
    pub fn expect<V, F>(&self, mut f: F, quad: &QuadratureSpec) -> Result<V>
    where
        V: QuadValue,
        F: FnMut(Elevation) -> Result<V>,
    {
        match *self {
            AltitudeDistribution::Degenerate { h } => f(Elevation::Altitude(h)),
            AltitudeDistribution::ProportionalToProjection { h0 } => f(Elevation::Angle(h0.atan())),
            AltitudeDistribution::Uniform { lo, hi } => {
                let v = integrate(|h| f(Elevation::Altitude(h)), lo, hi, &[], quad)?.value;
                Ok(v * (1.0 / (hi - lo)))
            }
            AltitudeDistribution::Exponential { rate } => {
                let scale = 1.0 / rate;
                let v = integrate_to_infinity(
                    |h| Ok(f(Elevation::Altitude(h))? * (rate * (-rate * h).exp())),
                    0.0,
                    &[scale, 5.0 * scale],
                    Tail::Exponential { scale },
                    quad,
                )?
                .value;
                Ok(v)
            }
        }
    }

    /// Smallest squared projected distance at which some altitudes are still
    /// in the support, used only to place quadrature breakpoints.
    pub fn altitude_scale(&self) -> f64 {
        match *self {
            AltitudeDistribution::Degenerate { h } => h,
            AltitudeDistribution::Uniform { lo, hi } => 0.5 * (lo + hi),
            AltitudeDistribution::Exponential { rate } => 1.0 / rate,
            AltitudeDistribution::ProportionalToProjection { .. } => 0.0,
        }
    }
}

/// The two geometric models for how UAVs are placed above their projections.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scenario {
    /// Elevation angle independent of the projected distance.
    AngleIndependent(AngleDistribution),
    /// Altitude drawn independently of the projected distance.
    AltitudeIndependent(AltitudeDistribution),
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        match self {
            Scenario::AngleIndependent(a) => a.validate(),
            Scenario::AltitudeIndependent(h) => h.validate(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::AngleIndependent(_) => "apil",
            Scenario::AltitudeIndependent(_) => "apdl",
        }
    }
}

/// Law of the per-link weight `W` multiplying the path gain, used by the
/// shot-noise and nearest-distance results.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightModel {
    /// `W = 1`.
    Unit,
    /// `W = P * G` with `G ~ Exp(1)` (single-antenna Rayleigh fading).
    Exponential { power: f64 },
    /// `W = P * G` with `G ~ Gamma(N, 1)`; the massive limit takes `G = 1`.
    Gamma { power: f64, antennas: Antennas },
}

impl WeightModel {
    /// `E[W^a]` for `a > -shape`.
    pub fn moment(&self, a: f64) -> f64 {
        use statrs::function::gamma::ln_gamma;
        match *self {
            WeightModel::Unit => 1.0,
            WeightModel::Exponential { power } => power.powf(a) * (ln_gamma(1.0 + a)).exp(),
            WeightModel::Gamma { power, antennas: Antennas::Finite(n) } => {
                let n = n as f64;
                power.powf(a) * (ln_gamma(n + a) - ln_gamma(n)).exp()
            }
            WeightModel::Gamma { power, antennas: Antennas::Massive } => power.powf(a),
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1.0)
    }

    /// If the weight is deterministic, its value.
    pub fn deterministic_value(&self) -> Option<f64> {
        match *self {
            WeightModel::Unit => Some(1.0),
            WeightModel::Gamma { power, antennas: Antennas::Massive } => Some(power),
            _ => None,
        }
    }

    /// Laplace transform `E[exp(-x W)]` for `Re x >= 0`.
    pub fn laplace(&self, x: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            WeightModel::Unit => (-x).exp(),
            WeightModel::Exponential { power } => one / (one + x * power),
            WeightModel::Gamma { power, antennas: Antennas::Finite(n) } => (one + x * power).powi(-(n as i32)),
            WeightModel::Gamma { power, antennas: Antennas::Massive } => (-x * power).exp(),
        }
    }

    /// `1 - E[exp(-x W)]`, accurate for small `|x|`.
    pub fn one_minus_laplace(&self, x: Complex64) -> Complex64 {
        match *self {
            WeightModel::Unit => one_minus_exp(x),
            WeightModel::Exponential { power } => one_minus_inverse_power(x * power, 1),
            WeightModel::Gamma { power, antennas: Antennas::Finite(n) } => one_minus_inverse_power(x * power, n),
            WeightModel::Gamma { power, antennas: Antennas::Massive } => one_minus_exp(x * power),
        }
    }

    /// `P[W > w]`.
    pub fn ccdf(&self, w: f64) -> f64 {
        match *self {
            WeightModel::Unit => f64::from(w < 1.0),
            WeightModel::Exponential { power } => {
                if w <= 0.0 {
                    1.0
                } else {
                    (-w / power).exp()
                }
            }
            WeightModel::Gamma { power, antennas: Antennas::Finite(n) } => {
                if w <= 0.0 {
                    1.0
                } else {
                    gamma_ccdf_integer(n, w / power)
                }
            }
            WeightModel::Gamma { power, antennas: Antennas::Massive } => f64::from(w < power),
        }
    }
}

/// `P[Gamma(n, 1) > x]` for integer shape, as a finite Poisson sum.
pub fn gamma_ccdf_integer(n: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..n {
        term *= x / k as f64;
        sum += term;
    }
    (sum.ln() - x).exp().min(1.0)
}

/// `1 - exp(-x)` with a series near zero.
pub fn one_minus_exp(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        // x - x^2/2 + x^3/6 - x^4/24 + x^5/120
        let mut term = x;
        let mut sum = x;
        for k in 2..=6 {
            term = -term * x / k as f64;
            sum += term;
        }
        sum
    } else {
        Complex64::new(1.0, 0.0) - (-x).exp()
    }
}

/// `1 - (1 + x)^-n` with a series near zero.
pub fn one_minus_inverse_power(x: Complex64, n: u32) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if x.norm() * (n as f64 + 1.0) < 1e-3 {
        // sum_{k>=1} (-1)^{k+1} C(n+k-1, k) x^k
        let mut term = one;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..=6u32 {
            term = -term * x * ((n + k - 1) as f64) / k as f64;
            sum -= term;
        }
        sum
    } else {
        one - (one + x).powi(-(n as i32))
    }
}

/// One realized UAV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UavRealization {
    /// Ground projection (m).
    pub x: f64,
    pub y: f64,
    /// Altitude (m).
    pub h: f64,
    /// Elevation angle seen from the origin (radians).
    pub theta: f64,
    pub los: bool,
}

impl UavRealization {
    pub fn projected_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn distance_sq(&self) -> f64 {
        self.projected_sq() + self.h * self.h
    }
}

/// One drop of the point process within a disk of the given radius.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkDrop {
    pub radius: f64,
    pub uavs: Vec<UavRealization>,
}
