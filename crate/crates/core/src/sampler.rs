//! Reproducible sampling of the marked point process inside a disk.
//!
//! Every drop owns a ChaCha8 key derived from `(seed, drop index)`; geometry,
//! marks, fading and azimuths read from separate streams of that key, so a
//! drop's realization does not depend on thread scheduling or on which
//! quantities are estimated from it.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Poisson};

use crate::error::{Error, Result};
use crate::model::{AltitudeDistribution, AngleDistribution, NetworkConfig, NetworkDrop, Scenario, UavRealization};

/// Independent random streams within one drop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamPurpose {
    Geometry = 0,
    Marks = 1,
    Fading = 2,
    Azimuth = 3,
}

/// The generator for one `(seed, drop, purpose)` triple.
pub fn drop_rng(seed: u64, drop: u64, purpose: StreamPurpose) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&drop.to_le_bytes());
    key[16..24].copy_from_slice(b"uav3d-v1");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(purpose as u64);
    rng
}

/// Disk radius holding `target_count` UAV projections on average.
pub fn radius_for_count(lambda: f64, target_count: f64) -> f64 {
    (target_count / (PI * lambda)).sqrt()
}

/// One UAV reduced to what the estimators need.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkSample {
    /// Squared projected distance.
    pub z: f64,
    /// Squared 3D distance.
    pub d2: f64,
    pub theta: f64,
    pub los: bool,
}

/// Draws the elevation marks of a UAV whose projection has squared norm `z`.
#[derive(Clone, Debug)]
enum MarkSampler {
    FixedAngle(f64),
    GammaTan(Gamma<f64>),
    FixedAltitude(f64),
    UniformAltitude(f64, f64),
    ExponentialAltitude(Exp<f64>),
    Proportional(f64),
}

impl MarkSampler {
    fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        Ok(match *scenario {
            Scenario::AngleIndependent(AngleDistribution::Degenerate { theta }) => MarkSampler::FixedAngle(theta),
            Scenario::AngleIndependent(AngleDistribution::GammaTan { shape, theta_bar }) => {
                let mean = theta_bar.tan();
                if mean <= 0.0 {
                    MarkSampler::FixedAngle(0.0)
                } else {
                    MarkSampler::GammaTan(
                        Gamma::new(shape, mean / shape).map_err(|e| Error::InvalidInput(format!("angle law: {e}")))?,
                    )
                }
            }
            Scenario::AltitudeIndependent(AltitudeDistribution::Degenerate { h }) => MarkSampler::FixedAltitude(h),
            Scenario::AltitudeIndependent(AltitudeDistribution::Uniform { lo, hi }) => MarkSampler::UniformAltitude(lo, hi),
            Scenario::AltitudeIndependent(AltitudeDistribution::Exponential { rate }) => MarkSampler::ExponentialAltitude(
                Exp::new(rate).map_err(|e| Error::InvalidInput(format!("altitude law: {e}")))?,
            ),
            Scenario::AltitudeIndependent(AltitudeDistribution::ProportionalToProjection { h0 }) => MarkSampler::Proportional(h0),
        })
    }

    /// Returns `(altitude, elevation)`.
    fn draw<R: Rng>(&self, z: f64, rng: &mut R) -> (f64, f64) {
        let r = z.sqrt();
        match self {
            MarkSampler::FixedAngle(theta) => (r * theta.tan(), *theta),
            MarkSampler::GammaTan(g) => {
                let t = g.sample(rng);
                (r * t, t.atan().min(FRAC_PI_2))
            }
            MarkSampler::FixedAltitude(h) => (*h, h.atan2(r)),
            MarkSampler::UniformAltitude(lo, hi) => {
                let h = lo + (hi - lo) * rng.random::<f64>();
                (h, h.atan2(r))
            }
            MarkSampler::ExponentialAltitude(e) => {
                let h = e.sample(rng);
                (h, h.atan2(r))
            }
            MarkSampler::Proportional(h0) => (h0 * r, h0.atan()),
        }
    }
}

/// Samples drops of one scenario in a disk of fixed radius.
#[derive(Clone, Debug)]
pub struct DropSampler {
    cfg: NetworkConfig,
    marks: MarkSampler,
    radius: f64,
    count: Option<Poisson<f64>>,
}

impl DropSampler {
    pub fn new(cfg: &NetworkConfig, scenario: &Scenario, radius: f64) -> Result<Self> {
        cfg.validate()?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("disk radius must be positive, got {radius}")));
        }
        let mean = cfg.lambda * PI * radius * radius;
        let count = if mean > 0.0 {
            Some(Poisson::new(mean).map_err(|e| Error::InvalidInput(format!("UAV count: {e}")))?)
        } else {
            None
        };
        Ok(DropSampler { cfg: *cfg, marks: MarkSampler::new(scenario)?, radius, count })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Fills `out` with the links of drop `drop`, in the order generated.
    pub fn links_into(&self, seed: u64, drop: u64, out: &mut Vec<LinkSample>) {
        out.clear();
        let mut geo = drop_rng(seed, drop, StreamPurpose::Geometry);
        let mut marks = drop_rng(seed, drop, StreamPurpose::Marks);
        let n = match &self.count {
            Some(p) => p.sample(&mut geo) as usize,
            None => 0,
        };
        let r2 = self.radius * self.radius;
        for _ in 0..n {
            let z = r2 * geo.random::<f64>();
            let (h, theta) = self.marks.draw(z, &mut marks);
            let los = marks.random::<f64>() < self.cfg.los.probability(theta);
            out.push(LinkSample { z, d2: z + h * h, theta, los });
        }
    }

    /// Full realization of drop `drop`, including azimuths.
    pub fn sample(&self, seed: u64, drop: u64) -> NetworkDrop {
        let mut links = Vec::new();
        self.links_into(seed, drop, &mut links);
        let mut az = drop_rng(seed, drop, StreamPurpose::Azimuth);
        let uavs = links
            .iter()
            .map(|l| {
                let phi = 2.0 * PI * az.random::<f64>();
                let r = l.z.sqrt();
                UavRealization { x: r * phi.cos(), y: r * phi.sin(), h: (l.d2 - l.z).max(0.0).sqrt(), theta: l.theta, los: l.los }
            })
            .collect();
        NetworkDrop { radius: self.radius, uavs }
    }
}

/// One drop of the UAV process within a disk of radius `radius`.
pub fn sample_network(cfg: &NetworkConfig, scenario: &Scenario, radius: f64, seed: u64, drop: u64) -> Result<NetworkDrop> {
    Ok(DropSampler::new(cfg, scenario, radius)?.sample(seed, drop))
}

/// Weighted distances `L_i^(-1/alpha) |U_i|` of a drop with their UAV
/// indices, nearest first. An empty drop gives an empty list.
pub fn effective_distances(drop: &NetworkDrop, alpha: f64, ell: f64) -> Vec<(f64, usize)> {
    let nlos = ell.powf(-1.0 / alpha);
    let mut out: Vec<(f64, usize)> = drop
        .uavs
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let d = u.distance_sq().sqrt();
            (if u.los { d } else { nlos * d }, i)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    out
}
