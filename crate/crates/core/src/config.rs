//! TOML run configuration.
//!
//! Noise is given in dBm and the SINR threshold in dB, as in the usual system
//! tables; both are converted to linear scale once, at load. Every key is
//! optional and defaults to the reference system parameters.
//!
//! ```toml
//! lambda = 1e-7
//! power_mw = 50.0
//! noise_dbm = -92.5      # -inf for an interference-limited network
//! alpha = 2.75
//! ell = 0.25
//! c1 = 24.5811
//! c2 = 39.5971
//! n_antennas = 4         # or "inf"
//! beta_db = -10.0
//!
//! [scenario]
//! kind = "apil"          # or "apdl"
//! angle = { variant = "degenerate", theta_bar_deg = 20.0 }
//! # angle = { variant = "gamma_tan", theta_bar_deg = 20.0, shape = 4.0 }
//! # altitude = { variant = "degenerate", h_bar_m = 40.0 }
//! # altitude = { variant = "uniform", h_bar_m = 40.0, half_width_m = 5.0 }
//! # altitude = { variant = "exponential", rate = 0.025 }
//! # altitude = { variant = "proportional", h0 = 0.5 }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{
    db_to_linear, dbm_to_mw, AltitudeDistribution, AngleDistribution, Antennas, LosModel, NetworkConfig, Scenario,
};

/// Antenna count as written in a config file: an integer or `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AntennaField {
    Count(u32),
    Name(String),
}

impl AntennaField {
    fn resolve(&self) -> Result<Antennas> {
        match self {
            AntennaField::Count(n) => format!("{n}").parse(),
            AntennaField::Name(s) => s.parse(),
        }
    }

    fn from_antennas(a: Antennas) -> Self {
        match a {
            Antennas::Finite(n) => AntennaField::Count(n),
            Antennas::Massive => AntennaField::Name("inf".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum AngleField {
    Degenerate { theta_bar_deg: f64 },
    GammaTan { theta_bar_deg: f64, shape: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum AltitudeField {
    Degenerate { h_bar_m: f64 },
    Uniform { h_bar_m: f64, half_width_m: f64 },
    Exponential { rate: f64 },
    Proportional { h0: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioField {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<AngleField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub altitude: Option<AltitudeField>,
}

/// The on-disk schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub lambda: f64,
    pub power_mw: f64,
    pub noise_dbm: f64,
    pub alpha: f64,
    pub ell: f64,
    pub c1: f64,
    pub c2: f64,
    pub n_antennas: AntennaField,
    pub beta_db: f64,
    pub scenario: ScenarioField,
}

impl Default for ConfigFile {
    fn default() -> Self {
        let los = LosModel::default();
        ConfigFile {
            lambda: 1e-6,
            power_mw: 50.0,
            noise_dbm: -92.5,
            alpha: 2.75,
            ell: 0.25,
            c1: los.c1,
            c2: los.c2,
            n_antennas: AntennaField::Count(1),
            beta_db: -10.0,
            scenario: ScenarioField {
                kind: "apil".into(),
                angle: Some(AngleField::Degenerate { theta_bar_deg: 20.0 }),
                altitude: None,
            },
        }
    }
}

/// A resolved configuration in the units used by the engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub network: NetworkConfig,
    pub scenario: Scenario,
}

impl AngleField {
    fn resolve(&self) -> AngleDistribution {
        match *self {
            AngleField::Degenerate { theta_bar_deg } => AngleDistribution::degenerate_deg(theta_bar_deg),
            AngleField::GammaTan { theta_bar_deg, shape } => AngleDistribution::gamma_tan_deg(shape, theta_bar_deg),
        }
    }
}

impl AltitudeField {
    fn resolve(&self) -> AltitudeDistribution {
        match *self {
            AltitudeField::Degenerate { h_bar_m } => AltitudeDistribution::Degenerate { h: h_bar_m },
            AltitudeField::Uniform { h_bar_m, half_width_m } => AltitudeDistribution::uniform_around(h_bar_m, half_width_m),
            AltitudeField::Exponential { rate } => AltitudeDistribution::Exponential { rate },
            AltitudeField::Proportional { h0 } => AltitudeDistribution::ProportionalToProjection { h0 },
        }
    }
}

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Canonical TOML text: the same configuration always serializes identically.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let network = NetworkConfig {
            lambda: self.lambda,
            power_mw: self.power_mw,
            noise_mw: if self.noise_dbm == f64::NEG_INFINITY { 0.0 } else { dbm_to_mw(self.noise_dbm) },
            alpha: self.alpha,
            ell: self.ell,
            los: LosModel { c1: self.c1, c2: self.c2 },
            antennas: self.n_antennas.resolve()?,
            beta: db_to_linear(self.beta_db),
        };
        let sc = &self.scenario;
        let scenario = match (sc.kind.as_str(), &sc.angle, &sc.altitude) {
            ("apil", Some(angle), None) => Scenario::AngleIndependent(angle.resolve()),
            ("apdl", None, Some(altitude)) => Scenario::AltitudeIndependent(altitude.resolve()),
            ("apil", _, _) => return Err(Error::Config("an apil scenario needs exactly an angle law".into())),
            ("apdl", _, _) => return Err(Error::Config("an apdl scenario needs exactly an altitude law".into())),
            (other, _, _) => return Err(Error::Config(format!("unknown scenario kind {other:?}"))),
        };
        let as_config = |e: Error| Error::Config(e.to_string());
        network.validate().map_err(as_config)?;
        scenario.validate().map_err(as_config)?;
        Ok(RunConfig { network, scenario })
    }

    pub fn set_antennas(&mut self, antennas: Antennas) {
        self.n_antennas = AntennaField::from_antennas(antennas);
    }

    /// Replaces the mean elevation of an angle law.
    pub fn set_theta_bar_deg(&mut self, value: f64) -> Result<()> {
        match &mut self.scenario.angle {
            Some(AngleField::Degenerate { theta_bar_deg }) | Some(AngleField::GammaTan { theta_bar_deg, .. }) => {
                *theta_bar_deg = value;
                Ok(())
            }
            None => Err(Error::Config("theta_bar applies only to an apil scenario".into())),
        }
    }

    /// Replaces the mean altitude of a degenerate or uniform altitude law.
    pub fn set_h_bar_m(&mut self, value: f64) -> Result<()> {
        match &mut self.scenario.altitude {
            Some(AltitudeField::Degenerate { h_bar_m }) | Some(AltitudeField::Uniform { h_bar_m, .. }) => {
                *h_bar_m = value;
                Ok(())
            }
            _ => Err(Error::Config("h_bar applies only to a degenerate or uniform altitude law".into())),
        }
    }

    /// Parameter columns written on every output row.
    pub const PARAM_COLUMNS: [&'static str; 18] = [
        "lambda",
        "power_mw",
        "noise_dbm",
        "alpha",
        "ell",
        "c1",
        "c2",
        "n_antennas",
        "beta_db",
        "scenario",
        "angle_variant",
        "theta_bar_deg",
        "shape",
        "altitude_variant",
        "h_bar_m",
        "half_width_m",
        "rate",
        "h0",
    ];

    /// Values for [`ConfigFile::PARAM_COLUMNS`]; absent fields are empty.
    pub fn param_values(&self) -> Vec<String> {
        let n = |v: f64| format!("{v}");
        let mut row = vec![
            n(self.lambda),
            n(self.power_mw),
            n(self.noise_dbm),
            n(self.alpha),
            n(self.ell),
            n(self.c1),
            n(self.c2),
            match &self.n_antennas {
                AntennaField::Count(c) => format!("{c}"),
                AntennaField::Name(s) => s.clone(),
            },
            n(self.beta_db),
            self.scenario.kind.clone(),
        ];
        let mut angle = vec![String::new(); 3];
        match &self.scenario.angle {
            Some(AngleField::Degenerate { theta_bar_deg }) => {
                angle = vec!["degenerate".into(), n(*theta_bar_deg), String::new()];
            }
            Some(AngleField::GammaTan { theta_bar_deg, shape }) => {
                angle = vec!["gamma_tan".into(), n(*theta_bar_deg), n(*shape)];
            }
            None => {}
        }
        let mut alt = vec![String::new(); 5];
        match &self.scenario.altitude {
            Some(AltitudeField::Degenerate { h_bar_m }) => alt[..2].clone_from_slice(&["degenerate".into(), n(*h_bar_m)]),
            Some(AltitudeField::Uniform { h_bar_m, half_width_m }) => {
                alt[..3].clone_from_slice(&["uniform".into(), n(*h_bar_m), n(*half_width_m)])
            }
            Some(AltitudeField::Exponential { rate }) => {
                alt[0] = "exponential".into();
                alt[3] = n(*rate);
            }
            Some(AltitudeField::Proportional { h0 }) => {
                alt[0] = "proportional".into();
                alt[4] = n(*h0);
            }
            None => {}
        }
        row.extend(angle);
        row.extend(alt);
        row
    }
}
