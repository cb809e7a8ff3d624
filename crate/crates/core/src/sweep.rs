//! Parameter sweeps, figure presets and their CSV output.
//!
//! A sweep is the Cartesian product of one or more axes applied to a base
//! configuration. Each point is evaluated analytically and/or by Monte Carlo.
//! Points that differ only in the SINR threshold share one Monte Carlo run, so
//! threshold curves use common random numbers.
//!
//! CSV layout: a comment line `# config_hash=<sha256> seed=<n> ...`, a header,
//! then one row per point in grid order. Columns are the axes, the result
//! columns, then every remaining configuration parameter, so each row is
//! self-describing. Monte Carlo columns are empty when not requested.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::ConfigFile;
use crate::coverage::{p_cf, p_cov, p_cov_lower_bound, CoverageOptions};
use crate::error::{Error, Result};
use crate::model::{db_to_linear, Antennas};
use crate::montecarlo::{estimate_p_cf_sweep, estimate_p_cov_sweep, McEstimate, McSpec};

/// A swept parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    ThetaBar,
    HBar,
    Lambda,
    BetaDb,
    NAntennas,
}

impl Axis {
    /// Column name, identical to the parameter column it replaces.
    pub fn column(self) -> &'static str {
        match self {
            Axis::ThetaBar => "theta_bar_deg",
            Axis::HBar => "h_bar_m",
            Axis::Lambda => "lambda",
            Axis::BetaDb => "beta_db",
            Axis::NAntennas => "n_antennas",
        }
    }

    fn apply(self, cfg: &mut ConfigFile, value: &GridValue) -> Result<()> {
        match (self, value) {
            (Axis::ThetaBar, GridValue::Real(v)) => cfg.set_theta_bar_deg(*v),
            (Axis::HBar, GridValue::Real(v)) => cfg.set_h_bar_m(*v),
            (Axis::Lambda, GridValue::Real(v)) => {
                cfg.lambda = *v;
                Ok(())
            }
            (Axis::BetaDb, GridValue::Real(v)) => {
                cfg.beta_db = *v;
                Ok(())
            }
            (Axis::NAntennas, GridValue::Antennas(a)) => {
                cfg.set_antennas(*a);
                Ok(())
            }
            (axis, v) => Err(Error::Config(format!("value {v} does not fit axis {}", axis.column()))),
        }
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "theta_bar" | "theta_bar_deg" => Axis::ThetaBar,
            "h_bar" | "h_bar_m" => Axis::HBar,
            "lambda" => Axis::Lambda,
            "beta_db" => Axis::BetaDb,
            "n_antennas" => Axis::NAntennas,
            _ => return Err(Error::Config(format!("unknown sweep axis {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridValue {
    Real(f64),
    Antennas(Antennas),
}

impl fmt::Display for GridValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridValue::Real(v) => write!(f, "{v}"),
            GridValue::Antennas(a) => write!(f, "{a}"),
        }
    }
}

/// Rounds grid arithmetic noise away so printed values stay readable.
fn tidy(v: f64) -> f64 {
    format!("{v:.12e}").parse().unwrap_or(v)
}

/// `count` points from `lo` to `hi`, evenly spaced or geometrically spaced.
pub fn linspace(lo: f64, hi: f64, count: usize, log: bool) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| {
            let f = i as f64 / (count - 1) as f64;
            tidy(if log { lo * (hi / lo).powf(f) } else { lo + (hi - lo) * f })
        })
        .collect()
}

/// Parses a grid: an explicit list `a,b,c` or a range `min:max:count[:log]`.
pub fn parse_grid(axis: Axis, text: &str) -> Result<Vec<GridValue>> {
    let bad = |m: String| Error::Config(format!("grid {text:?}: {m}"));
    let values: Vec<GridValue> = if axis == Axis::NAntennas {
        text.split(',').map(|t| t.parse().map(GridValue::Antennas)).collect::<Result<_>>()?
    } else if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let log = match parts.get(3) {
            None | Some(&"lin") | Some(&"linear") => false,
            Some(&"log") => true,
            Some(other) => return Err(bad(format!("unknown spacing {other:?}"))),
        };
        if parts.len() < 3 || parts.len() > 4 {
            return Err(bad("expected min:max:count[:log]".into()));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(e.to_string()));
        let count: usize = parts[2].trim().parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        if count == 0 || (log && !(lo > 0.0 && hi > 0.0)) {
            return Err(bad("count must be positive and log ranges positive".into()));
        }
        linspace(lo, hi, count, log).into_iter().map(GridValue::Real).collect()
    } else {
        text.split(',')
            .map(|t| t.trim().parse::<f64>().map(GridValue::Real).map_err(|e| bad(e.to_string())))
            .collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(bad("empty grid".into()));
    }
    Ok(values)
}

/// What is computed at each point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Coverage with nearest-UAV association.
    Coverage,
    /// Cell-free coverage.
    CellFree,
}

impl Quantity {
    fn prefix(self) -> &'static str {
        match self {
            Quantity::Coverage => "p_cov",
            Quantity::CellFree => "p_cf",
        }
    }
}

/// Which evaluations fill the result columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Methods {
    pub analytic: bool,
    pub mc: bool,
    /// Also report the lower bound (nearest-UAV coverage only).
    pub bound: bool,
    /// For cell-free sweeps, also report analytic nearest-UAV coverage.
    pub companion: bool,
}

impl Methods {
    pub const ANALYTIC: Methods = Methods { analytic: true, mc: false, bound: false, companion: false };
    pub const BOTH: Methods = Methods { analytic: true, mc: true, bound: false, companion: false };
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub base: ConfigFile,
    pub axes: Vec<(Axis, Vec<GridValue>)>,
    pub quantity: Quantity,
    pub methods: Methods,
}

/// One evaluated point.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub coords: Vec<GridValue>,
    pub config: ConfigFile,
    pub analytic: Option<f64>,
    pub lower_bound: Option<f64>,
    pub companion: Option<f64>,
    pub mc: Option<McEstimate>,
}

impl SweepSpec {
    /// All grid points in row order; the first axis varies slowest.
    pub fn points(&self) -> Result<Vec<(Vec<GridValue>, ConfigFile)>> {
        let mut out = vec![(Vec::new(), self.base.clone())];
        for (axis, grid) in &self.axes {
            let mut next = Vec::with_capacity(out.len() * grid.len());
            for (coords, cfg) in &out {
                for v in grid {
                    let mut c = cfg.clone();
                    axis.apply(&mut c, v)?;
                    let mut k = coords.clone();
                    k.push(*v);
                    next.push((k, c));
                }
            }
            out = next;
        }
        Ok(out)
    }

    pub fn run(&self, opts: &CoverageOptions, mc: &McSpec) -> Result<Vec<SweepRow>> {
        let points = self.points()?;
        let resolved = points.iter().map(|(_, c)| c.resolve()).collect::<Result<Vec<_>>>()?;
        let quantity = self.quantity;
        let methods = self.methods;
        let analytic: Vec<(Option<f64>, Option<f64>, Option<f64>)> = resolved
            .par_iter()
            .map(|rc| -> Result<_> {
                let (net, sc) = (&rc.network, &rc.scenario);
                let main = if methods.analytic {
                    Some(match quantity {
                        Quantity::Coverage => p_cov(net, sc, opts)?.value,
                        Quantity::CellFree => p_cf(net, sc, opts)?.value,
                    })
                } else {
                    None
                };
                let bound = if methods.bound && quantity == Quantity::Coverage {
                    Some(p_cov_lower_bound(net, sc, opts)?.value)
                } else {
                    None
                };
                let companion = if methods.companion && quantity == Quantity::CellFree {
                    Some(p_cov(net, sc, opts)?.value)
                } else {
                    None
                };
                Ok((main, bound, companion))
            })
            .collect::<Result<_>>()?;

        let mut mc_values: Vec<Option<McEstimate>> = vec![None; points.len()];
        if methods.mc {
            // Points sharing everything except the threshold reuse one set of drops.
            let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
            for (i, (_, c)) in points.iter().enumerate() {
                let mut key = c.clone();
                key.beta_db = 0.0;
                groups.entry(key.canonical()).or_default().push(i);
            }
            let mut ordered: Vec<Vec<usize>> = groups.into_values().collect();
            ordered.sort_by_key(|g| g[0]);
            for group in ordered {
                let rc = &resolved[group[0]];
                let betas: Vec<f64> = group.iter().map(|&i| db_to_linear(points[i].1.beta_db)).collect();
                let est = match quantity {
                    Quantity::Coverage => estimate_p_cov_sweep(&rc.network, &rc.scenario, &betas, mc)?,
                    Quantity::CellFree => estimate_p_cf_sweep(&rc.network, &rc.scenario, &betas, mc)?,
                };
                for (i, e) in group.into_iter().zip(est) {
                    mc_values[i] = Some(e);
                }
            }
        }

        Ok(points
            .into_iter()
            .zip(analytic)
            .zip(mc_values)
            .map(|(((coords, config), (analytic, lower_bound, companion)), mc)| SweepRow {
                coords,
                config,
                analytic,
                lower_bound,
                companion,
                mc,
            })
            .collect())
    }

    /// Column names of the CSV produced by [`write_csv`].
    pub fn columns(&self) -> Vec<String> {
        let q = self.quantity.prefix();
        let mut cols: Vec<String> = self.axes.iter().map(|(a, _)| a.column().to_string()).collect();
        cols.push(format!("{q}_analytic"));
        if self.methods.bound && self.quantity == Quantity::Coverage {
            cols.push(format!("{q}_lower_bound"));
        }
        cols.extend([format!("{q}_mc"), "ci_low".into(), "ci_high".into()]);
        if self.methods.companion && self.quantity == Quantity::CellFree {
            cols.push("p_cov_analytic".into());
        }
        let taken: Vec<&str> = self.axes.iter().map(|(a, _)| a.column()).collect();
        cols.extend(ConfigFile::PARAM_COLUMNS.iter().filter(|c| !taken.contains(c)).map(|c| c.to_string()));
        cols
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Renders rows as CSV text, preceded by a provenance comment line.
pub fn write_csv(spec: &SweepSpec, rows: &[SweepRow], provenance: &str) -> Result<String> {
    let mut out = format!("# {provenance}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(spec.columns())?;
        let taken: Vec<&str> = spec.axes.iter().map(|(a, _)| a.column()).collect();
        for row in rows {
            let mut rec: Vec<String> = row.coords.iter().map(|v| v.to_string()).collect();
            rec.push(opt(row.analytic));
            if spec.methods.bound && spec.quantity == Quantity::Coverage {
                rec.push(opt(row.lower_bound));
            }
            rec.push(opt(row.mc.map(|e| e.mean)));
            rec.push(opt(row.mc.map(|e| e.ci_low)));
            rec.push(opt(row.mc.map(|e| e.ci_high)));
            if spec.methods.companion && spec.quantity == Quantity::CellFree {
                rec.push(opt(row.companion));
            }
            let params = row.config.param_values();
            rec.extend(
                ConfigFile::PARAM_COLUMNS.iter().zip(params).filter(|(c, _)| !taken.contains(c)).map(|(_, v)| v),
            );
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    String::from_utf8(out).map_err(|e| Error::InvalidInput(e.to_string()))
}

/// Provenance line: a hash of the base configuration and the run description.
pub fn provenance(spec: &SweepSpec, label: &str, mc: &McSpec) -> String {
    let mut desc = spec.base.canonical();
    desc.push_str(&format!("\nlabel={label}\nquantity={:?}\nmethods={:?}\n", spec.quantity, spec.methods));
    for (axis, grid) in &spec.axes {
        let g: Vec<String> = grid.iter().map(|v| v.to_string()).collect();
        desc.push_str(&format!("axis={}:{}\n", axis.column(), g.join(",")));
    }
    if spec.methods.mc {
        desc.push_str(&format!("drops={}\n", mc.drops));
    }
    let hash: String = Sha256::digest(desc.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    let drops = if spec.methods.mc { format!(" drops={}", mc.drops) } else { String::new() };
    format!("config_hash={hash} seed={}{drops} run={label}", mc.seed)
}

/// Evaluates a sweep and writes it to `path`.
pub fn run_to_file(spec: &SweepSpec, label: &str, opts: &CoverageOptions, mc: &McSpec, path: &Path) -> Result<Vec<SweepRow>> {
    let rows = spec.run(opts, mc)?;
    let text = write_csv(spec, &rows, &provenance(spec, label, mc))?;
    std::fs::write(path, text)?;
    Ok(rows)
}

/// Identifiers of the figure presets.
pub const FIGURES: [&str; 10] = ["fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b"];

/// Shape of the elevation-tangent Gamma law in the random-angle presets.
pub const FIGURE_ANGLE_SHAPE: f64 = 4.0;
/// Half width of the uniform altitude law in the random-altitude presets.
pub const FIGURE_ALTITUDE_HALF_WIDTH: f64 = 5.0;

fn reals(v: Vec<f64>) -> Vec<GridValue> {
    v.into_iter().map(GridValue::Real).collect()
}

/// Preset sweep for a figure, built on the reference system parameters.
/// Two-axis presets default to analytic evaluation only.
pub fn figure_preset(id: &str) -> Result<SweepSpec> {
    use crate::config::{AltitudeField, AngleField, ScenarioField};
    let mut base = ConfigFile::default();
    base.set_antennas(Antennas::Finite(4));
    let apil = |angle: AngleField| ScenarioField { kind: "apil".into(), angle: Some(angle), altitude: None };
    let apdl = |alt: AltitudeField| ScenarioField { kind: "apdl".into(), angle: None, altitude: Some(alt) };
    let angles = || reals(linspace(5.0, 60.0, 12, false));
    let heights = || reals(linspace(10.0, 150.0, 15, false));
    let lambdas = || reals(linspace(1e-7, 1e-5, 9, true));
    let degenerate_angle = AngleField::Degenerate { theta_bar_deg: 20.0 };
    let gamma_angle = AngleField::GammaTan { theta_bar_deg: 20.0, shape: FIGURE_ANGLE_SHAPE };
    let fixed_alt = AltitudeField::Degenerate { h_bar_m: 40.0 };
    let uniform_alt = AltitudeField::Uniform { h_bar_m: 40.0, half_width_m: FIGURE_ALTITUDE_HALF_WIDTH };
    let (scenario, lambda, axes, quantity, methods) = match id {
        "fig2a" => (apil(degenerate_angle), 1e-7, vec![(Axis::ThetaBar, angles())], Quantity::Coverage, Methods::BOTH),
        "fig2b" => (apil(degenerate_angle), 1e-7, vec![(Axis::Lambda, lambdas()), (Axis::ThetaBar, angles())], Quantity::Coverage, Methods::ANALYTIC),
        "fig3a" => (apil(gamma_angle), 1e-7, vec![(Axis::ThetaBar, angles())], Quantity::Coverage, Methods::BOTH),
        "fig3b" => (apil(gamma_angle), 1e-7, vec![(Axis::Lambda, lambdas()), (Axis::ThetaBar, angles())], Quantity::Coverage, Methods::ANALYTIC),
        "fig4a" => (apdl(fixed_alt), 1e-5, vec![(Axis::HBar, heights())], Quantity::Coverage, Methods::BOTH),
        "fig4b" => (apdl(fixed_alt), 1e-5, vec![(Axis::Lambda, lambdas()), (Axis::HBar, heights())], Quantity::Coverage, Methods::ANALYTIC),
        "fig5a" => (apdl(uniform_alt), 1e-5, vec![(Axis::HBar, heights())], Quantity::Coverage, Methods::BOTH),
        "fig5b" => (apdl(uniform_alt), 1e-5, vec![(Axis::Lambda, lambdas()), (Axis::HBar, heights())], Quantity::Coverage, Methods::ANALYTIC),
        "fig6a" | "fig6b" => {
            let scenario = if id == "fig6a" {
                apil(AngleField::Degenerate { theta_bar_deg: 5.0 })
            } else {
                apdl(fixed_alt)
            };
            let ns = ["1", "2", "4", "8", "inf"].iter().map(|s| s.parse().map(GridValue::Antennas)).collect::<Result<_>>()?;
            let axes = vec![(Axis::NAntennas, ns), (Axis::BetaDb, reals(linspace(-20.0, 60.0, 17, false)))];
            (scenario, 1e-6, axes, Quantity::CellFree, Methods { companion: true, ..Methods::BOTH })
        }
        other => return Err(Error::Config(format!("unknown figure {other:?}; expected one of {}", FIGURES.join(", ")))),
    };
    base.scenario = scenario;
    base.lambda = lambda;
    Ok(SweepSpec { base, axes, quantity, methods })
}
