//! Loads a TOML configuration, sweeps the altitude and writes the CSV that the
//! command-line tool would produce.

use uav3d::config::ConfigFile;
use uav3d::coverage::CoverageOptions;
use uav3d::montecarlo::McSpec;
use uav3d::sweep::{parse_grid, provenance, write_csv, Axis, Methods, Quantity, SweepSpec};

const CONFIG: &str = r#"
lambda = 1e-5
n_antennas = 2
beta_db = 0.0

[scenario]
kind = "apdl"
altitude = { variant = "degenerate", h_bar_m = 40.0 }
"#;

fn main() -> uav3d::Result<()> {
    let base = ConfigFile::from_toml(CONFIG)?;
    println!("config hash {}", base.hash());
    let spec = SweepSpec {
        base,
        axes: vec![(Axis::HBar, parse_grid(Axis::HBar, "20:100:5")?)],
        quantity: Quantity::Coverage,
        methods: Methods::ANALYTIC,
    };
    let mc = McSpec::default();
    let rows = spec.run(&CoverageOptions::default(), &mc)?;
    print!("{}", write_csv(&spec, &rows, &provenance(&spec, "example", &mc))?);
    Ok(())
}
