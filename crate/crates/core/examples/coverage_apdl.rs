//! Coverage against the common altitude, for a fixed altitude and a uniform
//! spread around it.

use uav3d::coverage::{p_cov, CoverageOptions};
use uav3d::model::{AltitudeDistribution, Antennas, NetworkConfig, Scenario};

fn main() -> uav3d::Result<()> {
    let opts = CoverageOptions::default();
    let cfg = NetworkConfig { lambda: 1e-5, antennas: Antennas::Finite(4), ..NetworkConfig::default() };
    println!("{:>6} {:>10} {:>10}", "h", "fixed", "uniform");
    for h in [10.0, 40.0, 80.0, 150.0] {
        let fixed = p_cov(&cfg, &Scenario::AltitudeIndependent(AltitudeDistribution::Degenerate { h }), &opts)?;
        let spread = p_cov(&cfg, &Scenario::AltitudeIndependent(AltitudeDistribution::uniform_around(h, 5.0)), &opts)?;
        println!("{h:>6} {:>10.5} {:>10.5}", fixed.value, spread.value);
    }
    Ok(())
}
