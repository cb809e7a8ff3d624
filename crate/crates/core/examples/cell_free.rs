//! Cell-free coverage, where every UAV serves the user coherently, next to
//! coverage with a single serving UAV.

use uav3d::coverage::{p_cf, p_cov, CoverageOptions};
use uav3d::model::{AngleDistribution, Antennas, NetworkConfig, Scenario};

fn main() -> uav3d::Result<()> {
    let opts = CoverageOptions::default();
    let sc = Scenario::AngleIndependent(AngleDistribution::degenerate_deg(5.0));
    println!("{:>6} {:>4} {:>10} {:>10}", "beta", "N", "p_cf", "p_cov");
    for beta_db in [0.0, 20.0, 40.0, 50.0] {
        for n in [Antennas::Finite(1), Antennas::Finite(8), Antennas::Massive] {
            let cfg = NetworkConfig { antennas: n, ..NetworkConfig::default() }.with_beta_db(beta_db);
            println!("{beta_db:>6} {:>4} {:>10.5} {:>10.5}", n.to_string(), p_cf(&cfg, &sc, &opts)?.value, p_cov(&cfg, &sc, &opts)?.value);
        }
    }
    Ok(())
}
