//! Coverage against the common elevation angle for several antenna counts,
//! with the lower bound alongside the exact value.

use uav3d::coverage::{p_cov, p_cov_lower_bound, CoverageOptions};
use uav3d::model::{AngleDistribution, Antennas, NetworkConfig, Scenario};

fn main() -> uav3d::Result<()> {
    let opts = CoverageOptions::default();
    let base = NetworkConfig { lambda: 1e-7, ..NetworkConfig::default() };
    println!("{:>6} {:>4} {:>10} {:>10}", "theta", "N", "p_cov", "bound");
    for deg in [5.0, 15.0, 30.0, 60.0] {
        let sc = Scenario::AngleIndependent(AngleDistribution::degenerate_deg(deg));
        for n in [1u32, 4] {
            let cfg = base.with_antennas(Antennas::Finite(n));
            let exact = p_cov(&cfg, &sc, &opts)?;
            let bound = p_cov_lower_bound(&cfg, &sc, &opts)?;
            println!("{deg:>6} {n:>4} {:>10.5} {:>10.5}", exact.value, bound.value);
        }
        let massive = p_cov(&base.with_antennas(Antennas::Massive), &sc, &opts)?;
        println!("{deg:>6} {:>4} {:>10.5}", "inf", massive.value);
    }
    Ok(())
}
