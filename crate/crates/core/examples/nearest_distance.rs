//! LoS thinning and the law of the strongest received weight for both
//! scenarios, checked against simulated drops.

use uav3d::analytic::{density_factor, mean_los_probability, nearest_cdf_apdl, nearest_cdf_apil};
use uav3d::model::{AltitudeDistribution, AngleDistribution, NetworkConfig, Scenario, WeightModel};
use uav3d::montecarlo::{estimate_strongest_cdf, McSpec};
use uav3d::quadrature::QuadratureSpec;

fn main() -> uav3d::Result<()> {
    let cfg = NetworkConfig::default();
    let quad = QuadratureSpec::default();
    let weight = WeightModel::Unit;
    let spec = McSpec::default().with_drops(20_000);

    for deg in [5.0, 20.0, 45.0] {
        let angle = AngleDistribution::degenerate_deg(deg);
        println!(
            "theta={deg:>4} deg  P_LoS={:.4}  omega={:.4}",
            mean_los_probability(&cfg, &angle, &quad)?,
            density_factor(&cfg, &angle, &quad)?
        );
    }

    let angle = AngleDistribution::degenerate_deg(20.0);
    let altitude = AltitudeDistribution::Degenerate { h: 40.0 };
    let grid = [1e-9, 1e-8, 1e-7];
    let mc_apil = estimate_strongest_cdf(&cfg, &Scenario::AngleIndependent(angle), &weight, &grid, &spec)?;
    let mc_apdl = estimate_strongest_cdf(&cfg, &Scenario::AltitudeIndependent(altitude), &weight, &grid, &spec)?;
    println!("\n{:>8} {:>10} {:>10} {:>10} {:>10}", "r", "apil", "mc", "apdl", "mc");
    for (i, r) in grid.iter().enumerate() {
        println!(
            "{r:>8.0e} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            nearest_cdf_apil(*r, &cfg, &angle, &weight, &quad)?,
            mc_apil[i].mean,
            nearest_cdf_apdl(*r, &cfg, &altitude, &weight, &quad)?,
            mc_apdl[i].mean
        );
    }
    Ok(())
}
