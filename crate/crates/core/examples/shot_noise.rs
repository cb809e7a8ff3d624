//! Laplace transform of the aggregate received power and the stable density it
//! implies when the elevation angle is fixed.

use uav3d::analytic::{levy_density, laplace_t0_apdl, laplace_t0_apil, shot_noise_density_apil, shot_noise_stable_scale};
use uav3d::inversion::InversionSpec;
use uav3d::model::{AltitudeDistribution, AngleDistribution, NetworkConfig, Scenario, WeightModel};
use uav3d::montecarlo::{estimate_shot_laplace, McSpec};
use uav3d::quadrature::QuadratureSpec;

fn main() -> uav3d::Result<()> {
    let cfg = NetworkConfig::default();
    let quad = QuadratureSpec::default();
    let weight = WeightModel::Exponential { power: 1.0 };
    let angle = AngleDistribution::degenerate_deg(20.0);
    let altitude = AltitudeDistribution::Degenerate { h: 40.0 };
    let spec = McSpec::default().with_drops(20_000);

    let s_values = [1e6, 1e7, 1e8];
    let mc = estimate_shot_laplace(&cfg, &Scenario::AngleIndependent(angle), &weight, &s_values, 0, &spec)?;
    let mc_h = estimate_shot_laplace(&cfg, &Scenario::AltitudeIndependent(altitude), &weight, &s_values, 0, &spec)?;
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "s", "apil", "mc", "apdl", "mc");
    for (i, s) in s_values.iter().enumerate() {
        println!(
            "{s:>8.0e} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            laplace_t0_apil(*s, &cfg, &angle, &weight, &quad)?,
            mc[i].mean,
            laplace_t0_apdl(*s, &cfg, &altitude, &weight, &quad)?,
            mc_h[i].mean
        );
    }

    // With alpha = 4 the stable law is a Levy law with a closed-form density.
    let cfg4 = NetworkConfig { alpha: 4.0, ..cfg };
    let c = shot_noise_stable_scale(&cfg4, &angle, &weight, &quad)?;
    println!("\nalpha=4 density, transform exp(-{c:.3e} sqrt(s))");
    for x in [0.05 * c * c, 0.25 * c * c, c * c] {
        let inv = shot_noise_density_apil(x, &cfg4, &angle, &weight, &quad, &InversionSpec::default())?;
        println!("x={x:.3e}  inverted={inv:.6e}  levy={:.6e}", levy_density(x, c));
    }
    Ok(())
}
