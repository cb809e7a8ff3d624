//! Numerical Laplace inversion and contour derivatives on transforms with
//! known originals.

use num_complex::Complex64;
use uav3d::inversion::{high_order_derivative, invert_laplace, Analyticity, DerivativeSpec, InversionSpec};

fn main() -> uav3d::Result<()> {
    let spec = InversionSpec::default();
    for t in [0.5, 1.0, 4.0] {
        let f = invert_laplace(|s: Complex64| Ok(1.0 / (s + 1.0)), t, Analyticity::CutPlane, &spec)?;
        let g = invert_laplace(|s: Complex64| Ok((-s.sqrt()).exp()), t, Analyticity::CutPlane, &spec)?;
        let levy = (-0.25 / t).exp() / (2.0 * (std::f64::consts::PI * t * t * t).sqrt());
        println!("t={t:<4} exp: {f:.12} vs {:.12}   levy: {g:.12} vs {levy:.12}", (-t).exp());
    }

    // Derivatives of exp(t) are exp(t) at every order.
    let t0: f64 = 1.5;
    for m in [1usize, 4, 8] {
        let d = high_order_derivative(|z: Complex64| Ok(z.exp()), m, t0, &DerivativeSpec::default())?;
        println!("d^{m}/dt^{m} exp(t) at {t0}: {d:.12} vs {:.12}", t0.exp());
    }
    Ok(())
}
