//! Numerical Laplace inversion and high-order derivatives of analytic functions.
//!
//! Two inversion rules are provided. Fixed Talbot deforms the Bromwich contour
//! into the left half plane and needs the transform to be analytic off the
//! negative real axis. Euler summation stays on a vertical line in the right
//! half plane and works whenever the transform exists there. Each call can be
//! guarded by a second, independent evaluation.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;
use statrs::function::factorial::{binomial, factorial};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InversionMethod {
    Talbot,
    Euler,
}

/// Where the transform is known to be analytic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Analyticity {
    /// Analytic on the complex plane cut along the non-positive real axis.
    CutPlane,
    /// Only known to exist for positive real part.
    RightHalfPlane,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InversionSpec {
    pub method: InversionMethod,
    /// Number of contour nodes for Talbot; Euler uses a fixed, precision-limited count.
    /// Past about 40 nodes Talbot loses accuracy to roundoff in double precision.
    pub nodes: usize,
    /// Accuracy the caller expects; guard disagreement is judged against it.
    pub target_rel_err: f64,
    /// Absolute disagreement always accepted by the guard.
    pub abs_floor: f64,
    /// Re-evaluate with an independent rule and fail if the results disagree.
    pub cross_check: bool,
}

impl Default for InversionSpec {
    fn default() -> Self {
        InversionSpec { method: InversionMethod::Talbot, nodes: 32, target_rel_err: 1e-8, abs_floor: 1e-10, cross_check: true }
    }
}

/// Euler summation terms used in double precision: beyond roughly 16 the
/// roundoff from the `10^(M/3)` prefactor outweighs the discretization gain.
const EULER_TERMS: usize = 16;

fn talbot_nodes(t: f64, nodes: usize) -> Vec<Complex64> {
    let m = nodes.max(4);
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut out = vec![Complex64::new(r, 0.0)];
    for k in 1..m {
        let theta = k as f64 * PI / m as f64;
        let cot = 1.0 / theta.tan();
        out.push(Complex64::new(r * theta * cot, r * theta));
    }
    out
}

fn talbot_combine(values: &[Complex64], t: f64, nodes: usize) -> f64 {
    let m = nodes.max(4);
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut sum = 0.5 * (values[0] * (r * t).exp()).re;
    for k in 1..m {
        let theta = k as f64 * PI / m as f64;
        let cot = 1.0 / theta.tan();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        sum += ((s * t).exp() * values[k] * Complex64::new(1.0, sigma)).re;
    }
    r / m as f64 * sum
}

fn euler_nodes(t: f64, terms: usize) -> Vec<Complex64> {
    let a = terms as f64 * LN_10 / 3.0;
    (0..=2 * terms).map(|k| Complex64::new(a, PI * k as f64) / t).collect()
}

fn euler_combine(values: &[Complex64], t: f64, terms: usize) -> f64 {
    let m = terms;
    // Binomial averaging weights for the last M terms of the alternating series.
    let mut xi = vec![1.0; 2 * m + 1];
    xi[0] = 0.5;
    let scale = 2f64.powi(-(m as i32));
    xi[2 * m] = scale;
    for k in 1..m {
        xi[2 * m - k] = xi[2 * m - k + 1] + scale * binomial(m as u64, k as u64);
    }
    let mut sum = 0.0;
    for (k, w) in xi.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * w * values[k].re;
    }
    10f64.powf(m as f64 / 3.0) / t * sum
}

#[derive(Clone, Copy)]
enum Rule {
    Talbot(usize),
    Euler(usize),
}

fn apply_rule<F>(f: &mut F, t: f64, rule: Rule) -> Result<f64>
where
    F: FnMut(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let nodes = match rule {
        Rule::Talbot(m) => talbot_nodes(t, m),
        Rule::Euler(m) => euler_nodes(t, m),
    };
    let values = f(&nodes)?;
    if values.len() != nodes.len() {
        return Err(Error::InvalidInput("batched transform returned the wrong number of values".into()));
    }
    let v = match rule {
        Rule::Talbot(m) => talbot_combine(&values, t, m),
        Rule::Euler(m) => euler_combine(&values, t, m),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { what: "Laplace inversion", at: t })
    }
}

/// Inverse Laplace transform of `f` at `t > 0`, with `f` evaluated on all
/// nodes of a rule in one call.
///
/// A Talbot request on a transform that is only known in the right half plane
/// is served by Euler summation instead.
pub fn invert_laplace_batched<F>(mut f: F, t: f64, region: Analyticity, spec: &InversionSpec) -> Result<f64>
where
    F: FnMut(&[Complex64]) -> Result<Vec<Complex64>>,
{
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("inversion point must be positive, got {t}")));
    }
    let method = match (spec.method, region) {
        (InversionMethod::Talbot, Analyticity::RightHalfPlane) => InversionMethod::Euler,
        (m, _) => m,
    };
    let primary_rule = match method {
        InversionMethod::Talbot => Rule::Talbot(spec.nodes),
        InversionMethod::Euler => Rule::Euler(EULER_TERMS),
    };
    let primary = apply_rule(&mut f, t, primary_rule)?;
    if !spec.cross_check {
        return Ok(primary);
    }
    let secondary_rule = match (method, region) {
        (InversionMethod::Talbot, _) => Rule::Euler(EULER_TERMS),
        (InversionMethod::Euler, Analyticity::CutPlane) => Rule::Talbot(spec.nodes),
        (InversionMethod::Euler, Analyticity::RightHalfPlane) => Rule::Euler(EULER_TERMS - 4),
    };
    let secondary = apply_rule(&mut f, t, secondary_rule)?;
    let allowed = (100.0 * spec.target_rel_err * primary.abs().max(secondary.abs())).max(spec.abs_floor);
    if (primary - secondary).abs() > allowed {
        return Err(Error::InversionDisagreement { primary, secondary });
    }
    Ok(primary)
}

/// Inverse Laplace transform of `f` at `t > 0`; see [`invert_laplace_batched`].
pub fn invert_laplace<F>(mut f: F, t: f64, region: Analyticity, spec: &InversionSpec) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    invert_laplace_batched(|nodes: &[Complex64]| nodes.iter().map(|&s| f(s)).collect(), t, region, spec)
}

/// CCDF of a positive random variable `Y` at `y`, from the Laplace transform
/// of `1 / Y`: `P[Y > y] = L^-1{ F(s) / s }(1 / y)`. Clamped to [0, 1].
pub fn ccdf_via_inversion<F>(mut laplace_of_inverse: F, y: f64, region: Analyticity, spec: &InversionSpec) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    if !(y > 0.0) {
        return Err(Error::InvalidInput(format!("CCDF point must be positive, got {y}")));
    }
    let spec = InversionSpec { abs_floor: spec.abs_floor.max(1e-7), ..*spec };
    let v = invert_laplace(|s| Ok(laplace_of_inverse(s)? / s), 1.0 / y, region, &spec)?;
    Ok(v.clamp(0.0, 1.0))
}

/// [`ccdf_via_inversion`] with the transform evaluated on all nodes at once.
pub fn ccdf_via_inversion_batched<F>(mut laplace_of_inverse: F, y: f64, region: Analyticity, spec: &InversionSpec) -> Result<f64>
where
    F: FnMut(&[Complex64]) -> Result<Vec<Complex64>>,
{
    if !(y > 0.0) {
        return Err(Error::InvalidInput(format!("CCDF point must be positive, got {y}")));
    }
    let spec = InversionSpec { abs_floor: spec.abs_floor.max(1e-7), ..*spec };
    let v = invert_laplace_batched(
        |nodes: &[Complex64]| {
            let values = laplace_of_inverse(nodes)?;
            Ok(values.into_iter().zip(nodes).map(|(v, s)| v / s).collect())
        },
        1.0 / y,
        region,
        &spec,
    )?;
    Ok(v.clamp(0.0, 1.0))
}

/// Settings for contour-integral derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeSpec {
    /// Initial contour radius as a fraction of the expansion point.
    pub radius_fraction: f64,
    pub min_nodes: usize,
    /// Agreement required between the estimates at radius `r` and `r / 2`.
    pub rel_tol: f64,
    /// Relative accuracy of the supplied function values.
    pub value_rel_err: f64,
    pub max_halvings: u32,
}

impl Default for DerivativeSpec {
    fn default() -> Self {
        DerivativeSpec { radius_fraction: 0.5, min_nodes: 64, rel_tol: 1e-6, value_rel_err: 1e-9, max_halvings: 4 }
    }
}

/// Derivative estimate with the contour used to obtain it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub radius: f64,
    pub nodes: usize,
}

/// One trapezoidal contour estimate of `g^(m)(t0)` for `g` real on the real axis;
/// returns the estimate and the size of its roundoff and value-error floor.
fn contour_estimate<G>(g: &mut G, m: usize, t0: f64, r: f64, nodes: usize, value_rel_err: f64) -> Result<(f64, f64)>
where
    G: FnMut(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let half = nodes / 2;
    let points: Vec<Complex64> = (0..=half)
        .map(|k| t0 + Complex64::from_polar(r, 2.0 * PI * k as f64 / nodes as f64))
        .collect();
    let values = g(&points)?;
    if values.len() != points.len() {
        return Err(Error::InvalidInput("batched function returned the wrong number of values".into()));
    }
    let mut sum = 0.0;
    let mut max_abs: f64 = 0.0;
    for (k, v) in values.iter().enumerate() {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { what: "contour function", at: t0 });
        }
        max_abs = max_abs.max(v.norm());
        let phase = Complex64::from_polar(1.0, -(m as f64) * 2.0 * PI * k as f64 / nodes as f64);
        let term = (v * phase).re;
        // Conjugate symmetry: nodes k and N-k contribute equally.
        sum += if k == 0 || k == half { term } else { 2.0 * term };
    }
    let scale = factorial(m as u64) / r.powi(m as i32);
    let floor = scale * max_abs * (value_rel_err + 10.0 * f64::EPSILON);
    Ok((scale * sum / nodes as f64, floor))
}

/// `m`-th derivative at `t0 > 0` of a function analytic on the disk of radius
/// `t0` around `t0` and real on the real axis, evaluating all contour nodes of
/// one radius in a single batched call.
pub fn high_order_derivative_batched<G>(mut g: G, m: usize, t0: f64, spec: &DerivativeSpec) -> Result<Derivative>
where
    G: FnMut(&[Complex64]) -> Result<Vec<Complex64>>,
{
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::InvalidInput(format!("expansion point must be positive, got {t0}")));
    }
    if m == 0 {
        let v = g(&[Complex64::new(t0, 0.0)])?;
        return Ok(Derivative { value: v[0].re, radius: 0.0, nodes: 1 });
    }
    let mut nodes = spec.min_nodes.max(4 * m);
    nodes += nodes % 2;
    let mut r = spec.radius_fraction * t0;
    let (mut d1, mut f1) = contour_estimate(&mut g, m, t0, r, nodes, spec.value_rel_err)?;
    let mut change = f64::INFINITY;
    for _ in 0..=spec.max_halvings {
        let (d2, f2) = contour_estimate(&mut g, m, t0, 0.5 * r, nodes, spec.value_rel_err)?;
        change = (d1 - d2).abs();
        if change <= spec.rel_tol * d1.abs() + f1 + f2 {
            return Ok(Derivative { value: d1, radius: r, nodes });
        }
        r *= 0.5;
        d1 = d2;
        f1 = f2;
    }
    Err(Error::DerivativeUnstable { halvings: spec.max_halvings, change })
}

/// Scalar-callback version of [`high_order_derivative_batched`].
pub fn high_order_derivative<G>(mut g: G, m: usize, t0: f64, spec: &DerivativeSpec) -> Result<f64>
where
    G: FnMut(Complex64) -> Result<Complex64>,
{
    let d = high_order_derivative_batched(|pts: &[Complex64]| pts.iter().map(|&z| g(z)).collect(), m, t0, spec)?;
    Ok(d.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(f: impl Fn(Complex64) -> Complex64) -> impl FnMut(Complex64) -> Result<Complex64> {
        move |s| Ok(f(s))
    }

    #[test]
    fn talbot_inverts_shifted_pole() {
        let spec = InversionSpec::default();
        for t in [0.1, 1.0, 5.0] {
            let v = invert_laplace(ok(|s| 1.0 / (s + 1.0)), t, Analyticity::CutPlane, &spec).unwrap();
            assert!((v - (-t as f64).exp()).abs() < 1e-8, "{t}: {v}");
        }
    }

    #[test]
    fn euler_inverts_sine() {
        let spec = InversionSpec { method: InversionMethod::Euler, ..Default::default() };
        let v = invert_laplace(ok(|s| 1.0 / (s * s + 1.0)), 1.3, Analyticity::RightHalfPlane, &spec).unwrap();
        assert!((v - 1.3f64.sin()).abs() < 1e-7, "{v}");
    }

    #[test]
    fn derivative_of_exponential() {
        let spec = DerivativeSpec::default();
        for m in 0..8 {
            let d = high_order_derivative(|z| Ok((2.0 * z).exp()), m, 0.7, &spec).unwrap();
            let exact = 2f64.powi(m as i32) * (1.4f64).exp();
            assert!((d - exact).abs() < 1e-9 * exact, "{m}: {d} vs {exact}");
        }
    }
}
