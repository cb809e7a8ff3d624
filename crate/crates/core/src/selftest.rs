//! Known-answer checks for the numerical kernels, plus the result type shared
//! with the Monte Carlo validation suite.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::inversion::{high_order_derivative, invert_laplace, Analyticity, DerivativeSpec, InversionSpec};

/// One pass/fail check: a measured quantity against a limit, which is an
/// upper bound for errors and a lower bound for p-values.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub limit: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `error <= tolerance`.
    pub fn new(name: impl Into<String>, error: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Check { name: name.into(), measured: error, limit: tolerance, passed: error <= tolerance, detail: detail.into() }
    }

    /// Passes when `value >= floor`.
    pub fn at_least(name: impl Into<String>, value: f64, floor: f64, detail: impl Into<String>) -> Self {
        Check { name: name.into(), measured: value, limit: floor, passed: value >= floor, detail: detail.into() }
    }

    /// A check whose evaluation failed outright.
    pub fn failed(name: impl Into<String>, why: impl Into<String>) -> Self {
        Check { name: name.into(), measured: f64::NAN, limit: f64::NAN, passed: false, detail: why.into() }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<40} measured={:<11.3e} limit={:<10.3e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.limit,
            self.detail
        )
    }
}

type Transform = fn(Complex64) -> Complex64;
type Original = fn(f64) -> f64;

/// Transform pairs `(name, F, f, region)` with `F` the Laplace transform of `f`.
pub fn transform_pairs() -> Vec<(&'static str, Transform, Original, Analyticity)> {
    vec![
        ("1/(s+1) <-> exp(-t)", |s| 1.0 / (s + 1.0), |t| (-t).exp(), Analyticity::CutPlane),
        ("1/s^2 <-> t", |s| 1.0 / (s * s), |t| t, Analyticity::CutPlane),
        ("1/(s(s+1)) <-> 1-exp(-t)", |s| 1.0 / (s * (s + 1.0)), |t| 1.0 - (-t).exp(), Analyticity::CutPlane),
        ("s^-1/2 <-> (pi t)^-1/2", |s| 1.0 / s.sqrt(), |t| 1.0 / (PI * t).sqrt(), Analyticity::CutPlane),
        ("s^-3/2 <-> 2 sqrt(t/pi)", |s| s.powf(-1.5), |t| 2.0 * (t / PI).sqrt(), Analyticity::CutPlane),
        (
            "exp(-sqrt s) <-> Levy density",
            |s| (-s.sqrt()).exp(),
            |t| (-1.0 / (4.0 * t)).exp() / (2.0 * PI.sqrt() * t.powf(1.5)),
            Analyticity::CutPlane,
        ),
        (
            "ln(s)/s <-> -gamma - ln t",
            |s| s.ln() / s,
            |t| -0.577_215_664_901_532_9 - t.ln(),
            Analyticity::CutPlane,
        ),
        ("1/(s+1)^2 <-> t exp(-t)", |s| 1.0 / ((s + 1.0) * (s + 1.0)), |t| t * (-t).exp(), Analyticity::RightHalfPlane),
        ("1/(s^2+1) <-> sin t", |s| 1.0 / (s * s + 1.0), f64::sin, Analyticity::RightHalfPlane),
    ]
}

/// Inverts every transform pair at several abscissae; relative error to `tol`.
pub fn inversion_corpus(tol: f64) -> Vec<Check> {
    let spec = InversionSpec::default();
    let mut out = Vec::new();
    for (name, big_f, small_f, region) in transform_pairs() {
        let mut worst = 0.0f64;
        let mut failure = None;
        for t in [0.2, 1.0, 3.0] {
            match invert_laplace(|s| Ok(big_f(s)), t, region, &spec) {
                Ok(v) => {
                    let exact = small_f(t);
                    worst = worst.max((v - exact).abs() / exact.abs().max(1e-300));
                }
                Err(e) => failure = Some(e.to_string()),
            }
        }
        out.push(match failure {
            Some(why) => Check::failed(format!("inversion {name}"), why),
            None => Check::new(format!("inversion {name}"), worst, tol, "relative, t in {0.2, 1, 3}"),
        });
    }
    out
}

/// Derivatives of orders 0..=8 of a degree-10 polynomial at `t = 1.3`,
/// relative error to `tol`.
pub fn derivative_corpus(tol: f64) -> Vec<Check> {
    let coeffs: Vec<f64> = (0..=10).map(|k| ((k * 7 + 3) % 11) as f64 - 5.0).collect();
    let t0: f64 = 1.3;
    let exact = |m: usize| -> f64 {
        coeffs
            .iter()
            .enumerate()
            .skip(m)
            .map(|(k, c)| c * ((k - m + 1)..=k).map(|j| j as f64).product::<f64>() * t0.powi((k - m) as i32))
            .sum()
    };
    let poly = |t: Complex64| -> Result<Complex64> {
        Ok(coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c))
    };
    let spec = DerivativeSpec::default();
    (0..=8)
        .map(|m| {
            let name = format!("polynomial derivative order {m}");
            match high_order_derivative(poly, m, t0, &spec) {
                Ok(v) => {
                    let e = exact(m);
                    Check::new(name, (v - e).abs() / e.abs().max(1.0), tol, "relative")
                }
                Err(e) => Check::failed(name, e.to_string()),
            }
        })
        .collect()
}

/// The full self-test corpus at its standard tolerances.
pub fn run() -> Vec<Check> {
    let mut v = inversion_corpus(1e-6);
    v.extend(derivative_corpus(1e-10));
    v
}

#[cfg(test)]
mod tests {
    #[test]
    fn corpus_passes() {
        for c in super::run() {
            assert!(c.passed, "{}", c.line());
        }
    }
}
