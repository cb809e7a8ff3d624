//! Adaptive Gauss-Kronrod quadrature for real, complex and batched integrands,
//! plus generalized Gauss-Laguerre rules for Gamma-distributed expectations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kronrod abscissae of the 21-point rule on [-1, 1] (non-negative half).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

/// Weights of the embedded 10-point Gauss rule (abscissae XGK[1], XGK[3], ...).
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Weights of the 21-point Kronrod rule.
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Values that can be integrated: closed under addition and real scaling,
/// with a norm for error control.
pub trait QuadValue: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    /// Max-abs norm used for error control.
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// A vector of complex values integrated simultaneously, so that expensive
/// shared factors of the integrand are computed once per abscissa.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch(pub Vec<Complex64>);

impl Add for Batch {
    type Output = Batch;
    fn add(mut self, rhs: Batch) -> Batch {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl Sub for Batch {
    type Output = Batch;
    fn sub(mut self, rhs: Batch) -> Batch {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl Mul<f64> for Batch {
    type Output = Batch;
    fn mul(mut self, rhs: f64) -> Batch {
        for a in self.0.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl QuadValue for Batch {
    fn magnitude(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Tolerances and budget for adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of panel bisections per integral.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-9, abs_tol: 1e-13, max_subdivisions: 5000 }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadratureSpec { rel_tol, ..self }
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Debug)]
pub struct Integral<V> {
    pub value: V,
    pub error: f64,
    pub evaluations: usize,
}

/// Behaviour of an integrand beyond the last finite breakpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tail {
    /// Roughly exponential decay on length scale `scale`.
    Exponential { scale: f64 },
    /// Power-law decay like `x^-decay` (requires `decay > 1`), starting near `scale`.
    Algebraic { decay: f64, scale: f64 },
}

/// Applies the 21-point Kronrod rule on [a, b]: returns the Kronrod value and
/// the embedded error estimate.
fn gauss_kronrod_21<V, F>(f: &mut F, a: f64, b: f64) -> Result<(V, f64)>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc.clone() * WGK[10];
    let mut gauss: Option<V> = None;
    let mut resabs = WGK[10] * fc.magnitude();
    let mut fvals: Vec<(V, V)> = Vec::with_capacity(10);
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        let pair = f1.clone() + f2.clone();
        kronrod = kronrod + pair.clone() * WGK[j];
        if j % 2 == 1 {
            let term = pair * WG[j / 2];
            gauss = Some(match gauss {
                Some(g) => g + term,
                None => term,
            });
        }
        fvals.push((f1, f2));
    }
    let gauss = gauss.expect("rule has Gauss nodes");
    let mean = kronrod.clone() * 0.5;
    let mut resasc = WGK[10] * (fc - mean.clone()).magnitude();
    for (j, (f1, f2)) in fvals.into_iter().enumerate() {
        resasc += WGK[j] * ((f1 - mean.clone()).magnitude() + (f2 - mean.clone()).magnitude());
    }
    let resasc = resasc * half;
    let resabs = resabs * half;
    let value = kronrod * half;
    let mut err = (value.clone() - gauss * half).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    if !value.magnitude().is_finite() || !err.is_finite() {
        return Err(Error::NonFinite { what: "integrand", at: center });
    }
    Ok((value, err))
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive integration of `f` over the union of `[points[i], points[i+1]]`.
fn adapt<V, F>(mut f: F, points: &[f64], spec: &QuadratureSpec) -> Result<Integral<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gauss_kronrod_21(&mut f, w[0], w[1])?;
            evaluations += 21;
            heap.push(Panel { a: w[0], b: w[1], value, error });
        }
    }
    let total = |heap: &BinaryHeap<Panel<V>>| -> Option<(V, f64)> {
        let mut it = heap.iter();
        let first = it.next()?;
        let mut v = first.value.clone();
        let mut e = first.error;
        for p in it {
            v = v + p.value.clone();
            e += p.error;
        }
        Some((v, e))
    };
    let Some((mut value, mut error)) = total(&heap) else {
        return Err(Error::InvalidInput("empty integration range".into()));
    };
    let mut subdivisions = 0;
    loop {
        let tolerance = spec.abs_tol.max(spec.rel_tol * value.magnitude());
        if error <= tolerance {
            return Ok(Integral { value, error, evaluations });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NotConverged { what: "adaptive quadrature", achieved: error, target: tolerance });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel cannot be split further in floating point; accept what we have
            // only if the remaining error is within a loose bound.
            if error <= 100.0 * tolerance {
                heap.push(worst);
                return Ok(Integral { value, error, evaluations });
            }
            return Err(Error::NotConverged { what: "adaptive quadrature", achieved: error, target: tolerance });
        }
        let (v1, e1) = gauss_kronrod_21(&mut f, worst.a, mid)?;
        let (v2, e2) = gauss_kronrod_21(&mut f, mid, worst.b)?;
        evaluations += 42;
        subdivisions += 1;
        value = value - worst.value + v1.clone() + v2.clone();
        error += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        if subdivisions % 64 == 0 || error <= spec.abs_tol.max(spec.rel_tol * value.magnitude()) {
            // Resum to remove drift from the incremental updates.
            let (v, e) = total(&heap).expect("heap is non-empty");
            value = v;
            error = e;
        }
    }
}

/// Integrates `f` over [a, b], splitting first at any interior `breaks`.
pub fn integrate<V, F>(f: F, a: f64, b: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<Integral<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!("finite bounds required, got [{a}, {b}]")));
    }
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut points = vec![lo];
    let mut interior: Vec<f64> = breaks.iter().copied().filter(|x| *x > lo && *x < hi).collect();
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    points.extend(interior);
    points.push(hi);
    if hi == lo {
        // Zero-width interval: integrate a zero value of the right shape.
        let mut f = f;
        let v = f(lo)? * 0.0;
        return Ok(Integral { value: v, error: 0.0, evaluations: 1 });
    }
    let mut out = adapt(f, &points, spec)?;
    out.value = out.value * sign;
    Ok(out)
}

/// Integrates `f` over [a, inf): the finite part up to the largest breakpoint
/// adaptively, and the tail through a change of variables chosen by `tail`.
pub fn integrate_to_infinity<V, F>(
    mut f: F,
    a: f64,
    breaks: &[f64],
    tail: Tail,
    spec: &QuadratureSpec,
) -> Result<Integral<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let cut = breaks.iter().copied().filter(|x| x.is_finite()).fold(a, f64::max);
    let (finite, split_tol) = if cut > a {
        let part = integrate(&mut f, a, cut, breaks, &spec.with_rel_tol(0.5 * spec.rel_tol))?;
        (Some(part), 0.5)
    } else {
        (None, 1.0)
    };
    let tail_spec = QuadratureSpec { rel_tol: split_tol * spec.rel_tol, ..*spec };
    let tail_part = match tail {
        Tail::Exponential { scale } => {
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(Error::InvalidInput(format!("tail scale must be positive, got {scale}")));
            }
            // x = cut + scale * u / (1 - u), u in [0, 1).
            adapt(
                |u: f64| {
                    let one_minus = 1.0 - u;
                    if one_minus <= 0.0 {
                        return Ok(f(cut)? * 0.0);
                    }
                    let x = cut + scale * u / one_minus;
                    let jac = scale / (one_minus * one_minus);
                    if !x.is_finite() {
                        return Ok(f(cut)? * 0.0);
                    }
                    Ok(f(x)? * jac)
                },
                &[0.0, 0.5, 0.9, 1.0],
                &tail_spec,
            )?
        }
        Tail::Algebraic { decay, scale } => {
            if !(decay > 1.0) || !(scale > 0.0) {
                return Err(Error::InvalidInput(format!("algebraic tail needs decay > 1 and scale > 0, got {decay}, {scale}")));
            }
            // x = cut + scale * (u^(-1/(p-1)) - 1), u in (0, 1]; an integrand
            // decaying like x^-p becomes bounded in u.
            let q = 1.0 / (decay - 1.0);
            adapt(
                |u: f64| {
                    if u <= 0.0 {
                        return Ok(f(cut)? * 0.0);
                    }
                    let x = cut + scale * (u.powf(-q) - 1.0);
                    let jac = scale * q * u.powf(-q - 1.0);
                    if !x.is_finite() || !jac.is_finite() {
                        return Ok(f(cut)? * 0.0);
                    }
                    Ok(f(x)? * jac)
                },
                &[0.0, 1e-6, 1e-3, 0.1, 1.0],
                &tail_spec,
            )?
        }
    };
    Ok(match finite {
        Some(part) => Integral {
            value: part.value + tail_part.value,
            error: part.error + tail_part.error,
            evaluations: part.evaluations + tail_part.evaluations,
        },
        None => tail_part,
    })
}

/// Fixed 10-point Gauss-Legendre rule on [a, b], for smooth integrands on
/// short panels where adaptivity is wasted effort.
pub fn gauss_legendre_10<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (k, w) in WG.iter().enumerate() {
        let dx = half * XGK[2 * k + 1];
        sum += w * (f(center - dx) + f(center + dx));
    }
    sum * half
}

/// Generalized Gauss-Laguerre rule for the weight `x^a e^{-x}` on [0, inf),
/// built by the Golub-Welsch eigenvalue method.
#[derive(Clone, Debug)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLaguerre {
    pub fn new(n: usize, a: f64) -> Result<Self> {
        if n == 0 || !(a > -1.0) {
            return Err(Error::InvalidInput(format!("Gauss-Laguerre needs n >= 1 and a > -1, got n={n}, a={a}")));
        }
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            jacobi[(i, i)] = 2.0 * i as f64 + a + 1.0;
            if i + 1 < n {
                let off = ((i as f64 + 1.0) * (i as f64 + 1.0 + a)).sqrt();
                jacobi[(i, i + 1)] = off;
                jacobi[(i + 1, i)] = off;
            }
        }
        let eig = SymmetricEigen::new(jacobi);
        let mu0 = statrs::function::gamma::gamma(a + 1.0);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let v0 = eig.eigenvectors[(0, k)];
                (eig.eigenvalues[k], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(GaussLaguerre {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    /// Approximates `integral_0^inf x^a e^{-x} f(x) dx`.
    pub fn apply<F: FnMut(f64) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            if *w == 0.0 {
                continue;
            }
            sum += w * f(*x)?;
        }
        Ok(sum)
    }
}

/// `E[f(X)]` for `X ~ Gamma(shape, rate)` with integer-valued or real `shape`:
/// a 64-node generalized Gauss-Laguerre rule checked against a 32-node rule,
/// falling back to adaptive quadrature when the two disagree.
pub fn expect_gamma<F>(mut f: F, shape: f64, rate: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(shape > 0.0 && rate > 0.0) {
        return Err(Error::InvalidInput(format!("Gamma expectation needs positive shape and rate, got {shape}, {rate}")));
    }
    let norm = statrs::function::gamma::gamma(shape);
    let fine = GaussLaguerre::new(64, shape - 1.0)?.apply(|x| f(x / rate))? / norm;
    let coarse = GaussLaguerre::new(32, shape - 1.0)?.apply(|x| f(x / rate))? / norm;
    if (fine - coarse).abs() <= spec.abs_tol.max(spec.rel_tol * fine.abs()) {
        return Ok(fine);
    }
    let ln_norm = statrs::function::gamma::ln_gamma(shape);
    let density = |x: f64| ((shape - 1.0) * x.ln() - x - ln_norm).exp();
    let mode = (shape - 1.0).max(0.0);
    let out = integrate_to_infinity(
        |x: f64| if x <= 0.0 { Ok(0.0) } else { Ok(density(x) * f(x / rate)?) },
        0.0,
        &[mode, mode + 4.0 * shape.sqrt() + 4.0],
        Tail::Exponential { scale: 1.0 },
        spec,
    )?;
    Ok(out.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let spec = QuadratureSpec::default();
        let r = integrate(|x: f64| Ok(x.powi(7) - 3.0 * x * x), -1.0, 2.0, &[], &spec).unwrap();
        let exact = (256.0 - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let spec = QuadratureSpec::default();
        let r = integrate(|x: f64| Ok(x.sqrt().recip()), 0.0, 1.0, &[], &spec);
        // The integrand blows up at 0 but the integral is 2.
        let r = r.unwrap();
        assert!((r.value - 2.0).abs() < 1e-7, "{}", r.value);
    }

    #[test]
    fn exponential_tail() {
        let spec = QuadratureSpec::default();
        let r = integrate_to_infinity(|x: f64| Ok((-x).exp()), 0.0, &[], Tail::Exponential { scale: 1.0 }, &spec).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn algebraic_tail() {
        let spec = QuadratureSpec::default();
        // integral_1^inf x^-1.375 dx = 1/0.375
        let r = integrate_to_infinity(
            |x: f64| Ok(x.powf(-1.375)),
            1.0,
            &[],
            Tail::Algebraic { decay: 1.375, scale: 1.0 },
            &spec,
        )
        .unwrap();
        assert!((r.value - 1.0 / 0.375).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn complex_and_batch_agree() {
        let spec = QuadratureSpec::default();
        let s = Complex64::new(0.5, 2.0);
        let scalar = integrate(|x: f64| Ok((-s * x).exp()), 0.0, 3.0, &[], &spec).unwrap().value;
        let batch = integrate(|x: f64| Ok(Batch(vec![(-s * x).exp(), Complex64::new(x, 0.0)])), 0.0, 3.0, &[], &spec)
            .unwrap()
            .value;
        let exact = (Complex64::new(1.0, 0.0) - (-s * 3.0).exp()) / s;
        assert!((scalar - exact).norm() < 1e-12);
        assert!((batch.0[0] - exact).norm() < 1e-12);
        assert!((batch.0[1].re - 4.5).abs() < 1e-12);
    }

    #[test]
    fn laguerre_moments() {
        let rule = GaussLaguerre::new(64, 2.0).unwrap();
        // integral x^2 e^-x x^3 = Gamma(6) = 120
        let v = rule.apply(|x| Ok(x.powi(3))).unwrap();
        assert!((v - 120.0).abs() < 1e-9 * 120.0, "{v}");
    }

    #[test]
    fn gamma_expectation() {
        let spec = QuadratureSpec::default();
        // E[exp(-c X)] for X ~ Gamma(3, 2) is (2/(2+c))^3
        let v = expect_gamma(|x| Ok((-0.7 * x).exp()), 3.0, 2.0, &spec).unwrap();
        assert!((v - (2.0f64 / 2.7).powi(3)).abs() < 1e-12);
    }
}
