//! Closed forms and quadrature expressions for the distance laws and the
//! shot-noise Laplace transforms of the UAV network.
//!
//! Two reductions carry most of the weight. When the elevation angle is
//! independent of the projected distance, the effective squared distances
//! `L^(-2/alpha) |U|^2` form a homogeneous Poisson process on the half line
//! with rate `pi * lambda * omega`. When the altitude is independent of the
//! projected distance, they form a Poisson process with mean measure
//! `pi * lambda * M(y)`, where `M` is described by [`MeanMeasure`].

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::inversion::{invert_laplace, Analyticity, InversionSpec};
use crate::model::{AltitudeDistribution, AngleDistribution, Elevation, LosModel, NetworkConfig, WeightModel};
use crate::quadrature::{expect_gamma, gauss_legendre_10, integrate, integrate_to_infinity, QuadratureSpec, Tail};

/// `omega = E[cos^2(Theta) (rho(Theta) (1 - ell^(2/alpha)) + ell^(2/alpha))]`: the
/// factor by which line-of-sight thinning and elevation shrink the density of
/// effective squared distances when the angle is independent of distance.
pub fn density_factor(cfg: &NetworkConfig, angle: &AngleDistribution, quad: &QuadratureSpec) -> Result<f64> {
    let shrink = cfg.nlos_shrink();
    angle.expect(
        |theta| {
            let c = theta.cos();
            Ok(c * c * (cfg.los.probability(theta) * (1.0 - shrink) + shrink))
        },
        quad,
    )
}

/// Average LoS probability `E[rho(Theta)]`.
pub fn mean_los_probability(cfg: &NetworkConfig, angle: &AngleDistribution, quad: &QuadratureSpec) -> Result<f64> {
    angle.expect(|theta| Ok(cfg.los.probability(theta)), quad)
}

/// Mean measure of the effective squared distances, divided by `pi * lambda`.
///
/// `cumulative(y)` counts the expected number of UAVs (per unit `pi * lambda`)
/// whose effective squared distance is at most `y`; `density` is its derivative.
pub trait MeanMeasure: Send + Sync {
    fn cumulative(&self, y: f64) -> Result<f64>;
    fn density(&self, y: f64) -> Result<f64>;
    /// Points where the density is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    /// Infimum of the support of the density.
    fn support_start(&self) -> f64 {
        0.0
    }
    /// Limit of the density as `y -> inf`.
    fn asymptotic_density(&self) -> f64;
}

/// `M(y) = omega * y`, the angle-independent case.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearMeasure {
    pub omega: f64,
}

impl LinearMeasure {
    pub fn for_angle(cfg: &NetworkConfig, angle: &AngleDistribution, quad: &QuadratureSpec) -> Result<Self> {
        Ok(LinearMeasure { omega: density_factor(cfg, angle, quad)? })
    }
}

impl MeanMeasure for LinearMeasure {
    fn cumulative(&self, y: f64) -> Result<f64> {
        Ok(self.omega * y.max(0.0))
    }
    fn density(&self, y: f64) -> Result<f64> {
        Ok(if y >= 0.0 { self.omega } else { 0.0 })
    }
    fn asymptotic_density(&self) -> f64 {
        self.omega
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A mean measure supplied directly as a pair of functions.
#[derive(Clone)]
pub struct CustomMeasure {
    pub cumulative: ScalarFn,
    pub density: ScalarFn,
    pub breakpoints: Vec<f64>,
    pub support_start: f64,
    pub asymptotic_density: f64,
}

impl MeanMeasure for CustomMeasure {
    fn cumulative(&self, y: f64) -> Result<f64> {
        Ok((self.cumulative)(y))
    }
    fn density(&self, y: f64) -> Result<f64> {
        Ok((self.density)(y))
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
    fn support_start(&self) -> f64 {
        self.support_start
    }
    fn asymptotic_density(&self) -> f64 {
        self.asymptotic_density
    }
}

/// Tabulated `R(phi) = integral_0^phi rho(psi) cos(psi) dpsi` on [0, pi/2].
#[derive(Clone, Debug)]
struct LosCosineTable {
    los: LosModel,
    step: f64,
    cumulative: Vec<f64>,
}

impl LosCosineTable {
    const PANELS: usize = 1024;

    fn new(los: LosModel) -> Self {
        let step = FRAC_PI_2 / Self::PANELS as f64;
        let mut cumulative = Vec::with_capacity(Self::PANELS + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for k in 0..Self::PANELS {
            let a = k as f64 * step;
            acc += gauss_legendre_10(|p| los.probability(p) * p.cos(), a, a + step);
            cumulative.push(acc);
        }
        LosCosineTable { los, step, cumulative }
    }

    fn integral(&self, phi: f64) -> f64 {
        let phi = phi.clamp(0.0, FRAC_PI_2);
        let k = ((phi / self.step) as usize).min(Self::PANELS - 1);
        let a = k as f64 * self.step;
        let los = self.los;
        self.cumulative[k] + gauss_legendre_10(|p| los.probability(p) * p.cos(), a, phi)
    }
}

/// Mean measure when the altitude is independent of the projected distance.
#[derive(Clone, Debug)]
pub struct AltitudeMeasure {
    los: LosModel,
    shrink: f64,
    altitude: AltitudeDistribution,
    table: LosCosineTable,
    quad: QuadratureSpec,
}

impl AltitudeMeasure {
    pub fn new(cfg: &NetworkConfig, altitude: &AltitudeDistribution, quad: &QuadratureSpec) -> Result<Self> {
        altitude.validate()?;
        Ok(AltitudeMeasure {
            los: cfg.los,
            shrink: cfg.nlos_shrink(),
            altitude: *altitude,
            table: LosCosineTable::new(cfg.los),
            quad: *quad,
        })
    }

    /// `integral_{z1}^{z2} rho(atan(h / sqrt(z))) dz`, integrated in `w = sqrt(z)`.
    fn los_mass(&self, h: f64, z1: f64, z2: f64) -> Result<f64> {
        if z2 <= z1 {
            return Ok(0.0);
        }
        if h == 0.0 {
            return Ok(self.los.probability(0.0) * (z2 - z1));
        }
        let los = self.los;
        let w1 = z1.sqrt();
        let w2 = z2.sqrt();
        // The sigmoid switches where atan(h / w) crosses ln(c2) / c1.
        let centre = h / (los.c2.ln() / los.c1).tan();
        let v = integrate(|w: f64| Ok(2.0 * w * los.probability(h.atan2(w))), w1, w2, &[centre], &self.quad)?.value;
        Ok(v)
    }

    /// Contribution to the density from altitudes in [lo, hi] (uniformly
    /// weighted, without the 1/(hi - lo) factor) via `h = sqrt(y) sin(phi)`.
    fn uniform_density_part(&self, lo: f64, hi: f64, y: f64, los_branch: bool) -> f64 {
        if y <= lo * lo {
            return 0.0;
        }
        let root = y.sqrt();
        let phi_lo = (lo / root).min(1.0).asin();
        let phi_hi = (hi / root).min(1.0).asin();
        let r_lo = self.table.integral(phi_lo);
        let r_hi = self.table.integral(phi_hi);
        if los_branch {
            root * (r_hi - r_lo)
        } else {
            root * ((phi_hi.sin() - r_hi) - (phi_lo.sin() - r_lo))
        }
    }

    /// `E_H[1(y > H^2) rho(...)]` for exponential altitudes, via the angle substitution.
    fn exponential_density_part(&self, rate: f64, y: f64, los_branch: bool) -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        let root = y.sqrt();
        let los = self.los;
        let centre = (los.c2.ln() / los.c1).min(FRAC_PI_2);
        let v = integrate(
            |phi: f64| {
                let r = los.probability(phi);
                let p = if los_branch { r } else { 1.0 - r };
                Ok(rate * (-rate * root * phi.sin()).exp() * p * root * phi.cos())
            },
            0.0,
            FRAC_PI_2,
            &[centre],
            &self.quad,
        )?
        .value;
        Ok(v)
    }

    fn ptp_omega(&self, h0: f64) -> f64 {
        let theta = h0.atan();
        let c = theta.cos();
        c * c * (self.los.probability(theta) * (1.0 - self.shrink) + self.shrink)
    }
}

impl MeanMeasure for AltitudeMeasure {
    fn cumulative(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        match self.altitude {
            AltitudeDistribution::Degenerate { h } => {
                let h2 = h * h;
                let nlos_end = (y * self.shrink - h2).max(0.0);
                let los_end = (y - h2).max(0.0);
                Ok(nlos_end + self.los_mass(h, nlos_end, los_end)?)
            }
            AltitudeDistribution::ProportionalToProjection { h0 } => Ok(self.ptp_omega(h0) * y),
            _ => {
                let lo = self.support_start();
                if y <= lo {
                    return Ok(0.0);
                }
                let v = integrate(|u| self.density(u), lo, y, &self.breakpoints(), &self.quad)?.value;
                Ok(v)
            }
        }
    }

    fn density(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        let yn = y * self.shrink;
        match self.altitude {
            AltitudeDistribution::Degenerate { h } => {
                let h2 = h * h;
                let mut d = 0.0;
                if y > h2 {
                    d += self.los.probability(h.atan2((y - h2).sqrt()));
                }
                if yn > h2 {
                    d += self.shrink * (1.0 - self.los.probability(h.atan2((yn - h2).sqrt())));
                }
                Ok(d)
            }
            AltitudeDistribution::Uniform { lo, hi } => {
                let mut d = self.uniform_density_part(lo, hi, y, true);
                if self.shrink > 0.0 {
                    d += self.shrink * self.uniform_density_part(lo, hi, yn, false);
                }
                Ok(d / (hi - lo))
            }
            AltitudeDistribution::Exponential { rate } => {
                let mut d = self.exponential_density_part(rate, y, true)?;
                if self.shrink > 0.0 {
                    d += self.shrink * self.exponential_density_part(rate, yn, false)?;
                }
                Ok(d)
            }
            AltitudeDistribution::ProportionalToProjection { h0 } => Ok(self.ptp_omega(h0)),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let squares: Vec<f64> = match self.altitude {
            AltitudeDistribution::Degenerate { h } => vec![h * h],
            AltitudeDistribution::Uniform { lo, hi } => vec![lo * lo, hi * hi],
            _ => Vec::new(),
        };
        let mut out = squares.clone();
        if self.shrink > 0.0 {
            out.extend(squares.iter().map(|s| s / self.shrink));
        }
        out.retain(|x| *x > 0.0);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn support_start(&self) -> f64 {
        match self.altitude {
            AltitudeDistribution::Degenerate { h } => h * h,
            AltitudeDistribution::Uniform { lo, .. } => lo * lo,
            _ => 0.0,
        }
    }

    fn asymptotic_density(&self) -> f64 {
        match self.altitude {
            AltitudeDistribution::ProportionalToProjection { h0 } => self.ptp_omega(h0),
            _ => {
                let r0 = self.los.probability(0.0);
                r0 + self.shrink * (1.0 - r0)
            }
        }
    }
}

/// Mean measure of `{i : W_i L_i |U_i|^-alpha > r}` divided by `pi * lambda`,
/// for altitudes independent of distance and a general weight law.
pub fn mean_measure_general(
    r: f64,
    cfg: &NetworkConfig,
    altitude: &AltitudeDistribution,
    weight: &WeightModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("threshold must be positive, got {r}")));
    }
    let delta = cfg.delta();
    let los = cfg.los;
    let ell = cfg.ell;
    let half_alpha = 0.5 * cfg.alpha;
    if let Some(w0) = weight.deterministic_value() {
        // Indicator weights: count projections inside the LoS and NLoS radii.
        let y = (w0 / r).powf(delta);
        let yn = y * cfg.nlos_shrink();
        let measure = AltitudeMeasure::new(cfg, altitude, quad)?;
        return altitude.expect(
            |elev| match elev {
                Elevation::Altitude(h) => {
                    let h2 = h * h;
                    let los_part = measure.los_mass(h, 0.0, (y - h2).max(0.0))?;
                    let nlos_end = (yn - h2).max(0.0);
                    let nlos_part = nlos_end - measure.los_mass(h, 0.0, nlos_end)?;
                    Ok(los_part + nlos_part)
                }
                Elevation::Angle(theta) => {
                    let c2 = theta.cos().powi(2);
                    let p = los.probability(theta);
                    Ok(p * y * c2 + (1.0 - p) * yn * c2)
                }
            },
            quad,
        );
    }
    let scale = (weight.mean() / r).powf(delta);
    altitude.expect(
        |elev| {
            let integrand = |z: f64| {
                let (d2, theta) = elev.geometry(z);
                let p = los.probability(theta);
                let base = r * d2.powf(half_alpha);
                let mut v = p * weight.ccdf(base);
                if ell > 0.0 {
                    v += (1.0 - p) * weight.ccdf(base / ell);
                }
                Ok(v)
            };
            let v = integrate_to_infinity(integrand, 0.0, &[scale], Tail::Exponential { scale }, quad)?.value;
            Ok(v)
        },
        quad,
    )
}

/// CDF of the strongest received weight `R* = max_i W_i L_i |U_i|^-alpha` when
/// the angle is independent of distance.
pub fn nearest_cdf_apil(
    r: f64,
    cfg: &NetworkConfig,
    angle: &AngleDistribution,
    weight: &WeightModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if r <= 0.0 {
        return Ok(0.0);
    }
    let delta = cfg.delta();
    let omega = density_factor(cfg, angle, quad)?;
    Ok((-PI * cfg.lambda * r.powf(-delta) * weight.moment(delta) * omega).exp())
}

/// CDF of `R*` when the altitude is independent of distance.
pub fn nearest_cdf_apdl(
    r: f64,
    cfg: &NetworkConfig,
    altitude: &AltitudeDistribution,
    weight: &WeightModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if r <= 0.0 {
        return Ok(0.0);
    }
    Ok((-PI * cfg.lambda * mean_measure_general(r, cfg, altitude, weight, quad)?).exp())
}

/// Interference beyond the nearest point, `integral_1^inf [1 - L_W(u z^(-1/v))] dz`,
/// for complex `u` with non-negative real part and `0 < v < 1`.
pub fn excess_interference_complex(u: Complex64, v: f64, weight: &WeightModel, quad: &QuadratureSpec) -> Result<Complex64> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::InvalidInput(format!("exponent must lie in (0, 1), got {v}")));
    }
    if u.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let inv_v = 1.0 / v;
    if u.norm() <= 1.0 {
        let r = integrate_to_infinity(
            |z: f64| Ok(weight.one_minus_laplace(u * z.powf(-inv_v))),
            1.0,
            &[],
            Tail::Algebraic { decay: inv_v, scale: 1.0 },
            quad,
        )?;
        return Ok(r.value);
    }
    // Large |u|: subtract the part on (0, 1) from the full-range integral,
    // integral_0^inf [1 - L_W(u z^(-1/v))] dz = Gamma(1 - v) E[W^v] u^v.
    let full = u.powf(v) * gamma(1.0 - v) * weight.moment(v);
    let near = integrate(
        |t: f64| {
            if t <= 0.0 {
                return Ok(Complex64::new(1.0, 0.0));
            }
            Ok(weight.one_minus_laplace(u * t.powf(-inv_v)))
        },
        0.0,
        1.0,
        &[],
        quad,
    )?
    .value;
    Ok(full - near)
}

/// Real-argument version of [`excess_interference_complex`].
pub fn excess_interference(u: f64, v: f64, weight: &WeightModel, quad: &QuadratureSpec) -> Result<f64> {
    if u < 0.0 {
        return Err(Error::InvalidInput(format!("argument must be non-negative, got {u}")));
    }
    Ok(excess_interference_complex(Complex64::new(u, 0.0), v, weight, quad)?.re)
}

/// [`excess_interference_complex`] for unit-mean exponential fading, which has
/// the closed part `u^v pi v / sin(pi v)`.
pub fn excess_interference_rayleigh(u: Complex64, v: f64, quad: &QuadratureSpec) -> Result<Complex64> {
    excess_interference_complex(u, v, &WeightModel::Exponential { power: 1.0 }, quad)
}

/// Expected loss `1 - E[exp(-s W L d^-alpha)]` of one UAV at squared projected
/// distance `z` with the given elevation, averaged over its LoS state.
pub fn loss_kernel(s: Complex64, z: f64, elev: &Elevation, cfg: &NetworkConfig, weight: &WeightModel) -> Complex64 {
    let (d2, theta) = elev.geometry(z);
    let p = cfg.los.probability(theta);
    let path = d2.powf(-0.5 * cfg.alpha);
    let mut v = weight.one_minus_laplace(s * path) * p;
    if cfg.ell > 0.0 {
        v += weight.one_minus_laplace(s * (cfg.ell * path)) * (1.0 - p);
    }
    v
}

/// `integral_{z_from}^inf E_H[loss_kernel(s, z, H)] dz`: the exponent (over
/// `pi * lambda`) of the Laplace functional of the shot noise generated by UAVs
/// whose projections lie beyond `sqrt(z_from)`.
pub fn shot_exponent_apdl(
    s: Complex64,
    z_from: f64,
    cfg: &NetworkConfig,
    altitude: &AltitudeDistribution,
    weight: &WeightModel,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    if s.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let delta = cfg.delta();
    let knee = (s.norm() * weight.mean()).powf(delta);
    let centre_slope = (cfg.los.c2.ln() / cfg.los.c1).tan().powi(-2);
    altitude.expect(
        |elev| {
            let mut breaks = vec![knee];
            if let Elevation::Altitude(h) = elev {
                breaks.push(h * h);
                breaks.push(h * h * centre_slope);
            }
            breaks.retain(|b| *b > z_from && b.is_finite());
            let cut = breaks.iter().copied().fold(z_from, f64::max);
            let scale = cut.max(knee).max(1.0);
            let r = integrate_to_infinity(
                |z: f64| Ok(loss_kernel(s, z, &elev, cfg, weight)),
                z_from,
                &breaks,
                Tail::Algebraic { decay: 0.5 * cfg.alpha, scale },
                quad,
            )?;
            Ok(r.value)
        },
        quad,
    )
}

/// Laplace transform of the total shot noise `T_0 = sum_i W_i L_i |U_i|^-alpha`
/// when the angle is independent of distance.
pub fn laplace_t0_apil(s: f64, cfg: &NetworkConfig, angle: &AngleDistribution, weight: &WeightModel, quad: &QuadratureSpec) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::InvalidInput(format!("Laplace argument must be non-negative, got {s}")));
    }
    Ok((-s.powf(cfg.delta()) * shot_noise_stable_scale(cfg, angle, weight, quad)?).exp())
}

/// Scale `c` in `L_T0(s) = exp(-c s^(2/alpha))`: with the angle independent of
/// distance the shot noise is a positive stable variable of index `2/alpha`.
pub fn shot_noise_stable_scale(cfg: &NetworkConfig, angle: &AngleDistribution, weight: &WeightModel, quad: &QuadratureSpec) -> Result<f64> {
    let delta = cfg.delta();
    let omega = density_factor(cfg, angle, quad)?;
    Ok(PI * cfg.lambda * weight.moment(delta) * gamma(1.0 - delta) * omega)
}

/// Density of `T_0` at `x > 0` by numerical Laplace inversion, when the angle
/// is independent of distance.
pub fn shot_noise_density_apil(
    x: f64,
    cfg: &NetworkConfig,
    angle: &AngleDistribution,
    weight: &WeightModel,
    quad: &QuadratureSpec,
    inversion: &InversionSpec,
) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidInput(format!("density point must be positive, got {x}")));
    }
    let delta = cfg.delta();
    // T_0 = c^(1/delta) S with S of unit scale; invert S and rescale.
    let unit = shot_noise_stable_scale(cfg, angle, weight, quad)?.powf(1.0 / delta);
    // exp(-s^delta) stays bounded on the cut plane only for delta <= 1/2.
    let region = if delta <= 0.5 { Analyticity::CutPlane } else { Analyticity::RightHalfPlane };
    let f = invert_laplace(|s| Ok((-s.powf(delta)).exp()), x / unit, region, inversion)?;
    Ok(f / unit)
}

/// Density of the Levy law with transform `exp(-c sqrt(s))`, the law of `T_0`
/// for path-loss exponent 4.
pub fn levy_density(x: f64, c: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    c / (2.0 * PI.sqrt() * x.powf(1.5)) * (-c * c / (4.0 * x)).exp()
}

/// Laplace transform of `T_0` when the altitude is independent of distance.
pub fn laplace_t0_apdl(s: f64, cfg: &NetworkConfig, altitude: &AltitudeDistribution, weight: &WeightModel, quad: &QuadratureSpec) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::InvalidInput(format!("Laplace argument must be non-negative, got {s}")));
    }
    let e = shot_exponent_apdl(Complex64::new(s, 0.0), 0.0, cfg, altitude, weight, quad)?;
    Ok((-PI * cfg.lambda * e.re).exp())
}

/// Shared body of the angle-independent `T_K` transforms; `s_of` maps the
/// squared projected distance of the K-th nearest UAV to the Laplace argument.
fn tk_apil_with<S>(
    s_of: S,
    k: u32,
    cfg: &NetworkConfig,
    angle: &AngleDistribution,
    weight: &WeightModel,
    quad: &QuadratureSpec,
) -> Result<f64>
where
    S: Fn(f64) -> f64,
{
    if k == 0 {
        return Err(Error::InvalidInput("K must be at least one".into()));
    }
    let v = cfg.delta();
    let half_alpha = 0.5 * cfg.alpha;
    let pl = PI * cfg.lambda;
    expect_gamma(
        |d| {
            if d <= 0.0 {
                return Ok(1.0);
            }
            let s = s_of(d);
            let scale = s * d.powf(-half_alpha);
            let inner = angle.expect(
                |theta| {
                    let c = theta.cos().powf(cfg.alpha);
                    let p = cfg.los.probability(theta);
                    let mut acc = p * excess_interference(scale * c, v, weight, quad)?;
                    if cfg.ell > 0.0 {
                        acc += (1.0 - p) * excess_interference(scale * cfg.ell * c, v, weight, quad)?;
                    }
                    Ok(acc)
                },
                quad,
            )?;
            Ok((-pl * d * inner).exp())
        },
        k as f64,
        pl,
        quad,
    )
}

/// Laplace transform of `T_K`, the shot noise without the `K` UAVs with the
/// nearest projections, when the angle is independent of distance.
pub fn laplace_tk_apil(
    s: f64,
    k: u32,
    cfg: &NetworkConfig,
    angle: &AngleDistribution,
    weight: &WeightModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if k == 0 {
        return laplace_t0_apil(s, cfg, angle, weight, quad);
    }
    tk_apil_with(|_| s, k, cfg, angle, weight, quad)
}

/// `E[exp(-zeta sec^alpha(theta) |X_K|^alpha T_K)]` for a fixed elevation
/// `theta`, evaluated by averaging over the K-th nearest projection.
pub fn laplace_tk_apil_normalized(
    zeta: f64,
    k: u32,
    cfg: &NetworkConfig,
    theta: f64,
    weight: &WeightModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let sec_alpha = theta.cos().powf(-cfg.alpha);
    let half_alpha = 0.5 * cfg.alpha;
    let angle = AngleDistribution::Degenerate { theta };
    tk_apil_with(|d| zeta * sec_alpha * d.powf(half_alpha), k, cfg, &angle, weight, quad)
}

/// Closed form of [`laplace_tk_apil_normalized`].
pub fn laplace_tk_apil_normalized_closed(
    zeta: f64,
    k: u32,
    cfg: &NetworkConfig,
    theta: f64,
    weight: &WeightModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let v = cfg.delta();
    let p = cfg.los.probability(theta);
    let mut base = 1.0 + p * excess_interference(zeta, v, weight, quad)?;
    if cfg.ell > 0.0 {
        base += (1.0 - p) * excess_interference(zeta * cfg.ell, v, weight, quad)?;
    }
    Ok(base.powi(-(k as i32)))
}

/// Laplace transform of `T_K` when the altitude is independent of distance.
pub fn laplace_tk_apdl(
    s: f64,
    k: u32,
    cfg: &NetworkConfig,
    altitude: &AltitudeDistribution,
    weight: &WeightModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if k == 0 {
        return laplace_t0_apdl(s, cfg, altitude, weight, quad);
    }
    let pl = PI * cfg.lambda;
    let s = Complex64::new(s, 0.0);
    expect_gamma(
        |d| Ok((-pl * shot_exponent_apdl(s, d, cfg, altitude, weight, quad)?.re).exp()),
        k as f64,
        pl,
        quad,
    )
}
