//! Fourier transform of polygon indicators.
//!
//! For `xi = r * Theta` with `|Theta| = 1`, integrating `exp(-2 pi i xi.t)` over
//! the polygon and applying Green's formula side by side gives
//!
//! ```text
//! chi^(r Theta) = i / (2 pi^2 r^2) * sum_h (Theta.nu_h / Theta.tau_h)
//!                 * exp(-pi i r Theta.(P_h + P_{h+1})) * sin(pi r ell_h Theta.tau_h)
//! ```
//!
//! The quotient `(Theta.nu / Theta.tau) sin(pi r ell Theta.tau)` has a
//! removable singularity when the direction is normal to a side; below
//! [`SINGULAR_EPS`] it is replaced by a three-term expansion. For
//! `|xi| * diameter < 1/2` the transform is summed from its moment series about
//! the centroid instead.
//!
//! [`chi_hat_oracle`] computes the same integral by brute-force Gauss–Legendre
//! quadrature over a fan triangulation and shares no code with the closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::classify::{circumscribed_circle, in_family_p, DEFAULT_TOL};
use crate::error::{invalid, Error, Result};
use crate::geometry::Polygon;
use crate::quadrature::GaussLegendre;
use crate::vec2::Vec2;

/// Below this `|Theta.tau_h|` the side quotient is evaluated by its series.
pub const SINGULAR_EPS: f64 = 1e-6;

/// Angular samples per unit of `rho * diameter` required by the trapezoid rule.
pub const ANGULAR_RESOLUTION: f64 = 16.0;

/// Maximum number of wavelengths spanned by one Gauss–Legendre panel of the
/// quadrature oracle.
pub const ORACLE_PANEL_WAVELENGTHS: f64 = 2.0;

/// The oracle refuses frequencies with `|f| * diameter` above this.
pub const ORACLE_MAX_WAVELENGTHS: f64 = 1e4;

/// Below this `|xi| * diameter` the boundary sum cancels badly and the
/// transform is evaluated from its moment series about the centroid.
const SMALL_FREQUENCY: f64 = 0.5;

/// Highest moment order of the small-frequency series.
const MAX_MOMENT_ORDER: usize = 60;

/// Point of the frequency plane, in cycles per unit length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frequency(Vec2);

impl Frequency {
    pub fn cartesian(x: f64, y: f64) -> Self {
        Self(Vec2::new(x, y))
    }

    /// `rho * (cos theta, sin theta)`.
    pub fn polar(rho: f64, theta: f64) -> Self {
        Self(Vec2::from_angle(theta) * rho)
    }

    pub fn xi(self) -> Vec2 {
        self.0
    }

    pub fn rho(self) -> f64 {
        self.0.norm()
    }

    pub fn theta(self) -> f64 {
        self.0.y.atan2(self.0.x)
    }
}

impl From<Vec2> for Frequency {
    fn from(v: Vec2) -> Self {
        Self(v)
    }
}

/// `num * sin(a * den) / den`, continuous at `den = 0`.
#[inline]
pub(crate) fn sin_ratio(num: f64, den: f64, a: f64) -> f64 {
    if den.abs() < SINGULAR_EPS {
        let z2 = (a * den) * (a * den);
        num * a * (1.0 - z2 / 6.0 + z2 * z2 / 120.0)
    } else {
        num * (a * den).sin() / den
    }
}

#[derive(Clone, Copy, Debug)]
struct SideTerm {
    /// `P_h + P_{h+1}`
    sum: Vec2,
    tau: Vec2,
    nu: Vec2,
    ell: f64,
}

/// Precomputed side data for repeated evaluation of one polygon's transform.
#[derive(Clone, Debug)]
pub struct IndicatorTransform {
    sides: Vec<SideTerm>,
    area: f64,
    centroid: Vec2,
    diameter: f64,
    /// Fan triangles `(c, P_h, P_{h+1})` as `(P_h - c, P_{h+1} - c, area)`.
    fan: Vec<(Vec2, Vec2, f64)>,
    /// `max_h |P_h - c|`.
    reach: f64,
}

impl IndicatorTransform {
    pub fn new(p: &Polygon) -> Self {
        let sides = p
            .side_frames()
            .iter()
            .enumerate()
            .map(|(h, f)| SideTerm {
                sum: p.vertex(h) + p.vertex(h + 1),
                tau: f.tau,
                nu: f.nu,
                ell: f.ell,
            })
            .collect();
        let c = p.centroid();
        let fan = (0..p.len())
            .map(|h| {
                let a = p.vertex(h) - c;
                let b = p.vertex(h + 1) - c;
                (a, b, 0.5 * a.cross(b))
            })
            .collect();
        let reach = p
            .vertices()
            .iter()
            .map(|&v| (v - c).norm())
            .fold(0.0, f64::max);
        Self {
            sides,
            area: p.area(),
            centroid: c,
            diameter: p.diameter(),
            fan,
            reach,
        }
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Transform at radius `r >= 0` in the unit direction `dir`.
    #[inline]
    pub fn eval_dir(&self, r: f64, dir: Vec2) -> Complex64 {
        if r * self.diameter < SMALL_FREQUENCY {
            return self.moment_series(dir * r);
        }
        let mut re = 0.0;
        let mut im = 0.0;
        for s in &self.sides {
            let ratio = sin_ratio(dir.dot(s.nu), dir.dot(s.tau), PI * r * s.ell);
            let (sp, cp) = (-PI * r * dir.dot(s.sum)).sin_cos();
            re += ratio * cp;
            im += ratio * sp;
        }
        // multiply by i / (2 pi^2 r^2)
        let k = 1.0 / (2.0 * PI * PI * r * r);
        Complex64::new(-im * k, re * k)
    }

    /// `exp(-2 pi i xi.c) sum_m (-2 pi i)^m / m! int_P (xi.(t - c))^m dt`, with
    /// the triangle moments
    /// `int_T (xi.t)^m = 2|T| / ((m+1)(m+2)) sum_{i+j=m} (xi.a)^i (xi.b)^j`.
    fn moment_series(&self, xi: Vec2) -> Complex64 {
        let x = 2.0 * PI * xi.norm() * self.reach;
        let alphas: Vec<(f64, f64, f64)> = self
            .fan
            .iter()
            .map(|&(a, b, t)| (xi.dot(a), xi.dot(b), t))
            .collect();
        let mut h: Vec<f64> = vec![1.0; alphas.len()];
        let mut pa: Vec<f64> = vec![1.0; alphas.len()];
        let mut acc = Complex64::new(self.area, 0.0);
        let mut coef = Complex64::new(1.0, 0.0);
        let mut bound = 1.0;
        for m in 1..=MAX_MOMENT_ORDER {
            let mf = m as f64;
            coef *= Complex64::new(0.0, -2.0 * PI / mf);
            let mut moment = 0.0;
            for (i, &(a, b, t)) in alphas.iter().enumerate() {
                pa[i] *= a;
                h[i] = b * h[i] + pa[i];
                moment += 2.0 * t * h[i] / ((mf + 1.0) * (mf + 2.0));
            }
            acc += coef * moment;
            bound *= x / mf;
            if bound * (mf + 1.0) < 1e-18 {
                break;
            }
        }
        acc * Complex64::from_polar(1.0, -2.0 * PI * xi.dot(self.centroid))
    }

    pub fn eval(&self, xi: Vec2) -> Complex64 {
        let r = xi.norm();
        if r == 0.0 {
            return Complex64::new(self.area, 0.0);
        }
        self.eval_dir(r, xi * (1.0 / r))
    }

    /// Trapezoid mean of `|chi^(r Theta)|^2` over `n` equally spaced angles.
    /// For even `n`, `|chi^(-xi)| = |chi^(xi)|` halves the work.
    pub fn circle_mean_square(&self, r: f64, n: usize) -> f64 {
        assert!(n >= 1);
        let (count, step) = if n.is_multiple_of(2) {
            (n / 2, n)
        } else {
            (n, n)
        };
        let d = 2.0 * PI / step as f64;
        let mut acc = 0.0;
        for i in 0..count {
            acc += self.eval_dir(r, Vec2::from_angle(i as f64 * d)).norm_sqr();
        }
        acc / count as f64
    }

    /// Minimum trapezoid size for radius `r`.
    pub fn required_angles(&self, r: f64) -> usize {
        ((ANGULAR_RESOLUTION * r * self.diameter).ceil() as usize).max(1)
    }
}

/// Fourier transform `int_P exp(-2 pi i f.t) dt` in closed form.
pub fn chi_hat(p: &Polygon, f: Frequency) -> Complex64 {
    IndicatorTransform::new(p).eval(f.xi())
}

/// The specialised real form for a polygon inscribed in a circle centred at
/// the origin and symmetric about it, summing over one side of each opposite
/// pair:
///
/// ```text
/// (1 / (pi^2 rho^2)) sum_{h<n} [sin(th - th_h) / cos(th - th_h)]
///     sin(pi rho L_h sin(th - th_h)) sin(pi rho ell_h cos(th - th_h))
/// ```
pub fn chi_hat_symmetric(p: &Polygon, rho: f64, theta: f64) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(invalid(format!("rho must be positive, got {rho}")));
    }
    if !in_family_p(p, DEFAULT_TOL) {
        return Err(invalid("polygon is not inscribed and centrally symmetric"));
    }
    let circle = circumscribed_circle(p, DEFAULT_TOL).expect("family member has a circle");
    if circle.center.norm() > DEFAULT_TOL * circle.radius {
        return Err(invalid(format!(
            "polygon must be centred at the origin (centre {:?})",
            circle.center
        )));
    }
    let half = p.len() / 2;
    let mut acc = 0.0;
    for h in 0..half {
        let f = p.side_frame(h);
        let (s, c) = (theta - f.theta).sin_cos();
        acc += sin_ratio(s, c, PI * rho * f.ell) * (PI * rho * f.big_l * s).sin();
    }
    Ok(acc / (PI * PI * rho * rho))
}

/// Quadrature oracle: fan triangulation from the centroid, each triangle
/// mapped from the unit square by `x = c + u ((1 - v) A + v B - c)`, and a
/// tensor composite Gauss–Legendre rule of the given order whose panels span
/// at most [`ORACLE_PANEL_WAVELENGTHS`] wavelengths.
pub fn chi_hat_oracle(p: &Polygon, f: Frequency, order: usize) -> Result<Complex64> {
    if order < 10 {
        return Err(invalid(format!("oracle order must be >= 10, got {order}")));
    }
    let xi = f.xi();
    let fnorm = xi.norm();
    if !fnorm.is_finite() {
        return Err(invalid("frequency is not finite"));
    }
    let wavelengths = fnorm * p.diameter();
    if wavelengths > ORACLE_MAX_WAVELENGTHS {
        return Err(Error::CostCap(format!(
            "|f| * diameter = {wavelengths:.1} exceeds oracle cap {ORACLE_MAX_WAVELENGTHS}"
        )));
    }
    let gl = GaussLegendre::new(order);
    let c = p.centroid();
    let panels = |len: f64| ((fnorm * len / ORACLE_PANEL_WAVELENGTHS).ceil() as usize).max(1);
    let mut re = 0.0;
    let mut im = 0.0;
    for h in 0..p.len() {
        let a = p.vertex(h);
        let b = p.vertex(h + 1);
        let jac = (a - c).cross(b - a);
        let (us, uw) = gl.composite_unit(panels((a - c).norm().max((b - c).norm())));
        let (vs, vw) = gl.composite_unit(panels((b - a).norm()));
        for (&u, &wu) in us.iter().zip(&uw) {
            let mut sre = 0.0;
            let mut sim = 0.0;
            for (&v, &wv) in vs.iter().zip(&vw) {
                let x = c + (a * (1.0 - v) + b * v - c) * u;
                let (s, co) = (-2.0 * PI * xi.dot(x)).sin_cos();
                sre += wv * co;
                sim += wv * s;
            }
            re += wu * u * jac * sre;
            im += wu * u * jac * sim;
        }
    }
    Ok(Complex64::new(re, im))
}

/// `{ (1/2pi) int_0^2pi |chi^(rho Theta)|^2 dtheta }^(1/2)` by the trapezoid
/// rule on `n_angles` equally spaced directions.
pub fn spherical_average(p: &Polygon, rho: f64, n_angles: usize) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(invalid(format!("rho must be positive, got {rho}")));
    }
    let tr = IndicatorTransform::new(p);
    let need = tr.required_angles(rho);
    if n_angles < need {
        return Err(invalid(format!(
            "n_angles = {n_angles} is below the resolution floor {need} for rho = {rho}"
        )));
    }
    Ok(tr.circle_mean_square(rho, n_angles).sqrt())
}

/// One row of a spherical-average sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub rho: f64,
    pub value: f64,
    pub n_angles: usize,
}

/// Spherical averages at each `rho`, using the resolution floor (and at least
/// 64 angles).
pub fn spherical_sweep(p: &Polygon, rhos: &[f64]) -> Result<Vec<SweepRow>> {
    let tr = IndicatorTransform::new(p);
    rhos.iter()
        .map(|&rho| {
            if !(rho.is_finite() && rho > 0.0) {
                return Err(invalid(format!("rho must be positive, got {rho}")));
            }
            let n_angles = tr.required_angles(rho).max(64);
            Ok(SweepRow {
                rho,
                value: tr.circle_mean_square(rho, n_angles).sqrt(),
                n_angles,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(invalid("log-log fit needs at least two paired values"));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(invalid("log-log fit needs positive finite values"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(invalid("degenerate fit: abscissae have zero variance"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(LogLogFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Decay exponent of the spherical average: slope of `ln value` against
/// `ln rho`. Needs at least 8 dilations spanning 1.5 decades.
pub fn decay_exponent_fit(p: &Polygon, rhos: &[f64]) -> Result<LogLogFit> {
    if rhos.len() < 8 {
        return Err(invalid(format!(
            "need at least 8 rho values, got {}",
            rhos.len()
        )));
    }
    let lo = rhos.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rhos.iter().copied().fold(0.0, f64::max);
    if !(lo > 0.0) || (hi / lo).log10() < 1.5 {
        return Err(invalid(format!(
            "rho values must be positive and span 1.5 decades (got {lo}..{hi})"
        )));
    }
    let rows = spherical_sweep(p, rhos)?;
    let vals: Vec<f64> = rows.iter().map(|r| r.value).collect();
    log_log_fit(rhos, &vals)
}
