//! Lattice-point discrepancy of moved polygons and its `L^2(SO(2) x T^2)`
//! norm, computed two ways:
//!
//! * directly, by averaging squared exact counts over sampled motions;
//! * through Parseval, as `rho^4 sum_{k != 0} mean_theta |chi^(rho |k| Theta)|^2`.
//!
//! Rotations carry the normalized Haar measure.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fourier::IndicatorTransform;
use crate::geometry::{Polygon, RigidMotion};
use crate::vec2::Vec2;

/// Absolute slack (lattice units) of the closed-set membership test.
pub const BOUNDARY_EPS: f64 = 1e-9;

/// Largest accepted Parseval truncation radius.
pub const MAX_K: u32 = 1024;

/// Cap on the total number of transform evaluations in one Parseval sum.
pub const MAX_PARSEVAL_EVALS: f64 = 5e9;

/// Relative allowance for quadrature and rounding error of the Parseval sum.
pub const PARSEVAL_QUADRATURE_BUDGET: f64 = 1e-6;

/// Count integer points of the closed polygon with vertices `verts`.
///
/// Row scan: for every integer `y` in the vertical extent, the convex polygon
/// meets the band `|y' - y| <= BOUNDARY_EPS` in an `x` interval spanned by the
/// band-edge crossings and the vertices inside the band.
pub fn count_in_vertices(verts: &[Vec2]) -> u64 {
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in verts {
        ymin = ymin.min(v.y);
        ymax = ymax.max(v.y);
    }
    let s = verts.len();
    let y0 = (ymin - BOUNDARY_EPS).ceil() as i64;
    let y1 = (ymax + BOUNDARY_EPS).floor() as i64;
    let mut total = 0u64;
    for y in y0..=y1 {
        let yf = y as f64;
        let (mut xl, mut xr) = (f64::INFINITY, f64::NEG_INFINITY);
        for h in 0..s {
            let a = verts[h];
            if (a.y - yf).abs() <= BOUNDARY_EPS {
                xl = xl.min(a.x);
                xr = xr.max(a.x);
            }
            let b = verts[(h + 1) % s];
            if a.y == b.y {
                continue;
            }
            let (lo, hi) = if a.y < b.y { (a.y, b.y) } else { (b.y, a.y) };
            for line in [yf - BOUNDARY_EPS, yf + BOUNDARY_EPS] {
                if line >= lo && line <= hi {
                    let x = a.x + (line - a.y) / (b.y - a.y) * (b.x - a.x);
                    xl = xl.min(x);
                    xr = xr.max(x);
                }
            }
        }
        if xl > xr {
            continue;
        }
        let x0 = (xl - BOUNDARY_EPS).ceil() as i64;
        let x1 = (xr + BOUNDARY_EPS).floor() as i64;
        if x1 >= x0 {
            total += (x1 - x0 + 1) as u64;
        }
    }
    total
}

/// `card(Z^2 ∩ (rho R(sigma) P + t))`, boundary points included.
pub fn count_lattice_points(p: &Polygon, rho: f64, sigma: f64, t: Vec2) -> u64 {
    let m = RigidMotion::new(rho, sigma, t);
    let verts: Vec<Vec2> = p.vertices().iter().map(|&v| m.apply(v)).collect();
    count_in_vertices(&verts)
}

/// Enumeration oracle: tests every integer point of the bounding box against
/// each edge half-plane, with the same boundary slack as the row scan.
pub fn count_by_enumeration(p: &Polygon, rho: f64, sigma: f64, t: Vec2) -> u64 {
    let m = RigidMotion::new(rho, sigma, t);
    let v: Vec<Vec2> = p.vertices().iter().map(|&x| m.apply(x)).collect();
    let xs = v.iter().map(|q| q.x);
    let ys = v.iter().map(|q| q.y);
    let x0 = xs.clone().fold(f64::INFINITY, f64::min).floor() as i64;
    let x1 = xs.fold(f64::NEG_INFINITY, f64::max).ceil() as i64;
    let y0 = ys.clone().fold(f64::INFINITY, f64::min).floor() as i64;
    let y1 = ys.fold(f64::NEG_INFINITY, f64::max).ceil() as i64;
    let mut n = 0;
    for x in x0..=x1 {
        for y in y0..=y1 {
            let z = Vec2::new(x as f64, y as f64);
            let inside = (0..v.len()).all(|h| {
                let (a, b) = (v[h], v[(h + 1) % v.len()]);
                (b - a).cross(z - a) / (b - a).norm() >= -BOUNDARY_EPS
            });
            n += inside as u64;
        }
    }
    n
}

/// `count - rho^2 |P|`.
pub fn discrepancy_value(p: &Polygon, rho: f64, sigma: f64, t: Vec2) -> f64 {
    count_lattice_points(p, rho, sigma, t) as f64 - rho * rho * p.area()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// Uniform product grid: `n_sigma` rotations times an `m x m` cell-centred
    /// translation grid with `m = ceil(sqrt(n_t))`.
    Grid,
    /// `n_sigma * n_t` independent uniform draws of `(sigma, t)`.
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MotionSampleConfig {
    pub n_sigma: usize,
    pub n_t: usize,
    pub mode: SampleMode,
    pub seed: u64,
}

impl MotionSampleConfig {
    pub fn grid(n_sigma: usize, n_t: usize) -> Self {
        Self {
            n_sigma,
            n_t,
            mode: SampleMode::Grid,
            seed: 0,
        }
    }

    pub fn monte_carlo(n_sigma: usize, n_t: usize, seed: u64) -> Self {
        Self {
            n_sigma,
            n_t,
            mode: SampleMode::MonteCarlo,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_sigma == 0 || self.n_t == 0 {
            return Err(invalid("n_sigma and n_t must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NormMethod {
    Direct,
    Parseval,
}

impl NormMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMethod::Direct => "direct",
            NormMethod::Parseval => "parseval",
        }
    }
}

/// Estimate of `||D_P^rho||_{L^2(SO(2) x T^2)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub method: NormMethod,
    pub rho: f64,
    pub truncation_k: Option<u32>,
    /// Bound on the omitted Parseval terms `|k| > truncation_k`, in squared units.
    pub tail_estimate: Option<f64>,
    /// Motion samples (direct) or transform evaluations (Parseval).
    pub samples: u64,
    /// Standard error of the mean of squared discrepancies (direct only).
    pub stderr: Option<f64>,
}

impl NormEstimate {
    pub fn squared(&self) -> f64 {
        self.value * self.value
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho >= 1.0) {
        return Err(invalid(format!("rho must be finite and >= 1, got {rho}")));
    }
    Ok(())
}

/// Sum and sum of squares of `D^2` over one block of motions sharing a
/// rotation (grid) or a seed stream (Monte Carlo).
fn block_moments(
    base: &[Vec2],
    area_term: f64,
    shifts: impl Iterator<Item = Vec2>,
) -> (f64, f64, u64) {
    let mut buf = base.to_vec();
    let (mut s1, mut s2, mut n) = (0.0, 0.0, 0u64);
    for t in shifts {
        for (b, &v) in buf.iter_mut().zip(base) {
            *b = v + t;
        }
        let d = count_in_vertices(&buf) as f64 - area_term;
        let d2 = d * d;
        s1 += d2;
        s2 += d2 * d2;
        n += 1;
    }
    (s1, s2, n)
}

fn rotated(p: &Polygon, rho: f64, sigma: f64) -> Vec<Vec2> {
    p.vertices()
        .iter()
        .map(|&v| v.rotate(sigma) * rho)
        .collect()
}

/// Root mean square discrepancy over a sample of motions.
///
/// Blocks are evaluated in parallel and reduced in a fixed order, so the
/// result does not depend on the worker count.
pub fn l2_norm_direct(p: &Polygon, rho: f64, cfg: &MotionSampleConfig) -> Result<NormEstimate> {
    check_rho(rho)?;
    cfg.validate()?;
    let area_term = rho * rho * p.area();
    let blocks: Vec<(f64, f64, u64)> = match cfg.mode {
        SampleMode::Grid => {
            let m = (cfg.n_t as f64).sqrt().ceil() as usize;
            (0..cfg.n_sigma)
                .into_par_iter()
                .map(|i| {
                    let sigma = TAU * i as f64 / cfg.n_sigma as f64;
                    let base = rotated(p, rho, sigma);
                    let shifts = (0..m * m).map(|j| {
                        let (a, b) = (j / m, j % m);
                        Vec2::new(
                            -0.5 + (a as f64 + 0.5) / m as f64,
                            -0.5 + (b as f64 + 0.5) / m as f64,
                        )
                    });
                    block_moments(&base, area_term, shifts)
                })
                .collect()
        }
        SampleMode::MonteCarlo => (0..cfg.n_sigma)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(i as u64);
                let mut acc = (0.0, 0.0, 0u64);
                for _ in 0..cfg.n_t {
                    let sigma = rng.gen_range(0.0..TAU);
                    let t = Vec2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                    let base = rotated(p, rho, sigma);
                    let (a, b, c) = block_moments(&base, area_term, std::iter::once(t));
                    acc = (acc.0 + a, acc.1 + b, acc.2 + c);
                }
                acc
            })
            .collect(),
    };
    let (mut s1, mut s2, mut n) = (0.0, 0.0, 0u64);
    for (a, b, c) in blocks {
        s1 += a;
        s2 += b;
        n += c;
    }
    let nf = n as f64;
    let mean = s1 / nf;
    let var = if n > 1 {
        ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(NormEstimate {
        value: mean.sqrt(),
        method: NormMethod::Direct,
        rho,
        truncation_k: None,
        tail_estimate: None,
        samples: n,
        stderr: Some((var / nf).sqrt()),
    })
}

/// Per-shell terms of the Parseval lattice sum, grouped by `|k|^2`.
#[derive(Clone, Debug, Serialize)]
pub struct ParsevalTerms {
    pub rho: f64,
    pub k_max: u32,
    /// Distinct `|k|^2` values in increasing order.
    pub norms_sq: Vec<u64>,
    /// Number of lattice points with that squared norm.
    pub multiplicity: Vec<u64>,
    /// `mean_theta |chi^(rho |k| Theta)|^2` for that shell.
    pub circle_mean_sq: Vec<f64>,
    pub evaluations: u64,
}

impl ParsevalTerms {
    /// Evaluates every shell `0 < |k| <= k_max`, with at least `n_angles`
    /// directions per shell and never fewer than the resolution floor.
    pub fn compute(p: &Polygon, rho: f64, k_max: u32, n_angles: usize) -> Result<Self> {
        check_rho(rho)?;
        if k_max == 0 {
            return Err(invalid("k_max must be at least 1"));
        }
        if k_max > MAX_K {
            return Err(Error::CostCap(format!(
                "k_max = {k_max} exceeds cap {MAX_K}"
            )));
        }
        let tr = IndicatorTransform::new(p);
        let kk = k_max as i64;
        let max_n = (kk * kk) as usize;
        let mut mult = vec![0u64; max_n + 1];
        for a in -kk..=kk {
            for b in -kk..=kk {
                let n = (a * a + b * b) as usize;
                if n > 0 && n <= max_n {
                    mult[n] += 1;
                }
            }
        }
        let shells: Vec<(u64, u64, usize)> = mult
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(n, &m)| {
                let r = rho * (n as f64).sqrt();
                let na = round_up_even(tr.required_angles(r).max(n_angles));
                (n as u64, m, na)
            })
            .collect();
        let evaluations: f64 = shells.iter().map(|s| s.2 as f64).sum();
        if evaluations > MAX_PARSEVAL_EVALS {
            return Err(Error::CostCap(format!(
                "Parseval sum needs {evaluations:.3e} transform evaluations (cap {MAX_PARSEVAL_EVALS:.0e})"
            )));
        }
        let means: Vec<f64> = shells
            .par_iter()
            .map(|&(n, _, na)| tr.circle_mean_square(rho * (n as f64).sqrt(), na))
            .collect();
        Ok(Self {
            rho,
            k_max,
            norms_sq: shells.iter().map(|s| s.0).collect(),
            multiplicity: shells.iter().map(|s| s.1).collect(),
            circle_mean_sq: means,
            evaluations: shells.iter().map(|s| s.2 as u64 / 2).sum(),
        })
    }

    /// `rho^4 sum_{0 < |k| <= k} mean |chi^|^2`, for any `k <= k_max`.
    pub fn partial_sum(&self, k: u32) -> f64 {
        let lim = (k as u64) * (k as u64);
        let rho4 = self.rho.powi(4);
        let mut acc = 0.0;
        for ((&n, &m), &v) in self
            .norms_sq
            .iter()
            .zip(&self.multiplicity)
            .zip(&self.circle_mean_sq)
        {
            if n > lim {
                break;
            }
            acc += m as f64 * v;
        }
        rho4 * acc
    }

    /// Tail bound for `|k| > k`: the decay envelope `C (rho|k|)^-3` calibrated
    /// as the largest `(rho|k|)^3 mean|chi^|^2` over the dyadic shell
    /// `k/2 < |k| <= k`, summed with the integral bound
    /// `sum_{|k| > K} |k|^-3 <= 2 pi / (K - 1/sqrt 2)`.
    pub fn tail_estimate(&self, k: u32) -> f64 {
        let lo = (k as f64 / 2.0).powi(2);
        let hi = (k as u64) * (k as u64);
        let c_tail = self
            .norms_sq
            .iter()
            .zip(&self.circle_mean_sq)
            .filter(|(&n, _)| n as f64 > lo && n <= hi)
            .map(|(&n, &v)| (self.rho * (n as f64).sqrt()).powi(3) * v)
            .fold(0.0, f64::max);
        let radius = k as f64 - std::f64::consts::FRAC_1_SQRT_2;
        c_tail * self.rho * 2.0 * PI / radius
    }

    pub fn estimate(&self, k: u32) -> NormEstimate {
        assert!(
            k >= 1 && k <= self.k_max,
            "truncation outside computed range"
        );
        NormEstimate {
            value: self.partial_sum(k).sqrt(),
            method: NormMethod::Parseval,
            rho: self.rho,
            truncation_k: Some(k),
            tail_estimate: Some(self.tail_estimate(k)),
            samples: self.evaluations,
            stderr: None,
        }
    }
}

fn round_up_even(n: usize) -> usize {
    n + (n % 2)
}

/// Parseval route truncated at `|k| <= k_max`.
pub fn l2_norm_parseval(
    p: &Polygon,
    rho: f64,
    k_max: u32,
    n_angles: usize,
) -> Result<NormEstimate> {
    Ok(ParsevalTerms::compute(p, rho, k_max, n_angles)?.estimate(k_max))
}

/// Which route `normalized_norm` uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormRoute {
    Direct(MotionSampleConfig),
    Parseval { k_max: u32, n_angles: usize },
}

pub fn l2_norm(p: &Polygon, rho: f64, route: &NormRoute) -> Result<NormEstimate> {
    match route {
        NormRoute::Direct(cfg) => l2_norm_direct(p, rho, cfg),
        NormRoute::Parseval { k_max, n_angles } => l2_norm_parseval(p, rho, *k_max, *n_angles),
    }
}

/// `||D_P^rho|| / rho^(1/2)`.
pub fn normalized_norm(p: &Polygon, rho: f64, route: &NormRoute) -> Result<f64> {
    Ok(l2_norm(p, rho, route)?.value / rho.sqrt())
}

/// Golden-ratio fractional offset used for irrational dilation grids.
pub const GOLDEN_OFFSET: f64 = 0.618_033_988_749_894_8;

/// Dilations in `[lo, hi]`: every integer and every `m + golden offset`.
pub fn mixed_rho_grid(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut m = lo.floor() as i64;
    while (m as f64) <= hi {
        for r in [m as f64, m as f64 + GOLDEN_OFFSET] {
            if r >= lo && r <= hi {
                out.push(r);
            }
        }
        m += 1;
    }
    out
}
