//! Seeded polygon generators.
//!
//! Both generators rescale their output so that every side length and every
//! `|P_h + P_{h+1}|` (family generator) is at least one.

use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::Polygon;
use crate::vec2::Vec2;

const MAX_ATTEMPTS: usize = 1000;

/// Rescaling slack so rounding never leaves a normalized length at 0.999...
const NORMALIZE_SLACK: f64 = 1.0 + 1e-12;

/// Minimum angular gap between consecutive family vertices, as a fraction of
/// the equal spacing `pi / n`.
const MIN_GAP_FRACTION: f64 = 0.1;

/// Minimum exterior angle (radians) at each vertex of a random convex polygon.
const MIN_TURN: f64 = 1e-3;

/// Minimum ratio of shortest to longest side of a random convex polygon.
const MIN_SIDE_RATIO: f64 = 0.02;

fn family_from_angles(half_angles: &[f64], radius: f64) -> Result<Polygon> {
    let n = half_angles.len();
    let mut angles: Vec<f64> = half_angles.iter().flat_map(|&a| [a, a + PI]).collect();
    angles.sort_by(f64::total_cmp);
    let gaps: Vec<f64> = (0..2 * n)
        .map(|i| {
            let next = if i + 1 < 2 * n {
                angles[i + 1]
            } else {
                angles[0] + TAU
            };
            next - angles[i]
        })
        .collect();
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);
    // side length 2R sin(gap/2), |P_h + P_{h+1}| = 2R cos(gap/2)
    let needed = (1.0 / (2.0 * (min_gap / 2.0).sin())).max(1.0 / (2.0 * (max_gap / 2.0).cos()));
    let r = radius.max(needed * NORMALIZE_SLACK);
    let vertices = angles.iter().map(|&a| Vec2::from_angle(a) * r).collect();
    Ok(Polygon::new(vertices)?)
}

/// `2n`-gon with vertices at equally spaced angles `(i + 1/2) pi / n`, on a
/// circle of at least `radius`. For `n = 2` this is an axis-aligned square.
pub fn regular_family_p(n_half_sides: usize, radius: f64) -> Result<Polygon> {
    if n_half_sides < 2 {
        return Err(invalid("family polygons need n_half_sides >= 2"));
    }
    let n = n_half_sides as f64;
    let half: Vec<f64> = (0..n_half_sides)
        .map(|i| (i as f64 + 0.5) * PI / n)
        .collect();
    family_from_angles(&half, radius)
}

/// Random member of the inscribed, centrally symmetric family: vertices at
/// `phi_i` and `phi_i + pi` on a circle centred at the origin.
pub fn generate_family_p(n_half_sides: usize, radius: f64, seed: u64) -> Result<Polygon> {
    if n_half_sides < 2 {
        return Err(invalid("family polygons need n_half_sides >= 2"));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_half_sides;
    let min_gap = MIN_GAP_FRACTION * PI / n as f64;
    for _ in 0..MAX_ATTEMPTS {
        let mut half: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..PI)).collect();
        half.sort_by(f64::total_cmp);
        let wrap = half[0] + PI - half[n - 1];
        let tight = half.windows(2).any(|w| w[1] - w[0] < min_gap) || wrap < min_gap;
        if tight {
            continue;
        }
        return family_from_angles(&half, radius);
    }
    Err(Error::Generation {
        attempts: MAX_ATTEMPTS,
    })
}

/// Random convex polygon with `n_sides` sides built from sorted random edge vectors, centred
/// at its vertex centroid and scaled so the shortest side has length one.
pub fn generate_convex(n_sides: usize, seed: u64) -> Result<Polygon> {
    if n_sides < 3 {
        return Err(invalid("convex polygons need n_sides >= 3"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let xs = chain_components(&mut rng, n_sides);
        let mut ys = chain_components(&mut rng, n_sides);
        ys.shuffle(&mut rng);
        let mut edges: Vec<Vec2> = xs.iter().zip(&ys).map(|(&x, &y)| Vec2::new(x, y)).collect();
        edges.sort_by(|a, b| a.y.atan2(a.x).total_cmp(&b.y.atan2(b.x)));

        let lens: Vec<f64> = edges.iter().map(|e| e.norm()).collect();
        let min_len = lens.iter().copied().fold(f64::INFINITY, f64::min);
        let max_len = lens.iter().copied().fold(0.0, f64::max);
        if !(min_len > 0.0) || min_len < MIN_SIDE_RATIO * max_len {
            continue;
        }
        let sharp = (0..n_sides).all(|i| {
            let (a, b) = (edges[i], edges[(i + 1) % n_sides]);
            let turn = a.cross(b).atan2(a.dot(b));
            turn > MIN_TURN
        });
        if !sharp {
            continue;
        }
        let scale = NORMALIZE_SLACK / min_len;
        let mut v = Vec2::ZERO;
        let mut vertices = Vec::with_capacity(n_sides);
        for e in &edges {
            vertices.push(v);
            v += *e * scale;
        }
        let mut c = Vec2::ZERO;
        for &p in &vertices {
            c += p;
        }
        let c = c * (1.0 / n_sides as f64);
        let vertices: Vec<Vec2> = vertices.into_iter().map(|p| p - c).collect();
        match Polygon::new(vertices) {
            Ok(p) => return Ok(p),
            Err(_) => continue,
        }
    }
    Err(Error::Generation {
        attempts: MAX_ATTEMPTS,
    })
}

/// One coordinate of the random edge vectors: `n` signed steps that sum to zero.
fn chain_components(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    pts.sort_by(f64::total_cmp);
    let (lo, hi) = (pts[0], pts[n - 1]);
    let mut out = Vec::with_capacity(n);
    let (mut last_a, mut last_b) = (lo, lo);
    for &p in &pts[1..n - 1] {
        if rng.gen::<bool>() {
            out.push(p - last_a);
            last_a = p;
        } else {
            out.push(last_b - p);
            last_b = p;
        }
    }
    out.push(hi - last_a);
    out.push(last_b - hi);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{in_family_p, regularity_class, RegularityTag, DEFAULT_TOL};
    use approx::assert_abs_diff_eq;

    #[test]
    fn regular_preset_is_square() {
        let q = regular_family_p(2, 0.5).unwrap();
        assert_eq!(q.len(), 4);
        for f in q.side_frames() {
            assert_abs_diff_eq!(f.ell, 1.0, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(q.area(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(q.vertex(0).x, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(q.vertex(0).y, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn family_outputs_are_normalized_members() {
        for seed in 0..50 {
            for n in 2..6 {
                let p = generate_family_p(n, 1.0, seed).unwrap();
                assert_eq!(p.len(), 2 * n);
                assert!(in_family_p(&p, DEFAULT_TOL), "seed {seed} n {n}");
                for f in p.side_frames() {
                    assert!(f.ell >= 1.0 && f.big_l >= 1.0, "{f:?}");
                }
            }
        }
    }

    #[test]
    fn convex_outputs() {
        for seed in 0..50 {
            let t = generate_convex(3, seed).unwrap();
            assert_eq!(
                regularity_class(&t, DEFAULT_TOL).tag,
                RegularityTag::RegularUnpairedSide
            );
            let p = generate_convex(7, seed).unwrap();
            let min_ell = p
                .side_frames()
                .iter()
                .map(|f| f.ell)
                .fold(f64::INFINITY, f64::min);
            assert!(min_ell >= 1.0);
        }
        assert_eq!(
            generate_convex(6, 99).unwrap(),
            generate_convex(6, 99).unwrap()
        );
        assert_ne!(
            generate_convex(6, 99).unwrap(),
            generate_convex(6, 100).unwrap()
        );
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(generate_convex(2, 0).is_err());
        assert!(generate_family_p(1, 1.0, 0).is_err());
    }
}
