//! Convex polygons, per-side frames and rigid motions.
//!
//! Vertices are stored counterclockwise with periodic indexing: side `h` runs
//! from vertex `h` to vertex `h + 1 (mod s)`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{PolygonError, Result};
use crate::vec2::Vec2;

/// Strictly convex polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Vec2>,
}

/// Geometric data attached to one oriented side `P_h -> P_{h+1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SideFrame {
    /// Unit direction of the side.
    pub tau: Vec2,
    /// Outward unit normal, `(sin theta, -cos theta)`.
    pub nu: Vec2,
    /// Side length.
    pub ell: f64,
    /// `|P_h + P_{h+1}|`; equals the signed distance sum along `nu` when both
    /// endpoints are equidistant from the origin.
    pub big_l: f64,
    /// Angle of `tau` in `[0, 2pi)`.
    pub theta: f64,
}

/// `v -> rho * R(sigma) * v + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidMotion {
    pub rho: f64,
    pub sigma: f64,
    pub t: Vec2,
}

impl RigidMotion {
    pub fn new(rho: f64, sigma: f64, t: Vec2) -> Self {
        Self { rho, sigma, t }
    }

    #[inline]
    pub fn apply(&self, v: Vec2) -> Vec2 {
        v.rotate(self.sigma) * self.rho + self.t
    }
}

#[derive(Serialize, Deserialize)]
struct PolygonFile {
    vertices: Vec<[f64; 2]>,
}

impl Polygon {
    /// Validates the vertex list: at least three finite vertices, no repeats,
    /// every turn strictly counterclockwise, and a single winding.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, PolygonError> {
        let s = vertices.len();
        if s < 3 {
            return Err(PolygonError::TooFewVertices(s));
        }
        if let Some(index) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(PolygonError::NonFinite { index });
        }
        for h in 0..s {
            if vertices[h] == vertices[(h + 1) % s] {
                return Err(PolygonError::RepeatedVertex {
                    index: (h + 1) % s,
                    other: h,
                });
            }
        }
        let mut turning = 0.0;
        for h in 0..s {
            let a = vertices[h];
            let b = vertices[(h + 1) % s];
            let c = vertices[(h + 2) % s];
            let e0 = b - a;
            let e1 = c - b;
            let cross = e0.cross(e1);
            if cross.is_nan() || cross <= 0.0 {
                return Err(PolygonError::NotStrictlyConvex {
                    index: (h + 1) % s,
                    cross,
                });
            }
            turning += cross.atan2(e0.dot(e1));
        }
        if (turning - TAU).abs() > 1e-6 {
            return Err(PolygonError::SelfOverlapping { turning });
        }
        // Convex and winding once, so a non-adjacent repeat is impossible.
        Ok(Self { vertices })
    }

    pub fn from_points(points: &[[f64; 2]]) -> Result<Self, PolygonError> {
        Self::new(points.iter().map(|&p| Vec2::from(p)).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolygonFile = serde_json::from_str(text)?;
        Ok(Self::from_points(&file.vertices)?)
    }

    pub fn to_json(&self) -> String {
        let file = PolygonFile {
            vertices: self.vertices.iter().map(|&v| v.into()).collect(),
        };
        serde_json::to_string(&file).expect("finite coordinates serialize")
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// Number of vertices (equal to the number of sides).
    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Vertex with periodic labeling.
    #[inline]
    pub fn vertex(&self, h: usize) -> Vec2 {
        self.vertices[h % self.vertices.len()]
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let s = self.len();
        let twice: f64 = (0..s)
            .map(|h| self.vertices[h].cross(self.vertices[(h + 1) % s]))
            .sum();
        0.5 * twice
    }

    /// Area centroid.
    pub fn centroid(&self) -> Vec2 {
        let s = self.len();
        let mut acc = Vec2::ZERO;
        let mut twice = 0.0;
        for h in 0..s {
            let a = self.vertices[h];
            let b = self.vertices[(h + 1) % s];
            let w = a.cross(b);
            twice += w;
            acc += (a + b) * w;
        }
        acc * (1.0 / (3.0 * twice))
    }

    /// Arithmetic mean of the vertices.
    pub fn vertex_centroid(&self) -> Vec2 {
        let mut acc = Vec2::ZERO;
        for &v in &self.vertices {
            acc += v;
        }
        acc * (1.0 / self.len() as f64)
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, &a) in self.vertices.iter().enumerate() {
            for &b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn perimeter(&self) -> f64 {
        let s = self.len();
        (0..s)
            .map(|h| (self.vertices[(h + 1) % s] - self.vertices[h]).norm())
            .sum()
    }

    pub fn side_frame(&self, h: usize) -> SideFrame {
        let a = self.vertex(h);
        let b = self.vertex(h + 1);
        let edge = b - a;
        let ell = edge.norm();
        let tau = edge * (1.0 / ell);
        let mut theta = tau.y.atan2(tau.x);
        if theta < 0.0 {
            theta += TAU;
        }
        if theta >= TAU {
            theta -= TAU;
        }
        SideFrame {
            tau,
            nu: Vec2::new(tau.y, -tau.x),
            ell,
            big_l: (a + b).norm(),
            theta,
        }
    }

    pub fn side_frames(&self) -> Vec<SideFrame> {
        (0..self.len()).map(|h| self.side_frame(h)).collect()
    }

    /// Image under `v -> rho R(sigma) v + t`.
    pub fn apply_motion(&self, motion: &RigidMotion) -> Result<Polygon> {
        if !(motion.rho.is_finite() && motion.rho > 0.0) {
            return Err(crate::error::invalid(format!(
                "dilation must be positive and finite, got {}",
                motion.rho
            )));
        }
        let vertices = self.vertices.iter().map(|&v| motion.apply(v)).collect();
        Ok(Polygon::new(vertices)?)
    }

    pub fn translated(&self, v: Vec2) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&p| p + v).collect(),
        }
    }

    /// Uniform dilation by `factor > 0` about `center`.
    pub fn scaled_about(&self, center: Vec2, factor: f64) -> Polygon {
        assert!(factor > 0.0, "scale factor must be positive");
        Polygon {
            vertices: self
                .vertices
                .iter()
                .map(|&p| center + (p - center) * factor)
                .collect(),
        }
    }

    /// Rotation by `angle` about `center`.
    pub fn rotated_about(&self, center: Vec2, angle: f64) -> Polygon {
        Polygon {
            vertices: self
                .vertices
                .iter()
                .map(|&p| center + (p - center).rotate(angle))
                .collect(),
        }
    }

    /// Same polygon with the vertex list relabeled to start at `start`.
    pub fn relabeled(&self, start: usize) -> Polygon {
        let s = self.len();
        Polygon {
            vertices: (0..s).map(|h| self.vertices[(h + start) % s]).collect(),
        }
    }

    /// Human-readable note when the side normalization `ell_h >= 1`,
    /// `L_h >= 1` does not hold. Analysis routines accept such polygons.
    pub fn normalization_warning(&self) -> Option<String> {
        let frames = self.side_frames();
        let min_ell = frames.iter().map(|f| f.ell).fold(f64::INFINITY, f64::min);
        let min_l = frames.iter().map(|f| f.big_l).fold(f64::INFINITY, f64::min);
        (min_ell < 1.0 || min_l < 1.0).then(|| {
            format!("side normalization not met: min side length {min_ell:.6}, min |P_h + P_h+1| {min_l:.6}")
        })
    }
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Half-turn of `a` with wrapping.
pub fn opposite_angle(a: f64) -> f64 {
    wrap_angle(a + PI)
}
