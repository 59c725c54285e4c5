//! Membership in the inscribed-and-centrally-symmetric family and the
//! regularity trichotomy for convex polygons.
//!
//! All predicates take a relative tolerance. Checks are made in the priority
//! order family -> unpaired side -> unequal parallel pair -> not inscribed,
//! so the reported witness is deterministic.

use serde::Serialize;

use crate::geometry::Polygon;
use crate::vec2::Vec2;

/// Default relative tolerance for geometric predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegularityTag {
    /// Inscribed in a circle and symmetric about its centre.
    IrregularFamilyP,
    /// Some side is parallel to no other side.
    RegularUnpairedSide,
    /// Some pair of parallel sides has different lengths.
    RegularUnequalParallel,
    /// Centrally symmetric but not inscribed in a circle.
    RegularNotInscribed,
}

impl RegularityTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegularityTag::IrregularFamilyP => "IRREGULAR_FAMILY_P",
            RegularityTag::RegularUnpairedSide => "REGULAR_UNPAIRED_SIDE",
            RegularityTag::RegularUnequalParallel => "REGULAR_UNEQUAL_PARALLEL",
            RegularityTag::RegularNotInscribed => "REGULAR_NOT_INSCRIBED",
        }
    }

    pub fn is_regular(self) -> bool {
        self != RegularityTag::IrregularFamilyP
    }
}

impl std::fmt::Display for RegularityTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Circle {
        center: Vec2,
        radius: f64,
    },
    UnpairedSide {
        side: usize,
    },
    UnequalParallel {
        side: usize,
        partner: usize,
        ell: f64,
        partner_ell: f64,
    },
    /// `side` and its opposite are not the sides of a rectangle: the midpoint
    /// offset from the centre has a component `skew` (relative) along the side.
    NotRectangular {
        center: Vec2,
        side: usize,
        skew: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegularityClass {
    pub tag: RegularityTag,
    pub witness: Witness,
}

fn circumcenter(a: Vec2, b: Vec2, c: Vec2) -> Option<Vec2> {
    let b = b - a;
    let c = c - a;
    let d = 2.0 * b.cross(c);
    if d == 0.0 {
        return None;
    }
    let (bb, cc) = (b.norm_sq(), c.norm_sq());
    Some(a + Vec2::new((c.y * bb - b.y * cc) / d, (b.x * cc - c.x * bb) / d))
}

/// Circle through the first three vertices, returned only if every vertex is
/// within `tol * radius` of it.
pub fn circumscribed_circle(p: &Polygon, tol: f64) -> Option<Circle> {
    let center = circumcenter(p.vertex(0), p.vertex(1), p.vertex(2))?;
    let radius = (p.vertex(0) - center).norm();
    p.vertices()
        .iter()
        .all(|&v| ((v - center).norm() - radius).abs() <= tol * radius)
        .then_some(Circle { center, radius })
}

/// Vertex centroid `c`, if the vertex count is even and vertex `h + s/2`
/// equals `2c - P_h` for every `h` (relative to the polygon's radius about `c`).
pub fn symmetry_center(p: &Polygon, tol: f64) -> Option<Vec2> {
    let s = p.len();
    if !s.is_multiple_of(2) {
        return None;
    }
    let c = p.vertex_centroid();
    let scale = p
        .vertices()
        .iter()
        .map(|&v| (v - c).norm())
        .fold(0.0, f64::max);
    let m = s / 2;
    (0..m)
        .all(|h| (p.vertex(h) + p.vertex(h + m) - c * 2.0).norm() <= tol * scale)
        .then_some(c)
}

pub fn in_family_p(p: &Polygon, tol: f64) -> bool {
    family_circle(p, tol).is_some()
}

fn family_circle(p: &Polygon, tol: f64) -> Option<Circle> {
    let circle = circumscribed_circle(p, tol)?;
    let c = symmetry_center(p, tol)?;
    ((c - circle.center).norm() <= tol * circle.radius).then_some(circle)
}

/// Index of a side antiparallel to side `h`, if any.
fn antiparallel_partner(taus: &[Vec2], h: usize, tol: f64) -> Option<usize> {
    (0..taus.len()).find(|&k| k != h && (taus[h] + taus[k]).norm() <= tol)
}

pub fn regularity_class(p: &Polygon, tol: f64) -> RegularityClass {
    if let Some(Circle { center, radius }) = family_circle(p, tol) {
        return RegularityClass {
            tag: RegularityTag::IrregularFamilyP,
            witness: Witness::Circle { center, radius },
        };
    }
    let frames = p.side_frames();
    let taus: Vec<Vec2> = frames.iter().map(|f| f.tau).collect();
    let mut partners = Vec::with_capacity(frames.len());
    for h in 0..frames.len() {
        match antiparallel_partner(&taus, h, tol) {
            Some(k) => partners.push(k),
            None => {
                return RegularityClass {
                    tag: RegularityTag::RegularUnpairedSide,
                    witness: Witness::UnpairedSide { side: h },
                }
            }
        }
    }
    for (h, &k) in partners.iter().enumerate() {
        let (a, b) = (frames[h].ell, frames[k].ell);
        if (a - b).abs() > tol * a.max(b) {
            return RegularityClass {
                tag: RegularityTag::RegularUnequalParallel,
                witness: Witness::UnequalParallel {
                    side: h,
                    partner: k,
                    ell: a,
                    partner_ell: b,
                },
            };
        }
    }
    // Opposite sides are equal and parallel, so the polygon is centrally
    // symmetric about its vertex centroid. Report the side whose midpoint is
    // furthest from being perpendicular-bisected through the centre.
    let c = p.vertex_centroid();
    let scale = p.diameter();
    let (side, skew) = (0..p.len())
        .map(|h| {
            let mid2 = p.vertex(h) + p.vertex(h + 1) - c * 2.0;
            (h, mid2.dot(frames[h].tau).abs() / scale)
        })
        .fold((0, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    RegularityClass {
        tag: RegularityTag::RegularNotInscribed,
        witness: Witness::NotRectangular {
            center: c,
            side,
            skew,
        },
    }
}
