//! Named test polygons.
//!
//! | name | polygon |
//! |------|---------|
//! | `square` | `[-1, 1]^2` (the unit square dilated by 2) |
//! | `unit-square` | `[-1/2, 1/2]^2` |
//! | `triangle` | `(0,0), (1,0), (0,1)` |
//! | `rect-2x1` | `[-1, 1] x [-1/2, 1/2]` |
//! | `trapezoid` | isosceles trapezoid with bases 2 and 1, height 1 |
//! | `hex-sym-noncyclic` | `(+-2, 0), (+-1, +-1)` |
//! | `hex-equiangular` | equiangular hexagon with sides 3, 1, 2, 2, 2, 1 |
//! | `pgon-family-p:N:SEED` | [`generate_family_p`] with `N` half sides |
//! | `pgon-convex:N:SEED` | [`generate_convex`] with `N` sides |

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::generate::{generate_convex, generate_family_p};
use crate::geometry::Polygon;
use crate::vec2::Vec2;

pub const PRESET_NAMES: &[&str] = &[
    "square",
    "unit-square",
    "triangle",
    "rect-2x1",
    "trapezoid",
    "hex-sym-noncyclic",
    "hex-equiangular",
    "pgon-family-p:N:SEED",
    "pgon-convex:N:SEED",
];

fn fixed(pts: &[[f64; 2]]) -> Polygon {
    Polygon::from_points(pts).expect("preset is valid")
}

pub fn square() -> Polygon {
    fixed(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
}

pub fn unit_square() -> Polygon {
    fixed(&[[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])
}

pub fn triangle() -> Polygon {
    fixed(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
}

pub fn rect_2x1() -> Polygon {
    fixed(&[[-1.0, -0.5], [1.0, -0.5], [1.0, 0.5], [-1.0, 0.5]])
}

pub fn trapezoid() -> Polygon {
    fixed(&[[-1.0, -0.5], [1.0, -0.5], [0.5, 0.5], [-0.5, 0.5]])
}

pub fn hex_sym_noncyclic() -> Polygon {
    fixed(&[
        [2.0, 0.0],
        [1.0, 1.0],
        [-1.0, 1.0],
        [-2.0, 0.0],
        [-1.0, -1.0],
        [1.0, -1.0],
    ])
}

pub fn hex_equiangular() -> Polygon {
    let lens = [3.0, 1.0, 2.0, 2.0, 2.0, 1.0];
    let mut v = Vec2::ZERO;
    let mut pts = Vec::with_capacity(6);
    for (i, l) in lens.iter().enumerate() {
        pts.push(v);
        v += Vec2::from_angle(i as f64 * PI / 3.0) * *l;
    }
    let c = pts.iter().fold(Vec2::ZERO, |a, &b| a + b) * (1.0 / 6.0);
    Polygon::new(pts.into_iter().map(|p| p - c).collect()).expect("preset is valid")
}

fn parse_pair(rest: &str, name: &str) -> Result<(usize, u64)> {
    let mut it = rest.split(':');
    let (Some(n), Some(seed), None) = (it.next(), it.next(), it.next()) else {
        return Err(invalid(format!("preset {name} expects {name}:N:SEED")));
    };
    let n = n
        .parse()
        .map_err(|_| invalid(format!("bad size {n:?} in preset {name}")))?;
    let seed = seed
        .parse()
        .map_err(|_| invalid(format!("bad seed {seed:?} in preset {name}")))?;
    Ok((n, seed))
}

pub fn preset(name: &str) -> Result<Polygon> {
    Ok(match name {
        "square" => square(),
        "unit-square" => unit_square(),
        "triangle" => triangle(),
        "rect-2x1" => rect_2x1(),
        "trapezoid" => trapezoid(),
        "hex-sym-noncyclic" => hex_sym_noncyclic(),
        "hex-equiangular" => hex_equiangular(),
        _ => {
            if let Some(rest) = name.strip_prefix("pgon-family-p:") {
                let (n, seed) = parse_pair(rest, "pgon-family-p")?;
                generate_family_p(n, 1.0, seed)?
            } else if let Some(rest) = name.strip_prefix("pgon-convex:") {
                let (n, seed) = parse_pair(rest, "pgon-convex")?;
                generate_convex(n, seed)?
            } else {
                return Err(invalid(format!(
                    "unknown preset {name:?}; known: {}",
                    PRESET_NAMES.join(", ")
                )));
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{regularity_class, RegularityTag, DEFAULT_TOL};

    #[test]
    fn preset_classes() {
        let cases = [
            ("square", RegularityTag::IrregularFamilyP),
            ("unit-square", RegularityTag::IrregularFamilyP),
            ("rect-2x1", RegularityTag::IrregularFamilyP),
            ("triangle", RegularityTag::RegularUnpairedSide),
            ("trapezoid", RegularityTag::RegularUnpairedSide),
            ("hex-sym-noncyclic", RegularityTag::RegularNotInscribed),
            ("hex-equiangular", RegularityTag::RegularUnequalParallel),
            ("pgon-family-p:4:7", RegularityTag::IrregularFamilyP),
            ("pgon-convex:5:7", RegularityTag::RegularUnpairedSide),
        ];
        for (name, tag) in cases {
            let p = preset(name).unwrap();
            assert_eq!(regularity_class(&p, DEFAULT_TOL).tag, tag, "{name}");
        }
    }

    #[test]
    fn unknown_and_malformed() {
        assert!(preset("circle").is_err());
        assert!(preset("pgon-convex:5").is_err());
        assert!(preset("pgon-convex:x:1").is_err());
        assert!(preset("pgon-convex:2:1").is_err());
    }
}
