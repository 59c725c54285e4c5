//! Lattice-point discrepancy of dilated, rotated and translated convex
//! polygons.
//!
//! The `L^2(SO(2) x T^2)` norm of the discrepancy is computed by exact
//! counting ([`discrepancy::l2_norm_direct`]) and through the Parseval lattice
//! sum of the indicator transform ([`discrepancy::l2_norm_parseval`]).
//! Polygons are classified by whether they are inscribed in a circle and
//! centrally symmetric ([`classify`]), and [`diophantine`] builds the integer
//! dilations along which such polygons show small discrepancy.

pub mod classify;
pub mod diophantine;
pub mod discrepancy;
pub mod error;
pub mod fourier;
pub mod generate;
pub mod geometry;
pub mod presets;
pub mod quadrature;
pub mod vec2;

pub use classify::{
    in_family_p, regularity_class, RegularityClass, RegularityTag, Witness, DEFAULT_TOL,
};
pub use error::{Error, PolygonError, Result};
pub use fourier::{chi_hat, chi_hat_oracle, spherical_average, Frequency};
pub use geometry::{Polygon, RigidMotion, SideFrame};
pub use vec2::Vec2;
