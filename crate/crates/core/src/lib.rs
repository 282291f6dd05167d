//! Numerical differential geometry of the solvable and nilpotent
//! 4-dimensional Thurston model geometries that are not products:
//! `Sol⁴₀`, `Sol⁴ₘ,ₙ`, `Sol⁴₁` and `Nil⁴`.
//!
//! Each space is a simply connected Lie group with a family of metrics that
//! are invariant under left translations and a finite (or compact) stabilizer.
//! The crate covers
//!
//! * the group law, matrix representations and structure constants
//!   ([`spaces`]), including the cubic root machinery behind `Sol⁴ₘ,ₙ`
//!   ([`roots`]);
//! * the invariant metric families and their left-invariant and orthonormal
//!   frames ([`metric`]);
//! * the Levi-Civita connection and curvature, computed twice: once from
//!   finite differences of the coordinate metric and once from the Koszul
//!   formula on structure constants ([`connection`]);
//! * geodesics, the exponential map and shooting distance ([`geodesic`]);
//! * isometry actions with exact Jacobians and a pullback-invariance harness
//!   ([`isometry`]);
//! * a finite scan over frame-constant almost complex structures and the
//!   closedness of their Kähler forms ([`complex`]).
//!
//! Sweeps over random samples go through [`exec::Execution`], which runs on
//! rayon when the `parallel` feature is enabled and falls back to a plain
//! loop otherwise. Every reduction is order-independent, so both paths
//! produce identical results.

#![allow(clippy::needless_range_loop)]

pub mod complex;
pub mod connection;
pub mod error;
pub mod exec;
pub mod fd;
pub mod geodesic;
pub mod isometry;
pub mod metric;
pub mod roots;
pub mod sampling;
pub mod spaces;

pub use error::{GeometryError, Result};
pub use exec::Execution;
pub use metric::{MetricField, MetricParams};
pub use spaces::{GeometryKind, GeometrySpec, GroupElement, Point, TangentVector};

/// 4×4 real matrix used for metrics, frames and Jacobians.
pub type Mat4 = nalgebra::Matrix4<f64>;
/// 4-vector of chart components `(t, x, y, z)`.
pub type Vec4 = nalgebra::Vector4<f64>;
