//! Seeded random draws of points, group elements, parameters and vectors.
//!
//! Coordinates are drawn from `[−2, 2]` (and `t` log-uniform in `[e⁻², e²]`
//! for `Sol⁴₁`) so exponential factors stay far from overflow.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metric::{metric_at, MetricParams};
use crate::roots::params_from_exponents;
use crate::spaces::{GeometryKind, GeometrySpec, GroupElement, Point};
use crate::{Result, Vec4};

pub const COORDINATE_RANGE: f64 = 2.0;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point drawn with coordinates of magnitude at most `range`.
pub fn random_point_in<R: Rng>(kind: GeometryKind, range: f64, rng: &mut R) -> Point {
    let t = if kind == GeometryKind::Sol41 {
        rng.gen_range(-range..=range).exp()
    } else {
        rng.gen_range(-range..=range)
    };
    Point::new(
        t,
        rng.gen_range(-range..=range),
        rng.gen_range(-range..=range),
        rng.gen_range(-range..=range),
    )
}

pub fn random_point<R: Rng>(kind: GeometryKind, rng: &mut R) -> Point {
    random_point_in(kind, COORDINATE_RANGE, rng)
}

pub fn random_group_element<R: Rng>(kind: GeometryKind, rng: &mut R) -> GroupElement {
    random_point(kind, rng)
}

/// Random admissible metric parameters.
///
/// `Sol⁴ₘ,ₙ` is drawn through its exponents: `a ∈ [−1.5, −0.3]`,
/// `c ∈ [0.3, 1.5]`, `b = −a − c` kept at least 0.1 away from `a`, `c` and 0,
/// then `(m, n)` is formed and the roots are solved again from scratch.
pub fn random_params<R: Rng>(kind: GeometryKind, rng: &mut R) -> MetricParams {
    match kind {
        GeometryKind::Sol40 => MetricParams::Sol40,
        GeometryKind::Sol4mn => loop {
            let a: f64 = rng.gen_range(-1.5..-0.3);
            let c: f64 = rng.gen_range(0.3..1.5);
            let b = -a - c;
            if b - a > 0.1 && c - b > 0.1 && b.abs() > 0.1 {
                let (m, n) = params_from_exponents(a, b);
                break MetricParams::Sol4mn { m, n };
            }
        },
        GeometryKind::Sol41 => MetricParams::Sol41 {
            tau1: rng.gen_range(0.25..4.0),
            tau2: rng.gen_range(0.25..4.0),
        },
        GeometryKind::Nil4 => {
            let tau3: f64 = rng.gen_range(0.25..4.0);
            let bound = 0.9 * tau3.sqrt();
            MetricParams::Nil4 {
                tau1: rng.gen_range(0.25..4.0),
                tau2: rng.gen_range(0.25..4.0),
                tau3,
                alpha: rng.gen_range(-bound..bound),
            }
        }
    }
}

pub fn random_spec<R: Rng>(kind: GeometryKind, rng: &mut R) -> GeometrySpec {
    GeometrySpec::new(random_params(kind, rng)).expect("sampled parameters are admissible")
}

/// Coordinate vector with independent entries in `[−1, 1]`.
pub fn random_vector<R: Rng>(rng: &mut R) -> Vec4 {
    Vec4::new(
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
    )
}

/// Random tangent vector at `p` of unit length for the configured metric.
pub fn random_unit_vector<R: Rng>(spec: &GeometrySpec, p: &Point, rng: &mut R) -> Result<Vec4> {
    let g = metric_at(spec, p)?;
    loop {
        let v = random_vector(rng);
        let norm2 = (v.transpose() * g * v)[(0, 0)];
        if norm2 > 1e-6 {
            return Ok(v / norm2.sqrt());
        }
    }
}
