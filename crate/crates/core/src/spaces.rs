//! The four model spaces as Lie groups in the global chart `(t, x, y, z)`.
//!
//! * `Sol⁴₀`: matrices with diagonal `(eᵗ, eᵗ, e⁻²ᵗ, 1)` and translation
//!   column `(x, y, z)`.
//! * `Sol⁴ₘ,ₙ`: the same shape with diagonal `(eᵃᵗ, eᵇᵗ, eᶜᵗ, 1)`, where
//!   `eᵃ, eᵇ, eᶜ` are the roots of `x³ − m x² + n x − 1`.
//! * `Sol⁴₁`: upper triangular `M(t,x,y,z) = [[1, x, z], [0, t, y], [0, 0, 1]]`
//!   with `t > 0`.
//! * `Nil⁴`: `ℝ ⋉_θ ℝ³` with `(t, v)·(t', v') = (t + t', v + θ(t) v')`.
//!
//! `Sol⁴₀` and `Sol⁴ₘ,ₙ` share one code path parametrised by the diagonal
//! exponents; `Sol⁴₀` is the case `(1, 1, −2)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::connection::FrameConnection;
use crate::error::{GeometryError, Result};
use crate::metric::{self, MetricParams};
use crate::roots::{solve_roots, RootClassification};
use crate::{Mat4, Vec4};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    #[default]
    Sol40,
    Sol4mn,
    Sol41,
    Nil4,
}

impl GeometryKind {
    pub const ALL: [GeometryKind; 4] = [
        GeometryKind::Sol40,
        GeometryKind::Sol4mn,
        GeometryKind::Sol41,
        GeometryKind::Nil4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Sol40 => "sol40",
            GeometryKind::Sol4mn => "sol4mn",
            GeometryKind::Sol41 => "sol41",
            GeometryKind::Nil4 => "nil4",
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeometryKind {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sol40" => Ok(GeometryKind::Sol40),
            "sol4mn" => Ok(GeometryKind::Sol4mn),
            "sol41" => Ok(GeometryKind::Sol41),
            "nil4" => Ok(GeometryKind::Nil4),
            other => Err(GeometryError::InvalidArgument(format!(
                "unknown geometry `{other}` (expected sol40, sol4mn, sol41 or nil4)"
            ))),
        }
    }
}

/// A point of the chart `(t, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Every model space is a Lie group, so group elements and points coincide.
pub type GroupElement = Point;

impl Point {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Point { t, x, y, z }
    }

    pub fn to_vec(&self) -> Vec4 {
        Vec4::new(self.t, self.x, self.y, self.z)
    }

    pub fn from_vec(v: &Vec4) -> Self {
        Point::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    /// Componentwise max-norm distance in the chart.
    pub fn chart_distance(&self, other: &Point) -> f64 {
        (self.to_vec() - other.to_vec()).amax()
    }

    fn translation(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }
}

impl From<[f64; 4]> for Point {
    fn from(a: [f64; 4]) -> Self {
        Point::new(a[0], a[1], a[2], a[3])
    }
}

/// A tangent vector given by its coordinate components at a base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: Point,
    pub components: Vec4,
}

impl TangentVector {
    pub fn new(base: Point, components: Vec4) -> Self {
        TangentVector { base, components }
    }
}

/// Structure constants `c[k][i][j]` with `[eᵢ, eⱼ] = Σₖ c[k][i][j] eₖ`
/// (zero-based indices over `e₁..e₄`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureConstants {
    pub c: [[[f64; 4]; 4]; 4],
}

impl StructureConstants {
    fn from_brackets(brackets: &[(usize, usize, usize, f64)]) -> Self {
        let mut c = [[[0.0; 4]; 4]; 4];
        for &(i, j, k, v) in brackets {
            c[k][i][j] = v;
            c[k][j][i] = -v;
        }
        StructureConstants { c }
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.c[k][i][j]
    }

    /// Bracket of two algebra elements given in the basis `e₁..e₄`.
    pub fn bracket(&self, u: &Vec4, v: &Vec4) -> Vec4 {
        let mut out = Vec4::zeros();
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    out[k] += self.c[k][i][j] * u[i] * v[j];
                }
            }
        }
        out
    }

    /// Largest `|c[k][i][j] + c[k][j][i]|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    worst = worst.max((self.c[k][i][j] + self.c[k][j][i]).abs());
                }
            }
        }
        worst
    }

    /// Largest Jacobi-identity defect over all `(i, j, k, l)`.
    pub fn jacobi_residual(&self) -> f64 {
        let c = &self.c;
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let mut s = 0.0;
                        for m in 0..4 {
                            s += c[m][i][j] * c[l][m][k]
                                + c[m][j][k] * c[l][m][i]
                                + c[m][k][i] * c[l][m][j];
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}

/// A fully configured geometry: which space, which metric, plus the
/// point-independent data derived from it.
///
/// Immutable after construction; the cached frame connection stays valid for
/// the lifetime of the value.
#[derive(Debug, Clone)]
pub struct GeometrySpec {
    params: MetricParams,
    exponents: [f64; 3],
    structure: StructureConstants,
    orthonormal_change: Mat4,
    connection: FrameConnection,
}

impl GeometrySpec {
    /// Validates `params` and builds the geometry.
    pub fn new(params: MetricParams) -> Result<Self> {
        metric::validate_params(&params)?;
        let exponents = match params {
            MetricParams::Sol40 => [1.0, 1.0, -2.0],
            MetricParams::Sol4mn { m, n } => match solve_roots(m, n) {
                RootClassification::ThreeDistinct { a, b, c } => [a, b, c],
                RootClassification::ProductCase { .. } => {
                    return Err(GeometryError::InvalidRoots {
                        m,
                        n,
                        reason: "m = n gives a root equal to 1, the product geometry Sol3 x R"
                            .into(),
                    })
                }
                RootClassification::DoubleRoot { .. } => {
                    return Err(GeometryError::InvalidRoots {
                        m,
                        n,
                        reason: "repeated root; this space is Sol40, configure it as sol40".into(),
                    })
                }
                RootClassification::Invalid { reason, .. } => {
                    return Err(GeometryError::InvalidRoots { m, n, reason })
                }
            },
            _ => [0.0; 3],
        };
        let structure = structure_constants_for(&params, &exponents);
        let orthonormal_change = metric::orthonormal_change(&params);
        let connection = FrameConnection::new(&structure, &orthonormal_change)?;
        Ok(GeometrySpec {
            params,
            exponents,
            structure,
            orthonormal_change,
            connection,
        })
    }

    pub fn sol40() -> Self {
        GeometrySpec::new(MetricParams::Sol40).expect("Sol40 has no parameters")
    }

    pub fn sol4mn(m: f64, n: f64) -> Result<Self> {
        GeometrySpec::new(MetricParams::Sol4mn { m, n })
    }

    pub fn sol41(tau1: f64, tau2: f64) -> Result<Self> {
        GeometrySpec::new(MetricParams::Sol41 { tau1, tau2 })
    }

    pub fn nil4(tau1: f64, tau2: f64, tau3: f64, alpha: f64) -> Result<Self> {
        GeometrySpec::new(MetricParams::Nil4 {
            tau1,
            tau2,
            tau3,
            alpha,
        })
    }

    /// The geometry with its default parameters (`τ = 1`, `α = 0`,
    /// `(m, n) = (5, 6)`).
    pub fn default_for(kind: GeometryKind) -> Self {
        let params = match kind {
            GeometryKind::Sol40 => MetricParams::Sol40,
            GeometryKind::Sol4mn => MetricParams::Sol4mn { m: 5.0, n: 6.0 },
            GeometryKind::Sol41 => MetricParams::Sol41 {
                tau1: 1.0,
                tau2: 1.0,
            },
            GeometryKind::Nil4 => MetricParams::Nil4 {
                tau1: 1.0,
                tau2: 1.0,
                tau3: 1.0,
                alpha: 0.0,
            },
        };
        GeometrySpec::new(params).expect("default parameters are valid")
    }

    pub fn kind(&self) -> GeometryKind {
        self.params.kind()
    }

    pub fn params(&self) -> &MetricParams {
        &self.params
    }

    /// Diagonal exponents `(a, b, c)` of the `Sol⁴` families; `(1, 1, −2)`
    /// for `Sol⁴₀`. Zero for `Sol⁴₁` and `Nil⁴`.
    pub fn exponents(&self) -> [f64; 3] {
        self.exponents
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.structure
    }

    /// Constant matrix whose columns express the orthonormal frame in the
    /// left-invariant frame `E₁..E₄`.
    pub fn orthonormal_change(&self) -> &Mat4 {
        &self.orthonormal_change
    }

    pub fn frame_connection(&self) -> &FrameConnection {
        &self.connection
    }

    /// Checks the chart constraint (`t > 0` for `Sol⁴₁`; finite coordinates).
    pub fn check_point(&self, p: &Point) -> Result<()> {
        if !p.to_array().iter().all(|v| v.is_finite()) {
            return Err(GeometryError::Domain {
                kind: self.kind(),
                point: p.to_array(),
                reason: "non-finite coordinate",
            });
        }
        if self.kind() == GeometryKind::Sol41 && p.t <= 0.0 {
            return Err(GeometryError::Domain {
                kind: self.kind(),
                point: p.to_array(),
                reason: "Sol41 requires t > 0",
            });
        }
        Ok(())
    }

    pub fn identity(&self) -> GroupElement {
        match self.kind() {
            GeometryKind::Sol41 => Point::new(1.0, 0.0, 0.0, 0.0),
            _ => Point::new(0.0, 0.0, 0.0, 0.0),
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check_point(g)?;
        self.check_point(h)?;
        Ok(match self.kind() {
            GeometryKind::Sol40 | GeometryKind::Sol4mn => {
                let [a, b, c] = self.exponents;
                Point::new(
                    g.t + h.t,
                    g.x + (a * g.t).exp() * h.x,
                    g.y + (b * g.t).exp() * h.y,
                    g.z + (c * g.t).exp() * h.z,
                )
            }
            GeometryKind::Sol41 => Point::new(
                g.t * h.t,
                h.x + g.x * h.t,
                g.y + g.t * h.y,
                g.z + h.z + g.x * h.y,
            ),
            GeometryKind::Nil4 => {
                let v = g.translation() + theta(g.t) * h.translation();
                Point::new(g.t + h.t, v[0], v[1], v[2])
            }
        })
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check_point(g)?;
        Ok(match self.kind() {
            GeometryKind::Sol40 | GeometryKind::Sol4mn => {
                let [a, b, c] = self.exponents;
                Point::new(
                    -g.t,
                    -(-a * g.t).exp() * g.x,
                    -(-b * g.t).exp() * g.y,
                    -(-c * g.t).exp() * g.z,
                )
            }
            GeometryKind::Sol41 => {
                Point::new(1.0 / g.t, -g.x / g.t, -g.y / g.t, g.x * g.y / g.t - g.z)
            }
            GeometryKind::Nil4 => {
                let v = -(theta(-g.t) * g.translation());
                Point::new(-g.t, v[0], v[1], v[2])
            }
        })
    }

    /// Faithful matrix representation.
    ///
    /// 4×4 affine matrices for the `Sol⁴` families, the 3×3 matrix
    /// `M(t,x,y,z)` for `Sol⁴₁`, and the 4×4 affine block `[[θ(t), v], [0, 1]]`
    /// for `Nil⁴` (faithful because `t` is the (1,2) entry of `θ(t)`).
    pub fn to_matrix(&self, g: &GroupElement) -> Result<DMatrix<f64>> {
        self.check_point(g)?;
        Ok(match self.kind() {
            GeometryKind::Sol40 | GeometryKind::Sol4mn => {
                let [a, b, c] = self.exponents;
                let mut m = DMatrix::identity(4, 4);
                m[(0, 0)] = (a * g.t).exp();
                m[(1, 1)] = (b * g.t).exp();
                m[(2, 2)] = (c * g.t).exp();
                m[(0, 3)] = g.x;
                m[(1, 3)] = g.y;
                m[(2, 3)] = g.z;
                m
            }
            GeometryKind::Sol41 => {
                DMatrix::from_row_slice(3, 3, &[1.0, g.x, g.z, 0.0, g.t, g.y, 0.0, 0.0, 1.0])
            }
            GeometryKind::Nil4 => {
                let th = theta(g.t);
                let mut m = DMatrix::identity(4, 4);
                for i in 0..3 {
                    for j in 0..3 {
                        m[(i, j)] = th[(i, j)];
                    }
                }
                m[(0, 3)] = g.x;
                m[(1, 3)] = g.y;
                m[(2, 3)] = g.z;
                m
            }
        })
    }
}

/// The unipotent automorphism `θ(t)` of `ℝ³` defining `Nil⁴`.
pub fn theta(t: f64) -> Matrix3<f64> {
    Matrix3::new(1.0, t, 0.5 * t * t, 0.0, 1.0, t, 0.0, 0.0, 1.0)
}

fn structure_constants_for(params: &MetricParams, exponents: &[f64; 3]) -> StructureConstants {
    match params {
        MetricParams::Sol40 | MetricParams::Sol4mn { .. } => {
            let [a, b, c] = *exponents;
            StructureConstants::from_brackets(&[(0, 1, 1, a), (0, 2, 2, b), (0, 3, 3, c)])
        }
        // [e1,e2] = -e2, [e1,e3] = e3, [e2,e3] = e4
        MetricParams::Sol41 { .. } => {
            StructureConstants::from_brackets(&[(0, 1, 1, -1.0), (0, 2, 2, 1.0), (1, 2, 3, 1.0)])
        }
        // [e1,e3] = e2, [e1,e4] = e3, read off the left-invariant fields.
        MetricParams::Nil4 { .. } => {
            StructureConstants::from_brackets(&[(0, 2, 1, 1.0), (0, 3, 2, 1.0)])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Point, b: &Point, tol: f64) -> bool {
        a.chart_distance(b) < tol
    }

    #[test]
    fn identities() {
        assert_eq!(
            GeometrySpec::sol40().identity(),
            Point::new(0.0, 0.0, 0.0, 0.0)
        );
        let sol41 = GeometrySpec::default_for(GeometryKind::Sol41);
        assert_eq!(sol41.identity(), Point::new(1.0, 0.0, 0.0, 0.0));
        let nil = GeometrySpec::default_for(GeometryKind::Nil4);
        assert_eq!(nil.identity(), Point::new(0.0, 0.0, 0.0, 0.0));
        assert_eq!(theta(0.0), Matrix3::identity());
    }

    #[test]
    fn sol41_law_matches_three_by_three_product() {
        let spec = GeometrySpec::default_for(GeometryKind::Sol41);
        let g = Point::new(1.7, 0.3, -0.8, 2.1);
        let h = Point::new(0.4, -1.2, 0.5, 0.9);
        let gh = spec.multiply(&g, &h).unwrap();
        let expected = Point::new(
            g.t * h.t,
            h.x + g.x * h.t,
            g.y + g.t * h.y,
            g.z + h.z + g.x * h.y,
        );
        assert_eq!(gh, expected);
        let prod = spec.to_matrix(&g).unwrap() * spec.to_matrix(&h).unwrap();
        let rep = spec.to_matrix(&gh).unwrap();
        assert!((prod - rep).amax() < 1e-14);
    }

    #[test]
    fn sol4mn_pure_t_times_translation() {
        let spec = GeometrySpec::sol4mn(5.0, 6.0).unwrap();
        let [a, b, c] = spec.exponents();
        let g = Point::new(0.8, 0.0, 0.0, 0.0);
        let h = Point::new(0.0, 1.5, -2.0, 0.25);
        let gh = spec.multiply(&g, &h).unwrap();
        let expected = Point::new(
            0.8,
            (a * 0.8).exp() * 1.5,
            (b * 0.8).exp() * -2.0,
            (c * 0.8).exp() * 0.25,
        );
        assert!(close(&gh, &expected, 1e-15));
        let prod = spec.to_matrix(&g).unwrap() * spec.to_matrix(&h).unwrap();
        assert!((prod - spec.to_matrix(&gh).unwrap()).amax() < 1e-14);
    }

    #[test]
    fn sol40_inverse_against_matrix_inverse() {
        let spec = GeometrySpec::sol40();
        let g = Point::new(0.6, -1.1, 0.4, 1.9);
        let inv = spec.inverse(&g).unwrap();
        let closed = Point::new(
            -g.t,
            -(-g.t).exp() * g.x,
            -(-g.t).exp() * g.y,
            -(2.0 * g.t).exp() * g.z,
        );
        assert!(close(&inv, &closed, 1e-15));
        let m_inv = spec.to_matrix(&g).unwrap().try_inverse().unwrap();
        assert!((m_inv - spec.to_matrix(&inv).unwrap()).amax() < 1e-13);
        let e = spec.identity();
        assert_eq!(spec.inverse(&e).unwrap(), e);
    }

    #[test]
    fn sol41_inverse_of_pure_scaling() {
        let spec = GeometrySpec::default_for(GeometryKind::Sol41);
        let inv = spec.inverse(&Point::new(2.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(inv, Point::new(0.5, 0.0, 0.0, 0.0));
        let g = Point::new(2.5, 0.7, -0.3, 1.2);
        let m_inv = spec.to_matrix(&g).unwrap().try_inverse().unwrap();
        let rep = spec.to_matrix(&spec.inverse(&g).unwrap()).unwrap();
        assert!((m_inv - rep).amax() < 1e-14);
    }

    #[test]
    fn sol41_rejects_nonpositive_t() {
        let spec = GeometrySpec::default_for(GeometryKind::Sol41);
        let bad = Point::new(0.0, 1.0, 0.0, 0.0);
        assert!(matches!(
            spec.multiply(&bad, &spec.identity()),
            Err(GeometryError::Domain { .. })
        ));
        assert!(spec.inverse(&Point::new(-1.0, 0.0, 0.0, 0.0)).is_err());
        assert!(spec.to_matrix(&bad).is_err());
    }

    #[test]
    fn matrix_representations() {
        let spec = GeometrySpec::sol40();
        let m = spec.to_matrix(&Point::new(1.0, 2.0, 3.0, 4.0)).unwrap();
        let e = std::f64::consts::E;
        assert!((m[(0, 0)] - e).abs() < 1e-15);
        assert!((m[(1, 1)] - e).abs() < 1e-15);
        assert!((m[(2, 2)] - e.powi(-2)).abs() < 1e-15);
        assert_eq!(m[(3, 3)], 1.0);
        assert_eq!(
            [m[(0, 3)], m[(1, 3)], m[(2, 3)], m[(3, 3)]],
            [2.0, 3.0, 4.0, 1.0]
        );

        let sol41 = GeometrySpec::default_for(GeometryKind::Sol41);
        assert_eq!(
            sol41.to_matrix(&Point::new(1.0, 0.0, 0.0, 0.0)).unwrap(),
            DMatrix::identity(3, 3)
        );

        let th = theta(2.0);
        assert_eq!(th[(0, 1)], 2.0);
        assert_eq!(th[(1, 2)], 2.0);
        assert_eq!(th[(0, 2)], 2.0);
        let th1 = theta(1.0);
        assert_eq!((th1[(0, 1)], th1[(1, 2)], th1[(0, 2)]), (1.0, 1.0, 0.5));
        assert!((theta(2.0) * theta(3.0) - theta(5.0)).amax() < 1e-14);
    }

    #[test]
    fn bracket_tables() {
        let sol40 = GeometrySpec::sol40();
        let c = sol40.structure_constants();
        assert_eq!(c.get(1, 0, 1), 1.0);
        assert_eq!(c.get(2, 0, 2), 1.0);
        assert_eq!(c.get(3, 0, 3), -2.0);
        assert_eq!(c.jacobi_residual(), 0.0);

        let sol41 = GeometrySpec::default_for(GeometryKind::Sol41);
        let c = sol41.structure_constants();
        assert_eq!(c.get(1, 0, 1), -1.0);
        assert_eq!(c.get(2, 0, 2), 1.0);
        assert_eq!(c.get(3, 1, 2), 1.0);
        assert_eq!(c.jacobi_residual(), 0.0);

        let nil = GeometrySpec::default_for(GeometryKind::Nil4);
        let c = nil.structure_constants();
        assert_eq!(c.get(1, 0, 2), 1.0);
        assert_eq!(c.get(2, 0, 3), 1.0);
        let nonzero =
            c.c.iter()
                .flatten()
                .flatten()
                .filter(|v| **v != 0.0)
                .count();
        assert_eq!(nonzero, 4);
        assert_eq!(c.jacobi_residual(), 0.0);
        assert_eq!(c.antisymmetry_residual(), 0.0);
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in GeometryKind::ALL {
            assert_eq!(kind.name().parse::<GeometryKind>().unwrap(), kind);
        }
        assert!("f4".parse::<GeometryKind>().is_err());
    }
}
