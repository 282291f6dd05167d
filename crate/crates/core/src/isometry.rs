//! Isometry actions with closed-form Jacobians, and the pullback harness
//! that checks `φ*g = g` numerically.
//!
//! Every geometry is acted on by left translations plus a stabilizer of the
//! identity:
//!
//! | geometry  | stabilizer       | generators used here                      |
//! |-----------|------------------|-------------------------------------------|
//! | `Sol⁴₀`   | `O(2) × ℤ/2`     | xy-rotations, xy-reflection, z-reflection |
//! | `Sol⁴ₘ,ₙ` | `(ℤ/2)³`         | reflections of x, y and z                 |
//! | `Sol⁴₁`   | `D₄`             | `s`, `r`                                  |
//! | `Nil⁴`    | `(ℤ/2)²`         | `s₁`, `s₂`                                |

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::exec::{max_residual, Execution};
use crate::metric::{MetricField, MetricMatrix, MetricParams};
use crate::sampling::{self, random_group_element, random_point};
use crate::spaces::{theta, GeometryKind, GeometrySpec, GroupElement, Point};
use crate::{Mat4, Vec4};

/// Rotation angles used to exercise the `O(2)` factor of `Sol⁴₀`.
pub const SOL40_ROTATION_ANGLES: [f64; 4] = [PI / 7.0, 1.0, PI / 3.0, 2.5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum IsometryKind {
    LeftTranslation([f64; 4]),
    /// Rotation of the xy-plane by the given angle.
    Sol40Rotation(f64),
    /// `(t, x, y, z) ↦ (t, x, −y, z)`, the reflection in `O(2)`.
    Sol40ReflectXY,
    Sol40ReflectZ,
    SolMNReflectX,
    SolMNReflectY,
    SolMNReflectZ,
    /// `M(t,x,y,z) ↦ M(t, x, −y, −z)`
    Sol41S,
    /// `M(t,x,y,z) ↦ M(1/t, −y/t, x/t, z − xy/t)`
    Sol41R,
    /// `(t,x,y,z) ↦ (t, −x, −y, −z)`
    Nil4S1,
    /// `(t,x,y,z) ↦ (−t, x, −y, z)`
    Nil4S2,
}

impl IsometryKind {
    pub fn label(&self) -> String {
        match self {
            IsometryKind::LeftTranslation(_) => "left_translation".into(),
            IsometryKind::Sol40Rotation(a) => format!("rotation_xy({a:.6})"),
            IsometryKind::Sol40ReflectXY => "reflect_xy".into(),
            IsometryKind::Sol40ReflectZ => "reflect_z".into(),
            IsometryKind::SolMNReflectX => "reflect_x".into(),
            IsometryKind::SolMNReflectY => "reflect_y".into(),
            IsometryKind::SolMNReflectZ => "reflect_z".into(),
            IsometryKind::Sol41S => "s".into(),
            IsometryKind::Sol41R => "r".into(),
            IsometryKind::Nil4S1 => "s1".into(),
            IsometryKind::Nil4S2 => "s2".into(),
        }
    }
}

/// A diffeomorphism of the chart with its exact Jacobian.
#[derive(Debug, Clone)]
pub struct Isometry {
    spec: GeometrySpec,
    kind: IsometryKind,
}

fn diag(a: f64, b: f64, c: f64, d: f64) -> Mat4 {
    Mat4::from_diagonal(&Vec4::new(a, b, c, d))
}

impl Isometry {
    pub fn kind(&self) -> IsometryKind {
        self.kind
    }

    pub fn label(&self) -> String {
        self.kind.label()
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        self.spec.check_point(p)?;
        let Point { t, x, y, z } = *p;
        Ok(match self.kind {
            IsometryKind::LeftTranslation(g) => self.spec.multiply(&Point::from(g), p)?,
            IsometryKind::Sol40Rotation(a) => {
                let (s, c) = a.sin_cos();
                Point::new(t, c * x - s * y, s * x + c * y, z)
            }
            IsometryKind::Sol40ReflectXY | IsometryKind::SolMNReflectY => Point::new(t, x, -y, z),
            IsometryKind::Sol40ReflectZ | IsometryKind::SolMNReflectZ => Point::new(t, x, y, -z),
            IsometryKind::SolMNReflectX => Point::new(t, -x, y, z),
            IsometryKind::Sol41S => Point::new(t, x, -y, -z),
            IsometryKind::Sol41R => Point::new(1.0 / t, -y / t, x / t, z - x * y / t),
            IsometryKind::Nil4S1 => Point::new(t, -x, -y, -z),
            IsometryKind::Nil4S2 => Point::new(-t, x, -y, z),
        })
    }

    /// `J[i][j] = ∂φⁱ/∂xʲ` at `p`, in closed form.
    pub fn jacobian(&self, p: &Point) -> Result<Mat4> {
        self.spec.check_point(p)?;
        let Point { t, x, y, .. } = *p;
        Ok(match self.kind {
            IsometryKind::LeftTranslation(g) => {
                let g = Point::from(g);
                match self.spec.kind() {
                    GeometryKind::Sol40 | GeometryKind::Sol4mn => {
                        let [a, b, c] = self.spec.exponents();
                        diag(1.0, (a * g.t).exp(), (b * g.t).exp(), (c * g.t).exp())
                    }
                    // (g.t h.t, h.x + g.x h.t, g.y + g.t h.y, g.z + h.z + g.x h.y)
                    GeometryKind::Sol41 => Mat4::new(
                        g.t, 0.0, 0.0, 0.0, //
                        g.x, 1.0, 0.0, 0.0, //
                        0.0, 0.0, g.t, 0.0, //
                        0.0, 0.0, g.x, 1.0,
                    ),
                    GeometryKind::Nil4 => {
                        let th = theta(g.t);
                        let mut j = Mat4::identity();
                        j.fixed_view_mut::<3, 3>(1, 1).copy_from(&th);
                        j
                    }
                }
            }
            IsometryKind::Sol40Rotation(a) => {
                let (s, c) = a.sin_cos();
                Mat4::new(
                    1.0, 0.0, 0.0, 0.0, //
                    0.0, c, -s, 0.0, //
                    0.0, s, c, 0.0, //
                    0.0, 0.0, 0.0, 1.0,
                )
            }
            IsometryKind::Sol40ReflectXY | IsometryKind::SolMNReflectY => diag(1.0, 1.0, -1.0, 1.0),
            IsometryKind::Sol40ReflectZ | IsometryKind::SolMNReflectZ => diag(1.0, 1.0, 1.0, -1.0),
            IsometryKind::SolMNReflectX => diag(1.0, -1.0, 1.0, 1.0),
            IsometryKind::Sol41S => diag(1.0, 1.0, -1.0, -1.0),
            IsometryKind::Sol41R => {
                let t2 = t * t;
                Mat4::new(
                    -1.0 / t2,
                    0.0,
                    0.0,
                    0.0, //
                    y / t2,
                    0.0,
                    -1.0 / t,
                    0.0, //
                    -x / t2,
                    1.0 / t,
                    0.0,
                    0.0, //
                    x * y / t2,
                    -y / t,
                    -x / t,
                    1.0,
                )
            }
            IsometryKind::Nil4S1 => diag(1.0, -1.0, -1.0, -1.0),
            IsometryKind::Nil4S2 => diag(-1.0, 1.0, -1.0, 1.0),
        })
    }

    /// Pushforward of a tangent vector at `p`.
    pub fn push(&self, p: &Point, v: &Vec4) -> Result<Vec4> {
        Ok(self.jacobian(p)? * v)
    }
}

/// `h ↦ g·h`.
pub fn left_translation(spec: &GeometrySpec, g: &GroupElement) -> Result<Isometry> {
    spec.check_point(g)?;
    Ok(Isometry {
        spec: spec.clone(),
        kind: IsometryKind::LeftTranslation(g.to_array()),
    })
}

/// Generators of the stabilizer of the identity. For `Sol⁴₀`, `O(2)` is
/// represented by one rotation per entry of `rotation_angles` plus the
/// xy-reflection.
pub fn stabilizer_generators(spec: &GeometrySpec, rotation_angles: &[f64]) -> Vec<Isometry> {
    let kinds: Vec<IsometryKind> = match spec.kind() {
        GeometryKind::Sol40 => rotation_angles
            .iter()
            .map(|a| IsometryKind::Sol40Rotation(*a))
            .chain([IsometryKind::Sol40ReflectXY, IsometryKind::Sol40ReflectZ])
            .collect(),
        GeometryKind::Sol4mn => vec![
            IsometryKind::SolMNReflectX,
            IsometryKind::SolMNReflectY,
            IsometryKind::SolMNReflectZ,
        ],
        GeometryKind::Sol41 => vec![IsometryKind::Sol41S, IsometryKind::Sol41R],
        GeometryKind::Nil4 => vec![IsometryKind::Nil4S1, IsometryKind::Nil4S2],
    };
    kinds
        .into_iter()
        .map(|kind| Isometry {
            spec: spec.clone(),
            kind,
        })
        .collect()
}

/// `(φ*g)_p = Jᵀ g(φ(p)) J`.
pub fn pullback_metric<M: MetricField + ?Sized>(
    metric: &M,
    phi: &Isometry,
    p: &Point,
) -> Result<MetricMatrix> {
    let j = phi.jacobian(p)?;
    let g = metric.metric(&phi.apply(p)?)?;
    let out = j.transpose() * g * j;
    Ok((out + out.transpose()) * 0.5)
}

/// `‖φ*g − g‖∞` at `p`.
pub fn pullback_residual<M: MetricField + ?Sized>(
    metric: &M,
    phi: &Isometry,
    p: &Point,
) -> Result<f64> {
    Ok((pullback_metric(metric, phi, p)? - metric.metric(p)?).amax())
}

/// Largest `‖J_exact − J_fd‖∞` at `p`, finite differences of the forward map.
pub fn jacobian_fd_residual(phi: &Isometry, p: &Point, step: f64) -> Result<f64> {
    let exact = phi.jacobian(p)?;
    let h = step
        * if phi.spec.kind() == GeometryKind::Sol41 {
            p.t.min(1.0)
        } else {
            1.0
        };
    let f = |q: &Point| phi.apply(q).map(|r| Mat4::from_diagonal(&r.to_vec()));
    let mut worst = 0.0_f64;
    for axis in 0..4 {
        let d = crate::fd::derivative(&f, p, axis, h)?;
        for row in 0..4 {
            worst = worst.max((d[(row, row)] - exact[(row, axis)]).abs());
        }
    }
    Ok(worst)
}

pub const REPORT_FORMAT: &str = "thurston4.invariance";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorResidual {
    pub generator: String,
    /// Number of distinct maps folded into this row (random translations).
    pub maps: usize,
    pub samples: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub format: &'static str,
    pub version: u32,
    pub geometry: GeometryKind,
    pub params: MetricParams,
    pub seed: u64,
    pub samples: usize,
    pub generators: Vec<GeneratorResidual>,
    pub max_residual: f64,
}

impl InvarianceReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual < tol
    }
}

/// Options for [`invariance_report_with`].
#[derive(Debug, Clone)]
pub struct InvarianceOptions {
    pub samples: usize,
    pub seed: u64,
    pub translations: usize,
    pub rotation_angles: Vec<f64>,
    pub execution: Execution,
}

impl InvarianceOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        InvarianceOptions {
            samples,
            seed,
            translations: 50,
            rotation_angles: SOL40_ROTATION_ANGLES.to_vec(),
            execution: Execution::default(),
        }
    }
}

/// Pullback residuals of the configured metric under every stabilizer
/// generator and 50 random left translations, over `samples` random points.
pub fn invariance_report(
    spec: &GeometrySpec,
    samples: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    invariance_report_with(spec, spec, &InvarianceOptions::new(samples, seed))
}

/// Same as [`invariance_report`] with an arbitrary metric field standing in
/// for the configured metric (the maps still come from `spec`).
pub fn invariance_report_with<M: MetricField + ?Sized>(
    spec: &GeometrySpec,
    metric: &M,
    opts: &InvarianceOptions,
) -> Result<InvarianceReport> {
    let kind = spec.kind();
    let mut rng = sampling::rng(opts.seed);
    let mut rows: Vec<(String, Vec<Isometry>)> = Vec::new();
    if opts.samples > 0 {
        for phi in stabilizer_generators(spec, &opts.rotation_angles) {
            rows.push((phi.label(), vec![phi]));
        }
        let translations = (0..opts.translations)
            .map(|_| left_translation(spec, &random_group_element(kind, &mut rng)))
            .collect::<Result<Vec<_>>>()?;
        if !translations.is_empty() {
            rows.push(("left_translation".into(), translations));
        }
    }
    let points: Vec<Point> = (0..opts.samples)
        .map(|_| random_point(kind, &mut rng))
        .collect();

    let mut generators = Vec::with_capacity(rows.len());
    for (label, maps) in rows {
        let jobs: Vec<(usize, usize)> = (0..maps.len())
            .flat_map(|m| (0..points.len()).map(move |i| (m, i)))
            .collect();
        let residuals = opts.execution.try_map(&jobs, |&(m, i)| {
            pullback_residual(metric, &maps[m], &points[i])
        })?;
        generators.push(GeneratorResidual {
            generator: label,
            maps: maps.len(),
            samples: points.len(),
            max_residual: max_residual(&residuals),
        });
    }
    let max = max_residual(
        &generators
            .iter()
            .map(|g| g.max_residual)
            .collect::<Vec<_>>(),
    );
    Ok(InvarianceReport {
        format: REPORT_FORMAT,
        version: REPORT_VERSION,
        geometry: kind,
        params: *spec.params(),
        seed: opts.seed,
        samples: opts.samples,
        generators,
        max_residual: max,
    })
}

/// Checks that a map is an involution-type or finite-order relation on a
/// point: returns `‖φᵏ(p) − p‖∞`.
pub fn order_residual(phi: &Isometry, order: usize, p: &Point) -> Result<f64> {
    if order == 0 {
        return Err(GeometryError::InvalidArgument(
            "order must be positive".into(),
        ));
    }
    let mut q = *p;
    for _ in 0..order {
        q = phi.apply(&q)?;
    }
    Ok(q.chart_distance(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{metric_at, FnMetric};

    fn find(spec: &GeometrySpec, kind: IsometryKind) -> Isometry {
        stabilizer_generators(spec, &SOL40_ROTATION_ANGLES)
            .into_iter()
            .find(|g| g.kind() == kind)
            .unwrap()
    }

    #[test]
    fn identity_translation() {
        let spec = GeometrySpec::sol40();
        let l = left_translation(&spec, &spec.identity()).unwrap();
        let p = Point::new(0.4, 1.0, -2.0, 0.3);
        assert_eq!(l.apply(&p).unwrap(), p);
        assert_eq!(l.jacobian(&p).unwrap(), Mat4::identity());
    }

    #[test]
    fn sol40_unit_translation() {
        let spec = GeometrySpec::sol40();
        let l = left_translation(&spec, &Point::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        let p = Point::new(0.5, 2.0, -1.0, 3.0);
        let e = std::f64::consts::E;
        let img = l.apply(&p).unwrap();
        let expected = Point::new(1.5, e * 2.0, -e, e.powi(-2) * 3.0);
        assert!(img.chart_distance(&expected) < 1e-14);
        let j = l.jacobian(&p).unwrap();
        assert!((j - diag(1.0, e, e, e.powi(-2))).amax() < 1e-15);
    }

    #[test]
    fn generator_orders() {
        let sol41 = GeometrySpec::sol41(2.0, 0.5).unwrap();
        let p = Point::new(1.7, 0.4, -1.1, 0.8);
        let s = find(&sol41, IsometryKind::Sol41S);
        let r = find(&sol41, IsometryKind::Sol41R);
        assert_eq!(order_residual(&s, 2, &p).unwrap(), 0.0);
        assert!(order_residual(&r, 4, &p).unwrap() < 1e-14);
        assert!(order_residual(&r, 2, &p).unwrap() > 0.1);
        let e = sol41.identity();
        assert_eq!(r.apply(&e).unwrap(), e);

        let nil = GeometrySpec::default_for(GeometryKind::Nil4);
        for k in [IsometryKind::Nil4S1, IsometryKind::Nil4S2] {
            assert_eq!(order_residual(&find(&nil, k), 2, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn pullback_identity_and_rotation() {
        let spec = GeometrySpec::sol40();
        let l = left_translation(&spec, &spec.identity()).unwrap();
        let p = Point::new(-0.9, 1.0, 0.3, 0.7);
        assert_eq!(
            pullback_metric(&spec, &l, &p).unwrap(),
            metric_at(&spec, &p).unwrap()
        );
        let rot = find(&spec, IsometryKind::Sol40Rotation(PI / 3.0));
        assert!(pullback_residual(&spec, &rot, &p).unwrap() < 1e-10);
    }

    #[test]
    fn nil4_s2_for_several_parameters() {
        for (t1, t2, t3, a) in [
            (1.0, 1.0, 1.0, 0.0),
            (0.3, 2.0, 5.0, -2.1),
            (3.0, 0.7, 0.5, 0.6),
        ] {
            let spec = GeometrySpec::nil4(t1, t2, t3, a).unwrap();
            let s2 = find(&spec, IsometryKind::Nil4S2);
            let p = Point::new(1.3, -0.2, 0.8, 1.9);
            assert!(pullback_residual(&spec, &s2, &p).unwrap() < 1e-10);
        }
    }

    #[test]
    fn report_edge_cases() {
        let spec = GeometrySpec::sol40();
        let empty = invariance_report(&spec, 0, 1).unwrap();
        assert!(empty.generators.is_empty());
        assert_eq!(empty.max_residual, 0.0);

        let report = invariance_report(&spec, 20, 9).unwrap();
        assert!(report.passes(1e-9), "{report:?}");
        assert_eq!(report, invariance_report(&spec, 20, 9).unwrap());

        // 0.1 dt dx added to the quadratic form
        let perturbed = FnMetric(|p: &Point| {
            let mut g = metric_at(&spec, p)?;
            g[(0, 1)] += 0.05;
            g[(1, 0)] += 0.05;
            Ok(g)
        });
        let bad =
            invariance_report_with(&spec, &perturbed, &InvarianceOptions::new(20, 9)).unwrap();
        assert!(bad.max_residual > 1e-3);
    }

    #[test]
    fn exact_jacobians_match_fd() {
        let p = Point::new(0.6, -0.8, 1.2, 0.4);
        for kind in GeometryKind::ALL {
            let spec = GeometrySpec::default_for(kind);
            let mut maps = stabilizer_generators(&spec, &SOL40_ROTATION_ANGLES);
            let g = if kind == GeometryKind::Sol41 {
                Point::new(1.9, 0.5, -0.7, 1.1)
            } else {
                Point::new(-0.9, 0.5, -0.7, 1.1)
            };
            maps.push(left_translation(&spec, &g).unwrap());
            for phi in maps {
                let res = jacobian_fd_residual(&phi, &p, 1e-3).unwrap();
                assert!(res < 1e-7, "{kind} {}: {res}", phi.label());
            }
        }
    }
}
