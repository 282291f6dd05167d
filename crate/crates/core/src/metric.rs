//! Invariant metric families, left-invariant frames and orthonormal frames.
//!
//! Metrics are stored as full symmetric 4×4 matrices in the coordinate basis
//! `(∂ₜ, ∂ₓ, ∂ᵧ, ∂𝓏)`. A quadratic-form cross term `k · du dv` contributes
//! `k/2` to both `g_uv` and `g_vu`.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::spaces::{GeometryKind, GeometrySpec, Point};
use crate::Mat4;

/// Symmetric metric value in the coordinate basis.
pub type MetricMatrix = Mat4;
/// Column `i` holds the coordinate components of the `i`-th frame field.
pub type Frame = Mat4;

/// Metric parameters; only `Sol⁴₁` and `Nil⁴` carry shape parameters, the
/// other two metrics are unique up to homothety.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "geometry", rename_all = "lowercase")]
pub enum MetricParams {
    Sol40,
    Sol4mn {
        m: f64,
        n: f64,
    },
    Sol41 {
        tau1: f64,
        tau2: f64,
    },
    Nil4 {
        tau1: f64,
        tau2: f64,
        tau3: f64,
        alpha: f64,
    },
}

impl MetricParams {
    pub fn kind(&self) -> GeometryKind {
        match self {
            MetricParams::Sol40 => GeometryKind::Sol40,
            MetricParams::Sol4mn { .. } => GeometryKind::Sol4mn,
            MetricParams::Sol41 { .. } => GeometryKind::Sol41,
            MetricParams::Nil4 { .. } => GeometryKind::Nil4,
        }
    }
}

fn positive(kind: GeometryKind, name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::InvalidParams {
            kind,
            reason: format!("{name} must be a positive real, got {v}"),
        })
    }
}

/// Accepts exactly the parameter values for which the metric is a
/// Riemannian metric. For `Nil⁴` this is `α² < τ₃`.
pub fn validate_params(params: &MetricParams) -> Result<()> {
    let kind = params.kind();
    match *params {
        MetricParams::Sol40 => Ok(()),
        MetricParams::Sol4mn { m, n } => {
            positive(kind, "m", m)?;
            positive(kind, "n", n)
        }
        MetricParams::Sol41 { tau1, tau2 } => {
            positive(kind, "tau1", tau1)?;
            positive(kind, "tau2", tau2)
        }
        MetricParams::Nil4 {
            tau1,
            tau2,
            tau3,
            alpha,
        } => {
            positive(kind, "tau1", tau1)?;
            positive(kind, "tau2", tau2)?;
            positive(kind, "tau3", tau3)?;
            if !alpha.is_finite() {
                return Err(GeometryError::InvalidParams {
                    kind,
                    reason: format!("alpha must be finite, got {alpha}"),
                });
            }
            if tau3 - alpha * alpha <= 0.0 {
                return Err(GeometryError::InvalidParams {
                    kind,
                    reason: format!(
                        "tau3 - alpha^2 must be positive, got {} (tau3 = {tau3}, alpha = {alpha})",
                        tau3 - alpha * alpha
                    ),
                });
            }
            Ok(())
        }
    }
}

/// Orthonormal frame expressed in the left-invariant frame (constant).
pub(crate) fn orthonormal_change(params: &MetricParams) -> Mat4 {
    match *params {
        MetricParams::Sol40 | MetricParams::Sol4mn { .. } => Mat4::identity(),
        MetricParams::Sol41 { tau1, tau2 } => Mat4::from_diagonal(&crate::Vec4::new(
            1.0 / tau1.sqrt(),
            1.0,
            1.0,
            1.0 / tau2.sqrt(),
        )),
        MetricParams::Nil4 {
            tau1,
            tau2,
            tau3,
            alpha,
        } => {
            // {E1/√τ1, E2, E3/√τ2, (E4 − αE2)/√(τ3 − α²)}
            let s = (tau3 - alpha * alpha).sqrt();
            let mut a = Mat4::zeros();
            a[(0, 0)] = 1.0 / tau1.sqrt();
            a[(1, 1)] = 1.0;
            a[(2, 2)] = 1.0 / tau2.sqrt();
            a[(1, 3)] = -alpha / s;
            a[(3, 3)] = 1.0 / s;
            a
        }
    }
}

/// Anything that assigns a metric matrix to chart points.
///
/// The coordinate curvature route and the pullback harness only need this,
/// so they also run on test metrics (flat, rescaled, perturbed).
pub trait MetricField: Sync {
    fn metric(&self, p: &Point) -> Result<MetricMatrix>;

    /// Length scale for finite-difference steps at `p`. Shrinks near a chart
    /// boundary so stencils stay inside the chart.
    fn fd_scale(&self, _p: &Point) -> f64 {
        1.0
    }
}

impl MetricField for GeometrySpec {
    fn metric(&self, p: &Point) -> Result<MetricMatrix> {
        metric_at(self, p)
    }

    fn fd_scale(&self, p: &Point) -> f64 {
        match self.kind() {
            GeometryKind::Sol41 => p.t.min(1.0),
            _ => 1.0,
        }
    }
}

/// The Euclidean metric `dt² + dx² + dy² + dz²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlatMetric;

impl MetricField for FlatMetric {
    fn metric(&self, _p: &Point) -> Result<MetricMatrix> {
        Ok(Mat4::identity())
    }
}

/// `factor · g` for an inner metric `g`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledMetric<'a, M> {
    pub inner: &'a M,
    pub factor: f64,
}

impl<M: MetricField> MetricField for ScaledMetric<'_, M> {
    fn metric(&self, p: &Point) -> Result<MetricMatrix> {
        Ok(self.inner.metric(p)? * self.factor)
    }

    fn fd_scale(&self, p: &Point) -> f64 {
        self.inner.fd_scale(p)
    }
}

/// Metric given by a closure.
pub struct FnMetric<F>(pub F);

impl<F> MetricField for FnMetric<F>
where
    F: Fn(&Point) -> Result<MetricMatrix> + Sync,
{
    fn metric(&self, p: &Point) -> Result<MetricMatrix> {
        (self.0)(p)
    }
}

/// The invariant metric at `p`, transcribed term by term.
pub fn metric_at(spec: &GeometrySpec, p: &Point) -> Result<MetricMatrix> {
    spec.check_point(p)?;
    let Point { t, x, .. } = *p;
    let mut g = Mat4::zeros();
    match *spec.params() {
        MetricParams::Sol40 | MetricParams::Sol4mn { .. } => {
            // dt² + e^{−2at} dx² + e^{−2bt} dy² + e^{−2ct} dz²
            let [a, b, c] = spec.exponents();
            g[(0, 0)] = 1.0;
            g[(1, 1)] = (-2.0 * a * t).exp();
            g[(2, 2)] = (-2.0 * b * t).exp();
            g[(3, 3)] = (-2.0 * c * t).exp();
        }
        MetricParams::Sol41 { tau1, tau2 } => {
            // t⁻² [ (x² + τ1) dt² + t² dx² + (1 + τ2 x²) dy² + τ2 t² dz²
            //       − 2tx (dt dx + τ2 dy dz) ]
            let t2 = t * t;
            g[(0, 0)] = (x * x + tau1) / t2;
            g[(1, 1)] = 1.0;
            g[(2, 2)] = (1.0 + tau2 * x * x) / t2;
            g[(3, 3)] = tau2;
            g[(0, 1)] = -x / t;
            g[(1, 0)] = -x / t;
            g[(2, 3)] = -tau2 * x / t;
            g[(3, 2)] = -tau2 * x / t;
        }
        MetricParams::Nil4 {
            tau1,
            tau2,
            tau3,
            alpha,
        } => {
            // τ1 dt² + dx² + (t² + τ2) dy² + (t⁴/4 + t²(α + τ2) + τ3) dz²
            //   − 2t dx dy + (t² + 2α) dx dz − (t³ + 2t(α + τ2)) dy dz
            let t2 = t * t;
            g[(0, 0)] = tau1;
            g[(1, 1)] = 1.0;
            g[(2, 2)] = t2 + tau2;
            g[(3, 3)] = 0.25 * t2 * t2 + t2 * (alpha + tau2) + tau3;
            g[(1, 2)] = -t;
            g[(2, 1)] = -t;
            g[(1, 3)] = 0.5 * t2 + alpha;
            g[(3, 1)] = 0.5 * t2 + alpha;
            let yz = -(0.5 * t2 * t + t * (alpha + tau2));
            g[(2, 3)] = yz;
            g[(3, 2)] = yz;
        }
    }
    Ok(g)
}

/// Inverse metric, assembled as `F Fᵀ` from the orthonormal frame `F`.
pub fn inverse_metric_at(spec: &GeometrySpec, p: &Point) -> Result<MetricMatrix> {
    let f = orthonormal_frame_at(spec, p)?;
    let inv = f * f.transpose();
    Ok((inv + inv.transpose()) * 0.5)
}

/// The left-invariant frame `E₁..E₄` at `p`.
pub fn frame_at(spec: &GeometrySpec, p: &Point) -> Result<Frame> {
    spec.check_point(p)?;
    let Point { t, x, .. } = *p;
    Ok(match spec.kind() {
        GeometryKind::Sol40 | GeometryKind::Sol4mn => {
            let [a, b, c] = spec.exponents();
            Mat4::from_diagonal(&crate::Vec4::new(
                1.0,
                (a * t).exp(),
                (b * t).exp(),
                (c * t).exp(),
            ))
        }
        // E1 = t∂t + x∂x, E2 = ∂x, E3 = t∂y + x∂z, E4 = ∂z
        GeometryKind::Sol41 => Mat4::new(
            t, 0.0, 0.0, 0.0, //
            x, 1.0, 0.0, 0.0, //
            0.0, 0.0, t, 0.0, //
            0.0, 0.0, x, 1.0,
        ),
        // E1 = ∂t, E2 = ∂x, E3 = t∂x + ∂y, E4 = t²/2 ∂x + t∂y + ∂z
        GeometryKind::Nil4 => Mat4::new(
            1.0,
            0.0,
            0.0,
            0.0, //
            0.0,
            1.0,
            t,
            0.5 * t * t, //
            0.0,
            0.0,
            1.0,
            t, //
            0.0,
            0.0,
            0.0,
            1.0,
        ),
    })
}

/// Partial derivatives `[∂ₜF, ∂ₓF, ∂ᵧF, ∂𝓏F]` of the left-invariant frame.
pub fn frame_derivatives_at(spec: &GeometrySpec, p: &Point) -> Result<[Frame; 4]> {
    spec.check_point(p)?;
    let t = p.t;
    let mut d = [Mat4::zeros(); 4];
    match spec.kind() {
        GeometryKind::Sol40 | GeometryKind::Sol4mn => {
            let [a, b, c] = spec.exponents();
            d[0][(1, 1)] = a * (a * t).exp();
            d[0][(2, 2)] = b * (b * t).exp();
            d[0][(3, 3)] = c * (c * t).exp();
        }
        GeometryKind::Sol41 => {
            d[0][(0, 0)] = 1.0;
            d[0][(2, 2)] = 1.0;
            d[1][(1, 0)] = 1.0;
            d[1][(3, 2)] = 1.0;
        }
        GeometryKind::Nil4 => {
            d[0][(1, 2)] = 1.0;
            d[0][(1, 3)] = t;
            d[0][(2, 3)] = 1.0;
        }
    }
    Ok(d)
}

/// The orthonormal frame: `{E₁..E₄}` for the `Sol⁴` families,
/// `{E₁/√τ₁, E₂, E₃, E₄/√τ₂}` for `Sol⁴₁` and
/// `{E₁/√τ₁, E₂, E₃/√τ₂, (E₄ − αE₂)/√(τ₃ − α²)}` for `Nil⁴`.
pub fn orthonormal_frame_at(spec: &GeometrySpec, p: &Point) -> Result<Frame> {
    Ok(frame_at(spec, p)? * spec.orthonormal_change())
}

/// `Gᵢⱼ = g(fᵢ, fⱼ)` for the columns of `fields`.
pub fn gram(spec: &GeometrySpec, p: &Point, fields: &Frame) -> Result<MetricMatrix> {
    let g = metric_at(spec, p)?;
    let out = fields.transpose() * g * fields;
    Ok((out + out.transpose()) * 0.5)
}

/// `g(u, v)` at `p` for coordinate components `u`, `v`.
pub fn inner(g: &MetricMatrix, u: &crate::Vec4, v: &crate::Vec4) -> f64 {
    (u.transpose() * g * v)[(0, 0)]
}
