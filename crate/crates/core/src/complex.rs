//! Frame-constant almost complex structures and closedness of the
//! associated (possibly conformally rescaled) Kähler form.
//!
//! The search is finite: `J` is constant in the orthonormal frame and maps
//! each frame axis to plus or minus another one. Any verdict is a statement
//! about those 12 candidates only.

use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::exec::{max_residual, Execution};
use crate::metric::{orthonormal_frame_at, MetricField, MetricParams};
use crate::sampling::{self, random_point};
use crate::spaces::{GeometryKind, GeometrySpec, Point};
use crate::Mat4;

/// Step for the exterior derivative, before chart scaling.
pub const D_OMEGA_STEP: f64 = 1e-5;

pub const SEARCH_SCOPE: &str =
    "J constant in the orthonormal frame, signed pairings of frame axes (12 candidates)";

/// `J` in orthonormal-frame components: `J eᵢ = Σₖ J[k][i] eₖ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmostComplexCandidate {
    pub j: Mat4,
    pub label: String,
}

impl AlmostComplexCandidate {
    /// `‖J² + I‖∞ + ‖JᵀJ − I‖∞`, zero for every enumerated candidate.
    pub fn invariant_residual(&self) -> f64 {
        (self.j * self.j + Mat4::identity()).amax()
            + (self.j.transpose() * self.j - Mat4::identity()).amax()
    }
}

fn label_of(j: &Mat4) -> String {
    let mut parts = Vec::new();
    for i in 0..4 {
        let k = (0..4)
            .find(|&k| j[(k, i)] != 0.0)
            .expect("signed permutation");
        if i < k {
            let sign = if j[(k, i)] > 0.0 { '+' } else { '-' };
            parts.push(format!("e{}->{}e{}", i + 1, sign, k + 1));
        }
    }
    parts.join(",")
}

/// All signed permutation matrices with `J² = −I`, found by brute force
/// over the 384 signed permutations of four axes.
pub fn enumerate_candidates() -> Vec<AlmostComplexCandidate> {
    let mut perms = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().all(|&i| !std::mem::replace(&mut seen[i], true)) {
                        perms.push(p);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for p in perms {
        for signs in 0..16u32 {
            let mut j = Mat4::zeros();
            for (i, &k) in p.iter().enumerate() {
                j[(k, i)] = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
            }
            if j * j == -Mat4::identity() {
                out.push(AlmostComplexCandidate {
                    label: label_of(&j),
                    j,
                });
            }
        }
    }
    out
}

/// `ω(X, Y) = ĝ(JX, Y)` in coordinates, `ĝ = e^{2εt} g`.
///
/// With `F` the orthonormal frame this is `e^{2εt} F⁻ᵀ Jᵀ F⁻¹`.
pub fn kahler_form(
    spec: &GeometrySpec,
    j: &Mat4,
    conformal_exponent: f64,
    p: &Point,
) -> Result<Mat4> {
    let f = orthonormal_frame_at(spec, p)?;
    let inv = f
        .try_inverse()
        .ok_or(GeometryError::Singular("orthonormal frame"))?;
    let w = inv.transpose() * j.transpose() * inv * (2.0 * conformal_exponent * p.t).exp();
    Ok((w - w.transpose()) * 0.5)
}

/// Same form for an arbitrary metric, with `J` given in coordinates. Used
/// for controls that have no frame.
pub fn kahler_form_coordinate<M: MetricField + ?Sized>(
    metric: &M,
    j_coord: &Mat4,
    conformal_exponent: f64,
    p: &Point,
) -> Result<Mat4> {
    let g = metric.metric(p)?;
    let w = j_coord.transpose() * g * (2.0 * conformal_exponent * p.t).exp();
    Ok((w - w.transpose()) * 0.5)
}

/// `max |∂ᵢωⱼₖ + ∂ⱼωₖᵢ + ∂ₖωᵢⱼ|` over `i < j < k` at `p`.
pub fn d_omega_at<F>(omega: &F, p: &Point, h: f64) -> Result<f64>
where
    F: Fn(&Point) -> Result<Mat4>,
{
    let d = crate::fd::gradient(omega, p, h)?;
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in i + 1..4 {
            for k in j + 1..4 {
                let v = d[i][(j, k)] + d[j][(k, i)] + d[k][(i, j)];
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// Largest exterior-derivative component of the Kähler form over `points`.
pub fn d_omega_residual(
    spec: &GeometrySpec,
    j: &Mat4,
    conformal_exponent: f64,
    points: &[Point],
) -> Result<f64> {
    let omega = |q: &Point| kahler_form(spec, j, conformal_exponent, q);
    let values = points
        .iter()
        .map(|p| d_omega_at(&omega, p, D_OMEGA_STEP * spec.fd_scale(p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(max_residual(&values))
}

/// [`d_omega_residual`] for an arbitrary metric and coordinate `J`.
pub fn d_omega_residual_of<M: MetricField + ?Sized>(
    metric: &M,
    j_coord: &Mat4,
    conformal_exponent: f64,
    points: &[Point],
) -> Result<f64> {
    let omega = |q: &Point| kahler_form_coordinate(metric, j_coord, conformal_exponent, q);
    let values = points
        .iter()
        .map(|p| d_omega_at(&omega, p, D_OMEGA_STEP * metric.fd_scale(p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(max_residual(&values))
}

/// `max |g(JX, JY) − g(X, Y)|` over coordinate basis pairs at the points.
pub fn compatibility_residual(spec: &GeometrySpec, j: &Mat4, points: &[Point]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for p in points {
        let f = orthonormal_frame_at(spec, p)?;
        let inv = f
            .try_inverse()
            .ok_or(GeometryError::Singular("orthonormal frame"))?;
        let g = inv.transpose() * inv;
        let jc = f * j * inv;
        let diff = jc.transpose() * g * jc - g;
        worst = worst.max(diff.amax() / g.amax());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateResidual {
    pub label: String,
    pub j: [[f64; 4]; 4],
    /// `d_omega_residual` at conformal exponent 0.
    pub unscaled: f64,
    /// `d_omega_residual` at conformal exponent 1 (factor `e^{2t}`).
    pub rescaled: f64,
}

pub const KAHLER_REPORT_FORMAT: &str = "thurston4.kahler";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KahlerScanReport {
    pub format: &'static str,
    pub version: u32,
    pub geometry: GeometryKind,
    pub params: MetricParams,
    pub seed: u64,
    pub samples: usize,
    pub search_scope: &'static str,
    pub candidates: Vec<CandidateResidual>,
    /// Smallest residual over candidates and both exponents.
    pub best_label: String,
    pub best_exponent: u8,
    pub best_residual: f64,
}

impl KahlerScanReport {
    /// The candidate with the smallest residual at the given exponent.
    pub fn best_at(&self, exponent: u8) -> Option<&CandidateResidual> {
        let key = |c: &CandidateResidual| {
            if exponent == 0 {
                c.unscaled
            } else {
                c.rescaled
            }
        };
        self.candidates
            .iter()
            .min_by(|a, b| key(a).total_cmp(&key(b)))
    }
}

/// Residuals of every candidate at `samples` seeded random points, for
/// exponents 0 and 1.
pub fn kahler_scan(
    spec: &GeometrySpec,
    samples: usize,
    seed: u64,
    execution: Execution,
) -> Result<KahlerScanReport> {
    let mut rng = sampling::rng(seed);
    let points: Vec<Point> = (0..samples)
        .map(|_| random_point(spec.kind(), &mut rng))
        .collect();
    let candidates = enumerate_candidates();
    let jobs: Vec<(usize, u8)> = (0..candidates.len())
        .flat_map(|c| [(c, 0u8), (c, 1u8)])
        .collect();
    let residuals = execution.try_map(&jobs, |&(c, e)| {
        d_omega_residual(spec, &candidates[c].j, f64::from(e), &points)
    })?;

    let mut rows = Vec::with_capacity(candidates.len());
    let (mut best_label, mut best_exponent, mut best_residual) = (String::new(), 0, f64::INFINITY);
    for (c, cand) in candidates.iter().enumerate() {
        let (unscaled, rescaled) = (residuals[2 * c], residuals[2 * c + 1]);
        for (e, r) in [(0u8, unscaled), (1, rescaled)] {
            if r < best_residual {
                (best_label, best_exponent, best_residual) = (cand.label.clone(), e, r);
            }
        }
        let mut j = [[0.0; 4]; 4];
        for (r, row) in j.iter_mut().enumerate() {
            for (col, v) in row.iter_mut().enumerate() {
                *v = cand.j[(r, col)];
            }
        }
        rows.push(CandidateResidual {
            label: cand.label.clone(),
            j,
            unscaled,
            rescaled,
        });
    }
    if samples == 0 {
        best_residual = 0.0;
    }
    Ok(KahlerScanReport {
        format: KAHLER_REPORT_FORMAT,
        version: 1,
        geometry: spec.kind(),
        params: *spec.params(),
        seed,
        samples,
        search_scope: SEARCH_SCOPE,
        candidates: rows,
        best_label,
        best_exponent,
        best_residual,
    })
}
