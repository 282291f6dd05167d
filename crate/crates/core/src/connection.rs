//! Levi-Civita connection and curvature by two independent routes.
//!
//! *Coordinate route*: Christoffel symbols and the Riemann tensor from
//! Richardson-extrapolated finite differences of the coordinate metric. It
//! only needs a [`MetricField`], so it also runs on test metrics.
//!
//! *Frame route*: the orthonormal frame has constant structure constants
//! `C^c_ab`, so the Koszul formula
//! `2⟨∇_X Y, Z⟩ = ⟨[X,Y],Z⟩ − ⟨[Y,Z],X⟩ + ⟨[Z,X],Y⟩`
//! gives constant coefficients `Γ^c_ab = ⟨∇_{F_a} F_b, F_c⟩` and the
//! curvature follows algebraically.
//!
//! Conventions: `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z`,
//! `R_ijkl = ⟨R(∂_i, ∂_j)∂_k, ∂_l⟩`, and the sectional curvature of the
//! plane `u ∧ v` is `R(u,v,v,u) / (|u|²|v|² − ⟨u,v⟩²)`, positive on spheres.

use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::metric::{frame_derivatives_at, metric_at, orthonormal_frame_at, MetricField};
use crate::spaces::{GeometrySpec, Point, StructureConstants, TangentVector};
use crate::{fd, Mat4, Vec4};

pub type Rank3 = [[[f64; 4]; 4]; 4];
pub type Rank4 = [[[[f64; 4]; 4]; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    Coordinate,
    OrthonormalFrame,
}

/// `gamma[k][i][j] = Γᵏᵢⱼ`, i.e. `∇_{∂ᵢ} ∂ⱼ = Σₖ Γᵏᵢⱼ ∂ₖ` (or the frame
/// analogue).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffels {
    pub gamma: Rank3,
    pub basis: Basis,
}

impl Christoffels {
    /// `Σ Γᵏᵢⱼ uⁱ vʲ`.
    pub fn contract(&self, u: &Vec4, v: &Vec4) -> Vec4 {
        let mut out = Vec4::zeros();
        for k in 0..4 {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    s += self.gamma[k][i][j] * u[i] * v[j];
                }
            }
            out[k] = s;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Christoffels) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    worst = worst.max((self.gamma[k][i][j] - other.gamma[k][i][j]).abs());
                }
            }
        }
        worst
    }

    /// Largest `|Γᵏᵢⱼ − Γᵏⱼᵢ|`.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    worst = worst.max((self.gamma[k][i][j] - self.gamma[k][j][i]).abs());
                }
            }
        }
        worst
    }
}

/// Finite-difference steps for the coordinate route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdOptions {
    /// Step for first derivatives of the metric.
    pub step: f64,
    /// Step for second derivatives of the metric; larger, because the
    /// rounding error of a second difference grows like `ε/h²`.
    pub second_step: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            step: 1e-4,
            second_step: 1e-3,
        }
    }
}

fn as_step_error(err: GeometryError, step: f64, p: &Point) -> GeometryError {
    match err {
        GeometryError::Domain { .. } => GeometryError::StepTooLarge {
            step,
            point: p.to_array(),
        },
        other => other,
    }
}

fn inverse(g: &Mat4) -> Result<Mat4> {
    g.try_inverse()
        .map(|inv| (inv + inv.transpose()) * 0.5)
        .ok_or(GeometryError::Singular("metric"))
}

/// `Γ¹[l][i][j] = ½(∂ᵢ g_jl + ∂ⱼ g_il − ∂ₗ g_ij)`.
fn first_kind(dg: &[Mat4; 4]) -> Rank3 {
    let mut out = [[[0.0; 4]; 4]; 4];
    for l in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                out[l][i][j] = 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
            }
        }
    }
    out
}

fn raise(ginv: &Mat4, lowered: &Rank3) -> Rank3 {
    let mut out = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                for l in 0..4 {
                    s += ginv[(k, l)] * lowered[l][i][j];
                }
                out[k][i][j] = s;
            }
        }
    }
    out
}

/// Coordinate Christoffel symbols from central differences of the metric.
pub fn christoffel_fd<M: MetricField + ?Sized>(
    metric: &M,
    p: &Point,
    opts: &FdOptions,
) -> Result<Christoffels> {
    let h = opts.step * metric.fd_scale(p);
    let g = metric.metric(p)?;
    let ginv = inverse(&g)?;
    let f = |q: &Point| metric.metric(q);
    let dg = fd::gradient(&f, p, h).map_err(|e| as_step_error(e, h, p))?;
    let mut gamma = raise(&ginv, &first_kind(&dg));
    for k in 0..4 {
        for i in 0..4 {
            for j in (i + 1)..4 {
                let s = 0.5 * (gamma[k][i][j] + gamma[k][j][i]);
                gamma[k][i][j] = s;
                gamma[k][j][i] = s;
            }
        }
    }
    Ok(Christoffels {
        gamma,
        basis: Basis::Coordinate,
    })
}

/// Constant connection coefficients and curvature of an orthonormal
/// left-invariant frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameConnection {
    /// `structure[c][a][b] = ⟨[F_a, F_b], F_c⟩`.
    pub structure: Rank3,
    /// `gamma[c][a][b] = ⟨∇_{F_a} F_b, F_c⟩`.
    pub gamma: Rank3,
    /// `riemann[a][b][c][d] = ⟨R(F_a, F_b) F_c, F_d⟩`.
    pub riemann: Rank4,
}

impl FrameConnection {
    /// `change` expresses the orthonormal frame in the basis of `structure`.
    pub fn new(structure: &StructureConstants, change: &Mat4) -> Result<Self> {
        let back = change
            .try_inverse()
            .ok_or(GeometryError::Singular("frame change"))?;
        let mut cs = [[[0.0; 4]; 4]; 4];
        for d in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    let mut s = 0.0;
                    for i in 0..4 {
                        for j in 0..4 {
                            for k in 0..4 {
                                s += change[(i, a)]
                                    * change[(j, b)]
                                    * structure.c[k][i][j]
                                    * back[(d, k)];
                            }
                        }
                    }
                    cs[d][a][b] = s;
                }
            }
        }
        Ok(Self::from_orthonormal_structure(cs))
    }

    /// Koszul formula on orthonormal structure constants.
    pub fn from_orthonormal_structure(structure: Rank3) -> Self {
        let c = &structure;
        let mut gamma = [[[0.0; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for k in 0..4 {
                    gamma[k][a][b] = 0.5 * (c[k][a][b] - c[a][b][k] + c[b][k][a]);
                }
            }
        }
        let mut riemann = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for cc in 0..4 {
                    for d in 0..4 {
                        let mut s = 0.0;
                        for e in 0..4 {
                            s += gamma[e][b][cc] * gamma[d][a][e]
                                - gamma[e][a][cc] * gamma[d][b][e]
                                - c[e][a][b] * gamma[d][e][cc];
                        }
                        riemann[a][b][cc][d] = s;
                    }
                }
            }
        }
        FrameConnection {
            structure,
            gamma,
            riemann,
        }
    }

    pub fn christoffels(&self) -> Christoffels {
        Christoffels {
            gamma: self.gamma,
            basis: Basis::OrthonormalFrame,
        }
    }

    /// Largest `|Γᶜₐ_b + Γᵇₐ_c|`: metric compatibility in an orthonormal frame.
    pub fn compatibility_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    worst = worst.max((self.gamma[c][a][b] + self.gamma[b][a][c]).abs());
                }
            }
        }
        worst
    }

    /// Largest `|Γᶜₐ_b − Γᶜ_bₐ − Cᶜₐ_b|`: torsion in frame form.
    pub fn torsion_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let t = self.gamma[c][a][b] - self.gamma[c][b][a] - self.structure[c][a][b];
                    worst = worst.max(t.abs());
                }
            }
        }
        worst
    }

    pub fn curvature(&self) -> CurvatureTensor {
        CurvatureTensor {
            r: self.riemann,
            metric: Mat4::identity(),
            basis: Basis::OrthonormalFrame,
        }
    }
}

/// Constant connection coefficients of the orthonormal frame.
pub fn christoffel_frame(spec: &GeometrySpec) -> Christoffels {
    spec.frame_connection().christoffels()
}

/// Coordinate Christoffel symbols obtained by pushing the frame-route
/// connection through the orthonormal frame and its exact derivatives.
///
/// With `F` the orthonormal frame and `B = F⁻¹`, `∂ⱼ = Σ_b B_bj F_b` and
/// `∇_{∂ᵢ} F_b = Σ B_ai Γᶜₐ_b F_c`, so
/// `Γᵏᵢⱼ = Σ_b (Σ B_ai Γᶜₐ_b F_kc − ∂ᵢF_kb) B_bj`.
pub fn christoffel_from_frame(spec: &GeometrySpec, p: &Point) -> Result<Christoffels> {
    let f = orthonormal_frame_at(spec, p)?;
    let b = f.try_inverse().ok_or(GeometryError::Singular("frame"))?;
    let change = spec.orthonormal_change();
    let df = frame_derivatives_at(spec, p)?;
    let conn = &spec.frame_connection().gamma;
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        let mut gi = Mat4::zeros();
        for c in 0..4 {
            for bb in 0..4 {
                let mut s = 0.0;
                for a in 0..4 {
                    s += b[(a, i)] * conn[c][a][bb];
                }
                gi[(c, bb)] = s;
            }
        }
        let ni = f * gi - df[i] * change;
        let row = ni * b;
        for k in 0..4 {
            for j in 0..4 {
                gamma[k][i][j] = row[(k, j)];
            }
        }
    }
    Ok(Christoffels {
        gamma,
        basis: Basis::Coordinate,
    })
}

/// Fully lowered Riemann tensor together with the metric of its basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureTensor {
    pub r: Rank4,
    pub metric: Mat4,
    pub basis: Basis,
}

impl CurvatureTensor {
    pub fn ricci(&self) -> Mat4 {
        let ginv = inverse(&self.metric).unwrap_or_else(|_| Mat4::from_element(f64::NAN));
        let mut ric = Mat4::zeros();
        for j in 0..4 {
            for k in 0..4 {
                let mut s = 0.0;
                for i in 0..4 {
                    for l in 0..4 {
                        s += ginv[(i, l)] * self.r[i][j][k][l];
                    }
                }
                ric[(j, k)] = s;
            }
        }
        (ric + ric.transpose()) * 0.5
    }

    pub fn scalar(&self) -> f64 {
        let ginv = inverse(&self.metric).unwrap_or_else(|_| Mat4::from_element(f64::NAN));
        let ric = self.ricci();
        (ginv.component_mul(&ric)).sum()
    }

    /// `R(u,v,v,u)`.
    pub fn evaluate(&self, a: &Vec4, b: &Vec4, c: &Vec4, d: &Vec4) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        s += self.r[i][j][k][l] * a[i] * b[j] * c[k] * d[l];
                    }
                }
            }
        }
        s
    }

    /// Sectional curvature of the plane spanned by `u`, `v` (components in
    /// this tensor's basis).
    pub fn sectional(&self, u: &Vec4, v: &Vec4) -> Result<f64> {
        let g = &self.metric;
        let uu = (u.transpose() * g * u)[(0, 0)];
        let vv = (v.transpose() * g * v)[(0, 0)];
        let uv = (u.transpose() * g * v)[(0, 0)];
        let area2 = uu * vv - uv * uv;
        if area2.is_nan() || area2 <= 1e-14 * uu * vv {
            return Err(GeometryError::DegeneratePlane { area2 });
        }
        Ok(self.evaluate(u, v, v, u) / area2)
    }

    /// Components in another basis whose vectors are the columns of
    /// `change` (expressed in the current basis).
    pub fn transformed(&self, change: &Mat4, basis: Basis) -> CurvatureTensor {
        let mut cur = self.r;
        for slot in 0..4 {
            let mut next = [[[[0.0; 4]; 4]; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            let idx = [i, j, k, l];
                            let mut s = 0.0;
                            for m in 0..4 {
                                let mut src = idx;
                                src[slot] = m;
                                s += change[(m, idx[slot])] * cur[src[0]][src[1]][src[2]][src[3]];
                            }
                            next[i][j][k][l] = s;
                        }
                    }
                }
            }
            cur = next;
        }
        CurvatureTensor {
            r: cur,
            metric: change.transpose() * self.metric * change,
            basis,
        }
    }

    pub fn max_abs_diff(&self, other: &CurvatureTensor) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        worst = worst.max((self.r[i][j][k][l] - other.r[i][j][k][l]).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.r
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest violation of `R_ijkl = −R_jikl = −R_ijlk = R_klij`.
    pub fn symmetry_residual(&self) -> f64 {
        let r = &self.r;
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let v = r[i][j][k][l];
                        worst = worst
                            .max((v + r[j][i][k][l]).abs())
                            .max((v + r[i][j][l][k]).abs())
                            .max((v - r[k][l][i][j]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest `|R_ijkl + R_iklj + R_iljk|`.
    pub fn bianchi_residual(&self) -> f64 {
        let r = &self.r;
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        worst = worst.max((r[i][j][k][l] + r[i][k][l][j] + r[i][l][j][k]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Frobenius norm of the Ricci tensor measured with the metric.
    pub fn ricci_norm(&self) -> f64 {
        let ginv = inverse(&self.metric).unwrap_or_else(|_| Mat4::from_element(f64::NAN));
        let ric = self.ricci();
        let mixed = ginv * ric;
        (mixed * mixed).trace().sqrt()
    }

    /// `|R|² = R_ijkl R^ijkl`, square-rooted.
    pub fn riemann_norm(&self) -> f64 {
        let ginv = inverse(&self.metric).unwrap_or_else(|_| Mat4::from_element(f64::NAN));
        let raised = self.transformed(&ginv, self.basis);
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        s += self.r[i][j][k][l] * raised.r[i][j][k][l];
                    }
                }
            }
        }
        s.sqrt()
    }
}

/// Coordinate Riemann tensor from finite differences of the metric.
///
/// Uses `∂ᵢΓᵐⱼₖ = ∂ᵢgᵐˡ Γ¹ₗⱼₖ + gᵐˡ ∂ᵢΓ¹ₗⱼₖ` with `∂ᵢgᵐˡ = −(g⁻¹ ∂ᵢg g⁻¹)ᵐˡ`,
/// so only first and second differences of the metric itself are needed.
pub fn riemann_fd<M: MetricField + ?Sized>(
    metric: &M,
    p: &Point,
    opts: &FdOptions,
) -> Result<CurvatureTensor> {
    let scale = metric.fd_scale(p);
    let h1 = opts.step * scale;
    let h2 = opts.second_step * scale;
    let g = metric.metric(p)?;
    let ginv = inverse(&g)?;
    let f = |q: &Point| metric.metric(q);
    let dg = fd::gradient(&f, p, h1).map_err(|e| as_step_error(e, h1, p))?;
    let d2g = fd::hessian(&f, p, h2).map_err(|e| as_step_error(e, h2, p))?;

    let low = first_kind(&dg);
    let gamma = raise(&ginv, &low);

    // dgamma[i][m][j][k] = ∂ᵢ Γᵐⱼₖ
    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        let dginv = -(ginv * dg[i] * ginv);
        let mut dlow = [[[0.0; 4]; 4]; 4];
        for l in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    dlow[l][j][k] =
                        0.5 * (d2g[i][j][(k, l)] + d2g[i][k][(j, l)] - d2g[i][l][(j, k)]);
                }
            }
        }
        for m in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let mut s = 0.0;
                    for l in 0..4 {
                        s += dginv[(m, l)] * low[l][j][k] + ginv[(m, l)] * dlow[l][j][k];
                    }
                    dgamma[i][m][j][k] = s;
                }
            }
        }
    }

    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                // upper[m] = (R(∂i,∂j)∂k)^m
                let mut upper = [0.0; 4];
                for (m, up) in upper.iter_mut().enumerate() {
                    let mut s = dgamma[i][m][j][k] - dgamma[j][m][i][k];
                    for n in 0..4 {
                        s += gamma[n][j][k] * gamma[m][i][n] - gamma[n][i][k] * gamma[m][j][n];
                    }
                    *up = s;
                }
                for l in 0..4 {
                    let mut s = 0.0;
                    for (m, up) in upper.iter().enumerate() {
                        s += g[(l, m)] * up;
                    }
                    r[i][j][k][l] = s;
                }
            }
        }
    }
    Ok(CurvatureTensor {
        r,
        metric: g,
        basis: Basis::Coordinate,
    })
}

/// Coordinate-route Riemann tensor of the configured metric at `p`.
pub fn riemann_at(spec: &GeometrySpec, p: &Point) -> Result<CurvatureTensor> {
    riemann_fd(spec, p, &FdOptions::default())
}

/// Constant frame-route Riemann tensor in the orthonormal frame.
pub fn riemann_frame(spec: &GeometrySpec) -> CurvatureTensor {
    spec.frame_connection().curvature()
}

/// Frame-route Riemann tensor pushed to coordinate components at `p`.
pub fn riemann_frame_at(spec: &GeometrySpec, p: &Point) -> Result<CurvatureTensor> {
    let f = orthonormal_frame_at(spec, p)?;
    let b = f.try_inverse().ok_or(GeometryError::Singular("frame"))?;
    let mut out = riemann_frame(spec).transformed(&b, Basis::Coordinate);
    out.metric = metric_at(spec, p)?;
    Ok(out)
}

/// Coordinate-route tensor re-expressed in the orthonormal frame at `p`,
/// where it can be compared entry by entry with [`riemann_frame`].
pub fn riemann_fd_in_frame(
    spec: &GeometrySpec,
    p: &Point,
    opts: &FdOptions,
) -> Result<CurvatureTensor> {
    let f = orthonormal_frame_at(spec, p)?;
    Ok(riemann_fd(spec, p, opts)?.transformed(&f, Basis::OrthonormalFrame))
}

/// Sectional curvature of the plane `u ∧ v` (both based at the same point),
/// evaluated with the frame-route tensor.
pub fn sectional(spec: &GeometrySpec, u: &TangentVector, v: &TangentVector) -> Result<f64> {
    if u.base != v.base {
        return Err(GeometryError::InvalidArgument(
            "sectional curvature needs two vectors at the same point".into(),
        ));
    }
    let f = orthonormal_frame_at(spec, &u.base)?;
    let b = f.try_inverse().ok_or(GeometryError::Singular("frame"))?;
    riemann_frame(spec).sectional(&(b * u.components), &(b * v.components))
}

/// Coordinate-route Ricci tensor at `p`.
pub fn ricci_at(spec: &GeometrySpec, p: &Point) -> Result<Mat4> {
    Ok(riemann_at(spec, p)?.ricci())
}

/// Coordinate-route scalar curvature at `p`.
pub fn scalar_at(spec: &GeometrySpec, p: &Point) -> Result<f64> {
    Ok(riemann_at(spec, p)?.scalar())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{frame_at, FlatMetric};
    use crate::spaces::GeometryKind;

    #[test]
    fn flat_metric_has_no_connection_or_curvature() {
        let p = Point::new(0.3, -1.0, 2.0, 0.5);
        let gamma = christoffel_fd(&FlatMetric, &p, &FdOptions::default()).unwrap();
        assert!(gamma.gamma.iter().flatten().flatten().all(|v| *v == 0.0));
        let r = riemann_fd(&FlatMetric, &p, &FdOptions::default()).unwrap();
        assert_eq!(r.max_abs(), 0.0);
        assert_eq!(r.scalar(), 0.0);
    }

    /// Closed forms of the diagonal metric dt² + Σ e^{−2λt} dxᵢ²:
    /// Γᵗₓₓ = λ e^{−2λt}, Γˣₜₓ = −λ.
    #[test]
    fn diagonal_christoffels() {
        let sol40 = GeometrySpec::sol40();
        let origin = Point::new(0.0, 0.0, 0.0, 0.0);
        let g = christoffel_fd(&sol40, &origin, &FdOptions::default()).unwrap();
        assert!((g.gamma[0][1][1] - 1.0).abs() < 1e-10);
        assert!((g.gamma[0][3][3] + 2.0).abs() < 1e-10);

        let mn = GeometrySpec::sol4mn(5.0, 6.0).unwrap();
        let [a, _, _] = mn.exponents();
        let p = Point::new(0.7, 0.1, 0.2, 0.3);
        let g = christoffel_fd(&mn, &p, &FdOptions::default()).unwrap();
        assert!((g.gamma[1][0][1] + a).abs() < 1e-10);
        assert!((g.gamma[0][1][1] - a * (-2.0 * a * 0.7_f64).exp()).abs() < 1e-10);
    }

    /// Hand evaluation of the Koszul formula on [e1, ei] = λᵢ eᵢ:
    /// ⟨∇_{Eᵢ}Eᵢ, E₁⟩ = λᵢ and ∇_{E₁} vanishes.
    #[test]
    fn koszul_on_diagonal_brackets() {
        let sol40 = christoffel_frame(&GeometrySpec::sol40());
        assert_eq!(sol40.gamma[0][1][1], 1.0);
        assert_eq!(sol40.gamma[1][1][0], -1.0);
        assert_eq!(sol40.gamma[0][3][3], -2.0);
        // E2, E3, E4 commute: no component of ∇_{E2}E3 along span{E2, E3, E4}
        for k in 1..4 {
            assert_eq!(sol40.gamma[k][1][2], 0.0);
        }
        let mn = GeometrySpec::sol4mn(5.0, 6.0).unwrap();
        let [a, _, _] = mn.exponents();
        assert!((christoffel_frame(&mn).gamma[0][1][1] - a).abs() < 1e-15);
    }

    #[test]
    fn frame_connection_is_metric_and_torsion_free() {
        for spec in [
            GeometrySpec::sol40(),
            GeometrySpec::sol4mn(7.0, 10.0).unwrap(),
            GeometrySpec::sol41(0.6, 2.0).unwrap(),
            GeometrySpec::nil4(0.8, 1.3, 2.0, 0.7).unwrap(),
        ] {
            let fc = spec.frame_connection();
            assert!(fc.compatibility_residual() < 1e-14);
            assert!(fc.torsion_residual() < 1e-14);
        }
    }

    /// Closed forms for [e1, ei] = λᵢ eᵢ with orthonormal eᵢ:
    /// K(e1, ei) = −λᵢ², K(ei, ej) = −λᵢλⱼ.
    #[test]
    fn sol40_sectional_values() {
        let spec = GeometrySpec::sol40();
        let p = Point::new(0.4, 1.0, -1.0, 0.2);
        let f = frame_at(&spec, &p).unwrap();
        let col = |i: usize| TangentVector::new(p, f.column(i).into_owned());
        let k14 = sectional(&spec, &col(0), &col(3)).unwrap();
        let k24 = sectional(&spec, &col(1), &col(3)).unwrap();
        assert!((k14 + 4.0).abs() < 1e-12);
        assert!((k24 - 2.0).abs() < 1e-12);

        let u = col(1).components;
        let v = col(3).components;
        let k = sectional(
            &spec,
            &TangentVector::new(p, u + v),
            &TangentVector::new(p, v),
        )
        .unwrap();
        assert!((k - k24).abs() < 1e-10);
        assert!(matches!(
            sectional(&spec, &col(1), &TangentVector::new(p, u * 3.0)),
            Err(GeometryError::DegeneratePlane { .. })
        ));
    }

    #[test]
    fn frame_route_scalar_curvature() {
        assert!((riemann_frame(&GeometrySpec::sol40()).scalar() + 6.0).abs() < 1e-12);
        let mn = GeometrySpec::sol4mn(5.0, 6.0).unwrap();
        let [a, b, c] = mn.exponents();
        let expected = -(a * a + b * b + c * c);
        assert!((riemann_frame(&mn).scalar() - expected).abs() < 1e-12);
    }

    #[test]
    fn coordinate_route_scalar_for_sol40() {
        let spec = GeometrySpec::sol40();
        for p in [
            Point::new(0.0, 0.0, 0.0, 0.0),
            Point::new(1.3, -0.4, 2.0, 1.0),
        ] {
            let s = scalar_at(&spec, &p).unwrap();
            assert!((s + 6.0).abs() < 1e-7, "{s}");
        }
    }

    #[test]
    fn exact_coordinate_christoffels_match_fd() {
        for kind in GeometryKind::ALL {
            let spec = GeometrySpec::default_for(kind);
            let p = Point::new(0.9, -0.3, 0.6, 1.2);
            let exact = christoffel_from_frame(&spec, &p).unwrap();
            let fd = christoffel_fd(&spec, &p, &FdOptions::default()).unwrap();
            assert!(
                exact.max_abs_diff(&fd) < 1e-8,
                "{kind}: {}",
                exact.max_abs_diff(&fd)
            );
            assert!(exact.symmetry_residual() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn sol41_step_near_boundary() {
        let spec = GeometrySpec::default_for(GeometryKind::Sol41);
        let p = Point::new(0.05, 0.0, 0.0, 0.0);
        let big = FdOptions {
            step: 0.2,
            second_step: 0.2,
        };
        // fd_scale shrinks the step with t, so even 0.2 stays inside
        assert!(christoffel_fd(&spec, &p, &big).is_ok());
        let raw = crate::metric::FnMetric(|q: &Point| crate::metric::metric_at(&spec, q));
        assert!(matches!(
            christoffel_fd(&raw, &p, &big),
            Err(GeometryError::StepTooLarge { .. })
        ));
    }
}
