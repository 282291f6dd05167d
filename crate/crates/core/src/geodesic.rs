//! Geodesic flow, exponential map and distance by shooting.
//!
//! Geodesics solve `γ̈ᵏ + Γᵏᵢⱼ γ̇ⁱ γ̇ʲ = 0` in chart coordinates. The
//! Christoffel symbols come from the frame route pushed to coordinates
//! ([`christoffel_from_frame`]), which is exact and cheap; the integrator is
//! the classical fixed-step fourth-order Runge–Kutta method.

use std::io::{self, Write};

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use crate::connection::christoffel_from_frame;
use crate::error::{GeometryError, Result};
use crate::exec::Execution;
use crate::metric::{inner, metric_at};
use crate::spaces::{GeometrySpec, Point};
use crate::Vec4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub position: Point,
    pub velocity: Vec4,
    /// Affine parameter.
    pub s: f64,
}

/// Right-hand side of the geodesic equation: `(γ̇, γ̈)`.
pub fn geodesic_rhs(spec: &GeometrySpec, state: &GeodesicState) -> Result<(Vec4, Vec4)> {
    let gamma = christoffel_from_frame(spec, &state.position)?;
    let v = state.velocity;
    Ok((v, -gamma.contract(&v, &v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status")]
pub enum TrajectoryStatus {
    Completed,
    /// The integration could not continue inside the chart (`Sol⁴₁`, `t → 0⁺`).
    ChartExit {
        s: f64,
    },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<GeodesicState>,
    /// `g(γ̇, γ̇)` at each sample.
    pub energies: Vec<f64>,
    pub dt: f64,
    pub integrator: &'static str,
    pub max_energy_drift: f64,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn last(&self) -> &GeodesicState {
        self.samples
            .last()
            .expect("a trajectory holds at least its start")
    }

    pub const CSV_HEADER: &'static str = "s,t,x,y,z,vt,vx,vy,vz,energy";

    /// Writes `s,t,x,y,z,vt,vx,vy,vz,energy`, one row per sample, every
    /// number with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for (state, energy) in self.samples.iter().zip(&self.energies) {
            let p = state.position;
            let v = state.velocity;
            let row = [state.s, p.t, p.x, p.y, p.z, v[0], v[1], v[2], v[3], *energy];
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

type Phase = (Vec4, Vec4);

fn stage(spec: &GeometrySpec, pos: &Vec4, vel: &Vec4) -> Result<Phase> {
    geodesic_rhs(
        spec,
        &GeodesicState {
            position: Point::from_vec(pos),
            velocity: *vel,
            s: 0.0,
        },
    )
}

fn rk4_step(spec: &GeometrySpec, pos: &Vec4, vel: &Vec4, h: f64) -> Result<Phase> {
    let (k1x, k1v) = stage(spec, pos, vel)?;
    let (k2x, k2v) = stage(spec, &(pos + k1x * (h / 2.0)), &(vel + k1v * (h / 2.0)))?;
    let (k3x, k3v) = stage(spec, &(pos + k2x * (h / 2.0)), &(vel + k2v * (h / 2.0)))?;
    let (k4x, k4v) = stage(spec, &(pos + k3x * h), &(vel + k3v * h))?;
    let new_pos = pos + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
    let new_vel = vel + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
    spec.check_point(&Point::from_vec(&new_pos))?;
    Ok((new_pos, new_vel))
}

/// One step of size `h`; if a stage leaves the chart the step is retried as
/// two half steps, recursively up to `depth` times.
fn guarded_step(spec: &GeometrySpec, pos: &Vec4, vel: &Vec4, h: f64, depth: u32) -> Result<Phase> {
    match rk4_step(spec, pos, vel, h) {
        Err(GeometryError::Domain { .. }) if depth > 0 => {
            let (mid_x, mid_v) = guarded_step(spec, pos, vel, h / 2.0, depth - 1)?;
            guarded_step(spec, &mid_x, &mid_v, h / 2.0, depth - 1)
        }
        other => other,
    }
}

const MAX_HALVINGS: u32 = 6;

fn step_count(t_end: f64, dt: f64) -> usize {
    ((t_end / dt) - 1e-9).ceil().max(1.0) as usize
}

/// Integrates the geodesic from `p` with initial velocity `v` up to
/// `s = t_end` using about `t_end / dt` equal steps, recording every step.
pub fn integrate_geodesic(
    spec: &GeometrySpec,
    p: &Point,
    v: &Vec4,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_end > 0.0 && t_end.is_finite()) {
        return Err(GeometryError::InvalidArgument(format!(
            "geodesic integration needs T > 0 and dt > 0, got T = {t_end}, dt = {dt}"
        )));
    }
    spec.check_point(p)?;
    let n = step_count(t_end, dt);
    let h = t_end / n as f64;
    let energy = |pos: &Vec4, vel: &Vec4| -> Result<f64> {
        Ok(inner(&metric_at(spec, &Point::from_vec(pos))?, vel, vel))
    };

    let mut pos = p.to_vec();
    let mut vel = *v;
    let e0 = energy(&pos, &vel)?;
    let mut samples = Vec::with_capacity(n + 1);
    let mut energies = Vec::with_capacity(n + 1);
    samples.push(GeodesicState {
        position: *p,
        velocity: vel,
        s: 0.0,
    });
    energies.push(e0);
    let mut drift = 0.0_f64;
    let mut status = TrajectoryStatus::Completed;
    for k in 1..=n {
        match guarded_step(spec, &pos, &vel, h, MAX_HALVINGS) {
            Ok((x, w)) => {
                pos = x;
                vel = w;
            }
            Err(GeometryError::Domain { .. }) => {
                status = TrajectoryStatus::ChartExit {
                    s: (k - 1) as f64 * h,
                };
                break;
            }
            Err(e) => return Err(e),
        }
        let e = energy(&pos, &vel)?;
        drift = drift.max((e - e0).abs());
        samples.push(GeodesicState {
            position: Point::from_vec(&pos),
            velocity: vel,
            s: if k == n { t_end } else { k as f64 * h },
        });
        energies.push(e);
    }
    Ok(Trajectory {
        samples,
        energies,
        dt: h,
        integrator: "rk4",
        max_energy_drift: drift,
        status,
    })
}

/// Integrates to `s = 1` with a fixed number of steps and returns only the
/// endpoint; a chart exit is an error.
pub fn exp_map_steps(spec: &GeometrySpec, p: &Point, v: &Vec4, steps: usize) -> Result<Point> {
    spec.check_point(p)?;
    let steps = steps.max(1);
    let h = 1.0 / steps as f64;
    let mut pos = p.to_vec();
    let mut vel = *v;
    for _ in 0..steps {
        let (x, w) = guarded_step(spec, &pos, &vel, h, MAX_HALVINGS)?;
        pos = x;
        vel = w;
    }
    Ok(Point::from_vec(&pos))
}

/// Steps used by [`exp_map`]: at least 64, and at most `1/128` of arc
/// length per step.
pub fn default_exp_steps(speed: f64) -> usize {
    (128.0 * speed).ceil().max(64.0) as usize
}

/// `exp_p(v)`.
pub fn exp_map(spec: &GeometrySpec, p: &Point, v: &Vec4) -> Result<Point> {
    if v.iter().all(|c| *c == 0.0) {
        spec.check_point(p)?;
        return Ok(*p);
    }
    let speed = inner(&metric_at(spec, p)?, v, v).sqrt();
    exp_map_steps(spec, p, v, default_exp_steps(speed))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    /// Converged means weighted endpoint error below this.
    pub tol: f64,
    pub max_newton: usize,
    /// Backtracking halvings per Newton step.
    pub max_halvings: usize,
    /// Coordinate-direction starts `±|q − p|∞ eᵢ`, taken in the order
    /// `+e_t, −e_t, +e_x, …`.
    pub coordinate_starts: usize,
    /// Also start from the chart difference `q − p` (tried first).
    pub chart_start: bool,
    /// Fixed RK4 steps per exponential map evaluation.
    pub steps: usize,
    /// Relative step of the forward-difference Jacobian.
    pub jacobian_step: f64,
    pub execution: Execution,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            tol: 1e-8,
            max_newton: 40,
            max_halvings: 30,
            coordinate_starts: 8,
            chart_start: true,
            steps: 128,
            jacobian_step: 1e-7,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingResult {
    pub initial_velocity: [f64; 4],
    /// `|exp_p(v) − q|` measured with the metric at `q`.
    pub endpoint_error: f64,
    /// `|v|` at `p`: the length of the geodesic on `[0, 1]`.
    pub length: f64,
    pub iterations: usize,
    pub converged: bool,
    pub start_index: usize,
}

struct Shooter<'a> {
    spec: &'a GeometrySpec,
    p: Point,
    q: Vec4,
    /// `Lᵀ` with `g(q) = L Lᵀ`, so `|Lᵀ δ|² = δᵀ g(q) δ`.
    weight: Matrix4<f64>,
    opts: &'a ShootingOptions,
}

impl Shooter<'_> {
    fn residual(&self, v: &Vec4) -> Result<Vec4> {
        let end = exp_map_steps(self.spec, &self.p, v, self.opts.steps)?;
        Ok(self.weight * (end.to_vec() - self.q))
    }

    fn solve_from(&self, v0: Vec4, index: usize) -> Option<ShootingResult> {
        let opts = self.opts;
        let mut v = v0;
        let mut r = self.residual(&v).ok()?;
        let mut iterations = 0;
        while iterations < opts.max_newton && r.norm() > opts.tol * 1e-3 {
            iterations += 1;
            let h = opts.jacobian_step * v.amax().max(1.0);
            let mut jac = Matrix4::zeros();
            for j in 0..4 {
                let mut vj = v;
                vj[j] += h;
                let rj = self.residual(&vj).ok()?;
                jac.set_column(j, &((rj - r) / h));
            }
            let Some(delta) = jac.lu().solve(&(-r)) else {
                break;
            };
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..=opts.max_halvings {
                let trial = v + delta * lambda;
                if let Ok(rt) = self.residual(&trial) {
                    if rt.norm() < r.norm() {
                        accepted = Some((trial, rt));
                        break;
                    }
                }
                lambda *= 0.5;
            }
            match accepted {
                Some((nv, nr)) => {
                    v = nv;
                    r = nr;
                }
                None => break,
            }
        }
        let g = metric_at(self.spec, &self.p).ok()?;
        let error = r.norm();
        Some(ShootingResult {
            initial_velocity: [v[0], v[1], v[2], v[3]],
            endpoint_error: error,
            length: inner(&g, &v, &v).max(0.0).sqrt(),
            iterations,
            converged: error < opts.tol,
            start_index: index,
        })
    }
}

/// Initial velocities tried by [`distance_shooting`], in start-index order.
pub fn shooting_starts(p: &Point, q: &Point, opts: &ShootingOptions) -> Vec<Vec4> {
    let diff = q.to_vec() - p.to_vec();
    let scale = diff.amax();
    let mut starts = Vec::new();
    if opts.chart_start {
        starts.push(diff);
    }
    for k in 0..opts.coordinate_starts {
        let mut v = Vec4::zeros();
        v[(k / 2) % 4] = if k % 2 == 0 { scale } else { -scale };
        starts.push(v);
    }
    starts
}

/// Geodesic distance from `p` to `q` by multi-start damped Newton shooting.
///
/// The returned length is that of a geodesic joining `p` to `q`, an upper
/// bound on the distance. Among all starts the result is chosen by
/// (converged first, shortest, lowest start index), so the answer does not
/// depend on the execution order. Starts whose integration leaves the chart
/// are dropped.
pub fn distance_shooting(
    spec: &GeometrySpec,
    p: &Point,
    q: &Point,
    opts: &ShootingOptions,
) -> Result<ShootingResult> {
    spec.check_point(p)?;
    spec.check_point(q)?;
    let gq = metric_at(spec, q)?;
    let chol = gq
        .cholesky()
        .ok_or(GeometryError::Singular("metric at the target point"))?;
    let shooter = Shooter {
        spec,
        p: *p,
        q: q.to_vec(),
        weight: chol.l().transpose(),
        opts,
    };
    let starts: Vec<(usize, Vector4<f64>)> = shooting_starts(p, q, opts)
        .into_iter()
        .enumerate()
        .collect();
    let results = opts
        .execution
        .map(&starts, |(i, v0)| shooter.solve_from(*v0, *i));
    results
        .into_iter()
        .flatten()
        .min_by(|a, b| {
            b.converged
                .cmp(&a.converged)
                .then(a.length.total_cmp(&b.length))
                .then(a.start_index.cmp(&b.start_index))
        })
        .ok_or_else(|| {
            GeometryError::InvalidArgument(
                "every shooting start left the chart or failed to evaluate".into(),
            )
        })
}
