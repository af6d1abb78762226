//! Explicit time stepping of the graphical flow u_t = -H/Θ on the Fermi
//! chart, with per-step soundness monitors against the closed-form barrier
//! and angle bounds, and the near-singularity probe.
//!
//! The height field over fixed base points moves with the vertical speed
//! -H/Θ; the normal speed -H of the material formulation differs from it
//! by a tangential reparametrization only, so the evolving surfaces (and
//! every monitored pointwise quantity) agree. On equidistant data the two
//! coincide.

use crate::comparison_ode::{angle_lower_bound, angle_threshold, eps_from_initial_angle,
    umbilic_exact};
use crate::geometry::{graph_patch, point_geom, GeomError};
use crate::graph_geometry::{fd_derivs, AnalyticSurface, DiscreteSurface, GeomSample};
use crate::hyp_base::FermiChart;
use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("invalid initial data: {0}")]
    BadInitialData(String),
    #[error("graph lost at t = {t:.6}: min angle {theta_min:.4e} at node {node:?}")]
    GraphLost {
        t: f64,
        theta_min: f64,
        node: (usize, usize),
    },
    #[error("height field became non-finite at t = {t:.6}")]
    NonFinite { t: f64 },
}

/// Solver and monitor parameters.
#[derive(Debug, Clone, Copy)]
pub struct FlowParams {
    /// Explicit-step safety factor: dt = cfl·h²_min with the metric grid
    /// spacing h_min read from the current state.
    pub cfl: f64,
    /// Runs terminate as graph-lost when min Θ drops to this floor.
    pub theta_floor: f64,
    pub t_max: f64,
    /// Monitor tolerance constant: barrier/angle bounds are asserted up to
    /// tol_c·(dx² + dy²).
    pub tol_c: f64,
    /// The constant C in the probe criterion |a| > -θ·ln θ + C·θ.
    pub c4: f64,
    /// Monitor cadence in steps (records also taken at t = 0 and at the end).
    pub record_every: usize,
    /// Absolute slack allowed when checking measured dθ/dt against the
    /// angle-rate lower bound in the probe.
    pub probe_rate_tol: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            cfl: 0.2,
            theta_floor: 1e-3,
            t_max: 5.0,
            tol_c: 10.0,
            c4: 1.0,
            record_every: 1,
            probe_rate_tol: 0.25,
        }
    }
}

/// How the initial angle relates to the admissibility threshold tanh(a0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compliance {
    Strict,
    Equality,
    Violated,
}

impl std::fmt::Display for Compliance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Compliance::Strict => write!(f, "strict"),
            Compliance::Equality => write!(f, "equality"),
            Compliance::Violated => write!(f, "violated"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum InitialData {
    Constant(f64),
    Profile(AnalyticSurface),
    Field(Array2<f64>),
}

/// The evolving discrete surface.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub chart: FermiChart,
    pub params: FlowParams,
    pub t: f64,
    pub dt: f64,
    pub steps: usize,
    pub u: Array2<f64>,
    /// max |u0|: the barrier height.
    pub a0: f64,
    pub theta0_min: f64,
    /// ε solving the angle-bound initial condition from the measured
    /// min Θ0² (negative when the threshold is violated).
    pub eps_angle: f64,
    pub compliance: Compliance,
}

/// Per-step diagnostics at one instant.
#[derive(Debug, Clone, Copy)]
pub struct MonitorRecord {
    pub t: f64,
    pub umax: f64,
    pub theta_min: f64,
    pub argmin: (usize, usize),
    /// Height L of the angle minimum.
    pub height_at_min: f64,
    /// Principal curvature along the direction least aligned with the
    /// fiber (the §-probe "a").
    pub a: f64,
    /// Principal curvature along the remaining direction; at a true angle
    /// minimum b = tanh(L)·θ.
    pub b: f64,
    /// Barrier value U(t) = arcsinh(e^{-2t} sinh a0).
    pub barrier: f64,
    /// Angle bound Φ(t) = sqrt(φ(t)) on Θ (NaN when the run is
    /// non-compliant and the bound does not apply).
    pub angle_bound: f64,
    /// |a| (left side of the probe criterion).
    pub crit_lhs: f64,
    /// -θ·ln θ + C·θ (right side of the probe criterion).
    pub crit_rhs: f64,
    /// Whether |a| exceeds the criterion right side at this instant.
    pub i_member: bool,
    /// |b - tanh(L)·θ| at the discrete angle minimum.
    pub b_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    GraphLost,
    MaxTime,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Converged => write!(f, "converged"),
            Outcome::GraphLost => write!(f, "graph-lost"),
            Outcome::MaxTime => write!(f, "max-time"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub outcome: Outcome,
    pub t_final: f64,
    pub steps: usize,
    /// Late-time least-squares slope of ln sinh(umax) (about -2 for
    /// converging runs); None when the decay window is too short.
    pub slope_sinh_umax: Option<f64>,
    pub a0: f64,
    pub threshold: f64,
    pub theta0_min: f64,
    pub compliance: Compliance,
    /// Absolute tolerance used by the barrier/angle monitors.
    pub monitor_tol: f64,
    pub barrier_violations: usize,
    pub angle_violations: usize,
    pub final_record: MonitorRecord,
}

/// Convergence thresholds: the run counts as converged to the totally
/// geodesic slice when umax < 1e-3 and min Θ > 0.999.
pub const CONVERGED_UMAX: f64 = 1e-3;
pub const CONVERGED_THETA: f64 = 0.999;

/// Hard cap on |u| of admissible initial data.
const MAX_HEIGHT: f64 = 50.0;

struct SweepStats {
    umax: f64,
    theta_min: f64,
    argmin: (usize, usize),
    /// max over nodes of gⁱⁱ_induced/h² (reciprocal of the CFL h²_min).
    inv_h2_max: f64,
}

/// Row-constant hyperbolic factors of y.
#[derive(Clone, Copy)]
struct RowTrig {
    cy2: f64,
    ty: f64,
    sy_cy: f64,
}

fn row_trig(chart: &FermiChart) -> Vec<RowTrig> {
    (0..chart.ny)
        .map(|j| {
            let y = chart.y_at(j);
            let (sy, cy) = (y.sinh(), y.cosh());
            RowTrig {
                cy2: cy * cy,
                ty: sy / cy,
                sy_cy: sy * cy,
            }
        })
        .collect()
}

/// Specialized per-node curvature kernel for the stepper: (H, Θ, g^xx, g^yy)
/// of the graph from the height stencil. Algebraically identical to
/// [`point_geom`] on a graph patch (a unit test pins the two together);
/// hand-flattened because it runs grid × stages × steps times.
#[inline]
fn node_h_theta(hj: &crate::graph_geometry::HeightJet, row: &RowTrig) -> (f64, f64, f64, f64) {
    let e = hj.u.exp();
    let ie = 1.0 / e;
    let cu = 0.5 * (e + ie);
    let su = 0.5 * (e - ie);
    let tu = su / cu;
    let src = su * cu;
    let m2 = cu * cu;
    let m1 = m2 * row.cy2;

    let g11 = hj.ux * hj.ux + m1;
    let g12 = hj.ux * hj.uy;
    let g22 = hj.uy * hj.uy + m2;
    let inv_det = 1.0 / (g11 * g22 - g12 * g12);
    let i00 = g22 * inv_det;
    let i01 = -g12 * inv_det;
    let i11 = g11 * inv_det;

    let c0 = i00 * hj.ux + i01 * hj.uy;
    let c1 = i01 * hj.ux + i11 * hj.uy;
    let theta_sq = 1.0 - (c0 * hj.ux + c1 * hj.uy);
    let theta = theta_sq.max(0.0).sqrt();
    // <ν, n> = ν^r = Θ; tangential components scale the gradient coefficients
    let inv_theta = 1.0 / theta;
    let nu_x = -c0 * inv_theta;
    let nu_y = -c1 * inv_theta;

    // a_ij = -<ν, ∂²Ψ + Γ(∂Ψ, ∂Ψ)>
    let a_xx = -(theta * (hj.uxx - src * row.cy2)
        + m1 * nu_x * (2.0 * tu * hj.ux)
        + m2 * nu_y * (-row.sy_cy));
    let a_xy = -(theta * hj.uxy
        + m1 * nu_x * (tu * hj.uy + row.ty)
        + m2 * nu_y * (tu * hj.ux));
    let a_yy = -(theta * (hj.uyy - src) + m2 * nu_y * (2.0 * tu * hj.uy));
    let h = i00 * a_xx + 2.0 * i01 * a_xy + i11 * a_yy;
    (h, theta, i00, i11)
}

/// One pass over the grid: rhs = -H/Θ per node plus the reductions the
/// stepper and monitors need. Reductions run in fixed index order.
fn rhs_sweep(
    chart: &FermiChart,
    u: &Array2<f64>,
    mut rhs: Option<&mut Array2<f64>>,
) -> Result<SweepStats, GeomError> {
    let (nx, ny) = u.dim();
    let (dx, dy) = (chart.dx(), chart.dy());
    let inv_dx2 = 1.0 / (dx * dx);
    let inv_dy2 = 1.0 / (dy * dy);
    let rows = row_trig(chart);
    let mut stats = SweepStats {
        umax: 0.0,
        theta_min: f64::INFINITY,
        argmin: (0, 0),
        inv_h2_max: 0.0,
    };
    for i in 0..nx {
        for j in 0..ny {
            let hj = fd_derivs(u, chart, i, j);
            let (h, theta, i00, i11) = node_h_theta(&hj, &rows[j]);
            if !(theta > 0.0) {
                return Err(GeomError::GraphLost {
                    x: chart.x_at(i),
                    y: chart.y_at(j),
                    theta,
                });
            }
            if let Some(ref mut out) = rhs {
                out[[i, j]] = -h / theta;
            }
            stats.umax = stats.umax.max(hj.u.abs());
            if theta < stats.theta_min {
                stats.theta_min = theta;
                stats.argmin = (i, j);
            }
            let s = i00 * inv_dx2 + i11 * inv_dy2;
            stats.inv_h2_max = stats.inv_h2_max.max(s);
        }
    }
    Ok(stats)
}

/// Set up a run: validates the initial data and reports how the measured
/// initial angle relates to the admissibility threshold.
pub fn init_flow(
    chart: FermiChart,
    u0: &InitialData,
    params: FlowParams,
) -> Result<FlowState, FlowError> {
    let u = match u0 {
        InitialData::Constant(c) => {
            if !c.is_finite() {
                return Err(FlowError::BadInitialData("constant height not finite".into()));
            }
            Array2::from_elem((chart.nx, chart.ny), *c)
        }
        InitialData::Profile(p) => {
            if p.chart != chart {
                return Err(FlowError::BadInitialData(
                    "profile chart does not match the flow chart".into(),
                ));
            }
            DiscreteSurface::from_profile(chart, p).u
        }
        InitialData::Field(f) => {
            if f.dim() != (chart.nx, chart.ny) {
                return Err(FlowError::BadInitialData(format!(
                    "field has shape {:?}, chart grid is {:?}",
                    f.dim(),
                    (chart.nx, chart.ny)
                )));
            }
            f.clone()
        }
    };
    if u.iter().any(|v| !v.is_finite()) {
        return Err(FlowError::BadInitialData("non-finite height value".into()));
    }
    let umax0 = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if umax0 > MAX_HEIGHT {
        return Err(FlowError::BadInitialData(format!(
            "height {umax0:.3} exceeds the validity bound {MAX_HEIGHT}"
        )));
    }
    let stats = rhs_sweep(&chart, &u, None)?;
    let a0 = stats.umax;
    let threshold = angle_threshold(a0);
    let compliance = if stats.theta_min >= threshold + 1e-12 {
        Compliance::Strict
    } else if stats.theta_min >= threshold - 1e-12 {
        Compliance::Equality
    } else {
        Compliance::Violated
    };
    let eps_angle =
        eps_from_initial_angle(a0, stats.theta_min * stats.theta_min).min(1.0);
    let dt = params.cfl / stats.inv_h2_max;
    Ok(FlowState {
        chart,
        params,
        t: 0.0,
        dt,
        steps: 0,
        u,
        a0,
        theta0_min: stats.theta_min,
        eps_angle,
        compliance,
    })
}

fn two_stage_update(
    state: &mut FlowState,
    k1: &Array2<f64>,
    stats1: &SweepStats,
) -> Result<(), FlowError> {
    let dt = state.dt;
    let dim = state.u.dim();
    let mut u_star = Array2::zeros(dim);
    for i in 0..dim.0 {
        for j in 0..dim.1 {
            u_star[[i, j]] = state.u[[i, j]] + dt * k1[[i, j]];
        }
    }
    let mut k2 = Array2::zeros(dim);
    let stats2 = rhs_sweep(&state.chart, &u_star, Some(&mut k2)).map_err(|e| match e {
        // the predictor stage leaving the graph regime counts as loss
        GeomError::GraphLost { .. } => FlowError::GraphLost {
            t: state.t,
            theta_min: state.params.theta_floor,
            node: stats1.argmin,
        },
        other => FlowError::Geom(other),
    })?;
    if stats2.theta_min <= 0.5 * state.params.theta_floor {
        return Err(FlowError::GraphLost {
            t: state.t,
            theta_min: stats2.theta_min,
            node: stats2.argmin,
        });
    }
    for i in 0..dim.0 {
        for j in 0..dim.1 {
            let v = state.u[[i, j]] + 0.5 * dt * (k1[[i, j]] + k2[[i, j]]);
            if !v.is_finite() {
                return Err(FlowError::NonFinite { t: state.t });
            }
            state.u[[i, j]] = v;
        }
    }
    state.t += dt;
    state.steps += 1;
    state.dt = state.params.cfl / stats1.inv_h2_max;
    Ok(())
}

/// Advance one explicit two-stage Runge-Kutta step. The step size was
/// fixed by the CFL constraint of the pre-step state; it is re-evaluated
/// afterwards.
pub fn step(state: &mut FlowState) -> Result<(), FlowError> {
    let mut k1 = Array2::zeros(state.u.dim());
    let stats = rhs_sweep(&state.chart, &state.u, Some(&mut k1))?;
    if stats.theta_min <= state.params.theta_floor {
        return Err(FlowError::GraphLost {
            t: state.t,
            theta_min: stats.theta_min,
            node: stats.argmin,
        });
    }
    two_stage_update(state, &k1, &stats)
}

fn record_from_stats(state: &FlowState, stats: &SweepStats) -> Result<MonitorRecord, FlowError> {
    let (i, j) = stats.argmin;
    let hj = fd_derivs(&state.u, &state.chart, i, j);
    let geom = point_geom(&graph_patch(
        state.chart.x_at(i),
        state.chart.y_at(j),
        hj.u,
        hj.ux,
        hj.uy,
        hj.uxx,
        hj.uxy,
        hj.uyy,
    ))?;
    let sample = GeomSample::from_point_geom(state.chart.x_at(i), state.chart.y_at(j), &geom);
    Ok(build_record(state, stats, &sample))
}

fn build_record(state: &FlowState, stats: &SweepStats, sample: &GeomSample) -> MonitorRecord {
    let theta = stats.theta_min;
    let l = sample.u;
    let [(a, _), (b, _)] = sample.principal_by_fiber_alignment();
    let crit_lhs = a.abs();
    let crit_rhs = -theta * theta.ln() + state.params.c4 * theta;
    let angle_bound = if state.eps_angle >= 0.0 {
        angle_lower_bound(state.a0, state.eps_angle, state.t).sqrt()
    } else {
        f64::NAN
    };
    MonitorRecord {
        t: state.t,
        umax: stats.umax,
        theta_min: theta,
        argmin: stats.argmin,
        height_at_min: l,
        a,
        b,
        barrier: umbilic_exact(state.a0.max(f64::MIN_POSITIVE), state.t),
        angle_bound,
        crit_lhs,
        crit_rhs,
        i_member: crit_lhs > crit_rhs,
        b_defect: (b - l.tanh() * theta).abs(),
    }
}

/// Per-step diagnostics of the current state.
pub fn monitor(state: &FlowState) -> Result<MonitorRecord, FlowError> {
    let stats = rhs_sweep(&state.chart, &state.u, None)?;
    record_from_stats(state, &stats)
}

/// Monitor tolerance C·h² for a chart.
pub fn monitor_tol(chart: &FermiChart, tol_c: f64) -> f64 {
    tol_c * (chart.dx().powi(2) + chart.dy().powi(2))
}

/// Late-time decay slope of ln sinh(umax): least squares over records with
/// umax in [2e-3, 0.25·umax(0)].
fn fit_sinh_slope(records: &[MonitorRecord]) -> Option<f64> {
    let umax0 = records.first()?.umax;
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.umax >= 2e-3 && r.umax <= 0.25 * umax0)
        .map(|r| (r.t, r.umax.sinh().ln()))
        .collect();
    if pts.len() < 5 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// Integrate until convergence, graph loss, or t_max; returns the summary
/// and the recorded time series.
pub fn run(
    chart: FermiChart,
    u0: &InitialData,
    params: FlowParams,
) -> Result<(RunSummary, Vec<MonitorRecord>), FlowError> {
    let mut state = init_flow(chart, u0, params)?;
    let tol = monitor_tol(&chart, params.tol_c);
    let mut records: Vec<MonitorRecord> = Vec::new();
    let mut barrier_violations = 0usize;
    let mut angle_violations = 0usize;
    let outcome;
    let every = params.record_every.max(1);

    loop {
        let mut k1 = Array2::zeros(state.u.dim());
        let stats = match rhs_sweep(&state.chart, &state.u, Some(&mut k1)) {
            Ok(s) => s,
            Err(e) => return Err(e.into()),
        };

        let record_due = state.steps % every == 0;
        let mut latest: Option<MonitorRecord> = None;
        if record_due {
            let rec = record_from_stats(&state, &stats)?;
            if rec.umax > rec.barrier + tol {
                barrier_violations += 1;
            }
            if state.compliance != Compliance::Violated
                && rec.theta_min * rec.theta_min
                    < angle_lower_bound(state.a0, state.eps_angle.max(0.0), rec.t) - tol
            {
                angle_violations += 1;
            }
            latest = Some(rec);
            records.push(rec);
        }

        if stats.umax < CONVERGED_UMAX && stats.theta_min > CONVERGED_THETA {
            if latest.is_none() {
                records.push(record_from_stats(&state, &stats)?);
            }
            outcome = Outcome::Converged;
            break;
        }
        let remaining = params.t_max - state.t;
        if remaining <= 1e-12 {
            if latest.is_none() {
                records.push(record_from_stats(&state, &stats)?);
            }
            outcome = Outcome::MaxTime;
            break;
        }
        if stats.theta_min <= params.theta_floor {
            if latest.is_none() {
                records.push(record_from_stats(&state, &stats)?);
            }
            outcome = Outcome::GraphLost;
            break;
        }

        state.dt = state.dt.min(remaining);
        match two_stage_update(&mut state, &k1, &stats) {
            Ok(()) => {}
            Err(FlowError::GraphLost { .. }) => {
                records.push(monitor(&state)?);
                outcome = Outcome::GraphLost;
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let final_record = *records.last().expect("at least one record");
    let summary = RunSummary {
        outcome,
        t_final: state.t,
        steps: state.steps,
        slope_sinh_umax: fit_sinh_slope(&records),
        a0: state.a0,
        threshold: angle_threshold(state.a0),
        theta0_min: state.theta0_min,
        compliance: state.compliance,
        monitor_tol: tol,
        barrier_violations,
        angle_violations,
        final_record,
    };
    Ok((summary, records))
}

/// One probe record: the monitor data plus the measured angle rate checked
/// against the lower bound (a² + tanh²(L)θ²)θ - 2a·tanh(L) + θ(1-θ²)/cosh²(L).
#[derive(Debug, Clone, Copy)]
pub struct ProbeRecord {
    pub monitor: MonitorRecord,
    pub rate_measured: Option<f64>,
    pub rate_bound: Option<f64>,
    pub rate_ok: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeClassification {
    GraphPreserved,
    SuspectedSingularity,
    Inconclusive,
}

impl std::fmt::Display for ProbeClassification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProbeClassification::GraphPreserved => write!(f, "graph-preserved"),
            ProbeClassification::SuspectedSingularity => write!(f, "suspected-singularity"),
            ProbeClassification::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub outcome: Outcome,
    pub t_final: f64,
    pub records: Vec<ProbeRecord>,
    pub rate_checked: usize,
    pub rate_ok_count: usize,
    pub classification: ProbeClassification,
    /// (intercept, slope) of the ln(-ln θ) fit backing the envelope test,
    /// when enough collapse data exists.
    pub envelope_fit: Option<(f64, f64)>,
    pub summary: RunSummary,
}

/// The right side of the angle-rate inequality at an angle minimum.
pub fn angle_rate_bound(a: f64, theta: f64, height: f64) -> f64 {
    let t = height.tanh();
    (a * a + t * t * theta * theta) * theta - 2.0 * a * t
        + theta * (1.0 - theta * theta) / height.cosh().powi(2)
}

/// Run the flow on arbitrary (typically non-compliant) initial data and
/// track the near-singularity diagnostics.
pub fn singularity_probe(
    chart: FermiChart,
    u0: &InitialData,
    params: FlowParams,
) -> Result<ProbeReport, FlowError> {
    let (summary, monitors) = run(chart, u0, params)?;
    let mut records: Vec<ProbeRecord> = Vec::with_capacity(monitors.len());
    let mut rate_checked = 0usize;
    let mut rate_ok_count = 0usize;
    for (k, m) in monitors.iter().enumerate() {
        let (rate_measured, rate_bound, rate_ok) = if k == 0 {
            (None, None, None)
        } else {
            let prev = &monitors[k - 1];
            let dt = m.t - prev.t;
            if dt <= 0.0 {
                (None, None, None)
            } else {
                let measured = (m.theta_min - prev.theta_min) / dt;
                let bound = angle_rate_bound(prev.a, prev.theta_min, prev.height_at_min);
                let ok = measured >= bound - params.probe_rate_tol;
                rate_checked += 1;
                if ok {
                    rate_ok_count += 1;
                }
                (Some(measured), Some(bound), Some(ok))
            }
        };
        records.push(ProbeRecord {
            monitor: *m,
            rate_measured,
            rate_bound,
            rate_ok,
        });
    }

    let (classification, envelope_fit) = classify(&summary, &monitors);
    Ok(ProbeReport {
        outcome: summary.outcome,
        t_final: summary.t_final,
        records,
        rate_checked,
        rate_ok_count,
        classification,
        envelope_fit,
        summary,
    })
}

/// Collapse threshold below which ln(-ln θ) is a meaningful coordinate.
const ENVELOPE_THETA: f64 = 0.9;
/// Slack (in ln(-ln θ) units) the data may sit above the extrapolated
/// double-exponential envelope before the test fails.
const ENVELOPE_MARGIN: f64 = 0.5;

/// Classify a probe run. A double-exponential envelope θ = C·e^{-C e^{Ct}}
/// is linear in the coordinates (t, ln(-ln θ)); the fit is taken on the
/// first 80% of the collapse records and tested against the remainder.
fn classify(
    summary: &RunSummary,
    monitors: &[MonitorRecord],
) -> (ProbeClassification, Option<(f64, f64)>) {
    let last10_i = monitors.len() >= 10
        && monitors[monitors.len() - 10..].iter().all(|m| m.i_member);
    if summary.outcome == Outcome::GraphLost && last10_i {
        // crossed the floor with the relative blow-up criterion active
        let fit = envelope(monitors);
        return (ProbeClassification::SuspectedSingularity, fit.map(|f| f.0));
    }
    match envelope(monitors) {
        None => (ProbeClassification::GraphPreserved, None),
        Some((fit, holds)) => {
            if holds {
                (ProbeClassification::GraphPreserved, Some(fit))
            } else if summary.outcome == Outcome::GraphLost {
                (ProbeClassification::SuspectedSingularity, Some(fit))
            } else {
                (ProbeClassification::Inconclusive, Some(fit))
            }
        }
    }
}

fn envelope(monitors: &[MonitorRecord]) -> Option<((f64, f64), bool)> {
    let pts: Vec<(f64, f64)> = monitors
        .iter()
        .filter(|m| m.theta_min < ENVELOPE_THETA && m.theta_min > 0.0)
        .map(|m| (m.t, (-m.theta_min.ln()).ln()))
        .collect();
    if pts.len() < 6 {
        return None;
    }
    let split = (pts.len() * 4) / 5;
    let head = &pts[..split];
    let n = head.len() as f64;
    let sx: f64 = head.iter().map(|p| p.0).sum();
    let sy: f64 = head.iter().map(|p| p.1).sum();
    let sxx: f64 = head.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = head.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let holds = pts[split..]
        .iter()
        .all(|&(t, y)| y <= intercept + slope * t + ENVELOPE_MARGIN);
    Some(((intercept, slope), holds))
}
