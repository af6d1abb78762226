//! Residual checks for the curvature identities of geodesic graphs:
//! static (elliptic) identities with exact derivatives or second-order
//! stencils, dynamic (evolution) identities against the normal-push
//! oracle, the warped-product variation formulas, and grid-refinement
//! convergence orders.

use crate::ambient::{
    self, lie_derivative_ng_closed, nabla_lie_ng, nabla_n_christoffel, tensor_eval, AmbientPoint,
};
use crate::geometry::{GeomError, PointGeom, SurfaceCalc};
use crate::graph_geometry::{
    material_push_sample, AnalyticSurface, DiscreteCalc, DiscreteSurface, GeomSample, GraphSurface,
};
use crate::hyp_base::FermiChart;
use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("convergence order needs at least 3 grid levels, got {0}")]
    NotEnoughLevels(usize),
    #[error("no sample points")]
    NoSamples,
}

/// Names of the static identities, in report order.
pub const STATIC_IDENTITIES: [&str; 5] = [
    "laplace-height",
    "laplace-eta",
    "laplace-angle",
    "gradient-norm",
    "angle-gradient",
];

/// Names of the dynamic identities, in report order.
pub const DYNAMIC_IDENTITIES: [&str; 7] = [
    "angle-rate",
    "heat-angle",
    "heat-alpha",
    "heat-mean-curvature",
    "heat-second-form",
    "height-rate",
    "heat-height",
];

/// Names of the appendix (variation-formula) identities.
pub const APPENDIX_IDENTITIES: [&str; 3] = [
    "fiber-variation-h",
    "angle-evolution-forms",
    "fiber-rate",
];

#[derive(Debug, Clone)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub max_abs: f64,
    pub mean_abs: f64,
}

#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// Grid spacing for discrete surfaces (max of dx, dy); None for
    /// analytic evaluation.
    pub grid_h: Option<f64>,
    pub samples: usize,
    pub residuals: Vec<IdentityResidual>,
}

impl ResidualReport {
    fn from_rows(names: &[&'static str], rows: &[Vec<f64>], grid_h: Option<f64>) -> Self {
        let samples = rows.len();
        let residuals = names
            .iter()
            .enumerate()
            .map(|(k, name)| {
                let mut max_abs: f64 = 0.0;
                let mut sum = 0.0;
                for row in rows {
                    max_abs = max_abs.max(row[k].abs());
                    sum += row[k].abs();
                }
                IdentityResidual {
                    name,
                    max_abs,
                    mean_abs: sum / samples.max(1) as f64,
                }
            })
            .collect();
        ResidualReport {
            grid_h,
            samples,
            residuals,
        }
    }

    pub fn max_of(&self, name: &str) -> Option<f64> {
        self.residuals
            .iter()
            .find(|r| r.name == name)
            .map(|r| r.max_abs)
    }
}

impl std::fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.grid_h {
            Some(h) => writeln!(f, "{} samples, h = {:.5e}", self.samples, h)?,
            None => writeln!(f, "{} samples, exact derivatives", self.samples)?,
        }
        for r in &self.residuals {
            writeln!(
                f,
                "  {:<22} max {:.3e}  mean {:.3e}",
                r.name, r.max_abs, r.mean_abs
            )?;
        }
        Ok(())
    }
}

/// A deterministic interior sample set for analytic checks.
pub fn default_sample_points(chart: &FermiChart) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for i in 0..6 {
        for j in 0..5 {
            let x = (0.07 + i as f64 * 0.17) * chart.period;
            let y = (-0.8 + j as f64 * 0.4) * chart.half_width;
            pts.push((x, y));
        }
    }
    pts
}

/// Right side of the height Laplacian identity: tanh(u)(1+Θ²) - HΘ.
fn rhs_laplace_height(u: f64, theta: f64, h: f64) -> f64 {
    u.tanh() * (1.0 + theta * theta) - h * theta
}

/// Signed residuals of the five static identities at one analytic point.
fn static_point_analytic(s: &AnalyticSurface, x: f64, y: f64) -> Result<Vec<f64>, GeomError> {
    let geom = s.geom_jet(x, y)?;
    let calc = SurfaceCalc::new(&geom);
    let u = geom.pos[0].value();
    let theta = geom.theta.value();
    let h = geom.h.value();
    let a2 = geom.a_norm2.value();
    let eta = geom.eta.value();

    let grad_h_n = calc.grad_dot_n(&geom.h);
    let grad_theta_n = calc.grad_dot_n(&geom.theta);

    let res_a = calc.laplacian(&geom.pos[0]) - rhs_laplace_height(u, theta, h);
    let res_b = calc.laplacian(&geom.eta) - (u.sinh() * h - a2 * eta + u.cosh() * grad_h_n);
    let res_c = calc.laplacian(&geom.theta)
        - (grad_h_n - a2 * theta + u.tanh() * (1.0 + theta * theta) * h
            - theta * (1.0 - theta * theta) / u.cosh().powi(2)
            - 2.0 * u.tanh() * grad_theta_n
            - 2.0 * u.tanh().powi(2) * theta);
    let res_d = calc.grad_inner(&geom.pos[0], &geom.pos[0]) - (1.0 - theta * theta);

    let grad_theta = calc.grad_ambient(&geom.theta);
    let sample = GeomSample::from_point_geom(x, y, &s.geom(x, y)?);
    let res_e = angle_gradient_defect(&calc, &grad_theta, &sample);

    Ok(vec![res_a, res_b, res_c, res_d, res_e])
}

/// Ambient norm of ∇Θ minus the principal-frame gradient formula
/// (a - tanh(u)Θ)<e1,n>e1 + (b - tanh(u)Θ)<e2,n>e2.
fn angle_gradient_defect(
    calc: &SurfaceCalc,
    grad_theta: &[f64; 3],
    sample: &GeomSample,
) -> f64 {
    let coef = sample.u.tanh() * sample.theta;
    let mut rhs = [0.0; 3];
    for (lambda, dir) in sample.principal {
        let align = dir[0]; // <e, n> is the r-component
        for k in 0..3 {
            rhs[k] += (lambda - coef) * align * dir[k];
        }
    }
    let diff = [
        grad_theta[0] - rhs[0],
        grad_theta[1] - rhs[1],
        grad_theta[2] - rhs[2],
    ];
    calc.inner3(&diff, &diff).max(0.0).sqrt()
}

fn angle_gradient_defect_discrete(
    calc: &DiscreteCalc,
    grad_theta: &[f64; 3],
    sample: &GeomSample,
) -> f64 {
    let coef = sample.u.tanh() * sample.theta;
    let mut rhs = [0.0; 3];
    for (lambda, dir) in sample.principal {
        let align = dir[0];
        for k in 0..3 {
            rhs[k] += (lambda - coef) * align * dir[k];
        }
    }
    let diff = [
        grad_theta[0] - rhs[0],
        grad_theta[1] - rhs[1],
        grad_theta[2] - rhs[2],
    ];
    let g = &calc.geom;
    let m1 = (g.pos[0].cosh() * g.pos[2].cosh()).powi(2);
    let m2 = g.pos[0].cosh().powi(2);
    (diff[0] * diff[0] + m1 * diff[1] * diff[1] + m2 * diff[2] * diff[2]).sqrt()
}

/// Pointwise fields of a discrete surface used by the residual stencils.
pub struct GridFields {
    pub theta: Array2<f64>,
    pub h: Array2<f64>,
    pub eta: Array2<f64>,
}

pub fn grid_fields(d: &DiscreteSurface) -> Result<GridFields, GeomError> {
    let (nx, ny) = d.u.dim();
    let mut theta = Array2::zeros((nx, ny));
    let mut h = Array2::zeros((nx, ny));
    let mut eta = Array2::zeros((nx, ny));
    for i in 0..nx {
        for j in 0..ny {
            let g = d.geom_at_node(i, j)?;
            theta[[i, j]] = g.theta;
            h[[i, j]] = g.h;
            eta[[i, j]] = g.eta;
        }
    }
    Ok(GridFields { theta, h, eta })
}

fn static_point_discrete(
    d: &DiscreteSurface,
    fields: &GridFields,
    i: usize,
    j: usize,
) -> Result<Vec<f64>, GeomError> {
    let calc = DiscreteCalc::at_node(d, i, j)?;
    let g = &calc.geom;
    let (u, theta, h, a2, eta) = (g.pos[0], g.theta, g.h, g.a_norm2, g.eta);

    let grad_h_n = calc.grad_dot_n(&fields.h);
    let grad_theta_n = calc.grad_dot_n(&fields.theta);

    let res_a = calc.laplacian(&d.u) - rhs_laplace_height(u, theta, h);
    let res_b = calc.laplacian(&fields.eta) - (u.sinh() * h - a2 * eta + u.cosh() * grad_h_n);
    let res_c = calc.laplacian(&fields.theta)
        - (grad_h_n - a2 * theta + u.tanh() * (1.0 + theta * theta) * h
            - theta * (1.0 - theta * theta) / u.cosh().powi(2)
            - 2.0 * u.tanh() * grad_theta_n
            - 2.0 * u.tanh().powi(2) * theta);
    let res_d = calc.grad_inner(&d.u, &d.u) - (1.0 - theta * theta);

    let grad_theta = calc.grad_ambient(&fields.theta);
    let sample = GeomSample::from_point_geom(d.chart.x_at(i), d.chart.y_at(j), g);
    let res_e = angle_gradient_defect_discrete(&calc, &grad_theta, &sample);

    Ok(vec![res_a, res_b, res_c, res_d, res_e])
}

/// Residuals of the five static identities. Analytic surfaces are
/// evaluated with exact derivatives at the given points (or a default
/// interior set); discrete surfaces at every grid node with second-order
/// stencils (`points` ignored).
pub fn residual_static(s: &GraphSurface, points: &[(f64, f64)]) -> Result<ResidualReport, LabError> {
    match s {
        GraphSurface::Analytic(a) => {
            let pts = if points.is_empty() {
                default_sample_points(&a.chart)
            } else {
                points.to_vec()
            };
            if pts.is_empty() {
                return Err(LabError::NoSamples);
            }
            let mut rows = Vec::with_capacity(pts.len());
            for &(x, y) in &pts {
                rows.push(static_point_analytic(a, x, y)?);
            }
            Ok(ResidualReport::from_rows(&STATIC_IDENTITIES, &rows, None))
        }
        GraphSurface::Discrete(d) => {
            let fields = grid_fields(d)?;
            let mut rows = Vec::with_capacity(d.chart.nx * d.chart.ny);
            for i in 0..d.chart.nx {
                for j in 0..d.chart.ny {
                    rows.push(static_point_discrete(d, &fields, i, j)?);
                }
            }
            let h = d.chart.dx().max(d.chart.dy());
            Ok(ResidualReport::from_rows(&STATIC_IDENTITIES, &rows, Some(h)))
        }
        GraphSurface::Pushed(_) => Err(LabError::Geom(GeomError::RepresentationMismatch(
            "static residuals expect an analytic or discrete surface",
        ))),
    }
}

/// Signed residuals of the seven dynamic identities at one point for one
/// step size.
fn dynamic_point(s: &AnalyticSurface, x: f64, y: f64, eps: f64) -> Result<Vec<f64>, GeomError> {
    let geom = s.geom_jet(x, y)?;
    let calc = SurfaceCalc::new(&geom);
    let u = geom.pos[0].value();
    let theta = geom.theta.value();
    let h = geom.h.value();
    let a2 = geom.a_norm2.value();
    let alpha = theta * theta;

    let pushed = material_push_sample(s, x, y, eps)?;
    let rate_theta = (pushed.geom.theta - theta) / eps;
    let rate_alpha = (pushed.geom.theta * pushed.geom.theta - alpha) / eps;
    let rate_h = (pushed.geom.h - h) / eps;
    let rate_a2 = (pushed.geom.a_norm2 - a2) / eps;
    let rate_u = (pushed.position[0] - u) / eps;

    let alpha_jet = geom.theta * geom.theta;
    let lap_u = calc.laplacian(&geom.pos[0]);
    let lap_theta = calc.laplacian(&geom.theta);
    let lap_alpha = calc.laplacian(&alpha_jet);
    let lap_h = calc.laplacian(&geom.h);
    let lap_a2 = calc.laplacian(&geom.a_norm2);
    let grad_h_n = calc.grad_dot_n(&geom.h);
    let grad_theta_n = calc.grad_dot_n(&geom.theta);
    let grad_theta_sq = calc.grad_inner(&geom.theta, &geom.theta);
    let grad_a = calc.grad_a_norm2(&geom);

    let tu = u.tanh();
    let ch2 = u.cosh().powi(2);

    let res_a = rate_theta - (grad_h_n - h * tu * (1.0 - alpha));
    let res_b = (rate_theta - lap_theta)
        - (a2 * theta - 2.0 * tu * h
            + 2.0 * tu * grad_theta_n
            + theta * (1.0 - alpha) / ch2
            + 2.0 * tu * tu * theta);
    let res_c = (rate_alpha - lap_alpha)
        - (2.0 * a2 * alpha - 4.0 * tu * h * theta
            + 4.0 * tu * theta * grad_theta_n
            + 2.0 * alpha * (1.0 - alpha) / ch2
            + 4.0 * tu * tu * alpha
            - 2.0 * grad_theta_sq);
    let res_d = (rate_h - lap_h) - h * (a2 - 2.0);
    let res_e = (rate_a2 - lap_a2) - (-2.0 * grad_a + 2.0 * a2 * a2 + 4.0 * (a2 - h * h));
    let res_f = rate_u + h * theta;
    let res_g = rate_u - lap_u + tu * (1.0 + alpha);

    Ok(vec![res_a, res_b, res_c, res_d, res_e, res_f, res_g])
}

/// Dynamic residuals at one step size ε.
pub fn residual_dynamic(
    s: &AnalyticSurface,
    eps: f64,
    points: &[(f64, f64)],
) -> Result<ResidualReport, LabError> {
    let pts = if points.is_empty() {
        default_sample_points(&s.chart)
    } else {
        points.to_vec()
    };
    let mut rows = Vec::with_capacity(pts.len());
    for &(x, y) in &pts {
        rows.push(dynamic_point(s, x, y, eps)?);
    }
    Ok(ResidualReport::from_rows(&DYNAMIC_IDENTITIES, &rows, None))
}

/// Dynamic residuals Richardson-extrapolated to ε → 0: the time difference
/// is first-order accurate, so 2r(ε/2) - r(ε) removes the leading error.
/// Uses the two smallest steps of `eps_seq`; extrapolation is pointwise on
/// signed residuals.
pub fn residual_dynamic_extrapolated(
    s: &AnalyticSurface,
    eps_seq: &[f64],
    points: &[(f64, f64)],
) -> Result<ResidualReport, LabError> {
    assert!(eps_seq.len() >= 2, "need at least two step sizes");
    let mut sorted = eps_seq.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (e_fine, e_coarse) = (sorted[0], sorted[1]);
    let pts = if points.is_empty() {
        default_sample_points(&s.chart)
    } else {
        points.to_vec()
    };
    let mut rows = Vec::with_capacity(pts.len());
    let w = e_coarse / (e_coarse - e_fine);
    for &(x, y) in &pts {
        let fine = dynamic_point(s, x, y, e_fine)?;
        let coarse = dynamic_point(s, x, y, e_coarse)?;
        let row: Vec<f64> = fine
            .iter()
            .zip(coarse.iter())
            .map(|(rf, rc)| w * rf + (1.0 - w) * rc)
            .collect();
        rows.push(row);
    }
    Ok(ResidualReport::from_rows(&DYNAMIC_IDENTITIES, &rows, None))
}

/// The variation of mean curvature under the fiber field, assembled from
/// the deformation tensor L_n g in closed form:
/// n(H_n) = ½(∇̄_ν L)(eᵢ,eᵢ) - (∇̄_{eᵢ}L)(ν,eᵢ) - a_ij L(eᵢ,eⱼ) + H<ν, ∇̄_ν n>.
pub fn fiber_variation_h_closed(sample: &GeomSample) -> f64 {
    let p = AmbientPoint::new(sample.u, sample.point.0, sample.point.1);
    let g = ambient::ambient_metric(&p);
    let l = lie_derivative_ng_closed(&p);
    let nu = sample.nu;
    let mut acc = 0.0;
    for (lambda, e) in sample.principal {
        acc += 0.5 * nabla_lie_ng(&p, &nu, &e, &e);
        acc -= nabla_lie_ng(&p, &e, &nu, &e);
        // principal frame diagonalizes the second fundamental form
        acc -= lambda * tensor_eval(&l, &e, &e);
    }
    let dn = nabla_n_christoffel(&p, &nu);
    acc + sample.mean_curvature * ambient::inner(&g, &nu, &dn)
}

/// Signed residuals of the three appendix identities at one point.
fn appendix_point(s: &AnalyticSurface, x: f64, y: f64, eps: f64) -> Result<Vec<f64>, GeomError> {
    let sample = GeomSample::from_point_geom(x, y, &s.geom(x, y)?);
    let closed = fiber_variation_h_closed(&sample);

    // (a) flow the surface by the fiber field (height shift) and measure
    // the mean-curvature rate, Richardson-extrapolated in ε
    let rate = |e: f64| -> Result<f64, GeomError> {
        Ok((s.shifted(e).geom(x, y)?.h - sample.mean_curvature) / e)
    };
    let fd = 2.0 * rate(0.5 * eps)? - rate(eps)?;
    let res_a = fd - closed;

    // (b) the two closed forms of the angle evolution right side; they
    // differ by H·(<ν,∇̄_ν n> via Christoffels - tanh(u)(1-Θ²))
    let p = AmbientPoint::new(sample.u, x, y);
    let g = ambient::ambient_metric(&p);
    let l = lie_derivative_ng_closed(&p);
    let common = (sample.a_norm2 - 2.0) * sample.theta;
    let dn_nu = nabla_n_christoffel(&p, &sample.nu);
    let nu_dn_nu = ambient::inner(&g, &sample.nu, &dn_nu);
    let form1 = common + (closed - sample.mean_curvature * nu_dn_nu)
        + sample.mean_curvature * nu_dn_nu
        - sample.mean_curvature * sample.u.tanh() * (1.0 - sample.theta * sample.theta);
    let mut form2 = common;
    for (lambda, e) in sample.principal {
        form2 += 0.5 * nabla_lie_ng(&p, &sample.nu, &e, &e);
        form2 -= nabla_lie_ng(&p, &e, &sample.nu, &e);
        form2 -= lambda * tensor_eval(&l, &e, &e);
    }
    let res_b = form1 - form2;

    // (c) one-sided discrete covariant rate of the fiber field along the
    // material path vs -H ∇̄_ν n. The components of n are constant, so
    // the rate reduces to connection transport of the measured velocity,
    // with the connection read at the pushed endpoint (first-order
    // accurate, hence an O(ε) residual).
    let pushed = material_push_sample(s, x, y, eps)?;
    let v = [
        (pushed.position[0] - sample.u) / eps,
        (pushed.position[1] - x) / eps,
        (pushed.position[2] - y) / eps,
    ];
    let p_end = AmbientPoint::new(pushed.position[0], pushed.position[1], pushed.position[2]);
    let dt_n = nabla_n_christoffel(&p_end, &v);
    let tu = sample.u.tanh();
    let closed_c = [
        -sample.mean_curvature * tu * (sample.nu[0] - sample.theta),
        -sample.mean_curvature * tu * sample.nu[1],
        -sample.mean_curvature * tu * sample.nu[2],
    ];
    let diff = [
        dt_n[0] - closed_c[0],
        dt_n[1] - closed_c[1],
        dt_n[2] - closed_c[2],
    ];
    let res_c = ambient::inner(&g, &diff, &diff).max(0.0).sqrt();

    Ok(vec![res_a, res_b, res_c])
}

/// Appendix residuals at step size ε (identity (a) is internally
/// Richardson-extrapolated from ε and ε/2).
pub fn residual_appendix(
    s: &AnalyticSurface,
    eps: f64,
    points: &[(f64, f64)],
) -> Result<ResidualReport, LabError> {
    let pts = if points.is_empty() {
        default_sample_points(&s.chart)
    } else {
        points.to_vec()
    };
    let mut rows = Vec::with_capacity(pts.len());
    for &(x, y) in &pts {
        rows.push(appendix_point(s, x, y, eps)?);
    }
    Ok(ResidualReport::from_rows(&APPENDIX_IDENTITIES, &rows, None))
}

/// Residual floor below which order fitting is meaningless.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderEstimate {
    /// Least-squares slope of log(max residual) against log(h).
    Fitted(f64),
    /// All residuals at or below the rounding floor.
    AtFloor,
}

#[derive(Debug, Clone)]
pub struct ConvergenceEstimate {
    pub name: String,
    /// (h, max residual) per level.
    pub samples: Vec<(f64, f64)>,
    pub order: OrderEstimate,
}

/// Fit the convergence order from at least three (h, max residual) levels.
pub fn convergence_order(name: &str, samples: &[(f64, f64)]) -> Result<ConvergenceEstimate, LabError> {
    if samples.len() < 3 {
        return Err(LabError::NotEnoughLevels(samples.len()));
    }
    if samples.iter().all(|&(_, r)| r <= RESIDUAL_FLOOR) {
        return Ok(ConvergenceEstimate {
            name: name.to_string(),
            samples: samples.to_vec(),
            order: OrderEstimate::AtFloor,
        });
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(h, r)| (h.ln(), r.max(RESIDUAL_FLOOR).ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(ConvergenceEstimate {
        name: name.to_string(),
        samples: samples.to_vec(),
        order: OrderEstimate::Fitted(slope),
    })
}

/// Run the static residuals on discretizations of a profile over a list of
/// grid sizes (nx, with ny = nx/2 + 1) and fit the order per identity.
pub fn static_convergence_study(
    period: f64,
    half_width: f64,
    profile_of: &dyn Fn(FermiChart) -> AnalyticSurface,
    grids: &[usize],
) -> Result<Vec<ConvergenceEstimate>, LabError> {
    if grids.len() < 3 {
        return Err(LabError::NotEnoughLevels(grids.len()));
    }
    let mut per_level = Vec::new();
    for &nx in grids {
        let chart = FermiChart::new(period, half_width, nx, nx / 2 + 1)
            .map_err(|_| LabError::NotEnoughLevels(0))?;
        let profile = profile_of(chart);
        let disc = DiscreteSurface::from_profile(chart, &profile);
        let report = residual_static(&GraphSurface::Discrete(disc), &[])?;
        per_level.push((chart.dx().max(chart.dy()), report));
    }
    let mut out = Vec::new();
    for (k, name) in STATIC_IDENTITIES.iter().enumerate() {
        let samples: Vec<(f64, f64)> = per_level
            .iter()
            .map(|(h, rep)| (*h, rep.residuals[k].max_abs))
            .collect();
        out.push(convergence_order(name, &samples)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_geometry::{DiscreteSurface, GraphSurface};

    fn chart() -> FermiChart {
        FermiChart::new(6.0, 1.0, 64, 33).unwrap()
    }

    const EPS_SEQ: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

    #[test]
    fn static_residuals_umbilic_floor() {
        let s = GraphSurface::Analytic(AnalyticSurface::constant(chart(), 0.7));
        let report = residual_static(&s, &[]).unwrap();
        for r in &report.residuals {
            assert!(r.max_abs <= 1e-12, "{}: {:.3e}", r.name, r.max_abs);
        }
    }

    #[test]
    fn static_residuals_sine_exact() {
        let s = GraphSurface::Analytic(AnalyticSurface::sine(chart(), 0.2, 1));
        let report = residual_static(&s, &[]).unwrap();
        for r in &report.residuals {
            assert!(r.max_abs <= 1e-9, "{}: {:.3e}", r.name, r.max_abs);
        }
    }

    #[test]
    fn static_residuals_discrete_second_order() {
        let study = static_convergence_study(
            6.0,
            1.0,
            &|ch| AnalyticSurface::sine_bump(ch, 0.2, 1),
            &[64, 128, 256],
        )
        .unwrap();
        for est in &study {
            match est.order {
                OrderEstimate::Fitted(p) => {
                    assert!(p >= 1.9, "{}: order {p:.2} from {:?}", est.name, est.samples)
                }
                OrderEstimate::AtFloor => {}
            }
        }
    }

    #[test]
    fn dynamic_residuals_umbilic() {
        let s = AnalyticSurface::constant(chart(), 0.9);
        let report = residual_dynamic(&s, 1e-3, &[]).unwrap();
        // the material height rate is exact for equidistant surfaces
        assert!(report.max_of("height-rate").unwrap() <= 1e-10);
        // all other residuals collapse to the push truncation order
        for r in &report.residuals {
            assert!(r.max_abs <= 1e-2, "{}: {:.3e}", r.name, r.max_abs);
        }
        let extr = residual_dynamic_extrapolated(&s, &EPS_SEQ, &[]).unwrap();
        for r in &extr.residuals {
            assert!(r.max_abs <= 1e-6, "{}: {:.3e}", r.name, r.max_abs);
        }
    }

    #[test]
    fn dynamic_residuals_decay_linearly_and_extrapolate() {
        let s = AnalyticSurface::sine(chart(), 0.1, 1);
        let r1 = residual_dynamic(&s, EPS_SEQ[0], &[]).unwrap();
        let r2 = residual_dynamic(&s, EPS_SEQ[1], &[]).unwrap();
        // halving ε should roughly halve the angle-rate residual
        let a1 = r1.max_of("angle-rate").unwrap();
        let a2 = r2.max_of("angle-rate").unwrap();
        let ratio = a1 / a2;
        assert!(
            (1.6..2.4).contains(&ratio),
            "first-order decay violated: {a1:.3e} / {a2:.3e} = {ratio:.2}"
        );
        let extr = residual_dynamic_extrapolated(&s, &EPS_SEQ, &[]).unwrap();
        for r in &extr.residuals {
            assert!(r.max_abs <= 1e-6, "{}: {:.3e}", r.name, r.max_abs);
        }
    }

    #[test]
    fn appendix_umbilic_values() {
        // n-flow of the slice at height c: H(c+ε) = 2tanh(c+ε), so the
        // fiber variation is 2/cosh²(c)
        let c = 0.8;
        let s = AnalyticSurface::constant(chart(), c);
        let sample =
            GeomSample::from_point_geom(1.0, 0.2, &s.geom(1.0, 0.2).unwrap());
        let closed = fiber_variation_h_closed(&sample);
        assert!(
            (closed - 2.0 / c.cosh().powi(2)).abs() <= 1e-9,
            "closed form {closed}"
        );

        // u ≡ 0: the rate of 2tanh at r = 0 is 2
        let s0 = AnalyticSurface::constant(chart(), 0.0);
        let sample0 = GeomSample::from_point_geom(1.0, 0.2, &s0.geom(1.0, 0.2).unwrap());
        assert!((fiber_variation_h_closed(&sample0) - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn appendix_residuals_sine() {
        let s = AnalyticSurface::sine(chart(), 0.1, 1);
        let report = residual_appendix(&s, 1e-3, &[]).unwrap();
        assert!(report.max_of("fiber-variation-h").unwrap() <= 1e-6);
        assert!(report.max_of("angle-evolution-forms").unwrap() <= 1e-9);
        // (c) decays linearly in ε
        let r2 = residual_appendix(&s, 5e-4, &[]).unwrap();
        let ratio =
            report.max_of("fiber-rate").unwrap() / r2.max_of("fiber-rate").unwrap();
        assert!((1.5..2.5).contains(&ratio), "fiber-rate ratio {ratio:.2}");
    }

    #[test]
    fn convergence_order_estimator() {
        // validate the estimator itself on synthetic first- and
        // second-order data: forward vs centered difference of sin(x)
        let x0 = 0.7f64;
        let mut first = Vec::new();
        let mut second = Vec::new();
        for k in 0..3 {
            let h = 0.1 / 2f64.powi(k);
            first.push((h, (((x0 + h).sin() - x0.sin()) / h - x0.cos()).abs()));
            second.push((
                h,
                (((x0 + h).sin() - (x0 - h).sin()) / (2.0 * h) - x0.cos()).abs(),
            ));
        }
        let e1 = convergence_order("one-sided", &first).unwrap();
        let e2 = convergence_order("centered", &second).unwrap();
        match (e1.order, e2.order) {
            (OrderEstimate::Fitted(p1), OrderEstimate::Fitted(p2)) => {
                assert!((p1 - 1.0).abs() < 0.1, "one-sided order {p1}");
                assert!((p2 - 2.0).abs() < 0.1, "centered order {p2}");
            }
            other => panic!("unexpected {other:?}"),
        }

        // constant graph at any grid: residuals at the floor
        let d = DiscreteSurface::from_profile(chart(), &AnalyticSurface::constant(chart(), 0.5));
        let rep = residual_static(&GraphSurface::Discrete(d), &[]).unwrap();
        let samples: Vec<(f64, f64)> = vec![
            (0.1, rep.residuals[0].max_abs),
            (0.05, rep.residuals[0].max_abs),
            (0.025, rep.residuals[0].max_abs),
        ];
        let est = convergence_order("floor", &samples).unwrap();
        assert_eq!(est.order, OrderEstimate::AtFloor);

        assert!(convergence_order("too-few", &[(0.1, 1.0), (0.05, 0.5)]).is_err());
    }
}
