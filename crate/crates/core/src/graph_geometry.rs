//! Geodesic graphs r = u(x, y) over the Fermi chart, in analytic and
//! discrete form: pointwise geometry sampling, surface Laplacians, and the
//! normal-push oracle used for time derivatives.

use crate::geometry::{
    graph_patch, graph_patch_jet, point_geom, principal_decomposition, GeomError, PatchJet,
    PointGeom, SurfaceCalc,
};
use crate::hyp_base::FermiChart;
use crate::jet::Jet;
use ndarray::Array2;

/// x-dependence of a profile term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XFactor {
    One,
    /// sin(2π·kx·x/L)
    Sin,
    /// cos(2π·kx·x/L)
    Cos,
}

/// y-dependence of a profile term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YFactor {
    One,
    /// cos(πy/(2Y)): vanishes on the chart edges, but with nonzero slope
    /// there (not reflection-compatible).
    CosHalf,
    /// cos²(πy/(2Y)): vanishes on the chart edges with zero slope, and is
    /// exactly even under reflection across y = ±Y.
    CosSqHalf,
}

/// One separable term amp·f(x)·g(y) of an analytic profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveTerm {
    pub amp: f64,
    pub kx: u32,
    pub x_factor: XFactor,
    pub y_factor: YFactor,
}

/// Closed-form height function u = offset + Σ terms, with exact partial
/// derivatives to fourth order.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSurface {
    pub chart: FermiChart,
    pub offset: f64,
    pub terms: Vec<WaveTerm>,
}

impl AnalyticSurface {
    pub fn constant(chart: FermiChart, c: f64) -> Self {
        AnalyticSurface {
            chart,
            offset: c,
            terms: Vec::new(),
        }
    }

    /// amp·sin(2π·kx·x/L)·cos(πy/(2Y)).
    pub fn sine(chart: FermiChart, amp: f64, kx: u32) -> Self {
        AnalyticSurface {
            chart,
            offset: 0.0,
            terms: vec![WaveTerm {
                amp,
                kx,
                x_factor: XFactor::Sin,
                y_factor: YFactor::CosHalf,
            }],
        }
    }

    /// amp·sin(2π·kx·x/L)·cos²(πy/(2Y)), compatible with the reflection
    /// boundary rule.
    pub fn sine_bump(chart: FermiChart, amp: f64, kx: u32) -> Self {
        AnalyticSurface {
            chart,
            offset: 0.0,
            terms: vec![WaveTerm {
                amp,
                kx,
                x_factor: XFactor::Sin,
                y_factor: YFactor::CosSqHalf,
            }],
        }
    }

    /// amp·cos(2π·kx·x/L)·cos²(πy/(2Y)).
    pub fn cos_bump(chart: FermiChart, amp: f64, kx: u32) -> Self {
        AnalyticSurface {
            chart,
            offset: 0.0,
            terms: vec![WaveTerm {
                amp,
                kx,
                x_factor: XFactor::Cos,
                y_factor: YFactor::CosSqHalf,
            }],
        }
    }

    /// amp·cos²(πy/(2Y)): an x-independent ridge profile.
    pub fn bump(chart: FermiChart, amp: f64) -> Self {
        AnalyticSurface {
            chart,
            offset: 0.0,
            terms: vec![WaveTerm {
                amp,
                kx: 0,
                x_factor: XFactor::One,
                y_factor: YFactor::CosSqHalf,
            }],
        }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    /// The same surface moved by d along the fiber direction.
    pub fn shifted(&self, d: f64) -> Self {
        let mut s = self.clone();
        s.offset += d;
        s
    }

    /// Order-4 Taylor jet of u at (x, y); every coefficient is exact.
    pub fn u_jet(&self, x: f64, y: f64) -> Jet {
        let mut jet = Jet::constant(self.offset);
        for term in &self.terms {
            let omega = 2.0 * std::f64::consts::PI * term.kx as f64 / self.chart.period;
            let fx = match term.x_factor {
                XFactor::One => [term.amp, 0.0, 0.0, 0.0, 0.0],
                XFactor::Sin => {
                    let (s, c) = ((omega * x).sin(), (omega * x).cos());
                    [
                        term.amp * s,
                        term.amp * omega * c,
                        -term.amp * omega.powi(2) * s,
                        -term.amp * omega.powi(3) * c,
                        term.amp * omega.powi(4) * s,
                    ]
                }
                XFactor::Cos => {
                    let (s, c) = ((omega * x).sin(), (omega * x).cos());
                    [
                        term.amp * c,
                        -term.amp * omega * s,
                        -term.amp * omega.powi(2) * c,
                        term.amp * omega.powi(3) * s,
                        term.amp * omega.powi(4) * c,
                    ]
                }
            };
            let mu = std::f64::consts::FRAC_PI_2 / self.chart.half_width;
            let gy = match term.y_factor {
                YFactor::One => [1.0, 0.0, 0.0, 0.0, 0.0],
                YFactor::CosHalf => {
                    let (s, c) = ((mu * y).sin(), (mu * y).cos());
                    [
                        c,
                        -mu * s,
                        -mu.powi(2) * c,
                        mu.powi(3) * s,
                        mu.powi(4) * c,
                    ]
                }
                YFactor::CosSqHalf => {
                    // cos²(μy) = (1 + cos(2μy))/2
                    let nu = 2.0 * mu;
                    let (s, c) = ((nu * y).sin(), (nu * y).cos());
                    [
                        0.5 * (1.0 + c),
                        -0.5 * nu * s,
                        -0.5 * nu.powi(2) * c,
                        0.5 * nu.powi(3) * s,
                        0.5 * nu.powi(4) * c,
                    ]
            }
            };
            jet = jet + Jet::separable(&fx, &gy);
        }
        jet
    }

    pub fn u(&self, x: f64, y: f64) -> f64 {
        self.u_jet(x, y).value()
    }

    /// Maximum of |u| over the chart (sampled on the chart grid).
    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.chart.nx {
            for j in 0..self.chart.ny {
                m = m.max(self.u(self.chart.x_at(i), self.chart.y_at(j)).abs());
            }
        }
        m
    }

    /// Pointwise geometry in jet arithmetic.
    pub fn geom_jet(&self, x: f64, y: f64) -> Result<PointGeom<Jet>, GeomError> {
        point_geom(&graph_patch_jet(x, y, self.u_jet(x, y)))
    }

    /// Pointwise geometry in plain f64.
    pub fn geom(&self, x: f64, y: f64) -> Result<PointGeom<f64>, GeomError> {
        let j = self.u_jet(x, y);
        point_geom(&graph_patch(
            x,
            y,
            j.value(),
            j.deriv(1, 0),
            j.deriv(0, 1),
            j.deriv(2, 0),
            j.deriv(1, 1),
            j.deriv(0, 2),
        ))
    }
}

/// Height field over the chart grid: u[[i, j]] at (x_i, y_j), periodic in
/// x and evenly reflected across y = ±Y.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSurface {
    pub chart: FermiChart,
    pub u: Array2<f64>,
}

/// Height value and derivatives at one point, second-order accurate for
/// discrete surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightJet {
    pub u: f64,
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uxy: f64,
    pub uyy: f64,
}

/// Access a grid field with the chart boundary rules (periodic x, even
/// reflection across both y edges).
#[inline]
pub fn field_at(f: &Array2<f64>, i: isize, j: isize) -> f64 {
    let (nx, ny) = f.dim();
    let ii = i.rem_euclid(nx as isize) as usize;
    let mut jj = j;
    if jj < 0 {
        jj = -jj;
    }
    if jj >= ny as isize {
        jj = 2 * (ny as isize - 1) - jj;
    }
    f[[ii, jj as usize]]
}

/// Centered second-order stencils of a grid field at a node.
pub fn fd_derivs(f: &Array2<f64>, chart: &FermiChart, i: usize, j: usize) -> HeightJet {
    let (dx, dy) = (chart.dx(), chart.dy());
    let (i, j) = (i as isize, j as isize);
    let c = field_at(f, i, j);
    let xp = field_at(f, i + 1, j);
    let xm = field_at(f, i - 1, j);
    let yp = field_at(f, i, j + 1);
    let ym = field_at(f, i, j - 1);
    HeightJet {
        u: c,
        ux: (xp - xm) / (2.0 * dx),
        uy: (yp - ym) / (2.0 * dy),
        uxx: (xp - 2.0 * c + xm) / (dx * dx),
        uyy: (yp - 2.0 * c + ym) / (dy * dy),
        uxy: (field_at(f, i + 1, j + 1) - field_at(f, i + 1, j - 1) - field_at(f, i - 1, j + 1)
            + field_at(f, i - 1, j - 1))
            / (4.0 * dx * dy),
    }
}

impl DiscreteSurface {
    pub fn from_fn(chart: FermiChart, f: impl Fn(f64, f64) -> f64) -> Self {
        let u = Array2::from_shape_fn((chart.nx, chart.ny), |(i, j)| {
            f(chart.x_at(i), chart.y_at(j))
        });
        DiscreteSurface { chart, u }
    }

    pub fn from_profile(chart: FermiChart, profile: &AnalyticSurface) -> Self {
        Self::from_fn(chart, |x, y| profile.u(x, y))
    }

    pub fn height_jet(&self, i: usize, j: usize) -> HeightJet {
        fd_derivs(&self.u, &self.chart, i, j)
    }

    /// Pointwise geometry at a node from the finite-difference stencils.
    pub fn geom_at_node(&self, i: usize, j: usize) -> Result<PointGeom<f64>, GeomError> {
        let hj = self.height_jet(i, j);
        point_geom(&graph_patch(
            self.chart.x_at(i),
            self.chart.y_at(j),
            hj.u,
            hj.ux,
            hj.uy,
            hj.uxx,
            hj.uxy,
            hj.uyy,
        ))
    }

    /// Nearest grid node to a chart point.
    pub fn nearest_node(&self, x: f64, y: f64) -> (usize, usize) {
        let fx = (x / self.chart.dx()).round();
        let i = (fx as isize).rem_euclid(self.chart.nx as isize) as usize;
        let fy = ((y + self.chart.half_width) / self.chart.dy()).round();
        let j = (fy.max(0.0) as usize).min(self.chart.ny - 1);
        (i, j)
    }
}

/// A geodesic graph in one of its representations.
#[derive(Debug, Clone)]
pub enum GraphSurface {
    Analytic(AnalyticSurface),
    Discrete(DiscreteSurface),
    /// An analytic surface pushed by -εHν and lazily re-graphed (one
    /// Newton solve per evaluation).
    Pushed(PushedSurface),
}

/// Everything the lab wants to know about one surface point.
#[derive(Debug, Clone, Copy)]
pub struct GeomSample {
    /// Chart point the sample was taken at.
    pub point: (f64, f64),
    pub u: f64,
    /// Induced metric in the (x, y) parameter frame.
    pub metric: [[f64; 2]; 2],
    /// Tangent frame F_x, F_y (ambient components in (r, x, y)).
    pub frame: [[f64; 3]; 2],
    pub nu: [f64; 3],
    pub theta: f64,
    pub second_form: [[f64; 2]; 2],
    pub mean_curvature: f64,
    pub a_norm2: f64,
    pub eta: f64,
    /// Ambient components of the surface gradient of the height function.
    pub grad_u: [f64; 3],
    /// Principal curvature / unit principal direction pairs.
    pub principal: [(f64, [f64; 3]); 2],
}

impl GeomSample {
    pub fn from_point_geom(x: f64, y: f64, g: &PointGeom<f64>) -> Self {
        let grad_u = [
            g.n_tan_coeff[0] * g.tangent[0][0] + g.n_tan_coeff[1] * g.tangent[1][0],
            g.n_tan_coeff[0] * g.tangent[0][1] + g.n_tan_coeff[1] * g.tangent[1][1],
            g.n_tan_coeff[0] * g.tangent[0][2] + g.n_tan_coeff[1] * g.tangent[1][2],
        ];
        GeomSample {
            point: (x, y),
            u: g.pos[0],
            metric: g.metric,
            frame: g.tangent,
            nu: g.nu,
            theta: g.theta,
            second_form: g.a,
            mean_curvature: g.h,
            a_norm2: g.a_norm2,
            eta: g.eta,
            grad_u,
            principal: principal_decomposition(g),
        }
    }

    /// Principal pairs ordered so the first direction is the one with the
    /// smaller |<e, n>| component (the frame used at angle minima).
    pub fn principal_by_fiber_alignment(&self) -> [(f64, [f64; 3]); 2] {
        let [p0, p1] = self.principal;
        if p0.1[0].abs() <= p1.1[0].abs() {
            [p0, p1]
        } else {
            [p1, p0]
        }
    }
}

/// Pointwise geometric quantities of a graph at a chart point. Discrete
/// surfaces are sampled at the nearest grid node.
pub fn sample_geometry(s: &GraphSurface, x: f64, y: f64) -> Result<GeomSample, GeomError> {
    match s {
        GraphSurface::Analytic(a) => Ok(GeomSample::from_point_geom(x, y, &a.geom(x, y)?)),
        GraphSurface::Discrete(d) => {
            let (i, j) = d.nearest_node(x, y);
            Ok(GeomSample::from_point_geom(
                d.chart.x_at(i),
                d.chart.y_at(j),
                &d.geom_at_node(i, j)?,
            ))
        }
        GraphSurface::Pushed(p) => Ok(GeomSample::from_point_geom(x, y, &p.geom(x, y)?)),
    }
}

/// A scalar field sampled in the same representation as a surface.
pub enum SurfaceField<'a> {
    /// Jet of the field at any chart point.
    Analytic(&'a dyn Fn(f64, f64) -> Jet),
    /// Grid of field values matching the surface grid.
    Discrete(&'a Array2<f64>),
}

/// Laplace-Beltrami operator of a scalar field on the surface, evaluated at
/// a chart point (discrete surfaces: at the nearest node, second-order
/// stencils).
pub fn surface_laplacian(
    s: &GraphSurface,
    f: &SurfaceField,
    x: f64,
    y: f64,
) -> Result<f64, GeomError> {
    match (s, f) {
        (GraphSurface::Analytic(a), SurfaceField::Analytic(field)) => {
            let geom = a.geom_jet(x, y)?;
            let calc = SurfaceCalc::new(&geom);
            Ok(calc.laplacian(&field(x, y)))
        }
        (GraphSurface::Discrete(d), SurfaceField::Discrete(grid)) => {
            if grid.dim() != d.u.dim() {
                return Err(GeomError::RepresentationMismatch(
                    "field grid dimensions do not match the surface grid",
                ));
            }
            let (i, j) = d.nearest_node(x, y);
            let calc = DiscreteCalc::at_node(d, i, j)?;
            Ok(calc.laplacian(grid))
        }
        _ => Err(GeomError::RepresentationMismatch(
            "field and surface must share a representation",
        )),
    }
}

/// Surface differential operators at a grid node, built from
/// finite-difference derivatives of the induced metric.
pub struct DiscreteCalc<'a> {
    surf: &'a DiscreteSurface,
    node: (usize, usize),
    pub geom: PointGeom<f64>,
    pub christoffel: [[[f64; 2]; 2]; 2],
}

impl<'a> DiscreteCalc<'a> {
    pub fn at_node(surf: &'a DiscreteSurface, i: usize, j: usize) -> Result<Self, GeomError> {
        let geom = surf.geom_at_node(i, j)?;
        // metric components at the 4 neighbor nodes for ∂g
        let comp = |i: isize, j: isize| -> Result<[[f64; 2]; 2], GeomError> {
            let (nx, ny) = surf.u.dim();
            let ii = i.rem_euclid(nx as isize) as usize;
            let mut jj = j;
            if jj < 0 {
                jj = -jj;
            }
            if jj >= ny as isize {
                jj = 2 * (ny as isize - 1) - jj;
            }
            Ok(surf.geom_at_node(ii, jj as usize)?.metric)
        };
        let (ii, jj) = (i as isize, j as isize);
        let gxp = comp(ii + 1, jj)?;
        let gxm = comp(ii - 1, jj)?;
        let gyp = comp(ii, jj + 1)?;
        let gym = comp(ii, jj - 1)?;
        let (dx, dy) = (surf.chart.dx(), surf.chart.dy());
        let mut dg = [[[0.0; 2]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                dg[0][a][b] = (gxp[a][b] - gxm[a][b]) / (2.0 * dx);
                dg[1][a][b] = (gyp[a][b] - gym[a][b]) / (2.0 * dy);
            }
        }
        let inv = geom.inv_metric;
        let mut christoffel = [[[0.0; 2]; 2]; 2];
        for k in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let mut s = 0.0;
                    for l in 0..2 {
                        s += 0.5 * inv[k][l] * (dg[a][b][l] + dg[b][a][l] - dg[l][a][b]);
                    }
                    christoffel[k][a][b] = s;
                }
            }
        }
        Ok(DiscreteCalc {
            surf,
            node: (i, j),
            geom,
            christoffel,
        })
    }

    fn field_jet(&self, f: &Array2<f64>) -> HeightJet {
        fd_derivs(f, &self.surf.chart, self.node.0, self.node.1)
    }

    pub fn laplacian(&self, f: &Array2<f64>) -> f64 {
        let d = self.field_jet(f);
        let d1 = [d.ux, d.uy];
        let d2 = [[d.uxx, d.uxy], [d.uxy, d.uyy]];
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut hess = d2[i][j];
                for k in 0..2 {
                    hess -= self.christoffel[k][i][j] * d1[k];
                }
                acc += self.geom.inv_metric[i][j] * hess;
            }
        }
        acc
    }

    pub fn grad_coeff(&self, f: &Array2<f64>) -> [f64; 2] {
        let d = self.field_jet(f);
        let g = &self.geom.inv_metric;
        [
            g[0][0] * d.ux + g[0][1] * d.uy,
            g[1][0] * d.ux + g[1][1] * d.uy,
        ]
    }

    pub fn grad_dot_n(&self, f: &Array2<f64>) -> f64 {
        let c = self.grad_coeff(f);
        c[0] * self.geom.n_dot_t[0] + c[1] * self.geom.n_dot_t[1]
    }

    pub fn grad_inner(&self, f: &Array2<f64>, g: &Array2<f64>) -> f64 {
        let c = self.grad_coeff(f);
        let d = self.field_jet(g);
        c[0] * d.ux + c[1] * d.uy
    }

    pub fn grad_ambient(&self, f: &Array2<f64>) -> [f64; 3] {
        let c = self.grad_coeff(f);
        let t = &self.geom.tangent;
        [
            c[0] * t[0][0] + c[1] * t[1][0],
            c[0] * t[0][1] + c[1] * t[1][1],
            c[0] * t[0][2] + c[1] * t[1][2],
        ]
    }
}

/// Geometry of the pushed surface at the pushed material point, exact to
/// the order the jets carry: the image of the base point (x, y) under one
/// explicit normal step Ψ = Φ - εHν, with tangent plane and second
/// fundamental form read from the exact jet of Ψ.
#[derive(Debug, Clone, Copy)]
pub struct PushedSample {
    pub geom: PointGeom<f64>,
    /// Ambient coordinates of the pushed material point.
    pub position: [f64; 3],
}

pub fn material_push_sample(
    s: &AnalyticSurface,
    x: f64,
    y: f64,
    eps: f64,
) -> Result<PushedSample, GeomError> {
    let g = s.geom_jet(x, y)?;
    let psi = pushed_map_jets(&g, eps);
    let patch = PatchJet {
        pos: [psi[0].value(), psi[1].value(), psi[2].value()],
        d1: [
            [psi[0].deriv(1, 0), psi[1].deriv(1, 0), psi[2].deriv(1, 0)],
            [psi[0].deriv(0, 1), psi[1].deriv(0, 1), psi[2].deriv(0, 1)],
        ],
        d2: [
            [
                [psi[0].deriv(2, 0), psi[1].deriv(2, 0), psi[2].deriv(2, 0)],
                [psi[0].deriv(1, 1), psi[1].deriv(1, 1), psi[2].deriv(1, 1)],
            ],
            [
                [psi[0].deriv(1, 1), psi[1].deriv(1, 1), psi[2].deriv(1, 1)],
                [psi[0].deriv(0, 2), psi[1].deriv(0, 2), psi[2].deriv(0, 2)],
            ],
        ],
    };
    let geom = point_geom(&patch)?;
    Ok(PushedSample {
        geom,
        position: patch.pos,
    })
}

/// Jets of the push map Ψ(x, y) = Φ(x, y) - ε·H·ν.
fn pushed_map_jets(g: &PointGeom<Jet>, eps: f64) -> [Jet; 3] {
    let speed = [
        g.h * g.nu[0] * (-eps),
        g.h * g.nu[1] * (-eps),
        g.h * g.nu[2] * (-eps),
    ];
    [
        g.pos[0] + speed[0],
        g.pos[1] + speed[1],
        g.pos[2] + speed[2],
    ]
}

/// An analytic surface after one normal step, re-graphed lazily.
#[derive(Debug, Clone)]
pub struct PushedSurface {
    pub base: AnalyticSurface,
    pub eps: f64,
}

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITERS: usize = 50;

impl PushedSurface {
    /// Height of the pushed surface over the base point (X, Y): Newton
    /// inversion of the horizontal part of the push map along the fiber.
    pub fn u(&self, x_target: f64, y_target: f64) -> Result<f64, GeomError> {
        let (mut x, mut y) = (x_target, y_target);
        for _ in 0..NEWTON_MAX_ITERS {
            let g = self.base.geom_jet(x, y).map_err(|e| match e {
                GeomError::GraphLost { x, y, theta } => GeomError::GraphLost { x, y, theta },
                other => other,
            })?;
            let psi = pushed_map_jets(&g, self.eps);
            let rx = psi[1].value() - x_target;
            let ry = psi[2].value() - y_target;
            if rx.abs().max(ry.abs()) < NEWTON_TOL {
                return Ok(psi[0].value());
            }
            // Jacobian of the horizontal push map, exact from the jets
            let j00 = psi[1].deriv(1, 0);
            let j01 = psi[1].deriv(0, 1);
            let j10 = psi[2].deriv(1, 0);
            let j11 = psi[2].deriv(0, 1);
            let det = j00 * j11 - j01 * j10;
            if det.abs() < 1e-14 {
                return Err(GeomError::NewtonDiverged {
                    x: x_target,
                    y: y_target,
                });
            }
            x -= (j11 * rx - j01 * ry) / det;
            y -= (-j10 * rx + j00 * ry) / det;
        }
        Err(GeomError::NewtonDiverged {
            x: x_target,
            y: y_target,
        })
    }

    /// Pointwise geometry by Richardson-free central differencing of the
    /// Newton-evaluated height (step 1e-4; adequate for the push contract,
    /// not for the exact-derivative identity checks).
    pub fn geom(&self, x: f64, y: f64) -> Result<PointGeom<f64>, GeomError> {
        let h = 1e-4;
        let c = self.u(x, y)?;
        let xp = self.u(x + h, y)?;
        let xm = self.u(x - h, y)?;
        let yp = self.u(x, y + h)?;
        let ym = self.u(x, y - h)?;
        let pp = self.u(x + h, y + h)?;
        let pm = self.u(x + h, y - h)?;
        let mp = self.u(x - h, y + h)?;
        let mm = self.u(x - h, y - h)?;
        point_geom(&graph_patch(
            x,
            y,
            c,
            (xp - xm) / (2.0 * h),
            (yp - ym) / (2.0 * h),
            (xp - 2.0 * c + xm) / (h * h),
            (pp - pm - mp + mm) / (4.0 * h * h),
            (yp - 2.0 * c + ym) / (h * h),
        ))
    }
}

/// Minimum angle below which the push oracle refuses to act.
pub const PUSH_THETA_FLOOR: f64 = 0.05;

/// Move every surface point by -ε·H·ν and re-express the result as a graph.
/// Analytic surfaces are re-graphed lazily by Newton solves; discrete
/// surfaces are resampled to the grid with cubic interpolation.
pub fn normal_push(s: &GraphSurface, eps: f64) -> Result<GraphSurface, GeomError> {
    if eps == 0.0 {
        return Ok(s.clone());
    }
    match s {
        GraphSurface::Analytic(a) => {
            let mut min_theta = f64::INFINITY;
            for i in 0..a.chart.nx {
                for j in 0..a.chart.ny {
                    let g = a.geom(a.chart.x_at(i), a.chart.y_at(j))?;
                    min_theta = min_theta.min(g.theta);
                }
            }
            if min_theta <= PUSH_THETA_FLOOR {
                return Err(GeomError::PushFailed(format!(
                    "minimum angle {min_theta:.3e} at or below the push floor {PUSH_THETA_FLOOR}"
                )));
            }
            Ok(GraphSurface::Pushed(PushedSurface {
                base: a.clone(),
                eps,
            }))
        }
        GraphSurface::Discrete(d) => Ok(GraphSurface::Discrete(push_discrete(d, eps)?)),
        GraphSurface::Pushed(_) => Err(GeomError::PushFailed(
            "pushing an already pushed surface is not supported; re-graph it first".into(),
        )),
    }
}

fn push_discrete(d: &DiscreteSurface, eps: f64) -> Result<DiscreteSurface, GeomError> {
    let (nx, ny) = d.u.dim();
    let mut disp_x = Array2::zeros((nx, ny));
    let mut disp_y = Array2::zeros((nx, ny));
    let mut new_r = Array2::zeros((nx, ny));
    for i in 0..nx {
        for j in 0..ny {
            let g = d.geom_at_node(i, j)?;
            if g.theta <= PUSH_THETA_FLOOR {
                return Err(GeomError::PushFailed(format!(
                    "angle {:.3e} at node ({i}, {j}) is at or below the push floor",
                    g.theta
                )));
            }
            disp_x[[i, j]] = -eps * g.h * g.nu[1];
            disp_y[[i, j]] = -eps * g.h * g.nu[2];
            new_r[[i, j]] = g.pos[0] - eps * g.h * g.nu[0];
        }
    }
    // Invert (x, y) ↦ (x + dx(x,y), y + dy(x,y)) per grid node by fixed
    // point iteration, then read the pushed height there.
    let mut u = Array2::zeros((nx, ny));
    for i in 0..nx {
        for j in 0..ny {
            let xt = d.chart.x_at(i);
            let yt = d.chart.y_at(j);
            let (mut x, mut y) = (xt, yt);
            let mut converged = false;
            for _ in 0..60 {
                let nx_ = xt - bicubic(&disp_x, &d.chart, x, y);
                let ny_ = yt - bicubic(&disp_y, &d.chart, x, y);
                let delta = (nx_ - x).abs().max((ny_ - y).abs());
                x = nx_;
                y = ny_;
                if delta < 1e-13 {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(GeomError::NewtonDiverged { x: xt, y: yt });
            }
            u[[i, j]] = bicubic(&new_r, &d.chart, x, y);
        }
    }
    Ok(DiscreteSurface { chart: d.chart, u })
}

/// Catmull-Rom bicubic interpolation of a grid field at a chart point,
/// honoring the boundary rules.
pub fn bicubic(f: &Array2<f64>, chart: &FermiChart, x: f64, y: f64) -> f64 {
    let fx = x / chart.dx();
    let fy = (y + chart.half_width) / chart.dy();
    let ix = fx.floor();
    let iy = fy.floor();
    let tx = fx - ix;
    let ty = fy - iy;
    let mut rows = [0.0; 4];
    for (m, row) in rows.iter_mut().enumerate() {
        let jj = iy as isize - 1 + m as isize;
        let mut pts = [0.0; 4];
        for (k, p) in pts.iter_mut().enumerate() {
            *p = field_at(f, ix as isize - 1 + k as isize, jj);
        }
        *row = catmull_rom(&pts, tx);
    }
    catmull_rom(&rows, ty)
}

#[inline]
fn catmull_rom(p: &[f64; 4], t: f64) -> f64 {
    0.5 * (2.0 * p[1]
        + (p[2] - p[0]) * t
        + (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) * t * t
        + (3.0 * p[1] - 3.0 * p[2] + p[3] - p[0]) * t * t * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::amb_inner;

    fn chart() -> FermiChart {
        FermiChart::new(6.0, 1.0, 64, 33).unwrap()
    }

    #[test]
    fn constant_graph_through_public_api() {
        let s = GraphSurface::Analytic(AnalyticSurface::constant(chart(), 0.8));
        let g = sample_geometry(&s, 1.0, 0.3).unwrap();
        assert!((g.theta - 1.0).abs() < 1e-14);
        assert!((g.mean_curvature - 2.0 * 0.8f64.tanh()).abs() < 1e-13);
        assert!((g.a_norm2 - 2.0 * 0.8f64.tanh().powi(2)).abs() < 1e-13);
        assert!((g.eta - 0.8f64.cosh()).abs() < 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.second_form[i][j] - 0.8f64.tanh() * g.metric[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_graph_is_flat() {
        let s = GraphSurface::Analytic(AnalyticSurface::constant(chart(), 0.0));
        let g = sample_geometry(&s, 2.0, -0.5).unwrap();
        assert!(g.mean_curvature.abs() < 1e-15);
        assert!(g.a_norm2.abs() < 1e-15);
        assert!((g.theta - 1.0).abs() < 1e-15);
        assert!((g.eta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sine_graph_theta_matches_gram_schmidt_oracle() {
        // Independent first-principles normal: orthonormalize
        // (F_x, F_y, ∂r) in the ambient metric; the third vector is ±ν.
        let profile = AnalyticSurface::sine(chart(), 0.2, 1);
        let (x, y) = (0.9, 0.25);
        let g = sample_geometry(&GraphSurface::Analytic(profile.clone()), x, y).unwrap();

        let jet = profile.u_jet(x, y);
        let (u, ux, uy) = (jet.value(), jet.deriv(1, 0), jet.deriv(0, 1));
        let m1 = (u.cosh() * y.cosh()).powi(2);
        let m2 = u.cosh().powi(2);
        let fx = [ux, 1.0, 0.0];
        let fy = [uy, 0.0, 1.0];
        let mut basis: Vec<[f64; 3]> = Vec::new();
        for v in [fx, fy, [1.0, 0.0, 0.0]] {
            let mut w = v;
            for b in &basis {
                let c = amb_inner(m1, m2, &w, b);
                for k in 0..3 {
                    w[k] -= c * b[k];
                }
            }
            let n = amb_inner(m1, m2, &w, &w).sqrt();
            for wk in w.iter_mut() {
                *wk /= n;
            }
            basis.push(w);
        }
        let mut oracle_nu = basis[2];
        if oracle_nu[0] < 0.0 {
            for v in oracle_nu.iter_mut() {
                *v = -*v;
            }
        }
        let oracle_theta = oracle_nu[0]; // <ν, n> = ν^r since g_rr = 1
        assert!((g.theta - oracle_theta).abs() < 1e-12);
        for k in 0..3 {
            assert!((g.nu[k] - oracle_nu[k]).abs() < 1e-11);
        }
    }

    #[test]
    fn discrete_matches_analytic_to_second_order() {
        let profile = AnalyticSurface::sine_bump(chart(), 0.3, 1);
        let errs: Vec<f64> = [64usize, 128]
            .iter()
            .map(|&n| {
                let ch = FermiChart::new(6.0, 1.0, n, n / 2 + 1).unwrap();
                let p = AnalyticSurface::sine_bump(ch, 0.3, 1);
                let d = DiscreteSurface::from_profile(ch, &p);
                let mut worst: f64 = 0.0;
                for i in 0..ch.nx {
                    for j in 0..ch.ny {
                        let gd = d.geom_at_node(i, j).unwrap();
                        let ga = p.geom(ch.x_at(i), ch.y_at(j)).unwrap();
                        worst = worst.max((gd.h - ga.h).abs());
                        worst = worst.max((gd.theta - ga.theta).abs());
                    }
                }
                worst
            })
            .collect();
        let _ = profile;
        // halving the spacing should shrink the error about 4x
        let ratio = errs[0] / errs[1];
        assert!(ratio > 3.0, "errors {errs:?} (ratio {ratio:.2})");
    }

    #[test]
    fn push_umbilic_one_step() {
        let a0 = 0.9;
        let s = GraphSurface::Analytic(AnalyticSurface::constant(chart(), a0));
        for eps in [1e-3, 5e-4] {
            let pushed = normal_push(&s, eps).unwrap();
            let g = sample_geometry(&pushed, 1.3, 0.2).unwrap();
            let expect = a0 - 2.0 * eps * a0.tanh();
            assert!(
                (g.u - expect).abs() < 10.0 * eps * eps,
                "eps {eps}: pushed height {} vs {expect}",
                g.u
            );
        }
    }

    #[test]
    fn push_zero_eps_is_identity() {
        let s = GraphSurface::Analytic(AnalyticSurface::sine(chart(), 0.2, 1));
        let pushed = normal_push(&s, 0.0).unwrap();
        let a = sample_geometry(&s, 0.7, 0.1).unwrap();
        let b = sample_geometry(&pushed, 0.7, 0.1).unwrap();
        assert_eq!(a.u, b.u);
        assert_eq!(a.theta, b.theta);
    }

    #[test]
    fn push_discrete_umbilic() {
        let ch = chart();
        let d = DiscreteSurface::from_profile(ch, &AnalyticSurface::constant(ch, 0.7));
        let eps = 1e-3;
        let pushed = push_discrete(&d, eps).unwrap();
        let expect = 0.7 - 2.0 * eps * 0.7f64.tanh();
        for i in 0..ch.nx {
            for j in 0..ch.ny {
                assert!((pushed.u[[i, j]] - expect).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn push_rejects_low_angle() {
        // steep profile: slopes large enough to drop the angle below 0.05
        let ch = FermiChart::new(2.0, 1.0, 64, 33).unwrap();
        let s = GraphSurface::Analytic(AnalyticSurface::sine(ch, 2.2, 3));
        match normal_push(&s, 1e-3) {
            Err(GeomError::PushFailed(_)) => {}
            other => panic!("expected PushFailed, got {other:?}"),
        }
    }

    #[test]
    fn material_push_theta_rate_exists() {
        // smoke check; the quantitative consistency with the evolution
        // equations lives in identity_lab
        let profile = AnalyticSurface::sine(chart(), 0.1, 1);
        let base = profile.geom(0.8, 0.2).unwrap();
        let eps = 1e-4;
        let pushed = material_push_sample(&profile, 0.8, 0.2, eps).unwrap();
        let rate = (pushed.geom.theta - base.theta) / eps;
        assert!(rate.is_finite());
        // height rate is exactly -HΘ for the material point
        let du = (pushed.position[0] - base.pos[0]) / eps;
        assert!((du + base.h * base.theta).abs() < 1e-12);
    }

    #[test]
    fn surface_laplacian_basics() {
        let ch = chart();
        // constant field on any surface
        let s = GraphSurface::Analytic(AnalyticSurface::sine(ch, 0.2, 1));
        let f = |_: f64, _: f64| Jet::constant(3.25);
        let v = surface_laplacian(&s, &SurfaceField::Analytic(&f), 1.0, 0.2).unwrap();
        assert!(v.abs() < 1e-12);

        // umbilic slice, f = u: Δu = tanh(c)(1+1) - 2tanh(c)·1 = 0
        let c = 0.6;
        let sc = GraphSurface::Analytic(AnalyticSurface::constant(ch, c));
        let fu = move |_: f64, _: f64| Jet::constant(c);
        let v = surface_laplacian(&sc, &SurfaceField::Analytic(&fu), 2.0, -0.4).unwrap();
        assert!(v.abs() < 1e-12);

        // representation mismatch is rejected
        let grid = Array2::zeros((4, 4));
        assert!(matches!(
            surface_laplacian(&sc, &SurfaceField::Discrete(&grid), 0.0, 0.0),
            Err(GeomError::RepresentationMismatch(_))
        ));
    }

    #[test]
    fn bicubic_reproduces_smooth_fields() {
        let ch = chart();
        let f = |x: f64, y: f64| (0.7 * x).sin() * (1.0 - y * y).cos();
        let grid = Array2::from_shape_fn((ch.nx, ch.ny), |(i, j)| f(ch.x_at(i), ch.y_at(j)));
        // exact at nodes
        assert_eq!(bicubic(&grid, &ch, ch.x_at(5), ch.y_at(7)), grid[[5, 7]]);
        // accurate between nodes
        let (x, y) = (1.234, 0.351);
        assert!((bicubic(&grid, &ch, x, y) - f(x, y)).abs() < 2e-5);
    }
}
