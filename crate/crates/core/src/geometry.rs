//! Pointwise extrinsic geometry of an immersed surface patch in the
//! warped-product ambient space, generic over the scalar type.
//!
//! Running the same formulas on `f64` gives fast per-node evaluation for
//! the solver; running them on [`Jet`] gives exact derivatives of every
//! derived quantity (angle, mean curvature, second fundamental form), from
//! which the surface Laplacian and gradients are read off without any
//! finite differencing.

use crate::jet::Jet;
use crate::scalar::Scalar;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("graph property lost at (x={x:.6}, y={y:.6}): theta = {theta:.6e}")]
    GraphLost { x: f64, y: f64, theta: f64 },
    #[error("degenerate induced metric at (x={x:.6}, y={y:.6}): det = {det:.3e}")]
    DegenerateMetric { x: f64, y: f64, det: f64 },
    #[error("normal push failed: {0}")]
    PushFailed(String),
    #[error("re-graphing Newton solve did not converge at (x={x:.6}, y={y:.6})")]
    NewtonDiverged { x: f64, y: f64 },
    #[error("field representation does not match the surface: {0}")]
    RepresentationMismatch(&'static str),
}

/// Position and first/second derivatives of a parametrized surface patch
/// Ψ(x¹, x²), components in ambient coordinates (r, x, y).
#[derive(Debug, Clone, Copy)]
pub struct PatchJet<T> {
    pub pos: [T; 3],
    /// d1[i] = ∂Ψ/∂xⁱ
    pub d1: [[T; 3]; 2],
    /// d2[i][j] = ∂²Ψ/∂xⁱ∂xʲ
    pub d2: [[[T; 3]; 2]; 2],
}

/// Every pointwise quantity of the surface at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct PointGeom<T> {
    pub pos: [T; 3],
    pub tangent: [[T; 3]; 2],
    /// Induced metric g_ij in the parameter frame.
    pub metric: [[T; 2]; 2],
    pub inv_metric: [[T; 2]; 2],
    pub det_metric: T,
    /// <n, Tᵢ>; for a graph these are the height partials (u_x, u_y).
    pub n_dot_t: [T; 2],
    /// Coefficients of the tangential part of n in the tangent basis,
    /// i.e. the surface gradient of the height function.
    pub n_tan_coeff: [T; 2],
    /// Upward unit normal (the one with positive angle).
    pub nu: [T; 3],
    /// Angle function Θ = <n, ν> ∈ (0, 1].
    pub theta: T,
    /// Second fundamental form a_ij = <∇̄_{Tᵢ} ν, Tⱼ> in the parameter frame.
    pub a: [[T; 2]; 2],
    /// Mean curvature H = gⁱʲ a_ij (sum of principal curvatures; the
    /// equidistant slice at height r gets H = +2 tanh r).
    pub h: T,
    /// |A|² = aⁱʲ a_ij.
    pub a_norm2: T,
    /// η = cosh(u)·Θ.
    pub eta: T,
}

/// Warp factors of the ambient metric diag(1, (cosh r · cosh y)², cosh²r).
#[inline]
fn warp<T: Scalar>(pos: &[T; 3]) -> (T, T) {
    let cr = pos[0].cosh();
    let cy = pos[2].cosh();
    let crcy = cr * cy;
    (crcy * crcy, cr * cr)
}

/// Ambient inner product of coordinate vectors at a point.
#[inline]
pub fn amb_inner<T: Scalar>(m1: T, m2: T, a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + m1 * a[1] * b[1] + m2 * a[2] * b[2]
}

/// All pointwise geometry of a patch. Fails when the tangent plane
/// contains the fiber direction (graph property lost) or the induced
/// metric degenerates.
pub fn point_geom<T: Scalar>(patch: &PatchJet<T>) -> Result<PointGeom<T>, GeomError> {
    let pos = patch.pos;
    let (m1, m2) = warp(&pos);
    let t = patch.d1;

    let mut metric = [[T::from_f64(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            metric[i][j] = amb_inner(m1, m2, &t[i], &t[j]);
        }
    }
    let det = metric[0][0] * metric[1][1] - metric[0][1] * metric[1][0];
    if !(det.val() > 1e-14) {
        return Err(GeomError::DegenerateMetric {
            x: pos[1].val(),
            y: pos[2].val(),
            det: det.val(),
        });
    }
    let inv_det = det.recip();
    let inv = [
        [metric[1][1] * inv_det, -metric[0][1] * inv_det],
        [-metric[1][0] * inv_det, metric[0][0] * inv_det],
    ];

    // Tangential part of the fiber direction n = ∂r. <n, Tᵢ> = Tᵢ^r since
    // g_rr = 1, and Θ² = 1 - |nᵀ|².
    let n_dot_t = [t[0][0], t[1][0]];
    let mut coeff = [T::from_f64(0.0); 2];
    for i in 0..2 {
        coeff[i] = inv[i][0] * n_dot_t[0] + inv[i][1] * n_dot_t[1];
    }
    let n_tan_sq = coeff[0] * n_dot_t[0] + coeff[1] * n_dot_t[1];
    let theta_sq = T::from_f64(1.0) - n_tan_sq;
    if !(theta_sq.val() > 0.0) {
        let v = theta_sq.val();
        return Err(GeomError::GraphLost {
            x: pos[1].val(),
            y: pos[2].val(),
            theta: v.signum() * v.abs().sqrt(),
        });
    }
    let theta = theta_sq.sqrt();

    // ν = (n - nᵀ)/Θ, automatically unit with <n, ν> = Θ > 0.
    let inv_theta = theta.recip();
    let nu = [
        (T::from_f64(1.0) - coeff[0] * t[0][0] - coeff[1] * t[1][0]) * inv_theta,
        (-(coeff[0] * t[0][1]) - coeff[1] * t[1][1]) * inv_theta,
        (-(coeff[0] * t[0][2]) - coeff[1] * t[1][2]) * inv_theta,
    ];

    // ∇̄_{Tᵢ}Tⱼ from the closed-form Christoffel symbols, then
    // a_ij = <∇̄_{Tᵢ} ν, Tⱼ> = -<ν, ∇̄_{Tᵢ}Tⱼ>.
    let tr = pos[0].tanh();
    let ty = pos[2].tanh();
    let src = pos[0].sinh() * pos[0].cosh();
    let scy = pos[2].sinh() * pos[2].cosh();
    let cy2 = pos[2].cosh() * pos[2].cosh();
    let mut a = [[T::from_f64(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let ti = t[i];
            let tj = t[j];
            let w0 = patch.d2[i][j][0] - src * cy2 * ti[1] * tj[1] - src * ti[2] * tj[2];
            let w1 = patch.d2[i][j][1]
                + tr * (ti[0] * tj[1] + ti[1] * tj[0])
                + ty * (ti[1] * tj[2] + ti[2] * tj[1]);
            let w2 = patch.d2[i][j][2] + tr * (ti[0] * tj[2] + ti[2] * tj[0])
                - scy * ti[1] * tj[1];
            a[i][j] = -amb_inner(m1, m2, &nu, &[w0, w1, w2]);
        }
    }

    // H = gⁱʲ a_ij, |A|² = tr(S²) with S = g⁻¹ a.
    let mut h = T::from_f64(0.0);
    let mut shape = [[T::from_f64(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            shape[i][j] = inv[i][0] * a[0][j] + inv[i][1] * a[1][j];
        }
        h = h + shape[i][i];
    }
    let a_norm2 = shape[0][0] * shape[0][0]
        + shape[0][1] * shape[1][0]
        + shape[1][0] * shape[0][1]
        + shape[1][1] * shape[1][1];

    let eta = pos[0].cosh() * theta;

    Ok(PointGeom {
        pos,
        tangent: t,
        metric,
        inv_metric: inv,
        det_metric: det,
        n_dot_t,
        n_tan_coeff: coeff,
        nu,
        theta,
        a,
        h,
        a_norm2,
        eta,
    })
}

/// Patch of a geodesic graph r = u(x, y) from the height 2-jet at a point.
pub fn graph_patch<T: Scalar>(
    x: T,
    y: T,
    u: T,
    ux: T,
    uy: T,
    uxx: T,
    uxy: T,
    uyy: T,
) -> PatchJet<T> {
    let zero = T::from_f64(0.0);
    let one = T::from_f64(1.0);
    PatchJet {
        pos: [u, x, y],
        d1: [[ux, one, zero], [uy, zero, one]],
        d2: [
            [[uxx, zero, zero], [uxy, zero, zero]],
            [[uxy, zero, zero], [uyy, zero, zero]],
        ],
    }
}

/// Graph patch in jet arithmetic, seeded from the height jet at (x0, y0).
pub fn graph_patch_jet(x0: f64, y0: f64, u: Jet) -> PatchJet<Jet> {
    let ux = u.dx();
    let uy = u.dy();
    graph_patch(
        Jet::coord_x(x0),
        Jet::coord_y(y0),
        u,
        ux,
        uy,
        ux.dx(),
        ux.dy(),
        uy.dy(),
    )
}

/// Surface differential operators at a point, extracted from jet-valued
/// geometry: the induced-metric Christoffel symbols need first derivatives
/// of g_ij, which the jets carry exactly.
pub struct SurfaceCalc {
    pub inv_metric: [[f64; 2]; 2],
    /// Γ̂^k_ij of the induced metric, parameter frame.
    pub christoffel: [[[f64; 2]; 2]; 2],
    pub tangent: [[f64; 3]; 2],
    pub n_dot_t: [f64; 2],
    m1: f64,
    m2: f64,
}

impl SurfaceCalc {
    pub fn new(geom: &PointGeom<Jet>) -> Self {
        let mut inv = [[0.0; 2]; 2];
        let mut g1 = [[[0.0; 2]; 2]; 2]; // g1[k][i][j] = ∂_k g_ij
        for i in 0..2 {
            for j in 0..2 {
                inv[i][j] = geom.inv_metric[i][j].value();
                g1[0][i][j] = geom.metric[i][j].deriv(1, 0);
                g1[1][i][j] = geom.metric[i][j].deriv(0, 1);
            }
        }
        let mut christoffel = [[[0.0; 2]; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for l in 0..2 {
                        s += 0.5 * inv[k][l] * (g1[i][j][l] + g1[j][i][l] - g1[l][i][j]);
                    }
                    christoffel[k][i][j] = s;
                }
            }
        }
        let tangent = [
            [
                geom.tangent[0][0].value(),
                geom.tangent[0][1].value(),
                geom.tangent[0][2].value(),
            ],
            [
                geom.tangent[1][0].value(),
                geom.tangent[1][1].value(),
                geom.tangent[1][2].value(),
            ],
        ];
        let pos = [
            geom.pos[0].value(),
            geom.pos[1].value(),
            geom.pos[2].value(),
        ];
        let (m1, m2) = warp(&pos);
        SurfaceCalc {
            inv_metric: inv,
            christoffel,
            tangent,
            n_dot_t: [geom.n_dot_t[0].value(), geom.n_dot_t[1].value()],
            m1,
            m2,
        }
    }

    fn d1(f: &Jet) -> [f64; 2] {
        [f.deriv(1, 0), f.deriv(0, 1)]
    }

    /// Laplace-Beltrami Δf = gⁱʲ(∂ᵢ∂ⱼf - Γ̂^k_ij ∂_k f) of a jet field.
    pub fn laplacian(&self, f: &Jet) -> f64 {
        let d1 = Self::d1(f);
        let d2 = [
            [f.deriv(2, 0), f.deriv(1, 1)],
            [f.deriv(1, 1), f.deriv(0, 2)],
        ];
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut hess = d2[i][j];
                for k in 0..2 {
                    hess -= self.christoffel[k][i][j] * d1[k];
                }
                acc += self.inv_metric[i][j] * hess;
            }
        }
        acc
    }

    /// Coefficients of the surface gradient ∇f = (gⁱʲ ∂ⱼf) Tᵢ.
    pub fn grad_coeff(&self, f: &Jet) -> [f64; 2] {
        let d1 = Self::d1(f);
        [
            self.inv_metric[0][0] * d1[0] + self.inv_metric[0][1] * d1[1],
            self.inv_metric[1][0] * d1[0] + self.inv_metric[1][1] * d1[1],
        ]
    }

    /// <∇f, ∇g> in the induced metric.
    pub fn grad_inner(&self, f: &Jet, g: &Jet) -> f64 {
        let cf = self.grad_coeff(f);
        let dg = Self::d1(g);
        cf[0] * dg[0] + cf[1] * dg[1]
    }

    /// <∇f, n>: the surface gradient paired with the fiber direction
    /// (equivalently with the tangential part of n).
    pub fn grad_dot_n(&self, f: &Jet) -> f64 {
        let cf = self.grad_coeff(f);
        cf[0] * self.n_dot_t[0] + cf[1] * self.n_dot_t[1]
    }

    /// Ambient components of the surface gradient.
    pub fn grad_ambient(&self, f: &Jet) -> [f64; 3] {
        let cf = self.grad_coeff(f);
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[k] = cf[0] * self.tangent[0][k] + cf[1] * self.tangent[1][k];
        }
        out
    }

    /// Ambient inner product at the surface point.
    pub fn inner3(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        amb_inner(self.m1, self.m2, a, b)
    }

    /// |∇A|²: squared norm of the covariant derivative of the second
    /// fundamental form, ∇_k a_ij = ∂_k a_ij - Γ̂^l_ki a_lj - Γ̂^l_kj a_il.
    pub fn grad_a_norm2(&self, geom: &PointGeom<Jet>) -> f64 {
        let mut da = [[[0.0; 2]; 2]; 2]; // da[k][i][j] = ∇_k a_ij
        let aval = [
            [geom.a[0][0].value(), geom.a[0][1].value()],
            [geom.a[1][0].value(), geom.a[1][1].value()],
        ];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut v = if k == 0 {
                        geom.a[i][j].deriv(1, 0)
                    } else {
                        geom.a[i][j].deriv(0, 1)
                    };
                    for l in 0..2 {
                        v -= self.christoffel[l][k][i] * aval[l][j]
                            + self.christoffel[l][k][j] * aval[i][l];
                    }
                    da[k][i][j] = v;
                }
            }
        }
        let g = &self.inv_metric;
        let mut acc = 0.0;
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    for p in 0..2 {
                        for q in 0..2 {
                            for r in 0..2 {
                                acc += g[k][p] * g[i][q] * g[j][r] * da[k][i][j] * da[p][q][r];
                            }
                        }
                    }
                }
            }
        }
        acc
    }
}

/// Orthonormal principal decomposition at a point: returns the two
/// (curvature, unit direction) pairs. The directions are ambient vectors;
/// by construction a + b = H and a² + b² = |A|² to rounding.
pub fn principal_decomposition(geom: &PointGeom<f64>) -> [(f64, [f64; 3]); 2] {
    let (m1, m2) = warp(&geom.pos);
    let t = geom.tangent;
    // Gram-Schmidt in the ambient metric
    let n0 = amb_inner(m1, m2, &t[0], &t[0]).sqrt();
    let e1 = [t[0][0] / n0, t[0][1] / n0, t[0][2] / n0];
    let cross = amb_inner(m1, m2, &t[1], &e1);
    let mut e2 = [
        t[1][0] - cross * e1[0],
        t[1][1] - cross * e1[1],
        t[1][2] - cross * e1[2],
    ];
    let n1 = amb_inner(m1, m2, &e2, &e2).sqrt();
    for v in e2.iter_mut() {
        *v /= n1;
    }
    // second fundamental form in the orthonormal frame: ê1 = T0/n0,
    // ê2 = (T1 - cross·ê1)/n1, so in T-coefficients
    let c1 = [1.0 / n0, 0.0];
    let c2 = [-cross / (n0 * n1), 1.0 / n1];
    let form = |u: &[f64; 2], v: &[f64; 2]| {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += geom.a[i][j] * u[i] * v[j];
            }
        }
        s
    };
    let p = form(&c1, &c1);
    let q = form(&c1, &c2);
    let s = form(&c2, &c2);
    let mid = 0.5 * (p + s);
    let half_diff = 0.5 * (p - s);
    let root = half_diff.hypot(q);
    let l1 = mid + root;
    let l2 = mid - root;
    // eigenvector of [[p,q],[q,s]] for l1 is (q, root - half_diff), up to
    // degeneracy (umbilic point: any direction works)
    let (v1, v2) = if root > 1e-14 * (1.0 + mid.abs()) {
        let raw = if q.abs() > (root - half_diff).abs() {
            [q, root - half_diff]
        } else {
            [root + half_diff, q]
        };
        let n = raw[0].hypot(raw[1]);
        let v1 = [raw[0] / n, raw[1] / n];
        (v1, [-v1[1], v1[0]])
    } else {
        ([1.0, 0.0], [0.0, 1.0])
    };
    let dir = |v: &[f64; 2]| {
        [
            v[0] * e1[0] + v[1] * e2[0],
            v[0] * e1[1] + v[1] * e2[1],
            v[0] * e1[2] + v[1] * e2[2],
        ]
    };
    [(l1, dir(&v1)), (l2, dir(&v2))]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_graph(c: f64, x: f64, y: f64) -> PointGeom<f64> {
        point_geom(&graph_patch(x, y, c, 0.0, 0.0, 0.0, 0.0, 0.0)).unwrap()
    }

    #[test]
    fn equidistant_slice_is_umbilic() {
        // u ≡ c: Θ = 1, a_ij = tanh(c)·g_ij, H = 2 tanh c, |A|² = 2 tanh²c,
        // η = cosh c.
        let c = 0.8;
        let g = constant_graph(c, 0.4, -0.3);
        assert!((g.theta - 1.0).abs() < 1e-15);
        assert!((g.h - 2.0 * c.tanh()).abs() < 1e-13);
        assert!((g.a_norm2 - 2.0 * c.tanh().powi(2)).abs() < 1e-13);
        assert!((g.eta - c.cosh()).abs() < 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.a[i][j] - c.tanh() * g.metric[i][j]).abs() < 1e-12);
            }
        }
        // sign convention: negative height gives negative mean curvature
        let gm = constant_graph(-c, 0.4, -0.3);
        assert!((gm.h + 2.0 * c.tanh()).abs() < 1e-13);
    }

    #[test]
    fn totally_geodesic_slice() {
        let g = constant_graph(0.0, 1.0, 0.5);
        assert!(g.h.abs() < 1e-15);
        assert!(g.a_norm2.abs() < 1e-15);
        assert!((g.theta - 1.0).abs() < 1e-15);
        assert!((g.eta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normal_is_unit_and_orthogonal() {
        let patch = graph_patch(0.3, -0.2, 0.15, 0.4, -0.25, 0.1, 0.05, -0.3);
        let g = point_geom(&patch).unwrap();
        let (m1, m2) = warp(&g.pos);
        assert!((amb_inner(m1, m2, &g.nu, &g.nu) - 1.0).abs() < 1e-12);
        for i in 0..2 {
            assert!(amb_inner(m1, m2, &g.nu, &g.tangent[i]).abs() < 1e-12);
        }
        // |∇u|² + Θ² = 1
        let grad2 = g.n_tan_coeff[0] * g.n_dot_t[0] + g.n_tan_coeff[1] * g.n_dot_t[1];
        assert!((grad2 + g.theta * g.theta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theta_matches_first_principles_normal() {
        // Independent construction: Θ = 1/sqrt(1 + |du|²_scaled) where the
        // scaling uses the ambient inverse metric at height u.
        let (x, y, u, ux, uy) = (0.7, 0.35, 0.2, -0.3, 0.45);
        let patch = graph_patch(x, y, u, ux, uy, 0.0, 0.0, 0.0);
        let g = point_geom(&patch).unwrap();
        let cu = u.cosh();
        let cy = y.cosh();
        let scaled = ux * ux / (cu * cu * cy * cy) + uy * uy / (cu * cu);
        assert!((g.theta - 1.0 / (1.0 + scaled).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn principal_decomposition_consistency() {
        let patch = graph_patch(0.3, -0.2, 0.15, 0.4, -0.25, 0.12, 0.07, -0.31);
        let g = point_geom(&patch).unwrap();
        let [(a, e1), (b, e2)] = principal_decomposition(&g);
        assert!((a + b - g.h).abs() < 1e-12);
        assert!((a * a + b * b - g.a_norm2).abs() < 1e-12);
        let (m1, m2) = warp(&g.pos);
        assert!((amb_inner(m1, m2, &e1, &e1) - 1.0).abs() < 1e-12);
        assert!((amb_inner(m1, m2, &e2, &e2) - 1.0).abs() < 1e-12);
        assert!(amb_inner(m1, m2, &e1, &e2).abs() < 1e-12);
        // directions are tangent
        assert!(amb_inner(m1, m2, &e1, &g.nu).abs() < 1e-12);
    }

    #[test]
    fn vertical_tangent_plane_is_rejected() {
        // A patch whose tangent plane contains ∂r: not a graph.
        let patch = PatchJet {
            pos: [0.0, 0.0, 0.0],
            d1: [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
            d2: [[[0.0; 3]; 2]; 2],
        };
        assert!(matches!(
            point_geom(&patch),
            Err(GeomError::GraphLost { .. })
        ));
    }
}
