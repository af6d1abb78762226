//! Finite-difference curvature oracles.
//!
//! These are deliberately independent of the closed-form machinery in
//! [`crate::ambient`]: they take a metric (or Christoffel field) as a black
//! box and differentiate it numerically, so tests can cross-check the
//! hand-coded formulas. Centered differences with step h give O(h²)
//! truncation; with h = 1e-4 that leaves ample margin for the 1e-5 / 1e-6
//! tolerances used by the callers.

/// Christoffel symbols Γ^k_ij of an N-dimensional metric by centered
/// differences of the metric components.
pub fn christoffel_fd<const N: usize>(
    metric: &dyn Fn([f64; N]) -> [[f64; N]; N],
    p: [f64; N],
    h: f64,
) -> Vec<Vec<Vec<f64>>> {
    // dg[l][i][j] = ∂_l g_ij
    let mut dg = vec![vec![vec![0.0; N]; N]; N];
    for l in 0..N {
        let mut pp = p;
        let mut pm = p;
        pp[l] += h;
        pm[l] -= h;
        let gp = metric(pp);
        let gm = metric(pm);
        for i in 0..N {
            for j in 0..N {
                dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
            }
        }
    }
    let ginv = invert(&metric(p));
    let mut gamma = vec![vec![vec![0.0; N]; N]; N];
    for k in 0..N {
        for i in 0..N {
            for j in 0..N {
                let mut s = 0.0;
                for l in 0..N {
                    s += 0.5 * ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                gamma[k][i][j] = s;
            }
        }
    }
    gamma
}

/// Riemann tensor R^l_kij (so that R(∂i,∂j)∂k = R^l_kij ∂l) from a
/// Christoffel field, differentiating the field by centered differences.
///
/// R^l_kij = ∂i Γ^l_jk - ∂j Γ^l_ik + Γ^l_im Γ^m_jk - Γ^l_jm Γ^m_ik.
pub fn riemann_fd<const N: usize>(
    gamma: &dyn Fn([f64; N]) -> Vec<Vec<Vec<f64>>>,
    p: [f64; N],
    h: f64,
) -> Vec<Vec<Vec<Vec<f64>>>> {
    let g0 = gamma(p);
    // dgamma[a][k][i][j] = ∂_a Γ^k_ij
    let mut dgamma = vec![vec![vec![vec![0.0; N]; N]; N]; N];
    for a in 0..N {
        let mut pp = p;
        let mut pm = p;
        pp[a] += h;
        pm[a] -= h;
        let gp = gamma(pp);
        let gm = gamma(pm);
        for k in 0..N {
            for i in 0..N {
                for j in 0..N {
                    dgamma[a][k][i][j] = (gp[k][i][j] - gm[k][i][j]) / (2.0 * h);
                }
            }
        }
    }
    let mut riem = vec![vec![vec![vec![0.0; N]; N]; N]; N];
    for l in 0..N {
        for k in 0..N {
            for i in 0..N {
                for j in 0..N {
                    let mut v = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for m in 0..N {
                        v += g0[l][i][m] * g0[m][j][k] - g0[l][j][m] * g0[m][i][k];
                    }
                    riem[l][k][i][j] = v;
                }
            }
        }
    }
    riem
}

/// Sectional curvature of the plane spanned by X and Y:
/// K = <R(X,Y)Y, X> / (|X|²|Y|² - <X,Y>²).
pub fn sectional<const N: usize>(
    g: &[[f64; N]; N],
    riem: &[Vec<Vec<Vec<f64>>>],
    x: &[f64; N],
    y: &[f64; N],
) -> f64 {
    // Z^l = R^l_kij X^i Y^j Y^k
    let mut z = [0.0; N];
    for l in 0..N {
        for k in 0..N {
            for i in 0..N {
                for j in 0..N {
                    z[l] += riem[l][k][i][j] * x[i] * y[j] * y[k];
                }
            }
        }
    }
    let num = dot(g, &z, x);
    let denom = dot(g, x, x) * dot(g, y, y) - dot(g, x, y).powi(2);
    num / denom
}

/// Ricci tensor Ric_jk = R^a_kaj.
pub fn ricci_fd<const N: usize>(riem: &[Vec<Vec<Vec<f64>>>]) -> [[f64; N]; N] {
    let mut ric = [[0.0; N]; N];
    for j in 0..N {
        for k in 0..N {
            let mut s = 0.0;
            for a in 0..N {
                s += riem[a][k][a][j];
            }
            ric[j][k] = s;
        }
    }
    ric
}

/// Gauss curvature of a 2D metric at a point, by finite differences all the
/// way down (metric → Christoffels → Riemann).
pub fn gauss_curvature_fd(metric: &dyn Fn([f64; 2]) -> [[f64; 2]; 2], p: [f64; 2], h: f64) -> f64 {
    let gamma = |q: [f64; 2]| christoffel_fd(metric, q, h);
    let riem = riemann_fd(&gamma, p, h);
    let g = metric(p);
    sectional(&g, &riem, &[1.0, 0.0], &[0.0, 1.0])
}

fn dot<const N: usize>(g: &[[f64; N]; N], a: &[f64; N], b: &[f64; N]) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            s += g[i][j] * a[i] * b[j];
        }
    }
    s
}

fn invert<const N: usize>(m: &[[f64; N]; N]) -> [[f64; N]; N] {
    // Gauss-Jordan; the metrics here are tiny and well conditioned.
    let mut a = *m;
    let mut inv = [[0.0; N]; N];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..N {
        let mut piv = col;
        for r in col + 1..N {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..N {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..N {
            if r != col {
                let f = a[r][col];
                for j in 0..N {
                    a[r][j] -= f * a[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
    }
    inv
}
