//! The ambient hyperbolic 3-manifold: a warped product ℝ ×_cosh(r) Σ with
//! metric dr² + cosh²(r)·g₀ over a hyperbolic base surface, in coordinates
//! (r, x, y) where (x, y) is the Fermi chart of the base (g₀ = dy² + cosh²(y)dx²).
//!
//! Index convention throughout: 0 = r, 1 = x, 2 = y.

use crate::scalar::Scalar;
use thiserror::Error;

pub type Vec3<T> = [T; 3];
pub type Mat3<T> = [[T; 3]; 3];
/// Christoffel symbols, `gamma[k][i][j]` = Γ^k_ij.
pub type Gamma3<T> = [[[T; 3]; 3]; 3];

/// A point of the ambient manifold: signed distance r to the totally
/// geodesic slice, plus base chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientPoint {
    pub r: f64,
    pub x: f64,
    pub y: f64,
}

impl AmbientPoint {
    pub fn new(r: f64, x: f64, y: f64) -> Self {
        AmbientPoint { r, x, y }
    }
}

#[derive(Debug, Error)]
pub enum AmbientError {
    #[error("dual-route evaluation of {what} disagrees: residual {residual:.3e} > {tol:.3e}")]
    Inconsistent {
        what: &'static str,
        residual: f64,
        tol: f64,
    },
    #[error("vector is not unit: |<v,v>| - 1 = {defect:.3e}")]
    NotUnit { defect: f64 },
}

/// Metric components diag(1, cosh²r·cosh²y, cosh²r), generic over scalar type.
pub fn metric_components<T: Scalar>(r: T, y: T) -> Mat3<T> {
    let zero = T::from_f64(0.0);
    let cr = r.cosh();
    let cy = y.cosh();
    let cr2 = cr * cr;
    [
        [T::from_f64(1.0), zero, zero],
        [zero, cr2 * cy * cy, zero],
        [zero, zero, cr2],
    ]
}

/// Closed-form Christoffel symbols of the ambient metric.
///
/// Nonzero entries (with 0 = r, 1 = x, 2 = y):
/// Γ^r_xx = -sinh(r)cosh(r)cosh²(y), Γ^r_yy = -sinh(r)cosh(r),
/// Γ^x_rx = Γ^y_ry = tanh(r), Γ^x_xy = tanh(y), Γ^y_xx = -sinh(y)cosh(y).
pub fn christoffel<T: Scalar>(r: T, y: T) -> Gamma3<T> {
    let zero = T::from_f64(0.0);
    let mut g = [[[zero; 3]; 3]; 3];
    let tr = r.tanh();
    let ty = y.tanh();
    let src = r.sinh() * r.cosh();
    let scy = y.sinh() * y.cosh();
    let cy = y.cosh();
    g[0][1][1] = -src * cy * cy;
    g[0][2][2] = -src;
    g[1][0][1] = tr;
    g[1][1][0] = tr;
    g[1][1][2] = ty;
    g[1][2][1] = ty;
    g[2][0][2] = tr;
    g[2][2][0] = tr;
    g[2][1][1] = -scy;
    g
}

/// Ambient metric evaluated at a point.
pub fn ambient_metric(p: &AmbientPoint) -> Mat3<f64> {
    metric_components(p.r, p.y)
}

/// Inner product of tangent vectors with respect to a metric matrix.
pub fn inner<T: Scalar>(g: &Mat3<T>, a: &Vec3<T>, b: &Vec3<T>) -> T {
    let mut acc = T::from_f64(0.0);
    for i in 0..3 {
        for j in 0..3 {
            acc = acc + g[i][j] * a[i] * b[j];
        }
    }
    acc
}

pub fn norm(g: &Mat3<f64>, a: &Vec3<f64>) -> f64 {
    inner(g, a, a).max(0.0).sqrt()
}

/// The fiber direction n = ∂r (unit, perpendicular to every slice).
pub const N_FIELD: Vec3<f64> = [1.0, 0.0, 0.0];

/// The special field V = cosh(r)·n, whose covariant derivative is
/// ∇̄_X V = sinh(r)·X for every X.
pub fn field_v(p: &AmbientPoint) -> Vec3<f64> {
    [p.r.cosh(), 0.0, 0.0]
}

/// Covariant derivative ∇̄_X n from the Christoffel symbols:
/// (∇̄_X n)^k = X^i Γ^k_{i r}.
pub fn nabla_n_christoffel(p: &AmbientPoint, x: &Vec3<f64>) -> Vec3<f64> {
    let gamma = christoffel(p.r, p.y);
    let mut out = [0.0; 3];
    for k in 0..3 {
        for i in 0..3 {
            out[k] += x[i] * gamma[k][i][0];
        }
    }
    out
}

/// Covariant derivative ∇̄_X n via the closed form tanh(r)(X - <X,n>n).
pub fn nabla_n_closed(p: &AmbientPoint, x: &Vec3<f64>) -> Vec3<f64> {
    let g = ambient_metric(p);
    let xn = inner(&g, x, &N_FIELD);
    let t = p.r.tanh();
    [t * (x[0] - xn), t * x[1], t * x[2]]
}

const NABLA_N_TOL: f64 = 1e-8;

/// ∇̄_X n evaluated both ways; errors if the routes disagree beyond 1e-8.
pub fn nabla_n(p: &AmbientPoint, x: &Vec3<f64>) -> Result<Vec3<f64>, AmbientError> {
    let a = nabla_n_christoffel(p, x);
    let b = nabla_n_closed(p, x);
    let g = ambient_metric(p);
    let diff = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let residual = norm(&g, &diff);
    if residual > NABLA_N_TOL * (1.0 + norm(&g, x)) {
        return Err(AmbientError::Inconsistent {
            what: "nabla_n",
            residual,
            tol: NABLA_N_TOL,
        });
    }
    Ok(b)
}

/// Principal and mean curvature of the equidistant slice at height r,
/// with respect to the upward normal n: (tanh r, 2 tanh r).
pub fn levelset_shape(r: f64) -> (f64, f64) {
    let k = r.tanh();
    (k, 2.0 * k)
}

/// L_n g from the Christoffel route: (L_n g)_ij = <∇̄_i n, ∂j> + <∂i, ∇̄_j n>.
pub fn lie_derivative_ng_christoffel(p: &AmbientPoint) -> Mat3<f64> {
    let g = ambient_metric(p);
    let gamma = christoffel(p.r, p.y);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                s += g[k][j] * gamma[k][i][0] + g[i][k] * gamma[k][j][0];
            }
            out[i][j] = s;
        }
    }
    out
}

/// Closed form L_n g = 2 tanh(r)·(g - dr⊗dr).
pub fn lie_derivative_ng_closed(p: &AmbientPoint) -> Mat3<f64> {
    let g = ambient_metric(p);
    let t = 2.0 * p.r.tanh();
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let dr = if i == 0 && j == 0 { 1.0 } else { 0.0 };
            out[i][j] = t * (g[i][j] - dr);
        }
    }
    out
}

const LIE_TOL: f64 = 1e-8;

/// The deformation tensor L_n g, cross-checked between the Christoffel
/// route and the closed form.
pub fn lie_derivative_ng(p: &AmbientPoint) -> Result<Mat3<f64>, AmbientError> {
    let a = lie_derivative_ng_christoffel(p);
    let b = lie_derivative_ng_closed(p);
    let mut residual: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            residual = residual.max((a[i][j] - b[i][j]).abs());
        }
    }
    if residual > LIE_TOL {
        return Err(AmbientError::Inconsistent {
            what: "lie_derivative_ng",
            residual,
            tol: LIE_TOL,
        });
    }
    Ok(b)
}

/// Evaluate a (0,2)-tensor on two vectors.
pub fn tensor_eval(t: &Mat3<f64>, a: &Vec3<f64>, b: &Vec3<f64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += t[i][j] * a[i] * b[j];
        }
    }
    acc
}

/// Covariant derivative of L_n g, in closed form: for Z, X, Y,
/// (∇̄_Z L_n g)(X,Y) = 2 sech²(r) <Z,n>(<X,Y> - <X,n><Y,n>)
///   - 2 tanh²(r)[(<Z,X> - <Z,n><X,n>)<Y,n> + <X,n>(<Z,Y> - <Z,n><Y,n>)].
pub fn nabla_lie_ng(p: &AmbientPoint, z: &Vec3<f64>, x: &Vec3<f64>, y: &Vec3<f64>) -> f64 {
    let g = ambient_metric(p);
    let n = N_FIELD;
    let zn = inner(&g, z, &n);
    let xn = inner(&g, x, &n);
    let yn = inner(&g, y, &n);
    let t = p.r.tanh();
    let sech2 = 1.0 - t * t;
    2.0 * sech2 * zn * (inner(&g, x, y) - xn * yn)
        - 2.0
            * t
            * t
            * ((inner(&g, z, x) - zn * xn) * yn + xn * (inner(&g, z, y) - zn * yn))
}

const UNIT_TOL: f64 = 1e-8;

/// Ricci curvature in a unit normal direction. Constant-curvature shortcut:
/// always -2 for a hyperbolic 3-manifold; rejects non-unit input.
pub fn ricci_nu_nu(p: &AmbientPoint, nu: &Vec3<f64>) -> Result<f64, AmbientError> {
    let g = ambient_metric(p);
    let defect = (inner(&g, nu, nu) - 1.0).abs();
    if defect > UNIT_TOL {
        return Err(AmbientError::NotUnit { defect });
    }
    Ok(-2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_slices() {
        // r = 0 slice carries the base metric
        let g = ambient_metric(&AmbientPoint::new(0.0, 0.3, 0.7));
        assert!((g[0][0] - 1.0).abs() < 1e-15);
        assert!((g[1][1] - 0.7f64.cosh().powi(2)).abs() < 1e-12);
        assert!((g[2][2] - 1.0).abs() < 1e-15);

        // r = 1, y = 0: diag(1, cosh²1, cosh²1) ≈ diag(1, 2.3811, 2.3811)
        let g = ambient_metric(&AmbientPoint::new(1.0, 0.0, 0.0));
        assert!((g[1][1] - 2.381097845541817).abs() < 1e-12);
        assert!((g[2][2] - 2.381097845541817).abs() < 1e-12);
    }

    #[test]
    fn v_field_and_its_derivative() {
        // V = cosh(r) n, and ∇̄_X V = sinh(r) X from the Christoffels:
        // (∇̄_X V)^k = X(cosh r) n^k + cosh(r) (∇̄_X n)^k.
        let p = AmbientPoint::new(0.7, 0.1, 0.3);
        let v = field_v(&p);
        assert!((v[0] - 0.7f64.cosh()).abs() < 1e-15);

        let g = ambient_metric(&p);
        for x in [[0.0, 1.0, 0.0], [0.3, -0.2, 0.9], [1.0, 0.0, 0.0]] {
            let dn = nabla_n_christoffel(&p, &x);
            // X(cosh r) = sinh(r) <X, n> since r is the first coordinate
            let dr = x[0] * p.r.sinh();
            let dv = [dr + p.r.cosh() * dn[0], p.r.cosh() * dn[1], p.r.cosh() * dn[2]];
            let want = [p.r.sinh() * x[0], p.r.sinh() * x[1], p.r.sinh() * x[2]];
            let diff = [dv[0] - want[0], dv[1] - want[1], dv[2] - want[2]];
            assert!(norm(&g, &diff) <= 1e-6, "killing property failed for {x:?}");
        }
    }

    #[test]
    fn nabla_n_examples() {
        // X = n gives zero
        let p = AmbientPoint::new(0.4, 0.2, -0.3);
        let out = nabla_n(&p, &N_FIELD).unwrap();
        assert!(norm(&ambient_metric(&p), &out) < 1e-14);

        // r = 0: totally geodesic slice, any tangent X gives zero
        let p0 = AmbientPoint::new(0.0, 0.2, -0.3);
        let out = nabla_n(&p0, &[0.0, 1.0, 2.0]).unwrap();
        assert!(norm(&ambient_metric(&p0), &out) < 1e-14);

        // r = 1, X = ∂x: tanh(1)·∂x
        let p1 = AmbientPoint::new(1.0, 0.0, 0.0);
        let out = nabla_n(&p1, &[0.0, 1.0, 0.0]).unwrap();
        assert!((out[1] - 1.0f64.tanh()).abs() < 1e-14);
        assert!(out[0].abs() < 1e-14 && out[2].abs() < 1e-14);
    }

    #[test]
    fn levelset_shape_values() {
        assert_eq!(levelset_shape(0.0), (0.0, 0.0));
        let (k, h) = levelset_shape(1.0);
        assert!((k - 0.7615941559557649).abs() < 1e-15);
        assert!((h - 2.0 * 0.7615941559557649).abs() < 1e-15);
        // odd in r
        let (km, hm) = levelset_shape(-1.0);
        assert!((km + k).abs() < 1e-15 && (hm + h).abs() < 1e-15);
    }

    #[test]
    fn lie_derivative_examples() {
        // r = 0: zero tensor
        let l = lie_derivative_ng(&AmbientPoint::new(0.0, 0.5, 0.2)).unwrap();
        for row in &l {
            for v in row {
                assert!(v.abs() < 1e-15);
            }
        }

        // (L_n g)(n, n) = 0 at every point
        let p = AmbientPoint::new(0.9, -0.4, 0.6);
        let l = lie_derivative_ng(&p).unwrap();
        assert!(tensor_eval(&l, &N_FIELD, &N_FIELD).abs() < 1e-15);

        // r = 0.5, X = Y = ∂x at y = 0: 2 tanh(0.5) cosh²(0.5) = sinh(1)
        let l = lie_derivative_ng(&AmbientPoint::new(0.5, 0.0, 0.0)).unwrap();
        let ex = [0.0, 1.0, 0.0];
        assert!((tensor_eval(&l, &ex, &ex) - 1.0f64.sinh()).abs() < 1e-12);
    }

    #[test]
    fn ricci_requires_unit_vector() {
        let p = AmbientPoint::new(0.4, 0.2, -0.3);
        assert!((ricci_nu_nu(&p, &N_FIELD).unwrap() + 2.0).abs() < 1e-15);

        // unit vector along ∂x needs the metric factor
        let s = 1.0 / (p.r.cosh() * p.y.cosh());
        assert!((ricci_nu_nu(&p, &[0.0, s, 0.0]).unwrap() + 2.0).abs() < 1e-15);

        assert!(ricci_nu_nu(&p, &[0.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn nabla_lie_ng_umbilic_slice_assembly() {
        // On the slice r = c with frame {e1, e2} tangent and ν = n, the
        // n-variation of H assembled from ∇̄L terms must equal 2/cosh²(c).
        let c = 0.8;
        let p = AmbientPoint::new(c, 0.1, -0.2);
        let g = ambient_metric(&p);
        let e1 = [0.0, 1.0 / (c.cosh() * p.y.cosh()), 0.0];
        let e2 = [0.0, 0.0, 1.0 / c.cosh()];
        let nu = N_FIELD;
        let l = lie_derivative_ng_closed(&p);
        let mut value = 0.0;
        for e in [e1, e2] {
            value += 0.5 * nabla_lie_ng(&p, &nu, &e, &e);
            value -= nabla_lie_ng(&p, &e, &nu, &e);
        }
        // a_ij = tanh(c) δ_ij in this frame
        for e in [e1, e2] {
            value -= c.tanh() * tensor_eval(&l, &e, &e);
        }
        // H <ν, ∇̄_ν n> vanishes since ∇̄_n n = 0
        let dn = nabla_n_christoffel(&p, &nu);
        value += 2.0 * c.tanh() * inner(&g, &nu, &dn);
        assert!(
            (value - 2.0 / (c.cosh() * c.cosh())).abs() < 1e-12,
            "got {value}, want {}",
            2.0 / (c.cosh() * c.cosh())
        );
    }
}
