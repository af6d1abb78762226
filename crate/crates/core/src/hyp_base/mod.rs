//! Hyperbolic base-surface machinery: Poincaré-disk arithmetic, the
//! genus-two octagon group, and the Fermi coordinate chart carrying the
//! flow grid.

mod octagon;

pub use octagon::{octagon_generators, reduce_to_fundamental_domain, FuchsianGroupOctagon};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HypError {
    #[error("point ({x}, {y}) is not inside the open unit disk")]
    NotInDisk { x: f64, y: f64 },
    #[error("matrix does not satisfy the disk-preserving determinant condition: defect {0:.3e}")]
    BadDeterminant(f64),
    #[error("fundamental-domain reduction did not terminate in {max_steps} steps (|z| = {abs})")]
    ReductionDiverged { max_steps: usize, abs: f64 },
    #[error("point (x={x}, y={y}) is outside the chart (half-width {half_width})")]
    OutOfChart { x: f64, y: f64, half_width: f64 },
    #[error("invalid chart parameters: {0}")]
    BadChart(&'static str),
}

/// A point of the open unit disk (Poincaré model of the hyperbolic plane).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    x: f64,
    y: f64,
}

impl DiskPoint {
    pub fn new(x: f64, y: f64) -> Result<Self, HypError> {
        if x * x + y * y < 1.0 && x.is_finite() && y.is_finite() {
            Ok(DiskPoint { x, y })
        } else {
            Err(HypError::NotInDisk { x, y })
        }
    }

    pub fn origin() -> Self {
        DiskPoint { x: 0.0, y: 0.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    fn from_complex(z: Complex64) -> Self {
        DiskPoint { x: z.re, y: z.im }
    }
}

/// Hyperbolic distance between two disk points:
/// d(z, w) = 2 artanh |z - w| / |1 - conj(z) w|.
pub fn hyperbolic_distance(z1: &DiskPoint, z2: &DiskPoint) -> f64 {
    let a = z1.to_complex();
    let b = z2.to_complex();
    let t = ((a - b) / (1.0 - a.conj() * b)).norm();
    2.0 * t.atanh()
}

/// A disk-preserving Möbius transformation z ↦ (αz + β)/(β̄z + ᾱ)
/// with |α|² - |β|² = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub alpha: Complex64,
    pub beta: Complex64,
}

const DET_TOL: f64 = 1e-12;

impl MobiusMap {
    /// Construct from coefficients, enforcing the determinant condition.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self, HypError> {
        let m = MobiusMap { alpha, beta };
        let defect = m.det_defect();
        if defect > DET_TOL {
            return Err(HypError::BadDeterminant(defect));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        MobiusMap {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    /// |det - 1| where det = |α|² - |β|².
    pub fn det_defect(&self) -> f64 {
        (self.alpha.norm_sqr() - self.beta.norm_sqr() - 1.0).abs()
    }

    /// Rescale so the determinant is exactly one (drift control after
    /// long compositions).
    pub fn normalized(&self) -> Self {
        let det = self.alpha.norm_sqr() - self.beta.norm_sqr();
        let s = 1.0 / det.sqrt();
        MobiusMap {
            alpha: self.alpha * s,
            beta: self.beta * s,
        }
    }

    /// The hyperbolic translation taking 0 to p.
    pub fn translation_to(p: Complex64) -> Self {
        let s = (1.0 - p.norm_sqr()).sqrt().recip();
        MobiusMap {
            alpha: Complex64::new(s, 0.0),
            beta: p * s,
        }
    }

    /// Rotation about the disk center by angle theta.
    pub fn rotation(theta: f64) -> Self {
        MobiusMap {
            alpha: Complex64::from_polar(1.0, 0.5 * theta),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    /// The unique orientation-preserving isometry with p1 ↦ q1, p2 ↦ q2
    /// (requires d(p1,p2) = d(q1,q2)).
    pub fn map_two_points(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> Self {
        let tp = MobiusMap::translation_to(p1);
        let tq = MobiusMap::translation_to(q1);
        let w1 = tp.inverse().apply_complex(p2);
        let w2 = tq.inverse().apply_complex(q2);
        let rot = MobiusMap::rotation(w2.arg() - w1.arg());
        tq.compose(&rot).compose(&tp.inverse())
    }

    pub fn inverse(&self) -> Self {
        MobiusMap {
            alpha: self.alpha.conj(),
            beta: -self.beta,
        }
    }

    /// self ∘ other (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        MobiusMap {
            alpha: self.alpha * other.alpha + self.beta * other.beta.conj(),
            beta: self.alpha * other.beta + self.beta * other.alpha.conj(),
        }
        .normalized()
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        (self.alpha * z + self.beta) / (self.beta.conj() * z + self.alpha.conj())
    }

    pub fn apply(&self, z: &DiskPoint) -> DiskPoint {
        DiskPoint::from_complex(self.apply_complex(z.to_complex()))
    }

    /// Validating entry point for raw coordinates.
    pub fn apply_xy(&self, x: f64, y: f64) -> Result<DiskPoint, HypError> {
        Ok(self.apply(&DiskPoint::new(x, y)?))
    }

    /// Trace of the matrix representative (real for this normal form).
    pub fn trace(&self) -> f64 {
        2.0 * self.alpha.re
    }

    /// Translation length 2·arccosh(|tr|/2); zero for non-hyperbolic maps.
    pub fn translation_length(&self) -> f64 {
        let half = self.trace().abs() / 2.0;
        if half > 1.0 {
            2.0 * half.acosh()
        } else {
            0.0
        }
    }

    /// Coefficient-wise deviation from ±identity (the maps act projectively).
    pub fn deviation_from_identity(&self) -> f64 {
        let m = self.normalized();
        let one = Complex64::new(1.0, 0.0);
        let plus = (m.alpha - one).norm().max(m.beta.norm());
        let minus = (m.alpha + one).norm().max(m.beta.norm());
        plus.min(minus)
    }
}

/// A rectangular Fermi chart about a closed geodesic of the base surface:
/// x ∈ [0, L) periodic, y ∈ [-Y, Y], with base metric dy² + cosh²(y)dx²
/// (constant curvature -1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiChart {
    pub period: f64,
    pub half_width: f64,
    pub nx: usize,
    pub ny: usize,
}

impl FermiChart {
    pub fn new(period: f64, half_width: f64, nx: usize, ny: usize) -> Result<Self, HypError> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(HypError::BadChart("period must be positive"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(HypError::BadChart("half-width must be positive"));
        }
        if nx < 4 {
            return Err(HypError::BadChart("nx must be at least 4"));
        }
        if ny < 3 {
            return Err(HypError::BadChart("ny must be at least 3"));
        }
        Ok(FermiChart {
            period,
            half_width,
            nx,
            ny,
        })
    }

    pub fn dx(&self) -> f64 {
        self.period / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.half_width / (self.ny - 1) as f64
    }

    pub fn x_at(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn y_at(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dy()
    }

    pub fn contains(&self, y: f64) -> bool {
        y.abs() <= self.half_width * (1.0 + 1e-12)
    }

    /// Base metric at a chart point, components in (x, y) ordering:
    /// diag(cosh²(y), 1). x is wrapped by periodicity; |y| > Y is rejected.
    pub fn metric(&self, _x: f64, y: f64) -> Result<[[f64; 2]; 2], HypError> {
        if !self.contains(y) {
            return Err(HypError::OutOfChart {
                x: _x,
                y,
                half_width: self.half_width,
            });
        }
        let c = y.cosh();
        Ok([[c * c, 0.0], [0.0, 1.0]])
    }
}
