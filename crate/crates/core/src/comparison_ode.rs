//! Closed-form comparison solutions and the ODE integrations confirming
//! them: the umbilic barrier R(t), the squeeze bounds, and the angle
//! lower-bound curve φ(t).

/// Classic four-stage Runge-Kutta for a scalar ODE y' = f(t, y), sampled
/// at every step (including t0).
pub fn rk4<F: Fn(f64, f64) -> f64>(f: F, y0: f64, t0: f64, t_max: f64, dt: f64) -> Vec<(f64, f64)> {
    assert!(dt > 0.0, "rk4 needs a positive step");
    let n = ((t_max - t0) / dt).ceil() as usize;
    let mut out = Vec::with_capacity(n + 1);
    let mut t = t0;
    let mut y = y0;
    out.push((t, y));
    for _ in 0..n {
        let h = dt.min(t_max - t);
        if h <= 0.0 {
            break;
        }
        let k1 = f(t, y);
        let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        out.push((t, y));
    }
    out
}

/// Height of the umbilic (equidistant) solution starting at a0:
/// R(t) = arcsinh(e^{-2t} sinh a0), the explicit solution of
/// dR/dt = -2 tanh R.
pub fn umbilic_exact(a0: f64, t: f64) -> f64 {
    ((-2.0 * t).exp() * a0.sinh()).asinh()
}

/// The umbilic barrier as a curve.
#[derive(Debug, Clone, Copy)]
pub struct BarrierCurve {
    pub a0: f64,
}

impl BarrierCurve {
    pub fn new(a0: f64) -> Self {
        assert!(a0 > 0.0, "barrier needs a positive initial height");
        BarrierCurve { a0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        umbilic_exact(self.a0, t)
    }
}

/// RK4 integration of the umbilic height ODE dR/dt = -2 tanh R; an
/// independent confirmation of [`umbilic_exact`].
pub fn umbilic_integrate(a0: f64, t_max: f64, dt: f64) -> Vec<(f64, f64)> {
    rk4(|_, r| -2.0 * r.tanh(), a0, 0.0, t_max, dt)
}

/// The squeeze interval at time t: (-R(t), +R(t)).
pub fn squeeze_bound(a0: f64, t: f64) -> (f64, f64) {
    let r = umbilic_exact(a0, t);
    (-r, r)
}

/// Admissibility threshold for the minimum initial angle: tanh(a0).
pub fn angle_threshold(a0: f64) -> f64 {
    a0.tanh()
}

/// Closed-form lower bound for α = Θ² along a compliant flow:
/// φ(t) = (ε + sinh²(a0)·e^{-4t}) / (1 + sinh²(a0)·e^{-4t}),
/// with φ(0) = (ε + sinh²a0)/(1 + sinh²a0) and φ(t) > ε for all t ≥ 0.
pub fn angle_lower_bound(a0: f64, eps: f64, t: f64) -> f64 {
    let s2 = a0.sinh().powi(2) * (-4.0 * t).exp();
    (eps + s2) / (1.0 + s2)
}

/// The angle bound as a curve (bound on Θ²; take the square root for Θ).
#[derive(Debug, Clone, Copy)]
pub struct AngleBoundCurve {
    pub a0: f64,
    pub eps: f64,
}

impl AngleBoundCurve {
    pub fn new(a0: f64, eps: f64) -> Self {
        assert!((0.0..1.0).contains(&eps), "eps must be in [0, 1)");
        AngleBoundCurve { a0, eps }
    }

    pub fn eval(&self, t: f64) -> f64 {
        angle_lower_bound(self.a0, self.eps, t)
    }

    /// Initial value φ(0) = (ε + sinh²a0)/(1 + sinh²a0).
    pub fn phi0(&self) -> f64 {
        let s2 = self.a0.sinh().powi(2);
        (self.eps + s2) / (1.0 + s2)
    }
}

/// The ε for which φ(0) matches a measured initial minimum of Θ²
/// (negative values mean the admissibility threshold is violated).
pub fn eps_from_initial_angle(a0: f64, theta0_min_sq: f64) -> f64 {
    let s2 = a0.sinh().powi(2);
    theta0_min_sq * (1.0 + s2) - s2
}

/// RK4 integration of the equality case of the angle inequality,
/// dφ/dt = -4(1-φ)·e^{-4t}sinh²(a0)/(1 + e^{-4t}sinh²(a0)).
/// Started from φ0 as in [`AngleBoundCurve::phi0`], it reproduces the
/// closed form.
pub fn angle_ode_integrate(a0: f64, phi0: f64, t_max: f64, dt: f64) -> Vec<(f64, f64)> {
    let s2 = a0.sinh().powi(2);
    rk4(
        move |t, phi| {
            let e = (-4.0 * t).exp() * s2;
            -4.0 * (1.0 - phi) * e / (1.0 + e)
        },
        phi0,
        0.0,
        t_max,
        dt,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn umbilic_exact_values() {
        // initial condition
        assert_eq!(umbilic_exact(1.0, 0.0), 1.0);
        // frozen oracle value: RK4 of dR/dt = -2 tanh R at dt = 1e-5
        // gives 0.41988525756204964 at t = 0.5; the closed form must match
        // to 1e-9.
        assert!((umbilic_exact(1.0, 0.5) - 0.41988525756204964).abs() < 1e-9);
        // late-time slope of log R is -2 (exponential decay rate)
        let t1 = 6.0;
        let t2 = 8.0;
        let slope = (umbilic_exact(1.0, t2).ln() - umbilic_exact(1.0, t1).ln()) / (t2 - t1);
        assert!((slope + 2.0).abs() < 1e-6);
    }

    #[test]
    fn umbilic_exact_solves_the_ode() {
        // d/dt R + 2 tanh R = 0, via centered differences of the closed form
        let h = 1e-6;
        for (a0, t) in [(1.0, 0.3), (0.5, 1.7), (2.0, 0.05)] {
            let d = (umbilic_exact(a0, t + h) - umbilic_exact(a0, t - h)) / (2.0 * h);
            let res = d + 2.0 * umbilic_exact(a0, t).tanh();
            assert!(res.abs() < 1e-10, "residual {res:.3e}");
        }
    }

    #[test]
    fn umbilic_conserves_sinh_times_exp() {
        // sinh(R(t))·e^{2t} = sinh(a0), algebraically
        for t in [0.0, 0.4, 1.3, 5.0] {
            let lhs = umbilic_exact(0.8, t).sinh() * (2.0 * t).exp();
            assert!((lhs - 0.8f64.sinh()).abs() < 1e-12);
        }
    }

    #[test]
    fn umbilic_rk4_matches_closed_form() {
        let samples = umbilic_integrate(1.0, 3.0, 1e-3);
        let mut worst: f64 = 0.0;
        for (t, r) in &samples {
            worst = worst.max((r - umbilic_exact(1.0, *t)).abs());
        }
        assert!(worst < 1e-10, "max deviation {worst:.3e}");

        // equilibrium
        for (_, r) in umbilic_integrate(0.0, 1.0, 1e-2) {
            assert_eq!(r, 0.0);
        }

        // fourth-order step-halving ratio (steps coarse enough that
        // truncation, not rounding, dominates)
        let err = |dt: f64| {
            umbilic_integrate(1.0, 1.0, dt)
                .iter()
                .map(|(t, r)| (r - umbilic_exact(1.0, *t)).abs())
                .fold(0.0f64, f64::max)
        };
        let ratio = err(0.05) / err(0.025);
        assert!((12.0..22.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn squeeze_bound_values() {
        let (lo, hi) = squeeze_bound(1.0, 0.0);
        assert_eq!((lo, hi), (-1.0, 1.0));
        for t in [0.3, 1.0, 2.0] {
            assert_eq!(squeeze_bound(1.0, t).1, umbilic_exact(1.0, t));
        }
        // t = 2, a0 = 1: arcsinh(e⁻⁴ sinh 1) ≈ 0.02152
        assert!((squeeze_bound(1.0, 2.0).1 - 0.021522898951908568).abs() < 1e-12);
    }

    #[test]
    fn angle_threshold_values() {
        assert_eq!(angle_threshold(0.0), 0.0);
        assert!((angle_threshold(1.0) - 0.7615941559557649).abs() < 1e-12);
        // threshold² = sinh²/(1+sinh²)
        let a0: f64 = 0.73;
        let s2 = a0.sinh().powi(2);
        assert!((angle_threshold(a0).powi(2) - s2 / (1.0 + s2)).abs() < 1e-14);
    }

    #[test]
    fn angle_lower_bound_values() {
        // sinh²(a0) = 1 (a0 = arcsinh 1), ε = 0, t = 0 → 1/2 = tanh²(a0)
        let a0 = 1.0f64.asinh();
        assert!((angle_lower_bound(a0, 0.0, 0.0) - 0.5).abs() < 1e-14);
        // t → ∞ limit is ε
        assert!((angle_lower_bound(1.0, 0.25, 60.0) - 0.25).abs() < 1e-12);
        // pinned value at a0 = 1, ε = 0.1, t = 1: sinh²(1)·e⁻⁴ = 0.0252952...
        let s2e = 1.0f64.sinh().powi(2) * (-4.0f64).exp();
        let expect = (0.1 + s2e) / (1.0 + s2e);
        assert!((angle_lower_bound(1.0, 0.1, 1.0) - expect).abs() < 1e-15);
        assert!((expect - 0.12220444375532416).abs() < 1e-12);
    }

    #[test]
    fn angle_ode_matches_closed_form() {
        for (a0, eps) in [(0.5, 0.0), (1.0, 0.1), (0.8, 0.3)] {
            let curve = AngleBoundCurve::new(a0, eps);
            let samples = angle_ode_integrate(a0, curve.phi0(), 5.0, 1e-3);
            let mut worst: f64 = 0.0;
            let mut prev = f64::INFINITY;
            for (t, phi) in &samples {
                worst = worst.max((phi - curve.eval(*t)).abs());
                // nonincreasing and strictly above ε
                assert!(*phi <= prev + 1e-12);
                assert!(*phi > eps);
                prev = *phi;
            }
            assert!(worst < 1e-8, "a0={a0}, eps={eps}: worst {worst:.3e}");
        }
    }

    #[test]
    fn angle_ode_fixed_point_and_comparison() {
        // φ0 = 1 is a fixed point of the equality ODE
        for (_, phi) in angle_ode_integrate(0.9, 1.0, 2.0, 1e-2) {
            assert!((phi - 1.0).abs() < 1e-13);
        }
        // solutions from larger φ0 dominate pointwise
        let lo = angle_ode_integrate(0.9, 0.3, 3.0, 1e-3);
        let mid = angle_ode_integrate(0.9, 0.5, 3.0, 1e-3);
        let hi = angle_ode_integrate(0.9, 0.8, 3.0, 1e-3);
        for ((l, m), h) in lo.iter().zip(mid.iter()).zip(hi.iter()) {
            assert!(l.1 <= m.1 + 1e-12 && m.1 <= h.1 + 1e-12);
        }
    }
}
