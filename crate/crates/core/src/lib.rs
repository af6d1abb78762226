//! Numerical laboratory for graphical mean curvature flow in hyperbolic
//! warped-product 3-manifolds (ℝ ×_cosh(r) Σ over a closed hyperbolic
//! surface Σ).
//!
//! The crate provides:
//! - the ambient warped-product geometry with dual-route (closed form vs
//!   finite difference) curvature checks ([`ambient`], [`curvature`]),
//! - Poincaré-disk and genus-two octagon group machinery plus the Fermi
//!   chart the solver runs on ([`hyp_base`]),
//! - pointwise surface geometry of geodesic graphs r = u(x, y), in exact
//!   (jet-based) and finite-difference form ([`graph_geometry`]),
//! - residual checks for the static and dynamic curvature identities of
//!   such graphs, with grid-refinement order estimation ([`identity_lab`]),
//! - closed-form umbilic barriers and angle bounds with independent
//!   Runge-Kutta confirmation ([`comparison_ode`]),
//! - an explicit finite-difference solver for the graph flow
//!   u_t = -H/Θ with per-step soundness monitors and a near-singularity
//!   probe ([`flow_engine`]).

pub mod ambient;
pub mod comparison_ode;
pub mod curvature;
pub mod flow_engine;
pub mod geometry;
pub mod graph_geometry;
pub mod hyp_base;
pub mod identity_lab;
pub mod jet;
pub mod scalar;
