//! Finite-dimensional "shadow" dynamics of concentrating bubbles in conformal
//! prescribed-scalar-curvature gradient flows.
//!
//! The crate models a configuration of `p` bubbles by their amplitudes,
//! concentration scales and centers `(alpha_i, lambda_i, a_i)` in a single
//! normal chart around the maximum of the curvature function `K`, and provides
//!
//! * an analytic curvature model with exact jet (`field`),
//! * the pairwise interaction coefficient and its derivatives (`kernel`),
//! * bubble constants by quadrature and the assembled flow coefficients
//!   (`coeffs`),
//! * right-hand sides of the reduced flows, with and without the
//!   compactifying drift (`dynamics`, `modification`),
//! * Lyapunov-style monitoring functionals (`diagnostics`),
//! * an adaptive embedded Runge-Kutta integrator in `(ln alpha, ln lambda, a)`
//!   coordinates with event detection and an explicit error-injection channel
//!   (`integrator`), and
//! * randomized inequality batteries over bubble configurations (`batteries`).
//!
//! The crate is `no_std` (with `alloc`); everything that touches the file
//! system, clocks or a CLI lives in the companion `shadowflow` crate.

#![no_std]

extern crate alloc;

pub mod batteries;
pub mod chart;
pub mod coeffs;
pub mod diagnostics;
pub mod dynamics;
pub mod field;
pub mod integrator;
pub mod kernel;
pub mod modification;
pub mod quad;
pub mod rng;

pub use chart::{Point, DIM_MAX};
pub use coeffs::{bubble_constant, make_coefficients, CoefficientSet, ConstantKind};
pub use dynamics::{rhs_positive_weak_limit, rhs_zero_weak_limit, AlphaMode, StateDerivative};
pub use field::CurvatureField;
pub use integrator::{integrate, IntegrateOpts, PerturbationModel, Trajectory};
pub use kernel::{Bubble, BubbleState, GreenKernelModel, WeakLimit};
pub use modification::ModificationConfig;
