//! Bubble constants by quadrature and the assembled flow coefficient set.
//!
//! The radial integrals
//!
//! ```text
//! c1 = int_{R^n} (1+r^2)^{-n}
//! c2 = (n-2)^2/4 int_{R^n} |r^2-1|^2 (1+r^2)^{-(n+2)}
//! c3 = (n-2)^2/n int_{R^n} r^2 (1+r^2)^{-(n+2)}
//! b1 = int_{R^n} (1+r^2)^{-(n+2)/2}
//! ```
//!
//! are evaluated by adaptive quadrature after reduction over spheres. The
//! dynamical coefficients enter the flow only as ratios; they default to one
//! with the single hard constraint `gamma3 = 3 gamma2`, which drives both the
//! tower-exclusion cancellation `4*7 g2 - 5*4 g3 = -32 g2` and the scale
//! invariance `-4^2 7^2 g2 + 4*8*7 g3 = -112 g2 < 0` of the divergence
//! scenario.

use crate::quad;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CoeffError {
    #[error("unsupported dimension {0}, expected 3, 4 or 5")]
    BadDimension(usize),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("gamma3 is slaved to 3*gamma2; override gamma2 instead (or both, consistently)")]
    Gamma3Constraint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstantKind {
    C1,
    C2,
    C3,
    B1,
}

impl ConstantKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstantKind::C1 => "c1",
            ConstantKind::C2 => "c2",
            ConstantKind::C3 => "c3",
            ConstantKind::B1 => "b1",
        }
    }
}

/// Surface measure of the unit sphere `S^{n-1}` for `n = 3, 4, 5`.
pub fn sphere_area(n: usize) -> Result<f64, CoeffError> {
    use core::f64::consts::PI;
    match n {
        3 => Ok(4.0 * PI),
        4 => Ok(2.0 * PI * PI),
        5 => Ok(8.0 * PI * PI / 3.0),
        _ => Err(CoeffError::BadDimension(n)),
    }
}

fn radial_integrand(kind: ConstantKind, n: f64, r: f64) -> f64 {
    let w = 1.0 + r * r;
    match kind {
        ConstantKind::C1 => w.powf(-n),
        ConstantKind::C2 => {
            let d = r * r - 1.0;
            (n - 2.0) * (n - 2.0) / 4.0 * d * d * w.powf(-(n + 2.0))
        }
        ConstantKind::C3 => (n - 2.0) * (n - 2.0) / n * r * r * w.powf(-(n + 2.0)),
        ConstantKind::B1 => w.powf(-(n + 2.0) / 2.0),
    }
}

/// Quadrature value together with its accumulated error estimate.
pub fn bubble_constant_with_error(
    kind: ConstantKind,
    n: usize,
    tol: f64,
) -> Result<(f64, f64), CoeffError> {
    let area = sphere_area(n)?;
    let nf = n as f64;
    let q = quad::integrate_radial(
        move |r| r.powi(n as i32 - 1) * radial_integrand(kind, nf, r),
        tol,
        52,
    );
    Ok((area * q.value, area * q.err))
}

/// Bubble constant to absolute accuracy better than `1e-9`.
pub fn bubble_constant(kind: ConstantKind, n: usize) -> Result<f64, CoeffError> {
    bubble_constant_with_error(kind, n, 1e-12).map(|(v, _)| v)
}

/// The assembled shadow-flow coefficients.
///
/// `gamma1` weighs the mass term `H_i / lambda_i^{n-2}`, `gamma2` the
/// Laplacian term, `gamma3` the gradient term of the center equation,
/// `gamma_nabla_lap` the third-derivative term, `gamma4` the compactifying
/// drift, and `b_lambda`, `b_a` the interaction sums. `kappa` is the energy
/// factor treated as a constant along trajectories.
#[derive(Clone, Copy, Debug)]
pub struct CoefficientSet {
    pub n: usize,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub b1: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub gamma_nabla_lap: f64,
    pub b_lambda: f64,
    pub b_a: f64,
    pub kappa: f64,
}

/// Optional positive overrides applied on top of the defaults.
#[derive(Clone, Copy, Debug, Default)]
pub struct CoefficientOverrides {
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub gamma3: Option<f64>,
    pub gamma4: Option<f64>,
    pub gamma_nabla_lap: Option<f64>,
    pub b_lambda: Option<f64>,
    pub b_a: Option<f64>,
    pub kappa: Option<f64>,
}

fn check_positive(name: &'static str, v: Option<f64>) -> Result<(), CoeffError> {
    if let Some(value) = v {
        if !(value > 0.0) || !value.is_finite() {
            return Err(CoeffError::NonPositive { name, value });
        }
    }
    Ok(())
}

/// Builds the coefficient set: defaults of one, `kappa = 4n(n-1) c1^{2/n}`,
/// then overrides, then re-enforcement of `gamma3 = 3 gamma2`. Overriding
/// `gamma3` alone (or inconsistently with `gamma2`) is rejected.
pub fn make_coefficients(
    n: usize,
    ov: &CoefficientOverrides,
) -> Result<CoefficientSet, CoeffError> {
    let c1 = bubble_constant(ConstantKind::C1, n)?;
    let c2 = bubble_constant(ConstantKind::C2, n)?;
    let c3 = bubble_constant(ConstantKind::C3, n)?;
    let b1 = bubble_constant(ConstantKind::B1, n)?;
    check_positive("gamma1", ov.gamma1)?;
    check_positive("gamma2", ov.gamma2)?;
    check_positive("gamma3", ov.gamma3)?;
    check_positive("gamma4", ov.gamma4)?;
    check_positive("gamma_nabla_lap", ov.gamma_nabla_lap)?;
    check_positive("b_lambda", ov.b_lambda)?;
    check_positive("b_a", ov.b_a)?;
    check_positive("kappa", ov.kappa)?;

    let gamma2 = ov.gamma2.unwrap_or(1.0);
    // An explicit gamma3 is accepted only when it names the slaved value.
    if let Some(g3) = ov.gamma3 {
        if ov.gamma2.is_none() || (g3 - 3.0 * gamma2).abs() > 1e-12 * (3.0 * gamma2) {
            return Err(CoeffError::Gamma3Constraint);
        }
    }
    let nf = n as f64;
    let kappa_default = 4.0 * nf * (nf - 1.0) * c1.powf(2.0 / nf);
    Ok(CoefficientSet {
        n,
        c1,
        c2,
        c3,
        b1,
        gamma1: ov.gamma1.unwrap_or(1.0),
        gamma2,
        gamma3: 3.0 * gamma2,
        gamma4: ov.gamma4.unwrap_or(1.0),
        gamma_nabla_lap: ov.gamma_nabla_lap.unwrap_or(1.0),
        b_lambda: ov.b_lambda.unwrap_or(1.0),
        b_a: ov.b_a.unwrap_or(1.0),
        kappa: ov.kappa.unwrap_or(kappa_default),
    })
}

impl CoefficientSet {
    /// `4n(n-1)`, the constant the amplitude bracket is measured against.
    pub fn four_n_n1(&self) -> f64 {
        let nf = self.n as f64;
        4.0 * nf * (nf - 1.0)
    }
}
