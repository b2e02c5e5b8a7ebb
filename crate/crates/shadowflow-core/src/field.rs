//! Analytic curvature model with exact derivative jet.
//!
//! The field is `K(x) = 1 - |x|^4` plus optional compactly supported
//! polynomial bumps, in a single normal chart around the unique maximum
//! `x0 = 0`. The quartic part has the closed-form jet
//!
//! ```text
//! grad K = -4|x|^2 x,   lap K = -4(n+2)|x|^2,   grad lap K = -8(n+2) x,
//! ```
//!
//! and each bump contributes analytically, so no differentiation is done
//! numerically anywhere in the flow right-hand sides.

use crate::chart::{self, Point, DIM_MAX, ZERO};
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("point at distance {dist} lies outside the chart of radius {radius}")]
    OutsideChart { dist: f64, radius: f64 },
    #[error("unsupported dimension {0}, expected 3, 4 or 5")]
    BadDimension(usize),
    #[error("bump width must be positive, got {0}")]
    BadBumpWidth(f64),
}

/// A compactly supported radial perturbation `A * (1 - s)^4`, `s = |x-c|^2/w^2`.
///
/// The profile is `C^3` across its support boundary, so the full jet up to
/// `grad lap K` stays continuous. Negative amplitudes carve dips whose
/// critical points have positive Laplacian, matching the sign pattern the
/// model requires away from the maximum.
#[derive(Clone, Debug)]
pub struct Bump {
    pub center: Point,
    pub amplitude: f64,
    pub width: f64,
}

/// Full derivative jet of `K` at a point.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub k: f64,
    pub grad: Point,
    pub lap: f64,
    pub grad_lap: Point,
}

#[derive(Clone, Debug)]
pub struct CurvatureField {
    dim: usize,
    chart_radius: f64,
    quartic_form: bool,
    bumps: Vec<Bump>,
}

/// Outcome of checking the sign pattern of the composed field.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub valid: bool,
    /// Located critical points with their Laplacian values (the origin first).
    pub critical_points: Vec<(Point, f64)>,
    pub violations: Vec<String>,
    /// Non-fatal notes, e.g. a root search that failed to converge.
    pub diagnostics: Vec<String>,
}

impl CurvatureField {
    /// Pure quartic field in dimension `n`.
    pub fn quartic(dim: usize) -> Result<Self, FieldError> {
        Self::new(dim, 1.0, true, Vec::new())
    }

    pub fn new(
        dim: usize,
        chart_radius: f64,
        quartic_form: bool,
        bumps: Vec<Bump>,
    ) -> Result<Self, FieldError> {
        if !(3..=5).contains(&dim) {
            return Err(FieldError::BadDimension(dim));
        }
        for b in &bumps {
            if b.width <= 0.0 {
                return Err(FieldError::BadBumpWidth(b.width));
            }
        }
        Ok(CurvatureField {
            dim,
            chart_radius,
            quartic_form,
            bumps,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn chart_radius(&self) -> f64 {
        self.chart_radius
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    fn check_domain(&self, x: &Point) -> Result<(), FieldError> {
        let dist = chart::norm(x);
        if dist > self.chart_radius {
            return Err(FieldError::OutsideChart {
                dist,
                radius: self.chart_radius,
            });
        }
        Ok(())
    }

    /// Evaluates `(K, grad K, lap K, grad lap K)` at `x`.
    pub fn eval_jet(&self, x: &Point) -> Result<Jet, FieldError> {
        self.check_domain(x)?;
        let n = self.dim as f64;
        let mut jet = Jet {
            k: 1.0,
            grad: ZERO,
            lap: 0.0,
            grad_lap: ZERO,
        };
        if self.quartic_form {
            let r2 = chart::norm2(x);
            jet.k -= r2 * r2;
            jet.grad = chart::scaled(x, -4.0 * r2);
            jet.lap = -4.0 * (n + 2.0) * r2;
            jet.grad_lap = chart::scaled(x, -8.0 * (n + 2.0));
        }
        for b in &self.bumps {
            add_bump_jet(&mut jet, b, x, n);
        }
        Ok(jet)
    }

    /// Convenience accessor for `K(x)` alone.
    pub fn k(&self, x: &Point) -> Result<f64, FieldError> {
        Ok(self.eval_jet(x)?.k)
    }

    /// Analytic Hessian of `K`; used by the critical-point search.
    pub fn hessian(&self, x: &Point) -> Result<[[f64; DIM_MAX]; DIM_MAX], FieldError> {
        self.check_domain(x)?;
        let mut h = [[0.0; DIM_MAX]; DIM_MAX];
        if self.quartic_form {
            // grad = -4 r^2 x  =>  H = -4 r^2 I - 8 x x^T
            let r2 = chart::norm2(x);
            for i in 0..DIM_MAX {
                h[i][i] -= 4.0 * r2;
                for j in 0..DIM_MAX {
                    h[i][j] -= 8.0 * x[i] * x[j];
                }
            }
        }
        for b in &self.bumps {
            let u = chart::sub(x, &b.center);
            let w2 = b.width * b.width;
            let s = chart::norm2(&u) / w2;
            if s >= 1.0 {
                continue;
            }
            let (_, p1, p2, _) = profile(s);
            // grad bump = A p'(s) 2u/w^2
            // H = A [ p''(s) (2u/w^2)(2u/w^2)^T + p'(s) 2 I /w^2 ]
            for i in 0..DIM_MAX {
                h[i][i] += b.amplitude * p1 * 2.0 / w2;
                for j in 0..DIM_MAX {
                    h[i][j] += b.amplitude * p2 * 4.0 * u[i] * u[j] / (w2 * w2);
                }
            }
        }
        Ok(h)
    }

    /// Locates the critical points of the composed field and checks the sign
    /// pattern: the origin keeps its degenerate-maximum jet, every other
    /// critical point has `lap K > 0`, and `K > 0` across the chart.
    pub fn validate_condition(&self, rng_seed: u64) -> ValidationReport {
        let mut report = ValidationReport {
            valid: true,
            critical_points: Vec::new(),
            violations: Vec::new(),
            diagnostics: Vec::new(),
        };

        // Origin jet: the quartic form forces K=1 and a fully degenerate
        // critical point; overlapping bump support may break that.
        match self.eval_jet(&ZERO) {
            Ok(j) => {
                report.critical_points.push((ZERO, j.lap));
                let tol = 1e-12;
                if (j.k - 1.0).abs() > tol
                    || chart::norm(&j.grad) > tol
                    || j.lap.abs() > tol
                    || chart::norm(&j.grad_lap) > tol
                {
                    report.valid = false;
                    report.violations.push(String::from(
                        "origin is not a degenerate maximum of the composed field",
                    ));
                }
            }
            Err(e) => {
                report.valid = false;
                report
                    .violations
                    .push(alloc::format!("origin evaluation failed: {e}"));
            }
        }

        // Root-find grad K = 0 starting from each bump center.
        for (bi, b) in self.bumps.iter().enumerate() {
            match self.newton_critical_point(&b.center) {
                Some(root) => {
                    if chart::norm(&root) < 1e-6 {
                        continue; // converged back to the origin
                    }
                    if report
                        .critical_points
                        .iter()
                        .any(|(p, _)| chart::distance(p, &root) < 1e-6)
                    {
                        continue;
                    }
                    let jet = match self.eval_jet(&root) {
                        Ok(j) => j,
                        Err(e) => {
                            report.diagnostics.push(alloc::format!(
                                "critical point of bump {bi} left the chart: {e}"
                            ));
                            continue;
                        }
                    };
                    report.critical_points.push((root, jet.lap));
                    if jet.lap <= 0.0 {
                        report.valid = false;
                        report.violations.push(alloc::format!(
                            "critical point from bump {bi} has lap K = {} <= 0",
                            jet.lap
                        ));
                    }
                }
                None => {
                    report.diagnostics.push(alloc::format!(
                        "root search from bump {bi} did not converge"
                    ));
                }
            }
        }

        // Positivity of K by sampling.
        let mut rng = crate::rng::Rng::seed_from(rng_seed);
        for _ in 0..4096 {
            let x = rng.in_ball(self.dim, self.chart_radius);
            if let Ok(k) = self.k(&x) {
                if k <= 0.0 {
                    report.valid = false;
                    report
                        .violations
                        .push(alloc::format!("K = {k} <= 0 at |x| = {}", chart::norm(&x)));
                    break;
                }
            }
        }

        report
    }

    /// Damped Newton iteration on `grad K = 0`.
    fn newton_critical_point(&self, start: &Point) -> Option<Point> {
        let mut x = *start;
        for _ in 0..200 {
            let jet = self.eval_jet(&x).ok()?;
            let gnorm = chart::norm(&jet.grad);
            if gnorm < 1e-12 {
                return Some(x);
            }
            let h = self.hessian(&x).ok()?;
            let step = solve_sym(&h, &jet.grad, self.dim)?;
            // Damping: halve until |grad| decreases.
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let mut cand = x;
                chart::axpy(&mut cand, -t, &step);
                if let Ok(j2) = self.eval_jet(&cand) {
                    if chart::norm(&j2.grad) < gnorm {
                        x = cand;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                return None;
            }
        }
        None
    }
}

/// Bump profile `p(s) = (1-s)^4` on `[0,1]` and its first three derivatives.
fn profile(s: f64) -> (f64, f64, f64, f64) {
    let q = 1.0 - s;
    (q * q * q * q, -4.0 * q * q * q, 12.0 * q * q, -24.0 * q)
}

fn add_bump_jet(jet: &mut Jet, b: &Bump, x: &Point, n: f64) {
    let u = chart::sub(x, &b.center);
    let w2 = b.width * b.width;
    let s = chart::norm2(&u) / w2;
    if s >= 1.0 {
        return;
    }
    let (p0, p1, p2, p3) = profile(s);
    jet.k += b.amplitude * p0;
    chart::axpy(&mut jet.grad, b.amplitude * p1 * 2.0 / w2, &u);
    // lap = A (4 s p'' + 2 n p') / w^2
    jet.lap += b.amplitude * (4.0 * s * p2 + 2.0 * n * p1) / w2;
    // grad lap = A ((4 + 2n) p'' + 4 s p''') 2u / w^4
    let glap_coeff = b.amplitude * ((4.0 + 2.0 * n) * p2 + 4.0 * s * p3) * 2.0 / (w2 * w2);
    chart::axpy(&mut jet.grad_lap, glap_coeff, &u);
}

/// Gaussian elimination with partial pivoting on the leading `dim` block.
fn solve_sym(h: &[[f64; DIM_MAX]; DIM_MAX], rhs: &Point, dim: usize) -> Option<Point> {
    let mut a = [[0.0; DIM_MAX + 1]; DIM_MAX];
    for i in 0..dim {
        a[i][..dim].copy_from_slice(&h[i][..dim]);
        a[i][dim] = rhs[i];
    }
    for col in 0..dim {
        let mut piv = col;
        for row in col + 1..dim {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..dim {
            let f = a[row][col] / a[col][col];
            for k in col..=dim {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = ZERO;
    for col in (0..dim).rev() {
        let mut s = a[col][dim];
        for k in col + 1..dim {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}
