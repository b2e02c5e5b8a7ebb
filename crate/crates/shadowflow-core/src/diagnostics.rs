//! Lyapunov and monitoring functionals with discrete monotonicity verdicts.

use crate::chart;
use crate::coeffs::CoefficientSet;
use crate::field::{CurvatureField, FieldError};
use crate::kernel::{self, BubbleState, GreenKernelModel};
use crate::modification::{vartheta, ModificationConfig};
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DiagError {
    #[error("lap K = {0} >= 0: outside the divergence regime")]
    OutsideDivergenceRegime(f64),
    #[error("field evaluation failed: {0}")]
    Field(#[from] FieldError),
}

/// Scale-weighted concentration functional.
///
/// Bubbles are sorted by `lambda |a|^5` ascending, position `i` (1-based)
/// carries weight `C^i`, and each active bubble contributes
/// `C^i eta2(t_i) ln(t_i)` with `t_i = lambda_i |a_i|^5 / eps`. Nonnegative
/// since the cut-off opens only past `t = 1`.
pub fn theta(state: &BubbleState, mconf: &ModificationConfig, weight_base: f64, eps: f64) -> f64 {
    assert!(weight_base > 1.0, "weight base must exceed 1");
    let mut keys: Vec<f64> = (0..state.p())
        .map(|i| state.lambda(i) * chart::norm(state.center(i)).powi(5))
        .collect();
    keys.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    let mut w = 1.0;
    for key in keys {
        w *= weight_base;
        let t = key / eps;
        if t > 1.0 {
            sum += w * mconf.eta2(t) * t.ln();
        }
    }
    sum
}

/// Per-bubble weight entering the concentration functional's derivative.
pub fn theta_weight(mconf: &ModificationConfig, lambda_a5_over_eps: f64) -> f64 {
    vartheta(mconf, lambda_a5_over_eps).unwrap_or(0.0)
}

/// Inverse-scale functional `sum_i C^i ln(1/lambda_i)` over a subset,
/// ordered by `1/lambda` descending.
pub fn psi(state: &BubbleState, weight_base: f64, subset: &[usize]) -> f64 {
    assert!(weight_base > 1.0, "weight base must exceed 1");
    assert!(!subset.is_empty(), "subset must be nonempty");
    let mut inv_logs: Vec<f64> = subset
        .iter()
        .map(|&i| -state.bubbles[i].log_lambda)
        .collect();
    // 1/lambda descending == -log lambda descending.
    inv_logs.sort_by(|a, b| b.total_cmp(a));
    let mut sum = 0.0;
    let mut w = 1.0;
    for v in inv_logs {
        w *= weight_base;
        sum += w * v;
    }
    sum
}

/// Scale-invariant mass `-lambda_i lapK(a_i)`, positive in the divergence
/// regime (`4(n+2) lambda |a|^2` on the pure quartic field).
pub fn mass_scale_invariant(
    state: &BubbleState,
    field: &CurvatureField,
    i: usize,
) -> Result<f64, DiagError> {
    let jet = field.eval_jet(state.center(i))?;
    if jet.lap >= 0.0 {
        return Err(DiagError::OutsideDivergenceRegime(jet.lap));
    }
    Ok(-state.lambda(i) * jet.lap)
}

/// Single-configuration energy surrogate
/// `4n(n-1) c1^{2/n} (sum_i K(a_i)^{-(n-2)/2})^{2/n}`; for one bubble this is
/// the critical level `const / K(a)^{(n-2)/n}`. A surrogate for ordering and
/// monotone trends only, not the functional itself.
pub fn energy_surrogate(
    state: &BubbleState,
    field: &CurvatureField,
    coeffs: &CoefficientSet,
) -> Result<f64, DiagError> {
    let nf = coeffs.n as f64;
    let mut s = 0.0;
    for i in 0..state.p() {
        let k = field.k(state.center(i))?;
        s += k.powf(-(nf - 2.0) / 2.0);
    }
    Ok(coeffs.four_n_n1() * coeffs.c1.powf(2.0 / nf) * s.powf(2.0 / nf))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    NonIncreasing,
    NonDecreasing,
}

#[derive(Clone, Copy, Debug)]
pub struct LyapunovVerdict {
    pub pass: bool,
    /// Total wrong-direction increment.
    pub violation: f64,
    /// Index of the step with the largest wrong-direction increment.
    pub worst_step: usize,
    pub worst_increment: f64,
}

/// Discrete monotonicity check: passes when the summed wrong-direction
/// increments stay within `slack` (the integrated error budget).
pub fn check_lyapunov(series: &[f64], direction: Direction, slack: f64) -> LyapunovVerdict {
    assert!(series.len() >= 2, "need at least two samples");
    assert!(slack >= 0.0, "slack must be nonnegative");
    let mut violation = 0.0;
    let mut worst = 0.0;
    let mut worst_step = 0;
    for (k, w) in series.windows(2).enumerate() {
        let inc = w[1] - w[0];
        let bad = match direction {
            Direction::NonIncreasing => inc.max(0.0),
            Direction::NonDecreasing => (-inc).max(0.0),
        };
        violation += bad;
        if bad > worst {
            worst = bad;
            worst_step = k;
        }
    }
    LyapunovVerdict {
        pass: violation <= slack,
        violation,
        worst_step,
        worst_increment: worst,
    }
}

/// Per-bubble channels of one trajectory sample.
#[derive(Clone, Copy, Debug)]
pub struct BubbleChannels {
    pub lambda_a2: f64,
    pub lambda_a5: f64,
    /// `-lambda lapK(a)`; NaN outside the divergence regime (`lapK >= 0`).
    pub neg_lambda_lapk: f64,
}

/// One diagnostic record: per-bubble channels plus the global functionals
/// and pairwise interactions (pairs `(i, j)`, `i < j`, in row-major order).
#[derive(Clone, Debug)]
pub struct DiagnosticSample {
    pub t: f64,
    pub per_bubble: Vec<BubbleChannels>,
    pub theta: f64,
    pub psi: f64,
    pub energy: f64,
    pub eps_pairs: Vec<f64>,
}

/// Assembles the full sample for a state; `theta_eps` is the cut-off scale
/// of the concentration functional.
#[allow(clippy::too_many_arguments)]
pub fn sample(
    t: f64,
    state: &BubbleState,
    field: &CurvatureField,
    kernel: &GreenKernelModel,
    coeffs: &CoefficientSet,
    mconf: &ModificationConfig,
    weight_base: f64,
    theta_eps: f64,
) -> DiagnosticSample {
    let p = state.p();
    let mut per_bubble = Vec::with_capacity(p);
    for i in 0..p {
        let an = chart::norm(state.center(i));
        let li = state.lambda(i);
        per_bubble.push(BubbleChannels {
            lambda_a2: li * an * an,
            lambda_a5: li * an.powi(5),
            neg_lambda_lapk: mass_scale_invariant(state, field, i).unwrap_or(f64::NAN),
        });
    }
    let mut eps_pairs = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            eps_pairs.push(kernel::eps(state, kernel, i, j));
        }
    }
    let subset: Vec<usize> = (0..p).collect();
    DiagnosticSample {
        t,
        per_bubble,
        theta: theta(state, mconf, weight_base, theta_eps),
        psi: psi(state, weight_base, &subset),
        energy: energy_surrogate(state, field, coeffs).unwrap_or(f64::NAN),
        eps_pairs,
    }
}
