//! Bubble configurations and the pairwise interaction coefficient.
//!
//! The coefficient for bubbles `i != j` is
//!
//! ```text
//! eps_ij = (li/lj + lj/li + li*lj*g(a_i, a_j))^((2-n)/2)
//! ```
//!
//! where `g` models the conformal Green-kernel combination entering the
//! interaction; only its positivity, symmetry and quadratic leading behavior
//! at coincidence matter, so the model is `g(a,b) = |a-b|^2 (1 + h0 |a-b|^(n-2))`
//! with the regular part exposed through `h0`. Scale and position derivatives
//! are the exact analytic derivatives of this defining formula.

use crate::chart::{self, Point};
use alloc::vec::Vec;
use thiserror::Error;

/// Beyond this base value the coefficient is flushed to exact zero; the
/// derivative operations return zero consistently.
const BASE_FLOOR: f64 = 1e30;

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("bubble {0}: amplitude must be positive and finite")]
    BadAmplitude(usize),
    #[error("bubble {0}: non-finite scale")]
    BadScale(usize),
    #[error("bubble {0}: center has nonzero padding or leaves the chart")]
    BadCenter(usize),
    #[error("positive-weak-limit mode requires omega_i > 0 for every bubble")]
    BadOmega,
    #[error("state must contain at least one bubble")]
    Empty,
}

/// Model for the regular part `H(a)` of the Green kernel (positive mass).
#[derive(Clone, Debug)]
pub enum RegularPart {
    Constant(f64),
    /// Piecewise-linear in `|a|`, clamped at both ends; pairs sorted by radius.
    RadialTable(Vec<(f64, f64)>),
}

#[derive(Clone, Debug)]
pub struct GreenKernelModel {
    dim: usize,
    h0: f64,
    regular: RegularPart,
}

impl GreenKernelModel {
    pub fn new(dim: usize, h0: f64) -> Self {
        GreenKernelModel {
            dim,
            h0,
            regular: RegularPart::Constant(h0),
        }
    }

    pub fn with_regular_table(dim: usize, h0: f64, mut table: Vec<(f64, f64)>) -> Self {
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        GreenKernelModel {
            dim,
            h0,
            regular: RegularPart::RadialTable(table),
        }
    }

    /// Flat-model kernel: `g(a,b) = |a-b|^2` exactly (`h0 = 0`).
    pub fn flat(dim: usize) -> Self {
        Self::new(dim, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    /// Kernel value `g(a,b) = |a-b|^2 (1 + h0 |a-b|^(n-2))`.
    pub fn g(&self, a: &Point, b: &Point) -> f64 {
        let d = chart::distance(a, b);
        d * d * (1.0 + self.h0 * d.powi(self.dim as i32 - 2))
    }

    /// `grad_a g(a,b) = (a-b) (2 + n h0 |a-b|^(n-2))`.
    pub fn grad_a_g(&self, a: &Point, b: &Point) -> Point {
        let u = chart::sub(a, b);
        let d = chart::norm(&u);
        chart::scaled(
            &u,
            2.0 + self.dim as f64 * self.h0 * d.powi(self.dim as i32 - 2),
        )
    }

    /// Regular part `H(a) >= h0 > 0`.
    pub fn regular_part(&self, a: &Point) -> f64 {
        match &self.regular {
            RegularPart::Constant(h) => *h,
            RegularPart::RadialTable(table) => {
                let r = chart::norm(a);
                match table.iter().position(|&(rk, _)| rk >= r) {
                    None => table.last().map(|&(_, h)| h).unwrap_or(self.h0),
                    Some(0) => table[0].1,
                    Some(k) => {
                        let (r0, h0v) = table[k - 1];
                        let (r1, h1v) = table[k];
                        let t = (r - r0) / (r1 - r0);
                        h0v + t * (h1v - h0v)
                    }
                }
            }
        }
    }
}

/// One bubble in log coordinates.
#[derive(Clone, Copy, Debug)]
pub struct Bubble {
    pub log_alpha: f64,
    pub log_lambda: f64,
    pub center: Point,
}

impl Bubble {
    pub fn new(alpha: f64, lambda: f64, center: Point) -> Self {
        Bubble {
            log_alpha: alpha.ln(),
            log_lambda: lambda.ln(),
            center,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    pub fn lambda(&self) -> f64 {
        self.log_lambda.exp()
    }
}

/// Weak-limit mode of the configuration.
#[derive(Clone, Debug)]
pub enum WeakLimit {
    Zero,
    /// Positive weak limit with its amplitude and per-bubble values
    /// `omega_i = omega(a_i) > 0`.
    Positive {
        global_alpha: f64,
        omega: Vec<f64>,
    },
}

/// The reduced configuration: `p` bubbles plus the weak-limit mode flag.
#[derive(Clone, Debug)]
pub struct BubbleState {
    pub bubbles: Vec<Bubble>,
    pub mode: WeakLimit,
}

impl BubbleState {
    pub fn zero_limit(bubbles: Vec<Bubble>) -> Self {
        BubbleState {
            bubbles,
            mode: WeakLimit::Zero,
        }
    }

    pub fn p(&self) -> usize {
        self.bubbles.len()
    }

    pub fn alpha(&self, i: usize) -> f64 {
        self.bubbles[i].alpha()
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.bubbles[i].lambda()
    }

    pub fn center(&self, i: usize) -> &Point {
        &self.bubbles[i].center
    }

    pub fn is_zero_limit(&self) -> bool {
        matches!(self.mode, WeakLimit::Zero)
    }

    pub fn validate(&self, dim: usize, chart_radius: f64) -> Result<(), StateError> {
        if self.bubbles.is_empty() {
            return Err(StateError::Empty);
        }
        for (i, b) in self.bubbles.iter().enumerate() {
            if !b.log_alpha.is_finite() {
                return Err(StateError::BadAmplitude(i));
            }
            if !b.log_lambda.is_finite() {
                return Err(StateError::BadScale(i));
            }
            if !chart::padded_zero(&b.center, dim)
                || !chart::is_finite(&b.center)
                || chart::norm(&b.center) > chart_radius
            {
                return Err(StateError::BadCenter(i));
            }
        }
        if let WeakLimit::Positive {
            global_alpha,
            omega,
        } = &self.mode
        {
            if omega.len() != self.bubbles.len()
                || *global_alpha <= 0.0
                || omega.iter().any(|&w| w <= 0.0)
            {
                return Err(StateError::BadOmega);
            }
        }
        Ok(())
    }
}

/// Base expression `li/lj + lj/li + li*lj*g(a_i,a_j)`.
fn interaction_base(state: &BubbleState, kernel: &GreenKernelModel, i: usize, j: usize) -> f64 {
    let li = state.lambda(i);
    let lj = state.lambda(j);
    li / lj + lj / li + li * lj * kernel.g(state.center(i), state.center(j))
}

/// Interaction coefficient `eps_ij`; symmetric and strictly positive
/// (flushed to exact zero past the underflow floor).
pub fn eps(state: &BubbleState, kernel: &GreenKernelModel, i: usize, j: usize) -> f64 {
    assert!(i != j, "interaction coefficient requires i != j");
    let base = interaction_base(state, kernel, i, j);
    if base > BASE_FLOOR {
        return 0.0;
    }
    base.powf((2.0 - kernel.dim() as f64) / 2.0)
}

/// Scale derivative `lambda_i d/d lambda_i eps_ij`, exact for the defining
/// formula:
///
/// ```text
/// -li d_li eps_ij = (n-2)/2 eps^{n/(n-2)} (li/lj - lj/li + li lj g)
/// ```
pub fn dlog_lambda_eps(state: &BubbleState, kernel: &GreenKernelModel, i: usize, j: usize) -> f64 {
    assert!(i != j, "interaction coefficient requires i != j");
    let base = interaction_base(state, kernel, i, j);
    if base > BASE_FLOOR {
        return 0.0;
    }
    let n = kernel.dim() as f64;
    let li = state.lambda(i);
    let lj = state.lambda(j);
    let bracket = li / lj - lj / li + li * lj * kernel.g(state.center(i), state.center(j));
    -(n - 2.0) / 2.0 * base.powf(-n / 2.0) * bracket
}

/// Position derivative `(1/lambda_i) grad_{a_i} eps_ij`, exact chain rule:
///
/// ```text
/// (1/li) grad_{a_i} eps_ij = -(n-2)/2 eps^{n/(n-2)} lj grad_a g(a_i, a_j)
/// ```
pub fn grad_a_eps(state: &BubbleState, kernel: &GreenKernelModel, i: usize, j: usize) -> Point {
    assert!(i != j, "interaction coefficient requires i != j");
    let base = interaction_base(state, kernel, i, j);
    if base > BASE_FLOOR {
        return chart::ZERO;
    }
    let n = kernel.dim() as f64;
    let lj = state.lambda(j);
    let gg = kernel.grad_a_g(state.center(i), state.center(j));
    chart::scaled(&gg, -(n - 2.0) / 2.0 * base.powf(-n / 2.0) * lj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::from_coords;

    fn two_bubbles(l0: f64, l1: f64, a0: Point, a1: Point) -> BubbleState {
        BubbleState::zero_limit(alloc::vec![
            Bubble::new(1.0, l0, a0),
            Bubble::new(1.0, l1, a1),
        ])
    }

    #[test]
    fn coincident_equal_scales() {
        let k = GreenKernelModel::flat(5);
        let s = two_bubbles(50.0, 50.0, from_coords(&[0.1]), from_coords(&[0.1]));
        // base = 2, eps = 2^{-3/2}
        assert!((eps(&s, &k, 0, 1) - 2.0f64.powf(-1.5)).abs() < 1e-15);
        // bracket vanishes
        assert_eq!(dlog_lambda_eps(&s, &k, 0, 1), 0.0);
        assert_eq!(chart::norm(&grad_a_eps(&s, &k, 0, 1)), 0.0);
    }

    #[test]
    fn separated_equal_scales_value() {
        let k = GreenKernelModel::flat(5);
        let s = two_bubbles(10.0, 10.0, from_coords(&[0.5]), from_coords(&[-0.5]));
        // base = 1 + 1 + 100 = 102
        let expect = 102.0f64.powf(-1.5);
        assert!((eps(&s, &k, 0, 1) - expect).abs() < 1e-18);
        assert!((expect - 9.707e-4).abs() < 5e-7);
    }

    #[test]
    fn symmetry() {
        let k = GreenKernelModel::new(5, 0.5);
        let mut rng = crate::rng::Rng::seed_from(17);
        for _ in 0..200 {
            let s = two_bubbles(
                rng.log_range(10.0, 1e6),
                rng.log_range(10.0, 1e6),
                rng.in_ball(5, 0.8),
                rng.in_ball(5, 0.8),
            );
            let e01 = eps(&s, &k, 0, 1);
            let e10 = eps(&s, &k, 1, 0);
            assert!((e01 - e10).abs() <= 1e-15 * e01.max(1e-300));
        }
    }

    #[test]
    fn scale_derivative_lower_bound_when_larger() {
        // -li d_li eps >= (n-2)/4 eps whenever li >= lj and the configuration
        // is genuinely in the small-interaction regime.
        let k = GreenKernelModel::new(5, 0.5);
        let mut rng = crate::rng::Rng::seed_from(23);
        let mut checked = 0;
        while checked < 500 {
            let lj = rng.log_range(10.0, 1e5);
            let li = lj * rng.log_range(1.0, 10.0);
            let s = two_bubbles(li, lj, rng.in_ball(5, 0.8), rng.in_ball(5, 0.8));
            let e = eps(&s, &k, 0, 1);
            if e > 0.125 || e == 0.0 {
                continue;
            }
            assert!(-dlog_lambda_eps(&s, &k, 0, 1) >= 0.75 * e - 1e-18);
            checked += 1;
        }
    }

    #[test]
    fn scale_derivative_sum_rule() {
        // -li d_li eps - lj d_lj eps = (n-2) eps^{n/(n-2)} li lj g > 0 off-center.
        let k = GreenKernelModel::new(5, 0.5);
        let mut rng = crate::rng::Rng::seed_from(29);
        for _ in 0..300 {
            let s = two_bubbles(
                rng.log_range(10.0, 1e5),
                rng.log_range(10.0, 1e5),
                rng.in_ball(5, 0.8),
                rng.in_ball(5, 0.8),
            );
            let e = eps(&s, &k, 0, 1);
            if e == 0.0 {
                continue;
            }
            let sum = -dlog_lambda_eps(&s, &k, 0, 1) - dlog_lambda_eps(&s, &k, 1, 0);
            let expect =
                3.0 * e.powf(5.0 / 3.0) * s.lambda(0) * s.lambda(1) * k.g(s.center(0), s.center(1));
            assert!((sum - expect).abs() <= 1e-10 * expect.abs().max(1e-300));
            if chart::distance(s.center(0), s.center(1)) > 1e-12 {
                assert!(sum > 0.0);
            }
        }
    }

    #[test]
    fn grad_matches_pure_quadratic_kernel_form() {
        // With h0 = 0: (1/li) grad_{a_i} eps = -(n-2) eps^{n/(n-2)} lj (a_i - a_j).
        let k = GreenKernelModel::flat(5);
        let a0 = from_coords(&[0.3, 0.1]);
        let a1 = from_coords(&[-0.2, 0.4]);
        let s = two_bubbles(40.0, 90.0, a0, a1);
        let e = eps(&s, &k, 0, 1);
        let g = grad_a_eps(&s, &k, 0, 1);
        let expect = chart::scaled(&chart::sub(&a0, &a1), -3.0 * e.powf(5.0 / 3.0) * 90.0);
        for c in 0..DIM_MAX_TEST {
            assert!((g[c] - expect[c]).abs() < 1e-16 + 1e-10 * expect[c].abs());
        }
    }

    const DIM_MAX_TEST: usize = crate::chart::DIM_MAX;

    #[test]
    fn grad_magnitude_bound_brute_force() {
        // |(1/li) grad eps| <= (n-2) eps over random configurations.
        let k = GreenKernelModel::new(5, 0.5);
        let mut rng = crate::rng::Rng::seed_from(31);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let s = two_bubbles(
                rng.log_range(10.0, 1e6),
                rng.log_range(10.0, 1e6),
                rng.in_ball(5, 0.8),
                rng.in_ball(5, 0.8),
            );
            let e = eps(&s, &k, 0, 1);
            if e == 0.0 {
                continue;
            }
            let ratio = chart::norm(&grad_a_eps(&s, &k, 0, 1)) / (3.0 * e);
            worst = worst.max(ratio);
        }
        assert!(worst <= 1.0, "worst ratio {worst}");
    }

    #[test]
    fn regular_part_table_interpolates_and_clamps() {
        let k = GreenKernelModel::with_regular_table(
            5,
            0.5,
            alloc::vec![(0.5, 1.0), (0.0, 0.5), (1.0, 2.0)],
        );
        // Sorted internally; clamped at both ends, linear in between.
        assert_eq!(k.regular_part(&from_coords(&[0.0])), 0.5);
        assert_eq!(k.regular_part(&from_coords(&[0.25])), 0.75);
        assert_eq!(k.regular_part(&from_coords(&[0.75])), 1.5);
        assert_eq!(k.regular_part(&from_coords(&[5.0])), 2.0);
    }

    #[test]
    fn underflow_floor_flushes_to_zero() {
        let k = GreenKernelModel::flat(5);
        let s = two_bubbles(1e20, 1e20, from_coords(&[0.5]), from_coords(&[-0.5]));
        // base ~ 1e40 > floor
        assert_eq!(eps(&s, &k, 0, 1), 0.0);
        assert_eq!(dlog_lambda_eps(&s, &k, 0, 1), 0.0);
        assert_eq!(chart::norm(&grad_a_eps(&s, &k, 0, 1)), 0.0);
    }

    #[test]
    #[should_panic(expected = "requires i != j")]
    fn same_index_is_a_usage_error() {
        let k = GreenKernelModel::flat(5);
        let s = two_bubbles(10.0, 10.0, from_coords(&[0.1]), from_coords(&[0.2]));
        let _ = eps(&s, &k, 0, 0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let k = GreenKernelModel::new(5, 0.5);
        let mut rng = crate::rng::Rng::seed_from(37);
        for _ in 0..200 {
            let mut s = two_bubbles(
                rng.log_range(10.0, 1e4),
                rng.log_range(10.0, 1e4),
                rng.in_ball(5, 0.7),
                rng.in_ball(5, 0.7),
            );
            let e = eps(&s, &k, 0, 1);
            if e < 1e-12 {
                continue;
            }
            let h = 1e-6;
            // d/d log lambda_0
            let orig = s.bubbles[0].log_lambda;
            s.bubbles[0].log_lambda = orig + h;
            let ep = eps(&s, &k, 0, 1);
            s.bubbles[0].log_lambda = orig - h;
            let em = eps(&s, &k, 0, 1);
            s.bubbles[0].log_lambda = orig;
            let fd = (ep - em) / (2.0 * h);
            let an = dlog_lambda_eps(&s, &k, 0, 1);
            assert!(
                (fd - an).abs() <= 1e-6 * an.abs().max(1e-14),
                "{fd} vs {an}"
            );
            // d/d a_0 component 2
            let oc = s.bubbles[0].center[2];
            s.bubbles[0].center[2] = oc + h;
            let ep = eps(&s, &k, 0, 1);
            s.bubbles[0].center[2] = oc - h;
            let em = eps(&s, &k, 0, 1);
            s.bubbles[0].center[2] = oc;
            let fd = (ep - em) / (2.0 * h) / s.lambda(0);
            let an = grad_a_eps(&s, &k, 0, 1)[2];
            assert!(
                (fd - an).abs() <= 1e-6 * an.abs().max(1e-14),
                "{fd} vs {an}"
            );
        }
    }
}
