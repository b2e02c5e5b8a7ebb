//! Compactifying modification of the single-bubble flow.
//!
//! Near the escape scenario the center equation receives an extra inward
//! drift `-kappa g4 eps eta_V eta_a eta_{a,lambda} e_a / lambda` gated by two
//! cut-offs: `eta_a = eta1(|a|/eps_inner)` keeps the drift near the maximum,
//! `eta_{a,lambda} = eta2(lambda |a|^2 / eps_inner)` switches it off once the
//! configuration has left the escape region. The function-space proximity
//! weight `eta_V` is identically one at reduced level: the reduced state
//! represents a configuration already inside the single-bubble neighborhood.
//!
//! The cut-off profile is the C^2 polynomial step
//!
//! ```text
//! eta2(1 + u) = 35 u^3 - 105 u^4 + 126 u^5 - 70 u^6 + 15 u^7,  u in [0, 1],
//! ```
//!
//! i.e. the regularized incomplete Beta function I_u(3,5). Its second
//! derivative is nonnegative on the first third of the transition
//! (`delta_plateau = 1/3`) and the induced weight
//! `vartheta(t) = eta2 + eta2' t ln t` stays below 2, so the weight is
//! quasi-monotone with constant under 2. The symmetric quintic step fails
//! that bound (its weight peaks at about 2.05), which is why the asymmetric
//! step is the default.

use crate::chart::{self, ZERO};
use crate::coeffs::CoefficientSet;
use crate::dynamics::{rhs_zero_weak_limit, AlphaMode, DynError, StateDerivative};
use crate::field::CurvatureField;
use crate::kernel::{BubbleState, GreenKernelModel};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModError {
    #[error("weight argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error(
        "cut-off thresholds must satisfy 0 < eps_inner <= eps_strength, got ({inner}, {strength})"
    )]
    BadThresholds { inner: f64, strength: f64 },
}

/// Drift strength and cut-off thresholds of the modification.
#[derive(Clone, Copy, Debug)]
pub struct ModificationConfig {
    /// Drift strength (the neighborhood scale of the modified region).
    pub eps_strength: f64,
    /// Cut-off threshold, much smaller than `eps_strength`.
    pub eps_inner: f64,
    /// Upper end of the convexity window of `eta2`, fixed by the profile.
    pub delta_plateau: f64,
}

impl ModificationConfig {
    pub fn new(eps_strength: f64, eps_inner: f64) -> Result<Self, ModError> {
        if !(eps_inner > 0.0 && eps_inner <= eps_strength) {
            return Err(ModError::BadThresholds {
                inner: eps_inner,
                strength: eps_strength,
            });
        }
        Ok(ModificationConfig {
            eps_strength,
            eps_inner,
            delta_plateau: 1.0 / 3.0,
        })
    }
}

impl ModificationConfig {
    /// Decreasing cut-off profile.
    pub fn eta1(&self, s: f64) -> f64 {
        eta1(s)
    }

    /// Increasing cut-off profile.
    pub fn eta2(&self, s: f64) -> f64 {
        eta2(s)
    }

    pub fn eta2_prime(&self, s: f64) -> f64 {
        eta2_prime(s)
    }
}

impl Default for ModificationConfig {
    fn default() -> Self {
        ModificationConfig {
            eps_strength: 0.1,
            eps_inner: 0.0125,
            delta_plateau: 1.0 / 3.0,
        }
    }
}

/// Polynomial step `I_u(3,5)` on the transition `[0, 1]`, evaluated from
/// whichever endpoint is closer so the value stays inside `[0, 1]` to the
/// last ulp.
fn step(u: f64) -> f64 {
    if u <= 0.5 {
        let u3 = u * u * u;
        u3 * (35.0 + u * (-105.0 + u * (126.0 + u * (-70.0 + u * 15.0))))
    } else {
        // 1 - I_{1-u}(5,3) = 1 - q^5 (21 - 35 q + 15 q^2), q = 1 - u
        let q = 1.0 - u;
        let q5 = q * q * q * q * q;
        1.0 - q5 * (21.0 + q * (-35.0 + q * 15.0))
    }
}

fn step_prime(u: f64) -> f64 {
    // 105 u^2 (1-u)^4
    let q = 1.0 - u;
    105.0 * u * u * q * q * q * q
}

/// Decreasing cut-off: 1 on `(0, 1]`, 0 on `[2, inf)`, `eta1' <= 0`, C^2.
pub fn eta1(s: f64) -> f64 {
    if s <= 1.0 {
        1.0
    } else if s >= 2.0 {
        0.0
    } else {
        1.0 - step(s - 1.0)
    }
}

/// Increasing cut-off: 0 on `(0, 1]`, 1 on `[2, inf)`, `eta2' >= 0`, C^2,
/// convex on `(0, 1 + delta_plateau)`.
pub fn eta2(s: f64) -> f64 {
    if s <= 1.0 {
        0.0
    } else if s >= 2.0 {
        1.0
    } else {
        step(s - 1.0)
    }
}

pub fn eta2_prime(s: f64) -> f64 {
    if !(1.0..2.0).contains(&s) {
        0.0
    } else {
        step_prime(s - 1.0)
    }
}

/// Cut-off pair `(eta_a, eta_{a,lambda})` for bubble `i`; `eta_V` is one.
pub fn cutoffs(state: &BubbleState, mconf: &ModificationConfig, i: usize) -> (f64, f64) {
    let a = chart::norm(state.center(i));
    let eta_a = eta1(a / mconf.eps_inner);
    let eta_alam = eta2(state.lambda(i) * a * a / mconf.eps_inner);
    (eta_a, eta_alam)
}

/// Weight `vartheta(t) = eta2(t) + eta2'(t) t ln t`: zero on `(0, 1]`, one on
/// `[2, inf)`, positive in between.
pub fn vartheta(_mconf: &ModificationConfig, t: f64) -> Result<f64, ModError> {
    if t <= 0.0 {
        return Err(ModError::NonPositiveArgument(t));
    }
    Ok(eta2(t) + eta2_prime(t) * t * t.ln())
}

/// Modified zero-weak-limit flow: the unmodified field plus the gated inward
/// radial drift in each center equation. Exactly zero drift at `a = 0`
/// (the gate vanishes there before the radial direction degenerates).
pub fn rhs_modified(
    state: &BubbleState,
    field: &CurvatureField,
    kernel: &GreenKernelModel,
    coeffs: &CoefficientSet,
    mconf: &ModificationConfig,
) -> Result<StateDerivative, DynError> {
    let mut d = rhs_zero_weak_limit(state, field, kernel, coeffs, AlphaMode::Slaved)?;
    for i in 0..state.p() {
        let (eta_a, eta_alam) = cutoffs(state, mconf, i);
        let gate = eta_a * eta_alam;
        if gate == 0.0 {
            continue;
        }
        let a = state.center(i);
        let an = chart::norm(a);
        debug_assert!(an > 0.0, "gate is zero at the origin");
        let li = state.lambda(i);
        // lambda a' gains -kappa g4 eps gate e_a / lambda; divide by lambda for a'.
        let scale = -coeffs.kappa * coeffs.gamma4 * mconf.eps_strength * gate / (an * li * li);
        chart::axpy(&mut d.da[i], scale, a);
    }
    Ok(d)
}

/// Drift-only part of the modified flow (the difference to the unmodified
/// field); exposed for the support and direction checks.
pub fn drift(
    state: &BubbleState,
    coeffs: &CoefficientSet,
    mconf: &ModificationConfig,
    i: usize,
) -> crate::chart::Point {
    let (eta_a, eta_alam) = cutoffs(state, mconf, i);
    let gate = eta_a * eta_alam;
    if gate == 0.0 {
        return ZERO;
    }
    let a = state.center(i);
    let an = chart::norm(a);
    let li = state.lambda(i);
    chart::scaled(
        a,
        -coeffs.kappa * coeffs.gamma4 * mconf.eps_strength * gate / (an * li * li),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::from_coords;
    use crate::coeffs::{make_coefficients, CoefficientOverrides};
    use crate::kernel::Bubble;

    fn setup() -> (CurvatureField, GreenKernelModel, CoefficientSet) {
        (
            CurvatureField::quartic(5).unwrap(),
            GreenKernelModel::new(5, 0.5),
            make_coefficients(5, &CoefficientOverrides::default()).unwrap(),
        )
    }

    fn single(lambda: f64, a: crate::chart::Point) -> BubbleState {
        BubbleState::zero_limit(alloc::vec![Bubble::new(1.0, lambda, a)])
    }

    #[test]
    fn profile_plateaus_and_monotonicity() {
        assert_eq!(eta1(0.5), 1.0);
        assert_eq!(eta1(2.5), 0.0);
        assert_eq!(eta2(0.5), 0.0);
        assert_eq!(eta2(2.5), 1.0);
        let mut prev1 = eta1(0.9);
        let mut prev2 = eta2(0.9);
        let mut s = 0.9;
        while s < 2.2 {
            let v1 = eta1(s);
            let v2 = eta2(s);
            assert!(v1 <= prev1 + 1e-15);
            assert!(v2 >= prev2 - 1e-15);
            assert!(
                (0.0..=1.0).contains(&v1) && (0.0..=1.0).contains(&v2),
                "s={s} v1={v1} v2={v2}"
            );
            prev1 = v1;
            prev2 = v2;
            s += 1e-3;
        }
    }

    #[test]
    fn eta2_c2_and_convex_on_plateau() {
        // Second difference quotients: continuity of eta2'' across the seams
        // (the third derivative jumps there, so the seam checks use a finer
        // step) and nonnegativity up to 1 + delta.
        let hs = 1e-6;
        let d2s = |s: f64| (eta2(s + hs) - 2.0 * eta2(s) + eta2(s - hs)) / (hs * hs);
        assert!(d2s(1.0).abs() < 1e-3, "{}", d2s(1.0));
        assert!(d2s(2.0).abs() < 1e-3, "{}", d2s(2.0));
        let h = 1e-4;
        let d2 = |s: f64| (eta2(s + h) - 2.0 * eta2(s) + eta2(s - h)) / (h * h);
        let mconf = ModificationConfig::default();
        let mut s = 1.0 + 1e-3;
        while s < 1.0 + mconf.delta_plateau {
            assert!(d2(s) >= -1e-6, "eta2'' at {s}: {}", d2(s));
            s += 1e-3;
        }
    }

    #[test]
    fn cutoff_plateau_values() {
        let mconf = ModificationConfig::default();
        // |a| < eps_inner and lambda |a|^2 > 2 eps_inner -> both gates open.
        let s = single(1e4, from_coords(&[0.005]));
        let (ea, eal) = cutoffs(&s, &mconf, 0);
        assert_eq!(ea, 1.0);
        assert_eq!(eal, 1.0);
        // lambda |a|^2 < eps_inner -> drift off.
        let s = single(10.0, from_coords(&[0.005]));
        let (_, eal) = cutoffs(&s, &mconf, 0);
        assert_eq!(eal, 0.0);
    }

    #[test]
    fn cutoffs_c1_in_log_scale_and_center() {
        let mconf = ModificationConfig::default();
        let mut rng = crate::rng::Rng::seed_from(47);
        for _ in 0..200 {
            // Sample near the transition bands to exercise the spline part.
            let a = rng.in_ball(5, 0.02);
            let l = rng.log_range(1e2, 1e6);
            let s = single(l, a);
            // The transitions are compressed by 1/eps_inner; keep the stencil
            // well inside one smooth piece.
            let h = 1e-7;
            let probe = |ds: f64, comp: usize| {
                let mut sv = s.clone();
                if comp == 0 {
                    sv.bubbles[0].log_lambda += ds;
                } else {
                    sv.bubbles[0].center[comp - 1] += ds;
                }
                cutoffs(&sv, &mconf, 0)
            };
            for comp in 0..2 {
                let (p1a, p1b) = probe(h, comp);
                let (m1a, m1b) = probe(-h, comp);
                let (p2a, p2b) = probe(0.5 * h, comp);
                let (m2a, m2b) = probe(-0.5 * h, comp);
                let d1 = ((p1a - m1a) / (2.0 * h), (p1b - m1b) / (2.0 * h));
                let d2 = ((p2a - m2a) / h, (p2b - m2b) / h);
                assert!(
                    (d1.0 - d2.0).abs() <= 2e-4 * (1.0 + d2.0.abs()),
                    "eta_a: {} vs {} (lambda {}, |a| {})",
                    d1.0,
                    d2.0,
                    s.lambda(0),
                    chart::norm(s.center(0))
                );
                assert!(
                    (d1.1 - d2.1).abs() <= 2e-4 * (1.0 + d2.1.abs()),
                    "eta_alam: {} vs {} (lambda {}, |a| {})",
                    d1.1,
                    d2.1,
                    s.lambda(0),
                    chart::norm(s.center(0))
                );
            }
        }
    }

    #[test]
    fn vartheta_values_and_domain() {
        let mconf = ModificationConfig::default();
        assert_eq!(vartheta(&mconf, 0.5).unwrap(), 0.0);
        assert_eq!(vartheta(&mconf, 3.0).unwrap(), 1.0);
        assert!(vartheta(&mconf, 1.5).unwrap() > 0.0);
        assert!(matches!(
            vartheta(&mconf, 0.0),
            Err(ModError::NonPositiveArgument(_))
        ));
    }

    #[test]
    fn vartheta_quasi_monotone_with_constant_below_two() {
        let mconf = ModificationConfig::default();
        // Dense grid over the transition and beyond.
        let mut grid = alloc::vec::Vec::new();
        let mut t = 0.05;
        while t < 6.0 {
            grid.push(vartheta(&mconf, t).unwrap());
            t += 1e-4;
        }
        // kappa* = sup_{r<s} theta(r)/theta(s)
        let mut kappa_star: f64 = 1.0;
        let mut min_suffix = f64::INFINITY;
        for &v in grid.iter().rev() {
            if min_suffix > 0.0 && v > 0.0 {
                kappa_star = kappa_star.max(v / min_suffix);
            }
            min_suffix = min_suffix.min(v.max(1e-300));
        }
        assert!(kappa_star <= 2.0, "kappa* = {kappa_star}");
        assert!(
            kappa_star > 1.5,
            "profile peak expected near 1.76, got {kappa_star}"
        );
        // Monotone on the convexity window (0, 1 + delta).
        let mut prev = 0.0;
        let mut t = 0.05;
        while t < 1.0 + mconf.delta_plateau {
            let v = vartheta(&mconf, t).unwrap();
            assert!(v >= prev - 1e-12);
            prev = v;
            t += 1e-4;
        }
    }

    #[test]
    fn modified_equals_unmodified_where_gate_closed() {
        let (field, kernel, coeffs) = setup();
        let mconf = ModificationConfig::default();
        // lambda |a|^2 below eps_inner: gate closed.
        let s = single(20.0, from_coords(&[0.005]));
        let base = rhs_zero_weak_limit(&s, &field, &kernel, &coeffs, AlphaMode::Slaved).unwrap();
        let modi = rhs_modified(&s, &field, &kernel, &coeffs, &mconf).unwrap();
        assert_eq!(base.dlog_lambda[0], modi.dlog_lambda[0]);
        for c in 0..5 {
            assert_eq!(base.da[0][c], modi.da[0][c]);
        }
    }

    #[test]
    fn drift_magnitude_and_direction() {
        let (field, kernel, coeffs) = setup();
        let mconf = ModificationConfig::default();
        // Gate fully open: |a| < eps_inner, lambda |a|^2 > 2 eps_inner.
        let a = from_coords(&[0.006]);
        let s = single(1e4, a);
        let (ea, eal) = cutoffs(&s, &mconf, 0);
        assert_eq!((ea, eal), (1.0, 1.0));
        let base = rhs_zero_weak_limit(&s, &field, &kernel, &coeffs, AlphaMode::Slaved).unwrap();
        let modi = rhs_modified(&s, &field, &kernel, &coeffs, &mconf).unwrap();
        // Extra inward radial velocity of magnitude kappa g4 eps / lambda^2.
        let extra = chart::sub(&modi.da[0], &base.da[0]);
        let expect = coeffs.kappa * coeffs.gamma4 * mconf.eps_strength / 1e8;
        assert!((chart::norm(&extra) - expect).abs() < 1e-12 * expect);
        // Pointing radially inward, i.e. along -a; and along grad K.
        assert!(chart::dot(&extra, &a) < 0.0);
        let jet = field.eval_jet(&a).unwrap();
        assert!(chart::dot(&extra, &jet.grad) > 0.0);
        // Scale equation untouched.
        assert_eq!(base.dlog_lambda[0], modi.dlog_lambda[0]);
    }

    #[test]
    fn drift_supported_on_open_gate_only() {
        let (_, _, coeffs) = setup();
        let mconf = ModificationConfig::default();
        let mut rng = crate::rng::Rng::seed_from(53);
        for _ in 0..500 {
            let a = rng.in_ball(5, 0.05);
            let l = rng.log_range(10.0, 1e6);
            let s = single(l, a);
            let d = drift(&s, &coeffs, &mconf, 0);
            let (ea, eal) = cutoffs(&s, &mconf, 0);
            if ea * eal == 0.0 {
                assert_eq!(chart::norm(&d), 0.0);
            } else {
                assert!(chart::dot(&d, &a) < 0.0, "inward drift");
            }
        }
    }

    #[test]
    fn zero_center_gives_zero_drift() {
        let (field, kernel, coeffs) = setup();
        let mconf = ModificationConfig::default();
        let s = single(1e4, ZERO);
        let modi = rhs_modified(&s, &field, &kernel, &coeffs, &mconf).unwrap();
        assert_eq!(chart::norm(&modi.da[0]), 0.0);
    }

    #[test]
    fn threshold_validation() {
        assert!(ModificationConfig::new(0.1, 0.01).is_ok());
        assert!(matches!(
            ModificationConfig::new(0.01, 0.1),
            Err(ModError::BadThresholds { .. })
        ));
    }
}
