//! Right-hand sides of the reduced flows.
//!
//! In log coordinates the zero-weak-limit flow reads, per bubble `i`,
//!
//! ```text
//! -d/dt ln(lambda_i) = kappa [ g1 H(a_i)/lambda_i^{n-2}
//!                            + g2 lapK_i /(K_i lambda_i^2)
//!                            - bL sum_{j != i} (alpha_j/alpha_i) li d_li eps_ij ]
//! lambda_i da_i/dt   = kappa [ g3 gradK_i /(K_i lambda_i)
//!                            + gL gradLapK_i /(K_i lambda_i^3)
//!                            + bA sum_{j != i} (alpha_j/alpha_i) (1/li) grad_{a_i} eps_ij ]
//! ```
//!
//! with all slowly varying correction factors set to one; the dropped error
//! terms are modeled by the integrator's explicit perturbation channel. The
//! amplitude is slaved to its equilibrium `K_i alpha_i^{4/(n-2)} = 4n(n-1)/kappa`
//! by default; dynamic amplitudes evolve through the leading amplitude
//! testing divided by the diagonal of the testing matrix.

use crate::chart::{self, Point, ZERO};
use crate::coeffs::CoefficientSet;
use crate::field::{CurvatureField, FieldError};
use crate::kernel::{self, BubbleState, GreenKernelModel, WeakLimit};
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DynError {
    #[error("field evaluation failed: {0}")]
    Field(#[from] FieldError),
    #[error("curvature must be positive at every bubble center, got K = {k} at bubble {bubble}")]
    NonPositiveCurvature { bubble: usize, k: f64 },
    #[error("operation requires {expected} mode")]
    ModeMismatch { expected: &'static str },
}

/// Amplitude handling of the zero-weak-limit flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaMode {
    /// Amplitudes pinned to the equilibrium of the leading amplitude bracket.
    Slaved,
    /// Amplitudes evolve by the leading amplitude testing.
    Dynamic,
}

/// Time derivative of a configuration in `(ln alpha, ln lambda, a)` coordinates.
#[derive(Clone, Debug)]
pub struct StateDerivative {
    pub dlog_alpha: Vec<f64>,
    pub dlog_lambda: Vec<f64>,
    pub da: Vec<Point>,
}

impl StateDerivative {
    pub fn zero(p: usize) -> Self {
        StateDerivative {
            dlog_alpha: vec![0.0; p],
            dlog_lambda: vec![0.0; p],
            da: vec![ZERO; p],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.dlog_alpha.iter().all(|v| v.is_finite())
            && self.dlog_lambda.iter().all(|v| v.is_finite())
            && self.da.iter().all(chart::is_finite)
    }
}

/// Leading testings of the first variation against the amplitude, scale and
/// center directions.
#[derive(Clone, Debug)]
pub struct SigmaTriple {
    pub sigma1: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub sigma3: Vec<Point>,
}

/// Equilibrium amplitudes `alpha_i = (4n(n-1) / (kappa K(a_i)))^{(n-2)/4}`.
pub fn equilibrium_alpha(
    state: &BubbleState,
    field: &CurvatureField,
    coeffs: &CoefficientSet,
) -> Result<Vec<f64>, DynError> {
    let mut out = Vec::with_capacity(state.p());
    for i in 0..state.p() {
        let k = field.k(state.center(i))?;
        if k <= 0.0 {
            return Err(DynError::NonPositiveCurvature { bubble: i, k });
        }
        let nf = coeffs.n as f64;
        out.push((coeffs.four_n_n1() / (coeffs.kappa * k)).powf((nf - 2.0) / 4.0));
    }
    Ok(out)
}

/// Amplitude bracket `kappa alpha^{4/(n-2)} K - 4n(n-1)`; zero at equilibrium.
pub fn amplitude_bracket(alpha: f64, k: f64, coeffs: &CoefficientSet) -> f64 {
    let nf = coeffs.n as f64;
    coeffs.kappa * alpha.powf(4.0 / (nf - 2.0)) * k - coeffs.four_n_n1()
}

/// Leading-order testings for the zero-weak-limit configuration.
///
/// `sigma1` carries the amplitude disequilibrium (own bracket weighted by
/// `c1`, cross brackets and the plain interaction sum weighted by `b1`);
/// `sigma2` and `sigma3` carry the mass/Laplacian/gradient structure with the
/// aggregated coefficients, normalized so that the flow right-hand sides are
/// `kappa sigma / alpha`.
pub fn sigma_leading(
    state: &BubbleState,
    field: &CurvatureField,
    kernel: &GreenKernelModel,
    coeffs: &CoefficientSet,
) -> Result<SigmaTriple, DynError> {
    if !state.is_zero_limit() {
        return Err(DynError::ModeMismatch {
            expected: "zero-weak-limit",
        });
    }
    let p = state.p();
    let nf = coeffs.n as f64;
    let b1 = coeffs.b1;
    let mut sigma1 = vec![0.0; p];
    let mut sigma2 = vec![0.0; p];
    let mut sigma3 = vec![ZERO; p];
    let mut jets = Vec::with_capacity(p);
    for i in 0..p {
        let jet = field.eval_jet(state.center(i))?;
        if jet.k <= 0.0 {
            return Err(DynError::NonPositiveCurvature {
                bubble: i,
                k: jet.k,
            });
        }
        jets.push(jet);
    }
    for i in 0..p {
        let ai = state.alpha(i);
        let li = state.lambda(i);
        let jet = &jets[i];

        let mut s1 = coeffs.c1 * ai * amplitude_bracket(ai, jet.k, coeffs);
        for j in 0..p {
            if j == i {
                continue;
            }
            let e = kernel::eps(state, kernel, i, j);
            let aj = state.alpha(j);
            s1 += b1 * aj * amplitude_bracket(aj, jets[j].k, coeffs) * e;
            s1 += b1 * coeffs.kappa * ai.powf(4.0 / (nf - 2.0)) * jet.k * aj * e;
        }
        sigma1[i] = s1;

        let mut s2 = coeffs.gamma1 * kernel.regular_part(state.center(i)) / li.powf(nf - 2.0)
            + coeffs.gamma2 * jet.lap / (jet.k * li * li);
        let mut s3 = chart::scaled(&jet.grad, coeffs.gamma3 / (jet.k * li));
        chart::axpy(
            &mut s3,
            coeffs.gamma_nabla_lap / (jet.k * li * li * li),
            &jet.grad_lap,
        );
        for j in 0..p {
            if j == i {
                continue;
            }
            let ratio = state.alpha(j) / ai;
            s2 -= coeffs.b_lambda * ratio * kernel::dlog_lambda_eps(state, kernel, i, j);
            chart::axpy(
                &mut s3,
                coeffs.b_a * ratio,
                &kernel::grad_a_eps(state, kernel, i, j),
            );
        }
        sigma2[i] = ai * s2;
        sigma3[i] = chart::scaled(&s3, ai);
    }
    Ok(SigmaTriple {
        sigma1,
        sigma2,
        sigma3,
    })
}

/// Zero-weak-limit flow.
///
/// In slaved mode the amplitudes used on the right-hand side are the
/// equilibrium values regardless of the stored ones and `dlog_alpha = 0`;
/// keeping the stored amplitudes on the equilibrium manifold is the
/// integrator's projection hook.
pub fn rhs_zero_weak_limit(
    state: &BubbleState,
    field: &CurvatureField,
    kernel: &GreenKernelModel,
    coeffs: &CoefficientSet,
    alpha_mode: AlphaMode,
) -> Result<StateDerivative, DynError> {
    if !state.is_zero_limit() {
        return Err(DynError::ModeMismatch {
            expected: "zero-weak-limit",
        });
    }
    let p = state.p();
    let alphas: Vec<f64> = match alpha_mode {
        AlphaMode::Slaved => equilibrium_alpha(state, field, coeffs)?,
        AlphaMode::Dynamic => (0..p).map(|i| state.alpha(i)).collect(),
    };
    let mut d = StateDerivative::zero(p);
    let nf = coeffs.n as f64;
    for i in 0..p {
        let jet = field.eval_jet(state.center(i))?;
        if jet.k <= 0.0 {
            return Err(DynError::NonPositiveCurvature {
                bubble: i,
                k: jet.k,
            });
        }
        let li = state.lambda(i);
        let mut neg_dlog_lambda = coeffs.gamma1 * kernel.regular_part(state.center(i))
            / li.powf(nf - 2.0)
            + coeffs.gamma2 * jet.lap / (jet.k * li * li);
        let mut lambda_adot = chart::scaled(&jet.grad, coeffs.gamma3 / (jet.k * li));
        chart::axpy(
            &mut lambda_adot,
            coeffs.gamma_nabla_lap / (jet.k * li * li * li),
            &jet.grad_lap,
        );
        for j in 0..p {
            if j == i {
                continue;
            }
            let ratio = alphas[j] / alphas[i];
            neg_dlog_lambda -=
                coeffs.b_lambda * ratio * kernel::dlog_lambda_eps(state, kernel, i, j);
            chart::axpy(
                &mut lambda_adot,
                coeffs.b_a * ratio,
                &kernel::grad_a_eps(state, kernel, i, j),
            );
        }
        d.dlog_lambda[i] = -coeffs.kappa * neg_dlog_lambda;
        d.da[i] = chart::scaled(&lambda_adot, coeffs.kappa / li);
    }
    if alpha_mode == AlphaMode::Dynamic {
        let sigma = sigma_leading(state, field, kernel, coeffs)?;
        for i in 0..p {
            d.dlog_alpha[i] =
                coeffs.kappa * sigma.sigma1[i] / (coeffs.four_n_n1() * alphas[i] * coeffs.c1);
        }
    }
    Ok(d)
}

/// Positive-weak-limit flow: the mass/Laplacian pair of the scale equation is
/// replaced by the weak-limit coupling and the center equation keeps only the
/// gradient and interaction terms.
pub fn rhs_positive_weak_limit(
    state: &BubbleState,
    field: &CurvatureField,
    kernel: &GreenKernelModel,
    coeffs: &CoefficientSet,
) -> Result<StateDerivative, DynError> {
    let (global_alpha, omega) = match &state.mode {
        WeakLimit::Positive {
            global_alpha,
            omega,
        } => (*global_alpha, omega),
        WeakLimit::Zero => {
            return Err(DynError::ModeMismatch {
                expected: "positive-weak-limit",
            })
        }
    };
    let p = state.p();
    let mut d = StateDerivative::zero(p);
    let nf = coeffs.n as f64;
    for i in 0..p {
        let jet = field.eval_jet(state.center(i))?;
        if jet.k <= 0.0 {
            return Err(DynError::NonPositiveCurvature {
                bubble: i,
                k: jet.k,
            });
        }
        let li = state.lambda(i);
        let ai = state.alpha(i);
        let mut neg_dlog_lambda =
            coeffs.gamma1 * global_alpha * omega[i] / (ai * jet.k * li.powf((nf - 2.0) / 2.0));
        let mut lambda_adot = chart::scaled(&jet.grad, coeffs.gamma3 / (jet.k * li));
        for j in 0..p {
            if j == i {
                continue;
            }
            let ratio = state.alpha(j) / ai;
            neg_dlog_lambda -=
                coeffs.b_lambda * ratio * kernel::dlog_lambda_eps(state, kernel, i, j);
            chart::axpy(
                &mut lambda_adot,
                coeffs.b_a * ratio,
                &kernel::grad_a_eps(state, kernel, i, j),
            );
        }
        d.dlog_lambda[i] = -coeffs.kappa * neg_dlog_lambda;
        d.da[i] = chart::scaled(&lambda_adot, coeffs.kappa / li);
    }
    Ok(d)
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

    fn single(lambda: f64, a: Point) -> BubbleState {
        BubbleState::zero_limit(alloc::vec![Bubble::new(1.0, lambda, a)])
    }

    #[test]
    fn equilibrium_alpha_value_and_residual() {
        let (field, _, coeffs) = setup();
        let s = single(1e4, ZERO);
        let alpha = equilibrium_alpha(&s, &field, &coeffs).unwrap()[0];
        // K = 1, default kappa ~ 79.0: alpha = (80/kappa)^{3/4} ~ 1.0095
        let expect = (80.0 / coeffs.kappa).powf(0.75);
        assert!((alpha - expect).abs() < 1e-14);
        assert!((alpha - 1.0095).abs() < 1e-3);
        assert!(amplitude_bracket(alpha, 1.0, &coeffs).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_alpha_power_law() {
        let (field, _, coeffs) = setup();
        // alpha scales like K^{-3/4} between centers with different K.
        let s0 = single(1e4, ZERO);
        let a0 = equilibrium_alpha(&s0, &field, &coeffs).unwrap()[0];
        let x = from_coords(&[0.3]);
        let kx = field.k(&x).unwrap();
        let s1 = single(1e4, x);
        let a1 = equilibrium_alpha(&s1, &field, &coeffs).unwrap()[0];
        assert!((a1 / a0 - kx.powf(-0.75)).abs() < 1e-12);
    }

    #[test]
    fn exact_kappa_80_gives_unit_alpha() {
        let (field, _, _) = setup();
        let ov = CoefficientOverrides {
            kappa: Some(80.0),
            ..Default::default()
        };
        let coeffs = make_coefficients(5, &ov).unwrap();
        let s = single(1e4, ZERO);
        let alpha = equilibrium_alpha(&s, &field, &coeffs).unwrap()[0];
        assert!((alpha - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sigma_at_origin_equilibrium() {
        // Single bubble at the maximum with equilibrium amplitude: only the
        // mass term of sigma2 survives.
        let (field, kernel, coeffs) = setup();
        let mut s = single(100.0, ZERO);
        let alpha = equilibrium_alpha(&s, &field, &coeffs).unwrap()[0];
        s.bubbles[0].log_alpha = alpha.ln();
        let sig = sigma_leading(&s, &field, &kernel, &coeffs).unwrap();
        assert!(sig.sigma1[0].abs() < 1e-10);
        assert!(chart::norm(&sig.sigma3[0]) == 0.0);
        let expect = coeffs.gamma1 * alpha * kernel.regular_part(&ZERO) / 100.0f64.powi(3);
        assert!((sig.sigma2[0] - expect).abs() < 1e-18);
        assert!(sig.sigma2[0] > 0.0);
    }

    #[test]
    fn sigma3_leading_terms_off_origin() {
        // sigma3 = alpha [ g3 (-4|a|^2 a)/(K l) + gL (-56 a)/(K l^3) ] for the
        // quartic field at n = 5, checked against an independent expansion.
        let (field, kernel, coeffs) = setup();
        let a = from_coords(&[0.12, -0.07, 0.04]);
        let mut s = single(500.0, a);
        let alpha = equilibrium_alpha(&s, &field, &coeffs).unwrap()[0];
        s.bubbles[0].log_alpha = alpha.ln();
        let sig = sigma_leading(&s, &field, &kernel, &coeffs).unwrap();
        let k = 1.0 - chart::norm2(&a).powi(2);
        let l = 500.0;
        let mut expect = chart::scaled(&a, -4.0 * chart::norm2(&a) * coeffs.gamma3 / (k * l));
        chart::axpy(
            &mut expect,
            -56.0 * coeffs.gamma_nabla_lap / (k * l * l * l),
            &a,
        );
        for c in 0..5 {
            let e = alpha * expect[c];
            assert!(
                (sig.sigma3[0][c] - e).abs() <= 1e-12 * e.abs().max(1e-12),
                "component {c}"
            );
        }
    }

    #[test]
    fn two_bubble_sigma2_interaction_sign() {
        // Equal bubbles, equal scales, separated centers: the own-scale
        // derivative is negative, so the interaction part of sigma2 is
        // positive (stabilizing).
        let (field, kernel, coeffs) = setup();
        let s = BubbleState::zero_limit(alloc::vec![
            Bubble::new(1.0, 300.0, from_coords(&[0.05])),
            Bubble::new(1.0, 300.0, from_coords(&[-0.05])),
        ]);
        let sig = sigma_leading(&s, &field, &kernel, &coeffs).unwrap();
        let e = kernel::dlog_lambda_eps(&s, &kernel, 0, 1);
        assert!(e < 0.0);
        let jet = field.eval_jet(s.center(0)).unwrap();
        let own = s.alpha(0)
            * (coeffs.gamma1 * kernel.regular_part(s.center(0)) / 300.0f64.powi(3)
                + coeffs.gamma2 * jet.lap / (jet.k * 300.0 * 300.0));
        assert!(sig.sigma2[0] - own > 0.0);
    }

    #[test]
    fn rhs_at_origin_shrinks_scale() {
        let (field, kernel, coeffs) = setup();
        let s = single(50.0, ZERO);
        let d = rhs_zero_weak_limit(&s, &field, &kernel, &coeffs, AlphaMode::Slaved).unwrap();
        let expect = coeffs.kappa * coeffs.gamma1 * 0.5 / 50.0f64.powi(3);
        assert!((-d.dlog_lambda[0] - expect).abs() < 1e-15);
        assert_eq!(chart::norm(&d.da[0]), 0.0);
        assert_eq!(d.dlog_alpha[0], 0.0);
    }

    #[test]
    fn rhs_divergence_regime_grows_scale() {
        // lambda |a|^2 large: the Laplacian term dominates the mass term.
        let (field, kernel, coeffs) = setup();
        let s = single(1e4, from_coords(&[0.05]));
        let d = rhs_zero_weak_limit(&s, &field, &kernel, &coeffs, AlphaMode::Slaved).unwrap();
        assert!(d.dlog_lambda[0] > 0.0);
        let approx = coeffs.kappa * coeffs.gamma2 * 28.0 * 0.0025 / 1e8;
        assert!((d.dlog_lambda[0] - approx).abs() < 0.01 * approx);
    }

    #[test]
    fn rhs_centers_drift_inward() {
        let (field, kernel, coeffs) = setup();
        let a = from_coords(&[0.05, 0.02]);
        let s = single(1e4, a);
        let d = rhs_zero_weak_limit(&s, &field, &kernel, &coeffs, AlphaMode::Slaved).unwrap();
        // d/dt |a|^2 = 2 <a, da> < 0
        assert!(chart::dot(&a, &d.da[0]) < 0.0);
    }

    #[test]
    fn scale_sign_dichotomy() {
        let (field, kernel, coeffs) = setup();
        let mut rng = crate::rng::Rng::seed_from(41);
        for _ in 0..300 {
            let a = rng.in_ball(5, 0.3);
            let l = rng.log_range(10.0, 1e6);
            let s = single(l, a);
            let d = rhs_zero_weak_limit(&s, &field, &kernel, &coeffs, AlphaMode::Slaved).unwrap();
            let k = field.k(&a).unwrap();
            let lhs = coeffs.gamma2 * 28.0 * chart::norm2(&a) * l / k;
            let rhs = coeffs.gamma1 * kernel.regular_part(&a);
            if lhs > rhs {
                assert!(d.dlog_lambda[0] > 0.0);
            } else if lhs < rhs {
                assert!(d.dlog_lambda[0] < 0.0);
            }
        }
    }

    #[test]
    fn dynamic_alpha_fixed_point_is_the_equilibrium() {
        let (field, kernel, coeffs) = setup();
        let eq = {
            let s = single(200.0, ZERO);
            equilibrium_alpha(&s, &field, &coeffs).unwrap()[0]
        };
        let mut s = single(200.0, ZERO);
        s.bubbles[0].log_alpha = (eq * 1.05).ln();
        let d_hi = rhs_zero_weak_limit(&s, &field, &kernel, &coeffs, AlphaMode::Dynamic).unwrap();
        s.bubbles[0].log_alpha = (eq * 0.95).ln();
        let d_lo = rhs_zero_weak_limit(&s, &field, &kernel, &coeffs, AlphaMode::Dynamic).unwrap();
        s.bubbles[0].log_alpha = eq.ln();
        let d_eq = rhs_zero_weak_limit(&s, &field, &kernel, &coeffs, AlphaMode::Dynamic).unwrap();
        assert!(d_eq.dlog_alpha[0].abs() < 1e-12);
        assert!(
            d_hi.dlog_alpha[0] * d_lo.dlog_alpha[0] < 0.0,
            "amplitude testing changes sign across the fixed point"
        );
    }

    #[test]
    fn positive_weak_limit_always_shrinks_single_bubble() {
        let (field, kernel, coeffs) = setup();
        let mut s = single(100.0, ZERO);
        s.mode = WeakLimit::Positive {
            global_alpha: 1.0,
            omega: alloc::vec![1.0],
        };
        let d = rhs_positive_weak_limit(&s, &field, &kernel, &coeffs).unwrap();
        let expect = coeffs.kappa * coeffs.gamma1 * 1.0 / (s.alpha(0) * 100.0f64.powf(1.5));
        assert!((-d.dlog_lambda[0] - expect).abs() < 1e-15);
        assert!(d.dlog_lambda[0] < 0.0);
    }

    #[test]
    fn omega_terms_vanish_in_limit() {
        let (field, kernel, coeffs) = setup();
        let mk = |omega: f64| {
            let mut s = BubbleState::zero_limit(alloc::vec![
                Bubble::new(1.0, 100.0, from_coords(&[0.02])),
                Bubble::new(1.0, 400.0, from_coords(&[-0.02])),
            ]);
            s.mode = WeakLimit::Positive {
                global_alpha: 1.0,
                omega: alloc::vec![omega, omega],
            };
            rhs_positive_weak_limit(&s, &field, &kernel, &coeffs).unwrap()
        };
        let tiny = mk(1e-12);
        // With omega -> 0 only the interaction part remains.
        let s = BubbleState::zero_limit(alloc::vec![
            Bubble::new(1.0, 100.0, from_coords(&[0.02])),
            Bubble::new(1.0, 400.0, from_coords(&[-0.02])),
        ]);
        let pure = coeffs.kappa
            * coeffs.b_lambda
            * (s.alpha(1) / s.alpha(0))
            * kernel::dlog_lambda_eps(&s, &kernel, 0, 1);
        assert!((tiny.dlog_lambda[0] - pure).abs() < 1e-9 * pure.abs().max(1e-12));
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let (field, kernel, coeffs) = setup();
        let s = single(100.0, ZERO);
        assert!(matches!(
            rhs_positive_weak_limit(&s, &field, &kernel, &coeffs),
            Err(DynError::ModeMismatch { .. })
        ));
        let mut s2 = single(100.0, ZERO);
        s2.mode = WeakLimit::Positive {
            global_alpha: 1.0,
            omega: alloc::vec![1.0],
        };
        assert!(matches!(
            rhs_zero_weak_limit(&s2, &field, &kernel, &coeffs, AlphaMode::Slaved),
            Err(DynError::ModeMismatch { .. })
        ));
    }

    #[test]
    fn rhs_smooth_in_log_scale_and_center() {
        // Difference quotients of the rhs at steps h and h/2 agree, i.e. the
        // field is differentiable in the integration coordinates.
        let (field, kernel, coeffs) = setup();
        let mut rng = crate::rng::Rng::seed_from(43);
        for _ in 0..50 {
            let a = rng.in_ball(5, 0.2);
            let l = rng.log_range(100.0, 1e5);
            let s = single(l, a);
            let h = 1e-4;
            let probe = |ds: f64, comp: usize| {
                let mut sv = s.clone();
                if comp == 0 {
                    sv.bubbles[0].log_lambda += ds;
                } else {
                    sv.bubbles[0].center[comp - 1] += ds;
                }
                rhs_zero_weak_limit(&sv, &field, &kernel, &coeffs, AlphaMode::Slaved)
                    .unwrap()
                    .dlog_lambda[0]
            };
            for comp in 0..3 {
                let d1 = (probe(h, comp) - probe(-h, comp)) / (2.0 * h);
                let d2 = (probe(0.5 * h, comp) - probe(-0.5 * h, comp)) / h;
                assert!(
                    (d1 - d2).abs() <= 1e-5 * (1.0 + d2.abs()),
                    "comp {comp}: {d1} vs {d2}"
                );
            }
        }
    }
}
