//! Cross-module property tests: derivative consistency against finite
//! differences, rotation equivariance of the field jet, and randomized
//! invariants of the interaction coefficient.

use proptest::prelude::*;
use shadowflow_core::chart::{self, Point, ZERO};
use shadowflow_core::coeffs::{make_coefficients, CoefficientOverrides};
use shadowflow_core::dynamics::{rhs_zero_weak_limit, AlphaMode};
use shadowflow_core::field::CurvatureField;
use shadowflow_core::kernel::{self, Bubble, BubbleState, GreenKernelModel};
use shadowflow_core::rng::Rng;

fn quartic() -> CurvatureField {
    CurvatureField::quartic(5).unwrap()
}

#[test]
fn field_jet_matches_central_differences() {
    // gradK from K, lapK from the divergence of gradK, gradLapK from lapK,
    // at relative error 1e-6 with step 1e-5 for |x| in [0.01, 1).
    let field = quartic();
    let mut rng = Rng::seed_from(101);
    let h = 1e-5;
    for _ in 0..300 {
        let dir = rng.unit_vector(5);
        let r = rng.log_range(0.01, 0.95);
        let x = chart::scaled(&dir, r);
        let jet = field.eval_jet(&x).unwrap();
        for c in 0..5 {
            let mut xp = x;
            xp[c] += h;
            let mut xm = x;
            xm[c] -= h;
            let jp = field.eval_jet(&xp).unwrap();
            let jm = field.eval_jet(&xm).unwrap();
            let fd_grad = (jp.k - jm.k) / (2.0 * h);
            assert!(
                (fd_grad - jet.grad[c]).abs() <= 1e-6 * (1.0 + jet.grad[c].abs()),
                "grad component {c} at |x|={r}"
            );
            let fd_lap_part = (jp.grad[c] - jm.grad[c]) / (2.0 * h);
            let fd_glap = (jp.lap - jm.lap) / (2.0 * h);
            assert!(
                (fd_glap - jet.grad_lap[c]).abs() <= 1e-6 * (1.0 + jet.grad_lap[c].abs()),
                "grad lap component {c}"
            );
            // Accumulate the divergence of gradK.
            if c == 0 {
                let mut div = fd_lap_part;
                for cc in 1..5 {
                    let mut xp2 = x;
                    xp2[cc] += h;
                    let mut xm2 = x;
                    xm2[cc] -= h;
                    div += (field.eval_jet(&xp2).unwrap().grad[cc]
                        - field.eval_jet(&xm2).unwrap().grad[cc])
                        / (2.0 * h);
                }
                assert!(
                    (div - jet.lap).abs() <= 1e-6 * (1.0 + jet.lap.abs()),
                    "divergence of grad vs lap at |x|={r}"
                );
            }
        }
    }
}

#[test]
fn field_jet_rotation_equivariant() {
    // jet(R x) = rotated jet(x) for orthogonal R on the pure quartic field.
    let field = quartic();
    let mut rng = Rng::seed_from(103);
    for _ in 0..50 {
        let r = random_rotation(&mut rng);
        let x = rng.in_ball(5, 0.9);
        let rx = apply(&r, &x);
        let jx = field.eval_jet(&x).unwrap();
        let jrx = field.eval_jet(&rx).unwrap();
        assert!((jx.k - jrx.k).abs() < 1e-12);
        assert!((jx.lap - jrx.lap).abs() < 1e-12);
        let rg = apply(&r, &jx.grad);
        let rgl = apply(&r, &jx.grad_lap);
        for c in 0..5 {
            assert!((rg[c] - jrx.grad[c]).abs() < 1e-12);
            assert!((rgl[c] - jrx.grad_lap[c]).abs() < 1e-12);
        }
    }
}

/// Random orthogonal matrix by Gram-Schmidt on Gaussian columns.
fn random_rotation(rng: &mut Rng) -> [[f64; 5]; 5] {
    let mut m = [[0.0; 5]; 5];
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v = rng.normal();
        }
    }
    // Gram-Schmidt over rows.
    for i in 0..5 {
        for j in 0..i {
            let dot: f64 = (0..5).map(|k| m[i][k] * m[j][k]).sum();
            for k in 0..5 {
                m[i][k] -= dot * m[j][k];
            }
        }
        let norm: f64 = (0..5).map(|k| m[i][k] * m[i][k]).sum::<f64>().sqrt();
        for k in 0..5 {
            m[i][k] /= norm;
        }
    }
    m
}

fn apply(m: &[[f64; 5]; 5], x: &Point) -> Point {
    let mut out = ZERO;
    for (i, row) in m.iter().enumerate() {
        out[i] = (0..5).map(|k| row[k] * x[k]).sum();
    }
    out
}

#[test]
fn interaction_derivatives_match_finite_differences_battery() {
    // Scale and position derivatives of the interaction coefficient vs
    // central differences, relative error 1e-6, over 1000 random pairs.
    let kern = GreenKernelModel::new(5, 0.5);
    let mut rng = Rng::seed_from(107);
    let mut checked = 0;
    while checked < 1000 {
        let mut s = BubbleState::zero_limit(vec![
            Bubble::new(1.0, rng.log_range(10.0, 1e5), rng.in_ball(5, 0.7)),
            Bubble::new(1.0, rng.log_range(10.0, 1e5), rng.in_ball(5, 0.7)),
        ]);
        if kernel::eps(&s, &kern, 0, 1) < 1e-10 {
            continue;
        }
        let h = 1e-6;
        let orig = s.bubbles[0].log_lambda;
        s.bubbles[0].log_lambda = orig + h;
        let ep = kernel::eps(&s, &kern, 0, 1);
        s.bubbles[0].log_lambda = orig - h;
        let em = kernel::eps(&s, &kern, 0, 1);
        s.bubbles[0].log_lambda = orig;
        let fd = (ep - em) / (2.0 * h);
        let an = kernel::dlog_lambda_eps(&s, &kern, 0, 1);
        assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-13));
        let comp = (checked % 5) as usize;
        let oc = s.bubbles[0].center[comp];
        s.bubbles[0].center[comp] = oc + h;
        let ep = kernel::eps(&s, &kern, 0, 1);
        s.bubbles[0].center[comp] = oc - h;
        let em = kernel::eps(&s, &kern, 0, 1);
        s.bubbles[0].center[comp] = oc;
        let fd = (ep - em) / (2.0 * h) / s.lambda(0);
        let an = kernel::grad_a_eps(&s, &kern, 0, 1)[comp];
        assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-13));
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// eps is symmetric and positive for any admissible pair.
    #[test]
    fn eps_symmetric_positive(
        l0 in 1.0f64..1e6,
        l1 in 1.0f64..1e6,
        x0 in -0.7f64..0.7,
        x1 in -0.7f64..0.7,
        y1 in -0.5f64..0.5,
    ) {
        let kern = GreenKernelModel::new(5, 0.5);
        let s = BubbleState::zero_limit(vec![
            Bubble::new(1.0, l0, chart::from_coords(&[x0])),
            Bubble::new(1.0, l1, chart::from_coords(&[x1, y1])),
        ]);
        let e01 = kernel::eps(&s, &kern, 0, 1);
        let e10 = kernel::eps(&s, &kern, 1, 0);
        prop_assert!(e01 >= 0.0);
        prop_assert!((e01 - e10).abs() <= 1e-14 * e01.max(1e-300));
    }

    /// The scale-derivative sum rule holds for any pair: the two scale
    /// derivatives add up to the (negative) kernel coupling term.
    #[test]
    fn eps_scale_derivative_sum_rule(
        l0 in 10.0f64..1e5,
        ratio in 1.0f64..100.0,
        d in 0.0f64..1.0,
    ) {
        let kern = GreenKernelModel::new(5, 0.5);
        let s = BubbleState::zero_limit(vec![
            Bubble::new(1.0, l0, chart::from_coords(&[0.5 * d])),
            Bubble::new(1.0, l0 * ratio, chart::from_coords(&[-0.5 * d])),
        ]);
        let e = kernel::eps(&s, &kern, 0, 1);
        prop_assume!(e > 0.0);
        let sum = -kernel::dlog_lambda_eps(&s, &kern, 0, 1)
            - kernel::dlog_lambda_eps(&s, &kern, 1, 0);
        let expect = 3.0 * e.powf(5.0 / 3.0)
            * s.lambda(0) * s.lambda(1)
            * kern.g(s.center(0), s.center(1));
        prop_assert!((sum - expect).abs() <= 1e-9 * expect.abs().max(1e-300));
    }

    /// Scale positivity is unconditional in log coordinates: any state built
    /// from finite logs has positive scales and amplitudes.
    #[test]
    fn log_coordinates_positive(la in -200.0f64..200.0, ll in -200.0f64..200.0) {
        let b = Bubble { log_alpha: la, log_lambda: ll, center: ZERO };
        prop_assert!(b.alpha() > 0.0);
        prop_assert!(b.lambda() > 0.0);
    }
}

#[test]
fn rhs_difference_quotients_consistent() {
    // Richardson consistency of the flow field in every coordinate
    // direction: the h and h/2 central quotients agree to 1e-5.
    let field = quartic();
    let kern = GreenKernelModel::new(5, 0.5);
    let coeffs = make_coefficients(5, &CoefficientOverrides::default()).unwrap();
    let mut rng = Rng::seed_from(109);
    for _ in 0..200 {
        let s = BubbleState::zero_limit(vec![
            Bubble::new(1.0, rng.log_range(1e2, 1e5), rng.in_ball(5, 0.2)),
            Bubble::new(1.0, rng.log_range(1e2, 1e5), rng.in_ball(5, 0.2)),
        ]);
        let h = 1e-4;
        let probe = |bubble: usize, comp: usize, ds: f64| -> f64 {
            let mut sv = s.clone();
            if comp == 0 {
                sv.bubbles[bubble].log_lambda += ds;
            } else {
                sv.bubbles[bubble].center[comp - 1] += ds;
            }
            let d = rhs_zero_weak_limit(&sv, &field, &kern, &coeffs, AlphaMode::Slaved).unwrap();
            d.dlog_lambda[0] + d.da[1][0]
        };
        for bubble in 0..2 {
            for comp in 0..3 {
                let d1 = (probe(bubble, comp, h) - probe(bubble, comp, -h)) / (2.0 * h);
                let d2 = (probe(bubble, comp, 0.5 * h) - probe(bubble, comp, -0.5 * h)) / h;
                assert!(
                    (d1 - d2).abs() <= 1e-5 * (1.0 + d2.abs()),
                    "bubble {bubble} comp {comp}: {d1} vs {d2}"
                );
            }
        }
    }
}
