//! Monte-Carlo verification of the function-space integrals behind the
//! reduced model, on the flat bubble profile
//! `phi_{a,lambda}(x) = (lambda / (1 + lambda^2 |x-a|^2))^{(n-2)/2}`.
//!
//! Two dual paths are kept independent on purpose: the bubble constants are
//! re-estimated with a multivariate Cauchy proposal and compared against the
//! quadrature module, and the pairwise interaction integral
//! `int phi_i^{(n+2)/(n-2)} phi_j` is estimated by importance sampling from
//! the equal-weight mixture of the two bubbles' normalized
//! `2n/(n-2)`-power densities and compared against `b1 eps_ij`.

use shadowflow_core::chart::{self, Point};
use shadowflow_core::coeffs::{bubble_constant, sphere_area, ConstantKind};
use shadowflow_core::kernel::{self, Bubble, BubbleState, GreenKernelModel};
use shadowflow_core::rng::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QvError {
    #[error("relative standard error {got:.2e} exceeds {want:.2e} after {samples} samples; increase the sample count")]
    Precision { got: f64, want: f64, samples: usize },
    #[error("configurations must be well separated (eps_ij = {0} > 0.1)")]
    NotSeparated(f64),
    #[error("{0}")]
    Unsupported(String),
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Flat bubble profile.
pub fn flat_bubble(x: &Point, a: &Point, lambda: f64, n: usize) -> f64 {
    let d2 = chart::norm2(&chart::sub(x, a));
    (lambda / (1.0 + lambda * lambda * d2)).powf((n as f64 - 2.0) / 2.0)
}

/// One bubble configuration of the interaction estimate.
#[derive(Clone, Copy, Debug)]
pub struct BubbleSpec {
    pub center: Point,
    pub lambda: f64,
}

/// Samples the normalized `2n/(n-2)`-power density of a flat bubble:
/// `x = a + z / lambda` with `|z|^2/(1+|z|^2) ~ Beta(n/2, n/2)` and a uniform
/// direction.
fn sample_bubble_density(rng: &mut Rng, spec: &BubbleSpec, n: usize) -> Point {
    // Beta(n/2, n/2) by rejection from the uniform envelope:
    // accept u with probability (4u(1-u))^{(n-2)/2}.
    let exponent = (n as f64 - 2.0) / 2.0;
    let u = loop {
        let u = rng.uniform();
        if rng.uniform() < (4.0 * u * (1.0 - u)).powf(exponent) {
            break u;
        }
    };
    let r = (u / (1.0 - u)).sqrt();
    let dir = rng.unit_vector(n);
    let mut x = spec.center;
    chart::axpy(&mut x, r / spec.lambda, &dir);
    x
}

/// Density of the sampler above: `phi^{2n/(n-2)}(x) / c1`.
fn bubble_density(x: &Point, spec: &BubbleSpec, n: usize, c1: f64) -> f64 {
    let d2 = chart::norm2(&chart::sub(x, &spec.center));
    let lam = spec.lambda;
    (lam / (1.0 + lam * lam * d2)).powi(n as i32) / c1
}

/// Interaction integral `int phi_i^{(n+2)/(n-2)} phi_j` by importance
/// sampling, together with its ratio to the leading closed form `b1 eps_ij`
/// (flat kernel, so `eps` uses the pure quadratic model).
pub fn verify_interaction(
    i_spec: &BubbleSpec,
    j_spec: &BubbleSpec,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<(McEstimate, f64), QvError> {
    let c1 =
        bubble_constant(ConstantKind::C1, n).map_err(|e| QvError::Unsupported(e.to_string()))?;
    let b1 =
        bubble_constant(ConstantKind::B1, n).map_err(|e| QvError::Unsupported(e.to_string()))?;
    let flat = GreenKernelModel::flat(n);
    let state = BubbleState::zero_limit(vec![
        Bubble::new(1.0, i_spec.lambda, i_spec.center),
        Bubble::new(1.0, j_spec.lambda, j_spec.center),
    ]);
    let eps = kernel::eps(&state, &flat, 0, 1);
    if eps > 0.1 {
        return Err(QvError::NotSeparated(eps));
    }

    let mut rng = Rng::seed_from(seed);
    let exp_i = (n as f64 + 2.0) / (n as f64 - 2.0);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for k in 0..samples {
        let spec = if k % 2 == 0 { i_spec } else { j_spec };
        let x = sample_bubble_density(&mut rng, spec, n);
        let q = 0.5 * bubble_density(&x, i_spec, n, c1) + 0.5 * bubble_density(&x, j_spec, n, c1);
        let f = flat_bubble(&x, &i_spec.center, i_spec.lambda, n).powf(exp_i)
            * flat_bubble(&x, &j_spec.center, j_spec.lambda, n);
        let w = f / q;
        sum += w;
        sum2 += w * w;
    }
    let mean = sum / samples as f64;
    let var = (sum2 / samples as f64 - mean * mean).max(0.0) / samples as f64;
    let est = McEstimate {
        value: mean,
        std_err: var.sqrt(),
        samples,
        seed,
    };
    if est.std_err > 0.05 * est.value.abs() {
        return Err(QvError::Precision {
            got: est.std_err / est.value.abs(),
            want: 0.05,
            samples,
        });
    }
    Ok((est, est.value / (b1 * eps)))
}

/// Bubble-constant integrals re-estimated with a multivariate Cauchy
/// proposal (`x = z/|g|`, normalization `Gamma((n+1)/2) / pi^{(n+1)/2}`).
pub fn verify_constant(
    kind: ConstantKind,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<McEstimate, QvError> {
    sphere_area(n).map_err(|e| QvError::Unsupported(e.to_string()))?;
    let nf = n as f64;
    let norm_const = gamma_half_int(n + 1) / core::f64::consts::PI.powf((nf + 1.0) / 2.0);
    let integrand = move |r2: f64| -> f64 {
        let w = 1.0 + r2;
        match kind {
            ConstantKind::C1 => w.powf(-nf),
            ConstantKind::C2 => {
                let d = r2 - 1.0;
                (nf - 2.0) * (nf - 2.0) / 4.0 * d * d * w.powf(-(nf + 2.0))
            }
            ConstantKind::C3 => (nf - 2.0) * (nf - 2.0) / nf * r2 * w.powf(-(nf + 2.0)),
            ConstantKind::B1 => w.powf(-(nf + 2.0) / 2.0),
        }
    };
    let mut rng = Rng::seed_from(seed);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..samples {
        let mut z = chart::ZERO;
        for slot in z.iter_mut().take(n) {
            *slot = rng.normal();
        }
        let g = rng.normal().abs().max(1e-300);
        let x = chart::scaled(&z, 1.0 / g);
        let r2 = chart::norm2(&x);
        let density = norm_const * (1.0 + r2).powf(-(nf + 1.0) / 2.0);
        let w = integrand(r2) / density;
        sum += w;
        sum2 += w * w;
    }
    let mean = sum / samples as f64;
    let var = (sum2 / samples as f64 - mean * mean).max(0.0) / samples as f64;
    Ok(McEstimate {
        value: mean,
        std_err: var.sqrt(),
        samples,
        seed,
    })
}

/// Consistency of the two constant paths in standard errors.
pub fn constant_consistency(kind: ConstantKind, n: usize, est: &McEstimate) -> (f64, f64) {
    let quad = bubble_constant(kind, n).expect("dimension checked upstream");
    ((est.value - quad).abs() / est.std_err.max(1e-300), quad)
}

/// `Gamma(k/2)` for positive integer `k`.
fn gamma_half_int(k: usize) -> f64 {
    if k % 2 == 0 {
        let mut v = 1.0;
        for m in 2..(k / 2) {
            v *= m as f64;
        }
        v
    } else {
        let mut v = core::f64::consts::PI.sqrt();
        let mut a = 0.5;
        while (2.0 * a) as usize != k {
            v *= a;
            a += 1.0;
        }
        v
    }
}
