//! Adaptive Simpson quadrature on finite intervals and on `[0, inf)`.

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    /// Accumulated local error estimate (conservative).
    pub err: f64,
    pub evals: usize,
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    err_acc: &mut f64,
    evals: &mut usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        *err_acc += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    adapt(
        f,
        a,
        m,
        fa,
        flm,
        fm,
        left,
        0.5 * tol,
        depth - 1,
        err_acc,
        evals,
    ) + adapt(
        f,
        m,
        b,
        fm,
        frm,
        fb,
        right,
        0.5 * tol,
        depth - 1,
        err_acc,
        evals,
    )
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> QuadResult {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let mut evals = 3;
    let whole = simpson(fa, fm, fb, b - a);
    let mut err = 0.0;
    let value = adapt(
        &f, a, b, fa, fm, fb, whole, tol, max_depth, &mut err, &mut evals,
    );
    QuadResult { value, err, evals }
}

/// Integrates `f(r)` over `[0, inf)` through the substitution `r = u/(1-u)`.
///
/// The integrand must decay fast enough that `f(r) * (1-u)^{-2} -> 0` as
/// `u -> 1`; every bubble-constant integrand here decays at least like
/// `r^{-(n+1)}` with `n >= 3`.
pub fn integrate_radial<F: Fn(f64) -> f64>(f: F, tol: f64, max_depth: usize) -> QuadResult {
    let g = move |u: f64| {
        if u >= 1.0 - 1e-14 {
            return 0.0;
        }
        let one_minus = 1.0 - u;
        let r = u / one_minus;
        f(r) / (one_minus * one_minus)
    };
    integrate(g, 0.0, 1.0, tol, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| x * x, 0.0, 1.0, 1e-12, 40);
        assert!((q.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_like_tail() {
        // int_0^inf e^{-r} dr = 1
        let q = integrate_radial(|r| (-r).exp(), 1e-11, 48);
        assert!((q.value - 1.0).abs() < 1e-9, "{}", q.value);
    }

    #[test]
    fn heavy_tail() {
        // int_0^inf (1+r^2)^{-2} dr = pi/4
        let q = integrate_radial(|r| (1.0 + r * r).powi(-2), 1e-11, 48);
        assert!((q.value - core::f64::consts::PI / 4.0).abs() < 1e-9);
    }
}
