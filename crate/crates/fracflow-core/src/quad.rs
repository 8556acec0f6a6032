//! Adaptive 1d quadrature used by the nonlinearity, the tail completions,
//! and the modulus inequality sweeps.

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
///
/// The integrand may have isolated kinks; the recursion splits until the
/// local Richardson estimate is below the per-interval budget.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Integrate `f` over `[a, inf)` where `f(x) ~ coeff * x^(-p)` for large `x`
/// with `p > 1`: adaptive quadrature out to `cut`, power-law completion after.
///
/// `coeff` is re-estimated at the cut so the completion matches the integrand
/// actually seen there.
pub fn adaptive_with_power_tail<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    cut: f64,
    p: f64,
    tol: f64,
) -> f64 {
    debug_assert!(p > 1.0);
    let mut total = 0.0;
    // Split geometrically so the adaptive pass never sees many decades at once.
    let mut lo = a;
    while lo < cut {
        let hi = (lo.max(1e-12) * 4.0).min(cut);
        let hi = if hi <= lo { cut } else { hi };
        total += adaptive_simpson(f, lo, hi, tol);
        lo = hi;
    }
    let coeff = f(cut) * cut.powf(p);
    total + coeff * cut.powf(1.0 - p) / (p - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let v = adaptive_simpson(&|x: f64| x * x * x, 0.0, 2.0, 1e-12);
        assert_relative_eq!(v, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn kinked_integrand() {
        let v = adaptive_simpson(&|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-10);
        // \int_0^1 |x - 0.3| dx = 0.29
        assert_relative_eq!(v, 0.29, max_relative = 1e-8);
    }

    #[test]
    fn power_tail_matches_closed_form() {
        // \int_1^inf x^{-2.5} dx = 1/1.5
        let v = adaptive_with_power_tail(&|x: f64| x.powf(-2.5), 1.0, 50.0, 2.5, 1e-11);
        assert_relative_eq!(v, 1.0 / 1.5, max_relative = 1e-9);
    }
}
