//! Composite Simpson quadrature.

/// Composite Simpson rule on `[a, b]` with `intervals` panels (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = (intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|k| {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            w * f(a + k as f64 * h)
        })
        .sum();
    (f(a) + inner + f(b)) * h / 3.0
}

/// Doubles the panel count until successive Simpson estimates agree to
/// `rel_tol` (Richardson-corrected), starting from 64 panels.
pub fn simpson_converged<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut n = 64;
    let mut prev = simpson(&f, a, b, n);
    loop {
        n *= 2;
        let next = simpson(&f, a, b, n);
        let err = (next - prev).abs() / 15.0;
        if err <= rel_tol * next.abs().max(f64::MIN_POSITIVE) || n >= 1 << 20 {
            return next + (next - prev) / 15.0;
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn converges_on_smooth_integrand() {
        let v = simpson_converged(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-10);
        assert!((v - 2.0).abs() < 1e-10);
        let g = simpson_converged(|x: f64| (-x * x).exp(), -6.0, 6.0, 1e-10);
        assert!((g - std::f64::consts::PI.sqrt()).abs() < 1e-9);
        assert_eq!(simpson_converged(|x| x, 1.0, 1.0, 1e-8), 0.0);
    }
}
