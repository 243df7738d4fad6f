//! Composite Simpson integration on uniform samples.

/// Integrates uniformly spaced samples `values` with spacing `step`.
///
/// An even number of intervals uses the plain composite 1/3 rule. An odd
/// number closes the last three intervals with the 3/8 rule so that any grid
/// of at least four points keeps fourth-order accuracy. Two points fall back
/// to the trapezoid and a single point integrates to zero.
pub fn simpson(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * step * (values[0] + values[1]),
        3 => step / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let intervals = n - 1;
            let (head, tail) = if intervals.is_multiple_of(2) {
                (n, 0.0)
            } else {
                let t = &values[n - 4..];
                let tail = 3.0 * step / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]);
                (n - 3, tail)
            };
            simpson_even(&values[..head], step) + tail
        }
    }
}

fn simpson_even(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    if n < 3 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1]
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { 4.0 * v } else { 2.0 * v })
        .sum();
    step / 3.0 * (values[0] + inner + values[n - 1])
}

/// Composite Simpson of `f` over `[a, b]` with `intervals` (rounded up to
/// even) subintervals.
pub fn simpson_fn<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = (intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            w * f(a + i as f64 * h)
        })
        .sum();
    h / 3.0 * (f(a) + inner + f(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn samples(n: usize, f: impl Fn(f64) -> f64) -> (Vec<f64>, f64) {
        let h = 1.0 / (n - 1) as f64;
        ((0..n).map(|i| f(i as f64 * h)).collect(), h)
    }

    #[test]
    fn exact_for_cubics_even_and_odd_interval_counts() {
        let cubic = |x: f64| 1.0 + x - 2.0 * x * x + 3.0 * x * x * x;
        let exact = 1.0 + 0.5 - 2.0 / 3.0 + 0.75;
        for n in [4, 5, 6, 7, 11, 12, 201, 202] {
            let (v, h) = samples(n, cubic);
            assert!((simpson(&v, h) - exact).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn degenerate_lengths() {
        assert_eq!(simpson(&[], 0.1), 0.0);
        assert_eq!(simpson(&[3.0], 0.1), 0.0);
        assert!((simpson(&[1.0, 3.0], 0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn function_form_converges() {
        let got = simpson_fn(libm::sin, 0.0, core::f64::consts::PI, 1000);
        assert!((got - 2.0).abs() < 1e-10);
        // odd request is rounded up
        let got = simpson_fn(|x| x * x, 0.0, 1.0, 3);
        assert!((got - 1.0 / 3.0).abs() < 1e-15);
    }
}
