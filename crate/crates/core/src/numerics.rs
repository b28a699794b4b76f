//! Bracketed one-dimensional searches used by the solvers.

use crate::{Error, Result};

/// Root located by [`bisect_root`].
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub f: f64,
    pub iterations: usize,
}

/// Bisection on `[lo, hi]`, requiring `f(lo)` and `f(hi)` to have opposite
/// signs (an endpoint evaluating to exactly zero counts as its own root).
///
/// Stops once `|f(mid)| ≤ f_tol` and the bracket width is at most `x_tol`,
/// or when the bracket can no longer shrink in floating point.
pub fn bisect_root<F>(mut f: F, lo: f64, hi: f64, x_tol: f64, f_tol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let flo = f(lo);
    if flo == 0.0 {
        return Ok(Root { x: lo, f: 0.0, iterations: 0 });
    }
    let fhi = f(hi);
    if fhi == 0.0 {
        return Ok(Root { x: hi, f: 0.0, iterations: 0 });
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Solver(format!(
            "bisection bracket [{lo}, {hi}] has no sign change (f = {flo}, {fhi})"
        )));
    }
    let lo_sign = flo.signum();
    let mut mid = 0.5 * (lo + hi);
    let mut fmid = f(mid);
    let mut iterations = 1;
    for _ in 0..max_iter {
        if fmid == 0.0 || (fmid.abs() <= f_tol && (hi - lo).abs() <= x_tol) {
            break;
        }
        if fmid.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        let next = 0.5 * (lo + hi);
        if next == lo || next == hi {
            break;
        }
        mid = next;
        fmid = f(mid);
        iterations += 1;
    }
    Ok(Root { x: mid, f: fmid, iterations })
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
///
/// Returns `(x, f(x), iterations)` for the better of the final interior
/// probes. Deterministic: no randomness, fixed probe order.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, x_tol: f64, max_iter: usize) -> (f64, f64, usize)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a).abs() > x_tol && iterations < max_iter {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    if fc >= fd {
        (c, fc, iterations)
    } else {
        (d, fd, iterations)
    }
}

/// Index-ordered pairwise summation, stable across run-to-run and
/// independent of how the values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_simple_root() {
        let root = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-12, 1e-12, 200).unwrap();
        assert!((root.x - std::f64::consts::SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        assert!(bisect_root(|x| x * x + 1.0, -1.0, 1.0, 1e-9, 1e-9, 100).is_err());
    }

    #[test]
    fn bisect_endpoint_root() {
        let root = bisect_root(|x| x, 0.0, 1.0, 1e-9, 1e-9, 100).unwrap();
        assert_eq!(root.x, 0.0);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx, _) = golden_section_max(|x| -(x - 1.3) * (x - 1.3), 0.0, 4.0, 1e-10, 200);
        assert!((x - 1.3).abs() < 1e-8);
        assert!(fx <= 0.0);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.5];
        assert_eq!(pairwise_sum(&xs), 15.5);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
