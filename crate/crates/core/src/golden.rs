//! Golden-section search for a unimodal function on a closed interval.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub f_min: f64,
    pub iterations: usize,
    pub bracket_width: f64,
}

/// Minimizes `f` on `[lo, hi]` until the bracket is narrower than `tol`.
///
/// Panics if the interval is empty or `tol` is not positive.
pub fn minimize<F>(f: F, lo: f64, hi: f64, tol: f64) -> Minimum
where
    F: Fn(f64) -> f64,
{
    assert!(lo < hi, "empty bracket [{lo}, {hi}]");
    assert!(tol > 0.0, "tolerance must be positive");

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;

    while b - a > tol {
        iterations += 1;
        if fc <= fd {
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
        // Bracket stopped shrinking in floating point.
        if iterations > 10_000 {
            break;
        }
    }

    // Best of the interior probes and the bracket midpoint.
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    let (x, f_min) = [(c, fc), (d, fd), (mid, fm)]
        .into_iter()
        .fold((mid, fm), |best, cand| if cand.1 < best.1 { cand } else { best });

    Minimum {
        x,
        f_min,
        iterations,
        bracket_width: b - a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let m = minimize(|x| (x - 1.25).powi(2) + 3.0, -10.0, 10.0, 1e-10);
        assert!((m.x - 1.25).abs() < 1e-7);
        let m = minimize(|x| (x - 1.25).powi(2), -10.0, 10.0, 1e-10);
        assert!((m.x - 1.25).abs() < 1e-8);
        assert!(m.f_min < 1e-16);
        assert!(m.bracket_width <= 1e-10);
    }

    #[test]
    fn minimum_on_boundary() {
        let m = minimize(|x| x, 2.0, 3.0, 1e-9);
        assert!((m.x - 2.0).abs() < 1e-8);
    }

    #[test]
    fn even_function_centred_at_zero() {
        let m = minimize(|x: f64| x.cosh(), -10.0, 10.0, 1e-8);
        assert!(m.x.abs() < 1e-7);
    }

    #[test]
    #[should_panic]
    fn rejects_empty_bracket() {
        minimize(|x| x, 1.0, 1.0, 1e-3);
    }
}
