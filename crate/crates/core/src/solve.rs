//! Scalar root finding for monotone functions.

/// Solves `f(y) = target` for increasing `f`, starting from `guess`.
///
/// Brackets by doubling, then runs Illinois false position with a bisection
/// fallback. Returns `None` when no bracket is found within `|y - guess| < 2048`.
pub fn solve_increasing<F: FnMut(f64) -> f64>(mut f: F, target: f64, guess: f64) -> Option<f64> {
    let mut step = 1.0;
    let (mut lo, mut flo) = loop {
        let x = guess - step;
        let fx = f(x) - target;
        if fx <= 0.0 {
            break (x, fx);
        }
        step *= 2.0;
        if step > 2048.0 {
            return None;
        }
    };
    step = 1.0;
    let (mut hi, mut fhi) = loop {
        let x = guess + step;
        let fx = f(x) - target;
        if fx >= 0.0 {
            break (x, fx);
        }
        step *= 2.0;
        if step > 2048.0 {
            return None;
        }
    };
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    let ftol = 1e-15 * (1.0 + target.abs());
    let mut side = 0i8;
    for _ in 0..300 {
        let mut x = hi - fhi * (hi - lo) / (fhi - flo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x) - target;
        if fx.is_nan() {
            return None;
        }
        if fx.abs() <= ftol {
            return Some(x);
        }
        if fx < 0.0 {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
        if hi - lo <= 1e-14 * (1.0 + x.abs()) {
            return Some(0.5 * (lo + hi));
        }
    }
    Some(0.5 * (lo + hi))
}

/// Plain bisection for a predicate that is true on `[lo, x*)` and false after.
pub fn bisect_predicate<F: FnMut(f64) -> bool>(mut pred: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
