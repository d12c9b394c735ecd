//! Small shared numeric helpers: bracketed bisection and finite-difference
//! weights on non-uniform stencils.

use crate::{Error, Result};

/// Bisect a bracketed sign change of `f` down to floating-point resolution.
///
/// `f(lo)` and `f(hi)` must have opposite signs (zero counts as a sign).
pub fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::BracketingFailure(format!(
            "no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval no longer representable
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Expand `hi` geometrically away from `lo` until `f` changes sign, then bisect.
///
/// `direction` is +1 to grow upward, −1 downward. Gives up past `limit`.
pub fn bracket_and_bisect(
    lo: f64,
    step0: f64,
    direction: f64,
    limit: f64,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    let flo = f(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    let mut step = step0;
    let mut prev = lo;
    loop {
        let cand = lo + direction * step;
        let fc = f(cand);
        if fc == 0.0 {
            return Ok(cand);
        }
        if fc.signum() != flo.signum() {
            return if direction > 0.0 {
                bisect(prev, cand, f)
            } else {
                bisect(cand, prev, f)
            };
        }
        prev = cand;
        step *= 2.0;
        if step > limit {
            return Err(Error::BracketingFailure(format!(
                "no sign change within distance {limit} of {lo}"
            )));
        }
    }
}

/// First-derivative weights for a 3-point stencil at spacings `h1` (left) and
/// `h2` (right): returns `(w_minus, w_0, w_plus)`.
pub fn fd1_weights(h1: f64, h2: f64) -> (f64, f64, f64) {
    (
        -h2 / (h1 * (h1 + h2)),
        (h2 - h1) / (h1 * h2),
        h1 / (h2 * (h1 + h2)),
    )
}

/// Second-derivative weights for the same stencil.
pub fn fd2_weights(h1: f64, h2: f64) -> (f64, f64, f64) {
    (
        2.0 / (h1 * (h1 + h2)),
        -2.0 / (h1 * h2),
        2.0 / (h2 * (h1 + h2)),
    )
}

/// Unwrap a sequence of angles to a continuous branch (removes 2π jumps).
pub fn unwrap_angles(angles: &mut [f64]) {
    for i in 1..angles.len() {
        let mut d = angles[i] - angles[i - 1];
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        angles[i] = angles[i - 1] + d;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(0.0, 2.0, |x| x * x - 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bracket_grows_downward() {
        // root at -17
        let r = bracket_and_bisect(-1.0, 1.0, -1.0, 1e6, |x| x + 17.0).unwrap();
        assert!((r + 17.0).abs() < 1e-12);
    }

    #[test]
    fn fd_weights_reduce_to_centered() {
        let (a, b, c) = fd1_weights(1e-3, 1e-3);
        assert!((a + 500.0).abs() < 1e-9 && b.abs() < 1e-9 && (c - 500.0).abs() < 1e-9);
        let (a2, b2, c2) = fd2_weights(1e-3, 1e-3);
        assert!((a2 - 1e6).abs() < 1.0 && (b2 + 2e6).abs() < 1.0 && (c2 - 1e6).abs() < 1.0);
    }

    #[test]
    fn unwrap_removes_jumps() {
        let tau = 2.0 * std::f64::consts::PI;
        let mut a = vec![3.0, 3.2 - tau, 3.4, 3.6 + tau];
        unwrap_angles(&mut a);
        assert!((a[1] - 3.2).abs() < 1e-12);
        assert!((a[3] - 3.6).abs() < 1e-12);
    }
}
