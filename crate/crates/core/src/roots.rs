//! Root finding for monotone scalar functions.

use crate::error::{Error, Result};

pub const MAX_ITER: usize = 200;
pub const REL_WIDTH: f64 = 1e-14;

/// Finds `x` in `[lo, hi]` with `g(x) = 0` for a continuous `g` that changes
/// sign on the bracket. Illinois-modified regula falsi: every step keeps a
/// valid bracket, and a bisection step is taken whenever the interpolation
/// stalls, so the bracket width at least halves every few iterations.
pub fn illinois<G: FnMut(f64) -> f64>(mut g: G, mut lo: f64, mut hi: f64, rel_width: f64) -> Result<f64> {
    let mut glo = g(lo);
    let mut ghi = g(hi);
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() || glo.is_nan() || ghi.is_nan() {
        return Err(Error::NoBracket(format!("g({lo}) = {glo}, g({hi}) = {ghi}")));
    }
    let mut side = 0i8;
    let mut last_width = hi - lo;
    for it in 0..MAX_ITER {
        let width = hi - lo;
        if width <= rel_width * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        // fall back to bisection every third step if the bracket is not shrinking fast
        let bisect = it % 3 == 2 && width > 0.5 * last_width;
        if it % 3 == 2 {
            last_width = width;
        }
        let mut x = if bisect { 0.5 * (lo + hi) } else { (lo * ghi - hi * glo) / (ghi - glo) };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let gx = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        if gx.signum() == glo.signum() {
            lo = x;
            glo = gx;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            ghi = gx;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(if glo.abs() < ghi.abs() { lo } else { hi })
}

/// Pure bisection with the same contract; used as a reference in tests and
/// where the caller wants the unconditional guarantee.
pub fn bisect<G: FnMut(f64) -> f64>(mut g: G, mut lo: f64, mut hi: f64, rel_width: f64) -> Result<f64> {
    let glo = g(lo);
    let ghi = g(hi);
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::NoBracket(format!("g({lo}) = {glo}, g({hi}) = {ghi}")));
    }
    let neg_lo = glo < 0.0;
    for _ in 0..MAX_ITER {
        if hi - lo <= rel_width * lo.abs().max(hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Expands `[lo, hi]` geometrically around a positive start until the
/// increasing function `g` is negative at `lo` and positive at `hi`.
pub fn expand_positive_bracket<G: FnMut(f64) -> f64>(mut g: G, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    for _ in 0..2100 {
        let a = g(lo) <= 0.0;
        let b = g(hi) >= 0.0;
        if a && b {
            return Ok((lo, hi));
        }
        if !a {
            lo *= 0.5;
        }
        if !b {
            hi *= 2.0;
        }
        if lo == 0.0 || !hi.is_finite() {
            break;
        }
    }
    Err(Error::NoBracket(format!("expansion stopped at [{lo}, {hi}]")))
}

/// Newton iteration for an increasing `g` with derivative, guarded by the
/// bracket `[lo, hi]` (which must satisfy g(lo) <= 0 <= g(hi)). Steps that
/// would leave the current bracket are replaced by bisection.
pub fn guarded_newton<G: FnMut(f64) -> (f64, f64)>(mut g: G, mut lo: f64, mut hi: f64, x0: f64, abs_tol: f64) -> f64 {
    let mut x = if x0 > lo && x0 < hi { x0 } else { 0.5 * (lo + hi) };
    for _ in 0..MAX_ITER {
        let (gx, dg) = g(x);
        if gx == 0.0 {
            return x;
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - gx / dg;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= abs_tol * x.abs().max(1.0) || hi - lo <= abs_tol * x.abs().max(1.0) {
            return x;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn illinois_finds_cube_root() {
        let x = illinois(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn illinois_on_flat_then_steep() {
        let x = illinois(|x: f64| (x - 0.3).powi(9), -1.0, 1.0, 1e-14).unwrap();
        assert!((x - 0.3).abs() < 1e-10);
        let y = illinois(|x: f64| (20.0 * x).exp() - 1e5, -5.0, 5.0, 1e-15).unwrap();
        assert!((y - 1e5f64.ln() / 20.0).abs() < 1e-13);
    }

    #[test]
    fn bisect_matches_closed_form() {
        let x = bisect(|x| x.ln() - 1.0, 1.0, 10.0, 1e-15).unwrap();
        assert!((x - std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn missing_sign_change_is_reported() {
        assert!(illinois(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn guarded_newton_converges_from_bad_start() {
        let x = guarded_newton(|x: f64| (x.exp() - 3.0, x.exp()), -10.0, 10.0, 9.9, 1e-15);
        assert!((x - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn bracket_expansion() {
        let (lo, hi) = expand_positive_bracket(|x| x - 1e6, 1.0, 2.0).unwrap();
        assert!(lo <= 1e6 && hi >= 1e6);
    }
}
