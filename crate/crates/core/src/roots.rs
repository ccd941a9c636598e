//! Bracketed bisection.

use crate::error::RootError;

/// Finds a root of `f` in `[lo, hi]` by bisection, stopping once the bracket
/// is narrower than `tol`. Returns the bracket midpoint.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero).
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64, RootError>
where
    F: FnMut(f64) -> f64,
{
    let eval = |f: &mut F, x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(RootError::NonFinite { x })
        }
    };
    let mut f_lo = eval(&mut f, lo)?;
    let f_hi = eval(&mut f, hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    // 200 halvings exhaust f64 resolution on any finite bracket
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = eval(&mut f, mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
