//! Bracketed root finding (Brent's method) plus bracket expansion.
//!
//! Objectives return `Result<f64>` so that root searches whose integrands
//! themselves run quadrature can propagate numerical failures instead of
//! poisoning the iteration with NaNs.

use crate::error::{Error, Result};

/// Find a root of `f` in `[lo, hi]` by Brent's method.
///
/// `f(lo)` and `f(hi)` must have opposite signs (a zero endpoint is returned
/// directly). Iteration stops when the bracket width falls below
/// `x_tol · max(1, |x|)` plus machine slack, or when `|f| ≤ f_tol`.
/// `what` labels the objective in error messages.
pub fn brent(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    x_tol: f64,
    f_tol: f64,
    what: &'static str,
) -> Result<f64> {
    const MAX_ITER: usize = 200;

    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::BracketFailure {
            what,
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
        if fb.abs() > fc.abs() {
            // b must carry the smallest residual; c the previous iterate.
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * x_tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() <= f_tol {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Attempt inverse quadratic interpolation / secant.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b)?;
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Ok(b)
}

/// Grow `hi` by doubling (up to `cap`) until `f(hi)` changes sign against
/// `f(lo)`, then return the bracket `(lo, hi, f_lo, f_hi)`.
pub fn bracket_upward(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi0: f64,
    cap: f64,
    what: &'static str,
) -> Result<(f64, f64, f64, f64)> {
    let f_lo = f(lo)?;
    if f_lo == 0.0 {
        return Ok((lo, lo, 0.0, 0.0));
    }
    let mut lo = lo;
    let mut f_lo = f_lo;
    let mut hi = hi0.max(lo + hi0.abs().max(1e-300));
    loop {
        let f_hi = f(hi)?;
        if f_hi == 0.0 || f_hi.signum() != f_lo.signum() {
            return Ok((lo, hi, f_lo, f_hi));
        }
        if hi >= cap {
            return Err(Error::BracketFailure {
                what,
                lo,
                hi,
                f_lo,
                f_hi,
            });
        }
        // The sign at hi matches the sign at lo, so the root (if any) is
        // beyond hi; slide the bracket up before doubling.
        lo = hi;
        f_lo = f_hi;
        hi = (hi * 2.0).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_root_is_half_pi() {
        let root = brent(|x| Ok(x.cos()), 0.0, 2.0, 1e-14, 0.0, "cos").unwrap();
        assert!((root - std::f64::consts::FRAC_PI_2).abs() < 1e-12, "{root}");
    }

    #[test]
    fn cube_root_of_eight() {
        let root = brent(|x| Ok(x * x * x - 8.0), 0.0, 10.0, 1e-14, 0.0, "cube").unwrap();
        assert!((root - 2.0).abs() < 1e-12, "{root}");
    }

    #[test]
    fn endpoint_zero_short_circuits() {
        let root = brent(|x| Ok(x - 1.0), 1.0, 3.0, 1e-12, 0.0, "linear").unwrap();
        assert_eq!(root, 1.0);
    }

    #[test]
    fn same_sign_is_bracket_failure() {
        let err = brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 0.0, "no root").unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
        assert!(err.is_numeric());
    }

    #[test]
    fn objective_errors_propagate() {
        let err = brent(
            |x| {
                if x > 0.5 {
                    Err(Error::NotAvailable { what: "objective" })
                } else {
                    Ok(x - 1.0)
                }
            },
            0.0,
            2.0,
            1e-12,
            0.0,
            "partial",
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotAvailable { .. }));
    }

    #[test]
    fn bracket_expansion_reaches_far_roots() {
        let (lo, hi, f_lo, f_hi) =
            bracket_upward(|x| Ok(x - 100.0), 0.0, 1.0, 1e6, "far root").unwrap();
        assert!(f_lo < 0.0 && f_hi >= 0.0);
        let root = brent(|x| Ok(x - 100.0), lo, hi, 1e-12, 0.0, "far root").unwrap();
        assert!((root - 100.0).abs() < 1e-9, "{root}");
    }

    #[test]
    fn bracket_expansion_hits_cap() {
        let err = bracket_upward(|_| Ok(1.0), 0.0, 1.0, 64.0, "never").unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
    }

    #[test]
    fn steep_tail_inversion_accuracy() {
        // survival of the translated Erlang: reference values computed with
        // 60-digit arithmetic.
        let g = |t: f64| Ok(0.5 * (2.0 + t) * (-t).exp() - 1e-9);
        let (lo, hi, _, _) = bracket_upward(g, 0.0, 1.0, 1e6, "erlang tail").unwrap();
        let root = brent(g, lo, hi, 1e-12, 0.0, "erlang tail").unwrap();
        assert!((root - 23.259313599524092).abs() < 1e-9, "{root}");
    }
}
