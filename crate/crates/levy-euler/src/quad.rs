//! Adaptive quadrature on finite intervals.
//!
//! The integrands in this crate are smooth away from a handful of known
//! breakpoints (the origin, the cutoff, the truncation point), so a
//! globally adaptive Simpson rule with interval bisection is adequate:
//! callers split at the breakpoints and the rule refines wherever the
//! local error estimate is too large.

use crate::error::{Error, Result};

/// Default absolute tolerance used by the measure functionals.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Maximum recursion depth before giving up on an interval.
const MAX_DEPTH: u32 = 60;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    worst: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = (left + right - whole) / 15.0;
    if err.abs() <= tol || depth >= MAX_DEPTH {
        if depth >= MAX_DEPTH {
            *worst = worst.max(err.abs());
        }
        return left + right + err;
    }
    adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, worst)
        + adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, worst)
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Returns an error carrying the achieved tolerance when the refinement
/// depth runs out before the local error estimates fall below `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must be finite, got [{a}, {b}]"
        )));
    }
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    let mut worst = 0.0f64;
    let value = adapt(&f, a, b, fa, fm, fb, whole, tol, 0, &mut worst);
    if worst > tol.max(1e-300) * 64.0 {
        return Err(Error::QuadratureNotConverged {
            achieved: worst,
            requested: tol,
            a,
            b,
        });
    }
    Ok(value)
}

/// Integrate with interior breakpoints (domain splits at each point).
///
/// Breakpoints outside `(a, b)` are ignored; the list need not be sorted.
pub fn integrate_split(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut knots: Vec<f64> = breakpoints.iter().copied().filter(|x| *x > a && *x < b).collect();
    knots.push(a);
    knots.push(b);
    knots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    knots.dedup();
    let per = tol / knots.len().saturating_sub(1).max(1) as f64;
    let mut total = 0.0;
    for w in knots.windows(2) {
        total += integrate(&f, w[0], w[1], per)?;
    }
    Ok(total)
}

/// `cos(x) - 1` without cancellation for small `x`.
#[inline]
pub fn cos_m1(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    -2.0 * s * s
}

/// `sin(x) - x` without cancellation for small `x`.
#[inline]
pub fn sin_m_x(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        // sin x - x = -x^3/6 (1 - x^2/20 (1 - x^2/42))
        let x2 = x * x;
        -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        x.sin() - x
    }
}
