//! Characteristic exponents of power-law jump measures.
//!
//! Everything here reduces to the two scaled primitives
//!
//! ```text
//! P_c(z) = Int_0^z (1 - cos y) y^{-1-a} dy
//! P_s(z) = Int_0^z (sin y - y) y^{-1-a} dy
//! ```
//!
//! and their limits as `z -> inf`. For a jump density `k(x) = c a x^{-1-a}`
//! on one axis, substitution gives
//!
//! ```text
//! Int_0^B (cos(ux) - 1) k(x) dx = -c a |u|^a P_c(|u| B),
//! Int_0^B (sin(ux) - ux) k(x) dx = sgn(u) c a |u|^a P_s(|u| B),
//! ```
//!
//! so characteristic exponents at arbitrarily large `|u| B` never require
//! quadrature of a long oscillatory integrand: the primitives are computed
//! once by series (small `z`), adaptive quadrature (moderate `z`) and an
//! integration-by-parts tail expansion (large `z`).

use crate::quad::{self, cos_m1, sin_m_x};
use num_complex::Complex64;

/// Switch point between direct quadrature and the asymptotic tail.
const Z_TAIL: f64 = 30.0;
/// Switch point between the power series and direct quadrature.
const Z_SERIES: f64 = 0.5;
/// Depth of the integration-by-parts tail recursion.
const IBP_DEPTH: u32 = 6;

/// `Int_z^inf cos(y) y^{-s} dy` for `z >= Z_TAIL`, `s > 1`.
fn tail_cos(z: f64, s: f64, depth: u32) -> f64 {
    // d(sin) = cos dy:  I = -sin(z) z^{-s} + s * Int sin(y) y^{-s-1}
    //                   Int sin(y) y^{-s-1} = cos(z) z^{-s-1} - (s+1) * Int cos(y) y^{-s-2}
    if depth == 0 {
        return 0.0; // remainder ~ z^{-s}, negligible at the recursion floor
    }
    -z.sin() * z.powf(-s) + s * (z.cos() * z.powf(-s - 1.0) - (s + 1.0) * tail_cos(z, s + 2.0, depth - 1))
}

/// `Int_z^inf sin(y) y^{-s} dy` for `z >= Z_TAIL`, `s > 0`.
fn tail_sin(z: f64, s: f64) -> f64 {
    z.cos() * z.powf(-s) - s * tail_cos(z, s + 1.0, IBP_DEPTH)
}

fn series_pc(z: f64, alpha: f64) -> f64 {
    // 1 - cos y = sum_{k>=1} (-1)^{k+1} y^{2k} / (2k)!
    let mut total = 0.0;
    let mut fact = 1.0f64; // (2k)!
    for k in 1..=12 {
        fact *= ((2 * k - 1) * (2 * k)) as f64;
        let term = z.powf(2.0 * k as f64 - alpha) / (fact * (2.0 * k as f64 - alpha));
        total += if k % 2 == 1 { term } else { -term };
        if term.abs() < 1e-18 * total.abs().max(1e-300) {
            break;
        }
    }
    total
}

fn series_ps(z: f64, alpha: f64) -> f64 {
    // sin y - y = sum_{k>=1} (-1)^k y^{2k+1} / (2k+1)!
    let mut total = 0.0;
    let mut fact = 1.0f64; // (2k+1)!
    for k in 1..=12 {
        fact *= ((2 * k) * (2 * k + 1)) as f64;
        let term = z.powf(2.0 * k as f64 + 1.0 - alpha) / (fact * (2.0 * k as f64 + 1.0 - alpha));
        total += if k % 2 == 1 { -term } else { term };
        if term.abs() < 1e-18 * total.abs().max(1e-300) {
            break;
        }
    }
    total
}

fn pi_breakpoints(a: f64, b: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    let mut k = (a / std::f64::consts::PI).ceil() as i64;
    loop {
        let x = k as f64 * std::f64::consts::PI;
        if x >= b {
            break;
        }
        if x > a {
            pts.push(x);
        }
        k += 1;
    }
    pts
}

/// `P_c(z) = Int_0^z (1 - cos y) y^{-1-alpha} dy`, `alpha` in (0, 2).
pub fn partial_cos_moment(z: f64, alpha: f64) -> f64 {
    assert!(z >= 0.0);
    if z == 0.0 {
        return 0.0;
    }
    if z <= Z_SERIES {
        return series_pc(z, alpha);
    }
    let mid = z.min(Z_TAIL);
    let direct = series_pc(Z_SERIES, alpha)
        + quad::integrate_split(
            |y| -cos_m1(y) * y.powf(-1.0 - alpha),
            Z_SERIES,
            mid,
            &pi_breakpoints(Z_SERIES, mid),
            1e-13,
        )
        .expect("smooth bounded integrand");
    if z <= Z_TAIL {
        direct
    } else {
        // Int_{Z}^{z} (1 - cos) y^{-1-a} = [power part] - [cos tail difference]
        let power = (Z_TAIL.powf(-alpha) - z.powf(-alpha)) / alpha;
        direct + power - tail_cos(Z_TAIL, 1.0 + alpha, IBP_DEPTH) + tail_cos(z, 1.0 + alpha, IBP_DEPTH)
    }
}

/// Limit `P_c(inf)`; finite for every `alpha` in (0, 2).
pub fn cos_moment(alpha: f64) -> f64 {
    partial_cos_moment(Z_TAIL, alpha) + Z_TAIL.powf(-alpha) / alpha - tail_cos(Z_TAIL, 1.0 + alpha, IBP_DEPTH)
}

/// `P_s(z) = Int_0^z (sin y - y) y^{-1-alpha} dy`, `alpha` in (0, 2).
pub fn partial_sin_comp_moment(z: f64, alpha: f64) -> f64 {
    assert!(z >= 0.0);
    if z == 0.0 {
        return 0.0;
    }
    if z <= Z_SERIES {
        return series_ps(z, alpha);
    }
    let mid = z.min(Z_TAIL);
    let direct = series_ps(Z_SERIES, alpha)
        + quad::integrate_split(
            |y| sin_m_x(y) * y.powf(-1.0 - alpha),
            Z_SERIES,
            mid,
            &pi_breakpoints(Z_SERIES, mid),
            1e-13,
        )
        .expect("smooth bounded integrand");
    if z <= Z_TAIL {
        return direct;
    }
    // beyond Z_TAIL: sin-part by parts, linear part in closed form
    let linear = if (alpha - 1.0).abs() < 1e-12 {
        (z / Z_TAIL).ln()
    } else {
        (z.powf(1.0 - alpha) - Z_TAIL.powf(1.0 - alpha)) / (1.0 - alpha)
    };
    direct + tail_sin(Z_TAIL, 1.0 + alpha) - tail_sin(z, 1.0 + alpha) - linear
}

/// Limit `P_s(inf)`; finite only for `alpha > 1` (full compensation).
pub fn sin_comp_moment(alpha: f64) -> f64 {
    assert!(alpha > 1.0);
    partial_sin_comp_moment(Z_TAIL, alpha) + tail_sin(Z_TAIL, 1.0 + alpha)
        - Z_TAIL.powf(1.0 - alpha) / (alpha - 1.0)
}

/// `Int_0^inf sin(y) y^{-1-alpha} dy`; finite only for `alpha < 1`.
pub fn sin_raw_moment(alpha: f64) -> f64 {
    assert!(alpha < 1.0);
    // sin = (sin - y) + y on [0, Z], raw tail beyond
    partial_sin_comp_moment(Z_TAIL, alpha) + Z_TAIL.powf(1.0 - alpha) / (1.0 - alpha)
        + tail_sin(Z_TAIL, 1.0 + alpha)
}

/// Exponent of the fully compensated small-jump martingale: jumps of the
/// density `c± a |x|^{-1-a}` restricted to `|x| <= cutoff`, with integrand
/// `e^{iux} - 1 - iux`.
pub fn small_jump_exponent(u: f64, alpha: f64, c_plus: f64, c_minus: f64, cutoff: f64) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let au = u.abs();
    let z = au * cutoff;
    let scale = alpha * au.powf(alpha);
    let re = -(c_plus + c_minus) * scale * partial_cos_moment(z, alpha);
    let im = u.signum() * (c_plus - c_minus) * scale * partial_sin_comp_moment(z, alpha);
    Complex64::new(re, im)
}

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Compensation convention of a power-law exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compensation {
    /// `e^{iux} - 1 - iux` (requires `alpha > 1` on an unbounded support).
    Full,
    /// `e^{iux} - 1` (requires `alpha < 1`).
    None,
    /// `e^{iux} - 1 - iux 1{|x| <= 1}`.
    TruncatedAtOne,
}

/// Characteristic exponent at time 1 of the stable process with jump
/// density `c± a |x|^{-1-a}` on the two half-axes and no added drift,
/// under the natural compensation for its index: full for `a > 1`, none
/// for `a < 1`, truncation at 1 for `a = 1`.
pub fn stable_canonical_exponent(u: f64, alpha: f64, c_plus: f64, c_minus: f64) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let au = u.abs();
    if (alpha - 1.0).abs() < 1e-12 {
        let re = -(c_plus + c_minus) * std::f64::consts::FRAC_PI_2 * au;
        let im = (c_plus - c_minus) * (-u * au.ln() + (1.0 - EULER_GAMMA) * u);
        return Complex64::new(re, im);
    }
    let scale = alpha * au.powf(alpha);
    let re = -(c_plus + c_minus) * scale * cos_moment(alpha);
    let s_s = if alpha > 1.0 { sin_comp_moment(alpha) } else { sin_raw_moment(alpha) };
    let im = u.signum() * (c_plus - c_minus) * scale * s_s;
    Complex64::new(re, im)
}

/// Scale and skewness of the classical one-parameter stable law matching
/// the canonical exponent above: `sigma^alpha = (c_+ + c_-) a P_c(inf)`
/// (for `alpha = 1`, `sigma = (c_+ + c_-) pi / 2`) and
/// `beta = (c_+ - c_-)/(c_+ + c_-)`.
pub fn stable_scale_skew(alpha: f64, c_plus: f64, c_minus: f64) -> (f64, f64) {
    let total = c_plus + c_minus;
    assert!(total > 0.0, "jump coefficients must not both vanish");
    let skew = (c_plus - c_minus) / total;
    let sigma = if (alpha - 1.0).abs() < 1e-12 {
        total * std::f64::consts::FRAC_PI_2
    } else {
        (total * alpha * cos_moment(alpha)).powf(1.0 / alpha)
    };
    (sigma, skew)
}
