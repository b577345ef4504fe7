//! The limiting error pair: the independent stable process `V`, the
//! case-specific forcing `W`, and the linear equation
//!
//! ```text
//! U_t = Int_0^t f'(X_{s-}) U_{s-} dY_s - W_t
//! ```
//!
//! solved on the fine grid of the reference solution. The forcing per
//! regime:
//!
//! * case 1 and cases 2b/3b: `W = Int g(X_{s-}) dV_s` with `g = f f'` and
//!   `V` an independent stable process whose jump density is built from
//!   the tail limits (`(theta_+^2 + theta_-^2)/2` up, `theta_+ theta_-`
//!   down, fully compensated, for case 1; `theta^2/4` on both sides,
//!   unit-truncation compensation, for the symmetric cases);
//! * case 2a: the deterministic drift `-((theta_+ - theta_-)^2 / 4)
//!   Int g(X_{s-}) ds`;
//! * case 3a: a mark sum over the driver's jumps plus `(d^2/2) Int g ds`.

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::exponent::stable_canonical_exponent;
use crate::hypotheses::HypothesisReport;
use crate::measure::MeasureSpec;
use crate::rate::{CaseLabel, RatePlan};
use crate::rngstream::{stream_rng, SeedLineage, Substream};
use crate::sampler::{Jump, StableIncrements};
use num_complex::Complex64;
use rand::Rng;

/// Everything needed to simulate the limiting pair for one regime.
#[derive(Debug, Clone)]
pub struct LimitSpec {
    pub case_label: CaseLabel,
    pub alpha: f64,
    pub theta_plus_lim: f64,
    pub theta_minus_lim: f64,
    pub theta_lim: f64,
    pub theta_prime_lim: f64,
    /// Effective drift `b - Int_{|x|<=1} x F(dx)`; finite only below index 1.
    pub d: Option<f64>,
}

impl LimitSpec {
    /// Assemble from a classified measure.
    pub fn from_measure(spec: &MeasureSpec, plan: &RatePlan, report: &HypothesisReport) -> Result<Self> {
        let (tp, tm) = match report.h2 {
            Some(h2) => (h2.theta_plus_lim, h2.theta_minus_lim),
            None => (0.0, 0.0),
        };
        if plan.case_label != CaseLabel::Case3a && report.h2.is_none() {
            return Err(Error::MissingInput(
                "limit laws outside case 3a need the exact-limit hypothesis".into(),
            ));
        }
        Ok(LimitSpec {
            case_label: plan.case_label,
            alpha: plan.alpha,
            theta_plus_lim: tp,
            theta_minus_lim: tm,
            theta_lim: tp + tm,
            theta_prime_lim: tp - tm,
            d: spec.effective_drift(),
        })
    }
}

/// Compensation convention of the limiting stable process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VCompensation {
    /// `e^{iux} - 1 - iux`.
    Full,
    /// `e^{iux} - 1 - iux 1{|x| <= 1}` (symmetric parameters only).
    TruncatedAtOne,
}

/// Jump density `c± a |x|^{-1-a}` of the limiting stable process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VProcessParams {
    pub alpha: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub compensation: VCompensation,
}

/// Build the limiting-process parameters for the cases that have one.
pub fn v_params_from_case(ls: &LimitSpec) -> Result<VProcessParams> {
    if ls.theta_lim <= 0.0 {
        return Err(Error::MissingInput("tail limits unavailable or degenerate".into()));
    }
    let (tp, tm) = (ls.theta_plus_lim, ls.theta_minus_lim);
    match ls.case_label {
        CaseLabel::Case1 => Ok(VProcessParams {
            alpha: ls.alpha,
            c_plus: 0.5 * (tp * tp + tm * tm),
            c_minus: tp * tm,
            compensation: VCompensation::Full,
        }),
        CaseLabel::Case2b | CaseLabel::Case3b => {
            let c = ls.theta_lim * ls.theta_lim / 4.0;
            Ok(VProcessParams {
                alpha: ls.alpha,
                c_plus: c,
                c_minus: c,
                compensation: VCompensation::TruncatedAtOne,
            })
        }
        CaseLabel::Case2a | CaseLabel::Case3a => Err(Error::InvalidParameter(
            "cases 2a and 3a have no independent stable component".into(),
        )),
    }
}

/// Log-characteristic function of `V_1`.
///
/// Under full compensation this is the canonical exponent; under the
/// truncated convention the parameters are symmetric, so the truncation
/// term integrates to zero and the same canonical value applies.
pub fn exponent_v(params: &VProcessParams, u: f64) -> Complex64 {
    if params.compensation == VCompensation::TruncatedAtOne {
        debug_assert!((params.c_plus - params.c_minus).abs() < 1e-12);
    }
    stable_canonical_exponent(u, params.alpha, params.c_plus, params.c_minus)
}

/// Independent quadrature route to [`exponent_v`]: substitute `y = |u| x`
/// and integrate the exact integrand over `(0, Z]` with an
/// integration-by-parts tail beyond `Z`.
pub fn exponent_v_quadrature(params: &VProcessParams, u: f64) -> Result<Complex64> {
    if u == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let a = params.alpha;
    let au = u.abs();
    let z = 200.0f64;
    let breaks: Vec<f64> = (1..64).map(|k| k as f64 * std::f64::consts::PI).collect();
    // shared real part: (cos y - 1) y^{-1-a}
    let re_base = crate::quad::integrate_split(
        |y| if y == 0.0 { 0.0 } else { crate::quad::cos_m1(y) * y.powf(-1.0 - a) },
        0.0,
        z,
        &breaks,
        1e-13,
    )?;
    // four-term tail of Int_z^inf cos(y) y^{-s} dy
    let tail_cos = |z: f64, s: f64| -> f64 {
        -z.sin() * z.powf(-s) + s * z.cos() * z.powf(-s - 1.0)
            + s * (s + 1.0) * z.sin() * z.powf(-s - 2.0)
            - s * (s + 1.0) * (s + 2.0) * z.cos() * z.powf(-s - 3.0)
    };
    let re_tail = -(z.powf(-a) / a) + tail_cos(z, 1.0 + a);
    let re = (params.c_plus + params.c_minus) * a * au.powf(a) * (re_base + re_tail);
    let im = match params.compensation {
        VCompensation::TruncatedAtOne => 0.0,
        VCompensation::Full => {
            let im_base = crate::quad::integrate_split(
                |y| if y == 0.0 { 0.0 } else { crate::quad::sin_m_x(y) * y.powf(-1.0 - a) },
                0.0,
                z,
                &breaks,
                1e-13,
            )?;
            let tail_sin = |z: f64, s: f64| -> f64 {
                z.cos() * z.powf(-s) - s * z.sin() * z.powf(-s - 1.0)
                    - s * (s + 1.0) * z.cos() * z.powf(-s - 2.0)
                    + s * (s + 1.0) * (s + 2.0) * z.sin() * z.powf(-s - 3.0)
            };
            let im_tail = tail_sin(z, 1.0 + a) - z.powf(1.0 - a) / (a - 1.0);
            u.signum() * (params.c_plus - params.c_minus) * a * au.powf(a) * (im_base + im_tail)
        }
    };
    Ok(Complex64::new(re, im))
}

/// Per-fine-cell increments of `V` for path simulation.
pub fn v_increments(params: &VProcessParams, dt: f64) -> Result<StableIncrements> {
    StableIncrements::canonical(params.alpha, params.c_plus, params.c_minus, dt)
}

/// Simulate the forcing `W` at the fine nodes of a reference path.
///
/// `reference` holds `m+1` fine-node states of `X`; the result has the
/// same length with `W_0 = 0`. Case 3a needs the driver's jump record.
pub fn simulate_w(
    ls: &LimitSpec,
    f: &Coefficient,
    reference: &[f64],
    dt: f64,
    jump_record: Option<&[Jump]>,
    seed: SeedLineage,
) -> Result<Vec<f64>> {
    let steps = reference.len().checked_sub(1).ok_or_else(|| Error::GridMismatch("empty reference".into()))?;
    let mut w = Vec::with_capacity(steps + 1);
    w.push(0.0);
    match ls.case_label {
        CaseLabel::Case1 | CaseLabel::Case2b | CaseLabel::Case3b => {
            let params = v_params_from_case(ls)?;
            let inc = v_increments(&params, dt)?;
            let mut rng = stream_rng(seed, Substream::LimitProcess);
            let mut acc = 0.0;
            for k in 0..steps {
                acc += f.g(reference[k]) * inc.draw(&mut rng);
                w.push(acc);
            }
        }
        CaseLabel::Case2a => {
            let rate = -ls.theta_prime_lim * ls.theta_prime_lim / 4.0;
            let mut acc = 0.0;
            for k in 0..steps {
                acc += rate * f.g(reference[k]) * dt;
                w.push(acc);
            }
        }
        CaseLabel::Case3a => {
            let jumps = jump_record
                .ok_or_else(|| Error::MissingInput("case 3a forcing needs the jump record".into()))?;
            let d = ls
                .d
                .ok_or_else(|| Error::MissingInput("case 3a forcing needs the effective drift".into()))?;
            let mut rng = stream_rng(seed, Substream::Marks);
            let half_d2 = 0.5 * d * d;
            let mut acc = 0.0;
            let mut jump_idx = 0usize;
            for k in 0..steps {
                acc += half_d2 * f.g(reference[k]) * dt;
                let cell_end = (k + 1) as f64 * dt;
                while jump_idx < jumps.len() && jumps[jump_idx].time < cell_end {
                    let jump = jumps[jump_idx];
                    let mark: f64 = rng.random();
                    let x_pre = reference[k];
                    let dx = jump.size * f.eval(x_pre);
                    let bracket =
                        (f.eval(x_pre + dx) - f.eval(x_pre)) * mark + f.deriv(x_pre) * dx * (1.0 - mark);
                    acc += d * bracket;
                    jump_idx += 1;
                }
                w.push(acc);
            }
        }
    }
    Ok(w)
}

/// Fine-grid recursion for the linear limit equation:
/// `U_{k+1} = U_k + f'(X_k) U_k dY_k - dW_k`, `U_0 = 0`.
pub fn solve_limit_sde(
    f: &Coefficient,
    reference: &[f64],
    fine_increments: &[f64],
    w_path: &[f64],
) -> Result<Vec<f64>> {
    let steps = fine_increments.len();
    if reference.len() != steps + 1 || w_path.len() != steps + 1 {
        return Err(Error::GridMismatch("limit equation needs aligned fine grids".into()));
    }
    let mut u = 0.0f64;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(0.0);
    for k in 0..steps {
        u += f.deriv(reference[k]) * u * fine_increments[k] - (w_path[k + 1] - w_path[k]);
        if !u.is_finite() {
            return Err(Error::NonFiniteState { step: k });
        }
        out.push(u);
    }
    Ok(out)
}
