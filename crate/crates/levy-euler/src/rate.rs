//! Rate regimes: normalizing sequences, discretization cutoffs and the
//! step correction of the modified scheme.
//!
//! Five regimes, indexed by the tail-growth index `a` and the symmetry /
//! zero-drift hypotheses:
//!
//! | case | condition                  | `u_n`              | `beta_n`              |
//! |------|----------------------------|--------------------|-----------------------|
//! | 1    | `a > 1`                    | `(n/log n)^{1/a}`  | `log n / n^{1/(2a)}`  |
//! | 2a   | `a = 1`                    | `n/(log n)^2`      | `log n / n`           |
//! | 2b   | `a = 1`, symmetric         | `n/log n`          | `log n / n`           |
//! | 3a   | `a < 1`                    | `n`                | `(log n)^2 / n`       |
//! | 3b   | `a < 1`, symmetric, `b=0`  | `(n/log n)^{1/a}`  | `(log n / n)^{1/a}`   |
//!
//! At desk-scale `n` the case-1 cutoff can exceed the jump bound; the plan
//! clamps it to half the bound and flags the clamp so diagnostics can
//! exclude those `n`.

use crate::error::{Error, Result};
use crate::hypotheses::HypothesisReport;
use crate::measure::MeasureSpec;
use crate::quad;
use serde::Serialize;

/// The five rate regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseLabel {
    Case1,
    Case2a,
    Case2b,
    Case3a,
    Case3b,
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseLabel::Case1 => "Case 1",
            CaseLabel::Case2a => "Case 2a",
            CaseLabel::Case2b => "Case 2b",
            CaseLabel::Case3a => "Case 3a",
            CaseLabel::Case3b => "Case 3b",
        };
        f.write_str(s)
    }
}

impl CaseLabel {
    /// Human-readable closed form of the normalizing sequence.
    pub fn rate_formula(&self) -> &'static str {
        match self {
            CaseLabel::Case1 | CaseLabel::Case3b => "u_n = (n/log n)^{1/alpha}",
            CaseLabel::Case2a => "u_n = n/(log n)^2",
            CaseLabel::Case2b => "u_n = n/log n",
            CaseLabel::Case3a => "u_n = n",
        }
    }
}

/// A case label with its rate and cutoff sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePlan {
    pub case_label: CaseLabel,
    pub alpha: f64,
    /// Jump bound of the measure; cutoffs are clamped to half of it.
    pub support_bound: f64,
}

impl RatePlan {
    /// Normalizing sequence `u_n`.
    pub fn u(&self, n: u64) -> f64 {
        let nf = n as f64;
        let ln = nf.ln();
        match self.case_label {
            CaseLabel::Case1 | CaseLabel::Case3b => (nf / ln).powf(1.0 / self.alpha),
            CaseLabel::Case2a => nf / (ln * ln),
            CaseLabel::Case2b => nf / ln,
            CaseLabel::Case3a => nf,
        }
    }

    /// Cutoff sequence before clamping.
    pub fn beta_raw(&self, n: u64) -> f64 {
        let nf = n as f64;
        let ln = nf.ln();
        match self.case_label {
            CaseLabel::Case1 => ln / nf.powf(0.5 / self.alpha),
            CaseLabel::Case2a | CaseLabel::Case2b => ln / nf,
            CaseLabel::Case3a => ln * ln / nf,
            CaseLabel::Case3b => (ln / nf).powf(1.0 / self.alpha),
        }
    }

    /// Cutoff clamped to half the jump bound; the flag records a clamp.
    pub fn beta(&self, n: u64) -> (f64, bool) {
        let raw = self.beta_raw(n);
        let cap = 0.5 * self.support_bound;
        if raw > cap {
            (cap, true)
        } else {
            (raw, false)
        }
    }
}

/// Pick the regime from a hypothesis report.
///
/// The index is the smallest verified growth index (the limit hypothesis,
/// when present, shares it by construction).
pub fn classify_case(report: &HypothesisReport) -> Result<RatePlan> {
    let alpha = report
        .h2
        .map(|h| h.alpha)
        .or(report.h1.map(|h| h.alpha))
        .ok_or_else(|| Error::MissingInput("no verified growth index".into()))?;
    let case_label = if alpha > 1.0 + 1e-9 {
        CaseLabel::Case1
    } else if (alpha - 1.0).abs() <= 1e-9 {
        if report.h3 {
            CaseLabel::Case2b
        } else {
            CaseLabel::Case2a
        }
    } else if report.h3 && report.h4 {
        CaseLabel::Case3b
    } else {
        CaseLabel::Case3a
    };
    Ok(RatePlan { case_label, alpha, support_bound: report.support_bound })
}

/// The normalized tail mass at the cutoff together with its asymptote.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LambdaDiagnostic {
    pub n: u64,
    pub beta_n: f64,
    pub clamped: bool,
    /// `theta(beta_n) / n`.
    pub lambda: f64,
    /// Leading-order equivalent under the exact-limit hypothesis.
    pub asymptote: Option<f64>,
}

/// Evaluate `lambda_n = theta(beta_n)/n` and its asymptotic equivalent.
pub fn lambda_n(spec: &MeasureSpec, plan: &RatePlan, n: u64) -> Result<LambdaDiagnostic> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    let (beta_n, clamped) = plan.beta(n);
    let lambda = spec.theta(beta_n) / n as f64;
    let theta_lim = {
        let b: f64 = 1e-8;
        let v = b.powf(plan.alpha) * spec.theta(b);
        if v > 0.0 {
            Some(v)
        } else {
            None
        }
    };
    let nf = n as f64;
    let ln = nf.ln();
    let asymptote = theta_lim.map(|theta| match plan.case_label {
        CaseLabel::Case1 => theta / (nf.sqrt() * ln.powf(plan.alpha)),
        CaseLabel::Case2a | CaseLabel::Case2b | CaseLabel::Case3b => theta / ln,
        CaseLabel::Case3a => theta / (nf.powf(1.0 - plan.alpha) * ln.powf(2.0 * plan.alpha)),
    });
    Ok(LambdaDiagnostic { n, beta_n, clamped, lambda, asymptote })
}

/// Step correction of the modified scheme:
///
/// ```text
/// gamma_n = 1/(2 n^2) Int_{log n/n < |x| <= 1} x F(dx)
///                     Int_{log n/(n|x|) < |y| <= 1} y F(dy).
/// ```
///
/// Vanishes identically for symmetric measures.
pub fn gamma_n(spec: &MeasureSpec, n: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParameter("n must be at least 3".into()));
    }
    if spec.is_symmetric() {
        return Ok(0.0);
    }
    let nf = n as f64;
    let l = nf.ln() / nf;
    let hi = 1.0f64.min(spec.support_bound());
    if l >= hi || spec.theta(l) == 0.0 {
        return Ok(0.0);
    }
    // inner(a) = Int_{a < |y| <= 1} y F(dy) = d'(a) - d'(1)
    let dp1 = spec.d_prime(1.0);
    let inner = |a: f64| if a >= 1.0 { 0.0 } else { spec.d_prime(a) - dp1 };
    let outer = match &spec.family {
        crate::measure::MeasureFamily::FiniteActivity { rate, law } => match law {
            crate::measure::JumpLaw::PointMasses(atoms) => atoms
                .iter()
                .filter(|(x, _)| x.abs() > l && x.abs() <= 1.0)
                .map(|(x, w)| rate * w * x * inner(l / x.abs()))
                .sum::<f64>(),
            _ => unreachable!("annulus law is symmetric"),
        },
        _ => quad::integrate_split(
            |a| a * inner(l / a) * (spec.density(a) - spec.density(-a)),
            l,
            hi,
            &[l / hi],
            1e-12,
        )?,
    };
    Ok(outer / (2.0 * nf * nf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypotheses::check_hypotheses;
    use crate::measure::{JumpLaw, MeasureFamily};
    use approx::assert_relative_eq;

    fn ts(alpha: f64, c_plus: f64, c_minus: f64, p: f64, b: f64) -> MeasureSpec {
        MeasureSpec::new(MeasureFamily::TruncatedStable { alpha, c_plus, c_minus, p }, b).unwrap()
    }

    fn grid() -> Vec<f64> {
        (1..=39).map(|k| k as f64 * 0.05).collect()
    }

    fn plan_for(spec: &MeasureSpec) -> RatePlan {
        classify_case(&check_hypotheses(spec, &grid()).unwrap()).unwrap()
    }

    #[test]
    fn classification_covers_the_five_regimes() {
        assert_eq!(plan_for(&ts(1.5, 0.5, 0.5, 1.0, 0.0)).case_label, CaseLabel::Case1);
        assert_eq!(plan_for(&ts(1.0, 0.8, 0.2, 1.0, 0.0)).case_label, CaseLabel::Case2a);
        assert_eq!(plan_for(&ts(1.0, 0.5, 0.5, 1.0, 0.0)).case_label, CaseLabel::Case2b);
        assert_eq!(plan_for(&ts(0.5, 0.8, 0.2, 1.0, 0.0)).case_label, CaseLabel::Case3a);
        assert_eq!(plan_for(&ts(0.5, 0.5, 0.5, 1.0, 0.5)).case_label, CaseLabel::Case3a);
        assert_eq!(plan_for(&ts(0.5, 0.5, 0.5, 1.0, 0.0)).case_label, CaseLabel::Case3b);
    }

    #[test]
    fn rate_values_match_the_closed_forms() {
        let p1 = plan_for(&ts(1.5, 0.5, 0.5, 1.0, 0.0));
        assert_relative_eq!(p1.u(4096), (4096.0f64 / 4096.0f64.ln()).powf(2.0 / 3.0), epsilon = 1e-12);
        assert_relative_eq!(p1.u(4096), 62.36, max_relative = 1e-3);
        let p2a = plan_for(&ts(1.0, 0.8, 0.2, 1.0, 0.0));
        assert_relative_eq!(p2a.u(4096), 4096.0 / 4096.0f64.ln().powi(2), epsilon = 1e-12);
        assert_relative_eq!(p2a.u(4096), 59.2, max_relative = 1e-3);
        for n in [1u64 << 8, 1 << 12, 1 << 16] {
            let nf = n as f64;
            let ln = nf.ln();
            assert_relative_eq!(plan_for(&ts(1.0, 0.5, 0.5, 1.0, 0.0)).u(n), nf / ln, epsilon = 1e-12);
            assert_relative_eq!(plan_for(&ts(0.5, 0.8, 0.2, 1.0, 0.0)).u(n), nf, epsilon = 1e-12);
            assert_relative_eq!(
                plan_for(&ts(0.5, 0.5, 0.5, 1.0, 0.0)).beta_raw(n),
                (ln / nf).powi(2),
                epsilon = 1e-12
            );
            assert_relative_eq!(plan_for(&ts(1.5, 0.5, 0.5, 1.0, 0.0)).beta_raw(n), ln / nf.powf(1.0 / 3.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn rates_diverge_and_cutoffs_vanish() {
        for spec in [
            ts(1.5, 0.5, 0.5, 1.0, 0.0),
            ts(1.0, 0.8, 0.2, 1.0, 0.0),
            ts(1.0, 0.5, 0.5, 1.0, 0.0),
            ts(0.5, 0.8, 0.2, 1.0, 0.0),
            ts(0.5, 0.5, 0.5, 1.0, 0.0),
        ] {
            let plan = plan_for(&spec);
            let ns = [1u64 << 10, 1 << 14, 1 << 18, 1 << 26];
            for w in ns.windows(2) {
                assert!(plan.u(w[1]) > plan.u(w[0]));
                assert!(plan.beta_raw(w[1]) < plan.beta_raw(w[0]));
                assert!(plan.u(w[1]) >= (w[1] as f64).sqrt() * 0.1);
            }
            let lam = lambda_n(&spec, &plan, 1 << 26).unwrap().lambda;
            assert!(lam < lambda_n(&spec, &plan, 1 << 12).unwrap().lambda || lam == 0.0);
        }
    }

    #[test]
    fn case1_cutoff_clamps_at_small_n() {
        let plan = plan_for(&ts(1.5, 0.5, 0.5, 1.0, 0.0));
        // log n / n^{1/3} stays near the jump bound at desk scale
        let (beta, clamped) = plan.beta(64);
        assert!(clamped);
        assert_relative_eq!(beta, 0.5, epsilon = 1e-12);
        let (_, clamped_large) = plan.beta(1 << 20);
        assert!(!clamped_large);
    }

    #[test]
    fn lambda_matches_closed_form_and_asymptote() {
        let spec = ts(0.5, 0.5, 0.5, 1.0, 0.0);
        let plan = plan_for(&spec);
        let d = lambda_n(&spec, &plan, 1024).unwrap();
        assert_relative_eq!(d.beta_n, 4.582e-5, max_relative = 1e-3);
        assert_relative_eq!(d.lambda, 0.1433, max_relative = 1e-3);
        assert_relative_eq!(d.asymptote.unwrap(), 0.1443, max_relative = 1e-3);
    }

    #[test]
    fn lambda_vanishes_beyond_support_and_is_bounded_for_finite_measures() {
        // clamped cutoff beyond the support: tail mass is zero
        let spec = ts(0.5, 0.5, 0.5, 1.0, 0.0);
        let plan = RatePlan { case_label: CaseLabel::Case3b, alpha: 0.5, support_bound: 4.0 };
        // beta(8) = (ln 8 / 8)^2 clamped to 2.0 > p = 1: theta = 0
        let d = lambda_n(&spec, &plan, 8).unwrap();
        assert!(d.beta_n >= 1.0 || d.lambda > 0.0);

        let fa = MeasureSpec::new(
            MeasureFamily::FiniteActivity { rate: 3.0, law: JumpLaw::UniformAnnulus { inner: 0.1, outer: 1.0 } },
            0.0,
        )
        .unwrap();
        let plan = RatePlan { case_label: CaseLabel::Case3a, alpha: 0.5, support_bound: 1.0 };
        for n in [4u64, 64, 1024] {
            assert!(lambda_n(&fa, &plan, n).unwrap().lambda <= 3.0 / n as f64 + 1e-15);
        }
    }

    #[test]
    fn case2b_cutoff_bounds_hold_over_an_n_grid() {
        // symmetric index-1 measure: |d(beta_n)| bounded, delta_n <= C log n
        let spec = ts(1.0, 0.5, 0.5, 1.0, 0.25);
        let plan = RatePlan { case_label: CaseLabel::Case2b, alpha: 1.0, support_bound: 1.0 };
        let mut d_over_const = Vec::new();
        let mut delta_over_log = Vec::new();
        for k in 8..=20 {
            let n = 1u64 << k;
            let (beta, _) = plan.beta(n);
            let tf = spec.tail_functionals(beta).unwrap();
            d_over_const.push(tf.d.abs());
            delta_over_log.push(tf.delta / (n as f64).ln());
        }
        let c1 = d_over_const.iter().copied().fold(0.0, f64::max);
        let c2 = delta_over_log.iter().copied().fold(0.0, f64::max);
        assert!(c1 <= 0.25 + 1e-9); // symmetric: d(beta) = b
        assert!(delta_over_log.iter().all(|v| *v <= c2 * (1.0 + 1e-12)));
        assert!(c2 < 10.0);
    }

    #[test]
    fn gamma_vanishes_for_symmetric_measures() {
        let spec = ts(1.0, 0.5, 0.5, 1.0, 0.0);
        assert_eq!(gamma_n(&spec, 1024).unwrap(), 0.0);
    }

    #[test]
    fn gamma_one_sided_matches_hand_integral() {
        // one-sided index-1 density on (0,1]: the nested integral collapses
        // to (log(n/log n))^2 / (4 n^2)
        let spec = ts(1.0, 1.0, 0.0, 1.0, 0.0);
        let n = 1024u64;
        let nf = n as f64;
        let expect = (nf / nf.ln()).ln().powi(2) / (4.0 * nf * nf);
        let got = gamma_n(&spec, n).unwrap();
        assert!(got > 0.0);
        assert_relative_eq!(got, expect, max_relative = 1e-9);
    }

    #[test]
    fn gamma_matches_two_dimensional_quadrature_oracle() {
        let spec = ts(1.0, 0.8, 0.2, 1.0, 0.0);
        let n = 1024u64;
        let nf = n as f64;
        let l = nf.ln() / nf;
        // brute-force nested quadrature of the double integral
        let inner = |a: f64| {
            if a >= 1.0 {
                0.0
            } else {
                quad::integrate(|y| y * (spec.density(y) - spec.density(-y)), a, 1.0, 1e-12).unwrap()
            }
        };
        let outer = quad::integrate(|x| x * inner(l / x) * (spec.density(x) - spec.density(-x)), l, 1.0, 1e-10).unwrap();
        let oracle = outer / (2.0 * nf * nf);
        assert_relative_eq!(gamma_n(&spec, n).unwrap(), oracle, max_relative = 1e-7);
    }

    #[test]
    fn gamma_zero_when_no_mass_in_window() {
        let spec = MeasureSpec::new(
            MeasureFamily::FiniteActivity { rate: 1.0, law: JumpLaw::PointMasses(vec![(2.0, 0.6), (-3.0, 0.4)]) },
            0.0,
        )
        .unwrap();
        assert_eq!(gamma_n(&spec, 1024).unwrap(), 0.0);
    }
}
