//! Cutoff-decomposition and shot-noise generators.

use crate::error::{Error, Result};
use crate::measure::{JumpLaw, MeasureFamily, MeasureSpec};
use crate::sampler::table::IncrementTable;
use crate::sampler::{SamplerConfig, SmallJumpMethod};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// Draws one jump from the normalized tail law `F | {|x| > cutoff}`.
#[derive(Debug, Clone)]
pub enum JumpDraw {
    StableTail {
        alpha: f64,
        p_pow: f64,
        c_plus: f64,
        c_minus: f64,
        theta_plus: f64,
        theta: f64,
    },
    Annulus {
        lo: f64,
        outer: f64,
    },
    Atoms {
        /// `(cumulative weight, position)`, cumulative normalized to 1.
        cum: Vec<(f64, f64)>,
    },
    Numeric {
        xs: Vec<f64>,
        cdf: Vec<f64>,
    },
}

impl JumpDraw {
    pub fn for_tail(spec: &MeasureSpec, cutoff: f64) -> Result<Self> {
        match &spec.family {
            MeasureFamily::TruncatedStable { alpha, c_plus, c_minus, p } => {
                let theta_plus = spec.theta_plus(cutoff.max(f64::MIN_POSITIVE));
                let theta = theta_plus + spec.theta_minus(cutoff.max(f64::MIN_POSITIVE));
                Ok(JumpDraw::StableTail {
                    alpha: *alpha,
                    p_pow: p.powf(-alpha),
                    c_plus: *c_plus,
                    c_minus: *c_minus,
                    theta_plus,
                    theta,
                })
            }
            MeasureFamily::FiniteActivity { law, .. } => match law {
                JumpLaw::UniformAnnulus { inner, outer } => {
                    let lo = cutoff.max(*inner);
                    if lo >= *outer {
                        return Err(Error::InvalidParameter("cutoff beyond the annulus".into()));
                    }
                    Ok(JumpDraw::Annulus { lo, outer: *outer })
                }
                JumpLaw::PointMasses(atoms) => {
                    let kept: Vec<(f64, f64)> =
                        atoms.iter().filter(|(x, _)| x.abs() > cutoff).cloned().collect();
                    let total: f64 = kept.iter().map(|(_, w)| *w).sum();
                    if total <= 0.0 {
                        return Err(Error::InvalidParameter("no atoms beyond the cutoff".into()));
                    }
                    let mut acc = 0.0;
                    let cum = kept
                        .iter()
                        .map(|(x, w)| {
                            acc += w / total;
                            (acc, *x)
                        })
                        .collect();
                    Ok(JumpDraw::Atoms { cum })
                }
            },
            MeasureFamily::TabulatedDensity { .. } => {
                let p = spec.support_bound();
                let nodes = 4096usize;
                let mut xs = Vec::with_capacity(2 * nodes);
                let lo = cutoff.max(1e-12 * p);
                for j in 0..=nodes {
                    xs.push(-p + (p - lo) * j as f64 / nodes as f64);
                }
                for j in 0..=nodes {
                    xs.push(lo + (p - lo) * j as f64 / nodes as f64);
                }
                let mut cdf = Vec::with_capacity(xs.len());
                let mut acc = 0.0;
                cdf.push(0.0);
                for w in xs.windows(2) {
                    let mid = 0.5 * (w[0] + w[1]);
                    acc += spec.density(mid) * (w[1] - w[0]);
                    cdf.push(acc);
                }
                if acc <= 0.0 {
                    return Err(Error::InvalidParameter("no tabulated mass beyond cutoff".into()));
                }
                for c in cdf.iter_mut() {
                    *c /= acc;
                }
                Ok(JumpDraw::Numeric { xs, cdf })
            }
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpDraw::StableTail { alpha, p_pow, c_plus, c_minus, theta_plus, theta } => {
                let side: f64 = rng.random();
                let q: f64 = rng.random();
                if side * theta < *theta_plus {
                    (q * theta_plus / c_plus + p_pow).powf(-1.0 / alpha)
                } else {
                    let theta_minus = theta - theta_plus;
                    -(q * theta_minus / c_minus + p_pow).powf(-1.0 / alpha)
                }
            }
            JumpDraw::Annulus { lo, outer } => {
                let side: f64 = rng.random();
                let q: f64 = rng.random();
                let size = lo + q * (outer - lo);
                if side < 0.5 {
                    size
                } else {
                    -size
                }
            }
            JumpDraw::Atoms { cum } => {
                let u: f64 = rng.random();
                cum.iter().find(|(c, _)| u <= *c).map(|(_, x)| *x).unwrap_or(cum[cum.len() - 1].1)
            }
            JumpDraw::Numeric { xs, cdf } => {
                let u: f64 = rng.random();
                let i = cdf.partition_point(|c| *c < u).clamp(1, cdf.len() - 1);
                let (c0, c1) = (cdf[i - 1], cdf[i]);
                if c1 > c0 {
                    xs[i - 1] + (xs[i] - xs[i - 1]) * (u - c0) / (c1 - c0)
                } else {
                    xs[i]
                }
            }
        }
    }
}

/// Cutoff-decomposition generator: drift + explicit jumps (+ tabulated
/// small-jump martingale when the drop route is infeasible).
pub struct CompoundGen {
    /// Explicit jumps are simulated above this cutoff.
    pub cutoff: f64,
    pub drift_per_unit: f64,
    pub rate: f64,
    pub draw: Option<JumpDraw>,
    pub table: Option<IncrementTable>,
}

impl CompoundGen {
    pub fn plan(config: &SamplerConfig, beta: f64, dt_fine: f64) -> Result<Self> {
        let spec = &config.spec;
        match &spec.family {
            MeasureFamily::FiniteActivity { rate, .. } => Ok(CompoundGen {
                cutoff: 0.0,
                drift_per_unit: spec.drift_at_cutoff(0.0),
                rate: *rate,
                draw: Some(JumpDraw::for_tail(spec, 0.0)?),
                table: None,
            }),
            MeasureFamily::TabulatedDensity { .. } => {
                let rate = spec.theta(f64::MIN_POSITIVE);
                Ok(CompoundGen {
                    cutoff: 0.0,
                    drift_per_unit: spec.drift_at_cutoff(f64::MIN_POSITIVE),
                    rate,
                    draw: Some(JumpDraw::for_tail(spec, 0.0)?),
                    table: None,
                })
            }
            MeasureFamily::TruncatedStable { alpha, c_plus, c_minus, p } => {
                let policy = config.small_jump;
                let c_tot = c_plus + c_minus;
                // sub-cutoff at which the dropped variance meets the tolerance
                let bp_tol = (policy.variance_tol * (2.0 - alpha) / (alpha * c_tot))
                    .powf(1.0 / (2.0 - alpha));
                let bp = bp_tol.min(beta).min(*p);
                let expected = config.horizon * spec.theta(bp);
                let use_drop = match policy.method {
                    SmallJumpMethod::Drop => {
                        if expected > policy.jump_budget {
                            return Err(Error::SmallJumpBudget {
                                required_cutoff: bp,
                                expected_jumps: expected,
                                budget: policy.jump_budget,
                            });
                        }
                        true
                    }
                    SmallJumpMethod::Table => false,
                    SmallJumpMethod::Auto => expected <= policy.jump_budget,
                };
                if use_drop {
                    let rate = spec.theta(bp);
                    Ok(CompoundGen {
                        cutoff: bp,
                        drift_per_unit: spec.drift_at_cutoff(bp),
                        rate,
                        draw: if rate > 0.0 { Some(JumpDraw::for_tail(spec, bp)?) } else { None },
                        table: None,
                    })
                } else {
                    let cut = beta.min(*p);
                    let rate = spec.theta(beta);
                    Ok(CompoundGen {
                        cutoff: beta,
                        drift_per_unit: spec.drift_at_cutoff(beta),
                        rate,
                        draw: if rate > 0.0 { Some(JumpDraw::for_tail(spec, beta)?) } else { None },
                        table: Some(IncrementTable::build(*alpha, *c_plus, *c_minus, cut, dt_fine)?),
                    })
                }
            }
        }
    }

    /// Draw jump times and sizes over `[0, horizon]` in a fixed order.
    pub fn place_jumps<R: Rng + ?Sized>(&self, rng: &mut R, horizon: f64, mut place: impl FnMut(f64, f64)) {
        let Some(draw) = &self.draw else { return };
        let lambda = self.rate * horizon;
        if lambda <= 0.0 {
            return;
        }
        let count = Poisson::new(lambda).expect("positive rate").sample(rng) as u64;
        for _ in 0..count {
            let t: f64 = rng.random::<f64>() * horizon;
            let size = draw.draw(rng);
            place(t, size);
        }
    }
}

/// Decreasing-size series generator for the stable family.
pub struct SeriesGen {
    /// Effective size cutoff implied by the truncation level.
    pub eff_cutoff: f64,
    pub drift_per_unit: f64,
    level: f64,
    /// `horizon * (c_+ + c_-)`.
    tc: f64,
    alpha: f64,
    p_pow: f64,
    share_plus: f64,
}

impl SeriesGen {
    pub fn plan(config: &SamplerConfig, truncation_level: usize) -> Result<Self> {
        let MeasureFamily::TruncatedStable { alpha, c_plus, c_minus, p } = &config.spec.family else {
            return Err(Error::InvalidParameter(
                "series representation needs the stable family".into(),
            ));
        };
        if truncation_level == 0 {
            return Err(Error::InvalidParameter("series needs at least one term".into()));
        }
        let c_tot = c_plus + c_minus;
        let tc = config.horizon * c_tot;
        let p_pow = p.powf(-alpha);
        let eff_cutoff = (truncation_level as f64 / tc + p_pow).powf(-1.0 / alpha);
        let residual = config.spec.small_second_moment(eff_cutoff);
        if residual > config.small_jump.variance_tol {
            return Err(Error::SeriesTruncation {
                level: truncation_level,
                residual,
                tolerance: config.small_jump.variance_tol,
            });
        }
        Ok(SeriesGen {
            eff_cutoff,
            drift_per_unit: config.spec.drift_at_cutoff(eff_cutoff),
            level: truncation_level as f64,
            tc,
            alpha: *alpha,
            p_pow,
            share_plus: c_plus / c_tot,
        })
    }

    pub fn place_jumps<R: Rng + ?Sized>(&self, rng: &mut R, horizon: f64, mut place: impl FnMut(f64, f64)) {
        let mut epoch = 0.0f64;
        loop {
            let e: f64 = rand_distr::Exp1.sample(rng);
            epoch += e;
            if epoch > self.level {
                break;
            }
            let u_side: f64 = rng.random();
            let u_time: f64 = rng.random();
            let size_abs = (epoch / self.tc + self.p_pow).powf(-1.0 / self.alpha);
            let size = if u_side < self.share_plus { size_abs } else { -size_abs };
            place(u_time * horizon, size);
        }
    }
}
