//! Coupled fine/coarse driver paths.
//!
//! Every mode produces a [`PathBundle`]: `m*K` fine increments over the
//! horizon whose `K`-blocks sum bit-exactly to the `m` coarse increments,
//! plus (when requested) the explicit record of jumps above a cutoff.
//! Three interoperable modes:
//!
//! * [`SamplerMode::ExactStable`] — polar-transform increments of the
//!   unbounded-support stable law. Exact for that law; the jump bound `p`
//!   of a truncated family is *not* enforced in this mode (the bounded
//!   and unbounded laws differ by a compound-Poisson tail of rate
//!   `theta(p)`), and no jump record is available.
//! * [`SamplerMode::TruncationCompound`] — the cutoff decomposition
//!   `Y = d(beta) t + M^beta + N^beta`: explicit Poisson jumps above a
//!   cutoff, deterministic drift, and the compensated small-jump
//!   martingale either dropped below a tolerance-chosen sub-cutoff or
//!   sampled per fine cell from an inverse-CDF table.
//! * [`SamplerMode::SeriesRepresentation`] — decreasing-size shot-noise
//!   series with explicit jumps, for oracle use on stable families.

pub mod binio;
mod compound;
pub mod stable;
pub mod table;

use crate::error::{Error, Result};
use crate::measure::{MeasureFamily, MeasureSpec};
use crate::rngstream::{stream_rng, SeedLineage, Substream};
use rand::Rng;

pub use compound::JumpDraw;
pub use stable::{sample_stable_increments, standard_stable, StableIncrements};
pub use table::IncrementTable;

/// One recorded jump of the driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub time: f64,
    pub size: f64,
}

/// Coupled fine/coarse increments of one driver path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBundle {
    /// Coarse cells per unit time.
    pub n: u64,
    /// Fine cells per coarse cell.
    pub refinement: u32,
    pub horizon: f64,
    /// `m * K` increments, `m = floor(n * horizon)`.
    pub fine_increments: Vec<f64>,
    /// `m` increments; block sums of the fine ones in fixed order.
    pub coarse_increments: Vec<f64>,
    /// Jumps above the record cutoff, time-sorted.
    pub jump_record: Option<Vec<Jump>>,
    pub seed: SeedLineage,
}

impl PathBundle {
    fn empty(seed: SeedLineage) -> Self {
        PathBundle {
            n: 0,
            refinement: 1,
            horizon: 0.0,
            fine_increments: Vec::new(),
            coarse_increments: Vec::new(),
            jump_record: None,
            seed,
        }
    }

    /// Terminal value of the path.
    pub fn terminal(&self) -> f64 {
        self.coarse_increments.iter().sum()
    }

    pub fn fine_dt(&self) -> f64 {
        1.0 / (self.n as f64 * self.refinement as f64)
    }
}

/// `K`-fold block sums in fixed left-to-right order.
pub fn aggregate(fine: &[f64], k: usize) -> Result<Vec<f64>> {
    if k == 0 || fine.len() % k != 0 {
        return Err(Error::GridMismatch(format!(
            "fine length {} not divisible by refinement {k}",
            fine.len()
        )));
    }
    Ok(fine.chunks_exact(k).map(|c| c.iter().sum()).collect())
}

/// How the driver is simulated.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplerMode {
    ExactStable,
    TruncationCompound { beta: f64 },
    SeriesRepresentation { truncation_level: usize },
}

/// How the sub-cutoff martingale is handled in the compound mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallJumpMethod {
    /// Drop if the jump budget allows, otherwise tabulate.
    Auto,
    /// Drop compensated jumps below a tolerance-chosen sub-cutoff.
    Drop,
    /// Sample the compensated martingale from an inverse-CDF table.
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallJumpPolicy {
    pub method: SmallJumpMethod,
    /// Largest neglected variance per unit time.
    pub variance_tol: f64,
    /// Largest acceptable expected explicit-jump count per path.
    pub jump_budget: f64,
}

impl Default for SmallJumpPolicy {
    fn default() -> Self {
        SmallJumpPolicy { method: SmallJumpMethod::Auto, variance_tol: 1e-6, jump_budget: 2e7 }
    }
}

/// Which jumps end up in the bundle's record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordPolicy {
    None,
    /// Jumps above the mode's cutoff.
    AboveBeta,
    /// Every explicitly simulated jump.
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub spec: MeasureSpec,
    pub mode: SamplerMode,
    /// Coarse cells per unit time.
    pub n: u64,
    /// Fine cells per coarse cell.
    pub refinement: u32,
    pub horizon: f64,
    pub small_jump: SmallJumpPolicy,
    pub record: RecordPolicy,
}

impl SamplerConfig {
    pub fn new(spec: MeasureSpec, mode: SamplerMode, n: u64, refinement: u32, horizon: f64) -> Self {
        SamplerConfig {
            spec,
            mode,
            n,
            refinement,
            horizon,
            small_jump: SmallJumpPolicy::default(),
            record: RecordPolicy::AboveBeta,
        }
    }

    fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.n < 1 || self.refinement < 1 || !(self.horizon > 0.0) {
            return Err(Error::InvalidParameter("need n >= 1, refinement >= 1, horizon > 0".into()));
        }
        if (self.n as f64 * self.horizon).floor() < 1.0 {
            return Err(Error::InvalidParameter("horizon shorter than one coarse cell".into()));
        }
        if let SamplerMode::TruncationCompound { beta } = self.mode {
            if !(beta > 0.0) {
                return Err(Error::InvalidParameter("truncation cutoff must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Default mode for a family: exact stable sampling where it applies,
/// the cutoff decomposition otherwise.
pub fn default_mode(spec: &MeasureSpec) -> SamplerMode {
    match &spec.family {
        MeasureFamily::TruncatedStable { .. } => SamplerMode::ExactStable,
        _ => SamplerMode::TruncationCompound { beta: 0.5 * spec.support_bound() },
    }
}

enum Kind {
    Stable { inc: StableIncrements },
    Compound(compound::CompoundGen),
    Series(compound::SeriesGen),
}

/// Precomputed per-experiment generator; one instance serves all paths.
pub struct PathGenerator {
    cells: usize,
    fine_per_cell: usize,
    dt_fine: f64,
    drift_fine: f64,
    record_beta: f64,
    kind: Kind,
    n: u64,
    refinement: u32,
    horizon: f64,
}

impl PathGenerator {
    pub fn new(config: &SamplerConfig) -> Result<Self> {
        config.validate()?;
        let cells = (config.n as f64 * config.horizon).floor() as usize;
        let fine_per_cell = config.refinement as usize;
        let dt_fine = 1.0 / (config.n as f64 * config.refinement as f64);
        let (kind, drift_per_unit, record_beta) = match &config.mode {
            SamplerMode::ExactStable => {
                let (alpha, c_plus, c_minus) = match &config.spec.family {
                    MeasureFamily::TruncatedStable { alpha, c_plus, c_minus, .. } => (*alpha, *c_plus, *c_minus),
                    _ => {
                        return Err(Error::InvalidParameter(
                            "exact stable sampling needs the stable family".into(),
                        ))
                    }
                };
                let inc = StableIncrements::canonical(alpha, c_plus, c_minus, dt_fine)?;
                let drift = if (alpha - 1.0).abs() < 1e-12 {
                    config.spec.b
                } else {
                    config.spec.b + (c_plus - c_minus) * alpha / (alpha - 1.0)
                };
                (Kind::Stable { inc }, drift, f64::INFINITY)
            }
            SamplerMode::TruncationCompound { beta } => {
                let gen = compound::CompoundGen::plan(config, *beta, dt_fine)?;
                let drift = gen.drift_per_unit;
                let rec = match config.record {
                    RecordPolicy::None => f64::INFINITY,
                    RecordPolicy::AboveBeta => *beta,
                    RecordPolicy::All => 0.0,
                };
                (Kind::Compound(gen), drift, rec)
            }
            SamplerMode::SeriesRepresentation { truncation_level } => {
                let gen = compound::SeriesGen::plan(config, *truncation_level)?;
                let drift = gen.drift_per_unit;
                let rec = match config.record {
                    RecordPolicy::None => f64::INFINITY,
                    _ => 0.0,
                };
                (Kind::Series(gen), drift, rec)
            }
        };
        Ok(PathGenerator {
            cells,
            fine_per_cell,
            dt_fine,
            drift_fine: drift_per_unit * dt_fine,
            record_beta,
            kind,
            n: config.n,
            refinement: config.refinement,
            horizon: config.horizon,
        })
    }

    /// Cutoff below which explicit jumps are not simulated (0 when every
    /// jump is explicit, the mode cutoff in table mode).
    pub fn explicit_cutoff(&self) -> f64 {
        match &self.kind {
            Kind::Stable { .. } => f64::NAN,
            Kind::Compound(g) => g.cutoff,
            Kind::Series(g) => g.eff_cutoff,
        }
    }

    /// Effective drift per unit time of the simulated decomposition.
    pub fn drift_per_unit(&self) -> f64 {
        self.drift_fine / self.dt_fine
    }

    pub fn fine_len(&self) -> usize {
        self.cells * self.fine_per_cell
    }

    pub fn generate(&self, seed: SeedLineage) -> PathBundle {
        let mut bundle = PathBundle::empty(seed);
        self.generate_into(seed, &mut bundle);
        bundle
    }

    /// Fill `bundle` in place; buffers are reused across calls.
    pub fn generate_into(&self, seed: SeedLineage, bundle: &mut PathBundle) {
        bundle.n = self.n;
        bundle.refinement = self.refinement;
        bundle.horizon = self.horizon;
        bundle.seed = seed;
        let fine_len = self.fine_len();
        bundle.fine_increments.clear();
        bundle.fine_increments.resize(fine_len, self.drift_fine);
        let record = self.record_beta.is_finite();
        let mut jumps: Vec<Jump> = Vec::new();

        match &self.kind {
            Kind::Stable { inc } => {
                let mut rng = stream_rng(seed, Substream::Driver);
                for v in bundle.fine_increments.iter_mut() {
                    *v += inc.draw(&mut rng);
                }
            }
            Kind::Compound(gen) => {
                let mut rng = stream_rng(seed, Substream::Driver);
                gen.place_jumps(&mut rng, self.horizon, |time, size| {
                    let cell = ((time / self.dt_fine) as usize).min(fine_len - 1);
                    bundle.fine_increments[cell] += size;
                    if record && size.abs() > self.record_beta {
                        jumps.push(Jump { time, size });
                    }
                });
                if let Some(table) = &gen.table {
                    let mut srng = stream_rng(seed, Substream::SmallJumps);
                    for v in bundle.fine_increments.iter_mut() {
                        *v += table.sample(srng.random());
                    }
                }
            }
            Kind::Series(gen) => {
                let mut rng = stream_rng(seed, Substream::Driver);
                gen.place_jumps(&mut rng, self.horizon, |time, size| {
                    let cell = ((time / self.dt_fine) as usize).min(fine_len - 1);
                    bundle.fine_increments[cell] += size;
                    if record && size.abs() > self.record_beta {
                        jumps.push(Jump { time, size });
                    }
                });
            }
        }

        bundle.coarse_increments.clear();
        bundle
            .coarse_increments
            .extend(bundle.fine_increments.chunks_exact(self.fine_per_cell).map(|c| c.iter().sum::<f64>()));
        if record {
            jumps.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap());
            bundle.jump_record = Some(jumps);
        } else {
            bundle.jump_record = None;
        }
    }
}

/// Generate one path bundle (convenience; experiments reuse a generator).
pub fn sample_path(config: &SamplerConfig, seed: SeedLineage) -> Result<PathBundle> {
    Ok(PathGenerator::new(config)?.generate(seed))
}
