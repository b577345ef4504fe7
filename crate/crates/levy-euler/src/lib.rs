//! Euler schemes for SDEs driven by pure-jump processes, and the
//! machinery to verify their convergence rates and limiting error laws
//! by simulation.
//!
//! The crate covers the whole loop:
//!
//! 1. describe a jump measure ([`measure`]), check its tail-growth
//!    hypotheses ([`hypotheses`]) and classify it into one of five rate
//!    regimes ([`rate`]);
//! 2. simulate coupled fine/coarse driver paths ([`sampler`]);
//! 3. run the Euler scheme against a fine reference and extract the
//!    normalized error process ([`euler`]);
//! 4. simulate the predicted limiting error law ([`limit`]);
//! 5. compare the two statistically ([`stats`]);
//! 6. orchestrate reproducible experiments from config files
//!    ([`config`], [`runner`], [`manifest`]).
//!
//! The `book/` directory of the repository walks through the concepts;
//! its chapters are compiled as doc-tests via the [`guide`] module.

pub mod coefficient;
pub mod config;
pub mod error;
pub mod euler;
pub mod exponent;
pub mod guide;
pub mod hypotheses;
pub mod limit;
pub mod manifest;
pub mod measure;
pub mod quad;
pub mod rate;
pub mod rngstream;
pub mod runner;
pub mod sampler;
pub mod stats;

pub use coefficient::Coefficient;
pub use error::{Error, Result};
pub use euler::{ErrorSample, SchemeOutput};
pub use hypotheses::{check_hypotheses, HypothesisReport};
pub use limit::{exponent_v, solve_limit_sde, v_params_from_case, LimitSpec, VProcessParams};
pub use measure::{JumpLaw, MeasureFamily, MeasureSpec, TailFunctionals};
pub use rate::{classify_case, gamma_n, lambda_n, CaseLabel, RatePlan};
pub use rngstream::SeedLineage;
pub use sampler::{aggregate, PathBundle, SamplerConfig, SamplerMode};
