//! The Euler scheme, its modified variant, the fine-grid reference
//! solution and the normalized error process.
//!
//! The state equation `dX = f(X_-) dY` is stepped on the coarse grid
//! `i/n` by
//!
//! ```text
//! X^n_{i/n} = X^n_{(i-1)/n} + f(X^n_{(i-1)/n}) (Y_{i/n} - Y_{(i-1)/n})
//! ```
//!
//! while the reference solution runs the same recursion on the fine grid
//! of the coupled bundle. The error `U^n = X^n - X` at coarse nodes is
//! accumulated by a single recursion in which the scheme step and the
//! reference's per-cell increment are computed in a shared order: when
//! the two see identical cell contributions (constant `f`, or single-jump
//! cells of a drift-free finite-activity driver) the update is the float
//! `0.0` and the error stays exactly zero.

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::sampler::{Jump, PathBundle};
use serde::Serialize;

/// Plain Euler recursion; returns the `len+1` grid values.
pub fn euler_path(f: &Coefficient, x0: f64, increments: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    euler_path_into(f, x0, increments, &mut out)?;
    Ok(out)
}

pub fn euler_path_into(f: &Coefficient, x0: f64, increments: &[f64], out: &mut Vec<f64>) -> Result<()> {
    out.clear();
    out.reserve(increments.len() + 1);
    let mut x = x0;
    out.push(x);
    for (step, dy) in increments.iter().enumerate() {
        x += f.eval(x) * dy;
        if !x.is_finite() {
            return Err(Error::NonFiniteState { step });
        }
        out.push(x);
    }
    Ok(())
}

/// Modified Euler recursion: each step additionally subtracts
/// `f f'(state) * gamma_step`.
pub fn modified_euler_path(
    f: &Coefficient,
    x0: f64,
    increments: &[f64],
    gamma_step: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(increments.len() + 1);
    let mut x = x0;
    out.push(x);
    for (step, dy) in increments.iter().enumerate() {
        x += f.eval(x) * dy - f.g(x) * gamma_step;
        if !x.is_finite() {
            return Err(Error::NonFiniteState { step });
        }
        out.push(x);
    }
    Ok(out)
}

/// Fine-grid reference solution (the Euler recursion on the fine grid).
pub fn reference_path(f: &Coefficient, x0: f64, bundle: &PathBundle) -> Result<Vec<f64>> {
    euler_path(f, x0, &bundle.fine_increments)
}

/// Exact reference for the linear coefficient driven by a drift-free
/// finite-variation jump path: the product of `1 + jump` applied in time
/// order (evaluated with the same float operation as the Euler step, so
/// single-jump comparisons are bit-exact).
pub fn jump_product_reference(x0: f64, jumps: &[Jump]) -> f64 {
    let mut x = x0;
    for j in jumps {
        x += x * j.size;
    }
    x
}

/// Normalized error evaluated on the coarse grid.
#[derive(Debug, Clone, Default)]
pub struct ErrorGrid {
    /// `u_n * U` at coarse nodes `0..=m`.
    pub values: Vec<f64>,
    pub terminal: f64,
    pub path_sup: f64,
}

/// Difference the coarse scheme against the reference at shared nodes.
pub fn error_process(
    coarse_path: &[f64],
    reference: &[f64],
    refinement: usize,
    u_n: f64,
) -> Result<ErrorGrid> {
    if refinement == 0 || (coarse_path.len() - 1) * refinement != reference.len() - 1 {
        return Err(Error::GridMismatch(format!(
            "coarse {} / reference {} nodes under refinement {refinement}",
            coarse_path.len(),
            reference.len()
        )));
    }
    let values: Vec<f64> = coarse_path
        .iter()
        .enumerate()
        .map(|(i, x)| u_n * (x - reference[i * refinement]))
        .collect();
    let terminal = *values.last().unwrap();
    let path_sup = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(ErrorGrid { values, terminal, path_sup })
}

/// Within-cell compensator sums: cumulative values at coarse nodes of
///
/// ```text
/// W^n_t = sum_i Int_{cell i} (f(X_{s-}) - f(X at cell start)) dY_s
/// ```
///
/// approximated on the fine grid of the reference, scaled by `u_n`.
pub fn wn_process(
    reference: &[f64],
    fine_increments: &[f64],
    refinement: usize,
    u_n: f64,
    f: &Coefficient,
) -> Result<Vec<f64>> {
    if refinement == 0 || fine_increments.len() % refinement != 0 {
        return Err(Error::GridMismatch("fine grid not divisible by refinement".into()));
    }
    if reference.len() != fine_increments.len() + 1 {
        return Err(Error::GridMismatch("reference nodes must be fine increments + 1".into()));
    }
    let cells = fine_increments.len() / refinement;
    let mut out = Vec::with_capacity(cells + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for i in 0..cells {
        let s = i * refinement;
        let f_start = f.eval(reference[s]);
        let mut cell = 0.0;
        for k in 0..refinement {
            cell += (f.eval(reference[s + k]) - f_start) * fine_increments[s + k];
        }
        acc += cell;
        out.push(u_n * acc);
    }
    Ok(out)
}

/// Full per-path scheme output.
#[derive(Debug, Clone, Default)]
pub struct SchemeOutput {
    pub error: ErrorGrid,
    /// `u_n * W^n` at coarse nodes (empty unless requested).
    pub wn_values: Vec<f64>,
    pub wn_terminal: f64,
    pub reference_terminal: f64,
    pub scheme_terminal: f64,
}

/// Run the coupled engine over one bundle: fine reference, coarse scheme
/// (modified when `gamma_step` is set) and the error recursion, in one
/// pass and a shared accumulation order.
pub fn run_scheme(
    f: &Coefficient,
    x0: f64,
    bundle: &PathBundle,
    u_n: f64,
    gamma_step: Option<f64>,
    want_wn: bool,
    out: &mut SchemeOutput,
) -> Result<()> {
    let k = bundle.refinement as usize;
    let fine = &bundle.fine_increments;
    let coarse = &bundle.coarse_increments;
    if k == 0 || fine.len() != coarse.len() * k {
        return Err(Error::GridMismatch("bundle fine/coarse lengths inconsistent".into()));
    }
    let cells = coarse.len();
    out.error.values.clear();
    out.error.values.reserve(cells + 1);
    out.error.values.push(0.0);
    out.wn_values.clear();
    if want_wn {
        out.wn_values.reserve(cells + 1);
        out.wn_values.push(0.0);
    }

    let mut x_ref = x0; // fine reference state
    let mut u = 0.0f64; // unnormalized error at coarse nodes
    let mut wn_acc = 0.0f64;
    let mut sup = 0.0f64;
    for i in 0..cells {
        let x_start = x_ref;
        let f_start = f.eval(x_start);
        let mut cell_ref = 0.0; // reference increment over the cell
        let mut cell_wn = 0.0;
        for j in 0..k {
            let dy = fine[i * k + j];
            let fx = f.eval(x_ref);
            cell_ref += fx * dy;
            if want_wn {
                cell_wn += (fx - f_start) * dy;
            }
            x_ref += fx * dy;
            if !x_ref.is_finite() {
                return Err(Error::NonFiniteState { step: i * k + j });
            }
        }
        // scheme state reconstructed from the shared reference level
        let x_scheme = x_start + u;
        let mut step = f.eval(x_scheme) * coarse[i] - cell_ref;
        if let Some(gamma) = gamma_step {
            step -= f.g(x_scheme) * gamma;
        }
        u += step;
        if !u.is_finite() {
            return Err(Error::NonFiniteState { step: (i + 1) * k - 1 });
        }
        let scaled = u_n * u;
        sup = sup.max(scaled.abs());
        out.error.values.push(scaled);
        if want_wn {
            wn_acc += cell_wn;
            out.wn_values.push(u_n * wn_acc);
        }
    }
    out.error.terminal = *out.error.values.last().unwrap();
    out.error.path_sup = sup;
    out.wn_terminal = if want_wn { *out.wn_values.last().unwrap() } else { 0.0 };
    out.reference_terminal = x_ref;
    out.scheme_terminal = x_ref + u;
    Ok(())
}

/// Reconstruct the error path from the compensator path: the recursion
///
/// ```text
/// U_i = U_{i-1} + (f(Xbar_{i-1} + U_{i-1}) - f(Xbar_{i-1})) dYbar_i - dW_i
/// ```
///
/// with `Xbar` the reference at coarse nodes. Independent route to the
/// same object as [`run_scheme`]; used as a cross-check.
pub fn error_from_wn(
    f: &Coefficient,
    reference: &[f64],
    coarse_increments: &[f64],
    refinement: usize,
    wn_unscaled: &[f64],
) -> Result<Vec<f64>> {
    if wn_unscaled.len() != coarse_increments.len() + 1 {
        return Err(Error::GridMismatch("compensator path length mismatch".into()));
    }
    let mut u = 0.0;
    let mut out = Vec::with_capacity(coarse_increments.len() + 1);
    out.push(0.0);
    for (i, dy) in coarse_increments.iter().enumerate() {
        let xbar = reference[i * refinement];
        u += (f.eval(xbar + u) - f.eval(xbar)) * dy - (wn_unscaled[i + 1] - wn_unscaled[i]);
        out.push(u);
    }
    Ok(out)
}

/// One row of the per-path error output.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrorSample {
    pub n: u64,
    pub path_index: u64,
    /// `u_n * U^n` at the horizon.
    pub terminal: f64,
    /// sup over coarse nodes of `|u_n * U^n|`.
    pub path_sup: f64,
    /// `u_n * W^n` at the horizon.
    pub wn_terminal: f64,
}

impl ErrorSample {
    pub const CSV_HEADER: &'static str = "n,path_index,terminal,path_sup,wn_terminal";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.17e},{:.17e},{:.17e}",
            self.n, self.path_index, self.terminal, self.path_sup, self.wn_terminal
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{JumpLaw, MeasureFamily, MeasureSpec};
    use crate::rngstream::SeedLineage;
    use crate::sampler::{sample_path, RecordPolicy, SamplerConfig, SamplerMode};
    use approx::assert_relative_eq;

    fn bundle_from(fine: Vec<f64>, k: u32) -> PathBundle {
        let coarse = crate::sampler::aggregate(&fine, k as usize).unwrap();
        PathBundle {
            n: (fine.len() as u64) / k as u64,
            refinement: k,
            horizon: 1.0,
            fine_increments: fine,
            coarse_increments: coarse,
            jump_record: None,
            seed: SeedLineage { experiment_seed: 0, path_index: 0 },
        }
    }

    #[test]
    fn zero_coefficient_freezes_the_state() {
        let path = euler_path(&Coefficient::Zero, 2.5, &[0.3, -4.0, 1.0]).unwrap();
        assert_eq!(path, vec![2.5; 4]);
    }

    #[test]
    fn linear_two_step_recursion() {
        let path = euler_path(&Coefficient::Linear, 1.0, &[0.1, -0.2]).unwrap();
        assert_relative_eq!(path[1], 1.1, epsilon = 1e-15);
        assert_relative_eq!(path[2], 0.88, epsilon = 1e-15);
    }

    #[test]
    fn additive_coefficient_gives_exactly_zero_error() {
        // f = 1: scheme and reference accumulate the same block sums
        let fine: Vec<f64> = (0..64).map(|i| ((i * 37 + 11) % 17) as f64 * 0.013 - 0.1).collect();
        let bundle = bundle_from(fine, 8);
        let mut out = SchemeOutput::default();
        run_scheme(&Coefficient::One, 0.3, &bundle, 5.0, None, true, &mut out).unwrap();
        assert!(out.error.values.iter().all(|v| *v == 0.0));
        assert_eq!(out.error.path_sup, 0.0);
        // constant f also kills the compensator
        assert!(out.wn_values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_jump_cells_are_bit_exact_for_zero_drift_jumps() {
        // one jump in cell 1, zero increments elsewhere
        let mut fine = vec![0.0; 32];
        fine[12] = 0.47;
        let bundle = bundle_from(fine, 8);
        let f = Coefficient::Rational;
        let mut out = SchemeOutput::default();
        run_scheme(&f, 0.2, &bundle, 3.0, None, false, &mut out).unwrap();
        assert!(out.error.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn two_jumps_in_one_cell_match_the_hand_recursion() {
        let (y1, y2) = (0.3, -0.25);
        let mut fine = vec![0.0; 8];
        fine[2] = y1;
        fine[5] = y2; // same coarse cell under k = 8
        let bundle = bundle_from(fine, 8);
        let f = Coefficient::Rational;
        let x0 = 0.4;
        let mut out = SchemeOutput::default();
        run_scheme(&f, x0, &bundle, 1.0, None, false, &mut out).unwrap();
        // scheme: x0 + f(x0)(y1+y2); truth: sequential jumps
        let scheme = x0 + f.eval(x0) * (y1 + y2);
        let mid = x0 + f.eval(x0) * y1;
        let truth = mid + f.eval(mid) * y2;
        assert_relative_eq!(out.error.terminal, scheme - truth, epsilon = 1e-15);
        // leading order: -(f(x0 + f(x0) y1) - f(x0)) y2
        let leading = -(f.eval(x0 + f.eval(x0) * y1) - f.eval(x0)) * y2;
        assert_relative_eq!(out.error.terminal, leading, epsilon = 1e-15);
    }

    #[test]
    fn modified_scheme_trivial_cases() {
        // one step: f(x) = x, x0 = 1, dy = 0.1, gamma = 0.01
        let path = modified_euler_path(&Coefficient::Linear, 1.0, &[0.1], 0.01).unwrap();
        assert_relative_eq!(path[1], 1.09, epsilon = 1e-15);
        // zero gamma reduces bit-exactly to the plain scheme
        let incs = [0.2, -0.4, 0.1];
        let plain = euler_path(&Coefficient::Rational, 0.7, &incs).unwrap();
        let modified = modified_euler_path(&Coefficient::Rational, 0.7, &incs, 0.0).unwrap();
        assert_eq!(plain, modified);
        let frozen = modified_euler_path(&Coefficient::Zero, 0.7, &incs, 0.3).unwrap();
        assert_eq!(frozen, vec![0.7; 4]);
    }

    #[test]
    fn jump_product_matches_finite_activity_reference() {
        let jumps = vec![Jump { time: 0.2, size: 0.1 }, Jump { time: 0.7, size: -0.2 }];
        let exact = jump_product_reference(1.0, &jumps);
        assert_relative_eq!(exact, 0.88, epsilon = 1e-15);
        // fine Euler on a piecewise-constant path applies the same updates
        let mut fine = vec![0.0; 16];
        fine[3] = 0.1;
        fine[11] = -0.2;
        let path = euler_path(&Coefficient::Linear, 1.0, &fine).unwrap();
        assert_eq!(*path.last().unwrap(), exact);
    }

    #[test]
    fn level_differencing_agrees_with_the_recursion() {
        let spec = MeasureSpec::new(
            MeasureFamily::TruncatedStable { alpha: 0.8, c_plus: 0.6, c_minus: 0.4, p: 1.0 },
            0.1,
        )
        .unwrap();
        let config =
            SamplerConfig::new(spec, SamplerMode::TruncationCompound { beta: 0.01 }, 64, 16, 1.0);
        let bundle = sample_path(&config, SeedLineage { experiment_seed: 5, path_index: 2 }).unwrap();
        let f = Coefficient::Rational;
        let coarse_path = euler_path(&f, 0.3, &bundle.coarse_increments).unwrap();
        let reference = reference_path(&f, 0.3, &bundle).unwrap();
        let by_levels = error_process(&coarse_path, &reference, 16, 7.0).unwrap();
        let mut by_recursion = SchemeOutput::default();
        run_scheme(&f, 0.3, &bundle, 7.0, None, false, &mut by_recursion).unwrap();
        for (a, b) in by_levels.values.iter().zip(&by_recursion.error.values) {
            assert_relative_eq!(a, b, epsilon = 1e-10, max_relative = 1e-9);
        }
        assert!(by_levels.path_sup >= by_levels.terminal.abs());
    }

    #[test]
    fn compensator_identity_reconstructs_the_error() {
        let spec = MeasureSpec::new(
            MeasureFamily::FiniteActivity { rate: 6.0, law: JumpLaw::UniformAnnulus { inner: 0.05, outer: 0.9 } },
            0.2,
        )
        .unwrap();
        let mut config =
            SamplerConfig::new(spec, SamplerMode::TruncationCompound { beta: 0.01 }, 32, 8, 1.0);
        config.record = RecordPolicy::All;
        let bundle = sample_path(&config, SeedLineage { experiment_seed: 8, path_index: 0 }).unwrap();
        let f = Coefficient::Rational;
        let reference = reference_path(&f, 0.1, &bundle).unwrap();
        let wn = wn_process(&reference, &bundle.fine_increments, 8, 1.0, &f).unwrap();
        let rebuilt = error_from_wn(&f, &reference, &bundle.coarse_increments, 8, &wn).unwrap();
        let mut engine = SchemeOutput::default();
        run_scheme(&f, 0.1, &bundle, 1.0, None, true, &mut engine).unwrap();
        for (a, b) in rebuilt.iter().zip(&engine.error.values) {
            assert_relative_eq!(a, b, epsilon = 1e-12, max_relative = 1e-9);
        }
        for (a, b) in wn.iter().zip(&engine.wn_values) {
            assert_relative_eq!(a, b, epsilon = 1e-12, max_relative = 1e-9);
        }
    }

    #[test]
    fn wn_degenerate_cases_vanish() {
        let fine: Vec<f64> = (0..24).map(|i| (i as f64 - 11.0) * 0.01).collect();
        let bundle = bundle_from(fine.clone(), 1);
        let reference = reference_path(&Coefficient::Rational, 0.5, &bundle).unwrap();
        // refinement 1: the only fine node is the cell start
        let wn = wn_process(&reference, &bundle.fine_increments, 1, 4.0, &Coefficient::Rational).unwrap();
        assert!(wn.iter().all(|v| *v == 0.0));
        // constant coefficient: integrand vanishes
        let bundle8 = bundle_from(fine, 8);
        let ref8 = reference_path(&Coefficient::One, 0.5, &bundle8).unwrap();
        let wn8 = wn_process(&ref8, &bundle8.fine_increments, 8, 4.0, &Coefficient::One).unwrap();
        assert!(wn8.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn nonexplosion_violations_abort_with_the_step() {
        // f(x) = x with huge increments overflows quickly
        let incs = vec![1e300, 1e300, 1e300];
        match euler_path(&Coefficient::Linear, 1e308, &incs) {
            Err(Error::NonFiniteState { step }) => assert_eq!(step, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identical_paths_give_all_zero_error() {
        let coarse = vec![0.0, 1.0, 0.5, 0.7];
        let grid = error_process(&coarse, &coarse, 1, 10.0).unwrap();
        assert!(grid.values.iter().all(|v| *v == 0.0));
    }
}
