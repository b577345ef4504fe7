//! Jump-measure families, their tail functionals and characteristic
//! exponents.
//!
//! A driving process is specified by a jump measure `F` on `[-p, p] \ {0}`
//! together with a drift `b` taken relative to the truncation function
//! `h(x) = x 1{|x| <= 1}`. The functions of the cutoff `beta` collected in
//! [`TailFunctionals`] control everything else in the crate: tail masses
//! classify the rate regime, truncated moments size the discretization
//! cutoffs, and the drift-at-cutoff drives the sampler decomposition.
//!
//! ```
//! use levy_euler::measure::{MeasureFamily, MeasureSpec};
//!
//! let spec = MeasureSpec::new(
//!     MeasureFamily::TruncatedStable { alpha: 0.5, c_plus: 1.0, c_minus: 1.0, p: 1.0 },
//!     0.0,
//! ).unwrap();
//! let tf = spec.tail_functionals(0.25).unwrap();
//! assert!((tf.theta_plus - 1.0).abs() < 1e-12);
//! assert_eq!(tf.d_prime, 0.0); // symmetric measure
//! ```

use crate::error::{Error, Result};
use crate::exponent::small_jump_exponent;
use crate::quad::{self, cos_m1, sin_m_x};
use num_complex::Complex64;

/// Jump-size distribution of a finite-activity measure.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpLaw {
    /// Uniform on `[-outer, -inner] U [inner, outer]`, half the mass per side.
    UniformAnnulus { inner: f64, outer: f64 },
    /// Atoms `(position, weight)`; weights must sum to one.
    PointMasses(Vec<(f64, f64)>),
}

/// Parametric families of jump measures.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureFamily {
    /// Density `c± alpha |x|^{-1-alpha}` on `(0, p]` and `[-p, 0)`.
    TruncatedStable { alpha: f64, c_plus: f64, c_minus: f64, p: f64 },
    /// Total mass `rate` spread according to `law`.
    FiniteActivity { rate: f64, law: JumpLaw },
    /// Piecewise-linear density through `(x, density)` nodes, one polyline
    /// per sign; zero outside the tabulated range.
    TabulatedDensity { points: Vec<(f64, f64)> },
}

/// A jump measure together with the drift characteristic `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub family: MeasureFamily,
    pub b: f64,
}

/// All cutoff functionals of a measure evaluated at one `beta`.
///
/// `theta±` are the tail masses beyond `beta`, `c` the second moment below
/// it, `d±`/`rho±` the first and `alpha`-moments beyond it, `b_prime` the
/// fully compensating drift and `d` the effective drift at the cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFunctionals {
    pub beta: f64,
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub theta: f64,
    pub c: f64,
    pub d_plus: f64,
    pub d_minus: f64,
    pub delta: f64,
    pub d_prime: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub rho: f64,
    pub b_prime: f64,
    pub d: f64,
}

impl TailFunctionals {
    /// Fixed CSV column order used by the `functionals` command.
    pub const CSV_HEADER: &'static str =
        "beta,theta_plus,theta_minus,theta,c,d_plus,d_minus,delta,d_prime,rho_plus,rho_minus,rho,b_prime,d";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            self.beta,
            self.theta_plus,
            self.theta_minus,
            self.theta,
            self.c,
            self.d_plus,
            self.d_minus,
            self.delta,
            self.d_prime,
            self.rho_plus,
            self.rho_minus,
            self.rho,
            self.b_prime,
            self.d
        )
    }
}

impl JumpLaw {
    fn validate(&self) -> Result<()> {
        match self {
            JumpLaw::UniformAnnulus { inner, outer } => {
                if !(*inner >= 0.0 && *outer > *inner) {
                    return Err(Error::InvalidParameter(format!(
                        "annulus requires 0 <= inner < outer, got [{inner}, {outer}]"
                    )));
                }
            }
            JumpLaw::PointMasses(atoms) => {
                if atoms.is_empty() {
                    return Err(Error::InvalidParameter("point-mass law needs at least one atom".into()));
                }
                let total: f64 = atoms.iter().map(|(_, w)| *w).sum();
                if atoms.iter().any(|(x, w)| *x == 0.0 || *w < 0.0) || (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidParameter(
                        "atoms must sit away from 0 with nonnegative weights summing to 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Probability that a jump exceeds `beta` on the positive side.
    fn tail_prob_plus(&self, beta: f64) -> f64 {
        match self {
            JumpLaw::UniformAnnulus { inner, outer } => {
                let m = beta.max(*inner);
                0.5 * (outer - m).max(0.0) / (outer - inner)
            }
            JumpLaw::PointMasses(atoms) => atoms.iter().filter(|(x, _)| *x > beta).map(|(_, w)| *w).sum(),
        }
    }

    fn tail_prob_minus(&self, beta: f64) -> f64 {
        match self {
            JumpLaw::UniformAnnulus { .. } => self.tail_prob_plus(beta),
            JumpLaw::PointMasses(atoms) => atoms.iter().filter(|(x, _)| *x < -beta).map(|(_, w)| *w).sum(),
        }
    }

    /// `E[|J|^k 1{J > beta}]` on the positive side.
    fn tail_moment_plus(&self, beta: f64, k: f64) -> f64 {
        match self {
            JumpLaw::UniformAnnulus { inner, outer } => {
                let m = beta.max(*inner);
                if m >= *outer {
                    return 0.0;
                }
                0.5 * (outer.powf(k + 1.0) - m.powf(k + 1.0)) / ((k + 1.0) * (outer - inner))
            }
            JumpLaw::PointMasses(atoms) => atoms
                .iter()
                .filter(|(x, _)| *x > beta)
                .map(|(x, w)| x.powf(k) * w)
                .sum(),
        }
    }

    fn tail_moment_minus(&self, beta: f64, k: f64) -> f64 {
        match self {
            JumpLaw::UniformAnnulus { .. } => self.tail_moment_plus(beta, k),
            JumpLaw::PointMasses(atoms) => atoms
                .iter()
                .filter(|(x, _)| *x < -beta)
                .map(|(x, w)| x.abs().powf(k) * w)
                .sum(),
        }
    }

    /// `E[J^2 1{|J| <= beta}]`.
    fn small_second_moment(&self, beta: f64) -> f64 {
        match self {
            JumpLaw::UniformAnnulus { inner, outer } => {
                let m = beta.min(*outer);
                if m <= *inner {
                    return 0.0;
                }
                (m.powi(3) - inner.powi(3)) / (3.0 * (outer - inner))
            }
            JumpLaw::PointMasses(atoms) => atoms
                .iter()
                .filter(|(x, _)| x.abs() <= beta)
                .map(|(x, w)| x * x * w)
                .sum(),
        }
    }

    fn support_bound(&self) -> f64 {
        match self {
            JumpLaw::UniformAnnulus { outer, .. } => *outer,
            JumpLaw::PointMasses(atoms) => atoms.iter().map(|(x, _)| x.abs()).fold(0.0, f64::max),
        }
    }

    fn is_symmetric(&self) -> bool {
        match self {
            JumpLaw::UniformAnnulus { .. } => true,
            JumpLaw::PointMasses(atoms) => atoms.iter().all(|(x, w)| {
                atoms
                    .iter()
                    .any(|(y, v)| (*y + *x).abs() < 1e-14 && (*v - *w).abs() < 1e-12)
            }),
        }
    }
}

/// One polyline side of a tabulated density.
#[derive(Debug, Clone)]
struct Polyline {
    /// Nodes with strictly increasing |x|, all the same sign.
    nodes: Vec<(f64, f64)>,
}

impl Polyline {
    fn density_abs(&self, a: f64) -> f64 {
        // a = |x|; nodes are stored by |x| ascending
        let n = &self.nodes;
        if n.is_empty() || a < n[0].0 || a > n[n.len() - 1].0 {
            return 0.0;
        }
        match n.binary_search_by(|(x, _)| x.partial_cmp(&a).unwrap()) {
            Ok(i) => n[i].1,
            Err(i) => {
                let (x0, d0) = n[i - 1];
                let (x1, d1) = n[i];
                d0 + (d1 - d0) * (a - x0) / (x1 - x0)
            }
        }
    }

    /// Integrate `w(|x|) * density` over `|x|` in `(lo, hi]`.
    fn integrate(&self, lo: f64, hi: f64, w: &dyn Fn(f64) -> f64, tol: f64) -> Result<f64> {
        if self.nodes.is_empty() {
            return Ok(0.0);
        }
        let a = lo.max(self.nodes[0].0);
        let b = hi.min(self.nodes[self.nodes.len() - 1].0);
        if a >= b {
            return Ok(0.0);
        }
        let knots: Vec<f64> = self.nodes.iter().map(|(x, _)| *x).collect();
        quad::integrate_split(|x| w(x) * self.density_abs(x), a, b, &knots, tol)
    }
}

fn split_tabulated(points: &[(f64, f64)]) -> Result<(Polyline, Polyline)> {
    let mut neg = Vec::new();
    let mut pos = Vec::new();
    for &(x, d) in points {
        if x == 0.0 || d < 0.0 || !x.is_finite() || !d.is_finite() {
            return Err(Error::InvalidParameter(
                "tabulated density needs finite nodes away from 0 with nonnegative density".into(),
            ));
        }
        if x < 0.0 {
            neg.push((-x, d));
        } else {
            pos.push((x, d));
        }
    }
    neg.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pos.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for side in [&neg, &pos] {
        if side.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("duplicate tabulated abscissa".into()));
        }
    }
    Ok((Polyline { nodes: neg }, Polyline { nodes: pos }))
}

const TAB_TOL: f64 = 1e-12;

impl MeasureSpec {
    pub fn new(family: MeasureFamily, b: f64) -> Result<Self> {
        let spec = MeasureSpec { family, b };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.b.is_finite() {
            return Err(Error::InvalidParameter("drift b must be finite".into()));
        }
        match &self.family {
            MeasureFamily::TruncatedStable { alpha, c_plus, c_minus, p } => {
                if !(*alpha > 0.0 && *alpha < 2.0) {
                    return Err(Error::InvalidParameter(format!("index must lie in (0,2), got {alpha}")));
                }
                if *c_plus < 0.0 || *c_minus < 0.0 || *c_plus + *c_minus <= 0.0 {
                    return Err(Error::InvalidParameter("coefficients must be >= 0 and not both 0".into()));
                }
                if !(*p > 0.0) {
                    return Err(Error::InvalidParameter("jump bound p must be positive".into()));
                }
            }
            MeasureFamily::FiniteActivity { rate, law } => {
                if !(*rate > 0.0) {
                    return Err(Error::InvalidParameter("total rate must be positive".into()));
                }
                law.validate()?;
            }
            MeasureFamily::TabulatedDensity { points } => {
                let (neg, pos) = split_tabulated(points)?;
                // x^2 ^ 1 must integrate finitely; piecewise-linear densities
                // always do, but run the quadrature so bad tables surface here.
                let w = |x: f64| (x * x).min(1.0);
                neg.integrate(0.0, f64::MAX, &w, 1e-9)?;
                pos.integrate(0.0, f64::MAX, &w, 1e-9)?;
            }
        }
        Ok(())
    }

    /// Bound `p` with `theta(beta) = 0` for `beta >= p`.
    pub fn support_bound(&self) -> f64 {
        match &self.family {
            MeasureFamily::TruncatedStable { p, .. } => *p,
            MeasureFamily::FiniteActivity { law, .. } => law.support_bound(),
            MeasureFamily::TabulatedDensity { points } => {
                points.iter().map(|(x, _)| x.abs()).fold(0.0, f64::max)
            }
        }
    }

    /// Index used for the `rho` moments: the family index for the stable
    /// family, first moments otherwise.
    pub fn moment_index(&self) -> f64 {
        match &self.family {
            MeasureFamily::TruncatedStable { alpha, .. } => *alpha,
            _ => 1.0,
        }
    }

    /// Whether the measure is symmetric about 0 (exact, by construction).
    pub fn is_symmetric(&self) -> bool {
        match &self.family {
            MeasureFamily::TruncatedStable { c_plus, c_minus, .. } => c_plus == c_minus,
            MeasureFamily::FiniteActivity { law, .. } => law.is_symmetric(),
            MeasureFamily::TabulatedDensity { points } => {
                let (neg, pos) = match split_tabulated(points) {
                    Ok(v) => v,
                    Err(_) => return false,
                };
                neg.nodes.len() == pos.nodes.len()
                    && neg
                        .nodes
                        .iter()
                        .zip(&pos.nodes)
                        .all(|(a, b)| (a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-12)
            }
        }
    }

    /// Total mass for finite measures.
    pub fn total_mass(&self) -> Option<f64> {
        match &self.family {
            MeasureFamily::FiniteActivity { rate, .. } => Some(*rate),
            _ => None,
        }
    }

    pub fn theta_plus(&self, beta: f64) -> f64 {
        match &self.family {
            MeasureFamily::TruncatedStable { alpha, c_plus, p, .. } => {
                if beta >= *p {
                    0.0
                } else {
                    c_plus * (beta.powf(-alpha) - p.powf(-alpha))
                }
            }
            MeasureFamily::FiniteActivity { rate, law } => rate * law.tail_prob_plus(beta),
            MeasureFamily::TabulatedDensity { points } => {
                let (_, pos) = split_tabulated(points).expect("validated");
                pos.integrate(beta, f64::MAX, &|_| 1.0, TAB_TOL).expect("validated")
            }
        }
    }

    pub fn theta_minus(&self, beta: f64) -> f64 {
        match &self.family {
            MeasureFamily::TruncatedStable { alpha, c_minus, p, .. } => {
                if beta >= *p {
                    0.0
                } else {
                    c_minus * (beta.powf(-alpha) - p.powf(-alpha))
                }
            }
            MeasureFamily::FiniteActivity { rate, law } => rate * law.tail_prob_minus(beta),
            MeasureFamily::TabulatedDensity { points } => {
                let (neg, _) = split_tabulated(points).expect("validated");
                neg.integrate(beta, f64::MAX, &|_| 1.0, TAB_TOL).expect("validated")
            }
        }
    }

    pub fn theta(&self, beta: f64) -> f64 {
        self.theta_plus(beta) + self.theta_minus(beta)
    }

    /// Second moment of jumps with `|x| <= beta`.
    pub fn small_second_moment(&self, beta: f64) -> f64 {
        match &self.family {
            MeasureFamily::TruncatedStable { alpha, c_plus, c_minus, p } => {
                let m = beta.min(*p);
                if m <= 0.0 {
                    0.0
                } else {
                    (c_plus + c_minus) * alpha / (2.0 - alpha) * m.powf(2.0 - alpha)
                }
            }
            MeasureFamily::FiniteActivity { rate, law } => rate * law.small_second_moment(beta),
            MeasureFamily::TabulatedDensity { points } => {
                let (neg, pos) = split_tabulated(points).expect("validated");
                let w = |x: f64| x * x;
                neg.integrate(0.0, beta, &w, TAB_TOL).expect("validated")
                    + pos.integrate(0.0, beta, &w, TAB_TOL).expect("validated")
            }
        }
    }

    /// `Int_{x > beta} x^k F(dx)` on one side; `side = +1` or `-1`.
    pub fn tail_power_moment(&self, beta: f64, k: f64, side: i8) -> f64 {
        match &self.family {
            MeasureFamily::TruncatedStable { alpha, c_plus, c_minus, p } => {
                let c = if side > 0 { *c_plus } else { *c_minus };
                if beta >= *p || c == 0.0 {
                    return 0.0;
                }
                let lo = beta.max(0.0);
                if (k - alpha).abs() < 1e-12 {
                    c * alpha * (p / lo.max(f64::MIN_POSITIVE)).ln()
                } else {
                    c * alpha * (p.powf(k - alpha) - lo.powf(k - alpha)) / (k - alpha)
                }
            }
            MeasureFamily::FiniteActivity { rate, law } => {
                rate * if side > 0 {
                    law.tail_moment_plus(beta, k)
                } else {
                    law.tail_moment_minus(beta, k)
                }
            }
            MeasureFamily::TabulatedDensity { points } => {
                let (neg, pos) = split_tabulated(points).expect("validated");
                let line = if side > 0 { pos } else { neg };
                line.integrate(beta, f64::MAX, &|x| x.powf(k), TAB_TOL).expect("validated")
            }
        }
    }

    pub fn d_plus(&self, beta: f64) -> f64 {
        self.tail_power_moment(beta, 1.0, 1)
    }

    pub fn d_minus(&self, beta: f64) -> f64 {
        self.tail_power_moment(beta, 1.0, -1)
    }

    pub fn d_prime(&self, beta: f64) -> f64 {
        if self.is_symmetric() {
            return 0.0;
        }
        self.d_plus(beta) - self.d_minus(beta)
    }

    /// Fully compensating drift `b' = b + Int_{|x|>1} x F(dx)`.
    pub fn b_prime(&self) -> f64 {
        self.b + self.d_prime(1.0)
    }

    /// Effective drift at a cutoff: `d(beta) = b' - d'(beta)`.
    pub fn drift_at_cutoff(&self, beta: f64) -> f64 {
        if self.is_symmetric() && self.b == 0.0 {
            return 0.0;
        }
        self.b_prime() - self.d_prime(beta)
    }

    /// Limit of the first tail moments as `beta -> 0`, when finite.
    pub fn first_moment_limits(&self) -> Option<(f64, f64)> {
        match &self.family {
            MeasureFamily::TruncatedStable { alpha, .. } if *alpha >= 1.0 => None,
            _ => Some((self.d_plus(0.0), self.d_minus(0.0))),
        }
    }

    /// Effective total drift `d = b - Int_{|x|<=1} x F(dx)`, when finite.
    pub fn effective_drift(&self) -> Option<f64> {
        self.first_moment_limits().map(|_| self.drift_at_cutoff(0.0))
    }

    /// All cutoff functionals at `beta`, using the family's `rho` index.
    pub fn tail_functionals(&self, beta: f64) -> Result<TailFunctionals> {
        self.tail_functionals_at_index(beta, self.moment_index())
    }

    /// Same, with an explicit index for the `rho` moments.
    pub fn tail_functionals_at_index(&self, beta: f64, index: f64) -> Result<TailFunctionals> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        let theta_plus = self.theta_plus(beta);
        let theta_minus = self.theta_minus(beta);
        let d_plus = self.d_plus(beta);
        let d_minus = self.d_minus(beta);
        let rho_plus = self.tail_power_moment(beta, index, 1);
        let rho_minus = self.tail_power_moment(beta, index, -1);
        let d_prime = if self.is_symmetric() { 0.0 } else { d_plus - d_minus };
        let b_prime = self.b_prime();
        Ok(TailFunctionals {
            beta,
            theta_plus,
            theta_minus,
            theta: theta_plus + theta_minus,
            c: self.small_second_moment(beta),
            d_plus,
            d_minus,
            delta: d_plus + d_minus,
            d_prime,
            rho_plus,
            rho_minus,
            rho: rho_plus + rho_minus,
            b_prime,
            d: b_prime - d_prime,
        })
    }

    /// Density of the measure at `x`, where one exists.
    pub fn density(&self, x: f64) -> f64 {
        match &self.family {
            MeasureFamily::TruncatedStable { alpha, c_plus, c_minus, p } => {
                let a = x.abs();
                if a == 0.0 || a > *p {
                    0.0
                } else {
                    let c = if x > 0.0 { *c_plus } else { *c_minus };
                    c * alpha * a.powf(-1.0 - alpha)
                }
            }
            MeasureFamily::FiniteActivity { rate, law } => match law {
                JumpLaw::UniformAnnulus { inner, outer } => {
                    let a = x.abs();
                    if a >= *inner && a <= *outer {
                        rate * 0.5 / (outer - inner)
                    } else {
                        0.0
                    }
                }
                JumpLaw::PointMasses(_) => 0.0,
            },
            MeasureFamily::TabulatedDensity { points } => {
                let (neg, pos) = split_tabulated(points).expect("validated");
                if x >= 0.0 {
                    pos.density_abs(x)
                } else {
                    neg.density_abs(-x)
                }
            }
        }
    }

    /// Characteristic exponent at time 1 (truncation function `x 1{|x|<=1}`).
    pub fn levy_exponent(&self, u: f64) -> Complex64 {
        if u == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let base = Complex64::new(0.0, u * self.b);
        match &self.family {
            MeasureFamily::TruncatedStable { alpha, c_plus, c_minus, p } => {
                let mut e = base + small_jump_exponent(u, *alpha, *c_plus, *c_minus, *p);
                if *p > 1.0 {
                    // the fully compensated form over-subtracts on (1, p]
                    e += Complex64::new(0.0, u * self.d_prime(1.0));
                }
                e
            }
            MeasureFamily::FiniteActivity { rate, law } => {
                let (re, im) = match law {
                    JumpLaw::UniformAnnulus { inner, outer } => {
                        // E cos(uJ) - 1, symmetric law
                        let re = (f64::sin(u * outer) - f64::sin(u * inner)) / (u * (outer - inner)) - 1.0;
                        (re, 0.0)
                    }
                    JumpLaw::PointMasses(atoms) => {
                        let mut re = 0.0;
                        let mut im = 0.0;
                        for &(x, w) in atoms {
                            re += w * cos_m1(u * x);
                            im += w * if x.abs() <= 1.0 { sin_m_x(u * x) } else { f64::sin(u * x) };
                        }
                        (re, im)
                    }
                };
                base + Complex64::new(rate * re, rate * im)
            }
            MeasureFamily::TabulatedDensity { points } => {
                let (neg, pos) = split_tabulated(points).expect("validated");
                let re_w = |x: f64| cos_m1(u * x);
                let im_w = |x: f64| if x <= 1.0 { sin_m_x(u * x) } else { f64::sin(u * x) };
                let re = pos.integrate(0.0, f64::MAX, &re_w, TAB_TOL).expect("validated")
                    + neg.integrate(0.0, f64::MAX, &re_w, TAB_TOL).expect("validated");
                let im = pos.integrate(0.0, f64::MAX, &im_w, TAB_TOL).expect("validated")
                    - neg.integrate(0.0, f64::MAX, &im_w, TAB_TOL).expect("validated");
                base + Complex64::new(re, im)
            }
        }
    }
}

/// Tail functionals evaluated by adaptive quadrature of the density.
///
/// Independent evaluation route for specs that have a density; the closed
/// forms of [`MeasureSpec::tail_functionals`] are checked against it.
pub fn tail_functionals_by_quadrature(spec: &MeasureSpec, beta: f64, index: f64) -> Result<TailFunctionals> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let p = spec.support_bound();
    let tol = 1e-13;
    let side = |lo: f64, hi: f64, w: &dyn Fn(f64) -> f64, sign: f64| -> Result<f64> {
        if lo >= hi {
            return Ok(0.0);
        }
        quad::integrate_split(|a| w(a) * spec.density(sign * a), lo, hi, &[beta, 1.0, p], tol)
    };
    let one = |_: f64| 1.0;
    let theta_plus = side(beta, p, &one, 1.0)?;
    let theta_minus = side(beta, p, &one, -1.0)?;
    let abs1 = |a: f64| a;
    let d_plus = side(beta, p, &abs1, 1.0)?;
    let d_minus = side(beta, p, &abs1, -1.0)?;
    let powk = |a: f64| a.powf(index);
    let rho_plus = side(beta, p, &powk, 1.0)?;
    let rho_minus = side(beta, p, &powk, -1.0)?;
    let sq = |a: f64| a * a;
    let c = side(0.0, beta.min(p), &sq, 1.0)? + side(0.0, beta.min(p), &sq, -1.0)?;
    let b_prime = spec.b + side(1.0, p, &abs1, 1.0)? - side(1.0, p, &abs1, -1.0)?;
    let d_prime = d_plus - d_minus;
    Ok(TailFunctionals {
        beta,
        theta_plus,
        theta_minus,
        theta: theta_plus + theta_minus,
        c,
        d_plus,
        d_minus,
        delta: d_plus + d_minus,
        d_prime,
        rho_plus,
        rho_minus,
        rho: rho_plus + rho_minus,
        b_prime,
        d: b_prime - d_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ts(alpha: f64, c_plus: f64, c_minus: f64, p: f64, b: f64) -> MeasureSpec {
        MeasureSpec::new(MeasureFamily::TruncatedStable { alpha, c_plus, c_minus, p }, b).unwrap()
    }

    #[test]
    fn theta_plus_example() {
        let spec = ts(0.5, 1.0, 1.0, 1.0, 0.0);
        let tf = spec.tail_functionals(0.25).unwrap();
        assert_relative_eq!(tf.theta_plus, 1.0, epsilon = 1e-12);
        // oracle: quadrature of the density
        let q = tail_functionals_by_quadrature(&spec, 0.25, 0.5).unwrap();
        assert_relative_eq!(q.theta_plus, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn small_second_moment_example() {
        let spec = ts(0.5, 0.5, 0.5, 1.0, 0.0);
        let tf = spec.tail_functionals(1.0).unwrap();
        assert_relative_eq!(tf.c, 1.0 / 3.0, epsilon = 1e-12);
        let q = tail_functionals_by_quadrature(&spec, 1.0, 0.5).unwrap();
        assert_relative_eq!(q.c, 1.0 / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn symmetric_zero_drift_functionals_vanish() {
        let spec = ts(1.2, 0.7, 0.7, 2.0, 0.0);
        for &beta in &[0.01, 0.3, 1.5, 3.0] {
            let tf = spec.tail_functionals(beta).unwrap();
            assert_eq!(tf.d_prime, 0.0);
            assert_eq!(tf.d, 0.0);
        }
    }

    #[test]
    fn rejects_nonpositive_beta() {
        let spec = ts(0.5, 1.0, 1.0, 1.0, 0.0);
        assert!(spec.tail_functionals(0.0).is_err());
        assert!(spec.tail_functionals(-1.0).is_err());
    }

    #[test]
    fn closed_forms_match_quadrature_on_beta_grid() {
        for spec in [ts(0.5, 0.8, 0.2, 1.0, 0.1), ts(1.0, 0.3, 0.9, 1.5, 0.0), ts(1.5, 0.5, 0.5, 1.0, 0.0)] {
            let idx = spec.moment_index();
            for k in 0..20 {
                let beta = 1e-3 * (0.9 * spec.support_bound() / 1e-3_f64).powf(k as f64 / 19.0);
                let cf = spec.tail_functionals(beta).unwrap();
                let q = tail_functionals_by_quadrature(&spec, beta, idx).unwrap();
                for (a, b) in [
                    (cf.theta_plus, q.theta_plus),
                    (cf.theta_minus, q.theta_minus),
                    (cf.c, q.c),
                    (cf.d_plus, q.d_plus),
                    (cf.d_minus, q.d_minus),
                    (cf.rho_plus, q.rho_plus),
                    (cf.rho_minus, q.rho_minus),
                    (cf.b_prime, q.b_prime),
                    (cf.d, q.d),
                ] {
                    assert_relative_eq!(a, b, max_relative = 1e-9, epsilon = 1e-11);
                }
            }
        }
    }

    #[test]
    fn moment_identity_between_tail_and_layer_cake() {
        // Int_{a < x <= b} x^g F(dx) = g Int_0^b y^{g-1} (theta_+(y v a) - theta_+(b)) dy
        let spec = ts(0.7, 0.6, 0.4, 1.0, 0.0);
        for &(a, b, g) in &[(0.0, 0.3, 0.5), (0.1, 1.0, 1.0), (0.05, 0.8, 2.0), (0.0, 1.0, 0.7)] {
            let lhs = quad::integrate_split(|x| x.powf(g) * spec.density(x), a.max(1e-300), b, &[a, b], 1e-13).unwrap();
            let tb = spec.theta_plus(b);
            let rhs = g * quad::integrate_split(
                |y| y.powf(g - 1.0) * (spec.theta_plus(y.max(a)) - tb),
                0.0,
                b,
                &[a],
                1e-13,
            )
            .unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-8, epsilon = 1e-12);
        }
    }

    #[test]
    fn theta_vanishes_beyond_support() {
        let spec = ts(0.5, 0.5, 0.5, 1.0, 0.0);
        assert_eq!(spec.theta(1.0), 0.0);
        assert_eq!(spec.theta(2.0), 0.0);
        let fa = MeasureSpec::new(
            MeasureFamily::FiniteActivity { rate: 2.0, law: JumpLaw::UniformAnnulus { inner: 0.1, outer: 1.0 } },
            0.0,
        )
        .unwrap();
        assert_eq!(fa.theta(1.0), 0.0);
        assert_relative_eq!(fa.theta(0.05), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn tail_monotonicity_and_second_moment_monotonicity() {
        let spec = ts(1.3, 0.4, 0.6, 1.0, 0.0);
        let betas = [1e-4, 1e-3, 1e-2, 0.1, 0.5, 0.9];
        for w in betas.windows(2) {
            assert!(spec.theta_plus(w[0]) >= spec.theta_plus(w[1]));
            assert!(spec.small_second_moment(w[0]) <= spec.small_second_moment(w[1]));
        }
    }

    #[test]
    fn finite_activity_annulus_functionals() {
        // rate 1, uniform on [-1,-0.1] U [0.1,1]
        let spec = MeasureSpec::new(
            MeasureFamily::FiniteActivity { rate: 1.0, law: JumpLaw::UniformAnnulus { inner: 0.1, outer: 1.0 } },
            0.0,
        )
        .unwrap();
        assert_relative_eq!(spec.theta_plus(0.5), 0.5 * 0.5 / 0.9, epsilon = 1e-12);
        assert_relative_eq!(spec.d_plus(0.0), 0.5 * (1.0 - 0.01) / (2.0 * 0.9), epsilon = 1e-12);
        assert_eq!(spec.effective_drift(), Some(0.0));
    }

    #[test]
    fn tabulated_matches_truncated_stable_away_from_origin() {
        // Tabulate c a |x|^{-1-a} on [0.05, 1] finely; theta at beta >= 0.05
        // must agree with the closed form up to the tabulation error.
        let alpha = 0.5;
        let exact = ts(alpha, 0.5, 0.5, 1.0, 0.0);
        let mut pts = Vec::new();
        let n = 2000;
        for i in 0..=n {
            let x = 0.05 * (1.0f64 / 0.05).powf(i as f64 / n as f64);
            let d = 0.5 * alpha * x.powf(-1.0 - alpha);
            pts.push((x, d));
            pts.push((-x, d));
        }
        let tab = MeasureSpec::new(MeasureFamily::TabulatedDensity { points: pts }, 0.0).unwrap();
        for &beta in &[0.06, 0.2, 0.7] {
            assert_relative_eq!(tab.theta(beta), exact.theta(beta), max_relative = 1e-6);
        }
        assert!(tab.is_symmetric());
    }

    #[test]
    fn levy_exponent_of_truncated_stable_matches_direct_quadrature() {
        let spec = ts(1.5, 0.5, 0.5, 1.0, 0.0);
        for &u in &[0.5, 1.0, 2.0] {
            let got = spec.levy_exponent(u);
            let re = quad::integrate(|x| cos_m1(u * x) * spec.density(x) * 2.0, 0.0, 1.0, 1e-13).unwrap();
            assert_relative_eq!(got.re, re, max_relative = 1e-8);
            assert_relative_eq!(got.im, 0.0, epsilon = 1e-12);
        }
        // with support beyond the unit truncation
        let wide = ts(1.5, 0.7, 0.1, 2.0, 0.3);
        for &u in &[0.5, 2.0, -1.0] {
            let got = wide.levy_exponent(u);
            let re = quad::integrate(
                |x| cos_m1(u * x) * (wide.density(x) + wide.density(-x)),
                0.0,
                2.0,
                1e-13,
            )
            .unwrap();
            let im = u * wide.b
                + quad::integrate_split(
                    |x| {
                        let w = if x <= 1.0 { sin_m_x(u * x) } else { f64::sin(u * x) };
                        w * (wide.density(x) - wide.density(-x))
                    },
                    0.0,
                    2.0,
                    &[1.0],
                    1e-13,
                )
                .unwrap();
            assert_relative_eq!(got.re, re, max_relative = 1e-8, epsilon = 1e-12);
            assert_relative_eq!(got.im, im, max_relative = 1e-8, epsilon = 1e-12);
        }
    }
}
