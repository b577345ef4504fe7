//! Monte Carlo verdicts: two-sample distances, empirical characteristic
//! functions, log-log rate fits and tightness proxies.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;

/// Two-sample Kolmogorov-Smirnov distance with its asymptotic p-value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DistanceReport {
    pub statistic: f64,
    pub n: usize,
    pub m: usize,
    pub p_value: f64,
}

impl DistanceReport {
    /// Asymptotic critical value `c(level) sqrt((n+m)/(n m))`.
    pub fn critical_value(&self, level: f64) -> f64 {
        let c = (-0.5 * (level / 2.0).ln()).sqrt();
        c * ((self.n + self.m) as f64 / (self.n as f64 * self.m as f64)).sqrt()
    }

    pub fn reject_at(&self, level: f64) -> bool {
        self.statistic > self.critical_value(level)
    }

    /// Scale of one standard error of the statistic under the null.
    pub fn scale(&self) -> f64 {
        ((self.n + self.m) as f64 / (self.n as f64 * self.m as f64)).sqrt()
    }
}

fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64 * lambda).powi(2)).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Classical two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> DistanceReport {
    assert!(!a.is_empty() && !b.is_empty(), "samples must be nonempty");
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        let t = x.min(y);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let lambda = (n as f64 * m as f64 / (n + m) as f64).sqrt() * d;
    DistanceReport { statistic: d, n, m, p_value: kolmogorov_sf(lambda) }
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in xs.iter().enumerate() {
        let c = cdf(*x);
        d = d.max(((i + 1) as f64 / n - c).abs()).max((i as f64 / n - c).abs());
    }
    d
}

/// `(1/N) sum exp(i u x_j)` on a grid of `u`.
pub fn empirical_chf(sample: &[f64], us: &[f64]) -> Vec<Complex64> {
    assert!(!sample.is_empty(), "sample must be nonempty");
    let n = sample.len() as f64;
    us.iter()
        .map(|&u| {
            if u == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for &x in sample {
                let (s, c) = (u * x).sin_cos();
                acc += Complex64::new(c, s);
            }
            acc / n
        })
        .collect()
}

/// Joint empirical characteristic function of pairs at one `(u, v)`.
pub fn joint_chf(pairs: &[(f64, f64)], u: f64, v: f64) -> Complex64 {
    if u == 0.0 && v == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, y) in pairs {
        let (s, c) = (u * x + v * y).sin_cos();
        acc += Complex64::new(c, s);
    }
    acc / pairs.len() as f64
}

/// One grid point of the factorization check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChfPoint {
    pub u: f64,
    pub v: f64,
    pub emp_re: f64,
    pub emp_im: f64,
    pub target_re: f64,
    pub target_im: f64,
    pub abs_dev: f64,
}

/// Deviation grid of the joint empirical characteristic function from a
/// product target `Phi(u) Psi(v)`.
#[derive(Debug, Clone, Serialize)]
pub struct ChfProductReport {
    pub points: Vec<ChfPoint>,
    pub max_abs_dev: f64,
    /// Largest deviation along `v = 0` (pure first-marginal check).
    pub max_dev_v0: f64,
    /// Largest deviation along `u = 0` (pure second-marginal check).
    pub max_dev_u0: f64,
}

impl ChfProductReport {
    pub const CSV_HEADER: &'static str = "u,v,re,im,target_re,target_im,abs_dev";

    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}\n",
                p.u, p.v, p.emp_re, p.emp_im, p.target_re, p.target_im, p.abs_dev
            ));
        }
        out
    }
}

/// Compare the joint law of `pairs` against an independent product on a
/// rectangular grid.
pub fn product_limit_check(
    pairs: &[(f64, f64)],
    phi: impl Fn(f64) -> Complex64,
    psi: impl Fn(f64) -> Complex64,
    u_grid: &[f64],
    v_grid: &[f64],
) -> ChfProductReport {
    let mut points = Vec::with_capacity(u_grid.len() * v_grid.len());
    let (mut max_all, mut max_v0, mut max_u0) = (0.0f64, 0.0f64, 0.0f64);
    for &u in u_grid {
        for &v in v_grid {
            let emp = joint_chf(pairs, u, v);
            let target = if u == 0.0 && v == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                phi(u) * psi(v)
            };
            let dev = (emp - target).norm();
            max_all = max_all.max(dev);
            if v == 0.0 {
                max_v0 = max_v0.max(dev);
            }
            if u == 0.0 {
                max_u0 = max_u0.max(dev);
            }
            points.push(ChfPoint {
                u,
                v,
                emp_re: emp.re,
                emp_im: emp.im,
                target_re: target.re,
                target_im: target.im,
                abs_dev: dev,
            });
        }
    }
    ChfProductReport { points, max_abs_dev: max_all, max_dev_v0: max_v0, max_dev_u0: max_u0 }
}

/// Regressor used on the log-log scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regressor {
    LogN,
    /// `log(n / log n)`, absorbing the logarithmic rate correction.
    LogNOverLogN,
}

impl Regressor {
    pub fn value(&self, n: u64) -> f64 {
        let nf = n as f64;
        match self {
            Regressor::LogN => nf.ln(),
            Regressor::LogNOverLogN => (nf / nf.ln()).ln(),
        }
    }
}

/// Least-squares fit of `log quantile` against the chosen regressor.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub regressor: Regressor,
    /// `(n, regressor value, log quantile)` per point.
    pub points: Vec<(u64, f64, f64)>,
    pub residuals: Vec<f64>,
}

/// Fit the decay exponent of per-`n` quantiles.
pub fn rate_regression(samples: &BTreeMap<u64, f64>, regressor: Regressor) -> Result<RateFit> {
    if samples.len() < 4 {
        return Err(Error::InvalidParameter("rate fit needs at least 4 grid values".into()));
    }
    let ns: Vec<u64> = samples.keys().copied().collect();
    let span = *ns.last().unwrap() as f64 / ns[0] as f64;
    if span < 16.0 {
        return Err(Error::InvalidParameter("rate fit needs a grid spanning at least 16x".into()));
    }
    if samples.values().any(|q| *q <= 0.0) {
        return Err(Error::Inconclusive(
            "exact scheme: zero quantiles admit no rate fit".into(),
        ));
    }
    let points: Vec<(u64, f64, f64)> =
        samples.iter().map(|(&n, &q)| (n, regressor.value(n), q.ln())).collect();
    let k = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.1).sum();
    let sy: f64 = points.iter().map(|p| p.2).sum();
    let sxx: f64 = points.iter().map(|p| p.1 * p.1).sum();
    let sxy: f64 = points.iter().map(|p| p.1 * p.2).sum();
    let denom = k * sxx - sx * sx;
    let slope = (k * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / k;
    let residuals = points.iter().map(|p| p.2 - (intercept + slope * p.1)).collect();
    Ok(RateFit { slope, intercept, regressor, points, residuals })
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(sample: &[f64], level: f64) -> f64 {
    assert!(!sample.is_empty() && (0.0..=1.0).contains(&level));
    let mut xs = sample.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let h = level * (xs.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    xs[lo] + (xs[hi] - xs[lo]) * (h - lo as f64)
}

/// Per-`n` quantiles of a positive statistic plus the max/min ratio across
/// the grid (the tightness proxy; 1 by convention when everything is 0).
#[derive(Debug, Clone, Serialize)]
pub struct TightnessTable {
    pub levels: Vec<f64>,
    /// `(n, quantiles at the levels)`.
    pub rows: Vec<(u64, Vec<f64>)>,
    /// Max/min ratio across `n`, one entry per level.
    pub ratios: Vec<f64>,
}

pub fn tightness_quantiles(samples: &BTreeMap<u64, Vec<f64>>, levels: &[f64]) -> Result<TightnessTable> {
    if samples.len() < 3 {
        return Err(Error::InvalidParameter("tightness proxy needs at least 3 grid values".into()));
    }
    let rows: Vec<(u64, Vec<f64>)> = samples
        .iter()
        .map(|(&n, vals)| (n, levels.iter().map(|&l| quantile(vals, l)).collect()))
        .collect();
    let ratios = (0..levels.len())
        .map(|j| {
            let col: Vec<f64> = rows.iter().map(|(_, qs)| qs[j]).collect();
            let hi = col.iter().copied().fold(f64::MIN, f64::max);
            let lo = col.iter().copied().fold(f64::MAX, f64::min);
            if hi <= 0.0 {
                1.0
            } else if lo <= 0.0 {
                f64::INFINITY
            } else {
                hi / lo
            }
        })
        .collect();
    Ok(TightnessTable { levels: levels.to_vec(), rows, ratios })
}
