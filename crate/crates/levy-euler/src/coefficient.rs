//! Coefficient functions `f` for the state equation, with two derivatives.
//!
//! The built-in set spans the cases the verification suite needs: constants
//! (the scheme is exact), the linear map (analytic jump-product reference)
//! and two smooth bounded choices. Tabulated coefficients go through a
//! natural cubic spline.

use crate::error::{Error, Result};

/// Natural cubic spline through sorted `(x, y)` knots.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if points.len() < 3 || points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter(
                "spline needs at least three distinct abscissae".into(),
            ));
        }
        let n = points.len();
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        // tridiagonal solve for natural end conditions
        let mut a = vec![0.0; n];
        let b = vec![2.0; n];
        let mut c = vec![0.0; n];
        let mut r = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            a[i] = h0 / (h0 + h1);
            c[i] = h1 / (h0 + h1);
            r[i] = 6.0 / (h0 + h1) * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        // Thomas algorithm
        let mut cp = vec![0.0; n];
        let mut rp = vec![0.0; n];
        cp[0] = c[0] / b[0];
        rp[0] = r[0] / b[0];
        for i in 1..n {
            let denom = b[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / denom;
            rp[i] = (r[i] - a[i] * rp[i - 1]) / denom;
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rp[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = rp[i] - cp[i] * m[i + 1];
        }
        Ok(CubicSpline { xs, ys, m })
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.clamp(1, self.xs.len() - 1) - 1,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t0 = (x1 - x) / h;
        let t1 = (x - x0) / h;
        t0 * self.ys[i]
            + t1 * self.ys[i + 1]
            + ((t0.powi(3) - t0) * self.m[i] + (t1.powi(3) - t1) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t0 = (x1 - x) / h;
        let t1 = (x - x0) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((1.0 - 3.0 * t0 * t0) * self.m[i] + (3.0 * t1 * t1 - 1.0) * self.m[i + 1]) * h / 6.0
    }

    pub fn deriv2(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        ((x1 - x) * self.m[i] + (x - x0) * self.m[i + 1]) / h
    }
}

/// The coefficient function driving `dX = f(X_-) dY`.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    /// `f = 0`: the state never moves.
    Zero,
    /// `f = 1`: additive noise, the scheme is exact on the grid.
    One,
    /// `f(x) = x`: linear equation with the jump-product reference.
    Linear,
    /// `f(x) = 1 / (1 + x^2)`.
    Rational,
    /// `f(x) = exp(1 - 1/(1 - x^2))` on `|x| < 1`, zero outside.
    Bump,
    /// Tabulated coefficient through a cubic spline.
    Tabulated(CubicSpline),
}

impl Coefficient {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Coefficient::Zero => 0.0,
            Coefficient::One => 1.0,
            Coefficient::Linear => x,
            Coefficient::Rational => 1.0 / (1.0 + x * x),
            Coefficient::Bump => {
                if x.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            }
            Coefficient::Tabulated(s) => s.eval(x),
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match self {
            Coefficient::Zero | Coefficient::One => 0.0,
            Coefficient::Linear => 1.0,
            Coefficient::Rational => {
                let d = 1.0 + x * x;
                -2.0 * x / (d * d)
            }
            Coefficient::Bump => {
                if x.abs() < 1.0 {
                    let w = 1.0 - x * x;
                    self.eval(x) * (-2.0 * x / (w * w))
                } else {
                    0.0
                }
            }
            Coefficient::Tabulated(s) => s.deriv(x),
        }
    }

    pub fn deriv2(&self, x: f64) -> f64 {
        match self {
            Coefficient::Zero | Coefficient::One | Coefficient::Linear => 0.0,
            Coefficient::Rational => {
                let d = 1.0 + x * x;
                (6.0 * x * x - 2.0) / (d * d * d)
            }
            Coefficient::Bump => {
                if x.abs() < 1.0 {
                    let w = 1.0 - x * x;
                    let u = -2.0 * x / (w * w);
                    self.eval(x) * (u * u + (-2.0 - 6.0 * x * x) / (w * w * w))
                } else {
                    0.0
                }
            }
            Coefficient::Tabulated(s) => s.deriv2(x),
        }
    }

    /// `g = f f'`, the weight appearing in every limit law.
    pub fn g(&self, x: f64) -> f64 {
        self.eval(x) * self.deriv(x)
    }
}
