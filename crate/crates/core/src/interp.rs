//! Natural cubic spline interpolation on a strictly increasing grid.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// C² interpolant through `(x_i, y_i)` with zero second derivative at both
/// ends. Queries outside the grid use the polynomial of the nearest segment.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline<T> {
    x: Vec<T>,
    y: Vec<T>,
    /// Second derivatives at the knots.
    m: Vec<T>,
}

impl<T: Real> CubicSpline<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Invalid(format!(
                "spline grid has {} abscissae but {} ordinates",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::Invalid("spline needs at least two knots".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("spline abscissae must be strictly increasing".into()));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("spline knots must be finite".into()));
        }
        let m = second_derivatives(&x, &y);
        Ok(Self { x, y, m })
    }

    pub fn knots(&self) -> &[T] {
        &self.x
    }

    pub fn lo(&self) -> T {
        self.x[0]
    }

    pub fn hi(&self) -> T {
        self.x[self.x.len() - 1]
    }

    fn segment(&self, t: T) -> usize {
        let n = self.x.len();
        // partition_point gives the first knot strictly greater than t
        let k = self.x.partition_point(|&xi| xi <= t);
        k.clamp(1, n - 1) - 1
    }

    pub fn eval(&self, t: T) -> T {
        let i = self.segment(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        let six = T::lit(6.0);
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / six
    }

    pub fn derivative(&self, t: T) -> T {
        let i = self.segment(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        let three = T::lit(3.0);
        let six = T::lit(6.0);
        (self.y[i + 1] - self.y[i]) / h - (three * a * a - T::one()) * h / six * self.m[i]
            + (three * b * b - T::one()) * h / six * self.m[i + 1]
    }
}

fn second_derivatives<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let mut m = vec![T::zero(); n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior equations
    let six = T::lit(6.0);
    let two = T::two();
    let k = n - 2;
    let mut diag = vec![T::zero(); k];
    let mut upper = vec![T::zero(); k];
    let mut rhs = vec![T::zero(); k];
    for j in 0..k {
        let i = j + 1;
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[j] = two * (h0 + h1);
        upper[j] = h1;
        rhs[j] = six * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for j in 1..k {
        let lower = x[j + 1] - x[j];
        let f = lower / diag[j - 1];
        diag[j] = diag[j] - f * upper[j - 1];
        rhs[j] = rhs[j] - f * rhs[j - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for j in (0..k - 1).rev() {
        m[j + 1] = (rhs[j] - upper[j] * m[j + 2]) / diag[j];
    }
    m
}

/// True when consecutive spacings agree to `rel_tol` of the mean spacing.
pub fn is_uniform<T: Real>(x: &[T], rel_tol: T) -> bool {
    if x.len() < 3 {
        return true;
    }
    let n = T::from_usize(x.len() - 1).unwrap();
    let mean = (x[x.len() - 1] - x[0]) / n;
    x.windows(2)
        .all(|w| ((w[1] - w[0]) - mean).abs() <= rel_tol * mean.abs())
}

/// `n` equally spaced points covering `[lo, hi]`.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let d = (hi - lo) / T::from_usize(n - 1).unwrap();
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo + d * T::from_usize(i).unwrap()
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_data_in_the_interior() {
        // natural spline is exact for linear data
        let x = linspace(0.0_f64, 2.0, 9);
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t - 1.0).collect();
        let s = CubicSpline::new(x, y).unwrap();
        for t in [0.0, 0.13, 1.0, 1.77, 2.0] {
            assert!((s.eval(t) - (3.0 * t - 1.0)).abs() < 1e-14);
            assert!((s.derivative(t) - 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn interpolates_knots_and_converges_for_smooth_data() {
        let x = linspace(0.0_f64, 3.0, 301);
        let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let s = CubicSpline::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((s.eval(*xi) - yi).abs() < 1e-14);
        }
        for t in [0.5, 1.234, 2.5] {
            assert!((s.eval(t) - f64::sin(t)).abs() < 1e-8);
            assert!((s.derivative(t) - f64::cos(t)).abs() < 1e-5);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(CubicSpline::new(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(CubicSpline::new(vec![0.0], vec![0.0]).is_err());
        assert!(CubicSpline::new(vec![0.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn uniformity() {
        assert!(is_uniform(&linspace(0.0_f64, 1.0, 11), 1e-9));
        assert!(!is_uniform(&[0.0_f64, 0.1, 0.3], 1e-9));
    }
}
