//! Explicit Runge–Kutta integrators over fixed-size real state vectors.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Maximum consecutive rejected steps before the adaptive solver gives up.
pub const MAX_REJECTIONS: usize = 64;

/// Output of an integration: recorded times and states.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T, const N: usize> {
    pub times: Vec<T>,
    pub states: Vec<[T; N]>,
    pub steps: usize,
    pub rejected: usize,
}

impl<T, const N: usize> Default for Solution<T, N> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T, const N: usize> Solution<T, N> {
    pub fn new() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            steps: 0,
            rejected: 0,
        }
    }

    pub fn last(&self) -> Option<(&T, &[T; N])> {
        Some((self.times.last()?, self.states.last()?))
    }

    fn push(&mut self, t: T, y: [T; N]) {
        self.times.push(t);
        self.states.push(y);
    }
}

fn axpy<T: Real, const N: usize>(y: &[T; N], terms: &[(T, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] = out[i] + *c * k[i];
        }
    }
    out
}

fn check_finite<T: Real, const N: usize>(t: T, y: &[T; N]) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteState { t: t.to_f64_lossy() })
    }
}

/// Classic fourth-order step.
pub fn rk4_step<T: Real, const N: usize, F>(f: &mut F, t: T, y: &[T; N], h: T) -> Result<[T; N]>
where
    F: FnMut(T, &[T; N]) -> Result<[T; N]>,
{
    let half = T::half();
    let k1 = f(t, y)?;
    let k2 = f(t + half * h, &axpy(y, &[(half * h, &k1)]))?;
    let k3 = f(t + half * h, &axpy(y, &[(half * h, &k2)]))?;
    let k4 = f(t + h, &axpy(y, &[(h, &k3)]))?;
    let sixth = h / T::lit(6.0);
    let third = h / T::lit(3.0);
    Ok(axpy(y, &[(sixth, &k1), (third, &k2), (third, &k3), (sixth, &k4)]))
}

/// Fixed-step RK4 on `[t0, t1]`. The step is shrunk so that an integer
/// number of steps lands exactly on `t1`. Every `stride`-th state is
/// recorded, plus the endpoints.
pub fn rk4<T: Real, const N: usize, F>(f: F, y0: [T; N], t0: T, t1: T, dt: T, stride: usize) -> Result<Solution<T, N>>
where
    F: FnMut(T, &[T; N]) -> Result<[T; N]>,
{
    let mut sol = Solution::new();
    rk4_into(f, y0, t0, t1, dt, stride, &mut sol)?;
    Ok(sol)
}

/// [`rk4`] writing into `sol`, which keeps the recorded prefix on error.
pub fn rk4_into<T: Real, const N: usize, F>(
    mut f: F,
    y0: [T; N],
    t0: T,
    t1: T,
    dt: T,
    stride: usize,
    sol: &mut Solution<T, N>,
) -> Result<()>
where
    F: FnMut(T, &[T; N]) -> Result<[T; N]>,
{
    if !(dt > T::zero()) || !(t1 >= t0) {
        return Err(Error::Invalid(format!("rk4 needs dt > 0 and t1 >= t0, got dt={dt}")));
    }
    let stride = stride.max(1);
    let n = ((t1 - t0) / dt).ceil().to_usize().unwrap_or(0).max(1);
    let h = (t1 - t0) / T::from_usize(n).unwrap();
    let mut y = y0;
    sol.push(t0, y);
    for k in 0..n {
        let t = t0 + T::from_usize(k).unwrap() * h;
        y = rk4_step(&mut f, t, &y, h)?;
        let tn = if k + 1 == n { t1 } else { t + h };
        check_finite(tn, &y)?;
        sol.steps += 1;
        if (k + 1) % stride == 0 || k + 1 == n {
            sol.push(tn, y);
        }
    }
    Ok(())
}

/// Adaptive step controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub rtol: T,
    pub atol: T,
    pub dt_max: T,
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive Dormand–Prince 5(4) with first-same-as-last stages and a max
/// error norm. Every `stride`-th accepted step is recorded, plus the
/// endpoints.
pub fn dopri45<T: Real, const N: usize, F>(
    f: F,
    y0: [T; N],
    t0: T,
    t1: T,
    tol: Tolerances<T>,
    stride: usize,
) -> Result<Solution<T, N>>
where
    F: FnMut(T, &[T; N]) -> Result<[T; N]>,
{
    let mut sol = Solution::new();
    dopri45_into(f, y0, t0, t1, tol, stride, &mut sol)?;
    Ok(sol)
}

/// [`dopri45`] writing into `sol`, which keeps the recorded prefix on error.
pub fn dopri45_into<T: Real, const N: usize, F>(
    mut f: F,
    y0: [T; N],
    t0: T,
    t1: T,
    tol: Tolerances<T>,
    stride: usize,
    sol: &mut Solution<T, N>,
) -> Result<()>
where
    F: FnMut(T, &[T; N]) -> Result<[T; N]>,
{
    if !(tol.rtol > T::zero()) || !(tol.atol > T::zero()) || !(tol.dt_max > T::zero()) || !(t1 >= t0) {
        return Err(Error::Invalid(
            "dopri45 needs positive rtol, atol, dt_max and t1 >= t0".into(),
        ));
    }
    let stride = stride.max(1);
    let lit = |x: f64| T::lit(x);
    let mut t = t0;
    let mut y = y0;
    sol.push(t, y);
    if t1 == t0 {
        return Ok(());
    }
    let span = t1 - t0;
    let mut k1 = f(t, &y)?;
    let scale = |y: &[T; N], i: usize| tol.atol + tol.rtol * y[i].abs();

    // initial step from the derivative magnitude
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for i in 0..N {
        let sc = scale(&y, i);
        d0 = d0 + (y[i] / sc).powi(2);
        d1 = d1 + (k1[i] / sc).powi(2);
    }
    let n_t = T::from_usize(N).unwrap();
    let (d0, d1) = ((d0 / n_t).sqrt(), (d1 / n_t).sqrt());
    let mut h = if d0 < lit(1e-5) || d1 < lit(1e-5) {
        lit(1e-6)
    } else {
        lit(0.01) * d0 / d1
    };
    h = h.min(tol.dt_max).min(span);

    let mut accepted = 0usize;
    let mut rejections = 0usize;
    loop {
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let mut k: [[T; N]; 7] = [[T::zero(); N]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut terms: Vec<(T, &[T; N])> = Vec::with_capacity(s);
            for (j, kj) in k.iter().enumerate().take(s) {
                if A[s][j] != 0.0 {
                    terms.push((h * lit(A[s][j]), kj));
                }
            }
            let ys = axpy(&y, &terms);
            k[s] = f(t + lit(C[s]) * h, &ys)?;
        }
        let terms: Vec<(T, &[T; N])> = (0..6).map(|j| (h * lit(A[6][j]), &k[j])).collect();
        let y_new = axpy(&y, &terms);

        let mut err = T::zero();
        for i in 0..N {
            let mut e = T::zero();
            for (s, ks) in k.iter().enumerate() {
                e = e + lit(E[s]) * ks[i];
            }
            let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((h * e / sc).abs());
        }
        if !err.is_finite() {
            return Err(Error::NonFiniteState { t: t.to_f64_lossy() });
        }

        let factor = if err == T::zero() {
            lit(5.0)
        } else {
            (lit(0.9) * err.powf(lit(-0.2))).max(lit(0.2)).min(lit(5.0))
        };
        if err <= T::one() {
            t = if last { t1 } else { t + h };
            y = y_new;
            check_finite(t, &y)?;
            k1 = k[6];
            accepted += 1;
            rejections = 0;
            sol.steps += 1;
            if last || accepted.is_multiple_of(stride) {
                sol.push(t, y);
            }
            if last {
                return Ok(());
            }
            h = (h * factor).min(tol.dt_max);
        } else {
            rejections += 1;
            sol.rejected += 1;
            if rejections > MAX_REJECTIONS {
                return Err(Error::StepRejectionLimit {
                    t: t.to_f64_lossy(),
                    dt: h.to_f64_lossy(),
                    rejections,
                });
            }
            h = h * factor.min(T::one());
        }
        if !(h > T::zero()) || t + h == t {
            return Err(Error::StepRejectionLimit {
                t: t.to_f64_lossy(),
                dt: h.to_f64_lossy(),
                rejections,
            });
        }
    }
}

/// Observed order `log2(e(h)/e(h/2))` for consecutive error levels.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_t: f64, y: &[f64; 1]) -> Result<[f64; 1]> {
        Ok([-y[0]])
    }

    fn oscillator(_t: f64, y: &[f64; 2]) -> Result<[f64; 2]> {
        Ok([y[1], -y[0]])
    }

    #[test]
    fn rk4_lands_on_endpoint() {
        let sol = rk4(decay, [1.0], 0.0, 1.0, 0.3, 1).unwrap();
        assert_eq!(*sol.times.last().unwrap(), 1.0);
        assert_eq!(sol.steps, 4);
        assert!((sol.states.last().unwrap()[0] - (-1.0f64).exp()).abs() < 1e-4);
    }

    #[test]
    fn rk4_stride_records_endpoints() {
        let sol = rk4(decay, [1.0], 0.0, 1.0, 0.1, 3).unwrap();
        assert_eq!(sol.times.len(), 1 + 3 + 1);
        assert!(sol.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rk4_fourth_order() {
        // y' = y cos t, y = exp(sin t)
        let f = |t: f64, y: &[f64; 1]| Ok([y[0] * t.cos()]);
        let errs: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&dt| {
                let s = rk4(f, [1.0], 0.0, 4.0, dt, 1).unwrap();
                (s.states.last().unwrap()[0] - 4.0f64.sin().exp()).abs()
            })
            .collect();
        for p in observed_orders(&errs) {
            assert!((p - 4.0).abs() < 0.15, "order {p}");
        }
    }

    #[test]
    fn dopri_meets_tolerance() {
        let tol = Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
            dt_max: 1.0,
        };
        let sol = dopri45(oscillator, [0.0, 1.0], 0.0, 10.0, tol, 1).unwrap();
        assert_eq!(*sol.times.last().unwrap(), 10.0);
        assert!((sol.states.last().unwrap()[0] - 10.0f64.sin()).abs() < 1e-8);
        assert!(sol.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn dopri_respects_dt_max() {
        let tol = Tolerances {
            rtol: 1e-3,
            atol: 1e-6,
            dt_max: 0.01,
        };
        let sol = dopri45(decay, [1.0], 0.0, 1.0, tol, 1).unwrap();
        assert!(sol.times.windows(2).all(|w| w[1] - w[0] <= 0.01 + 1e-15));
    }

    #[test]
    fn non_finite_state_is_reported() {
        let blow = |_t: f64, y: &[f64; 1]| Ok([y[0] * y[0] * 1e300]);
        assert!(matches!(
            rk4(blow, [1e10], 0.0, 1.0, 0.5, 1),
            Err(Error::NonFiniteState { .. })
        ));
    }

    #[test]
    fn stiff_blow_up_hits_rejection_limit() {
        let singular = |t: f64, _y: &[f64; 1]| Ok([1.0 / (0.5 - t).powi(3)]);
        let tol = Tolerances {
            rtol: 1e-9,
            atol: 1e-12,
            dt_max: 1.0,
        };
        let r = dopri45(singular, [0.0], 0.0, 1.0, tol, 1);
        assert!(matches!(
            r,
            Err(Error::StepRejectionLimit { .. }) | Err(Error::NonFiniteState { .. })
        ));
    }

    #[test]
    fn invalid_configuration_rejected() {
        assert!(rk4(decay, [1.0], 0.0, 1.0, 0.0, 1).is_err());
        let tol = Tolerances {
            rtol: -1.0,
            atol: 1e-12,
            dt_max: 1.0,
        };
        assert!(dopri45(decay, [1.0], 0.0, 1.0, tol, 1).is_err());
    }

    #[test]
    fn f32_integration() {
        let sol = rk4(|_t: f32, y: &[f32; 1]| Ok([-y[0]]), [1.0f32], 0.0, 1.0, 0.01, 10).unwrap();
        assert!((sol.states.last().unwrap()[0] - (-1.0f32).exp()).abs() < 1e-5);
    }
}
