//! Phase freedom of the adiabatic basis.
//!
//! Multiplying `|g⟩, |e⟩` by `e^{iλ_g}, e^{iλ_e}` shifts the diagonal of
//! `ŵ` by `λ̇` and rotates the off-diagonal by `e^{i(λ_e−λ_g)}`. Choosing
//! `λ̇ = −w_diag` removes the diagonal, minimising `‖ŵ‖_HS`, and over a
//! closed loop the accumulated `λ` is the Berry phase.
//!
//! Sign convention: the reported increment is `Δλ_g = −∮ w_gg dt =
//! i∮⟨g|ġ⟩ dt`. For the anchored cone gauge this is `+π(1 − cos θ)`; the
//! textbook geometric phase `γ = −Δλ_g` mod 2π is quoted under the opposite
//! orientation.

use num_complex::Complex;

use crate::control::AdiabaticFrame;
use crate::error::{Error, Result};
use crate::interp::{is_uniform, linspace, CubicSpline};
use crate::qubit::Op2;
use crate::scalar::{phase, Real};

/// Elements of the Hermitian operator `ŵ = −i D†Ḋ` in the adiabatic basis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WElements<T> {
    pub gg: T,
    pub ee: T,
    /// `w_ge = −i⟨g|ė⟩`; `w_eg` is its conjugate.
    pub ge: Complex<T>,
}

impl<T: Real> WElements<T> {
    pub fn zero() -> Self {
        Self {
            gg: T::zero(),
            ee: T::zero(),
            ge: Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn eg(&self) -> Complex<T> {
        self.ge.conj()
    }

    pub fn matrix(&self) -> Op2<T> {
        let re = |x: T| Complex::new(x, T::zero());
        Op2::new([[re(self.gg), self.ge], [self.eg(), re(self.ee)]])
    }
}

/// Phases and their rates at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint<T> {
    pub lambda_g: T,
    pub lambda_e: T,
    pub rate_g: T,
    pub rate_e: T,
}

/// `ŵ` in the basis `e^{iλ_g}|g⟩, e^{iλ_e}|e⟩`.
pub fn apply_phase<T: Real>(w: &WElements<T>, p: &PhasePoint<T>) -> WElements<T> {
    WElements {
        gg: p.rate_g + w.gg,
        ee: p.rate_e + w.ee,
        ge: phase(p.lambda_e - p.lambda_g) * w.ge,
    }
}

/// Hilbert–Schmidt norm `sqrt(Tr ŵ†ŵ)`.
pub fn hs_norm<T: Real>(w: &WElements<T>) -> T {
    (w.gg * w.gg + w.ee * w.ee + T::two() * w.ge.norm_sqr()).sqrt()
}

/// Optimal phases `λ(t) = λ⁰ − ∫₀ᵗ w_diag dt'` tabulated on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSchedule<T> {
    pub times: Vec<T>,
    pub lambda_g: Vec<T>,
    pub lambda_e: Vec<T>,
    /// `dλ/dt = −w_diag` at the grid points.
    pub rate_g: Vec<T>,
    pub rate_e: Vec<T>,
    pub lambda_g0: T,
    pub lambda_e0: T,
    /// Richardson estimate of the quadrature error at the final time.
    pub error_estimate: T,
    splines: Option<[CubicSpline<T>; 4]>,
}

impl<T: Real> PhaseSchedule<T> {
    /// Phases and rates at `t`, interpolated between grid points.
    pub fn at(&self, t: T) -> PhasePoint<T> {
        match &self.splines {
            Some([lg, le, rg, re]) => PhasePoint {
                lambda_g: lg.eval(t),
                lambda_e: le.eval(t),
                rate_g: rg.eval(t),
                rate_e: re.eval(t),
            },
            None => PhasePoint {
                lambda_g: self.lambda_g[0],
                lambda_e: self.lambda_e[0],
                rate_g: self.rate_g[0],
                rate_e: self.rate_e[0],
            },
        }
    }

    /// Phase at grid point `k`.
    pub fn point(&self, k: usize) -> PhasePoint<T> {
        PhasePoint {
            lambda_g: self.lambda_g[k],
            lambda_e: self.lambda_e[k],
            rate_g: self.rate_g[k],
            rate_e: self.rate_e[k],
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(Δλ_g, Δλ_e)` between the first and last grid points.
    pub fn increments(&self) -> (T, T) {
        let n = self.len() - 1;
        (self.lambda_g[n] - self.lambda_g[0], self.lambda_e[n] - self.lambda_e[0])
    }
}

fn cumulative_trapezoid<T: Real>(times: &[T], integrand: &[T], start: T) -> Vec<T> {
    let mut acc = start;
    let mut out = Vec::with_capacity(times.len());
    out.push(acc);
    for k in 1..times.len() {
        acc = acc + (times[k] - times[k - 1]) * T::half() * (integrand[k] + integrand[k - 1]);
        out.push(acc);
    }
    out
}

/// Builds the norm-minimising schedule from a frame history sampled under
/// one continuous gauge. Non-uniform grids are resampled onto a uniform grid
/// of the same size by cubic interpolation before the cumulative trapezoid.
pub fn optimal_schedule<T: Real>(
    history: &[AdiabaticFrame<T>],
    lambda_g0: T,
    lambda_e0: T,
) -> Result<PhaseSchedule<T>> {
    if history.len() < 2 {
        return Err(Error::NonUniformGridUnsupported(format!(
            "need at least two frames, got {}",
            history.len()
        )));
    }
    let raw_t: Vec<T> = history.iter().map(|f| f.t).collect();
    if raw_t.windows(2).any(|w| !(w[1] > w[0])) || raw_t.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonUniformGridUnsupported(
            "frame times must be finite and strictly increasing".into(),
        ));
    }
    let rate_g: Vec<T> = history.iter().map(|f| -f.w.gg).collect();
    let rate_e: Vec<T> = history.iter().map(|f| -f.w.ee).collect();

    let (times, rate_g, rate_e) = if is_uniform(&raw_t, T::lit(1e-9)) {
        (raw_t, rate_g, rate_e)
    } else {
        let grid = linspace(raw_t[0], raw_t[raw_t.len() - 1], raw_t.len());
        let sg = CubicSpline::new(raw_t.clone(), rate_g)?;
        let se = CubicSpline::new(raw_t, rate_e)?;
        let rg = grid.iter().map(|&t| sg.eval(t)).collect();
        let re = grid.iter().map(|&t| se.eval(t)).collect();
        (grid, rg, re)
    };

    let lambda_g = cumulative_trapezoid(&times, &rate_g, lambda_g0);
    let lambda_e = cumulative_trapezoid(&times, &rate_e, lambda_e0);

    // Richardson: compare against the same rule on every other point
    let n = times.len();
    let error_estimate = if n >= 3 && n % 2 == 1 {
        let coarse = |rates: &[T], start: T| {
            let t2: Vec<T> = times.iter().step_by(2).copied().collect();
            let r2: Vec<T> = rates.iter().step_by(2).copied().collect();
            cumulative_trapezoid(&t2, &r2, start)
        };
        let cg = coarse(&rate_g, lambda_g0);
        let ce = coarse(&rate_e, lambda_e0);
        let three = T::lit(3.0);
        let dg = (lambda_g[n - 1] - cg[cg.len() - 1]).abs() / three;
        let de = (lambda_e[n - 1] - ce[ce.len() - 1]).abs() / three;
        dg.max(de)
    } else {
        T::nan()
    };

    let splines = if n >= 2 {
        Some([
            CubicSpline::new(times.clone(), lambda_g.clone())?,
            CubicSpline::new(times.clone(), lambda_e.clone())?,
            CubicSpline::new(times.clone(), rate_g.clone())?,
            CubicSpline::new(times.clone(), rate_e.clone())?,
        ])
    } else {
        None
    };

    Ok(PhaseSchedule {
        times,
        lambda_g,
        lambda_e,
        rate_g,
        rate_e,
        lambda_g0,
        lambda_e0,
        error_estimate,
        splines,
    })
}

/// Phase increments accumulated around a closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerryPhase<T> {
    pub delta_lambda_g: T,
    pub delta_lambda_e: T,
    /// Quadrature error estimate carried over from the schedule.
    pub error_estimate: T,
}

impl<T: Real> BerryPhase<T> {
    /// Increments reduced to `(−π, π]`.
    pub fn wrapped(&self) -> (T, T) {
        (wrap_phase(self.delta_lambda_g), wrap_phase(self.delta_lambda_e))
    }
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap_phase<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let mut r = x - tau * (x / tau).round();
    if r <= -T::PI() {
        r = r + tau;
    } else if r > T::PI() {
        r = r - tau;
    }
    r
}

/// Berry phases `i∮⟨g|ġ⟩`, `i∮⟨e|ė⟩` from a closed-loop history.
pub fn berry_phase<T: Real>(history: &[AdiabaticFrame<T>]) -> Result<BerryPhase<T>> {
    let (first, last) = match (history.first(), history.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::NonUniformGridUnsupported("empty frame history".into()));
        }
    };
    let gap = (0..3)
        .map(|k| (first.field[k] - last.field[k]).powi(2))
        .fold(T::zero(), |a, b| a + b)
        .sqrt();
    let scale = (0..3).map(|k| first.field[k].abs()).fold(T::one(), T::max);
    let limit = T::lit(1e-10).max(T::lit(100.0) * T::epsilon() * scale);
    if gap > limit {
        return Err(Error::LoopNotClosed {
            gap: gap.to_f64_lossy(),
        });
    }
    let schedule = optimal_schedule(history, T::zero(), T::zero())?;
    let (g, e) = schedule.increments();
    Ok(BerryPhase {
        delta_lambda_g: g,
        delta_lambda_e: e,
        error_estimate: schedule.error_estimate,
    })
}

/// Frame expressed in the optimally phased basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseShiftedFrame<T> {
    pub frame: AdiabaticFrame<T>,
    pub lambda_g: T,
    pub lambda_e: T,
}

impl<T: Real> PhaseShiftedFrame<T> {
    pub fn as_frame(&self) -> &AdiabaticFrame<T> {
        &self.frame
    }
}

/// Frame in the phased basis with rates from `p`; the diagonal of `ŵ`
/// keeps whatever residual `w + λ̇` leaves.
pub fn phase_shift<T: Real>(frame: &AdiabaticFrame<T>, p: &PhasePoint<T>) -> PhaseShiftedFrame<T> {
    let w = apply_phase(&frame.w, p);
    let rot = phase(p.lambda_e - p.lambda_g);
    let shifted = AdiabaticFrame {
        w,
        m2: rot * frame.m2,
        alpha: hs_norm(&w) / frame.omega01,
        ..*frame
    };
    PhaseShiftedFrame {
        frame: shifted,
        lambda_g: p.lambda_g,
        lambda_e: p.lambda_e,
    }
}

/// Frame in the optimally phased basis: `w̃_gg = w̃_ee = 0`,
/// `w̃_ge = e^{i(λ_e−λ_g)} w_ge`, `m̃2 = e^{i(λ_e−λ_g)} m2`.
pub fn optimal_shift<T: Real>(frame: &AdiabaticFrame<T>, lambda_g: T, lambda_e: T) -> PhaseShiftedFrame<T> {
    phase_shift(
        frame,
        &PhasePoint {
            lambda_g,
            lambda_e,
            rate_g: -frame.w.gg,
            rate_e: -frame.w.ee,
        },
    )
}

/// [`phase_shift`] with the schedule evaluated at `t`.
pub fn phase_shifted_frame<T: Real>(
    frame: &AdiabaticFrame<T>,
    schedule: &PhaseSchedule<T>,
    t: T,
) -> PhaseShiftedFrame<T> {
    phase_shift(frame, &schedule.at(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{ControlPath, FrameSource, PathFrames};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn w(gg: f64, ee: f64, ge: Complex<f64>) -> WElements<f64> {
        WElements { gg, ee, ge }
    }

    #[test]
    fn apply_phase_cases() {
        let base = w(0.02, -0.03, Complex::new(0.05, 0.0));
        assert_eq!(apply_phase(&base, &PhasePoint::default()), base);

        let opt = apply_phase(
            &base,
            &PhasePoint {
                lambda_g: 0.4,
                lambda_e: 1.1,
                rate_g: -0.02,
                rate_e: 0.03,
            },
        );
        assert_eq!((opt.gg, opt.ee), (0.0, 0.0));

        let flip = apply_phase(
            &base,
            &PhasePoint {
                lambda_g: 0.0,
                lambda_e: PI,
                rate_g: 0.0,
                rate_e: 0.0,
            },
        );
        assert!((flip.ge - Complex::new(-0.05, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn hs_norm_cases() {
        assert_eq!(hs_norm(&WElements::<f64>::zero()), 0.0);
        let x = w(0.05, -0.05, Complex::new(0.0, 0.05));
        assert!((hs_norm(&x) - 0.1).abs() < 1e-15);
        let y = w(0.0, 0.0, Complex::new(0.0, 0.05));
        assert!((hs_norm(&y) - 2f64.sqrt() * 0.05).abs() < 1e-15);
        assert!((hs_norm(&y) - 0.0707).abs() < 1e-4);
    }

    fn cone_frames(theta: f64, omega: f64) -> PathFrames<f64> {
        PathFrames::new(ControlPath::rotating_cone(1.0, theta, omega, Op2::sigma_x())).unwrap()
    }

    #[test]
    fn static_schedule_is_constant() {
        let frames =
            PathFrames::new(ControlPath::rotating_cone(1.0, 0.8, 0.0, Op2::sigma_x()).with_duration(10.0)).unwrap();
        let s = optimal_schedule(&frames.history(11).unwrap(), 0.7, -0.2).unwrap();
        assert!(s.lambda_g.iter().all(|&l| l == 0.7));
        assert!(s.lambda_e.iter().all(|&l| l == -0.2));
    }

    #[test]
    fn cone_ground_schedule_is_linear() {
        let frames = cone_frames(FRAC_PI_2, 0.1);
        let hist = frames.history(101).unwrap();
        assert!((hist[0].w.gg + 0.05).abs() < 1e-14);
        let s = optimal_schedule(&hist, 0.3, 0.0).unwrap();
        for (t, l) in s.times.iter().zip(&s.lambda_g) {
            assert!((l - (0.05 * t + 0.3)).abs() < 1e-12);
        }
    }

    #[test]
    fn schedule_removes_diagonals_and_tracks_rate() {
        let frames = PathFrames::new(ControlPath::linear_sweep(0.3, 0.4, 20.0, Op2::sigma_x()))
            .unwrap()
            .with_gauge(
                crate::control::LocalGauge::anchored([1, 0]).with_phases(|t: f64| PhasePoint {
                    lambda_g: (0.3 * t).sin(),
                    lambda_e: 0.0,
                    rate_g: 0.3 * (0.3 * t).cos(),
                    rate_e: 0.0,
                }),
            );
        let hist = frames.history(401).unwrap();
        let s = optimal_schedule(&hist, 0.0, 0.0).unwrap();
        for (k, f) in hist.iter().enumerate() {
            let shifted = phase_shift(f, &s.point(k));
            assert!(shifted.frame.w.gg.abs() < 1e-15);
            assert!(shifted.frame.w.ee.abs() < 1e-15);
        }
        // spline derivative of λ agrees with −w_gg to quadrature accuracy
        let lg = CubicSpline::new(s.times.clone(), s.lambda_g.clone()).unwrap();
        for k in (20..380).step_by(37) {
            assert!((lg.derivative(s.times[k]) + hist[k].w.gg).abs() < 1e-3);
        }
        assert!(s.error_estimate < 1e-3);
    }

    #[test]
    fn nonuniform_history_is_resampled() {
        let frames = cone_frames(FRAC_PI_3, 0.2);
        let times: Vec<f64> = (0..=60)
            .map(|k| frames.path.duration * (k as f64 / 60.0).powi(2))
            .collect();
        let hist: Vec<_> = times.iter().map(|&t| frames.frame(t).unwrap()).collect();
        let s = optimal_schedule(&hist, 0.0, 0.0).unwrap();
        assert!(is_uniform(&s.times, 1e-12));
        let (g, _) = s.increments();
        assert!((g - PI / 2.0).abs() < 1e-10);

        let mut bad = hist.clone();
        bad.swap(3, 4);
        assert!(matches!(
            optimal_schedule(&bad, 0.0, 0.0),
            Err(Error::NonUniformGridUnsupported(_))
        ));
    }

    #[test]
    fn berry_phase_cone_solid_angle() {
        for theta in [FRAC_PI_3, FRAC_PI_2, 0.4] {
            let bp = berry_phase(&cone_frames(theta, 0.05).history(513).unwrap()).unwrap();
            let oracle = PI * (1.0 - theta.cos());
            assert!((bp.delta_lambda_g.abs() - oracle).abs() < 1e-4, "θ={theta}");
            assert!((bp.delta_lambda_e.abs() - oracle).abs() < 1e-4);
        }
    }

    #[test]
    fn berry_phase_matches_parallel_transport_holonomy() {
        // independent route: transported eigenvector after one loop
        let theta = 1.2;
        let frames = cone_frames(theta, 0.3);
        let path = &frames.path;
        let start = crate::control::eigensystem(path, 0.0, None).unwrap();
        let mut prev = start;
        let n = 20000;
        for k in 1..=n {
            let t = path.duration * k as f64 / n as f64;
            prev = crate::control::eigensystem(path, t, Some(&prev)).unwrap();
        }
        let holonomy = crate::qubit::inner(&start.ground, &prev.ground).arg();
        let bp = berry_phase(&frames.history(257).unwrap()).unwrap();
        assert!((wrap_phase(bp.delta_lambda_g - holonomy)).abs() < 1e-3);
    }

    #[test]
    fn static_loop_has_no_phase() {
        let frames =
            PathFrames::new(ControlPath::rotating_cone(1.0, 0.7, 0.0, Op2::sigma_x()).with_duration(3.0)).unwrap();
        let bp = berry_phase(&frames.history(33).unwrap()).unwrap();
        assert_eq!((bp.delta_lambda_g, bp.delta_lambda_e), (0.0, 0.0));
    }

    #[test]
    fn open_loop_rejected() {
        let frames = cone_frames(0.9, 0.1);
        let hist = frames.history(65).unwrap();
        assert!(matches!(berry_phase(&hist[..40]), Err(Error::LoopNotClosed { .. })));
    }

    #[test]
    fn double_loop_is_additive() {
        let theta = 0.9;
        let once = cone_frames(theta, 0.1);
        let twice = PathFrames::new(once.path.clone().with_duration(2.0 * once.path.duration)).unwrap();
        let a = berry_phase(&once.history(257).unwrap()).unwrap();
        let b = berry_phase(&twice.history(513).unwrap()).unwrap();
        assert!((b.delta_lambda_g - 2.0 * a.delta_lambda_g).abs() < 1e-9);
    }

    #[test]
    fn retraced_path_has_no_phase() {
        use crate::control::SampledField;
        let n = 401;
        let times = linspace(0.0, 10.0, n);
        let fields: Vec<[f64; 3]> = times
            .iter()
            .map(|&t| {
                let phi = 2.5 * (PI * t / 10.0).sin();
                let th = 0.8f64;
                [th.sin() * phi.cos(), th.sin() * phi.sin(), th.cos()]
            })
            .collect();
        let path = ControlPath::sampled(SampledField::new(times, fields).unwrap(), Op2::sigma_x());
        let bp = berry_phase(&PathFrames::new(path).unwrap().history(801).unwrap()).unwrap();
        assert!(bp.delta_lambda_g.abs() < 1e-4);
        assert!(bp.delta_lambda_e.abs() < 1e-4);
    }

    #[test]
    fn wrap_phase_range() {
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(0.5f64) - 0.5).abs() < 1e-15);
        assert!((wrap_phase(-7.0) - (-7.0 + 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn shifted_frame_preserves_moduli() {
        let f = cone_frames(1.0, 0.2).frame(3.0).unwrap();
        let s = optimal_shift(&f, 0.4, -1.3);
        assert!((s.frame.m2.norm() - f.m2.norm()).abs() < 1e-15);
        assert!((s.frame.w.ge.norm() - f.w.ge.norm()).abs() < 1e-15);
        assert_eq!((s.frame.w.gg, s.frame.w.ee), (0.0, 0.0));
        assert_eq!(s.frame.m1, f.m1);
        assert_eq!(s.frame.omega01, f.omega01);
        assert!((s.frame.alpha - 2f64.sqrt() * f.w.ge.norm() / f.omega01).abs() < 1e-15);
    }

    #[test]
    fn constant_schedule_only_rotates() {
        let frames =
            PathFrames::new(ControlPath::rotating_cone(1.0, 0.7, 0.0, Op2::sigma_x()).with_duration(3.0)).unwrap();
        let hist = frames.history(9).unwrap();
        let s = optimal_schedule(&hist, 0.2, 0.9).unwrap();
        let shifted = phase_shifted_frame(&hist[4], &s, hist[4].t);
        assert!((shifted.frame.m2 - hist[4].m2 * phase(0.7)).norm() < 1e-15);
    }
}
