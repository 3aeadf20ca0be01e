use std::fmt;
use std::io::{self, Write};

use num_complex::Complex;

use super::rhs::{
    drive, oracle_with_samples, pullback_derivative, rhs_full_with_samples, rhs_nonsteered, rhs_secular_steered,
};
use super::{DensityState, Derivative};
use crate::bath::{rates_from_samples, SpectralDensity};
use crate::control::{AdiabaticFrame, FrameSource};
use crate::error::{Error, Result};
use crate::frames::to_superadiabatic;
use crate::gauge::optimal_shift;
use crate::ode::{dopri45_into, rk4_into, Solution, Tolerances};
use crate::scalar::Real;

/// Purity excess above which a positivity warning is logged.
pub const POSITIVITY_TOL: f64 = 1e-6;

pub const CSV_HEADER: &str = "t,rho_gg,re_rho_ge,im_rho_ge,purity,alpha,omega01,lambda_g,lambda_e";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method<T> {
    Rk4 { dt: T },
    Rk45 { rtol: T, atol: T, dt_max: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    pub method: Method<T>,
    pub t0: T,
    pub t1: T,
    /// Record every n-th step (endpoints are always kept).
    pub record_stride: usize,
}

impl<T: Real> SolverConfig<T> {
    pub fn rk4(t0: T, t1: T, dt: T) -> Self {
        Self {
            method: Method::Rk4 { dt },
            t0,
            t1,
            record_stride: 1,
        }
    }

    /// Adaptive solver with `rtol = 1e-9`, `atol = 1e-12` and no step cap
    /// beyond the interval length.
    pub fn rk45(t0: T, t1: T) -> Self {
        Self {
            method: Method::Rk45 {
                rtol: T::lit(1e-9),
                atol: T::lit(1e-12),
                dt_max: (t1 - t0).abs().max(T::epsilon()),
            },
            t0,
            t1,
            record_stride: 1,
        }
    }

    pub fn with_tolerances(mut self, rtol: T, atol: T) -> Self {
        if let Method::Rk45 { dt_max, .. } = self.method {
            self.method = Method::Rk45 { rtol, atol, dt_max };
        }
        self
    }

    pub fn with_dt_max(mut self, dt_max: T) -> Self {
        if let Method::Rk45 { rtol, atol, .. } = self.method {
            self.method = Method::Rk45 { rtol, atol, dt_max };
        }
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validation_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if !(self.t1 >= self.t0) || !self.t0.is_finite() || !self.t1.is_finite() {
            errs.push(format!("need finite t0 <= t1, got t0={} t1={}", self.t0, self.t1));
        }
        if self.record_stride == 0 {
            errs.push("record_stride must be at least 1".into());
        }
        match self.method {
            Method::Rk4 { dt } => {
                if !(dt > T::zero()) {
                    errs.push(format!("dt must be positive, got {dt}"));
                }
            }
            Method::Rk45 { rtol, atol, dt_max } => {
                if !(rtol > T::zero()) {
                    errs.push(format!("rtol must be positive, got {rtol}"));
                }
                if !(atol > T::zero()) {
                    errs.push(format!("atol must be positive, got {atol}"));
                }
                if !(dt_max > T::zero()) {
                    errs.push(format!("dt_max must be positive, got {dt_max}"));
                }
            }
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let errs = self.validation_errors();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(errs.join("; ")))
        }
    }
}

/// Which master equation drives the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Complete steered equation to linear order in `α`.
    Full,
    /// Steering term plus the secular dissipator.
    Secular,
    /// Bath only; the frame's `ŵ` is ignored.
    NonSteered,
    /// Superadiabatic oracle pulled back to adiabatic components.
    Oracle,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Full, Variant::Secular, Variant::NonSteered, Variant::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Secular => "secular",
            Variant::NonSteered => "nonsteered",
            Variant::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown variant `{s}`")))
    }
}

/// A master equation bound to its frames and bath.
///
/// The ODE state also carries the accumulated phases `λ_g, λ_e` with
/// `λ̇ = −w_diag` in the provider's gauge. With `optimal_phase` the equation
/// sees the frame rephased by those phases, so its `ŵ` diagonal vanishes.
pub struct Simulation<'a, T, F: ?Sized> {
    pub frames: &'a F,
    pub spectrum: &'a SpectralDensity<T>,
    pub variant: Variant,
    pub optimal_phase: bool,
    /// Sample the spectrum at `±(ω01 + w_ee − w_gg)` using the provider's
    /// gauge.
    pub spectral_shift: bool,
    pub lambda0: [T; 2],
}

impl<T: Real, F: FrameSource<T> + ?Sized> Clone for Simulation<'_, T, F> {
    fn clone(&self) -> Self {
        Self { ..*self }
    }
}

impl<'a, T: Real, F: FrameSource<T> + ?Sized> Simulation<'a, T, F> {
    pub fn new(frames: &'a F, spectrum: &'a SpectralDensity<T>, variant: Variant) -> Self {
        Self {
            frames,
            spectrum,
            variant,
            optimal_phase: false,
            spectral_shift: false,
            lambda0: [T::zero(); 2],
        }
    }

    pub fn optimal_phase(mut self, on: bool) -> Self {
        self.optimal_phase = on;
        self
    }

    pub fn spectral_shift(mut self, on: bool) -> Self {
        self.spectral_shift = on;
        self
    }

    pub fn lambda0(mut self, lambda_g0: T, lambda_e0: T) -> Self {
        self.lambda0 = [lambda_g0, lambda_e0];
        self
    }

    /// Provider frame and the frame the equation actually sees.
    fn frames_at(&self, t: T, lambda_g: T, lambda_e: T) -> Result<(AdiabaticFrame<T>, AdiabaticFrame<T>)> {
        let raw = self.frames.frame(t)?;
        let used = if self.optimal_phase {
            optimal_shift(&raw, lambda_g, lambda_e).frame
        } else {
            raw
        };
        Ok((raw, used))
    }

    /// `dρ/dt` for a state at time `t` given the accumulated phases.
    pub fn derivative(&self, t: T, s: &DensityState<T>, lambda_g: T, lambda_e: T) -> Result<Derivative<T>> {
        let (raw, f) = self.frames_at(t, lambda_g, lambda_e)?;
        self.derivative_in(s, &raw, &f)
    }

    fn derivative_in(
        &self,
        s: &DensityState<T>,
        raw: &AdiabaticFrame<T>,
        f: &AdiabaticFrame<T>,
    ) -> Result<Derivative<T>> {
        if self.variant != Variant::NonSteered {
            f.require_perturbative()?;
        }
        let sp = if self.spectral_shift {
            self.spectrum.shifted_samples(raw.omega01, raw.w.gg, raw.w.ee)?
        } else {
            self.spectrum.samples(raw.omega01)?
        };
        Ok(match self.variant {
            Variant::Full => rhs_full_with_samples(s, f, &sp),
            Variant::Secular => rhs_secular_steered(s, f, &sp),
            Variant::NonSteered => rhs_nonsteered(s, &rates_from_samples(f.m1, f.m2, &sp), f.omega01),
            Variant::Oracle => {
                let s2 = to_superadiabatic(s, f)?;
                pullback_derivative(&oracle_with_samples(&s2, f, &sp)?, f)
            }
        })
    }

    fn ode_rhs(&self, t: T, y: &[T; 5]) -> Result<[T; 5]> {
        let s = DensityState::new(y[0], Complex::new(y[1], y[2]));
        let (raw, f) = self.frames_at(t, y[3], y[4])?;
        let d = self.derivative_in(&s, &raw, &f)?;
        Ok([d.gg, d.ge.re, d.ge.im, -raw.w.gg, -raw.w.ee])
    }

    /// Unitary part only; exposed for diagnostics.
    pub fn steering_term(&self, t: T, s: &DensityState<T>, lambda_g: T, lambda_e: T) -> Result<Derivative<T>> {
        let (_, f) = self.frames_at(t, lambda_g, lambda_e)?;
        Ok(drive(s, &f.w))
    }
}

/// One recorded point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T> {
    pub t: T,
    pub state: DensityState<T>,
    /// Frame seen by the equation at `t` (rephased when the optimal phase
    /// is active).
    pub frame: AdiabaticFrame<T>,
    pub lambda_g: T,
    pub lambda_e: T,
    pub purity: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub samples: Vec<Sample<T>>,
    pub steps: usize,
    pub rejected: usize,
}

/// Machine-readable invariant checks over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InvariantSummary {
    /// `max |Tr ρ − 1|`.
    pub trace_residual: f64,
    /// Largest negative eigenvalue magnitude of `ρ`.
    pub positivity_max: f64,
    pub purity_max: f64,
    pub alpha_max: f64,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample<T>> {
        self.samples.last()
    }

    pub fn final_state(&self) -> Option<DensityState<T>> {
        self.last().map(|s| s.state)
    }

    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn max_excited_population(&self) -> T {
        self.samples
            .iter()
            .map(|s| s.state.rho_ee())
            .fold(T::neg_infinity(), T::max)
    }

    pub fn invariants(&self) -> InvariantSummary {
        let mut out = InvariantSummary::default();
        for s in &self.samples {
            let trace = s.state.rho_gg + s.state.rho_ee();
            out.trace_residual = out.trace_residual.max((trace - T::one()).abs().to_f64_lossy());
            out.positivity_max = out.positivity_max.max(s.state.positivity_violation().to_f64_lossy());
            out.purity_max = out.purity_max.max(s.purity.to_f64_lossy());
            out.alpha_max = out.alpha_max.max(s.frame.alpha.to_f64_lossy());
        }
        out
    }

    /// Writes the trajectory as CSV with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for s in &self.samples {
            let row = [
                s.t,
                s.state.rho_gg,
                s.state.rho_ge.re,
                s.state.rho_ge.im,
                s.purity,
                s.frame.alpha,
                s.frame.omega01,
                s.lambda_g,
                s.lambda_e,
            ];
            let fields: Vec<String> = row.iter().map(|v| format!("{:.16e}", v.to_f64_lossy())).collect();
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Solver error together with everything recorded before it.
#[derive(Debug, Clone)]
pub struct IntegrationFailure<T> {
    pub error: Error,
    pub partial: Trajectory<T>,
}

impl<T> fmt::Display for IntegrationFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl<T: fmt::Debug> std::error::Error for IntegrationFailure<T> {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl<T> From<IntegrationFailure<T>> for Error {
    fn from(f: IntegrationFailure<T>) -> Self {
        f.error
    }
}

fn build_trajectory<T: Real, F: FrameSource<T> + ?Sized>(
    sim: &Simulation<'_, T, F>,
    sol: &Solution<T, 5>,
) -> Result<Trajectory<T>> {
    let mut samples = Vec::with_capacity(sol.times.len());
    let mut warned = false;
    for (t, y) in sol.times.iter().zip(&sol.states) {
        let state = DensityState::new(y[0], Complex::new(y[1], y[2]));
        let (_, frame) = sim.frames_at(*t, y[3], y[4])?;
        let purity = state.purity();
        if !warned && purity > T::one() + T::lit(POSITIVITY_TOL) {
            log::warn!("positivity violated at t={t}: purity {purity}");
            warned = true;
        }
        samples.push(Sample {
            t: *t,
            state,
            frame,
            lambda_g: y[3],
            lambda_e: y[4],
            purity,
        });
    }
    Ok(Trajectory {
        samples,
        steps: sol.steps,
        rejected: sol.rejected,
    })
}

/// Integrates `sim` from `initial` over `[cfg.t0, cfg.t1]`.
pub fn integrate<T: Real, F: FrameSource<T> + ?Sized>(
    sim: &Simulation<'_, T, F>,
    initial: DensityState<T>,
    cfg: &SolverConfig<T>,
) -> std::result::Result<Trajectory<T>, IntegrationFailure<T>> {
    let empty = || Trajectory {
        samples: Vec::new(),
        steps: 0,
        rejected: 0,
    };
    if let Err(error) = cfg.validate() {
        return Err(IntegrationFailure {
            error,
            partial: empty(),
        });
    }
    let y0 = [
        initial.rho_gg,
        initial.rho_ge.re,
        initial.rho_ge.im,
        sim.lambda0[0],
        sim.lambda0[1],
    ];
    let mut sol = Solution::new();
    let f = |t: T, y: &[T; 5]| sim.ode_rhs(t, y);
    let run = match cfg.method {
        Method::Rk4 { dt } => rk4_into(f, y0, cfg.t0, cfg.t1, dt, cfg.record_stride, &mut sol),
        Method::Rk45 { rtol, atol, dt_max } => dopri45_into(
            f,
            y0,
            cfg.t0,
            cfg.t1,
            Tolerances { rtol, atol, dt_max },
            cfg.record_stride,
            &mut sol,
        ),
    };
    match (run, build_trajectory(sim, &sol)) {
        (Ok(()), Ok(traj)) => Ok(traj),
        (Err(error), Ok(partial)) => Err(IntegrationFailure { error, partial }),
        (_, Err(error)) => Err(IntegrationFailure {
            error,
            partial: empty(),
        }),
    }
}
