//! Open-system dynamics of an adiabatically steered two-level system.
//!
//! The crate builds instantaneous eigenframes along a control path, the
//! non-adiabatic coupling `ŵ` they induce, Born–Markov rates from a bath
//! spectrum, and integrates the resulting master equations. Everything is
//! generic over the scalar type ([`Real`], implemented for `f32` and `f64`);
//! the aliases below fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod frames;
pub mod gauge;
pub mod interp;
pub mod ode;
pub mod qubit;
pub mod scalar;

pub use bath::{rates, shifted_rates, superadiabatic_elements, RateSet, SpectralDensity, SpectrumSamples};
pub use control::{
    compute_w, eigensystem, AdiabaticFrame, ControlPath, EigenFrame, FrameSource, LocalGauge, PathFrames, PathKind,
    SampledField, StaticFrame, WMethod, GAP_FLOOR,
};
pub use dynamics::{integrate, purity, DensityState, Derivative, Simulation, SolverConfig, Trajectory, Variant};
pub use error::{Error, Result};
pub use frames::{superadiabatic_basis, SuperadiabaticBasis};
pub use gauge::{berry_phase, optimal_schedule, BerryPhase, PhasePoint, PhaseSchedule, WElements};
pub use qubit::Op2;
pub use scalar::Real;

pub type Path64 = ControlPath<f64>;
pub type Frame64 = AdiabaticFrame<f64>;
pub type Spectrum64 = SpectralDensity<f64>;
pub type State64 = DensityState<f64>;
pub type Trajectory64 = Trajectory<f64>;

pub type Path32 = ControlPath<f32>;
pub type Frame32 = AdiabaticFrame<f32>;
pub type Spectrum32 = SpectralDensity<f32>;
pub type State32 = DensityState<f32>;
