//! First-order superadiabatic basis and the linear-order maps between
//! adiabatic and superadiabatic density-matrix components.
//!
//! All vectors here are written in the adiabatic `(g, e)` component basis.
//! The corrected states are left unnormalised; normalisation only enters at
//! second order in `α`.

use num_complex::Complex;

use crate::control::AdiabaticFrame;
use crate::dynamics::DensityState;
use crate::error::Result;
use crate::qubit::{inner, Spinor};
use crate::scalar::{phase, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperadiabaticBasis<T> {
    pub g2: Spinor<T>,
    pub e2: Spinor<T>,
    pub energy_g2: T,
    pub energy_e2: T,
    /// `ω01 + w_ee − w_gg`.
    pub omega01_2: T,
}

impl<T: Real> SuperadiabaticBasis<T> {
    pub fn overlap(&self) -> Complex<T> {
        inner(&self.g2, &self.e2)
    }
}

/// `|g⁽²⁾⟩ = |g⟩ − |e⟩ w_ge*/ω01`, `|e⁽²⁾⟩ = |e⟩ + |g⟩ w_ge/ω01`, with
/// energies shifted by the diagonal of `ŵ`.
pub fn superadiabatic_basis<T: Real>(frame: &AdiabaticFrame<T>) -> Result<SuperadiabaticBasis<T>> {
    frame.require_perturbative()?;
    let om = frame.omega01;
    let r = frame.w.ge / om;
    let one = Complex::new(T::one(), T::zero());
    let half = om * T::half();
    Ok(SuperadiabaticBasis {
        g2: [one, -r.conj()],
        e2: [r, one],
        energy_g2: -half + frame.w.gg,
        energy_e2: half + frame.w.ee,
        omega01_2: om + (frame.w.ee - frame.w.gg),
    })
}

/// Adiabatic components to superadiabatic components, linear in `w_ge/ω01`.
pub fn to_superadiabatic<T: Real>(s: &DensityState<T>, frame: &AdiabaticFrame<T>) -> Result<DensityState<T>> {
    frame.require_perturbative()?;
    let r = frame.w.ge / frame.omega01;
    let two = T::two();
    Ok(DensityState {
        rho_gg: s.rho_gg - two * (r.conj() * s.rho_ge).re,
        rho_ge: s.rho_ge + r * (two * s.rho_gg - T::one()),
    })
}

/// Linear-order inverse of [`to_superadiabatic`].
pub fn from_superadiabatic<T: Real>(s2: &DensityState<T>, frame: &AdiabaticFrame<T>) -> Result<DensityState<T>> {
    frame.require_perturbative()?;
    let r = frame.w.ge / frame.omega01;
    let two = T::two();
    Ok(DensityState {
        rho_gg: s2.rho_gg + two * (r.conj() * s2.rho_ge).re,
        rho_ge: s2.rho_ge - r * (two * s2.rho_gg - T::one()),
    })
}

/// Interaction-picture components to the Schrödinger picture:
/// `ρ_gg = σ_gg`, `ρ_ge = e^{iω01 t} σ_ge`.
pub fn to_schrodinger<T: Real>(sigma: &DensityState<T>, t: T, omega01: T) -> DensityState<T> {
    DensityState {
        rho_gg: sigma.rho_gg,
        rho_ge: sigma.rho_ge * phase(omega01 * t),
    }
}

/// Inverse of [`to_schrodinger`].
pub fn to_interaction<T: Real>(rho: &DensityState<T>, t: T, omega01: T) -> DensityState<T> {
    DensityState {
        rho_gg: rho.rho_gg,
        rho_ge: rho.rho_ge * phase(-omega01 * t),
    }
}
