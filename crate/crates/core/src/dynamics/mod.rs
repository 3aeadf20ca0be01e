//! Master-equation right-hand sides and their time integration.

mod rhs;
mod solve;

pub use rhs::{
    drive, oracle_derivative, pullback_derivative, rhs_full, rhs_full_with_samples, rhs_nonsteered, rhs_secular,
    rhs_secular_steered, rhs_superadiabatic_oracle,
};
pub use solve::{
    integrate, IntegrationFailure, InvariantSummary, Method, Sample, Simulation, SolverConfig, Trajectory, Variant,
    CSV_HEADER, POSITIVITY_TOL,
};

use num_complex::Complex;

use crate::scalar::Real;

/// Two-level density matrix in the adiabatic basis. Only `ρ_gg` and `ρ_ge`
/// are stored; `ρ_ee = 1 − ρ_gg` and `ρ_eg = ρ_ge*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityState<T> {
    pub rho_gg: T,
    pub rho_ge: Complex<T>,
}

impl<T: Real> DensityState<T> {
    pub fn new(rho_gg: T, rho_ge: Complex<T>) -> Self {
        Self { rho_gg, rho_ge }
    }

    pub fn ground() -> Self {
        Self::new(T::one(), Complex::new(T::zero(), T::zero()))
    }

    pub fn excited() -> Self {
        Self::new(T::zero(), Complex::new(T::zero(), T::zero()))
    }

    pub fn rho_ee(&self) -> T {
        T::one() - self.rho_gg
    }

    pub fn rho_eg(&self) -> Complex<T> {
        self.rho_ge.conj()
    }

    pub fn purity(&self) -> T {
        purity(self)
    }

    /// Amount by which the smallest eigenvalue of `ρ` is negative (zero for
    /// a physical state).
    pub fn positivity_violation(&self) -> T {
        let d = self.rho_gg - T::half();
        let r = (d * d + self.rho_ge.norm_sqr()).sqrt();
        (r - T::half()).max(T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.rho_gg.is_finite() && self.rho_ge.re.is_finite() && self.rho_ge.im.is_finite()
    }
}

/// `dρ/dt` in the same component layout as [`DensityState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative<T> {
    pub gg: T,
    pub ge: Complex<T>,
}

impl<T: Real> Derivative<T> {
    pub fn zero() -> Self {
        Self {
            gg: T::zero(),
            ge: Complex::new(T::zero(), T::zero()),
        }
    }

    /// Sup-norm distance between two derivatives.
    pub fn distance(&self, other: &Self) -> T {
        (self.gg - other.gg).abs().max((self.ge - other.ge).norm())
    }
}

impl<T: Real> std::ops::Add for Derivative<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            gg: self.gg + o.gg,
            ge: self.ge + o.ge,
        }
    }
}

/// `Tr ρ² = ρ_gg² + ρ_ee² + 2|ρ_ge|²`.
pub fn purity<T: Real>(s: &DensityState<T>) -> T {
    let ee = s.rho_ee();
    s.rho_gg * s.rho_gg + ee * ee + T::two() * s.rho_ge.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn purity_examples() {
        let c = |re| Complex::new(re, 0.0);
        assert_eq!(purity(&DensityState::new(1.0, c(0.0))), 1.0);
        assert_eq!(purity(&DensityState::new(0.5, c(0.0))), 0.5);
        assert_eq!(purity(&DensityState::new(0.5, c(0.5))), 1.0);
    }

    #[test]
    fn positivity_violation_tracks_purity_excess() {
        let ok = DensityState::new(0.5, Complex::new(0.3, 0.4));
        assert_eq!(ok.positivity_violation(), 0.0);
        let bad = DensityState::new(1.1f64, Complex::new(0.0, 0.0));
        assert!((bad.positivity_violation() - 0.1).abs() < 1e-15);
        assert!(bad.purity() > 1.0);
    }
}
