//! Bath spectral densities and the Born–Markov transition rates of a
//! two-level system.
//!
//! Units: `ħ = k_B = 1`. A spectral density quoted with explicit `ħ` is
//! restored as `S_X(ω) = ħ² S(ω)`.

use num_complex::Complex;

use crate::control::GAP_FLOOR;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bath noise spectrum `S(ω) ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralDensity<T> {
    /// White noise, `S(ω) = S0`.
    Flat { s0: T },
    /// `S(ω) = η ω / (1 − e^{−ω/T}) · e^{−|ω|/ω_c}`, with `S(0) = η T`.
    OhmicThermal { eta: T, temperature: T, cutoff: T },
    /// `S(ω) = η ω e^{−ω/ω_c}` for `ω > 0`, zero otherwise.
    ZeroTemperatureOhmic { eta: T, cutoff: T },
    /// Piecewise-linear interpolation of `(ω, S)` samples.
    Tabulated { omega: Vec<T>, density: Vec<T> },
}

impl<T: Real> SpectralDensity<T> {
    pub fn flat(s0: T) -> Self {
        Self::Flat { s0 }
    }

    pub fn ohmic_thermal(eta: T, temperature: T, cutoff: T) -> Self {
        Self::OhmicThermal {
            eta,
            temperature,
            cutoff,
        }
    }

    pub fn zero_temperature_ohmic(eta: T, cutoff: T) -> Self {
        Self::ZeroTemperatureOhmic { eta, cutoff }
    }

    pub fn tabulated(omega: Vec<T>, density: Vec<T>) -> Result<Self> {
        let sd = Self::Tabulated { omega, density };
        sd.validate()?;
        Ok(sd)
    }

    /// Parameter checks; every problem is reported, not only the first.
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let nonneg = |name: &str, v: T, errs: &mut Vec<String>| {
            if !(v >= T::zero()) || !v.is_finite() {
                errs.push(format!("{name} must be finite and non-negative, got {v}"));
            }
        };
        let cutoff_ok = |v: T, errs: &mut Vec<String>| {
            if !(v > T::zero()) {
                errs.push(format!("cutoff must be positive (or infinite), got {v}"));
            }
        };
        match self {
            Self::Flat { s0 } => nonneg("s0", *s0, &mut errs),
            Self::OhmicThermal {
                eta,
                temperature,
                cutoff,
            } => {
                nonneg("eta", *eta, &mut errs);
                if !(*temperature > T::zero()) || !temperature.is_finite() {
                    errs.push(format!("temperature must be positive, got {temperature}"));
                }
                cutoff_ok(*cutoff, &mut errs);
            }
            Self::ZeroTemperatureOhmic { eta, cutoff } => {
                nonneg("eta", *eta, &mut errs);
                cutoff_ok(*cutoff, &mut errs);
            }
            Self::Tabulated { omega, density } => {
                if omega.len() != density.len() {
                    errs.push("tabulated spectrum columns differ in length".into());
                }
                if omega.len() < 2 {
                    errs.push("tabulated spectrum needs at least two rows".into());
                }
                if omega.windows(2).any(|w| !(w[1] > w[0])) {
                    errs.push("tabulated frequencies must be strictly increasing".into());
                }
                if density.iter().any(|s| !(*s >= T::zero()) || !s.is_finite()) {
                    errs.push("tabulated densities must be finite and non-negative".into());
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

    /// `S(ω)`.
    pub fn eval(&self, omega: T) -> Result<T> {
        match self {
            Self::Flat { s0 } => Ok(*s0),
            Self::OhmicThermal {
                eta,
                temperature,
                cutoff,
            } => {
                let x = omega / *temperature;
                // x / (1 − e^{−x}) → 1 as x → 0
                let bose = if x == T::zero() { T::one() } else { x / -(-x).exp_m1() };
                Ok(*eta * *temperature * bose * (-omega.abs() / *cutoff).exp())
            }
            Self::ZeroTemperatureOhmic { eta, cutoff } => {
                if omega > T::zero() {
                    Ok(*eta * omega * (-omega / *cutoff).exp())
                } else {
                    Ok(T::zero())
                }
            }
            Self::Tabulated { omega: grid, density } => {
                let (lo, hi) = (grid[0], grid[grid.len() - 1]);
                if !(omega >= lo && omega <= hi) {
                    return Err(Error::OutOfRange {
                        value: omega.to_f64_lossy(),
                        lo: lo.to_f64_lossy(),
                        hi: hi.to_f64_lossy(),
                    });
                }
                let k = grid.partition_point(|&x| x <= omega).clamp(1, grid.len() - 1);
                let (x0, x1) = (grid[k - 1], grid[k]);
                let u = (omega - x0) / (x1 - x0);
                Ok(density[k - 1] + u * (density[k] - density[k - 1]))
            }
        }
    }

    /// `(S(0), S(+ω01), S(−ω01))`.
    pub fn samples(&self, omega01: T) -> Result<SpectrumSamples<T>> {
        Ok(SpectrumSamples {
            zero: self.eval(T::zero())?,
            plus: self.eval(omega01)?,
            minus: self.eval(-omega01)?,
        })
    }

    /// Samples with the frequency shift `S(±ω01) → S(±(ω01 + w_ee − w_gg))`.
    pub fn shifted_samples(&self, omega01: T, w_gg: T, w_ee: T) -> Result<SpectrumSamples<T>> {
        let d = w_ee - w_gg;
        Ok(SpectrumSamples {
            zero: self.eval(T::zero())?,
            plus: self.eval(omega01 + d)?,
            minus: self.eval(-omega01 - d)?,
        })
    }
}

/// The three spectrum values every rate needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSamples<T> {
    pub zero: T,
    pub plus: T,
    pub minus: T,
}

impl<T: Real> SpectrumSamples<T> {
    pub fn zeros() -> Self {
        Self {
            zero: T::zero(),
            plus: T::zero(),
            minus: T::zero(),
        }
    }
}

/// Transition rates of the non-steered two-level master equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet<T> {
    /// Excitation `g → e`.
    pub gamma_ge: T,
    /// Relaxation `e → g`.
    pub gamma_eg: T,
    pub gamma_tilde0: Complex<T>,
    pub gamma_tilde_plus: Complex<T>,
    pub gamma_tilde_minus: Complex<T>,
    pub gamma_phi: T,
    pub gamma_alpha: Complex<T>,
    pub gamma_beta: Complex<T>,
}

fn check_gap<T: Real>(omega01: T) -> Result<()> {
    if !(omega01 > T::lit(GAP_FLOOR)) {
        return Err(Error::GapCollapse {
            t: f64::NAN,
            gap: omega01.to_f64_lossy(),
            floor: GAP_FLOOR,
        });
    }
    Ok(())
}

/// Rates from traceless coupling elements and pre-evaluated spectrum values.
///
/// With `⟨g|A|g⟩ = m1 = −⟨e|A|e⟩` and `⟨e|A|g⟩ = m2*`, the general
/// expressions reduce to the forms below; imaginary (Lamb-shift) parts of
/// the bath integrals are not modelled.
pub fn rates_from_samples<T: Real>(m1: T, m2: Complex<T>, s: &SpectrumSamples<T>) -> RateSet<T> {
    let m2_sq = m2.norm_sqr();
    let a_gg = m1;
    let a_ee = -m1;
    let a_eg = m2.conj();
    let half = T::half();
    RateSet {
        gamma_ge: m2_sq * s.minus,
        gamma_eg: m2_sq * s.plus,
        gamma_tilde0: a_eg * (a_gg - a_ee) * s.zero,
        gamma_tilde_plus: m2 * (a_ee - a_gg) * half * s.plus,
        gamma_tilde_minus: m2 * (a_ee - a_gg) * half * s.minus,
        gamma_phi: (a_ee * a_ee * half + a_gg * a_gg * half - a_gg * a_ee) * s.zero,
        gamma_alpha: m2 * m2 * half * s.plus,
        gamma_beta: m2 * m2 * half * s.minus,
    }
}

/// Rates at gap `ω01`.
pub fn rates<T: Real>(m1: T, m2: Complex<T>, omega01: T, sd: &SpectralDensity<T>) -> Result<RateSet<T>> {
    check_gap(omega01)?;
    Ok(rates_from_samples(m1, m2, &sd.samples(omega01)?))
}

/// Rates with the spectrum sampled at `ω01 + w_ee − w_gg` (and its negative).
/// Only meaningful once the local gauge of `|g⟩, |e⟩` has been fixed by the
/// caller.
pub fn shifted_rates<T: Real>(
    m1: T,
    m2: Complex<T>,
    omega01: T,
    w_gg: T,
    w_ee: T,
    sd: &SpectralDensity<T>,
) -> Result<RateSet<T>> {
    check_gap(omega01)?;
    Ok(rates_from_samples(m1, m2, &sd.shifted_samples(omega01, w_gg, w_ee)?))
}

/// Coupling elements in the first superadiabatic basis
/// `|g⁽²⁾⟩ = |g⟩ − |e⟩ w_ge*/ω01`, `|e⁽²⁾⟩ = |e⟩ + |g⟩ w_ge/ω01`,
/// to linear order in `w_ge/ω01`:
/// `m1⁽²⁾ = m1 − 2 Re(m2 w_ge*)/ω01`, `m2⁽²⁾ = m2 + 2 m1 w_ge/ω01`.
pub fn superadiabatic_elements<T: Real>(
    m1: T,
    m2: Complex<T>,
    w_ge: Complex<T>,
    omega01: T,
) -> Result<(T, Complex<T>)> {
    check_gap(omega01)?;
    let two = T::two();
    let m1_2 = m1 - two * (m2 * w_ge.conj()).re / omega01;
    let m2_2 = m2 + w_ge * (two * m1 / omega01);
    Ok((m1_2, m2_2))
}
