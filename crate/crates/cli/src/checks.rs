//! Seeded consistency checks run by `adiabat validate`.

use adiabat::dynamics::{drive, rhs_full, rhs_nonsteered, DensityState};
use adiabat::frames::{from_superadiabatic, to_superadiabatic};
use adiabat::{rates, AdiabaticFrame, FrameSource, PathFrames, SpectralDensity};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Scenario;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst value observed against `limit`.
    pub worst: f64,
    pub limit: f64,
    pub detail: String,
}

/// Uniformly random positive state.
fn random_state(rng: &mut impl Rng) -> DensityState<f64> {
    // Bloch vector inside the unit ball.
    let r: f64 = rng.random::<f64>().cbrt();
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    let (x, y, z) = (r * s * phi.cos(), r * s * phi.sin(), r * z);
    DensityState::new(0.5 * (1.0 + z), Complex::new(0.5 * x, -0.5 * y))
}

fn random_time(rng: &mut impl Rng, sc: &Scenario) -> f64 {
    rng.random_range(0.0..=sc.path.duration)
}

fn spectrum_scale(sd: &SpectralDensity<f64>, f: &AdiabaticFrame<f64>) -> f64 {
    let s = |w| sd.eval(w).unwrap_or(0.0).abs();
    1.0 + (f.m1 * f.m1 + f.m2.norm_sqr()) * (s(0.0) + s(f.omega01) + s(-f.omega01))
}

fn check(name: &'static str, limit: f64, samples: usize, mut one: impl FnMut() -> Result<f64, String>) -> CheckResult {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        match one() {
            Ok(v) => worst = worst.max(v),
            Err(e) => {
                return CheckResult {
                    name,
                    passed: false,
                    worst: f64::NAN,
                    limit,
                    detail: e,
                }
            }
        }
    }
    CheckResult {
        name,
        passed: worst <= limit,
        worst,
        limit,
        detail: format!("{samples} samples"),
    }
}

/// Runs every check with `samples` random draws each.
pub fn run_checks(sc: &Scenario, seed: u64, samples: usize) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames = match PathFrames::new(sc.path.clone()) {
        Ok(f) => f,
        Err(e) => {
            return vec![CheckResult {
                name: "frames",
                passed: false,
                worst: f64::NAN,
                limit: 0.0,
                detail: e.to_string(),
            }]
        }
    };
    let sd = &sc.spectrum;
    let mut out = Vec::new();

    out.push(check("initial_state_positive", 1e-12, 1, || {
        Ok(sc.initial.positivity_violation())
    }));

    out.push(check("perturbative_path", 1.0 - 1e-9, samples, || {
        let t = random_time(&mut rng, sc);
        frames.frame(t).map(|f| f.alpha).map_err(|e| e.to_string())
    }));

    out.push(check("nonsteered_reduction", 1e-13, samples, || {
        let t = random_time(&mut rng, sc);
        let s = random_state(&mut rng);
        let f = frames.frame(t).map_err(|e| e.to_string())?;
        let still = AdiabaticFrame::nonsteered(f.omega01, f.m1, f.m2);
        let full = rhs_full(&s, &still, sd).map_err(|e| e.to_string())?;
        let r = rates(f.m1, f.m2, f.omega01, sd).map_err(|e| e.to_string())?;
        Ok(full.distance(&rhs_nonsteered(&s, &r, f.omega01)) / spectrum_scale(sd, &f))
    }));

    out.push(check("steering_conserves_purity", 1e-12, samples, || {
        let t = random_time(&mut rng, sc);
        let s = random_state(&mut rng);
        let f = frames.frame(t).map_err(|e| e.to_string())?;
        let d = drive(&s, &f.w);
        let dp = 2.0 * (s.rho_gg * d.gg - s.rho_ee() * d.gg) + 4.0 * (s.rho_ge.conj() * d.ge).re;
        Ok(dp.abs() / (1.0 + f.w.gg.abs() + f.w.ee.abs() + f.w.ge.norm()))
    }));

    out.push(check("superadiabatic_round_trip", 1.0, samples, || {
        let t = random_time(&mut rng, sc);
        let s = random_state(&mut rng);
        let f = frames.frame(t).map_err(|e| e.to_string())?;
        let s2 = to_superadiabatic(&s, &f).map_err(|e| e.to_string())?;
        let back = from_superadiabatic(&s2, &f).map_err(|e| e.to_string())?;
        let r = (back.rho_gg - s.rho_gg).abs() + (back.rho_ge - s.rho_ge).norm();
        // Ratio to the second-order bound; at most one.
        Ok(r / (4.0 * f.alpha * f.alpha + 1e-13))
    }));

    out.push(check("rates_non_negative", 0.0, samples, || {
        let t = random_time(&mut rng, sc);
        let f = frames.frame(t).map_err(|e| e.to_string())?;
        let r = rates(f.m1, f.m2, f.omega01, sd).map_err(|e| e.to_string())?;
        Ok((-r.gamma_ge).max(-r.gamma_eg).max(-r.gamma_phi).max(0.0))
    }));

    if let SpectralDensity::OhmicThermal { temperature, .. } = *sd {
        out.push(check("detailed_balance", 1e-12, samples, || {
            let t = random_time(&mut rng, sc);
            let f = frames.frame(t).map_err(|e| e.to_string())?;
            if f.m2.norm() < 1e-12 {
                return Ok(0.0);
            }
            let r = rates(f.m1, f.m2, f.omega01, sd).map_err(|e| e.to_string())?;
            let expected = (-f.omega01 / temperature).exp();
            Ok((r.gamma_ge / r.gamma_eg - expected).abs() / expected)
        }));
    }

    out
}
