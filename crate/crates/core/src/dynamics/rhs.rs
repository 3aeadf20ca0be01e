use num_complex::Complex;

use super::{DensityState, Derivative};
use crate::bath::{rates_from_samples, superadiabatic_elements, RateSet, SpectralDensity, SpectrumSamples};
use crate::control::AdiabaticFrame;
use crate::error::Result;
use crate::frames::to_superadiabatic;
use crate::gauge::WElements;
use crate::scalar::Real;

/// Born–Markov equation of a two-level system with fixed eigenbasis,
/// Schrödinger picture.
pub fn rhs_nonsteered<T: Real>(s: &DensityState<T>, r: &RateSet<T>, omega01: T) -> Derivative<T> {
    let i = Complex::<T>::i();
    let half = T::half();
    let gg = -(r.gamma_ge + r.gamma_eg) * s.rho_gg + (r.gamma_tilde0 * s.rho_ge).re + r.gamma_eg;
    let ge = i * s.rho_ge * omega01
        - (r.gamma_tilde_plus + r.gamma_tilde_minus) * s.rho_gg
        - s.rho_ge * ((r.gamma_eg + r.gamma_ge) * half + r.gamma_phi)
        + (r.gamma_alpha + r.gamma_beta) * s.rho_ge.conj()
        + r.gamma_tilde_plus;
    Derivative { gg, ge }
}

/// Coherent part generated by steering, `−i[ŵ, ρ]`.
pub fn drive<T: Real>(s: &DensityState<T>, w: &WElements<T>) -> Derivative<T> {
    let i = Complex::<T>::i();
    let two = T::two();
    Derivative {
        gg: -two * (w.ge.conj() * s.rho_ge).im,
        ge: i * w.ge * (two * s.rho_gg - T::one()) + i * s.rho_ge * (w.ee - w.gg),
    }
}

/// Full steered master equation to linear order in `α`, with the spectrum
/// already sampled at `0` and `±ω01`.
pub fn rhs_full_with_samples<T: Real>(
    s: &DensityState<T>,
    f: &AdiabaticFrame<T>,
    sp: &SpectrumSamples<T>,
) -> Derivative<T> {
    let i = Complex::<T>::i();
    let two = T::two();
    let (om, m1, m2, w) = (f.omega01, f.m1, f.m2, f.w.ge);
    let rho = s.rho_ge;
    let (s0, s_p, s_m) = (sp.zero, sp.plus, sp.minus);
    let d1 = (two * s0 - s_m - s_p) / om;
    let d2 = (s0 - s_p) / om;
    let d3 = (s_m - s_p) / om;
    // Re(m2* x)
    let proj = |x: Complex<T>| (m2.conj() * x).re;
    let (pw, prho) = (proj(w), proj(rho));
    let m2_sq = m2.norm_sqr();
    let s_sum = s_m + s_p;

    let coherent = drive(s, &f.w);

    let gg = s_p * m2_sq - s_sum * m2_sq * s.rho_gg + two * prho * s0 * m1 - two * d1 * pw * prho
        + two * d1 * pw * m1 * s.rho_gg
        - two * d2 * m1 * pw;

    let m1m2 = m2 * m1;
    let ge = i * rho * om - m1m2 * s_p + m1m2 * (s_sum * s.rho_gg)
        - rho * (two * s0 * m1 * m1)
        - i * m2 * (s_sum * (rho.im * m2.re - m2.im * rho.re))
        - w * (two * d1 * m1 * m1 * s.rho_gg)
        + w * (two * d2 * m1 * m1)
        - i * m2 * (d3 * (m2.im * w.re - w.im * m2.re))
        - (i * m2 * (w.im * rho.re - rho.im * w.re) - rho * pw) * (two * d1 * m1);

    coherent + Derivative { gg, ge }
}

/// [`rhs_full_with_samples`] with the spectrum sampled at the frame's gap.
pub fn rhs_full<T: Real>(s: &DensityState<T>, f: &AdiabaticFrame<T>, sd: &SpectralDensity<T>) -> Result<Derivative<T>> {
    f.require_perturbative()?;
    Ok(rhs_full_with_samples(s, f, &sd.samples(f.omega01)?))
}

/// Secular baseline: populations exchange through `Γ_ge, Γ_eg` only and
/// coherences decay at `(Γ_ge + Γ_eg)/2 + Γ_φ`.
pub fn rhs_secular<T: Real>(s: &DensityState<T>, r: &RateSet<T>, omega01: T) -> Derivative<T> {
    let i = Complex::<T>::i();
    let gg = -(r.gamma_ge + r.gamma_eg) * s.rho_gg + r.gamma_eg;
    let decay = (r.gamma_ge + r.gamma_eg) * T::half() + r.gamma_phi;
    let ge = i * s.rho_ge * omega01 - s.rho_ge * decay;
    Derivative { gg, ge }
}

/// Steered secular model: the coherent steering term plus the secular
/// dissipator in the adiabatic basis.
pub fn rhs_secular_steered<T: Real>(
    s: &DensityState<T>,
    f: &AdiabaticFrame<T>,
    sp: &SpectrumSamples<T>,
) -> Derivative<T> {
    drive(s, &f.w) + rhs_secular(s, &rates_from_samples(f.m1, f.m2, sp), f.omega01)
}

/// Non-steered equation in the superadiabatic basis: corrected coupling
/// elements and gap `ω01 + w_ee − w_gg`. The spectrum stays sampled at the
/// adiabatic gap; `s2` holds superadiabatic components.
pub fn rhs_superadiabatic_oracle<T: Real>(
    s2: &DensityState<T>,
    f: &AdiabaticFrame<T>,
    sd: &SpectralDensity<T>,
) -> Result<Derivative<T>> {
    f.require_perturbative()?;
    oracle_with_samples(s2, f, &sd.samples(f.omega01)?)
}

pub(super) fn oracle_with_samples<T: Real>(
    s2: &DensityState<T>,
    f: &AdiabaticFrame<T>,
    sp: &SpectrumSamples<T>,
) -> Result<Derivative<T>> {
    let (m1_2, m2_2) = superadiabatic_elements(f.m1, f.m2, f.w.ge, f.omega01)?;
    let r = rates_from_samples(m1_2, m2_2, sp);
    Ok(rhs_nonsteered(s2, &r, f.omega01 + (f.w.ee - f.w.gg)))
}

/// Maps a superadiabatic-component derivative back to adiabatic components
/// through the linearised inverse basis map, with the frame held fixed.
pub fn pullback_derivative<T: Real>(d2: &Derivative<T>, f: &AdiabaticFrame<T>) -> Derivative<T> {
    let r = f.w.ge / f.omega01;
    let two = T::two();
    Derivative {
        gg: d2.gg + two * (r.conj() * d2.ge).re,
        ge: d2.ge - r * (two * d2.gg),
    }
}

/// Adiabatic-component derivative predicted by the superadiabatic oracle.
pub fn oracle_derivative<T: Real>(
    s: &DensityState<T>,
    f: &AdiabaticFrame<T>,
    sd: &SpectralDensity<T>,
) -> Result<Derivative<T>> {
    let s2 = to_superadiabatic(s, f)?;
    Ok(pullback_derivative(&rhs_superadiabatic_oracle(&s2, f, sd)?, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::rates;
    use crate::control::{ControlPath, FrameSource, PathFrames};
    use crate::qubit::Op2;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_3;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn st(gg: f64, ge: Complex<f64>) -> DensityState<f64> {
        DensityState::new(gg, ge)
    }

    fn zero_rates() -> RateSet<f64> {
        rates_from_samples(0.0, c(0.0, 0.0), &SpectrumSamples::zeros())
    }

    fn two_point(plus: f64, minus: f64) -> SpectralDensity<f64> {
        SpectralDensity::tabulated(vec![-1.0, 0.0, 1.0], vec![minus, 0.5 * (plus + minus), plus]).unwrap()
    }

    #[test]
    fn nonsteered_examples() {
        let d = rhs_nonsteered(&st(0.4, c(1.0, 0.0)), &zero_rates(), 1.7);
        assert_eq!(d.gg, 0.0);
        assert_eq!(d.ge, c(0.0, 1.7));

        let r = rates(0.0, c(1.0, 0.0), 1.0, &SpectralDensity::flat(1.0)).unwrap();
        let d = rhs_nonsteered(&st(2.0 / 3.0, c(0.0, 0.0)), &r, 1.0);
        assert!((d.gg + 1.0 / 3.0).abs() < 1e-15);
    }

    /// Solves the real 3×3 affine system `d(x) = 0` for `x = (ρ_gg, Re ρ_ge, Im ρ_ge)`.
    fn fixed_point(f: impl Fn(&DensityState<f64>) -> Derivative<f64>) -> [f64; 3] {
        let eval = |x: [f64; 3]| {
            let d = f(&st(x[0], c(x[1], x[2])));
            [d.gg, d.ge.re, d.ge.im]
        };
        let b = eval([0.0; 3]);
        let mut m = [[0.0; 4]; 3];
        for j in 0..3 {
            let mut e = [0.0; 3];
            e[j] = 1.0;
            let col = eval(e);
            for i in 0..3 {
                m[i][j] = col[i] - b[i];
            }
        }
        for i in 0..3 {
            m[i][3] = -b[i];
        }
        // Gauss–Jordan with partial pivoting
        for k in 0..3 {
            let p = (k..3).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs())).unwrap();
            m.swap(k, p);
            for i in 0..3 {
                if i != k {
                    let f = m[i][k] / m[k][k];
                    let rk = m[k];
                    for (x, y) in m[i][k..].iter_mut().zip(&rk[k..]) {
                        *x -= f * y;
                    }
                }
            }
        }
        [m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]]
    }

    #[test]
    fn nonsteered_thermal_fixed_point() {
        let r = rates(0.0, c(1.0, 0.0), 1.0, &two_point(2.0, 1.0)).unwrap();
        let x = fixed_point(|s| rhs_nonsteered(s, &r, 1.0));
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!(x[1].abs() < 1e-14 && x[2].abs() < 1e-14);
        let d = rhs_nonsteered(&st(2.0 / 3.0, c(0.0, 0.0)), &r, 1.0);
        assert!(d.gg.abs() < 1e-15 && d.ge.norm() < 1e-15);
    }

    #[test]
    fn full_unitary_example() {
        let f = AdiabaticFrame::from_elements(
            0.0,
            1.0,
            WElements {
                gg: 0.0,
                ee: 0.0,
                ge: c(0.0, 0.05),
            },
            0.3,
            c(0.2, 0.1),
        )
        .unwrap();
        let d = rhs_full(&st(1.0, c(0.0, 0.0)), &f, &SpectralDensity::flat(0.0)).unwrap();
        assert_eq!(d.gg, 0.0);
        assert!((d.ge - c(-0.05, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn full_without_bath_is_drive_plus_precession() {
        let w = WElements {
            gg: -0.02,
            ee: 0.03,
            ge: c(0.04, -0.01),
        };
        let f = AdiabaticFrame::from_elements(0.0, 1.3, w, 0.4, c(0.3, -0.6)).unwrap();
        let s = st(0.7, c(0.1, 0.2));
        let d = rhs_full(&s, &f, &SpectralDensity::flat(0.0)).unwrap();
        let mut expect = drive(&s, &w);
        expect.ge += Complex::<f64>::i() * s.rho_ge * 1.3;
        assert!(d.distance(&expect) < 1e-16);
    }

    #[test]
    fn secular_examples() {
        let r = rates(0.0, c(1.0, 0.0), 1.0, &SpectralDensity::flat(1.0)).unwrap();
        let d = rhs_secular(&st(1.0, c(0.0, 0.0)), &r, 1.0);
        assert_eq!(d.gg, -1.0);
        let r = rates(0.5, c(0.3, 0.4), 1.0, &SpectralDensity::ohmic_thermal(0.2, 0.7, 5.0)).unwrap();
        let d = rhs_secular(&st(0.5, c(1.0, 0.0)), &r, 0.0);
        assert!((d.ge.re + (r.gamma_ge + r.gamma_eg) / 2.0 + r.gamma_phi).abs() < 1e-15);
    }

    #[test]
    fn oracle_limits() {
        let sd = SpectralDensity::ohmic_thermal(0.2, 0.8, 6.0);
        let f = AdiabaticFrame::nonsteered(1.1, 0.3, c(0.5, -0.2));
        let s = st(0.6, c(0.1, 0.3));
        let r = rates(0.3, c(0.5, -0.2), 1.1, &sd).unwrap();
        assert_eq!(
            rhs_superadiabatic_oracle(&s, &f, &sd).unwrap(),
            rhs_nonsteered(&s, &r, 1.1)
        );

        let w = WElements {
            gg: 0.01,
            ee: -0.02,
            ge: c(0.03, 0.01),
        };
        let f = AdiabaticFrame::from_elements(0.0, 1.0, w, 0.3, c(0.5, 0.0)).unwrap();
        let d = rhs_superadiabatic_oracle(&s, &f, &SpectralDensity::flat(0.0)).unwrap();
        assert_eq!(d.gg, 0.0);
        assert!((d.ge - Complex::<f64>::i() * s.rho_ge * 0.97).norm() < 1e-16);
    }

    fn cone_residual(omega: f64) -> (f64, f64) {
        let path = ControlPath::rotating_cone(1.0, FRAC_PI_3, omega, Op2::sigma_x());
        let frames = PathFrames::new(path).unwrap();
        let sd = SpectralDensity::zero_temperature_ohmic(0.1, f64::INFINITY);
        let states = [st(1.0, c(0.0, 0.0)), st(0.6, c(0.2, -0.1)), st(0.3, c(-0.1, 0.35))];
        let mut worst: f64 = 0.0;
        let mut alpha: f64 = 0.0;
        for k in 0..8 {
            let f = frames.frame(frames.path.duration * k as f64 / 8.0).unwrap();
            alpha = alpha.max(f.alpha);
            for s in &states {
                let a = rhs_full(s, &f, &sd).unwrap();
                let b = oracle_derivative(s, &f, &sd).unwrap();
                worst = worst.max(a.distance(&b));
            }
        }
        (worst, alpha)
    }

    #[test]
    fn full_matches_oracle_to_second_order() {
        let (r1, a1) = cone_residual(0.04);
        let (r2, _) = cone_residual(0.02);
        let (r3, _) = cone_residual(0.01);
        assert!(a1 < 0.05);
        for (hi, lo) in [(r1, r2), (r2, r3)] {
            assert!(hi / lo > 3.5, "ratio {}", hi / lo);
        }
    }

    #[test]
    fn secular_and_full_differ_when_steered() {
        let path = ControlPath::rotating_cone(1.0, FRAC_PI_3, 0.02, Op2::sigma_x());
        let f = PathFrames::new(path).unwrap().frame(3.0).unwrap();
        let sd = SpectralDensity::zero_temperature_ohmic(0.1, f64::INFINITY);
        let sp = sd.samples(f.omega01).unwrap();
        let s = st(0.9, c(0.05, 0.02));
        let full = rhs_full_with_samples(&s, &f, &sp);
        let sec = rhs_secular_steered(&s, &f, &sp);
        assert!(full.distance(&sec) > 1e-4);
    }

    fn arb_frame(w_scale: f64) -> impl Strategy<Value = AdiabaticFrame<f64>> {
        (
            0.2f64..3.0,
            -1.0f64..1.0,
            -1.0f64..1.0,
            -1.0f64..1.0,
            prop::array::uniform4(-1.0f64..1.0),
        )
            .prop_map(move |(om, m1, a, b, w)| {
                let we = WElements {
                    gg: w[0] * w_scale,
                    ee: w[1] * w_scale,
                    ge: c(w[2], w[3]) * w_scale,
                };
                AdiabaticFrame::from_elements(0.0, om, we, m1, c(a, b)).unwrap()
            })
    }

    fn arb_state() -> impl Strategy<Value = DensityState<f64>> {
        (0.0f64..1.0, -0.5f64..0.5, -0.5f64..0.5).prop_map(|(g, a, b)| st(g, c(a, b)))
    }

    fn arb_samples() -> impl Strategy<Value = SpectrumSamples<f64>> {
        (0.0f64..2.0, 0.0f64..2.0, 0.0f64..2.0).prop_map(|(zero, plus, minus)| SpectrumSamples { zero, plus, minus })
    }

    proptest! {
        #[test]
        fn full_reduces_to_nonsteered(f in arb_frame(0.0), s in arb_state(), sp in arb_samples()) {
            let a = rhs_full_with_samples(&s, &f, &sp);
            let b = rhs_nonsteered(&s, &rates_from_samples(f.m1, f.m2, &sp), f.omega01);
            prop_assert!(a.distance(&b) < 1e-14);
        }

        #[test]
        fn full_is_phase_covariant(f in arb_frame(0.05), s in arb_state(), sp in arb_samples(), chi in -3.0f64..3.0) {
            let rot = Complex::from_polar(1.0, chi);
            let mut g = f;
            g.w.ge *= rot;
            g.m2 *= rot;
            let sr = st(s.rho_gg, s.rho_ge * rot);
            let a = rhs_full_with_samples(&s, &f, &sp);
            let b = rhs_full_with_samples(&sr, &g, &sp);
            prop_assert!((a.gg - b.gg).abs() < 1e-13);
            prop_assert!((a.ge * rot - b.ge).norm() < 1e-13);
        }

        #[test]
        fn unitary_limit_conserves_purity(f in arb_frame(0.1), s in arb_state()) {
            let d = rhs_full_with_samples(&s, &f, &SpectrumSamples::zeros());
            // d(Tr ρ²)/dt = 2ρ_gg ρ̇_gg − 2ρ_ee ρ̇_gg + 4 Re(ρ_ge* ρ̇_ge)
            let dp = 2.0 * d.gg * (2.0 * s.rho_gg - 1.0) + 4.0 * (s.rho_ge.conj() * d.ge).re;
            prop_assert!(dp.abs() < 1e-14);
        }
    }
}
