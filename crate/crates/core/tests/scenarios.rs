use std::f64::consts::{FRAC_PI_3, PI};

use adiabat::control::{ControlPath, FrameSource, PathFrames, SampledField, StaticFrame};
use adiabat::dynamics::{integrate, DensityState, Simulation, SolverConfig, Variant};
use adiabat::frames::{from_superadiabatic, to_superadiabatic};
use adiabat::gauge::{berry_phase, optimal_schedule};
use adiabat::interp::linspace;
use adiabat::{AdiabaticFrame, Op2, SpectralDensity};
use num_complex::Complex;

fn cone(omega: f64) -> ControlPath<f64> {
    ControlPath::rotating_cone(1.0, FRAC_PI_3, omega, Op2::sigma_x())
}

#[test]
fn thermal_fixed_point_after_twenty_relaxation_times() {
    let sd = SpectralDensity::<f64>::ohmic_thermal(0.2, 0.7, 10.0);
    let frames = StaticFrame(AdiabaticFrame::nonsteered(1.2, 0.0, Complex::new(0.0, 1.0)));
    let sim = Simulation::new(&frames, &sd, Variant::NonSteered);
    let (sp, sm) = (sd.eval(1.2).unwrap(), sd.eval(-1.2).unwrap());
    let t1 = 20.0 / (sp + sm);
    let traj = integrate(
        &sim,
        DensityState::new(0.2, Complex::new(0.1, 0.3)),
        &SolverConfig::rk45(0.0, t1),
    )
    .unwrap();
    let expected = sp / (sp + sm);
    let gg = traj.final_state().unwrap().rho_gg;
    assert!((gg - expected).abs() < 1e-6, "{gg} vs {expected}");
}

#[test]
fn sampled_path_reproduces_cone_dynamics() {
    let exact = PathFrames::new(cone(0.1)).unwrap();
    let period = exact.path.duration;
    let times = linspace(0.0, period, 2001);
    let fields = times.iter().map(|&t| exact.path.field(t)).collect();
    let sampled = PathFrames::new(ControlPath::sampled(
        SampledField::new(times, fields).unwrap(),
        Op2::sigma_x(),
    ))
    .unwrap();
    let sd = SpectralDensity::zero_temperature_ohmic(0.1, f64::INFINITY);
    let cfg = SolverConfig::rk45(0.0, period);
    let a = integrate(
        &Simulation::new(&exact, &sd, Variant::Full),
        DensityState::ground(),
        &cfg,
    )
    .unwrap();
    let b = integrate(
        &Simulation::new(&sampled, &sd, Variant::Full),
        DensityState::ground(),
        &cfg,
    )
    .unwrap();
    let (sa, sb) = (a.final_state().unwrap(), b.final_state().unwrap());
    assert!((sa.rho_gg - sb.rho_gg).abs() < 1e-6);
    assert!((sa.rho_ge.norm() - sb.rho_ge.norm()).abs() < 1e-6);
}

#[test]
fn spectral_shift_is_inert_for_flat_spectrum() {
    let frames = PathFrames::new(cone(0.05)).unwrap();
    let sd = SpectralDensity::flat(0.02);
    let cfg = SolverConfig::rk4(0.0, frames.path.duration, 0.05);
    let init = DensityState::new(0.9, Complex::new(0.1, 0.0));
    let a = integrate(&Simulation::new(&frames, &sd, Variant::Full), init, &cfg).unwrap();
    let b = integrate(
        &Simulation::new(&frames, &sd, Variant::Full).spectral_shift(true),
        init,
        &cfg,
    )
    .unwrap();
    assert_eq!(a.to_csv_string(), b.to_csv_string());
}

#[test]
fn oracle_trajectory_tracks_full_trajectory() {
    let sd = SpectralDensity::zero_temperature_ohmic(0.1, f64::INFINITY);
    let mut gaps = Vec::new();
    for omega in [0.04, 0.02] {
        let frames = PathFrames::new(cone(omega)).unwrap();
        let cfg = SolverConfig::rk45(0.0, frames.path.duration);
        let full = integrate(
            &Simulation::new(&frames, &sd, Variant::Full),
            DensityState::ground(),
            &cfg,
        )
        .unwrap();
        let oracle = integrate(
            &Simulation::new(&frames, &sd, Variant::Oracle),
            DensityState::ground(),
            &cfg,
        )
        .unwrap();
        let d = (full.final_state().unwrap().rho_gg - oracle.final_state().unwrap().rho_gg).abs();
        gaps.push(d);
    }
    assert!(gaps[0] < 1e-3, "{gaps:?}");
    assert!(gaps[1] < gaps[0], "{gaps:?}");
}

#[test]
fn berry_phase_is_gauge_independent_and_additive() {
    let path = cone(0.1);
    let frames = PathFrames::new(path.clone()).unwrap();
    let once = berry_phase(&frames.history(1001).unwrap()).unwrap();
    let twice_path = path.clone().with_duration(2.0 * path.duration);
    let twice = berry_phase(&PathFrames::new(twice_path).unwrap().history(2001).unwrap()).unwrap();
    assert!((twice.delta_lambda_g - 2.0 * once.delta_lambda_g).abs() < 1e-10);
    assert!((once.delta_lambda_g.abs() - PI * (1.0 - FRAC_PI_3.cos())).abs() < 1e-10);

    let sched = optimal_schedule(&frames.history(1001).unwrap(), 0.0, 0.0).unwrap();
    let (dg, de) = sched.increments();
    assert!((dg - once.delta_lambda_g).abs() < 1e-12);
    assert!((de - once.delta_lambda_e).abs() < 1e-12);
}

#[test]
fn superadiabatic_round_trip_along_trajectory() {
    let frames = PathFrames::new(cone(0.02)).unwrap();
    let sd = SpectralDensity::zero_temperature_ohmic(0.1, f64::INFINITY);
    let cfg = SolverConfig::rk45(0.0, frames.path.duration).with_stride(20);
    let traj = integrate(
        &Simulation::new(&frames, &sd, Variant::Full),
        DensityState::ground(),
        &cfg,
    )
    .unwrap();
    for s in &traj.samples {
        let f = frames.frame(s.t).unwrap();
        let back = from_superadiabatic(&to_superadiabatic(&s.state, &f).unwrap(), &f).unwrap();
        let r = (back.rho_gg - s.state.rho_gg).abs() + (back.rho_ge - s.state.rho_ge).norm();
        assert!(r <= 4.0 * f.alpha * f.alpha);
    }
}

#[test]
fn single_precision_end_to_end() {
    let path = ControlPath::<f32>::rotating_cone(1.0, 1.0, 0.1, Op2::sigma_x());
    let frames = PathFrames::new(path).unwrap();
    let sd = SpectralDensity::<f32>::zero_temperature_ohmic(0.1, f32::INFINITY);
    let cfg = SolverConfig::rk4(0.0, frames.path.duration, 0.05);
    let traj = integrate(
        &Simulation::new(&frames, &sd, Variant::Full),
        DensityState::ground(),
        &cfg,
    )
    .unwrap();
    let end = traj.final_state().unwrap();
    assert!(end.rho_gg > 0.99 && end.rho_gg <= 1.0 + 1e-5);

    let frames64 = PathFrames::new(ControlPath::rotating_cone(1.0, 1.0, 0.1, Op2::sigma_x())).unwrap();
    let sd64 = SpectralDensity::zero_temperature_ohmic(0.1, f64::INFINITY);
    let cfg64 = SolverConfig::rk4(0.0, frames64.path.duration, 0.05);
    let ref64 = integrate(
        &Simulation::new(&frames64, &sd64, Variant::Full),
        DensityState::ground(),
        &cfg64,
    )
    .unwrap();
    assert!((end.rho_gg as f64 - ref64.final_state().unwrap().rho_gg).abs() < 1e-4);
}

#[test]
fn trajectory_csv_is_deterministic() {
    let frames = PathFrames::new(cone(0.1)).unwrap();
    let sd = SpectralDensity::ohmic_thermal(0.05, 0.3, 8.0);
    let cfg = SolverConfig::rk45(0.0, frames.path.duration);
    let run = || {
        integrate(
            &Simulation::new(&frames, &sd, Variant::Full).optimal_phase(true),
            DensityState::ground(),
            &cfg,
        )
        .unwrap()
        .to_csv_string()
    };
    assert_eq!(run(), run());
    let text = run();
    let mut last = f64::NEG_INFINITY;
    for line in text.lines().skip(1) {
        let t: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert!(t > last);
        last = t;
    }
}
