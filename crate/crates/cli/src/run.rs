//! Run orchestration and output layout.
//!
//! Every run writes `<out>/<timestamp>-<hash>/` holding `metadata.json`,
//! `scenario.toml` and the mode's CSV files. CSV payloads depend only on the
//! scenario; timestamps and wall time live in the metadata alone.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use adiabat::dynamics::{integrate, InvariantSummary, Simulation, Variant};
use adiabat::{berry_phase, ControlPath, Op2, PathFrames, Trajectory64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ModeName, PathSpec, Scenario};
use crate::CliError;

/// Variants written by `compare`.
pub const COMPARE_VARIANTS: [Variant; 3] = [Variant::Full, Variant::Secular, Variant::NonSteered];

pub const BERRY_HEADER: &str = "theta_rad,delta_lambda_g,delta_lambda_e";

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub jobs: usize,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            out: PathBuf::from("runs"),
            jobs: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub dir: PathBuf,
    pub failed: bool,
    /// One line per failed sub-run.
    pub errors: Vec<String>,
}

/// A finished (or partially finished) trajectory.
struct Outcome {
    label: String,
    file: String,
    trajectory: Trajectory64,
    error: Option<String>,
}

impl Outcome {
    fn metadata(&self) -> Value {
        json!({
            "label": self.label,
            "file": self.file,
            "samples": self.trajectory.len(),
            "steps": self.trajectory.steps,
            "rejected_steps": self.trajectory.rejected,
            "invariants": invariants_json(&self.trajectory.invariants()),
            "error": self.error,
        })
    }
}

fn invariants_json(inv: &InvariantSummary) -> Value {
    json!({
        "trace_residual": inv.trace_residual,
        "positivity_max": inv.positivity_max,
        "purity_max": inv.purity_max,
        "alpha_max": inv.alpha_max,
    })
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn trajectory(sc: &Scenario, variant: Variant) -> (Trajectory64, Option<String>) {
    let empty = || Trajectory64 {
        samples: Vec::new(),
        steps: 0,
        rejected: 0,
    };
    let frames = match PathFrames::new(sc.path.clone()) {
        Ok(f) => f,
        Err(e) => return (empty(), Some(e.to_string())),
    };
    let r = &sc.spec.run;
    let sim = Simulation::new(&frames, &sc.spectrum, variant)
        .optimal_phase(r.optimal_phase)
        .spectral_shift(r.spectral_shift)
        .lambda0(r.lambda_g0_rad, r.lambda_e0_rad);
    match integrate(&sim, sc.initial, &sc.solver()) {
        Ok(t) => (t, None),
        Err(f) => (f.partial, Some(f.error.to_string())),
    }
}

fn write_summary(path: &Path, key: &str, rows: &[(String, &Trajectory64)]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    let io_err = |e: csv::Error| CliError::io(path, e);
    w.write_record([key, "final_rho_gg", "max_rho_ee", "max_positivity_violation"])
        .map_err(io_err)?;
    for (label, traj) in rows {
        let final_gg = traj.final_state().map_or(f64::NAN, |s| s.rho_gg);
        let max_ee = if traj.is_empty() {
            f64::NAN
        } else {
            traj.max_excited_population()
        };
        let pos = traj.invariants().positivity_max;
        w.write_record([label.clone(), fmt(final_gg), fmt(max_ee), fmt(pos)])
            .map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Creates `<out>/<timestamp>-<hash12>/`, adding a counter on collision.
pub fn create_run_dir(out: &Path, scenario: &Scenario) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%3fZ");
    let hash = scenario.hash();
    let base = format!("{stamp}-{}", &hash[..12]);
    for n in 0.. {
        let name = if n == 0 { base.clone() } else { format!("{base}-{n}") };
        let dir = out.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(CliError::io(&dir, e)),
        }
    }
    unreachable!()
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))
}

/// Runs `scenario` in its configured mode.
pub fn execute(scenario: &Scenario, opts: &RunOptions) -> Result<RunReport, CliError> {
    let started = chrono::Utc::now();
    let clock = Instant::now();
    let dir = create_run_dir(&opts.out, scenario)?;
    let mode = scenario.mode();
    write_file(&dir.join("scenario.toml"), scenario.canonical().as_bytes())?;

    let mut errors = Vec::new();
    let mut details = serde_json::Map::new();

    match mode {
        ModeName::Simulate | ModeName::Compare | ModeName::Sweep => {
            let jobs: Vec<(String, String, Scenario, Variant)> = match mode {
                ModeName::Simulate => vec![(
                    scenario.variant().name().to_string(),
                    "trajectory.csv".to_string(),
                    scenario.clone(),
                    scenario.variant(),
                )],
                ModeName::Compare => COMPARE_VARIANTS
                    .iter()
                    .map(|v| {
                        (
                            v.name().to_string(),
                            format!("trajectory_{}.csv", v.name()),
                            scenario.clone(),
                            *v,
                        )
                    })
                    .collect(),
                _ => scenario
                    .sub_scenarios()
                    .into_iter()
                    .enumerate()
                    .map(|(i, (period, sub))| {
                        (
                            fmt(period),
                            format!("trajectory_period_{i:03}.csv"),
                            sub,
                            scenario.variant(),
                        )
                    })
                    .collect(),
            };
            let outcomes: Vec<Outcome> = pool(opts.jobs)?.install(|| {
                jobs.into_par_iter()
                    .map(|(label, file, sc, variant)| {
                        let (trajectory, error) = trajectory(&sc, variant);
                        Outcome {
                            label,
                            file,
                            trajectory,
                            error,
                        }
                    })
                    .collect()
            });

            let mut total = InvariantSummary::default();
            for o in &outcomes {
                write_file(&dir.join(&o.file), o.trajectory.to_csv_string().as_bytes())?;
                let inv = o.trajectory.invariants();
                total.trace_residual = total.trace_residual.max(inv.trace_residual);
                total.positivity_max = total.positivity_max.max(inv.positivity_max);
                total.purity_max = total.purity_max.max(inv.purity_max);
                total.alpha_max = total.alpha_max.max(inv.alpha_max);
                if let Some(e) = &o.error {
                    errors.push(format!("{}: {e}", o.label));
                }
            }
            if mode != ModeName::Simulate {
                let key = if mode == ModeName::Sweep { "period" } else { "variant" };
                let rows: Vec<_> = outcomes.iter().map(|o| (o.label.clone(), &o.trajectory)).collect();
                write_summary(&dir.join("summary.csv"), key, &rows)?;
            }
            details.insert("invariants".into(), invariants_json(&total));
            details.insert(
                "trajectories".into(),
                Value::Array(outcomes.iter().map(Outcome::metadata).collect()),
            );
        }
        ModeName::Berry => {
            let rows = berry_rows(scenario, opts.jobs)?;
            let mut text = format!("{BERRY_HEADER}\n");
            let mut entries = Vec::new();
            for (theta, res) in &rows {
                match res {
                    Ok((g, e)) => {
                        text.push_str(&format!("{},{},{}\n", fmt(*theta), fmt(*g), fmt(*e)));
                        entries.push(json!({"theta_rad": theta, "error": null}));
                    }
                    Err(msg) => {
                        errors.push(format!("theta {theta}: {msg}"));
                        entries.push(json!({"theta_rad": theta, "error": msg}));
                    }
                }
            }
            write_file(&dir.join("berry.csv"), text.as_bytes())?;
            details.insert("angles".into(), Value::Array(entries));
        }
    }

    let failed = !errors.is_empty();
    let mut meta = json!({
        "tool": "adiabat",
        "version": env!("CARGO_PKG_VERSION"),
        "mode": mode.as_str(),
        "scenario_hash": scenario.hash(),
        "scenario": serde_json::to_value(&scenario.spec).unwrap_or(Value::Null),
        "scenario_toml": scenario.canonical(),
        "started_utc": started.to_rfc3339(),
        "wall_time_s": clock.elapsed().as_secs_f64(),
        "jobs": opts.jobs,
        "failed": failed,
        "errors": errors,
    });
    if let Value::Object(m) = &mut meta {
        m.extend(details);
    }
    let text = serde_json::to_string_pretty(&meta).expect("metadata serialises");
    write_file(&dir.join("metadata.json"), text.as_bytes())?;

    Ok(RunReport { dir, failed, errors })
}

type BerryRow = (f64, Result<(f64, f64), String>);

fn berry_rows(scenario: &Scenario, jobs: usize) -> Result<Vec<BerryRow>, CliError> {
    let PathSpec::RotatingCone {
        field_magnitude,
        omega_rad_per_time,
        ..
    } = scenario.spec.path
    else {
        return Err(CliError::Runtime("berry mode needs a rotating cone path".into()));
    };
    let berry = scenario
        .spec
        .berry
        .clone()
        .ok_or_else(|| CliError::Runtime("berry mode needs a [berry] table".into()))?;
    let coupling: Op2<f64> = scenario.path.coupling;
    Ok(pool(jobs)?.install(|| {
        berry
            .cone_angles_rad
            .par_iter()
            .map(|&theta| {
                let path = ControlPath::rotating_cone(field_magnitude, theta, omega_rad_per_time, coupling);
                let res = PathFrames::new(path)
                    .and_then(|f| f.history(berry.samples))
                    .and_then(|h| berry_phase(&h))
                    .map(|b| (b.delta_lambda_g, b.delta_lambda_e))
                    .map_err(|e| e.to_string());
                (theta, res)
            })
            .collect()
    }))
}
