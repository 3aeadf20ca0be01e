//! Scenario files.
//!
//! A scenario is a TOML document. Keys carry their units in the name
//! (`omega_rad_per_time`, `duration_time`, `temperature_energy`, ...), with
//! `ħ = k_B = 1`.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use adiabat::control::{ControlPath, SampledField};
use adiabat::dynamics::{DensityState, Method, SolverConfig, Variant};
use adiabat::{Op2, SpectralDensity};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

fn one() -> f64 {
    1.0
}

fn infinite() -> f64 {
    f64::INFINITY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    /// Field of magnitude `field_magnitude` precessing on a cone of
    /// half-angle `cone_angle_rad` about z.
    RotatingCone {
        field_magnitude: f64,
        cone_angle_rad: f64,
        omega_rad_per_time: f64,
        #[serde(default = "one")]
        cycles: f64,
    },
    /// `b = (gap, 0, slope (t − duration/2))`.
    LinearSweep {
        slope_per_time: f64,
        gap: f64,
        duration_time: f64,
    },
    /// Field samples `[bx, by, bz]` at `times_time`, interpolated by cubic
    /// splines. `csv_file` names a `t,bx,by,bz` table instead.
    Sampled {
        #[serde(default)]
        times_time: Vec<f64>,
        #[serde(default)]
        field: Vec<[f64; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv_file: Option<PathBuf>,
    },
}

/// Coupling operator `A = a0 I + ax σx + ay σy + az σz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    #[serde(default)]
    pub identity: f64,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default)]
    pub z: f64,
}

impl Default for CouplingSpec {
    fn default() -> Self {
        Self {
            identity: 0.0,
            x: 1.0,
            y: 0.0,
            z: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BathSpec {
    Flat {
        s0: f64,
    },
    OhmicThermal {
        eta: f64,
        temperature_energy: f64,
        #[serde(default = "infinite")]
        cutoff_rad_per_time: f64,
    },
    ZeroTemperatureOhmic {
        eta: f64,
        #[serde(default = "infinite")]
        cutoff_rad_per_time: f64,
    },
    /// Linear interpolation of `density` on `omega_rad_per_time`, or of an
    /// `omega,density` table in `csv_file`.
    Tabulated {
        #[serde(default)]
        omega_rad_per_time: Vec<f64>,
        #[serde(default)]
        density: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv_file: Option<PathBuf>,
    },
}

/// Initial state in the adiabatic basis at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default = "one")]
    pub rho_gg: f64,
    #[serde(default)]
    pub re_rho_ge: f64,
    #[serde(default)]
    pub im_rho_ge: f64,
}

impl Default for InitialSpec {
    fn default() -> Self {
        Self {
            rho_gg: 1.0,
            re_rho_ge: 0.0,
            im_rho_ge: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Rk4,
    Rk45,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "SolverSpec::default_method")]
    pub method: MethodName,
    #[serde(default = "SolverSpec::default_rtol")]
    pub rtol: f64,
    #[serde(default = "SolverSpec::default_atol")]
    pub atol: f64,
    /// Largest adaptive step; defaults to the run length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max_time: Option<f64>,
    /// Fixed RK4 step.
    #[serde(default = "SolverSpec::default_dt")]
    pub dt_time: f64,
    #[serde(default = "SolverSpec::default_stride")]
    pub record_stride: usize,
}

impl SolverSpec {
    fn default_method() -> MethodName {
        MethodName::Rk45
    }
    fn default_rtol() -> f64 {
        1e-9
    }
    fn default_atol() -> f64 {
        1e-12
    }
    fn default_dt() -> f64 {
        0.01
    }
    fn default_stride() -> usize {
        1
    }
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            method: Self::default_method(),
            rtol: Self::default_rtol(),
            atol: Self::default_atol(),
            dt_max_time: None,
            dt_time: Self::default_dt(),
            record_stride: Self::default_stride(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Simulate,
    Sweep,
    Compare,
    Berry,
}

impl ModeName {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeName::Simulate => "simulate",
            ModeName::Sweep => "sweep",
            ModeName::Compare => "compare",
            ModeName::Berry => "berry",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantName {
    Full,
    Secular,
    Nonsteered,
    Oracle,
}

impl From<VariantName> for Variant {
    fn from(v: VariantName) -> Self {
        match v {
            VariantName::Full => Variant::Full,
            VariantName::Secular => Variant::Secular,
            VariantName::Nonsteered => Variant::NonSteered,
            VariantName::Oracle => Variant::Oracle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default = "RunSpec::default_mode")]
    pub mode: ModeName,
    #[serde(default = "RunSpec::default_variant")]
    pub variant: VariantName,
    #[serde(default)]
    pub optimal_phase: bool,
    #[serde(default)]
    pub spectral_shift: bool,
    #[serde(default)]
    pub lambda_g0_rad: f64,
    #[serde(default)]
    pub lambda_e0_rad: f64,
}

impl RunSpec {
    fn default_mode() -> ModeName {
        ModeName::Simulate
    }
    fn default_variant() -> VariantName {
        VariantName::Full
    }
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            mode: Self::default_mode(),
            variant: Self::default_variant(),
            optimal_phase: false,
            spectral_shift: false,
            lambda_g0_rad: 0.0,
            lambda_e0_rad: 0.0,
        }
    }
}

/// Drive periods for `sweep`; each one stretches the path in time so that
/// one cycle lasts `period`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub periods_time: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerrySpec {
    pub cone_angles_rad: Vec<f64>,
    #[serde(default = "BerrySpec::default_samples")]
    pub samples: usize,
}

impl BerrySpec {
    fn default_samples() -> usize {
        2001
    }
}

/// Parsed scenario file; every field is echoed into run metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default)]
    pub run: RunSpec,
    pub path: PathSpec,
    #[serde(default)]
    pub coupling: CouplingSpec,
    pub bath: BathSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub berry: Option<BerrySpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse(String),
    /// Every problem found, each naming its key.
    Validation(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(msg) => write!(f, "cannot parse scenario: {msg}"),
            ConfigError::Validation(errs) => {
                write!(
                    f,
                    "invalid scenario ({} problem{}):",
                    errs.len(),
                    if errs.len() == 1 { "" } else { "s" }
                )?;
                for e in errs {
                    write!(f, "\n  - {e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// A validated scenario with its core objects built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub path: ControlPath<f64>,
    pub spectrum: SpectralDensity<f64>,
    pub initial: DensityState<f64>,
}

/// Parses and validates a scenario. Relative `csv_file` entries resolve
/// against the working directory.
pub fn load_scenario(text: &str) -> Result<Scenario, ConfigError> {
    load_scenario_in(text, Path::new("."))
}

/// Reads, parses and validates a scenario file; relative `csv_file` entries
/// resolve against its directory.
pub fn load_scenario_file(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
    load_scenario_in(&text, path.parent().unwrap_or(Path::new(".")))
}

fn load_scenario_in(text: &str, base: &Path) -> Result<Scenario, ConfigError> {
    let mut spec: ScenarioSpec = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let mut errs = Vec::new();
    spec.inline_tables(base, &mut errs);
    if !errs.is_empty() {
        return Err(ConfigError::Validation(errs));
    }
    Scenario::from_spec(spec)
}

/// Numeric rows of a headered CSV file, each with exactly `width` columns.
fn read_table(path: &Path, width: usize) -> Result<Vec<Vec<f64>>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        if rec.len() != width {
            return Err(format!(
                "{} row {}: expected {width} columns, got {}",
                path.display(),
                i + 1,
                rec.len()
            ));
        }
        let row = rec
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("{} row {}: {e}", path.display(), i + 1))?;
        rows.push(row);
    }
    Ok(rows)
}

impl ScenarioSpec {
    /// Replaces `csv_file` references by the tables they hold, so the
    /// canonical form and hash cover the data itself.
    fn inline_tables(&mut self, base: &Path, errs: &mut Vec<String>) {
        if let PathSpec::Sampled {
            times_time,
            field,
            csv_file,
        } = &mut self.path
        {
            if let Some(file) = csv_file.take() {
                if !times_time.is_empty() || !field.is_empty() {
                    errs.push("path.csv_file cannot be combined with path.times_time or path.field".into());
                }
                match read_table(&base.join(&file), 4) {
                    Ok(rows) => {
                        *times_time = rows.iter().map(|r| r[0]).collect();
                        *field = rows.iter().map(|r| [r[1], r[2], r[3]]).collect();
                    }
                    Err(e) => errs.push(format!("path.csv_file: {e}")),
                }
            }
        }
        if let BathSpec::Tabulated {
            omega_rad_per_time,
            density,
            csv_file,
        } = &mut self.bath
        {
            if let Some(file) = csv_file.take() {
                if !omega_rad_per_time.is_empty() || !density.is_empty() {
                    errs.push("bath.csv_file cannot be combined with bath.omega_rad_per_time or bath.density".into());
                }
                match read_table(&base.join(&file), 2) {
                    Ok(rows) => {
                        *omega_rad_per_time = rows.iter().map(|r| r[0]).collect();
                        *density = rows.iter().map(|r| r[1]).collect();
                    }
                    Err(e) => errs.push(format!("bath.csv_file: {e}")),
                }
            }
        }
    }
}

fn finite(errs: &mut Vec<String>, key: &str, v: f64) -> bool {
    if v.is_finite() {
        true
    } else {
        errs.push(format!("{key} must be finite, got {v}"));
        false
    }
}

fn positive(errs: &mut Vec<String>, key: &str, v: f64) {
    if !(v > 0.0) || !v.is_finite() {
        errs.push(format!("{key} must be positive and finite, got {v}"));
    }
}

fn non_negative(errs: &mut Vec<String>, key: &str, v: f64) {
    if !(v >= 0.0) || !v.is_finite() {
        errs.push(format!("{key} must be non-negative and finite, got {v}"));
    }
}

fn cutoff(errs: &mut Vec<String>, v: f64) {
    if !(v > 0.0) {
        errs.push(format!(
            "bath.cutoff_rad_per_time must be positive (inf allowed), got {v}"
        ));
    }
}

impl PathSpec {
    fn check(&self, errs: &mut Vec<String>) {
        match self {
            PathSpec::RotatingCone {
                field_magnitude,
                cone_angle_rad,
                omega_rad_per_time,
                cycles,
            } => {
                positive(errs, "path.field_magnitude", *field_magnitude);
                if finite(errs, "path.cone_angle_rad", *cone_angle_rad) && !(0.0..=PI).contains(cone_angle_rad) {
                    errs.push(format!("path.cone_angle_rad must lie in [0, pi], got {cone_angle_rad}"));
                }
                positive(errs, "path.omega_rad_per_time", *omega_rad_per_time);
                positive(errs, "path.cycles", *cycles);
            }
            PathSpec::LinearSweep {
                slope_per_time,
                gap,
                duration_time,
            } => {
                finite(errs, "path.slope_per_time", *slope_per_time);
                positive(errs, "path.gap", *gap);
                positive(errs, "path.duration_time", *duration_time);
            }
            PathSpec::Sampled { times_time, field, .. } => {
                if times_time.len() != field.len() {
                    errs.push(format!(
                        "path.times_time has {} entries but path.field has {}",
                        times_time.len(),
                        field.len()
                    ));
                }
                if times_time.len() < 4 {
                    errs.push("path.times_time needs at least 4 samples".into());
                }
                if times_time.windows(2).any(|w| !(w[1] > w[0])) {
                    errs.push("path.times_time must be strictly increasing".into());
                }
                if field.iter().flatten().any(|v| !v.is_finite()) {
                    errs.push("path.field entries must be finite".into());
                }
            }
        }
    }

    fn build(&self, coupling: Op2<f64>) -> Result<ControlPath<f64>, String> {
        Ok(match self {
            PathSpec::RotatingCone {
                field_magnitude,
                cone_angle_rad,
                omega_rad_per_time,
                cycles,
            } => {
                let p = ControlPath::rotating_cone(*field_magnitude, *cone_angle_rad, *omega_rad_per_time, coupling);
                let d = p.duration * cycles;
                p.with_duration(d)
            }
            PathSpec::LinearSweep {
                slope_per_time,
                gap,
                duration_time,
            } => ControlPath::linear_sweep(*slope_per_time, *gap, *duration_time, coupling),
            PathSpec::Sampled { times_time, field, .. } => {
                let sf = SampledField::new(times_time.clone(), field.clone()).map_err(|e| format!("path: {e}"))?;
                ControlPath::sampled(sf, coupling)
            }
        })
    }

    /// Duration of one drive cycle.
    pub fn base_period(&self) -> f64 {
        match self {
            PathSpec::RotatingCone { omega_rad_per_time, .. } => 2.0 * PI / omega_rad_per_time,
            PathSpec::LinearSweep { duration_time, .. } => *duration_time,
            PathSpec::Sampled { times_time, .. } => {
                times_time.last().unwrap_or(&0.0) - times_time.first().unwrap_or(&0.0)
            }
        }
    }

    /// Same path with one cycle lasting `period`.
    pub fn with_period(&self, period: f64) -> PathSpec {
        let k = period / self.base_period();
        match self.clone() {
            PathSpec::RotatingCone {
                field_magnitude,
                cone_angle_rad,
                cycles,
                ..
            } => PathSpec::RotatingCone {
                field_magnitude,
                cone_angle_rad,
                omega_rad_per_time: 2.0 * PI / period,
                cycles,
            },
            PathSpec::LinearSweep {
                slope_per_time, gap, ..
            } => PathSpec::LinearSweep {
                slope_per_time: slope_per_time / k,
                gap,
                duration_time: period,
            },
            PathSpec::Sampled {
                times_time,
                field,
                csv_file,
            } => PathSpec::Sampled {
                times_time: times_time.iter().map(|t| t * k).collect(),
                field,
                csv_file,
            },
        }
    }
}

impl BathSpec {
    fn check(&self, errs: &mut Vec<String>) {
        match self {
            BathSpec::Flat { s0 } => non_negative(errs, "bath.s0", *s0),
            BathSpec::OhmicThermal {
                eta,
                temperature_energy,
                cutoff_rad_per_time,
            } => {
                non_negative(errs, "bath.eta", *eta);
                positive(errs, "bath.temperature_energy", *temperature_energy);
                cutoff(errs, *cutoff_rad_per_time);
            }
            BathSpec::ZeroTemperatureOhmic {
                eta,
                cutoff_rad_per_time,
            } => {
                non_negative(errs, "bath.eta", *eta);
                cutoff(errs, *cutoff_rad_per_time);
            }
            BathSpec::Tabulated {
                omega_rad_per_time,
                density,
                ..
            } => {
                let sd = SpectralDensity::Tabulated {
                    omega: omega_rad_per_time.clone(),
                    density: density.clone(),
                };
                errs.extend(sd.validation_errors().into_iter().map(|e| format!("bath: {e}")));
            }
        }
    }

    fn build(&self) -> SpectralDensity<f64> {
        match self {
            BathSpec::Flat { s0 } => SpectralDensity::flat(*s0),
            BathSpec::OhmicThermal {
                eta,
                temperature_energy,
                cutoff_rad_per_time,
            } => SpectralDensity::ohmic_thermal(*eta, *temperature_energy, *cutoff_rad_per_time),
            BathSpec::ZeroTemperatureOhmic {
                eta,
                cutoff_rad_per_time,
            } => SpectralDensity::zero_temperature_ohmic(*eta, *cutoff_rad_per_time),
            BathSpec::Tabulated {
                omega_rad_per_time,
                density,
                ..
            } => SpectralDensity::Tabulated {
                omega: omega_rad_per_time.clone(),
                density: density.clone(),
            },
        }
    }
}

impl Scenario {
    pub fn from_spec(spec: ScenarioSpec) -> Result<Self, ConfigError> {
        let mut errs = Vec::new();
        spec.path.check(&mut errs);
        spec.bath.check(&mut errs);

        let c = &spec.coupling;
        for (key, v) in [("identity", c.identity), ("x", c.x), ("y", c.y), ("z", c.z)] {
            finite(&mut errs, &format!("coupling.{key}"), v);
        }

        let i = &spec.initial;
        let initial = DensityState::new(i.rho_gg, Complex::new(i.re_rho_ge, i.im_rho_ge));
        if !initial.is_finite() {
            errs.push("initial state entries must be finite".into());
        } else if !(0.0..=1.0).contains(&i.rho_gg) {
            errs.push(format!("initial.rho_gg must lie in [0, 1], got {}", i.rho_gg));
        } else if initial.positivity_violation() > 1e-12 {
            errs.push(format!(
                "initial state is not positive: |rho_ge|^2 = {} exceeds rho_gg (1 - rho_gg) = {}",
                initial.rho_ge.norm_sqr(),
                i.rho_gg * (1.0 - i.rho_gg)
            ));
        }

        let s = &spec.solver;
        match s.method {
            MethodName::Rk4 => positive(&mut errs, "solver.dt_time", s.dt_time),
            MethodName::Rk45 => {
                positive(&mut errs, "solver.rtol", s.rtol);
                positive(&mut errs, "solver.atol", s.atol);
                if let Some(d) = s.dt_max_time {
                    positive(&mut errs, "solver.dt_max_time", d);
                }
            }
        }
        if s.record_stride == 0 {
            errs.push("solver.record_stride must be at least 1".into());
        }

        let r = &spec.run;
        finite(&mut errs, "run.lambda_g0_rad", r.lambda_g0_rad);
        finite(&mut errs, "run.lambda_e0_rad", r.lambda_e0_rad);

        match r.mode {
            ModeName::Sweep => match &spec.sweep {
                None => errs.push("sweep mode needs a [sweep] table with periods_time".into()),
                Some(sw) => {
                    if sw.periods_time.is_empty() {
                        errs.push("sweep.periods_time must not be empty".into());
                    }
                    for p in &sw.periods_time {
                        positive(&mut errs, "sweep.periods_time entry", *p);
                    }
                }
            },
            ModeName::Berry => {
                if !matches!(spec.path, PathSpec::RotatingCone { .. }) {
                    errs.push("berry mode needs path.kind = \"rotating_cone\"".into());
                }
                match &spec.berry {
                    None => errs.push("berry mode needs a [berry] table with cone_angles_rad".into()),
                    Some(b) => {
                        if b.cone_angles_rad.is_empty() {
                            errs.push("berry.cone_angles_rad must not be empty".into());
                        }
                        for a in &b.cone_angles_rad {
                            if !(0.0..=PI).contains(a) {
                                errs.push(format!("berry.cone_angles_rad entries must lie in [0, pi], got {a}"));
                            }
                        }
                        if b.samples < 3 {
                            errs.push(format!("berry.samples must be at least 3, got {}", b.samples));
                        }
                    }
                }
            }
            ModeName::Simulate | ModeName::Compare => {}
        }

        if !errs.is_empty() {
            return Err(ConfigError::Validation(errs));
        }

        let coupling = Op2::pauli(c.identity, c.x, c.y, c.z);
        let path = spec
            .path
            .build(coupling)
            .map_err(|e| ConfigError::Validation(vec![e]))?;
        path.validate()
            .map_err(|e| ConfigError::Validation(vec![format!("path: {e}")]))?;
        let spectrum = spec.bath.build();
        Ok(Scenario {
            spec,
            path,
            spectrum,
            initial,
        })
    }

    pub fn mode(&self) -> ModeName {
        self.spec.run.mode
    }

    /// Same scenario under a different run mode, revalidated.
    pub fn with_mode(&self, mode: ModeName) -> Result<Self, ConfigError> {
        let mut spec = self.spec.clone();
        spec.run.mode = mode;
        Scenario::from_spec(spec)
    }

    pub fn variant(&self) -> Variant {
        self.spec.run.variant.into()
    }

    pub fn solver(&self) -> SolverConfig<f64> {
        let s = &self.spec.solver;
        let t1 = self.path.duration;
        let method = match s.method {
            MethodName::Rk4 => Method::Rk4 { dt: s.dt_time },
            MethodName::Rk45 => Method::Rk45 {
                rtol: s.rtol,
                atol: s.atol,
                dt_max: s.dt_max_time.unwrap_or(t1),
            },
        };
        SolverConfig {
            method,
            t0: 0.0,
            t1,
            record_stride: s.record_stride,
        }
    }

    /// One single-trajectory scenario per sweep period (empty otherwise).
    pub fn sub_scenarios(&self) -> Vec<(f64, Scenario)> {
        let Some(sweep) = &self.spec.sweep else {
            return Vec::new();
        };
        sweep
            .periods_time
            .iter()
            .map(|&period| {
                let mut spec = self.spec.clone();
                spec.path = spec.path.with_period(period);
                spec.run.mode = ModeName::Simulate;
                spec.sweep = None;
                let sub = Scenario::from_spec(spec).expect("sweep periods validated with the parent");
                (period, sub)
            })
            .collect()
    }

    /// Canonical TOML form (defaults filled in).
    pub fn canonical(&self) -> String {
        toml::to_string(&self.spec).expect("scenario serialises to TOML")
    }

    /// Hex SHA-256 of the canonical form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}
