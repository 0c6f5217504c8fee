//! Command-line front end: parameter identification, trajectory energy
//! estimates, method comparison, speed sweeps and a gradient self-check.
//!
//! Every command writes a versioned JSON report (with `--json`) or a short
//! text summary to stdout, and plot-ready CSV files into `--out`. Exit
//! codes: 0 success, 1 input error, 2 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use robot_energy::energy::{
    energy_at_scale, energy_gradient_wrt_scale, power_profile, profile_to_csv, trajectory_energy,
    ElectricalParams, EnergyError, EnergyReport, IntegrationRule, ScaleGradient, TIMING_GAP_RATIO,
};
use robot_energy::identification::{
    identification_report, identify, parse_measurements_csv, regression_csv, IdentificationError,
    IdentificationResult, Method, ParamsFile, RegressionRow,
};
use robot_energy::model::parse_urdf_with_diagnostics;
use robot_energy::trajectory::{derive_missing, parse_trajectory_csv, time_scale, Trajectory};
use robot_energy::{DynamicsError, RobotModel};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub mod table;

pub const REPORT_VERSION: u32 = 1;
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "robot-energy",
    version,
    about = "Estimate the electrical energy of robot trajectories"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit electrical parameters to static-pose power measurements.
    Identify(IdentifyArgs),
    /// Estimate the energy of one trajectory.
    Estimate(EstimateArgs),
    /// Compare two parameter sets against a measured energy.
    Compare(CompareArgs),
    /// Evaluate the energy of a trajectory replayed at several speeds.
    SpeedSweep(SweepArgs),
    /// Check the finite-difference derivative of energy with respect to the time scale.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Robot description (URDF).
    #[arg(long)]
    pub urdf: PathBuf,
    /// Directory for CSV and JSON artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of a text summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    /// Trajectory CSV (`t,q_1..q_n[,dq_..][,ddq_..]`).
    #[arg(long)]
    pub trajectory: PathBuf,
    #[arg(long, default_value_t = IntegrationRule::LeftRiemann)]
    pub rule: IntegrationRule,
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Measurement CSV (`label,q_1..q_n,power_w`).
    #[arg(long)]
    pub measurements: PathBuf,
    /// 1: mean overhead; 2: least-squares fit.
    #[arg(long, default_value = "2")]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub traj: TrajectoryArgs,
    /// Parameter JSON.
    #[arg(long)]
    pub params: PathBuf,
    /// Time-scale factor applied before evaluation (2 = half speed).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub traj: TrajectoryArgs,
    #[arg(long)]
    pub params1: PathBuf,
    #[arg(long)]
    pub params2: PathBuf,
    /// Measured energy of the movement, J.
    #[arg(long)]
    pub measured: Option<f64>,
    /// Measured duration, s. Reported next to the trajectory duration; no correction is applied.
    #[arg(long)]
    pub measured_duration: Option<f64>,
    /// Row label in the table; defaults to the trajectory file name.
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub traj: TrajectoryArgs,
    #[arg(long)]
    pub params: PathBuf,
    /// Comma-separated time-scale factors.
    #[arg(long, value_delimiter = ',', required = true)]
    pub scales: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub traj: TrajectoryArgs,
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 1,
            Self::Numerical(_) => 2,
        }
    }
}

fn energy_error(context: &str, e: EnergyError) -> CliError {
    let numerical = matches!(
        e,
        EnergyError::Dynamics(DynamicsError::AsymmetricMassMatrix { .. })
    );
    let message = format!("{context}: {e}");
    if numerical {
        CliError::Numerical(message)
    } else {
        CliError::Input(message)
    }
}

/// What a command produced. A run can complete and still signal a
/// numerical failure through `exit_code`.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputFile {
    pub role: &'static str,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub params: ElectricalParams,
    pub energy: EnergyReport,
    /// `(estimated − measured)/measured·100`, signed.
    pub deviation_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub movement: String,
    pub measured_energy: Option<f64>,
    pub measured_duration: Option<f64>,
    pub rows: Vec<ComparisonRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scale: f64,
    pub duration: f64,
    pub total_energy: f64,
    pub mechanical_energy: f64,
    pub joule_energy: f64,
    pub overhead_energy: f64,
    pub overhead_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentificationSummary {
    pub result: IdentificationResult,
    pub regression: Vec<RegressionRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub report_version: u32,
    pub toolkit_version: &'static str,
    pub command: &'static str,
    pub inputs: Vec<InputFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<IntegrationRule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ElectricalParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient: Option<ScaleGradient>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identification: Option<IdentificationSummary>,
    pub warnings: Vec<String>,
}

impl RunReport {
    fn new(command: &'static str, inputs: Vec<InputFile>) -> Self {
        Self {
            report_version: REPORT_VERSION,
            toolkit_version: TOOLKIT_VERSION,
            command,
            inputs,
            rule: None,
            scale: None,
            params: None,
            energy: None,
            comparison: None,
            sweep: None,
            gradient: None,
            identification: None,
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// Signed deviation of an estimate from a measurement, in percent.
pub fn deviation_percent(estimated: f64, measured: f64) -> f64 {
    (estimated - measured) / measured * 100.0
}

struct Inputs {
    files: Vec<InputFile>,
}

impl Inputs {
    fn new() -> Self {
        Self { files: Vec::new() }
    }

    fn read(&mut self, role: &'static str, path: &Path) -> Result<String, CliError> {
        let bytes =
            fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.files.push(InputFile {
            role,
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes)
            .map_err(|_| CliError::Input(format!("{}: not valid UTF-8", path.display())))
    }

    fn model(&mut self, path: &Path, warnings: &mut Vec<String>) -> Result<RobotModel, CliError> {
        let text = self.read("urdf", path)?;
        let (model, notes) = parse_urdf_with_diagnostics(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        warnings.extend(
            notes
                .into_iter()
                .map(|d| format!("{}: {}: {}", path.display(), d.element, d.message)),
        );
        Ok(model)
    }

    fn trajectory(
        &mut self,
        path: &Path,
        model: &RobotModel,
        warnings: &mut Vec<String>,
    ) -> Result<Trajectory, CliError> {
        let text = self.read("trajectory", path)?;
        let traj = parse_trajectory_csv(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if traj.dof() != model.dof() {
            return Err(CliError::Input(format!(
                "{}: trajectory has {} joints but the robot model has {} degrees of freedom",
                path.display(),
                traj.dof(),
                model.dof()
            )));
        }
        if traj.has_velocities() && traj.has_accelerations() {
            return Ok(traj);
        }
        let derived = derive_missing(&traj)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        warnings.push(format!(
            "{}: derivative columns absent; derived by finite differences",
            path.display()
        ));
        Ok(derived)
    }

    fn params(&mut self, role: &'static str, path: &Path) -> Result<ElectricalParams, CliError> {
        let text = self.read(role, path)?;
        let file = ParamsFile::from_json(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let params = file.params();
        params
            .validate()
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(params)
    }
}

fn check_scale(s: f64) -> Result<(), CliError> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "time-scale factor must be finite and positive, got {s}"
        )))
    }
}

fn write_artifact(out: &Option<PathBuf>, name: &str, contents: &str) -> Result<(), CliError> {
    let Some(dir) = out else { return Ok(()) };
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn scaled(traj: &Trajectory, s: f64) -> Result<Trajectory, CliError> {
    if s == 1.0 {
        return Ok(traj.clone());
    }
    time_scale(traj, s).map_err(|e| CliError::Input(e.to_string()))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn energy_summary(report: &EnergyReport) -> String {
    format!(
        "total energy      {} J\n\
         mechanical        {} J\n\
         joule             {} J\n\
         overhead          {} J\n\
         duration          {} s\n\
         overhead fraction {}\n",
        report.total_energy,
        report.mechanical_energy,
        report.joule_energy,
        report.overhead_energy,
        report.duration,
        report
            .overhead_fraction
            .map_or_else(|| "n/a".to_string(), |f| f.to_string())
    )
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Identify(a) => cmd_identify(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::SpeedSweep(a) => cmd_speed_sweep(a),
        Command::Gradcheck(a) => cmd_gradcheck(a),
    }
}

fn finish(report: RunReport, json: bool, text: String, exit_code: i32) -> Outcome {
    Outcome {
        stdout: if json { report.to_json() } else { text },
        warnings: report.warnings,
        exit_code,
    }
}

pub fn cmd_identify(a: IdentifyArgs) -> Result<Outcome, CliError> {
    let mut inputs = Inputs::new();
    let mut warnings = Vec::new();
    let model = inputs.model(&a.common.urdf, &mut warnings)?;
    let path = &a.measurements;
    let text = inputs.read("measurements", path)?;
    let measurements = parse_measurements_csv(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if let Some((i, m)) = measurements
        .iter()
        .enumerate()
        .find(|(_, m)| m.q.len() != model.dof())
    {
        return Err(CliError::Input(format!(
            "{}: pose {i} has {} joints but the robot model has {} degrees of freedom",
            path.display(),
            m.q.len(),
            model.dof()
        )));
    }
    let id_error = |e: IdentificationError| {
        let message = format!("{}: {e}", path.display());
        if e.is_numerical() {
            CliError::Numerical(message)
        } else {
            CliError::Input(message)
        }
    };
    let result = identify(a.method, &measurements, &model).map_err(id_error)?;
    let rows = identification_report(&result, &measurements, &model).map_err(id_error)?;
    let params_file = ParamsFile::from_result(&result);
    let mut params_json = params_file.to_json();
    params_json.push('\n');
    write_artifact(&a.common.out, "params.json", &params_json)?;
    write_artifact(&a.common.out, "regression.csv", &regression_csv(&rows))?;

    warnings.extend(result.warnings.iter().cloned());
    let mut report = RunReport::new("identify", inputs.files);
    report.params = Some(result.params);
    report.identification = Some(IdentificationSummary {
        result,
        regression: rows,
    });
    report.warnings = warnings;
    write_artifact(&a.common.out, "report.json", &report.to_json())?;
    Ok(finish(report, a.common.json, params_json, 0))
}

pub fn cmd_estimate(a: EstimateArgs) -> Result<Outcome, CliError> {
    check_scale(a.scale)?;
    let mut inputs = Inputs::new();
    let mut warnings = Vec::new();
    let model = inputs.model(&a.common.urdf, &mut warnings)?;
    let traj = inputs.trajectory(&a.traj.trajectory, &model, &mut warnings)?;
    let params = inputs.params("params", &a.params)?;
    let traj = scaled(&traj, a.scale)?;
    let profile =
        power_profile(&traj, &model, &params).map_err(|e| energy_error("power profile", e))?;
    let energy =
        trajectory_energy(&profile, a.traj.rule).map_err(|e| energy_error("integration", e))?;
    write_artifact(
        &a.common.out,
        "power_profile.csv",
        &profile_to_csv(&profile),
    )?;

    let mut report = RunReport::new("estimate", inputs.files);
    report.rule = Some(a.traj.rule);
    report.scale = Some(a.scale);
    report.params = Some(params);
    report.energy = Some(energy);
    report.warnings = warnings;
    write_artifact(&a.common.out, "report.json", &report.to_json())?;
    Ok(finish(report, a.common.json, energy_summary(&energy), 0))
}

pub fn cmd_compare(a: CompareArgs) -> Result<Outcome, CliError> {
    check_scale(a.scale)?;
    if let Some(m) = a.measured {
        if !(m.is_finite() && m > 0.0) {
            return Err(CliError::Input(format!(
                "measured energy must be positive, got {m}"
            )));
        }
    }
    if let Some(d) = a.measured_duration {
        if !(d.is_finite() && d > 0.0) {
            return Err(CliError::Input(format!(
                "measured duration must be positive, got {d}"
            )));
        }
    }
    let mut inputs = Inputs::new();
    let mut warnings = Vec::new();
    let model = inputs.model(&a.common.urdf, &mut warnings)?;
    let traj = inputs.trajectory(&a.traj.trajectory, &model, &mut warnings)?;
    let p1 = inputs.params("params1", &a.params1)?;
    let p2 = inputs.params("params2", &a.params2)?;
    let traj = scaled(&traj, a.scale)?;

    let mut rows = Vec::new();
    for (label, params, file) in [
        ("Meth.1", p1, "power_profile_1.csv"),
        ("Meth.2", p2, "power_profile_2.csv"),
    ] {
        let profile =
            power_profile(&traj, &model, &params).map_err(|e| energy_error("power profile", e))?;
        let energy =
            trajectory_energy(&profile, a.traj.rule).map_err(|e| energy_error("integration", e))?;
        write_artifact(&a.common.out, file, &profile_to_csv(&profile))?;
        rows.push(ComparisonRow {
            label: label.to_string(),
            params,
            deviation_percent: a
                .measured
                .map(|m| deviation_percent(energy.total_energy, m)),
            energy,
        });
    }
    if let Some(d) = a.measured_duration {
        warnings.push(format!(
            "measured duration {d} s differs from the trajectory duration {:.4} s by {:+.4} s; no correction applied",
            traj.duration(),
            d - traj.duration()
        ));
    }
    let movement = a.label.clone().unwrap_or_else(|| {
        a.traj.trajectory.file_stem().map_or_else(
            || "trajectory".to_string(),
            |s| s.to_string_lossy().into_owned(),
        )
    });
    let comparison = Comparison {
        movement,
        measured_energy: a.measured,
        measured_duration: a.measured_duration,
        rows,
    };
    let text = table::render(&comparison, traj.duration());

    let mut report = RunReport::new("compare", inputs.files);
    report.rule = Some(a.traj.rule);
    report.scale = Some(a.scale);
    report.comparison = Some(comparison);
    report.warnings = warnings;
    write_artifact(&a.common.out, "report.json", &report.to_json())?;
    Ok(finish(report, a.common.json, text, 0))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out =
        String::from("scale,duration,E_total,E_mech,E_joule,E_overhead,overhead_fraction\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.scale,
            r.duration,
            r.total_energy,
            r.mechanical_energy,
            r.joule_energy,
            r.overhead_energy,
            fmt_opt(r.overhead_fraction)
        ));
    }
    out
}

pub fn cmd_speed_sweep(a: SweepArgs) -> Result<Outcome, CliError> {
    for &s in &a.scales {
        check_scale(s)?;
    }
    let mut inputs = Inputs::new();
    let mut warnings = Vec::new();
    let model = inputs.model(&a.common.urdf, &mut warnings)?;
    let traj = inputs.trajectory(&a.traj.trajectory, &model, &mut warnings)?;
    let params = inputs.params("params", &a.params)?;

    let mut scales = a.scales.clone();
    scales.sort_by(f64::total_cmp);
    scales.dedup();
    let rows = scales
        .iter()
        .map(|&s| {
            let e = energy_at_scale(&traj, &model, &params, a.traj.rule, s)
                .map_err(|e| energy_error("sweep", e))?;
            Ok(SweepRow {
                scale: s,
                duration: e.duration,
                total_energy: e.total_energy,
                mechanical_energy: e.mechanical_energy,
                joule_energy: e.joule_energy,
                overhead_energy: e.overhead_energy,
                overhead_fraction: e.overhead_fraction,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let csv = sweep_csv(&rows);
    write_artifact(&a.common.out, "speed_sweep.csv", &csv)?;

    let mut report = RunReport::new("speed-sweep", inputs.files);
    report.rule = Some(a.traj.rule);
    report.params = Some(params);
    report.sweep = Some(rows);
    report.warnings = warnings;
    write_artifact(&a.common.out, "report.json", &report.to_json())?;
    Ok(finish(report, a.common.json, csv, 0))
}

pub fn cmd_gradcheck(a: GradcheckArgs) -> Result<Outcome, CliError> {
    check_scale(a.scale)?;
    let mut inputs = Inputs::new();
    let mut warnings = Vec::new();
    let model = inputs.model(&a.common.urdf, &mut warnings)?;
    let traj = inputs.trajectory(&a.traj.trajectory, &model, &mut warnings)?;
    let params = inputs.params("params", &a.params)?;
    let gradient = energy_gradient_wrt_scale(&traj, &model, &params, a.traj.rule, a.scale)
        .map_err(|e| energy_error("gradient", e))?;

    // a timing gap makes E(s) non-smooth even when the two quotients agree
    let gaps = traj.timing_gaps(TIMING_GAP_RATIO);
    let passed = gradient.consistent && gaps.is_empty();
    warnings.extend(gradient.warnings.iter().cloned());
    if !passed {
        warnings.push(format!(
            "gradient check failed: relative disagreement {} between steps h and h/2 (tolerance {}){}",
            gradient.relative_disagreement,
            robot_energy::energy::RICHARDSON_TOLERANCE,
            if gaps.is_empty() { "" } else { "; objective is not smooth" }
        ));
    }
    let text = format!(
        "scale            {}\n\
         energy           {} J\n\
         step h           {}\n\
         dE/ds (h)        {} J\n\
         dE/ds (h/2)      {} J\n\
         dE/ds            {} J\n\
         disagreement     {:.3e}\n\
         result           {}\n",
        gradient.scale,
        gradient.energy,
        gradient.step,
        gradient.derivative_h,
        gradient.derivative_half_h,
        gradient.derivative,
        gradient.relative_disagreement,
        if passed { "pass" } else { "FAIL" }
    );
    let mut report = RunReport::new("gradcheck", inputs.files);
    report.rule = Some(a.traj.rule);
    report.scale = Some(a.scale);
    report.params = Some(params);
    report.gradient = Some(gradient);
    report.warnings = warnings;
    write_artifact(&a.common.out, "report.json", &report.to_json())?;
    Ok(finish(
        report,
        a.common.json,
        text,
        if passed { 0 } else { 2 },
    ))
}
