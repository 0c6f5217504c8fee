//! Electrical parameters from static-pose power readings.
//!
//! At rest the power model reduces to `p = r_kt2·‖G(q)‖² + p_overhead`, so
//! a handful of held poses with a measured mean power each determine both
//! parameters by a straight-line fit against the squared norm of the
//! gravity torque vector. The overhead-only estimator is the plain mean.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{gravity_torque, DynamicsError};
use crate::energy::ElectricalParams;
use crate::model::RobotModel;

/// Regressor values closer than this (relative to the largest) count as one.
pub const REGRESSOR_DISTINCT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentificationError {
    #[error("need at least {needed} measurements, have {found}")]
    TooFewMeasurements { needed: usize, found: usize },
    #[error(
        "design matrix is rank deficient: the regressor ‖G(q)‖² takes a single value ({value}) \
         across all {n} poses; measure poses with different gravity loading"
    )]
    RankDeficient { value: f64, n: usize },
    #[error("measurement {index}: power must be finite and positive, got {value}")]
    InvalidPower { index: usize, value: f64 },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("header: {0}")]
    Header(String),
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: column `{column}` has invalid value `{value}`")]
    InvalidNumber {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: power must be positive, got {value}")]
    NonPositivePower { line: u64, value: f64 },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("invalid parameter file: {0}")]
    Params(String),
}

impl IdentificationError {
    /// True for failures of the estimator itself rather than of its input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Self::RankDeficient { .. })
    }
}

/// One held pose and the mean electrical power drawn while holding it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticPoseMeasurement {
    pub q: Vec<f64>,
    /// W.
    pub measured_power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl StaticPoseMeasurement {
    pub fn new(q: Vec<f64>, measured_power: f64) -> Self {
        Self {
            q,
            measured_power,
            label: None,
        }
    }

    pub fn labelled(label: impl Into<String>, q: Vec<f64>, measured_power: f64) -> Self {
        Self {
            q,
            measured_power,
            label: Some(label.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Mean overhead, no resistive term.
    Method1,
    /// Least-squares fit of overhead plus resistive term.
    Method2,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Method1 => "method1",
            Self::Method2 => "method2",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "method1" => Ok(Self::Method1),
            "2" | "method2" => Ok(Self::Method2),
            other => Err(format!("unknown method `{other}` (expected 1 or 2)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentificationResult {
    pub params: ElectricalParams,
    pub method: Method,
    /// Measured minus predicted power, W, in measurement order.
    pub residuals: Vec<f64>,
    pub rms_residual: f64,
    /// Coefficient of determination of the fit; Method 2 only, and absent
    /// when the measured powers have no spread.
    pub r_squared: Option<f64>,
    pub n_poses: usize,
    /// Largest over smallest regressor value; Method 2 only. Infinite when
    /// some pose has no gravity load.
    pub conditioning_ratio: Option<f64>,
    pub warnings: Vec<String>,
}

fn check_powers(measurements: &[StaticPoseMeasurement]) -> Result<(), IdentificationError> {
    for (index, m) in measurements.iter().enumerate() {
        if !(m.measured_power.is_finite() && m.measured_power > 0.0) {
            return Err(IdentificationError::InvalidPower {
                index,
                value: m.measured_power,
            });
        }
    }
    Ok(())
}

/// Mean summed in ascending order, so it does not depend on input order.
fn mean(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().sum::<f64>() / values.len() as f64
}

fn rms(values: &[f64]) -> f64 {
    (values.iter().map(|r| r * r).sum::<f64>() / values.len() as f64).sqrt()
}

pub fn identify_method1(
    measurements: &[StaticPoseMeasurement],
) -> Result<IdentificationResult, IdentificationError> {
    if measurements.is_empty() {
        return Err(IdentificationError::TooFewMeasurements {
            needed: 1,
            found: 0,
        });
    }
    check_powers(measurements)?;
    let powers: Vec<f64> = measurements.iter().map(|m| m.measured_power).collect();
    let p_overhead = mean(&powers);
    let residuals: Vec<f64> = powers.iter().map(|p| p - p_overhead).collect();
    Ok(IdentificationResult {
        params: ElectricalParams {
            r_kt2: 0.0,
            p_overhead,
        },
        method: Method::Method1,
        rms_residual: rms(&residuals),
        residuals,
        r_squared: None,
        n_poses: measurements.len(),
        conditioning_ratio: None,
        warnings: Vec::new(),
    })
}

/// Ordinary least-squares line through `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Fits `y ≈ slope·x + intercept`.
///
/// The design matrix `[x, 1]` is factored as `[1, x] = QR` with the
/// constant column first, which amounts to centring `x`: `R₂₂ = ‖x − x̄‖`
/// exposes rank deficiency, and the intercept comes back as
/// `ȳ − slope·x̄`. Sums run over the samples in sorted order, so the fit
/// is independent of input order.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit, IdentificationError> {
    let n = x.len();
    assert_eq!(n, y.len(), "fit_line needs paired samples");
    if n < 2 {
        return Err(IdentificationError::TooFewMeasurements {
            needed: 2,
            found: n,
        });
    }
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let scale = lo.abs().max(hi.abs());
    if hi - lo <= REGRESSOR_DISTINCT_TOLERANCE * scale {
        return Err(IdentificationError::RankDeficient { value: mean(x), n });
    }
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let x_mean = mean(x);
    let y_mean = mean(y);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(xi, yi) in &pairs {
        let dx = xi - x_mean;
        sxx += dx * dx;
        sxy += dx * (yi - y_mean);
    }
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: y_mean - slope * x_mean,
    })
}

/// `‖G(q)‖²` for every measured pose.
pub fn gravity_regressors(
    measurements: &[StaticPoseMeasurement],
    model: &RobotModel,
) -> Result<Vec<f64>, IdentificationError> {
    measurements
        .iter()
        .map(|m| Ok(gravity_torque(model, &m.q)?.squared_norm()))
        .collect()
}

pub fn identify_method2(
    measurements: &[StaticPoseMeasurement],
    model: &RobotModel,
) -> Result<IdentificationResult, IdentificationError> {
    if measurements.len() < 2 {
        return Err(IdentificationError::TooFewMeasurements {
            needed: 2,
            found: measurements.len(),
        });
    }
    check_powers(measurements)?;
    let x = gravity_regressors(measurements, model)?;
    let y: Vec<f64> = measurements.iter().map(|m| m.measured_power).collect();
    let fit = fit_line(&x, &y)?;
    let params = ElectricalParams {
        r_kt2: fit.slope,
        p_overhead: fit.intercept,
    };

    let residuals: Vec<f64> = x
        .iter()
        .zip(&y)
        .map(|(&xi, &yi)| yi - (params.p_overhead + params.r_kt2 * xi))
        .collect();
    let y_mean = mean(&y);
    let ss_tot: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();

    let mut warnings = Vec::new();
    if params.r_kt2 < 0.0 {
        warnings.push(format!(
            "fitted r_kt2 = {} is negative; power falls with gravity load in these measurements",
            params.r_kt2
        ));
    }
    if params.p_overhead < 0.0 {
        warnings.push(format!(
            "fitted p_overhead = {} is negative",
            params.p_overhead
        ));
    }
    let r_squared = if ss_tot > 0.0 {
        Some(1.0 - ss_res / ss_tot)
    } else {
        warnings.push("measured power is identical at every pose; r_squared is undefined".into());
        None
    };
    let (lo, hi) = x.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let conditioning_ratio = if lo > 0.0 { hi / lo } else { f64::INFINITY };

    Ok(IdentificationResult {
        params,
        method: Method::Method2,
        rms_residual: rms(&residuals),
        residuals,
        r_squared,
        n_poses: measurements.len(),
        conditioning_ratio: Some(conditioning_ratio),
        warnings,
    })
}

pub fn identify(
    method: Method,
    measurements: &[StaticPoseMeasurement],
    model: &RobotModel,
) -> Result<IdentificationResult, IdentificationError> {
    match method {
        Method::Method1 => identify_method1(measurements),
        Method::Method2 => identify_method2(measurements, model),
    }
}

/// Power drawn while holding `q`: `p_overhead + r_kt2·‖G(q)‖²`.
pub fn predict_static_power(
    q: &[f64],
    model: &RobotModel,
    params: &ElectricalParams,
) -> Result<f64, IdentificationError> {
    let g2 = gravity_torque(model, q)?.squared_norm();
    Ok(params.p_overhead + params.r_kt2 * g2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionRow {
    pub label: String,
    pub g_norm2: f64,
    pub measured: f64,
    pub predicted: f64,
    pub residual: f64,
}

/// Per-pose regression data: regressor, measurement, prediction and
/// residual. Unlabelled poses are named `pose_<index>`.
pub fn identification_report(
    result: &IdentificationResult,
    measurements: &[StaticPoseMeasurement],
    model: &RobotModel,
) -> Result<Vec<RegressionRow>, IdentificationError> {
    let x = gravity_regressors(measurements, model)?;
    Ok(measurements
        .iter()
        .zip(x)
        .enumerate()
        .map(|(i, (m, g_norm2))| {
            let predicted = result.params.p_overhead + result.params.r_kt2 * g_norm2;
            RegressionRow {
                label: match &m.label {
                    Some(l) if !l.is_empty() => l.clone(),
                    _ => format!("pose_{i}"),
                },
                g_norm2,
                measured: m.measured_power,
                predicted,
                residual: m.measured_power - predicted,
            }
        })
        .collect())
}

pub fn regression_csv(rows: &[RegressionRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["label", "g_norm2", "measured", "predicted", "residual"])
        .expect("in-memory write");
    for row in rows {
        writer
            .write_record([
                row.label.clone(),
                row.g_norm2.to_string(),
                row.measured.to_string(),
                row.predicted.to_string(),
                row.residual.to_string(),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

/// Reads `label,q_1,...,q_n,power_w`.
pub fn parse_measurements_csv(
    text: &str,
) -> Result<Vec<StaticPoseMeasurement>, IdentificationError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| IdentificationError::Csv {
        line: 1,
        message: e.to_string(),
    })?;
    let names: Vec<String> = header.iter().map(str::to_string).collect();
    let width = names.len();
    if width < 3 {
        return Err(IdentificationError::Header(format!(
            "expected `label,q_1,...,q_n,power_w`, found {} columns",
            width
        )));
    }
    if names[0] != "label" {
        return Err(IdentificationError::Header(format!(
            "first column must be `label`, found `{}`",
            names[0]
        )));
    }
    if names[width - 1] != "power_w" {
        return Err(IdentificationError::Header(format!(
            "last column must be `power_w`, found `{}`",
            names[width - 1]
        )));
    }
    for (j, name) in names[1..width - 1].iter().enumerate() {
        if *name != format!("q_{}", j + 1) {
            return Err(IdentificationError::Header(format!(
                "column {} must be `q_{}`, found `{name}`",
                j + 2,
                j + 1
            )));
        }
    }

    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| IdentificationError::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(IdentificationError::Ragged {
                line,
                expected: width,
                found: record.len(),
            });
        }
        let number = |i: usize| -> Result<f64, IdentificationError> {
            record[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| IdentificationError::InvalidNumber {
                    line,
                    column: names[i].clone(),
                    value: record[i].to_string(),
                })
        };
        let q = (1..width - 1).map(number).collect::<Result<Vec<_>, _>>()?;
        let power = number(width - 1)?;
        if power <= 0.0 {
            return Err(IdentificationError::NonPositivePower { line, value: power });
        }
        let label = (!record[0].is_empty()).then(|| record[0].to_string());
        out.push(StaticPoseMeasurement {
            q,
            measured_power: power,
            label,
        });
    }
    Ok(out)
}

/// On-disk form of a parameter set, as written by identification and read
/// by the energy tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    #[serde(default)]
    pub method: Option<Method>,
    pub r_kt2: f64,
    pub p_overhead: f64,
    #[serde(default)]
    pub rms_residual: Option<f64>,
    #[serde(default)]
    pub r_squared: Option<f64>,
    #[serde(default)]
    pub n_poses: Option<usize>,
}

impl ParamsFile {
    pub fn from_result(result: &IdentificationResult) -> Self {
        Self {
            method: Some(result.method),
            r_kt2: result.params.r_kt2,
            p_overhead: result.params.p_overhead,
            rms_residual: Some(result.rms_residual),
            r_squared: result.r_squared,
            n_poses: Some(result.n_poses),
        }
    }

    pub fn params(&self) -> ElectricalParams {
        ElectricalParams {
            r_kt2: self.r_kt2,
            p_overhead: self.p_overhead,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("parameter file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, IdentificationError> {
        serde_json::from_str(text).map_err(|e| IdentificationError::Params(e.to_string()))
    }
}
