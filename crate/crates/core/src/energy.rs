//! Electrical power and trajectory energy.
//!
//! With the inductance dropped, a DC motor draws `i = τ/K_t` at
//! `v = K_emf·q̇ + R·i`. Taking `K_emf = K_t` and one resistance for every
//! motor reduces `p = iᵀv` to
//!
//! ```text
//! p = τᵀq̇ + (R/K_t²)·τᵀτ + p_overhead
//! ```
//!
//! where the constant overhead covers controllers and electronics. The
//! lumped coefficient `R/K_t²` (field `r_kt2`, W/(N·m)²) and `p_overhead`
//! are the only electrical parameters. Setting `r_kt2 = 0` gives the
//! overhead-only model.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{rnea, DynamicsError, JointState};
use crate::model::RobotModel;
use crate::trajectory::{time_scale, Trajectory, TrajectoryError};

/// Relative step of the central difference in [`energy_gradient_wrt_scale`].
pub const GRADIENT_RELATIVE_STEP: f64 = 1e-4;
/// Agreement required between the `h` and `h/2` difference quotients.
pub const RICHARDSON_TOLERANCE: f64 = 1e-4;
/// Sampling intervals longer than this multiple of the median are reported
/// as timing gaps by the gradient check.
pub const TIMING_GAP_RATIO: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error("{what} has length {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("motor {index}: torque constant must be positive, got {value}")]
    NonPositiveTorqueConstant { index: usize, value: f64 },
    #[error("motor {index}: {what} must be finite and non-negative, got {value}")]
    InvalidMotorConstant {
        index: usize,
        what: &'static str,
        value: f64,
    },
    #[error("electrical parameter {what} must be finite and non-negative, got {value}")]
    InvalidParams { what: &'static str, value: f64 },
    #[error("{0} contains a non-finite value")]
    NonFinite(&'static str),
    #[error("power profile is empty")]
    EmptyProfile,
    #[error("power profile timestamps must increase strictly (sample {index})")]
    NonMonotonicProfile { index: usize },
    #[error("trajectory lacks {0}; derive them before evaluating power")]
    MissingDerivatives(&'static str),
    #[error("time-scale factor must be finite and positive, got {0}")]
    InvalidScale(f64),
    #[error("invalid scale interval [{min}, {max}]")]
    InvalidInterval { min: f64, max: f64 },
}

/// Per-motor constants of the DC motor model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotorConstants {
    /// Torque constant, N·m/A.
    pub kt: Vec<f64>,
    /// Back-EMF constant, V·s/rad.
    pub kemf: Vec<f64>,
    /// Winding resistance, Ω.
    pub r: Vec<f64>,
    /// Winding inductance, H. Kept for completeness; the simplified model ignores it.
    pub l: Vec<f64>,
}

impl MotorConstants {
    pub fn new(
        kt: Vec<f64>,
        kemf: Vec<f64>,
        r: Vec<f64>,
        l: Vec<f64>,
    ) -> Result<Self, EnergyError> {
        let n = kt.len();
        for (what, v) in [("kemf", &kemf), ("r", &r), ("l", &l)] {
            if v.len() != n {
                return Err(EnergyError::DimensionMismatch {
                    what,
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let constants = Self { kt, kemf, r, l };
        constants.check()?;
        Ok(constants)
    }

    /// `n` identical motors with `K_emf = K_t` and no inductance.
    pub fn uniform(n: usize, kt: f64, r: f64) -> Result<Self, EnergyError> {
        Self::new(vec![kt; n], vec![kt; n], vec![r; n], vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.kt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kt.is_empty()
    }

    fn check(&self) -> Result<(), EnergyError> {
        for (index, &value) in self.kt.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(EnergyError::NonPositiveTorqueConstant { index, value });
            }
        }
        for (what, v) in [("kemf", &self.kemf), ("r", &self.r), ("l", &self.l)] {
            for (index, &value) in v.iter().enumerate() {
                let ok = value.is_finite() && (what == "kemf" || value >= 0.0);
                if !ok {
                    return Err(EnergyError::InvalidMotorConstant { index, what, value });
                }
            }
        }
        Ok(())
    }

    fn check_len(&self, what: &'static str, v: &[f64]) -> Result<(), EnergyError> {
        if v.len() != self.len() {
            return Err(EnergyError::DimensionMismatch {
                what,
                expected: self.len(),
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// Motor currents `iⱼ = τⱼ / K_t,ⱼ` in amperes.
pub fn motor_current(tau: &[f64], constants: &MotorConstants) -> Result<Vec<f64>, EnergyError> {
    constants.check()?;
    constants.check_len("tau", tau)?;
    Ok(tau.iter().zip(&constants.kt).map(|(t, k)| t / k).collect())
}

/// Terminal voltages `vⱼ = K_emf,ⱼ·q̇ⱼ + Rⱼ·τⱼ/K_t,ⱼ` in volts.
pub fn motor_voltage(
    tau: &[f64],
    qd: &[f64],
    constants: &MotorConstants,
) -> Result<Vec<f64>, EnergyError> {
    let current = motor_current(tau, constants)?;
    constants.check_len("qd", qd)?;
    Ok((0..constants.len())
        .map(|j| constants.kemf[j] * qd[j] + constants.r[j] * current[j])
        .collect())
}

/// `p = iᵀv` in watts.
pub fn electrical_power(current: &[f64], voltage: &[f64]) -> Result<f64, EnergyError> {
    if current.len() != voltage.len() {
        return Err(EnergyError::DimensionMismatch {
            what: "voltage",
            expected: current.len(),
            found: voltage.len(),
        });
    }
    Ok(current.iter().zip(voltage).map(|(i, v)| i * v).sum())
}

/// The two identified electrical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectricalParams {
    /// Lumped `R/K_t²`, W/(N·m)², shared by every joint.
    pub r_kt2: f64,
    /// Constant overhead power, W.
    pub p_overhead: f64,
}

impl ElectricalParams {
    pub fn new(r_kt2: f64, p_overhead: f64) -> Result<Self, EnergyError> {
        let params = Self { r_kt2, p_overhead };
        params.validate()?;
        Ok(params)
    }

    /// Overhead-only model (resistance neglected).
    pub fn overhead_only(p_overhead: f64) -> Result<Self, EnergyError> {
        Self::new(0.0, p_overhead)
    }

    pub fn validate(&self) -> Result<(), EnergyError> {
        for (what, value) in [("r_kt2", self.r_kt2), ("p_overhead", self.p_overhead)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(EnergyError::InvalidParams { what, value });
            }
        }
        Ok(())
    }
}

/// Instantaneous power split into its three terms, in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub t: f64,
    /// `τᵀq̇`; negative while the load back-drives the joints.
    pub mechanical: f64,
    /// `r_kt2·τᵀτ`.
    pub joule: f64,
    pub overhead: f64,
    pub total: f64,
}

pub fn instantaneous_power(
    t: f64,
    tau: &[f64],
    qd: &[f64],
    params: &ElectricalParams,
) -> Result<PowerBreakdown, EnergyError> {
    if tau.len() != qd.len() {
        return Err(EnergyError::DimensionMismatch {
            what: "qd",
            expected: tau.len(),
            found: qd.len(),
        });
    }
    if !t.is_finite() {
        return Err(EnergyError::NonFinite("t"));
    }
    if !tau.iter().all(|v| v.is_finite()) {
        return Err(EnergyError::NonFinite("tau"));
    }
    if !qd.iter().all(|v| v.is_finite()) {
        return Err(EnergyError::NonFinite("qd"));
    }
    if !(params.r_kt2.is_finite() && params.p_overhead.is_finite()) {
        return Err(EnergyError::NonFinite("params"));
    }
    let mechanical: f64 = tau.iter().zip(qd).map(|(a, b)| a * b).sum();
    let joule = params.r_kt2 * tau.iter().map(|a| a * a).sum::<f64>();
    let overhead = params.p_overhead;
    Ok(PowerBreakdown {
        t,
        mechanical,
        joule,
        overhead,
        total: mechanical + joule + overhead,
    })
}

/// Power at every trajectory sample, with torques from inverse dynamics.
/// Samples are evaluated in parallel; each result depends only on its own
/// sample, so the output matches a sequential evaluation bit for bit.
pub fn power_profile(
    traj: &Trajectory,
    model: &RobotModel,
    params: &ElectricalParams,
) -> Result<Vec<PowerBreakdown>, EnergyError> {
    if traj.dof() != model.dof() {
        return Err(EnergyError::DimensionMismatch {
            what: "trajectory",
            expected: model.dof(),
            found: traj.dof(),
        });
    }
    if !traj.has_velocities() {
        return Err(EnergyError::MissingDerivatives("velocities"));
    }
    if !traj.has_accelerations() {
        return Err(EnergyError::MissingDerivatives("accelerations"));
    }
    traj.points()
        .par_iter()
        .map(|p| {
            let qd = p.qd.as_deref().expect("checked above");
            let qdd = p.qdd.as_deref().expect("checked above");
            let tau = rnea(model, &JointState::from_slices(&p.q, qd, qdd))?;
            instantaneous_power(p.t, tau.as_slice(), qd, params)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationRule {
    /// `E = Σ pᵢ (tᵢ₊₁ − tᵢ)`; the last sample carries no weight.
    #[default]
    LeftRiemann,
    Trapezoid,
}

impl fmt::Display for IntegrationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntegrationRule::LeftRiemann => "left-riemann",
            IntegrationRule::Trapezoid => "trapezoid",
        })
    }
}

impl FromStr for IntegrationRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "left-riemann" | "left_riemann" => Ok(IntegrationRule::LeftRiemann),
            "trapezoid" => Ok(IntegrationRule::Trapezoid),
            other => Err(format!(
                "unknown integration rule `{other}` (left-riemann, trapezoid)"
            )),
        }
    }
}

/// Integrated energy of a power profile, in joules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub total_energy: f64,
    pub mechanical_energy: f64,
    pub joule_energy: f64,
    pub overhead_energy: f64,
    pub duration: f64,
    /// `overhead_energy / total_energy`; `None` unless the total is positive.
    pub overhead_fraction: Option<f64>,
    pub integration_rule: IntegrationRule,
    pub samples: usize,
}

pub fn trajectory_energy(
    profile: &[PowerBreakdown],
    rule: IntegrationRule,
) -> Result<EnergyReport, EnergyError> {
    if profile.is_empty() {
        return Err(EnergyError::EmptyProfile);
    }
    for (index, w) in profile.windows(2).enumerate() {
        if w[1].t.partial_cmp(&w[0].t) != Some(std::cmp::Ordering::Greater) {
            return Err(EnergyError::NonMonotonicProfile { index: index + 1 });
        }
    }
    // Fixed left-to-right summation order.
    let mut sums = [0.0f64; 4];
    for w in profile.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dt = b.t - a.t;
        let terms = [
            (a.total, b.total),
            (a.mechanical, b.mechanical),
            (a.joule, b.joule),
            (a.overhead, b.overhead),
        ];
        for (sum, (pa, pb)) in sums.iter_mut().zip(terms) {
            *sum += match rule {
                IntegrationRule::LeftRiemann => pa * dt,
                IntegrationRule::Trapezoid => 0.5 * (pa + pb) * dt,
            };
        }
    }
    let [total, mechanical, joule, overhead] = sums;
    Ok(EnergyReport {
        total_energy: total,
        mechanical_energy: mechanical,
        joule_energy: joule,
        overhead_energy: overhead,
        duration: profile[profile.len() - 1].t - profile[0].t,
        overhead_fraction: (total > 0.0).then(|| overhead / total),
        integration_rule: rule,
        samples: profile.len(),
    })
}

pub fn energy_of_trajectory(
    traj: &Trajectory,
    model: &RobotModel,
    params: &ElectricalParams,
    rule: IntegrationRule,
) -> Result<EnergyReport, EnergyError> {
    trajectory_energy(&power_profile(traj, model, params)?, rule)
}

/// Energy of the trajectory played `s` times slower.
pub fn energy_at_scale(
    traj: &Trajectory,
    model: &RobotModel,
    params: &ElectricalParams,
    rule: IntegrationRule,
    s: f64,
) -> Result<EnergyReport, EnergyError> {
    if !(s.is_finite() && s > 0.0) {
        return Err(EnergyError::InvalidScale(s));
    }
    energy_of_trajectory(&time_scale(traj, s)?, model, params, rule)
}

/// Finite-difference estimate of `dE/ds` with a step-halving self check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleGradient {
    pub scale: f64,
    pub energy: f64,
    /// Step `h = 1e-4·s` of the coarse central difference.
    pub step: f64,
    pub derivative_h: f64,
    pub derivative_half_h: f64,
    /// Richardson extrapolation of the two quotients.
    pub derivative: f64,
    pub relative_disagreement: f64,
    pub consistent: bool,
    pub warnings: Vec<String>,
}

pub fn energy_gradient_wrt_scale(
    traj: &Trajectory,
    model: &RobotModel,
    params: &ElectricalParams,
    rule: IntegrationRule,
    s: f64,
) -> Result<ScaleGradient, EnergyError> {
    if !(s.is_finite() && s > 0.0) {
        return Err(EnergyError::InvalidScale(s));
    }
    let energy = |x: f64| energy_at_scale(traj, model, params, rule, x).map(|r| r.total_energy);
    let h = GRADIENT_RELATIVE_STEP * s;
    let central =
        |h: f64| -> Result<f64, EnergyError> { Ok((energy(s + h)? - energy(s - h)?) / (2.0 * h)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    let scale = coarse.abs().max(fine.abs());
    let relative_disagreement = if scale == 0.0 {
        0.0
    } else {
        (coarse - fine).abs() / scale
    };
    let consistent = relative_disagreement <= RICHARDSON_TOLERANCE;

    let mut warnings = Vec::new();
    if !consistent {
        warnings.push(format!(
            "difference quotients at h and h/2 disagree by {relative_disagreement:.3e} (tolerance {RICHARDSON_TOLERANCE:e})"
        ));
    }
    let gaps = traj.timing_gaps(TIMING_GAP_RATIO);
    if !gaps.is_empty() {
        let list: Vec<String> = gaps
            .iter()
            .map(|&i| format!("[{}, {}]", traj.points()[i].t, traj.points()[i + 1].t))
            .collect();
        warnings.push(format!(
            "timestamp discontinuity: interval(s) {} exceed {TIMING_GAP_RATIO}x the median step; the energy objective is not a smooth function of the samples",
            list.join(", ")
        ));
    }
    Ok(ScaleGradient {
        scale: s,
        energy: energy(s)?,
        step: h,
        derivative_h: coarse,
        derivative_half_h: fine,
        derivative: (4.0 * fine - coarse) / 3.0,
        relative_disagreement,
        consistent,
        warnings,
    })
}

/// Golden-section search for the energy-minimising time scale on
/// `[s_min, s_max]`, to a bracket width of `1e-4·(s_max − s_min)`. The
/// bracket midpoint is compared with both endpoints so a monotone objective
/// returns the endpoint itself.
pub fn optimal_time_scale(
    traj: &Trajectory,
    model: &RobotModel,
    params: &ElectricalParams,
    rule: IntegrationRule,
    s_min: f64,
    s_max: f64,
) -> Result<(f64, EnergyReport), EnergyError> {
    if !(s_min.is_finite() && s_max.is_finite() && 0.0 < s_min && s_min < s_max) {
        return Err(EnergyError::InvalidInterval {
            min: s_min,
            max: s_max,
        });
    }
    let eval = |s: f64| energy_at_scale(traj, model, params, rule, s);
    let tolerance = 1e-4 * (s_max - s_min);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;

    let (mut a, mut b) = (s_min, s_max);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c)?.total_energy;
    let mut fd = eval(d)?.total_energy;
    while b - a > tolerance {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?.total_energy;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?.total_energy;
        }
    }

    let mut best = (s_min, eval(s_min)?);
    for s in [0.5 * (a + b), s_max] {
        let report = eval(s)?;
        if report.total_energy < best.1.total_energy {
            best = (s, report);
        }
    }
    Ok(best)
}

/// CSV with columns `t,mechanical,joule,overhead,total` (watts).
pub fn profile_to_csv(profile: &[PowerBreakdown]) -> String {
    let mut out = String::from("t,mechanical,joule,overhead,total\n");
    for p in profile {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.t, p.mechanical, p.joule, p.overhead, p.total
        ));
    }
    out
}

#[cfg(test)]
mod tests;
