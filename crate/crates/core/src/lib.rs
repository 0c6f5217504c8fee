//! Energy estimation for robot manipulators.
//!
//! Joint torques along a trajectory come from inverse rigid-body dynamics.
//! Electrical power is modelled as mechanical power `τᵀq̇`, a resistive loss
//! `r·τᵀτ` with one lumped coefficient shared by all motors, and a constant
//! overhead. The two electrical parameters are identified from static-pose
//! power readings, and the power profile is summed into trajectory energy.

pub mod dynamics;
pub mod energy;
pub mod identification;
pub mod model;
pub mod spatial;
pub mod trajectory;

pub use dynamics::{
    coriolis_torque, gravity_torque, mass_matrix, rnea, DynamicsError, JointState, TorqueVector,
};
pub use energy::{
    energy_at_scale, energy_gradient_wrt_scale, energy_of_trajectory, instantaneous_power,
    optimal_time_scale, power_profile, trajectory_energy, ElectricalParams, EnergyError,
    EnergyReport, IntegrationRule, MotorConstants, PowerBreakdown, ScaleGradient,
};
pub use identification::{
    identification_report, identify_method1, identify_method2, parse_measurements_csv,
    predict_static_power, IdentificationError, IdentificationResult, Method, ParamsFile,
    StaticPoseMeasurement,
};
pub use model::{
    parse_urdf, validate_model, Diagnostic, JointKind, JointSpec, Link, LinkInertia, ModelError,
    RobotModel, Severity,
};
