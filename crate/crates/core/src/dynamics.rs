//! Inverse dynamics by the recursive Newton-Euler algorithm, and the
//! `M(q) q̈ + C(q̇, q) + G(q) = τ` decomposition built on top of it.
//!
//! Friction is not modelled: the returned torques are purely inertial and
//! gravitational.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector, Vector3};
use thiserror::Error;

use crate::model::{JointKind, RobotModel};
use crate::spatial::{Force, Motion};

/// Relative asymmetry of the assembled mass matrix above which the
/// recursion is considered broken.
pub const MASS_MATRIX_SYMMETRY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("{what} has length {actual}, model has {expected} degrees of freedom")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("{what} contains a non-finite entry")]
    NonFinite { what: &'static str },
    #[error("mass matrix asymmetry {asymmetry:e} exceeds tolerance")]
    AsymmetricMassMatrix { asymmetry: f64 },
}

/// Joint positions, velocities and accelerations.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub q: DVector<f64>,
    pub qd: DVector<f64>,
    pub qdd: DVector<f64>,
}

impl JointState {
    pub fn new(q: DVector<f64>, qd: DVector<f64>, qdd: DVector<f64>) -> Self {
        Self { q, qd, qdd }
    }

    pub fn from_slices(q: &[f64], qd: &[f64], qdd: &[f64]) -> Self {
        Self::new(
            DVector::from_column_slice(q),
            DVector::from_column_slice(qd),
            DVector::from_column_slice(qdd),
        )
    }

    pub fn at_rest(q: &[f64]) -> Self {
        let n = q.len();
        Self::new(
            DVector::from_column_slice(q),
            DVector::zeros(n),
            DVector::zeros(n),
        )
    }
}

/// Joint torques (N·m) or forces (N), one per degree of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct TorqueVector(pub DVector<f64>);

impl TorqueVector {
    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn squared_norm(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }
}

impl Deref for TorqueVector {
    type Target = DVector<f64>;
    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

fn check(model: &RobotModel, what: &'static str, v: &[f64]) -> Result<(), DynamicsError> {
    if v.len() != model.dof() {
        return Err(DynamicsError::DimensionMismatch {
            what,
            expected: model.dof(),
            actual: v.len(),
        });
    }
    if !v.iter().all(|x| x.is_finite()) {
        return Err(DynamicsError::NonFinite { what });
    }
    Ok(())
}

/// Joint torques needed to realise `state` under the model's gravity.
pub fn rnea(model: &RobotModel, state: &JointState) -> Result<TorqueVector, DynamicsError> {
    check(model, "q", state.q.as_slice())?;
    check(model, "qd", state.qd.as_slice())?;
    check(model, "qdd", state.qdd.as_slice())?;
    Ok(recursive_newton_euler(
        model,
        state.q.as_slice(),
        Some(state.qd.as_slice()),
        state.qdd.as_slice(),
        &model.gravity(),
    ))
}

fn motion_axis(model: &RobotModel, joint: usize) -> Motion {
    let spec = &model.joints()[joint];
    if spec.kind == JointKind::Prismatic {
        Motion::new(Vector3::zeros(), spec.axis)
    } else {
        Motion::new(spec.axis, Vector3::zeros())
    }
}

/// `qd = None` skips the velocity-product terms entirely.
fn recursive_newton_euler(
    model: &RobotModel,
    q: &[f64],
    qd: Option<&[f64]>,
    qdd: &[f64],
    gravity: &Vector3<f64>,
) -> TorqueVector {
    let bodies = model.bodies();
    let local = model.local_transforms(q);
    let mut vel = vec![Motion::zero(); bodies.len()];
    let mut acc = vec![Motion::zero(); bodies.len()];
    let mut force = vec![Force::zero(); bodies.len()];
    let xforms: Vec<_> = local.iter().map(|t| t.to_child_motion_map()).collect();

    // Gravity enters as a fictitious upward acceleration of the base.
    let base_acc = Motion::new(Vector3::zeros(), -gravity);

    for (i, body) in bodies.iter().enumerate() {
        let (v_parent, a_parent) = match body.parent {
            None => (Motion::zero(), base_acc),
            Some(p) => (vel[p], acc[p]),
        };
        let x = &xforms[i];
        let mut v = x.apply_motion(&v_parent);
        let mut a = x.apply_motion(&a_parent);
        if let (Some(j), Some(d)) = (body.joint, body.dof_index) {
            let s = motion_axis(model, j);
            let joint_vel = s * qd.map_or(0.0, |qd| qd[d]);
            v = v + joint_vel;
            a = a + s * qdd[d] + v.cross_motion(&joint_vel);
        }
        vel[i] = v;
        acc[i] = a;
        force[i] = body.inertia.apply(&a) + v.cross_force(&body.inertia.apply(&v));
    }

    let mut tau = DVector::zeros(model.dof());
    for (i, body) in bodies.iter().enumerate().rev() {
        if let (Some(j), Some(d)) = (body.joint, body.dof_index) {
            tau[d] = motion_axis(model, j).dot(&force[i]);
        }
        if let Some(p) = body.parent {
            let carried = xforms[i].inv_apply_force(&force[i]);
            force[p] += carried;
        }
    }
    TorqueVector(tau)
}

/// `G(q)`: torques holding the pose static against gravity.
pub fn gravity_torque(model: &RobotModel, q: &[f64]) -> Result<TorqueVector, DynamicsError> {
    check(model, "q", q)?;
    let zeros = vec![0.0; model.dof()];
    Ok(recursive_newton_euler(
        model,
        q,
        None,
        &zeros,
        &model.gravity(),
    ))
}

/// `C(q̇, q)`: velocity-product torques with gravity and acceleration removed.
pub fn coriolis_torque(
    model: &RobotModel,
    q: &[f64],
    qd: &[f64],
) -> Result<TorqueVector, DynamicsError> {
    check(model, "q", q)?;
    check(model, "qd", qd)?;
    let zeros = vec![0.0; model.dof()];
    Ok(recursive_newton_euler(
        model,
        q,
        Some(qd),
        &zeros,
        &Vector3::zeros(),
    ))
}

/// Joint-space inertia matrix, one RNEA pass per column.
pub fn mass_matrix(model: &RobotModel, q: &[f64]) -> Result<DMatrix<f64>, DynamicsError> {
    check(model, "q", q)?;
    let n = model.dof();
    let mut m = DMatrix::zeros(n, n);
    let mut unit = vec![0.0; n];
    for j in 0..n {
        unit[j] = 1.0;
        let column = recursive_newton_euler(model, q, None, &unit, &Vector3::zeros());
        m.set_column(j, &column.0);
        unit[j] = 0.0;
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let asymmetry = (&m - m.transpose()).amax() / scale;
    if asymmetry > MASS_MATRIX_SYMMETRY_TOLERANCE {
        return Err(DynamicsError::AsymmetricMassMatrix { asymmetry });
    }
    Ok((&m + m.transpose()) * 0.5)
}

/// Total kinetic energy from the outward velocity recursion.
pub fn kinetic_energy(model: &RobotModel, q: &[f64], qd: &[f64]) -> Result<f64, DynamicsError> {
    check(model, "q", q)?;
    check(model, "qd", qd)?;
    let bodies = model.bodies();
    let local = model.local_transforms(q);
    let mut vel = vec![Motion::zero(); bodies.len()];
    let mut energy = 0.0;
    for (i, body) in bodies.iter().enumerate() {
        let parent = body.parent.map_or(Motion::zero(), |p| vel[p]);
        let mut v = local[i].to_child_motion_map().apply_motion(&parent);
        if let (Some(j), Some(d)) = (body.joint, body.dof_index) {
            v = v + motion_axis(model, j) * qd[d];
        }
        vel[i] = v;
        energy += body.inertia.kinetic_energy(&v);
    }
    Ok(energy)
}

/// Gravitational potential energy `−Σ mᵢ g·cᵢ` with world-frame centres of
/// mass `cᵢ`, zero at the base origin.
pub fn potential_energy(model: &RobotModel, q: &[f64]) -> Result<f64, DynamicsError> {
    check(model, "q", q)?;
    let poses = model
        .forward_kinematics(q)
        .expect("joint vector length checked above");
    let g = model.gravity();
    Ok(model
        .links()
        .iter()
        .zip(&poses)
        .filter_map(|(link, pose)| link.inertia.map(|i| (i, pose)))
        .map(|(i, pose)| -i.mass * g.dot(&pose.transform_point(&i.com)))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_urdf;
    use std::f64::consts::FRAC_PI_2;

    fn pendulum() -> RobotModel {
        parse_urdf(&robot_energy_testkit::urdf::single_pendulum(
            robot_energy_testkit::pendulum::PlanarLink::point_mass(1.0, 1.0),
        ))
        .unwrap()
    }

    #[test]
    fn no_gravity_no_motion_no_torque() {
        let model = parse_urdf(robot_energy_testkit::urdf::SLIDER_ARM)
            .unwrap()
            .with_gravity(Vector3::zeros())
            .unwrap();
        let tau = rnea(&model, &JointState::at_rest(&[0.3, -1.2])).unwrap();
        assert_eq!(tau.0, DVector::zeros(2));
    }

    #[test]
    fn horizontal_pendulum_holds_mgl() {
        let model = pendulum();
        let tau = rnea(&model, &JointState::at_rest(&[FRAC_PI_2])).unwrap();
        assert!((tau[0] - 9.81).abs() < 1e-12);
        let g = gravity_torque(&model, &[FRAC_PI_2]).unwrap();
        assert!((g[0] - 9.81).abs() < 1e-12);
    }

    #[test]
    fn hanging_pendulum_needs_no_torque() {
        let g = gravity_torque(&pendulum(), &[0.0]).unwrap();
        assert!(g[0].abs() < 1e-15);
    }

    #[test]
    fn single_joint_has_no_velocity_torque() {
        let model = pendulum();
        for qd in [-3.0, 0.5, 7.0] {
            let c = coriolis_torque(&model, &[0.4], &[qd]).unwrap();
            assert!(c[0].abs() < 1e-12, "qd = {qd}: {}", c[0]);
        }
        let c = coriolis_torque(&model, &[0.4], &[0.0]).unwrap();
        assert_eq!(c[0], 0.0);
    }

    #[test]
    fn point_mass_pendulum_inertia() {
        let model = pendulum();
        for q in [0.0, 0.7, 2.5] {
            let m = mass_matrix(&model, &[q]).unwrap();
            assert!((m[(0, 0)] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prismatic_carriage_mass_and_gravity() {
        // slide along x carries both bodies; gravity along -z does no work on it
        let model = parse_urdf(robot_energy_testkit::urdf::SLIDER_ARM).unwrap();
        let m = mass_matrix(&model, &[0.2, 0.9]).unwrap();
        assert!((m[(0, 0)] - 4.5).abs() < 1e-12);
        let g = gravity_torque(&model, &[0.2, 0.9]).unwrap();
        assert!(g[0].abs() < 1e-12 && g[1].abs() < 1e-12);
    }

    #[test]
    fn dimension_and_finiteness_errors() {
        let model = pendulum();
        assert_eq!(
            gravity_torque(&model, &[0.0, 1.0]),
            Err(DynamicsError::DimensionMismatch {
                what: "q",
                expected: 1,
                actual: 2
            })
        );
        assert_eq!(
            rnea(
                &model,
                &JointState::from_slices(&[0.0], &[f64::NAN], &[0.0])
            ),
            Err(DynamicsError::NonFinite { what: "qd" })
        );
        assert!(mass_matrix(&model, &[]).is_err());
    }

    #[test]
    fn energies_of_pendulum() {
        let model = pendulum();
        assert!((kinetic_energy(&model, &[0.3], &[2.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!((potential_energy(&model, &[0.0]).unwrap() + 9.81).abs() < 1e-12);
        assert!(potential_energy(&model, &[FRAC_PI_2]).unwrap().abs() < 1e-12);
    }
}
