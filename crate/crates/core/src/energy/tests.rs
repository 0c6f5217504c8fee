use nalgebra::Vector3;
use proptest::prelude::*;
use robot_energy_testkit::pendulum::{PlanarLink, SinglePendulum};
use robot_energy_testkit::trajectories::{
    sampled_csv, sine_swing, static_hold, uniform_acceleration, uniform_times,
};
use robot_energy_testkit::urdf;

use super::*;
use crate::dynamics::gravity_torque;
use crate::model::parse_urdf;
use crate::trajectory::parse_trajectory_csv;

const REFERENCE_METHOD2: ElectricalParams = ElectricalParams {
    r_kt2: 0.0036,
    p_overhead: 88.04,
};
const REFERENCE_METHOD1: ElectricalParams = ElectricalParams {
    r_kt2: 0.0,
    p_overhead: 92.3,
};

fn pendulum() -> RobotModel {
    parse_urdf(&urdf::single_pendulum(PlanarLink::point_mass(1.0, 1.0))).unwrap()
}

fn weightless_pendulum() -> RobotModel {
    pendulum().with_gravity(Vector3::zeros()).unwrap()
}

fn traj(csv: &str) -> Trajectory {
    parse_trajectory_csv(csv).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn current_examples() {
    let unit = MotorConstants::uniform(2, 1.0, 0.0).unwrap();
    assert_eq!(motor_current(&[0.0, 0.0], &unit).unwrap(), vec![0.0, 0.0]);
    assert_eq!(motor_current(&[1.0, -1.0], &unit).unwrap(), vec![1.0, -1.0]);
    let half = MotorConstants::uniform(1, 0.5, 0.0).unwrap();
    assert_eq!(motor_current(&[2.0], &half).unwrap(), vec![4.0]);
}

#[test]
fn torque_constant_must_be_positive() {
    assert_eq!(
        MotorConstants::uniform(1, 0.0, 1.0).unwrap_err(),
        EnergyError::NonPositiveTorqueConstant {
            index: 0,
            value: 0.0
        }
    );
    let tampered = MotorConstants {
        kt: vec![1.0, -2.0],
        kemf: vec![1.0; 2],
        r: vec![0.0; 2],
        l: vec![0.0; 2],
    };
    assert!(matches!(
        motor_current(&[1.0, 1.0], &tampered),
        Err(EnergyError::NonPositiveTorqueConstant { index: 1, .. })
    ));
    assert!(matches!(
        motor_voltage(&[1.0, 1.0], &[0.0, 0.0], &tampered),
        Err(EnergyError::NonPositiveTorqueConstant { index: 1, .. })
    ));
    assert!(MotorConstants::new(vec![1.0], vec![1.0], vec![-0.1], vec![0.0]).is_err());
    assert!(MotorConstants::new(vec![1.0], vec![1.0, 1.0], vec![0.0], vec![0.0]).is_err());
}

#[test]
fn voltage_examples() {
    let no_r = MotorConstants::uniform(2, 0.7, 0.0).unwrap();
    assert_eq!(
        motor_voltage(&[5.0, -3.0], &[0.0, 0.0], &no_r).unwrap(),
        vec![0.0, 0.0]
    );

    let c = MotorConstants::new(vec![1.0], vec![1.0], vec![0.5], vec![1e-3]).unwrap();
    assert_eq!(motor_voltage(&[4.0], &[2.0], &c).unwrap(), vec![4.0]);

    let emf =
        MotorConstants::new(vec![0.3, 0.9], vec![0.2, 1.5], vec![2.0, 2.0], vec![0.0; 2]).unwrap();
    assert_eq!(
        motor_voltage(&[0.0, 0.0], &[3.0, -1.0], &emf).unwrap(),
        vec![0.2 * 3.0, -1.5]
    );
}

#[test]
fn power_examples() {
    assert_eq!(electrical_power(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 0.0);
    assert_eq!(electrical_power(&[2.0, 3.0], &[1.0, 1.0]).unwrap(), 5.0);
    assert!(electrical_power(&[1.0], &[1.0, 2.0]).is_err());
}

fn eq7_direct(tau: &[f64], qd: &[f64], c: &MotorConstants) -> f64 {
    (0..tau.len())
        .map(|j| {
            tau[j] / c.kt[j] * c.kemf[j] * qd[j] + tau[j] / c.kt[j] * c.r[j] / c.kt[j] * tau[j]
        })
        .sum()
}

proptest! {
    #[test]
    fn detailed_path_matches_direct_expansion(
        tau in prop::collection::vec(-80.0f64..80.0, 7),
        qd in prop::collection::vec(-2.5f64..2.5, 7),
        kt in prop::collection::vec(0.05f64..2.0, 7),
        kemf in prop::collection::vec(0.05f64..2.0, 7),
        r in prop::collection::vec(0.0f64..5.0, 7),
    ) {
        let c = MotorConstants::new(kt, kemf, r, vec![0.0; 7]).unwrap();
        let i = motor_current(&tau, &c).unwrap();
        let v = motor_voltage(&tau, &qd, &c).unwrap();
        let direct = eq7_direct(&tau, &qd, &c);
        let p = electrical_power(&i, &v).unwrap();
        prop_assert!((p - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }

    // With K_emf = K_t and one shared R the detailed path collapses to the
    // lumped model plus overhead.
    #[test]
    fn lumped_model_matches_detailed_path(
        tau in prop::collection::vec(-80.0f64..80.0, 7),
        qd in prop::collection::vec(-2.5f64..2.5, 7),
        kt in 0.05f64..2.0,
        r in 0.0f64..5.0,
        p_overhead in 0.0f64..200.0,
    ) {
        let c = MotorConstants::uniform(7, kt, r).unwrap();
        let detailed = electrical_power(&motor_current(&tau, &c).unwrap(), &motor_voltage(&tau, &qd, &c).unwrap()).unwrap()
            + p_overhead;
        let params = ElectricalParams::new(r / (kt * kt), p_overhead).unwrap();
        let lumped = instantaneous_power(0.0, &tau, &qd, &params).unwrap();
        prop_assert!((lumped.total - detailed).abs() <= 1e-12 * detailed.abs().max(1.0));
        prop_assert!(lumped.joule >= 0.0);
        prop_assert_eq!(lumped.total, lumped.mechanical + lumped.joule + lumped.overhead);
    }

    #[test]
    fn zero_resistance_reduces_to_overhead_model(
        tau in prop::collection::vec(-80.0f64..80.0, 7),
        qd in prop::collection::vec(-2.5f64..2.5, 7),
        c in 0.0f64..200.0,
    ) {
        let overhead_only = |tau: &[f64], qd: &[f64], c: f64| -> f64 {
            let mut p = c;
            for j in 0..tau.len() {
                p += tau[j] * qd[j];
            }
            p
        };
        let b = instantaneous_power(1.0, &tau, &qd, &ElectricalParams::overhead_only(c).unwrap()).unwrap();
        prop_assert!((b.total - overhead_only(&tau, &qd, c)).abs() <= 1e-12 * b.total.abs().max(1.0));
        prop_assert_eq!(b.joule, 0.0);
    }
}

#[test]
fn instantaneous_power_examples() {
    let zero = [0.0; 7];
    let b = instantaneous_power(0.0, &zero, &zero, &REFERENCE_METHOD2).unwrap();
    assert_eq!(b.total, 88.04);

    let mut tau = [0.0; 7];
    tau[0] = 10.0;
    let b = instantaneous_power(0.0, &tau, &zero, &REFERENCE_METHOD2).unwrap();
    assert!((b.total - 88.40).abs() < 1e-12);
    assert!((b.joule - 0.36).abs() < 1e-15);

    let gravity_like = [3.0, -40.0, 1.0, 18.0, 0.5, 2.0, 0.0];
    let b = instantaneous_power(0.0, &gravity_like, &zero, &REFERENCE_METHOD1).unwrap();
    assert_eq!(b.total, 92.3);
}

#[test]
fn instantaneous_power_rejects_bad_input() {
    let p = REFERENCE_METHOD2;
    assert_eq!(
        instantaneous_power(0.0, &[f64::NAN], &[0.0], &p),
        Err(EnergyError::NonFinite("tau"))
    );
    assert_eq!(
        instantaneous_power(0.0, &[0.0], &[f64::INFINITY], &p),
        Err(EnergyError::NonFinite("qd"))
    );
    assert!(instantaneous_power(0.0, &[0.0], &[0.0, 1.0], &p).is_err());
}

#[test]
fn params_invariants() {
    assert!(ElectricalParams::new(-1e-3, 80.0).is_err());
    assert!(ElectricalParams::new(0.0, -1.0).is_err());
    assert!(ElectricalParams::new(f64::NAN, 1.0).is_err());
    assert_eq!(
        ElectricalParams::new(0.0036, 88.04).unwrap(),
        REFERENCE_METHOD2
    );
}

#[test]
fn static_pose_profile_is_gravity_quadratic() {
    let model = parse_urdf(urdf::SLIDER_ARM)
        .unwrap()
        .with_gravity(Vector3::new(0.0, -9.81, 0.0))
        .unwrap();
    let q = [0.3, 1.1];
    let t = traj(&static_hold(&q, &uniform_times(0.0, 2.0, 20)));
    let g2 = gravity_torque(&model, &q).unwrap().squared_norm();
    assert!(g2 > 1.0);
    for b in power_profile(&t, &model, &REFERENCE_METHOD2).unwrap() {
        assert_eq!(b.mechanical, 0.0);
        assert!(rel(b.joule, 0.0036 * g2) < 1e-12);
    }
}

#[test]
fn weightless_rest_is_pure_overhead() {
    let t = traj(&static_hold(&[0.8], &uniform_times(0.0, 1.0, 10)));
    for b in power_profile(&t, &weightless_pendulum(), &REFERENCE_METHOD2).unwrap() {
        assert_eq!((b.mechanical, b.joule, b.overhead), (0.0, 0.0, 88.04));
    }
}

#[test]
fn pendulum_mechanical_power_sign_follows_oracle() {
    let oracle = SinglePendulum {
        link: PlanarLink::point_mass(1.0, 1.0),
        gravity: 9.81,
    };
    let swing = sine_swing(1.2, 2.0, 0.0);
    let times = uniform_times(0.0, 2.0 * std::f64::consts::PI / 2.0, 400);
    let profile = power_profile(
        &traj(&sampled_csv(&times, &swing)),
        &pendulum(),
        &REFERENCE_METHOD2,
    )
    .unwrap();
    let mut sign_changes = 0;
    for (b, w) in profile.iter().zip(profile.iter().skip(1)) {
        if b.mechanical.signum() != w.mechanical.signum() {
            sign_changes += 1;
        }
    }
    assert!(sign_changes >= 2);
    for b in &profile {
        let (q, qd, qdd) = swing(b.t);
        let expected = oracle.inverse_dynamics(q[0], qd[0], qdd[0]) * qd[0];
        assert!((b.mechanical - expected).abs() < 1e-9);
        if expected.abs() > 1e-6 {
            assert_eq!(b.mechanical.signum(), expected.signum());
        }
    }
}

#[test]
fn parallel_profile_matches_sequential_bitwise() {
    let model = parse_urdf(urdf::SLIDER_ARM).unwrap();
    let times = uniform_times(0.0, 3.0, 3000);
    let t = traj(&sampled_csv(
        &times,
        robot_energy_testkit::trajectories::double_swing,
    ));
    let parallel = power_profile(&t, &model, &REFERENCE_METHOD2).unwrap();
    let sequential: Vec<PowerBreakdown> = t
        .points()
        .iter()
        .map(|p| {
            let tau = rnea(
                &model,
                &JointState::from_slices(&p.q, p.qd.as_ref().unwrap(), p.qdd.as_ref().unwrap()),
            )
            .unwrap();
            instantaneous_power(
                p.t,
                tau.as_slice(),
                p.qd.as_ref().unwrap(),
                &REFERENCE_METHOD2,
            )
            .unwrap()
        })
        .collect();
    assert_eq!(parallel, sequential);
}

#[test]
fn profile_errors() {
    let model = pendulum();
    let bare = traj("t,q_1\n0,0\n1,0\n2,0\n");
    assert_eq!(
        power_profile(&bare, &model, &REFERENCE_METHOD2),
        Err(EnergyError::MissingDerivatives("velocities"))
    );
    let two = traj(&static_hold(&[0.0, 0.0], &[0.0, 1.0]));
    assert!(matches!(
        power_profile(&two, &model, &REFERENCE_METHOD2),
        Err(EnergyError::DimensionMismatch {
            what: "trajectory",
            expected: 1,
            found: 2
        })
    ));
}

fn flat_profile(times: &[f64], power: impl Fn(f64) -> f64) -> Vec<PowerBreakdown> {
    times
        .iter()
        .map(|&t| PowerBreakdown {
            t,
            mechanical: power(t),
            joule: 0.0,
            overhead: 0.0,
            total: power(t),
        })
        .collect()
}

#[test]
fn constant_power_integrates_exactly() {
    let times = uniform_times(0.0, 4.0, 16);
    let profile = flat_profile(&times, |_| 12.5);
    for rule in [IntegrationRule::LeftRiemann, IntegrationRule::Trapezoid] {
        let r = trajectory_energy(&profile, rule).unwrap();
        assert_eq!(r.total_energy, 50.0);
        assert_eq!(r.duration, 4.0);
    }
}

#[test]
fn single_sample_has_no_energy() {
    let r = trajectory_energy(
        &flat_profile(&[3.0], |_| 100.0),
        IntegrationRule::LeftRiemann,
    )
    .unwrap();
    assert_eq!(
        (r.total_energy, r.duration, r.overhead_fraction),
        (0.0, 0.0, None)
    );
}

#[test]
fn linear_ramp_integration() {
    let times = uniform_times(0.0, 10.0, 10_000);
    let profile = flat_profile(&times, |t| 10.0 * t);
    let trap = trajectory_energy(&profile, IntegrationRule::Trapezoid).unwrap();
    assert!(rel(trap.total_energy, 500.0) < 1e-9);
    let left = trajectory_energy(&profile, IntegrationRule::LeftRiemann).unwrap();
    // the O(Δt) bias of the left sum is exactly 50·Δt = 0.01 % here
    assert!(left.total_energy < 500.0);
    assert!(rel(left.total_energy, 500.0) <= 1e-4 * (1.0 + 1e-9));
}

#[test]
fn integration_errors() {
    assert_eq!(
        trajectory_energy(&[], IntegrationRule::LeftRiemann),
        Err(EnergyError::EmptyProfile)
    );
    let backwards = flat_profile(&[0.0, 1.0, 0.5], |_| 1.0);
    assert_eq!(
        trajectory_energy(&backwards, IntegrationRule::Trapezoid),
        Err(EnergyError::NonMonotonicProfile { index: 2 })
    );
}

#[test]
fn rule_names() {
    assert_eq!(
        "left-riemann".parse::<IntegrationRule>().unwrap(),
        IntegrationRule::LeftRiemann
    );
    assert_eq!(
        "trapezoid".parse::<IntegrationRule>().unwrap(),
        IntegrationRule::Trapezoid
    );
    assert!("simpson".parse::<IntegrationRule>().is_err());
    assert_eq!(IntegrationRule::default(), IntegrationRule::LeftRiemann);
    assert_eq!(
        serde_json::to_string(&IntegrationRule::LeftRiemann).unwrap(),
        "\"left_riemann\""
    );
}

#[test]
fn static_hold_energy_closed_form() {
    let model = pendulum();
    let q = [1.0];
    let duration = 7.25;
    let t = traj(&static_hold(&q, &uniform_times(0.0, duration, 290)));
    let g2 = gravity_torque(&model, &q).unwrap().squared_norm();
    let r =
        energy_of_trajectory(&t, &model, &REFERENCE_METHOD2, IntegrationRule::LeftRiemann).unwrap();
    assert!(rel(r.total_energy, (88.04 + 0.0036 * g2) * duration) < 1e-9);
    assert!(
        rel(
            r.total_energy,
            r.mechanical_energy + r.joule_energy + r.overhead_energy
        ) < 1e-9
    );
    assert!(rel(r.overhead_energy, 88.04 * duration) < 1e-9);

    let m1 =
        energy_of_trajectory(&t, &model, &REFERENCE_METHOD1, IntegrationRule::LeftRiemann).unwrap();
    assert!(rel(m1.total_energy, 92.3 * duration) < 1e-9);
    assert_eq!(m1.overhead_fraction, Some(1.0));
}

#[test]
fn time_reversal_symmetry() {
    let model = pendulum();
    let swing = sine_swing(0.9, 1.7, 0.3);
    let duration = 2.5;
    let times = uniform_times(0.0, duration, 500);
    let forward = traj(&sampled_csv(&times, &swing));
    let reversed = traj(&sampled_csv(&times, |t| {
        let (q, qd, qdd) = swing(duration - t);
        (q, qd.into_iter().map(|v| -v).collect(), qdd)
    }));
    let rule = IntegrationRule::Trapezoid;
    let a = energy_of_trajectory(&forward, &model, &REFERENCE_METHOD2, rule).unwrap();
    let b = energy_of_trajectory(&reversed, &model, &REFERENCE_METHOD2, rule).unwrap();
    assert!(rel(b.joule_energy, a.joule_energy) < 1e-12);
    assert!(rel(b.overhead_energy, a.overhead_energy) < 1e-12);
    assert!(a.mechanical_energy.abs() > 0.1);
    assert!((b.mechanical_energy + a.mechanical_energy).abs() < 1e-9 * a.mechanical_energy.abs());
}

#[test]
fn energy_additivity_dyadic_exact() {
    // dyadic timestamps and powers keep every partial sum exact
    let times: Vec<f64> = (0..=64).map(|i| i as f64 * 0.125).collect();
    let profile = flat_profile(&times, |t| (t * 8.0).round() % 7.0 + 1.0);
    let whole = trajectory_energy(&profile, IntegrationRule::LeftRiemann).unwrap();
    for k in 0..profile.len() {
        let a = trajectory_energy(&profile[..=k], IntegrationRule::LeftRiemann).unwrap();
        let b = trajectory_energy(&profile[k..], IntegrationRule::LeftRiemann).unwrap();
        assert_eq!(
            a.total_energy + b.total_energy,
            whole.total_energy,
            "split at {k}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_additivity_and_overhead_proportionality(
        steps in prop::collection::vec(1e-3f64..0.2, 3..60),
        phase in 0.0f64..6.0,
        split in 0usize..1000,
        p_overhead in 0.0f64..150.0,
    ) {
        let mut times = vec![0.0];
        for dt in &steps {
            let next = times[times.len() - 1] + dt;
            times.push(next);
        }
        let model = pendulum();
        let params = ElectricalParams::new(0.0036, p_overhead).unwrap();
        let t = traj(&sampled_csv(&times, sine_swing(0.7, 2.3, phase)));
        let whole = energy_of_trajectory(&t, &model, &params, IntegrationRule::LeftRiemann).unwrap();
        let k = split % t.len();
        let (a, b) = t.split_at(k).unwrap();
        let ea = energy_of_trajectory(&a, &model, &params, IntegrationRule::LeftRiemann).unwrap();
        let eb = energy_of_trajectory(&b, &model, &params, IntegrationRule::LeftRiemann).unwrap();
        let sum = ea.total_energy + eb.total_energy;
        prop_assert!((sum - whole.total_energy).abs() <= 1e-12 * whole.total_energy.abs().max(1.0));
        prop_assert!((whole.overhead_energy / whole.duration - p_overhead).abs() <= 1e-12 * p_overhead.max(1.0));

        let s = 0.3 + (phase / 3.0);
        let scaled = energy_at_scale(&t, &model, &params, IntegrationRule::LeftRiemann, s).unwrap();
        prop_assert!((scaled.overhead_energy - s * whole.overhead_energy).abs() <= 1e-9 * whole.overhead_energy.max(1e-300));
    }
}

#[test]
fn static_hold_gradient_is_linear_in_scale() {
    let model = pendulum();
    let q = [0.6];
    let duration = 3.0;
    let t = traj(&static_hold(&q, &uniform_times(0.0, duration, 300)));
    let g2 = gravity_torque(&model, &q).unwrap().squared_norm();
    let grad = energy_gradient_wrt_scale(
        &t,
        &model,
        &REFERENCE_METHOD2,
        IntegrationRule::LeftRiemann,
        1.3,
    )
    .unwrap();
    let expected = (88.04 + 0.0036 * g2) * duration;
    assert!(rel(grad.derivative, expected) < 1e-6);
    assert!(rel(grad.derivative_h, expected) < 1e-6);
    assert!(grad.consistent);
    assert!(grad.warnings.is_empty());
}

#[test]
fn kinetic_only_gradient_is_negative() {
    let model = weightless_pendulum();
    let zero = ElectricalParams::new(0.0, 0.0).unwrap();
    let t = traj(&sampled_csv(
        &uniform_times(0.0, 1.0, 200),
        uniform_acceleration(1, 1.0),
    ));
    for s in [0.5, 1.0, 2.0] {
        let grad =
            energy_gradient_wrt_scale(&t, &model, &zero, IntegrationRule::LeftRiemann, s).unwrap();
        assert!(grad.derivative < 0.0, "s = {s}");
    }
}

#[test]
fn unit_scale_gradient_is_the_central_difference() {
    let model = pendulum();
    let t = traj(&sampled_csv(
        &uniform_times(0.0, 2.0, 400),
        sine_swing(0.5, 3.0, 0.2),
    ));
    let rule = IntegrationRule::Trapezoid;
    let grad = energy_gradient_wrt_scale(&t, &model, &REFERENCE_METHOD2, rule, 1.0).unwrap();
    let h = 1e-4;
    let e = |s: f64| {
        energy_at_scale(&t, &model, &REFERENCE_METHOD2, rule, s)
            .unwrap()
            .total_energy
    };
    assert_eq!(grad.derivative_h, (e(1.0 + h) - e(1.0 - h)) / (2.0 * h));
    assert!(grad.consistent);
    assert!(matches!(
        energy_gradient_wrt_scale(&t, &model, &REFERENCE_METHOD2, rule, 0.0),
        Err(EnergyError::InvalidScale(_))
    ));
}

#[test]
fn timing_gap_attaches_warning() {
    let model = pendulum();
    let mut times = uniform_times(0.0, 1.0, 100);
    for t in times.iter_mut().skip(51) {
        *t += 2.0;
    }
    let t = traj(&sampled_csv(&times, sine_swing(0.5, 3.0, 0.2)));
    let grad = energy_gradient_wrt_scale(
        &t,
        &model,
        &REFERENCE_METHOD2,
        IntegrationRule::LeftRiemann,
        1.0,
    )
    .unwrap();
    assert!(grad
        .warnings
        .iter()
        .any(|w| w.contains("timestamp discontinuity")));
}

#[test]
fn overhead_dominated_prefers_fastest() {
    let model = pendulum();
    let t = traj(&sampled_csv(
        &uniform_times(0.0, 4.0, 400),
        sine_swing(0.4, 1.5, 0.0),
    ));
    let (s, report) = optimal_time_scale(
        &t,
        &model,
        &REFERENCE_METHOD2,
        IntegrationRule::LeftRiemann,
        0.5,
        3.0,
    )
    .unwrap();
    assert_eq!(s, 0.5);
    assert_eq!(
        report,
        energy_at_scale(
            &t,
            &model,
            &REFERENCE_METHOD2,
            IntegrationRule::LeftRiemann,
            0.5
        )
        .unwrap()
    );
}

#[test]
fn kinetic_only_prefers_slowest() {
    let model = weightless_pendulum();
    let zero = ElectricalParams::new(0.0, 0.0).unwrap();
    let t = traj(&sampled_csv(
        &uniform_times(0.0, 1.0, 200),
        uniform_acceleration(1, 1.0),
    ));
    let (s, _) =
        optimal_time_scale(&t, &model, &zero, IntegrationRule::LeftRiemann, 0.5, 3.0).unwrap();
    assert_eq!(s, 3.0);
}

#[test]
fn interior_minimum_matches_grid_scan() {
    // E(s) ≈ r/s³ + ½/s² + p·s for a unit point mass under unit acceleration
    let model = weightless_pendulum();
    let params = ElectricalParams::new(1.0, 4.0).unwrap();
    let t = traj(&sampled_csv(
        &uniform_times(0.0, 1.0, 200),
        uniform_acceleration(1, 1.0),
    ));
    let rule = IntegrationRule::LeftRiemann;
    let (lo, hi) = (0.5, 3.0);
    let (s_star, _) = optimal_time_scale(&t, &model, &params, rule, lo, hi).unwrap();
    assert!(s_star > lo && s_star < hi);

    let n = 10_000;
    let grid_best = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .map(|s| {
            (
                s,
                energy_at_scale(&t, &model, &params, rule, s)
                    .unwrap()
                    .total_energy,
            )
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0;
    assert!(
        (s_star - grid_best).abs() <= 1e-4 * (hi - lo),
        "{s_star} vs {grid_best}"
    );
}

#[test]
fn invalid_scale_interval() {
    let t = traj(&static_hold(&[0.0], &[0.0, 1.0]));
    for (lo, hi) in [(0.0, 1.0), (2.0, 1.0), (1.0, 1.0), (-1.0, 2.0)] {
        assert!(matches!(
            optimal_time_scale(
                &t,
                &pendulum(),
                &REFERENCE_METHOD2,
                IntegrationRule::LeftRiemann,
                lo,
                hi
            ),
            Err(EnergyError::InvalidInterval { .. })
        ));
    }
}

#[test]
fn profile_csv_layout() {
    let profile = vec![PowerBreakdown {
        t: 0.5,
        mechanical: -1.25,
        joule: 0.5,
        overhead: 88.04,
        total: 87.29,
    }];
    assert_eq!(
        profile_to_csv(&profile),
        "t,mechanical,joule,overhead,total\n0.5,-1.25,0.5,88.04,87.29\n"
    );
}

#[test]
fn report_json_shape() {
    let r = trajectory_energy(
        &flat_profile(&[0.0, 2.0], |_| 3.0),
        IntegrationRule::LeftRiemann,
    )
    .unwrap();
    let v: serde_json::Value = serde_json::to_value(r).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "total_energy",
        "mechanical_energy",
        "joule_energy",
        "overhead_energy",
        "duration",
        "overhead_fraction",
        "integration_rule",
        "samples",
    ] {
        assert!(keys.contains(&k), "{k}");
    }
}
