use approx::assert_relative_eq;
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use robot_energy::parse_urdf;
use robot_energy::spatial::RigidTransform;

const PANDA: &str = include_str!("../../../data/urdf/panda.urdf");

fn transform() -> impl Strategy<Value = RigidTransform> {
    (
        prop::array::uniform3(-2.0f64..2.0),
        prop::array::uniform3(-3.1f64..3.1),
    )
        .prop_map(|(xyz, rpy)| RigidTransform::from_xyz_rpy(xyz, rpy))
}

proptest! {
    #[test]
    fn composition_is_associative(a in transform(), b in transform(), c in transform(), p in prop::array::uniform3(-1.0f64..1.0)) {
        let left = a.compose(&b).compose(&c);
        let right = a.compose(&b.compose(&c));
        let p = Vector3::from(p);
        let (x, y) = (left.transform_point(&p), right.transform_point(&p));
        prop_assert!((x - y).norm() <= 1e-12);
        prop_assert!((left.rotation - right.rotation).norm() <= 1e-12);
    }

    #[test]
    fn panda_link_frames_stay_orthonormal(q in prop::collection::vec(-3.0f64..3.0, 7)) {
        let model = parse_urdf(PANDA).unwrap();
        for frame in model.forward_kinematics(&q).unwrap() {
            let r = frame.rotation;
            prop_assert!((r.transpose() * r - Matrix3::identity()).norm() <= 1e-12);
            prop_assert!((r.determinant() - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn panda_zero_pose_flange_height() {
    let model = parse_urdf(PANDA).unwrap();
    let frames = model.forward_kinematics(&[0.0; 7]).unwrap();
    let index = model
        .links()
        .iter()
        .position(|l| l.name == "panda_link8")
        .unwrap();
    let flange = frames[index].translation;
    // 0.333 + 0.316 + 0.384 − 0.107 along z, 0.088 along x
    assert_relative_eq!(flange.z, 0.926, epsilon = 1e-12);
    assert_relative_eq!(flange.x, 0.088, epsilon = 1e-12);
    assert_relative_eq!(flange.y, 0.0, epsilon = 1e-12);
}
