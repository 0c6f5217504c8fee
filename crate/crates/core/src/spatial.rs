//! Minimal spatial (6D) algebra used by the dynamics recursions.
//!
//! Motion and force vectors are stored as an angular part followed by a
//! linear part. Coordinate transforms between frames are stored as a
//! rotation plus a translation rather than as 6x6 matrices.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};

/// Pose of a child frame expressed in a parent frame.
///
/// `rotation` maps child coordinates to parent coordinates and `translation`
/// is the child origin in parent coordinates, so a point transforms as
/// `p_parent = rotation * p_child + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    /// URDF `origin` convention: fixed-axis roll, pitch, yaw about x, y, z.
    pub fn from_xyz_rpy(xyz: [f64; 3], rpy: [f64; 3]) -> Self {
        let rot = Rotation3::from_euler_angles(rpy[0], rpy[1], rpy[2]);
        Self::new(*rot.matrix(), Vector3::from(xyz))
    }

    pub fn rotation_about(axis: &Vector3<f64>, angle: f64) -> Self {
        let rot = Rotation3::from_axis_angle(&Unit::new_unchecked(*axis), angle);
        Self::new(*rot.matrix(), Vector3::zeros())
    }

    pub fn translation_along(offset: Vector3<f64>) -> Self {
        Self::new(Matrix3::identity(), offset)
    }

    /// `self ∘ other`: `other` is expressed in the frame described by `self`.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// Plücker transform carrying spatial vectors from the parent frame into
    /// the child frame described by this pose.
    pub fn to_child_motion_map(&self) -> SpatialTransform {
        SpatialTransform {
            rot: self.rotation.transpose(),
            pos: self.translation,
        }
    }
}

/// Spatial motion vector (angular velocity, linear velocity of the frame origin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Motion {
    pub angular: Vector3<f64>,
    pub linear: Vector3<f64>,
}

/// Spatial force vector (moment about the frame origin, force).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Force {
    pub angular: Vector3<f64>,
    pub linear: Vector3<f64>,
}

impl Motion {
    pub fn zero() -> Self {
        Self::new(Vector3::zeros(), Vector3::zeros())
    }

    pub fn new(angular: Vector3<f64>, linear: Vector3<f64>) -> Self {
        Self { angular, linear }
    }

    /// `[wx, wy, wz, vx, vy, vz]`.
    pub fn to_array(&self) -> [f64; 6] {
        let (w, v) = (self.angular, self.linear);
        [w.x, w.y, w.z, v.x, v.y, v.z]
    }

    /// Motion cross product `self × m`.
    pub fn cross_motion(&self, m: &Motion) -> Motion {
        Motion {
            angular: self.angular.cross(&m.angular),
            linear: self.angular.cross(&m.linear) + self.linear.cross(&m.angular),
        }
    }

    /// Force cross product `self ×* f`.
    pub fn cross_force(&self, f: &Force) -> Force {
        Force {
            angular: self.angular.cross(&f.angular) + self.linear.cross(&f.linear),
            linear: self.angular.cross(&f.linear),
        }
    }

    pub fn dot(&self, f: &Force) -> f64 {
        self.angular.dot(&f.angular) + self.linear.dot(&f.linear)
    }
}

impl Force {
    pub fn zero() -> Self {
        Self {
            angular: Vector3::zeros(),
            linear: Vector3::zeros(),
        }
    }
}

impl Add for Motion {
    type Output = Motion;
    fn add(self, rhs: Motion) -> Motion {
        Motion::new(self.angular + rhs.angular, self.linear + rhs.linear)
    }
}

impl Sub for Motion {
    type Output = Motion;
    fn sub(self, rhs: Motion) -> Motion {
        Motion::new(self.angular - rhs.angular, self.linear - rhs.linear)
    }
}

impl Neg for Motion {
    type Output = Motion;
    fn neg(self) -> Motion {
        Motion::new(-self.angular, -self.linear)
    }
}

impl Mul<f64> for Motion {
    type Output = Motion;
    fn mul(self, s: f64) -> Motion {
        Motion::new(self.angular * s, self.linear * s)
    }
}

impl Add for Force {
    type Output = Force;
    fn add(self, rhs: Force) -> Force {
        Force {
            angular: self.angular + rhs.angular,
            linear: self.linear + rhs.linear,
        }
    }
}

impl AddAssign for Force {
    fn add_assign(&mut self, rhs: Force) {
        self.angular += rhs.angular;
        self.linear += rhs.linear;
    }
}

/// Coordinate transform from frame A to frame B, where `rot` maps A
/// coordinates to B coordinates and `pos` is the origin of B expressed in A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialTransform {
    pub rot: Matrix3<f64>,
    pub pos: Vector3<f64>,
}

impl SpatialTransform {
    pub fn identity() -> Self {
        Self {
            rot: Matrix3::identity(),
            pos: Vector3::zeros(),
        }
    }

    /// Apply `self` after `first`: the result maps the source frame of
    /// `first` directly into the target frame of `self`.
    pub fn after(&self, first: &SpatialTransform) -> SpatialTransform {
        SpatialTransform {
            rot: self.rot * first.rot,
            pos: first.pos + first.rot.transpose() * self.pos,
        }
    }

    pub fn apply_motion(&self, m: &Motion) -> Motion {
        Motion {
            angular: self.rot * m.angular,
            linear: self.rot * (m.linear - self.pos.cross(&m.angular)),
        }
    }

    /// Carry a force expressed in the target frame back to the source frame.
    pub fn inv_apply_force(&self, f: &Force) -> Force {
        let linear = self.rot.transpose() * f.linear;
        Force {
            angular: self.rot.transpose() * f.angular + self.pos.cross(&linear),
            linear,
        }
    }
}

/// Rigid-body inertia expressed in a body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialInertia {
    pub mass: f64,
    /// Centre of mass in the body frame.
    pub com: Vector3<f64>,
    /// Rotational inertia about the centre of mass, body-frame axes.
    pub inertia_com: Matrix3<f64>,
}

impl SpatialInertia {
    pub fn zero() -> Self {
        Self {
            mass: 0.0,
            com: Vector3::zeros(),
            inertia_com: Matrix3::zeros(),
        }
    }

    /// Spatial momentum for a body moving with spatial velocity `v`; also
    /// the inertial force for a spatial acceleration.
    pub fn apply(&self, v: &Motion) -> Force {
        let com_velocity = v.linear + v.angular.cross(&self.com);
        let linear = com_velocity * self.mass;
        Force {
            angular: self.inertia_com * v.angular + self.com.cross(&linear),
            linear,
        }
    }

    pub fn kinetic_energy(&self, v: &Motion) -> f64 {
        0.5 * v.dot(&self.apply(v))
    }
}
