//! Robot description: links with inertial parameters, joints forming a
//! rooted kinematic tree, and forward kinematics over that tree.
//!
//! A [`RobotModel`] is immutable once built. Degrees of freedom are indexed
//! by a depth-first walk from the base link that visits child joints in
//! document order; fixed joints take no index.

mod canonical;
mod urdf;

use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::spatial::{RigidTransform, SpatialInertia};

pub use canonical::{ModelDocument, MODEL_FORMAT_VERSION};
pub use urdf::{parse_urdf, parse_urdf_with_diagnostics};

pub const DEFAULT_GRAVITY: [f64; 3] = [0.0, 0.0, -9.81];

const AXIS_TOLERANCE: f64 = 1e-9;
const SYMMETRY_TOLERANCE: f64 = 1e-12;
const TRIANGLE_TOLERANCE: f64 = 1e-9;
const EIGENVALUE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("malformed XML at line {line}, column {column}: {message}")]
    Xml {
        line: u32,
        column: u32,
        message: String,
    },
    #[error("line {line}: expected a <robot> root element, found <{found}>")]
    NotARobot { line: u32, found: String },
    #[error("line {line}: <{element}> is missing attribute `{attribute}`")]
    MissingAttribute {
        element: String,
        attribute: String,
        line: u32,
    },
    #[error("line {line}: <{element}> is missing child element <{child}>")]
    MissingElement {
        element: String,
        child: String,
        line: u32,
    },
    #[error("line {line}: attribute `{attribute}` of <{element}> has invalid value `{value}`")]
    InvalidNumber {
        element: String,
        attribute: String,
        value: String,
        line: u32,
    },
    #[error("line {line}: joint `{joint}` has unknown kind `{kind}`")]
    UnknownJointKind {
        joint: String,
        kind: String,
        line: u32,
    },
    #[error("line {line}: joint `{joint}` uses unsupported feature: {feature}")]
    Unsupported {
        joint: String,
        feature: String,
        line: u32,
    },
    #[error("duplicate {what} name `{name}`")]
    DuplicateName { what: &'static str, name: String },
    #[error("joint `{joint}` references unknown link `{link}`")]
    UnknownLink { joint: String, link: String },
    #[error("link `{link}` is the child of more than one joint")]
    MultipleParents { link: String },
    #[error("kinematic tree has no base link (every link is a child)")]
    NoRoot,
    #[error("kinematic tree is disconnected: candidate base links {roots:?}")]
    MultipleRoots { roots: Vec<String> },
    #[error("kinematic graph contains a cycle through link `{link}`")]
    Cycle { link: String },
    #[error("link `{link}` has children but no <inertial> block")]
    MissingInertial { link: String },
    #[error("link `{link}` has negative mass {mass}")]
    NegativeMass { link: String, mass: f64 },
    #[error("link `{link}` has a non-finite inertial parameter")]
    NonFiniteInertia { link: String },
    #[error("joint `{joint}` has a zero or non-finite axis")]
    DegenerateAxis { joint: String },
    #[error("gravity vector must be finite")]
    NonFiniteGravity,
    #[error("joint vector has length {actual}, model has {expected} degrees of freedom")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid model document: {0}")]
    Document(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JointKind {
    Revolute,
    Continuous,
    Prismatic,
    Fixed,
}

impl JointKind {
    pub fn is_movable(self) -> bool {
        !matches!(self, JointKind::Fixed)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            JointKind::Revolute => "revolute",
            JointKind::Continuous => "continuous",
            JointKind::Prismatic => "prismatic",
            JointKind::Fixed => "fixed",
        }
    }

    pub fn parse(s: &str) -> Option<JointKind> {
        match s {
            "revolute" => Some(JointKind::Revolute),
            "continuous" => Some(JointKind::Continuous),
            "prismatic" => Some(JointKind::Prismatic),
            "fixed" => Some(JointKind::Fixed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpec {
    pub name: String,
    pub kind: JointKind,
    pub parent: String,
    pub child: String,
    /// Joint axis in the joint frame.
    pub axis: Vector3<f64>,
    /// Pose of the joint frame in the parent link frame.
    pub origin: RigidTransform,
    pub velocity_limit: Option<f64>,
    pub effort_limit: Option<f64>,
}

impl JointSpec {
    /// Transform produced by moving this joint to position `q`.
    pub fn motion(&self, q: f64) -> RigidTransform {
        match self.kind {
            JointKind::Revolute | JointKind::Continuous => {
                RigidTransform::rotation_about(&self.axis, q)
            }
            JointKind::Prismatic => RigidTransform::translation_along(self.axis * q),
            JointKind::Fixed => RigidTransform::identity(),
        }
    }
}

/// Mass, centre of mass and rotational inertia about the centre of mass,
/// all expressed in the link frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkInertia {
    pub mass: f64,
    pub com: Vector3<f64>,
    pub inertia: Matrix3<f64>,
}

impl LinkInertia {
    pub fn point_mass(mass: f64, com: Vector3<f64>) -> Self {
        Self {
            mass,
            com,
            inertia: Matrix3::zeros(),
        }
    }

    pub fn to_spatial(&self) -> SpatialInertia {
        SpatialInertia {
            mass: self.mass,
            com: self.com,
            inertia_com: self.inertia,
        }
    }

    fn is_finite(&self) -> bool {
        self.mass.is_finite()
            && self.com.iter().all(|v| v.is_finite())
            && self.inertia.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub name: String,
    /// `None` when the description carries no inertial block.
    pub inertia: Option<LinkInertia>,
}

/// One entry of the depth-first traversal of the tree.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Body {
    pub link: usize,
    /// Joint connecting this body to its parent; `None` for the base link.
    pub joint: Option<usize>,
    /// Parent position in the traversal order.
    pub parent: Option<usize>,
    pub dof_index: Option<usize>,
    pub inertia: SpatialInertia,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    name: String,
    links: Vec<Link>,
    joints: Vec<JointSpec>,
    gravity: Vector3<f64>,
    bodies: Vec<Body>,
    dof: usize,
}

impl RobotModel {
    /// Assemble a model, checking that the joints form a single rooted tree.
    pub fn new(
        name: impl Into<String>,
        links: Vec<Link>,
        joints: Vec<JointSpec>,
        gravity: Vector3<f64>,
    ) -> Result<Self, ModelError> {
        if !gravity.iter().all(|g| g.is_finite()) {
            return Err(ModelError::NonFiniteGravity);
        }
        let mut link_index = HashMap::new();
        for (i, link) in links.iter().enumerate() {
            if link_index.insert(link.name.as_str(), i).is_some() {
                return Err(ModelError::DuplicateName {
                    what: "link",
                    name: link.name.clone(),
                });
            }
            if let Some(inertia) = &link.inertia {
                if !inertia.is_finite() {
                    return Err(ModelError::NonFiniteInertia {
                        link: link.name.clone(),
                    });
                }
                if inertia.mass < 0.0 {
                    return Err(ModelError::NegativeMass {
                        link: link.name.clone(),
                        mass: inertia.mass,
                    });
                }
            }
        }

        let mut joint_names = HashMap::new();
        let mut parent_joint: Vec<Option<usize>> = vec![None; links.len()];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); links.len()];
        for (j, joint) in joints.iter().enumerate() {
            if joint_names.insert(joint.name.as_str(), j).is_some() {
                return Err(ModelError::DuplicateName {
                    what: "joint",
                    name: joint.name.clone(),
                });
            }
            if joint.kind.is_movable()
                && (!joint.axis.iter().all(|a| a.is_finite()) || joint.axis.norm() == 0.0)
            {
                return Err(ModelError::DegenerateAxis {
                    joint: joint.name.clone(),
                });
            }
            let lookup = |name: &str| {
                link_index
                    .get(name)
                    .copied()
                    .ok_or_else(|| ModelError::UnknownLink {
                        joint: joint.name.clone(),
                        link: name.to_string(),
                    })
            };
            let parent = lookup(&joint.parent)?;
            let child = lookup(&joint.child)?;
            if parent_joint[child].is_some() {
                return Err(ModelError::MultipleParents {
                    link: joint.child.clone(),
                });
            }
            parent_joint[child] = Some(j);
            children[parent].push(j);
        }

        let roots: Vec<usize> = (0..links.len())
            .filter(|&i| parent_joint[i].is_none())
            .collect();
        let root = match roots.as_slice() {
            [] if links.is_empty() => return Err(ModelError::NoRoot),
            [] => {
                return Err(ModelError::Cycle {
                    link: links[0].name.clone(),
                })
            }
            [root] => *root,
            many => {
                return Err(ModelError::MultipleRoots {
                    roots: many.iter().map(|&i| links[i].name.clone()).collect(),
                })
            }
        };

        // Depth-first traversal; an explicit stack keeps document order by
        // pushing children in reverse.
        let mut bodies: Vec<Body> = Vec::with_capacity(links.len());
        let mut visited = vec![false; links.len()];
        let mut dof = 0;
        let mut stack: Vec<(usize, Option<usize>, Option<usize>)> = vec![(root, None, None)];
        while let Some((link, joint, parent)) = stack.pop() {
            visited[link] = true;
            let dof_index = match joint {
                Some(j) if joints[j].kind.is_movable() => {
                    dof += 1;
                    Some(dof - 1)
                }
                _ => None,
            };
            let is_root = joint.is_none();
            let has_children = !children[link].is_empty();
            if has_children && !is_root && links[link].inertia.is_none() {
                return Err(ModelError::MissingInertial {
                    link: links[link].name.clone(),
                });
            }
            let inertia = links[link]
                .inertia
                .map(|i| i.to_spatial())
                .unwrap_or_else(SpatialInertia::zero);
            let me = bodies.len();
            bodies.push(Body {
                link,
                joint,
                parent,
                dof_index,
                inertia,
            });
            for &j in children[link].iter().rev() {
                let child = link_index[joints[j].child.as_str()];
                stack.push((child, Some(j), Some(me)));
            }
        }
        if let Some(i) = visited.iter().position(|v| !v) {
            // Every link but the root has a parent joint, so anything left
            // unreached hangs off a cycle.
            return Err(ModelError::Cycle {
                link: links[i].name.clone(),
            });
        }

        Ok(Self {
            name: name.into(),
            links,
            joints,
            gravity,
            bodies,
            dof,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn joints(&self) -> &[JointSpec] {
        &self.joints
    }

    pub fn gravity(&self) -> Vector3<f64> {
        self.gravity
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn base_link(&self) -> &Link {
        &self.links[self.bodies[0].link]
    }

    /// Movable joints in degree-of-freedom order.
    pub fn dof_joints(&self) -> Vec<&JointSpec> {
        self.bodies
            .iter()
            .filter(|b| b.dof_index.is_some())
            .filter_map(|b| b.joint.map(|j| &self.joints[j]))
            .collect()
    }

    pub(crate) fn bodies(&self) -> &[Body] {
        &self.bodies
    }

    /// Copy of this model with a different gravity vector.
    pub fn with_gravity(&self, gravity: Vector3<f64>) -> Result<Self, ModelError> {
        if !gravity.iter().all(|g| g.is_finite()) {
            return Err(ModelError::NonFiniteGravity);
        }
        Ok(Self {
            gravity,
            ..self.clone()
        })
    }

    /// Copy of this model with every link mass and rotational inertia
    /// multiplied by `factor`.
    pub fn with_scaled_mass(&self, factor: f64) -> Result<Self, ModelError> {
        let links = self
            .links
            .iter()
            .map(|l| Link {
                name: l.name.clone(),
                inertia: l.inertia.map(|i| LinkInertia {
                    mass: i.mass * factor,
                    com: i.com,
                    inertia: i.inertia * factor,
                }),
            })
            .collect();
        Self::new(self.name.clone(), links, self.joints.clone(), self.gravity)
    }

    pub(crate) fn check_dof(&self, len: usize) -> Result<(), ModelError> {
        if len != self.dof {
            return Err(ModelError::DimensionMismatch {
                expected: self.dof,
                actual: len,
            });
        }
        Ok(())
    }

    /// Per-body joint transform `parent ∘ origin ∘ motion(q)` factors, in
    /// traversal order; the base link entry is the identity.
    pub(crate) fn local_transforms(&self, q: &[f64]) -> Vec<RigidTransform> {
        self.bodies
            .iter()
            .map(|body| match body.joint {
                None => RigidTransform::identity(),
                Some(j) => {
                    let joint = &self.joints[j];
                    let qi = body.dof_index.map_or(0.0, |d| q[d]);
                    joint.origin.compose(&joint.motion(qi))
                }
            })
            .collect()
    }

    /// World pose of every link, in link document order.
    pub fn forward_kinematics(&self, q: &[f64]) -> Result<Vec<RigidTransform>, ModelError> {
        self.check_dof(q.len())?;
        let local = self.local_transforms(q);
        let mut world = vec![RigidTransform::identity(); self.bodies.len()];
        for (i, body) in self.bodies.iter().enumerate() {
            world[i] = match body.parent {
                None => local[i],
                Some(p) => world[p].compose(&local[i]),
            };
        }
        let mut by_link = vec![RigidTransform::identity(); self.links.len()];
        for (body, pose) in self.bodies.iter().zip(world) {
            by_link[body.link] = pose;
        }
        Ok(by_link)
    }

    /// Check every physical invariant and report violations. Errors mean an
    /// invariant is broken; warnings flag legal but suspicious values.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let has_parent: Vec<bool> = {
            let mut v = vec![false; self.links.len()];
            for b in &self.bodies {
                if b.joint.is_some() {
                    v[b.link] = true;
                }
            }
            v
        };
        let has_children: Vec<bool> = {
            let mut v = vec![false; self.links.len()];
            for b in &self.bodies {
                if let Some(p) = b.parent {
                    v[self.bodies[p].link] = true;
                }
            }
            v
        };

        for (i, link) in self.links.iter().enumerate() {
            let Some(inertia) = &link.inertia else {
                continue;
            };
            let element = format!("link `{}`", link.name);
            if inertia.mass < 0.0 {
                out.push(Diagnostic::error(
                    &element,
                    format!("negative mass {}", inertia.mass),
                ));
            }
            let asym = (inertia.inertia - inertia.inertia.transpose()).amax();
            if asym > SYMMETRY_TOLERANCE {
                out.push(Diagnostic::error(
                    &element,
                    format!("inertia tensor is not symmetric (max asymmetry {asym:e})"),
                ));
            } else {
                let sym = (inertia.inertia + inertia.inertia.transpose()) * 0.5;
                let eig = sym.symmetric_eigen().eigenvalues;
                if eig.iter().any(|&e| e < -EIGENVALUE_TOLERANCE) {
                    out.push(Diagnostic::error(
                        &element,
                        format!(
                            "inertia tensor has a negative principal moment (eigenvalues {eig:?})"
                        ),
                    ));
                } else if inertia.mass > 0.0 {
                    let (a, b, c) = (eig[0], eig[1], eig[2]);
                    if a + b < c - TRIANGLE_TOLERANCE
                        || a + c < b - TRIANGLE_TOLERANCE
                        || b + c < a - TRIANGLE_TOLERANCE
                    {
                        out.push(Diagnostic::error(
                            &element,
                            "principal moments violate the triangle inequality",
                        ));
                    }
                }
            }
            if inertia.mass == 0.0 && has_parent[i] && has_children[i] {
                out.push(Diagnostic::warning(
                    &element,
                    "zero mass on an intermediate link",
                ));
            }
        }

        for joint in &self.joints {
            let element = format!("joint `{}`", joint.name);
            if joint.kind.is_movable() && (joint.axis.norm() - 1.0).abs() > AXIS_TOLERANCE {
                out.push(Diagnostic::error(
                    &element,
                    format!("axis norm is {} (expected 1)", joint.axis.norm()),
                ));
            }
            let r = joint.origin.rotation;
            if (r.transpose() * r - Matrix3::identity()).amax() > AXIS_TOLERANCE {
                out.push(Diagnostic::error(
                    &element,
                    "origin rotation is not orthonormal",
                ));
            }
            for (what, limit) in [
                ("velocity", joint.velocity_limit),
                ("effort", joint.effort_limit),
            ] {
                if let Some(v) = limit {
                    if !v.is_finite() || v < 0.0 {
                        out.push(Diagnostic::error(
                            &element,
                            format!("{what} limit {v} is invalid"),
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Free-function form of [`RobotModel::validate`].
pub fn validate_model(model: &RobotModel) -> Vec<Diagnostic> {
    model.validate()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// The offending element, e.g. ``link `panda_link3` ``.
    pub element: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(element: &str, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            element: element.to_string(),
            message: message.into(),
        }
    }

    pub fn warning(element: &str, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            element: element.to_string(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{level}: {}: {}", self.element, self.message)
    }
}
