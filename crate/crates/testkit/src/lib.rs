//! Reference oracles and fixture builders for the robot-energy tests.
//!
//! Nothing here depends on the library under test. The pendulum oracles are
//! closed-form Euler-Lagrange results for planar chains and are used to check
//! the recursive inverse dynamics independently.

pub mod pendulum;
pub mod trajectories;
pub mod urdf;
