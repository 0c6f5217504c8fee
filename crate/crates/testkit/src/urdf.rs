//! URDF text for small test robots.
//!
//! Pendulums hang along −z from joints rotating about +y, so with gravity
//! along −z a positive angle lifts the link towards −x. This matches the
//! angle convention of [`crate::pendulum`].

use crate::pendulum::PlanarLink;

fn inertial(link: &PlanarLink) -> String {
    format!(
        r#"    <inertial>
      <origin xyz="0 0 {z}" rpy="0 0 0"/>
      <mass value="{m}"/>
      <inertia ixx="{i}" ixy="0" ixz="0" iyy="{i}" iyz="0" izz="{i}"/>
    </inertial>"#,
        z = -link.com,
        m = link.mass,
        i = link.inertia,
    )
}

pub fn single_pendulum(link: PlanarLink) -> String {
    format!(
        r#"<?xml version="1.0"?>
<robot name="pendulum">
  <link name="base"/>
  <link name="arm">
{inertial}
  </link>
  <joint name="hinge" type="revolute">
    <parent link="base"/>
    <child link="arm"/>
    <origin xyz="0 0 0" rpy="0 0 0"/>
    <axis xyz="0 1 0"/>
    <limit lower="-3.2" upper="3.2" velocity="10" effort="100"/>
  </joint>
</robot>
"#,
        inertial = inertial(&link)
    )
}

pub fn double_pendulum(links: [PlanarLink; 2]) -> String {
    format!(
        r#"<?xml version="1.0"?>
<robot name="double_pendulum">
  <link name="base"/>
  <link name="upper">
{upper}
  </link>
  <link name="lower">
{lower}
  </link>
  <joint name="shoulder" type="continuous">
    <parent link="base"/>
    <child link="upper"/>
    <axis xyz="0 1 0"/>
  </joint>
  <joint name="elbow" type="continuous">
    <parent link="upper"/>
    <child link="lower"/>
    <origin xyz="0 0 {elbow}" rpy="0 0 0"/>
    <axis xyz="0 1 0"/>
  </joint>
</robot>
"#,
        upper = inertial(&links[0]),
        lower = inertial(&links[1]),
        elbow = -links[0].length,
    )
}

/// One revolute joint about z carrying a 1 kg point mass at (1, 0, 0).
pub const MINIMAL_REVOLUTE: &str = r#"<?xml version="1.0"?>
<robot name="minimal">
  <link name="base"/>
  <link name="arm">
    <inertial>
      <origin xyz="1 0 0"/>
      <mass value="1"/>
      <inertia ixx="0" ixy="0" ixz="0" iyy="0" iyz="0" izz="0"/>
    </inertial>
  </link>
  <joint name="j1" type="revolute">
    <parent link="base"/>
    <child link="arm"/>
    <axis xyz="0 0 1"/>
  </joint>
</robot>
"#;

/// Two links connected by a fixed joint.
pub const FIXED_ONLY: &str = r#"<robot name="bolted">
  <link name="base"/>
  <link name="plate">
    <inertial>
      <mass value="2"/>
      <inertia ixx="0.1" iyy="0.1" izz="0.1" ixy="0" ixz="0" iyz="0"/>
    </inertial>
  </link>
  <joint name="weld" type="fixed">
    <parent link="base"/>
    <child link="plate"/>
    <origin xyz="0 0 0.5"/>
  </joint>
</robot>
"#;

/// A prismatic slider along x followed by a revolute joint about z.
pub const SLIDER_ARM: &str = r#"<robot name="slider_arm">
  <link name="rail"/>
  <link name="carriage">
    <inertial>
      <origin xyz="0 0 0.05"/>
      <mass value="3"/>
      <inertia ixx="0.02" iyy="0.03" izz="0.04" ixy="0" ixz="0" iyz="0"/>
    </inertial>
  </link>
  <link name="arm">
    <inertial>
      <origin xyz="0.25 0 0" rpy="0.1 0.2 0.3"/>
      <mass value="1.5"/>
      <inertia ixx="0.001" iyy="0.03" izz="0.03" ixy="0" ixz="0" iyz="0"/>
    </inertial>
  </link>
  <joint name="slide" type="prismatic">
    <parent link="rail"/>
    <child link="carriage"/>
    <axis xyz="1 0 0"/>
    <limit lower="-1" upper="1" velocity="1" effort="200"/>
  </joint>
  <joint name="turn" type="revolute">
    <parent link="carriage"/>
    <child link="arm"/>
    <origin xyz="0 0 0.1" rpy="0 0 0"/>
    <axis xyz="0 0 1"/>
    <limit lower="-3" upper="3" velocity="2" effort="20"/>
  </joint>
</robot>
"#;
