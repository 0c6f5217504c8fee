//! Print the degrees of freedom, validation results and gravity torques of
//! a URDF file at a given joint configuration.
//!
//! `cargo run -p robot-energy --example inspect_model -- data/urdf/panda.urdf 0 -0.785 0 -2.356 0 1.571 0.785`

use robot_energy::{gravity_torque, parse_urdf};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().expect("usage: inspect_model URDF [q...]");
    let text = std::fs::read_to_string(&path).expect("readable URDF");
    let model = parse_urdf(&text).unwrap_or_else(|e| panic!("{path}: {e}"));
    println!(
        "{}: {} links, {} dof",
        model.name(),
        model.links().len(),
        model.dof()
    );
    for d in model.validate() {
        println!("  {d}");
    }
    let mut q: Vec<f64> = args
        .map(|a| a.parse().expect("numeric joint value"))
        .collect();
    q.resize(model.dof(), 0.0);
    let g = gravity_torque(&model, &q).expect("dimension checked");
    println!("G(q) = {:?}", g.as_slice());
    println!("|G(q)|^2 = {}", g.squared_norm());
}
