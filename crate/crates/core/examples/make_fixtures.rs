//! Regenerates the synthetic files under `data/`.
//!
//! Usage: `cargo run -p robot-energy --example make_fixtures -- <data dir>`

use std::fs;
use std::path::Path;

use robot_energy::energy::ElectricalParams;
use robot_energy::identification::{predict_static_power, Method, ParamsFile};
use robot_energy::parse_urdf;
use robot_energy::trajectory::{trajectory_to_csv, Trajectory, TrajectoryPoint};

const POSES: [[f64; 7]; 8] = [
    [0.0, -0.785, 0.0, -2.356, 0.0, 1.571, 0.785],
    [0.0, 0.0, 0.0, -0.3, 0.0, 0.3, 0.0],
    [0.5, 0.6, -0.4, -1.2, 0.2, 1.9, 0.0],
    [-1.1, 1.2, 0.3, -0.9, -0.5, 2.2, 1.0],
    [0.8, -1.3, 0.9, -2.8, 0.4, 1.4, -0.5],
    [2.0, 0.9, -1.5, -0.5, 1.2, 1.0, 0.3],
    [-0.3, 1.55, 0.0, -0.15, 0.0, 1.7, 0.0],
    [1.4, -0.2, 2.1, -1.9, -1.8, 3.0, 2.2],
];

/// Offsets standing in for meter noise; they sum to zero.
const NOISE: [f64; 8] = [0.61, -0.94, 0.27, -0.38, 1.12, -0.45, -0.71, 0.48];

fn measurement_csv(dof: usize, rows: &[(String, Vec<f64>, f64)]) -> String {
    let mut out = String::from("label");
    for j in 1..=dof {
        out.push_str(&format!(",q_{j}"));
    }
    out.push_str(",power_w\n");
    for (label, q, p) in rows {
        out.push_str(label);
        for v in q {
            out.push_str(&format!(",{v}"));
        }
        out.push_str(&format!(",{p}\n"));
    }
    out
}

/// Rest-to-rest quintic blend from `a` to `b` over `duration`.
fn quintic(a: &[f64], b: &[f64], duration: f64, rate: f64) -> Trajectory {
    let n = (duration * rate).round() as usize;
    let points = (0..=n)
        .map(|k| {
            let t = duration * k as f64 / n as f64;
            let u = t / duration;
            let s = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
            let ds = 30.0 * u * u * (1.0 - u) * (1.0 - u) / duration;
            let dds = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / (duration * duration);
            let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
            TrajectoryPoint {
                t,
                q: a.iter().zip(&d).map(|(x, dx)| x + s * dx).collect(),
                qd: Some(d.iter().map(|dx| ds * dx).collect()),
                qdd: Some(d.iter().map(|dx| dds * dx).collect()),
            }
        })
        .collect();
    Trajectory::new(points).expect("valid trajectory")
}

fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "data".to_string());
    let dir = Path::new(&dir);
    let model = parse_urdf(&fs::read_to_string(dir.join("urdf/panda.urdf")).expect("panda.urdf"))
        .expect("valid URDF");
    let truth = ElectricalParams::new(0.0036, 88.04).unwrap();

    let exact: Vec<(String, Vec<f64>, f64)> = POSES
        .iter()
        .enumerate()
        .map(|(i, q)| {
            (
                format!("pose_{}", i + 1),
                q.to_vec(),
                predict_static_power(q, &model, &truth).unwrap(),
            )
        })
        .collect();
    let mean = exact.iter().map(|r| r.2).sum::<f64>() / exact.len() as f64;
    // shift onto a mean of 92.3 W and perturb
    let mut noisy: Vec<(String, Vec<f64>, f64)> = exact
        .iter()
        .zip(NOISE)
        .map(|((l, q, p), e)| {
            (
                l.clone(),
                q.clone(),
                ((p - mean + 92.3 + e) * 100.0).round() / 100.0,
            )
        })
        .collect();
    // absorb the rounding in the last reading so the centi-watt total is 8·92.3 W
    let centi: i64 = noisy[..7]
        .iter()
        .map(|r| (r.2 * 100.0).round() as i64)
        .sum();
    noisy[7].2 = (73_840 - centi) as f64 / 100.0;

    fs::create_dir_all(dir.join("measurements")).unwrap();
    fs::write(
        dir.join("measurements/panda_noise_free.csv"),
        measurement_csv(7, &exact),
    )
    .unwrap();
    fs::write(
        dir.join("measurements/panda_static_poses.csv"),
        measurement_csv(7, &noisy),
    )
    .unwrap();
    let single: Vec<_> = (0..3)
        .map(|i| ("home".to_string(), POSES[0].to_vec(), 91.8 + 0.3 * i as f64))
        .collect();
    fs::write(
        dir.join("measurements/single_pose.csv"),
        measurement_csv(7, &single),
    )
    .unwrap();

    let reference = [
        ("method1", Method::Method1, 0.0, 92.3),
        ("method2", Method::Method2, 0.0036, 88.04),
    ];
    fs::create_dir_all(dir.join("params")).unwrap();
    for (name, method, r_kt2, p_overhead) in reference {
        let file = ParamsFile {
            method: Some(method),
            r_kt2,
            p_overhead,
            rms_residual: None,
            r_squared: None,
            n_poses: Some(8),
        };
        fs::write(
            dir.join(format!("params/{name}.json")),
            file.to_json() + "\n",
        )
        .unwrap();
    }

    let home = [0.0, -0.785, 0.0, -2.356, 0.0, 1.571, 0.785];
    let moves = [
        ("horizontal", [1.2, -0.3, 0.0, -2.0, 0.0, 1.7, 0.785], 8.58),
        ("diagonal", [0.9, 0.5, 0.2, -1.2, 0.0, 1.7, 0.785], 9.66),
        ("vertical", [0.0, 0.3, 0.0, -0.6, 0.0, 0.9, 0.785], 10.92),
    ];
    fs::create_dir_all(dir.join("trajectories")).unwrap();
    for (name, goal, duration) in moves {
        let traj = quintic(&home, &goal, duration, 100.0);
        fs::write(
            dir.join(format!("trajectories/panda_{name}.csv")),
            trajectory_to_csv(&traj),
        )
        .unwrap();
    }
    let hold = Trajectory::new(
        (0..=50)
            .map(|k| TrajectoryPoint {
                t: k as f64 / 10.0,
                q: home.to_vec(),
                qd: None,
                qdd: None,
            })
            .collect(),
    )
    .unwrap();
    fs::write(
        dir.join("trajectories/panda_static_hold.csv"),
        trajectory_to_csv(&hold),
    )
    .unwrap();
}
