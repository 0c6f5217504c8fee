//! Sampled closed-form trajectories, written in the trajectory CSV format.

/// Joint position, velocity and acceleration at one instant.
pub type Sample = (Vec<f64>, Vec<f64>, Vec<f64>);

/// `n + 1` uniform timestamps covering `[start, end]`.
pub fn uniform_times(start: f64, end: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| start + (end - start) * i as f64 / n as f64)
        .collect()
}

/// CSV with full derivative columns for `f(t) = (q, q̇, q̈)`.
pub fn sampled_csv(times: &[f64], f: impl Fn(f64) -> Sample) -> String {
    let first = f(times[0]);
    let n = first.0.len();
    let mut header = vec!["t".to_string()];
    for prefix in ["q", "dq", "ddq"] {
        header.extend((1..=n).map(|i| format!("{prefix}_{i}")));
    }
    let mut out = header.join(",") + "\n";
    for &t in times {
        let (q, qd, qdd) = f(t);
        let row: Vec<String> = std::iter::once(t)
            .chain(q)
            .chain(qd)
            .chain(qdd)
            .map(|v| v.to_string())
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Hold a fixed pose.
pub fn static_hold(q: &[f64], times: &[f64]) -> String {
    let zeros = vec![0.0; q.len()];
    sampled_csv(times, |_| (q.to_vec(), zeros.clone(), zeros.clone()))
}

/// Single-joint sinusoidal swing `q = amplitude·sin(ω t) + offset`.
pub fn sine_swing(amplitude: f64, omega: f64, offset: f64) -> impl Fn(f64) -> Sample {
    move |t| {
        let (s, c) = (omega * t).sin_cos();
        (
            vec![amplitude * s + offset],
            vec![amplitude * omega * c],
            vec![-amplitude * omega * omega * s],
        )
    }
}

/// Two-joint swing with different frequencies per joint.
pub fn double_swing(t: f64) -> Sample {
    let (s1, c1) = (1.3 * t).sin_cos();
    let (s2, c2) = (2.1 * t + 0.4).sin_cos();
    (
        vec![0.8 * s1 + 0.2, 0.6 * s2],
        vec![0.8 * 1.3 * c1, 0.6 * 2.1 * c2],
        vec![-0.8 * 1.69 * s1, -0.6 * 4.41 * s2],
    )
}

/// Start at rest and accelerate uniformly: `q = ½ a t²`.
pub fn uniform_acceleration(n_joints: usize, accel: f64) -> impl Fn(f64) -> Sample {
    move |t| {
        (
            vec![0.5 * accel * t * t; n_joints],
            vec![accel * t; n_joints],
            vec![accel; n_joints],
        )
    }
}
