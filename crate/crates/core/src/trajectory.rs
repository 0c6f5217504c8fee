//! Timestamped joint trajectories: CSV and JSON interchange, numerical
//! differentiation of missing derivative columns, time scaling and
//! resampling.
//!
//! Derivatives are optional per trajectory. A positions-only log keeps its
//! velocities and accelerations absent until [`derive_missing`] fills them;
//! they are never silently treated as zero.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TRAJECTORY_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error("trajectory has no samples")]
    Empty,
    #[error("header: {0}")]
    Header(String),
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: column `{column}` has invalid value `{value}`")]
    InvalidNumber {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: timestamp {t} does not increase (previous {previous})")]
    NonMonotonic { line: u64, previous: f64, t: f64 },
    #[error("line {line}: `{columns}` columns are filled for some rows but not others")]
    MixedPresence { line: u64, columns: &'static str },
    #[error(
        "sample {index}: {what} has length {found}, trajectory has {expected} degrees of freedom"
    )]
    DimensionMismatch {
        index: usize,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("sample {index}: non-finite value in {what}")]
    NonFinite { index: usize, what: &'static str },
    #[error("sample {index}: {what} present on some samples only")]
    InconsistentDerivatives { index: usize, what: &'static str },
    #[error("need at least {needed} samples, have {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("trajectory has no {0}; derive them first")]
    MissingDerivatives(&'static str),
    #[error("time-scale factor must be finite and positive, got {0}")]
    InvalidScale(f64),
    #[error("resampling step must be finite and positive, got {0}")]
    InvalidStep(f64),
    #[error("resampling step {dt} exceeds the trajectory duration {duration}")]
    StepExceedsDuration { dt: f64, duration: f64 },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("invalid trajectory document: {0}")]
    Document(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub q: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qd: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qdd: Option<Vec<f64>>,
}

/// Samples with strictly increasing timestamps and a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dof: usize,
    points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn new(points: Vec<TrajectoryPoint>) -> Result<Self, TrajectoryError> {
        let first = points.first().ok_or(TrajectoryError::Empty)?;
        let dof = first.q.len();
        let has_qd = first.qd.is_some();
        let has_qdd = first.qdd.is_some();
        for (index, p) in points.iter().enumerate() {
            if !p.t.is_finite() {
                return Err(TrajectoryError::NonFinite { index, what: "t" });
            }
            let vectors = [
                ("q", Some(&p.q)),
                ("qd", p.qd.as_ref()),
                ("qdd", p.qdd.as_ref()),
            ];
            for (what, v) in vectors {
                let Some(v) = v else { continue };
                if v.len() != dof {
                    return Err(TrajectoryError::DimensionMismatch {
                        index,
                        what,
                        expected: dof,
                        found: v.len(),
                    });
                }
                if !v.iter().all(|x| x.is_finite()) {
                    return Err(TrajectoryError::NonFinite { index, what });
                }
            }
            if p.qd.is_some() != has_qd {
                return Err(TrajectoryError::InconsistentDerivatives { index, what: "qd" });
            }
            if p.qdd.is_some() != has_qdd {
                return Err(TrajectoryError::InconsistentDerivatives { index, what: "qdd" });
            }
            if index > 0 && p.t <= points[index - 1].t {
                return Err(TrajectoryError::NonMonotonic {
                    line: index as u64,
                    previous: points[index - 1].t,
                    t: p.t,
                });
            }
        }
        Ok(Self { dof, points })
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.t)
    }

    pub fn start_time(&self) -> f64 {
        self.points[0].t
    }

    pub fn duration(&self) -> f64 {
        self.points[self.points.len() - 1].t - self.points[0].t
    }

    pub fn has_velocities(&self) -> bool {
        self.points[0].qd.is_some()
    }

    pub fn has_accelerations(&self) -> bool {
        self.points[0].qdd.is_some()
    }

    /// Sum of joint-space distances between consecutive samples.
    pub fn joint_path_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| {
                w[0].q
                    .iter()
                    .zip(&w[1].q)
                    .map(|(a, b)| (b - a) * (b - a))
                    .sum::<f64>()
                    .sqrt()
            })
            .sum()
    }

    /// Split into samples `[0, index]` and `[index, N)`, sharing the split sample.
    pub fn split_at(&self, index: usize) -> Result<(Trajectory, Trajectory), TrajectoryError> {
        if index >= self.points.len() {
            return Err(TrajectoryError::TooFewSamples {
                needed: index + 1,
                found: self.points.len(),
            });
        }
        Ok((
            Trajectory::new(self.points[..=index].to_vec())?,
            Trajectory::new(self.points[index..].to_vec())?,
        ))
    }

    /// Indices `i` of intervals `[tᵢ, tᵢ₊₁]` longer than `ratio` times the
    /// median interval.
    pub fn timing_gaps(&self, ratio: f64) -> Vec<usize> {
        let mut steps: Vec<f64> = self.points.windows(2).map(|w| w[1].t - w[0].t).collect();
        if steps.len() < 2 {
            return Vec::new();
        }
        let original = steps.clone();
        steps.sort_by(f64::total_cmp);
        let median = steps[steps.len() / 2];
        original
            .iter()
            .enumerate()
            .filter(|(_, &dt)| dt > ratio * median)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TrajectoryDocument {
            format_version: TRAJECTORY_FORMAT_VERSION,
            dof: self.dof,
            points: self.points.clone(),
        })
        .expect("trajectory values are finite")
    }

    pub fn from_json(text: &str) -> Result<Self, TrajectoryError> {
        let doc: TrajectoryDocument =
            serde_json::from_str(text).map_err(|e| TrajectoryError::Document(e.to_string()))?;
        if doc.format_version != TRAJECTORY_FORMAT_VERSION {
            return Err(TrajectoryError::Document(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        let traj = Trajectory::new(doc.points)?;
        if traj.dof != doc.dof {
            return Err(TrajectoryError::Document(format!(
                "declared dof {} but samples have {}",
                doc.dof, traj.dof
            )));
        }
        Ok(traj)
    }
}

/// JSON mirror of the CSV format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDocument {
    pub format_version: u32,
    pub dof: usize,
    pub points: Vec<TrajectoryPoint>,
}

struct Header {
    dof: usize,
    has_qd: bool,
    has_qdd: bool,
}

fn parse_header(fields: &csv::StringRecord) -> Result<Header, TrajectoryError> {
    let names: Vec<&str> = fields.iter().collect();
    if names.first() != Some(&"t") {
        return Err(TrajectoryError::Header(if names.contains(&"t") {
            "`t` must be the first column".into()
        } else {
            "missing `t` column".into()
        }));
    }
    let count = |prefix: &str, from: usize| {
        let mut n = 0;
        while from + n < names.len() && names[from + n] == format!("{prefix}_{}", n + 1) {
            n += 1;
        }
        n
    };
    let dof = count("q", 1);
    if dof == 0 {
        return Err(TrajectoryError::Header("expected q_1 after t".into()));
    }
    let mut at = 1 + dof;
    let mut group = |prefix: &str| -> Result<bool, TrajectoryError> {
        match count(prefix, at) {
            0 => Ok(false),
            n if n == dof => {
                at += n;
                Ok(true)
            }
            n => Err(TrajectoryError::Header(format!(
                "found {prefix}_1..{prefix}_{n} but the trajectory has {dof} q columns"
            ))),
        }
    };
    let has_qd = group("dq")?;
    let has_qdd = group("ddq")?;
    if at != names.len() {
        return Err(TrajectoryError::Header(format!(
            "unexpected column `{}`",
            names[at]
        )));
    }
    Ok(Header {
        dof,
        has_qd,
        has_qdd,
    })
}

/// Parse the trajectory CSV format:
/// `t,q_1,…,q_n[,dq_1,…,dq_n][,ddq_1,…,ddq_n]`.
pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory, TrajectoryError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header_record = reader.headers().map_err(|e| TrajectoryError::Csv {
        line: 1,
        message: e.to_string(),
    })?;
    let header = parse_header(header_record)?;
    let names: Vec<String> = header_record.iter().map(str::to_string).collect();
    let width = names.len();

    // Per derivative group: whether rows so far have it filled.
    let mut seen: [Option<bool>; 2] = [None, None];
    let mut points: Vec<TrajectoryPoint> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| TrajectoryError::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(TrajectoryError::Ragged {
                line,
                expected: width,
                found: record.len(),
            });
        }
        let cell = |i: usize| -> Result<Option<f64>, TrajectoryError> {
            let raw = &record[i];
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Some)
                .ok_or_else(|| TrajectoryError::InvalidNumber {
                    line,
                    column: names[i].clone(),
                    value: raw.to_string(),
                })
        };
        let required = |i: usize| -> Result<f64, TrajectoryError> {
            cell(i)?.ok_or_else(|| TrajectoryError::InvalidNumber {
                line,
                column: names[i].clone(),
                value: String::new(),
            })
        };
        let t = required(0)?;
        let q = (1..=header.dof)
            .map(required)
            .collect::<Result<Vec<_>, _>>()?;
        let mut group = |slot: usize, start: usize, columns: &'static str| {
            let cells = (start..start + header.dof)
                .map(cell)
                .collect::<Result<Vec<_>, _>>()?;
            let filled = cells.iter().filter(|c| c.is_some()).count();
            if filled != 0 && filled != header.dof {
                return Err(TrajectoryError::MixedPresence { line, columns });
            }
            let present = filled == header.dof;
            match seen[slot] {
                Some(prev) if prev != present => {
                    return Err(TrajectoryError::MixedPresence { line, columns })
                }
                _ => seen[slot] = Some(present),
            }
            Ok(present.then(|| cells.into_iter().flatten().collect::<Vec<f64>>()))
        };
        let mut at = 1 + header.dof;
        let qd = if header.has_qd {
            let v = group(0, at, "dq")?;
            at += header.dof;
            v
        } else {
            None
        };
        let qdd = if header.has_qdd {
            group(1, at, "ddq")?
        } else {
            None
        };

        if let Some(prev) = points.last() {
            if t <= prev.t {
                return Err(TrajectoryError::NonMonotonic {
                    line,
                    previous: prev.t,
                    t,
                });
            }
        }
        points.push(TrajectoryPoint { t, q, qd, qdd });
    }
    Trajectory::new(points)
}

/// Serialize to the CSV format. Floats use the shortest representation
/// that parses back to the same value.
pub fn trajectory_to_csv(traj: &Trajectory) -> String {
    let n = traj.dof;
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("q_{i}")));
    if traj.has_velocities() {
        header.extend((1..=n).map(|i| format!("dq_{i}")));
    }
    if traj.has_accelerations() {
        header.extend((1..=n).map(|i| format!("ddq_{i}")));
    }
    let mut out = header.join(",");
    out.push('\n');
    for p in &traj.points {
        let mut row = vec![p.t.to_string()];
        row.extend(p.q.iter().map(f64::to_string));
        for v in [&p.qd, &p.qdd].into_iter().flatten() {
            row.extend(v.iter().map(f64::to_string));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Second-order finite-difference derivative of `values` on the grid `t`
/// (central in the interior, one-sided at the ends).
fn differentiate(t: &[f64], values: &[&[f64]]) -> Vec<Vec<f64>> {
    let n = t.len();
    let dof = values[0].len();
    // The three weights sum to zero, so the first is folded into
    // differences; constants then differentiate to exactly zero.
    let combine = |w: [f64; 3], idx: [usize; 3]| -> Vec<f64> {
        (0..dof)
            .map(|j| {
                let base = values[idx[0]][j];
                w[1] * (values[idx[1]][j] - base) + w[2] * (values[idx[2]][j] - base)
            })
            .collect()
    };
    (0..n)
        .map(|i| {
            if i == 0 {
                let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
                combine(
                    [
                        -(2.0 * h1 + h2) / (h1 * (h1 + h2)),
                        (h1 + h2) / (h1 * h2),
                        -h1 / (h2 * (h1 + h2)),
                    ],
                    [0, 1, 2],
                )
            } else if i == n - 1 {
                let (h1, h2) = (t[n - 2] - t[n - 3], t[n - 1] - t[n - 2]);
                combine(
                    [
                        h2 / (h1 * (h1 + h2)),
                        -(h1 + h2) / (h1 * h2),
                        (h1 + 2.0 * h2) / (h2 * (h1 + h2)),
                    ],
                    [n - 3, n - 2, n - 1],
                )
            } else {
                let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
                combine(
                    [
                        -h2 / (h1 * (h1 + h2)),
                        (h2 - h1) / (h1 * h2),
                        h1 / (h2 * (h1 + h2)),
                    ],
                    [i - 1, i, i + 1],
                )
            }
        })
        .collect()
}

/// Fill absent velocity and acceleration columns by finite differences.
/// Columns already present are kept as they are.
pub fn derive_missing(traj: &Trajectory) -> Result<Trajectory, TrajectoryError> {
    if traj.has_velocities() && traj.has_accelerations() {
        return Ok(traj.clone());
    }
    if traj.len() < 3 {
        return Err(TrajectoryError::TooFewSamples {
            needed: 3,
            found: traj.len(),
        });
    }
    let t: Vec<f64> = traj.times().collect();
    let mut points = traj.points.clone();
    if !traj.has_velocities() {
        let q: Vec<&[f64]> = traj.points.iter().map(|p| p.q.as_slice()).collect();
        for (p, qd) in points.iter_mut().zip(differentiate(&t, &q)) {
            p.qd = Some(qd);
        }
    }
    if !traj.has_accelerations() {
        let qdd = {
            let qd: Vec<&[f64]> = points
                .iter()
                .map(|p| p.qd.as_deref().unwrap_or(&[]))
                .collect();
            differentiate(&t, &qd)
        };
        for (p, a) in points.iter_mut().zip(qdd) {
            p.qdd = Some(a);
        }
    }
    Trajectory::new(points)
}

/// Play the trajectory `s` times slower: `t → s·t`, `q̇ → q̇/s`, `q̈ → q̈/s²`.
pub fn time_scale(traj: &Trajectory, s: f64) -> Result<Trajectory, TrajectoryError> {
    if !(s.is_finite() && s > 0.0) {
        return Err(TrajectoryError::InvalidScale(s));
    }
    let inv = 1.0 / s;
    let inv2 = inv * inv;
    let points = traj
        .points
        .iter()
        .map(|p| TrajectoryPoint {
            t: p.t * s,
            q: p.q.clone(),
            qd: p.qd.as_ref().map(|v| v.iter().map(|x| x * inv).collect()),
            qdd: p.qdd.as_ref().map(|v| v.iter().map(|x| x * inv2).collect()),
        })
        .collect();
    Trajectory::new(points)
}

/// Resample on a uniform grid of step `dt` using cubic Hermite
/// interpolation of `q` with knot slopes `q̇`. Velocities and accelerations
/// of the result are derivatives of the interpolant; the final sample always
/// lands on the original end time.
pub fn resample(traj: &Trajectory, dt: f64) -> Result<Trajectory, TrajectoryError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(TrajectoryError::InvalidStep(dt));
    }
    if !traj.has_velocities() {
        return Err(TrajectoryError::MissingDerivatives("velocities"));
    }
    let duration = traj.duration();
    if dt > duration {
        return Err(TrajectoryError::StepExceedsDuration { dt, duration });
    }
    let t0 = traj.start_time();
    let t_end = t0 + duration;
    let steps = (duration / dt + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=steps).map(|i| t0 + i as f64 * dt).collect();
    let last = grid.len() - 1;
    if t_end - grid[last] > 1e-9 * dt {
        grid.push(t_end);
    } else {
        grid[last] = t_end;
    }

    let knots = &traj.points;
    let mut segment = 0;
    let points = grid
        .into_iter()
        .map(|t| {
            while segment + 2 < knots.len() && t >= knots[segment + 1].t {
                segment += 1;
            }
            hermite(&knots[segment], &knots[segment + 1], t)
        })
        .collect();
    Trajectory::new(points)
}

fn hermite(a: &TrajectoryPoint, b: &TrajectoryPoint, t: f64) -> TrajectoryPoint {
    let h = b.t - a.t;
    let u = (t - a.t) / h;
    let (u2, u3) = (u * u, u * u * u);
    let basis = [
        2.0 * u3 - 3.0 * u2 + 1.0,
        u3 - 2.0 * u2 + u,
        -2.0 * u3 + 3.0 * u2,
        u3 - u2,
    ];
    let first = [
        6.0 * u2 - 6.0 * u,
        3.0 * u2 - 4.0 * u + 1.0,
        -6.0 * u2 + 6.0 * u,
        3.0 * u2 - 2.0 * u,
    ];
    let second = [
        12.0 * u - 6.0,
        6.0 * u - 4.0,
        -12.0 * u + 6.0,
        6.0 * u - 2.0,
    ];
    let (ma, mb) = (
        a.qd.as_ref().expect("checked"),
        b.qd.as_ref().expect("checked"),
    );
    let eval = |w: &[f64; 4], scale: f64| -> Vec<f64> {
        (0..a.q.len())
            .map(|j| (w[0] * a.q[j] + w[1] * h * ma[j] + w[2] * b.q[j] + w[3] * h * mb[j]) * scale)
            .collect()
    };
    TrajectoryPoint {
        t,
        q: eval(&basis, 1.0),
        qd: Some(eval(&first, 1.0 / h)),
        qdd: Some(eval(&second, 1.0 / (h * h))),
    }
}
