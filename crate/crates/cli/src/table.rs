//! Plain-text comparison tables in the layout of a movement-by-method
//! energy table.

use crate::Comparison;

/// Two decimals; a value that rounds to zero prints unsigned.
pub fn fixed2(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

pub fn format_percent(v: f64) -> String {
    format!("{}%", fixed2(v))
}

/// `label | Meth.1 | Meth.2 | Meas. | Time`, all numbers to two decimals;
/// a missing measurement prints as `-`.
pub fn table_row(
    label: &str,
    method1: f64,
    method2: f64,
    measured: Option<f64>,
    time: f64,
) -> Vec<String> {
    vec![
        label.to_string(),
        fixed2(method1),
        fixed2(method2),
        measured.map_or_else(|| "-".to_string(), fixed2),
        fixed2(time),
    ]
}

pub fn compact_row(cells: &[String]) -> String {
    cells.join(" | ")
}

/// Pads every column to its widest cell; the first column is left
/// aligned, the rest right aligned.
pub fn align(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c == 0 {
                    format!("{s:<w$}", w = widths[c])
                } else {
                    format!("{s:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join(" | ").trim_end());
        out.push('\n');
    }
    out
}

pub fn render(comparison: &Comparison, duration: f64) -> String {
    let header = [
        "Movement",
        "Meth.1 [J]",
        "Meth.2 [J]",
        "Meas. [J]",
        "Time [s]",
    ]
    .map(String::from)
    .to_vec();
    let energies: Vec<f64> = comparison
        .rows
        .iter()
        .map(|r| r.energy.total_energy)
        .collect();
    let row = table_row(
        &comparison.movement,
        energies[0],
        energies[1],
        comparison.measured_energy,
        duration,
    );
    let mut out = align(&[header, row]);
    out.push('\n');

    let mut per_method = vec![["Method", "Energy [J]", "Deviation", "Duration [s]"]
        .map(String::from)
        .to_vec()];
    for r in &comparison.rows {
        per_method.push(vec![
            r.label.clone(),
            fixed2(r.energy.total_energy),
            r.deviation_percent
                .map_or_else(|| "-".to_string(), format_percent),
            fixed2(r.energy.duration),
        ]);
    }
    out.push_str(&align(&per_method));
    if let Some(d) = comparison.measured_duration {
        out.push_str(&format!(
            "\nmeasured duration {} s, trajectory duration {} s\n",
            fixed2(d),
            fixed2(duration)
        ));
    }
    out
}
