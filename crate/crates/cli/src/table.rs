//! Plain-text tables for stdout.

use std::fmt::Write;

use trp_core::propagate::ConvergenceReport;

use crate::record::{MatrixParts, RunRecord};

/// Re and Im blocks, six decimals, signs aligned.
pub fn matrix_blocks(m: &MatrixParts) -> String {
    let mut s = String::new();
    for (label, rows) in [("Re(U_a)", &m.re), ("Im(U_a)", &m.im)] {
        let _ = writeln!(s, "{label} =");
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{:>10.6}", clean_zero(*v))).collect();
            let _ = writeln!(s, "  [{} ]", cells.join(" "));
        }
    }
    s
}

/// Avoids printing `-0.000000` for tiny negatives.
fn clean_zero(v: f64) -> f64 {
    if v.abs() < 5e-7 {
        0.0
    } else {
        v
    }
}

pub fn gate_summary(records: &[RunRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<28} {:>10} {:>12} {:>12} {:>10}", "gate", "lambda", "eta4", "Tr P", "fidelity");
    for r in records {
        let _ = writeln!(
            s,
            "{:<28} {:>10.4} {:>12.4e} {:>12.3e} {:>10.6}",
            r.config.target.as_str(),
            r.config.sweep.lambda,
            r.config.sweep.eta4,
            r.metrics.trace_p,
            r.metrics.fidelity
        );
    }
    s
}

pub fn scan_table(param: &str, records: &[RunRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>12} {:>12}", param, "Tr P");
    for r in records {
        if let Some(row) = &r.scan_row {
            let _ = writeln!(s, "{:>12.6} {:>12.3e}", row.value, row.trace_p);
        }
    }
    s
}

pub fn convergence_table(title: &str, unit: &str, report: &ConvergenceReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = writeln!(s, "{:>10} {:>14} {:>14} {:>8}", unit, "diff to next", "Tr P", "slope");
    for (i, row) in report.rows.iter().enumerate() {
        let diff = row.diff_to_next.map_or("-".to_string(), |d| format!("{d:.3e}"));
        let metric = row.metric.map_or("-".to_string(), |m| format!("{m:.4e}"));
        let slope = report.slopes.get(i.wrapping_sub(1)).map_or("-".to_string(), |v| format!("{v:.2}"));
        let _ = writeln!(s, "{:>10} {:>14} {:>14} {:>8}", row.steps, diff, metric, slope);
    }
    if report.saturated {
        let _ = writeln!(s, "saturated: differences reached the roundoff floor");
    }
    s
}
