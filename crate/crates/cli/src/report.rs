//! Report emission.

use std::fmt::Write as _;

use binoether_core::verify::{CheckRecord, CheckReport, Verdict};

/// Pretty JSON; deterministic for a given report.
pub fn to_json(report: &CheckReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports contain only finite numbers");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> serde_json::Result<CheckReport> {
    serde_json::from_str(text)
}

fn residual(r: &CheckRecord) -> String {
    match r.residual {
        Some(v) => format!("{v:.3e}"),
        None => "-".into(),
    }
}

/// One line per check followed by the verdict.
pub fn render_text(report: &CheckReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system {}", report.name);
    for r in &report.checks {
        let status = match (r.pass, r.mandatory) {
            (true, true) => "pass",
            (false, true) => "FAIL",
            (true, false) => "yes ",
            (false, false) => "no  ",
        };
        let _ = writeln!(out, "  {status}  {:<14} {:>10}  {}", r.id, residual(r), r.paper_anchor);
        if !r.notes.is_empty() {
            let _ = writeln!(out, "        {}", r.notes);
        }
    }
    let verdict = match report.verdict {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
    };
    let _ = writeln!(out, "verdict {verdict}");
    out
}
