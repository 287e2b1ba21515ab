use std::fmt::Write as _;

use serde::Serialize;

use schrogeo_core::report::{Bound, CheckRecord, Summary, VerificationReport};

use crate::config::{Format, RunConfig};

pub const REPORT_VERSION: &str = "1";

#[derive(Serialize)]
struct JsonReport<'a> {
    version: &'static str,
    config: &'a RunConfig,
    checks: &'a [CheckRecord],
    summary: Summary,
}

fn text_line(r: &CheckRecord) -> String {
    let op = match r.bound {
        Bound::Below => "<=",
        Bound::Above => ">",
    };
    let mut line = format!(
        "{:<5} {} residual={:.3e} {op} {:.3e}",
        r.status.label(),
        r.name,
        r.residual,
        r.tolerance
    );
    if let (Some(e), Some(o)) = (r.expected, r.observed) {
        let _ = write!(line, " expected={e} observed={o}");
    }
    for (k, v) in &r.notes {
        let _ = write!(line, " {k}={v}");
    }
    line
}

/// The report rendered in the configured format, newline-terminated.
pub fn render(config: &RunConfig, report: &VerificationReport) -> String {
    let summary = report.summary();
    match config.format {
        Format::Json => {
            let doc = JsonReport {
                version: REPORT_VERSION,
                config,
                checks: &report.records,
                summary,
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &report.records {
                s.push_str(&text_line(r));
                s.push('\n');
            }
            let _ = writeln!(
                s,
                "summary: {} checks, {} passed, {} failed, {} errors",
                summary.total, summary.passed, summary.failed, summary.errors
            );
            s
        }
    }
}
