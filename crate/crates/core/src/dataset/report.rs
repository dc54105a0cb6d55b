//! Report rendering (CSV or markdown table).

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::eval::EvalReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format {other:?} (expected csv or markdown)")),
        }
    }
}

const HEADER: [&str; 5] = ["Dataset", "Method", "CR", "CLIPScore", "MeanAttempts"];

fn cells(report: &EvalReport) -> Vec<[String; 5]> {
    report
        .rows
        .iter()
        .map(|r| {
            [
                r.dataset.to_string(),
                r.method.to_string(),
                format!("{:.1}", r.cr * 100.0),
                format!("{:.3}", r.mean_clipscore),
                format!("{:.2}", r.mean_attempts),
            ]
        })
        .collect()
}

pub fn emit_report(report: &EvalReport, format: ReportFormat) -> String {
    let rows = cells(report);
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(HEADER).expect("writing to memory");
            for row in &rows {
                w.write_record(row).expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is UTF-8")
        }
        ReportFormat::Markdown => {
            let mut out = String::new();
            let _ = writeln!(out, "| {} |", HEADER.join(" | "));
            let _ = writeln!(out, "|{}|", ["---"; 5].join("|"));
            for row in &rows {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
            out
        }
    }
}

pub fn write_report(report: &EvalReport, format: ReportFormat, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, emit_report(report, format))
}
