use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

impl Comparison {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::Equal => "==",
        }
    }

    /// NaN never passes.
    pub fn holds(self, measured: f64, threshold: f64) -> bool {
        match self {
            Comparison::AtMost => measured <= threshold,
            Comparison::AtLeast => measured >= threshold,
            Comparison::Equal => measured == threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub criterion: String,
    pub measured: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl CriterionRow {
    pub fn new(label: impl Into<String>, measured: f64, comparison: Comparison, threshold: f64) -> Self {
        CriterionRow {
            criterion: label.into(),
            measured,
            threshold,
            comparison,
            passed: comparison.holds(measured, threshold),
        }
    }
}

/// Output of one run. Contains no timings, so equal config and seed give equal bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub criterion: u32,
    pub library_version: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub results: BTreeMap<String, f64>,
    pub criteria: Vec<CriterionRow>,
}

impl Report {
    pub fn passed(&self) -> bool {
        !self.criteria.is_empty() && self.criteria.iter().all(|c| c.passed)
    }

    pub fn failing(&self) -> impl Iterator<Item = &CriterionRow> {
        self.criteria.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// CSV columns: `experiment,criterion,measured,threshold,comparison,passed`.
pub const CSV_HEADER: [&str; 6] = ["experiment", "criterion", "measured", "threshold", "comparison", "passed"];

fn write_to<W: Write>(reports: &[Report], format: Format, mut w: W) -> Result<()> {
    match format {
        Format::Json => {
            let text = if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0])?
            } else {
                serde_json::to_string_pretty(reports)?
            };
            writeln!(w, "{text}")?;
        }
        Format::Csv => {
            let mut wr = csv::Writer::from_writer(w);
            let io = |e: csv::Error| Error::Io(e.to_string());
            wr.write_record(CSV_HEADER).map_err(io)?;
            for r in reports {
                for c in &r.criteria {
                    wr.write_record([
                        r.experiment.clone(),
                        c.criterion.clone(),
                        c.measured.to_string(),
                        c.threshold.to_string(),
                        c.comparison.symbol().to_string(),
                        c.passed.to_string(),
                    ])
                    .map_err(io)?;
                }
            }
            wr.flush()?;
        }
    }
    Ok(())
}

/// Writes the reports to `path`, or to stdout when `path` is `None`.
pub fn emit_report(reports: &[Report], format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            write_to(reports, format, std::io::BufWriter::new(file))
        }
        None => write_to(reports, format, std::io::stdout().lock()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(rows: Vec<CriterionRow>) -> Report {
        Report {
            experiment: "x".into(),
            criterion: 0,
            library_version: "0".into(),
            seed: 1,
            config: serde_json::json!({}),
            results: BTreeMap::new(),
            criteria: rows,
        }
    }

    #[test]
    fn comparisons() {
        assert!(Comparison::AtMost.holds(1.0, 1.0));
        assert!(!Comparison::AtMost.holds(f64::NAN, 1.0));
        assert!(!Comparison::AtLeast.holds(0.5, 1.0));
        assert!(Comparison::Equal.holds(0.0, 0.0));
    }

    #[test]
    fn csv_flags_failing_row() {
        let r = report(vec![
            CriterionRow::new("ok", 0.1, Comparison::AtMost, 1.0),
            CriterionRow::new("bad", 2.0, Comparison::AtMost, 1.0),
        ]);
        assert!(!r.passed());
        let mut buf = Vec::new();
        write_to(&[r], Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines[2], "x,bad,2,1,<=,false");
    }

    #[test]
    fn unwritable_path() {
        let r = report(vec![]);
        let e = emit_report(&[r], Format::Json, Some(Path::new("/nonexistent/dir/out.json"))).unwrap_err();
        assert!(matches!(e, Error::Io(_)));
    }
}
