use std::fmt;

use super::TrialRecord;
use crate::error::{Error, Result};
use crate::model::BundleVariant;

/// Dimensions at or above this count as high-dimension.
pub const HIGH_DIMENSION: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub variant: BundleVariant,
    pub high_dimension: bool,
    pub runs: usize,
    pub solved_fraction: f64,
    pub mean_wall_time: f64,
    pub mean_iterations: f64,
    pub mean_tilt_corrections: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

/// Per-variant means, split into low- and high-dimension classes.
pub fn summarize(records: &[TrialRecord]) -> Result<SummaryTable> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to summarize".into()));
    }
    let mut rows = Vec::new();
    for high_dimension in [false, true] {
        for variant in BundleVariant::ALL {
            let group: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.variant == variant && (r.n >= HIGH_DIMENSION) == high_dimension)
                .collect();
            if group.is_empty() {
                continue;
            }
            let count = group.len() as f64;
            let mean = |f: &dyn Fn(&TrialRecord) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / count;
            rows.push(SummaryRow {
                variant,
                high_dimension,
                runs: group.len(),
                solved_fraction: mean(&|r| if r.solved { 1.0 } else { 0.0 }),
                mean_wall_time: mean(&|r| r.wall_time),
                mean_iterations: mean(&|r| r.iterations as f64),
                mean_tilt_corrections: mean(&|r| r.tilt_corrections as f64),
            });
        }
    }
    Ok(SummaryTable { rows })
}

impl SummaryTable {
    pub fn row(&self, variant: BundleVariant, high_dimension: bool) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.variant == variant && r.high_dimension == high_dimension)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,variant,runs,solved_fraction,mean_wall_time,mean_iterations,mean_tilt_corrections\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                class(r.high_dimension),
                r.variant,
                r.runs,
                r.solved_fraction,
                r.mean_wall_time,
                r.mean_iterations,
                r.mean_tilt_corrections
            ));
        }
        out
    }
}

fn class(high: bool) -> &'static str {
    if high {
        "high"
    } else {
        "low"
    }
}

impl fmt::Display for SummaryTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<6} {:<14} {:>6} {:>8} {:>12} {:>11} {:>12}",
            "class", "variant", "runs", "solved", "cpu time (s)", "iterations", "tilt-corr."
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<6} {:<14} {:>6} {:>7.1}% {:>12.4} {:>11.2} {:>12.4}",
                class(r.high_dimension),
                r.variant.as_str(),
                r.runs,
                100.0 * r.solved_fraction,
                r.mean_wall_time,
                r.mean_iterations,
                r.mean_tilt_corrections
            )?;
        }
        Ok(())
    }
}
