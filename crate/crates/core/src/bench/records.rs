use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EpsLevel;
use crate::error::Result;
use crate::model::BundleVariant;

/// One `(problem, variant, ε)` run. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub problem_id: String,
    pub n: usize,
    pub nf: usize,
    pub nf_xstar: usize,
    pub nf_z: usize,
    pub variant: BundleVariant,
    pub eps_level: EpsLevel,
    pub seed: u64,
    pub solved: bool,
    pub iterations: usize,
    /// Seconds spent in the solver loop.
    pub wall_time: f64,
    /// `‖x_out − x*‖`; infinite when the run produced no point.
    pub final_distance: f64,
    pub tilt_corrections: usize,
    /// `final_distance ≤ s_tol + ε/r`.
    pub within_bound: bool,
}

pub fn write_records<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer.serialize(r)?;
    }
    if records.is_empty() {
        writer.write_record([
            "problem_id",
            "n",
            "nf",
            "nf_xstar",
            "nf_z",
            "variant",
            "eps_level",
            "seed",
            "solved",
            "iterations",
            "wall_time",
            "final_distance",
            "tilt_corrections",
            "within_bound",
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    reader
        .deserialize()
        .map(|row| row.map_err(Into::into))
        .collect()
}

pub fn records_to_csv(records: &[TrialRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_records(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn records_from_csv(text: &str) -> Result<Vec<TrialRecord>> {
    read_records(text.as_bytes())
}

impl TrialRecord {
    pub fn save_all(records: &[TrialRecord], path: &Path) -> Result<()> {
        write_records(records, File::create(path)?)
    }

    pub fn load_all(path: &Path) -> Result<Vec<TrialRecord>> {
        read_records(File::open(path)?)
    }
}
