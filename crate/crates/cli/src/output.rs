//! CSV rows and the JSON run manifest.

use std::io::Write;

use chrono::{DateTime, Utc};
use cvqec::correction::Weighting;
use cvqec::experiment::{PointResult, SimConfig};
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: [&str; 12] = [
    "variant",
    "weighting",
    "gate_noise",
    "p_fail",
    "distance",
    "squeezing_db",
    "samples",
    "logical_x_rate",
    "logical_z_rate",
    "combined_rate",
    "combined_std",
    "seed",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub variant: String,
    pub weighting: Weighting,
    pub gate_noise: bool,
    pub p_fail: f64,
    pub distances: (usize, usize),
    /// Crossing in dB, absent when the curves do not cross in the window.
    pub crossing_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub started: DateTime<Utc>,
    pub finished: DateTime<Utc>,
    pub configs: Vec<SimConfig>,
    pub points: Vec<PointResult>,
    pub thresholds: Vec<Threshold>,
}

fn weighting_name(w: Weighting) -> &'static str {
    match w {
        Weighting::Analog => "analog",
        Weighting::Fixed => "fixed",
    }
}

pub fn csv_row(p: &PointResult) -> [String; 12] {
    let c = &p.config;
    [
        c.variant.name().to_string(),
        weighting_name(c.weighting).to_string(),
        if c.gate_noise { "on" } else { "off" }.to_string(),
        c.p_fail.to_string(),
        c.distance.to_string(),
        format!("{:.4}", c.squeezing_db),
        p.samples.to_string(),
        p.logical_x_rate.to_string(),
        p.logical_z_rate.to_string(),
        p.combined_rate.to_string(),
        p.combined_std.to_string(),
        c.seed.to_string(),
    ]
}

pub fn write_csv<W: Write>(out: W, points: &[PointResult]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for p in points {
        w.write_record(csv_row(p))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, manifest: &RunManifest) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, manifest)?;
    writeln!(out)
}
