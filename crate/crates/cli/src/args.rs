//! Command-line flags, config files and their merge into a list of points.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use cvqec::correction::Weighting;
use cvqec::decoder::Variant;
use cvqec::experiment::SimConfig;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Analog,
    Fixed,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Analog => Weighting::Analog,
            WeightingArg::Fixed => Weighting::Fixed,
        }
    }
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|_| format!("expected surface-gkp or surface-4-gkp, got '{s}'"))
}

/// Logical error rates of GKP surface codes under measurement-based gate noise.
#[derive(Debug, Parser)]
#[command(name = "cvqec", version)]
pub struct Cli {
    /// Code distances, comma separated (odd, at least 3).
    #[arg(long, value_delimiter = ',')]
    pub distance: Vec<usize>,
    /// Squeezing in dB: a list `11,12.5` or a range `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub db: Option<String>,
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    #[arg(long, value_enum)]
    pub weighting: Option<WeightingArg>,
    #[arg(long, value_enum)]
    pub gate_noise: Option<OnOff>,
    /// Qunaught replacement probabilities, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p_fail: Vec<f64>,
    /// Sample cap per point.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Stop a point once this many logical X plus Z events occurred.
    #[arg(long)]
    pub stop_errors: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bootstrap resamples for the error bars.
    #[arg(long)]
    pub bootstrap: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// JSON file with the same fields as a point configuration; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Print the matching graphs of the first distance and exit.
    #[arg(long)]
    pub dump_graph: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum DbSpec {
    One(f64),
    Many(Vec<f64>),
    Text(String),
}

/// A config file: any subset of the point configuration, with lists allowed
/// for distance, squeezing and replacement probability.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub distance: Option<OneOrMany<usize>>,
    pub squeezing_db: Option<DbSpec>,
    pub variant: Option<Variant>,
    pub weighting: Option<Weighting>,
    pub gate_noise: Option<bool>,
    pub p_fail: Option<OneOrMany<f64>>,
    pub max_samples: Option<u64>,
    pub stop_errors: Option<u64>,
    pub seed: Option<u64>,
    pub bootstrap_resamples: Option<usize>,
}

pub fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

/// Parses `11,12.5` or `start:stop:step` (stop included when on the grid).
pub fn parse_db(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("bad --db '{spec}': {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(bad("a range needs start:stop:step"));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || !step.is_finite() || !(b >= a) {
            return Err(bad("need stop >= start and a positive step"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| a + i as f64 * step).collect()
    } else {
        spec.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(bad("squeezing must be finite and non-negative"));
    }
    Ok(values)
}

/// Flags over file values over defaults, expanded to one configuration per
/// (p_fail, distance, squeezing) in that nesting order.
pub fn build_plan(cli: &Cli) -> Result<Vec<SimConfig>, CliError> {
    let file = match &cli.config {
        Some(p) => read_config(p)?,
        None => FileConfig::default(),
    };
    let distances = if !cli.distance.is_empty() {
        cli.distance.clone()
    } else {
        file.distance.as_ref().map(OneOrMany::to_vec).unwrap_or_default()
    };
    let dbs = match (&cli.db, &file.squeezing_db) {
        (Some(s), _) => parse_db(s)?,
        (None, Some(DbSpec::Text(s))) => parse_db(s)?,
        (None, Some(DbSpec::One(x))) => parse_db(&x.to_string())?,
        (None, Some(DbSpec::Many(v))) => {
            parse_db(&v.iter().map(f64::to_string).collect::<Vec<_>>().join(","))?
        }
        (None, None) => Vec::new(),
    };
    if distances.is_empty() || dbs.is_empty() {
        return Err(CliError::Usage("at least one --distance and one --db value are required".into()));
    }
    let p_fails = if !cli.p_fail.is_empty() {
        cli.p_fail.clone()
    } else {
        file.p_fail.as_ref().map(OneOrMany::to_vec).unwrap_or_else(|| vec![0.0])
    };

    let variant = cli.variant.or(file.variant).unwrap_or(Variant::Surface4Gkp);
    let weighting = cli.weighting.map(Weighting::from).or(file.weighting).unwrap_or(Weighting::Analog);
    let gate_noise = cli.gate_noise.map(|g| g == OnOff::On).or(file.gate_noise).unwrap_or(true);

    let mut plan = Vec::new();
    for &p_fail in &p_fails {
        for &d in &distances {
            for &db in &dbs {
                let mut c = SimConfig::new(d, db, variant);
                c.weighting = weighting;
                c.gate_noise = gate_noise;
                c.p_fail = p_fail;
                if let Some(v) = cli.samples.or(file.max_samples) {
                    c.max_samples = v;
                }
                if let Some(v) = cli.stop_errors.or(file.stop_errors) {
                    c.stop_errors = v;
                }
                if let Some(v) = cli.seed.or(file.seed) {
                    c.seed = v;
                }
                if let Some(v) = cli.bootstrap.or(file.bootstrap_resamples) {
                    c.bootstrap_resamples = v;
                }
                c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
                plan.push(c);
            }
        }
    }
    Ok(plan)
}
