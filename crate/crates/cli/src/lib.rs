//! Front end for threshold sweeps: flag parsing, running the points and
//! writing CSV or a JSON manifest.

pub mod args;
pub mod output;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use chrono::Utc;
use cvqec::decoder::build_graphs;
use cvqec::experiment::{estimate_threshold, run_sweep, PointResult, SimConfig};
use cvqec::lattice::build_layout;

use args::{build_plan, Cli, Format};
use output::{write_csv, write_json, RunManifest, Threshold};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

fn runtime<E: fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Crossings between consecutive distances within each group of points
/// sharing everything but distance and squeezing.
pub fn thresholds(points: &[PointResult]) -> Vec<Threshold> {
    let key = |c: &SimConfig| (c.variant, c.weighting, c.gate_noise, c.p_fail.to_bits());
    let mut groups: Vec<(SimConfig, Vec<usize>)> = Vec::new();
    for p in points {
        let c = &p.config;
        match groups.iter_mut().find(|(g, _)| key(g) == key(c)) {
            Some((_, ds)) => {
                if !ds.contains(&c.distance) {
                    ds.push(c.distance);
                }
            }
            None => groups.push((c.clone(), vec![c.distance])),
        }
    }
    let mut out = Vec::new();
    for (g, mut ds) in groups {
        ds.sort_unstable();
        let curve = |d: usize| -> Vec<(f64, f64)> {
            points
                .iter()
                .filter(|p| key(&p.config) == key(&g) && p.config.distance == d)
                .map(|p| (p.config.squeezing_db, p.combined_rate))
                .collect()
        };
        for w in ds.windows(2) {
            out.push(Threshold {
                variant: g.variant.name().to_string(),
                weighting: g.weighting,
                gate_noise: g.gate_noise,
                p_fail: g.p_fail,
                distances: (w[0], w[1]),
                crossing_db: estimate_threshold(&curve(w[0]), &curve(w[1])).value(),
            });
        }
    }
    out
}

fn dump_graphs(plan: &[SimConfig]) -> Result<(), CliError> {
    let c = &plan[0];
    let layout = build_layout(c.distance).map_err(runtime)?;
    let graphs = build_graphs(&layout, c.variant).map_err(runtime)?;
    let mut out = io::stdout().lock();
    for g in [&graphs.z, &graphs.x] {
        writeln!(out, "# {:?} graph: {} vertices, boundary {}", g.kind, g.num_vertices(), g.boundary()).map_err(runtime)?;
        write!(out, "{}", g.dump(None)).map_err(runtime)?;
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let plan = build_plan(cli)?;
    if cli.dump_graph {
        return dump_graphs(&plan);
    }
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(runtime)?;
    }
    let started = Utc::now();
    let sweep = run_sweep(&plan).map_err(runtime)?;
    let finished = Utc::now();
    for p in &sweep.points {
        eprintln!(
            "d={} {:.4} dB p_fail={}: {} samples, rate {:.3e} ± {:.1e}",
            p.config.distance, p.config.squeezing_db, p.config.p_fail, p.samples, p.combined_rate, p.combined_std
        );
    }
    let found = thresholds(&sweep.points);
    for t in &found {
        match t.crossing_db {
            Some(x) => eprintln!("crossing d={}/{} p_fail={}: {x:.3} dB", t.distances.0, t.distances.1, t.p_fail),
            None => eprintln!("crossing d={}/{} p_fail={}: none in window", t.distances.0, t.distances.1, t.p_fail),
        }
    }

    let writer: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    match cli.format {
        Format::Csv => write_csv(writer, &sweep.points).map_err(runtime),
        Format::Json => {
            let manifest = RunManifest {
                tool: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed: plan[0].seed,
                started,
                finished,
                configs: plan,
                points: sweep.points,
                thresholds: found,
            };
            write_json(writer, &manifest).map_err(runtime)
        }
    }
}
