//! Monte Carlo driver: full `d + 1` round samples, per-point estimates with
//! bootstrap errors, and threshold crossings.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correction::{readout_error_probability, teleport_correct, QunaughtSupply, Weighting};
use crate::decoder::{build_graphs, decode_and_check, DecodingGraphs, EdgeWeights, Fault, Pauli, Variant, Verdict};
use crate::error::{Error, Result};
use crate::lattice::{build_layout, Coupling, Role, SurfaceLayout};
use crate::noise::{
    apply_cx, apply_cz, apply_idle, init_gkp_mode, lattice_bit, measure_homodyne, Mode, NoiseParams, Quadrature,
    SQRT_PI,
};

fn default_max_samples() -> u64 {
    100_000
}
fn default_stop_errors() -> u64 {
    500
}
fn default_bootstrap() -> usize {
    1000
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub distance: usize,
    pub squeezing_db: f64,
    pub variant: Variant,
    pub weighting: Weighting,
    #[serde(default = "default_true")]
    pub gate_noise: bool,
    #[serde(default)]
    pub p_fail: f64,
    #[serde(default = "default_max_samples")]
    pub max_samples: u64,
    #[serde(default = "default_stop_errors")]
    pub stop_errors: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_bootstrap")]
    pub bootstrap_resamples: usize,
}

impl SimConfig {
    pub fn new(distance: usize, squeezing_db: f64, variant: Variant) -> Self {
        SimConfig {
            distance,
            squeezing_db,
            variant,
            weighting: Weighting::Analog,
            gate_noise: true,
            p_fail: 0.0,
            max_samples: default_max_samples(),
            stop_errors: default_stop_errors(),
            seed: 0,
            bootstrap_resamples: default_bootstrap(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.distance < 3 || self.distance % 2 == 0 {
            return Err(Error::InvalidDistance(self.distance));
        }
        if !(self.squeezing_db >= 0.0) || !self.squeezing_db.is_finite() {
            return Err(Error::Config(format!("squeezing must be a finite non-negative dB value, got {}", self.squeezing_db)));
        }
        if self.max_samples < 1 || self.stop_errors < 1 {
            return Err(Error::Config("max_samples and stop_errors must be at least 1".into()));
        }
        QunaughtSupply::new(self.p_fail)?;
        Ok(())
    }

    pub fn noise(&self) -> NoiseSetting {
        NoiseSetting {
            params: NoiseParams::from_db(self.squeezing_db, self.gate_noise),
            supply: QunaughtSupply { p_fail: self.p_fail },
            weighting: self.weighting,
            seed: self.seed,
        }
    }
}

/// Everything a single sample needs besides the code itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSetting {
    pub params: NoiseParams,
    pub supply: QunaughtSupply,
    pub weighting: Weighting,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SampleTrace {
    /// `bits[m - num_data][round - 1]`, rounds `1..=d+1`.
    pub bits: Vec<Vec<bool>>,
    /// Data Pauli frame before decoding.
    pub frame_x: Vec<bool>,
    pub frame_z: Vec<bool>,
    pub weights: EdgeWeights,
    pub verdict: Verdict,
}

/// A code of fixed distance and variant with its matching graphs.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub layout: SurfaceLayout,
    pub graphs: DecodingGraphs,
}

impl Simulator {
    pub fn new(distance: usize, variant: Variant) -> Result<Self> {
        let layout = build_layout(distance)?;
        let graphs = build_graphs(&layout, variant)?;
        Ok(Simulator { layout, graphs })
    }

    pub fn variant(&self) -> Variant {
        self.graphs.variant
    }

    pub fn run_sample(&self, noise: &NoiseSetting, index: u64) -> Result<Verdict> {
        Ok(self.trace(noise, index, &[])?.verdict)
    }

    /// Runs one sample, adding a √π shift (or a readout flip) for every
    /// listed fault right after the matching correction or measurement.
    pub fn trace(&self, noise: &NoiseSetting, index: u64, inject: &[Fault]) -> Result<SampleTrace> {
        let layout = &self.layout;
        let graphs = &self.graphs;
        let d = layout.distance;
        let n = layout.num_qubits();
        let nd = layout.num_data();
        let four = self.variant() == Variant::Surface4Gkp;
        let params = &noise.params;

        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        rng.set_stream(index);

        let mut modes = vec![Mode::default(); n];
        for m in modes.iter_mut().take(nd) {
            *m = init_gkp_mode(params, false, &mut rng);
        }
        let mut weights = EdgeWeights::new(graphs);
        let mut bits = vec![vec![false; d + 1]; n - nd];
        let mut busy = vec![false; n];

        let correct = |modes: &mut [Mode], q: usize, round: usize, step: usize, p: &NoiseParams,
                           supply: QunaughtSupply, rng: &mut ChaCha8Rng, weights: &mut EdgeWeights| {
            let out = teleport_correct(&mut modes[q], p, supply, noise.weighting, rng);
            if out.corrected_q {
                if let Some(r) = graphs.route_pauli(round, step, q, Pauli::X) {
                    weights.add(r, out.p_x);
                }
            }
            if out.corrected_p {
                if let Some(r) = graphs.route_pauli(round, step, q, Pauli::Z) {
                    weights.add(r, out.p_z);
                }
            }
        };
        let shift = |modes: &mut [Mode], round: usize, step: usize| {
            for f in inject {
                if let Fault::Pauli { round: r, step: s, qubit, pauli } = *f {
                    if r == round && s == step {
                        match pauli {
                            Pauli::X => modes[qubit].shift.q += SQRT_PI,
                            Pauli::Z => modes[qubit].shift.p += SQRT_PI,
                        }
                    }
                }
            }
        };

        for round in 1..=d {
            if !four {
                for q in 0..nd {
                    correct(&mut modes, q, round, 0, params, noise.supply, &mut rng, &mut weights);
                }
            }
            shift(&mut modes, round, 0);
            for m in layout.measures() {
                modes[m] = init_gkp_mode(params, false, &mut rng);
            }
            for step in 1..=4 {
                busy.fill(false);
                for g in &layout.schedule[step - 1] {
                    match g.variant.coupling {
                        Coupling::Cz => apply_cz(&mut modes, g.measure, g.data, params, &mut rng),
                        c => apply_cx(&mut modes, g.measure, g.data, c.sign(), params, &mut rng),
                    }
                    busy[g.measure] = true;
                    busy[g.data] = true;
                }
                for q in 0..n {
                    if !busy[q] {
                        apply_idle(&mut modes[q], params, &mut rng);
                    }
                }
                if four {
                    let upto = if step == 4 { nd } else { n };
                    for q in 0..upto {
                        correct(&mut modes, q, round, step, params, noise.supply, &mut rng, &mut weights);
                    }
                }
                shift(&mut modes, round, step);
            }
            for m in layout.measures() {
                let (quad, var) = match layout.role(m) {
                    Role::MeasureZ => (Quadrature::P, modes[m].var.p),
                    _ => (Quadrature::Q, modes[m].var.q),
                };
                let (outcome, mut bit) = measure_homodyne(&modes[m], quad);
                if inject.contains(&Fault::Readout { round, measure: m }) {
                    bit ^= true;
                }
                bits[m - nd][round - 1] = bit;
                if let Some(r) = graphs.route_readout(round, m) {
                    weights.add(r, readout_error_probability(outcome, var, noise.weighting));
                }
            }
        }

        let ideal = NoiseParams::ideal();
        for q in 0..nd {
            correct(&mut modes, q, d + 1, 0, &ideal, QunaughtSupply::perfect(), &mut rng, &mut weights);
        }
        shift(&mut modes, d + 1, 0);
        let mut frame_x: Vec<bool> = modes[..nd].iter().map(|m| lattice_bit(m.shift.q)).collect();
        let mut frame_z: Vec<bool> = modes[..nd].iter().map(|m| lattice_bit(m.shift.p)).collect();
        for m in layout.measures() {
            let frame = if layout.role(m) == Role::MeasureZ { &frame_x } else { &frame_z };
            bits[m - nd][d] = layout.support(m).iter().fold(false, |a, &q| a ^ frame[q]);
        }
        let (fx, fz) = (frame_x.clone(), frame_z.clone());
        let verdict = decode_and_check(layout, graphs, &weights, &bits, &mut frame_x, &mut frame_z)?;
        Ok(SampleTrace { bits, frame_x: fx, frame_z: fz, weights, verdict })
    }
}

/// One sample of `config` at `index`; builds the code on every call.
pub fn run_sample(config: &SimConfig, index: u64) -> Result<Verdict> {
    config.validate()?;
    Simulator::new(config.distance, config.variant)?.run_sample(&config.noise(), index)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub config: SimConfig,
    pub samples: u64,
    pub logical_x_errors: u64,
    pub logical_z_errors: u64,
    pub logical_x_rate: f64,
    pub logical_z_rate: f64,
    /// X and Z events pooled over `2 * samples` trials.
    pub combined_rate: f64,
    pub logical_x_std: f64,
    pub logical_z_std: f64,
    pub combined_std: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<PointResult>,
}

const BATCH: u64 = 256;

/// Per-sample outcomes in index order, stopping at the first sample that
/// brings the pooled X + Z event count to `stop_errors`.
pub fn collect_samples(sim: &Simulator, config: &SimConfig) -> Result<Vec<Verdict>> {
    let noise = config.noise();
    let mut out = Vec::new();
    let mut events = 0u64;
    let mut next = 0u64;
    while next < config.max_samples {
        let end = (next + BATCH * rayon::current_num_threads() as u64).min(config.max_samples);
        let batch: Vec<Verdict> =
            (next..end).into_par_iter().map(|i| sim.run_sample(&noise, i)).collect::<Result<_>>()?;
        for v in batch {
            out.push(v);
            events += v.logical_x as u64 + v.logical_z as u64;
            if events >= config.stop_errors {
                return Ok(out);
            }
        }
        next = end;
    }
    Ok(out)
}

pub fn run_point_with(sim: &Simulator, config: &SimConfig) -> Result<PointResult> {
    config.validate()?;
    if sim.layout.distance != config.distance || sim.variant() != config.variant {
        return Err(Error::Config("simulator does not match the configuration".into()));
    }
    let outcomes = collect_samples(sim, config)?;
    let mut counts = [0u64; 4];
    for v in &outcomes {
        counts[v.logical_x as usize * 2 + v.logical_z as usize] += 1;
    }
    let stds = bootstrap_std(counts, config.bootstrap_resamples, config.seed)?;
    let n = outcomes.len() as u64;
    let (x, z) = (counts[2] + counts[3], counts[1] + counts[3]);
    Ok(PointResult {
        config: config.clone(),
        samples: n,
        logical_x_errors: x,
        logical_z_errors: z,
        logical_x_rate: x as f64 / n as f64,
        logical_z_rate: z as f64 / n as f64,
        combined_rate: (x + z) as f64 / (2 * n) as f64,
        logical_x_std: stds[0],
        logical_z_std: stds[1],
        combined_std: stds[2],
    })
}

pub fn run_point(config: &SimConfig) -> Result<PointResult> {
    config.validate()?;
    let sim = Simulator::new(config.distance, config.variant)?;
    run_point_with(&sim, config)
}

/// Runs every configuration, sharing the code between points of equal distance and variant.
pub fn run_sweep(configs: &[SimConfig]) -> Result<SweepResult> {
    let mut sims: Vec<Simulator> = Vec::new();
    let mut points = Vec::with_capacity(configs.len());
    for c in configs {
        c.validate()?;
        let pos = sims.iter().position(|s| s.layout.distance == c.distance && s.variant() == c.variant);
        let idx = match pos {
            Some(i) => i,
            None => {
                sims.push(Simulator::new(c.distance, c.variant)?);
                sims.len() - 1
            }
        };
        points.push(run_point_with(&sims[idx], c)?);
    }
    Ok(SweepResult { points })
}

/// Bootstrap standard deviations of the X, Z and pooled rates.
///
/// `counts` are sample counts of the outcome classes (no error, Z only, X only,
/// both). Resampling the per-sample indicators with replacement is a
/// multinomial draw over these classes, which is what is done here.
pub fn bootstrap_std(counts: [u64; 4], resamples: usize, seed: u64) -> Result<[f64; 3]> {
    let n: u64 = counts.iter().sum();
    if n == 0 || resamples < 2 {
        return Ok([0.0; 3]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6a09_e667_f3bc_c908);
    let mut acc = [[0.0f64; 2]; 3];
    for _ in 0..resamples {
        let mut left = n;
        let mut mass = 1.0;
        let mut draw = [0u64; 4];
        for (k, &c) in counts.iter().enumerate() {
            let p = c as f64 / n as f64;
            if k == 3 || left == 0 {
                draw[k] = left;
                break;
            }
            let frac = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
            let b = Binomial::new(left, frac).map_err(|e| Error::Domain(e.to_string()))?;
            draw[k] = b.sample(&mut rng);
            left -= draw[k];
            mass -= p;
        }
        let x = (draw[2] + draw[3]) as f64 / n as f64;
        let z = (draw[1] + draw[3]) as f64 / n as f64;
        for (a, v) in acc.iter_mut().zip([x, z, (x + z) / 2.0]) {
            a[0] += v;
            a[1] += v * v;
        }
    }
    let r = resamples as f64;
    let std = |a: [f64; 2]| ((a[1] - a[0] * a[0] / r) / (r - 1.0)).max(0.0).sqrt();
    Ok([std(acc[0]), std(acc[1]), std(acc[2])])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Crossing {
    At(f64),
    None,
}

impl Crossing {
    pub fn value(self) -> Option<f64> {
        match self {
            Crossing::At(x) => Some(x),
            Crossing::None => None,
        }
    }
}

fn log_interp(curve: &[(f64, f64)], x: f64) -> Option<f64> {
    let i = curve.windows(2).position(|w| w[0].0 <= x && x <= w[1].0)?;
    let ((x0, y0), (x1, y1)) = (curve[i], curve[i + 1]);
    let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
    Some(y0.ln() + t * (y1.ln() - y0.ln()))
}

/// Crossing of two rate-vs-dB curves, interpolating log rates linearly.
/// Points with a zero rate are dropped; the first strict sign change wins.
pub fn estimate_threshold(small: &[(f64, f64)], large: &[(f64, f64)]) -> Crossing {
    let clean = |c: &[(f64, f64)]| {
        let mut v: Vec<(f64, f64)> = c.iter().copied().filter(|&(x, y)| y > 0.0 && x.is_finite()).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    };
    let (a, b) = (clean(small), clean(large));
    if a.len() < 2 || b.len() < 2 {
        return Crossing::None;
    }
    let lo = a[0].0.max(b[0].0);
    let hi = a[a.len() - 1].0.min(b[b.len() - 1].0);
    let mut xs: Vec<f64> = a.iter().chain(&b).map(|p| p.0).filter(|&x| x >= lo && x <= hi).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let diffs: Vec<(f64, f64)> = xs
        .iter()
        .filter_map(|&x| Some((x, log_interp(&b, x)? - log_interp(&a, x)?)))
        .collect();
    let mut last: Option<(f64, f64)> = None;
    for &(x, g) in &diffs {
        if g == 0.0 {
            continue;
        }
        if let Some((x0, g0)) = last {
            if g0.signum() != g.signum() {
                return Crossing::At(x0 + (x - x0) * g0 / (g0 - g));
            }
        }
        last = Some((x, g));
    }
    Crossing::None
}

/// Threshold from a sweep: crossing of the combined-rate curves of two distances
/// among points matching `filter`.
pub fn sweep_threshold(points: &[PointResult], small: usize, large: usize, filter: impl Fn(&SimConfig) -> bool) -> Crossing {
    let curve = |d: usize| -> Vec<(f64, f64)> {
        points
            .iter()
            .filter(|p| p.config.distance == d && filter(&p.config))
            .map(|p| (p.config.squeezing_db, p.combined_rate))
            .collect()
    };
    estimate_threshold(&curve(small), &curve(large))
}
