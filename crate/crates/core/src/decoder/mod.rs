//! Space-time matching graphs, edge weighting and MWPM decoding.

mod graph;
mod matching;

pub use graph::{build_graphs, mechanisms, propagate, DecodingGraphs, Edge, EdgeKind, Footprint, MatchingGraph, Route};
pub use matching::{decode, DecodeResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SurfaceLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X = 0,
    Z = 1,
}

/// `Z` is the graph of measure-Z checks (it corrects X errors), `X` the converse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphKind {
    Z,
    X,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Data qubits corrected once before each stabilizer round.
    #[serde(rename = "surface-gkp")]
    SurfaceGkp,
    /// Every qubit corrected after every gate step.
    #[serde(rename = "surface-4-gkp")]
    Surface4Gkp,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::SurfaceGkp => "surface-gkp",
            Variant::Surface4Gkp => "surface-4-gkp",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "surface-gkp" => Ok(Variant::SurfaceGkp),
            "surface-4-gkp" => Ok(Variant::Surface4Gkp),
            _ => Err(Error::Config(format!("unknown variant '{s}'"))),
        }
    }
}

/// A single elementary fault.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fault {
    /// Pauli error left on `qubit` by the correction after `step` of `round`
    /// (step 0 is the correction before step 1; rounds are 1-based, `d + 1` is the ideal round).
    Pauli { round: usize, step: usize, qubit: usize, pauli: Pauli },
    /// Misrounded readout of a measure qubit at the end of `round`.
    Readout { round: usize, measure: usize },
}

/// Per-sample probability accumulators for both graphs.
#[derive(Debug, Clone)]
pub struct EdgeWeights {
    keep_z: Vec<f64>,
    keep_x: Vec<f64>,
}

impl EdgeWeights {
    pub fn new(graphs: &DecodingGraphs) -> Self {
        EdgeWeights { keep_z: vec![1.0; graphs.z.edges.len()], keep_x: vec![1.0; graphs.x.edges.len()] }
    }

    /// Folds one error probability into an edge's running product of (1 - 2p).
    pub fn add(&mut self, route: Route, p: f64) {
        let keep = match route.graph {
            GraphKind::Z => &mut self.keep_z[route.edge],
            GraphKind::X => &mut self.keep_x[route.edge],
        };
        *keep *= 1.0 - 2.0 * p;
    }

    pub fn probabilities(&self, kind: GraphKind) -> Vec<f64> {
        let keep = match kind {
            GraphKind::Z => &self.keep_z,
            GraphKind::X => &self.keep_x,
        };
        keep.iter().map(|k| (1.0 - k) / 2.0).collect()
    }

    pub fn weights(&self, kind: GraphKind) -> Vec<f64> {
        self.probabilities(kind).into_iter().map(edge_weight).collect()
    }
}

/// `-log2(p)`, floored so impossible edges stay finite.
pub fn edge_weight(p: f64) -> f64 {
    -(p.max(1e-300)).log2()
}

/// Vertices whose syndrome bit differs from the previous round (0 before round 1).
/// `bits[local][round - 1]` holds the check outcomes of the graph's checks.
pub fn highlights(graph: &MatchingGraph, bits: &[Vec<bool>]) -> Vec<usize> {
    let mut out = Vec::new();
    for r in 1..=graph.rounds {
        for (local, row) in bits.iter().enumerate() {
            let prev = if r == 1 { false } else { row[r - 2] };
            if row[r - 1] != prev {
                out.push(graph.vertex(local, r));
            }
        }
    }
    out
}

/// Logical flags of the final data frame. Errors if any stabilizer is still violated.
pub fn detect_logical_error(layout: &SurfaceLayout, frame_x: &[bool], frame_z: &[bool]) -> Result<(bool, bool)> {
    let parity = |frame: &[bool], set: &[usize]| set.iter().fold(false, |a, &q| a ^ frame[q]);
    for m in layout.measure_z() {
        if parity(frame_x, layout.support(m)) {
            return Err(Error::Decoder(format!("measure-Z check {m} still violated")));
        }
    }
    for m in layout.measure_x() {
        if parity(frame_z, layout.support(m)) {
            return Err(Error::Decoder(format!("measure-X check {m} still violated")));
        }
    }
    Ok((parity(frame_x, &layout.logical_z), parity(frame_z, &layout.logical_x)))
}

/// Outcome of decoding one fault pattern given as explicit syndrome bits and data frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub logical_x: bool,
    pub logical_z: bool,
}

/// Decodes both graphs from raw syndrome bits (`bits[m - num_data][round - 1]`)
/// and applies the corrections to the frames before checking logicals.
pub fn decode_and_check(
    layout: &SurfaceLayout,
    graphs: &DecodingGraphs,
    weights: &EdgeWeights,
    bits: &[Vec<bool>],
    frame_x: &mut [bool],
    frame_z: &mut [bool],
) -> Result<Verdict> {
    let nd = layout.num_data();
    for kind in [GraphKind::Z, GraphKind::X] {
        let graph = graphs.graph(kind);
        let rows: Vec<Vec<bool>> = graph.checks.iter().map(|&m| bits[m - nd].clone()).collect();
        let hl = highlights(graph, &rows);
        if hl.is_empty() {
            continue;
        }
        let result = decode(graph, &weights.weights(kind), &hl)?;
        let frame = match kind {
            GraphKind::Z => &mut *frame_x,
            GraphKind::X => &mut *frame_z,
        };
        for q in result.correction {
            frame[q] ^= true;
        }
    }
    let (logical_x, logical_z) = detect_logical_error(layout, frame_x, frame_z)?;
    Ok(Verdict { logical_x, logical_z })
}
