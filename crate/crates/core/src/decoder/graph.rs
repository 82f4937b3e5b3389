//! Space-time matching graphs built by propagating every single fault
//! mechanism of a variant through the syndrome-extraction circuit.

use std::collections::HashMap;

use serde::Serialize;

use super::{Fault, GraphKind, Pauli, Variant};
use crate::error::{Error, Result};
use crate::lattice::{Coupling, Role, SurfaceLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeKind {
    /// Data error seen by two checks in one round, or one check and the boundary.
    H,
    /// Readout error: one check in two consecutive rounds.
    V,
    /// Data error seen across two rounds.
    D,
    /// Two-qubit data pattern left by a measure-qubit error mid-round.
    C,
}

#[derive(Debug, Clone, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
    /// Data qubits to flip when the edge lies on a matched path.
    pub support: Vec<usize>,
    /// Equivalent support differing by a stabilizer (cross edges only).
    pub alt_support: Option<Vec<usize>>,
    /// Number of fault mechanisms sharing the edge.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchingGraph {
    pub kind: GraphKind,
    /// Measure qubits providing the vertices of each round.
    pub checks: Vec<usize>,
    pub rounds: usize,
    pub edges: Vec<Edge>,
    #[serde(skip)]
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl MatchingGraph {
    fn new(kind: GraphKind, checks: Vec<usize>, rounds: usize) -> Self {
        let n = checks.len() * rounds + 1;
        MatchingGraph { kind, checks, rounds, edges: Vec::new(), adjacency: vec![Vec::new(); n] }
    }

    pub fn num_vertices(&self) -> usize {
        self.checks.len() * self.rounds + 1
    }

    pub fn boundary(&self) -> usize {
        self.checks.len() * self.rounds
    }

    /// Vertex of check `local` (index into `checks`) in `round` (1-based).
    pub fn vertex(&self, local: usize, round: usize) -> usize {
        (round - 1) * self.checks.len() + local
    }

    /// `(local check, round)` of a non-boundary vertex.
    pub fn locate(&self, v: usize) -> (usize, usize) {
        (v % self.checks.len(), v / self.checks.len() + 1)
    }

    pub fn neighbours(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    fn add_edge(&mut self, edge: Edge) -> usize {
        let id = self.edges.len();
        self.adjacency[edge.a].push((edge.b, id));
        self.adjacency[edge.b].push((edge.a, id));
        self.edges.push(edge);
        id
    }

    /// Adjacency text: one line per edge.
    pub fn dump(&self, weights: Option<&[f64]>) -> String {
        let mut out = String::new();
        for (i, e) in self.edges.iter().enumerate() {
            let w = weights.map(|w| format!(" {:.6}", w[i])).unwrap_or_default();
            out.push_str(&format!("{} {} {:?} {:?}{}\n", e.a, e.b, e.kind, e.support, w));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Route {
    pub graph: GraphKind,
    pub edge: usize,
}

/// Both matching graphs of a layout and variant, plus the table sending each
/// fault mechanism to its edge.
#[derive(Debug, Clone)]
pub struct DecodingGraphs {
    pub variant: Variant,
    pub z: MatchingGraph,
    pub x: MatchingGraph,
    num_qubits: usize,
    num_data: usize,
    num_measures: usize,
    pauli_routes: Vec<Option<Route>>,
    readout_routes: Vec<Option<Route>>,
}

impl DecodingGraphs {
    pub fn graph(&self, kind: GraphKind) -> &MatchingGraph {
        match kind {
            GraphKind::Z => &self.z,
            GraphKind::X => &self.x,
        }
    }

    fn pauli_index(&self, round: usize, step: usize, qubit: usize, pauli: Pauli) -> usize {
        (((round - 1) * 5 + step) * self.num_qubits + qubit) * 2 + pauli as usize
    }

    pub fn route_pauli(&self, round: usize, step: usize, qubit: usize, pauli: Pauli) -> Option<Route> {
        self.pauli_routes[self.pauli_index(round, step, qubit, pauli)]
    }

    pub fn route_readout(&self, round: usize, measure: usize) -> Option<Route> {
        self.readout_routes[(round - 1) * self.num_measures + measure - self.num_data]
    }

    pub fn route(&self, fault: &Fault) -> Option<Route> {
        match *fault {
            Fault::Pauli { round, step, qubit, pauli } => self.route_pauli(round, step, qubit, pauli),
            Fault::Readout { round, measure } => self.route_readout(round, measure),
        }
    }
}

/// Every fault mechanism the variant can produce over `d + 1` rounds.
pub fn mechanisms(layout: &SurfaceLayout, variant: Variant) -> Vec<Fault> {
    let d = layout.distance;
    let mut out = Vec::new();
    let paulis = [Pauli::X, Pauli::Z];
    for round in 1..=d {
        match variant {
            Variant::Surface4Gkp => {
                for step in 1..=4 {
                    for qubit in 0..layout.num_qubits() {
                        if step == 4 && !layout.role(qubit).is_data() {
                            continue;
                        }
                        for pauli in paulis {
                            out.push(Fault::Pauli { round, step, qubit, pauli });
                        }
                    }
                }
            }
            Variant::SurfaceGkp => {
                for qubit in 0..layout.num_data() {
                    for pauli in paulis {
                        out.push(Fault::Pauli { round, step: 0, qubit, pauli });
                    }
                }
            }
        }
        for measure in layout.measures() {
            out.push(Fault::Readout { round, measure });
        }
    }
    for qubit in 0..layout.num_data() {
        for pauli in paulis {
            out.push(Fault::Pauli { round: d + 1, step: 0, qubit, pauli });
        }
    }
    out
}

/// Syndrome bits and final data frame caused by one fault on an otherwise
/// clean circuit. `bits[m - num_data][round - 1]` covers rounds `1..=d+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Footprint {
    pub bits: Vec<Vec<bool>>,
    pub frame_x: Vec<bool>,
    pub frame_z: Vec<bool>,
}

pub fn propagate(layout: &SurfaceLayout, fault: &Fault) -> Footprint {
    let d = layout.distance;
    let n = layout.num_qubits();
    let nd = layout.num_data();
    let mut x = vec![false; n];
    let mut z = vec![false; n];
    let mut bits = vec![vec![false; d + 1]; n - nd];

    let inject = |x: &mut [bool], z: &mut [bool], q: usize, p: Pauli| match p {
        Pauli::X => x[q] ^= true,
        Pauli::Z => z[q] ^= true,
    };

    let (start, first_step) = match *fault {
        Fault::Pauli { round, step, .. } => (round, step),
        Fault::Readout { round, .. } => (round, 4),
    };

    for round in start..=d {
        let from = if round == start { first_step } else { 0 };
        if round == start {
            if let Fault::Pauli { qubit, pauli, .. } = *fault {
                inject(&mut x, &mut z, qubit, pauli);
            }
        }
        for step in from + 1..=4 {
            for g in &layout.schedule[step - 1] {
                let (m, q) = (g.measure, g.data);
                match g.variant.coupling {
                    Coupling::Cz => {
                        let (xm, xq) = (x[m], x[q]);
                        z[m] ^= xq;
                        z[q] ^= xm;
                    }
                    Coupling::CxPlus | Coupling::CxMinus => {
                        let (zm, zq) = (z[m], z[q]);
                        x[m] ^= zq;
                        x[q] ^= zm;
                    }
                }
            }
        }
        for m in layout.measures() {
            let bit = match layout.role(m) {
                Role::MeasureZ => z[m],
                _ => x[m],
            };
            bits[m - nd][round - 1] = bit;
            x[m] = false;
            z[m] = false;
        }
        if let Fault::Readout { round: r, measure } = *fault {
            if r == round {
                bits[measure - nd][round - 1] ^= true;
            }
        }
    }
    if let Fault::Pauli { round, qubit, pauli, .. } = *fault {
        if round == d + 1 {
            inject(&mut x, &mut z, qubit, pauli);
        }
    }
    for (m, row) in layout.measures().zip(bits.iter_mut()) {
        let frame = if layout.role(m) == Role::MeasureZ { &x } else { &z };
        row[d] = layout.support(m).iter().fold(false, |acc, &q| acc ^ frame[q]);
    }
    Footprint { bits, frame_x: x[..nd].to_vec(), frame_z: z[..nd].to_vec() }
}

fn overlap_parity(set: &[usize], logical: &[usize]) -> bool {
    set.iter().filter(|q| logical.contains(q)).count() % 2 == 1
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().filter(|q| !b.contains(q)).chain(b.iter().filter(|q| !a.contains(q))).copied().collect();
    out.sort_unstable();
    out
}

/// Checks and logical relevant to a graph: the checks that see its errors, the
/// stabilizers that make two supports equivalent, and the logical they must commute with.
struct GraphContext<'a> {
    checks: Vec<usize>,
    equivalences: Vec<&'a [usize]>,
    logical: &'a [usize],
}

impl<'a> GraphContext<'a> {
    fn new(layout: &'a SurfaceLayout, kind: GraphKind) -> Self {
        let (checks, equiv, logical): (Vec<usize>, Vec<usize>, &[usize]) = match kind {
            GraphKind::Z => (layout.measure_z().collect(), layout.measure_x().collect(), &layout.logical_z),
            GraphKind::X => (layout.measure_x().collect(), layout.measure_z().collect(), &layout.logical_x),
        };
        let equivalences = equiv.into_iter().map(|m| layout.support(m)).collect();
        GraphContext { checks, equivalences, logical }
    }

    fn syndrome_free(&self, layout: &SurfaceLayout, set: &[usize]) -> bool {
        self.checks
            .iter()
            .all(|&m| layout.support(m).iter().filter(|q| set.contains(q)).count() % 2 == 0)
    }

    /// Lightest representative of `residual` modulo one stabilizer, plus an
    /// equally light alternative when the residual splits a stabilizer evenly.
    fn canonical(&self, residual: &[usize]) -> (Vec<usize>, Option<Vec<usize>>) {
        let mut best = residual.to_vec();
        for s in &self.equivalences {
            let cand = symmetric_difference(residual, s);
            if cand.len() < best.len() {
                best = cand;
            }
        }
        let mut alt = None;
        if best.len() == 2 {
            // prefer the complement within a plaquette holding both qubits
            let mut order: Vec<&&[usize]> = self.equivalences.iter().collect();
            order.sort_by_key(|s| !best.iter().all(|q| s.contains(q)));
            alt = order
                .into_iter()
                .map(|s| symmetric_difference(&best, s))
                .find(|c| c.len() == 2);
        }
        (best, alt)
    }
}

pub fn build_graphs(layout: &SurfaceLayout, variant: Variant) -> Result<DecodingGraphs> {
    let d = layout.distance;
    let rounds = d + 1;
    let nq = layout.num_qubits();
    let nd = layout.num_data();
    let nm = nq - nd;
    let mut graphs = DecodingGraphs {
        variant,
        z: MatchingGraph::new(GraphKind::Z, layout.measure_z().collect(), rounds),
        x: MatchingGraph::new(GraphKind::X, layout.measure_x().collect(), rounds),
        num_qubits: nq,
        num_data: nd,
        num_measures: nm,
        pauli_routes: vec![None; rounds * 5 * nq * 2],
        readout_routes: vec![None; d * nm],
    };
    let contexts = [GraphContext::new(layout, GraphKind::Z), GraphContext::new(layout, GraphKind::X)];
    let mut keys: [HashMap<(usize, usize), usize>; 2] = Default::default();

    for fault in mechanisms(layout, variant) {
        let fp = propagate(layout, &fault);
        let mut route = None;
        for (gi, kind) in [GraphKind::Z, GraphKind::X].into_iter().enumerate() {
            let ctx = &contexts[gi];
            let graph = match kind {
                GraphKind::Z => &mut graphs.z,
                GraphKind::X => &mut graphs.x,
            };
            let frame = match kind {
                GraphKind::Z => &fp.frame_x,
                GraphKind::X => &fp.frame_z,
            };
            let residual: Vec<usize> = (0..nd).filter(|&q| frame[q]).collect();
            let mut events = Vec::new();
            for (local, &m) in ctx.checks.iter().enumerate() {
                let row = &fp.bits[m - nd];
                for r in 0..rounds {
                    let prev = if r == 0 { false } else { row[r - 1] };
                    if row[r] != prev {
                        events.push(graph.vertex(local, r + 1));
                    }
                }
            }
            if events.is_empty() {
                if overlap_parity(&residual, ctx.logical) || !ctx.syndrome_free(layout, &residual) {
                    return Err(Error::Taxonomy(format!("{fault:?} flips a logical without detection")));
                }
                continue;
            }
            if events.len() > 2 {
                return Err(Error::Taxonomy(format!("{fault:?} highlights {} vertices", events.len())));
            }
            let (a, b) = if events.len() == 1 { (events[0], graph.boundary()) } else { (events[0], events[1]) };
            let (support, alt_support) = ctx.canonical(&residual);
            let same_round = b == graph.boundary() || graph.locate(a).1 == graph.locate(b).1;
            let kind_of_edge = match support.len() {
                0 => {
                    let (ca, ra) = graph.locate(a);
                    let ok = b != graph.boundary() && {
                        let (cb, rb) = graph.locate(b);
                        ca == cb && rb == ra + 1
                    };
                    if !ok {
                        return Err(Error::Taxonomy(format!("{fault:?} has no support but is not vertical")));
                    }
                    EdgeKind::V
                }
                1 if same_round => EdgeKind::H,
                1 => EdgeKind::D,
                2 => EdgeKind::C,
                n => return Err(Error::Taxonomy(format!("{fault:?} needs a {n}-qubit correction"))),
            };
            let key = (a.min(b), a.max(b));
            let id = match keys[gi].get(&key) {
                Some(&id) => {
                    let existing = &graph.edges[id].support;
                    let diff = symmetric_difference(existing, &support);
                    if !ctx.syndrome_free(layout, &diff) || overlap_parity(&diff, ctx.logical) {
                        return Err(Error::Taxonomy(format!(
                            "{fault:?} shares endpoints with an inequivalent mechanism"
                        )));
                    }
                    graph.edges[id].multiplicity += 1;
                    id
                }
                None => {
                    let id = graph.add_edge(Edge { a, b, kind: kind_of_edge, support, alt_support, multiplicity: 1 });
                    keys[gi].insert(key, id);
                    id
                }
            };
            if route.is_some() {
                return Err(Error::Taxonomy(format!("{fault:?} reaches both graphs")));
            }
            route = Some(Route { graph: kind, edge: id });
        }
        match fault {
            Fault::Pauli { round, step, qubit, pauli } => {
                let i = graphs.pauli_index(round, step, qubit, pauli);
                graphs.pauli_routes[i] = route;
            }
            Fault::Readout { round, measure } => {
                graphs.readout_routes[(round - 1) * nm + measure - nd] = route;
            }
        }
    }
    Ok(graphs)
}
