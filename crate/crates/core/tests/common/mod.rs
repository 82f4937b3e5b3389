//! Oracles shared by the integration tests.
#![allow(dead_code)]

use cvqec::correction::{QunaughtSupply, Weighting};
use cvqec::decoder::{
    build_graphs, decode, decode_and_check, mechanisms, propagate, DecodingGraphs, EdgeWeights, Fault, Footprint,
    MatchingGraph, Variant,
};
use cvqec::experiment::{NoiseSetting, Simulator};
use cvqec::lattice::{build_layout, SurfaceLayout};
use cvqec::noise::NoiseParams;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PRIOR: f64 = 1e-4;

/// Every mechanism contributes the same small error probability.
pub fn uniform_prior(layout: &SurfaceLayout, graphs: &DecodingGraphs) -> EdgeWeights {
    let mut w = EdgeWeights::new(graphs);
    for f in mechanisms(layout, graphs.variant) {
        if let Some(r) = graphs.route(&f) {
            w.add(r, PRIOR);
        }
    }
    w
}

pub fn xor(a: &Footprint, b: &Footprint) -> Footprint {
    let x = |u: &[bool], v: &[bool]| u.iter().zip(v).map(|(p, q)| p ^ q).collect::<Vec<_>>();
    Footprint {
        bits: a.bits.iter().zip(&b.bits).map(|(u, v)| x(u, v)).collect(),
        frame_x: x(&a.frame_x, &b.frame_x),
        frame_z: x(&a.frame_z, &b.frame_z),
    }
}

pub fn survives(layout: &SurfaceLayout, graphs: &DecodingGraphs, w: &EdgeWeights, fp: &Footprint) -> bool {
    let (mut fx, mut fz) = (fp.frame_x.clone(), fp.frame_z.clone());
    let v = decode_and_check(layout, graphs, w, &fp.bits, &mut fx, &mut fz).expect("decodable");
    !v.logical_x && !v.logical_z
}

pub fn noiseless() -> NoiseSetting {
    NoiseSetting {
        params: NoiseParams::ideal(),
        supply: QunaughtSupply::perfect(),
        weighting: Weighting::Analog,
        seed: 0,
    }
}

/// Faults that end in a logical error when injected alone, checked both in the
/// shift simulation and symbolically. Returns (faults checked, failures).
pub fn single_fault_failures(d: usize, variant: Variant) -> (usize, Vec<Fault>) {
    let sim = Simulator::new(d, variant).unwrap();
    let w = uniform_prior(&sim.layout, &sim.graphs);
    let mut failures = Vec::new();
    let all = mechanisms(&sim.layout, variant);
    for &f in &all {
        let t = sim.trace(&noiseless(), 0, &[f]).unwrap();
        let fp = propagate(&sim.layout, &f);
        let consistent = t.bits == fp.bits && t.frame_x == fp.frame_x && t.frame_z == fp.frame_z;
        let ok = consistent
            && !t.verdict.logical_x
            && !t.verdict.logical_z
            && survives(&sim.layout, &sim.graphs, &w, &fp);
        if !ok {
            failures.push(f);
        }
    }
    (all.len(), failures)
}

/// Pairs of faults within one matching graph that end in a logical error.
/// Faults in different graphs are decoded independently, so they cannot interact.
pub fn double_fault_failures(d: usize, variant: Variant) -> (usize, Vec<(Fault, Fault)>) {
    let layout = build_layout(d).unwrap();
    let graphs = build_graphs(&layout, variant).unwrap();
    let w = uniform_prior(&layout, &graphs);
    let mut by_graph: [Vec<(Fault, Footprint)>; 2] = Default::default();
    for f in mechanisms(&layout, variant) {
        if let Some(r) = graphs.route(&f) {
            by_graph[r.graph as usize].push((f, propagate(&layout, &f)));
        }
    }
    let mut failures = Vec::new();
    let mut pairs = 0usize;
    for list in &by_graph {
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                pairs += 1;
                if !survives(&layout, &graphs, &w, &xor(&list[i].1, &list[j].1)) {
                    failures.push((list[i].0, list[j].0));
                }
            }
        }
    }
    (pairs, failures)
}

// All-pairs shortest paths where the boundary may only be an endpoint.
pub fn floyd(graph: &MatchingGraph, w: &[f64]) -> Vec<Vec<f64>> {
    let n = graph.num_vertices();
    let b = graph.boundary();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (e, edge) in graph.edges.iter().enumerate() {
        let (u, v) = (edge.a, edge.b);
        if w[e] < dist[u][v] {
            dist[u][v] = w[e];
            dist[v][u] = w[e];
        }
    }
    for k in 0..n {
        if k == b {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    dist
}

/// Minimum over all ways of pairing the highlights with each other or the boundary.
pub fn brute_matching(dist: &[Vec<f64>], b: usize, left: &[usize]) -> f64 {
    let Some((&first, rest)) = left.split_first() else {
        return 0.0;
    };
    let mut best = dist[first][b] + brute_matching(dist, b, rest);
    for i in 0..rest.len() {
        let mut others = rest.to_vec();
        let partner = others.remove(i);
        best = best.min(dist[first][partner] + brute_matching(dist, b, &others));
    }
    best
}

pub struct MatchingCheck {
    pub instances: usize,
    pub weight_mismatches: usize,
    pub path_mismatches: usize,
}

/// Random weights and up to 8 random highlights on real decoding graphs.
pub fn matching_vs_brute_force(instances: usize, seed: u64) -> MatchingCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graphs: Vec<MatchingGraph> = [(3, Variant::Surface4Gkp), (3, Variant::SurfaceGkp), (5, Variant::Surface4Gkp)]
        .iter()
        .flat_map(|&(d, v)| {
            let g = build_graphs(&build_layout(d).unwrap(), v).unwrap();
            [g.z, g.x]
        })
        .collect();
    let mut check = MatchingCheck { instances, weight_mismatches: 0, path_mismatches: 0 };
    for instance in 0..instances {
        let graph = &graphs[instance % graphs.len()];
        let w: Vec<f64> = (0..graph.edges.len())
            .map(|_| if rng.random_bool(0.2) { rng.random_range(0.0..0.5) } else { rng.random_range(0.5..12.0) })
            .collect();
        let k = rng.random_range(1..=8);
        let mut hl: Vec<usize> = sample(&mut rng, graph.boundary(), k).into_vec();
        hl.sort_unstable();
        let result = decode(graph, &w, &hl).unwrap();
        let best = brute_matching(&floyd(graph, &w), graph.boundary(), &hl);
        // integer rounding inside the matcher costs at most ~1e-5 per pair
        if (result.weight - best).abs() > 1e-3 {
            check.weight_mismatches += 1;
        }
        let path_weight: f64 = result.edges.iter().map(|&e| w[e]).sum();
        let mut degree = vec![0usize; graph.num_vertices()];
        for &e in &result.edges {
            degree[graph.edges[e].a] += 1;
            degree[graph.edges[e].b] += 1;
        }
        let odd: Vec<usize> = (0..graph.boundary()).filter(|&v| degree[v] % 2 == 1).collect();
        if (path_weight - result.weight).abs() > 1e-9 || odd != hl {
            check.path_mismatches += 1;
        }
    }
    check
}
