//! Minimum-weight perfect matching of highlighted vertices on a weighted
//! matching graph, with boundary copies for odd or cheaper-to-boundary cases.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use mwmatching::{Matching, SENTINEL};

use super::graph::MatchingGraph;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq)]
struct State {
    dist: f64,
    v: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.v.cmp(&self.v))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Tree {
    dist: Vec<f64>,
    /// Edge used to reach each vertex.
    pred: Vec<usize>,
}

const NONE: usize = usize::MAX;

/// Dijkstra from `src`. The boundary is never relaxed through unless it is the source.
fn dijkstra(graph: &MatchingGraph, weights: &[f64], src: usize, limit: f64) -> Tree {
    let n = graph.num_vertices();
    let boundary = graph.boundary();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NONE; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(State { dist: 0.0, v: src });
    while let Some(State { dist: d, v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        if d > limit {
            break;
        }
        if v == boundary && v != src {
            continue;
        }
        for &(u, e) in graph.neighbours(v) {
            let nd = d + weights[e];
            if nd < dist[u] {
                dist[u] = nd;
                pred[u] = e;
                heap.push(State { dist: nd, v: u });
            }
        }
    }
    Tree { dist, pred }
}

fn walk(graph: &MatchingGraph, tree: &Tree, mut v: usize, root: usize, out: &mut Vec<usize>) {
    while v != root {
        let e = tree.pred[v];
        out.push(e);
        let edge = &graph.edges[e];
        v = if edge.a == v { edge.b } else { edge.a };
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Each highlight with its partner, `None` meaning the boundary.
    pub pairs: Vec<(usize, Option<usize>)>,
    /// Sum of shortest-path weights over the matched pairs.
    pub weight: f64,
    /// Edges on matched paths, one entry per traversal.
    pub edges: Vec<usize>,
    /// Data qubits flipped an odd number of times, sorted.
    pub correction: Vec<usize>,
}

/// Matches `highlights` (non-boundary vertices) and expands the pairs into edge paths.
pub fn decode(graph: &MatchingGraph, weights: &[f64], highlights: &[usize]) -> Result<DecodeResult> {
    let n = highlights.len();
    let boundary = graph.boundary();
    if highlights.iter().any(|&h| h >= boundary) {
        return Err(Error::Decoder("highlight outside the graph".into()));
    }
    if n == 0 {
        return Ok(DecodeResult { pairs: Vec::new(), weight: 0.0, edges: Vec::new(), correction: Vec::new() });
    }
    if weights.len() != graph.edges.len() || weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::Decoder("weights must be non-negative, one per edge".into()));
    }

    let to_boundary = dijkstra(graph, weights, boundary, f64::INFINITY);
    let db: Vec<f64> = highlights.iter().map(|&h| to_boundary.dist[h]).collect();
    if db.iter().any(|d| !d.is_finite()) {
        return Err(Error::Decoder("highlight cannot reach the boundary".into()));
    }
    let max_db = db.iter().cloned().fold(0.0, f64::max);

    let mut trees = Vec::with_capacity(n);
    let mut pair_edges: Vec<(usize, usize, f64)> = Vec::new();
    for (i, &u) in highlights.iter().enumerate() {
        let tree = dijkstra(graph, weights, u, db[i] + max_db);
        for (j, &v) in highlights.iter().enumerate().skip(i + 1) {
            let d = tree.dist[v];
            if d < db[i] + db[j] {
                pair_edges.push((i, j, d));
            }
        }
        trees.push(tree);
    }

    // Vertices 0..n are highlights, n..2n their boundary copies.
    let mut cand: Vec<(usize, usize, f64)> = pair_edges.clone();
    for i in 0..n {
        cand.push((i, n + i, db[i]));
    }
    for &(i, j, _) in &pair_edges {
        cand.push((n + i, n + j, 0.0));
    }
    let wmax = cand.iter().map(|c| c.2).fold(0.0, f64::max) + 1.0;
    let scale = (65536.0f64).min(f64::from(1u32 << 28) / wmax);
    let ceiling = (wmax * scale).round() as i32 + 1;
    let edges: Vec<(usize, usize, i32)> =
        cand.iter().map(|&(a, b, w)| (a, b, ceiling - (w * scale).round() as i32)).collect();
    let mates = Matching::new(edges).max_cardinality().solve();

    let mut pairs = Vec::new();
    let mut weight = 0.0;
    let mut path = Vec::new();
    for i in 0..n {
        let m = mates.get(i).copied().unwrap_or(SENTINEL);
        if m == SENTINEL {
            return Err(Error::Decoder("matching left a highlight unmatched".into()));
        }
        if m == n + i {
            pairs.push((highlights[i], None));
            weight += db[i];
            walk(graph, &to_boundary, highlights[i], boundary, &mut path);
        } else if m < n {
            if m > i {
                pairs.push((highlights[i], Some(highlights[m])));
                weight += trees[i].dist[highlights[m]];
                walk(graph, &trees[i], highlights[m], highlights[i], &mut path);
            }
        } else {
            return Err(Error::Decoder("highlight matched to a foreign boundary copy".into()));
        }
    }

    let mut flips = vec![false; graph.edges.iter().flat_map(|e| e.support.iter()).max().map_or(0, |m| m + 1)];
    for &e in &path {
        for &q in &graph.edges[e].support {
            flips[q] ^= true;
        }
    }
    let correction = flips.iter().enumerate().filter(|(_, f)| **f).map(|(q, _)| q).collect();
    Ok(DecodeResult { pairs, weight, edges: path, correction })
}
