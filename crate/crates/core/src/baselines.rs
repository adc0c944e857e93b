//! Static reference generators: Chung-Lu expected-degree graphs and uniform
//! G(n, m) random graphs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{StaticGraph, VertexId};

/// Target degrees, one per vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<usize>,
}

impl DegreeSequence {
    pub fn of_graph(g: &StaticGraph) -> Self {
        Self {
            degrees: g.vertices().map(|v| g.degree(v)).collect(),
        }
    }

    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }
}

/// Edge-independent Chung-Lu: pair (i, j) with i < j becomes an edge with
/// probability `min(1, d_i * d_j / sum(d))`. Pairs are visited in
/// lexicographic order, consuming one rng draw each.
pub fn chung_lu<R: Rng>(seq: &DegreeSequence, rng: &mut R) -> StaticGraph {
    let n = seq.degrees.len();
    let total = seq.total() as f64;
    let mut g = StaticGraph::new();
    for v in 0..n {
        g.add_vertex(v as VertexId);
    }
    if total == 0.0 {
        return g;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let p = (seq.degrees[i] as f64 * seq.degrees[j] as f64 / total).min(1.0);
            if rng.gen::<f64>() < p {
                g.add_edge(i as VertexId, j as VertexId);
            }
        }
    }
    g
}

/// Uniform simple graph with exactly `n` vertices and `m` edges, sampled by
/// a partial shuffle of the full pair list.
pub fn erdos_renyi<R: Rng>(n: usize, m: usize, rng: &mut R) -> Result<StaticGraph> {
    let max = n * n.saturating_sub(1) / 2;
    if m > max {
        return Err(Error::InvalidArgument(format!(
            "m = {m} exceeds the {max} possible edges on {n} vertices"
        )));
    }
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::with_capacity(max);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i as VertexId, j as VertexId));
        }
    }
    let mut g = StaticGraph::new();
    for v in 0..n {
        g.add_vertex(v as VertexId);
    }
    for k in 0..m {
        let pick = rng.gen_range(k..pairs.len());
        pairs.swap(k, pick);
        let (u, v) = pairs[k];
        g.add_edge(u, v);
    }
    Ok(g)
}
