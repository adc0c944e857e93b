//! Per-vertex graphlet orbit counts for the connected 2-4-node graphlets
//! (orbits 0-14) and the graphlet correlation distance.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{StaticGraph, VertexId};

use super::spearman_rho;

/// The non-redundant orbits used by the correlation distance.
pub const GCD_ORBITS: [usize; 11] = [0, 1, 2, 4, 5, 6, 7, 8, 9, 10, 11];

/// Orbit counts per vertex; orbit 0 is the degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCounts {
    pub ids: Vec<VertexId>,
    pub counts: Vec<[u64; 15]>,
}

struct Dense {
    adj: Vec<Vec<usize>>,
    matrix: Vec<bool>,
    n: usize,
}

impl Dense {
    fn build(g: &StaticGraph) -> (Self, Vec<VertexId>) {
        let ids: Vec<VertexId> = g.vertices().collect();
        let n = ids.len();
        let index: BTreeMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); n];
        let mut matrix = vec![false; n * n];
        for (u, v) in g.edges() {
            let (a, b) = (index[&u], index[&v]);
            adj[a].push(b);
            adj[b].push(a);
            matrix[a * n + b] = true;
            matrix[b * n + a] = true;
        }
        (Self { adj, matrix, n }, ids)
    }

    #[inline]
    fn linked(&self, a: usize, b: usize) -> bool {
        self.matrix[a * self.n + b]
    }
}

/// Enumerates every connected induced subgraph of exactly `k` vertices once
/// (Wernicke's extension scheme) and hands its vertex list to `emit`.
fn for_each_connected_subgraph(dense: &Dense, k: usize, mut emit: impl FnMut(&[usize])) {
    let n = dense.n;
    // blocked = in the current subgraph or adjacent to it
    let mut blocked = vec![false; n];
    let mut sub: Vec<usize> = Vec::with_capacity(k);

    fn extend(
        dense: &Dense,
        k: usize,
        root: usize,
        sub: &mut Vec<usize>,
        ext: Vec<usize>,
        blocked: &mut Vec<bool>,
        emit: &mut impl FnMut(&[usize]),
    ) {
        if sub.len() == k {
            emit(sub);
            return;
        }
        let mut ext = ext;
        while let Some(w) = ext.pop() {
            let mut next_ext = ext.clone();
            let newly_blocked: Vec<usize> = dense.adj[w]
                .iter()
                .copied()
                .filter(|&u| u > root && !blocked[u])
                .collect();
            for &u in &newly_blocked {
                blocked[u] = true;
                next_ext.push(u);
            }
            sub.push(w);
            extend(dense, k, root, sub, next_ext, blocked, emit);
            sub.pop();
            for &u in &newly_blocked {
                blocked[u] = false;
            }
        }
    }

    for v in 0..n {
        let ext: Vec<usize> = dense.adj[v].iter().copied().filter(|&u| u > v).collect();
        blocked[v] = true;
        for &u in &ext {
            blocked[u] = true;
        }
        sub.push(v);
        extend(dense, k, v, &mut sub, ext, &mut blocked, &mut emit);
        sub.pop();
        blocked[v] = false;
        for &u in &dense.adj[v] {
            blocked[u] = false;
        }
    }
}

/// Counts orbits 0-14 for every vertex by enumerating connected induced
/// subgraphs on 2-4 vertices and classifying each by its degree signature.
pub fn orbit_counts(g: &StaticGraph) -> OrbitCounts {
    let (dense, ids) = Dense::build(g);
    let n = dense.n;
    let mut counts = vec![[0u64; 15]; n];
    for (v, row) in dense.adj.iter().enumerate() {
        counts[v][0] = row.len() as u64;
    }

    let mut degs = [0usize; 4];
    for_each_connected_subgraph(&dense, 3, |sub| {
        let mut edges = 0;
        for i in 0..3 {
            degs[i] = 0;
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                if dense.linked(sub[i], sub[j]) {
                    edges += 1;
                    degs[i] += 1;
                    degs[j] += 1;
                }
            }
        }
        if edges == 3 {
            for &v in sub {
                counts[v][3] += 1;
            }
        } else {
            for (i, &v) in sub.iter().enumerate() {
                counts[v][if degs[i] == 2 { 2 } else { 1 }] += 1;
            }
        }
    });

    let mut degs = [0usize; 4];
    for_each_connected_subgraph(&dense, 4, |sub| {
        let mut edges = 0;
        for i in 0..4 {
            degs[i] = 0;
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                if dense.linked(sub[i], sub[j]) {
                    edges += 1;
                    degs[i] += 1;
                    degs[j] += 1;
                }
            }
        }
        match edges {
            3 => {
                // path (1,1,2,2) or star (1,1,1,3)
                let star = degs.iter().any(|&d| d == 3);
                for (i, &v) in sub.iter().enumerate() {
                    let orbit = match (star, degs[i]) {
                        (false, 1) => 4,
                        (false, _) => 5,
                        (true, 1) => 6,
                        (true, _) => 7,
                    };
                    counts[v][orbit] += 1;
                }
            }
            4 => {
                // cycle (2,2,2,2) or paw (1,2,2,3)
                let paw = degs.iter().any(|&d| d == 3);
                for (i, &v) in sub.iter().enumerate() {
                    let orbit = match (paw, degs[i]) {
                        (false, _) => 8,
                        (true, 1) => 9,
                        (true, 2) => 10,
                        (true, _) => 11,
                    };
                    counts[v][orbit] += 1;
                }
            }
            5 => {
                for (i, &v) in sub.iter().enumerate() {
                    counts[v][if degs[i] == 2 { 12 } else { 13 }] += 1;
                }
            }
            _ => {
                for &v in sub {
                    counts[v][14] += 1;
                }
            }
        }
    });

    OrbitCounts { ids, counts }
}

/// The 11x11 Spearman correlation matrix over the non-redundant orbit
/// columns, with one synthetic all-ones row appended as a degeneracy guard.
pub fn orbit_correlation_matrix(g: &StaticGraph) -> Result<Vec<Vec<f64>>> {
    if g.vertex_count() < 2 {
        return Err(Error::InvalidArgument(
            "graphlet correlation needs at least 2 vertices".into(),
        ));
    }
    let orbits = orbit_counts(g);
    let k = GCD_ORBITS.len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(orbits.counts.len() + 1); k];
    for row in &orbits.counts {
        for (c, &orbit) in GCD_ORBITS.iter().enumerate() {
            columns[c].push(row[orbit] as f64);
        }
    }
    for col in columns.iter_mut() {
        col.push(1.0);
    }
    let mut matrix = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let rho = spearman_rho(&columns[i], &columns[j]);
            matrix[i][j] = rho;
            matrix[j][i] = rho;
        }
    }
    Ok(matrix)
}

/// Euclidean norm of the upper-triangle difference of two correlation
/// matrices.
pub fn gcd_from_matrix(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let k = a.len();
    let mut sum = 0.0;
    for i in 0..k {
        for j in (i + 1)..k {
            let d = a[i][j] - b[i][j];
            sum += d * d;
        }
    }
    sum.sqrt()
}

/// Graphlet correlation distance between two graphs; 0 for isomorphic pairs.
pub fn gcd(g1: &StaticGraph, g2: &StaticGraph) -> Result<f64> {
    Ok(gcd_from_matrix(
        &orbit_correlation_matrix(g1)?,
        &orbit_correlation_matrix(g2)?,
    ))
}
