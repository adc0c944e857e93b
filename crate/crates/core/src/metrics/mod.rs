//! Graph comparison metrics: distribution extraction, the area between
//! discrete CDFs, graphlet orbit statistics, and an exact isomorphism test
//! for small graphs.

mod iso;
mod orbits;

pub use iso::is_isomorphic;
pub use orbits::{gcd, gcd_from_matrix, orbit_correlation_matrix, orbit_counts, OrbitCounts};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{StaticGraph, VertexId};

/// Bucket count used when a continuous per-vertex metric is discretized
/// before EMD.
pub const CONTINUOUS_BUCKETS: usize = 100;

/// A discrete cumulative distribution: sorted support values with
/// non-decreasing cumulative mass ending at 1.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteCdf {
    support: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DiscreteCdf {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::from_weighted(values.into_iter().map(|v| (v, 1)))
    }

    pub fn from_weighted(values: impl IntoIterator<Item = (f64, u64)>) -> Result<Self> {
        let mut entries: Vec<(f64, u64)> = Vec::new();
        for (v, w) in values {
            if !v.is_finite() {
                return Err(Error::InvalidArgument("non-finite CDF value".into()));
            }
            if w > 0 {
                entries.push((if v == 0.0 { 0.0 } else { v }, w));
            }
        }
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty distribution".into()));
        }
        let total: u64 = entries.iter().map(|&(_, w)| w).sum();
        let mut running = 0u64;
        let mut support: Vec<f64> = Vec::new();
        let mut cumulative: Vec<f64> = Vec::new();
        for (v, w) in entries {
            running += w;
            if support.last() == Some(&v) {
                *cumulative.last_mut().unwrap() = running as f64 / total as f64;
            } else {
                support.push(v);
                cumulative.push(running as f64 / total as f64);
            }
        }
        Ok(Self {
            support,
            cumulative,
        })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Step-function evaluation: total mass at values <= x.
    pub fn at(&self, x: f64) -> f64 {
        match self
            .support
            .binary_search_by(|v| v.total_cmp(&x))
        {
            Ok(i) => self.cumulative[i],
            Err(0) => 0.0,
            Err(i) => self.cumulative[i - 1],
        }
    }
}

/// Area between two discrete CDFs over their merged support: the sum of
/// |F_a - F_b| times the gap to the next support value. On integer-valued
/// supports this is the 1-Wasserstein distance.
pub fn emd(a: &DiscreteCdf, b: &DiscreteCdf) -> f64 {
    let mut points: Vec<f64> = a
        .support
        .iter()
        .chain(b.support.iter())
        .copied()
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut total = 0.0;
    for w in points.windows(2) {
        total += (a.at(w[0]) - b.at(w[0])).abs() * (w[1] - w[0]);
    }
    total
}

/// CDF over vertex degrees.
pub fn degree_cdf(g: &StaticGraph) -> Result<DiscreteCdf> {
    DiscreteCdf::from_values(g.vertices().map(|v| g.degree(v) as f64))
}

/// CDF over shortest-path distances of all connected ordered vertex pairs
/// (distance >= 1), computed by BFS from every vertex.
pub fn hop_distance_cdf(g: &StaticGraph) -> Result<DiscreteCdf> {
    let ids: Vec<VertexId> = g.vertices().collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|&v| g.neighbors(v).map(|w| index[&w]).collect())
        .collect();
    let n = ids.len();
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for src in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[src] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for (v, &d) in dist.iter().enumerate() {
            if v != src && d != usize::MAX {
                *counts.entry(d as u64).or_default() += 1;
            }
        }
    }
    DiscreteCdf::from_weighted(counts.into_iter().map(|(d, c)| (d as f64, c)))
}

fn bucketize(values: impl Iterator<Item = f64>, max: f64) -> Result<DiscreteCdf> {
    DiscreteCdf::from_values(values.map(|v| {
        let idx = ((v / max) * CONTINUOUS_BUCKETS as f64) as usize;
        idx.min(CONTINUOUS_BUCKETS - 1) as f64
    }))
}

/// Per-vertex local clustering coefficients, discretized to
/// `CONTINUOUS_BUCKETS` equal-width buckets over [0, 1]; the CDF support is
/// the bucket index.
pub fn clustering_cdf(g: &StaticGraph) -> Result<DiscreteCdf> {
    bucketize(clustering_coefficients(g)?.into_iter(), 1.0)
}

pub fn clustering_coefficients(g: &StaticGraph) -> Result<Vec<f64>> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(g.vertices()
        .map(|v| {
            let nbrs: Vec<VertexId> = g.neighbors(v).collect();
            let d = nbrs.len();
            if d < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    if g.has_edge(a, b) {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (d * (d - 1)) as f64
        })
        .collect())
}

/// Eigenvector centrality via shifted power iteration on A + I (the shift
/// guarantees convergence on bipartite graphs without changing the
/// eigenvectors), L2-normalized, discretized like `clustering_cdf`.
pub fn eigenvector_cdf(g: &StaticGraph) -> Result<DiscreteCdf> {
    bucketize(eigenvector_centrality(g, 1e-8, 1000)?.into_iter(), 1.0)
}

pub fn eigenvector_centrality(g: &StaticGraph, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let ids: Vec<VertexId> = g.vertices().collect();
    let n = ids.len();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|&v| g.neighbors(v).map(|w| index[&w]).collect())
        .collect();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let mut next = x.clone(); // the +I shift
        for (v, nbrs) in adj.iter().enumerate() {
            for &w in nbrs {
                next[v] += x[w];
            }
        }
        let norm = next.iter().map(|a| a * a).sum::<f64>().sqrt();
        next.iter_mut().for_each(|a| *a /= norm);
        residual = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        x = next;
        if residual <= tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence(residual))
}

/// Spearman rank correlation with average ranks on ties. Returns 0 when
/// either side has no rank variance.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    pearson(&rx, &ry)
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

/// Sample mean and 1.96 * sd / sqrt(n) half-width; the half-width is 0 for
/// fewer than two samples.
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * var.sqrt() / n.sqrt())
}
