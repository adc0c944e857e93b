//! Exact graph isomorphism for small graphs: joint color refinement, then
//! backtracking over color-compatible candidates.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{StaticGraph, VertexId};

struct Side {
    adj: Vec<u64>,
    degree: Vec<usize>,
    n: usize,
}

impl Side {
    fn build(g: &StaticGraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().collect();
        let n = ids.len();
        let index: BTreeMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![0u64; n];
        for (u, v) in g.edges() {
            let (a, b) = (index[&u], index[&v]);
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        let degree = adj.iter().map(|m| m.count_ones() as usize).collect();
        Self { adj, degree, n }
    }
}

/// One round of joint color refinement; returns false when the color
/// multisets of the two graphs diverge (hence no isomorphism).
fn refine(a: &Side, b: &Side, colors_a: &mut [u32], colors_b: &mut [u32]) -> Option<bool> {
    let signature = |side: &Side, colors: &[u32], v: usize| -> (u32, Vec<u32>) {
        let mut nbrs: Vec<u32> = (0..side.n)
            .filter(|&w| side.adj[v] & (1 << w) != 0)
            .map(|w| colors[w])
            .collect();
        nbrs.sort_unstable();
        (colors[v], nbrs)
    };
    let sigs_a: Vec<_> = (0..a.n).map(|v| signature(a, colors_a, v)).collect();
    let sigs_b: Vec<_> = (0..b.n).map(|v| signature(b, colors_b, v)).collect();
    let mut palette: BTreeMap<&(u32, Vec<u32>), u32> = BTreeMap::new();
    for sig in sigs_a.iter().chain(sigs_b.iter()) {
        let next = palette.len() as u32;
        palette.entry(sig).or_insert(next);
    }
    let next_a: Vec<u32> = sigs_a.iter().map(|s| palette[s]).collect();
    let next_b: Vec<u32> = sigs_b.iter().map(|s| palette[s]).collect();
    let mut count_a: BTreeMap<u32, usize> = BTreeMap::new();
    let mut count_b: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in &next_a {
        *count_a.entry(c).or_default() += 1;
    }
    for &c in &next_b {
        *count_b.entry(c).or_default() += 1;
    }
    if count_a != count_b {
        return None;
    }
    let stable = next_a[..] == colors_a[..] && next_b[..] == colors_b[..];
    colors_a.copy_from_slice(&next_a);
    colors_b.copy_from_slice(&next_b);
    Some(stable)
}

fn backtrack(
    a: &Side,
    b: &Side,
    order: &[usize],
    colors_a: &[u32],
    colors_b: &[u32],
    mapping: &mut Vec<Option<usize>>,
    used: &mut u64,
    depth: usize,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for u in 0..b.n {
        if *used & (1 << u) != 0 || colors_b[u] != colors_a[v] || b.degree[u] != a.degree[v] {
            continue;
        }
        let consistent = (0..a.n).all(|w| match mapping[w] {
            Some(x) => (a.adj[v] & (1 << w) != 0) == (b.adj[u] & (1 << x) != 0),
            None => true,
        });
        if !consistent {
            continue;
        }
        mapping[v] = Some(u);
        *used |= 1 << u;
        if backtrack(a, b, order, colors_a, colors_b, mapping, used, depth + 1) {
            return true;
        }
        mapping[v] = None;
        *used &= !(1 << u);
    }
    false
}

/// Exact isomorphism for graphs of at most 64 vertices.
pub fn is_isomorphic(g1: &StaticGraph, g2: &StaticGraph) -> Result<bool> {
    if g1.vertex_count() > 64 || g2.vertex_count() > 64 {
        return Err(Error::InvalidArgument(
            "isomorphism test supports at most 64 vertices".into(),
        ));
    }
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return Ok(false);
    }
    let a = Side::build(g1);
    let b = Side::build(g2);
    if a.n == 0 {
        return Ok(true);
    }
    let mut deg_a = a.degree.clone();
    let mut deg_b = b.degree.clone();
    deg_a.sort_unstable();
    deg_b.sort_unstable();
    if deg_a != deg_b {
        return Ok(false);
    }

    let mut colors_a = vec![0u32; a.n];
    let mut colors_b = vec![0u32; b.n];
    for _ in 0..=a.n {
        match refine(&a, &b, &mut colors_a, &mut colors_b) {
            None => return Ok(false),
            Some(true) => break,
            Some(false) => {}
        }
    }

    // most constrained first: rare colors, then high degree
    let mut class_size: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in &colors_a {
        *class_size.entry(c).or_default() += 1;
    }
    let mut order: Vec<usize> = (0..a.n).collect();
    order.sort_by_key(|&v| (class_size[&colors_a[v]], usize::MAX - a.degree[v], v));

    let mut mapping = vec![None; a.n];
    let mut used = 0u64;
    Ok(backtrack(
        &a,
        &b,
        &order,
        &colors_a,
        &colors_b,
        &mut mapping,
        &mut used,
        0,
    ))
}
