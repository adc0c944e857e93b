//! Simple undirected graphs with deterministic iteration order.

use std::collections::{BTreeMap, BTreeSet};

pub type VertexId = u32;

/// A simple undirected graph. Vertices are arbitrary `u32` ids; adjacency is
/// kept in ordered maps so that every iterator is deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StaticGraph {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
    edge_count: usize,
}

impl StaticGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges<I: IntoIterator<Item = (VertexId, VertexId)>>(edges: I) -> Self {
        let mut g = Self::new();
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_vertex(&mut self, v: VertexId) {
        self.adj.entry(v).or_default();
    }

    /// Inserts an undirected edge. Self-loops and duplicates are ignored;
    /// returns whether a new edge was added.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        if u == v {
            return false;
        }
        let inserted = self.adj.entry(u).or_default().insert(v);
        self.adj.entry(v).or_default().insert(u);
        if inserted {
            self.edge_count += 1;
        }
        inserted
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        let removed = self.adj.get_mut(&u).map_or(false, |s| s.remove(&v));
        if removed {
            self.adj.get_mut(&v).map(|s| s.remove(&u));
            self.edge_count -= 1;
        }
        removed
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj.get(&u).map_or(false, |s| s.contains(&v))
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    /// Edges as canonical `(u, v)` pairs with `u < v`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, nbrs)| nbrs.iter().copied().filter(move |&v| u < v).map(move |v| (u, v)))
    }

    pub fn connected_components(&self) -> usize {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut components = 0;
        for start in self.adj.keys().copied() {
            if seen.contains(&start) {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(v) = stack.pop() {
                for w in self.neighbors(v) {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
        components
    }
}
