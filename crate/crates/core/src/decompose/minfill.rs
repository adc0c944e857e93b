//! Static tree decomposition via a min-fill elimination ordering, used by
//! the static pHRG baseline.

use std::collections::{BTreeMap, BTreeSet};

use super::{NodeId, NodeKind, TreeDecomposition, TreeNode};
use crate::error::{Error, Result};
use crate::graph::{StaticGraph, VertexId};

/// Decomposes `g` with the min-fill heuristic (ties by minimum degree, then
/// lowest vertex id). Bags are the eliminated vertex plus its filled
/// neighborhood; each terminal edge lands in the bag of its
/// earlier-eliminated endpoint; component roots hang under an empty root
/// node.
pub fn static_tree_decomposition(g: &StaticGraph) -> Result<TreeDecomposition> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }

    let mut work: BTreeMap<VertexId, BTreeSet<VertexId>> = g
        .vertices()
        .map(|v| (v, g.neighbors(v).collect()))
        .collect();

    let fill_of = |work: &BTreeMap<VertexId, BTreeSet<VertexId>>, v: VertexId| -> usize {
        let nbrs = &work[&v];
        let mut missing = 0;
        for &a in nbrs {
            for &b in nbrs.range((
                std::ops::Bound::Excluded(a),
                std::ops::Bound::Unbounded,
            )) {
                if !work[&a].contains(&b) {
                    missing += 1;
                }
            }
        }
        missing
    };

    let mut order: Vec<VertexId> = Vec::with_capacity(work.len());
    let mut bags: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    while !work.is_empty() {
        let v = work
            .keys()
            .copied()
            .min_by_key(|&v| (fill_of(&work, v), work[&v].len(), v))
            .unwrap();
        let nbrs = work[&v].clone();
        let mut bag = nbrs.clone();
        bag.insert(v);
        bags.insert(v, bag);
        // fill: the neighborhood becomes a clique
        for &a in &nbrs {
            for &b in &nbrs {
                if a < b {
                    work.get_mut(&a).unwrap().insert(b);
                    work.get_mut(&b).unwrap().insert(a);
                }
            }
        }
        for &a in &nbrs {
            work.get_mut(&a).unwrap().remove(&v);
        }
        work.remove(&v);
        order.push(v);
    }

    let elim_pos: BTreeMap<VertexId, usize> =
        order.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let mut td = TreeDecomposition::with_root();
    let root = td.root();
    let mut node_of: BTreeMap<VertexId, NodeId> = BTreeMap::new();
    for &v in &order {
        let node = td.add_node(TreeNode::new(NodeKind::Bag, bags[&v].clone()));
        node_of.insert(v, node);
    }
    // parent of v's bag: the earliest-eliminated other member of the bag
    for &v in &order {
        let parent = bags[&v]
            .iter()
            .filter(|&&u| u != v)
            .min_by_key(|&&u| elim_pos[&u])
            .map(|&u| node_of[&u]);
        match parent {
            Some(p) => td.attach(p, node_of[&v]),
            None => td.attach(root, node_of[&v]),
        }
    }
    for (u, v) in g.edges() {
        let first = if elim_pos[&u] <= elim_pos[&v] { u } else { v };
        td.node_mut(node_of[&first]).terminals.insert((u, v));
    }
    Ok(td)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn brute_force_width(g: &StaticGraph) -> i64 {
        // width of the best elimination ordering, over all orderings
        let vs: Vec<VertexId> = g.vertices().collect();
        let mut best = i64::MAX;
        for perm in vs.iter().copied().permutations(vs.len()) {
            let mut work: BTreeMap<VertexId, BTreeSet<VertexId>> = g
                .vertices()
                .map(|v| (v, g.neighbors(v).collect()))
                .collect();
            let mut width = 0i64;
            for v in perm {
                let nbrs = work[&v].clone();
                width = width.max(nbrs.len() as i64);
                for &a in &nbrs {
                    for &b in &nbrs {
                        if a < b {
                            work.get_mut(&a).unwrap().insert(b);
                            work.get_mut(&b).unwrap().insert(a);
                        }
                    }
                }
                for &a in &nbrs {
                    work.get_mut(&a).unwrap().remove(&v);
                }
                work.remove(&v);
            }
            best = best.min(width);
        }
        best
    }

    #[test]
    fn tree_has_width_one() {
        let g = StaticGraph::from_edges([(0, 1), (1, 2), (1, 3), (3, 4)]);
        let td = static_tree_decomposition(&g).unwrap();
        assert_eq!(td.width(), 1);
        assert!(td.validate(&g).is_valid());
    }

    #[test]
    fn clique_has_full_width() {
        let g = StaticGraph::from_edges([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let td = static_tree_decomposition(&g).unwrap();
        assert_eq!(td.width(), 3);
        assert!(td.validate(&g).is_valid());
    }

    #[test]
    fn five_cycle_matches_brute_force() {
        let g = StaticGraph::from_edges([(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        let td = static_tree_decomposition(&g).unwrap();
        assert!(td.validate(&g).is_valid());
        assert_eq!(td.width(), brute_force_width(&g));
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn empty_graph_is_an_error() {
        assert!(matches!(
            static_tree_decomposition(&StaticGraph::new()),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn terminals_partition_edges() {
        let g = StaticGraph::from_edges([(0, 1), (1, 2), (2, 0), (2, 3), (4, 5)]);
        let td = static_tree_decomposition(&g).unwrap();
        assert!(td.validate(&g).is_valid());
        let total: usize = td.node_ids().map(|id| td.node(id).terminals.len()).sum();
        assert_eq!(total, g.edge_count());
    }
}
