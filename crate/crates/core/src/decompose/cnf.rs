//! Chomsky-normal-form rewrites of a tree decomposition: prune nodes that
//! add no internal vertex, then cap the branching factor at two.

use super::{NodeKind, TreeDecomposition, TreeNode};

/// Removes every non-root node whose bag is contained in its parent's bag,
/// re-wiring its children to the parent and migrating its terminal edges up.
/// Applied until a fixpoint is reached.
pub fn prune_cnf(mut td: TreeDecomposition) -> TreeDecomposition {
    loop {
        let mut changed = false;
        let ids: Vec<_> = td.node_ids().collect();
        for id in ids {
            if id == td.root() || td.get(id).is_none() {
                continue;
            }
            let Some(parent) = td.node(id).parent else {
                continue;
            };
            let subsumed = td.node(id).bag.is_subset(&td.node(parent).bag);
            if !subsumed {
                continue;
            }
            let kids = td.node(id).children.clone();
            for c in kids {
                td.reparent(c, parent);
            }
            let node = td.remove_node(id);
            let target = td.node_mut(parent);
            target.terminals.extend(node.terminals);
            changed = true;
        }
        if !changed {
            return td;
        }
    }
}

/// Splits every node with more than two children by inserting copies of it:
/// the node keeps its first child plus a copy carrying the rest, recursively.
/// Copies share the bag but hold no terminal edges.
pub fn binarize(mut td: TreeDecomposition) -> TreeDecomposition {
    let mut queue = vec![td.root()];
    while let Some(id) = queue.pop() {
        let children = td.node(id).children.clone();
        if children.len() > 2 {
            let source = td.node(id);
            let mut copy = TreeNode::new(NodeKind::Copy, source.bag.clone());
            copy.bin = source.bin;
            copy.marked = source.marked;
            let copy_id = td.add_node(copy);
            for &c in &children[1..] {
                td.reparent(c, copy_id);
            }
            td.attach(id, copy_id);
            queue.push(children[0]);
            queue.push(copy_id);
        } else {
            queue.extend(children);
        }
    }
    td
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::temporal_tree_decomposition;
    use crate::decompose::NodeId;
    use crate::graph::StaticGraph;
    use crate::temporal::{size_quantize, EdgeEvent};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn leaf_under(td: &mut TreeDecomposition, parent: NodeId, bag: &[u32]) -> NodeId {
        let node = TreeNode::new(NodeKind::Bag, bag.iter().copied().collect());
        let id = td.add_node(node);
        td.attach(parent, id);
        id
    }

    #[test]
    fn duplicate_bag_is_pruned() {
        let mut td = TreeDecomposition::with_root();
        let root = td.root();
        let top = leaf_under(&mut td, root, &[0, 1, 2]);
        let dup = leaf_under(&mut td, top, &[0, 1, 2]);
        let below = leaf_under(&mut td, dup, &[1, 2, 3]);
        td.node_mut(dup).terminals.insert((0, 1));

        let td = prune_cnf(td);
        assert!(td.get(dup).is_none());
        assert_eq!(td.node(top).children, vec![below]);
        assert!(td.node(top).terminals.contains(&(0, 1)));
    }

    #[test]
    fn prune_is_idempotent() {
        let mut td = TreeDecomposition::with_root();
        let root = td.root();
        let top = leaf_under(&mut td, root, &[0, 1]);
        leaf_under(&mut td, top, &[1, 2]);
        let once = prune_cnf(td);
        let before = once.dump();
        let twice = prune_cnf(once);
        assert_eq!(twice.dump(), before);
    }

    #[test]
    fn binarize_splits_three_children() {
        let mut td = TreeDecomposition::with_root();
        let root = td.root();
        let hub = leaf_under(&mut td, root, &[0, 1, 2, 3]);
        let a = leaf_under(&mut td, hub, &[0, 4]);
        let b = leaf_under(&mut td, hub, &[1, 5]);
        let c = leaf_under(&mut td, hub, &[2, 6]);

        let td = binarize(td);
        let hub_children = td.node(hub).children.clone();
        assert_eq!(hub_children.len(), 2);
        assert_eq!(hub_children[0], a);
        let copy = hub_children[1];
        assert_eq!(td.node(copy).kind, NodeKind::Copy);
        assert_eq!(td.node(copy).bag, td.node(hub).bag);
        assert!(td.node(copy).terminals.is_empty());
        assert_eq!(td.node(copy).children, vec![b, c]);
    }

    #[test]
    fn binarize_leaves_small_nodes_alone() {
        let mut td = TreeDecomposition::with_root();
        let root = td.root();
        let top = leaf_under(&mut td, root, &[0, 1]);
        leaf_under(&mut td, top, &[1, 2]);
        leaf_under(&mut td, top, &[0, 3]);
        let before = td.dump();
        let td = binarize(td);
        assert_eq!(td.dump(), before);
    }

    #[test]
    fn cnf_preserves_properties_and_terminals() {
        let edges: Vec<EdgeEvent> = [
            (0i64, 1i64),
            (0, 2),
            (1, 2),
            (1, 3),
            (2, 4),
            (3, 4),
            (3, 5),
            (4, 5),
            (0, 5),
        ]
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| EdgeEvent {
            u,
            v,
            timestamp: i as f64,
        })
        .collect();
        let g = size_quantize(&edges, 3).unwrap();
        let graph = g.full_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let td = temporal_tree_decomposition(&g, &mut rng).unwrap();
        assert!(td.validate(&graph).is_valid());

        let cnf = binarize(prune_cnf(td));
        assert!(cnf.validate(&graph).is_valid());
        // terminal edges still partition the edge set
        let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
        let mut total = 0;
        for id in cnf.node_ids() {
            total += cnf.node(id).terminals.len();
            seen.extend(cnf.node(id).terminals.iter().copied());
        }
        assert_eq!(total, graph.edge_count());
        assert_eq!(seen.len(), graph.edge_count());
        // CNF shape: branching factor at most two, internal vertex unless a
        // two-child copy
        for id in cnf.node_ids() {
            let node = cnf.node(id);
            assert!(node.children.len() <= 2);
            if id == cnf.root() {
                continue;
            }
            let parent = cnf.node(node.parent.unwrap());
            let internals = node.bag.difference(&parent.bag).count();
            if node.kind == NodeKind::Copy {
                assert_eq!(internals, 0);
                assert_eq!(node.children.len(), 2);
            } else {
                assert!(internals >= 1);
            }
        }
    }

    #[test]
    fn validity_detects_forced_violation() {
        // deleting one vertex from one bag must break edge cover or the
        // running intersection
        let g = StaticGraph::from_edges([(0, 1), (1, 2), (0, 2), (2, 3)]);
        let events: Vec<EdgeEvent> = g
            .edges()
            .enumerate()
            .map(|(i, (u, v))| EdgeEvent {
                u: u as i64,
                v: v as i64,
                timestamp: i as f64,
            })
            .collect();
        let tg = size_quantize(&events, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut td = temporal_tree_decomposition(&tg, &mut rng).unwrap();
        assert!(td.validate(&tg.full_graph()).is_valid());
        let victim = td
            .node_ids()
            .find(|&id| td.node(id).bag.len() >= 2)
            .unwrap();
        let &v = td.node(victim).bag.iter().next().unwrap();
        td.node_mut(victim).bag.remove(&v);
        td.node_mut(victim).terminals.clear();
        let report = td.validate(&tg.full_graph());
        assert!(!report.is_valid());
    }
}
