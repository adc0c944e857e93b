//! Bottom-up temporal tree decomposition: de-evolve the graph bin by bin
//! (latest first), extracting maximum cliques and closing pending
//! nonterminals over orphaned vertices.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::{extract_max_clique, NodeId, NodeKind, TreeDecomposition, TreeNode};
use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::temporal::TemporalGraph;

/// One clique extraction step of the construction, kept as a diagnostic
/// trace. `hub` equals `leaf` when no pending nodes were absorbed, and
/// `parent_bag` is empty when the step attached directly under the root.
#[derive(Clone, Debug)]
pub struct ExtractionEvent {
    pub bin: u32,
    pub leaf: NodeId,
    pub clique: Vec<VertexId>,
    pub orphans: Vec<VertexId>,
    pub hub: NodeId,
    pub hub_bag: Vec<VertexId>,
    pub parent: Option<NodeId>,
    pub parent_bag: Vec<VertexId>,
}

/// Builds the temporal tree decomposition of a binned graph.
///
/// Bins are processed from the latest to the earliest. Within a bin, maximum
/// cliques are repeatedly extracted (equal-size ties broken by `rng`), their
/// edges removed from the residual graph, and each clique stored in a marked
/// leaf. Vertices left with no residual edge are orphans: all unmarked
/// pending nodes touching an orphan are merged into a hub above the leaf,
/// and the hub's non-orphan vertices become a new pending parent (or the
/// root, when none remain).
pub fn temporal_tree_decomposition<R: Rng>(
    g: &TemporalGraph,
    rng: &mut R,
) -> Result<TreeDecomposition> {
    if g.edge_count() == 0 || g.bins() == 0 {
        return Err(Error::Unbinned);
    }

    let n = g.vertex_count();
    let mut residual: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); n];
    for e in g.edges() {
        residual[e.u as usize].insert(e.v);
        residual[e.v as usize].insert(e.u);
    }

    let mut td = TreeDecomposition::with_root();
    let root = td.root();
    // pending nonterminal ledger: unmarked node -> its bag
    let mut ledger: BTreeMap<NodeId, BTreeSet<VertexId>> = BTreeMap::new();

    for bin in (1..=g.bins()).rev() {
        let mut bin_graph = g.bin_subgraph(bin);
        while bin_graph.edge_count() > 0 {
            let clique = extract_max_clique(&bin_graph, rng)?;
            let bag: BTreeSet<VertexId> = clique.vertices.iter().copied().collect();
            let edges = clique.edges_in(&bin_graph);

            let mut leaf_node = TreeNode::new(NodeKind::CliqueLeaf, bag.clone());
            leaf_node.terminals = edges.iter().copied().collect();
            leaf_node.bin = Some(bin);
            leaf_node.marked = true;
            let leaf = td.add_node(leaf_node);

            for &(u, v) in &edges {
                bin_graph.remove_edge(u, v);
                residual[u as usize].remove(&v);
                residual[v as usize].remove(&u);
            }

            let orphans: BTreeSet<VertexId> = bag
                .iter()
                .copied()
                .filter(|&v| residual[v as usize].is_empty())
                .collect();

            if orphans.is_empty() {
                // the clique's vertices all persist: leave a pending
                // nonterminal over the full clique
                let pending = td.add_node(TreeNode::new(NodeKind::PendingParent, bag.clone()));
                td.attach(pending, leaf);
                ledger.insert(pending, bag.clone());
                td.push_event(ExtractionEvent {
                    bin,
                    leaf,
                    clique: clique.vertices.clone(),
                    orphans: Vec::new(),
                    hub: leaf,
                    hub_bag: clique.vertices.clone(),
                    parent: Some(pending),
                    parent_bag: clique.vertices,
                });
                continue;
            }

            // orphans close pending nonterminals: absorb every unmarked
            // node whose bag meets an orphan
            let absorbed: Vec<NodeId> = ledger
                .iter()
                .filter(|(_, b)| b.iter().any(|v| orphans.contains(v)))
                .map(|(&id, _)| id)
                .collect();

            let hub = if absorbed.is_empty() {
                leaf
            } else {
                let mut hub_bag = bag.clone();
                for &a in &absorbed {
                    hub_bag.extend(ledger[&a].iter().copied());
                }
                let mut hub_node = TreeNode::new(NodeKind::Hub, hub_bag);
                hub_node.bin = Some(bin);
                hub_node.marked = true;
                let hub = td.add_node(hub_node);
                for &a in &absorbed {
                    let kids = td.node(a).children.clone();
                    for c in kids {
                        td.reparent(c, hub);
                    }
                    ledger.remove(&a);
                    td.remove_node(a);
                }
                td.attach(hub, leaf);
                hub
            };

            let hub_bag: Vec<VertexId> = td.node(hub).bag.iter().copied().collect();
            let externals: BTreeSet<VertexId> = td
                .node(hub)
                .bag
                .difference(&orphans)
                .copied()
                .collect();

            let parent = if externals.is_empty() {
                td.attach(root, hub);
                None
            } else {
                let pending =
                    td.add_node(TreeNode::new(NodeKind::PendingParent, externals.clone()));
                td.attach(pending, hub);
                ledger.insert(pending, externals.clone());
                Some(pending)
            };

            td.push_event(ExtractionEvent {
                bin,
                leaf,
                clique: clique.vertices,
                orphans: orphans.iter().copied().collect(),
                hub,
                hub_bag,
                parent,
                parent_bag: externals.into_iter().collect(),
            });
        }
    }

    // Defensive: a pending node can only survive if some vertex never
    // orphaned, which cannot happen when every vertex has an edge. Fold any
    // leftovers into the root so the result is a single tree.
    let leftovers: Vec<NodeId> = ledger.keys().copied().collect();
    for id in leftovers {
        let kids = td.node(id).children.clone();
        for c in kids {
            td.reparent(c, root);
        }
        td.remove_node(id);
    }

    Ok(td)
}
