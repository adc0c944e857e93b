//! Tree decompositions: the temporal bottom-up construction, a static
//! min-fill construction for the pHRG baseline, property validation, and
//! Chomsky-normal-form rewrites.

mod cliques;
mod cnf;
mod minfill;
mod temporal;

pub use cliques::{enumerate_maximal_cliques, extract_max_clique, Clique};
pub use cnf::{binarize, prune_cnf};
pub use minfill::static_tree_decomposition;
pub use temporal::{temporal_tree_decomposition, ExtractionEvent};

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::graph::{StaticGraph, VertexId};

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// The start nonterminal; always the root, always an empty bag.
    Root,
    /// A marked leaf holding the terminal edges of one extracted clique.
    CliqueLeaf,
    /// The merge target created when orphaned vertices close over pending
    /// nonterminals.
    Hub,
    /// An unmarked placeholder awaiting absorption; none survive a finished
    /// temporal construction.
    PendingParent,
    /// A bag of the static min-fill decomposition.
    Bag,
    /// A binarization copy: same bag as the node it splits, no terminals.
    Copy,
}

impl NodeKind {
    fn name(self) -> &'static str {
        match self {
            NodeKind::Root => "root",
            NodeKind::CliqueLeaf => "clique",
            NodeKind::Hub => "hub",
            NodeKind::PendingParent => "parent",
            NodeKind::Bag => "bag",
            NodeKind::Copy => "copy",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub bag: BTreeSet<VertexId>,
    pub terminals: BTreeSet<(VertexId, VertexId)>,
    pub bin: Option<u32>,
    pub kind: NodeKind,
    pub marked: bool,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

impl TreeNode {
    pub(crate) fn new(kind: NodeKind, bag: BTreeSet<VertexId>) -> Self {
        Self {
            bag,
            terminals: BTreeSet::new(),
            bin: None,
            kind,
            marked: false,
            parent: None,
            children: Vec::new(),
        }
    }
}

/// Outcome of one tree-decomposition property check.
#[derive(Clone, Debug)]
pub struct Check {
    pub ok: bool,
    pub witness: Option<String>,
}

impl Check {
    fn pass() -> Self {
        Self {
            ok: true,
            witness: None,
        }
    }

    fn fail(witness: String) -> Self {
        Self {
            ok: false,
            witness: Some(witness),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ValidityReport {
    pub vertex_cover: Check,
    pub edge_cover: Check,
    pub running_intersection: Check,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.vertex_cover.ok && self.edge_cover.ok && self.running_intersection.ok
    }
}

/// A rooted tree of bags. Node ids are stable across removals (slots are
/// tombstoned), which keeps dumps and construction traces meaningful.
#[derive(Clone, Debug)]
pub struct TreeDecomposition {
    nodes: Vec<Option<TreeNode>>,
    root: NodeId,
    events: Vec<ExtractionEvent>,
}

impl TreeDecomposition {
    pub(crate) fn with_root() -> Self {
        Self {
            nodes: vec![Some(TreeNode::new(NodeKind::Root, BTreeSet::new()))],
            root: 0,
            events: Vec::new(),
        }
    }

    pub(crate) fn add_node(&mut self, node: TreeNode) -> NodeId {
        self.nodes.push(Some(node));
        self.nodes.len() - 1
    }

    pub(crate) fn attach(&mut self, parent: NodeId, child: NodeId) {
        debug_assert!(self.node(child).parent.is_none());
        self.node_mut(child).parent = Some(parent);
        self.node_mut(parent).children.push(child);
    }

    /// Re-parents `child` under `new_parent`, detaching it first if needed.
    pub(crate) fn reparent(&mut self, child: NodeId, new_parent: NodeId) {
        if let Some(old) = self.node(child).parent {
            let kids = &mut self.node_mut(old).children;
            kids.retain(|&c| c != child);
        }
        self.node_mut(child).parent = None;
        self.attach(new_parent, child);
    }

    /// Removes a node whose children have already been re-parented.
    pub(crate) fn remove_node(&mut self, id: NodeId) -> TreeNode {
        debug_assert!(id != self.root);
        let node = self.nodes[id].take().expect("removing dead node");
        debug_assert!(node.children.is_empty());
        if let Some(p) = node.parent {
            self.node_mut(p).children.retain(|&c| c != id);
        }
        node
    }

    pub(crate) fn push_event(&mut self, ev: ExtractionEvent) {
        self.events.push(ev);
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        self.nodes[id].as_ref().expect("dead node id")
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> &mut TreeNode {
        self.nodes[id].as_mut().expect("dead node id")
    }

    pub fn get(&self, id: NodeId) -> Option<&TreeNode> {
        self.nodes.get(id).and_then(Option::as_ref)
    }

    /// Live node ids, ascending.
    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.as_ref().map(|_| i))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.iter().flatten().count()
    }

    /// Top-down (BFS) order starting at the root.
    pub fn topo_order(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.node_count());
        let mut queue = VecDeque::from([self.root]);
        while let Some(id) = queue.pop_front() {
            order.push(id);
            queue.extend(self.node(id).children.iter().copied());
        }
        order
    }

    /// Construction trace of the temporal algorithm; empty for static
    /// decompositions. Node ids refer to construction time and may have
    /// been merged away by later rewrites.
    pub fn events(&self) -> &[ExtractionEvent] {
        &self.events
    }

    /// Largest bag size minus one; -1 for a root-only tree.
    pub fn width(&self) -> i64 {
        self.node_ids()
            .map(|id| self.node(id).bag.len() as i64 - 1)
            .max()
            .unwrap_or(-1)
    }

    /// Checks vertex cover, edge cover, and the running intersection
    /// property against `g`, reporting a witness for each failure.
    pub fn validate(&self, g: &StaticGraph) -> ValidityReport {
        let mut covered: BTreeSet<VertexId> = BTreeSet::new();
        for id in self.node_ids() {
            covered.extend(self.node(id).bag.iter().copied());
        }
        let graph_vertices: BTreeSet<VertexId> = g.vertices().collect();
        let vertex_cover = if let Some(&v) = graph_vertices.difference(&covered).next() {
            Check::fail(format!("vertex {v} not covered by any bag"))
        } else if let Some(&v) = covered.difference(&graph_vertices).next() {
            Check::fail(format!("bag vertex {v} does not occur in the graph"))
        } else {
            Check::pass()
        };

        let mut edge_cover = Check::pass();
        'edges: for (u, v) in g.edges() {
            for id in self.node_ids() {
                let bag = &self.node(id).bag;
                if bag.contains(&u) && bag.contains(&v) {
                    continue 'edges;
                }
            }
            edge_cover = Check::fail(format!("edge ({u}, {v}) not contained in any bag"));
            break;
        }

        let mut running_intersection = Check::pass();
        for &v in &graph_vertices {
            let holders: BTreeSet<NodeId> = self
                .node_ids()
                .filter(|&id| self.node(id).bag.contains(&v))
                .collect();
            let Some(&start) = holders.iter().next() else {
                continue;
            };
            let mut seen = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(id) = stack.pop() {
                let node = self.node(id);
                let adjacent = node
                    .children
                    .iter()
                    .copied()
                    .chain(node.parent)
                    .filter(|n| holders.contains(n));
                for n in adjacent {
                    if seen.insert(n) {
                        stack.push(n);
                    }
                }
            }
            if seen.len() != holders.len() {
                running_intersection =
                    Check::fail(format!("bags containing vertex {v} are not connected"));
                break;
            }
        }

        ValidityReport {
            vertex_cover,
            edge_cover,
            running_intersection,
        }
    }

    /// Debug dump: one line per live node, ordered by id.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for id in self.node_ids() {
            let n = self.node(id);
            let parent = n.parent.map_or("-".to_string(), |p| p.to_string());
            let bin = n.bin.map_or("-".to_string(), |b| b.to_string());
            let bag = n
                .bag
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let terms = n
                .terminals
                .iter()
                .map(|(u, v)| format!("({u},{v})"))
                .collect::<Vec<_>>()
                .join(",");
            let marked = if n.marked { "marked" } else { "-" };
            let _ = writeln!(
                out,
                "{id} {parent} {} {bin} bag={{{bag}}} terms={{{terms}}} {marked}",
                n.kind.name()
            );
        }
        out
    }
}
