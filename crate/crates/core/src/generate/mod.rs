//! Graph generation: faithful replay of a decomposition, free stochastic
//! derivation, rejection sampling, and exact-size sampling.

mod size_dp;

pub use size_dp::{generate_exact, generate_exact_with_table, SizeWeightTable};

use std::collections::BTreeMap;

use rand::Rng;

use crate::decompose::TreeDecomposition;
use crate::error::{Error, Result};
use crate::grammar::{Grammar, Label, RuleKey};
use crate::graph::{StaticGraph, VertexId};

/// Default application cap for a derivation targeting `n` vertices.
pub fn default_max_applications(n: usize) -> usize {
    10 * n + 1000
}

/// One application tree: which rule fired at each nonterminal site, with
/// children in the rule's tuple order. The shape is independent of the order
/// sites were picked in, so it identifies a derivation.
#[derive(Clone, Debug, Default)]
pub struct DerivationTrace {
    nodes: Vec<TraceNode>,
}

#[derive(Clone, Debug)]
struct TraceNode {
    rule: Option<String>,
    children: Vec<usize>,
}

impl DerivationTrace {
    fn new_root(&mut self) -> usize {
        self.nodes.push(TraceNode {
            rule: None,
            children: Vec::new(),
        });
        self.nodes.len() - 1
    }

    fn fill(&mut self, slot: usize, rule: String, child_count: usize) -> Vec<usize> {
        let mut children = Vec::with_capacity(child_count);
        for _ in 0..child_count {
            self.nodes.push(TraceNode {
                rule: None,
                children: Vec::new(),
            });
            children.push(self.nodes.len() - 1);
        }
        self.nodes[slot].rule = Some(rule);
        self.nodes[slot].children = children.clone();
        children
    }

    /// Canonical nested rendering, usable as a derivation identity.
    pub fn canonical_string(&self) -> String {
        fn render(nodes: &[TraceNode], at: usize, out: &mut String) {
            out.push('(');
            out.push_str(nodes[at].rule.as_deref().unwrap_or("?"));
            for &c in &nodes[at].children {
                out.push(' ');
                render(nodes, c, out);
            }
            out.push(')');
        }
        let mut out = String::new();
        if !self.nodes.is_empty() {
            render(&self.nodes, 0, &mut out);
        }
        out
    }
}

/// A generated graph plus bookkeeping about its derivation.
#[derive(Clone, Debug)]
pub struct GeneratedGraph {
    pub graph: StaticGraph,
    /// Substituted terminal edges that already existed (or were self-merged)
    /// and were silently collapsed.
    pub collapsed_duplicates: usize,
    pub applications: usize,
    pub trace: DerivationTrace,
}

/// Replays a decomposition top-down, applying each node's rule at its own
/// site: external vertices resolve through the parent's bag assignment,
/// internal vertices get fresh ids. The result is isomorphic to the graph
/// the decomposition was built from.
pub fn replay(td: &TreeDecomposition) -> Result<StaticGraph> {
    let mut graph = StaticGraph::new();
    let mut next_id: VertexId = 0;
    let root = td.root();
    let mut stack: Vec<(usize, BTreeMap<VertexId, VertexId>)> = td
        .node(root)
        .children
        .iter()
        .rev()
        .map(|&c| (c, BTreeMap::new()))
        .collect();
    while let Some((id, inherited)) = stack.pop() {
        let node = td.node(id);
        let mut assignment: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for &v in &node.bag {
            let mapped = match inherited.get(&v) {
                Some(&m) => m,
                None => {
                    let fresh = next_id;
                    next_id += 1;
                    graph.add_vertex(fresh);
                    fresh
                }
            };
            assignment.insert(v, mapped);
        }
        for &(u, v) in &node.terminals {
            let (mu, mv) = (assignment.get(&u), assignment.get(&v));
            match (mu, mv) {
                (Some(&mu), Some(&mv)) => {
                    graph.add_edge(mu, mv);
                }
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "terminal edge ({u}, {v}) of node {id} leaves its bag"
                    )))
                }
            }
        }
        for &c in node.children.iter().rev() {
            // only the shared vertices matter; passing the whole bag is the
            // running-intersection guarantee
            stack.push((c, assignment.clone()));
        }
    }
    Ok(graph)
}

/// An active nonterminal of a growing derivation.
struct Site {
    attach: Vec<VertexId>,
    history: Option<String>,
    trace_slot: usize,
}

struct Derivation {
    graph: StaticGraph,
    next_id: VertexId,
    collapsed: usize,
    applications: usize,
    trace: DerivationTrace,
}

impl Derivation {
    fn start() -> (Self, Site) {
        let mut trace = DerivationTrace::default();
        let slot = trace.new_root();
        (
            Self {
                graph: StaticGraph::new(),
                next_id: 0,
                collapsed: 0,
                applications: 0,
                trace,
            },
            Site {
                attach: Vec::new(),
                history: None,
                trace_slot: slot,
            },
        )
    }

    /// Substitutes `rule` at `site`, returning the spawned child sites.
    fn apply(&mut self, grammar: &Grammar, key: &RuleKey, site: &Site) -> Vec<Site> {
        let rule = grammar.rule(key).expect("applied rule exists");
        let internal_base = self.next_id;
        for i in 0..rule.rhs.internal_count {
            self.graph.add_vertex(internal_base + i as VertexId);
        }
        self.next_id += rule.rhs.internal_count as VertexId;
        let resolve = |l: Label| -> VertexId {
            match l {
                Label::External(e) => site.attach[e as usize],
                Label::Internal(i) => internal_base + i as VertexId,
            }
        };
        for &(a, b) in &rule.rhs.terminals {
            let (u, v) = (resolve(a), resolve(b));
            if u == v || !self.graph.add_edge(u, v) {
                self.collapsed += 1;
            }
        }
        let child_history = if grammar.alpha() == 1 {
            Some(key.structural.clone())
        } else {
            None
        };
        let slots = self.trace.fill(
            site.trace_slot,
            render_trace_rule(key),
            rule.rhs.nonterminals.len(),
        );
        self.applications += 1;
        rule.rhs
            .nonterminals
            .iter()
            .zip(slots)
            .map(|(tuple, trace_slot)| Site {
                attach: tuple.iter().map(|&l| resolve(l)).collect(),
                history: child_history.clone(),
                trace_slot,
            })
            .collect()
    }

    fn finish(self) -> GeneratedGraph {
        GeneratedGraph {
            graph: self.graph,
            collapsed_duplicates: self.collapsed,
            applications: self.applications,
            trace: self.trace,
        }
    }
}

fn render_trace_rule(key: &RuleKey) -> String {
    match &key.history {
        Some(h) => format!("{}@{h}", key.structural),
        None => key.structural.clone(),
    }
}

/// Picks a rule from the site's (arity, history) group with probability
/// proportional to its count.
fn pick_rule<'g, R: Rng>(
    grammar: &'g Grammar,
    site: &Site,
    rng: &mut R,
) -> Result<&'g RuleKey> {
    let arity = site.attach.len() as u16;
    let keys = grammar.group(arity, &site.history);
    let total = grammar.group_total(arity, &site.history);
    if keys.is_empty() || total == 0 {
        return Err(Error::DerivationStuck {
            arity: arity as usize,
            history: site.history.clone().unwrap_or_else(|| "-".into()),
        });
    }
    let mut x = rng.gen_range(0..total);
    for key in keys {
        let count = grammar.rule(key).unwrap().count;
        if x < count {
            return Ok(key);
        }
        x -= count;
    }
    unreachable!("counts sum to the group total")
}

/// Free stochastic derivation: starting from a single start site, repeatedly
/// pick an active nonterminal uniformly at random and substitute a rule
/// drawn by count, until no nonterminals remain.
pub fn generate_free<R: Rng>(
    grammar: &Grammar,
    rng: &mut R,
    max_applications: usize,
) -> Result<GeneratedGraph> {
    let (mut state, start) = Derivation::start();
    let mut active = vec![start];
    while !active.is_empty() {
        if state.applications >= max_applications {
            return Err(Error::ApplicationLimit(max_applications));
        }
        let pick = if active.len() == 1 {
            0
        } else {
            rng.gen_range(0..active.len())
        };
        let site = active.swap_remove(pick);
        let key = pick_rule(grammar, &site, rng)?;
        active.extend(state.apply(grammar, key, &site));
    }
    Ok(state.finish())
}

/// Repeats free generation until a sample has exactly `n` vertices.
pub fn generate_rejection<R: Rng>(
    grammar: &Grammar,
    n: usize,
    rng: &mut R,
    max_attempts: usize,
) -> Result<GeneratedGraph> {
    let cap = default_max_applications(n.max(1));
    for _ in 0..max_attempts {
        match generate_free(grammar, rng, cap) {
            Ok(sample) if sample.graph.vertex_count() == n => return Ok(sample),
            Ok(_) => {}
            Err(Error::ApplicationLimit(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::AttemptsExhausted(max_attempts))
}
