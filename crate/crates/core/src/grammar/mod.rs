//! Probabilistic hyperedge replacement grammars extracted from tree
//! decompositions: rule extraction, canonical merging, probabilities, and a
//! line-oriented text format.

mod canon;
mod format;

pub use canon::{canonicalize, render_key, CanonOptions, Label};
pub use format::{deserialize, serialize};

use std::collections::BTreeMap;

use crate::decompose::{NodeId, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::VertexId;

/// Identity of a merged rule: the canonical structural key plus, when one
/// level of history is kept, the structural key of the parent rule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RuleKey {
    pub structural: String,
    pub history: Option<String>,
}

/// A rule body in canonical labeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleRhs {
    pub internal_count: u16,
    pub terminals: Vec<(Label, Label)>,
    pub nonterminals: Vec<Vec<Label>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductionRule {
    pub arity: u16,
    pub history: Option<String>,
    pub rhs: RuleRhs,
    pub count: u64,
}

/// Raw rule material before canonicalization; used when building grammars
/// by hand and when loading grammar files.
#[derive(Clone, Debug)]
pub struct RuleSpec {
    pub arity: u16,
    pub history: Option<String>,
    pub internal_count: u16,
    pub terminals: Vec<(Label, Label)>,
    pub nonterminals: Vec<Vec<Label>>,
    pub count: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrammarMeta {
    pub source: String,
    pub beta: u32,
    pub seed: u64,
}

#[derive(Clone, Debug, Default)]
struct Group {
    keys: Vec<RuleKey>,
    total: u64,
}

/// A probabilistic HRG: canonical rules with occurrence counts, grouped by
/// (arity, history). A rule's probability is its count over its group total.
#[derive(Clone, Debug)]
pub struct Grammar {
    alpha: u8,
    rules: BTreeMap<RuleKey, ProductionRule>,
    groups: BTreeMap<(u16, Option<String>), Group>,
    meta: GrammarMeta,
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha && self.rules == other.rules && self.meta == other.meta
    }
}

impl Grammar {
    pub fn from_specs(alpha: u8, meta: GrammarMeta, specs: Vec<RuleSpec>) -> Result<Self> {
        if alpha > 1 {
            return Err(Error::InvalidArgument(format!(
                "alpha must be 0 or 1, got {alpha}"
            )));
        }
        let opts = CanonOptions::default();
        let mut rules: BTreeMap<RuleKey, ProductionRule> = BTreeMap::new();
        for spec in specs {
            if spec.count == 0 {
                return Err(Error::InvalidArgument("rule count must be >= 1".into()));
            }
            let (terminals, nonterminals, structural) = canonicalize(
                spec.arity,
                spec.internal_count,
                &spec.terminals,
                &spec.nonterminals,
                &opts,
            )?;
            let history = if alpha == 1 { spec.history } else { None };
            let key = RuleKey {
                structural,
                history: history.clone(),
            };
            rules
                .entry(key)
                .and_modify(|r| r.count += spec.count)
                .or_insert(ProductionRule {
                    arity: spec.arity,
                    history,
                    rhs: RuleRhs {
                        internal_count: spec.internal_count,
                        terminals,
                        nonterminals,
                    },
                    count: spec.count,
                });
        }
        Ok(Self::assemble(alpha, meta, rules))
    }

    fn assemble(
        alpha: u8,
        meta: GrammarMeta,
        rules: BTreeMap<RuleKey, ProductionRule>,
    ) -> Self {
        let mut groups: BTreeMap<(u16, Option<String>), Group> = BTreeMap::new();
        for (key, rule) in &rules {
            let g = groups
                .entry((rule.arity, rule.history.clone()))
                .or_default();
            g.keys.push(key.clone());
            g.total += rule.count;
        }
        Self {
            alpha,
            rules,
            groups,
            meta,
        }
    }

    pub fn alpha(&self) -> u8 {
        self.alpha
    }

    pub fn meta(&self) -> &GrammarMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> impl Iterator<Item = (&RuleKey, &ProductionRule)> {
        self.rules.iter()
    }

    pub fn rule(&self, key: &RuleKey) -> Option<&ProductionRule> {
        self.rules.get(key)
    }

    /// Total count over all rules; equals the number of non-root nodes of
    /// the source decomposition.
    pub fn total_count(&self) -> u64 {
        self.rules.values().map(|r| r.count).sum()
    }

    /// Rules applicable at a nonterminal of the given arity and history, in
    /// deterministic order.
    pub fn group(&self, arity: u16, history: &Option<String>) -> &[RuleKey] {
        self.groups
            .get(&(arity, history.clone()))
            .map(|g| g.keys.as_slice())
            .unwrap_or(&[])
    }

    pub fn group_total(&self, arity: u16, history: &Option<String>) -> u64 {
        self.groups
            .get(&(arity, history.clone()))
            .map_or(0, |g| g.total)
    }

    pub fn group_keys(&self) -> impl Iterator<Item = &(u16, Option<String>)> {
        self.groups.keys()
    }

    /// count / group total, in (0, 1].
    pub fn rule_probability(&self, key: &RuleKey) -> Option<f64> {
        let rule = self.rules.get(key)?;
        let total = self.group_total(rule.arity, &rule.history);
        Some(rule.count as f64 / total as f64)
    }

    /// Forgets the history dimension and re-merges by structural key;
    /// counts are conserved.
    pub fn project_alpha0(&self) -> Grammar {
        let mut rules: BTreeMap<RuleKey, ProductionRule> = BTreeMap::new();
        for (key, rule) in &self.rules {
            let nk = RuleKey {
                structural: key.structural.clone(),
                history: None,
            };
            rules
                .entry(nk)
                .and_modify(|r| r.count += rule.count)
                .or_insert_with(|| {
                    let mut r = rule.clone();
                    r.history = None;
                    r
                });
        }
        Self::assemble(0, self.meta.clone(), rules)
    }
}

/// The rule a single decomposition node induces, before merging.
#[derive(Clone, Debug)]
pub struct ExtractedRule {
    pub arity: u16,
    pub rhs: RuleRhs,
    pub structural: String,
}

/// Computes the rule induced by `id`: externals are the vertices shared with
/// the parent bag (sorted by vertex id), internals are the rest of the bag,
/// terminal edges are the node's own, and each child contributes one
/// nonterminal tuple over the shared vertices.
pub fn node_rule(td: &TreeDecomposition, id: NodeId) -> Result<ExtractedRule> {
    let node = td.node(id);
    let parent_bag = match node.parent {
        Some(p) => td.node(p).bag.clone(),
        None => Default::default(),
    };
    let externals: Vec<VertexId> = node
        .bag
        .iter()
        .copied()
        .filter(|v| parent_bag.contains(v))
        .collect();
    let internals: Vec<VertexId> = node
        .bag
        .iter()
        .copied()
        .filter(|v| !parent_bag.contains(v))
        .collect();
    let label_of = |v: VertexId| -> Label {
        if let Ok(pos) = externals.binary_search(&v) {
            Label::External(pos as u16)
        } else {
            Label::Internal(internals.binary_search(&v).unwrap() as u16)
        }
    };
    let terminals: Vec<(Label, Label)> = node
        .terminals
        .iter()
        .map(|&(u, v)| (label_of(u), label_of(v)))
        .collect();
    let tuples: Vec<Vec<Label>> = node
        .children
        .iter()
        .map(|&c| {
            td.node(c)
                .bag
                .iter()
                .copied()
                .filter(|v| node.bag.contains(v))
                .map(label_of)
                .collect()
        })
        .collect();
    let arity = externals.len() as u16;
    let internal_count = internals.len() as u16;
    let (terminals, nonterminals, structural) = canonicalize(
        arity,
        internal_count,
        &terminals,
        &tuples,
        &CanonOptions::default(),
    )?;
    Ok(ExtractedRule {
        arity,
        rhs: RuleRhs {
            internal_count,
            terminals,
            nonterminals,
        },
        structural,
    })
}

/// Extracts the grammar of a CNF-normalized decomposition: one rule per
/// non-root node, merged by canonical key. With `alpha` = 1, each rule also
/// records the structural key of its parent's rule (children of the root get
/// no history).
pub fn extract_rules(td: &TreeDecomposition, alpha: u8, meta: GrammarMeta) -> Result<Grammar> {
    if alpha > 1 {
        return Err(Error::InvalidArgument(format!(
            "alpha must be 0 or 1, got {alpha}"
        )));
    }
    // CNF precondition: at most two children everywhere; at least one
    // internal vertex unless the node has exactly two children
    for id in td.node_ids() {
        let node = td.node(id);
        if node.children.len() > 2 {
            return Err(Error::NotCnf {
                node: id,
                reason: format!("{} children", node.children.len()),
            });
        }
        if id == td.root() {
            continue;
        }
        let parent_bag = &td.node(node.parent.unwrap()).bag;
        let internals = node.bag.difference(parent_bag).count();
        if internals == 0 && node.children.len() != 2 {
            return Err(Error::NotCnf {
                node: id,
                reason: "no internal vertex and not a binary copy".into(),
            });
        }
    }

    let mut structural_of: BTreeMap<NodeId, String> = BTreeMap::new();
    let mut rules: BTreeMap<RuleKey, ProductionRule> = BTreeMap::new();
    for id in td.topo_order() {
        if id == td.root() {
            continue;
        }
        let extracted = node_rule(td, id)?;
        structural_of.insert(id, extracted.structural.clone());
        let history = if alpha == 1 {
            let parent = td.node(id).parent.unwrap();
            if parent == td.root() {
                None
            } else {
                Some(structural_of[&parent].clone())
            }
        } else {
            None
        };
        let key = RuleKey {
            structural: extracted.structural,
            history: history.clone(),
        };
        rules
            .entry(key)
            .and_modify(|r| r.count += 1)
            .or_insert(ProductionRule {
                arity: extracted.arity,
                history,
                rhs: extracted.rhs,
                count: 1,
            });
    }
    Ok(Grammar::assemble(alpha, meta, rules))
}
