//! Exact-size sampling: a dynamic program over derivation sizes, stored in
//! log space so deep derivations with tiny probabilities stay representable.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::grammar::{Grammar, RuleKey};

use super::{Derivation, GeneratedGraph, Site};

const NEG_INF: f64 = f64::NEG_INFINITY;

fn ln_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(NEG_INF, f64::max);
    if max == NEG_INF {
        return NEG_INF;
    }
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    max + sum.ln()
}

#[derive(Clone, Debug)]
enum Plan {
    Leaf,
    Unary(Option<usize>),
    Binary(Option<usize>, Option<usize>),
}

#[derive(Clone, Debug)]
struct RulePlan {
    key: RuleKey,
    ln_p: f64,
    internals: usize,
    plan: Plan,
}

/// `w[(arity, history)][n]`: the total probability that a derivation from
/// such a nonterminal introduces exactly `n` new vertices. CNF guarantees
/// `w[.][0] = 0`, which makes the recurrence well-founded. Space is linear
/// in `n_max` per group; construction time is quadratic.
#[derive(Clone, Debug)]
pub struct SizeWeightTable {
    group_index: BTreeMap<(u16, Option<String>), usize>,
    ln_w: Vec<Vec<f64>>,
    convs: BTreeMap<(usize, usize), Vec<f64>>,
    rules: Vec<RulePlan>,
    rules_of_group: Vec<Vec<usize>>,
    n_max: usize,
}

impl SizeWeightTable {
    /// Builds the table for derivation sizes `0..=n_max`.
    pub fn build(grammar: &Grammar, n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidArgument("n_max must be >= 1".into()));
        }
        let group_index: BTreeMap<(u16, Option<String>), usize> = grammar
            .group_keys()
            .cloned()
            .enumerate()
            .map(|(i, g)| (g, i))
            .collect();
        let n_groups = group_index.len();

        let mut rules = Vec::new();
        let mut rules_of_group = vec![Vec::new(); n_groups];
        for (key, rule) in grammar.rules() {
            let nts = &rule.rhs.nonterminals;
            if nts.len() > 2 {
                return Err(Error::InvalidArgument(format!(
                    "rule {} has {} nonterminals; exact-size sampling needs CNF",
                    key.structural,
                    nts.len()
                )));
            }
            if rule.rhs.internal_count == 0 && nts.len() != 2 {
                return Err(Error::InvalidArgument(format!(
                    "rule {} adds no vertex and is not binary; exact-size sampling needs CNF",
                    key.structural
                )));
            }
            let child_history = if grammar.alpha() == 1 {
                Some(key.structural.clone())
            } else {
                None
            };
            let child_group = |tuple_len: usize| -> Option<usize> {
                group_index
                    .get(&(tuple_len as u16, child_history.clone()))
                    .copied()
            };
            let plan = match nts.len() {
                0 => Plan::Leaf,
                1 => Plan::Unary(child_group(nts[0].len())),
                _ => Plan::Binary(child_group(nts[0].len()), child_group(nts[1].len())),
            };
            let gi = group_index[&(rule.arity, rule.history.clone())];
            let ln_p = (rule.count as f64
                / grammar.group_total(rule.arity, &rule.history) as f64)
                .ln();
            rules_of_group[gi].push(rules.len());
            rules.push(RulePlan {
                key: key.clone(),
                ln_p,
                internals: rule.rhs.internal_count as usize,
                plan,
            });
        }

        let mut convs: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        for rule in &rules {
            if let Plan::Binary(Some(a), Some(b)) = rule.plan {
                let pair = (a.min(b), a.max(b));
                convs.entry(pair).or_default();
            }
        }

        let mut ln_w = vec![vec![NEG_INF; n_max + 1]; n_groups];
        let mut terms: Vec<f64> = Vec::new();
        for n in 0..=n_max {
            // extend convolutions first: they only read strictly smaller sizes
            for (&(a, b), conv) in convs.iter_mut() {
                terms.clear();
                for m in 1..n {
                    let t = ln_w[a][m] + ln_w[b][n - m];
                    if t != NEG_INF {
                        terms.push(t);
                    }
                }
                conv.push(ln_sum_exp(&terms));
            }
            for (gi, rule_ids) in rules_of_group.iter().enumerate() {
                terms.clear();
                for &ri in rule_ids {
                    let t = rule_size_ln_weight(&rules[ri], n, &ln_w, &convs);
                    if t != NEG_INF {
                        terms.push(t);
                    }
                }
                ln_w[gi][n] = ln_sum_exp(&terms);
            }
        }

        Ok(Self {
            group_index,
            ln_w,
            convs,
            rules,
            rules_of_group,
            n_max,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Probability weight of derivations from `(arity, history)` that create
    /// exactly `n` vertices.
    pub fn weight(&self, arity: u16, history: &Option<String>, n: usize) -> f64 {
        self.group_index
            .get(&(arity, history.clone()))
            .map_or(0.0, |&gi| self.ln_w[gi][n].exp())
    }

    fn start_group(&self) -> Option<usize> {
        self.group_index.get(&(0, None)).copied()
    }

    /// Start-symbol sizes with positive weight, ascending.
    pub fn reachable_sizes(&self) -> Vec<usize> {
        match self.start_group() {
            Some(gi) => (0..=self.n_max)
                .filter(|&n| self.ln_w[gi][n] != NEG_INF)
                .collect(),
            None => Vec::new(),
        }
    }

    fn nearest_reachable(&self, target: usize) -> Vec<usize> {
        let mut sizes = self.reachable_sizes();
        sizes.sort_by_key(|&n| (n.abs_diff(target), n));
        sizes.truncate(5);
        sizes.sort_unstable();
        sizes
    }
}

fn rule_size_ln_weight(
    rule: &RulePlan,
    n: usize,
    ln_w: &[Vec<f64>],
    convs: &BTreeMap<(usize, usize), Vec<f64>>,
) -> f64 {
    match rule.plan {
        Plan::Leaf => {
            if rule.internals == n {
                rule.ln_p
            } else {
                NEG_INF
            }
        }
        Plan::Unary(child) => match child {
            Some(c) if n >= rule.internals => rule.ln_p + ln_w[c][n - rule.internals],
            _ => NEG_INF,
        },
        Plan::Binary(a, b) => match (a, b) {
            (Some(a), Some(b)) if n >= rule.internals + 2 => {
                let pair = (a.min(b), a.max(b));
                rule.ln_p + convs[&pair][n - rule.internals]
            }
            _ => NEG_INF,
        },
    }
}

/// Samples an index proportional to `exp(ln_weights[i])`.
fn pick_ln_weighted<R: Rng>(rng: &mut R, ln_weights: &[f64]) -> Option<usize> {
    let max = ln_weights.iter().copied().fold(NEG_INF, f64::max);
    if max == NEG_INF {
        return None;
    }
    let weights: Vec<f64> = ln_weights.iter().map(|&w| (w - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    let mut last_positive = None;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        last_positive = Some(i);
        x -= w;
        if x < 0.0 {
            return Some(i);
        }
    }
    last_positive
}

/// Exact-size sampling against a prebuilt table. The result always has
/// exactly `n` vertices, and its distribution equals the free derivation
/// distribution conditioned on that size.
pub fn generate_exact_with_table<R: Rng>(
    grammar: &Grammar,
    table: &SizeWeightTable,
    n: usize,
    rng: &mut R,
) -> Result<GeneratedGraph> {
    let reachable = table
        .start_group()
        .is_some_and(|gi| n <= table.n_max() && table.ln_w[gi][n] != NEG_INF);
    if !reachable {
        return Err(Error::UnreachableSize {
            target: n,
            nearest: table.nearest_reachable(n),
        });
    }
    let (mut state, start) = Derivation::start();
    // stack entries: an active site and its assigned vertex budget
    let mut stack: Vec<(Site, usize)> = vec![(start, n)];
    while let Some((site, budget)) = stack.pop() {
        let arity = site.attach.len() as u16;
        let Some(&gi) = table.group_index.get(&(arity, site.history.clone())) else {
            return Err(Error::DerivationStuck {
                arity: arity as usize,
                history: site.history.clone().unwrap_or_else(|| "-".into()),
            });
        };
        let rule_ids = &table.rules_of_group[gi];
        let ln_weights: Vec<f64> = rule_ids
            .iter()
            .map(|&ri| rule_size_ln_weight(&table.rules[ri], budget, &table.ln_w, &table.convs))
            .collect();
        let Some(pick) = pick_ln_weighted(rng, &ln_weights) else {
            return Err(Error::DerivationStuck {
                arity: arity as usize,
                history: site.history.clone().unwrap_or_else(|| "-".into()),
            });
        };
        let plan = &table.rules[rule_ids[pick]];
        let children = state.apply(grammar, &plan.key, &site);
        match (&plan.plan, children.len()) {
            (Plan::Leaf, 0) => {}
            (Plan::Unary(_), 1) => {
                let mut children = children;
                stack.push((children.pop().unwrap(), budget - plan.internals));
            }
            (Plan::Binary(a, b), 2) => {
                let (a, b) = (a.unwrap(), b.unwrap());
                let s = budget - plan.internals;
                let splits: Vec<f64> = (1..s)
                    .map(|m| table.ln_w[a][m] + table.ln_w[b][s - m])
                    .collect();
                let m = 1 + pick_ln_weighted(rng, &splits).expect("positive split weight");
                let mut children = children;
                let second = children.pop().unwrap();
                let first = children.pop().unwrap();
                stack.push((second, s - m));
                stack.push((first, m));
            }
            _ => unreachable!("plan arity matches rule arity"),
        }
    }
    debug_assert_eq!(state.graph.vertex_count(), n);
    Ok(state.finish())
}

/// Exact-size sampling, building the weight table on the fly.
pub fn generate_exact<R: Rng>(grammar: &Grammar, n: usize, rng: &mut R) -> Result<GeneratedGraph> {
    let table = SizeWeightTable::build(grammar, n.max(1))?;
    generate_exact_with_table(grammar, &table, n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{GrammarMeta, Label, RuleSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use Label::*;

    fn spec(
        arity: u16,
        internal: u16,
        terminals: Vec<(Label, Label)>,
        nts: Vec<Vec<Label>>,
        count: u64,
    ) -> RuleSpec {
        RuleSpec {
            arity,
            history: None,
            internal_count: internal,
            terminals,
            nonterminals: nts,
            count,
        }
    }

    #[test]
    fn deterministic_leaf_rule_weights() {
        // S -> 3 internal vertices, no nonterminals
        let g = Grammar::from_specs(
            0,
            GrammarMeta::default(),
            vec![spec(0, 3, vec![], vec![], 1)],
        )
        .unwrap();
        let t = SizeWeightTable::build(&g, 6).unwrap();
        for n in 0..=6 {
            let expected = if n == 3 { 1.0 } else { 0.0 };
            assert!((t.weight(0, &None, n) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn two_path_grammar_weights() {
        // S -(1/2)-> 1 internal + A; S -(1/2)-> 2 internal; A -> 1 internal
        let g = Grammar::from_specs(
            0,
            GrammarMeta::default(),
            vec![
                spec(0, 1, vec![], vec![vec![Internal(0)]], 1),
                spec(0, 2, vec![(Internal(0), Internal(1))], vec![], 1),
                spec(1, 1, vec![(External(0), Internal(0))], vec![], 1),
            ],
        )
        .unwrap();
        let t = SizeWeightTable::build(&g, 4).unwrap();
        assert!((t.weight(0, &None, 2) - 1.0).abs() < 1e-12);
        assert!(t.weight(0, &None, 1).abs() < 1e-12);
        assert!(t.weight(0, &None, 3).abs() < 1e-12);
    }

    #[test]
    fn exact_sampler_hits_target_always() {
        // geometric chain grammar: sizes 1.. all reachable
        let g = Grammar::from_specs(
            0,
            GrammarMeta::default(),
            vec![
                spec(0, 1, vec![], vec![vec![Internal(0)]], 1),
                spec(1, 1, vec![(External(0), Internal(0))], vec![vec![Internal(0)]], 1),
                spec(1, 1, vec![(External(0), Internal(0))], vec![], 1),
            ],
        )
        .unwrap();
        let table = SizeWeightTable::build(&g, 12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let out = generate_exact_with_table(&g, &table, 9, &mut rng).unwrap();
            assert_eq!(out.graph.vertex_count(), 9);
        }
    }

    #[test]
    fn unreachable_size_lists_neighbors() {
        let g = Grammar::from_specs(
            0,
            GrammarMeta::default(),
            vec![spec(0, 3, vec![], vec![], 1)],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        match generate_exact(&g, 5, &mut rng) {
            Err(Error::UnreachableSize { target, nearest }) => {
                assert_eq!(target, 5);
                assert_eq!(nearest, vec![3]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_cnf_grammar_is_rejected() {
        // a rule with three nonterminals
        let g = Grammar::from_specs(
            0,
            GrammarMeta::default(),
            vec![spec(
                0,
                1,
                vec![],
                vec![vec![Internal(0)], vec![Internal(0)], vec![Internal(0)]],
                1,
            )],
        )
        .unwrap();
        assert!(SizeWeightTable::build(&g, 4).is_err());
    }

    #[test]
    fn binary_rule_convolution_matches_direct_sum() {
        // S -> 2 internals + B(i0,i1); B -> A(x0) A(x1) with no internal
        // vertex (the legal zero-internal binary shape);
        // A -(2/3)-> 1 internal, A -(1/3)-> 2 internals
        let g = Grammar::from_specs(
            0,
            GrammarMeta::default(),
            vec![
                spec(0, 2, vec![], vec![vec![Internal(0), Internal(1)]], 1),
                spec(
                    2,
                    0,
                    vec![],
                    vec![vec![External(0)], vec![External(1)]],
                    1,
                ),
                spec(1, 1, vec![(External(0), Internal(0))], vec![], 2),
                spec(1, 2, vec![(External(0), Internal(0))], vec![], 1),
            ],
        )
        .unwrap();
        let t = SizeWeightTable::build(&g, 6).unwrap();
        let a1 = 2.0 / 3.0;
        let a2 = 1.0 / 3.0;
        // S size n = 2 + (A sizes summing to n - 2)
        assert!((t.weight(0, &None, 4) - a1 * a1).abs() < 1e-12);
        assert!((t.weight(0, &None, 5) - 2.0 * a1 * a2).abs() < 1e-12);
        assert!((t.weight(0, &None, 6) - a2 * a2).abs() < 1e-12);
        // exact sampling at each reachable size
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [4, 5, 6] {
            let out = generate_exact_with_table(&g, &t, n, &mut rng).unwrap();
            assert_eq!(out.graph.vertex_count(), n);
        }
    }
}
