//! Line-oriented text format for grammars. Rules are emitted in canonical
//! key order, so equal inputs always serialize to identical bytes.

use std::fmt::Write as _;

use super::{Grammar, GrammarMeta, Label, RuleSpec};
use crate::error::{Error, Result};

const MAGIC: &str = "thrg-grammar v1";

pub fn serialize(grammar: &Grammar) -> String {
    let meta = grammar.meta();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "alpha={}", grammar.alpha());
    let _ = writeln!(out, "beta={}", meta.beta);
    let _ = writeln!(out, "seed={}", meta.seed);
    let _ = writeln!(out, "source={}", meta.source);
    let _ = writeln!(out, "rules={}", grammar.len());
    for (key, rule) in grammar.rules() {
        let terminals = rule
            .rhs
            .terminals
            .iter()
            .map(|(a, b)| format!("{}-{}", a.render(), b.render()))
            .collect::<Vec<_>>()
            .join(",");
        let tuples = rule
            .rhs
            .nonterminals
            .iter()
            .map(|t| {
                format!(
                    "({})",
                    t.iter().map(|l| l.render()).collect::<Vec<_>>().join(",")
                )
            })
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(
            out,
            "rule lhs_arity={} history={} internal={} terminals=[{}] nonterminals=[{}] count={}",
            rule.arity,
            key.history.as_deref().unwrap_or("-"),
            rule.rhs.internal_count,
            terminals,
            tuples,
            rule.count,
        );
    }
    out
}

fn parse_label(token: &str, index: usize) -> Result<Label> {
    let bad = || Error::GrammarFormat {
        index,
        msg: format!("bad label `{token}`"),
    };
    let (kind, num) = token.split_at(1);
    let n: u16 = num.parse().map_err(|_| bad())?;
    match kind {
        "x" => Ok(Label::External(n)),
        "i" => Ok(Label::Internal(n)),
        _ => Err(bad()),
    }
}

fn parse_terminals(body: &str, index: usize) -> Result<Vec<(Label, Label)>> {
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|pair| {
            let (a, b) = pair.split_once('-').ok_or_else(|| Error::GrammarFormat {
                index,
                msg: format!("bad terminal edge `{pair}`"),
            })?;
            Ok((parse_label(a, index)?, parse_label(b, index)?))
        })
        .collect()
}

fn parse_tuples(body: &str, index: usize) -> Result<Vec<Vec<Label>>> {
    if body.is_empty() {
        return Ok(Vec::new());
    }
    let mut tuples = Vec::new();
    for part in body.split("),(") {
        let inner = part.trim_start_matches('(').trim_end_matches(')');
        if inner.is_empty() {
            tuples.push(Vec::new());
            continue;
        }
        tuples.push(
            inner
                .split(',')
                .map(|t| parse_label(t, index))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(tuples)
}

pub fn deserialize(text: &str) -> Result<Grammar> {
    let mut lines = text.lines();
    let magic = lines.next().unwrap_or_default();
    if magic.trim() != MAGIC {
        return Err(Error::GrammarFormat {
            index: 0,
            msg: format!("expected `{MAGIC}` header, found `{magic}`"),
        });
    }
    let mut alpha: Option<u8> = None;
    let mut meta = GrammarMeta::default();
    let mut declared: Option<usize> = None;
    let mut specs: Vec<RuleSpec> = Vec::new();

    for line in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("alpha=") {
            alpha = Some(rest.parse().map_err(|_| Error::GrammarFormat {
                index: 0,
                msg: format!("bad alpha `{rest}`"),
            })?);
        } else if let Some(rest) = line.strip_prefix("beta=") {
            meta.beta = rest.parse().map_err(|_| Error::GrammarFormat {
                index: 0,
                msg: format!("bad beta `{rest}`"),
            })?;
        } else if let Some(rest) = line.strip_prefix("seed=") {
            meta.seed = rest.parse().map_err(|_| Error::GrammarFormat {
                index: 0,
                msg: format!("bad seed `{rest}`"),
            })?;
        } else if let Some(rest) = line.strip_prefix("source=") {
            meta.source = rest.to_string();
        } else if let Some(rest) = line.strip_prefix("rules=") {
            declared = Some(rest.parse().map_err(|_| Error::GrammarFormat {
                index: 0,
                msg: format!("bad rule count `{rest}`"),
            })?);
        } else if let Some(rest) = line.strip_prefix("rule ") {
            let index = specs.len();
            let mut arity = None;
            let mut history: Option<String> = None;
            let mut internal = None;
            let mut terminals = None;
            let mut nonterminals = None;
            let mut count = None;
            for token in rest.split_whitespace() {
                let (k, v) = token.split_once('=').ok_or_else(|| Error::GrammarFormat {
                    index,
                    msg: format!("bad field `{token}`"),
                })?;
                let bad = |what: &str| Error::GrammarFormat {
                    index,
                    msg: format!("bad {what} `{v}`"),
                };
                match k {
                    "lhs_arity" => arity = Some(v.parse().map_err(|_| bad("arity"))?),
                    "history" => {
                        history = if v == "-" { None } else { Some(v.to_string()) };
                    }
                    "internal" => internal = Some(v.parse().map_err(|_| bad("internal count"))?),
                    "terminals" => {
                        let body = v
                            .strip_prefix('[')
                            .and_then(|s| s.strip_suffix(']'))
                            .ok_or_else(|| bad("terminal list"))?;
                        terminals = Some(parse_terminals(body, index)?);
                    }
                    "nonterminals" => {
                        let body = v
                            .strip_prefix('[')
                            .and_then(|s| s.strip_suffix(']'))
                            .ok_or_else(|| bad("nonterminal list"))?;
                        nonterminals = Some(parse_tuples(body, index)?);
                    }
                    "count" => count = Some(v.parse().map_err(|_| bad("count"))?),
                    other => {
                        return Err(Error::GrammarFormat {
                            index,
                            msg: format!("unknown field `{other}`"),
                        })
                    }
                }
            }
            let missing = |what: &str| Error::GrammarFormat {
                index,
                msg: format!("missing {what}"),
            };
            specs.push(RuleSpec {
                arity: arity.ok_or_else(|| missing("lhs_arity"))?,
                history,
                internal_count: internal.ok_or_else(|| missing("internal"))?,
                terminals: terminals.ok_or_else(|| missing("terminals"))?,
                nonterminals: nonterminals.ok_or_else(|| missing("nonterminals"))?,
                count: count.ok_or_else(|| missing("count"))?,
            });
        } else {
            return Err(Error::GrammarFormat {
                index: specs.len(),
                msg: format!("unrecognized line `{line}`"),
            });
        }
    }

    let alpha = alpha.ok_or_else(|| Error::GrammarFormat {
        index: 0,
        msg: "missing alpha header".into(),
    })?;
    if let Some(declared) = declared {
        if declared != specs.len() {
            return Err(Error::GrammarFormat {
                index: specs.len(),
                msg: format!("header declares {declared} rules, found {}", specs.len()),
            });
        }
    }
    Grammar::from_specs(alpha, meta, specs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{binarize, prune_cnf, temporal_tree_decomposition};
    use crate::grammar::extract_rules;
    use crate::temporal::{size_quantize, EdgeEvent};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_extracted_grammar() {
        let events: Vec<EdgeEvent> = [(0i64, 1i64), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| EdgeEvent {
                u,
                v,
                timestamp: i as f64,
            })
            .collect();
        let g = size_quantize(&events, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let td = binarize(prune_cnf(temporal_tree_decomposition(&g, &mut rng).unwrap()));
        for alpha in [0, 1] {
            let meta = GrammarMeta {
                source: "fixture".into(),
                beta: 3,
                seed: 8,
            };
            let grammar = extract_rules(&td, alpha, meta).unwrap();
            let text = serialize(&grammar);
            let back = deserialize(&text).unwrap();
            assert_eq!(back, grammar);
            assert_eq!(serialize(&back), text);
        }
    }

    #[test]
    fn empty_grammar_round_trips() {
        let g = Grammar::from_specs(0, GrammarMeta::default(), vec![]).unwrap();
        let text = serialize(&g);
        let back = deserialize(&text).unwrap();
        assert!(back.is_empty());
        assert_eq!(serialize(&back), text);
    }

    #[test]
    fn hand_written_file_loads() {
        let text = "\
thrg-grammar v1
alpha=0
beta=2
seed=7
source=hand
rules=2
rule lhs_arity=0 history=- internal=2 terminals=[i0-i1] nonterminals=[(i0,i1)] count=3
rule lhs_arity=2 history=- internal=1 terminals=[x0-i0,x1-i0] nonterminals=[] count=1
";
        let g = deserialize(text).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.total_count(), 4);
        let s_rules = g.group(0, &None);
        assert_eq!(s_rules.len(), 1);
        assert_eq!(g.rule(&s_rules[0]).unwrap().count, 3);
    }

    #[test]
    fn malformed_record_reports_index() {
        let text = "\
thrg-grammar v1
alpha=0
beta=1
seed=0
source=x
rules=1
rule lhs_arity=zz history=- internal=0 terminals=[] nonterminals=[] count=1
";
        match deserialize(text) {
            Err(Error::GrammarFormat { index, .. }) => assert_eq!(index, 0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
