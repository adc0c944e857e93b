//! Canonical keys for production rules: deterministic, invariant under any
//! permutation of internal labels, with external positions fixed.

use itertools::Itertools;

use crate::error::{Error, Result};

/// A right-hand-side label: an attachment point of the replaced nonterminal
/// (positional, part of rule identity) or a vertex created by the rule
/// (interchangeable).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    External(u16),
    Internal(u16),
}

impl Label {
    pub fn render(self) -> String {
        match self {
            Label::External(e) => format!("x{e}"),
            Label::Internal(i) => format!("i{i}"),
        }
    }
}

/// Canonicalization limits. Internal labels are first partitioned by an
/// iteratively refined structural signature; only permutations within the
/// residual classes are enumerated, and `max_permutations` bounds that
/// search.
#[derive(Clone, Copy, Debug)]
pub struct CanonOptions {
    pub max_permutations: u64,
}

impl Default for CanonOptions {
    fn default() -> Self {
        Self {
            max_permutations: 1_000_000,
        }
    }
}

fn norm_edge(a: Label, b: Label) -> (Label, Label) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn apply(
    map: &[u16],
    terminals: &[(Label, Label)],
    tuples: &[Vec<Label>],
) -> (Vec<(Label, Label)>, Vec<Vec<Label>>) {
    let relabel = |l: Label| match l {
        Label::External(e) => Label::External(e),
        Label::Internal(i) => Label::Internal(map[i as usize]),
    };
    let mut terms: Vec<(Label, Label)> = terminals
        .iter()
        .map(|&(a, b)| norm_edge(relabel(a), relabel(b)))
        .collect();
    terms.sort_unstable();
    let mut nts: Vec<Vec<Label>> = tuples
        .iter()
        .map(|t| t.iter().map(|&l| relabel(l)).collect())
        .collect();
    nts.sort_unstable();
    (terms, nts)
}

/// Swapping internals `p` and `q` leaves the rule structure unchanged.
fn swap_is_automorphism(
    p: u16,
    q: u16,
    internal_count: u16,
    terminals: &[(Label, Label)],
    tuples: &[Vec<Label>],
) -> bool {
    let ident: Vec<u16> = (0..internal_count).collect();
    let mut swapped = ident.clone();
    swapped[p as usize] = q;
    swapped[q as usize] = p;
    apply(&swapped, terminals, tuples) == apply(&ident, terminals, tuples)
}

/// Iteratively refined signatures for the internal labels; classes are
/// returned in canonical (signature) order. Signatures never mention
/// internal indices directly, so the partition and its order are invariant
/// under internal relabeling.
fn refine_classes(
    internal_count: u16,
    terminals: &[(Label, Label)],
    tuples: &[Vec<Label>],
) -> Vec<Vec<u16>> {
    let n = internal_count as usize;
    let mut color = vec![0u32; n];
    loop {
        let sigs: Vec<String> = (0..n)
            .map(|j| {
                let me = Label::Internal(j as u16);
                let mut ext: Vec<String> = Vec::new();
                let mut int: Vec<String> = Vec::new();
                for &(a, b) in terminals {
                    let other = if a == me {
                        Some(b)
                    } else if b == me {
                        Some(a)
                    } else {
                        None
                    };
                    match other {
                        Some(Label::External(e)) => ext.push(format!("x{e}")),
                        Some(Label::Internal(i)) => int.push(format!("c{}", color[i as usize])),
                        None => {}
                    }
                }
                ext.sort_unstable();
                int.sort_unstable();
                let mut occ: Vec<String> = tuples
                    .iter()
                    .filter(|t| t.contains(&me))
                    .map(|t| {
                        let slots: Vec<String> = t
                            .iter()
                            .map(|&l| match l {
                                Label::External(e) => format!("x{e}"),
                                Label::Internal(i) if i as usize == j => "*".into(),
                                Label::Internal(i) => format!("c{}", color[i as usize]),
                            })
                            .collect();
                        format!("({})", slots.join(","))
                    })
                    .collect();
                occ.sort_unstable();
                format!(
                    "c{};E:{};I:{};O:{}",
                    color[j],
                    ext.join(","),
                    int.join(","),
                    occ.join(";")
                )
            })
            .collect();
        let distinct: Vec<&String> = sigs.iter().sorted().dedup().collect();
        let next: Vec<u32> = sigs
            .iter()
            .map(|s| distinct.binary_search(&s).unwrap() as u32)
            .collect();
        if next == color {
            break;
        }
        color = next;
    }
    let mut classes: Vec<(u32, Vec<u16>)> = Vec::new();
    for (j, &c) in color.iter().enumerate() {
        match classes.iter_mut().find(|(cc, _)| *cc == c) {
            Some((_, members)) => members.push(j as u16),
            None => classes.push((c, vec![j as u16])),
        }
    }
    classes.sort_by_key(|(c, _)| *c);
    classes.into_iter().map(|(_, m)| m).collect()
}

/// Computes the canonical relabeling of a rule body and renders its key.
///
/// External labels are positionally fixed; internal labels are renamed by
/// the lexicographically minimal serialization over the permutation classes
/// left after signature refinement. Two rule bodies get the same key exactly
/// when an internal-label bijection maps one onto the other.
pub fn canonicalize(
    arity: u16,
    internal_count: u16,
    terminals: &[(Label, Label)],
    tuples: &[Vec<Label>],
    opts: &CanonOptions,
) -> Result<(Vec<(Label, Label)>, Vec<Vec<Label>>, String)> {
    for l in terminals
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .chain(tuples.iter().flatten().copied())
    {
        let ok = match l {
            Label::External(e) => e < arity,
            Label::Internal(i) => i < internal_count,
        };
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "label {} out of range for arity {arity}, internals {internal_count}",
                l.render()
            )));
        }
    }

    let classes = refine_classes(internal_count, terminals, tuples);
    // classes whose members are pairwise interchangeable need no search
    let mut searchable: Vec<usize> = Vec::new();
    let mut budget: u64 = 1;
    for (ci, class) in classes.iter().enumerate() {
        if class.len() == 1 {
            continue;
        }
        let twins = class.iter().tuple_combinations().all(|(&p, &q)| {
            swap_is_automorphism(p, q, internal_count, terminals, tuples)
        });
        if twins {
            continue;
        }
        let perms: u64 = (1..=class.len() as u64).product();
        budget = budget.saturating_mul(perms);
        if budget > opts.max_permutations {
            return Err(Error::CanonBudget(format!(
                "{} permutations exceed the limit of {}",
                budget, opts.max_permutations
            )));
        }
        searchable.push(ci);
    }

    // base offsets per class in canonical order
    let mut offset = vec![0u16; classes.len()];
    let mut next = 0u16;
    for (ci, class) in classes.iter().enumerate() {
        offset[ci] = next;
        next += class.len() as u16;
    }
    let mut base_map = vec![0u16; internal_count as usize];
    for (ci, class) in classes.iter().enumerate() {
        for (slot, &j) in class.iter().enumerate() {
            base_map[j as usize] = offset[ci] + slot as u16;
        }
    }

    let mut best = apply(&base_map, terminals, tuples);
    if !searchable.is_empty() {
        let perm_sets: Vec<Vec<Vec<u16>>> = searchable
            .iter()
            .map(|&ci| {
                classes[ci]
                    .iter()
                    .copied()
                    .permutations(classes[ci].len())
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; perm_sets.len()];
        loop {
            let mut map = base_map.clone();
            for (si, &ci) in searchable.iter().enumerate() {
                for (slot, &j) in perm_sets[si][idx[si]].iter().enumerate() {
                    map[j as usize] = offset[ci] + slot as u16;
                }
            }
            let candidate = apply(&map, terminals, tuples);
            if candidate < best {
                best = candidate;
            }
            // odometer
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < perm_sets[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }

    let (terms, nts) = best;
    let key = render_key(arity, internal_count, &terms, &nts);
    Ok((terms, nts, key))
}

pub fn render_key(
    arity: u16,
    internal_count: u16,
    terminals: &[(Label, Label)],
    tuples: &[Vec<Label>],
) -> String {
    let terms = terminals
        .iter()
        .map(|(a, b)| format!("{}-{}", a.render(), b.render()))
        .join(",");
    let nts = tuples
        .iter()
        .map(|t| format!("({})", t.iter().map(|l| l.render()).join(",")))
        .join(",");
    format!("k{arity};i{internal_count};t[{terms}];n[{nts}]")
}
