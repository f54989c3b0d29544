//! Semantic check of the Ω property: truth must not depend on the soVars being functions.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use snl_ast::{DomStructure, RelStructure, Sentence, SoRange, Sort, Term, ValueSet};
use snl_eval::Compiled;

const BATTERY_BUDGET: u64 = 2_000_000;

fn collect_consts(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Const(c) => {
            out.insert(c.clone());
        }
        Term::Suc(t, _) | Term::Pred(t) => collect_consts(t, out),
        _ => {}
    }
}

/// Small random structures over the vocabulary of `s`: structure `k` has `n = 1 + k mod 3`,
/// every universe `{0..n}`, each relation tuple present with probability 0.4, soVar tables
/// over `[0, n]` with values `{0,1}` when `template` is binary and `[0, min(n,2)]` otherwise.
pub fn default_battery(s: &Sentence, template: Option<&DomStructure>, seed: u64, count: usize) -> Vec<(RelStructure, DomStructure)> {
    let binary = template.is_some_and(|d| crate::is_binary(s, d));
    let mut consts: BTreeSet<String> = s.consts.iter().cloned().collect();
    for f in &s.matrix {
        f.constants(&mut consts);
    }
    for d in &s.fo_vars {
        if let Sort::Num { lo, hi } = &d.sort {
            collect_consts(lo, &mut consts);
            collect_consts(hi, &mut consts);
        }
    }
    consts.insert("n".into());
    (0..count)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64));
            let n = 1 + (k as u64 % 3);
            let mut rel = RelStructure::default();
            for d in &s.fo_vars {
                if let Sort::Obj { universe } = &d.sort {
                    rel.universes.insert(universe.clone(), (0..=n).collect());
                }
            }
            for c in &consts {
                let v = if c == "n" { n } else { rng.gen_range(0..=n) };
                rel.constants.insert(c.clone(), v);
            }
            for (pred, arity) in s.vocabulary() {
                let mut tuples = BTreeSet::new();
                let total = (n + 1).pow(arity as u32);
                for code in 0..total {
                    if rng.gen_bool(0.4) {
                        let mut t = vec![0; arity];
                        let mut c = code;
                        for x in t.iter_mut().rev() {
                            *x = c % (n + 1);
                            c /= n + 1;
                        }
                        tuples.insert(t);
                    }
                }
                rel.relations.insert(pred, tuples);
            }
            let hi = if binary { 1 } else { n.min(2) };
            let so: BTreeMap<String, SoRange> =
                s.so_vars.iter().map(|p| (p.name.clone(), SoRange::new(n, vec![ValueSet::Interval([0, hi]); p.arity], false))).collect();
            (rel, DomStructure { so, fo: BTreeMap::new() })
        })
        .collect()
}

/// `Some(true)` when truth with function witnesses equals truth with arbitrary relations on
/// every battery element; `None` when undecided (μ-terms, errors or an aborted search).
pub fn check_omega(s: &Sentence, battery: &[(RelStructure, DomStructure)]) -> Option<bool> {
    if s.so_vars.is_empty() {
        return Some(true);
    }
    let mut undecided = false;
    for (rel, dom) in battery {
        let Ok(c) = Compiled::new(s, rel, dom) else {
            undecided = true;
            continue;
        };
        let functional = c.search(BATTERY_BUDGET).truth;
        let relational = c.search_relational(BATTERY_BUDGET);
        match (functional, relational) {
            (Some(a), Some(b)) if a != b => return Some(false),
            (Some(_), Some(_)) => {}
            _ => undecided = true,
        }
    }
    (!undecided).then_some(true)
}
