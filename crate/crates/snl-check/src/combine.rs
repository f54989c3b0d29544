//! Sentence-level combinators: intersection, union (selector construction and the
//! universal-k diagnostic) and the binary-to-Ω expansion.

use std::collections::BTreeMap;

use thiserror::Error;

use snl_ast::{DomStructure, FoDecl, Formula, RelStructure, Sentence, SoDecl, SoRange, Sort, Term, ValueSet};
use snl_eval::{holds_first_order, EvalError};

/// A sentence with the structures it is evaluated on.
#[derive(Clone, Debug, PartialEq)]
pub struct Triple {
    pub sentence: Sentence,
    pub rel: RelStructure,
    pub dom: DomStructure,
}

#[derive(Debug, Error)]
pub enum CombineError {
    #[error("name clash after renaming: `{0}`")]
    Clash(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn tag(name: &str, k: usize) -> String {
    format!("{name}_{k}")
}

fn rename_term(t: &Term, k: usize) -> Term {
    t.rename_vars(&|v| tag(v, k)).rename_symbols(&|p| tag(p, k), &|c| tag(c, k))
}

/// Appends `_k` to every variable, predicate, constant (including `n`) and universe name.
pub fn rename_apart(t: &Triple, k: usize) -> Triple {
    let s = &t.sentence;
    let so_vars = s.so_vars.iter().map(|d| SoDecl { name: tag(&d.name, k), arity: d.arity }).collect();
    let fo_vars = s
        .fo_vars
        .iter()
        .map(|d| FoDecl {
            name: tag(&d.name, k),
            sort: match &d.sort {
                Sort::Num { lo, hi } => Sort::Num { lo: rename_term(lo, k), hi: rename_term(hi, k) },
                Sort::Obj { universe } => Sort::Obj { universe: tag(universe, k) },
            },
        })
        .collect();
    let mut consts: Vec<String> = s.consts.iter().map(|c| tag(c, k)).collect();
    if !consts.contains(&tag("n", k)) {
        consts.insert(0, tag("n", k));
    }
    let matrix = s.matrix.iter().map(|f| f.rename_vars(&|v| tag(v, k)).rename_symbols(&|p| tag(p, k), &|p| tag(p, k), &|c| tag(c, k))).collect();
    fn retag<V: Clone>(m: &BTreeMap<String, V>, k: usize) -> BTreeMap<String, V> {
        m.iter().map(|(n, v)| (tag(n, k), v.clone())).collect()
    }
    let rel = RelStructure {
        universes: retag(&t.rel.universes, k),
        relations: retag(&t.rel.relations, k),
        constants: retag(&t.rel.constants, k),
        signatures: t.rel.signatures.iter().map(|(n, sig)| (tag(n, k), sig.iter().map(|u| tag(u, k)).collect())).collect(),
    };
    let dom = DomStructure { so: retag(&t.dom.so, k), fo: retag(&t.dom.fo, k) };
    Triple { sentence: Sentence { so_vars, fo_vars, consts, matrix }, rel, dom }
}

fn union_into<V: Clone>(out: &mut BTreeMap<String, V>, more: &BTreeMap<String, V>) -> Result<(), CombineError> {
    for (k, v) in more {
        if out.insert(k.clone(), v.clone()).is_some() {
            return Err(CombineError::Clash(k.clone()));
        }
    }
    Ok(())
}

fn merge(a: &Triple, b: &Triple) -> Result<Triple, CombineError> {
    let mut out = a.clone();
    let s = &mut out.sentence;
    s.so_vars.extend(b.sentence.so_vars.iter().cloned());
    s.fo_vars.extend(b.sentence.fo_vars.iter().cloned());
    s.consts.extend(b.sentence.consts.iter().cloned());
    s.matrix.extend(b.sentence.matrix.iter().cloned());
    union_into(&mut out.rel.universes, &b.rel.universes)?;
    union_into(&mut out.rel.relations, &b.rel.relations)?;
    union_into(&mut out.rel.constants, &b.rel.constants)?;
    union_into(&mut out.rel.signatures, &b.rel.signatures)?;
    union_into(&mut out.dom.so, &b.dom.so)?;
    union_into(&mut out.dom.fo, &b.dom.fo)?;
    // the implicit `n` keeps a value so the merged structure is complete
    let n = ["n_1", "n_2"].iter().filter_map(|c| out.rel.constants.get(*c)).max().copied().unwrap_or(0);
    out.rel.constants.insert("n".into(), n);
    Ok(out)
}

/// Intersection: true on the merged structures iff both inputs are true on theirs.
pub fn combine_and(a: &Triple, b: &Triple) -> Result<Triple, CombineError> {
    merge(&rename_apart(a, 1), &rename_apart(b, 2))
}

/// The literal construction with a universally quantified selector `k` over `[1,2]` guarding
/// each branch. Since `k` is universal both guards fire, so this computes the intersection;
/// kept as a diagnostic next to [`combine_or`].
pub fn combine_or_universal(a: &Triple, b: &Triple) -> Result<Triple, CombineError> {
    let ra = rename_apart(a, 1);
    let rb = rename_apart(b, 2);
    let mut out = merge(&ra, &rb)?;
    let mut matrix = Vec::new();
    let mut fresh = Vec::new();
    for (branch, t) in [(1u64, &ra), (2, &rb)] {
        for f in &t.sentence.matrix {
            let k = format!("k{}", fresh.len());
            fresh.push(FoDecl::num(&k, Term::Num(1), Term::Num(2)));
            matrix.push(Formula::imp(Formula::Eq(Term::var(&k), Term::Num(branch)), f.clone()));
        }
    }
    out.sentence.fo_vars.extend(fresh);
    out.sentence.matrix = matrix;
    Ok(out)
}

fn suc_total(t: &Term) -> u64 {
    match t {
        Term::Suc(inner, k) => k + suc_total(inner),
        Term::Pred(inner) => suc_total(inner),
        Term::Mu { clock, .. } => suc_total(clock),
        _ => 0,
    }
}

/// A value no term of the combined sentence can reach.
fn off_value(t: &Triple) -> Result<u64, CombineError> {
    let mut m = 0;
    for u in t.rel.universes.values() {
        m = m.max(u.iter().copied().max().unwrap_or(0));
    }
    for &c in t.rel.constants.values() {
        m = m.max(c);
    }
    for tuple in t.rel.relations.values().flatten() {
        m = m.max(tuple.iter().copied().max().unwrap_or(0));
    }
    for r in t.dom.so.values() {
        m = m.max(r.index_max);
        for v in &r.ranges {
            m = m.max(v.max().unwrap_or(0));
        }
    }
    for d in &t.sentence.fo_vars {
        m = m.max(t.dom.fo_range(d, &t.rel).map_err(EvalError::from)?.into_iter().max().unwrap_or(0));
    }
    let mut offsets = 0;
    for f in &t.sentence.matrix {
        f.for_each_atom_term(&mut |t| offsets += suc_total(t));
    }
    Ok(m + offsets + 1)
}

struct Rewriter<'a> {
    dom: &'a DomStructure,
    sentinel: BTreeMap<String, bool>,
    fresh: Vec<(FoDecl, Vec<u64>)>,
}

impl Rewriter<'_> {
    fn fresh_var(&mut self, values: Vec<u64>) -> Term {
        let name = format!("q{}", self.fresh.len());
        let lo = values.first().copied().unwrap_or(0);
        let hi = values.last().copied().unwrap_or(0);
        self.fresh.push((FoDecl::num(&name, Term::Num(lo), Term::Num(hi)), values));
        Term::var(&name)
    }

    /// Returns the rewritten formula and its reading when every soVar table is off.
    fn rewrite(&mut self, f: &Formula, pos: bool) -> Result<(Formula, Formula), CombineError> {
        Ok(match f {
            Formula::So { var, clock, args } if pos => {
                if self.sentinel[var] {
                    return Err(CombineError::Unsupported(format!("positive occurrence of sentinel soVar `{var}`")));
                }
                let r = &self.dom.so[var];
                let in_range = Formula::Le(clock.clone(), Term::Num(r.index_max));
                let bs: Vec<Term> = r.ranges.iter().map(|v| self.fresh_var(v.to_vec())).collect();
                let same = Formula::And(args.iter().zip(&bs).map(|(a, b)| Formula::Eq(a.clone(), b.clone())).collect());
                let other = Formula::not(Formula::So { var: var.clone(), clock: clock.clone(), args: bs });
                (Formula::And(vec![in_range.clone(), Formula::Or(vec![same, other])]), in_range)
            }
            Formula::So { .. } => (f.clone(), Formula::False),
            Formula::Not(g) => {
                let (a, r) = self.rewrite(g, !pos)?;
                (Formula::not(a), Formula::not(r))
            }
            Formula::And(fs) | Formula::Or(fs) => {
                let mut a = Vec::new();
                let mut r = Vec::new();
                for g in fs {
                    let (x, y) = self.rewrite(g, pos)?;
                    a.push(x);
                    r.push(y);
                }
                if matches!(f, Formula::And(_)) {
                    (Formula::And(a), Formula::And(r))
                } else {
                    (Formula::Or(a), Formula::Or(r))
                }
            }
            Formula::Implies(x, y) => {
                let (a1, r1) = self.rewrite(x, !pos)?;
                let (a2, r2) = self.rewrite(y, pos)?;
                (Formula::imp(a1, a2), Formula::imp(r1, r2))
            }
            atom => (atom.clone(), atom.clone()),
        })
    }
}

/// Union: true iff at least one input is true. A fresh soVar `K` with one cell and values
/// {1,2} selects the branch; the soVars of the other branch take an unreachable "off" value
/// under which each of its conjuncts holds, or is guarded by `K(0) != branch`.
pub fn combine_or(a: &Triple, b: &Triple) -> Result<Triple, CombineError> {
    for t in [a, b] {
        if t.sentence.matrix.iter().any(|f| !f.mus().is_empty()) {
            return Err(CombineError::Unsupported("μ-terms".into()));
        }
    }
    let ra = rename_apart(a, 1);
    let rb = rename_apart(b, 2);
    let merged = merge(&ra, &rb)?;
    let off = off_value(&merged)?;
    let mut out = merged.clone();
    out.sentence.so_vars.insert(0, SoDecl { name: "K".into(), arity: 1 });
    if out.dom.so.insert("K".into(), SoRange::new(0, vec![ValueSet::Values { values: vec![1, 2] }], false)).is_some() {
        return Err(CombineError::Clash("K".into()));
    }
    let selected = |branch: u64| Formula::so("K", Term::Num(0), vec![Term::Num(branch)]);
    let mut matrix = Vec::new();
    let mut rw = Rewriter { dom: &merged.dom, sentinel: merged.dom.so.iter().map(|(n, r)| (n.clone(), r.sentinel)).collect(), fresh: Vec::new() };
    for (branch, t) in [(1u64, &ra), (2, &rb)] {
        for f in &t.sentence.matrix {
            let first_fresh = rw.fresh.len();
            let (g, residual) = rw.rewrite(f, true)?;
            // validity of the off-mode reading over the conjunct's own variables
            let used = residual.vars();
            let mut decls: Vec<FoDecl> = merged.sentence.fo_vars.iter().filter(|d| used.contains(&d.name)).cloned().collect();
            let mut dom = merged.dom.clone();
            for (d, values) in &rw.fresh[first_fresh..] {
                if used.contains(&d.name) {
                    decls.push(d.clone());
                }
                dom.fo.insert(d.name.clone(), ValueSet::Values { values: values.clone() });
            }
            if holds_first_order(&residual, &decls, &merged.rel, &dom)? {
                matrix.push(g);
            } else {
                matrix.push(Formula::Or(vec![Formula::not(selected(branch)), g]));
            }
        }
        // the selected branch never uses the off value
        for p in &t.sentence.so_vars {
            let r = &merged.dom.so[&p.name];
            for m in 0..p.arity {
                let clock = rw.fresh_var((0..=r.index_max).collect());
                let args = (0..p.arity).map(|j| if j == m { Term::Num(off) } else { rw.fresh_var(r.ranges[j].to_vec()) }).collect();
                matrix.push(Formula::Or(vec![Formula::not(selected(branch)), Formula::not(Formula::so(&p.name, clock, args))]));
            }
        }
    }
    for t in [&ra, &rb] {
        for p in &t.sentence.so_vars {
            let r = out.dom.so.get_mut(&p.name).expect("merged domain has every soVar");
            for v in r.ranges.iter_mut() {
                let mut values = v.to_vec();
                values.push(off);
                *v = ValueSet::Values { values };
            }
        }
    }
    for (d, values) in rw.fresh {
        out.dom.fo.insert(d.name.clone(), ValueSet::Values { values });
        out.sentence.fo_vars.push(d);
    }
    out.sentence.matrix = matrix;
    Ok(out)
}

/// Appends, per soVar `P`, the conjunct `(P(a,0) ∨ P(a,1)) ∧ (¬P(a,0) ∨ ¬P(a,1))` with a fresh
/// universal `a` over the index range. Requires a binary domain and 1-valued soVars.
pub fn binary_to_omega(s: &Sentence, d: &DomStructure) -> Result<Sentence, CombineError> {
    if !crate::is_binary(s, d) {
        return Err(CombineError::Precondition("value ranges are not all {0,1}".into()));
    }
    let mut out = s.clone();
    let taken = |name: &str, s: &Sentence| {
        s.fo_vars.iter().any(|v| v.name == name) || s.so_vars.iter().any(|v| v.name == name) || s.consts.iter().any(|c| c == name) || name == "n"
    };
    for p in &s.so_vars {
        if p.arity != 1 {
            return Err(CombineError::Precondition(format!("`{}` has {} value places", p.name, p.arity)));
        }
        let mut k = 0;
        let name = loop {
            let cand = format!("a{k}");
            if !taken(&cand, &out) {
                break cand;
            }
            k += 1;
        };
        let index_max = d.so[&p.name].index_max;
        out.fo_vars.push(FoDecl::num(&name, Term::Num(0), Term::Num(index_max)));
        let at = |v| Formula::so(&p.name, Term::var(&name), vec![Term::Num(v)]);
        out.matrix.push(Formula::And(vec![Formula::Or(vec![at(0), at(1)]), Formula::Or(vec![Formula::not(at(0)), Formula::not(at(1))])]));
    }
    Ok(out)
}
