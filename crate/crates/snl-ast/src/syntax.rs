use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// First-order sort. Numeric variables range over an interval of naturals given
/// by two ground terms, object variables over a named universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sort {
    Num { lo: Term, hi: Term },
    Obj { universe: String },
}

impl Sort {
    pub fn is_num(&self) -> bool {
        matches!(self, Sort::Num { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FoDecl {
    pub name: String,
    pub sort: Sort,
}

impl FoDecl {
    pub fn num(name: &str, lo: Term, hi: Term) -> Self {
        FoDecl { name: name.to_string(), sort: Sort::Num { lo, hi } }
    }

    pub fn obj(name: &str, universe: &str) -> Self {
        FoDecl { name: name.to_string(), sort: Sort::Obj { universe: universe.to_string() } }
    }
}

/// A second-order functional variable `P` with `arity` value places after the clock.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SoDecl {
    pub name: String,
    pub arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Const(String),
    Num(u64),
    /// `suc^k(t)` with k >= 1.
    Suc(Box<Term>, u64),
    Pred(Box<Term>),
    /// `mu bound . so(clock, bound)`, the unique value of a 1-valued soVar at `clock`.
    Mu {
        so: String,
        clock: Box<Term>,
        bound: String,
    },
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn cst(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    /// Builds `suc^k(t)`, folding nested successors into one offset.
    pub fn suc(t: Term, k: u64) -> Term {
        if k == 0 {
            return t;
        }
        match t {
            Term::Suc(inner, e) => Term::Suc(inner, e + k),
            Term::Num(v) => Term::Suc(Box::new(Term::Num(v)), k),
            other => Term::Suc(Box::new(other), k),
        }
    }

    pub fn pred(t: Term) -> Term {
        Term::Pred(Box::new(t))
    }

    pub fn mu(so: &str, clock: Term) -> Term {
        Term::Mu { so: so.to_string(), clock: Box::new(clock), bound: "z".to_string() }
    }

    /// Splits a term into its innermost non-successor base and the total offset.
    pub fn base_offset(&self) -> (&Term, u64) {
        match self {
            Term::Suc(inner, k) => {
                let (b, e) = inner.base_offset();
                (b, e + k)
            }
            t => (t, 0),
        }
    }

    pub fn contains_mu(&self) -> bool {
        match self {
            Term::Mu { .. } => true,
            Term::Suc(t, _) | Term::Pred(t) => t.contains_mu(),
            _ => false,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Suc(t, _) | Term::Pred(t) => t.collect_vars(out),
            Term::Mu { clock, .. } => clock.collect_vars(out),
            Term::Const(_) | Term::Num(_) => {}
        }
    }

    pub fn collect_mus<'a>(&'a self, out: &mut Vec<&'a Term>) {
        match self {
            Term::Mu { .. } => out.push(self),
            Term::Suc(t, _) | Term::Pred(t) => t.collect_mus(out),
            _ => {}
        }
    }

    /// Applies `f` to every variable name.
    pub fn rename_vars(&self, f: &dyn Fn(&str) -> String) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::Suc(t, k) => Term::Suc(Box::new(t.rename_vars(f)), *k),
            Term::Pred(t) => Term::Pred(Box::new(t.rename_vars(f))),
            Term::Mu { so, clock, bound } => Term::Mu { so: so.clone(), clock: Box::new(clock.rename_vars(f)), bound: bound.clone() },
            t => t.clone(),
        }
    }

    pub fn rename_symbols(&self, so: &dyn Fn(&str) -> String, cst: &dyn Fn(&str) -> String) -> Term {
        match self {
            Term::Const(c) => Term::Const(cst(c)),
            Term::Suc(t, k) => Term::Suc(Box::new(t.rename_symbols(so, cst)), *k),
            Term::Pred(t) => Term::Pred(Box::new(t.rename_symbols(so, cst))),
            Term::Mu { so: p, clock, bound } => Term::Mu { so: so(p), clock: Box::new(clock.rename_symbols(so, cst)), bound: bound.clone() },
            t => t.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    Rel { pred: String, args: Vec<Term> },
    So { var: String, clock: Term, args: Vec<Term> },
    Eq(Term, Term),
    Le(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn rel(pred: &str, args: Vec<Term>) -> Formula {
        Formula::Rel { pred: pred.to_string(), args }
    }

    pub fn so(var: &str, clock: Term, args: Vec<Term>) -> Formula {
        Formula::So { var: var.to_string(), clock, args }
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn ne(a: Term, b: Term) -> Formula {
        Formula::not(Formula::Eq(a, b))
    }

    /// `a < b` written as `suc(a) <= b`.
    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Le(Term::suc(a, 1), b)
    }

    /// Calls `f` on every term directly owned by an atom.
    pub fn for_each_atom_term<'a>(&'a self, f: &mut dyn FnMut(&'a Term)) {
        match self {
            Formula::Rel { args, .. } => args.iter().for_each(|t| f(t)),
            Formula::So { clock, args, .. } => {
                f(clock);
                args.iter().for_each(|t| f(t));
            }
            Formula::Eq(a, b) | Formula::Le(a, b) => {
                f(a);
                f(b);
            }
            Formula::Not(g) => g.for_each_atom_term(f),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.for_each_atom_term(f)),
            Formula::Implies(a, b) => {
                a.for_each_atom_term(f);
                b.for_each_atom_term(f);
            }
            Formula::True | Formula::False => {}
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.for_each_atom_term(&mut |t| t.collect_vars(&mut out));
        out
    }

    pub fn mus(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.for_each_atom_term(&mut |t| t.collect_mus(&mut out));
        out
    }

    /// True when the formula mentions a second-order variable, either as an atom or inside a μ-term.
    pub fn has_so(&self) -> bool {
        match self {
            Formula::So { .. } => true,
            Formula::Rel { args, .. } => args.iter().any(Term::contains_mu),
            Formula::Eq(a, b) | Formula::Le(a, b) => a.contains_mu() || b.contains_mu(),
            Formula::Not(g) => g.has_so(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::has_so),
            Formula::Implies(a, b) => a.has_so() || b.has_so(),
            Formula::True | Formula::False => false,
        }
    }

    pub fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Rel { pred, args } => Formula::Rel { pred: pred.clone(), args: args.iter().map(f).collect() },
            Formula::So { var, clock, args } => Formula::So { var: var.clone(), clock: f(clock), args: args.iter().map(f).collect() },
            Formula::Eq(a, b) => Formula::Eq(f(a), f(b)),
            Formula::Le(a, b) => Formula::Le(f(a), f(b)),
            Formula::Not(g) => Formula::not(g.map_terms(f)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.map_terms(f)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.map_terms(f)).collect()),
            Formula::Implies(a, b) => Formula::imp(a.map_terms(f), b.map_terms(f)),
            Formula::True => Formula::True,
            Formula::False => Formula::False,
        }
    }

    pub fn rename_vars(&self, f: &dyn Fn(&str) -> String) -> Formula {
        self.map_terms(&|t| t.rename_vars(f))
    }

    /// Renames relation predicates, second-order variables and constants.
    pub fn rename_symbols(&self, rel: &dyn Fn(&str) -> String, so: &dyn Fn(&str) -> String, cst: &dyn Fn(&str) -> String) -> Formula {
        let rt = |t: &Term| t.rename_symbols(so, cst);
        match self {
            Formula::Rel { pred, args } => Formula::Rel { pred: rel(pred), args: args.iter().map(rt).collect() },
            Formula::So { var, clock, args } => Formula::So { var: so(var), clock: rt(clock), args: args.iter().map(rt).collect() },
            Formula::Eq(a, b) => Formula::Eq(rt(a), rt(b)),
            Formula::Le(a, b) => Formula::Le(rt(a), rt(b)),
            Formula::Not(g) => Formula::not(g.rename_symbols(rel, so, cst)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.rename_symbols(rel, so, cst)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.rename_symbols(rel, so, cst)).collect()),
            Formula::Implies(a, b) => Formula::imp(a.rename_symbols(rel, so, cst), b.rename_symbols(rel, so, cst)),
            Formula::True => Formula::True,
            Formula::False => Formula::False,
        }
    }

    /// Relation predicates with the arity they are used at.
    pub fn predicates(&self, out: &mut BTreeMap<String, usize>) {
        match self {
            Formula::Rel { pred, args } => {
                out.insert(pred.clone(), args.len());
            }
            Formula::Not(g) => g.predicates(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.predicates(out)),
            Formula::Implies(a, b) => {
                a.predicates(out);
                b.predicates(out);
            }
            _ => {}
        }
    }

    pub fn constants(&self, out: &mut BTreeSet<String>) {
        fn walk(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Const(c) => {
                    out.insert(c.clone());
                }
                Term::Suc(t, _) | Term::Pred(t) => walk(t, out),
                Term::Mu { clock, .. } => walk(clock, out),
                _ => {}
            }
        }
        self.for_each_atom_term(&mut |t| walk(t, out));
    }
}

/// `exists^f P1..Pl forall i.. y.. [psi_1 and .. psi_t]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sentence {
    pub so_vars: Vec<SoDecl>,
    pub fo_vars: Vec<FoDecl>,
    /// Constant symbols besides the implicit `n`.
    pub consts: Vec<String>,
    pub matrix: Vec<Formula>,
}

impl Sentence {
    pub fn so_decl(&self, name: &str) -> Option<&SoDecl> {
        self.so_vars.iter().find(|d| d.name == name)
    }

    pub fn fo_decl(&self, name: &str) -> Option<&FoDecl> {
        self.fo_vars.iter().find(|d| d.name == name)
    }

    /// Declarations of the variables of one conjunct, in prefix order.
    pub fn psi_vars(&self, j: usize) -> Vec<&FoDecl> {
        let used = self.matrix[j].vars();
        self.fo_vars.iter().filter(|d| used.contains(&d.name)).collect()
    }

    /// Predicate vocabulary inferred from atom usage.
    pub fn vocabulary(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for f in &self.matrix {
            f.predicates(&mut out);
        }
        out
    }

    /// Pairs of conjunct indices sharing a first-order variable, with the variable.
    pub fn shared_variables(&self) -> Vec<(usize, usize, String)> {
        let sets: Vec<BTreeSet<String>> = self.matrix.iter().map(Formula::vars).collect();
        let mut out = Vec::new();
        for a in 0..sets.len() {
            for b in a + 1..sets.len() {
                if let Some(v) = sets[a].intersection(&sets[b]).next() {
                    out.push((a, b, v.clone()));
                }
            }
        }
        out
    }
}

/// Counted-tuple objective: `|{x : forall y. formula}|` over the ranges of `count` and `inner`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxSpec {
    pub count: Vec<FoDecl>,
    #[serde(default)]
    pub inner: Vec<FoDecl>,
    pub formula: Formula,
    /// Count variable restricted to `[0,a)` by the prefix objective.
    #[serde(default)]
    pub clock: Option<String>,
}
