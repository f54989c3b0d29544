//! Side conditions of the SNL fragments (second-order variable requirements,
//! μ-term requirements, monotonicity, binary ranges, the Ω property) and the
//! sentence-level combinators.

pub mod combine;
pub mod normal;
pub mod omega;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use snl_ast::{DomStructure, Formula, Sentence, Term, ValueSet};

pub use combine::{binary_to_omega, combine_and, combine_or, combine_or_universal, CombineError, Triple};
pub use normal::{cnf, dnf, nnf, BudgetExceeded, Literal, Nnf};
pub use omega::{check_omega, default_battery};

pub const DEFAULT_DNF_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "REQ_I")]
    ReqI,
    #[serde(rename = "REQ_II")]
    ReqII,
    #[serde(rename = "MU_III")]
    MuIII,
    #[serde(rename = "MU_IV")]
    MuIV,
    #[serde(rename = "OMEGA")]
    Omega,
    #[serde(rename = "MONO")]
    Mono,
    #[serde(rename = "BIN")]
    Bin,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::ReqI => "REQ_I",
            Rule::ReqII => "REQ_II",
            Rule::MuIII => "MU_III",
            Rule::MuIV => "MU_IV",
            Rule::Omega => "OMEGA",
            Rule::Mono => "MONO",
            Rule::Bin => "BIN",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Conjunct index, or `None` for sentence-wide rules.
    pub psi: Option<usize>,
    pub rule: Rule,
    pub message: String,
}

/// Verdict for one conjunct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail(String),
    /// The normal form did not fit in the budget.
    Undetermined,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        *self == Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub snl: bool,
    pub mu_snl: bool,
    /// `None` when not evaluated (μ-terms present, no battery, or a search aborted).
    pub snl_omega: Option<bool>,
    pub monotone: bool,
    /// `None` without a domain.
    pub binary: Option<bool>,
    pub violations: Vec<Violation>,
    pub dnf_blowup_aborted: bool,
}

impl CheckReport {
    /// Fixed-width table, one row per flag, then one row per violation.
    pub fn table(&self) -> String {
        let flag = |b: Option<bool>| match b {
            Some(true) => "yes",
            Some(false) => "no",
            None => "n/a",
        };
        let mut out = String::new();
        for (name, v) in [
            ("snl", Some(self.snl)),
            ("mu_snl", Some(self.mu_snl)),
            ("snl_omega", self.snl_omega),
            ("monotone", Some(self.monotone)),
            ("binary", self.binary),
            ("dnf_aborted", Some(self.dnf_blowup_aborted)),
        ] {
            out.push_str(&format!("{name:<12} {}\n", flag(v)));
        }
        for v in &self.violations {
            let psi = v.psi.map_or("-".to_string(), |j| j.to_string());
            out.push_str(&format!("{:<12} psi={psi:<3} {}\n", v.rule.to_string(), v.message));
        }
        out
    }
}

/// Base and offset of a clock term: `base + e` where the base is a variable, a constant or `0`.
fn clock_parts(t: &Term) -> Option<(Term, u64)> {
    match t.base_offset() {
        (Term::Num(k), e) => Some((Term::Num(0), k + e)),
        (b @ (Term::Var(_) | Term::Const(_)), e) => Some((b.clone(), e)),
        _ => None,
    }
}

fn show(t: &Term) -> String {
    snl_ast::print_term(t)
}

/// Largest successor offset on any clock term, at least 1.
pub fn default_offset_bound(s: &Sentence) -> u64 {
    let mut a = 1;
    for f in &s.matrix {
        for_each_so_clock(f, &mut |clock| {
            if let Some((_, e)) = clock_parts(clock) {
                a = a.max(e);
            }
        });
    }
    a
}

fn for_each_so_clock(f: &Formula, cb: &mut dyn FnMut(&Term)) {
    fn term(t: &Term, cb: &mut dyn FnMut(&Term)) {
        match t {
            Term::Mu { clock, .. } => {
                cb(clock);
                term(clock, cb);
            }
            Term::Suc(t, _) | Term::Pred(t) => term(t, cb),
            _ => {}
        }
    }
    match f {
        Formula::So { clock, .. } => cb(clock),
        Formula::Not(g) => return for_each_so_clock(g, cb),
        Formula::And(fs) | Formula::Or(fs) => return fs.iter().for_each(|g| for_each_so_clock(g, cb)),
        Formula::Implies(a, b) => {
            for_each_so_clock(a, cb);
            return for_each_so_clock(b, cb);
        }
        _ => {}
    }
    f.for_each_atom_term(&mut |t| term(t, cb));
}

/// SoAtom occurrences `(soVar, clock)` of a formula, excluding μ-terms.
fn so_atoms(f: &Formula, out: &mut Vec<(String, Term)>) {
    match f {
        Formula::So { var, clock, .. } => out.push((var.clone(), clock.clone())),
        Formula::Not(g) => so_atoms(g, out),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| so_atoms(g, out)),
        Formula::Implies(a, b) => {
            so_atoms(a, out);
            so_atoms(b, out);
        }
        _ => {}
    }
}

/// Clock occurrences grouped per soVar must share one base, with offsets in `[0, a]`.
fn clock_groups(occ: &[(String, Term)], a: u64) -> Result<(), String> {
    let mut bases: BTreeMap<&str, (Term, u64)> = BTreeMap::new();
    for (so, clock) in occ {
        let Some((base, e)) = clock_parts(clock) else {
            return Err(format!("{so}: clock `{}` is not of the form base+e", show(clock)));
        };
        if e > a {
            return Err(format!("{so}: clock `{}` has offset {e} > {a}", show(clock)));
        }
        match bases.get(so.as_str()) {
            Some((b, _)) if *b != base => {
                return Err(format!("{so}: clocks `{}` and `{}` have different bases", show(b), show(clock)));
            }
            Some(_) => {}
            None => {
                bases.insert(so, (base, e));
            }
        }
    }
    Ok(())
}

/// SoAtom clocks of each term of the DNF of `f`; an occurrence group is the set of atoms
/// of one soVar that share a term. `None` on budget exhaustion.
fn term_groups(f: &Formula) -> Option<Vec<Vec<(String, Term)>>> {
    let terms = dnf(f, DEFAULT_DNF_BUDGET).ok()?;
    Some(
        terms
            .iter()
            .map(|t| {
                let mut occ = Vec::new();
                t.iter().for_each(|(_, a)| so_atoms(a, &mut occ));
                occ
            })
            .collect(),
    )
}

/// Requirement (i): within each occurrence group (the atoms of one soVar inside one DNF
/// term of the conjunct) every clock is `base + e` with a single base and `e <= a`.
pub fn check_requirement_i(s: &Sentence, a: u64) -> Vec<Verdict> {
    s.matrix
        .iter()
        .map(|f| match term_groups(f) {
            Some(terms) => match terms.iter().try_for_each(|occ| clock_groups(occ, a)) {
                Ok(()) => Verdict::Pass,
                Err(m) => Verdict::Fail(m),
            },
            None => Verdict::Undetermined,
        })
        .collect()
}

/// Requirement (ii): in the DNF of each conjunct at most two terms mention second-order variables.
pub fn check_requirement_ii(s: &Sentence, budget: usize) -> Vec<Verdict> {
    s.matrix
        .iter()
        .map(|f| match dnf(f, budget) {
            Err(BudgetExceeded) => Verdict::Undetermined,
            Ok(terms) => {
                let so_terms = terms.iter().filter(|t| t.iter().any(|(_, a)| a.has_so())).count();
                if so_terms <= 2 {
                    Verdict::Pass
                } else {
                    Verdict::Fail(format!("{so_terms} disjuncts contain second-order variables"))
                }
            }
        })
        .collect()
}

/// Distinct μ-terms; repeated copies of one term (as in an unfolded biconditional)
/// count once, whatever their binder names.
fn mu_terms(f: &Formula) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for t in f.mus() {
        let same = |u: &Term| matches!((t, u), (Term::Mu { so: a, clock: c, .. }, Term::Mu { so: b, clock: d, .. }) if a == b && c == d);
        if !out.iter().any(same) {
            out.push(t.clone());
        }
    }
    out
}

/// μ-term requirements per conjunct: (iii) at most one distinct μ-term, not nested, and its clock
/// obeys requirement (i) together with the soVar's atoms; (iv) inside an atom `P(i, .. μ Q(i') ..)`
/// the clocks share a base and differ by at most `a`. Returns the rule of the failure.
pub fn check_mu_requirements(s: &Sentence, a: u64) -> Vec<Result<(), (Rule, String)>> {
    s.matrix
        .iter()
        .map(|f| {
            let mus = mu_terms(f);
            if mus.len() > 1 {
                return Err((Rule::MuIII, format!("{} μ-terms", mus.len())));
            }
            let Some(Term::Mu { so, clock, .. }) = mus.first() else { return Ok(()) };
            if clock.contains_mu() {
                return Err((Rule::MuIII, "nested μ-term".into()));
            }
            let groups = match dnf(f, DEFAULT_DNF_BUDGET) {
                Ok(terms) => terms
                    .iter()
                    .filter(|t| t.iter().any(|(_, l)| !l.mus().is_empty()))
                    .map(|t| {
                        let mut occ = Vec::new();
                        t.iter().for_each(|(_, l)| so_atoms(l, &mut occ));
                        occ
                    })
                    .collect(),
                Err(BudgetExceeded) => {
                    let mut occ = Vec::new();
                    so_atoms(f, &mut occ);
                    vec![occ]
                }
            };
            for mut occ in groups {
                occ.retain(|(p, _)| p == so);
                occ.push((so.clone(), (**clock).clone()));
                clock_groups(&occ, a).map_err(|m| (Rule::MuIII, m))?;
            }
            let mut enclosing = Vec::new();
            enclosing_clocks(f, &mut enclosing);
            for outer in enclosing {
                match (clock_parts(&outer), clock_parts(clock)) {
                    (Some((b1, e1)), Some((b2, e2))) if b1 == b2 && e1.abs_diff(e2) <= a => {}
                    _ => return Err((Rule::MuIV, format!("μ clock `{}` too far from enclosing clock `{}`", show(clock), show(&outer)))),
                }
            }
            Ok(())
        })
        .collect()
}

/// Clocks of SoAtoms whose value arguments contain a μ-term.
fn enclosing_clocks(f: &Formula, out: &mut Vec<Term>) {
    match f {
        Formula::So { clock, args, .. } if args.iter().any(Term::contains_mu) => out.push(clock.clone()),
        Formula::Not(g) => enclosing_clocks(g, out),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| enclosing_clocks(g, out)),
        Formula::Implies(a, b) => {
            enclosing_clocks(a, out);
            enclosing_clocks(b, out);
        }
        _ => {}
    }
}

/// Every input-relation literal of the matrix is negative. Distribution into CNF keeps
/// the literal polarities of the negation normal form, so the NNF decides this.
pub fn is_monotone(s: &Sentence) -> bool {
    s.matrix.iter().all(|f| {
        let mut ok = true;
        nnf(f, true).for_each_lit(&mut |pos, a| ok &= !(pos && matches!(a, Formula::Rel { .. })));
        ok
    })
}

/// Every value place of every soVar ranges over exactly {0,1}.
pub fn is_binary(s: &Sentence, d: &DomStructure) -> bool {
    s.so_vars.iter().all(|p| d.so.get(&p.name).is_some_and(|r| r.ranges.iter().all(|v: &ValueSet| v.to_vec() == [0, 1]) && !r.sentinel))
}

/// Options for [`check`].
#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub offset_bound: Option<u64>,
    pub dnf_budget: usize,
    /// Battery size for the Ω check; 0 skips it.
    pub omega_battery: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { offset_bound: None, dnf_budget: DEFAULT_DNF_BUDGET, omega_battery: 6, seed: 0 }
    }
}

pub fn check(s: &Sentence, d: Option<&DomStructure>, opts: &CheckOptions) -> CheckReport {
    let a = opts.offset_bound.unwrap_or_else(|| default_offset_bound(s));
    let mut violations = Vec::new();
    for (j, v) in check_requirement_i(s, a).into_iter().enumerate() {
        if let Verdict::Fail(m) = v {
            violations.push(Violation { psi: Some(j), rule: Rule::ReqI, message: m });
        }
    }
    let mut aborted = false;
    for (j, v) in check_requirement_ii(s, opts.dnf_budget).into_iter().enumerate() {
        match v {
            Verdict::Pass => {}
            Verdict::Fail(m) => violations.push(Violation { psi: Some(j), rule: Rule::ReqII, message: m }),
            Verdict::Undetermined => {
                aborted = true;
                violations.push(Violation { psi: Some(j), rule: Rule::ReqII, message: "undetermined: DNF budget exceeded".into() });
            }
        }
    }
    let req_ok = violations.is_empty();
    for (j, r) in check_mu_requirements(s, a).into_iter().enumerate() {
        if let Err((rule, m)) = r {
            violations.push(Violation { psi: Some(j), rule, message: m });
        }
    }
    let has_mu = s.matrix.iter().any(|f| !f.mus().is_empty());
    let mu_ok = violations.len() == violations.iter().filter(|v| matches!(v.rule, Rule::ReqI | Rule::ReqII)).count();
    let monotone = is_monotone(s);
    if !monotone {
        violations.push(Violation { psi: None, rule: Rule::Mono, message: "an input relation occurs positively".into() });
    }
    let binary = d.map(|d| is_binary(s, d));
    if binary == Some(false) {
        violations.push(Violation { psi: None, rule: Rule::Bin, message: "a soVar value range is not {0,1}".into() });
    }
    let snl = req_ok && !has_mu;
    let snl_omega = if snl && opts.omega_battery > 0 {
        let battery = default_battery(s, d, opts.seed, opts.omega_battery);
        let r = check_omega(s, &battery);
        if r == Some(false) {
            violations.push(Violation { psi: None, rule: Rule::Omega, message: "dropping Func changes truth on the battery".into() });
        }
        r
    } else {
        None
    };
    CheckReport { snl, mu_snl: req_ok && mu_ok, snl_omega, monotone, binary, violations, dnf_blowup_aborted: aborted }
}
