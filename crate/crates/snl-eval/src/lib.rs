//! Evaluation of SNL sentences over finite structures: witness verification,
//! grounding to propositional residuals, lex-least witness search and counting
//! objectives.
//!
//! Out-of-range behaviour: `P(i, ..)` with `i` past the index bound is false, and
//! a μ-term at such a clock denotes ⊥, which makes every atom containing it false.

pub mod compile;
pub mod ground;
mod plan;
pub mod search;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use snl_ast::{DomStructure, Formula, MaxSpec, RelStructure, Sentence, StructureError, Witness};

pub use compile::{Frame, Model, CF, K3, UNK};
pub use ground::G;
pub use search::Engine;

use plan::{must_for_truth, must_for_violation, used_slots, Plan, Step};

/// Node budget used when callers have no opinion.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("unknown first-order variable `{0}`")]
    UnknownVar(String),
    #[error("constant `{0}` has no value")]
    UnknownConst(String),
    #[error("unknown second-order variable `{0}`")]
    UnknownSo(String),
    #[error("unknown relation `{0}`")]
    UnknownRel(String),
    #[error("bad witness: {0}")]
    BadWitness(String),
}

/// A conjunct and a variable assignment falsifying it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub psi: usize,
    pub values: Vec<(String, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalResult {
    /// `None` when the node budget ran out first.
    pub truth: Option<bool>,
    /// Lex-least witness when the sentence holds.
    pub witness: Option<Witness>,
    pub nodes: u64,
    pub aborted: bool,
}

/// Ground residuals of a sentence; the sentence holds iff some assignment satisfies all.
#[derive(Clone, Debug)]
pub struct Grounding {
    pub unsat: bool,
    pub residuals: Vec<G>,
    /// Value ids per cell (including ⊥ when the soVar has a sentinel).
    pub sizes: Vec<usize>,
    /// Ground first-order tuples examined.
    pub tuples: u64,
}

/// Objective ground per counted tuple: `constant` tuples always count, each block counts when true.
#[derive(Clone, Debug)]
pub struct ObjectiveGrounding {
    pub constant: u128,
    pub blocks: Vec<G>,
}

struct Psi {
    frame: Frame,
    parts: Vec<CF>,
    vacuous: bool,
}

struct Objective {
    frame: Frame,
    count: Vec<usize>,
    inner: Vec<usize>,
    f: CF,
}

/// A sentence compiled against one structure and domain.
pub struct Compiled {
    pub model: Model,
    psis: Vec<Psi>,
    objective: Option<Objective>,
}

fn split(f: CF) -> Vec<CF> {
    match f {
        CF::And(parts) => parts,
        CF::Const(true) => Vec::new(),
        f => vec![f],
    }
}

impl Compiled {
    pub fn new(s: &Sentence, rel: &RelStructure, dom: &DomStructure) -> Result<Compiled, EvalError> {
        Self::build(s, None, rel, dom)
    }

    pub fn with_objective(s: &Sentence, spec: &MaxSpec, rel: &RelStructure, dom: &DomStructure) -> Result<Compiled, EvalError> {
        Self::build(s, Some(spec), rel, dom)
    }

    fn build(s: &Sentence, spec: Option<&MaxSpec>, rel: &RelStructure, dom: &DomStructure) -> Result<Compiled, EvalError> {
        let mut model = Model::new(s, rel, dom)?;
        if let Some(spec) = spec {
            model.register(&spec.formula, rel);
        }
        let mut psis = Vec::new();
        for (j, f) in s.matrix.iter().enumerate() {
            let frame = Frame::from_decls(&s.psi_vars(j), rel, dom)?;
            let vacuous = frame.ranges.iter().any(Vec::is_empty);
            let parts = split(model.compile(f, &frame, true)?);
            psis.push(Psi { frame, parts, vacuous });
        }
        let objective = match spec {
            None => None,
            Some(spec) => {
                let decls: Vec<_> = spec.count.iter().chain(&spec.inner).collect();
                let frame = Frame::from_decls(&decls, rel, dom)?;
                let f = model.compile(&spec.formula, &frame, true)?;
                let count = (0..spec.count.len()).collect();
                let inner = (spec.count.len()..decls.len()).collect();
                Some(Objective { frame, count, inner, f })
            }
        };
        Ok(Compiled { model, psis, objective })
    }

    /// Value ids per cell.
    pub fn sizes(&self) -> Vec<usize> {
        self.model.cell_so.iter().map(|&k| self.model.so[k].domain_size()).collect()
    }

    /// First falsified conjunct under a total witness, in conjunct order.
    pub fn check(&self, w: &Witness) -> Result<Option<Violation>, EvalError> {
        let cells = self.model.cells_of(w)?;
        Ok(self.check_cells(&cells))
    }

    pub fn check_cells(&self, cells: &[u32]) -> Option<Violation> {
        for (j, psi) in self.psis.iter().enumerate() {
            if psi.vacuous {
                continue;
            }
            for part in &psi.parts {
                let plan = Plan::new(&self.model, &used_slots(part), &psi.frame.ranges, &must_for_violation(part), true);
                let mut slots = vec![None; psi.frame.names.len()];
                let mut bad = None;
                let leaf = plan.order.len();
                plan.walk(&self.model, &mut slots, cells, &mut |depth, slots| match self.model.eval(part, slots, cells) {
                    K3::T => Step::Skip,
                    K3::F if depth == leaf => {
                        bad = Some(slots.to_vec());
                        Step::Stop
                    }
                    _ => Step::Descend,
                });
                if let Some(slots) = bad {
                    let values = psi.frame.names.iter().zip(slots).filter_map(|(n, v)| v.map(|v| (n.clone(), v))).collect();
                    return Some(Violation { psi: j, values });
                }
            }
        }
        None
    }

    pub fn ground(&self) -> Grounding {
        let blank = vec![UNK; self.model.ncells()];
        let mut grounder = ground::Grounder::new(&self.model);
        let mut seen = HashSet::new();
        let mut residuals = Vec::new();
        let mut unsat = false;
        let mut tuples = 0u64;
        'psis: for psi in &self.psis {
            if psi.vacuous {
                continue;
            }
            for part in &psi.parts {
                let plan = Plan::new(&self.model, &used_slots(part), &psi.frame.ranges, &must_for_violation(part), false);
                let mut slots = vec![None; psi.frame.names.len()];
                let leaf = plan.order.len();
                plan.walk(&self.model, &mut slots, &blank, &mut |depth, slots| {
                    if depth == leaf {
                        tuples += 1;
                    }
                    match self.model.eval(part, slots, &blank) {
                        K3::T => Step::Skip,
                        K3::F => {
                            unsat = true;
                            Step::Stop
                        }
                        K3::U if depth < leaf => Step::Descend,
                        K3::U => {
                            match grounder.cf(part, slots) {
                                G::Const(true) => {}
                                G::Const(false) => {
                                    unsat = true;
                                    return Step::Stop;
                                }
                                g => {
                                    if seen.insert(g.clone()) {
                                        residuals.push(g);
                                    }
                                }
                            }
                            Step::Skip
                        }
                    }
                });
                if unsat {
                    break 'psis;
                }
            }
        }
        Grounding { unsat, residuals, sizes: self.sizes(), tuples }
    }

    /// Decides the sentence by search; the witness found is the lex-least one.
    pub fn search(&self, budget: u64) -> EvalResult {
        let gr = self.ground();
        if gr.unsat {
            return EvalResult { truth: Some(false), witness: None, nodes: 0, aborted: false };
        }
        let mut engine = Engine::new(gr.sizes, &gr.residuals);
        let mut sol = None;
        engine.solve(budget, &mut |cells| {
            sol = Some(cells.to_vec());
            false
        });
        let aborted = engine.aborted;
        EvalResult {
            truth: if aborted { None } else { Some(sol.is_some()) },
            witness: sol.map(|c| self.model.witness_of(&c)),
            nodes: engine.nodes,
            aborted,
        }
    }

    /// Decides the sentence when each soVar may be any relation (partial or multi-valued)
    /// instead of a function. Sentences with μ-terms have no relational reading: `None`.
    pub fn search_relational(&self, budget: u64) -> Option<bool> {
        let mut has_mu = false;
        for psi in &self.psis {
            for part in &psi.parts {
                part.for_each_lit(&mut |_, a| has_mu |= a.terms().iter().any(|t| t.has_mu()));
            }
        }
        if has_mu {
            return None;
        }
        let gr = self.ground();
        if gr.unsat {
            return Some(false);
        }
        // one boolean cell per (cell, value id) pair
        let mut base = Vec::with_capacity(gr.sizes.len());
        let mut total = 0;
        for &s in &gr.sizes {
            base.push(total);
            total += s;
        }
        fn remap(g: &G, base: &[usize]) -> G {
            match g {
                G::Is(c, v) => G::Is(base[*c] + *v as usize, 1),
                G::Not(h) => remap(h, base).negate(),
                G::And(gs) => G::and(gs.iter().map(|h| remap(h, base)).collect()),
                G::Or(gs) => G::or(gs.iter().map(|h| remap(h, base)).collect()),
                G::Const(b) => G::Const(*b),
            }
        }
        let residuals: Vec<G> = gr.residuals.iter().map(|g| remap(g, &base)).collect();
        let mut engine = Engine::new(vec![2; total], &residuals);
        let mut found = false;
        engine.solve(budget, &mut |_| {
            found = true;
            false
        });
        (!engine.aborted).then_some(found)
    }

    /// Propagation engine over the ground residuals, for callers that fix cells themselves.
    pub fn engine(&self) -> Option<Engine> {
        let gr = self.ground();
        (!gr.unsat).then(|| Engine::new(gr.sizes, &gr.residuals))
    }

    fn objective(&self) -> &Objective {
        self.objective.as_ref().expect("compiled without an objective")
    }

    fn count_ranges(&self, clock: Option<(&str, u64)>) -> Vec<Vec<u64>> {
        let o = self.objective();
        let mut ranges = o.frame.ranges.clone();
        if let Some((name, a)) = clock {
            if let Some(s) = o.frame.slot(name) {
                ranges[s].retain(|&v| v < a);
            }
        }
        ranges
    }

    /// Objective value under a total witness, optionally restricting the clock variable to `[0,a)`.
    pub fn count_cells(&self, cells: &[u32], clock: Option<(&str, u64)>) -> u128 {
        let o = self.objective();
        let ranges = self.count_ranges(clock);
        if o.inner.iter().any(|&s| ranges[s].is_empty()) {
            return o.count.iter().map(|&s| ranges[s].len() as u128).product();
        }
        let plan = Plan::new(&self.model, &o.count, &ranges, &must_for_truth(&o.f), true);
        let inner = Plan::new(&self.model, &o.inner, &ranges, &must_for_violation(&o.f), true);
        let inner_leaf = inner.order.len();
        let leaf = plan.order.len();
        let mut total = 0u128;
        let mut slots = vec![None; ranges.len()];
        plan.walk(&self.model, &mut slots, cells, &mut |depth, slots| match self.model.eval(&o.f, slots, cells) {
            K3::T => {
                total += plan.remaining(depth);
                Step::Skip
            }
            K3::F => Step::Skip,
            K3::U if depth < leaf => Step::Descend,
            K3::U => {
                let mut s = slots.to_vec();
                let mut violated = false;
                inner.walk(&self.model, &mut s, cells, &mut |d, s| match self.model.eval(&o.f, s, cells) {
                    K3::T => Step::Skip,
                    K3::F if d == inner_leaf => {
                        violated = true;
                        Step::Stop
                    }
                    _ => Step::Descend,
                });
                if !violated {
                    total += 1;
                }
                Step::Skip
            }
        });
        total
    }

    pub fn count(&self, w: &Witness, clock: Option<(&str, u64)>) -> Result<u128, EvalError> {
        let cells = self.model.cells_of(w)?;
        Ok(self.count_cells(&cells, clock))
    }

    /// Objective as residual blocks over cells.
    pub fn ground_objective(&self) -> ObjectiveGrounding {
        let o = self.objective();
        let ranges = self.count_ranges(None);
        let blank = vec![UNK; self.model.ncells()];
        let plan = Plan::new(&self.model, &o.count, &ranges, &must_for_truth(&o.f), false);
        let inner = Plan::new(&self.model, &o.inner, &ranges, &must_for_violation(&o.f), false);
        let (leaf, inner_leaf) = (plan.order.len(), inner.order.len());
        let mut grounder = ground::Grounder::new(&self.model);
        let mut out = ObjectiveGrounding { constant: 0, blocks: Vec::new() };
        let mut slots = vec![None; ranges.len()];
        plan.walk(&self.model, &mut slots, &blank, &mut |depth, slots| match self.model.eval(&o.f, slots, &blank) {
            K3::T => {
                out.constant += plan.remaining(depth);
                Step::Skip
            }
            K3::F => Step::Skip,
            K3::U if depth < leaf => Step::Descend,
            K3::U => {
                let mut s = slots.to_vec();
                let mut parts = Vec::new();
                let mut dead = false;
                inner.walk(&self.model, &mut s, &blank, &mut |d, s| match self.model.eval(&o.f, s, &blank) {
                    K3::T => Step::Skip,
                    K3::F => {
                        dead = true;
                        Step::Stop
                    }
                    K3::U if d < inner_leaf => Step::Descend,
                    K3::U => {
                        parts.push(grounder.cf(&o.f, s));
                        Step::Skip
                    }
                });
                if !dead {
                    match G::and(parts) {
                        G::Const(true) => out.constant += 1,
                        G::Const(false) => {}
                        g => out.blocks.push(g),
                    }
                }
                Step::Skip
            }
        });
        out
    }
}

pub fn verify_witness(s: &Sentence, rel: &RelStructure, dom: &DomStructure, w: &Witness) -> Result<bool, EvalError> {
    Ok(Compiled::new(s, rel, dom)?.check(w)?.is_none())
}

pub fn search_witness(s: &Sentence, rel: &RelStructure, dom: &DomStructure, budget: u64) -> Result<EvalResult, EvalError> {
    Ok(Compiled::new(s, rel, dom)?.search(budget))
}

pub fn ground(s: &Sentence, rel: &RelStructure, dom: &DomStructure) -> Result<Grounding, EvalError> {
    Ok(Compiled::new(s, rel, dom)?.ground())
}

pub fn count_objective(s: &Sentence, spec: &MaxSpec, rel: &RelStructure, dom: &DomStructure, w: &Witness) -> Result<u128, EvalError> {
    Compiled::with_objective(s, spec, rel, dom)?.count(w, None)
}

/// Objective restricted to values `< a` of the objective's clock variable.
pub fn count_objective_prefix(s: &Sentence, spec: &MaxSpec, rel: &RelStructure, dom: &DomStructure, w: &Witness, a: u64) -> Result<u128, EvalError> {
    let clock = spec.clock.as_deref().map(|c| (c, a));
    Compiled::with_objective(s, spec, rel, dom)?.count(w, clock)
}

/// Truth of a formula under a first-order environment and a witness for the soVars of `s`.
pub fn eval_formula(
    f: &Formula,
    env: &BTreeMap<String, u64>,
    s: &Sentence,
    w: &Witness,
    rel: &RelStructure,
    dom: &DomStructure,
) -> Result<bool, EvalError> {
    let mut model = Model::new(s, rel, dom)?;
    model.register(f, rel);
    let frame = Frame { names: env.keys().cloned().collect(), ranges: vec![Vec::new(); env.len()] };
    let cf = model.compile(f, &frame, true)?;
    let cells = model.cells_of(w)?;
    let slots: Vec<Option<u64>> = env.values().map(|&v| Some(v)).collect();
    Ok(model.eval(&cf, &slots, &cells) == K3::T)
}

/// Truth of a first-order sentence (no soVars) by direct evaluation; used for validity checks.
pub fn holds_first_order(f: &Formula, vars: &[snl_ast::FoDecl], rel: &RelStructure, dom: &DomStructure) -> Result<bool, EvalError> {
    let s = Sentence { so_vars: Vec::new(), fo_vars: vars.to_vec(), consts: Vec::new(), matrix: vec![f.clone()] };
    let c = Compiled::new(&s, rel, dom)?;
    Ok(c.check_cells(&[]).is_none())
}
