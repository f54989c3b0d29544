//! Grounding compilers: every first-order tuple is instantiated, input relations and
//! comparisons are evaluated away, and what remains mentions only witness cells.
//! Cells whose soVar ranges over {0,1} become boolean variables (value 1 is true).

use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use snl_ast::{Cnf, CspConstraint, CspInstance, Lit, Witness};
use snl_check::{is_binary, is_monotone};
use snl_encode::Encoding;
use snl_eval::compile::Model;
use snl_eval::{Compiled, G};

use crate::ReduceError;

/// Per-residual clause cap when distributing into CNF.
const CLAUSE_CAP: usize = 256;

fn boolean_sizes(sizes: &[usize]) -> Result<(), ReduceError> {
    match sizes.iter().enumerate().find(|(_, &s)| s > 2) {
        Some((cell, &size)) => Err(ReduceError::NonBoolean { cell, size }),
        None => Ok(()),
    }
}

/// Binary-domain CSP with one variable per witness cell and one constraint per
/// distinct ground residual; satisfiable iff the sentence holds.
pub fn ground_monobsnl_to_bcsp2(e: &Encoding) -> Result<CspInstance, ReduceError> {
    if !is_monotone(&e.sentence) {
        return Err(ReduceError::Fragment("monotone"));
    }
    if !is_binary(&e.sentence, &e.dom) {
        return Err(ReduceError::Fragment("binary"));
    }
    let c = Compiled::new(&e.sentence, &e.rel, &e.dom)?;
    let gr = c.ground();
    boolean_sizes(&gr.sizes)?;
    let variables = gr.sizes.len().max(1);
    if gr.unsat {
        let never = CspConstraint { scope: vec![0], allowed: BTreeSet::new() };
        return Ok(CspInstance { variables, domain: 2, constraints: vec![never] });
    }
    let mut constraints = Vec::with_capacity(gr.residuals.len());
    for g in &gr.residuals {
        let scope = g.scope();
        if scope.len() > 2 {
            return Err(ReduceError::Requirement(scope.len()));
        }
        let mut assign = vec![0u32; gr.sizes.len()];
        let mut allowed = BTreeSet::new();
        for bits in 0u64..1 << scope.len() {
            let t: Vec<u64> = (0..scope.len()).map(|k| bits >> (scope.len() - 1 - k) & 1).collect();
            if t.iter().zip(&scope).any(|(&v, &c)| v as usize >= gr.sizes[c]) {
                continue;
            }
            for (&v, &c) in t.iter().zip(&scope) {
                assign[c] = v as u32;
            }
            if g.eval(&assign) {
                allowed.insert(t);
            }
        }
        constraints.push(CspConstraint { scope, allowed });
    }
    // single-valued cells can only take value 0
    for (c, &s) in gr.sizes.iter().enumerate() {
        if s == 1 {
            constraints.push(CspConstraint { scope: vec![c], allowed: BTreeSet::from([vec![0]]) });
        }
    }
    Ok(CspInstance { variables, domain: 2, constraints })
}

/// Objective of a maximization encoding as MAX-2SAT over clause blocks: a counted
/// tuple contributes one block, and it counts exactly when every clause of its
/// block is satisfied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Max2Sat {
    pub cnf: Cnf,
    pub blocks: Vec<Range<usize>>,
    /// Tuples counted under every witness.
    pub constant: u128,
    /// Witness cell of each variable, at index `var - 1`.
    pub cells: Vec<usize>,
    pub ncells: usize,
}

impl Max2Sat {
    /// Objective value `constant + satisfied blocks` (slot 0 of `assign` unused).
    pub fn value(&self, assign: &[bool]) -> u128 {
        let sat = |r: &Range<usize>| self.cnf.clauses[r.clone()].iter().all(|c| c.iter().any(|l| l.eval(assign)));
        self.constant + self.blocks.iter().filter(|r| sat(r)).count() as u128
    }

    /// Witness whose objective equals `value(assign)`; cells without a variable take value 0.
    pub fn witness(&self, model: &Model, assign: &[bool]) -> Witness {
        let mut cells = vec![0u32; self.ncells];
        for (k, &c) in self.cells.iter().enumerate() {
            cells[c] = u32::from(assign[k + 1]);
        }
        model.witness_of(&cells)
    }
}

pub fn ground_maxsnl_to_max2sat(e: &Encoding) -> Result<Max2Sat, ReduceError> {
    let spec = e.objective.as_ref().ok_or(ReduceError::NoObjective)?;
    let c = Compiled::with_objective(&e.sentence, spec, &e.rel, &e.dom)?;
    let sizes = c.sizes();
    boolean_sizes(&sizes)?;
    let og = c.ground_objective();
    let mut var_of = vec![0usize; sizes.len()];
    let mut cells = Vec::new();
    for (cell, &s) in sizes.iter().enumerate() {
        if s == 2 {
            cells.push(cell);
            var_of[cell] = cells.len();
        }
    }
    let mut clauses = Vec::new();
    let mut blocks = Vec::new();
    let mut constant = og.constant;
    for g in &og.blocks {
        let start = clauses.len();
        let mut never = false;
        for clause in block_clauses(g, &sizes, &var_of)? {
            match clause {
                Some(c) => clauses.push(c),
                None => never = true,
            }
        }
        if never {
            clauses.truncate(start);
        } else if clauses.len() == start {
            constant += 1;
        } else {
            blocks.push(start..clauses.len());
        }
    }
    Ok(Max2Sat { cnf: Cnf::new(cells.len(), clauses), blocks, constant, cells, ncells: sizes.len() })
}

/// Boolean 2-clauses of one block; `None` marks a clause that can never hold.
fn block_clauses(g: &G, sizes: &[usize], var_of: &[usize]) -> Result<Vec<Option<Vec<Lit>>>, ReduceError> {
    let cnf = g.to_cnf(CLAUSE_CAP).ok_or(ReduceError::Requirement(g.scope().len()))?;
    let mut out = Vec::new();
    'clauses: for clause in cnf {
        let mut lits: BTreeSet<Lit> = BTreeSet::new();
        for (pos, cell, v) in clause {
            if sizes[cell] == 1 {
                // the only value: `cell = 0` is true
                if pos == (v == 0) {
                    continue 'clauses;
                }
                continue;
            }
            let lit = Lit { var: var_of[cell], neg: pos != (v == 1) };
            if lits.contains(&lit.negate()) {
                continue 'clauses;
            }
            lits.insert(lit);
        }
        if lits.len() > 2 {
            return Err(ReduceError::Requirement(lits.len()));
        }
        out.push((!lits.is_empty()).then(|| lits.into_iter().collect()));
    }
    Ok(out)
}
