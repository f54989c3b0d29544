//! Reductions between the problems of the toolkit: 2CNF polarity and Γ_OR
//! translations, grounding of sentences into binary CSPs and weighted MAX-2SAT,
//! and the approximation-preserving chain MAX-3SAT → MAX-2SAT → MAX-WTDCUT →
//! MAX-CUT with its solution back-maps.

pub mod chain;
pub mod cut;
pub mod diag;
pub mod ground;
pub mod sat;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use snl_ast::Cnf;

pub use chain::{Chain, ChainTrace};
pub use cut::{lit_vertex, max2sat_to_wtdcut, weighted_cut, wtdcut_to_maxcut, CutReduction, Gadget, GadgetReduction};
pub use ground::{ground_maxsnl_to_max2sat, ground_monobsnl_to_bcsp2, Max2Sat};
pub use sat::{
    cnf2_to_positive_polarity, gamma_or_pattern, max3sat_to_max2sat, or_constraint, solve_negative_polarity, twosat_to_bcsp2, williams_gadget,
    Polarized, Williams,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("clause {clause} has {width} literals, at most {max} allowed")]
    Width { clause: usize, width: usize, max: usize },
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("clause {0} does not mix a positive and a negative literal")]
    Polarity(usize),
    #[error("weight {weight} on edge ({u},{v}) is odd; the two-edge gadget needs even weights")]
    OddWeight { u: usize, v: usize, weight: u64 },
    #[error("edge ({u},{v}) is invalid: {why}")]
    BadEdge { u: usize, v: usize, why: &'static str },
    #[error("the sentence is not {0}")]
    Fragment(&'static str),
    #[error("grounded residual touches {0} second-order cells, at most 2 allowed")]
    Requirement(usize),
    #[error("second-order cell {cell} has {size} values, only 1 or 2 can become a boolean variable")]
    NonBoolean { cell: usize, size: usize },
    #[error("encoding has no objective")]
    NoObjective,
    #[error(transparent)]
    Eval(#[from] snl_eval::EvalError),
}

/// One approximation-preserving step: sizes on both sides, the back-map used and
/// constants with `OPT(x) <= c1 * OPT(f(x))` and `err(x, g(s)) <= c2 * err(f(x), s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApReductionTrace {
    pub step: String,
    pub source_size: usize,
    pub target_size: usize,
    pub back_map: String,
    pub c1: f64,
    /// `None` when no constant is established for the step.
    pub c2: Option<f64>,
}

/// `max(opt/val, val/opt) - 1`, or `None` when either value is zero.
pub fn err(opt: u64, val: u64) -> Option<f64> {
    if opt == 0 || val == 0 {
        return None;
    }
    let (a, b) = (opt as f64, val as f64);
    Some((a / b).max(b / a) - 1.0)
}

fn check_clauses(f: &Cnf, max: usize) -> Result<(), ReduceError> {
    for (k, c) in f.clauses.iter().enumerate() {
        if c.is_empty() {
            return Err(ReduceError::EmptyClause(k));
        }
        if c.len() > max {
            return Err(ReduceError::Width { clause: k, width: c.len(), max });
        }
    }
    Ok(())
}

/// Better of the all-true and all-false assignments; every nonempty clause holds
/// under one of them, so at least half the clauses are satisfied.
fn uniform_best(f: &Cnf) -> Vec<bool> {
    let t = vec![true; f.nvars + 1];
    let fl = vec![false; f.nvars + 1];
    if f.satisfied(&t) >= f.satisfied(&fl) {
        t
    } else {
        fl
    }
}

/// Keeps `candidate` unless the half-guarantee assignment satisfies strictly more.
fn at_least_half(f: &Cnf, candidate: Vec<bool>) -> Vec<bool> {
    let fallback = uniform_best(f);
    if f.satisfied(&fallback) > f.satisfied(&candidate) {
        fallback
    } else {
        candidate
    }
}
