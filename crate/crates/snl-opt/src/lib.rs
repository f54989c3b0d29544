//! Optimizers for counting objectives: exhaustive search over witnesses, the greedy
//! algorithm for MAX-UK, and the generic step-wise greedy scheme over a clock with
//! its condition checker. `harness` runs an optimizer over a seeded corpus and
//! compares it with an exact oracle.

pub mod harness;
pub mod tau;

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use snl_ast::{DomStructure, MaxSpec, RelStructure, Sentence, UkInstance, Witness};
use snl_eval::{Compiled, EvalError};

pub use harness::{ratio_harness, CorpusSpec, RatioReport, RatioRow};
pub use tau::{check_tau_conditions, tau_greedy, Counterexample, FormulaTau, TauReport, TauSpec, UkTau};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OptError {
    #[error("witness space has {space} elements, budget is {budget}")]
    Budget { space: u128, budget: u64 },
    #[error("some second-order cell has an empty range, so no total witness exists")]
    NoWitness,
    #[error("step conditions fail: {0}")]
    Conditions(Counterexample),
    #[error("invalid step specification: {0}")]
    BadTau(String),
    #[error("{method} does not apply to {problem}")]
    Unsupported { method: Method, problem: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    GreedyUk,
    Tau,
}

impl Method {
    /// Largest approximation ratio the method guarantees.
    pub fn bound(self) -> f64 {
        match self {
            Method::Exact => 1.0,
            Method::GreedyUk | Method::Tau => 2.0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::GreedyUk => "greedy-uk",
            Method::Tau => "tau",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Method::Exact),
            "greedy-uk" => Ok(Method::GreedyUk),
            "tau" => Ok(Method::Tau),
            _ => Err(format!("unknown method `{s}` (exact, greedy-uk or tau)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_value: u128,
    pub witness: Witness,
    pub method: Method,
    /// Chosen positions, 1-based: items for greedy-uk, clock steps for tau.
    pub selected: Vec<u64>,
}

/// Maximum of the objective over every total witness, with the lexicographically
/// least maximizer in cell order.
pub fn exact_max(s: &Sentence, spec: &MaxSpec, rel: &RelStructure, dom: &DomStructure, budget: u64) -> Result<OptResult, OptError> {
    let c = Compiled::with_objective(s, spec, rel, dom)?;
    let sizes = c.sizes();
    if sizes.contains(&0) {
        return Err(OptError::NoWitness);
    }
    let space = sizes.iter().try_fold(1u128, |acc, &k| acc.checked_mul(k as u128)).unwrap_or(u128::MAX);
    if space > u128::from(budget) {
        return Err(OptError::Budget { space, budget });
    }
    let mut cells = vec![0u32; sizes.len()];
    let mut best: Option<(u128, Vec<u32>)> = None;
    'odometer: loop {
        let v = c.count_cells(&cells, None);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, cells.clone()));
        }
        for k in (0..sizes.len()).rev() {
            cells[k] += 1;
            if (cells[k] as usize) < sizes[k] {
                continue 'odometer;
            }
            cells[k] = 0;
        }
        break;
    }
    let (best_value, cells) = best.expect("at least one witness");
    Ok(OptResult { best_value, witness: c.model.witness_of(&cells), method: Method::Exact, selected: Vec::new() })
}

/// Item positions in descending value order; the sort is stable, so equal values
/// keep their original order.
pub fn descending_order(a: &[u64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by_key(|&i| Reverse(a[i]));
    order
}

/// Witness for the MAX-UK sentence: `P(i)` is the sum of the picked items among the first `i`.
pub fn uk_witness(u: &UkInstance, pick: &[bool]) -> Witness {
    let mut acc = 0;
    let mut table = vec![Some(vec![0])];
    for (&a, &p) in u.a.iter().zip(pick) {
        if p {
            acc += a;
        }
        table.push(Some(vec![acc]));
    }
    Witness { tables: [("P".to_string(), table)].into() }
}

/// Items in descending order, each kept if the running sum stays within `b`.
/// When every item fits this takes them all. Otherwise the first rejected item is
/// no larger than anything picked before it and overflows `b` with them, so the
/// picked sum exceeds `b/2` (for items within `b`).
pub fn greedy_maxuk(u: &UkInstance) -> OptResult {
    let mut pick = vec![false; u.a.len()];
    let mut sum = 0;
    for i in descending_order(&u.a) {
        if sum + u.a[i] <= u.b {
            sum += u.a[i];
            pick[i] = true;
        }
    }
    let selected = (1..=u.a.len() as u64).filter(|&k| pick[k as usize - 1]).collect();
    OptResult { best_value: u128::from(sum), witness: uk_witness(u, &pick), method: Method::GreedyUk, selected }
}
