//! Seeded corpora run through an optimizer and compared with an exact oracle.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use snl_encode::{digest, encode_max, gen, Instance, Problem};
use snl_oracle::{exact_cut, subset_sum_dp};

use crate::tau::{tau_greedy, UkTau};
use crate::{exact_max, greedy_maxuk, Method, OptError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub count: usize,
    /// Largest instance size: items for MAX-UK, vertices for MAX-CUT.
    pub max_n: usize,
    pub a_max: u64,
    pub b_max: u64,
    /// Witness budget for the exact method.
    pub budget: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { count: 500, max_n: 12, a_max: 30, b_max: 60, budget: 1 << 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub index: usize,
    pub digest: String,
    pub approx: u128,
    pub exact: u128,
    /// `exact / approx`, 1 when both are zero.
    pub ratio: f64,
    /// The method selected every item.
    pub all_selected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub method: Method,
    pub problem: Problem,
    pub seed: u64,
    pub bound: f64,
    pub rows: Vec<RatioRow>,
    /// Index, digest and reason of instances the oracle or method could not handle.
    pub skipped: Vec<(usize, String, String)>,
    pub max_ratio: f64,
    pub violations: usize,
    /// Rows where every item was selected, and how many of those are exact.
    pub full_selection: usize,
    pub full_selection_exact: usize,
}

impl RatioReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("index\tdigest\tapprox\texact\tratio\n");
        for r in &self.rows {
            out.push_str(&format!("{}\t{}\t{}\t{}\t{:.4}\n", r.index, r.digest, r.approx, r.exact, r.ratio));
        }
        out
    }
}

fn ratio(approx: u128, exact: u128) -> f64 {
    match (approx, exact) {
        (_, 0) => 1.0,
        (0, _) => f64::INFINITY,
        (a, e) => e as f64 / a as f64,
    }
}

type Outcome = Result<RatioRow, (usize, String, String)>;

fn uk_row(method: Method, corpus: &CorpusSpec, seed: u64, index: usize) -> Outcome {
    let u = gen::uk(&mut gen::stream(seed, "bench-maxuk", index as u64), corpus.max_n, corpus.a_max, corpus.b_max);
    let x = Instance::Uk(u.clone());
    let d = digest(Problem::MaxUk, &x);
    let skip = |why: String| (index, d.clone(), why);
    let exact = subset_sum_dp(&u).map_err(|e| skip(e.to_string()))?.optimum as u128;
    let (approx, selected) = match method {
        Method::GreedyUk => {
            let r = greedy_maxuk(&u);
            (r.best_value, r.selected.len())
        }
        Method::Tau => {
            let t = UkTau::new(&u);
            let r = tau_greedy(&t).map_err(|e| skip(e.to_string()))?;
            (r.best_value, r.selected.len())
        }
        Method::Exact => {
            let e = encode_max(Problem::MaxUk, &x).map_err(|e| skip(e.to_string()))?;
            let spec = e.objective.as_ref().expect("max encodings carry an objective");
            let r = exact_max(&e.sentence, spec, &e.rel, &e.dom, corpus.budget).map_err(|e| skip(e.to_string()))?;
            (r.best_value, 0)
        }
    };
    let all_selected = method != Method::Exact && selected == u.a.len();
    Ok(RatioRow { index, digest: d, approx, exact, ratio: ratio(approx, exact), all_selected })
}

fn cut_row(corpus: &CorpusSpec, seed: u64, index: usize) -> Outcome {
    let mut rng = gen::stream(seed, "bench-maxcut", index as u64);
    let n = rng.gen_range(1..=corpus.max_n.max(1));
    let g = gen::graph(&mut rng, n, 0.5);
    let x = Instance::Graph(g.clone());
    let d = digest(Problem::MaxCut, &x);
    let skip = |why: String| (index, d.clone(), why);
    // the objective counts ordered pairs, so twice the cut size
    let exact = 2 * exact_cut(&g).map_err(|e| skip(e.to_string()))?.0 as u128;
    let e = encode_max(Problem::MaxCut, &x).map_err(|e| skip(e.to_string()))?;
    let spec = e.objective.as_ref().expect("max encodings carry an objective");
    let approx = exact_max(&e.sentence, spec, &e.rel, &e.dom, corpus.budget).map_err(|e| skip(e.to_string()))?.best_value;
    Ok(RatioRow { index, digest: d, approx, exact, ratio: ratio(approx, exact), all_selected: false })
}

/// Runs `method` on `corpus.count` seeded instances in parallel; rows come back in
/// index order whatever the schedule.
pub fn ratio_harness(method: Method, problem: Problem, corpus: &CorpusSpec, seed: u64) -> Result<RatioReport, OptError> {
    let outcomes: Vec<Outcome> = match (problem, method) {
        (Problem::MaxUk, _) => (0..corpus.count).into_par_iter().map(|i| uk_row(method, corpus, seed, i)).collect(),
        (Problem::MaxCut, Method::Exact) => (0..corpus.count).into_par_iter().map(|i| cut_row(corpus, seed, i)).collect(),
        _ => return Err(OptError::Unsupported { method, problem: problem.to_string() }),
    };
    let bound = method.bound();
    let mut report = RatioReport {
        method,
        problem,
        seed,
        bound,
        rows: Vec::new(),
        skipped: Vec::new(),
        max_ratio: 1.0,
        violations: 0,
        full_selection: 0,
        full_selection_exact: 0,
    };
    for o in outcomes {
        match o {
            Ok(row) => {
                report.max_ratio = report.max_ratio.max(row.ratio);
                report.violations += usize::from(row.ratio > bound);
                if row.all_selected {
                    report.full_selection += 1;
                    report.full_selection_exact += usize::from(row.approx == row.exact);
                }
                report.rows.push(row);
            }
            Err(s) => report.skipped.push(s),
        }
    }
    Ok(report)
}
