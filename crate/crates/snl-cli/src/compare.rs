//! Differential runs: seeded instances go through the encoder and the evaluator
//! and the result is compared with a brute-force oracle.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use snl_ast::Graph;
use snl_encode::{canonical_witness, digest, encode, gen, Encoding, Instance, Problem};
use snl_eval::{count_objective, search_witness, verify_witness};

use crate::oracle::{objective_optimum, oracle_answer};

#[derive(Clone, Debug)]
pub struct CompareConfig {
    pub problem: Problem,
    pub count: usize,
    /// Largest instance size: vertices, items or variables depending on the problem.
    pub max_n: usize,
    /// Enumerate every graph on this many vertices instead of sampling.
    pub exhaustive_n: Option<usize>,
    pub seed: u64,
    /// Search node budget per instance.
    pub budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Mismatch,
    Aborted,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Mismatch => "mismatch",
            Status::Aborted => "aborted",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareRow {
    pub index: usize,
    pub digest: String,
    /// Oracle truth, or the optimum in objective units for maximization problems.
    pub oracle: String,
    /// Truth found by witness search; `-` for maximization problems.
    pub search: String,
    /// Whether the canonical witness verifies, or its objective value.
    pub canonical: String,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub problem: Problem,
    pub seed: u64,
    pub rows: Vec<CompareRow>,
    pub mismatches: usize,
    pub aborted: usize,
}

impl CompareReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("index\tdigest\toracle\tsearch\tcanonical\tstatus\n");
        for r in &self.rows {
            out.push_str(&format!("{}\t{}\t{}\t{}\t{}\t{}\n", r.index, r.digest, r.oracle, r.search, r.canonical, r.status.as_str()));
        }
        out
    }

    pub fn summary(&self) -> String {
        format!("{}: {} instances, {} mismatches, {} aborted", self.problem, self.rows.len(), self.mismatches, self.aborted)
    }
}

/// Seeded instance `index` of the problem's corpus; `suite` keeps corpora of
/// different runs apart.
pub fn sample(suite: &str, problem: Problem, max_n: usize, seed: u64, index: usize) -> Instance {
    let mut rng = gen::stream(seed, &format!("{suite}-{problem}"), index as u64);
    let n = max_n.max(1);
    match problem {
        Problem::TwoColor | Problem::Nbg | Problem::MaxCut => {
            let k = rng.gen_range(1..=n);
            Instance::Graph(gen::graph(&mut rng, k, 0.4))
        }
        Problem::Exact3Dstcon => {
            let k = rng.gen_range(4..=n.max(4));
            let (graph, s, t) = gen::exact3_graph(&mut rng, k);
            Instance::StGraph { graph, s, t }
        }
        Problem::Dstncon => {
            let k = rng.gen_range(2..=n.max(2));
            Instance::StGraph { graph: gen::digraph(&mut rng, k, 0.3), s: 0, t: k - 1 }
        }
        Problem::Uk | Problem::MaxUk => {
            let cap = 4 * n as u64;
            Instance::Uk(gen::uk(&mut rng, n, cap, cap))
        }
        Problem::Polar2Sat(sign) => {
            let vars = rng.gen_range(1..=n);
            let m = rng.gen_range(0..=2 * vars);
            // a fifth of the formulas mix polarities, so the polarity test is exercised too
            let polarity = rng.gen_bool(0.8).then_some(sign);
            Instance::Cnf(gen::two_cnf(&mut rng, vars, m, polarity))
        }
        Problem::Csp2 => {
            let vars = rng.gen_range(1..=n.min(5));
            let domain = rng.gen_range(1..=3);
            let m = rng.gen_range(0..=2 * vars);
            Instance::Csp(gen::csp2(&mut rng, vars, domain, m))
        }
        Problem::MaxIp => {
            let size = rng.gen_range(1..=n.min(4));
            let dim = rng.gen_range(1..=n.min(6));
            Instance::MaxIp(gen::maxip(&mut rng, size, dim))
        }
    }
}

/// Every graph on `n` vertices in bitmask order: undirected for the graph problems,
/// loop-free directed with `s = 0`, `t = n-1` for the reachability ones.
pub fn exhaustive(problem: Problem, n: usize) -> Result<Vec<Instance>, String> {
    match problem {
        Problem::TwoColor | Problem::Nbg | Problem::MaxCut => {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            if pairs.len() > 16 {
                return Err(format!("{} graphs on {n} vertices is too many", 1u64 << pairs.len().min(63)));
            }
            Ok((0u32..1 << pairs.len())
                .map(|mask| Instance::Graph(Graph::new(n, pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect())))
                .collect())
        }
        Problem::Dstncon | Problem::Exact3Dstcon if n >= 1 => {
            if n > 4 {
                return Err(format!("too many digraphs on {n} vertices"));
            }
            Ok(gen::all_loopfree_digraphs(n).into_iter().map(|graph| Instance::StGraph { graph, s: 0, t: n - 1 }).collect())
        }
        _ => Err(format!("--exhaustive-n is not available for {problem}")),
    }
}

fn decision_row(problem: Problem, x: &Instance, e: &Encoding, budget: u64) -> Result<(String, String, String, Status), String> {
    let want = oracle_answer(problem, x).map_err(|e| e.to_string())?.decision.expect("decision problems have a decision");
    let r = search_witness(&e.sentence, &e.rel, &e.dom, budget).map_err(|e| e.to_string())?;
    let mut status = Status::Ok;
    let search = match r.truth {
        None => {
            status = Status::Aborted;
            "aborted".to_string()
        }
        Some(t) => {
            let bad_witness = match &r.witness {
                Some(w) => !verify_witness(&e.sentence, &e.rel, &e.dom, w).map_err(|e| e.to_string())?,
                None => false,
            };
            if t != want || bad_witness {
                status = Status::Mismatch;
            }
            t.to_string()
        }
    };
    let canonical = match canonical_witness(problem, x).map_err(|e| e.to_string())? {
        Some(w) => w.validate(&e.sentence, &e.dom).is_ok() && verify_witness(&e.sentence, &e.rel, &e.dom, &w).map_err(|e| e.to_string())?,
        None => false,
    };
    if canonical != want {
        status = Status::Mismatch;
    }
    Ok((want.to_string(), search, canonical.to_string(), status))
}

fn max_row(problem: Problem, x: &Instance, e: &Encoding) -> Result<(String, String, String, Status), String> {
    let opt = objective_optimum(problem, x).map_err(|e| e.to_string())?;
    let spec = e.objective.as_ref().expect("max encodings carry an objective");
    let w = canonical_witness(problem, x).map_err(|e| e.to_string())?.expect("max problems always have a canonical witness");
    let value = count_objective(&e.sentence, spec, &e.rel, &e.dom, &w).map_err(|e| e.to_string())?;
    let status = if value == opt { Status::Ok } else { Status::Mismatch };
    Ok((opt.to_string(), "-".into(), value.to_string(), status))
}

fn row(problem: Problem, index: usize, x: &Instance, budget: u64) -> Result<CompareRow, String> {
    let d = digest(problem, x);
    let e = encode(problem, x).map_err(|e| format!("instance {index}: {e}"))?;
    let (oracle, search, canonical, status) = if problem.is_max() { max_row(problem, x, &e) } else { decision_row(problem, x, &e, budget) }
        .map_err(|e| format!("instance {index}: {e}"))?;
    Ok(CompareRow { index, digest: d, oracle, search, canonical, status })
}

/// Runs the corpus in parallel; rows come back in index order.
pub fn compare(cfg: &CompareConfig) -> Result<CompareReport, String> {
    let instances: Vec<Instance> = match cfg.exhaustive_n {
        Some(n) => exhaustive(cfg.problem, n)?.into_iter().take(cfg.count).collect(),
        None => (0..cfg.count).map(|i| sample("compare", cfg.problem, cfg.max_n, cfg.seed, i)).collect(),
    };
    let rows = instances.par_iter().enumerate().map(|(i, x)| row(cfg.problem, i, x, cfg.budget)).collect::<Result<Vec<_>, _>>()?;
    let mismatches = rows.iter().filter(|r| r.status == Status::Mismatch).count();
    let aborted = rows.iter().filter(|r| r.status == Status::Aborted).count();
    Ok(CompareReport { problem: cfg.problem, seed: cfg.seed, rows, mismatches, aborted })
}
