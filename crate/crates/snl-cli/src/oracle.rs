//! Dispatch from a problem and instance to its reference solver.

use serde_json::json;

use snl_encode::{Instance, Problem};
use snl_oracle::{bfs_reachable, bipartite_coloring, csp_brute, exact_cut, exact_maxip, polar2sat, subset_sum_dp, OracleAnswer, OracleError};

fn wrong(problem: Problem) -> OracleError {
    OracleError::Precondition(format!("instance kind does not match {problem}"))
}

/// Decision or optimum in the problem's natural units (cut edges, item sum, inner product).
pub fn oracle_answer(problem: Problem, x: &Instance) -> Result<OracleAnswer, OracleError> {
    let decide = |b: bool, certificate: Option<serde_json::Value>| OracleAnswer { decision: Some(b), optimum: None, certificate };
    let optimum = |v: u64, certificate: serde_json::Value| OracleAnswer { decision: None, optimum: Some(v), certificate: Some(certificate) };
    Ok(match (problem, x) {
        (Problem::TwoColor, Instance::Graph(g)) => {
            let c = bipartite_coloring(g);
            decide(c.is_some(), c.map(|c| json!(c)))
        }
        (Problem::Nbg, Instance::Graph(g)) => decide(bipartite_coloring(g).is_none(), None),
        (Problem::Exact3Dstcon, Instance::StGraph { graph, s, t }) => decide(bfs_reachable(graph, *s, *t), None),
        (Problem::Dstncon, Instance::StGraph { graph, s, t }) => decide(!bfs_reachable(graph, *s, *t), None),
        (Problem::Uk, Instance::Uk(u)) => decide(subset_sum_dp(u)?.exact, None),
        (Problem::Polar2Sat(sign), Instance::Cnf(f)) => decide(polar2sat(f, sign)?, None),
        (Problem::Csp2, Instance::Csp(c)) => {
            let a = csp_brute(c)?;
            decide(a.is_some(), a.map(|a| json!(a)))
        }
        (Problem::MaxCut, Instance::Graph(g)) => {
            let (v, side) = exact_cut(g)?;
            optimum(v, json!(side))
        }
        (Problem::MaxUk, Instance::Uk(u)) => optimum(subset_sum_dp(u)?.optimum, json!(null)),
        (Problem::MaxIp, Instance::MaxIp(m)) => {
            let (v, pair) = exact_maxip(m)?;
            optimum(v as u64, json!(pair))
        }
        (p, _) => return Err(wrong(p)),
    })
}

/// Optimum in the units of the encoded objective. The cut objective counts ordered
/// pairs, so it is twice the number of cut edges.
pub fn objective_optimum(problem: Problem, x: &Instance) -> Result<u128, OracleError> {
    let v = oracle_answer(problem, x)?.optimum.ok_or_else(|| wrong(problem))? as u128;
    Ok(if problem == Problem::MaxCut { 2 * v } else { v })
}
