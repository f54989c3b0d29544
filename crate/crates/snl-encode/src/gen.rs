//! Seeded instance generators. Every instance draws from its own ChaCha stream
//! keyed by (seed, suite, index), so corpora are reproducible and independent of
//! generation order.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use snl_ast::{Cnf, CspConstraint, CspInstance, Graph, Lit, MaxIpInstance, UkInstance, WeightedGraph};

pub fn stream(seed: u64, suite: &str, index: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(suite.as_bytes());
    h.update(index.to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// Undirected graph on `n` vertices, each pair an edge with probability `p`.
pub fn graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(p)).collect();
    Graph::new(n, edges)
}

/// Directed graph without self-loops.
pub fn digraph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let edges = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|(u, v)| u != v).filter(|_| rng.gen_bool(p)).collect();
    Graph::digraph(n, edges)
}

/// Every loop-free digraph on `n` vertices, in bitmask order over the ordered pairs.
pub fn all_loopfree_digraphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|(u, v)| u != v).collect();
    (0u64..1 << pairs.len())
        .map(|mask| Graph::digraph(n, pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect()))
        .collect()
}

/// A graph in the exact3DSTCON regime: s = 0 with indegree 0 and three
/// out-neighbours; every other vertex has two out-arcs counting the loop at t.
/// Needs `n >= 4`.
pub fn exact3_graph(rng: &mut impl Rng, n: usize) -> (Graph, usize, usize) {
    assert!(n >= 4, "exact3 graphs need at least 4 vertices");
    let t = rng.gen_range(1..n);
    let mut edges = Vec::new();
    let others: Vec<usize> = (1..n).collect();
    for &v in others.choose_multiple(rng, 3) {
        edges.push((0, v));
    }
    for u in 1..n {
        let pool: Vec<usize> = (1..n).filter(|&v| v != u).collect();
        let k = if u == t { 1 } else { 2 };
        for &v in pool.choose_multiple(rng, k) {
            edges.push((u, v));
        }
    }
    (Graph::digraph(n, edges), 0, t)
}

/// UK instance with `1..=n_max` items; half the time `b` is a subset sum.
pub fn uk(rng: &mut impl Rng, n_max: usize, a_max: u64, b_max: u64) -> UkInstance {
    let n = rng.gen_range(1..=n_max);
    let a: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=a_max)).collect();
    let b = if rng.gen_bool(0.5) {
        let s: u64 = a.iter().filter(|_| rng.gen_bool(0.5)).sum();
        s.clamp(1, b_max)
    } else {
        rng.gen_range(1..=b_max)
    };
    UkInstance::normalized(b, a).expect("positive values")
}

/// Clauses of exactly `width` literals over distinct variables (fewer if `nvars` is smaller).
pub fn cnf(rng: &mut impl Rng, nvars: usize, nclauses: usize, width: usize) -> Cnf {
    let vars: Vec<usize> = (1..=nvars).collect();
    let clauses =
        (0..nclauses).map(|_| vars.choose_multiple(rng, width.min(nvars)).map(|&v| Lit { var: v, neg: rng.gen_bool(0.5) }).collect()).collect();
    Cnf::new(nvars, clauses)
}

/// 2CNF where each clause has the requested polarity: `Some(true)` for x∨y / x̄∨ȳ,
/// `Some(false)` for mixed pairs, `None` for no restriction.
pub fn two_cnf(rng: &mut impl Rng, nvars: usize, nclauses: usize, polarity: Option<bool>) -> Cnf {
    let mut f = cnf(rng, nvars, nclauses, 2);
    if let Some(pos) = polarity {
        for c in f.clauses.iter_mut().filter(|c| c.len() == 2) {
            c[1].neg = if pos { c[0].neg } else { !c[0].neg };
        }
    }
    f
}

/// Random CSP with unary and binary constraints over `0..domain`.
pub fn csp2(rng: &mut impl Rng, variables: usize, domain: u64, nconstraints: usize) -> CspInstance {
    let constraints = (0..nconstraints)
        .map(|_| {
            let arity = if variables > 1 && rng.gen_bool(0.7) { 2 } else { 1 };
            let scope: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..variables)).collect();
            let tuples: Vec<Vec<u64>> = if arity == 1 {
                (0..domain).map(|v| vec![v]).collect()
            } else {
                (0..domain).flat_map(|v| (0..domain).map(move |w| vec![v, w])).collect()
            };
            let allowed: BTreeSet<Vec<u64>> = tuples.into_iter().filter(|_| rng.gen_bool(0.6)).collect();
            CspConstraint { scope, allowed }
        })
        .collect();
    CspInstance { variables, domain, constraints }
}

/// Weighted simple graph with weights in `1..=w_max`.
pub fn weighted_graph(rng: &mut impl Rng, n: usize, p: f64, w_max: u64) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(1..=w_max)));
            }
        }
    }
    WeightedGraph { n, edges }
}

pub fn maxip(rng: &mut impl Rng, size: usize, dim: usize) -> MaxIpInstance {
    let mut vecs = || (0..size).map(|_| (0..dim).map(|_| rng.gen_bool(0.5)).collect()).collect();
    MaxIpInstance { x1: vecs(), x2: vecs() }
}
