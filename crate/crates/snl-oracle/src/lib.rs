//! Reference solvers. Each one is written from the problem definition and shares no
//! code with the encoders and reductions it is used to check.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use snl_ast::{Cnf, CspInstance, Graph, Lit, MaxIpInstance, UkInstance, WeightedGraph};
use thiserror::Error;

pub const MAX_VERTICES: usize = 20;
pub const MAX_VARS: usize = 20;
pub const MAX_BUDGET: u64 = 10_000;
/// Largest factor scope the elimination-based cut solver will build.
pub const MAX_ELIM_WIDTH: usize = 22;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for the {what} oracle: {size} > {limit}")]
    TooLarge { what: &'static str, size: u64, limit: u64 },
    #[error("{0}")]
    Precondition(String),
}

fn guard(what: &'static str, size: usize, limit: usize) -> Result<(), OracleError> {
    if size > limit {
        return Err(OracleError::TooLarge { what, size: size as u64, limit: limit as u64 });
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleAnswer {
    pub decision: Option<bool>,
    pub optimum: Option<u64>,
    pub certificate: Option<serde_json::Value>,
}

/// Directed reachability by breadth-first search over the arcs of `g`.
pub fn bfs_reachable(g: &Graph, s: usize, t: usize) -> bool {
    let mut adj = vec![Vec::new(); g.n];
    for (u, v) in g.arcs() {
        adj[u].push(v);
    }
    let mut seen = vec![false; g.n];
    let mut queue = VecDeque::from([s]);
    seen[s] = true;
    while let Some(u) = queue.pop_front() {
        if u == t {
            return true;
        }
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    false
}

/// Distances from `s` (None when unreachable).
pub fn bfs_distances(g: &Graph, s: usize) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); g.n];
    for (u, v) in g.arcs() {
        adj[u].push(v);
    }
    let mut dist = vec![None; g.n];
    dist[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Two-coloring by traversal; returns a proper coloring when one exists.
pub fn bipartite_coloring(g: &Graph) -> Option<Vec<u8>> {
    let mut adj = vec![Vec::new(); g.n];
    for &(u, v) in &g.edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut color: Vec<Option<u8>> = vec![None; g.n];
    for root in 0..g.n {
        if color[root].is_some() {
            continue;
        }
        color[root] = Some(0);
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            let cu = color[u].unwrap();
            for &v in &adj[u] {
                match color[v] {
                    None => {
                        color[v] = Some(1 - cu);
                        stack.push(v);
                    }
                    Some(cv) if cv == cu => return None,
                    _ => {}
                }
            }
        }
    }
    Some(color.into_iter().map(Option::unwrap).collect())
}

pub fn bipartite_check(g: &Graph) -> bool {
    bipartite_coloring(g).is_some()
}

/// 2SAT through the implication graph and its strongly connected components.
/// Returns a satisfying assignment (index 0 unused) or None.
pub fn twosat_decide(f: &Cnf) -> Result<Option<Vec<bool>>, OracleError> {
    if f.width() > 2 {
        return Err(OracleError::Precondition("2SAT oracle needs clauses of width at most 2".into()));
    }
    if f.clauses.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let nodes = 2 * (f.nvars + 1);
    let node = |l: Lit| 2 * l.var + usize::from(l.neg);
    let mut adj = vec![Vec::new(); nodes];
    let mut radj = vec![Vec::new(); nodes];
    for c in &f.clauses {
        let (a, b) = (c[0], *c.get(1).unwrap_or(&c[0]));
        for (x, y) in [(a.negate(), b), (b.negate(), a)] {
            adj[node(x)].push(node(y));
            radj[node(y)].push(node(x));
        }
    }
    // Kosaraju: finishing order on the graph, then components on the reverse graph.
    let mut order = Vec::with_capacity(nodes);
    let mut visited = vec![false; nodes];
    for start in 0..nodes {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut stack = vec![(start, 0usize)];
        while let Some((u, i)) = stack.pop() {
            if i < adj[u].len() {
                stack.push((u, i + 1));
                let v = adj[u][i];
                if !visited[v] {
                    visited[v] = true;
                    stack.push((v, 0));
                }
            } else {
                order.push(u);
            }
        }
    }
    let mut comp = vec![usize::MAX; nodes];
    let mut next = 0;
    for &start in order.iter().rev() {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &v in &radj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    let mut assign = vec![false; f.nvars + 1];
    for x in 1..=f.nvars {
        let (p, q) = (comp[2 * x], comp[2 * x + 1]);
        if p == q {
            return Ok(None);
        }
        // components come out in topological order of the condensation, so the
        // literal whose component comes later is the one that can be true
        assign[x] = p > q;
    }
    Ok(Some(assign))
}

/// Satisfiability by enumerating every assignment.
pub fn truth_table_sat(f: &Cnf) -> Result<Option<Vec<bool>>, OracleError> {
    guard("truth-table", f.nvars, MAX_VARS)?;
    for mask in 0u64..(1 << f.nvars) {
        let assign = mask_assignment(mask, f.nvars);
        if f.clauses.iter().all(|c| c.iter().any(|l| l.eval(&assign))) {
            return Ok(Some(assign));
        }
    }
    Ok(None)
}

fn mask_assignment(mask: u64, nvars: usize) -> Vec<bool> {
    let mut a = vec![false; nvars + 1];
    for (x, slot) in a.iter_mut().enumerate().skip(1) {
        *slot = mask >> (x - 1) & 1 == 1;
    }
    a
}

/// Maximum number of satisfied clauses over all assignments, with the first maximizer.
pub fn exact_max2sat(f: &Cnf) -> Result<(usize, Vec<bool>), OracleError> {
    guard("max-sat", f.nvars, MAX_VARS)?;
    let mut best = (0, mask_assignment(0, f.nvars));
    for mask in 0u64..(1 << f.nvars) {
        let a = mask_assignment(mask, f.nvars);
        let k = f.clauses.iter().filter(|c| c.iter().any(|l| l.eval(&a))).count();
        if k > best.0 || mask == 0 {
            best = (k, a);
        }
    }
    Ok(best)
}

/// Clause polarity: `Some(true)` for x∨y or x̄∨ȳ, `Some(false)` for a mixed pair.
pub fn clause_polarity(c: &[Lit]) -> Option<bool> {
    match c {
        [_] => Some(true),
        [a, b] => Some(a.neg == b.neg),
        _ => None,
    }
}

/// Polar±2SAT: every clause has the requested polarity and the formula is satisfiable.
pub fn polar2sat(f: &Cnf, positive: bool) -> Result<bool, OracleError> {
    if f.clauses.iter().any(|c| clause_polarity(c) != Some(positive)) {
        return Ok(false);
    }
    Ok(twosat_decide(f)?.is_some())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSum {
    /// Some subset sums to exactly b.
    pub exact: bool,
    /// Largest subset sum not exceeding b.
    pub optimum: u64,
}

/// Subset-sum table over items × partial sums.
pub fn subset_sum_dp(inst: &UkInstance) -> Result<SubsetSum, OracleError> {
    if inst.b > MAX_BUDGET {
        return Err(OracleError::TooLarge { what: "subset-sum", size: inst.b, limit: MAX_BUDGET });
    }
    let b = inst.b as usize;
    let mut reach = vec![false; b + 1];
    reach[0] = true;
    for &x in &inst.a {
        let x = x as usize;
        for s in (x..=b).rev() {
            if reach[s - x] {
                reach[s] = true;
            }
        }
    }
    let optimum = (0..=b).rev().find(|&s| reach[s]).unwrap_or(0) as u64;
    Ok(SubsetSum { exact: reach[b], optimum })
}

/// Maximum cut of an unweighted graph by enumerating 2^(n-1) partitions.
pub fn exact_cut(g: &Graph) -> Result<(u64, Vec<bool>), OracleError> {
    let wg = WeightedGraph { n: g.n, edges: g.edges.iter().map(|&(u, v)| (u, v, 1)).collect() };
    exact_wcut(&wg)
}

/// Maximum weighted cut by exhaustive enumeration; the last vertex stays on side false.
pub fn exact_wcut(g: &WeightedGraph) -> Result<(u64, Vec<bool>), OracleError> {
    guard("exhaustive cut", g.n, MAX_VERTICES)?;
    if g.n == 0 {
        return Ok((0, Vec::new()));
    }
    let mut best = (0, vec![false; g.n]);
    for mask in 0u64..(1 << (g.n - 1)) {
        let value: u64 = g.edges.iter().filter(|(u, v, _)| (mask >> u & 1) != (mask >> v & 1)).map(|e| e.2).sum();
        if value > best.0 {
            best = (value, (0..g.n).map(|v| mask >> v & 1 == 1).collect());
        }
    }
    Ok(best)
}

struct Factor {
    scope: Vec<usize>,
    table: Vec<i64>,
}

impl Factor {
    fn index(&self, side: &[bool]) -> usize {
        self.scope.iter().enumerate().map(|(k, &v)| usize::from(side[v]) << k).sum()
    }
}

/// Maximum weighted cut by max-sum variable elimination (min-degree order).
/// Exact for graphs of any size whose elimination width stays under `MAX_ELIM_WIDTH`.
pub fn exact_wcut_elim(g: &WeightedGraph) -> Result<(u64, Vec<bool>), OracleError> {
    let mut elim = Elim { factors: Vec::new(), by_scope: HashMap::new(), touch: vec![Vec::new(); g.n] };
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); g.n];
    for &(u, v, w) in g.edges.iter().filter(|e| e.0 != e.1) {
        let (a, b) = (u.min(v), u.max(v));
        elim.add(Factor { scope: vec![a, b], table: vec![0, w as i64, w as i64, 0] });
        nbrs[a].insert(b);
        nbrs[b].insert(a);
    }
    let mut alive: BTreeSet<usize> = (0..g.n).collect();
    let mut trace: Vec<(usize, Factor)> = Vec::new();
    let mut constant = 0i64;
    // variable whose elimination creates the smallest factor
    while let Some(x) = alive.iter().copied().min_by_key(|&x| (nbrs[x].len(), x)) {
        alive.remove(&x);
        let around: Vec<usize> = std::mem::take(&mut nbrs[x]).into_iter().collect();
        for &u in &around {
            nbrs[u].remove(&x);
            nbrs[u].extend(around.iter().copied().filter(|&v| v != u));
        }
        let touching: Vec<Factor> = std::mem::take(&mut elim.touch[x]).into_iter().filter_map(|id| elim.take(id)).collect();
        let mut scope = around;
        scope.push(x);
        scope.sort_unstable();
        guard("elimination cut", scope.len(), MAX_ELIM_WIDTH)?;
        let mut side = vec![false; g.n];
        let mut joint = vec![0i64; 1 << scope.len()];
        for (idx, slot) in joint.iter_mut().enumerate() {
            for (k, &v) in scope.iter().enumerate() {
                side[v] = idx >> k & 1 == 1;
            }
            *slot = touching.iter().map(|f| f.table[f.index(&side)]).sum();
        }
        let joint = Factor { scope, table: joint };
        let rest: Vec<usize> = joint.scope.iter().copied().filter(|&v| v != x).collect();
        let mut reduced = vec![i64::MIN; 1 << rest.len()];
        for (idx, slot) in reduced.iter_mut().enumerate() {
            for (k, &v) in rest.iter().enumerate() {
                side[v] = idx >> k & 1 == 1;
            }
            for b in [false, true] {
                side[x] = b;
                *slot = (*slot).max(joint.table[joint.index(&side)]);
            }
        }
        if rest.is_empty() {
            constant += reduced[0];
        } else {
            elim.add(Factor { scope: rest, table: reduced });
        }
        trace.push((x, joint));
    }
    let mut side = vec![false; g.n];
    for (x, joint) in trace.iter().rev() {
        side[*x] = false;
        let off = joint.table[joint.index(&side)];
        side[*x] = true;
        let on = joint.table[joint.index(&side)];
        side[*x] = on > off;
    }
    Ok((constant as u64, side))
}

/// Live factors with an index by vertex; factors over the same scope are summed.
struct Elim {
    factors: Vec<Option<Factor>>,
    by_scope: HashMap<Vec<usize>, usize>,
    touch: Vec<Vec<usize>>,
}

impl Elim {
    fn add(&mut self, f: Factor) {
        if let Some(&id) = self.by_scope.get(&f.scope) {
            let old = self.factors[id].as_mut().expect("indexed factors are live");
            old.table.iter_mut().zip(&f.table).for_each(|(a, b)| *a += b);
            return;
        }
        let id = self.factors.len();
        for &v in &f.scope {
            self.touch[v].push(id);
        }
        self.by_scope.insert(f.scope.clone(), id);
        self.factors.push(Some(f));
    }

    fn take(&mut self, id: usize) -> Option<Factor> {
        let f = self.factors[id].take()?;
        self.by_scope.remove(&f.scope);
        Some(f)
    }
}

pub fn cut_value(g: &WeightedGraph, side: &[bool]) -> u64 {
    g.edges.iter().filter(|(u, v, _)| side[*u] != side[*v]).map(|e| e.2).sum()
}

/// Maximum inner product over all pairs, with the first maximizing pair.
pub fn exact_maxip(inst: &MaxIpInstance) -> Result<(usize, (usize, usize)), OracleError> {
    guard("max-ip", inst.x1.len(), 1 << 10)?;
    let mut best = (0, (0, 0));
    for (i, x) in inst.x1.iter().enumerate() {
        for (j, y) in inst.x2.iter().enumerate() {
            let ip = x.iter().zip(y).filter(|(a, b)| **a && **b).count();
            if ip > best.0 {
                best = (ip, (i, j));
            }
        }
    }
    Ok(best)
}

/// CSP satisfiability by enumerating every assignment.
pub fn csp_brute(inst: &CspInstance) -> Result<Option<Vec<u64>>, OracleError> {
    guard("csp", inst.variables, MAX_VARS)?;
    let space = (inst.domain as u128).checked_pow(inst.variables as u32).unwrap_or(u128::MAX);
    if space > 1 << 24 {
        return Err(OracleError::TooLarge { what: "csp", size: space.min(u64::MAX as u128) as u64, limit: 1 << 24 });
    }
    if inst.domain == 0 {
        return Ok(if inst.variables == 0 && inst.constraints.is_empty() { Some(Vec::new()) } else { None });
    }
    let mut assign = vec![0u64; inst.variables];
    loop {
        if inst.satisfied_by(&assign) {
            return Ok(Some(assign));
        }
        // odometer increment, last variable fastest
        let mut k = inst.variables;
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            assign[k] += 1;
            if assign[k] < inst.domain {
                break;
            }
            assign[k] = 0;
        }
    }
}
