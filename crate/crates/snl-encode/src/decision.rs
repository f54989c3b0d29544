//! 2COLOR, UK, exact3DSTCON, NBG, Polar±2SAT and CSP₂.

use std::collections::{BTreeSet, VecDeque};

use snl_ast::{Cnf, CspInstance, DomStructure, Graph, Lit, RelStructure, Sentence, UkInstance, Witness};
use snl_oracle::{bipartite_coloring, csp_brute, twosat_decide};

use crate::{arcs, column, dom, interval, malformed, range, sentence, structure, witness, EncodeError};

type Triple = (Sentence, RelStructure, DomStructure);

fn undirected(g: &Graph, what: &str) -> Result<(), EncodeError> {
    g.check()?;
    if g.directed {
        return Err(malformed(format!("{what} needs an undirected graph")));
    }
    if g.n == 0 {
        return Err(malformed(format!("{what} needs at least one vertex")));
    }
    Ok(())
}

pub const TWO_COLOR: &str = "
(sentence
  (exists (C 1))
  (forall (i num 0 n) (d num 0 1) (i' num 0 n) (d' num 0 1) (j' num 0 n) (e' num 0 1))
  (psi (imp (so C i d) (and (<= 0 d) (<= d 1))))
  (psi (imp (and (rel E i' j') (so C i' d') (so C j' e')) (not (= d' e')))))";

/// Vertices are `0..n`, so the constant `n` is the largest vertex.
pub fn two_color(g: &Graph) -> Result<Triple, EncodeError> {
    undirected(g, "2color")?;
    let last = g.n as u64 - 1;
    let mut rel = structure(&[("V", g.n as u64)], &[("n", last)]);
    rel.add_relation("E", &["V", "V"], arcs(g).into_iter().map(|(u, v)| vec![u, v]));
    Ok((sentence(TWO_COLOR), rel, dom(vec![("C", range(last, vec![interval(0, 1)], false))])))
}

pub fn two_color_witness(g: &Graph) -> Result<Option<Witness>, EncodeError> {
    undirected(g, "2color")?;
    Ok(bipartite_coloring(g).map(|c| witness(vec![("C", column(c.into_iter().map(|b| Some(b as u64))))])))
}

const UK: &str = "
(sentence
  (exists (P 1))
  (forall (i num 0 n) (s num 0 b) (t num 0 b) (z num 0 b))
  (const b)
  (psi (so P 0 0))
  (psi (so P n b))
  (psi (imp (and (<= (suc i) n) (so P i s) (so P (suc i) t))
            (or (and (= s t) (<= t b))
                (and (<= (suc s) t) (<= t b) (imp (and (rel I (suc i) z) (not (= z 0))) (rel ADD t s z)))))))";

/// `I(i,a)`: item `i` (1-based) has value `a`; `ADD(c,a,b)`: `c = a+b` within `[0,b]`.
pub(crate) fn uk_structure(u: &UkInstance) -> RelStructure {
    let n = u.a.len() as u64;
    let mut rel = structure(&[("IDX", n + 1), ("VAL", u.b + 1)], &[("n", n), ("b", u.b)]);
    rel.add_relation("I", &["IDX", "VAL"], u.a.iter().enumerate().map(|(k, &a)| vec![k as u64 + 1, a]));
    let add = (0..=u.b).flat_map(|x| (0..=u.b - x).map(move |y| vec![x + y, x, y]));
    rel.add_relation("ADD", &["VAL", "VAL", "VAL"], add);
    rel
}

fn uk_check(u: &UkInstance) -> Result<(), EncodeError> {
    if u.b == 0 || u.a.iter().any(|&a| a == 0 || a > u.b) {
        return Err(malformed("UK needs b > 0 and 0 < a_i <= b (normalize first)"));
    }
    Ok(())
}

pub fn uk(u: &UkInstance) -> Result<Triple, EncodeError> {
    uk_check(u)?;
    let d = dom(vec![("P", range(u.a.len() as u64, vec![interval(0, u.b)], false))]);
    Ok((sentence(UK), uk_structure(u), d))
}

/// Items chosen to reach exactly `target`, by a reachability table over prefixes.
pub(crate) fn subset_hitting(u: &UkInstance, target: u64) -> Option<Vec<bool>> {
    let b = target as usize;
    let n = u.a.len();
    let mut reach = vec![vec![false; b + 1]; n + 1];
    reach[0][0] = true;
    for k in 0..n {
        let a = u.a[k] as usize;
        for s in 0..=b {
            reach[k + 1][s] = reach[k][s] || (s >= a && reach[k][s - a]);
        }
    }
    if !reach[n][b] {
        return None;
    }
    let mut pick = vec![false; n];
    let mut s = b;
    for k in (0..n).rev() {
        if !reach[k][s] {
            pick[k] = true;
            s -= u.a[k] as usize;
        }
    }
    Some(pick)
}

pub(crate) fn prefix_sums(u: &UkInstance, pick: &[bool]) -> Vec<Option<u64>> {
    let mut acc = 0;
    let mut out = vec![Some(0)];
    for (a, &p) in u.a.iter().zip(pick) {
        if p {
            acc += a;
        }
        out.push(Some(acc));
    }
    out
}

pub fn uk_witness(u: &UkInstance) -> Option<Witness> {
    subset_hitting(u, u.b).map(|pick| witness(vec![("P", column(prefix_sums(u, &pick)))]))
}

const EXACT3: &str = "
(sentence
  (exists (P 1))
  (forall (v obj V) (v1 obj V) (v2 obj V) (v3 obj V)
          (i num 1 n) (u obj V) (x obj V) (x1 obj V) (x2 obj V)
          (j num 0 n))
  (const s t)
  (psi (so P 0 s))
  (psi (so P n t))
  (psi (imp (and (so P 0 s) (so P 1 v) (rel E s v1) (rel E s v2) (rel E s v3)
                 (not (= v1 v2)) (not (= v2 v3)) (not (= v1 v3)))
            (or (= v v1) (= v v2) (= v v3))))
  (psi (imp (and (<= (suc i) n) (so P i u) (so P (suc i) x) (rel E u x1) (rel E u x2) (not (= x1 x2)))
            (or (= x x1) (= x x2))))
  (psi (imp (and (<= (suc j) n) (so P j t)) (so P (suc j) t))))";

/// Arc set with the loop at `t`, after checking the degree regime: `s` has
/// indegree 0 and outdegree 3, every other vertex has outdegree exactly 2.
fn exact3_arcs(g: &Graph, s: usize, t: usize) -> Result<BTreeSet<(usize, usize)>, EncodeError> {
    g.check()?;
    if s >= g.n || t >= g.n || s == t {
        return Err(malformed("exact3dstcon needs distinct s and t inside the graph"));
    }
    let mut e = g.arcs();
    if e.iter().any(|&(_, v)| v == s) {
        return Err(malformed("exact3dstcon assumes s has indegree 0"));
    }
    e.insert((t, t));
    for v in 0..g.n {
        let out = e.iter().filter(|&&(a, _)| a == v).count();
        let want = if v == s { 3 } else { 2 };
        if out != want {
            return Err(malformed(format!("vertex {v} has outdegree {out} (with the loop at t), expected {want}")));
        }
    }
    Ok(e)
}

pub fn exact3(g: &Graph, s: usize, t: usize) -> Result<Triple, EncodeError> {
    let e = exact3_arcs(g, s, t)?;
    let last = g.n as u64 - 1;
    let mut rel = structure(&[("V", g.n as u64)], &[("n", last), ("s", s as u64), ("t", t as u64)]);
    rel.add_relation("E", &["V", "V"], e.into_iter().map(|(u, v)| vec![u as u64, v as u64]));
    Ok((sentence(EXACT3), rel, dom(vec![("P", range(last, vec![interval(0, last)], false))])))
}

/// Shortest path by BFS over the given arcs.
fn bfs_path(n: usize, arcs: &BTreeSet<(usize, usize)>, s: usize, t: usize) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; n];
    prev[s] = s;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &(_, v) in arcs.range((u, 0)..=(u, usize::MAX)) {
            if prev[v] == usize::MAX {
                prev[v] = u;
                q.push_back(v);
            }
        }
    }
    if prev[t] == usize::MAX {
        return None;
    }
    let mut path = vec![t];
    while *path.last().unwrap() != s {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    Some(path)
}

pub fn exact3_witness(g: &Graph, s: usize, t: usize) -> Result<Option<Witness>, EncodeError> {
    exact3_arcs(g, s, t)?;
    let Some(path) = bfs_path(g.n, &g.arcs(), s, t) else { return Ok(None) };
    let cells = (0..g.n).map(|i| Some(path[i.min(path.len() - 1)] as u64));
    Ok(Some(witness(vec![("P", column(cells))])))
}

// The walk counter starts at 0 so that k at clock n is the number of moves made.
const NBG: &str = "
(sentence
  (exists (P 2))
  (forall (u1 obj V) (k1 num 0 n)
          (i2 num 1 n) (u2 obj V) (k2 num 0 n) (v2 obj V) (l2 num 0 n)
          (i3 num 1 n) (u3 obj V) (k3 num 0 n) (v3 obj V)
          (u4 obj V) (k4 num 0 n) (v4 obj V) (l4 num 0 n)
          (u5 obj V) (k5 num 0 n))
  (psi (imp (so P 1 u1 k1) (= k1 0)))
  (psi (imp (and (<= (suc i2) n) (so P i2 u2 k2) (so P (suc i2) v2 l2))
            (or (and (= u2 v2) (= l2 k2)) (and (not (= u2 v2)) (= l2 (suc k2))))))
  (psi (imp (and (<= (suc i3) n) (so P i3 u3 k3) (so P (suc i3) v3 (suc k3))) (rel E u3 v3)))
  (psi (imp (and (so P 1 u4 k4) (so P n v4 l4)) (= u4 v4)))
  (psi (imp (so P n u5 k5) (rel ODD k5))))";

fn nbg_check(g: &Graph) -> Result<(), EncodeError> {
    undirected(g, "nbg")?;
    if g.edges.iter().any(|(u, v)| u == v) {
        return Err(malformed("nbg needs a graph without self-loops"));
    }
    Ok(())
}

/// Clock `n = |V|+1`: positions 1..n hold a closed walk with up to |V| moves.
pub fn nbg(g: &Graph) -> Result<Triple, EncodeError> {
    nbg_check(g)?;
    let n = g.n as u64 + 1;
    let mut rel = structure(&[("V", g.n as u64), ("K", n + 1)], &[("n", n)]);
    rel.add_relation("E", &["V", "V"], arcs(g).into_iter().map(|(u, v)| vec![u, v]));
    rel.add_relation("ODD", &["K"], (0..=n).filter(|k| k % 2 == 1).map(|k| vec![k]));
    let d = dom(vec![("P", range(n, vec![interval(0, g.n as u64 - 1), interval(0, n)], false))]);
    Ok((sentence(NBG), rel, d))
}

/// Shortest odd closed walk, found by BFS over (vertex, parity) states from every
/// start. The shortest one overall is an odd cycle, so it has at most |V| moves.
fn odd_closed_walk(g: &Graph) -> Option<Vec<usize>> {
    let a = g.arcs();
    let mut best: Option<Vec<usize>> = None;
    for r in 0..g.n {
        let mut prev = vec![[usize::MAX; 2]; g.n];
        let mut q = VecDeque::from([(r, 0usize)]);
        prev[r][0] = r;
        while let Some((u, p)) = q.pop_front() {
            for &(_, v) in a.range((u, 0)..=(u, usize::MAX)) {
                if prev[v][1 - p] == usize::MAX {
                    prev[v][1 - p] = u;
                    q.push_back((v, 1 - p));
                }
            }
        }
        if prev[r][1] == usize::MAX {
            continue;
        }
        let mut walk = vec![r];
        let (mut v, mut p) = (r, 1);
        loop {
            let u = prev[v][p];
            walk.push(u);
            v = u;
            p = 1 - p;
            if v == r && p == 0 {
                break;
            }
        }
        walk.reverse();
        if best.as_ref().is_none_or(|b| walk.len() < b.len()) {
            best = Some(walk);
        }
    }
    best
}

pub fn nbg_witness(g: &Graph) -> Result<Option<Witness>, EncodeError> {
    nbg_check(g)?;
    let Some(walk) = odd_closed_walk(g) else { return Ok(None) };
    let n = g.n + 1;
    let moves = walk.len() - 1;
    let mut table = vec![Some(vec![walk[0] as u64, 0])];
    for pos in 1..=n {
        let j = (pos - 1).min(moves);
        table.push(Some(vec![walk[j] as u64, j as u64]));
    }
    Ok(Some(witness(vec![("P", table)])))
}

fn polar_text(positive: bool) -> String {
    let pol = if positive {
        "(or (and (<= i3 n) (<= j3 n)) (and (<= (suc n) i3) (<= (suc n) j3)))"
    } else {
        "(or (and (<= i3 n) (<= (suc n) j3)) (and (<= (suc n) i3) (<= j3 n)))"
    };
    format!(
        "
(sentence
  (exists (T 1))
  (forall (i num 1 m) (j num 1 m) (a num 0 1) (c num 0 1) (i2 num 1 m) (j2 num 1 m) (i3 num 1 m) (j3 num 1 m))
  (const m)
  (psi (imp (and (rel NEG i j) (so T i a) (so T j c)) (not (= a c))))
  (psi (imp (rel C i2 j2) (or (so T i2 1) (so T j2 1))))
  (psi (imp (rel C i3 j3) {pol})))"
    )
}

fn lit_index(l: Lit, nvars: usize) -> u64 {
    (if l.neg { nvars + l.var } else { l.var }) as u64
}

fn polar_check(f: &Cnf) -> Result<(), EncodeError> {
    for (k, c) in f.clauses.iter().enumerate() {
        if c.is_empty() || c.len() > 2 {
            return Err(malformed(format!("clause {k} has {} literals; polar2sat needs 1 or 2", c.len())));
        }
        if c.iter().any(|l| l.var == 0 || l.var > f.nvars) {
            return Err(malformed(format!("clause {k} mentions a variable outside 1..{}", f.nvars)));
        }
    }
    Ok(())
}

/// Literal `x_j` is index `j`, literal `x̄_j` is `n+j`; `T` assigns each a truth value.
pub fn polar(f: &Cnf, positive: bool) -> Result<Triple, EncodeError> {
    polar_check(f)?;
    let n = f.nvars as u64;
    let m = 2 * n;
    let mut rel = structure(&[("L", m + 1)], &[("n", n), ("m", m)]);
    rel.add_relation("NEG", &["L", "L"], (1..=n).map(|j| vec![j, n + j]));
    let mut c = BTreeSet::new();
    for cl in &f.clauses {
        let a = lit_index(cl[0], f.nvars);
        let b = lit_index(*cl.last().unwrap(), f.nvars);
        c.insert(vec![a, b]);
        c.insert(vec![b, a]);
    }
    rel.add_relation("C", &["L", "L"], c);
    Ok((sentence(&polar_text(positive)), rel, dom(vec![("T", range(m, vec![interval(0, 1)], false))])))
}

pub fn polar_witness(f: &Cnf, positive: bool) -> Result<Option<Witness>, EncodeError> {
    polar_check(f)?;
    if f.clauses.iter().any(|c| c.len() == 2 && (c[0].neg == c[1].neg) != positive || c.len() == 1 && !positive) {
        return Ok(None);
    }
    let assign = twosat_decide(f).map_err(|e| malformed(e.to_string()))?;
    Ok(assign.map(|a| {
        let n = f.nvars;
        let t = (0..=2 * n).map(|k| match k {
            0 => Some(0),
            k if k <= n => Some(a[k] as u64),
            k => Some(!a[k - n] as u64),
        });
        witness(vec![("T", column(t))])
    }))
}

const CSP2: &str = "
(sentence
  (exists (P 1))
  (forall (f num 0 c) (i num 1 n) (v num 0 d)
          (f2 num 0 c) (i1 num 1 n) (i2 num 1 n) (v1 num 0 d) (v2 num 0 d))
  (const c d)
  (psi (imp (and (rel C1 f i) (so P i v)) (not (rel S1 f v))))
  (psi (imp (and (rel C2 f2 i1 i2) (so P i1 v1) (so P i2 v2)) (not (rel S2 f2 v1 v2)))))";

/// Variables become clock values `1..n`; `C1`/`C2` give each constraint's scope and
/// `S1`/`S2` its forbidden tuples.
pub fn csp2(x: &CspInstance) -> Result<Triple, EncodeError> {
    x.check()?;
    if x.domain == 0 {
        return Err(malformed("csp2 needs a nonempty value domain"));
    }
    let n = x.variables as u64;
    let d = x.domain - 1;
    let c = (x.constraints.len() as u64).max(1) - 1;
    let mut rel = structure(&[("F", c + 1), ("X", n + 1), ("D", x.domain)], &[("n", n), ("c", c), ("d", d)]);
    let (mut c1, mut c2, mut s1, mut s2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (f, con) in x.constraints.iter().enumerate() {
        let f = f as u64;
        match con.scope[..] {
            [a] => {
                c1.push(vec![f, a as u64 + 1]);
                s1.extend((0..=d).filter(|v| !con.allowed.contains(&vec![*v])).map(|v| vec![f, v]));
            }
            [a, b] => {
                c2.push(vec![f, a as u64 + 1, b as u64 + 1]);
                for v in 0..=d {
                    s2.extend((0..=d).filter(|w| !con.allowed.contains(&vec![v, *w])).map(|w| vec![f, v, w]));
                }
            }
            _ => unreachable!("checked arity"),
        }
    }
    rel.add_relation("C1", &["F", "X"], c1);
    rel.add_relation("C2", &["F", "X", "X"], c2);
    rel.add_relation("S1", &["F", "D"], s1);
    rel.add_relation("S2", &["F", "D", "D"], s2);
    Ok((sentence(CSP2), rel, dom(vec![("P", range(n, vec![interval(0, d)], false))])))
}

pub fn csp2_witness(x: &CspInstance) -> Result<Option<Witness>, EncodeError> {
    x.check()?;
    let sol = csp_brute(x).map_err(|e| malformed(e.to_string()))?;
    Ok(sol.map(|a| witness(vec![("P", column(std::iter::once(Some(0)).chain(a.into_iter().map(Some))))])))
}
