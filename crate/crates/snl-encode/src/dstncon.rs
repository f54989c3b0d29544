//! DSTNCON as a μSNL sentence over P (clamped walks), N (reachable counts) and C
//! (reachable counts that exclude in-neighbours of u).
//!
//! Vertices are relabelled so that s = 0 and t = n. Pairs (e,i) are packed as
//! w = e(n+1)+i and triples (u,e,i) as w = u(n+1)²+i(n+1)+e, so w+1 advances i for
//! P and e for N and C.

use std::collections::{BTreeSet, VecDeque};

use snl_ast::{DomStructure, Graph, RelStructure, Sentence, Witness};

use crate::{column, dom, interval, malformed, range, sentence, structure, witness as tables, EncodeError};

// Conjuncts, in order: Φ₁ (two parts), Φ₂, Φ₃, Φ₄, Ψ₁, ξ₁ (two parts), ξ₂, ξ₃,
// η₁ (two parts), η₂, η₃, η₄, η₅, Ψ₄.
const DSTNCON: &str = "
(sentence
  (exists (P 1) (N 1) (C 1))
  (forall
    (a0 num 0 n)
    (a1w num 0 m1) (a1e num 0 n) (a1u num 0 n)
    (a2w num 0 m1) (a2i num 0 n)
    (a3w num 0 m1) (a3e num 0 n) (a3i num 0 n) (a3u num 0 n) (a3v num 0 n)
    (a4w num 0 m1) (a4e num 0 n) (a4i num 0 n) (a4u num 0 n)
    (a5w num 0 m1)
    (b1w num 0 m2) (b1u num 0 n) (b1i num 0 n)
    (b2w num 0 m2) (b2u num 0 n) (b2e num 0 n)
    (b3w num 0 m2) (b3v num 0 m1) (b3u num 0 n) (b3e num 0 n) (b3i num 0 n)
    (b4w num 0 m2) (b4v num 0 m1) (b4u num 0 n) (b4e num 0 n) (b4i num 0 n)
    (c1w num 0 m2) (c1u num 0 n) (c1i num 0 n)
    (c2w num 0 m2) (c2u num 0 n) (c2i num 0 n)
    (c3w num 0 m2) (c3u num 0 n) (c3e num 0 n) (c3i num 0 n) (c3h num 0 h)
    (c4w num 0 m2) (c4v num 0 m1) (c4u num 0 n) (c4e num 0 n) (c4i num 0 n)
    (c5w num 0 m2) (c5u num 0 n) (c5e num 0 n) (c5i num 0 n)
    (c6w num 0 m2) (c6v num 0 m1) (c6u num 0 n) (c6e num 0 n) (c6i num 0 n)
    (d1w num 0 m1) (d1v num 0 m2) (d1u num 0 n) (d1i num 0 n))
  (const m1 m2 h)
  (psi (not (rel E a0 a0)))
  (psi (imp (and (rel B1 a1w a1e 0) (so P a1w a1u)) (and (= a1e 0) (= a1u 0))))
  (psi (imp (rel ENC1 a2w 0 a2i) (and (rel B1 a2w 0 a2i) (so P a2w 0))))
  (psi (imp (and (rel B1 a3w a3e a3i) (so P a3w a3u) (rel B1 (suc a3w) a3e (suc a3i)) (so P (suc a3w) a3v)
                 (not (= a3u a3e)) (not (= a3u a3v)))
            (rel E a3u a3v)))
  (psi (imp (and (rel B1 a4w a4e a4i) (so P a4w a4e) (rel B1 (suc a4w) a4e (suc a4i)) (so P (suc a4w) a4u))
            (= a4u a4e)))
  (psi (imp (rel ENC1 a5w n n) (not (and (rel B1 a5w n n) (so P a5w n)))))
  (psi (imp (rel ENC2 b1w b1u 0 b1i) (and (rel B2 b1w b1u 0 b1i) (so N b1w 1))))
  (psi (imp (rel ENC2 b2w b2u b2e 0) (and (rel B2 b2w b2u b2e 0) (so N b2w 1))))
  (psi (imp (and (rel B2 b3w b3u b3e b3i) (rel B1 b3v (suc b3e) b3i) (so P b3v (suc b3e)))
            (and (rel B2 (suc b3w) b3u (suc b3e) b3i) (so N (suc b3w) (suc (mu z (so N b3w z)))))))
  (psi (imp (and (rel B2 b4w b4u b4e b4i) (rel ENC1 b4v (suc b4e) b4i)
                 (not (and (rel B1 b4v (suc b4e) b4i) (so P b4v (suc b4e)))))
            (and (rel B2 (suc b4w) b4u (suc b4e) b4i) (so N (suc b4w) (mu z (so N b4w z))))))
  (psi (imp (and (rel ENC2 c1w c1u 0 c1i) (or (= c1u 0) (rel E 0 c1u)))
            (and (rel B2 c1w c1u 0 c1i) (so C c1w 0))))
  (psi (imp (and (rel ENC2 c2w c2u 0 c2i) (not (= c2u 0)) (not (rel E 0 c2u)))
            (and (rel B2 c2w c2u 0 c2i) (so C c2w 1))))
  (psi (imp (and (rel B2 c3w c3u c3e c3i) (so C c3w c3h) (= c3u (suc c3e)))
            (and (rel B2 (suc c3w) c3u (suc c3e) c3i) (so C (suc c3w) c3h))))
  (psi (imp (and (rel B2 c4w c4u c4e c4i) (rel ENC1 c4v (suc c4e) c4i)
                 (not (and (rel B1 c4v (suc c4e) c4i) (so P c4v (suc c4e)))) (not (= c4u (suc c4e))))
            (and (rel B2 (suc c4w) c4u (suc c4e) c4i) (so C (suc c4w) (mu z (so C c4w z))))))
  (psi (imp (and (rel B2 c5w c5u c5e c5i) (rel E (suc c5e) c5u))
            (and (rel B2 (suc c5w) c5u (suc c5e) c5i) (so C (suc c5w) (mu z (so C c5w z))))))
  (psi (imp (and (rel B2 c6w c6u c6e c6i) (rel B1 c6v (suc c6e) c6i) (so P c6v (suc c6e))
                 (not (= c6u (suc c6e))) (not (rel E (suc c6e) c6u)))
            (and (rel B2 (suc c6w) c6u (suc c6e) c6i) (so C (suc c6w) (suc (mu z (so C c6w z)))))))
  (psi (imp (and (rel B1 d1w d1u (suc d1i)) (rel B2 d1v d1u n d1i))
            (or (and (not (so P d1w d1u)) (so C d1v (mu z (so N d1v z))))
                (and (so P d1w d1u) (not (so C d1v (mu z (so N d1v z)))))))))";

/// Positions of Ψ₁ and Ψ₄ among the conjuncts; the rest only tie N and C to P.
pub const DSTNCON_PSI1: usize = 5;
pub const DSTNCON_PSI4: usize = 16;

/// Permutation of `0..n` that sends `s` to 0 and `t` to the last vertex.
pub fn relabel_st(n: usize, s: usize, t: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    order.insert(0, s);
    order.push(t);
    let mut map = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        map[old] = new;
    }
    map
}

/// Relabelled arc set and the top vertex `n`.
fn prepare(g: &Graph, s: usize, t: usize) -> Result<(usize, BTreeSet<(usize, usize)>), EncodeError> {
    g.check()?;
    if s >= g.n || t >= g.n || s == t {
        return Err(malformed("dstncon needs distinct s and t inside the graph"));
    }
    if g.edges.iter().any(|(u, v)| u == v) {
        return Err(malformed("dstncon needs a graph without self-loops"));
    }
    let map = relabel_st(g.n, s, t);
    Ok((g.n - 1, g.arcs().into_iter().map(|(u, v)| (map[u], map[v])).collect()))
}

pub fn encode(g: &Graph, s: usize, t: usize) -> Result<(Sentence, RelStructure, DomStructure), EncodeError> {
    let (n, e) = prepare(g, s, t)?;
    let n = n as u64;
    let k = n + 1;
    let (m1, m2) = (k * k - 1, k * k * k - 1);
    let mut rel = structure(&[("V", k), ("W1", m1 + 1), ("W2", m2 + 1)], &[("n", n), ("m1", m1), ("m2", m2), ("h", k)]);
    rel.add_relation("E", &["V", "V"], e.into_iter().map(|(u, v)| vec![u as u64, v as u64]));
    let enc1: Vec<Vec<u64>> = (0..k).flat_map(|e| (0..k).map(move |i| vec![e * k + i, e, i])).collect();
    let enc2: Vec<Vec<u64>> = (0..k).flat_map(|u| (0..k).flat_map(move |e| (0..k).map(move |i| vec![u * k * k + i * k + e, u, e, i]))).collect();
    // within these ranges the bounded forms B₁/B₂ hold exactly where Enc₁/Enc₂ do
    rel.add_relation("ENC1", &["W1", "V", "V"], enc1.clone());
    rel.add_relation("B1", &["W1", "V", "V"], enc1);
    rel.add_relation("ENC2", &["W2", "V", "V", "V"], enc2.clone());
    rel.add_relation("B2", &["W2", "V", "V", "V"], enc2);
    let d = dom(vec![
        ("P", range(m1, vec![interval(0, n)], true)),
        ("N", range(m2, vec![interval(0, k)], false)),
        ("C", range(m2, vec![interval(0, k)], false)),
    ]);
    Ok((sentence(DSTNCON), rel, d))
}

/// Reachability tables of the relabelled graph, indexed like the witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DstnconCounts {
    /// Top vertex; vertices are `0..=n` with s = 0 and t = n.
    pub n: usize,
    /// BFS distance from 0.
    pub dist: Vec<Option<usize>>,
    /// `n_count[e][i]` = |{v ≤ e : dist(v) ≤ i}|.
    pub n_count: Vec<Vec<u64>>,
    /// `c_count[u][e][i]` = |{v ≤ e, v ≠ u : dist(v) ≤ i, no arc v→u}|.
    pub c_count: Vec<Vec<Vec<u64>>>,
}

impl DstnconCounts {
    pub fn enc1(&self, e: usize, i: usize) -> usize {
        e * (self.n + 1) + i
    }

    pub fn enc2(&self, u: usize, e: usize, i: usize) -> usize {
        let k = self.n + 1;
        u * k * k + i * k + e
    }
}

/// Counts by direct enumeration over BFS distances.
pub fn dstncon_counts(g: &Graph, s: usize, t: usize) -> Result<DstnconCounts, EncodeError> {
    let (n, e) = prepare(g, s, t)?;
    let mut dist = vec![None; n + 1];
    dist[0] = Some(0);
    let mut q = VecDeque::from([0usize]);
    while let Some(u) = q.pop_front() {
        for &(_, v) in e.range((u, 0)..=(u, usize::MAX)) {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                q.push_back(v);
            }
        }
    }
    let within = |v: usize, i: usize| dist[v].is_some_and(|d| d <= i);
    let n_count = (0..=n).map(|e| (0..=n).map(|i| (0..=e).filter(|&v| within(v, i)).count() as u64).collect()).collect();
    let c_count = (0..=n)
        .map(|u| {
            (0..=n).map(|e2| (0..=n).map(|i| (0..=e2).filter(|&v| v != u && within(v, i) && !e.contains(&(v, u))).count() as u64).collect()).collect()
        })
        .collect();
    Ok(DstnconCounts { n, dist, n_count, c_count })
}

/// P(e,i) is the position after i steps of a shortest walk from s toward e that
/// stops once it reaches e; ⊥ when e is unreachable, and for i = 0 unless e = s.
pub fn witness(g: &Graph, s: usize, t: usize) -> Result<Witness, EncodeError> {
    let (n, e) = prepare(g, s, t)?;
    let counts = dstncon_counts(g, s, t)?;
    let k = n + 1;
    // BFS tree parents give every shortest path from 0
    let mut parent = vec![usize::MAX; k];
    parent[0] = 0;
    let mut q = VecDeque::from([0usize]);
    while let Some(u) = q.pop_front() {
        for &(_, v) in e.range((u, 0)..=(u, usize::MAX)) {
            if parent[v] == usize::MAX {
                parent[v] = u;
                q.push_back(v);
            }
        }
    }
    let mut p = vec![None; k * k];
    for target in 0..k {
        let Some(d) = counts.dist[target] else { continue };
        let mut path = vec![target];
        while *path.last().unwrap() != 0 {
            path.push(parent[*path.last().unwrap()]);
        }
        path.reverse();
        for i in 0..k {
            if i == 0 && target != 0 {
                continue;
            }
            p[counts.enc1(target, i)] = Some(path[i.min(d)] as u64);
        }
    }
    let mut nt = vec![None; k * k * k];
    let mut ct = vec![None; k * k * k];
    for u in 0..k {
        for e2 in 0..k {
            for i in 0..k {
                let w = counts.enc2(u, e2, i);
                nt[w] = Some(counts.n_count[e2][i]);
                ct[w] = Some(counts.c_count[u][e2][i]);
            }
        }
    }
    Ok(tables(vec![("P", column(p)), ("N", column(nt)), ("C", column(ct))]))
}
