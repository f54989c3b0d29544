//! MAX-2SAT → MAX-WTDCUT by literal triangles around a special vertex, and
//! MAX-WTDCUT → MAX-CUT by replacing weighted edges with unweighted paths.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use snl_ast::{Cnf, Graph, Lit, WeightedGraph};

use crate::{at_least_half, check_clauses, ApReductionTrace, ReduceError};

/// Weighted graph from a 2CNF. Vertex 0 is the special vertex `w`; variable `j` has
/// vertex `2j-1` and its negation `2j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutReduction {
    pub graph: WeightedGraph,
    pub nvars: usize,
    /// Occurrences of `x_j` and of `x̄_j`, indexed by `j` (slot 0 unused). A unit
    /// clause counts twice since it is read as `z ∨ z`.
    pub pos_occ: Vec<u64>,
    pub neg_occ: Vec<u64>,
}

pub const W: usize = 0;

pub fn lit_vertex(l: Lit) -> usize {
    2 * l.var - usize::from(!l.neg)
}

impl CutReduction {
    pub fn occurrences(&self) -> u64 {
        self.pos_occ.iter().chain(&self.neg_occ).sum()
    }

    /// Literals on the far side from `w` are true. When `x` and `x̄` share a side the
    /// value follows the literal that is not beside `w`: both beside `w` gives false,
    /// both away from `w` gives the sign with more occurrences (true on a tie). The
    /// result is then kept only if it beats the better uniform assignment.
    pub fn back_map(&self, source: &Cnf, side: &[bool]) -> Vec<bool> {
        let away = |v: usize| side[v] != side[W];
        let mut assign = vec![false; self.nvars + 1];
        for j in 1..=self.nvars {
            let (x, nx) = (away(2 * j - 1), away(2 * j));
            assign[j] = match (x, nx) {
                (true, false) => true,
                (false, true) | (false, false) => false,
                (true, true) => self.pos_occ[j] >= self.neg_occ[j],
            };
        }
        at_least_half(source, assign)
    }

    /// Every cut weighs at most `2·occ + 4·sat(g(s))` and the optimum is exactly
    /// `2·occ + 4·OPT`; with `occ <= 2m` and `sat >= m/2` this gives `c2 = 3`.
    pub fn trace(&self, source: &Cnf) -> ApReductionTrace {
        ApReductionTrace {
            step: "max2sat-to-wtdcut".into(),
            source_size: source.clauses.len(),
            target_size: self.graph.n,
            back_map: "literals away from w are true; ties by side of w, then occurrence majority".into(),
            c1: 1.0,
            c2: Some(3.0),
        }
    }
}

/// Builds the triangle graph. Triangle edges collect weight 2 per clause, which is
/// `2k'` after merging repeated pairs; the edge `x x̄` weighs twice the occurrences of
/// the variable and is omitted for variables that never occur.
pub fn max2sat_to_wtdcut(f: &Cnf) -> Result<CutReduction, ReduceError> {
    check_clauses(f, 2)?;
    let mut weight: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut add = |a: usize, b: usize, w: u64| {
        if a != b {
            *weight.entry((a.min(b), a.max(b))).or_default() += w;
        }
    };
    let mut pos_occ = vec![0u64; f.nvars + 1];
    let mut neg_occ = vec![0u64; f.nvars + 1];
    for c in &f.clauses {
        let (a, b) = match c[..] {
            [z] => (z, z),
            [a, b] => (a, b),
            _ => unreachable!("widths checked"),
        };
        for l in [a, b] {
            if l.neg {
                neg_occ[l.var] += 1;
            } else {
                pos_occ[l.var] += 1;
            }
        }
        let (u, v) = (lit_vertex(a), lit_vertex(b));
        add(u, v, 2);
        add(u, W, 2);
        add(v, W, 2);
    }
    for j in 1..=f.nvars {
        let k = pos_occ[j] + neg_occ[j];
        if k > 0 {
            add(2 * j - 1, 2 * j, 2 * k);
        }
    }
    let edges = weight.into_iter().map(|((u, v), w)| (u, v, w)).collect();
    Ok(CutReduction { graph: WeightedGraph { n: 2 * f.nvars + 1, edges }, nvars: f.nvars, pos_occ, neg_occ })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gadget {
    /// Weight `2k` becomes `k` two-edge paths through fresh midpoints.
    TwoEdge,
    /// Each unit of weight becomes a three-edge path through two fresh vertices.
    #[default]
    Corrected,
}

impl fmt::Display for Gadget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gadget::TwoEdge => "two-edge",
            Gadget::Corrected => "corrected",
        })
    }
}

impl FromStr for Gadget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two-edge" => Ok(Gadget::TwoEdge),
            "corrected" => Ok(Gadget::Corrected),
            _ => Err(format!("unknown gadget `{s}` (two-edge or corrected)")),
        }
    }
}

/// Unweighted graph whose first `original` vertices are those of the weighted graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetReduction {
    pub graph: Graph,
    pub original: usize,
    pub gadget: Gadget,
    pub total_weight: u64,
}

impl GadgetReduction {
    pub fn restrict(&self, side: &[bool]) -> Vec<bool> {
        side[..self.original].to_vec()
    }

    /// Restriction, or a greedy cut of at least half the weight when that is heavier.
    pub fn back_map(&self, source: &WeightedGraph, side: &[bool]) -> Vec<bool> {
        let r = self.restrict(side);
        let greedy = half_cut(source);
        if weighted_cut(source, &greedy) > weighted_cut(source, &r) {
            greedy
        } else {
            r
        }
    }

    /// Corrected gadget: `OPT(f(x)) = 2W + OPT(x)` and the back-map keeps at least `W/2`,
    /// so `c2 = 1 + 2W/(W/2) = 5`. The two-edge gadget has no established constant.
    pub fn trace(&self, source: &WeightedGraph) -> ApReductionTrace {
        let (c2, back_map) = match self.gadget {
            Gadget::Corrected => (Some(5.0), "restrict to original vertices; greedy half cut if heavier"),
            Gadget::TwoEdge => (None, "restrict to original vertices"),
        };
        ApReductionTrace {
            step: format!("wtdcut-to-maxcut ({})", self.gadget),
            source_size: source.n,
            target_size: self.graph.n,
            back_map: back_map.into(),
            c1: 1.0,
            c2,
        }
    }
}

pub fn weighted_cut(g: &WeightedGraph, side: &[bool]) -> u64 {
    g.edges.iter().filter(|(u, v, _)| side[*u] != side[*v]).map(|e| e.2).sum()
}

/// Places vertices in order on the side cutting more weight to those already placed.
fn half_cut(g: &WeightedGraph) -> Vec<bool> {
    let mut side = vec![false; g.n];
    for v in 0..g.n {
        let mut toward = [0u64; 2];
        for &(a, b, w) in &g.edges {
            let other = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if other < v {
                toward[usize::from(side[other])] += w;
            }
        }
        // joining side s cuts the weight toward the other side
        side[v] = toward[0] > toward[1];
    }
    side
}

pub fn wtdcut_to_maxcut(g: &WeightedGraph, gadget: Gadget) -> Result<GadgetReduction, ReduceError> {
    for &(u, v, w) in &g.edges {
        let bad = |why| ReduceError::BadEdge { u, v, why };
        if u >= g.n || v >= g.n {
            return Err(bad("endpoint out of range"));
        }
        if u == v {
            return Err(bad("self-loop"));
        }
        if w == 0 {
            return Err(bad("zero weight"));
        }
        if gadget == Gadget::TwoEdge && w % 2 == 1 {
            return Err(ReduceError::OddWeight { u, v, weight: w });
        }
    }
    let mut n = g.n;
    let mut edges = Vec::new();
    for &(u, v, w) in &g.edges {
        match gadget {
            Gadget::TwoEdge => {
                for _ in 0..w / 2 {
                    edges.extend([(u, n), (n, v)]);
                    n += 1;
                }
            }
            Gadget::Corrected => {
                for _ in 0..w {
                    edges.extend([(u, n), (n, n + 1), (n + 1, v)]);
                    n += 2;
                }
            }
        }
    }
    Ok(GadgetReduction { graph: Graph::new(n, edges), original: g.n, gadget, total_weight: g.total_weight() })
}
