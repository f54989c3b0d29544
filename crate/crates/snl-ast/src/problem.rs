//! Problem instances and their text formats.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

fn fmt_err(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Format { line, msg: msg.into() }
}

/// Undirected or directed graph over vertices `0..n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub directed: bool,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        Graph { n, edges, directed: false }
    }

    pub fn digraph(n: usize, edges: Vec<(usize, usize)>) -> Self {
        Graph { n, edges, directed: true }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::new(n, edges)
    }

    pub fn cycle(n: usize) -> Self {
        Graph::new(n, (0..n).map(|u| (u, (u + 1) % n)).collect())
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|u| (u - 1, u)).collect())
    }

    /// Edge set with both orientations for undirected graphs.
    pub fn arcs(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for &(u, v) in &self.edges {
            out.insert((u, v));
            if !self.directed {
                out.insert((v, u));
            }
        }
        out
    }

    pub fn check(&self) -> Result<(), InstanceError> {
        match self.edges.iter().find(|(u, v)| *u >= self.n || *v >= self.n) {
            Some(e) => Err(InstanceError::Invalid(format!("edge {e:?} outside 0..{}", self.n))),
            None => Ok(()),
        }
    }

    /// `n m [digraph]` header, then one `u v` line per edge.
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let mut lines = content_lines(text);
        let (ln, header) = lines.next().ok_or_else(|| fmt_err(1, "missing `n m` header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() < 2 || h.len() > 3 || (h.len() == 3 && h[2] != "digraph") {
            return Err(fmt_err(ln, "header must be `n m` or `n m digraph`"));
        }
        let n = num::<usize>(h[0], ln)?;
        let m = num::<usize>(h[1], ln)?;
        let mut edges = Vec::with_capacity(m);
        for (ln, l) in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 2 {
                return Err(fmt_err(ln, "edge line must be `u v`"));
            }
            edges.push((num(f[0], ln)?, num(f[1], ln)?));
        }
        if edges.len() != m {
            return Err(InstanceError::Invalid(format!("header announces {m} edges, found {}", edges.len())));
        }
        let g = Graph { n, edges, directed: h.len() == 3 };
        g.check()?;
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}{}\n", self.n, self.edges.len(), if self.directed { " digraph" } else { "" });
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, u64)>,
}

impl WeightedGraph {
    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.2).sum()
    }
}

/// A literal over variables numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lit {
    pub var: usize,
    pub neg: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Lit {
        Lit { var, neg: false }
    }

    pub fn neg(var: usize) -> Lit {
        Lit { var, neg: true }
    }

    pub fn negate(self) -> Lit {
        Lit { var: self.var, neg: !self.neg }
    }

    pub fn from_dimacs(x: i64) -> Lit {
        Lit { var: x.unsigned_abs() as usize, neg: x < 0 }
    }

    pub fn to_dimacs(self) -> i64 {
        if self.neg {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    /// Truth under an assignment indexed by variable (slot 0 unused).
    pub fn eval(self, assign: &[bool]) -> bool {
        assign[self.var] != self.neg
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cnf {
    pub nvars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new(nvars: usize, clauses: Vec<Vec<Lit>>) -> Self {
        Cnf { nvars, clauses }
    }

    pub fn from_dimacs_clauses(nvars: usize, clauses: &[&[i64]]) -> Self {
        Cnf { nvars, clauses: clauses.iter().map(|c| c.iter().map(|&x| Lit::from_dimacs(x)).collect()).collect() }
    }

    pub fn width(&self) -> usize {
        self.clauses.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn satisfied(&self, assign: &[bool]) -> usize {
        self.clauses.iter().filter(|c| c.iter().any(|l| l.eval(assign))).count()
    }

    pub fn parse_dimacs(text: &str) -> Result<Self, InstanceError> {
        let mut nvars = None;
        let mut clauses = Vec::new();
        let mut cur = Vec::new();
        for (ln, l) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
            if l.is_empty() || l.starts_with('c') || l.starts_with('%') {
                continue;
            }
            if l.starts_with('p') {
                let f: Vec<&str> = l.split_whitespace().collect();
                if f.len() != 4 || f[1] != "cnf" {
                    return Err(fmt_err(ln, "problem line must be `p cnf VARS CLAUSES`"));
                }
                nvars = Some(num::<usize>(f[2], ln)?);
                continue;
            }
            for tok in l.split_whitespace() {
                let x = num::<i64>(tok, ln)?;
                if x == 0 {
                    clauses.push(std::mem::take(&mut cur));
                } else {
                    cur.push(Lit::from_dimacs(x));
                }
            }
        }
        if !cur.is_empty() {
            clauses.push(cur);
        }
        let nvars = nvars.ok_or_else(|| fmt_err(1, "missing `p cnf` line"))?;
        if let Some(l) = clauses.iter().flatten().find(|l| l.var == 0 || l.var > nvars) {
            return Err(InstanceError::Invalid(format!("literal {} outside 1..{nvars}", l.to_dimacs())));
        }
        Ok(Cnf { nvars, clauses })
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.nvars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&format!("{} ", l.to_dimacs()));
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Unbounded-knapsack-style subset problem: pick items summing to (or up to) `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UkInstance {
    pub b: u64,
    pub a: Vec<u64>,
}

impl UkInstance {
    /// Drops items larger than the budget; rejects a zero budget or zero items.
    pub fn normalized(b: u64, a: Vec<u64>) -> Result<Self, InstanceError> {
        if b == 0 {
            return Err(InstanceError::Invalid("budget b must be positive".into()));
        }
        if a.contains(&0) {
            return Err(InstanceError::Invalid("item values must be positive".into()));
        }
        Ok(UkInstance { b, a: a.into_iter().filter(|&x| x <= b).collect() })
    }

    /// One line `b a1 .. an`.
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let (ln, l) = content_lines(text).next().ok_or_else(|| fmt_err(1, "empty UK instance"))?;
        let vals = l.split_whitespace().map(|t| num::<u64>(t, ln)).collect::<Result<Vec<_>, _>>()?;
        UkInstance::normalized(vals[0], vals[1..].to_vec())
    }

    pub fn to_text(&self) -> String {
        let mut out = self.b.to_string();
        for x in &self.a {
            out.push_str(&format!(" {x}"));
        }
        out.push('\n');
        out
    }
}

/// Constraint with the tuples of allowed values over `domain` values `0..domain`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CspConstraint {
    pub scope: Vec<usize>,
    pub allowed: BTreeSet<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CspInstance {
    pub variables: usize,
    pub domain: u64,
    pub constraints: Vec<CspConstraint>,
}

impl CspInstance {
    pub fn check(&self) -> Result<(), InstanceError> {
        for (k, c) in self.constraints.iter().enumerate() {
            if c.scope.is_empty() || c.scope.len() > 2 {
                return Err(InstanceError::Invalid(format!("constraint {k}: arity must be 1 or 2")));
            }
            if c.scope.iter().any(|&x| x >= self.variables) {
                return Err(InstanceError::Invalid(format!("constraint {k}: scope outside 0..{}", self.variables)));
            }
            if c.allowed.iter().any(|t| t.len() != c.scope.len() || t.iter().any(|&v| v >= self.domain)) {
                return Err(InstanceError::Invalid(format!("constraint {k}: tuple outside the domain")));
            }
        }
        Ok(())
    }

    pub fn satisfied_by(&self, assign: &[u64]) -> bool {
        self.constraints.iter().all(|c| {
            let t: Vec<u64> = c.scope.iter().map(|&x| assign[x]).collect();
            c.allowed.contains(&t)
        })
    }
}

/// Two equal-size families of equal-length bit vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MaxIpInstance {
    pub x1: Vec<Vec<bool>>,
    pub x2: Vec<Vec<bool>>,
}

impl MaxIpInstance {
    pub fn from_strings(x1: &[&str], x2: &[&str]) -> Self {
        let bits = |s: &&str| s.chars().map(|c| c == '1').collect();
        MaxIpInstance { x1: x1.iter().map(bits).collect(), x2: x2.iter().map(bits).collect() }
    }

    pub fn dim(&self) -> usize {
        self.x1.first().or(self.x2.first()).map_or(0, Vec::len)
    }

    pub fn check(&self) -> Result<(), InstanceError> {
        let d = self.dim();
        if self.x1.len() != self.x2.len() {
            return Err(InstanceError::Invalid("X1 and X2 must have the same size".into()));
        }
        if self.x1.iter().chain(&self.x2).any(|x| x.len() != d) {
            return Err(InstanceError::Invalid("all vectors must have the same length".into()));
        }
        Ok(())
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim())).filter(|(_, l)| !l.is_empty())
}

fn num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T, InstanceError> {
    tok.parse().map_err(|_| fmt_err(line, format!("expected a number, found `{tok}`")))
}
