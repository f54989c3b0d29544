//! Encoders: each named problem becomes a sentence, a relational structure, a
//! domain structure and (for maximization problems) an objective. Canonical
//! witnesses are built from the natural solution object.

mod decision;
mod dstncon;
pub mod gen;
mod maxsnl;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use snl_ast::{
    parse_sentence, Cnf, CspInstance, DomStructure, Graph, InstanceError, MaxIpInstance, MaxSpec, RelStructure, Sentence, SoRange, Table, UkInstance,
    ValueSet, Witness,
};

pub use dstncon::{dstncon_counts, relabel_st, DstnconCounts, DSTNCON_PSI1, DSTNCON_PSI4};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("{problem} expects {expected}")]
    WrongInstance { problem: Problem, expected: &'static str },
    #[error("{0} is not a decision problem")]
    NotDecision(Problem),
    #[error("{0} is not a maximization problem")]
    NotMax(Problem),
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

fn malformed(msg: impl Into<String>) -> EncodeError {
    EncodeError::Malformed(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    TwoColor,
    Uk,
    Exact3Dstcon,
    Nbg,
    Dstncon,
    /// `true` for Polar⁺ (clauses x∨y or x̄∨ȳ), `false` for Polar⁻ (mixed clauses).
    Polar2Sat(bool),
    Csp2,
    MaxCut,
    MaxUk,
    MaxIp,
}

impl Problem {
    pub const ALL: [Problem; 11] = [
        Problem::TwoColor,
        Problem::Uk,
        Problem::Exact3Dstcon,
        Problem::Nbg,
        Problem::Dstncon,
        Problem::Polar2Sat(true),
        Problem::Polar2Sat(false),
        Problem::Csp2,
        Problem::MaxCut,
        Problem::MaxUk,
        Problem::MaxIp,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Problem::TwoColor => "2color",
            Problem::Uk => "uk",
            Problem::Exact3Dstcon => "exact3dstcon",
            Problem::Nbg => "nbg",
            Problem::Dstncon => "dstncon",
            Problem::Polar2Sat(true) => "polar2sat+",
            Problem::Polar2Sat(false) => "polar2sat-",
            Problem::Csp2 => "csp2",
            Problem::MaxCut => "maxcut",
            Problem::MaxUk => "maxuk",
            Problem::MaxIp => "maxip",
        }
    }

    pub fn is_max(self) -> bool {
        matches!(self, Problem::MaxCut | Problem::MaxUk | Problem::MaxIp)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Problem {
    type Err = EncodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.to_ascii_lowercase();
        let alias = match s.as_str() {
            "polar+" | "polar2sat" => "polar2sat+",
            "polar-" => "polar2sat-",
            other => other,
        };
        Problem::ALL.into_iter().find(|p| p.id() == alias).ok_or(EncodeError::UnknownProblem(s))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Instance {
    Graph(Graph),
    StGraph { graph: Graph, s: usize, t: usize },
    Uk(UkInstance),
    Cnf(Cnf),
    Csp(CspInstance),
    MaxIp(MaxIpInstance),
}

impl Instance {
    /// Reads the text format the problem expects. `st` supplies source and target
    /// for the reachability problems and defaults to `(0, n-1)`.
    pub fn parse(problem: Problem, text: &str, st: Option<(usize, usize)>) -> Result<Instance, EncodeError> {
        Ok(match problem {
            Problem::TwoColor | Problem::Nbg | Problem::MaxCut => Instance::Graph(Graph::parse(text)?),
            Problem::Exact3Dstcon | Problem::Dstncon => {
                let mut graph = Graph::parse(text)?;
                graph.directed = true;
                let (s, t) = st.unwrap_or((0, graph.n.saturating_sub(1)));
                Instance::StGraph { graph, s, t }
            }
            Problem::Uk | Problem::MaxUk => Instance::Uk(UkInstance::parse(text)?),
            Problem::Polar2Sat(_) => Instance::Cnf(Cnf::parse_dimacs(text)?),
            Problem::Csp2 => Instance::Csp(serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?),
            Problem::MaxIp => Instance::MaxIp(serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub problem: Problem,
    /// First 16 hex digits of SHA-256 over the problem id and the instance JSON.
    pub digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    pub sentence: Sentence,
    pub rel: RelStructure,
    pub dom: DomStructure,
    pub objective: Option<MaxSpec>,
    pub meta: Meta,
}

pub fn digest(problem: Problem, x: &Instance) -> String {
    let mut h = Sha256::new();
    h.update(problem.id().as_bytes());
    h.update(b"\n");
    h.update(serde_json::to_vec(x).expect("instances serialize"));
    hex::encode(h.finalize())[..16].to_string()
}

/// Encodes any problem; maximization problems get their objective.
pub fn encode(problem: Problem, x: &Instance) -> Result<Encoding, EncodeError> {
    if problem.is_max() {
        encode_max(problem, x)
    } else {
        encode_decision(problem, x)
    }
}

pub fn encode_decision(problem: Problem, x: &Instance) -> Result<Encoding, EncodeError> {
    let (sentence, rel, dom) = match (problem, x) {
        (Problem::TwoColor, Instance::Graph(g)) => decision::two_color(g)?,
        (Problem::Nbg, Instance::Graph(g)) => decision::nbg(g)?,
        (Problem::Uk, Instance::Uk(u)) => decision::uk(u)?,
        (Problem::Exact3Dstcon, Instance::StGraph { graph, s, t }) => decision::exact3(graph, *s, *t)?,
        (Problem::Dstncon, Instance::StGraph { graph, s, t }) => dstncon::encode(graph, *s, *t)?,
        (Problem::Polar2Sat(sign), Instance::Cnf(f)) => decision::polar(f, sign)?,
        (Problem::Csp2, Instance::Csp(c)) => decision::csp2(c)?,
        (p, _) if p.is_max() => return Err(EncodeError::NotDecision(p)),
        (p, _) => return Err(EncodeError::WrongInstance { problem: p, expected: expected(p) }),
    };
    Ok(Encoding { sentence, rel, dom, objective: None, meta: Meta { problem, digest: digest(problem, x) } })
}

pub fn encode_max(problem: Problem, x: &Instance) -> Result<Encoding, EncodeError> {
    let (sentence, rel, dom, spec) = match (problem, x) {
        (Problem::MaxCut, Instance::Graph(g)) => maxsnl::max_cut(g)?,
        (Problem::MaxUk, Instance::Uk(u)) => maxsnl::max_uk(u)?,
        (Problem::MaxIp, Instance::MaxIp(m)) => maxsnl::max_ip(m)?,
        (p, _) if !p.is_max() => return Err(EncodeError::NotMax(p)),
        (p, _) => return Err(EncodeError::WrongInstance { problem: p, expected: expected(p) }),
    };
    Ok(Encoding { sentence, rel, dom, objective: Some(spec), meta: Meta { problem, digest: digest(problem, x) } })
}

fn expected(p: Problem) -> &'static str {
    match p {
        Problem::TwoColor | Problem::Nbg | Problem::MaxCut => "an undirected graph",
        Problem::Exact3Dstcon | Problem::Dstncon => "a directed graph with source and target",
        Problem::Uk | Problem::MaxUk => "a UK instance",
        Problem::Polar2Sat(_) => "a CNF formula",
        Problem::Csp2 => "a CSP instance",
        Problem::MaxIp => "a MAX-IP instance",
    }
}

/// The natural solution object as a witness. For decision problems `None` means a
/// NO-instance; DSTNCON always gets its reachability tables, and maximization
/// problems get an optimal solution.
pub fn canonical_witness(problem: Problem, x: &Instance) -> Result<Option<Witness>, EncodeError> {
    match (problem, x) {
        (Problem::TwoColor, Instance::Graph(g)) => decision::two_color_witness(g),
        (Problem::Nbg, Instance::Graph(g)) => decision::nbg_witness(g),
        (Problem::Uk, Instance::Uk(u)) => Ok(decision::uk_witness(u)),
        (Problem::Exact3Dstcon, Instance::StGraph { graph, s, t }) => decision::exact3_witness(graph, *s, *t),
        (Problem::Dstncon, Instance::StGraph { graph, s, t }) => dstncon::witness(graph, *s, *t).map(Some),
        (Problem::Polar2Sat(sign), Instance::Cnf(f)) => decision::polar_witness(f, sign),
        (Problem::Csp2, Instance::Csp(c)) => decision::csp2_witness(c),
        (Problem::MaxCut, Instance::Graph(g)) => maxsnl::max_cut_witness(g).map(Some),
        (Problem::MaxUk, Instance::Uk(u)) => Ok(Some(maxsnl::max_uk_witness(u))),
        (Problem::MaxIp, Instance::MaxIp(m)) => maxsnl::max_ip_witness(m).map(Some),
        (p, _) => Err(EncodeError::WrongInstance { problem: p, expected: expected(p) }),
    }
}

// ---- shared construction helpers ----

fn sentence(text: &str) -> Sentence {
    parse_sentence(text).unwrap_or_else(|e| panic!("built-in sentence does not parse: {e}\n{text}"))
}

fn interval(lo: u64, hi: u64) -> ValueSet {
    ValueSet::Interval([lo, hi])
}

fn range(index_max: u64, ranges: Vec<ValueSet>, sentinel: bool) -> SoRange {
    SoRange::new(index_max, ranges, sentinel)
}

fn dom(entries: Vec<(&str, SoRange)>) -> DomStructure {
    let mut d = DomStructure::default();
    for (name, r) in entries {
        d.so.insert(name.to_string(), r);
    }
    d
}

fn structure(universes: &[(&str, u64)], constants: &[(&str, u64)]) -> RelStructure {
    let mut rel = RelStructure::default();
    for &(name, size) in universes {
        rel.universes.insert(name.to_string(), (0..size).collect());
    }
    for &(name, v) in constants {
        rel.constants.insert(name.to_string(), v);
    }
    rel
}

fn column(values: impl IntoIterator<Item = Option<u64>>) -> Table {
    values.into_iter().map(|v| v.map(|v| vec![v])).collect()
}

fn witness(tables: Vec<(&str, Table)>) -> Witness {
    Witness { tables: tables.into_iter().map(|(n, t)| (n.to_string(), t)).collect() }
}

fn arcs(g: &Graph) -> Vec<(u64, u64)> {
    g.arcs().into_iter().map(|(u, v)| (u as u64, v as u64)).collect()
}
