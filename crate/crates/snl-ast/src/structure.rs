use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{FoDecl, Sentence, Sort, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("relation `{rel}`: tuple {tuple:?} lies outside its universes")]
    TupleOutside { rel: String, tuple: Vec<u64> },
    #[error("relation `{rel}`: tuple {tuple:?} has the wrong arity")]
    TupleArity { rel: String, tuple: Vec<u64> },
    #[error("unknown universe `{0}`")]
    UnknownUniverse(String),
    #[error("constant `{0}` has no value")]
    MissingConstant(String),
    #[error("range bound `{0}` is not a ground term")]
    NotGround(String),
    #[error("second-order variable `{0}` has no domain entry")]
    MissingSoRange(String),
    #[error("second-order variable `{name}`: {msg}")]
    BadSoRange { name: String, msg: String },
    #[error("witness for `{name}`: {msg}")]
    BadWitness { name: String, msg: String },
}

/// Finite interpretation of relation and constant symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelStructure {
    #[serde(default)]
    pub universes: BTreeMap<String, Vec<u64>>,
    #[serde(default)]
    pub relations: BTreeMap<String, BTreeSet<Vec<u64>>>,
    #[serde(default)]
    pub constants: BTreeMap<String, u64>,
    /// Universe of each argument place, used for validation.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub signatures: BTreeMap<String, Vec<String>>,
}

impl RelStructure {
    /// Builds a structure and validates every tuple against its signature.
    pub fn new(
        universes: BTreeMap<String, Vec<u64>>,
        relations: BTreeMap<String, BTreeSet<Vec<u64>>>,
        constants: BTreeMap<String, u64>,
        signatures: BTreeMap<String, Vec<String>>,
    ) -> Result<Self, StructureError> {
        let mut s = RelStructure { universes, relations, constants, signatures };
        for u in s.universes.values_mut() {
            u.sort_unstable();
            u.dedup();
        }
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), StructureError> {
        for (rel, sig) in &self.signatures {
            let unis =
                sig.iter().map(|u| self.universes.get(u).ok_or_else(|| StructureError::UnknownUniverse(u.clone()))).collect::<Result<Vec<_>, _>>()?;
            for tuple in self.relations.get(rel).into_iter().flatten() {
                if tuple.len() != sig.len() {
                    return Err(StructureError::TupleArity { rel: rel.clone(), tuple: tuple.clone() });
                }
                if tuple.iter().zip(&unis).any(|(v, u)| u.binary_search(v).is_err()) {
                    return Err(StructureError::TupleOutside { rel: rel.clone(), tuple: tuple.clone() });
                }
            }
        }
        Ok(())
    }

    pub fn holds(&self, rel: &str, tuple: &[u64]) -> bool {
        self.relations.get(rel).is_some_and(|r| r.contains(tuple))
    }

    pub fn constant(&self, name: &str) -> Result<u64, StructureError> {
        self.constants.get(name).copied().ok_or_else(|| StructureError::MissingConstant(name.to_string()))
    }

    /// Value of a variable-free, μ-free term.
    pub fn ground(&self, t: &Term) -> Result<u64, StructureError> {
        match t {
            Term::Num(k) => Ok(*k),
            Term::Const(c) => self.constant(c),
            Term::Suc(inner, k) => Ok(self.ground(inner)? + k),
            Term::Pred(inner) => Ok(self.ground(inner)?.saturating_sub(1)),
            other => Err(StructureError::NotGround(crate::print::print_term(other))),
        }
    }

    pub fn add_relation(&mut self, name: &str, sig: &[&str], tuples: impl IntoIterator<Item = Vec<u64>>) {
        self.relations.entry(name.to_string()).or_default().extend(tuples);
        self.signatures.insert(name.to_string(), sig.iter().map(|s| s.to_string()).collect());
    }
}

/// A finite set of naturals, written `[lo,hi]` or `{"values":[..]}` in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueSet {
    Interval([u64; 2]),
    Values { values: Vec<u64> },
}

impl ValueSet {
    pub fn to_vec(&self) -> Vec<u64> {
        match self {
            ValueSet::Interval([lo, hi]) => (*lo..=*hi).collect(),
            ValueSet::Values { values } => {
                let mut v = values.clone();
                v.sort_unstable();
                v.dedup();
                v
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ValueSet::Interval([lo, hi]) => lo > hi,
            ValueSet::Values { values } => values.is_empty(),
        }
    }

    pub fn max(&self) -> Option<u64> {
        self.to_vec().last().copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoRange {
    pub index_max: u64,
    pub ranges: Vec<ValueSet>,
    #[serde(default)]
    pub sentinel: bool,
}

impl SoRange {
    pub fn new(index_max: u64, ranges: Vec<ValueSet>, sentinel: bool) -> Self {
        SoRange { index_max, ranges, sentinel }
    }

    /// All value tuples in product order (first place varies slowest).
    pub fn tuples(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for r in &self.ranges {
            let vals = r.to_vec();
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    vals.iter().map(move |v| {
                        let mut t = prefix.clone();
                        t.push(*v);
                        t
                    })
                })
                .collect();
        }
        out
    }

    pub fn contains(&self, tuple: &[u64]) -> bool {
        tuple.len() == self.ranges.len() && tuple.iter().zip(&self.ranges).all(|(v, r)| r.to_vec().binary_search(v).is_ok())
    }
}

/// Ranges for every variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomStructure {
    #[serde(default)]
    pub so: BTreeMap<String, SoRange>,
    #[serde(default)]
    pub fo: BTreeMap<String, ValueSet>,
}

impl DomStructure {
    pub fn validate(&self, s: &Sentence) -> Result<(), StructureError> {
        for d in &s.so_vars {
            let r = self.so.get(&d.name).ok_or_else(|| StructureError::MissingSoRange(d.name.clone()))?;
            if r.ranges.len() != d.arity {
                return Err(StructureError::BadSoRange {
                    name: d.name.clone(),
                    msg: format!("{} value ranges for {} value places", r.ranges.len(), d.arity),
                });
            }
            if r.ranges.iter().any(ValueSet::is_empty) {
                return Err(StructureError::BadSoRange { name: d.name.clone(), msg: "empty value range".into() });
            }
        }
        Ok(())
    }

    /// Range of a first-order variable: the explicit entry when present, else its declared sort.
    pub fn fo_range(&self, d: &FoDecl, rel: &RelStructure) -> Result<Vec<u64>, StructureError> {
        if let Some(r) = self.fo.get(&d.name) {
            return Ok(r.to_vec());
        }
        match &d.sort {
            Sort::Num { lo, hi } => {
                let (lo, hi) = (rel.ground(lo)?, rel.ground(hi)?);
                Ok((lo..=hi).collect())
            }
            Sort::Obj { universe } => rel.universes.get(universe).cloned().ok_or_else(|| StructureError::UnknownUniverse(universe.clone())),
        }
    }
}

/// Function tables; `None` is the sentinel ⊥.
pub type Table = Vec<Option<Vec<u64>>>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub tables: BTreeMap<String, Table>,
}

impl Witness {
    /// Checks totality and that entries come from the declared ranges.
    pub fn validate(&self, s: &Sentence, d: &DomStructure) -> Result<(), StructureError> {
        for decl in &s.so_vars {
            let bad = |msg: String| StructureError::BadWitness { name: decl.name.clone(), msg };
            let r = d.so.get(&decl.name).ok_or_else(|| StructureError::MissingSoRange(decl.name.clone()))?;
            let t = self.tables.get(&decl.name).ok_or_else(|| bad("missing table".into()))?;
            if t.len() as u64 != r.index_max + 1 {
                return Err(bad(format!("{} entries, expected {}", t.len(), r.index_max + 1)));
            }
            for (i, e) in t.iter().enumerate() {
                match e {
                    None if !r.sentinel => return Err(bad(format!("entry {i} is ⊥ but the range has no sentinel"))),
                    Some(v) if !r.contains(v) => return Err(bad(format!("entry {i} = {v:?} outside the range"))),
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Table of a 1-valued soVar as plain options.
    pub fn column(&self, name: &str) -> Option<Vec<Option<u64>>> {
        self.tables.get(name).map(|t| t.iter().map(|e| e.as_ref().map(|v| v[0])).collect())
    }
}
