//! Data model for SNL sentences: terms, formulas, the `exists^f .. forall ..` prefix,
//! relational and domain structures, and witness tables. Also the S-expression DSL.

pub mod parse;
pub mod print;
pub mod problem;
pub mod structure;
pub mod syntax;

pub use parse::{parse_sentence, ParseError};
pub use print::{print_formula, print_sentence, print_term};
pub use problem::{Cnf, CspConstraint, CspInstance, Graph, InstanceError, Lit, MaxIpInstance, UkInstance, WeightedGraph};
pub use structure::{DomStructure, RelStructure, SoRange, StructureError, Table, ValueSet, Witness};
pub use syntax::{FoDecl, Formula, MaxSpec, Sentence, SoDecl, Sort, Term};

/// Reads a JSON file into any of the structure types.
pub fn read_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("structures always serialize")
}
