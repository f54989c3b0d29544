//! Measured checks of claims that are recorded rather than enforced: the cut
//! accounting of the triangle construction and the behaviour of the two-edge gadget.

use serde::{Deserialize, Serialize};

use snl_ast::{Cnf, Graph, WeightedGraph};
use snl_oracle::{exact_max2sat, exact_wcut, exact_wcut_elim, OracleError};

use crate::chain::Chain;
use crate::cut::{max2sat_to_wtdcut, weighted_cut, wtdcut_to_maxcut, Gadget};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountingDiagnostic {
    pub occurrences: u64,
    pub max_sat: u64,
    pub max_cut: u64,
    /// Twice the sum of literal occurrences and satisfied clauses.
    pub claimed: u64,
    /// `2·occ + 4·OPT`, what the doubled triangle weights give on consistent cuts.
    pub measured_formula: u64,
    pub claim_holds: bool,
    pub formula_holds: bool,
}

pub fn accounting(f: &Cnf) -> Result<AccountingDiagnostic, OracleError> {
    let r = max2sat_to_wtdcut(f).map_err(|e| OracleError::Precondition(e.to_string()))?;
    let (max_sat, _) = exact_max2sat(f)?;
    let (max_cut, _) = exact_wcut(&r.graph)?;
    let occurrences = r.occurrences();
    let max_sat = max_sat as u64;
    let claimed = 2 * (occurrences + max_sat);
    let measured_formula = 2 * occurrences + 4 * max_sat;
    Ok(AccountingDiagnostic {
        occurrences,
        max_sat,
        max_cut,
        claimed,
        measured_formula,
        claim_holds: claimed == max_cut,
        formula_holds: measured_formula == max_cut,
    })
}

fn unit(g: &Graph) -> WeightedGraph {
    WeightedGraph { n: g.n, edges: g.edges.iter().map(|&(u, v)| (u, v, 1)).collect() }
}

/// Exact maximum cut of an unweighted graph of any size the elimination oracle handles.
pub fn max_cut(g: &Graph) -> Result<(u64, Vec<bool>), OracleError> {
    if g.n <= 16 {
        exact_wcut(&unit(g))
    } else {
        exact_wcut_elim(&unit(g))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetDiagnostic {
    pub gadget: Gadget,
    pub total_weight: u64,
    pub max_wcut: u64,
    pub max_cut_target: u64,
    /// Weighted cut of the restriction of the target optimum.
    pub restricted_value: u64,
    /// `2W + maxwcut`, the corrected-gadget identity.
    pub corrected_formula: u64,
    pub preserved: bool,
}

pub fn gadget(g: &WeightedGraph, gadget: Gadget) -> Result<GadgetDiagnostic, OracleError> {
    let r = wtdcut_to_maxcut(g, gadget).map_err(|e| OracleError::Precondition(e.to_string()))?;
    let (max_wcut, _) = exact_wcut(g)?;
    let (max_cut_target, side) = max_cut(&r.graph)?;
    let restricted_value = weighted_cut(g, &r.restrict(&side));
    Ok(GadgetDiagnostic {
        gadget,
        total_weight: r.total_weight,
        max_wcut,
        max_cut_target,
        restricted_value,
        corrected_formula: 2 * r.total_weight + max_wcut,
        preserved: restricted_value == max_wcut,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub max_sat: u64,
    pub target_vertices: usize,
    pub max_cut: u64,
    pub back_mapped: u64,
    pub optimal: bool,
}

/// Pushes an exact optimal cut of the final graph back to the source formula.
pub fn chain_optimum(f: &Cnf, gadget: Gadget) -> Result<ChainCheck, OracleError> {
    let chain = Chain::build(f, gadget).map_err(|e| OracleError::Precondition(e.to_string()))?;
    let (max_sat, _) = exact_max2sat(f)?;
    let (max_cut, side) = max_cut(chain.target())?;
    let back_mapped = f.satisfied(&chain.back_map(&side)) as u64;
    Ok(ChainCheck { max_sat: max_sat as u64, target_vertices: chain.target().n, max_cut, back_mapped, optimal: back_mapped == max_sat as u64 })
}
