//! The composed chain MAX-3SAT → MAX-2SAT → MAX-WTDCUT → MAX-CUT.

use serde::{Deserialize, Serialize};

use snl_ast::{Cnf, Graph};

use crate::cut::{max2sat_to_wtdcut, wtdcut_to_maxcut, CutReduction, Gadget, GadgetReduction};
use crate::sat::{max3sat_to_max2sat, Williams};
use crate::{ApReductionTrace, ReduceError};

#[derive(Clone, Debug)]
pub struct Chain {
    pub source: Cnf,
    pub williams: Williams,
    pub cut: CutReduction,
    pub gadget: GadgetReduction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub steps: Vec<ApReductionTrace>,
    /// Product of the step constants, when all are known.
    pub c2: Option<f64>,
}

impl Chain {
    pub fn build(f: &Cnf, gadget: Gadget) -> Result<Chain, ReduceError> {
        let williams = max3sat_to_max2sat(f)?;
        let cut = max2sat_to_wtdcut(&williams.cnf)?;
        let g = wtdcut_to_maxcut(&cut.graph, gadget)?;
        Ok(Chain { source: f.clone(), williams, cut, gadget: g })
    }

    pub fn target(&self) -> &Graph {
        &self.gadget.graph
    }

    /// Assignment of the source formula read back from a cut of the final graph.
    pub fn back_map(&self, side: &[bool]) -> Vec<bool> {
        let weighted = self.gadget.back_map(&self.cut.graph, side);
        let two = self.cut.back_map(&self.williams.cnf, &weighted);
        self.williams.back_map(&self.source, &two)
    }

    pub fn trace(&self) -> ChainTrace {
        let steps = vec![self.williams.trace(&self.source), self.cut.trace(&self.williams.cnf), self.gadget.trace(&self.cut.graph)];
        let c2 = steps.iter().map(|s| s.c2).product::<Option<f64>>();
        ChainTrace { steps, c2 }
    }
}
