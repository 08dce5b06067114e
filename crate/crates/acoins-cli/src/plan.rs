//! The plan file schema: what `solve` prints and `simulate` replays.

use serde::{Deserialize, Serialize};

use acoins::{TossPlan, TossStep};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanStep {
    pub coin: String,
    pub p: f64,
    pub fee: f64,
    pub repeat: bool,
}

/// A solved strategy: ordered tosses, the variant that produced it, and
/// its analytic expected cost. Serialization carries no timestamps, so
/// output is byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub expected_cost: f64,
    pub variant: String,
    pub steps: Vec<PlanStep>,
    pub diagnostics: Vec<String>,
}

impl PlanFile {
    pub fn from_plan(variant: &str, plan: &TossPlan, diagnostics: Vec<String>) -> Self {
        PlanFile {
            expected_cost: plan.expected_cost(),
            variant: variant.to_owned(),
            steps: plan
                .steps()
                .iter()
                .map(|s| PlanStep {
                    coin: s.coin.as_str().to_owned(),
                    p: s.p,
                    fee: s.fee,
                    repeat: s.repeat,
                })
                .collect(),
            diagnostics,
        }
    }

    pub fn to_plan(&self) -> TossPlan {
        TossPlan::new(
            self.steps
                .iter()
                .map(|s| TossStep {
                    coin: s.coin.as_str().into(),
                    p: s.p,
                    fee: s.fee,
                    repeat: s.repeat,
                })
                .collect(),
            self.expected_cost,
        )
    }
}
