//! Hardness-instance generation: subset-product questions written out as
//! game instances, with exact rational entries so `ℓ = h²` survives the
//! file format.

use serde::Serialize;

use acoins::discrete::{subset_product_to_acoins, Fraction};
use acoins::verify::subset_product_oracle;

use crate::instance::{CoinSpec, EntrySpec, InstanceFile, Mode, Real};
use crate::CliResult;

fn fraction_real(numerator: u128, denominator: u128) -> Real {
    if denominator == 1 {
        Real::Number(numerator as f64)
    } else {
        Real::Ratio(format!("{numerator}/{denominator}"))
    }
}

fn fraction_string(f: Fraction) -> String {
    if f.denominator == 1 {
        format!("{}", f.numerator)
    } else {
        format!("{}/{}", f.numerator, f.denominator)
    }
}

/// Sidecar describing what the generated instance encodes.
#[derive(Debug, Clone, Serialize)]
pub struct SubsetProductMetadata {
    pub m: Vec<u64>,
    #[serde(rename = "N")]
    pub n: u64,
    /// `D = (prod(m)/N)²`, exact.
    pub d: String,
    /// `E = D + 1`, exact.
    pub penalty: String,
    /// `C = D·prod(ℓ)`.
    pub c: f64,
    /// `2√C`: the optimal cost iff the question is solvable.
    pub bound: f64,
    pub bound_exact: String,
    /// From the exact integer oracle, not the float solver.
    pub solvable: bool,
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub instance: InstanceFile,
    pub metadata: SubsetProductMetadata,
}

/// Builds the one-time selection instance encoding "does some subset of
/// `m` multiply to `target`?", plus its metadata sidecar.
pub fn gen_subset_product(m: &[u64], target: u64) -> CliResult<GeneratedInstance> {
    let reduction = subset_product_to_acoins(m, target)?;
    let coins = m
        .iter()
        .enumerate()
        .map(|(i, &modulus)| {
            let modulus = modulus as u128;
            let square = modulus * modulus;
            CoinSpec::Discrete {
                id: format!("A{}", i + 1),
                entries: vec![
                    EntrySpec {
                        p: fraction_real(modulus - 1, modulus),
                        fee: Real::Number(0.0),
                    },
                    EntrySpec {
                        p: fraction_real(square - 1, square),
                        fee: fraction_real(square - 1, square),
                    },
                ],
            }
        })
        .collect();
    let instance = InstanceFile {
        penalty: fraction_real(
            reduction.penalty_exact.numerator,
            reduction.penalty_exact.denominator,
        ),
        mode: Mode { reusable: false, max_tosses: None, order_given: false },
        coins,
    };
    let c = reduction.d_exact.to_f64()
        * reduction.instance.ell().iter().product::<f64>();
    let metadata = SubsetProductMetadata {
        m: m.to_vec(),
        n: target,
        d: fraction_string(reduction.d_exact),
        penalty: fraction_string(reduction.penalty_exact),
        c,
        bound: reduction.bound_exact.to_f64(),
        bound_exact: fraction_string(reduction.bound_exact),
        solvable: subset_product_oracle(m, target),
    };
    Ok(GeneratedInstance { instance, metadata })
}
