//! The instance file schema and its validation into solver types.

use std::fmt;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use acoins::{CACoin, CoinId, CostFamily, DiscreteCoin, Penalty, SimpleCoin};

use crate::{CliError, CliResult};

/// Grid resolution used when checking adjustable coins at load time.
pub const REGULARITY_GRID: usize = 1024;

/// Reusable games refuse toss budgets beyond this (the value trace is
/// materialised level by level).
pub const MAX_REUSABLE_BUDGET: u64 = 1_000_000;

/// A real number written either as a decimal literal or as an exact
/// `"p/q"` string. The written form survives round-trips.
#[derive(Debug, Clone, PartialEq)]
pub enum Real {
    Number(f64),
    Ratio(String),
}

impl Real {
    pub fn to_f64(&self) -> CliResult<f64> {
        match self {
            Real::Number(v) => Ok(*v),
            Real::Ratio(text) => {
                let (num, den) = text
                    .split_once('/')
                    .ok_or_else(|| CliError::Input(format!("`{text}` is not a p/q rational")))?;
                let num: u128 = num
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Input(format!("bad rational numerator in `{text}`")))?;
                let den: u128 = den
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Input(format!("bad rational denominator in `{text}`")))?;
                if den == 0 {
                    return Err(CliError::Input(format!("zero denominator in `{text}`")));
                }
                Ok(num as f64 / den as f64)
            }
        }
    }
}

impl From<f64> for Real {
    fn from(v: f64) -> Self {
        Real::Number(v)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            // Whole numbers print without a trailing `.0`.
            Real::Number(v) if v.fract() == 0.0 && v.abs() < 9e15 && v.is_sign_positive() => {
                serializer.serialize_u64(*v as u64)
            }
            Real::Number(v) => serializer.serialize_f64(*v),
            Real::Ratio(text) => serializer.serialize_str(text),
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RealVisitor;
        impl Visitor<'_> for RealVisitor {
            type Value = Real;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a \"p/q\" string")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real::Number(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real::Number(v as f64))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real::Number(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                Ok(Real::Ratio(v.to_owned()))
            }
        }
        deserializer.deserialize_any(RealVisitor)
    }
}

/// Which game variant an instance asks for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub reusable: bool,
    #[serde(default)]
    pub max_tosses: Option<u64>,
    #[serde(default)]
    pub order_given: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub p: Real,
    pub fee: Real,
}

/// The cost-curve family of an adjustable coin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FamilySpec {
    /// `a · P^q`.
    Power { a: f64, q: f64 },
    /// Coefficients, constant term first, up to degree 4.
    Polynomial { coeffs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CoinSpec {
    Simple {
        id: String,
        p: Real,
        fee: Real,
    },
    Discrete {
        id: String,
        entries: Vec<EntrySpec>,
    },
    Ca {
        id: String,
        p_min: f64,
        p_max: f64,
        #[serde(flatten)]
        family: FamilySpec,
    },
}

impl CoinSpec {
    pub fn id(&self) -> &str {
        match self {
            CoinSpec::Simple { id, .. }
            | CoinSpec::Discrete { id, .. }
            | CoinSpec::Ca { id, .. } => id,
        }
    }
}

/// An instance as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub penalty: Real,
    pub mode: Mode,
    pub coins: Vec<CoinSpec>,
}

/// A coin validated into its solver type.
#[derive(Debug, Clone)]
pub enum LoadedCoin {
    Simple(SimpleCoin),
    Discrete(DiscreteCoin),
    Ca(CACoin),
}

impl LoadedCoin {
    pub fn id(&self) -> &CoinId {
        match self {
            LoadedCoin::Simple(c) => c.id(),
            LoadedCoin::Discrete(c) => c.id(),
            LoadedCoin::Ca(c) => c.id(),
        }
    }
}

/// A parsed and validated instance.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub penalty: Penalty,
    pub mode: Mode,
    pub coins: Vec<LoadedCoin>,
    /// The file as written, for form-preserving rewrites.
    pub file: InstanceFile,
}

fn context(id: &str, err: impl fmt::Display) -> CliError {
    CliError::Input(format!("coin `{id}`: {err}"))
}

/// Validates a parsed file into solver types.
pub fn load(file: InstanceFile) -> CliResult<LoadedInstance> {
    let penalty = Penalty::new(file.penalty.to_f64()?)
        .map_err(|e| CliError::Input(format!("penalty: {e}")))?;
    if file.coins.is_empty() {
        return Err(CliError::Input("instance needs at least one coin".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for coin in &file.coins {
        if !seen.insert(coin.id().to_owned()) {
            return Err(CliError::Input(format!("duplicate coin id `{}`", coin.id())));
        }
    }
    if let Some(budget) = file.mode.max_tosses {
        if file.mode.reusable && budget > MAX_REUSABLE_BUDGET {
            return Err(CliError::Refusal(format!(
                "max_tosses {budget} exceeds the reusable-trace limit of {MAX_REUSABLE_BUDGET}"
            )));
        }
    }
    let mut coins = Vec::with_capacity(file.coins.len());
    for spec in &file.coins {
        let loaded = match spec {
            CoinSpec::Simple { id, p, fee } => LoadedCoin::Simple(
                SimpleCoin::new(id.as_str(), p.to_f64()?, fee.to_f64()?)
                    .map_err(|e| context(id, e))?,
            ),
            CoinSpec::Discrete { id, entries } => {
                let pairs = entries
                    .iter()
                    .map(|e| Ok((e.p.to_f64()?, e.fee.to_f64()?)))
                    .collect::<CliResult<Vec<_>>>()?;
                LoadedCoin::Discrete(DiscreteCoin::new(id.as_str(), &pairs).map_err(|e| context(id, e))?)
            }
            CoinSpec::Ca { id, p_min, p_max, family } => {
                let family = match family {
                    FamilySpec::Power { a, q } => CostFamily::Power { scale: *a, exponent: *q },
                    FamilySpec::Polynomial { coeffs } => {
                        CostFamily::polynomial(coeffs).map_err(|e| context(id, e))?
                    }
                };
                let coin = CACoin::new(id.as_str(), *p_min, *p_max, family)
                    .map_err(|e| context(id, e))?;
                let report = coin.validate_regular(REGULARITY_GRID);
                if let Some(violation) = report.violations.first() {
                    return Err(context(id, format!("not a regular cost curve: {violation}")));
                }
                LoadedCoin::Ca(coin)
            }
        };
        coins.push(loaded);
    }
    Ok(LoadedInstance { penalty, mode: file.mode.clone(), coins, file })
}

/// Parses and validates an instance from JSON text.
pub fn load_str(json: &str) -> CliResult<LoadedInstance> {
    let file: InstanceFile =
        serde_json::from_str(json).map_err(|e| CliError::Input(format!("instance: {e}")))?;
    load(file)
}

/// Reads, parses, and validates an instance file.
pub fn load_path(path: &Path) -> CliResult<LoadedInstance> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    load_str(&text)
}
