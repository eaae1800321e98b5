//! Shared pieces of machine-readable reports.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::{Serialize, Serializer};
use serde_json::Value;

/// Big integers are written as decimal strings.
pub fn serialize_biguint<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn serialize_biguints<S: Serializer>(xs: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

/// Rationals are written as `p/q` strings.
pub fn serialize_rationals<S: Serializer>(xs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

/// Where a report came from: enough to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Echo of every parameter the command used.
    pub config: Value,
    pub seed: Option<u64>,
    pub rng: String,
    /// Radius up to which each automaton used was checked against
    /// breadth-first search, by generating-set name.
    pub validated_to: BTreeMap<String, usize>,
}

impl Provenance {
    pub fn new(command: &str, config: Value, seed: Option<u64>) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            seed,
            rng: crate::rng::RNG_ALGORITHM.to_string(),
            validated_to: BTreeMap::new(),
        }
    }

    pub fn with_automaton(mut self, name: &str, validated_to: usize) -> Self {
        self.validated_to.insert(name.to_string(), validated_to);
        self
    }
}

/// A result with its provenance. Wall-clock times are kept out so that equal
/// inputs give byte-identical reports; see [`Timing`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<T> {
    pub provenance: Provenance,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Wall-clock sidecar of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub command: String,
    pub wall_clock_seconds: f64,
    pub sections: Vec<(String, f64)>,
}

/// Pretty JSON with a trailing newline. Field order is declaration order and
/// floats print in shortest round-trip form, so output is deterministic.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
