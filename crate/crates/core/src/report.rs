//! Report envelope shared by the CLI and the reproduction suite.

use num_bigint::BigInt;
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::exact::{format_rational, Rational};

/// Big integers serialize as decimal strings.
pub fn ser_bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn ser_rational<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(v))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub result: Value,
    pub witnesses: Value,
    pub elapsed_ms: u64,
    pub anchor: String,
}
