//! Serde adapter writing rationals as `"p/q"` strings.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

use crate::numbers::{parse_rational, rat_to_string, Rational};

pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rat_to_string(r))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse_rational(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
}
