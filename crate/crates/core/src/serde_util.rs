//! JSON helpers: big integers travel as decimal strings.

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer};

pub(crate) fn parse_bigint_value(s: &str) -> Option<BigInt> {
    let s = s.strip_prefix('+').unwrap_or(s);
    if s.is_empty() {
        return None;
    }
    s.parse::<BigInt>().ok()
}

/// Accepts either a decimal string or a JSON integer.
pub(crate) struct BigIntStr(pub BigInt);

impl<'de> Deserialize<'de> for BigIntStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::String(s) => parse_bigint_value(s.trim())
                .map(BigIntStr)
                .ok_or_else(|| serde::de::Error::custom(format!("not a decimal integer: {s:?}"))),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(BigIntStr(BigInt::from(i)))
                } else if let Some(u) = n.as_u64() {
                    Ok(BigIntStr(BigInt::from(u)))
                } else {
                    Err(serde::de::Error::custom(format!("not an integer: {n}")))
                }
            }
            other => Err(serde::de::Error::custom(format!(
                "expected integer string, got {other}"
            ))),
        }
    }
}

pub(crate) fn bigints_as_strings<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    v.iter().map(BigInt::to_string).collect::<Vec<_>>().serialize(s)
}

pub(crate) fn bigint_as_string<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
