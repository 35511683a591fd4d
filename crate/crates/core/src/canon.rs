//! Canonical JSON: object keys sorted, no insignificant whitespace, and
//! every number written as a decimal string so documents diff byte-for-byte
//! across platforms.

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(x) => Value::String(x.to_string()),
        Value::Array(xs) => Value::Array(xs.into_iter().map(canonicalize).collect()),
        // serde_json's map is ordered by key
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, x)| (k, canonicalize(x))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize + ?Sized>(x: &T) -> Result<Value> {
    Ok(canonicalize(serde_json::to_value(x)?))
}

pub fn to_string<T: Serialize + ?Sized>(x: &T) -> Result<String> {
    Ok(serde_json::to_string(&to_value(x)?)?)
}
