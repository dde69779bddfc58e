//! Canonical JSON output and content digests.
//!
//! Canonical means object keys sorted, no insignificant whitespace beyond a
//! fixed pretty layout, and rationals always as `[num, den]` in lowest terms
//! (enforced by the serializers in [`crate::rational`]).

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::set::GroupSet;

/// Recursively sorts object keys.
pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, canonicalize(v))).collect())
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(canonicalize).collect()),
        other => other,
    }
}

pub fn to_canonical_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(canonicalize(serde_json::to_value(x)?))
}

/// Pretty, key-sorted JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize>(x: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&to_canonical_value(x)?)?;
    s.push('\n');
    Ok(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    d.iter().map(|b| format!("{b:02x}")).collect()
}

/// Digest of a set: group label, order and the hex bit vector.
pub fn set_digest(x: &GroupSet) -> String {
    let g = x.group();
    let text = format!("{}|{}|{}", g.label(), g.order(), x.to_hex());
    sha256_hex(text.as_bytes())[..16].to_string()
}

/// Digest of a group's Cayley table.
pub fn group_digest(g: &crate::group::Group) -> String {
    sha256_hex(g.to_cayley_string().as_bytes())[..16].to_string()
}
