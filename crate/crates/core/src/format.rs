//! Versioned instance files and canonical JSON.
//!
//! Every artifact this crate writes goes through [`canonical_json`]: keys
//! sorted, floats at 17 significant digits (a width that round trips every
//! finite double), no insignificant whitespace. Two values that compare
//! equal serialize to identical bytes, so reports can be diffed and hashed
//! without a JSON-aware tool. Non-finite floats follow the serde_json
//! convention and come out as `null`; nothing in this crate produces them.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::SgiaError;
use crate::instances::Instance;

/// Tag expected in the `schema` field of an instance file.
pub const FORMAT_VERSION: &str = "sgia-1";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceFile {
    schema: String,
    #[serde(flatten)]
    instance: Instance,
}

/// Serialize any value to canonical JSON.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, SgiaError> {
    let value = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&value, &mut out);
    Ok(out)
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else {
                // Finite by construction: serde_json stores non-finite
                // floats as null, never as a number.
                let f = n.as_f64().expect("JSON numbers are u64, i64, or f64");
                out.push_str(&format!("{f:.16e}"));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
        }
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("strings always serialize"));
                out.push(':');
                write_value(&map[*key], out);
            }
            out.push('}');
        }
    }
}

/// Render an instance as a canonical `sgia-1` document.
pub fn instance_to_string(instance: &Instance) -> Result<String, SgiaError> {
    canonical_json(&InstanceFile {
        schema: FORMAT_VERSION.into(),
        instance: instance.clone(),
    })
}

/// Parse an `sgia-1` document. Parse errors keep serde's line and column;
/// a recognized document with the wrong tag is a format error, not a parse
/// error.
pub fn instance_from_str(text: &str) -> Result<Instance, SgiaError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    if file.schema != FORMAT_VERSION {
        return Err(SgiaError::Format(format!(
            "unsupported schema tag {:?}, expected {FORMAT_VERSION:?}",
            file.schema
        )));
    }
    Ok(file.instance)
}

pub fn load_instance(path: &Path) -> Result<Instance, SgiaError> {
    instance_from_str(&fs::read_to_string(path)?)
}

/// Write the canonical document plus a trailing newline.
pub fn save_instance(path: &Path, instance: &Instance) -> Result<(), SgiaError> {
    let mut text = instance_to_string(instance)?;
    text.push('\n');
    Ok(fs::write(path, text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use serde_json::json;

    #[test]
    fn canonical_output_sorts_keys_and_pins_float_width() {
        let value = json!({"b": 0.5, "a": [1, true, "x"]});
        assert_eq!(
            canonical_json(&value).unwrap(),
            r#"{"a":[1,true,"x"],"b":5.0000000000000000e-1}"#
        );
    }

    #[test]
    fn instance_round_trip_is_byte_identical() {
        let original = instances::state_guess_iid();
        let first = instance_to_string(&original).unwrap();
        let reloaded = instance_from_str(&first).unwrap();
        let second = instance_to_string(&reloaded).unwrap();
        assert_eq!(first, second);
        assert_eq!(original.game.rewards, reloaded.game.rewards);
        assert_eq!(original.family.rule, reloaded.family.rule);
        assert_eq!(original.profile.pi, reloaded.profile.pi);
        assert_eq!(original.scheme.kind, reloaded.scheme.kind);
    }

    #[test]
    fn awkward_floats_survive_exactly() {
        let values = [
            0.1 + 0.2,
            9.7,
            1.0 / 3.0,
            -0.0,
            f64::MIN_POSITIVE,
            5e-324,
            1e308,
            -1.2345678901234567e-89,
        ];
        for v in values {
            let text = canonical_json(&v).unwrap();
            let back: f64 = serde_json::from_str(&text).unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v:?} -> {text}");
        }
    }

    #[test]
    fn wrong_version_tag_is_rejected() {
        let text = instance_to_string(&instances::repeated_dilemma()).unwrap();
        let tampered = text.replace("\"sgia-1\"", "\"sgia-0\"");
        match instance_from_str(&tampered) {
            Err(SgiaError::Format(msg)) => assert!(msg.contains("sgia-0")),
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_a_position() {
        let err = instance_from_str("{ \"schema\": oops").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn non_finite_numbers_become_null() {
        assert_eq!(canonical_json(&vec![f64::NAN]).unwrap(), "[null]");
        assert_eq!(canonical_json(&f64::INFINITY).unwrap(), "null");
    }
}
