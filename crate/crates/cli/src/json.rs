//! Diff-stable JSON: sorted keys, two-space indent, floats at 9 significant digits.

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub const SIGNIFICANT_DIGITS: usize = 9;

/// Formats a float with [`SIGNIFICANT_DIGITS`] significant digits, trailing
/// zeros removed, always with a fractional part or exponent.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0.0".to_owned();
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v).parse().expect("float round trip");
    let magnitude = rounded.abs();
    if (1e-6..1e15).contains(&magnitude) {
        let s = rounded.to_string();
        if s.contains('.') {
            s
        } else {
            format!("{s}.0")
        }
    } else {
        format!("{rounded:e}")
    }
}

pub fn to_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Input(format!("serialization: {e}")))?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

/// Dotted paths of every `null` in the serialized value, in key order.
pub fn null_paths<T: Serialize>(value: &T) -> Result<Vec<String>, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Input(format!("serialization: {e}")))?;
    let mut out = Vec::new();
    collect_nulls(&v, String::new(), &mut out);
    Ok(out)
}

fn collect_nulls(v: &Value, path: String, out: &mut Vec<String>) {
    let join = |key: &str| if path.is_empty() { key.to_owned() } else { format!("{path}.{key}") };
    match v {
        Value::Null => out.push(path),
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                collect_nulls(item, join(&i.to_string()), out);
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                collect_nulls(item, join(k), out);
            }
        }
        _ => {}
    }
}

fn indent(level: usize, out: &mut String) {
    out.extend(std::iter::repeat_n("  ", level));
}

fn write_value(v: &Value, level: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) if !n.is_f64() => out.push_str(&i.to_string()),
            (_, Some(u), _) if !n.is_f64() => out.push_str(&u.to_string()),
            (_, _, Some(f)) => out.push_str(&format_float(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string escape")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if items.iter().all(|i| !i.is_array() && !i.is_object()) {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(item, level, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                indent(level + 1, out);
                write_value(item, level + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(level, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            // serde_json's default map is ordered by key
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                indent(level + 1, out);
                out.push_str(&serde_json::to_string(key).expect("key escape"));
                out.push_str(": ");
                write_value(item, level + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            indent(level, out);
            out.push('}');
        }
    }
}
