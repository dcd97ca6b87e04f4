//! Plain-text rendering of a JSON report: one `path: value` line per leaf,
//! arrays of numbers kept on one line.

use serde_json::Value;

pub fn text(v: &Value) -> String {
    let mut out = String::new();
    walk("", v, &mut out);
    out
}

fn is_flat(items: &[Value]) -> bool {
    items.iter().all(|x| !x.is_array() && !x.is_object())
}

fn walk(path: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                walk(&p, x, out);
            }
        }
        Value::Array(items) if !items.is_empty() && !is_flat(items) => {
            for (i, x) in items.iter().enumerate() {
                walk(&format!("{path}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{path}: {s}\n")),
        other => out.push_str(&format!("{path}: {other}\n")),
    }
}
