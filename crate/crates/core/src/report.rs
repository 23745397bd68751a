//! Run reports and their JSON and text renderings.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub name: String,
    /// Effective arguments after merging the config file.
    pub args: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core: Option<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(rename = "proxy-for-N")]
    pub proxy: bool,
    /// `exact` for exact computations on the given scale, `evidence-at-scale` for
    /// bounded searches standing in for statements about the infinite group.
    pub evidence: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: CommandEcho,
    pub scale: Scale,
    pub result: Value,
    pub provenance: Provenance,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values serialize")
    }

    pub fn to_text(&self) -> String {
        let v = serde_json::to_value(self).expect("report values serialize");
        let mut out = String::new();
        render(&v, 0, &mut out);
        out
    }
}

fn atom(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            Some(format!(
                "[{}]",
                items.iter().filter_map(atom).collect::<Vec<_>>().join(", ")
            ))
        }
        _ => None,
    }
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match atom(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match atom(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", atom(other).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::*;

    fn sample() -> Report {
        Report {
            command: CommandEcho {
                name: "pack".into(),
                args: vec!["--n".into(), "2".into()],
            },
            scale: Scale {
                group: "integers".into(),
                core: Some((0, 10)),
                margin: Some(9),
                ..Scale::default()
            },
            result: json!({"value": 2, "family": [0, 1], "stats": {"nodes": 3}}),
            provenance: Provenance {
                proxy: true,
                evidence: "exact".into(),
                notes: vec![],
            },
            elapsed_ms: 4,
        }
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"proxy-for-N\": true"));
    }

    #[test]
    fn text_walks_payload() {
        let t = sample().to_text();
        assert!(t.contains("  value: 2\n"));
        assert!(t.contains("  family: [0, 1]\n"));
        assert!(t.contains("    nodes: 3\n"));
        assert!(t.contains("  core: [0, 10]\n"));
    }
}
