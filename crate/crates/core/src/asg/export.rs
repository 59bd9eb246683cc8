use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use super::{FieldValue, InstanceGraph};

fn field_json(value: &FieldValue) -> Value {
    match value {
        FieldValue::Scalar(s) => Value::String(s.clone()),
        FieldValue::Node(n) => json!(n),
        FieldValue::Ref(slot) => json!({ "ref": slot.resolved_to }),
        FieldValue::List(items) => Value::Array(items.iter().map(field_json).collect()),
        FieldValue::Absent => Value::Null,
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl InstanceGraph {
    /// Containment edges are plain node ids, references are `{"ref": id}`.
    pub fn to_json_value(&self) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| {
                let fields: Map<String, Value> = n.fields.iter().map(|(k, v)| (k.clone(), field_json(v))).collect();
                json!({
                    "id": n.id,
                    "type": n.element_type,
                    "span": [n.span.0, n.span.1],
                    "fields": fields,
                })
            })
            .collect();
        let warnings: Vec<Value> = self
            .warnings
            .iter()
            .map(|w| Value::String(format!("{}:{}: {}", w.line, w.column, w.message)))
            .collect();
        json!({ "root": self.root, "nodes": nodes, "warnings": warnings })
    }

    /// Same content as [`InstanceGraph::to_json_value`], one node per line.
    pub fn to_json(&self) -> String {
        let value = self.to_json_value();
        let compact = |v: &Value| serde_json::to_string(v).expect("json values serialize");
        let mut s = format!("{{\n  \"root\": {},\n  \"nodes\": [", self.root);
        let nodes = value["nodes"].as_array().expect("nodes array");
        for (i, n) in nodes.iter().enumerate() {
            s.push_str(if i == 0 { "\n    " } else { ",\n    " });
            s.push_str(&compact(n));
        }
        s.push_str(if nodes.is_empty() { "],\n" } else { "\n  ],\n" });
        let _ = writeln!(s, "  \"warnings\": {}\n}}", compact(&value["warnings"]));
        s
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph asg {\n  node [shape=box, fontname=\"monospace\"];\n");
        for n in &self.nodes {
            let label = match n.value() {
                Some(v) => format!("#{} {}\\n{}", n.id, n.element_type, dot_escape(v)),
                None => format!("#{} {}", n.id, n.element_type),
            };
            let _ = writeln!(out, "  n{} [label=\"{label}\"];", n.id);
        }
        for n in &self.nodes {
            for (field, target, is_ref) in n.edges() {
                if is_ref {
                    let _ = writeln!(out, "  n{} -> n{target} [style=dashed, label=\"ref\"];", n.id);
                } else {
                    let _ = writeln!(out, "  n{} -> n{target} [label=\"{}\"];", n.id, dot_escape(field));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
