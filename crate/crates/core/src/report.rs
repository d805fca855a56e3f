//! JSON forms of library values and the report envelope used by the CLI.
//!
//! Maps are `serde_json` maps without `preserve_order`, so keys come out
//! sorted. Integers that do not fit in 64 bits are written as decimal strings.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::constructions::MorseTrace;
use crate::descriptor::{AxisFiber, ComponentForest, FiberConfiguration, FoldEvent, ForestNode, RoundFoldDescriptor};
use crate::dsl::Diagnostic;
use crate::expr::{ManifoldExpr, Twist};

pub fn bigint_json(b: &BigInt) -> Value {
    match b.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(b.to_string()),
    }
}

pub fn serialize_bigints<S: Serializer>(values: &[BigInt], serializer: S) -> Result<S::Ok, S::Error> {
    values.iter().map(bigint_json).collect::<Vec<_>>().serialize(serializer)
}

fn twist_json(t: &Twist) -> Value {
    match t {
        Twist::Trivial => Value::Null,
        Twist::Label(s) => Value::String(s.clone()),
    }
}

fn component_json(id: &str, e: &ManifoldExpr) -> Value {
    json!({ "id": id, "fiber": e.to_json() })
}

pub fn event_json(e: &FoldEvent) -> Value {
    let mut v = match e {
        FoldEvent::Birth { id, fiber } => json!({ "id": id, "fiber": fiber.to_json() }),
        FoldEvent::Death { id } => json!({ "id": id }),
        FoldEvent::Split { from, left, right, twist } => json!({
            "from": from,
            "left": component_json(&left.0, &left.1),
            "right": component_json(&right.0, &right.1),
            "twist": twist.as_ref().map(twist_json),
        }),
        FoldEvent::Merge { left, right, into } => json!({
            "left": left,
            "right": right,
            "into": component_json(&into.0, &into.1),
        }),
        FoldEvent::Generic { index, id, before, after, chi_sing } => json!({
            "id": id,
            "index": index,
            "before": before.to_json(),
            "after": after.to_json(),
            "chi_sing": chi_sing,
        }),
    };
    if let Value::Object(m) = &mut v {
        m.insert("kind".into(), json!(e.kind_name()));
        m.entry("index").or_insert(json!(e.index()));
    }
    v
}

pub fn axis_json(a: &AxisFiber) -> Value {
    match a {
        AxisFiber::Cylinder(e) => json!({ "kind": "cylinder", "fiber": e.to_json() }),
        AxisFiber::PuncturedCylinder(e, h) => json!({ "kind": "punctured", "fiber": e.to_json(), "holes": h }),
        AxisFiber::NamedWithBoundary { name, boundary, props } => json!({
            "kind": "named_boundary",
            "name": name,
            "boundary": boundary.iter().map(ManifoldExpr::to_json).collect::<Vec<_>>(),
            "props": props,
        }),
    }
}

pub fn descriptor_json(d: &RoundFoldDescriptor) -> Value {
    json!({
        "m": d.m,
        "n": d.n,
        "l": d.l(),
        "trivial": d.triviality.keyword(),
        "axis": d.axis.as_ref().map(axis_json),
        "twist": twist_json(&d.twist),
        "half_trace": d.half_trace,
        "assertions": d.assertions.iter().map(|a| a.keyword()).collect::<Vec<_>>(),
        "events": d.events.iter().map(event_json).collect::<Vec<_>>(),
    })
}

pub fn trace_json(t: &MorseTrace) -> Value {
    json!({
        "boundary": t.boundary.iter().map(|(id, e)| component_json(id, e)).collect::<Vec<_>>(),
        "events": t.events.iter().map(event_json).collect::<Vec<_>>(),
        "label": t.label.as_ref().map(axis_json),
    })
}

pub fn fibers_json(fibers: &[FiberConfiguration]) -> Value {
    Value::Array(
        fibers
            .iter()
            .map(|f| Value::Array(f.iter().map(|(id, e)| component_json(id, e)).collect()))
            .collect(),
    )
}

/// DOT rendering of the component forest: proper-core leaves are double
/// circles, leaves at births and deaths are boxes.
pub fn forest_dot(forest: &ComponentForest, d: &RoundFoldDescriptor) -> String {
    let free = forest.free_leaves();
    let mut out = String::from("graph L {\n  rankdir=LR;\n");
    for (i, node) in forest.nodes.iter().enumerate() {
        let name = forest.node_name(i);
        let (label, shape) = match node {
            ForestNode::Event { event } => {
                let shape = if free.contains(&i) { "box" } else { "ellipse" };
                (format!("{name} {}", d.events[*event].kind_name()), shape)
            }
            ForestNode::Passive { id, .. } => (id.clone(), "point"),
            ForestNode::Capped { id } => (id.clone(), "doublecircle"),
        };
        out.push_str(&format!("  {} [label={}, shape={shape}];\n", crate::dsl::quote(&name), crate::dsl::quote(&label)));
    }
    for e in &forest.edges {
        out.push_str(&format!(
            "  {} -- {} [label={}];\n",
            crate::dsl::quote(&forest.node_name(e.outer)),
            crate::dsl::quote(&forest.node_name(e.inner)),
            crate::dsl::quote(&format!("{}:{}", e.region, e.id))
        ));
    }
    out.push_str("}\n");
    out
}

/// Envelope shared by every `--json` command output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub input: Value,
    pub result: Value,
    pub provenance: Value,
    pub diagnostics: Vec<Diagnostic>,
}

impl Report {
    pub fn new(command: &str, input: Value) -> Self {
        Report {
            command: command.to_string(),
            input,
            result: Value::Null,
            provenance: json!({ "tool": "rfm", "version": env!("CARGO_PKG_VERSION") }),
            diagnostics: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report values are plain JSON")
    }

    /// Pretty-printed with sorted keys and a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("JSON values always print");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_integers_become_strings() {
        assert_eq!(bigint_json(&BigInt::from(7)), json!(7));
        let big = BigInt::from(i64::MAX) * 4;
        assert_eq!(bigint_json(&big), json!(big.to_string()));
    }

    #[test]
    fn dot_marks_leaves() {
        let d = crate::presets::preset("milnor_sphere(theta)").unwrap().descriptor;
        let dot = forest_dot(&d.component_forest().unwrap(), &d);
        assert_eq!(dot.matches("doublecircle").count(), 2);
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert!(dot.starts_with("graph L {"));
    }

    #[test]
    fn keys_are_sorted() {
        let r = Report::new("euler", json!({ "z": 1, "a": 2 }));
        let text = r.render();
        let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("command") < pos("diagnostics"));
        assert!(pos("diagnostics") < pos("input"));
        assert!(pos("a") < pos("z"));
    }
}
