//! Structured command reports with stable text and JSON renderings.
//!
//! A report never contains raw ids: every object, morphism, functor and
//! transformation is rendered through the instance string names, so a report
//! is readable next to the input file and stable across reorderings of
//! internal id assignment (ids are themselves canonical, but names are the
//! interface). Section order inside `detail` is insertion order and fixed
//! per command.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map as JsonMap, Value};

use crate::fincat::{CatRef, Functor, FunctorFile, MorphismClass, NatTransformation};
use crate::localization::LocalizationWitness;

/// Overall outcome of one command.
///
/// `Fail` means at least one checked property failed; `Refused` means the
/// run hit the node budget or a non-confluent rewriting system before any
/// failure was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Refused,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Refused => 3,
        }
    }
}

/// One command run: verdict, counterexamples, resource usage and the
/// command-specific evidence under `detail`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub counterexamples: Vec<String>,
    pub nodes_used: u64,
    pub budget: u64,
    pub elapsed_ms: u64,
    pub detail: Value,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("verdict: {}\n", match self.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Refused => "refused",
        }));
        out.push_str(&format!("nodes_used: {} of {}\n", self.nodes_used, self.budget));
        out.push_str(&format!("elapsed_ms: {}\n", self.elapsed_ms));
        if !self.counterexamples.is_empty() {
            out.push_str("counterexamples:\n");
            for c in &self.counterexamples {
                out.push_str(&format!("  - {c}\n"));
            }
        }
        if !self.detail.is_null() {
            render_into(&self.detail, 0, &mut out);
        }
        out
    }
}

fn is_scalar(v: &Value) -> bool {
    !(v.is_object() || v.is_array())
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_into(v: &Value, pad: usize, out: &mut String) {
    let ind = " ".repeat(pad);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                if is_scalar(val) {
                    out.push_str(&format!("{ind}{k}: {}\n", scalar_text(val)));
                } else if val.as_array().is_some_and(|a| a.iter().all(is_scalar)) {
                    let items: Vec<String> =
                        val.as_array().unwrap().iter().map(scalar_text).collect();
                    out.push_str(&format!("{ind}{k}: [{}]\n", items.join(", ")));
                } else {
                    out.push_str(&format!("{ind}{k}:\n"));
                    render_into(val, pad + 2, out);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if is_scalar(item) {
                    out.push_str(&format!("{ind}- {}\n", scalar_text(item)));
                } else {
                    out.push_str(&format!("{ind}-\n"));
                    render_into(item, pad + 2, out);
                }
            }
        }
        other => out.push_str(&format!("{ind}{}\n", scalar_text(other))),
    }
}

/// Category summary: objects in order and the nonempty hom-sets by name.
pub fn category_value(c: &CatRef) -> Value {
    let mut hom = JsonMap::new();
    for x in c.objects() {
        for y in c.objects() {
            let h = c.hom(x, y);
            if h.is_empty() {
                continue;
            }
            hom.insert(
                format!("{} -> {}", c.obj_name(x), c.obj_name(y)),
                Value::Array(
                    h.iter().map(|&m| Value::String(c.mor_name(m).to_string())).collect(),
                ),
            );
        }
    }
    json!({
        "label": c.label(),
        "n_objects": c.n_objects(),
        "n_morphisms": c.n_morphisms(),
        "objects": c.objects().map(|x| c.obj_name(x)).collect::<Vec<_>>(),
        "hom": hom,
    })
}

/// Functor tables keyed by the source's names.
pub fn functor_value(f: &Functor) -> Value {
    let ff = FunctorFile::of(f);
    json!({
        "source": f.source().label(),
        "target": f.target().label(),
        "obj_map": ff.obj_map,
        "mor_map": ff.mor_map,
    })
}

/// Components of a transformation keyed by source object name.
pub fn nat_value(n: &NatTransformation) -> Value {
    let c = n.from().source();
    let d = n.from().target();
    let mut components = JsonMap::new();
    for x in c.objects() {
        components.insert(
            c.obj_name(x).to_string(),
            Value::String(d.mor_name(n.component(x)).to_string()),
        );
    }
    json!({
        "from": n.from().target().label(),
        "components": components,
    })
}

pub fn class_value(c: &CatRef, cls: &MorphismClass) -> Value {
    Value::Array(
        cls.members().map(|m| Value::String(c.mor_name(m).to_string())).collect(),
    )
}

/// Witness summary: endpoints, marked class and the current flags.
pub fn witness_value(w: &LocalizationWitness) -> Value {
    json!({
        "base": w.base.label(),
        "localized": w.loc.label(),
        "marked": class_value(&w.base, &w.w),
        "flags": serde_json::to_value(&w.flags).expect("flags serialize"),
    })
}
