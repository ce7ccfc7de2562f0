//! Report envelopes. Objects serialize with sorted keys, so identical
//! inputs give identical bytes.

use serde_json::{json, Value};

use stabgw_core::chern::{ChernError, SpecError};
use stabgw_core::equiv::EquivError;
use stabgw_core::gw::{GwError, ScriptError};
use stabgw_core::lattice::LatticeError;
use stabgw_core::pipeline::PipelineError;
use stabgw_core::polytope::PolytopeError;
use stabgw_core::ring::RingError;

use crate::commands::InputError;
use crate::Format;

pub const SCHEMA_VERSION: u32 = 1;

pub fn render(command: &str, format: Format, result: Value) -> String {
    match format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "ok": true,
                "result": result,
            });
            serde_json::to_string_pretty(&doc).expect("values serialize")
        }
        Format::Tsv => {
            let mut lines = vec!["path\tvalue".to_string()];
            flatten("", &result, &mut lines);
            lines.join("\n")
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&join(k), x, out)),
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => items
            .iter()
            .enumerate()
            .for_each(|(i, x)| flatten(&join(&i.to_string()), x, out)),
        Value::Array(items) => out.push(format!(
            "{prefix}\t{}",
            items.iter().map(scalar).collect::<Vec<_>>().join(",")
        )),
        _ => out.push(format!("{prefix}\t{}", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Ring errors surface wrapped in several layers.
fn ring_error(e: &anyhow::Error) -> Option<&RingError> {
    fn from_chern(c: &ChernError) -> Option<&RingError> {
        match c {
            ChernError::Ring(r) => Some(r),
            _ => None,
        }
    }
    e.downcast_ref::<RingError>()
        .or_else(|| match e.downcast_ref::<SpecError>()? {
            SpecError::Ring(r) => Some(r),
            SpecError::Chern(c) => from_chern(c),
            _ => None,
        })
        .or_else(|| from_chern(e.downcast_ref::<ChernError>()?))
        .or_else(|| match e.downcast_ref::<GwError>()? {
            GwError::Ring(r) => Some(r),
            _ => None,
        })
}

fn kind(e: &anyhow::Error) -> &'static str {
    if e.downcast_ref::<InputError>().is_some() || e.downcast_ref::<ScriptError>().is_some() {
        "input"
    } else if ring_error(e).is_some() {
        "ring"
    } else if e.downcast_ref::<GwError>().is_some() {
        "gw"
    } else if e.downcast_ref::<ChernError>().is_some() || e.downcast_ref::<SpecError>().is_some()
    {
        "chern"
    } else if e.downcast_ref::<EquivError>().is_some()
        || e.downcast_ref::<LatticeError>().is_some()
    {
        "lattice"
    } else if e.downcast_ref::<PolytopeError>().is_some() {
        "polytope"
    } else if e.downcast_ref::<PipelineError>().is_some() {
        "pipeline"
    } else if e.downcast_ref::<std::io::Error>().is_some() {
        "io"
    } else if e.downcast_ref::<serde_json::Error>().is_some() {
        "json"
    } else {
        "other"
    }
}

pub fn error(command: &str, e: &anyhow::Error) -> String {
    let mut body = json!({
        "kind": kind(e),
        "message": format!("{e:#}"),
    });
    if let Some(s) = e.downcast_ref::<ScriptError>() {
        body["line"] = json!(s.line);
        body["column"] = json!(s.column);
    }
    if let Some(RingError::Parse(p)) = ring_error(e) {
        body["position"] = json!(p.position);
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "ok": false,
        "error": body,
    });
    serde_json::to_string_pretty(&doc).expect("values serialize")
}

pub fn usage_error(message: &str) -> String {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "ok": false,
        "error": {"kind": "usage", "message": message},
    });
    serde_json::to_string_pretty(&doc).expect("values serialize")
}
