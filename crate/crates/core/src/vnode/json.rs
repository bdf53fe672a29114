//! Canonical JSON form of virtual nodes, used by compiled-module files,
//! fixtures, and the CLI.
//!
//! Field order is fixed (`t`, `tag`, `props`, `key`, `flag`, `delta`,
//! `children`) and absent optionals are omitted, so serialization is
//! byte-stable. `Static` roots serialize with their underlying child shape;
//! staticness is implied by their position in a module's hoisted table.

use std::sync::Arc;

use serde_json::{Map, Number, Value};
use thiserror::Error;

use super::{DeltaOp, ElementNode, Flag, PropValue, Props, VNode};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed virtual node JSON: {0}")]
pub struct VNodeJsonError(pub String);

fn err(msg: impl Into<String>) -> VNodeJsonError {
    VNodeJsonError(msg.into())
}

pub fn to_value(node: &VNode) -> Value {
    match node {
        VNode::Text(s) => {
            let mut map = Map::new();
            map.insert("t".into(), Value::String("text".into()));
            map.insert("s".into(), Value::String(s.to_string()));
            Value::Object(map)
        }
        VNode::Element(el) => element_to_value(el),
    }
}

fn element_to_value(el: &ElementNode) -> Value {
    let mut map = Map::new();
    map.insert("t".into(), Value::String("el".into()));
    map.insert("tag".into(), Value::String(el.tag.to_string()));
    let mut props = Map::new();
    for (name, value) in el.props.iter() {
        props.insert(name.clone(), prop_to_value(value));
    }
    map.insert("props".into(), Value::Object(props));
    if let Some(key) = &el.key {
        map.insert("key".into(), Value::String(key.to_string()));
    }
    map.insert(
        "flag".into(),
        Value::String(el.effective_flag().name().into()),
    );
    if let Some(delta) = &el.delta {
        map.insert(
            "delta".into(),
            Value::Array(delta.iter().map(delta_to_value).collect()),
        );
    }
    map.insert(
        "children".into(),
        Value::Array(el.children.iter().map(to_value).collect()),
    );
    Value::Object(map)
}

fn prop_to_value(value: &PropValue) -> Value {
    match value {
        PropValue::Str(s) => Value::String(s.to_string()),
        PropValue::Bool(b) => Value::Bool(*b),
        PropValue::Num(n) => Number::from_f64(*n)
            .map(Value::Number)
            .unwrap_or(Value::Null),
        PropValue::EventRef(id) => {
            let mut map = Map::new();
            map.insert("ev".into(), Value::Number((*id).into()));
            Value::Object(map)
        }
    }
}

fn delta_to_value(op: &DeltaOp) -> Value {
    let mut map = Map::new();
    match op {
        DeltaOp::Insert(index, node) => {
            map.insert("op".into(), Value::String("insert".into()));
            map.insert("i".into(), Value::Number((*index).into()));
            map.insert("node".into(), to_value(node));
        }
        DeltaOp::Update(index, node) => {
            map.insert("op".into(), Value::String("update".into()));
            map.insert("i".into(), Value::Number((*index).into()));
            map.insert("node".into(), to_value(node));
        }
        DeltaOp::Remove(index) => {
            map.insert("op".into(), Value::String("remove".into()));
            map.insert("i".into(), Value::Number((*index).into()));
        }
    }
    Value::Object(map)
}

/// Compact canonical text form. Structurally equal trees (up to `Static`
/// normalization) serialize byte-identically.
pub fn to_canonical_string(node: &VNode) -> String {
    serde_json::to_string(&to_value(node)).expect("vnode json is always serializable")
}

pub fn from_value(value: &Value) -> Result<VNode, VNodeJsonError> {
    let obj = value.as_object().ok_or_else(|| err("node must be an object"))?;
    let t = obj
        .get("t")
        .and_then(Value::as_str)
        .ok_or_else(|| err("node missing `t` tag"))?;
    match t {
        "text" => {
            let s = obj
                .get("s")
                .and_then(Value::as_str)
                .ok_or_else(|| err("text node missing `s`"))?;
            Ok(VNode::Text(Arc::from(s)))
        }
        "el" => element_from_obj(obj),
        other => Err(err(format!("unknown node tag `{other}`"))),
    }
}

fn element_from_obj(obj: &Map<String, Value>) -> Result<VNode, VNodeJsonError> {
    let tag = obj
        .get("tag")
        .and_then(Value::as_str)
        .ok_or_else(|| err("element missing `tag`"))?;
    let mut props = Props::new();
    if let Some(raw) = obj.get("props") {
        let raw = raw
            .as_object()
            .ok_or_else(|| err("element `props` must be an object"))?;
        for (name, value) in raw {
            props.insert(name.clone(), prop_from_value(value)?);
        }
    }
    let key = match obj.get("key") {
        None => None,
        Some(v) => Some(Arc::from(
            v.as_str().ok_or_else(|| err("element `key` must be a string"))?,
        )),
    };
    let flag_name = obj
        .get("flag")
        .and_then(Value::as_str)
        .ok_or_else(|| err("element missing `flag`"))?;
    let flag = Flag::from_name(flag_name).ok_or_else(|| err(format!("unknown flag `{flag_name}`")))?;
    if flag == Flag::Static {
        // Canonical form never writes STATIC; table position carries it.
        return Err(err("flag STATIC is not valid in serialized nodes"));
    }
    let delta = match obj.get("delta") {
        None => None,
        Some(v) => {
            let arr = v
                .as_array()
                .ok_or_else(|| err("element `delta` must be an array"))?;
            Some(
                arr.iter()
                    .map(delta_from_value)
                    .collect::<Result<Vec<_>, _>>()?,
            )
        }
    };
    let children = match obj.get("children") {
        None => Vec::new(),
        Some(v) => v
            .as_array()
            .ok_or_else(|| err("element `children` must be an array"))?
            .iter()
            .map(from_value)
            .collect::<Result<Vec<_>, _>>()?,
    };
    Ok(super::element_with_flag(
        Arc::from(tag),
        super::shared_props(props),
        children,
        key,
        flag,
        delta,
        None,
    ))
}

fn prop_from_value(value: &Value) -> Result<PropValue, VNodeJsonError> {
    match value {
        Value::String(s) => Ok(PropValue::Str(Arc::from(s.as_str()))),
        Value::Bool(b) => Ok(PropValue::Bool(*b)),
        Value::Number(n) => n
            .as_f64()
            .map(PropValue::Num)
            .ok_or_else(|| err("prop number out of f64 range")),
        Value::Object(map) => {
            let id = map
                .get("ev")
                .and_then(Value::as_u64)
                .ok_or_else(|| err("prop object must be {\"ev\": id}"))?;
            Ok(PropValue::EventRef(id))
        }
        _ => Err(err("unsupported prop value")),
    }
}

fn delta_from_value(value: &Value) -> Result<DeltaOp, VNodeJsonError> {
    let obj = value
        .as_object()
        .ok_or_else(|| err("delta op must be an object"))?;
    let op = obj
        .get("op")
        .and_then(Value::as_str)
        .ok_or_else(|| err("delta op missing `op`"))?;
    let index = obj
        .get("i")
        .and_then(Value::as_u64)
        .ok_or_else(|| err("delta op missing `i`"))? as usize;
    match op {
        "insert" | "update" => {
            let node = from_value(
                obj.get("node")
                    .ok_or_else(|| err("delta insert/update missing `node`"))?,
            )?;
            Ok(if op == "insert" {
                DeltaOp::Insert(index, node)
            } else {
                DeltaOp::Update(index, node)
            })
        }
        "remove" => Ok(DeltaOp::Remove(index)),
        other => Err(err(format!("unknown delta op `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{make_element, text, Props};
    use super::*;

    #[test]
    fn canonical_field_order_and_omissions() {
        let node = make_element("div", Props::new(), vec![text("Hello World")], None, None).unwrap();
        assert_eq!(
            to_canonical_string(&node),
            r#"{"t":"el","tag":"div","props":{},"flag":"ONLY_TEXT_CHILDREN","children":[{"t":"text","s":"Hello World"}]}"#
        );
    }

    #[test]
    fn round_trip_preserves_structure() {
        let mut props = Props::new();
        props.insert("id".into(), PropValue::str("a"));
        props.insert("n".into(), PropValue::Num(2.5));
        props.insert("on".into(), PropValue::Bool(false));
        props.insert("click".into(), PropValue::EventRef(3));
        let node = make_element(
            "div",
            props,
            vec![
                text("x"),
                make_element("span", Props::new(), vec![], Some(Arc::from("k")), None).unwrap(),
            ],
            None,
            Some(vec![DeltaOp::Insert(0, text("y")), DeltaOp::Remove(1)]),
        )
        .unwrap();
        let back = from_value(&to_value(&node)).unwrap();
        assert_eq!(node, back);
        assert_eq!(to_canonical_string(&node), to_canonical_string(&back));
    }

    #[test]
    fn static_flag_serializes_as_underlying_shape() {
        let inner = vec![text("Hello World")];
        let node = super::super::element_with_flag(
            Arc::from("div"),
            super::super::empty_props(),
            inner,
            None,
            Flag::Static,
            None,
            Some(0),
        );
        let value = to_value(&node);
        assert_eq!(value["flag"], "ONLY_TEXT_CHILDREN");
        assert!(value.get("hoist_id").is_none());
    }

    #[test]
    fn rejects_garbage() {
        for bad in [
            serde_json::json!({"t": "nope"}),
            serde_json::json!({"tag": "div"}),
            serde_json::json!({"t": "el", "tag": "div", "flag": "STATIC"}),
            serde_json::json!([1, 2, 3]),
        ] {
            assert!(from_value(&bad).is_err(), "{bad} should be rejected");
        }
    }
}
