//! Module evaluation: instantiate a compiled module against a state value,
//! and the reactive list handle that emits delta-annotated nodes so feed-like
//! updates can bypass child diffing entirely.

use std::sync::Arc;

use serde_json::Value;
use thiserror::Error;

use crate::template::{CompiledModule, Instr, InstrKey, PathExpr};
use crate::vnode::{self, element_with_flag, DeltaOp, Flag, PropValue, Props, VNode};

#[derive(Debug, Error, PartialEq)]
pub enum InstantiateError {
    #[error("path `{0}` does not resolve to the required type")]
    PathTypeError(String),
    #[error("duplicate key `{0}` produced for keyed children")]
    DuplicateKey(String),
    #[error("hoisted constant {0} out of range")]
    HoistOutOfRange(u32),
}

/// Evaluate a compiled module against a state value.
///
/// Deterministic: equal module and state produce structurally equal output,
/// and `UseHoisted` returns the *same* shared constant on every call.
pub fn instantiate(module: &CompiledModule, state: &Value) -> Result<VNode, InstantiateError> {
    let mut scopes = Vec::new();
    eval_single(&module.program, &module.hoisted, state, &mut scopes)
}

type Scopes<'m, 's> = Vec<(&'m str, &'s Value)>;

fn eval_single<'m, 's>(
    instr: &'m Instr,
    hoisted: &[VNode],
    state: &'s Value,
    scopes: &mut Scopes<'m, 's>,
) -> Result<VNode, InstantiateError> {
    let mut out = Vec::with_capacity(1);
    eval_into(instr, hoisted, state, scopes, &mut out)?;
    debug_assert_eq!(out.len(), 1, "root instruction yields exactly one node");
    Ok(out.remove(0))
}

fn eval_into<'m, 's>(
    instr: &'m Instr,
    hoisted: &[VNode],
    state: &'s Value,
    scopes: &mut Scopes<'m, 's>,
    out: &mut Vec<VNode>,
) -> Result<(), InstantiateError> {
    match instr {
        Instr::MakeText(s) => out.push(vnode::text(s)),
        Instr::ReadText(path) => {
            out.push(VNode::Text(coerce_text(resolve(state, scopes, path))));
        }
        Instr::UseHoisted(id) => {
            let node = hoisted
                .get(*id as usize)
                .ok_or(InstantiateError::HoistOutOfRange(*id))?;
            out.push(node.clone());
        }
        Instr::MakeEl { .. } => {
            out.push(eval_element(instr, hoisted, state, scopes, None)?);
        }
        Instr::ForEach {
            list,
            item,
            key,
            body,
        } => {
            let resolved = resolve(state, scopes, list)
                .ok_or_else(|| InstantiateError::PathTypeError(list.dotted()))?;
            let items = resolved
                .as_array()
                .ok_or_else(|| InstantiateError::PathTypeError(list.dotted()))?;
            out.reserve(items.len());
            for value in items {
                let key_text = coerce_text(resolve_relative(value, key));
                scopes.push((item.as_str(), value));
                let node = eval_element(body, hoisted, state, scopes, Some(key_text))?;
                scopes.pop();
                out.push(node);
            }
        }
        Instr::Branch {
            cond,
            then_branch,
            else_branch,
        } => {
            let value = resolve(state, scopes, cond)
                .ok_or_else(|| InstantiateError::PathTypeError(cond.dotted()))?;
            let branch = if truthy(value) { then_branch } else { else_branch };
            for child in branch {
                eval_into(child, hoisted, state, scopes, out)?;
            }
        }
    }
    Ok(())
}

fn eval_element<'m, 's>(
    instr: &'m Instr,
    hoisted: &[VNode],
    state: &'s Value,
    scopes: &mut Scopes<'m, 's>,
    key_override: Option<Arc<str>>,
) -> Result<VNode, InstantiateError> {
    let Instr::MakeEl {
        tag,
        static_props,
        dyn_props,
        key,
        flag,
        children,
    } = instr
    else {
        unreachable!("eval_element called on a non-element instruction");
    };
    let mut props = Props::with_capacity(static_props.len() + dyn_props.len());
    for (name, value) in static_props {
        props.insert(name.clone(), PropValue::str(value));
    }
    for (name, path) in dyn_props {
        props.insert(name.clone(), coerce_prop(resolve(state, scopes, path)));
    }
    let mut built = Vec::with_capacity(children.len());
    for child in children {
        eval_into(child, hoisted, state, scopes, &mut built)?;
    }
    let key = match key_override {
        Some(k) => Some(k),
        None => match key {
            Some(InstrKey::Literal(k)) => Some(Arc::from(k.as_str())),
            Some(InstrKey::Path(path)) => Some(coerce_text(resolve(state, scopes, path))),
            None => None,
        },
    };
    if *flag == Flag::OnlyKeyedChildren {
        vnode::check_unique_keys(&built).map_err(|e| match e {
            vnode::VNodeError::DuplicateKey(k) => InstantiateError::DuplicateKey(k),
            other => unreachable!("{other}"),
        })?;
    }
    Ok(element_with_flag(
        Arc::from(tag.as_str()),
        vnode::shared_props(props),
        built,
        key,
        *flag,
        None,
        None,
    ))
}

/// Resolve a path: the first segment may hit an in-scope loop binding
/// (innermost first); otherwise the whole path reads from the state root.
fn resolve<'s>(state: &'s Value, scopes: &Scopes<'_, 's>, path: &PathExpr) -> Option<&'s Value> {
    let (head, rest) = path.segments.split_first().expect("paths are nonempty");
    for (name, value) in scopes.iter().rev() {
        if *name == head {
            return resolve_segments(value, rest);
        }
    }
    resolve_segments(state, &path.segments)
}

fn resolve_relative<'s>(item: &'s Value, path: &PathExpr) -> Option<&'s Value> {
    resolve_segments(item, &path.segments)
}

fn resolve_segments<'s>(mut value: &'s Value, segments: &[String]) -> Option<&'s Value> {
    for segment in segments {
        value = value.as_object()?.get(segment)?;
    }
    Some(value)
}

/// Text-hole coercion: strings verbatim, numbers shortest round-trip,
/// booleans as `true`/`false`, missing or null as the empty string,
/// arrays/objects as compact JSON.
fn coerce_text(value: Option<&Value>) -> Arc<str> {
    match value {
        None | Some(Value::Null) => Arc::from(""),
        Some(Value::String(s)) => Arc::from(s.as_str()),
        Some(Value::Bool(b)) => Arc::from(if *b { "true" } else { "false" }),
        Some(Value::Number(n)) => Arc::from(n.to_string()),
        Some(other) => Arc::from(serde_json::to_string(other).expect("state json").as_str()),
    }
}

fn coerce_prop(value: Option<&Value>) -> PropValue {
    match value {
        None | Some(Value::Null) => PropValue::Str(Arc::from("")),
        Some(Value::String(s)) => PropValue::Str(Arc::from(s.as_str())),
        Some(Value::Bool(b)) => PropValue::Bool(*b),
        Some(Value::Number(n)) => match n.as_f64() {
            Some(f) => PropValue::Num(f),
            None => PropValue::Str(Arc::from(n.to_string().as_str())),
        },
        Some(other) => PropValue::Str(Arc::from(
            serde_json::to_string(other).expect("state json").as_str(),
        )),
    }
}

/// Boolean coercion for branch conditions: null, false, 0, and "" are false.
fn truthy(value: &Value) -> bool {
    match value {
        Value::Null => false,
        Value::Bool(b) => *b,
        Value::Number(n) => n.as_f64().map(|f| f != 0.0).unwrap_or(true),
        Value::String(s) => !s.is_empty(),
        Value::Array(_) | Value::Object(_) => true,
    }
}

// ---------------------------------------------------------------------------
// Reactive list
// ---------------------------------------------------------------------------

#[derive(Debug, Error, PartialEq)]
pub enum ListError {
    #[error("index {index} out of bounds for list of length {len}")]
    IndexOutOfBounds { index: usize, len: usize },
    #[error(transparent)]
    Instantiate(#[from] InstantiateError),
}

/// A list handle that records imperative edits eagerly and emits them as a
/// delta on the next snapshot, so rendering cost is proportional to the edit
/// count rather than the list length.
///
/// Pending ops are consumed exactly once per snapshot; a dropped snapshot
/// loses its deltas (one-shot render semantics).
pub struct ReactiveList {
    items: Vec<Value>,
    children: Vec<VNode>,
    pending: Vec<DeltaOp>,
    body: Instr,
    item_name: String,
    key_path: PathExpr,
    hoisted: Vec<VNode>,
}

impl ReactiveList {
    /// `body` renders one item (an element instruction); `key_path` is
    /// resolved relative to each item.
    pub fn new(
        body: Instr,
        item_name: impl Into<String>,
        key_path: PathExpr,
        hoisted: Vec<VNode>,
    ) -> Self {
        assert!(
            matches!(body, Instr::MakeEl { .. }),
            "list body must be an element instruction"
        );
        ReactiveList {
            items: Vec::new(),
            children: Vec::new(),
            pending: Vec::new(),
            body,
            item_name: item_name.into(),
            key_path,
            hoisted,
        }
    }

    /// Adopt the first each-block of a compiled module as the list template.
    pub fn from_module(module: &CompiledModule) -> Option<ReactiveList> {
        fn find_each(instr: &Instr) -> Option<&Instr> {
            match instr {
                Instr::ForEach { .. } => Some(instr),
                Instr::MakeEl { children, .. } => children.iter().find_map(find_each),
                Instr::Branch {
                    then_branch,
                    else_branch,
                    ..
                } => then_branch.iter().chain(else_branch).find_map(find_each),
                _ => None,
            }
        }
        let Instr::ForEach {
            item, key, body, ..
        } = find_each(&module.program)?
        else {
            unreachable!()
        };
        Some(ReactiveList::new(
            (**body).clone(),
            item.clone(),
            key.clone(),
            module.hoisted.clone(),
        ))
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    fn render_item(&self, item: &Value) -> Result<VNode, InstantiateError> {
        let key = coerce_text(resolve_relative(item, &self.key_path));
        let mut scopes: Scopes = vec![(self.item_name.as_str(), item)];
        eval_element(&self.body, &self.hoisted, &Value::Null, &mut scopes, Some(key))
    }

    pub fn insert(&mut self, index: usize, item: Value) -> Result<(), ListError> {
        if index > self.items.len() {
            return Err(ListError::IndexOutOfBounds {
                index,
                len: self.items.len(),
            });
        }
        let node = self.render_item(&item)?;
        self.items.insert(index, item);
        self.children.insert(index, node.clone());
        self.pending.push(DeltaOp::Insert(index, node));
        Ok(())
    }

    pub fn update(&mut self, index: usize, item: Value) -> Result<(), ListError> {
        if index >= self.items.len() {
            return Err(ListError::IndexOutOfBounds {
                index,
                len: self.items.len(),
            });
        }
        let node = self.render_item(&item)?;
        self.items[index] = item;
        self.children[index] = node.clone();
        self.pending.push(DeltaOp::Update(index, node));
        Ok(())
    }

    pub fn remove(&mut self, index: usize) -> Result<(), ListError> {
        if index >= self.items.len() {
            return Err(ListError::IndexOutOfBounds {
                index,
                len: self.items.len(),
            });
        }
        self.items.remove(index);
        self.children.remove(index);
        self.pending.push(DeltaOp::Remove(index));
        Ok(())
    }

    /// Parent element carrying the pending delta (then cleared). Children are
    /// left unrealized: the differ's delta bypass never reads them, keeping
    /// snapshot cost proportional to the edit count. Not for `realize`.
    pub fn snapshot(&mut self, parent_tag: impl Into<Arc<str>>, parent_props: Props) -> VNode {
        let delta = std::mem::take(&mut self.pending);
        element_with_flag(
            parent_tag.into(),
            vnode::shared_props(parent_props),
            Vec::new(),
            None,
            Flag::OnlyKeyedChildren,
            Some(delta),
            None,
        )
    }

    /// Oracle/debug form of [`snapshot`](Self::snapshot) whose children
    /// reflect the full current backing array.
    pub fn snapshot_realized(
        &mut self,
        parent_tag: impl Into<Arc<str>>,
        parent_props: Props,
    ) -> VNode {
        let delta = std::mem::take(&mut self.pending);
        element_with_flag(
            parent_tag.into(),
            vnode::shared_props(parent_props),
            self.children.clone(),
            None,
            Flag::OnlyKeyedChildren,
            Some(delta),
            None,
        )
    }
}
