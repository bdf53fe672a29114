//! Headless DOM: realizes virtual nodes into mutable trees, applies patches
//! (second pass of two-pass rendering), and logs every mutation with a cost
//! category. There is no layout, no events, no HTML compliance — this DOM
//! exists for equality checking and op accounting.

use std::sync::Arc;

use indexmap::IndexMap;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::diff::PatchOp;
use crate::vnode::{ElementNode, Flag, PropValue, VNode};

#[derive(Debug)]
pub struct DomNode {
    pub id: u64,
    pub kind: DomKind,
}

#[derive(Debug)]
pub enum DomKind {
    Element(DomElement),
    Text(DomText),
}

#[derive(Debug)]
pub struct DomElement {
    pub tag: Arc<str>,
    /// Attribute name → rendered value, insertion-ordered.
    pub attrs: IndexMap<String, String>,
    /// Listener prop name → opaque handler id, insertion-ordered.
    pub listeners: IndexMap<String, u64>,
    pub children: Vec<DomNode>,
}

#[derive(Debug)]
pub struct DomText {
    pub content: Arc<str>,
}

impl DomNode {
    pub fn as_element(&self) -> Option<&DomElement> {
        match &self.kind {
            DomKind::Element(el) => Some(el),
            DomKind::Text(_) => None,
        }
    }
}

/// Mutation cost category; structural ops are the ones a browser would pay
/// reflow for, the rest are value writes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpCategory {
    Structural,
    Attribute,
    Text,
    Listener,
}

impl OpCategory {
    pub fn name(self) -> &'static str {
        match self {
            OpCategory::Structural => "structural",
            OpCategory::Attribute => "attribute",
            OpCategory::Text => "text",
            OpCategory::Listener => "listener",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomOpKind {
    CreateElement { id: u64, tag: Arc<str> },
    CreateText { id: u64, text: Arc<str> },
    SetAttribute { id: u64, name: String, value: String },
    RemoveAttribute { id: u64, name: String },
    SetText { id: u64, text: Arc<str> },
    InsertBefore { parent: u64, child: u64, before: Option<u64> },
    RemoveChild { parent: u64, child: u64 },
    ReplaceChild { parent: Option<u64>, old: u64, new: u64 },
    AddListener { id: u64, name: String, handler: u64 },
    RemoveListener { id: u64, name: String, handler: u64 },
}

/// One logged DOM mutation, appended in execution order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomOp {
    pub kind: DomOpKind,
    pub category: OpCategory,
}

/// Per-category tallies plus finer-grained structural counts. `moves` counts
/// logical moves: one remove + reinsert pair logged by `MoveChild`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounters {
    pub structural: u64,
    pub attribute: u64,
    pub text: u64,
    pub listener: u64,
    pub creates: u64,
    pub inserts: u64,
    pub removes: u64,
    pub replaces: u64,
    pub moves: u64,
}

impl OpCounters {
    pub fn total(&self) -> u64 {
        self.structural + self.attribute + self.text + self.listener
    }

    /// Difference since an earlier snapshot.
    pub fn since(&self, earlier: &OpCounters) -> OpCounters {
        OpCounters {
            structural: self.structural - earlier.structural,
            attribute: self.attribute - earlier.attribute,
            text: self.text - earlier.text,
            listener: self.listener - earlier.listener,
            creates: self.creates - earlier.creates,
            inserts: self.inserts - earlier.inserts,
            removes: self.removes - earlier.removes,
            replaces: self.replaces - earlier.replaces,
            moves: self.moves - earlier.moves,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatchError {
    /// A patch path did not resolve; always a diff/patch contract bug.
    #[error("unresolvable patch path {path:?}: {reason}")]
    PatchPathError { path: Vec<usize>, reason: String },
}

fn path_error(path: &[usize], reason: impl Into<String>) -> PatchError {
    PatchError::PatchPathError {
        path: path.to_vec(),
        reason: reason.into(),
    }
}

/// A document: id allocator, append-only op log, and counters. The realized
/// root tree is owned by the caller so a document can serve multiple
/// realize/apply cycles without self-borrow knots.
#[derive(Debug, Default)]
pub struct Document {
    next_id: u64,
    pub log: Vec<DomOp>,
    pub counters: OpCounters,
}

impl Document {
    pub fn new() -> Self {
        Document::default()
    }

    fn fresh_id(&mut self) -> u64 {
        self.next_id += 1;
        self.next_id
    }

    fn push_op(&mut self, kind: DomOpKind, category: OpCategory) {
        match category {
            OpCategory::Structural => self.counters.structural += 1,
            OpCategory::Attribute => self.counters.attribute += 1,
            OpCategory::Text => self.counters.text += 1,
            OpCategory::Listener => self.counters.listener += 1,
        }
        match &kind {
            DomOpKind::CreateElement { .. } | DomOpKind::CreateText { .. } => {
                self.counters.creates += 1
            }
            DomOpKind::InsertBefore { .. } => self.counters.inserts += 1,
            DomOpKind::RemoveChild { .. } => self.counters.removes += 1,
            DomOpKind::ReplaceChild { .. } => self.counters.replaces += 1,
            _ => {}
        }
        self.log.push(DomOp { kind, category });
    }

    /// Build a fresh DOM subtree mirroring `node`. Delta lists are ignored;
    /// they are a diff-time concern. Every mutation is logged.
    pub fn realize(&mut self, node: &VNode) -> DomNode {
        match node {
            VNode::Text(content) => {
                let id = self.fresh_id();
                self.push_op(
                    DomOpKind::CreateText {
                        id,
                        text: content.clone(),
                    },
                    OpCategory::Structural,
                );
                DomNode {
                    id,
                    kind: DomKind::Text(DomText {
                        content: content.clone(),
                    }),
                }
            }
            VNode::Element(el) => self.realize_element(el),
        }
    }

    fn realize_element(&mut self, el: &ElementNode) -> DomNode {
        let id = self.fresh_id();
        self.push_op(
            DomOpKind::CreateElement {
                id,
                tag: el.tag.clone(),
            },
            OpCategory::Structural,
        );
        let mut dom = DomElement {
            tag: el.tag.clone(),
            attrs: IndexMap::new(),
            listeners: IndexMap::new(),
            children: Vec::with_capacity(el.children.len()),
        };
        for (name, value) in el.props.iter() {
            match value {
                PropValue::EventRef(handler) => {
                    dom.listeners.insert(name.clone(), *handler);
                    self.push_op(
                        DomOpKind::AddListener {
                            id,
                            name: name.clone(),
                            handler: *handler,
                        },
                        OpCategory::Listener,
                    );
                }
                other => {
                    let rendered = other.render();
                    dom.attrs.insert(name.clone(), rendered.clone());
                    self.push_op(
                        DomOpKind::SetAttribute {
                            id,
                            name: name.clone(),
                            value: rendered,
                        },
                        OpCategory::Attribute,
                    );
                }
            }
        }
        if el.effective_flag() == Flag::OnlyTextChildren {
            // Text-only elements store one joined text slot; filling it is a
            // single text write, not per-child structural work.
            let text = el.joined_text();
            let slot_id = self.fresh_id();
            self.push_op(
                DomOpKind::SetText {
                    id,
                    text: text.clone(),
                },
                OpCategory::Text,
            );
            dom.children.push(DomNode {
                id: slot_id,
                kind: DomKind::Text(DomText { content: text }),
            });
        } else {
            for child in &el.children {
                let child_dom = self.realize(child);
                self.push_op(
                    DomOpKind::InsertBefore {
                        parent: id,
                        child: child_dom.id,
                        before: None,
                    },
                    OpCategory::Structural,
                );
                dom.children.push(child_dom);
            }
        }
        DomNode {
            id,
            kind: DomKind::Element(dom),
        }
    }

    /// Apply a patch produced by diffing against the tree that realized
    /// `root`, strictly in list order.
    pub fn apply(&mut self, root: &mut DomNode, patch: &[PatchOp]) -> Result<(), PatchError> {
        for op in patch {
            self.apply_op(root, op)?;
        }
        Ok(())
    }

    fn apply_op(&mut self, root: &mut DomNode, op: &PatchOp) -> Result<(), PatchError> {
        match op {
            PatchOp::Replace { path, node } => {
                let new = self.realize(node);
                if path.is_empty() {
                    self.push_op(
                        DomOpKind::ReplaceChild {
                            parent: None,
                            old: root.id,
                            new: new.id,
                        },
                        OpCategory::Structural,
                    );
                    *root = new;
                } else {
                    let (parent_id, slot) = child_slot(root, path)?;
                    self.push_op(
                        DomOpKind::ReplaceChild {
                            parent: Some(parent_id),
                            old: slot.id,
                            new: new.id,
                        },
                        OpCategory::Structural,
                    );
                    *slot = new;
                }
                Ok(())
            }
            PatchOp::SetText { path, text } => {
                let node = resolve_mut(root, path)?;
                match &mut node.kind {
                    DomKind::Text(t) => {
                        t.content = text.clone();
                        let id = node.id;
                        self.push_op(
                            DomOpKind::SetText {
                                id,
                                text: text.clone(),
                            },
                            OpCategory::Text,
                        );
                    }
                    DomKind::Element(el) => {
                        // Whole-text-slot write.
                        if let [DomNode {
                            kind: DomKind::Text(t),
                            ..
                        }] = el.children.as_mut_slice()
                        {
                            t.content = text.clone();
                        } else {
                            let slot_id = self.fresh_id();
                            el.children = vec![DomNode {
                                id: slot_id,
                                kind: DomKind::Text(DomText {
                                    content: text.clone(),
                                }),
                            }];
                        }
                        let id = node.id;
                        self.push_op(
                            DomOpKind::SetText {
                                id,
                                text: text.clone(),
                            },
                            OpCategory::Text,
                        );
                    }
                }
                Ok(())
            }
            PatchOp::SetProp { path, name, value } => {
                let node = resolve_mut(root, path)?;
                let id = node.id;
                let el = element_mut(node, path)?;
                match value {
                    PropValue::EventRef(handler) => {
                        if el.attrs.shift_remove(name).is_some() {
                            self.push_op(
                                DomOpKind::RemoveAttribute {
                                    id,
                                    name: name.clone(),
                                },
                                OpCategory::Attribute,
                            );
                        }
                        if let Some(old) = el.listeners.insert(name.clone(), *handler) {
                            self.push_op(
                                DomOpKind::RemoveListener {
                                    id,
                                    name: name.clone(),
                                    handler: old,
                                },
                                OpCategory::Listener,
                            );
                        }
                        self.push_op(
                            DomOpKind::AddListener {
                                id,
                                name: name.clone(),
                                handler: *handler,
                            },
                            OpCategory::Listener,
                        );
                    }
                    other => {
                        if let Some(old) = el.listeners.shift_remove(name) {
                            self.push_op(
                                DomOpKind::RemoveListener {
                                    id,
                                    name: name.clone(),
                                    handler: old,
                                },
                                OpCategory::Listener,
                            );
                        }
                        let rendered = other.render();
                        el.attrs.insert(name.clone(), rendered.clone());
                        self.push_op(
                            DomOpKind::SetAttribute {
                                id,
                                name: name.clone(),
                                value: rendered,
                            },
                            OpCategory::Attribute,
                        );
                    }
                }
                Ok(())
            }
            PatchOp::RemoveProp { path, name } => {
                let node = resolve_mut(root, path)?;
                let id = node.id;
                let el = element_mut(node, path)?;
                if let Some(handler) = el.listeners.shift_remove(name) {
                    self.push_op(
                        DomOpKind::RemoveListener {
                            id,
                            name: name.clone(),
                            handler,
                        },
                        OpCategory::Listener,
                    );
                } else if el.attrs.shift_remove(name).is_some() {
                    self.push_op(
                        DomOpKind::RemoveAttribute {
                            id,
                            name: name.clone(),
                        },
                        OpCategory::Attribute,
                    );
                }
                Ok(())
            }
            PatchOp::InsertChild { path, index, node } => {
                let new = self.realize(node);
                let target = resolve_mut(root, path)?;
                let parent_id = target.id;
                let el = element_mut(target, path)?;
                if *index > el.children.len() {
                    return Err(path_error(path, format!("insert index {index} out of bounds")));
                }
                let before = el.children.get(*index).map(|c| c.id);
                self.push_op(
                    DomOpKind::InsertBefore {
                        parent: parent_id,
                        child: new.id,
                        before,
                    },
                    OpCategory::Structural,
                );
                el.children.insert(*index, new);
                Ok(())
            }
            PatchOp::RemoveChild { path, index } => {
                let target = resolve_mut(root, path)?;
                let parent_id = target.id;
                let el = element_mut(target, path)?;
                if *index >= el.children.len() {
                    return Err(path_error(path, format!("remove index {index} out of bounds")));
                }
                let removed = el.children.remove(*index);
                self.push_op(
                    DomOpKind::RemoveChild {
                        parent: parent_id,
                        child: removed.id,
                    },
                    OpCategory::Structural,
                );
                Ok(())
            }
            PatchOp::MoveChild { path, from, to } => {
                let target = resolve_mut(root, path)?;
                let parent_id = target.id;
                let el = element_mut(target, path)?;
                if *from >= el.children.len() {
                    return Err(path_error(path, format!("move source {from} out of bounds")));
                }
                let node = el.children.remove(*from);
                if *to > el.children.len() {
                    return Err(path_error(path, format!("move target {to} out of bounds")));
                }
                let child_id = node.id;
                self.push_op(
                    DomOpKind::RemoveChild {
                        parent: parent_id,
                        child: child_id,
                    },
                    OpCategory::Structural,
                );
                let before = el.children.get(*to).map(|c| c.id);
                el.children.insert(*to, node);
                self.push_op(
                    DomOpKind::InsertBefore {
                        parent: parent_id,
                        child: child_id,
                        before,
                    },
                    OpCategory::Structural,
                );
                self.counters.moves += 1;
                Ok(())
            }
        }
    }

    /// Op log as JSON lines, one op per line.
    pub fn log_as_jsonl(&self) -> String {
        let mut out = String::new();
        for op in &self.log {
            out.push_str(&serde_json::to_string(&op_to_value(op)).expect("op json"));
            out.push('\n');
        }
        out
    }
}

fn resolve_mut<'a>(root: &'a mut DomNode, path: &[usize]) -> Result<&'a mut DomNode, PatchError> {
    let mut node = root;
    for (depth, &index) in path.iter().enumerate() {
        let el = match &mut node.kind {
            DomKind::Element(el) => el,
            DomKind::Text(_) => {
                return Err(path_error(path, format!("text node at depth {depth}")))
            }
        };
        node = el
            .children
            .get_mut(index)
            .ok_or_else(|| path_error(path, format!("index {index} out of bounds at depth {depth}")))?;
    }
    Ok(node)
}

/// Resolve a non-empty path to (parent id, mutable child slot).
fn child_slot<'a>(root: &'a mut DomNode, path: &[usize]) -> Result<(u64, &'a mut DomNode), PatchError> {
    let (last, parents) = path.split_last().expect("child_slot requires non-empty path");
    let parent = resolve_mut(root, parents)?;
    let parent_id = parent.id;
    let el = match &mut parent.kind {
        DomKind::Element(el) => el,
        DomKind::Text(_) => return Err(path_error(path, "parent is a text node")),
    };
    let slot = el
        .children
        .get_mut(*last)
        .ok_or_else(|| path_error(path, format!("index {last} out of bounds")))?;
    Ok((parent_id, slot))
}

fn element_mut<'a>(node: &'a mut DomNode, path: &[usize]) -> Result<&'a mut DomElement, PatchError> {
    match &mut node.kind {
        DomKind::Element(el) => Ok(el),
        DomKind::Text(_) => Err(path_error(path, "expected an element")),
    }
}

/// Deterministic text form used as the byte-equality oracle everywhere.
/// Attributes in insertion order, listeners after attributes, uniform close
/// tags, no whitespace insertion, no escaping.
pub fn serialize(node: &DomNode) -> String {
    let mut out = String::new();
    serialize_into(node, &mut out);
    out
}

fn serialize_into(node: &DomNode, out: &mut String) {
    match &node.kind {
        DomKind::Text(t) => out.push_str(&t.content),
        DomKind::Element(el) => {
            out.push('<');
            out.push_str(&el.tag);
            for (name, value) in &el.attrs {
                out.push(' ');
                out.push_str(name);
                out.push_str("=\"");
                out.push_str(value);
                out.push('"');
            }
            for (name, handler) in &el.listeners {
                out.push(' ');
                out.push_str(name);
                out.push_str(&format!("=\"evt:{handler}\""));
            }
            out.push('>');
            for child in &el.children {
                serialize_into(child, out);
            }
            out.push_str("</");
            out.push_str(&el.tag);
            out.push('>');
        }
    }
}

fn op_to_value(op: &DomOp) -> Value {
    let mut map = Map::new();
    let kind_name = match &op.kind {
        DomOpKind::CreateElement { .. } => "create_element",
        DomOpKind::CreateText { .. } => "create_text",
        DomOpKind::SetAttribute { .. } => "set_attribute",
        DomOpKind::RemoveAttribute { .. } => "remove_attribute",
        DomOpKind::SetText { .. } => "set_text",
        DomOpKind::InsertBefore { .. } => "insert_before",
        DomOpKind::RemoveChild { .. } => "remove_child",
        DomOpKind::ReplaceChild { .. } => "replace_child",
        DomOpKind::AddListener { .. } => "add_listener",
        DomOpKind::RemoveListener { .. } => "remove_listener",
    };
    map.insert("op".into(), Value::String(kind_name.into()));
    match &op.kind {
        DomOpKind::CreateElement { id, tag } => {
            map.insert("id".into(), (*id).into());
            map.insert("tag".into(), Value::String(tag.to_string()));
        }
        DomOpKind::CreateText { id, text } => {
            map.insert("id".into(), (*id).into());
            map.insert("text".into(), Value::String(text.to_string()));
        }
        DomOpKind::SetAttribute { id, name, value } => {
            map.insert("id".into(), (*id).into());
            map.insert("name".into(), Value::String(name.clone()));
            map.insert("value".into(), Value::String(value.clone()));
        }
        DomOpKind::RemoveAttribute { id, name } => {
            map.insert("id".into(), (*id).into());
            map.insert("name".into(), Value::String(name.clone()));
        }
        DomOpKind::SetText { id, text } => {
            map.insert("id".into(), (*id).into());
            map.insert("text".into(), Value::String(text.to_string()));
        }
        DomOpKind::InsertBefore { parent, child, before } => {
            map.insert("parent".into(), (*parent).into());
            map.insert("child".into(), (*child).into());
            map.insert(
                "before".into(),
                before.map(Value::from).unwrap_or(Value::Null),
            );
        }
        DomOpKind::RemoveChild { parent, child } => {
            map.insert("parent".into(), (*parent).into());
            map.insert("child".into(), (*child).into());
        }
        DomOpKind::ReplaceChild { parent, old, new } => {
            map.insert(
                "parent".into(),
                parent.map(Value::from).unwrap_or(Value::Null),
            );
            map.insert("old".into(), (*old).into());
            map.insert("new".into(), (*new).into());
        }
        DomOpKind::AddListener { id, name, handler } | DomOpKind::RemoveListener { id, name, handler } => {
            map.insert("id".into(), (*id).into());
            map.insert("name".into(), Value::String(name.clone()));
            map.insert("handler".into(), (*handler).into());
        }
    }
    map.insert("cat".into(), Value::String(op.category.name().into()));
    Value::Object(map)
}
