//! Immutable virtual nodes: the tree representation shared by the template
//! compiler, the differ, and the headless DOM.
//!
//! Nodes are reference-counted and deeply immutable after construction, so
//! subtrees can be shared freely between successive versions of a tree.
//! Shared identity (pointer equality) is what lets the differ skip hoisted
//! constants without descending into them.

use std::collections::HashSet;
use std::hash::{BuildHasherDefault, Hasher};
use std::sync::{Arc, OnceLock};

use indexmap::IndexMap;
use thiserror::Error;

pub mod json;

/// Ordered property map. Iteration order is insertion order, which keeps
/// serialization, diffing, and DOM attribute order deterministic.
pub type Props = IndexMap<String, PropValue>;

/// Elements hold their props behind an `Arc`, so an unchanged prop map is
/// shared across tree versions for free and the differ can skip it by
/// pointer identity.
pub type SharedProps = Arc<Props>;

/// The shared empty prop map; most nodes carry no props.
pub fn empty_props() -> SharedProps {
    static EMPTY: OnceLock<SharedProps> = OnceLock::new();
    EMPTY.get_or_init(|| Arc::new(Props::new())).clone()
}

/// Wrap a prop map for sharing, reusing the global empty map.
pub fn shared_props(props: Props) -> SharedProps {
    if props.is_empty() {
        empty_props()
    } else {
        Arc::new(props)
    }
}

/// A property value. Event handlers are opaque integer references: the
/// headless DOM never invokes them, it only observes attach/detach.
#[derive(Clone, Debug)]
pub enum PropValue {
    Str(Arc<str>),
    Bool(bool),
    Num(f64),
    EventRef(u64),
}

impl PropValue {
    pub fn str(s: impl AsRef<str>) -> Self {
        PropValue::Str(Arc::from(s.as_ref()))
    }

    /// Deterministic attribute rendering used by the DOM layer.
    pub fn render(&self) -> String {
        match self {
            PropValue::Str(s) => s.to_string(),
            PropValue::Bool(b) => b.to_string(),
            // `{}` on f64 is shortest round-trip in Rust.
            PropValue::Num(n) => format!("{n}"),
            PropValue::EventRef(id) => format!("evt:{id}"),
        }
    }
}

impl PartialEq for PropValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (PropValue::Str(a), PropValue::Str(b)) => a == b,
            (PropValue::Bool(a), PropValue::Bool(b)) => a == b,
            // Bit equality keeps this a proper equivalence relation.
            (PropValue::Num(a), PropValue::Num(b)) => a.to_bits() == b.to_bits(),
            (PropValue::EventRef(a), PropValue::EventRef(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for PropValue {}

/// Shape flag selecting a cheaper diff path for an element's child list.
///
/// `Static` marks a hoisted constant (assigned only by the compiler); the
/// shape of its children is recoverable via [`ElementNode::effective_flag`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flag {
    AnyChildren,
    NoChildren,
    OnlyTextChildren,
    OnlyKeyedChildren,
    Static,
}

impl Flag {
    pub fn name(self) -> &'static str {
        match self {
            Flag::AnyChildren => "ANY_CHILDREN",
            Flag::NoChildren => "NO_CHILDREN",
            Flag::OnlyTextChildren => "ONLY_TEXT_CHILDREN",
            Flag::OnlyKeyedChildren => "ONLY_KEYED_CHILDREN",
            Flag::Static => "STATIC",
        }
    }

    pub fn from_name(name: &str) -> Option<Flag> {
        Some(match name {
            "ANY_CHILDREN" => Flag::AnyChildren,
            "NO_CHILDREN" => Flag::NoChildren,
            "ONLY_TEXT_CHILDREN" => Flag::OnlyTextChildren,
            "ONLY_KEYED_CHILDREN" => Flag::OnlyKeyedChildren,
            "STATIC" => Flag::Static,
            _ => return None,
        })
    }
}

/// One imperative child-list edit. Indices refer to the child list state at
/// the moment the op is applied, so earlier ops shift indices for later ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeltaOp {
    Insert(usize, VNode),
    Update(usize, VNode),
    Remove(usize),
}

/// A virtual tree node: text content or an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VNode {
    Text(Arc<str>),
    Element(Arc<ElementNode>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementNode {
    pub tag: Arc<str>,
    pub props: SharedProps,
    pub children: Vec<VNode>,
    pub key: Option<Arc<str>>,
    pub flag: Flag,
    /// When present, applied in order by the differ instead of diffing
    /// `children` — the imperative escape hatch for feed-like updates.
    pub delta: Option<Vec<DeltaOp>>,
    /// Index into the owning module's hoisted-constant table.
    pub hoist_id: Option<u32>,
}

impl ElementNode {
    /// The shape flag with `Static` resolved to the underlying child shape.
    pub fn effective_flag(&self) -> Flag {
        match self.flag {
            Flag::Static => infer_flag(&self.children),
            f => f,
        }
    }

    /// Concatenated content of all text children. Meaningful for
    /// `OnlyTextChildren` elements, where the DOM stores one text slot.
    pub fn joined_text(&self) -> Arc<str> {
        if self.children.len() == 1 {
            if let VNode::Text(s) = &self.children[0] {
                return s.clone();
            }
        }
        let mut out = String::new();
        for child in &self.children {
            if let VNode::Text(s) = child {
                out.push_str(s);
            }
        }
        Arc::from(out)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VNodeError {
    #[error("duplicate key `{0}` among keyed siblings")]
    DuplicateKey(String),
    #[error("invalid tag `{0}`: expected a nonempty lowercase ascii name")]
    InvalidTag(String),
}

/// Build a text node.
pub fn text(content: impl AsRef<str>) -> VNode {
    VNode::Text(Arc::from(content.as_ref()))
}

/// Infer the shape flag from a child list. Never returns `Static`; only the
/// compiler assigns that.
pub fn infer_flag(children: &[VNode]) -> Flag {
    if children.is_empty() {
        return Flag::NoChildren;
    }
    if children.iter().all(|c| matches!(c, VNode::Text(_))) {
        return Flag::OnlyTextChildren;
    }
    let all_keyed = children.iter().all(|c| match c {
        VNode::Element(el) => el.key.is_some(),
        VNode::Text(_) => false,
    });
    if all_keyed {
        return Flag::OnlyKeyedChildren;
    }
    Flag::AnyChildren
}

/// Build an element with its shape flag inferred from `children`.
///
/// Fails with [`VNodeError::DuplicateKey`] when every child is keyed but two
/// siblings share a key.
pub fn make_element(
    tag: impl Into<Arc<str>>,
    props: impl Into<SharedProps>,
    children: Vec<VNode>,
    key: Option<Arc<str>>,
    delta: Option<Vec<DeltaOp>>,
) -> Result<VNode, VNodeError> {
    let tag = tag.into();
    if !valid_tag(&tag) {
        return Err(VNodeError::InvalidTag(tag.to_string()));
    }
    let flag = infer_flag(&children);
    if flag == Flag::OnlyKeyedChildren {
        check_unique_keys(&children)?;
    }
    Ok(VNode::Element(Arc::new(ElementNode {
        tag,
        props: props.into(),
        children,
        key,
        flag,
        delta,
        hoist_id: None,
    })))
}

/// Constructor for callers that already know the flag (compiler, runtime).
/// Keyed uniqueness must be checked by the caller where it applies.
pub(crate) fn element_with_flag(
    tag: Arc<str>,
    props: SharedProps,
    children: Vec<VNode>,
    key: Option<Arc<str>>,
    flag: Flag,
    delta: Option<Vec<DeltaOp>>,
    hoist_id: Option<u32>,
) -> VNode {
    VNode::Element(Arc::new(ElementNode {
        tag,
        props,
        children,
        key,
        flag,
        delta,
        hoist_id,
    }))
}

fn valid_tag(tag: &str) -> bool {
    let mut bytes = tag.bytes();
    match bytes.next() {
        Some(b) if b.is_ascii_lowercase() => {}
        _ => return false,
    }
    bytes.all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
}

/// FNV-1a; keys are short strings and this check sits on the tree-building
/// hot path, where the default hasher's setup cost dominates.
#[derive(Default)]
pub(crate) struct FnvHasher(u64);

impl Hasher for FnvHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        let mut hash = if self.0 == 0 { 0xcbf29ce484222325 } else { self.0 };
        for &byte in bytes {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
        self.0 = hash;
    }
}

pub(crate) fn check_unique_keys(children: &[VNode]) -> Result<(), VNodeError> {
    let mut seen: HashSet<&str, BuildHasherDefault<FnvHasher>> =
        HashSet::with_capacity_and_hasher(children.len(), BuildHasherDefault::default());
    for child in children {
        if let VNode::Element(el) = child {
            if let Some(key) = &el.key {
                if !seen.insert(key) {
                    return Err(VNodeError::DuplicateKey(key.to_string()));
                }
            }
        }
    }
    Ok(())
}

/// Deep structural equality, including flags, keys, and delta lists.
pub fn structural_eq(a: &VNode, b: &VNode) -> bool {
    a == b
}

impl VNode {
    /// True when both handles point at the same allocation. Shared hoisted
    /// constants compare equal here across renders.
    pub fn ptr_eq(a: &VNode, b: &VNode) -> bool {
        match (a, b) {
            (VNode::Text(x), VNode::Text(y)) => Arc::ptr_eq(x, y),
            (VNode::Element(x), VNode::Element(y)) => Arc::ptr_eq(x, y),
            _ => false,
        }
    }

    /// Stable identity token for tests; equal tokens mean shared identity.
    pub fn identity_token(&self) -> usize {
        match self {
            VNode::Text(s) => Arc::as_ptr(s) as *const u8 as usize,
            VNode::Element(el) => Arc::as_ptr(el) as usize,
        }
    }

    pub fn as_element(&self) -> Option<&Arc<ElementNode>> {
        match self {
            VNode::Element(el) => Some(el),
            VNode::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&Arc<str>> {
        match self {
            VNode::Text(s) => Some(s),
            VNode::Element(_) => None,
        }
    }

    pub fn key(&self) -> Option<&Arc<str>> {
        match self {
            VNode::Element(el) => el.key.as_ref(),
            VNode::Text(_) => None,
        }
    }

    /// Total node count of the subtree (used by cost accounting in tests).
    pub fn size(&self) -> usize {
        match self {
            VNode::Text(_) => 1,
            VNode::Element(el) => 1 + el.children.iter().map(VNode::size).sum::<usize>(),
        }
    }
}
