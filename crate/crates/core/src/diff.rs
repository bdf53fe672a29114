//! First pass of two-pass rendering: compute a patch from (old, new) virtual
//! trees. Performs no DOM mutation.
//!
//! The fast engine path dispatches on shape flags, skips shared constants by
//! pointer identity, and translates delta lists directly into patch ops. The
//! naive path (used as a baseline and equivalence oracle) treats every child
//! list as `AnyChildren`, ignores deltas, and never short-circuits, but must
//! still produce a patch whose application renders identically.

use std::collections::HashMap;
use std::sync::Arc;

use crate::vnode::{DeltaOp, ElementNode, Flag, PropValue, Props, VNode};

/// Child-index path from the render root; empty addresses the root itself.
/// Indices refer to the list state after previously emitted ops, so a patch
/// applies strictly sequentially.
pub type Path = Vec<usize>;

/// One DOM mutation instruction.
///
/// `MoveChild { from, to }` removes the child at `from` and reinserts it at
/// `to` in the post-removal list.
#[derive(Clone, Debug, PartialEq)]
pub enum PatchOp {
    Replace { path: Path, node: VNode },
    SetText { path: Path, text: Arc<str> },
    SetProp { path: Path, name: String, value: PropValue },
    RemoveProp { path: Path, name: String },
    InsertChild { path: Path, index: usize, node: VNode },
    RemoveChild { path: Path, index: usize },
    MoveChild { path: Path, from: usize, to: usize },
}

/// Work counters for one diff call; all monotonically non-decreasing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DiffStats {
    /// Node pairs examined, plus the sizes of subtrees emitted in
    /// `Replace`/`InsertChild` payloads (those nodes are part of the diff's
    /// output and get realized by the patcher). Removed subtrees cost
    /// nothing.
    pub nodes_visited: u64,
    pub keyed_fast_path_hits: u64,
    pub flag_skips: u64,
    pub delta_bypasses: u64,
}

impl DiffStats {
    pub fn merge(&mut self, other: &DiffStats) {
        self.nodes_visited += other.nodes_visited;
        self.keyed_fast_path_hits += other.keyed_fast_path_hits;
        self.flag_skips += other.flag_skips;
        self.delta_bypasses += other.delta_bypasses;
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Fast,
    Naive,
}

/// Diff with all fast paths enabled (flags, identity skip, delta bypass).
pub fn diff(old: &VNode, new: &VNode) -> (Vec<PatchOp>, DiffStats) {
    run(Mode::Fast, old, new)
}

/// Diff with every fast path disabled: flags treated as `AnyChildren`,
/// deltas ignored, identity short-circuit off.
pub fn diff_naive(old: &VNode, new: &VNode) -> (Vec<PatchOp>, DiffStats) {
    run(Mode::Naive, old, new)
}

fn run(mode: Mode, old: &VNode, new: &VNode) -> (Vec<PatchOp>, DiffStats) {
    let mut differ = Differ {
        mode,
        ops: Vec::new(),
        stats: DiffStats::default(),
    };
    let mut path = Path::new();
    differ.node(old, new, &mut path);
    (differ.ops, differ.stats)
}

/// Diff two property maps: `SetProp` in new-map insertion order for
/// added/changed entries, then `RemoveProp` in old-map order for absent ones.
///
/// Attribute order is part of the rendered DOM, so when the surviving-key
/// order changes (or a key is inserted mid-order) the map is rebuilt —
/// every old prop removed, every new prop set — which restores new-map
/// order under the patcher's append-on-set semantics.
pub fn diff_props(old: &Props, new: &Props, path: &Path) -> Vec<PatchOp> {
    let mut ops = Vec::new();
    // Aligned maps (same keys in the same order, same attr/listener kinds)
    // are the overwhelmingly common case: compare values pairwise.
    let aligned = old.len() == new.len()
        && old.iter().zip(new.iter()).all(|((ka, va), (kb, vb))| {
            ka == kb
                && matches!(va, PropValue::EventRef(_)) == matches!(vb, PropValue::EventRef(_))
        });
    if aligned {
        for ((name, old_value), (_, new_value)) in old.iter().zip(new.iter()) {
            if old_value != new_value {
                ops.push(PatchOp::SetProp {
                    path: path.clone(),
                    name: name.clone(),
                    value: new_value.clone(),
                });
            }
        }
        return ops;
    }
    if props_order_diverges(old, new) {
        for (name, _) in old {
            ops.push(PatchOp::RemoveProp {
                path: path.clone(),
                name: name.clone(),
            });
        }
        for (name, value) in new {
            ops.push(PatchOp::SetProp {
                path: path.clone(),
                name: name.clone(),
                value: value.clone(),
            });
        }
        return ops;
    }
    for (name, value) in new {
        if old.get(name) != Some(value) {
            ops.push(PatchOp::SetProp {
                path: path.clone(),
                name: name.clone(),
                value: value.clone(),
            });
        }
    }
    for (name, _) in old {
        if !new.contains_key(name) {
            ops.push(PatchOp::RemoveProp {
                path: path.clone(),
                name: name.clone(),
            });
        }
    }
    ops
}

/// True when per-key set/remove ops cannot reproduce the rendered attribute
/// order. The DOM keeps attributes and listeners as two insertion-ordered
/// sequences, so the check runs on each projection: surviving names must
/// keep their relative order, and additions (including props that switch
/// between attribute and listener kind) must form a suffix, because the
/// patcher appends on set.
fn props_order_diverges(old: &Props, new: &Props) -> bool {
    fn project(props: &Props, listeners: bool) -> Vec<&str> {
        props
            .iter()
            .filter(|(_, v)| matches!(v, PropValue::EventRef(_)) == listeners)
            .map(|(k, _)| k.as_str())
            .collect()
    }
    seq_order_diverges(&project(old, false), &project(new, false))
        || seq_order_diverges(&project(old, true), &project(new, true))
}

fn seq_order_diverges(old: &[&str], new: &[&str]) -> bool {
    let old_set: std::collections::HashSet<&str> = old.iter().copied().collect();
    let new_set: std::collections::HashSet<&str> = new.iter().copied().collect();
    let mut survivors_new: Vec<&str> = Vec::new();
    let mut seen_added = false;
    for name in new {
        if old_set.contains(name) {
            if seen_added {
                return true;
            }
            survivors_new.push(name);
        } else {
            seen_added = true;
        }
    }
    let survivors_old: Vec<&str> = old
        .iter()
        .copied()
        .filter(|name| new_set.contains(name))
        .collect();
    survivors_old != survivors_new
}

/// Keyed reconciliation of two fully-keyed child lists (standalone wrapper).
pub fn diff_keyed(old: &[VNode], new: &[VNode], path: &Path) -> (Vec<PatchOp>, DiffStats) {
    let mut differ = Differ {
        mode: Mode::Fast,
        ops: Vec::new(),
        stats: DiffStats::default(),
    };
    let mut path = path.clone();
    differ.keyed(old, new, &mut path);
    (differ.ops, differ.stats)
}

struct Differ {
    mode: Mode,
    ops: Vec<PatchOp>,
    stats: DiffStats,
}

/// Child list as materialized by the DOM. `OnlyTextChildren` elements store a
/// single joined text slot, so both diff modes must address children through
/// this view to stay consistent with realized structure.
enum ChildView<'a> {
    Slice(&'a [VNode]),
    Joined([VNode; 1]),
}

impl ChildView<'_> {
    fn as_slice(&self) -> &[VNode] {
        match self {
            ChildView::Slice(s) => s,
            ChildView::Joined(one) => one,
        }
    }
}

fn child_view(el: &ElementNode) -> ChildView<'_> {
    if el.effective_flag() == Flag::OnlyTextChildren && el.children.len() != 1 {
        ChildView::Joined([VNode::Text(el.joined_text())])
    } else {
        ChildView::Slice(&el.children)
    }
}

impl Differ {
    fn emit_replace(&mut self, path: &Path, node: VNode) {
        // The replaced pair itself was already visited; charge the rest of
        // the payload subtree so every emitted node counts exactly once.
        self.stats.nodes_visited += node.size() as u64 - 1;
        self.ops.push(PatchOp::Replace {
            path: path.clone(),
            node,
        });
    }

    fn emit_insert(&mut self, path: &Path, index: usize, node: VNode) {
        self.stats.nodes_visited += node.size() as u64;
        self.ops.push(PatchOp::InsertChild {
            path: path.clone(),
            index,
            node,
        });
    }

    fn node(&mut self, old: &VNode, new: &VNode, path: &mut Path) {
        self.stats.nodes_visited += 1;
        if self.mode == Mode::Fast && VNode::ptr_eq(old, new) {
            return;
        }
        match (old, new) {
            (VNode::Text(a), VNode::Text(b)) => {
                if a != b {
                    self.ops.push(PatchOp::SetText {
                        path: path.clone(),
                        text: b.clone(),
                    });
                }
            }
            (VNode::Element(o), VNode::Element(n)) => {
                // A key names a distinct identity in both modes: positional
                // pairs with different keys are replaced, not edited.
                if o.tag != n.tag || o.key != n.key {
                    self.emit_replace(path, new.clone());
                    return;
                }
                if !Arc::ptr_eq(&o.props, &n.props) {
                    let prop_ops = diff_props(&o.props, &n.props, path);
                    self.ops.extend(prop_ops);
                }
                self.children(o, n, path);
            }
            _ => {
                self.emit_replace(path, new.clone());
            }
        }
    }

    fn children(&mut self, old: &ElementNode, new: &ElementNode, path: &mut Path) {
        if self.mode == Mode::Fast {
            if let Some(delta) = &new.delta {
                self.delta(delta, path);
                return;
            }
            match (old.effective_flag(), new.effective_flag()) {
                (Flag::NoChildren, Flag::NoChildren) => {
                    self.stats.flag_skips += 1;
                }
                (Flag::NoChildren | Flag::OnlyTextChildren, Flag::OnlyTextChildren) => {
                    let old_text = old.joined_text();
                    let new_text = new.joined_text();
                    if old_text != new_text {
                        self.ops.push(PatchOp::SetText {
                            path: path.clone(),
                            text: new_text,
                        });
                    }
                    self.stats.flag_skips += 1;
                }
                (Flag::OnlyKeyedChildren, Flag::OnlyKeyedChildren) => {
                    self.keyed(&old.children, &new.children, path);
                }
                _ => {
                    self.positional(old, new, path);
                }
            }
        } else {
            self.positional(old, new, path);
        }
    }

    /// Translate an imperative delta straight into patch ops; sibling lists
    /// are never traversed, so cost tracks the edit count.
    fn delta(&mut self, delta: &[DeltaOp], path: &mut Path) {
        for op in delta {
            match op {
                DeltaOp::Insert(index, node) => self.emit_insert(path, *index, node.clone()),
                DeltaOp::Update(index, node) => {
                    path.push(*index);
                    self.emit_replace(path, node.clone());
                    path.pop();
                }
                DeltaOp::Remove(index) => self.ops.push(PatchOp::RemoveChild {
                    path: path.clone(),
                    index: *index,
                }),
            }
        }
        self.stats.delta_bypasses += 1;
    }

    /// Pairwise diff by index, removing or appending the tail. Removals are
    /// emitted last-to-first so earlier indices stay valid.
    fn positional(&mut self, old: &ElementNode, new: &ElementNode, path: &mut Path) {
        let old_view = child_view(old);
        let new_view = child_view(new);
        let old_kids = old_view.as_slice();
        let new_kids = new_view.as_slice();
        let common = old_kids.len().min(new_kids.len());
        for index in (new_kids.len()..old_kids.len()).rev() {
            self.ops.push(PatchOp::RemoveChild {
                path: path.clone(),
                index,
            });
        }
        for index in old_kids.len()..new_kids.len() {
            self.emit_insert(path, index, new_kids[index].clone());
        }
        for index in 0..common {
            path.push(index);
            self.node(&old_kids[index], &new_kids[index], path);
            path.pop();
        }
    }

    /// Keyed reconciliation: skip the common prefix and suffix, build a key
    /// map for the middle window, remove vanished keys, then walk the new
    /// window right-to-left moving only nodes outside a longest increasing
    /// subsequence of surviving old positions. A pure permutation therefore
    /// costs at most n-1 moves and zero inserts/removes.
    fn keyed(&mut self, old: &[VNode], new: &[VNode], path: &mut Path) {
        self.stats.keyed_fast_path_hits += 1;
        fn key_of(v: &VNode) -> &Arc<str> {
            v.key().expect("keyed child without key")
        }
        fn same_key(a: &Arc<str>, b: &Arc<str>) -> bool {
            Arc::ptr_eq(a, b) || a == b
        }

        // Common prefix: positions are final, no structural op can touch
        // them, so recurse in place.
        let mut lo = 0;
        let mut old_hi = old.len();
        let mut new_hi = new.len();
        while lo < old_hi && lo < new_hi && same_key(key_of(&old[lo]), key_of(&new[lo])) {
            path.push(lo);
            self.node(&old[lo], &new[lo], path);
            path.pop();
            lo += 1;
        }
        // Suffix pairs settle at shifted indices, so they recurse after the
        // structural ops, like the middle window.
        let mut retained: Vec<(usize, usize)> = Vec::new();
        while old_hi > lo && new_hi > lo && same_key(key_of(&old[old_hi - 1]), key_of(&new[new_hi - 1]))
        {
            old_hi -= 1;
            new_hi -= 1;
            retained.push((old_hi, new_hi));
        }

        if lo < old_hi || lo < new_hi {
            let old_mid = &old[lo..old_hi];
            let new_mid = &new[lo..new_hi];

            let mut new_pos: HashMap<&str, usize> = HashMap::with_capacity(new_mid.len());
            for (rel, child) in new_mid.iter().enumerate() {
                new_pos.insert(key_of(child), rel);
            }
            let mut old_pos: HashMap<&str, usize> = HashMap::with_capacity(old_mid.len());
            for (rel, child) in old_mid.iter().enumerate() {
                old_pos.insert(key_of(child), rel);
            }

            // Remove vanished keys, highest index first.
            for (rel, child) in old_mid.iter().enumerate().rev() {
                if !new_pos.contains_key(key_of(child).as_ref() as &str) {
                    self.ops.push(PatchOp::RemoveChild {
                        path: path.clone(),
                        index: lo + rel,
                    });
                }
            }

            // Survivors in old order; this simulates the live child list.
            let mut sim: Vec<&str> = old_mid
                .iter()
                .map(|c| key_of(c).as_ref() as &str)
                .filter(|k| new_pos.contains_key(k))
                .collect();

            // LIS over old positions of survivors, taken in new order.
            let matched: Vec<(usize, usize)> = new_mid
                .iter()
                .enumerate()
                .filter_map(|(new_rel, child)| {
                    old_pos
                        .get(key_of(child).as_ref() as &str)
                        .map(|&old_rel| (new_rel, old_rel))
                })
                .collect();
            let seq: Vec<usize> = matched.iter().map(|&(_, old_rel)| old_rel).collect();
            let stable: std::collections::HashSet<usize> = lis_indices(&seq)
                .into_iter()
                .map(|ix| matched[ix].0)
                .collect();

            // Right-to-left walk. The anchor is the most recently settled
            // node, tracked by key so stable nodes cost O(1); the simulated
            // list is scanned only when an op is actually emitted.
            let mut anchor_key: Option<&str> = None;
            let find = |sim: &[&str], key: &str| -> usize {
                sim.iter()
                    .position(|&k| k == key)
                    .expect("key missing from simulation")
            };
            for (new_rel, child) in new_mid.iter().enumerate().rev() {
                let key = key_of(child).as_ref() as &str;
                match old_pos.get(key) {
                    None => {
                        let anchor = match anchor_key {
                            None => lo + sim.len(),
                            Some(ak) => lo + find(&sim, ak),
                        };
                        self.emit_insert(path, anchor, child.clone());
                        sim.insert(anchor - lo, key);
                        anchor_key = Some(key);
                    }
                    Some(&old_rel) => {
                        if !stable.contains(&new_rel) {
                            let anchor = match anchor_key {
                                None => lo + sim.len(),
                                Some(ak) => lo + find(&sim, ak),
                            };
                            let cur_rel = find(&sim, key);
                            let cur_abs = lo + cur_rel;
                            let to_abs = if cur_abs < anchor { anchor - 1 } else { anchor };
                            if cur_abs != to_abs {
                                self.ops.push(PatchOp::MoveChild {
                                    path: path.clone(),
                                    from: cur_abs,
                                    to: to_abs,
                                });
                                sim.remove(cur_rel);
                                sim.insert(to_abs - lo, key);
                            }
                        }
                        anchor_key = Some(key);
                        retained.push((lo + old_rel, lo + new_rel));
                    }
                }
            }
        }

        // Recurse into retained pairs at their settled positions, after all
        // structural ops for this parent.
        retained.sort_by_key(|&(_, final_index)| final_index);
        for (old_index, final_index) in retained {
            path.push(final_index);
            self.node(&old[old_index], &new[final_index], path);
            path.pop();
        }
    }
}

/// Indices into `seq` of one longest strictly increasing subsequence.
fn lis_indices(seq: &[usize]) -> Vec<usize> {
    // tails[k] = index of the smallest tail among increasing subsequences of
    // length k+1; prev links reconstruct the chain.
    let mut tails: Vec<usize> = Vec::new();
    let mut prev: Vec<usize> = vec![usize::MAX; seq.len()];
    for (i, &value) in seq.iter().enumerate() {
        let pos = tails.partition_point(|&t| seq[t] < value);
        if pos > 0 {
            prev[i] = tails[pos - 1];
        }
        if pos == tails.len() {
            tails.push(i);
        } else {
            tails[pos] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = *tails.last().unwrap_or(&usize::MAX);
    while cur != usize::MAX {
        out.push(cur);
        cur = prev[cur];
    }
    out.reverse();
    out
}

pub mod json {
    //! Patch lists as JSON, for golden-file tests and `--emit-patch`.

    use serde_json::{Map, Value};

    use super::PatchOp;
    use crate::vnode::json::to_value as vnode_to_value;

    pub fn patch_to_value(patch: &[PatchOp]) -> Value {
        Value::Array(patch.iter().map(op_to_value).collect())
    }

    pub fn patch_to_string(patch: &[PatchOp]) -> String {
        serde_json::to_string(&patch_to_value(patch)).expect("patch json is always serializable")
    }

    fn path_value(path: &[usize]) -> Value {
        Value::Array(path.iter().map(|&i| Value::Number(i.into())).collect())
    }

    fn op_to_value(op: &PatchOp) -> Value {
        let mut map = Map::new();
        match op {
            PatchOp::Replace { path, node } => {
                map.insert("op".into(), "replace".into());
                map.insert("path".into(), path_value(path));
                map.insert("node".into(), vnode_to_value(node));
            }
            PatchOp::SetText { path, text } => {
                map.insert("op".into(), "set_text".into());
                map.insert("path".into(), path_value(path));
                map.insert("s".into(), Value::String(text.to_string()));
            }
            PatchOp::SetProp { path, name, value } => {
                map.insert("op".into(), "set_prop".into());
                map.insert("path".into(), path_value(path));
                map.insert("name".into(), Value::String(name.clone()));
                map.insert("value".into(), Value::String(value.render()));
            }
            PatchOp::RemoveProp { path, name } => {
                map.insert("op".into(), "remove_prop".into());
                map.insert("path".into(), path_value(path));
                map.insert("name".into(), Value::String(name.clone()));
            }
            PatchOp::InsertChild { path, index, node } => {
                map.insert("op".into(), "insert_child".into());
                map.insert("path".into(), path_value(path));
                map.insert("index".into(), Value::Number((*index).into()));
                map.insert("node".into(), vnode_to_value(node));
            }
            PatchOp::RemoveChild { path, index } => {
                map.insert("op".into(), "remove_child".into());
                map.insert("path".into(), path_value(path));
                map.insert("index".into(), Value::Number((*index).into()));
            }
            PatchOp::MoveChild { path, from, to } => {
                map.insert("op".into(), "move_child".into());
                map.insert("path".into(), path_value(path));
                map.insert("from".into(), Value::Number((*from).into()));
                map.insert("to".into(), Value::Number((*to).into()));
            }
        }
        Value::Object(map)
    }
}
