//! Shared table workload model plus the three rendering implementations the
//! suite compares: the engine (scheduler + flag/keyed/identity fast paths),
//! a naive baseline (full rebuild + fast-paths-disabled diff), and a
//! handwritten minimal-mutation DOM oracle.

use std::sync::Arc;
use std::sync::OnceLock;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use vdom_core::diff::{diff_naive, DiffStats, PatchOp};
use vdom_core::dom::{serialize, Document, DomNode, OpCounters};
use vdom_core::scheduler::{Priority, Scheduler, SystemClock};
use vdom_core::vnode::{empty_props, make_element, PropValue, Props, SharedProps, VNode};

use crate::words::{random_label, RowModel};

fn tag(cache: &'static OnceLock<Arc<str>>, name: &str) -> Arc<str> {
    cache.get_or_init(|| Arc::from(name)).clone()
}

static TBODY: OnceLock<Arc<str>> = OnceLock::new();
static TR: OnceLock<Arc<str>> = OnceLock::new();
static TD: OnceLock<Arc<str>> = OnceLock::new();

/// The model every implementation renders from. One instance per
/// implementation, all seeded identically so they see the same workload.
pub struct TableModel {
    pub rows: Vec<RowModel>,
    pub selected: Option<u64>,
    next_id: u64,
    rng: ChaCha8Rng,
}

/// What an action changed, in terms each renderer can consume minimally.
#[derive(Clone, Debug)]
pub enum Change {
    /// Entire content replaced (create into an empty table).
    Rebuilt,
    Appended(usize),
    /// Label changed at these row indices.
    Updated(Vec<usize>),
    Removed(usize),
    Selected { old: Option<usize>, new: usize },
    Swapped(usize, usize),
    Cleared(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Create(usize),
    Append(usize),
    Clear,
    UpdateEvery(usize),
    RemoveRandom,
    SelectRandom,
    Swap,
}

impl TableModel {
    pub fn new(seed: u64) -> Self {
        TableModel {
            rows: Vec::new(),
            selected: None,
            next_id: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn fresh_row(&mut self) -> RowModel {
        self.next_id += 1;
        RowModel::new(self.next_id, random_label(&mut self.rng))
    }

    fn index_of(&self, id: u64) -> Option<usize> {
        self.rows.iter().position(|r| r.id == id)
    }

    pub fn apply(&mut self, action: Action) -> Change {
        match action {
            Action::Create(n) => {
                self.rows.clear();
                self.selected = None;
                for _ in 0..n {
                    let row = self.fresh_row();
                    self.rows.push(row);
                }
                Change::Rebuilt
            }
            Action::Append(n) => {
                for _ in 0..n {
                    let row = self.fresh_row();
                    self.rows.push(row);
                }
                Change::Appended(n)
            }
            Action::Clear => {
                let n = self.rows.len();
                self.rows.clear();
                self.selected = None;
                Change::Cleared(n)
            }
            Action::UpdateEvery(step) => {
                let mut changed = Vec::new();
                for index in (0..self.rows.len()).step_by(step) {
                    let row = &mut self.rows[index];
                    let mut label = row.label.to_string();
                    label.push_str(" !!!");
                    row.label = Arc::from(label);
                    changed.push(index);
                }
                Change::Updated(changed)
            }
            Action::RemoveRandom => {
                let index = self.rng.gen_range(0..self.rows.len());
                let removed = self.rows.remove(index);
                if self.selected == Some(removed.id) {
                    self.selected = None;
                }
                Change::Removed(index)
            }
            Action::SelectRandom => {
                let old = self.selected.and_then(|id| self.index_of(id));
                let mut index = self.rng.gen_range(0..self.rows.len());
                if old == Some(index) {
                    index = (index + 1) % self.rows.len();
                }
                self.selected = Some(self.rows[index].id);
                Change::Selected { old, new: index }
            }
            Action::Swap => {
                let (a, b) = (1, self.rows.len() - 2);
                self.rows.swap(a, b);
                Change::Swapped(a, b)
            }
        }
    }
}

fn cell(content: &Arc<str>) -> VNode {
    make_element(
        tag(&TD, "td"),
        empty_props(),
        vec![VNode::Text(content.clone())],
        None,
        None,
    )
    .unwrap()
}

static MARK: OnceLock<Arc<str>> = OnceLock::new();
static PLAIN_PROPS: OnceLock<SharedProps> = OnceLock::new();
static DANGER_PROPS: OnceLock<SharedProps> = OnceLock::new();

/// Every row shares one of two prop maps (class "" or "danger").
fn row_props(selected: bool) -> SharedProps {
    let (cache, class) = if selected {
        (&DANGER_PROPS, "danger")
    } else {
        (&PLAIN_PROPS, "")
    };
    cache
        .get_or_init(|| {
            let mut props = Props::new();
            props.insert("class".into(), PropValue::str(class));
            Arc::new(props)
        })
        .clone()
}

pub fn row_vnode(row: &RowModel, selected: bool) -> VNode {
    let mark = MARK.get_or_init(|| Arc::from("x")).clone();
    make_element(
        tag(&TR, "tr"),
        row_props(selected),
        vec![cell(&row.key), cell(&row.label), cell(&mark)],
        Some(row.key.clone()),
        None,
    )
    .unwrap()
}

/// New row node sharing the old one's unchanged cells and prop map.
fn row_with_label(old: &VNode, label: &Arc<str>) -> VNode {
    let el = old.as_element().expect("row is an element");
    let mut children = el.children.clone();
    children[1] = cell(label);
    make_element(el.tag.clone(), el.props.clone(), children, el.key.clone(), None).unwrap()
}

fn row_with_class(old: &VNode, selected: bool) -> VNode {
    let el = old.as_element().expect("row is an element");
    make_element(
        el.tag.clone(),
        row_props(selected),
        el.children.clone(),
        el.key.clone(),
        None,
    )
    .unwrap()
}

fn tbody(children: Vec<VNode>) -> VNode {
    make_element(tag(&TBODY, "tbody"), empty_props(), children, None, None).unwrap()
}

pub trait TableImpl {
    /// Render the model after `change` was applied to it.
    fn render(&mut self, model: &TableModel, change: &Change);
    fn html(&self) -> String;
    fn counters(&self) -> OpCounters;
    fn diff_stats(&mut self) -> DiffStats;
}

// ---------------------------------------------------------------------------
// Engine: immutable-tree sharing + scheduler + fast-path diff
// ---------------------------------------------------------------------------

pub struct EngineTable {
    sched: Scheduler,
    clock: SystemClock,
    row_nodes: Vec<VNode>,
    root: u64,
}

impl EngineTable {
    pub fn new(model: &TableModel) -> Self {
        let row_nodes: Vec<VNode> = model
            .rows
            .iter()
            .map(|r| row_vnode(r, model.selected == Some(r.id)))
            .collect();
        let mut sched = Scheduler::new();
        sched.register_root(1, tbody(row_nodes.clone())).unwrap();
        EngineTable {
            sched,
            clock: SystemClock::new(),
            row_nodes,
            root: 1,
        }
    }

    /// Update the cached row nodes, rebuilding only what changed.
    fn refresh_rows(&mut self, model: &TableModel, change: &Change) {
        match change {
            Change::Rebuilt => {
                self.row_nodes = model
                    .rows
                    .iter()
                    .map(|r| row_vnode(r, model.selected == Some(r.id)))
                    .collect();
            }
            Change::Appended(n) => {
                for row in &model.rows[model.rows.len() - n..] {
                    self.row_nodes.push(row_vnode(row, false));
                }
            }
            Change::Updated(indices) => {
                for &index in indices {
                    self.row_nodes[index] =
                        row_with_label(&self.row_nodes[index], &model.rows[index].label);
                }
            }
            Change::Removed(index) => {
                self.row_nodes.remove(*index);
            }
            Change::Selected { old, new } => {
                if let Some(old) = *old {
                    self.row_nodes[old] = row_with_class(&self.row_nodes[old], false);
                }
                self.row_nodes[*new] = row_with_class(&self.row_nodes[*new], true);
            }
            Change::Swapped(a, b) => {
                self.row_nodes.swap(*a, *b);
            }
            Change::Cleared(_) => {
                self.row_nodes.clear();
            }
        }
    }
}

impl TableImpl for EngineTable {
    fn render(&mut self, model: &TableModel, change: &Change) {
        self.refresh_rows(model, change);
        let next = tbody(self.row_nodes.clone());
        self.sched
            .schedule(self.root, Priority::Render, move || next)
            .unwrap();
        self.sched.flush(u64::MAX, &self.clock);
    }

    fn html(&self) -> String {
        self.sched.root_html(self.root).unwrap()
    }

    fn counters(&self) -> OpCounters {
        self.sched.document(self.root).unwrap().counters
    }

    fn diff_stats(&mut self) -> DiffStats {
        self.sched.take_diff_stats()
    }
}

// ---------------------------------------------------------------------------
// Naive: full rebuild every render, fast paths disabled
// ---------------------------------------------------------------------------

pub struct NaiveTable {
    doc: Document,
    dom: DomNode,
    current: VNode,
    stats: DiffStats,
}

impl NaiveTable {
    pub fn new(model: &TableModel) -> Self {
        let current = Self::build(model);
        let mut doc = Document::new();
        let dom = doc.realize(&current);
        NaiveTable {
            doc,
            dom,
            current,
            stats: DiffStats::default(),
        }
    }

    fn build(model: &TableModel) -> VNode {
        // Every node constructed afresh: no sharing for the baseline.
        let rows: Vec<VNode> = model
            .rows
            .iter()
            .map(|r| row_vnode(r, model.selected == Some(r.id)))
            .collect();
        tbody(rows)
    }
}

impl TableImpl for NaiveTable {
    fn render(&mut self, model: &TableModel, _change: &Change) {
        let next = Self::build(model);
        let (patch, stats) = diff_naive(&self.current, &next);
        self.stats.merge(&stats);
        self.doc.apply(&mut self.dom, &patch).unwrap();
        self.current = next;
    }

    fn html(&self) -> String {
        serialize(&self.dom)
    }

    fn counters(&self) -> OpCounters {
        self.doc.counters
    }

    fn diff_stats(&mut self) -> DiffStats {
        std::mem::take(&mut self.stats)
    }
}

// ---------------------------------------------------------------------------
// Dom oracle: handwritten minimal mutations
// ---------------------------------------------------------------------------

pub struct DomTable {
    doc: Document,
    dom: DomNode,
}

impl DomTable {
    pub fn new(model: &TableModel) -> Self {
        let initial = tbody(
            model
                .rows
                .iter()
                .map(|r| row_vnode(r, model.selected == Some(r.id)))
                .collect(),
        );
        let mut doc = Document::new();
        let dom = doc.realize(&initial);
        DomTable { doc, dom }
    }

    fn apply(&mut self, patch: &[PatchOp]) {
        self.doc.apply(&mut self.dom, patch).unwrap();
    }
}

impl TableImpl for DomTable {
    fn render(&mut self, model: &TableModel, change: &Change) {
        let mut patch: Vec<PatchOp> = Vec::new();
        match change {
            Change::Rebuilt => {
                let existing = self
                    .dom
                    .as_element()
                    .map(|el| el.children.len())
                    .unwrap_or(0);
                for index in (0..existing).rev() {
                    patch.push(PatchOp::RemoveChild {
                        path: vec![],
                        index,
                    });
                }
                for (index, row) in model.rows.iter().enumerate() {
                    patch.push(PatchOp::InsertChild {
                        path: vec![],
                        index,
                        node: row_vnode(row, false),
                    });
                }
            }
            Change::Appended(n) => {
                let start = model.rows.len() - n;
                for (offset, row) in model.rows[start..].iter().enumerate() {
                    patch.push(PatchOp::InsertChild {
                        path: vec![],
                        index: start + offset,
                        node: row_vnode(row, false),
                    });
                }
            }
            Change::Updated(indices) => {
                for &index in indices {
                    patch.push(PatchOp::SetText {
                        path: vec![index, 1],
                        text: model.rows[index].label.clone(),
                    });
                }
            }
            Change::Removed(index) => {
                patch.push(PatchOp::RemoveChild {
                    path: vec![],
                    index: *index,
                });
            }
            Change::Selected { old, new } => {
                if let Some(old) = *old {
                    patch.push(PatchOp::SetProp {
                        path: vec![old],
                        name: "class".into(),
                        value: PropValue::str(""),
                    });
                }
                patch.push(PatchOp::SetProp {
                    path: vec![*new],
                    name: "class".into(),
                    value: PropValue::str("danger"),
                });
            }
            Change::Swapped(a, b) => {
                // Two logical moves: b into a's slot, then the displaced a
                // (now at a+1) into b's slot.
                patch.push(PatchOp::MoveChild {
                    path: vec![],
                    from: *b,
                    to: *a,
                });
                patch.push(PatchOp::MoveChild {
                    path: vec![],
                    from: *a + 1,
                    to: *b,
                });
            }
            Change::Cleared(n) => {
                for index in (0..*n).rev() {
                    patch.push(PatchOp::RemoveChild {
                        path: vec![],
                        index,
                    });
                }
            }
        }
        self.apply(&patch);
    }

    fn html(&self) -> String {
        serialize(&self.dom)
    }

    fn counters(&self) -> OpCounters {
        self.doc.counters
    }

    fn diff_stats(&mut self) -> DiffStats {
        DiffStats::default()
    }
}
