//! Render batching and priority scheduling. Updates to a root coalesce into
//! one pending task; flushing runs tasks in (priority desc, submission asc)
//! order under a time-slice budget checked *between* tasks — a started
//! render is never interrupted.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Instant;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::diff::{self, DiffStats};
use crate::dom::{serialize, Document, DomNode};
use crate::vnode::VNode;

/// Default flush budget: a typical frame-slice heuristic.
pub const DEFAULT_BUDGET_MS: u64 = 5;

/// Task urgency; total order as listed (later variants run first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Priority {
    Idle,
    Render,
    UserInteraction,
}

impl Priority {
    pub fn name(self) -> &'static str {
        match self {
            Priority::Idle => "IDLE",
            Priority::Render => "RENDER",
            Priority::UserInteraction => "USER_INTERACTION",
        }
    }
}

/// Monotonic millisecond time source.
pub trait Clock {
    fn now_ms(&self) -> u64;
}

/// Wall-clock time since construction.
pub struct SystemClock {
    start: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        SystemClock {
            start: Instant::now(),
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock::new()
    }
}

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }
}

/// Manually advanced clock for tests; clones share the same time.
#[derive(Clone, Default)]
pub struct VirtualClock {
    now: Arc<AtomicU64>,
}

impl VirtualClock {
    pub fn new() -> Self {
        VirtualClock::default()
    }

    pub fn advance(&self, ms: u64) {
        self.now.fetch_add(ms, Ordering::SeqCst);
    }
}

impl Clock for VirtualClock {
    fn now_ms(&self) -> u64 {
        self.now.load(Ordering::SeqCst)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchedulerError {
    #[error("unknown root {0}")]
    UnknownRoot(u64),
    #[error("root {0} is already registered")]
    RootExists(u64),
}

/// Result of one flush: roots completed in execution order, and whether the
/// budget expired with tasks still queued.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlushReport {
    pub completed: Vec<u64>,
    pub yielded: bool,
}

impl FlushReport {
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert(
            "completed".into(),
            Value::Array(self.completed.iter().map(|&id| id.into()).collect()),
        );
        map.insert("yielded".into(), Value::Bool(self.yielded));
        Value::Object(map)
    }
}

type Producer = Box<dyn FnOnce() -> VNode>;

struct Task {
    root_id: u64,
    produce: Producer,
    priority: Priority,
    seq: u64,
}

struct RootEntry {
    doc: Document,
    dom: DomNode,
    current: VNode,
}

/// Single-threaded, non-reentrant scheduler over registered roots, each with
/// its own document.
#[derive(Default)]
pub struct Scheduler {
    roots: HashMap<u64, RootEntry>,
    queue: Vec<Task>,
    next_seq: u64,
    stats: DiffStats,
}

impl Scheduler {
    pub fn new() -> Self {
        Scheduler::default()
    }

    /// Mount a root: realizes `initial` into a fresh document.
    pub fn register_root(&mut self, root_id: u64, initial: VNode) -> Result<(), SchedulerError> {
        if self.roots.contains_key(&root_id) {
            return Err(SchedulerError::RootExists(root_id));
        }
        let mut doc = Document::new();
        let dom = doc.realize(&initial);
        self.roots.insert(
            root_id,
            RootEntry {
                doc,
                dom,
                current: initial,
            },
        );
        Ok(())
    }

    /// Queue a render for `root_id`. A pending task for the same root is
    /// replaced (its render canceled), keeping the higher priority of the
    /// two; the producer runs at flush time.
    pub fn schedule(
        &mut self,
        root_id: u64,
        priority: Priority,
        produce: impl FnOnce() -> VNode + 'static,
    ) -> Result<(), SchedulerError> {
        if !self.roots.contains_key(&root_id) {
            return Err(SchedulerError::UnknownRoot(root_id));
        }
        self.next_seq += 1;
        let seq = self.next_seq;
        if let Some(task) = self.queue.iter_mut().find(|t| t.root_id == root_id) {
            task.produce = Box::new(produce);
            task.priority = task.priority.max(priority);
            task.seq = seq;
        } else {
            self.queue.push(Task {
                root_id,
                produce: Box::new(produce),
                priority,
                seq,
            });
        }
        Ok(())
    }

    pub fn pending_tasks(&self) -> usize {
        self.queue.len()
    }

    /// Run queued tasks in (priority desc, seq asc) order. Each task runs
    /// produce → diff → apply atomically; the budget is checked only between
    /// tasks, so a nonempty queue always completes at least one task.
    pub fn flush(&mut self, budget_ms: u64, clock: &dyn Clock) -> FlushReport {
        let start = clock.now_ms();
        let mut completed = Vec::new();
        let mut yielded = false;
        loop {
            let Some(pick) = self
                .queue
                .iter()
                .enumerate()
                .max_by_key(|(_, t)| (t.priority, Reverse(t.seq)))
                .map(|(ix, _)| ix)
            else {
                break;
            };
            let task = self.queue.remove(pick);
            let entry = self
                .roots
                .get_mut(&task.root_id)
                .expect("roots are validated at schedule time");
            let next = (task.produce)();
            let (patch, stats) = diff::diff(&entry.current, &next);
            self.stats.merge(&stats);
            entry
                .doc
                .apply(&mut entry.dom, &patch)
                .expect("diff produced an unapplicable patch");
            entry.current = next;
            completed.push(task.root_id);
            if clock.now_ms().saturating_sub(start) >= budget_ms {
                yielded = !self.queue.is_empty();
                break;
            }
        }
        FlushReport { completed, yielded }
    }

    pub fn root_html(&self, root_id: u64) -> Option<String> {
        self.roots.get(&root_id).map(|r| serialize(&r.dom))
    }

    pub fn document(&self, root_id: u64) -> Option<&Document> {
        self.roots.get(&root_id).map(|r| &r.doc)
    }

    pub fn current_tree(&self, root_id: u64) -> Option<&VNode> {
        self.roots.get(&root_id).map(|r| &r.current)
    }

    /// Diff stats accumulated by flushes since the last call.
    pub fn take_diff_stats(&mut self) -> DiffStats {
        std::mem::take(&mut self.stats)
    }
}
