//! Compiler-augmented virtual DOM engine: an ahead-of-time template compiler
//! (flattening, static hoisting, shape-flag inference) feeding a runtime
//! reconciler with keyed diffing, flag fast paths, delta updates, batching,
//! and priority scheduling — validated against a headless DOM with exact
//! mutation accounting.

pub mod diff;
pub mod dom;
pub mod runtime;
pub mod scheduler;
pub mod template;
pub mod testgen;
pub mod vnode;

pub use diff::{diff, diff_naive, DiffStats, PatchOp};
pub use dom::{serialize, Document, DomNode};
pub use runtime::{instantiate, ReactiveList};
pub use scheduler::{Clock, FlushReport, Priority, Scheduler, SystemClock, VirtualClock};
pub use template::{compile, compile_without_hoisting, CompiledModule};
pub use vnode::{make_element, text, Flag, PropValue, Props, VNode};
