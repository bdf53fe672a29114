//! Benchmark harness and CLI plumbing for the vdom engine: the standard
//! table suite, the consecutive-append scaling suite, and report shaping.

pub mod append;
pub mod jsfb;
pub mod report;
pub mod table;
pub mod words;
