//! Fixed word corpus for row labels (the usual benchmark triples), so
//! workloads are reproducible across implementations and runs.

use std::sync::Arc;

use rand::prelude::*;

pub static ADJECTIVES: &[&str] = &[
    "pretty",
    "large",
    "big",
    "small",
    "tall",
    "short",
    "long",
    "handsome",
    "plain",
    "quaint",
    "clean",
    "elegant",
    "easy",
    "angry",
    "crazy",
    "helpful",
    "mushy",
    "odd",
    "unsightly",
    "adorable",
    "important",
    "inexpensive",
    "cheap",
    "expensive",
    "fancy",
];

pub static COLOURS: &[&str] = &[
    "red", "yellow", "blue", "green", "pink", "brown", "purple", "brown", "white", "black",
    "orange",
];

pub static NOUNS: &[&str] = &[
    "table", "chair", "house", "bbq", "desk", "car", "pony", "cookie", "sandwich", "burger",
    "pizza", "mouse", "keyboard",
];

pub fn random_label(rng: &mut impl Rng) -> Arc<str> {
    let label = format!(
        "{} {} {}",
        ADJECTIVES.choose(rng).unwrap(),
        COLOURS.choose(rng).unwrap(),
        NOUNS.choose(rng).unwrap()
    );
    Arc::from(label)
}

/// One table row: a stable id plus a mutable label.
#[derive(Clone, Debug)]
pub struct RowModel {
    pub id: u64,
    /// Cached key string for the row's id.
    pub key: Arc<str>,
    pub label: Arc<str>,
}

impl RowModel {
    pub fn new(id: u64, label: Arc<str>) -> Self {
        RowModel {
            id,
            key: Arc::from(id.to_string()),
            label,
        }
    }
}
