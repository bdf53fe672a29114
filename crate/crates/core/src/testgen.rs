//! Deterministic, seeded generators for randomized soundness suites and
//! reproducible harness workloads: random virtual trees, old/new pairs that
//! share subtrees, and random template sources with matching states.

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::vnode::{make_element, text, Flag, PropValue, Props, VNode};

const TAGS: &[&str] = &["div", "span", "p", "ul", "li", "b", "i", "em", "tr", "td"];
const PROP_NAMES: &[&str] = &["id", "class", "title", "lang", "dir"];
const WORDS: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "omega", "one", "two", "red", "blue", "green",
];

#[derive(Clone, Copy, Debug)]
pub struct TreeGenConfig {
    pub max_depth: usize,
    pub max_fanout: usize,
}

impl Default for TreeGenConfig {
    fn default() -> Self {
        TreeGenConfig {
            max_depth: 5,
            max_fanout: 8,
        }
    }
}

pub struct TreeGen {
    rng: ChaCha8Rng,
    fresh_key: u64,
}

impl TreeGen {
    pub fn new(seed: u64) -> Self {
        TreeGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            fresh_key: 0,
        }
    }

    fn word(&mut self) -> &'static str {
        WORDS.choose(&mut self.rng).unwrap()
    }

    fn prop_value(&mut self) -> PropValue {
        match self.rng.gen_range(0..4) {
            0 => PropValue::str(self.word()),
            1 => PropValue::Bool(self.rng.gen()),
            2 => PropValue::Num((self.rng.gen_range(-100..100) as f64) / 4.0),
            _ => PropValue::EventRef(self.rng.gen_range(0..32)),
        }
    }

    fn props(&mut self) -> Props {
        let mut props = Props::new();
        for _ in 0..self.rng.gen_range(0..3) {
            let name = *PROP_NAMES.choose(&mut self.rng).unwrap();
            let value = self.prop_value();
            props.insert(name.to_string(), value);
        }
        props
    }

    /// Random valid tree: flags always match shapes, sibling keys unique.
    pub fn tree(&mut self, cfg: &TreeGenConfig) -> VNode {
        self.node(cfg, cfg.max_depth, None)
    }

    fn node(&mut self, cfg: &TreeGenConfig, depth: usize, key: Option<Arc<str>>) -> VNode {
        if depth == 0 || self.rng.gen_ratio(1, 5) {
            if key.is_none() && self.rng.gen_bool(0.5) {
                return text(self.word());
            }
            let props = self.props();
            return make_element(*TAGS.choose(&mut self.rng).unwrap(), props, vec![], key, None)
                .unwrap();
        }
        let tag = *TAGS.choose(&mut self.rng).unwrap();
        let props = self.props();
        let children = match self.rng.gen_range(0..4) {
            0 => vec![],
            1 => {
                let n = self.rng.gen_range(1..4);
                (0..n).map(|_| text(self.word())).collect()
            }
            2 => self.keyed_children(cfg, depth),
            _ => {
                let n = self.rng.gen_range(1..=cfg.max_fanout.min(4));
                (0..n).map(|_| self.node(cfg, depth - 1, None)).collect()
            }
        };
        make_element(tag, props, children, key, None).unwrap()
    }

    fn keyed_children(&mut self, cfg: &TreeGenConfig, depth: usize) -> Vec<VNode> {
        let n = self.rng.gen_range(1..=cfg.max_fanout);
        let mut ids: Vec<u64> = (0..(n as u64 + 3)).collect();
        ids.shuffle(&mut self.rng);
        ids.truncate(n);
        ids.into_iter()
            .map(|id| {
                let key: Arc<str> = Arc::from(format!("k{id}").as_str());
                self.node(cfg, depth - 1, Some(key))
            })
            .collect()
    }

    /// An (old, new) pair: half the time `new` is an independent tree, half
    /// the time a mutation of `old` that shares unchanged branches (which
    /// exercises identity short-circuits).
    pub fn pair(&mut self, cfg: &TreeGenConfig) -> (VNode, VNode) {
        let old = self.tree(cfg);
        let new = if self.rng.gen_bool(0.5) {
            self.tree(cfg)
        } else {
            self.mutate(&old, cfg, cfg.max_depth)
        };
        (old, new)
    }

    /// Structure-preserving random edit of `node`; untouched subtrees are
    /// shared, keyed sibling lists stay valid.
    pub fn mutate(&mut self, node: &VNode, cfg: &TreeGenConfig, depth: usize) -> VNode {
        if self.rng.gen_bool(0.55) {
            return node.clone();
        }
        match node {
            VNode::Text(_) => {
                if self.rng.gen_bool(0.7) {
                    text(self.word())
                } else {
                    node.clone()
                }
            }
            VNode::Element(el) => {
                if depth == 0 || self.rng.gen_ratio(1, 12) {
                    // Whole-subtree replacement.
                    return self.node(cfg, depth.saturating_sub(1), el.key.clone());
                }
                let props = match self.rng.gen_range(0..4) {
                    0 => {
                        let mut props = (*el.props).clone();
                        let name = *PROP_NAMES.choose(&mut self.rng).unwrap();
                        let value = self.prop_value();
                        props.insert(name.to_string(), value);
                        crate::vnode::shared_props(props)
                    }
                    1 if !el.props.is_empty() => {
                        let mut props = (*el.props).clone();
                        let ix = self.rng.gen_range(0..props.len());
                        props.shift_remove_index(ix);
                        crate::vnode::shared_props(props)
                    }
                    // Unchanged props share the old map.
                    _ => el.props.clone(),
                };
                let children = if el.effective_flag() == Flag::OnlyKeyedChildren {
                    self.mutate_keyed(&el.children, cfg, depth)
                } else {
                    self.mutate_plain(&el.children, cfg, depth)
                };
                make_element(el.tag.clone(), props, children, el.key.clone(), None).unwrap()
            }
        }
    }

    fn mutate_plain(&mut self, children: &[VNode], cfg: &TreeGenConfig, depth: usize) -> Vec<VNode> {
        let mut out: Vec<VNode> = Vec::with_capacity(children.len() + 1);
        for child in children {
            match self.rng.gen_range(0..10) {
                0 => {} // drop
                1 => {
                    out.push(self.node(cfg, depth - 1, None));
                    out.push(self.mutate(child, cfg, depth - 1));
                }
                _ => out.push(self.mutate(child, cfg, depth - 1)),
            }
        }
        if self.rng.gen_ratio(1, 6) {
            out.push(self.node(cfg, depth - 1, None));
        }
        out
    }

    fn mutate_keyed(&mut self, children: &[VNode], cfg: &TreeGenConfig, depth: usize) -> Vec<VNode> {
        let mut out: Vec<VNode> = Vec::with_capacity(children.len() + 1);
        for child in children {
            if self.rng.gen_ratio(1, 8) {
                continue; // drop this key
            }
            // Mutating a keyed child keeps its key (mutate preserves keys).
            out.push(self.mutate(child, cfg, depth - 1));
        }
        if self.rng.gen_ratio(1, 5) {
            self.fresh_key += 1;
            let key: Arc<str> = Arc::from(format!("m{}", self.fresh_key).as_str());
            let index = self.rng.gen_range(0..=out.len());
            out.insert(index, self.node(cfg, depth - 1, Some(key)));
        }
        if out.len() > 1 && self.rng.gen_bool(0.5) {
            out.shuffle(&mut self.rng);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Template + state generation
// ---------------------------------------------------------------------------

/// Random template sources over a fixed state schema, plus matching states.
/// Control-flow paths (`flags.*`, arrays) are always present in generated
/// states; scalar holes may dangle to exercise the missing-path rule.
pub struct TemplateGen {
    rng: ChaCha8Rng,
}

const SCALAR_PATHS: &[&str] = &["title", "user.name", "user.role", "meta.count", "meta.note"];
const BOOL_PATHS: &[&str] = &["flags.on", "flags.alt"];

impl TemplateGen {
    pub fn new(seed: u64) -> Self {
        TemplateGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn template(&mut self) -> String {
        let mut out = String::from("<div>");
        let pieces = self.rng.gen_range(1..=4);
        for _ in 0..pieces {
            self.piece(&mut out, 2, true);
        }
        out.push_str("</div>");
        out
    }

    fn static_subtree(&mut self, out: &mut String, depth: usize) {
        let tag = *TAGS.choose(&mut self.rng).unwrap();
        out.push('<');
        out.push_str(tag);
        if self.rng.gen_bool(0.4) {
            out.push_str(&format!(" class=\"{}\"", WORDS.choose(&mut self.rng).unwrap()));
        }
        out.push('>');
        let n = self.rng.gen_range(1..=2);
        for _ in 0..n {
            if depth > 0 && self.rng.gen_bool(0.4) {
                self.static_subtree(out, depth - 1);
            } else {
                out.push_str(WORDS.choose(&mut self.rng).unwrap());
            }
        }
        out.push_str(&format!("</{tag}>"));
    }

    fn piece(&mut self, out: &mut String, depth: usize, blocks_allowed: bool) {
        let roll = self.rng.gen_range(0..10);
        match roll {
            0..=1 => self.static_subtree(out, 2),
            2 => out.push_str(WORDS.choose(&mut self.rng).unwrap()),
            3..=4 => {
                let path = *SCALAR_PATHS.choose(&mut self.rng).unwrap();
                out.push_str(&format!("{{{path}}}"));
            }
            5 => {
                let path = *SCALAR_PATHS.choose(&mut self.rng).unwrap();
                let tag = *TAGS.choose(&mut self.rng).unwrap();
                out.push_str(&format!("<{tag} class={{{path}}}>"));
                if depth > 0 {
                    self.piece(out, depth - 1, blocks_allowed);
                }
                out.push_str(&format!("</{tag}>"));
            }
            6 if blocks_allowed => {
                let (list, item, field) = if self.rng.gen_bool(0.5) {
                    ("items", "it", "label")
                } else {
                    ("posts", "p", "text")
                };
                out.push_str(&format!("<ul>{{#each {list} as {item} key={item}.id}}<li>"));
                if self.rng.gen_bool(0.3) {
                    self.static_subtree(out, 1);
                }
                out.push_str(&format!("{{{item}.{field}}}"));
                out.push_str("</li>{/each}</ul>");
            }
            7 if blocks_allowed => {
                let cond = *BOOL_PATHS.choose(&mut self.rng).unwrap();
                out.push_str(&format!("{{#if {cond}}}"));
                self.piece(out, depth.saturating_sub(1), false);
                if self.rng.gen_bool(0.6) {
                    out.push_str("{:else}");
                    self.piece(out, depth.saturating_sub(1), false);
                }
                out.push_str("{/if}");
            }
            _ => {
                let tag = *TAGS.choose(&mut self.rng).unwrap();
                out.push_str(&format!("<{tag}>"));
                if depth > 0 {
                    let n = self.rng.gen_range(1..=2);
                    for _ in 0..n {
                        self.piece(out, depth - 1, blocks_allowed);
                    }
                } else {
                    out.push_str(WORDS.choose(&mut self.rng).unwrap());
                }
                out.push_str(&format!("</{tag}>"));
            }
        }
    }

    pub fn state(&mut self) -> Value {
        let mut items = Vec::new();
        for i in 0..self.rng.gen_range(0..5) {
            items.push(json!({
                "id": format!("i{i}"),
                "label": *WORDS.choose(&mut self.rng).unwrap(),
                "cls": *WORDS.choose(&mut self.rng).unwrap(),
            }));
        }
        let mut posts = Vec::new();
        for i in 0..self.rng.gen_range(0..4) {
            posts.push(json!({
                "id": format!("p{i}"),
                "text": *WORDS.choose(&mut self.rng).unwrap(),
            }));
        }
        let mut state = json!({
            "flags": {"on": self.rng.gen_bool(0.5), "alt": self.rng.gen_bool(0.5)},
            "items": items,
            "posts": posts,
            "user": {},
            "meta": {},
        });
        if self.rng.gen_bool(0.8) {
            state["title"] = json!(*WORDS.choose(&mut self.rng).unwrap());
        }
        if self.rng.gen_bool(0.8) {
            state["user"]["name"] = json!(*WORDS.choose(&mut self.rng).unwrap());
        }
        if self.rng.gen_bool(0.5) {
            state["user"]["role"] = json!(*WORDS.choose(&mut self.rng).unwrap());
        }
        if self.rng.gen_bool(0.8) {
            state["meta"]["count"] = json!(self.rng.gen_range(0..1000));
        }
        if self.rng.gen_bool(0.5) {
            state["meta"]["note"] = json!(self.rng.gen_bool(0.5));
        }
        state
    }
}
