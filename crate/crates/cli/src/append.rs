//! Consecutive-append benchmark: add nodes to a list one at a time,
//! rendering after every insertion, across four strategies — direct DOM
//! writes, delta list updates, keyed diffing, and a rebuild-everything
//! virtual DOM baseline. Reports total time, total diff visits, and the
//! log-log slope of visits against n.

use std::sync::Arc;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use vdom_core::diff::{diff, diff_naive, PatchOp};
use vdom_core::dom::{serialize, Document, OpCounters};
use vdom_core::runtime::ReactiveList;
use vdom_core::template::compile;
use vdom_core::vnode::{make_element, text, Props, VNode};

use crate::words::random_label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AppendMode {
    Dom,
    Delta,
    Keyed,
    Vdom,
}

impl AppendMode {
    pub fn name(self) -> &'static str {
        match self {
            AppendMode::Dom => "dom",
            AppendMode::Delta => "delta",
            AppendMode::Keyed => "keyed",
            AppendMode::Vdom => "vdom",
        }
    }

    pub fn parse(s: &str) -> Option<AppendMode> {
        Some(match s {
            "dom" => AppendMode::Dom,
            "delta" => AppendMode::Delta,
            "keyed" => AppendMode::Keyed,
            "vdom" => AppendMode::Vdom,
            _ => return None,
        })
    }

    pub const ALL: [AppendMode; 4] = [
        AppendMode::Dom,
        AppendMode::Delta,
        AppendMode::Keyed,
        AppendMode::Vdom,
    ];
}

#[derive(Clone, Debug)]
pub struct AppendRun {
    pub mode: AppendMode,
    pub n: usize,
    pub total_ms: f64,
    pub diff_visits: u64,
    pub dom_ops: OpCounters,
    pub final_html: String,
}

fn li(key: &Arc<str>, label: &Arc<str>) -> VNode {
    make_element(
        "li",
        Props::new(),
        vec![VNode::Text(label.clone())],
        Some(key.clone()),
        None,
    )
    .unwrap()
}

fn ul(children: Vec<VNode>) -> VNode {
    make_element("ul", Props::new(), children, None, None).unwrap()
}

/// Append `n` nodes one render at a time under the given strategy.
pub fn run_append(mode: AppendMode, n: usize, seed: u64) -> AppendRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<Arc<str>> = (0..n).map(|_| random_label(&mut rng)).collect();
    let keys: Vec<Arc<str>> = (0..n).map(|i| Arc::from(i.to_string())).collect();

    let mut doc = Document::new();
    let mut visits: u64 = 0;
    // Ops and time are measured from after the (shared, trivial) mount of
    // the empty list container.
    let mut base = OpCounters::default();
    let mut started = Instant::now();
    let mounted = |doc: &Document, base: &mut OpCounters, started: &mut Instant| {
        *base = doc.counters;
        *started = Instant::now();
    };

    let final_html = match mode {
        AppendMode::Dom => {
            let mut dom = doc.realize(&ul(vec![]));
            mounted(&doc, &mut base, &mut started);
            for i in 0..n {
                let patch = [PatchOp::InsertChild {
                    path: vec![],
                    index: i,
                    node: li(&keys[i], &labels[i]),
                }];
                doc.apply(&mut dom, &patch).unwrap();
            }
            serialize(&dom)
        }
        AppendMode::Delta => {
            let module =
                compile("<ul>{#each xs as x key=x.k}<li>{x.label}</li>{/each}</ul>").unwrap();
            let mut list = ReactiveList::from_module(&module).unwrap();
            let mut prev = list.snapshot("ul", Props::new());
            let mut dom = doc.realize(&prev);
            mounted(&doc, &mut base, &mut started);
            for i in 0..n {
                list.insert(i, json!({"k": keys[i].as_ref(), "label": labels[i].as_ref()}))
                    .unwrap();
                let snap = list.snapshot("ul", Props::new());
                let (patch, stats) = diff(&prev, &snap);
                visits += stats.nodes_visited;
                doc.apply(&mut dom, &patch).unwrap();
                prev = snap;
            }
            serialize(&dom)
        }
        AppendMode::Keyed => {
            let mut items: Vec<VNode> = Vec::with_capacity(n);
            let mut prev = ul(vec![]);
            let mut dom = doc.realize(&prev);
            mounted(&doc, &mut base, &mut started);
            for i in 0..n {
                items.push(li(&keys[i], &labels[i]));
                let next = ul(items.clone());
                let (patch, stats) = diff(&prev, &next);
                visits += stats.nodes_visited;
                doc.apply(&mut dom, &patch).unwrap();
                prev = next;
            }
            serialize(&dom)
        }
        AppendMode::Vdom => {
            let mut prev = ul(vec![]);
            let mut dom = doc.realize(&prev);
            mounted(&doc, &mut base, &mut started);
            for i in 0..n {
                // Rebuild the entire child list from scratch every render.
                let rebuilt: Vec<VNode> = (0..=i)
                    .map(|j| {
                        make_element(
                            "li",
                            Props::new(),
                            vec![text(labels[j].as_ref())],
                            Some(Arc::from(keys[j].as_ref())),
                            None,
                        )
                        .unwrap()
                    })
                    .collect();
                let next = ul(rebuilt);
                let (patch, stats) = diff_naive(&prev, &next);
                visits += stats.nodes_visited;
                doc.apply(&mut dom, &patch).unwrap();
                prev = next;
            }
            serialize(&dom)
        }
    };

    AppendRun {
        mode,
        n,
        total_ms: started.elapsed().as_secs_f64() * 1000.0,
        diff_visits: visits,
        dom_ops: doc.counters.since(&base),
        final_html,
    }
}

/// Sweep sizes used for the scaling fit, ahead of the headline size.
pub const SWEEP: [usize; 4] = [500, 1000, 2000, 4000];

#[derive(Clone, Debug)]
pub struct AppendSuite {
    pub headline: usize,
    pub seed: u64,
    pub runs: Vec<AppendRun>,
    /// mode → log-log slope of total diff visits vs n over the sweep.
    pub slopes: Vec<(AppendMode, Option<f64>)>,
}

pub fn run_suite(headline: usize, modes: &[AppendMode], seed: u64) -> AppendSuite {
    let mut runs = Vec::new();
    let mut slopes = Vec::new();
    for &mode in modes {
        let mut points = Vec::new();
        for &n in SWEEP.iter() {
            let run = run_append(mode, n, seed);
            points.push((n as f64, run.diff_visits as f64));
            runs.push(run);
        }
        if !SWEEP.contains(&headline) {
            runs.push(run_append(mode, headline, seed));
        }
        slopes.push((mode, loglog_slope(&points)));
    }
    AppendSuite {
        headline,
        seed,
        runs,
        slopes,
    }
}

/// Least-squares slope of ln(y) against ln(x); None when any y is zero
/// (nothing to fit — the strategy performs no diffing).
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(_, y)| y <= 0.0) || points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let cov = logs
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum::<f64>();
    let var = logs.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum::<f64>();
    Some(cov / var)
}
