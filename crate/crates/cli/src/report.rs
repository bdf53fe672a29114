//! Report shaping: JSON documents (deterministic by default, timing fields
//! opt-in) and human-readable tables.

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use vdom_core::diff::DiffStats;
use vdom_core::dom::OpCounters;

use crate::append::AppendSuite;
use crate::jsfb::{geomean_ops_per_sec, CaseOutcome, Impl, JsfbConfig};

pub fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

fn counters_json(c: &OpCounters) -> Value {
    let mut map = Map::new();
    map.insert("structural".into(), c.structural.into());
    map.insert("attribute".into(), c.attribute.into());
    map.insert("text".into(), c.text.into());
    map.insert("listener".into(), c.listener.into());
    map.insert("creates".into(), c.creates.into());
    map.insert("inserts".into(), c.inserts.into());
    map.insert("removes".into(), c.removes.into());
    map.insert("replaces".into(), c.replaces.into());
    map.insert("moves".into(), c.moves.into());
    Value::Object(map)
}

fn diff_stats_json(s: &DiffStats) -> Value {
    let mut map = Map::new();
    map.insert("nodes_visited".into(), s.nodes_visited.into());
    map.insert("keyed_fast_path_hits".into(), s.keyed_fast_path_hits.into());
    map.insert("flag_skips".into(), s.flag_skips.into());
    map.insert("delta_bypasses".into(), s.delta_bypasses.into());
    Value::Object(map)
}

/// Suite report. Wall-clock fields appear only with `timings`, keeping the
/// default JSON byte-reproducible for a fixed seed.
pub fn jsfb_report(cfg: &JsfbConfig, outcomes: &[CaseOutcome], timings: bool) -> Value {
    let mut root = Map::new();
    root.insert("suite".into(), "jsfb".into());
    root.insert("seed".into(), cfg.seed.into());
    root.insert("rows".into(), (cfg.rows as u64).into());
    root.insert("warmup".into(), (cfg.warmup as u64).into());
    root.insert("iterations".into(), (cfg.iterations as u64).into());
    let results: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            let mut map = Map::new();
            map.insert("name".into(), Value::String(o.name.clone()));
            map.insert("impl".into(), Value::String(o.impl_kind.name().into()));
            if timings {
                map.insert("ops_per_sec".into(), json_f64(o.ops_per_sec()));
                map.insert("rel_stdev_pct".into(), json_f64(o.rel_stdev_pct()));
            }
            map.insert("dom_ops".into(), counters_json(&o.dom_ops));
            map.insert("diff_stats".into(), diff_stats_json(&o.diff_stats));
            map.insert(
                "dom_sha256".into(),
                Value::String(sha256_hex(&o.final_html)),
            );
            Value::Object(map)
        })
        .collect();
    root.insert("results".into(), Value::Array(results));

    let mut geomean = Map::new();
    for kind in Impl::ALL {
        let per_impl: Vec<&CaseOutcome> = outcomes
            .iter()
            .filter(|o| o.impl_kind == kind)
            .collect();
        if per_impl.is_empty() {
            continue;
        }
        let mut entry = Map::new();
        if timings {
            entry.insert(
                "ops_per_sec".into(),
                json_f64(geomean_ops_per_sec(outcomes, kind)),
            );
        }
        let total: u64 = per_impl.iter().map(|o| o.dom_ops.total()).sum();
        entry.insert("dom_ops_total".into(), total.into());
        geomean.insert(kind.name().into(), Value::Object(entry));
    }
    root.insert("geomean".into(), Value::Object(geomean));
    Value::Object(root)
}

pub fn append_report(suite: &AppendSuite, timings: bool) -> Value {
    let mut root = Map::new();
    root.insert("suite".into(), "append".into());
    root.insert("seed".into(), suite.seed.into());
    root.insert("nodes".into(), (suite.headline as u64).into());
    let results: Vec<Value> = suite
        .runs
        .iter()
        .map(|run| {
            let mut map = Map::new();
            map.insert("mode".into(), Value::String(run.mode.name().into()));
            map.insert("n".into(), (run.n as u64).into());
            if timings {
                map.insert("total_ms".into(), json_f64(run.total_ms));
            }
            map.insert("diff_visits".into(), run.diff_visits.into());
            map.insert("dom_ops".into(), counters_json(&run.dom_ops));
            map.insert(
                "dom_sha256".into(),
                Value::String(sha256_hex(&run.final_html)),
            );
            Value::Object(map)
        })
        .collect();
    root.insert("results".into(), Value::Array(results));
    let mut slopes = Map::new();
    for (mode, slope) in &suite.slopes {
        slopes.insert(
            mode.name().into(),
            slope.map(json_f64).unwrap_or(Value::Null),
        );
    }
    root.insert("slopes".into(), Value::Object(slopes));
    Value::Object(root)
}

fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn jsfb_table(cfg: &JsfbConfig, outcomes: &[CaseOutcome]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "suite: jsfb  rows: {}  seed: {}  warmup: {}  iterations: {}\n",
        cfg.rows, cfg.seed, cfg.warmup, cfg.iterations
    ));
    out.push_str(&format!(
        "{:<44} {:>8} {:>12} {:>8} {:>10} {:>10} {:>8}\n",
        "case", "impl", "ops/s", "±%", "dom ops", "visits", "moves"
    ));
    for o in outcomes {
        out.push_str(&format!(
            "{:<44} {:>8} {:>12.1} {:>7.1}% {:>10} {:>10} {:>8}\n",
            o.name,
            o.impl_kind.name(),
            o.ops_per_sec(),
            o.rel_stdev_pct(),
            o.dom_ops.total(),
            o.diff_stats.nodes_visited,
            o.dom_ops.moves,
        ));
    }
    for kind in Impl::ALL {
        if outcomes.iter().any(|o| o.impl_kind == kind) {
            out.push_str(&format!(
                "{:<44} {:>8} {:>12.1}\n",
                "Geometric mean",
                kind.name(),
                geomean_ops_per_sec(outcomes, kind)
            ));
        }
    }
    out
}

pub fn append_table(suite: &AppendSuite) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "suite: append  nodes: {}  seed: {}\n",
        suite.headline, suite.seed
    ));
    out.push_str(&format!(
        "{:>6} {:>8} {:>12} {:>12} {:>12}\n",
        "mode", "n", "total ms", "diff visits", "dom ops"
    ));
    for run in &suite.runs {
        out.push_str(&format!(
            "{:>6} {:>8} {:>12.2} {:>12} {:>12}\n",
            run.mode.name(),
            run.n,
            run.total_ms,
            run.diff_visits,
            run.dom_ops.total()
        ));
    }
    for (mode, slope) in &suite.slopes {
        match slope {
            Some(s) => out.push_str(&format!("slope[{}] = {:.3}\n", mode.name(), s)),
            None => out.push_str(&format!("slope[{}] = n/a (no diffing)\n", mode.name())),
        }
    }
    out
}
