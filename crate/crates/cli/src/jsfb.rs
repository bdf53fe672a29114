//! The table-benchmark suite: nine standard row-manipulation cases timed
//! across the engine, the naive baseline, and the DOM oracle.

use std::time::Instant;

use vdom_core::diff::DiffStats;
use vdom_core::dom::OpCounters;

use crate::table::{Action, DomTable, EngineTable, NaiveTable, TableImpl, TableModel};

/// Implementation under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Impl {
    Engine,
    Naive,
    Dom,
}

impl Impl {
    pub fn name(self) -> &'static str {
        match self {
            Impl::Engine => "engine",
            Impl::Naive => "naive",
            Impl::Dom => "dom",
        }
    }

    pub fn parse(s: &str) -> Option<Impl> {
        Some(match s {
            "engine" => Impl::Engine,
            "naive" => Impl::Naive,
            "dom" => Impl::Dom,
            _ => return None,
        })
    }

    pub const ALL: [Impl; 3] = [Impl::Engine, Impl::Naive, Impl::Dom];
}

/// One benchmark case: initial table state, optional untimed per-iteration
/// reset, and the timed action.
#[derive(Clone, Debug)]
pub struct CaseSpec {
    pub name: String,
    pub initial: Action,
    pub reset_each: Option<Action>,
    pub timed: Action,
}

/// The nine standard cases, scaled by `rows` (the published labels match
/// `rows = 1000` exactly).
pub fn cases(rows: usize) -> Vec<CaseSpec> {
    vec![
        CaseSpec {
            name: "Append 1,000 rows to a table of 10,000 rows".into(),
            initial: Action::Create(10 * rows),
            reset_each: Some(Action::Create(10 * rows)),
            timed: Action::Append(rows),
        },
        CaseSpec {
            name: "Clear a table with 1,000 rows".into(),
            initial: Action::Create(rows),
            reset_each: Some(Action::Create(rows)),
            timed: Action::Clear,
        },
        CaseSpec {
            name: "Create 10,000 rows".into(),
            initial: Action::Clear,
            reset_each: Some(Action::Clear),
            timed: Action::Create(10 * rows),
        },
        CaseSpec {
            name: "Create 1,000 rows".into(),
            initial: Action::Clear,
            reset_each: Some(Action::Clear),
            timed: Action::Create(rows),
        },
        CaseSpec {
            name: "Update every 10th row for 1,000 rows".into(),
            initial: Action::Create(rows),
            reset_each: None,
            timed: Action::UpdateEvery(10),
        },
        CaseSpec {
            name: "Remove a random row from 1,000 rows".into(),
            initial: Action::Create(rows),
            reset_each: None,
            timed: Action::RemoveRandom,
        },
        CaseSpec {
            name: "Update 1000 rows".into(),
            initial: Action::Create(rows),
            reset_each: None,
            timed: Action::UpdateEvery(1),
        },
        CaseSpec {
            name: "Select a random row from 1,000 rows".into(),
            initial: Action::Create(rows),
            reset_each: None,
            timed: Action::SelectRandom,
        },
        CaseSpec {
            name: "Swap 2 rows for table with 1,000 rows".into(),
            initial: Action::Create(rows),
            reset_each: None,
            timed: Action::Swap,
        },
    ]
}

#[derive(Clone, Copy, Debug)]
pub struct JsfbConfig {
    pub rows: usize,
    pub seed: u64,
    pub warmup: usize,
    pub iterations: usize,
}

impl Default for JsfbConfig {
    fn default() -> Self {
        JsfbConfig {
            rows: 1000,
            seed: 1,
            warmup: 1,
            iterations: 5,
        }
    }
}

/// Measured outcome of one (case, impl) pair. Timing samples cover only the
/// timed action; op counts likewise.
#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub name: String,
    pub impl_kind: Impl,
    pub samples_ms: Vec<f64>,
    pub dom_ops: OpCounters,
    pub diff_stats: DiffStats,
    pub final_html: String,
}

impl CaseOutcome {
    pub fn mean_ms(&self) -> f64 {
        self.samples_ms.iter().sum::<f64>() / self.samples_ms.len() as f64
    }

    pub fn ops_per_sec(&self) -> f64 {
        1000.0 / self.mean_ms()
    }

    pub fn rel_stdev_pct(&self) -> f64 {
        let mean = self.mean_ms();
        if self.samples_ms.len() < 2 || mean == 0.0 {
            return 0.0;
        }
        let var = self
            .samples_ms
            .iter()
            .map(|s| (s - mean) * (s - mean))
            .sum::<f64>()
            / (self.samples_ms.len() - 1) as f64;
        var.sqrt() / mean * 100.0
    }
}

fn make_impl(kind: Impl, model: &TableModel) -> Box<dyn TableImpl> {
    match kind {
        Impl::Engine => Box::new(EngineTable::new(model)),
        Impl::Naive => Box::new(NaiveTable::new(model)),
        Impl::Dom => Box::new(DomTable::new(model)),
    }
}

/// Run one case for one implementation. The model RNG is seeded per case,
/// so every implementation sees an identical workload.
pub fn run_case(spec: &CaseSpec, kind: Impl, case_seed: u64, cfg: &JsfbConfig) -> CaseOutcome {
    let mut model = TableModel::new(case_seed);
    model.apply(spec.initial);
    let mut table = make_impl(kind, &model);

    let run_action = |table: &mut Box<dyn TableImpl>, model: &mut TableModel, action| {
        let change = model.apply(action);
        table.render(model, &change);
    };

    for _ in 0..cfg.warmup {
        if let Some(reset) = spec.reset_each {
            run_action(&mut table, &mut model, reset);
        }
        run_action(&mut table, &mut model, spec.timed);
    }

    // Discard warm-up stats so reported counts cover timed work only.
    let _ = table.diff_stats();
    let mut counter_base = table.counters();
    let mut samples_ms = Vec::with_capacity(cfg.iterations);
    let mut dom_ops = OpCounters::default();
    let mut diff_stats = DiffStats::default();

    for _ in 0..cfg.iterations {
        if let Some(reset) = spec.reset_each {
            run_action(&mut table, &mut model, reset);
            let _ = table.diff_stats();
            counter_base = table.counters();
        }
        let started = Instant::now();
        run_action(&mut table, &mut model, spec.timed);
        samples_ms.push(started.elapsed().as_secs_f64() * 1000.0);
        let after = table.counters();
        merge_counters(&mut dom_ops, &after.since(&counter_base));
        counter_base = after;
        diff_stats.merge(&table.diff_stats());
    }

    CaseOutcome {
        name: spec.name.clone(),
        impl_kind: kind,
        samples_ms,
        dom_ops,
        diff_stats,
        final_html: table.html(),
    }
}

fn merge_counters(into: &mut OpCounters, delta: &OpCounters) {
    into.structural += delta.structural;
    into.attribute += delta.attribute;
    into.text += delta.text;
    into.listener += delta.listener;
    into.creates += delta.creates;
    into.inserts += delta.inserts;
    into.removes += delta.removes;
    into.replaces += delta.replaces;
    into.moves += delta.moves;
}

/// Run the full suite for the requested implementations, case-major so each
/// case's implementations run back to back on identical workloads.
pub fn run_suite(cfg: &JsfbConfig, impls: &[Impl]) -> Vec<CaseOutcome> {
    let mut outcomes = Vec::new();
    for (case_ix, spec) in cases(cfg.rows).iter().enumerate() {
        let case_seed = cfg
            .seed
            .wrapping_mul(1_000_003)
            .wrapping_add(case_ix as u64);
        for &kind in impls {
            outcomes.push(run_case(spec, kind, case_seed, cfg));
        }
    }
    outcomes
}

/// Geometric mean of ops/sec for one implementation across its outcomes.
pub fn geomean_ops_per_sec(outcomes: &[CaseOutcome], kind: Impl) -> f64 {
    let logs: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.impl_kind == kind)
        .map(|o| o.ops_per_sec().ln())
        .collect();
    if logs.is_empty() {
        return 0.0;
    }
    (logs.iter().sum::<f64>() / logs.len() as f64).exp()
}
