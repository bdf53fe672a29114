//! Acceptance suite: every release criterion runs here at its stated
//! tolerance and prints one pass/fail line. Oracles are independent of the
//! paths they check: fresh realization for round-trips, the fast-paths-off
//! differ for equivalence, breadth-first minimal-move search for keyed
//! reconciliation, the no-hoisting compiler for hoisting soundness, and
//! least-squares fits for scaling.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use vdom_cli::append::{self, AppendMode};
use vdom_cli::jsfb::{self, Impl, JsfbConfig};
use vdom_cli::report;
use vdom_core::diff::{diff, diff_naive, json as patch_json, PatchOp};
use vdom_core::dom::{serialize, Document};
use vdom_core::runtime::instantiate;
use vdom_core::scheduler::{Priority, Scheduler, VirtualClock};
use vdom_core::template::{compile, compile_without_hoisting, emit};
use vdom_core::testgen::{TemplateGen, TreeGen, TreeGenConfig};
use vdom_core::vnode::{json as vjson, make_element, text, Props, VNode};

fn verdict(criterion: &str, pass: bool, detail: &str) -> bool {
    println!(
        "acceptance: {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn render_fresh(node: &VNode) -> String {
    let mut doc = Document::new();
    let dom = doc.realize(node);
    serialize(&dom)
}

#[test]
fn criterion_1_round_trip_soundness() {
    let started = Instant::now();
    let cfg = TreeGenConfig::default();
    let mut gen = TreeGen::new(0xACCE97);
    let mut failures = 0usize;
    const CASES: usize = 10_000;
    for _ in 0..CASES {
        let (old, new) = gen.pair(&cfg);
        let expected = render_fresh(&new);
        let mut doc = Document::new();
        let mut dom = doc.realize(&old);
        let (patch, _) = diff(&old, &new);
        doc.apply(&mut dom, &patch).unwrap();
        if serialize(&dom) != expected {
            failures += 1;
        }
    }
    let elapsed = started.elapsed();
    let pass = failures == 0 && elapsed < Duration::from_secs(60);
    assert!(verdict(
        "criterion 1 (round-trip soundness)",
        pass,
        &format!("{CASES} cases, {failures} failures, {:.1}s", elapsed.as_secs_f64())
    ));
}

#[test]
fn criterion_2_fast_path_equivalence() {
    let cfg = TreeGenConfig::default();
    let mut gen = TreeGen::new(0xFA57);
    let mut worst_ratio = 0.0f64;
    const CASES: usize = 1_000;
    let mut pass = true;
    for case in 0..CASES {
        let (old, new) = gen.pair(&cfg);
        let mut fast_doc = Document::new();
        let mut fast_dom = fast_doc.realize(&old);
        let (fast_patch, fast_stats) = diff(&old, &new);
        fast_doc.apply(&mut fast_dom, &fast_patch).unwrap();

        let mut naive_doc = Document::new();
        let mut naive_dom = naive_doc.realize(&old);
        let (naive_patch, naive_stats) = diff_naive(&old, &new);
        naive_doc.apply(&mut naive_dom, &naive_patch).unwrap();

        if serialize(&fast_dom) != serialize(&naive_dom) {
            pass = false;
            eprintln!("case {case}: rendered DOMs diverge");
        }
        if fast_stats.nodes_visited > naive_stats.nodes_visited {
            pass = false;
            eprintln!(
                "case {case}: engine visited {} > naive {}",
                fast_stats.nodes_visited, naive_stats.nodes_visited
            );
        }
        if naive_stats.nodes_visited > 0 {
            worst_ratio = worst_ratio
                .max(fast_stats.nodes_visited as f64 / naive_stats.nodes_visited as f64);
        }
    }
    assert!(verdict(
        "criterion 2 (fast-path equivalence)",
        pass,
        &format!("{CASES} pairs byte-identical, engine/naive visit ratio ≤ {worst_ratio:.3}")
    ));
}

/// Minimum single-element moves from the identity arrangement to each
/// permutation of n items, by breadth-first search.
fn min_moves_table(n: usize) -> HashMap<Vec<u8>, usize> {
    let identity: Vec<u8> = (0..n as u8).collect();
    let mut dist: HashMap<Vec<u8>, usize> = HashMap::new();
    dist.insert(identity.clone(), 0);
    let mut queue = VecDeque::from([identity]);
    while let Some(state) = queue.pop_front() {
        let d = dist[&state];
        for from in 0..n {
            for to in 0..n {
                if from == to {
                    continue;
                }
                let mut next = state.clone();
                let item = next.remove(from);
                next.insert(to, item);
                if !dist.contains_key(&next) {
                    dist.insert(next.clone(), d + 1);
                    queue.push_back(next);
                }
            }
        }
    }
    dist
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut items: Vec<u8> = (0..n as u8).collect();
    fn heap(k: usize, items: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut items, &mut out);
    out
}

fn keyed_list(keys: &[String]) -> VNode {
    let children = keys
        .iter()
        .map(|k| {
            make_element(
                "li",
                Props::new(),
                vec![text(k)],
                Some(Arc::from(k.as_str())),
                None,
            )
            .unwrap()
        })
        .collect();
    make_element("ul", Props::new(), children, None, None).unwrap()
}

fn op_counts(patch: &[PatchOp]) -> (usize, usize) {
    let moves = patch
        .iter()
        .filter(|op| matches!(op, PatchOp::MoveChild { .. }))
        .count();
    let structural = patch
        .iter()
        .filter(|op| {
            matches!(
                op,
                PatchOp::InsertChild { .. } | PatchOp::RemoveChild { .. } | PatchOp::Replace { .. }
            )
        })
        .count();
    (moves, structural)
}

#[test]
fn criterion_3_keyed_guarantees() {
    let started = Instant::now();
    let mut pass = true;

    // The published swap case: 1,000 rows, rows 1 and 998 exchanged.
    let keys: Vec<String> = (0..1000).map(|i| format!("r{i}")).collect();
    let mut swapped = keys.clone();
    swapped.swap(1, 998);
    let old = keyed_list(&keys);
    let new = keyed_list(&swapped);
    let (patch, _) = diff(&old, &new);
    let (moves, structural) = op_counts(&patch);
    if moves > 2 || structural != 0 {
        pass = false;
        eprintln!("swap produced {moves} moves, {structural} structural ops");
    }
    let mut doc = Document::new();
    let mut dom = doc.realize(&old);
    doc.apply(&mut dom, &patch).unwrap();
    if serialize(&dom) != render_fresh(&new) {
        pass = false;
        eprintln!("swap patch does not reproduce the target DOM");
    }

    // Every permutation of up to 6 keyed children matches the brute-force
    // minimal move count, with zero inserts/removes.
    let mut checked = 0usize;
    for n in 2..=6 {
        let table = min_moves_table(n);
        let base_keys: Vec<String> = (0..n).map(|i| format!("k{i}")).collect();
        let old = keyed_list(&base_keys);
        for perm in permutations(n) {
            let new_keys: Vec<String> =
                perm.iter().map(|&i| base_keys[i as usize].clone()).collect();
            let new = keyed_list(&new_keys);
            let (patch, _) = diff(&old, &new);
            let (moves, structural) = op_counts(&patch);
            let minimal = table[&perm];
            if moves != minimal || structural != 0 {
                pass = false;
                eprintln!("perm {perm:?}: {moves} moves (minimal {minimal}), {structural} structural");
            }
            let mut doc = Document::new();
            let mut dom = doc.realize(&old);
            doc.apply(&mut dom, &patch).unwrap();
            if serialize(&dom) != render_fresh(&new) {
                pass = false;
                eprintln!("perm {perm:?}: wrong DOM");
            }
            checked += 1;
        }
    }
    let elapsed = started.elapsed();
    pass = pass && elapsed < Duration::from_secs(10);
    assert!(verdict(
        "criterion 3 (keyed guarantees)",
        pass,
        &format!(
            "swap ≤ 2 moves, {checked} permutations equal the BFS minimum, {:.1}s",
            elapsed.as_secs_f64()
        )
    ));
}

#[test]
fn criterion_4_compiler_soundness() {
    let mut gen = TemplateGen::new(0xC0DE);
    let mut pass = true;
    const TEMPLATES: usize = 500;
    for case in 0..TEMPLATES {
        let source = gen.template();
        let hoisted = compile(&source).unwrap();
        let inline = compile_without_hoisting(&source).unwrap();
        for _ in 0..5 {
            let state = gen.state();
            let a = instantiate(&hoisted, &state).unwrap();
            let b = instantiate(&inline, &state).unwrap();
            if vjson::to_canonical_string(&a) != vjson::to_canonical_string(&b)
                || render_fresh(&a) != render_fresh(&b)
            {
                pass = false;
                eprintln!("case {case}: hoisting changed output\n{source}");
            }
        }
    }

    // Static subtrees contribute zero diff visits between renders with
    // changed dynamic state: visits are independent of static size.
    let sized = |n: usize| {
        let items: String = (0..n).map(|i| format!("<li>item {i}</li>")).collect();
        format!("<div><ul>{items}</ul><p>{{msg}}</p></div>")
    };
    let mut visits = Vec::new();
    for n in [4, 64] {
        let module = compile(&sized(n)).unwrap();
        let old = instantiate(&module, &json!({"msg": "a"})).unwrap();
        let new = instantiate(&module, &json!({"msg": "b"})).unwrap();
        let (_, stats) = diff(&old, &new);
        visits.push(stats.nodes_visited);
    }
    if visits[0] != visits[1] {
        pass = false;
        eprintln!("static-subtree visits grew with size: {visits:?}");
    }
    assert!(verdict(
        "criterion 4 (compiler soundness)",
        pass,
        &format!(
            "{TEMPLATES} templates x 5 states hoist-invariant; static visits {} = {}",
            visits[0], visits[1]
        )
    ));
}

#[test]
fn criterion_5_delta_scaling() {
    let started = Instant::now();
    let suite = append::run_suite(5000, &[AppendMode::Delta, AppendMode::Vdom], 1);
    let slope_of = |mode: AppendMode| {
        suite
            .slopes
            .iter()
            .find(|(m, _)| *m == mode)
            .and_then(|(_, s)| *s)
            .expect("slope fitted")
    };
    let delta_slope = slope_of(AppendMode::Delta);
    let vdom_slope = slope_of(AppendMode::Vdom);

    let time_at = |mode: AppendMode, n: usize| {
        suite
            .runs
            .iter()
            .find(|r| r.mode == mode && r.n == n)
            .map(|r| r.total_ms)
            .expect("headline run present")
    };
    let ratio = time_at(AppendMode::Vdom, 5000) / time_at(AppendMode::Delta, 5000);

    let elapsed = started.elapsed();
    let pass = (delta_slope - 1.0).abs() <= 0.2
        && (vdom_slope - 2.0).abs() <= 0.3
        && ratio >= 5.0
        && elapsed < Duration::from_secs(180);
    assert!(verdict(
        "criterion 5 (delta scaling)",
        pass,
        &format!(
            "delta slope {delta_slope:.3} (1.0±0.2), vdom slope {vdom_slope:.3} (2.0±0.3), wall ratio {ratio:.1}x (≥5), {:.1}s",
            elapsed.as_secs_f64()
        )
    ));
}

#[test]
fn criterion_6a_engine_vs_naive_geomean() {
    let cfg = JsfbConfig::default();
    let outcomes = jsfb::run_suite(&cfg, &[Impl::Engine, Impl::Naive]);
    let engine = jsfb::geomean_ops_per_sec(&outcomes, Impl::Engine);
    let naive = jsfb::geomean_ops_per_sec(&outcomes, Impl::Naive);
    let ratio = engine / naive;
    assert!(verdict(
        "criterion 6a (engine ≥ 1.5x naive geomean)",
        ratio >= 1.5,
        &format!("engine {engine:.1} ops/s vs naive {naive:.1} ops/s = {ratio:.2}x")
    ));
}

#[test]
fn criterion_6b_engine_vs_dom_oracle_gap() {
    // Measured exactly as specified: ops/sec gap on the every-10th-row
    // update at 1,000 rows, engine vs the minimal-mutation DOM oracle.
    let cfg = JsfbConfig {
        iterations: 25,
        ..JsfbConfig::default()
    };
    let spec = jsfb::cases(cfg.rows)
        .into_iter()
        .find(|c| c.name == "Update every 10th row for 1,000 rows")
        .unwrap();
    let engine = jsfb::run_case(&spec, Impl::Engine, cfg.seed, &cfg);
    let oracle = jsfb::run_case(&spec, Impl::Dom, cfg.seed, &cfg);
    assert_eq!(engine.final_html, oracle.final_html, "oracle DOM diverged");
    let gap = oracle.ops_per_sec() / engine.ops_per_sec();
    assert!(verdict(
        "criterion 6b (dom-oracle gap ≤ 2x on every-10th update)",
        gap <= 2.0,
        &format!(
            "dom {:.0} ops/s vs engine {:.0} ops/s = {gap:.2}x gap",
            oracle.ops_per_sec(),
            engine.ops_per_sec()
        )
    ));
}

fn counter_view(root: u64, value: u64) -> VNode {
    make_element(
        "div",
        Props::new(),
        vec![text(format!("root {root} value {value}"))],
        None,
        None,
    )
    .unwrap()
}

#[test]
fn criterion_7_scheduler_contracts() {
    let mut pass = true;

    // Exhaustive scripts: every (root, priority) sequence up to length 4
    // over two roots.
    let options: Vec<(u64, Priority)> = [1u64, 2]
        .into_iter()
        .flat_map(|r| {
            [Priority::Idle, Priority::Render, Priority::UserInteraction]
                .into_iter()
                .map(move |p| (r, p))
        })
        .collect();
    let mut scripts: Vec<Vec<(u64, Priority)>> = vec![vec![]];
    let mut exhaustive = Vec::new();
    for _len in 1..=4 {
        let mut next = Vec::new();
        for script in &scripts {
            for &op in &options {
                let mut extended = script.clone();
                extended.push(op);
                next.push(extended);
            }
        }
        exhaustive.extend(next.iter().cloned());
        scripts = next;
    }

    for script in &exhaustive {
        if !check_script(script, u64::MAX, 0) {
            pass = false;
            eprintln!("exhaustive script failed: {script:?}");
        }
    }

    // Random interleavings of up to 8 tasks over three roots, with random
    // per-task costs and a budget that forces yields.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5CED);
    for trial in 0..1000 {
        let len = rng.gen_range(1..=8);
        let script: Vec<(u64, Priority)> = (0..len)
            .map(|_| {
                (
                    rng.gen_range(1..=3),
                    match rng.gen_range(0..3) {
                        0 => Priority::Idle,
                        1 => Priority::Render,
                        _ => Priority::UserInteraction,
                    },
                )
            })
            .collect();
        let budget = rng.gen_range(0..6);
        let advance = rng.gen_range(0..4);
        if !check_script(&script, budget, advance) {
            pass = false;
            eprintln!("random trial {trial} failed: {script:?} budget {budget}");
        }
    }

    assert!(verdict(
        "criterion 7 (scheduler contracts)",
        pass,
        &format!(
            "{} exhaustive scripts + 1000 random interleavings",
            exhaustive.len()
        )
    ));
}

/// Run one schedule script, then flush to completion. Checks coalescing
/// (one apply per root per flush), priority order against an independent
/// simulation, per-task op-log atomicity, the starvation bound, and final
/// DOM equality with a direct render of the last-submitted state.
fn check_script(script: &[(u64, Priority)], budget_ms: u64, advance_per_task: u64) -> bool {
    let clock = VirtualClock::new();
    let mut sched = Scheduler::new();
    let roots: Vec<u64> = {
        let mut seen = Vec::new();
        for &(root, _) in script {
            if !seen.contains(&root) {
                seen.push(root);
            }
        }
        seen
    };
    for &root in &roots {
        if sched.register_root(root, counter_view(root, 0)).is_err() {
            return false;
        }
    }

    // Independent coalescing simulation: root -> (priority, seq, value).
    let mut expected: HashMap<u64, (Priority, u64, u64)> = HashMap::new();
    for (ix, &(root, priority)) in script.iter().enumerate() {
        let seq = ix as u64 + 1;
        let value = seq;
        let tick = clock.clone();
        let cost = advance_per_task;
        if sched
            .schedule(root, priority, move || {
                tick.advance(cost);
                counter_view(root, value)
            })
            .is_err()
        {
            return false;
        }
        expected
            .entry(root)
            .and_modify(|e| *e = (e.0.max(priority), seq, value))
            .or_insert((priority, seq, value));
    }

    if sched.pending_tasks() != expected.len() {
        return false;
    }

    // Expected execution order over the coalesced set.
    let mut order: Vec<(u64, (Priority, u64, u64))> = expected.iter().map(|(k, v)| (*k, *v)).collect();
    order.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.1 .1.cmp(&b.1 .1)));
    let expected_order: Vec<u64> = order.iter().map(|(root, _)| *root).collect();

    let mut completed_all: Vec<u64> = Vec::new();
    let mut flushes = 0;
    while sched.pending_tasks() > 0 {
        let log_before: HashMap<u64, usize> = roots
            .iter()
            .map(|&r| (r, sched.document(r).unwrap().log.len()))
            .collect();
        let report = sched.flush(budget_ms, &clock);
        // Starvation bound: a nonempty queue always completes something.
        if report.completed.is_empty() {
            return false;
        }
        // Yield flag is accurate.
        if report.yielded != (sched.pending_tasks() > 0) {
            return false;
        }
        // Atomicity: only completed roots' logs changed this flush.
        for &root in &roots {
            let grew = sched.document(root).unwrap().log.len() > log_before[&root];
            let completed_now = report.completed.contains(&root);
            if grew && !completed_now {
                return false;
            }
        }
        completed_all.extend(report.completed);
        flushes += 1;
        if flushes > script.len() + 1 {
            return false;
        }
    }

    // Coalescing: each scheduled root applied exactly once overall.
    if completed_all != expected_order {
        return false;
    }

    // Final DOM equals a direct render of the last-submitted state.
    for (&root, &(_, _, value)) in &expected {
        let direct = render_fresh(&counter_view(root, value));
        if sched.root_html(root).as_deref() != Some(direct.as_str()) {
            return false;
        }
    }
    true
}

#[test]
fn criterion_8_determinism() {
    let mut pass = true;

    // Compilation is byte-reproducible.
    let mut gen = TemplateGen::new(0xD17E);
    for _ in 0..50 {
        let source = gen.template();
        if emit(&compile(&source).unwrap()) != emit(&compile(&source).unwrap()) {
            pass = false;
            eprintln!("compile not reproducible:\n{source}");
        }
    }

    // Diffing is byte-reproducible (serialized patch comparison).
    let cfg = TreeGenConfig::default();
    let mut tree_gen = TreeGen::new(0xD1FF);
    for _ in 0..200 {
        let (old, new) = tree_gen.pair(&cfg);
        let (a, _) = diff(&old, &new);
        let (b, _) = diff(&old, &new);
        if patch_json::patch_to_string(&a) != patch_json::patch_to_string(&b) {
            pass = false;
            eprintln!("diff not reproducible");
        }
    }

    // Seeded benchmark reports are byte-reproducible.
    let bench_cfg = JsfbConfig {
        rows: 60,
        seed: 2,
        warmup: 1,
        iterations: 2,
    };
    let a = report::jsfb_report(&bench_cfg, &jsfb::run_suite(&bench_cfg, &Impl::ALL), false);
    let b = report::jsfb_report(&bench_cfg, &jsfb::run_suite(&bench_cfg, &Impl::ALL), false);
    if serde_json::to_string(&a).unwrap() != serde_json::to_string(&b).unwrap() {
        pass = false;
        eprintln!("jsfb report not reproducible");
    }
    let a = report::append_report(&append::run_suite(1000, &AppendMode::ALL, 4), false);
    let b = report::append_report(&append::run_suite(1000, &AppendMode::ALL, 4), false);
    if serde_json::to_string(&a).unwrap() != serde_json::to_string(&b).unwrap() {
        pass = false;
        eprintln!("append report not reproducible");
    }

    assert!(verdict(
        "criterion 8 (determinism)",
        pass,
        "compile, diff, and seeded bench reports byte-reproducible"
    ));
}
