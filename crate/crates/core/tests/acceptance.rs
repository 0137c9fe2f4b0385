//! End-to-end acceptance checks. Runs without the default harness so that
//! every criterion reports one PASS/FAIL line, even when all of them pass.

use std::process::ExitCode;

use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use msad::config::ExperimentConfig;
use msad::experiment::{run_sweep, SweepTable};
use msad::flows::split_by_profit;
use msad::{Environment, ModelParams, NodeId, Simulation, SystemGraph, TopologyKind};

const BETAS: [f64; 7] = [0.0, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1];
const STATIC: [TopologyKind; 5] = [
    TopologyKind::FixedTree,
    TopologyKind::Line,
    TopologyKind::Circle,
    TopologyKind::Complete,
    TopologyKind::AllToRoot,
];

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn table() -> SweepTable {
    let mut base = ExperimentConfig::paper(TopologyKind::GrowableTree, 0.0);
    base.params.alpha = 0.2;
    run_sweep(&TopologyKind::ALL, &BETAS, &base, 800).expect("sweep runs")
}

fn zero_competition_row(t: &SweepTable) -> Outcome {
    let row = &t.cells[0];
    let worst = row.iter().map(|v| (v - 12.5).abs()).fold(0.0, f64::max);
    check(
        worst <= 0.2,
        format!("row {row:.3?}, largest deviation {worst:.2e}"),
    )
}

fn extremes(t: &SweepTable) -> Outcome {
    let cells = t.betas.iter().enumerate().flat_map(|(i, &b)| {
        t.topologies
            .iter()
            .enumerate()
            .map(move |(j, &k)| (b, k, t.cells[i][j]))
    });
    let by_value = |a: &(f64, TopologyKind, f64), b: &(f64, TopologyKind, f64)| a.2.total_cmp(&b.2);
    let max = cells.clone().max_by(by_value).unwrap();
    let min = cells.min_by(by_value).unwrap();
    let ok = (max.0, max.1) == (0.8, TopologyKind::GrowableTree)
        && (min.0, min.1) == (1.1, TopologyKind::Line)
        && (max.2 - 26.2).abs() <= 0.15 * 26.2
        && (min.2 - 12.3).abs() <= 0.15 * 12.3;
    check(
        ok,
        format!(
            "max {} at beta {} = {:.3} (target 26.2 ± 15%), min {} at beta {} = {:.3} (target 12.3 ± 15%)",
            max.1, max.0, max.2, min.1, min.0, min.2
        ),
    )
}

/// Orderings between topologies are checked at the one-decimal resolution
/// the reference table is given in.
fn shape(t: &SweepTable) -> Outcome {
    let tenth = |x: f64| (x * 10.0).round() / 10.0;
    let mut problems = Vec::new();
    let mut peaks = Vec::new();
    for kind in STATIC {
        let col: Vec<f64> = BETAS.iter().map(|&b| t.get(b, kind).unwrap()).collect();
        let peak = (0..col.len())
            .max_by(|&a, &b| col[a].total_cmp(&col[b]))
            .unwrap();
        peaks.push(format!("{kind}@{}", BETAS[peak]));
        if !(BETAS[peak] == 0.8 || BETAS[peak] == 0.9) {
            problems.push(format!("{kind} peaks at beta {}", BETAS[peak]));
        }
        if col[..=peak].windows(2).any(|w| w[1] <= w[0]) {
            problems.push(format!("{kind} does not rise up to its peak: {col:.3?}"));
        }
        if col[col.len() - 1] >= col[peak] {
            problems.push(format!("{kind} does not fall at beta 1.1"));
        }
    }
    let mut closest = f64::INFINITY;
    for &b in BETAS.iter().filter(|&&b| b >= 0.6) {
        let line = t.get(b, TopologyKind::Line).unwrap();
        for other in [TopologyKind::Circle, TopologyKind::Complete] {
            let v = t.get(b, other).unwrap();
            closest = closest.min(v - line);
            if tenth(line) > tenth(v) {
                problems.push(format!("line {line:.3} > {other} {v:.3} at beta {b}"));
            }
        }
    }
    let detail = format!(
        "peaks {}; smallest raw (circle|complete) - line margin {closest:.3}",
        peaks.join(" ")
    );
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", problems.join("; ")))
    }
}

/// The leaf supporting `region` and whether it holds the most assets.
fn leaf_with_region(g: &SystemGraph, region: usize) -> (f64, bool) {
    let max = g
        .leaves()
        .map(|(_, l)| l.resident_assets)
        .fold(0.0, f64::max);
    let held = g
        .leaves()
        .find(|(_, l)| l.regions.contains(&region))
        .map(|(_, l)| l.resident_assets)
        .unwrap_or(0.0);
    (held, held == max && held > 0.0)
}

fn crossover(rows: &[msad::MetricsRow], from: u64, winner: usize, loser: usize) -> Option<u64> {
    rows.iter()
        .find(|r| r.step >= from && r.region_assets[winner] > r.region_assets[loser])
        .map(|r| r.step - from)
}

fn adaptation() -> Outcome {
    let env = Environment::paper();
    let params = ModelParams::default().with_beta(0.7);
    let mut problems = Vec::new();
    let mut delays = Vec::new();
    for kind in STATIC {
        let mut sim = Simulation::from_topology(kind, 100.0, params, env.clone()).unwrap();
        let mut rows = Vec::new();
        for t in 0..1200 {
            rows.push(sim.step().unwrap());
            let region = match t {
                399 => 1,
                799 => 8,
                _ => continue,
            };
            let (held, top) = leaf_with_region(sim.graph(), region);
            if !top {
                problems.push(format!(
                    "{kind} t={t}: region-{region} leaf holds {held:.2}, not the most"
                ));
            }
        }
        delays.push((
            kind,
            crossover(&rows, 400, 7, 0),
            crossover(&rows, 800, 0, 7),
        ));
    }
    let of = |kind| {
        delays
            .iter()
            .find(|d| d.0 == kind)
            .map(|d| (d.1, d.2))
            .unwrap()
    };
    let (line, root) = (of(TopologyKind::Line), of(TopologyKind::AllToRoot));
    let longer = |a: Option<u64>, b: Option<u64>| matches!((a, b), (Some(a), Some(b)) if a > b);
    if !(longer(line.0, root.0) && longer(line.1, root.1)) {
        problems.push(format!(
            "line delays {line:?} not longer than all-to-root {root:?}"
        ));
    }
    let show = |d: Option<u64>| d.map_or("none".to_string(), |d| d.to_string());
    let detail = format!(
        "crossover delays after t=400/800: {}",
        delays
            .iter()
            .map(|(k, a, b)| format!("{k}={}/{}", show(*a), show(*b)))
            .collect::<Vec<_>>()
            .join(" ")
    );
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", problems.join("; ")))
    }
}

fn growth() -> Outcome {
    let params = ModelParams::default().with_beta(0.7);
    let mut sim = Simulation::from_topology(
        TopologyKind::GrowableTree,
        100.0,
        params,
        Environment::paper(),
    )
    .unwrap();
    let singleton_on_top = |g: &SystemGraph, region: usize| {
        let (held, top) = leaf_with_region(g, region);
        let exact = g
            .leaves()
            .any(|(_, l)| l.regions.len() == 1 && l.regions.contains(&region));
        (exact && top, held)
    };
    let mut at_399 = (false, 0.0);
    for t in 0..800 {
        sim.step().unwrap();
        if t == 399 {
            at_399 = singleton_on_top(sim.graph(), 1);
        }
    }
    let at_799 = singleton_on_top(sim.graph(), 8);
    let region_one_width = sim
        .graph()
        .leaves()
        .find(|(_, l)| l.regions.contains(&1))
        .map_or(0, |(_, l)| l.regions.len());
    check(
        at_399.0 && at_799.0 && region_one_width > 1,
        format!(
            "leaf {{1}} holds {:.2} at t=399 (top: {}), leaf {{8}} holds {:.2} at t=799 (top: {}), region-1 leaf spans {region_one_width} regions at t=799",
            at_399.1, at_399.0, at_799.1, at_799.0
        ),
    )
}

fn frozen(t: &SweepTable) -> Outcome {
    let params = ModelParams::default().with_beta(1.1).with_alpha(0.2);
    let mut sim =
        Simulation::from_topology(TopologyKind::FixedTree, 100.0, params, Environment::paper())
            .unwrap();
    for _ in 0..=800 {
        sim.step().unwrap();
    }
    let g = sim.graph();
    let held = g
        .leaves()
        .find(|(_, l)| l.regions.iter().copied().eq([1, 2]))
        .map_or(0.0, |(_, l)| l.resident_assets);
    let share = held / g.total_assets();
    let mean = t.get(1.1, TopologyKind::FixedTree).unwrap();
    check(
        share > 0.5 && (mean - 14.9).abs() <= 0.15 * 14.9,
        format!(
            "leaf {{1,2}} holds {:.1}% at t=800, mean profit {mean:.3} (target 14.9 ± 15%)",
            100.0 * share
        ),
    )
}

fn conservation() -> Outcome {
    let worst = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let kind = TopologyKind::ALL[rng.gen_range(0..TopologyKind::ALL.len())];
            let gamma = |rng: &mut ChaCha8Rng| 1.0 - rng.gen::<f64>();
            let params = ModelParams {
                beta: rng.gen_range(0.0..=1.2),
                alpha: 1.0 - rng.gen::<f64>(),
                gamma_up_assets: gamma(&mut rng),
                gamma_up_profit: gamma(&mut rng),
                gamma_down: gamma(&mut rng),
                ..ModelParams::default()
            };
            let mut sim =
                Simulation::from_topology(kind, 100.0, params, Environment::paper()).unwrap();
            let mut worst = 0.0f64;
            for _ in 0..1200 {
                sim.step().unwrap();
                worst = worst.max((sim.graph().total_assets() - 100.0).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    check(
        worst < 1e-6,
        format!("largest |total - 100| over 1000 configs x 1200 steps: {worst:.2e}"),
    )
}

/// Subtree asset total computed directly from node states.
fn subtree_total(g: &SystemGraph, id: NodeId) -> f64 {
    let own = g.node(id).unwrap().assets();
    g.children(id)
        .iter()
        .fold(own, |acc, &c| acc + subtree_total(g, c))
}

fn fixpoint() -> Outcome {
    let env = Environment::fixed(vec![0.3, 0.25, 0.2, 0.15, 0.1, 0.1, 0.05, 0.05]).unwrap();
    let params = ModelParams::default();
    let mut starts: Vec<(String, SystemGraph)> = STATIC
        .iter()
        .map(|&k| (format!("{k}/uniform"), k.build(8, 100.0).unwrap()))
        .collect();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for kind in [TopologyKind::FixedTree, TopologyKind::AllToRoot] {
            let mut g = kind.build(8, 100.0).unwrap();
            // Quarter units keep every sum, difference and halving exact, so
            // "exactly zero" is not blurred by rounding.
            let ids: Vec<NodeId> = g.leaves().map(|(id, _)| id).collect();
            let mut quarters = vec![1u32; ids.len()];
            for _ in ids.len()..400 {
                quarters[rng.gen_range(0..ids.len())] += 1;
            }
            for (&id, &q) in ids.iter().zip(&quarters) {
                g.node_mut(id).unwrap().resident_assets = f64::from(q) * 0.25;
            }
            g.bootstrap_flows();
            starts.push((format!("{kind}/seed{seed}"), g));
        }
    }
    let mut problems = Vec::new();
    for (label, g) in &starts {
        let depth = g.max_depth().unwrap() as u64;
        let mut sim = Simulation::new(g.clone(), params, env.clone()).unwrap();
        for _ in 0..60 {
            let row = sim.step().unwrap();
            if row.step >= depth + 2 && row.relocated_pct != 0.0 {
                problems.push(format!(
                    "{label}: {}% moved at t={}",
                    row.relocated_pct, row.step
                ));
                break;
            }
        }
        let g = sim.graph();
        for &root in g.roots() {
            if g.up_assets(root) != subtree_total(g, root) {
                problems.push(format!(
                    "{label}: root {root} estimate {} vs subtree {}",
                    g.up_assets(root),
                    subtree_total(g, root)
                ));
            }
        }
    }
    let detail = format!("{} static starts (beta 0, gamma = alpha = 1)", starts.len());
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", problems.join("; ")))
    }
}

/// Share of child `i` written as a ratio against every sibling, independent
/// of the library's normalisation.
fn oracle_share(budget: f64, profits: &[f64], beta: f64, i: usize) -> f64 {
    let denom: f64 = profits.iter().map(|&f| (f / profits[i]).powf(beta)).sum();
    budget / denom
}

fn split_law() -> Outcome {
    let mut runner = TestRunner::new(ProptestConfig {
        cases: 2000,
        failure_persistence: None,
        ..ProptestConfig::default()
    });
    let inputs = (
        0.0..1000.0f64,
        0.0..50.0f64,
        prop::collection::vec(0.01..100.0f64, 1..8),
        0.0..3.0f64,
        0.01..100.0f64,
    );
    let result = runner.run(&inputs, |(eligible, cost, profits, beta, scale)| {
        let budget = (eligible - cost).max(0.0);
        let shares = split_by_profit(eligible, cost, &profits, beta);
        let tol = 1e-9 * budget.max(1.0);

        let total: f64 = shares.iter().sum();
        prop_assert!((total - budget).abs() <= tol, "sum {total} vs {budget}");
        for (i, s) in shares.iter().enumerate() {
            prop_assert!((s - oracle_share(budget, &profits, beta, i)).abs() <= tol);
        }

        let equal = split_by_profit(eligible, cost, &profits, 0.0);
        prop_assert!(equal.iter().all(|&s| s == budget / profits.len() as f64));

        if beta > 0.0 && budget > 0.0 {
            for i in 0..profits.len() {
                for j in 0..profits.len() {
                    if profits[i] > profits[j] {
                        prop_assert!(shares[i] >= shares[j]);
                    }
                }
            }
        }

        let scaled: Vec<f64> = profits.iter().map(|f| f * scale).collect();
        let rescaled = split_by_profit(eligible, cost, &scaled, beta);
        for (a, b) in shares.iter().zip(&rescaled) {
            prop_assert!((a - b).abs() <= tol, "{a} vs {b} under scale {scale}");
        }
        Ok(())
    });
    let zero = split_by_profit(90.0, 0.0, &[0.0, 0.0, 0.0], 0.7);
    check(
        result.is_ok() && zero == vec![30.0; 3],
        match result {
            Ok(()) => "2000 random splits: conservation, oracle agreement, beta-0 equality, monotonicity, scale covariance".into(),
            Err(e) => e.to_string(),
        },
    )
}

fn main() -> ExitCode {
    let t = table();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("1 zero-competition row", zero_competition_row(&t)),
        ("2 table extremes", extremes(&t)),
        ("3 table shape", shape(&t)),
        ("4 adaptation after switches", adaptation()),
        ("5 growth trajectory", growth()),
        ("6 frozen adaptation", frozen(&t)),
        ("7 asset conservation", conservation()),
        ("8 static fixpoint", fixpoint()),
        ("9 split law", split_law()),
    ];
    let mut failed = 0;
    for (name, outcome) in &criteria {
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail})");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
