//! Step orchestration, full runs and per-step metrics.

use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::flows::{update_bottom_up_flows, update_top_down_flows};
use crate::model::{ModelParams, SystemGraph};
use crate::morphology::morphology_pass;
use crate::relocation::relocate;
use crate::topology::TopologyKind;

/// Asset total every reference experiment starts with.
pub const DEFAULT_TOTAL_ASSETS: f64 = 100.0;

/// Observables recorded at the end of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub step: u64,
    /// System-wide profit produced this step.
    pub profit: f64,
    /// Asset mass moved this step as a percentage of all assets.
    pub relocated_pct: f64,
    /// Resident service assets attributed to each region; a leaf's assets are
    /// divided equally over the regions it supports.
    pub region_assets: Vec<f64>,
    pub node_count: usize,
    pub leaf_count: usize,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub rows: Vec<MetricsRow>,
    pub final_graph: SystemGraph,
}

impl RunResult {
    /// Mean profit over steps `from..to`.
    pub fn mean_profit(&self, from: u64, to: u64) -> Result<f64> {
        mean_profit(&self.rows, from, to)
    }
}

pub fn mean_profit(rows: &[MetricsRow], from: u64, to: u64) -> Result<f64> {
    let (sum, n) = rows
        .iter()
        .filter(|r| (from..to).contains(&r.step))
        .fold((0.0, 0usize), |(s, n), r| (s + r.profit, n + 1));
    if n == 0 {
        return Err(Error::EmptyRange { from, to });
    }
    Ok(sum / n as f64)
}

pub fn region_assets(graph: &SystemGraph, num_regions: usize) -> Vec<f64> {
    let mut out = vec![0.0; num_regions];
    for (_, leaf) in graph.leaves() {
        let share = leaf.resident_assets / leaf.regions.len() as f64;
        for &m in &leaf.regions {
            if let Some(slot) = out.get_mut(m - 1) {
                *slot += share;
            }
        }
    }
    out
}

fn system_profit(graph: &SystemGraph, env: &Environment, t: u64) -> Result<f64> {
    graph
        .leaves()
        .map(|(_, leaf)| env.service_profit(leaf, t))
        .sum()
}

/// Advances `graph` by one step: bottom-up flows, top-down flows,
/// relocation, then growth and trimming when enabled. Metrics are sampled
/// after all four passes.
pub fn step(
    graph: &mut SystemGraph,
    params: &ModelParams,
    env: &Environment,
    t: u64,
) -> Result<MetricsRow> {
    update_bottom_up_flows(graph, params, env, t)?;
    update_top_down_flows(graph, params)?;
    let moved = relocate(graph, params)?;
    morphology_pass(graph, params);

    let total = graph.total_assets();
    Ok(MetricsRow {
        step: t,
        profit: system_profit(graph, env, t)?,
        relocated_pct: if total > 0.0 {
            100.0 * moved / total
        } else {
            0.0
        },
        region_assets: region_assets(graph, env.num_regions()),
        node_count: graph.len(),
        leaf_count: graph.leaves().count(),
    })
}

/// A graph evolving under fixed parameters in a given environment.
#[derive(Debug, Clone)]
pub struct Simulation {
    graph: SystemGraph,
    params: ModelParams,
    env: Environment,
    now: u64,
}

impl Simulation {
    /// Validates the parameters, the graph, and that every supported region
    /// exists in the environment.
    pub fn new(graph: SystemGraph, params: ModelParams, env: Environment) -> Result<Self> {
        params.validate()?;
        graph.validate()?;
        for (_, leaf) in graph.leaves() {
            if let Some(&m) = leaf
                .regions
                .iter()
                .find(|&&m| m == 0 || m > env.num_regions())
            {
                return Err(Error::RegionOutOfRange {
                    region: m,
                    num_regions: env.num_regions(),
                });
            }
        }
        Ok(Self {
            graph,
            params,
            env,
            now: 0,
        })
    }

    /// Builds `kind` over the environment's regions. Growth and trimming are
    /// enabled exactly when the topology is growable.
    pub fn from_topology(
        kind: TopologyKind,
        total_assets: f64,
        params: ModelParams,
        env: Environment,
    ) -> Result<Self> {
        let graph = kind.build(env.num_regions(), total_assets)?;
        let params = ModelParams {
            growable: kind.is_growable(),
            ..params
        };
        Self::new(graph, params, env)
    }

    pub fn graph(&self) -> &SystemGraph {
        &self.graph
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn environment(&self) -> &Environment {
        &self.env
    }

    /// The index of the next step to execute.
    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn step(&mut self) -> Result<MetricsRow> {
        let row = step(&mut self.graph, &self.params, &self.env, self.now)?;
        self.now += 1;
        Ok(row)
    }

    pub fn run(mut self, steps: u64) -> Result<RunResult> {
        let rows = (0..steps)
            .map(|_| self.step())
            .collect::<Result<Vec<_>>>()?;
        Ok(RunResult {
            rows,
            final_graph: self.graph,
        })
    }
}

/// Runs `kind` for `total_steps` steps starting from the default asset total.
pub fn run(
    kind: TopologyKind,
    params: &ModelParams,
    env: &Environment,
    total_steps: u64,
) -> Result<RunResult> {
    Simulation::from_topology(kind, DEFAULT_TOTAL_ASSETS, *params, env.clone())?.run(total_steps)
}
