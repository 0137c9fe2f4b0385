//! The three information flows: bottom-up asset and profitability estimates
//! and the top-down eligible-asset grant.
//!
//! Both sweeps read values written earlier in the same sweep, so a parent
//! sees its children's estimates from the current step and a child sees its
//! parents' grants from the current step.

use crate::environment::Environment;
use crate::error::Result;
use crate::model::{ModelParams, NodeId, SystemGraph};

/// Moves `previous` a fraction `gamma` of the way towards `target`. Exact at
/// both ends: gamma 1 yields `target`, gamma 0 yields `previous`.
pub fn smooth(previous: f64, target: f64, gamma: f64) -> f64 {
    (1.0 - gamma) * previous + gamma * target
}

/// Updates every node's upward asset and profit estimate, deepest nodes first.
pub fn update_bottom_up_flows(
    graph: &mut SystemGraph,
    params: &ModelParams,
    env: &Environment,
    t: u64,
) -> Result<()> {
    for id in graph.bottom_up_order()? {
        let node = graph.node(id).expect("ordered node exists");
        let (asset_target, profit_target) = if node.is_service() {
            (node.assets(), env.service_profit(node, t)?)
        } else {
            let children = graph.children(id);
            let assets: f64 = children.iter().map(|&c| graph.up_assets(c)).sum();
            let profit: f64 = children.iter().map(|&c| graph.up_profit(c)).sum();
            (node.assets() + assets, profit)
        };
        let up_assets = smooth(graph.up_assets(id), asset_target, params.gamma_up_assets);
        let up_profit = smooth(graph.up_profit(id), profit_target, params.gamma_up_profit);
        graph.set_up_outputs(id, up_assets, up_profit);
    }
    Ok(())
}

/// Eligible assets of a node after correcting the parents' grants by the
/// node's own sub-graph estimate. Roots grant themselves their whole
/// sub-graph.
pub fn eligible_assets_corrected(graph: &SystemGraph, node: NodeId) -> f64 {
    let own = graph.node(node).map_or(0.0, |n| n.assets());
    let subtree = own
        + graph
            .children(node)
            .iter()
            .map(|&c| graph.up_assets(c))
            .sum::<f64>();
    let parents = graph.parents(node);
    if parents.is_empty() {
        return subtree;
    }
    let granted: f64 = parents
        .iter()
        .map(|&p| graph.edge(p, node).map_or(0.0, |e| e.down_assets))
        .sum();
    granted.min(subtree)
}

/// Splits `eligible` (less the management cost) among children in proportion
/// to `profit^beta`. Falls back to an equal split when `beta` is zero or every
/// weight is zero. The shares always sum to `max(0, eligible - cost)`.
pub fn split_by_profit(eligible: f64, cost: f64, profits: &[f64], beta: f64) -> Vec<f64> {
    let budget = (eligible - cost).max(0.0);
    if profits.is_empty() {
        return Vec::new();
    }
    let equal = || vec![budget / profits.len() as f64; profits.len()];
    if beta == 0.0 {
        return equal();
    }
    let weights: Vec<f64> = profits.iter().map(|&f| f.max(0.0).powf(beta)).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return equal();
    }
    weights.iter().map(|w| budget * w / total).collect()
}

/// Per-child targets for one decision node, in child id order.
pub fn split_eligible(graph: &SystemGraph, node: NodeId, params: &ModelParams) -> Vec<f64> {
    let eligible = eligible_assets_corrected(graph, node);
    let profits: Vec<f64> = graph
        .children(node)
        .iter()
        .map(|&c| graph.up_profit(c))
        .collect();
    split_by_profit(eligible, params.cost, &profits, params.beta)
}

/// Updates the downward grant on every edge, roots first.
pub fn update_top_down_flows(graph: &mut SystemGraph, params: &ModelParams) -> Result<()> {
    for id in graph.top_down_order()? {
        if graph.children(id).is_empty() {
            continue;
        }
        let targets = split_eligible(graph, id, params);
        let children = graph.children(id).to_vec();
        for (child, target) in children.into_iter().zip(targets) {
            let edge = graph.edge_mut(id, child).expect("child edge exists");
            edge.down_assets = smooth(edge.down_assets, target, params.gamma_down);
        }
    }
    Ok(())
}
