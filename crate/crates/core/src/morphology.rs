//! Structural growth and trimming of a growable tree.
//!
//! A rich leaf covering several regions splits into two specialized
//! children; a decision node whose leaves have become poor absorbs them
//! again. Trimming uses a lower threshold than growing so a fresh split is
//! never undone in the same state.

use std::collections::{BTreeSet, HashSet};

use crate::model::{ModelParams, NodeId, NodeKind, NodeState, SystemGraph};

/// Splits a service leaf into two children if it holds at least
/// `grow_threshold` resident assets and supports two or more regions. The
/// first child takes the first half of the ordered regions (rounded up).
pub fn try_grow(graph: &mut SystemGraph, leaf: NodeId, params: &ModelParams) -> bool {
    let Some(node) = graph.node(leaf) else {
        return false;
    };
    if !node.is_service() || node.resident_assets < params.grow_threshold || node.regions.len() < 2
    {
        return false;
    }
    let regions: Vec<usize> = node.regions.iter().copied().collect();
    let half = regions.len().div_ceil(2);
    let share = node.resident_assets / 2.0;

    let node = graph.node_mut(leaf).expect("leaf exists");
    node.kind = NodeKind::Decision;
    node.resident_assets = 0.0;
    node.regions.clear();

    for part in [&regions[..half], &regions[half..]] {
        let child = graph.add_node(NodeState::service(part.iter().copied(), share));
        graph.add_edge(leaf, child).expect("both nodes exist");
        graph.set_up_outputs(child, share, 0.0);
        graph.edge_mut(leaf, child).expect("new edge").down_assets = share;
    }
    true
}

/// Merges all children of a decision node back into it when every child is
/// a service node owned by this node alone and their combined assets are
/// below `trim_threshold`. The node's upward estimates are left untouched.
pub fn try_trim(graph: &mut SystemGraph, node: NodeId, params: &ModelParams) -> bool {
    if !graph.node(node).is_some_and(|n| n.is_decision()) {
        return false;
    }
    let children = graph.children(node).to_vec();
    if children.is_empty() {
        return false;
    }
    let all_private_leaves = children
        .iter()
        .all(|&c| graph.node(c).is_some_and(|n| n.is_service()) && graph.parents(c).len() == 1);
    if !all_private_leaves {
        return false;
    }
    let held: f64 = children
        .iter()
        .map(|&c| graph.node(c).expect("child exists").assets())
        .sum();
    if held >= params.trim_threshold {
        return false;
    }
    let regions: BTreeSet<usize> = children
        .iter()
        .flat_map(|&c| graph.node(c).expect("child exists").regions.iter().copied())
        .collect();
    for &c in &children {
        graph.remove_node(c);
    }
    let n = graph.node_mut(node).expect("node exists");
    let own = n.assets();
    n.kind = NodeKind::Service;
    n.resident_assets = own + held;
    n.nonsettled_assets = 0.0;
    n.regions = regions;
    true
}

/// One sweep of trims followed by grows, each in id order. A node takes part
/// in at most one structural change per pass. Returns the number of changes.
pub fn morphology_pass(graph: &mut SystemGraph, params: &ModelParams) -> usize {
    if !params.growable {
        return 0;
    }
    let mut touched: HashSet<NodeId> = HashSet::new();
    let mut changes = 0;
    for id in graph.node_ids() {
        if !graph.contains(id) || touched.contains(&id) {
            continue;
        }
        let children = graph.children(id).to_vec();
        if try_trim(graph, id, params) {
            touched.insert(id);
            touched.extend(children);
            changes += 1;
        }
    }
    for id in graph.node_ids() {
        if touched.contains(&id) {
            continue;
        }
        if try_grow(graph, id, params) {
            touched.insert(id);
            touched.extend(graph.children(id).iter().copied());
            changes += 1;
        }
    }
    changes
}
