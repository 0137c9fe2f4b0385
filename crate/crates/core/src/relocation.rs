//! Pressure-driven asset relocation between children and parents.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{ModelParams, NodeId, NodeKind, SystemGraph};

/// Gap between the assets a child holds (excluding those already in
/// transit) and what one of its parents deems it eligible for. Positive
/// values push assets up to the parent, negative values request assets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureReading {
    pub child: NodeId,
    pub parent: NodeId,
    pub delta_p: f64,
}

pub fn pressure(graph: &SystemGraph, child: NodeId, parent: NodeId) -> Result<PressureReading> {
    let edge = graph
        .edge(parent, child)
        .ok_or(Error::MissingEdge { parent, child })?;
    let nonsettled = graph.node(child).map_or(0.0, |n| n.nonsettled_assets);
    Ok(PressureReading {
        child,
        parent,
        delta_p: (graph.up_assets(child) - nonsettled) - edge.down_assets,
    })
}

/// Runs one relocation pass over all decision nodes, deepest first, and
/// returns the total asset mass moved across edges.
///
/// Each decision node first collects from children under positive pressure,
/// then hands its pool out to children under negative pressure, neediest
/// first. Service children release `alpha * delta_p` of their resident
/// assets. A decision child's own pool is exactly what it can pass up, so
/// its pressure is taken against its gross estimate (pool included) and it
/// hands over at most that excess. Assets arriving at a service node become
/// resident; at a decision node they stay non-settled until that node
/// redistributes them.
pub fn relocate(graph: &mut SystemGraph, params: &ModelParams) -> Result<f64> {
    let mut moved = 0.0;
    for parent in graph.bottom_up_order()? {
        if !graph.node(parent).is_some_and(|n| n.is_decision()) {
            continue;
        }
        let readings = graph
            .children(parent)
            .iter()
            .map(|&c| {
                let mut r = pressure(graph, c, parent)?;
                let child = graph.node(c).expect("child exists");
                if child.is_decision() {
                    r.delta_p += child.nonsettled_assets;
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;

        for r in readings.iter().filter(|r| r.delta_p > 0.0) {
            let child = graph.node_mut(r.child).expect("child exists");
            let amount = match child.kind {
                NodeKind::Service => {
                    let amount = (params.alpha * r.delta_p).min(child.resident_assets);
                    child.resident_assets -= amount;
                    amount
                }
                NodeKind::Decision => {
                    let amount = r.delta_p.min(child.nonsettled_assets);
                    child.nonsettled_assets -= amount;
                    amount
                }
            };
            if amount > 0.0 {
                graph
                    .node_mut(parent)
                    .expect("parent exists")
                    .nonsettled_assets += amount;
                moved += amount;
            }
        }

        let mut needy: Vec<&PressureReading> =
            readings.iter().filter(|r| r.delta_p < 0.0).collect();
        needy.sort_by(|a, b| {
            a.delta_p
                .partial_cmp(&b.delta_p)
                .unwrap_or(Ordering::Equal)
                .then(a.child.cmp(&b.child))
        });
        for r in needy {
            let pool = graph.node(parent).expect("parent exists").nonsettled_assets;
            if pool <= 0.0 {
                break;
            }
            let amount = (-r.delta_p).min(pool);
            graph
                .node_mut(parent)
                .expect("parent exists")
                .nonsettled_assets = pool - amount;
            let child = graph.node_mut(r.child).expect("child exists");
            match child.kind {
                NodeKind::Service => child.resident_assets += amount,
                NodeKind::Decision => child.nonsettled_assets += amount,
            }
            moved += amount;
        }
    }
    Ok(moved)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-9, "{a} != {b}");
    }

    fn edge_state(g: &mut SystemGraph, p: NodeId, c: NodeId, up: f64, down: f64) {
        let profit = g.up_profit(c);
        g.set_up_outputs(c, up, profit);
        g.edge_mut(p, c).unwrap().down_assets = down;
    }

    #[test]
    fn pressure_examples() {
        let mut g = SystemGraph::new();
        let p = g.add_decision();
        let c = g.add_decision();
        let leaf = g.add_service([1], 1.0);
        g.add_edge(p, c).unwrap();
        g.add_edge(c, leaf).unwrap();
        g.node_mut(c).unwrap().nonsettled_assets = 5.0;
        edge_state(&mut g, p, c, 50.0, 40.0);
        approx(pressure(&g, c, p).unwrap().delta_p, 5.0);
        g.node_mut(c).unwrap().nonsettled_assets = 0.0;
        edge_state(&mut g, p, c, 40.0, 40.0);
        approx(pressure(&g, c, p).unwrap().delta_p, 0.0);
        edge_state(&mut g, p, c, 30.0, 50.0);
        approx(pressure(&g, c, p).unwrap().delta_p, -20.0);
        assert!(matches!(
            pressure(&g, leaf, p),
            Err(Error::MissingEdge { .. })
        ));
    }

    #[test]
    fn service_child_releases_alpha_fraction() {
        let mut g = SystemGraph::new();
        let p = g.add_decision();
        let c = g.add_service([1], 50.0);
        g.add_edge(p, c).unwrap();
        edge_state(&mut g, p, c, 50.0, 40.0);
        let params = ModelParams::default().with_alpha(0.2);
        let moved = relocate(&mut g, &params).unwrap();
        approx(moved, 2.0);
        approx(g.node(c).unwrap().resident_assets, 48.0);
        approx(g.node(p).unwrap().nonsettled_assets, 2.0);
    }

    #[test]
    fn greedy_redistribution_serves_largest_need_first() {
        let mut g = SystemGraph::new();
        let p = g.add_decision();
        let a = g.add_service([1], 0.0);
        let b = g.add_service([2], 0.0);
        g.add_edge(p, a).unwrap();
        g.add_edge(p, b).unwrap();
        g.node_mut(p).unwrap().nonsettled_assets = 10.0;
        edge_state(&mut g, p, a, 0.0, 5.0);
        edge_state(&mut g, p, b, 0.0, 8.0);
        let moved = relocate(&mut g, &ModelParams::default()).unwrap();
        approx(moved, 10.0);
        approx(g.node(b).unwrap().resident_assets, 8.0);
        approx(g.node(a).unwrap().resident_assets, 2.0);
        approx(g.node(p).unwrap().nonsettled_assets, 0.0);
    }

    #[test]
    fn equilibrium_moves_nothing() {
        let mut g = SystemGraph::new();
        let p = g.add_decision();
        let a = g.add_service([1], 30.0);
        let b = g.add_service([2], 70.0);
        g.add_edge(p, a).unwrap();
        g.add_edge(p, b).unwrap();
        g.bootstrap_flows();
        let before = g.clone();
        assert_eq!(relocate(&mut g, &ModelParams::default()).unwrap(), 0.0);
        assert_eq!(g, before);
    }

    #[test]
    fn decision_child_passes_surplus_pool_upward() {
        // D's leaves already hold their grants; its pool of 10 is surplus.
        // Against the in-transit-corrected pressure this would read zero and
        // the pool would never leave D.
        let mut g = SystemGraph::new();
        let root = g.add_decision();
        let d = g.add_decision();
        let c = g.add_service([3], 40.0);
        let a = g.add_service([1], 25.0);
        let b = g.add_service([2], 25.0);
        for (p, ch) in [(root, d), (root, c), (d, a), (d, b)] {
            g.add_edge(p, ch).unwrap();
        }
        g.bootstrap_flows();
        g.node_mut(d).unwrap().nonsettled_assets = 10.0;
        edge_state(&mut g, root, d, 60.0, 50.0);
        edge_state(&mut g, root, c, 40.0, 50.0);
        approx(pressure(&g, d, root).unwrap().delta_p, 0.0);

        let moved = relocate(&mut g, &ModelParams::default()).unwrap();
        approx(moved, 20.0);
        approx(g.node(d).unwrap().nonsettled_assets, 0.0);
        approx(g.node(c).unwrap().resident_assets, 50.0);
        approx(g.total_assets(), 100.0);
    }

    #[test]
    fn decision_child_keeps_pool_it_needs() {
        let mut g = SystemGraph::new();
        let root = g.add_decision();
        let d = g.add_decision();
        let a = g.add_service([1], 20.0);
        g.add_edge(root, d).unwrap();
        g.add_edge(d, a).unwrap();
        g.bootstrap_flows();
        g.node_mut(d).unwrap().nonsettled_assets = 5.0;
        edge_state(&mut g, root, d, 25.0, 25.0);
        edge_state(&mut g, d, a, 20.0, 25.0);
        // d first hands its pool to the needy leaf, then has nothing to pass up
        relocate(&mut g, &ModelParams::default()).unwrap();
        approx(g.node(a).unwrap().resident_assets, 25.0);
        approx(g.node(d).unwrap().nonsettled_assets, 0.0);
        approx(g.node(root).unwrap().nonsettled_assets, 0.0);
    }

    #[test]
    fn shared_leaf_release_is_bounded_by_resident_budget() {
        // Both parents see pressure 40 on a leaf holding 50; with alpha 1 the
        // first parent takes 40 and the second only the remaining 10.
        let mut g = SystemGraph::new();
        let p1 = g.add_decision();
        let p2 = g.add_decision();
        let leaf = g.add_service([1], 50.0);
        g.add_edge(p1, leaf).unwrap();
        g.add_edge(p2, leaf).unwrap();
        edge_state(&mut g, p1, leaf, 50.0, 10.0);
        edge_state(&mut g, p2, leaf, 50.0, 10.0);
        let moved = relocate(&mut g, &ModelParams::default()).unwrap();
        approx(moved, 50.0);
        approx(g.node(p1).unwrap().nonsettled_assets, 40.0);
        approx(g.node(p2).unwrap().nonsettled_assets, 10.0);
        approx(g.node(leaf).unwrap().resident_assets, 0.0);
    }
}
