//! Graph data model: nodes, flow-carrying edges, parameters and structural
//! queries shared by every pass of the simulator.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a node. The numeric order is the canonical iteration order
/// used for every tie-break in the simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Decision,
    Service,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub kind: NodeKind,
    pub resident_assets: f64,
    pub nonsettled_assets: f64,
    /// 1-based region indices; non-empty exactly for service nodes.
    pub regions: BTreeSet<usize>,
}

impl NodeState {
    pub fn decision() -> Self {
        Self {
            kind: NodeKind::Decision,
            resident_assets: 0.0,
            nonsettled_assets: 0.0,
            regions: BTreeSet::new(),
        }
    }

    pub fn service(regions: impl IntoIterator<Item = usize>, resident_assets: f64) -> Self {
        Self {
            kind: NodeKind::Service,
            resident_assets,
            nonsettled_assets: 0.0,
            regions: regions.into_iter().collect(),
        }
    }

    /// Assets located at the node, resident or not.
    pub fn assets(&self) -> f64 {
        self.resident_assets + self.nonsettled_assets
    }

    pub fn is_service(&self) -> bool {
        self.kind == NodeKind::Service
    }

    pub fn is_decision(&self) -> bool {
        self.kind == NodeKind::Decision
    }
}

/// Flow values carried by one parent/child edge.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EdgeFlows {
    /// Child's estimate of the assets in its sub-graph (bottom-up).
    pub up_assets: f64,
    /// Child's estimate of the profitability of its sub-graph (bottom-up).
    pub up_profit: f64,
    /// Assets the parent deems the child eligible to hold (top-down).
    pub down_assets: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Slot {
    state: NodeState,
    parents: Vec<NodeId>,
    children: Vec<NodeId>,
    up_assets: f64,
    up_profit: f64,
}

/// One broken structural invariant, as reported by [`SystemGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Cycle(NodeId),
    ChildlessDecision(NodeId),
    ServiceWithChildren(NodeId),
    RegionlessService(NodeId),
    DecisionWithRegions(NodeId),
    NegativeAssets(NodeId),
    NonFiniteFlow { parent: NodeId, child: NodeId },
    StaleRoots,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle(n) => write!(f, "cycle through {n}"),
            Violation::ChildlessDecision(n) => write!(f, "childless decision node {n}"),
            Violation::ServiceWithChildren(n) => write!(f, "service node {n} has children"),
            Violation::RegionlessService(n) => write!(f, "region-less service node {n}"),
            Violation::DecisionWithRegions(n) => write!(f, "decision node {n} supports regions"),
            Violation::NegativeAssets(n) => write!(f, "negative assets at {n}"),
            Violation::NonFiniteFlow { parent, child } => {
                write!(f, "invalid flow value on edge {parent}->{child}")
            }
            Violation::StaleRoots => write!(f, "roots list does not match parentless nodes"),
        }
    }
}

/// Directed acyclic control graph. Edges point from parent to child.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SystemGraph {
    slots: BTreeMap<NodeId, Slot>,
    edges: BTreeMap<(NodeId, NodeId), EdgeFlows>,
    roots: Vec<NodeId>,
    next_id: u32,
}

impl SystemGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, state: NodeState) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        self.slots.insert(
            id,
            Slot {
                state,
                parents: Vec::new(),
                children: Vec::new(),
                up_assets: 0.0,
                up_profit: 0.0,
            },
        );
        self.roots.push(id);
        id
    }

    pub fn add_decision(&mut self) -> NodeId {
        self.add_node(NodeState::decision())
    }

    pub fn add_service(&mut self, regions: impl IntoIterator<Item = usize>, assets: f64) -> NodeId {
        self.add_node(NodeState::service(regions, assets))
    }

    /// Adds a parent -> child edge with zeroed flows. Adding an existing edge
    /// is a no-op.
    pub fn add_edge(&mut self, parent: NodeId, child: NodeId) -> Result<()> {
        for id in [parent, child] {
            if !self.slots.contains_key(&id) {
                return Err(Error::UnknownNode(id));
            }
        }
        if self.edges.contains_key(&(parent, child)) {
            return Ok(());
        }
        self.edges.insert((parent, child), EdgeFlows::default());
        insert_sorted(&mut self.slot_mut(parent).children, child);
        insert_sorted(&mut self.slot_mut(child).parents, parent);
        self.roots.retain(|&r| r != child);
        Ok(())
    }

    /// Removes a node and every edge touching it.
    pub(crate) fn remove_node(&mut self, id: NodeId) {
        let Some(slot) = self.slots.remove(&id) else {
            return;
        };
        for p in slot.parents {
            self.edges.remove(&(p, id));
            if let Some(ps) = self.slots.get_mut(&p) {
                ps.children.retain(|&c| c != id);
            }
        }
        for c in slot.children {
            self.edges.remove(&(id, c));
            if let Some(cs) = self.slots.get_mut(&c) {
                cs.parents.retain(|&p| p != id);
                if cs.parents.is_empty() {
                    insert_sorted(&mut self.roots, c);
                }
            }
        }
        self.roots.retain(|&r| r != id);
    }

    fn slot(&self, id: NodeId) -> &Slot {
        &self.slots[&id]
    }

    fn slot_mut(&mut self, id: NodeId) -> &mut Slot {
        self.slots.get_mut(&id).expect("node exists")
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.slots.contains_key(&id)
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeState> {
        self.slots.get(&id).map(|s| &s.state)
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut NodeState> {
        self.slots.get_mut(&id).map(|s| &mut s.state)
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &NodeState)> + '_ {
        self.slots.iter().map(|(&id, s)| (id, &s.state))
    }

    pub fn node_ids(&self) -> Vec<NodeId> {
        self.slots.keys().copied().collect()
    }

    /// Service nodes in id order.
    pub fn leaves(&self) -> impl Iterator<Item = (NodeId, &NodeState)> + '_ {
        self.nodes().filter(|(_, s)| s.is_service())
    }

    pub fn edge(&self, parent: NodeId, child: NodeId) -> Option<&EdgeFlows> {
        self.edges.get(&(parent, child))
    }

    pub fn edge_mut(&mut self, parent: NodeId, child: NodeId) -> Option<&mut EdgeFlows> {
        self.edges.get_mut(&(parent, child))
    }

    /// Edges as `((parent, child), flows)` in (parent, child) order.
    pub fn edges(&self) -> impl Iterator<Item = ((NodeId, NodeId), &EdgeFlows)> + '_ {
        self.edges.iter().map(|(&k, v)| (k, v))
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        self.slots.get(&id).map_or(&[], |s| &s.children)
    }

    pub fn parents(&self, id: NodeId) -> &[NodeId] {
        self.slots.get(&id).map_or(&[], |s| &s.parents)
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn is_root(&self, id: NodeId) -> bool {
        self.parents(id).is_empty()
    }

    /// The node's bottom-up asset estimate, as sent to all of its parents.
    pub fn up_assets(&self, id: NodeId) -> f64 {
        self.slot(id).up_assets
    }

    /// The node's bottom-up profitability estimate, as sent to all of its parents.
    pub fn up_profit(&self, id: NodeId) -> f64 {
        self.slot(id).up_profit
    }

    /// Sets a node's bottom-up outputs and replicates them onto every edge
    /// towards its parents.
    pub fn set_up_outputs(&mut self, id: NodeId, up_assets: f64, up_profit: f64) {
        let slot = self.slot_mut(id);
        slot.up_assets = up_assets;
        slot.up_profit = up_profit;
        let parents = slot.parents.clone();
        for p in parents {
            let e = self.edges.get_mut(&(p, id)).expect("parent edge exists");
            e.up_assets = up_assets;
            e.up_profit = up_profit;
        }
    }

    /// Sum of resident and non-settled assets over all nodes.
    pub fn total_assets(&self) -> f64 {
        self.slots.values().map(|s| s.state.assets()).sum()
    }

    /// Resident assets held by service nodes.
    pub fn service_resident_assets(&self) -> f64 {
        self.leaves().map(|(_, s)| s.resident_assets).sum()
    }

    /// Assets of the node plus those of every sub-graph below it. A child
    /// shared by several parents is counted once per parent path.
    pub fn subtree_assets(&self, id: NodeId) -> f64 {
        let slot = self.slot(id);
        slot.state.assets()
            + slot
                .children
                .iter()
                .map(|&c| self.subtree_assets(c))
                .sum::<f64>()
    }

    /// Initializes flows to asset equilibrium: upward asset estimates and
    /// downward grants equal each node's sub-graph total, profit estimates
    /// start at zero.
    pub fn bootstrap_flows(&mut self) {
        let ids = self.node_ids();
        for id in ids {
            let total = self.subtree_assets(id);
            self.set_up_outputs(id, total, 0.0);
            let parents = self.parents(id).to_vec();
            for p in parents {
                self.edges.get_mut(&(p, id)).expect("edge").down_assets = total;
            }
        }
    }

    /// Longest-path depth of every node from any root. Roots have depth 0.
    pub fn compute_depths(&self) -> Result<BTreeMap<NodeId, usize>> {
        let mut indegree: BTreeMap<NodeId, usize> = self
            .slots
            .iter()
            .map(|(&id, s)| (id, s.parents.len()))
            .collect();
        let mut queue: VecDeque<NodeId> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&id, _)| id)
            .collect();
        let mut depths: BTreeMap<NodeId, usize> = queue.iter().map(|&id| (id, 0)).collect();
        let mut visited = 0;
        while let Some(id) = queue.pop_front() {
            visited += 1;
            let d = depths[&id];
            for &c in &self.slot(id).children {
                let entry = depths.entry(c).or_insert(0);
                *entry = (*entry).max(d + 1);
                let deg = indegree.get_mut(&c).expect("child exists");
                *deg -= 1;
                if *deg == 0 {
                    queue.push_back(c);
                }
            }
        }
        if visited < self.slots.len() {
            let stuck = indegree
                .iter()
                .find(|(_, &d)| d > 0)
                .map(|(&id, _)| id)
                .expect("unvisited node has positive indegree");
            return Err(Error::Cycle(stuck));
        }
        Ok(depths)
    }

    /// Nodes sorted from the roots downwards; equal depths in id order.
    pub fn top_down_order(&self) -> Result<Vec<NodeId>> {
        let depths = self.compute_depths()?;
        let mut order: Vec<NodeId> = depths.keys().copied().collect();
        order.sort_by_key(|id| (depths[id], *id));
        Ok(order)
    }

    /// Nodes sorted from the deepest level upwards; equal depths in id order.
    pub fn bottom_up_order(&self) -> Result<Vec<NodeId>> {
        let depths = self.compute_depths()?;
        let mut order: Vec<NodeId> = depths.keys().copied().collect();
        order.sort_by_key(|id| (std::cmp::Reverse(depths[id]), *id));
        Ok(order)
    }

    pub fn max_depth(&self) -> Result<usize> {
        Ok(self.compute_depths()?.values().copied().max().unwrap_or(0))
    }

    /// Checks every structural invariant and returns all violations found.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if let Err(Error::Cycle(n)) = self.compute_depths() {
            violations.push(Violation::Cycle(n));
        }
        for (&id, slot) in &self.slots {
            let s = &slot.state;
            match s.kind {
                NodeKind::Decision => {
                    if slot.children.is_empty() {
                        violations.push(Violation::ChildlessDecision(id));
                    }
                    if !s.regions.is_empty() {
                        violations.push(Violation::DecisionWithRegions(id));
                    }
                }
                NodeKind::Service => {
                    if !slot.children.is_empty() {
                        violations.push(Violation::ServiceWithChildren(id));
                    }
                    if s.regions.is_empty() {
                        violations.push(Violation::RegionlessService(id));
                    }
                }
            }
            let finite_non_negative = |x: f64| x.is_finite() && x >= 0.0;
            if !finite_non_negative(s.resident_assets) || !finite_non_negative(s.nonsettled_assets)
            {
                violations.push(Violation::NegativeAssets(id));
            }
        }
        for (&(parent, child), e) in &self.edges {
            if ![e.up_assets, e.up_profit, e.down_assets]
                .iter()
                .all(|x| x.is_finite() && *x >= 0.0)
            {
                violations.push(Violation::NonFiniteFlow { parent, child });
            }
        }
        let parentless: Vec<NodeId> = self
            .slots
            .iter()
            .filter(|(_, s)| s.parents.is_empty())
            .map(|(&id, _)| id)
            .collect();
        let mut roots = self.roots.clone();
        roots.sort();
        if roots != parentless {
            violations.push(Violation::StaleRoots);
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(violations))
        }
    }
}

fn insert_sorted(v: &mut Vec<NodeId>, id: NodeId) {
    if let Err(pos) = v.binary_search(&id) {
        v.insert(pos, id);
    }
}

/// Model coefficients. Defaults are the no-delay, zero-cost, no-competition
/// setup with grow/trim thresholds of 25 and 20 asset units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Competition exponent applied to child profitability when splitting.
    pub beta: f64,
    /// Fraction of positive pressure a service node releases per step.
    pub alpha: f64,
    pub gamma_up_assets: f64,
    pub gamma_up_profit: f64,
    pub gamma_down: f64,
    /// Management cost withheld from each decision node's eligible flow.
    pub cost: f64,
    pub grow_threshold: f64,
    pub trim_threshold: f64,
    pub growable: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            beta: 0.0,
            alpha: 1.0,
            gamma_up_assets: 1.0,
            gamma_up_profit: 1.0,
            gamma_down: 1.0,
            cost: 0.0,
            grow_threshold: 25.0,
            trim_threshold: 20.0,
            growable: false,
        }
    }
}

impl ModelParams {
    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_gammas(mut self, gamma: f64) -> Self {
        self.gamma_up_assets = gamma;
        self.gamma_up_profit = gamma;
        self.gamma_down = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(field: &'static str, message: impl Into<String>) -> Result<()> {
            Err(Error::InvalidParam {
                field,
                message: message.into(),
            })
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return bad("beta", "beta must be ≥ 0");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha", "alpha must be in (0, 1]");
        }
        for (field, g) in [
            ("gamma_up_assets", self.gamma_up_assets),
            ("gamma_up_profit", self.gamma_up_profit),
            ("gamma_down", self.gamma_down),
        ] {
            if !(0.0..=1.0).contains(&g) {
                return bad(field, format!("{field} must be in [0, 1]"));
            }
        }
        if !(self.cost.is_finite() && self.cost >= 0.0) {
            return bad("cost", "cost must be ≥ 0");
        }
        if !(self.grow_threshold.is_finite() && self.grow_threshold > 0.0) {
            return bad("grow_threshold", "grow_threshold must be > 0");
        }
        if !(self.trim_threshold.is_finite() && self.trim_threshold > 0.0) {
            return bad("trim_threshold", "trim_threshold must be > 0");
        }
        if self.trim_threshold >= self.grow_threshold {
            return bad("trim_threshold", "trim_threshold must be < grow_threshold");
        }
        Ok(())
    }
}
