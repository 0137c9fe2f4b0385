//! Builders for the six reference control topologies.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{NodeId, SystemGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    /// Single root with two leaves that split and merge over time.
    #[serde(rename = "growable")]
    GrowableTree,
    /// Balanced binary tree with four leaves.
    FixedTree,
    /// Four leaves; each neighbouring pair shares a root.
    Line,
    /// Line plus a root shared by the last and first leaves.
    Circle,
    /// Four leaves; every pair shares a root.
    Complete,
    /// Four leaves under one root.
    AllToRoot,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 6] = [
        TopologyKind::GrowableTree,
        TopologyKind::FixedTree,
        TopologyKind::Line,
        TopologyKind::Circle,
        TopologyKind::Complete,
        TopologyKind::AllToRoot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::GrowableTree => "growable",
            TopologyKind::FixedTree => "fixed_tree",
            TopologyKind::Line => "line",
            TopologyKind::Circle => "circle",
            TopologyKind::Complete => "complete",
            TopologyKind::AllToRoot => "all_to_root",
        }
    }

    pub fn is_growable(self) -> bool {
        self == TopologyKind::GrowableTree
    }

    /// Number of service leaves the topology starts with.
    pub fn leaf_count(self) -> usize {
        match self {
            TopologyKind::GrowableTree => 2,
            _ => 4,
        }
    }

    /// Builds the topology over `num_regions` regions with `total_assets`
    /// spread evenly over the leaves and flows at equilibrium.
    pub fn build(self, num_regions: usize, total_assets: f64) -> Result<SystemGraph> {
        let leaves = self.leaf_count();
        if num_regions == 0 || !num_regions.is_multiple_of(leaves) {
            return Err(Error::InvalidTopology {
                topology: self.name().into(),
                message: format!("{num_regions} regions cannot be split over {leaves} leaves"),
            });
        }
        if !(total_assets.is_finite() && total_assets >= 0.0) {
            return Err(Error::InvalidTopology {
                topology: self.name().into(),
                message: "total assets must be finite and non-negative".into(),
            });
        }
        let width = num_regions / leaves;
        let share = total_assets / leaves as f64;

        let mut g = SystemGraph::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut tree_root: Option<NodeId> = None;
        // Roots first so that they come first in id order.
        match self {
            TopologyKind::GrowableTree | TopologyKind::AllToRoot | TopologyKind::FixedTree => {
                tree_root = Some(g.add_decision());
            }
            TopologyKind::Line => pairs = vec![(0, 1), (1, 2), (2, 3)],
            TopologyKind::Circle => pairs = vec![(0, 1), (1, 2), (2, 3), (3, 0)],
            TopologyKind::Complete => {
                pairs = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            }
        }
        let pair_roots: Vec<NodeId> = pairs.iter().map(|_| g.add_decision()).collect();
        let mids: Vec<NodeId> = if self == TopologyKind::FixedTree {
            (0..2).map(|_| g.add_decision()).collect()
        } else {
            Vec::new()
        };
        let leaf_ids: Vec<NodeId> = (0..leaves)
            .map(|i| g.add_service(i * width + 1..=(i + 1) * width, share))
            .collect();

        match self {
            TopologyKind::GrowableTree | TopologyKind::AllToRoot => {
                let root = tree_root.expect("tree root");
                for &l in &leaf_ids {
                    g.add_edge(root, l)?;
                }
            }
            TopologyKind::FixedTree => {
                let root = tree_root.expect("tree root");
                for (i, &m) in mids.iter().enumerate() {
                    g.add_edge(root, m)?;
                    g.add_edge(m, leaf_ids[2 * i])?;
                    g.add_edge(m, leaf_ids[2 * i + 1])?;
                }
            }
            TopologyKind::Line | TopologyKind::Circle | TopologyKind::Complete => {
                for (&r, &(a, b)) in pair_roots.iter().zip(&pairs) {
                    g.add_edge(r, leaf_ids[a])?;
                    g.add_edge(r, leaf_ids[b])?;
                }
            }
        }
        g.bootstrap_flows();
        debug_assert!(g.validate().is_ok());
        Ok(g)
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TopologyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config {
                field: "topology".into(),
                message: format!(
                    "unknown topology `{s}` (expected one of growable, fixed_tree, line, circle, complete, all_to_root)"
                ),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf_regions(g: &SystemGraph) -> Vec<Vec<usize>> {
        g.leaves()
            .map(|(_, s)| s.regions.iter().copied().collect())
            .collect()
    }

    #[test]
    fn all_to_root_layout() {
        let g = TopologyKind::AllToRoot.build(8, 100.0).unwrap();
        assert_eq!(g.roots().len(), 1);
        assert_eq!(g.len(), 5);
        assert!(g.leaves().all(|(_, s)| s.resident_assets == 25.0));
        assert_eq!(
            leaf_regions(&g),
            vec![vec![1, 2], vec![3, 4], vec![5, 6], vec![7, 8]]
        );
    }

    #[test]
    fn complete_has_six_roots_and_three_parents_per_leaf() {
        let g = TopologyKind::Complete.build(8, 100.0).unwrap();
        assert_eq!(g.roots().len(), 6);
        assert!(g.leaves().all(|(id, _)| g.parents(id).len() == 3));
    }

    #[test]
    fn growable_starts_with_two_halves() {
        let g = TopologyKind::GrowableTree.build(8, 100.0).unwrap();
        assert_eq!(g.roots().len(), 1);
        assert_eq!(leaf_regions(&g), vec![vec![1, 2, 3, 4], vec![5, 6, 7, 8]]);
        assert!(g.leaves().all(|(_, s)| s.resident_assets == 50.0));
    }

    #[test]
    fn parent_counts() {
        let counts = |k: TopologyKind| -> Vec<usize> {
            let g = k.build(8, 100.0).unwrap();
            g.leaves().map(|(id, _)| g.parents(id).len()).collect()
        };
        assert_eq!(counts(TopologyKind::Line), vec![1, 2, 2, 1]);
        assert_eq!(counts(TopologyKind::Circle), vec![2, 2, 2, 2]);
        assert_eq!(counts(TopologyKind::FixedTree), vec![1, 1, 1, 1]);
        assert_eq!(counts(TopologyKind::AllToRoot), vec![1, 1, 1, 1]);
    }

    #[test]
    fn fixed_tree_is_balanced() {
        let g = TopologyKind::FixedTree.build(8, 100.0).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g.max_depth().unwrap(), 2);
        assert_eq!(g.up_assets(g.roots()[0]), 100.0);
    }

    #[test]
    fn every_topology_is_valid_and_covers_regions_once() {
        for kind in TopologyKind::ALL {
            let g = kind.build(8, 100.0).unwrap();
            g.validate().unwrap();
            let mut all: Vec<usize> = leaf_regions(&g).concat();
            all.sort();
            assert_eq!(all, (1..=8).collect::<Vec<_>>(), "{kind}");
            assert!((g.total_assets() - 100.0).abs() < 1e-12);
        }
    }

    #[test]
    fn indivisible_region_count_is_rejected() {
        assert!(TopologyKind::Line.build(6, 100.0).is_err());
        assert!(TopologyKind::GrowableTree.build(6, 100.0).is_ok());
        assert!(TopologyKind::Line.build(0, 100.0).is_err());
        assert!(TopologyKind::Line.build(8, -1.0).is_err());
    }

    #[test]
    fn names_round_trip() {
        for kind in TopologyKind::ALL {
            assert_eq!(kind.name().parse::<TopologyKind>().unwrap(), kind);
        }
        assert!("star".parse::<TopologyKind>().is_err());
    }
}
