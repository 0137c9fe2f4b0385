//! One-dimensional region environment with a step-indexed quality schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NodeState;

/// Region qualities in force from `start_step` until the next epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityEpoch {
    pub start_step: u64,
    pub qualities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    num_regions: usize,
    schedule: Vec<QualityEpoch>,
}

impl Environment {
    pub fn new(num_regions: usize, schedule: Vec<QualityEpoch>) -> Result<Self> {
        let invalid = |m: String| Err(Error::InvalidEnvironment(m));
        if num_regions == 0 {
            return invalid("at least one region is required".into());
        }
        match schedule.first() {
            None => return invalid("schedule is empty".into()),
            Some(e) if e.start_step != 0 => {
                return invalid("first schedule entry must start at step 0".into())
            }
            _ => {}
        }
        if schedule
            .windows(2)
            .any(|w| w[0].start_step >= w[1].start_step)
        {
            return invalid("schedule must be strictly increasing in start_step".into());
        }
        for e in &schedule {
            if e.qualities.len() != num_regions {
                return invalid(format!(
                    "entry at step {} has {} qualities, expected {num_regions}",
                    e.start_step,
                    e.qualities.len()
                ));
            }
            if e.qualities.iter().any(|q| !(q.is_finite() && *q >= 0.0)) {
                return invalid(format!(
                    "entry at step {} has a negative or non-finite quality",
                    e.start_step
                ));
            }
        }
        Ok(Self {
            num_regions,
            schedule,
        })
    }

    /// A single fixed quality vector.
    pub fn fixed(qualities: Vec<f64>) -> Result<Self> {
        Self::new(
            qualities.len(),
            vec![QualityEpoch {
                start_step: 0,
                qualities,
            }],
        )
    }

    /// High quality on the leftmost region, moving to the rightmost region at
    /// `period` and back at `2 * period`; every other region is `low`.
    pub fn left_right_left(num_regions: usize, period: u64, high: f64, low: f64) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidEnvironment("period must be positive".into()));
        }
        let with_high = |idx: usize| {
            let mut q = vec![low; num_regions];
            if let Some(slot) = q.get_mut(idx) {
                *slot = high;
            }
            q
        };
        let left = with_high(0);
        let right = with_high(num_regions.saturating_sub(1));
        Self::new(
            num_regions,
            vec![
                QualityEpoch {
                    start_step: 0,
                    qualities: left.clone(),
                },
                QualityEpoch {
                    start_step: period,
                    qualities: right,
                },
                QualityEpoch {
                    start_step: 2 * period,
                    qualities: left,
                },
            ],
        )
    }

    /// Eight regions, q = 0.3 / 0.1, switching every 400 steps.
    pub fn paper() -> Self {
        Self::left_right_left(8, 400, 0.3, 0.1).expect("valid constants")
    }

    pub fn num_regions(&self) -> usize {
        self.num_regions
    }

    pub fn schedule(&self) -> &[QualityEpoch] {
        &self.schedule
    }

    /// All region qualities in force at step `t`.
    pub fn qualities_at(&self, t: u64) -> &[f64] {
        let idx = self.schedule.partition_point(|e| e.start_step <= t);
        &self.schedule[idx - 1].qualities
    }

    /// Quality of the 1-based region `m` at step `t`.
    pub fn quality_at(&self, t: u64, m: usize) -> Result<f64> {
        if m == 0 || m > self.num_regions {
            return Err(Error::RegionOutOfRange {
                region: m,
                num_regions: self.num_regions,
            });
        }
        Ok(self.qualities_at(t)[m - 1])
    }

    /// Mean quality over a set of 1-based regions.
    pub fn mean_quality<'a>(
        &self,
        t: u64,
        regions: impl IntoIterator<Item = &'a usize>,
    ) -> Result<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for &m in regions {
            sum += self.quality_at(t, m)?;
            n += 1;
        }
        Ok(if n == 0 { 0.0 } else { sum / n as f64 })
    }

    /// Profit produced in one step by a service node: resident assets times
    /// the mean quality of the regions it supports.
    pub fn service_profit(&self, node: &NodeState, t: u64) -> Result<f64> {
        if !node.is_service() || node.regions.is_empty() {
            return Err(Error::InvalidEnvironment(
                "profit is only defined for service nodes with regions".into(),
            ));
        }
        Ok(node.resident_assets * self.mean_quality(t, &node.regions)?)
    }
}
