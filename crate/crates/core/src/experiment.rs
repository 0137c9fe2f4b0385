//! Config-driven runs, CSV output and beta-by-topology sweeps.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::engine::{MetricsRow, RunResult, Simulation};
use crate::error::{Error, Result};
use crate::topology::TopologyKind;

/// Steps averaged for one sweep cell: two full switching periods.
pub const DEFAULT_SWEEP_WINDOW: u64 = 800;

/// Runs the configured experiment without writing anything.
pub fn simulate(config: &ExperimentConfig) -> Result<RunResult> {
    config.validate()?;
    Simulation::from_topology(
        config.topology,
        config.total_assets,
        config.params,
        config.environment()?,
    )?
    .run(config.total_steps)
}

/// Runs the configured experiment and writes its metrics to
/// `config.output_path`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunResult> {
    let result = simulate(config)?;
    let file = create(&config.output_path)?;
    write_metrics_csv(file, &result.rows, config.num_regions)?;
    Ok(result)
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

/// One header line, then one line per step. Floats use the shortest decimal
/// form that parses back to the same value.
pub fn write_metrics_csv<W: Write>(out: W, rows: &[MetricsRow], num_regions: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["step".to_string(), "profit".into(), "relocated_pct".into()];
    header.extend((1..=num_regions).map(|m| format!("assets_region_{m}")));
    header.extend(["node_count".into(), "leaf_count".into()]);
    w.write_record(&header)?;
    for row in rows {
        let mut record = vec![
            row.step.to_string(),
            row.profit.to_string(),
            row.relocated_pct.to_string(),
        ];
        record.extend(row.region_assets.iter().map(f64::to_string));
        record.extend([row.node_count.to_string(), row.leaf_count.to_string()]);
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Mean profit for every (beta, topology) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub betas: Vec<f64>,
    pub topologies: Vec<TopologyKind>,
    /// `cells[i][j]` belongs to `betas[i]` and `topologies[j]`.
    pub cells: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn get(&self, beta: f64, topology: TopologyKind) -> Option<f64> {
        let i = self.betas.iter().position(|&b| b == beta)?;
        let j = self.topologies.iter().position(|&t| t == topology)?;
        Some(self.cells[i][j])
    }

    /// Header `beta,<topology>...`, then one row per beta.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["beta".to_string()];
        header.extend(self.topologies.iter().map(|t| t.name().to_string()));
        w.write_record(&header)?;
        for (beta, row) in self.betas.iter().zip(&self.cells) {
            let mut record = vec![beta.to_string()];
            record.extend(row.iter().map(f64::to_string));
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        self.write_csv(create(path)?)
    }
}

/// Runs every (beta, topology) cell over the first `window` steps of `base`
/// and averages the profit. Cells run in parallel; the table order follows
/// the inputs.
pub fn run_sweep(
    topologies: &[TopologyKind],
    betas: &[f64],
    base: &ExperimentConfig,
    window: u64,
) -> Result<SweepTable> {
    if window == 0 {
        return Err(Error::EmptyRange { from: 0, to: 0 });
    }
    let cells: Vec<(f64, TopologyKind)> = betas
        .iter()
        .flat_map(|&b| topologies.iter().map(move |&t| (b, t)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(beta, topology)| {
            let mut config = base.clone().with_topology(topology).with_beta(beta);
            config.total_steps = window;
            simulate(&config)
                .and_then(|r| r.mean_profit(0, window))
                .map_err(|e| Error::SweepCell {
                    topology: topology.name().into(),
                    beta,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<f64>>>()?;
    let width = topologies.len().max(1);
    Ok(SweepTable {
        betas: betas.to_vec(),
        topologies: topologies.to_vec(),
        cells: values.chunks(width).map(<[f64]>::to_vec).collect(),
    })
}
