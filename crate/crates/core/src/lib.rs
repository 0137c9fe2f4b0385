//! Discrete-time simulation of asset distribution over a directed acyclic
//! graph of decision and service nodes.
//!
//! Service leaves hold assets and earn profit in the regions they support.
//! Decision nodes aggregate their children's asset and profit estimates,
//! split the assets they are eligible for in proportion to `profit^beta`, and
//! move assets between children through their own non-settled pool. On the
//! growable topology, rich leaves split into two and poor subtrees collapse
//! back into a single leaf.
//!
//! Each step runs four passes in a fixed order:
//!
//! 1. [`flows::update_bottom_up_flows`]
//! 2. [`flows::update_top_down_flows`]
//! 3. [`relocation::relocate`]
//! 4. [`morphology::morphology_pass`]
//!
//! ```
//! use msad::{Environment, ModelParams, TopologyKind};
//!
//! let params = ModelParams::default().with_beta(0.7);
//! let result = msad::run(TopologyKind::FixedTree, &params, &Environment::paper(), 100)?;
//! assert_eq!(result.rows.len(), 100);
//! # Ok::<(), msad::Error>(())
//! ```
//!
//! The `examples/` directory has one runnable program per capability:
//! `single_run`, `table_sweep`, `adaptation`, `growth`, `custom_graph`,
//! `soft_delays` and `config_file`.

pub mod config;
pub mod engine;
pub mod environment;
pub mod error;
pub mod experiment;
pub mod flows;
pub mod model;
pub mod morphology;
pub mod relocation;
pub mod topology;

pub use config::{
    parse_config, parse_config_with_preset, EnvironmentSpec, ExperimentConfig, Preset,
};
pub use engine::{run, MetricsRow, RunResult, Simulation};
pub use environment::{Environment, QualityEpoch};
pub use error::{Error, Result};
pub use experiment::{run_experiment, run_sweep, simulate, SweepTable};
pub use model::{EdgeFlows, ModelParams, NodeId, NodeKind, NodeState, SystemGraph};
pub use topology::TopologyKind;
