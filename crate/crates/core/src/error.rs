use std::path::PathBuf;

use crate::model::{NodeId, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {}", format_violations(.0))]
    InvalidGraph(Vec<Violation>),

    #[error("graph contains a cycle through node {0}")]
    Cycle(NodeId),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("no edge from {parent} to {child}")]
    MissingEdge { parent: NodeId, child: NodeId },

    #[error("node {0} is not a service node")]
    NotAService(NodeId),

    #[error("region {region} is outside 1..={num_regions}")]
    RegionOutOfRange { region: usize, num_regions: usize },

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("invalid parameter `{field}`: {message}")]
    InvalidParam {
        field: &'static str,
        message: String,
    },

    #[error("cannot build {topology} topology: {message}")]
    InvalidTopology { topology: String, message: String },

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("empty step range [{from}, {to})")]
    EmptyRange { from: u64, to: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("sweep cell ({topology}, beta = {beta}): {source}")]
    SweepCell {
        topology: String,
        beta: f64,
        #[source]
        source: Box<Error>,
    },
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
