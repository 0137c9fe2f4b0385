//! Experiment configuration documents.
//!
//! A config is a flat TOML document. Model coefficients sit at the top
//! level; the environment is either a switching shorthand or an explicit
//! schedule:
//!
//! ```toml
//! topology = "fixed_tree"
//! beta = 0.7
//!
//! [environment]
//! period = 400
//! high_q = 0.3
//! low_q = 0.1
//! pattern = "left-right-left"
//! ```
//!
//! Every omitted field takes the reference value (all gammas and alpha 1,
//! zero cost, thresholds 25/20, 8 regions, 100 assets, 1200 steps, switch
//! period 400). `preset = "paper"` additionally defaults the topology to
//! `growable` and beta to 0.7.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::environment::{Environment, QualityEpoch};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::topology::TopologyKind;

pub const DEFAULT_NUM_REGIONS: usize = 8;
pub const DEFAULT_TOTAL_ASSETS: f64 = crate::engine::DEFAULT_TOTAL_ASSETS;
pub const DEFAULT_PERIOD: u64 = 400;
pub const DEFAULT_TOTAL_STEPS: u64 = 1200;
pub const DEFAULT_HIGH_QUALITY: f64 = 0.3;
pub const DEFAULT_LOW_QUALITY: f64 = 0.1;
pub const DEFAULT_OUTPUT_PATH: &str = "msad_run.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "paper")]
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwitchPattern {
    /// Best region on the left, then the right after one period, then back.
    #[serde(rename = "left-right-left")]
    LeftRightLeft,
    /// Best region on the left for the whole run.
    #[serde(rename = "static-left")]
    StaticLeft,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnvironmentSpec {
    Switching {
        period: u64,
        high_q: f64,
        low_q: f64,
        pattern: SwitchPattern,
    },
    Schedule(Vec<QualityEpoch>),
}

impl Default for EnvironmentSpec {
    fn default() -> Self {
        EnvironmentSpec::Switching {
            period: DEFAULT_PERIOD,
            high_q: DEFAULT_HIGH_QUALITY,
            low_q: DEFAULT_LOW_QUALITY,
            pattern: SwitchPattern::LeftRightLeft,
        }
    }
}

impl EnvironmentSpec {
    pub fn build(&self, num_regions: usize) -> Result<Environment> {
        match self {
            EnvironmentSpec::Switching {
                period,
                high_q,
                low_q,
                pattern: SwitchPattern::LeftRightLeft,
            } => Environment::left_right_left(num_regions, *period, *high_q, *low_q),
            EnvironmentSpec::Switching {
                high_q,
                low_q,
                pattern: SwitchPattern::StaticLeft,
                ..
            } => {
                let mut q = vec![*low_q; num_regions];
                if let Some(first) = q.first_mut() {
                    *first = *high_q;
                }
                Environment::fixed(q)
            }
            EnvironmentSpec::Schedule(schedule) => Environment::new(num_regions, schedule.clone()),
        }
    }
}

/// A fully materialized, validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub topology: TopologyKind,
    pub num_regions: usize,
    pub total_assets: f64,
    /// `params.growable` always mirrors `topology.is_growable()`.
    pub params: ModelParams,
    pub environment: EnvironmentSpec,
    pub total_steps: u64,
    pub output_path: PathBuf,
}

impl ExperimentConfig {
    /// The reference setup for one topology and competition factor.
    pub fn paper(topology: TopologyKind, beta: f64) -> Self {
        Self {
            topology,
            num_regions: DEFAULT_NUM_REGIONS,
            total_assets: DEFAULT_TOTAL_ASSETS,
            params: ModelParams {
                growable: topology.is_growable(),
                ..ModelParams::default().with_beta(beta)
            },
            environment: EnvironmentSpec::default(),
            total_steps: DEFAULT_TOTAL_STEPS,
            output_path: PathBuf::from(DEFAULT_OUTPUT_PATH),
        }
    }

    pub fn with_topology(mut self, topology: TopologyKind) -> Self {
        self.topology = topology;
        self.params.growable = topology.is_growable();
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.params.beta = beta;
        self
    }

    pub fn environment(&self) -> Result<Environment> {
        self.environment.build(self.num_regions)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(|e| match e {
            Error::InvalidParam { field, message } => Error::Config {
                field: field.into(),
                message,
            },
            other => other,
        })?;
        let field_err = |field: &str, message: String| Error::Config {
            field: field.into(),
            message,
        };
        if self.params.growable != self.topology.is_growable() {
            return Err(field_err(
                "topology",
                "growth can only be enabled on the growable topology".into(),
            ));
        }
        if self.num_regions == 0 || !self.num_regions.is_multiple_of(self.topology.leaf_count()) {
            return Err(field_err(
                "num_regions",
                format!(
                    "{} regions cannot be split over the {} leaves of `{}`",
                    self.num_regions,
                    self.topology.leaf_count(),
                    self.topology
                ),
            ));
        }
        if !(self.total_assets.is_finite() && self.total_assets >= 0.0) {
            return Err(field_err("total_assets", "total_assets must be ≥ 0".into()));
        }
        if self.total_steps == 0 {
            return Err(field_err("total_steps", "total_steps must be ≥ 1".into()));
        }
        if let EnvironmentSpec::Switching {
            period,
            high_q,
            low_q,
            ..
        } = self.environment
        {
            if period == 0 {
                return Err(field_err("environment.period", "period must be ≥ 1".into()));
            }
            for (name, q) in [("environment.high_q", high_q), ("environment.low_q", low_q)] {
                if !(q.is_finite() && q >= 0.0) {
                    return Err(field_err(name, "quality must be ≥ 0".into()));
                }
            }
        }
        self.environment()
            .map_err(|e| field_err("environment", e.to_string()))?;
        Ok(())
    }

    /// Canonical TOML form: every field explicit. Parsing it yields an equal
    /// config.
    pub fn to_toml(&self) -> String {
        let p = &self.params;
        let environment = match &self.environment {
            EnvironmentSpec::Switching {
                period,
                high_q,
                low_q,
                pattern,
            } => EnvironmentFile {
                period: Some(*period),
                high_q: Some(*high_q),
                low_q: Some(*low_q),
                pattern: Some(*pattern),
                schedule: None,
            },
            EnvironmentSpec::Schedule(s) => EnvironmentFile {
                schedule: Some(s.clone()),
                ..Default::default()
            },
        };
        let file = ConfigFile {
            preset: None,
            topology: Some(self.topology),
            num_regions: Some(self.num_regions),
            total_assets: Some(self.total_assets),
            total_steps: Some(self.total_steps),
            output_path: Some(self.output_path.clone()),
            beta: Some(p.beta),
            alpha: Some(p.alpha),
            gamma_up_assets: Some(p.gamma_up_assets),
            gamma_up_profit: Some(p.gamma_up_profit),
            gamma_down: Some(p.gamma_down),
            cost: Some(p.cost),
            grow_threshold: Some(p.grow_threshold),
            trim_threshold: Some(p.trim_threshold),
            environment: Some(environment),
        };
        toml::to_string(&file).expect("config is serializable")
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<Preset>,
    topology: Option<TopologyKind>,
    num_regions: Option<usize>,
    total_assets: Option<f64>,
    total_steps: Option<u64>,
    output_path: Option<PathBuf>,
    beta: Option<f64>,
    alpha: Option<f64>,
    gamma_up_assets: Option<f64>,
    gamma_up_profit: Option<f64>,
    gamma_down: Option<f64>,
    cost: Option<f64>,
    grow_threshold: Option<f64>,
    trim_threshold: Option<f64>,
    environment: Option<EnvironmentFile>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvironmentFile {
    #[serde(alias = "T", skip_serializing_if = "Option::is_none")]
    period: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    high_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    low_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pattern: Option<SwitchPattern>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule: Option<Vec<QualityEpoch>>,
}

impl EnvironmentFile {
    fn materialize(self) -> Result<EnvironmentSpec> {
        match self.schedule {
            Some(schedule) => {
                if self.period.is_some()
                    || self.high_q.is_some()
                    || self.low_q.is_some()
                    || self.pattern.is_some()
                {
                    return Err(Error::Config {
                        field: "environment.schedule".into(),
                        message: "an explicit schedule cannot be combined with period/high_q/low_q/pattern".into(),
                    });
                }
                Ok(EnvironmentSpec::Schedule(schedule))
            }
            None => Ok(EnvironmentSpec::Switching {
                period: self.period.unwrap_or(DEFAULT_PERIOD),
                high_q: self.high_q.unwrap_or(DEFAULT_HIGH_QUALITY),
                low_q: self.low_q.unwrap_or(DEFAULT_LOW_QUALITY),
                pattern: self.pattern.unwrap_or(SwitchPattern::LeftRightLeft),
            }),
        }
    }
}

/// Parses and validates a TOML config document, filling omitted fields with
/// reference defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_with_preset(text, None)
}

/// Like [`parse_config`], with `preset` applied when the document names none.
pub fn parse_config_with_preset(text: &str, preset: Option<Preset>) -> Result<ExperimentConfig> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config {
        field: "document".into(),
        message: e.message().to_string(),
    })?;
    let preset = file.preset.or(preset);
    let missing = |field: &str| Error::Config {
        field: field.into(),
        message: "required unless `preset = \"paper\"` is set".into(),
    };
    let topology = match (file.topology, preset) {
        (Some(t), _) => t,
        (None, Some(Preset::Paper)) => TopologyKind::GrowableTree,
        (None, None) => return Err(missing("topology")),
    };
    let beta = match (file.beta, preset) {
        (Some(b), _) => b,
        (None, Some(Preset::Paper)) => 0.7,
        (None, None) => return Err(missing("beta")),
    };
    let defaults = ModelParams::default();
    let config = ExperimentConfig {
        topology,
        num_regions: file.num_regions.unwrap_or(DEFAULT_NUM_REGIONS),
        total_assets: file.total_assets.unwrap_or(DEFAULT_TOTAL_ASSETS),
        params: ModelParams {
            beta,
            alpha: file.alpha.unwrap_or(defaults.alpha),
            gamma_up_assets: file.gamma_up_assets.unwrap_or(defaults.gamma_up_assets),
            gamma_up_profit: file.gamma_up_profit.unwrap_or(defaults.gamma_up_profit),
            gamma_down: file.gamma_down.unwrap_or(defaults.gamma_down),
            cost: file.cost.unwrap_or(defaults.cost),
            grow_threshold: file.grow_threshold.unwrap_or(defaults.grow_threshold),
            trim_threshold: file.trim_threshold.unwrap_or(defaults.trim_threshold),
            growable: topology.is_growable(),
        },
        environment: file
            .environment
            .map(EnvironmentFile::materialize)
            .transpose()?
            .unwrap_or_default(),
        total_steps: file.total_steps.unwrap_or(DEFAULT_TOTAL_STEPS),
        output_path: file
            .output_path
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_PATH)),
    };
    config.validate()?;
    Ok(config)
}
