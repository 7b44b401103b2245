//! Monte Carlo coverage experiments comparing conformal and least-squares
//! prediction intervals.
//!
//! Each replication draws a fresh sample, builds every requested interval at
//! the holdout's features and records whether the holdout response is
//! covered. Replications run in parallel; their outcomes are collected in
//! index order before summing, so a report depends only on the config.

mod generators;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{lm_interval, ols_fit};
use crate::error::{ConformalError, Result};
use crate::exact::{default_eta, exact_supervised_interval, Shape};
use crate::types::{check_alpha, scaled_floor};

pub use generators::{
    example_b_response_cdf, generate, oracle_interval_length, GeneratorId, GeneratorSpec, NoiseReading,
    FEATURE_VARIANCE, UNIFORM_HALF_WIDTH,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Least-squares Student-t interval.
    Lm,
    /// Closed-form conformal interval.
    Conformal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Method {
    pub family: Family,
    pub shape: Shape,
}

impl Method {
    pub fn all() -> Vec<Method> {
        [Family::Lm, Family::Conformal]
            .into_iter()
            .flat_map(|family| Shape::ALL.into_iter().map(move |shape| Method { family, shape }))
            .collect()
    }

    pub fn label(&self) -> String {
        let family = match self.family {
            Family::Lm => "lm",
            Family::Conformal => "conformal",
        };
        format!("{family}-{}", self.shape.as_str())
    }
}

/// Choice of eta for the bounded conformal interval.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum EtaRule {
    /// Recomputed per replication from the sample; see [`crate::exact::default_eta`].
    #[default]
    #[serde(alias = "example_a_default")]
    Default,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub generator: GeneratorSpec,
    pub replications: u64,
    pub alpha: f64,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub eta_rule: EtaRule,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        check_alpha(self.alpha)?;
        if self.replications == 0 {
            return Err(ConformalError::InvalidConfig("replications must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(ConformalError::InvalidConfig("no methods requested".into()));
        }
        let n = self.generator.n - 1;
        if self.methods.iter().any(|m| m.family == Family::Conformal) && scaled_floor(n + 1, self.alpha) < 2 {
            return Err(ConformalError::InvalidConfig(format!(
                "conformal intervals need floor((n+1) alpha) >= 2 (n = {n}, alpha = {})",
                self.alpha
            )));
        }
        if let EtaRule::Fixed(eta) = self.eta_rule {
            if !eta.is_finite() {
                return Err(ConformalError::InvalidConfig("eta must be finite".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodResult {
    pub method: String,
    pub family: Family,
    pub shape: Shape,
    pub covered: u64,
    pub replications: u64,
    pub coverage: f64,
    /// `sqrt(c (1 - c) / N)`
    pub monte_carlo_se: f64,
    /// Bounded shape only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_length: Option<f64>,
    /// Mean length over the oracle length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length_ratio_full: Option<f64>,
    /// Half the mean length over the oracle length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length_ratio_half: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub oracle_length: f64,
    pub results: Vec<MethodResult>,
}

impl SimulationReport {
    pub fn result(&self, family: Family, shape: Shape) -> Option<&MethodResult> {
        self.results.iter().find(|r| r.family == family && r.shape == shape)
    }
}

/// Coverage flag and interval length for each requested method.
fn replicate(config: &SimulationConfig, index: u64) -> Result<Vec<(bool, f64)>> {
    let (sample, holdout) = generate(&config.generator, index)?;
    let x = &holdout.features;
    let fit = if config.methods.iter().any(|m| m.family == Family::Lm) {
        Some(ols_fit(&sample, true)?)
    } else {
        None
    };
    config
        .methods
        .iter()
        .map(|method| {
            let region = match method.family {
                Family::Lm => lm_interval(fit.as_ref().expect("fitted above"), x, config.alpha, method.shape)?,
                Family::Conformal => {
                    let eta = match (method.shape, config.eta_rule) {
                        (Shape::Bounded, EtaRule::Default) => Some(default_eta(&sample, x)?),
                        (Shape::Bounded, EtaRule::Fixed(eta)) => Some(eta),
                        _ => None,
                    };
                    exact_supervised_interval(&sample, x, config.alpha, method.shape, eta)?.region
                }
            };
            Ok((region.contains(holdout.response), region.length()))
        })
        .collect()
}

pub fn run(config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let oracle_length = oracle_interval_length(&config.generator, config.alpha)?;
    let outcomes: Vec<Vec<(bool, f64)>> = (0..config.replications)
        .into_par_iter()
        .map(|index| {
            replicate(config, index).map_err(|source| ConformalError::Replication {
                index,
                source: Box::new(source),
            })
        })
        .collect::<Result<_>>()?;

    let total = config.replications as f64;
    let results = config
        .methods
        .iter()
        .enumerate()
        .map(|(k, method)| {
            let covered = outcomes.iter().filter(|o| o[k].0).count() as u64;
            let coverage = covered as f64 / total;
            let mean_length = (method.shape == Shape::Bounded)
                .then(|| outcomes.iter().map(|o| o[k].1).sum::<f64>() / total);
            MethodResult {
                method: method.label(),
                family: method.family,
                shape: method.shape,
                covered,
                replications: config.replications,
                coverage,
                monte_carlo_se: (coverage * (1.0 - coverage) / total).sqrt(),
                mean_length,
                length_ratio_full: mean_length.map(|l| l / oracle_length),
                length_ratio_half: mean_length.map(|l| 0.5 * l / oracle_length),
            }
        })
        .collect();

    Ok(SimulationReport {
        config: config.clone(),
        oracle_length,
        results,
    })
}
