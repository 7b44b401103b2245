//! Reference targets bundled with the binary for `simulate --check`.

use conformal_exact::sim::{GeneratorId, MethodResult, SimulationReport};
use serde::{Deserialize, Serialize};

const REFERENCE_TARGETS: &str = include_str!("../data/reference_targets.toml");

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
pub struct ReferenceConfig {
    pub replications: u64,
    pub n: usize,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Approx,
    AtLeast,
    BelowNominal,
    Flag,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct Target {
    pub generator: GeneratorId,
    pub method: String,
    pub quantity: String,
    pub kind: TargetKind,
    #[serde(default)]
    pub value: Option<f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ReferenceTargets {
    pub reference: ReferenceConfig,
    pub target: Vec<Target>,
}

pub fn reference_targets() -> ReferenceTargets {
    toml::from_str(REFERENCE_TARGETS).expect("bundled targets parse")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetOutcome {
    pub method: String,
    pub quantity: String,
    pub kind: TargetKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// One value, or `[full, half]` for the two length-ratio readings.
    pub observed: Vec<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckBlock {
    pub applicable: bool,
    pub reference: ReferenceConfig,
    pub outcomes: Vec<TargetOutcome>,
}

impl CheckBlock {
    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed).count()
    }
}

fn observed(result: &MethodResult, quantity: &str) -> Option<Vec<f64>> {
    match quantity {
        "coverage" => Some(vec![result.coverage]),
        "length_ratio_full" => result.length_ratio_full.map(|r| vec![r]),
        "length_ratio_half" => result.length_ratio_half.map(|r| vec![r]),
        "length_ratio" => Some(vec![result.length_ratio_full?, result.length_ratio_half?]),
        _ => None,
    }
}

fn evaluate(target: &Target, result: &MethodResult, alpha: f64) -> TargetOutcome {
    let mut outcome = TargetOutcome {
        method: target.method.clone(),
        quantity: target.quantity.clone(),
        kind: target.kind,
        target: target.value,
        tolerance: target.tolerance,
        observed: Vec::new(),
        passed: false,
        detail: None,
    };
    let Some(values) = observed(result, &target.quantity) else {
        outcome.detail = Some(format!("quantity `{}` not available", target.quantity));
        return outcome;
    };
    let within = |v: f64| match (target.value, target.tolerance) {
        (Some(t), Some(tol)) => (v - t).abs() <= tol,
        _ => false,
    };
    match target.kind {
        TargetKind::Approx => outcome.passed = within(values[0]),
        TargetKind::AtLeast => outcome.passed = target.value.is_some_and(|t| values[0] >= t),
        TargetKind::BelowNominal => {
            let bound = 1.0 - alpha - 3.0 * result.monte_carlo_se;
            outcome.passed = values[0] < bound;
            outcome.detail = Some(format!("1 - alpha - 3 SE = {bound:.4}"));
        }
        TargetKind::Flag => {
            outcome.passed = true;
            let labels = ["full", "half"];
            let hits: Vec<&str> = values
                .iter()
                .zip(labels)
                .filter(|(v, _)| within(**v))
                .map(|(_, l)| l)
                .collect();
            let verdict = if hits.is_empty() {
                "neither reading within tolerance".to_string()
            } else {
                format!("within tolerance: {}", hits.join(", "))
            };
            outcome.detail = Some(match &target.note {
                Some(note) => format!("{verdict} ({note})"),
                None => verdict,
            });
        }
    }
    outcome.observed = values;
    outcome
}

/// Compares `report` with the bundled targets for its generator.
pub fn check(report: &SimulationReport) -> CheckBlock {
    let targets = reference_targets();
    let config = &report.config;
    let reference = targets.reference;
    let applicable = config.replications == reference.replications
        && config.generator.n == reference.n
        && (config.alpha - reference.alpha).abs() < 1e-12;
    let outcomes = if applicable {
        targets
            .target
            .iter()
            .filter(|t| t.generator == config.generator.id)
            .filter_map(|t| {
                let result = report.results.iter().find(|r| r.method == t.method)?;
                Some(evaluate(t, result, config.alpha))
            })
            .collect()
    } else {
        Vec::new()
    };
    CheckBlock {
        applicable,
        reference,
        outcomes,
    }
}
