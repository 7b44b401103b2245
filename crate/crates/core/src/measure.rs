//! Nonconformity measures `M(B, z)`.
//!
//! A measure is a deterministic map from a bag `B` and a point `z` to a real
//! score. The engine never materializes the leave-one-out bags
//! `z^{n+1} \ {z_i}`; it hands the measure a [`Bag`] view instead.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{ConformalError, Result};
use crate::measures::{PolynomialSupervisedParams, PolynomialUnsupervisedParams};
use crate::types::LabeledPoint;

/// The augmented data `z^{n+1}` with one element held out.
#[derive(Debug, Clone, Copy)]
pub struct Bag<'a, T> {
    sample: &'a [T],
    candidate: &'a T,
    held_out: Option<usize>,
}

impl<'a, T> Bag<'a, T> {
    /// Bag without sample element `index`; the candidate is included.
    pub fn without(sample: &'a [T], candidate: &'a T, index: usize) -> Self {
        debug_assert!(index < sample.len());
        Self {
            sample,
            candidate,
            held_out: Some(index),
        }
    }

    /// Bag equal to the original sample (the candidate is held out).
    pub fn original(sample: &'a [T], candidate: &'a T) -> Self {
        Self {
            sample,
            candidate,
            held_out: None,
        }
    }

    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &'a T> + '_ {
        let held_out = self.held_out;
        let sample = self
            .sample
            .iter()
            .enumerate()
            .filter(move |(j, _)| Some(*j) != held_out)
            .map(|(_, item)| item);
        let candidate = held_out.map(|_| self.candidate);
        sample.chain(candidate)
    }
}

pub type SupervisedFn = dyn Fn(Bag<'_, LabeledPoint>, &LabeledPoint) -> Result<f64> + Send + Sync;
pub type UnsupervisedFn = dyn Fn(Bag<'_, f64>, f64) -> Result<f64> + Send + Sync;

#[derive(Clone)]
pub enum Evaluator {
    Supervised(Arc<SupervisedFn>),
    Unsupervised(Arc<UnsupervisedFn>),
}

/// Parameters attached to the polynomial families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MeasureParams {
    Supervised(PolynomialSupervisedParams),
    Unsupervised(PolynomialUnsupervisedParams),
}

/// A labelled nonconformity measure.
#[derive(Clone)]
pub struct MeasureSpec {
    label: String,
    params: Option<MeasureParams>,
    evaluator: Evaluator,
}

impl fmt::Debug for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureSpec")
            .field("label", &self.label)
            .field("params", &self.params)
            .field("supervised", &self.is_supervised())
            .finish()
    }
}

impl MeasureSpec {
    pub fn supervised<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Bag<'_, LabeledPoint>, &LabeledPoint) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            params: None,
            evaluator: Evaluator::Supervised(Arc::new(f)),
        }
    }

    pub fn unsupervised<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Bag<'_, f64>, f64) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            params: None,
            evaluator: Evaluator::Unsupervised(Arc::new(f)),
        }
    }

    pub fn with_params(mut self, params: MeasureParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> Option<MeasureParams> {
        self.params
    }

    pub fn is_supervised(&self) -> bool {
        matches!(self.evaluator, Evaluator::Supervised(_))
    }

    pub fn score(&self, bag: Bag<'_, LabeledPoint>, point: &LabeledPoint) -> Result<f64> {
        match &self.evaluator {
            Evaluator::Supervised(f) => f(bag, point),
            Evaluator::Unsupervised(_) => Err(ConformalError::UnsupportedSetting {
                measure: self.label.clone(),
                setting: "supervised",
            }),
        }
    }

    pub fn score_value(&self, bag: Bag<'_, f64>, x: f64) -> Result<f64> {
        match &self.evaluator {
            Evaluator::Unsupervised(f) => f(bag, x),
            Evaluator::Supervised(_) => Err(ConformalError::UnsupportedSetting {
                measure: self.label.clone(),
                setting: "unsupervised",
            }),
        }
    }
}
