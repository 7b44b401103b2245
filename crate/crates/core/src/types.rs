//! Observations, exchangeable samples and plausibility values.

use serde::{Deserialize, Serialize};

use crate::error::{ConformalError, Result};

/// One observation `z = (x, y)` with `p` real features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub features: Vec<f64>,
    pub response: f64,
}

impl LabeledPoint {
    pub fn new(features: Vec<f64>, response: f64) -> Self {
        Self { features, response }
    }

    pub fn feature_sum(&self) -> f64 {
        self.features.iter().sum()
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.features.len() != dim {
            return Err(ConformalError::DimensionMismatch {
                expected: dim,
                found: self.features.len(),
            });
        }
        if !self.response.is_finite() || self.features.iter().any(|v| !v.is_finite()) {
            return Err(ConformalError::NonFiniteInput("labeled point"));
        }
        Ok(())
    }
}

/// A bag of `n >= 1` observations sharing one feature dimension.
///
/// Point order is kept for reporting only; everything that consumes a
/// `Sample` as a bag is invariant to it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    points: Vec<LabeledPoint>,
    dim: usize,
}

impl Sample {
    pub fn new(points: Vec<LabeledPoint>) -> Result<Self> {
        let first = points.first().ok_or(ConformalError::EmptySample)?;
        let dim = first.features.len();
        for point in &points {
            point.validate(dim)?;
        }
        Ok(Self { points, dim })
    }

    /// A feature-free sample (`p = 0`) built from raw responses.
    pub fn from_responses(values: &[f64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&y| LabeledPoint::new(Vec::new(), y))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn responses(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.response).collect()
    }

    /// Checks that `features` can be paired with this sample.
    pub fn check_features(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.dim {
            return Err(ConformalError::DimensionMismatch {
                expected: self.dim,
                found: features.len(),
            });
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(ConformalError::NonFiniteInput("candidate features"));
        }
        Ok(())
    }
}

/// The provisional observation `z_{n+1} = (x_{n+1}, y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidatePoint {
    pub features: Vec<f64>,
    pub provisional_response: f64,
}

impl CandidatePoint {
    pub fn new(features: Vec<f64>, provisional_response: f64) -> Self {
        Self {
            features,
            provisional_response,
        }
    }

    pub fn to_point(&self) -> LabeledPoint {
        LabeledPoint::new(self.features.clone(), self.provisional_response)
    }
}

/// The exact rational `count / denominator` returned by the conformal
/// algorithm, with `denominator = n + 1` and `1 <= count <= n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlausibilityValue {
    pub count: usize,
    pub denominator: usize,
}

impl PlausibilityValue {
    pub fn value(&self) -> f64 {
        self.count as f64 / self.denominator as f64
    }

    /// Region membership: `count / (n+1) > alpha`.
    ///
    /// For integer `count` this is `count > floor((n+1) alpha)`, which is
    /// evaluated with the same decimal-aware floor as [`scaled_floor`].
    pub fn exceeds(&self, alpha: f64) -> bool {
        self.count > scaled_floor(self.denominator, alpha)
    }
}

/// `floor(count * alpha)` for a decimal `alpha`.
///
/// A product that lands within a relative `1e-9` of an integer is treated as
/// that integer, so `floor(10 * 0.3)` is 3 even though `0.3` is stored as
/// `0.29999…`.
pub fn scaled_floor(count: usize, alpha: f64) -> usize {
    let product = count as f64 * alpha;
    let nearest = product.round();
    let snapped = if (product - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest
    } else {
        product.floor()
    };
    snapped.max(0.0) as usize
}

/// True when `count * alpha` is an integer under the same snapping rule.
pub fn scaled_is_integer(count: usize, alpha: f64) -> bool {
    let product = count as f64 * alpha;
    (product - product.round()).abs() <= 1e-9 * product.round().abs().max(1.0)
}

/// `alpha` must lie strictly inside `(0, 1)`.
pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(ConformalError::InvalidAlpha(alpha))
    }
}

/// Order statistic `x_(k)` with `k` counted from 1 in ascending order.
pub fn order_statistic(sorted: &[f64], k: usize) -> f64 {
    sorted[k - 1]
}

/// Ascending copy of `values`; duplicates are retained.
pub fn sorted_ascending(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    out.sort_by(f64::total_cmp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_rejects_mixed_dimensions() {
        let err = Sample::new(vec![
            LabeledPoint::new(vec![1.0], 2.0),
            LabeledPoint::new(vec![1.0, 2.0], 2.0),
        ])
        .unwrap_err();
        assert_eq!(
            err,
            ConformalError::DimensionMismatch {
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn sample_rejects_empty_and_non_finite() {
        assert_eq!(Sample::new(vec![]).unwrap_err(), ConformalError::EmptySample);
        assert!(Sample::from_responses(&[1.0, f64::NAN]).is_err());
        assert!(Sample::new(vec![LabeledPoint::new(vec![f64::INFINITY], 0.0)]).is_err());
    }

    #[test]
    fn scaled_floor_snaps_decimal_products() {
        assert_eq!(scaled_floor(10, 0.3), 3);
        assert_eq!(scaled_floor(1001, 0.1), 100);
        assert_eq!(scaled_floor(5, 0.5), 2);
        assert_eq!(scaled_floor(20, 0.1), 2);
        assert_eq!(scaled_floor(10, 0.25), 2);
        assert_eq!(scaled_floor(11, 0.05), 0);
        assert!(scaled_is_integer(100, 0.01 * 7.0));
        assert!(!scaled_is_integer(10, 0.25));
    }

    #[test]
    fn plausibility_membership_is_strict() {
        // n = 9, alpha = 0.3: (n+1) alpha = 3, so 3/10 is not > 0.3.
        let at = PlausibilityValue {
            count: 3,
            denominator: 10,
        };
        let above = PlausibilityValue {
            count: 4,
            denominator: 10,
        };
        assert!(!at.exceeds(0.3));
        assert!(above.exceeds(0.3));
    }
}
