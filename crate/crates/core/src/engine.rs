//! The conformal plausibility function, supervised and unsupervised.

use crate::error::{ConformalError, Result};
use crate::measure::{Bag, MeasureSpec};
use crate::types::{
    check_alpha, scaled_floor, CandidatePoint, LabeledPoint, PlausibilityValue, Sample,
};

fn finite(score: f64, measure: &MeasureSpec, index: usize) -> Result<f64> {
    if score.is_finite() {
        Ok(score)
    } else {
        Err(ConformalError::NonFiniteScore {
            measure: measure.label().to_owned(),
            index,
        })
    }
}

/// Leave-one-out scores `mu_1, …, mu_{n+1}`; the last entry belongs to the
/// candidate.
pub fn nonconformity_scores(
    sample: &Sample,
    candidate: &CandidatePoint,
    measure: &MeasureSpec,
) -> Result<Vec<f64>> {
    sample.check_features(&candidate.features)?;
    if !candidate.provisional_response.is_finite() {
        return Err(ConformalError::NonFiniteInput("candidate response"));
    }
    let z = candidate.to_point();
    supervised_scores(sample.points(), &z, measure)
}

fn supervised_scores(
    points: &[LabeledPoint],
    candidate: &LabeledPoint,
    measure: &MeasureSpec,
) -> Result<Vec<f64>> {
    let mut scores = Vec::with_capacity(points.len() + 1);
    for (i, point) in points.iter().enumerate() {
        let s = measure.score(Bag::without(points, candidate, i), point)?;
        scores.push(finite(s, measure, i)?);
    }
    let own = measure.score(Bag::original(points, candidate), candidate)?;
    scores.push(finite(own, measure, points.len())?);
    Ok(scores)
}

/// Scores for a bag of reals and a provisional value `x`.
pub fn unsupervised_scores(values: &[f64], candidate: f64, measure: &MeasureSpec) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(ConformalError::EmptySample);
    }
    if !candidate.is_finite() || values.iter().any(|v| !v.is_finite()) {
        return Err(ConformalError::NonFiniteInput("unsupervised data"));
    }
    let mut scores = Vec::with_capacity(values.len() + 1);
    for (i, &x) in values.iter().enumerate() {
        let s = measure.score_value(Bag::without(values, &candidate, i), x)?;
        scores.push(finite(s, measure, i)?);
    }
    let own = measure.score_value(Bag::original(values, &candidate), candidate)?;
    scores.push(finite(own, measure, values.len())?);
    Ok(scores)
}

fn count_at_least_last(scores: &[f64]) -> PlausibilityValue {
    let last = scores[scores.len() - 1];
    PlausibilityValue {
        count: scores.iter().filter(|&&mu| mu >= last).count(),
        denominator: scores.len(),
    }
}

/// `pl(y) = #{i : mu_i >= mu_{n+1}} / (n+1)` for the supervised algorithm.
pub fn plausibility(
    sample: &Sample,
    candidate: &CandidatePoint,
    measure: &MeasureSpec,
) -> Result<PlausibilityValue> {
    nonconformity_scores(sample, candidate, measure).map(|s| count_at_least_last(&s))
}

/// The unsupervised algorithm: the same rank count on a bag of reals.
pub fn plausibility_unsupervised(
    values: &[f64],
    candidate: f64,
    measure: &MeasureSpec,
) -> Result<PlausibilityValue> {
    unsupervised_scores(values, candidate, measure).map(|s| count_at_least_last(&s))
}

/// `t_n(alpha) = floor((n+1) alpha) / (n+1)`.
pub fn threshold(n: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(ConformalError::EmptySample);
    }
    Ok(scaled_floor(n + 1, alpha) as f64 / (n + 1) as f64)
}

/// A prediction problem whose plausibility can be evaluated at any `y`.
#[derive(Debug, Clone, Copy)]
pub enum Task<'a> {
    Supervised {
        sample: &'a Sample,
        features_new: &'a [f64],
    },
    Unsupervised {
        values: &'a [f64],
    },
}

impl<'a> Task<'a> {
    pub fn n(&self) -> usize {
        match self {
            Task::Supervised { sample, .. } => sample.len(),
            Task::Unsupervised { values } => values.len(),
        }
    }

    pub fn responses(&self) -> Vec<f64> {
        match self {
            Task::Supervised { sample, .. } => sample.responses(),
            Task::Unsupervised { values } => values.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Task::Supervised {
                sample,
                features_new,
            } => sample.check_features(features_new),
            Task::Unsupervised { values } => {
                if values.is_empty() {
                    Err(ConformalError::EmptySample)
                } else if values.iter().any(|v| !v.is_finite()) {
                    Err(ConformalError::NonFiniteInput("unsupervised data"))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn scores(&self, measure: &MeasureSpec, y: f64) -> Result<Vec<f64>> {
        match self {
            Task::Supervised {
                sample,
                features_new,
            } => {
                let z = LabeledPoint::new(features_new.to_vec(), y);
                supervised_scores(sample.points(), &z, measure)
            }
            Task::Unsupervised { values } => unsupervised_scores(values, y, measure),
        }
    }

    pub fn plausibility(&self, measure: &MeasureSpec, y: f64) -> Result<PlausibilityValue> {
        self.scores(measure, y).map(|s| count_at_least_last(&s))
    }

    /// `y` belongs to the region at level `alpha` iff `pl(y) > alpha`.
    pub fn is_member(&self, measure: &MeasureSpec, alpha: f64, y: f64) -> Result<bool> {
        Ok(self.plausibility(measure, y)?.exceeds(alpha))
    }

    /// `mu_i >= mu_{n+1}` at candidate `y`, computing only those two scores.
    pub fn comparison(&self, measure: &MeasureSpec, i: usize, y: f64) -> Result<bool> {
        let (mu_i, mu_new) = match self {
            Task::Supervised {
                sample,
                features_new,
            } => {
                let z = LabeledPoint::new(features_new.to_vec(), y);
                let points = sample.points();
                (
                    measure.score(Bag::without(points, &z, i), &points[i])?,
                    measure.score(Bag::original(points, &z), &z)?,
                )
            }
            Task::Unsupervised { values } => (
                measure.score_value(Bag::without(values, &y, i), values[i])?,
                measure.score_value(Bag::original(values, &y), y)?,
            ),
        };
        Ok(finite(mu_i, measure, i)? >= finite(mu_new, measure, self.n())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::catalog::ce2_supervised;
    use crate::measures::{polynomial_supervised, polynomial_unsupervised};
    use crate::measures::{PolynomialSupervisedParams, PolynomialUnsupervisedParams};

    fn unit_sample(ys: &[f64]) -> Sample {
        Sample::new(ys.iter().map(|&y| LabeledPoint::new(vec![0.0], y)).collect()).unwrap()
    }

    #[test]
    fn identical_points_give_equal_scores() {
        let sample = Sample::new(vec![LabeledPoint::new(vec![1.0], 2.0); 3]).unwrap();
        let candidate = CandidatePoint::new(vec![1.0], 2.0);
        for measure in [
            ce2_supervised(),
            polynomial_supervised(PolynomialSupervisedParams::upper()),
        ] {
            let scores = nonconformity_scores(&sample, &candidate, &measure).unwrap();
            assert!(scores.iter().all(|&s| s == scores[0]), "{scores:?}");
            let pl = plausibility(&sample, &candidate, &measure).unwrap();
            assert_eq!((pl.count, pl.denominator), (4, 4));
        }
    }

    #[test]
    fn example2_score_differences_match_hand_formula() {
        // Both bags carry the squares of all n+1 responses, so
        // mu_i - mu_{n+1} = Y_i - Y_{n+1}; for y = (1, 2) and candidate 0 that is (1, 2).
        let sample = Sample::new(vec![
            LabeledPoint::new(vec![0.5], 1.0),
            LabeledPoint::new(vec![-1.0], 2.0),
        ])
        .unwrap();
        let candidate = CandidatePoint::new(vec![3.0], 0.0);
        let scores = nonconformity_scores(&sample, &candidate, &ce2_supervised()).unwrap();
        // Hand evaluation: x total 2.5, squares 1 + 4 + 0 = 5.
        assert_eq!(scores, vec![2.5 + 5.0 + 1.0, 2.5 + 5.0 + 2.0, 2.5 + 5.0 + 0.0]);
        for (i, expected) in [1.0, 2.0].into_iter().enumerate() {
            assert!((scores[i] - scores[2] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn polynomial_scores_match_hand_expansion() {
        // beta2=0, beta1=1, gamma=-1, eta=0: mu_i = y_i - x_i.
        let sample = Sample::new(vec![
            LabeledPoint::new(vec![1.0], 5.0),
            LabeledPoint::new(vec![2.0], 7.0),
        ])
        .unwrap();
        let candidate = CandidatePoint::new(vec![3.0], 6.0);
        let measure = polynomial_supervised(PolynomialSupervisedParams::upper());
        let scores = nonconformity_scores(&sample, &candidate, &measure).unwrap();
        assert_eq!(scores, vec![4.0, 5.0, 3.0]);
    }

    #[test]
    fn plausibility_counts_ties_and_self() {
        let sample = unit_sample(&[3.0, 1.0, 2.0]);
        let measure = ce2_supervised();
        let pl = plausibility(&sample, &CandidatePoint::new(vec![0.0], 1.5), &measure).unwrap();
        assert_eq!((pl.count, pl.denominator), (3, 4));
        assert_eq!(pl.value(), 0.75);
        // Strictly largest candidate score: only the self comparison.
        let pl = plausibility(&sample, &CandidatePoint::new(vec![0.0], 10.0), &measure).unwrap();
        assert_eq!(pl.count, 1);
    }

    #[test]
    fn unsupervised_plausibility() {
        let measure = polynomial_unsupervised(PolynomialUnsupervisedParams::upper());
        let pl = plausibility_unsupervised(&[1.0, 2.0, 3.0], 2.5, &measure).unwrap();
        assert_eq!((pl.count, pl.denominator), (2, 4));
        let pl = plausibility_unsupervised(&[4.0, 4.0, 4.0], 4.0, &measure).unwrap();
        assert_eq!(pl.value(), 1.0);
    }

    #[test]
    fn example_1_prime_brute_force() {
        // M(B, x) = min(B) + x, values (0, 10), candidate 5.
        // mu_1 = min{10, 5} + 0 = 5, mu_2 = min{0, 5} + 10 = 10, mu_3 = min{0, 10} + 5 = 5.
        let measure = crate::measures::catalog::ce1_unsupervised();
        let scores = unsupervised_scores(&[0.0, 10.0], 5.0, &measure).unwrap();
        assert_eq!(scores, vec![5.0, 10.0, 5.0]);
        let pl = plausibility_unsupervised(&[0.0, 10.0], 5.0, &measure).unwrap();
        assert_eq!(pl.count, 3);
    }

    #[test]
    fn threshold_floor_arithmetic() {
        assert_eq!(threshold(9, 0.3).unwrap(), 0.3);
        assert_eq!(threshold(1000, 0.1).unwrap(), 100.0 / 1001.0);
        assert_eq!(threshold(4, 0.5).unwrap(), 2.0 / 5.0);
        assert!(matches!(threshold(4, 1.0), Err(ConformalError::InvalidAlpha(_))));
        assert!(matches!(threshold(4, 0.0), Err(ConformalError::InvalidAlpha(_))));
    }

    #[test]
    fn non_finite_score_is_an_error() {
        let measure = MeasureSpec::supervised("blowup", |_, z| Ok(1.0 / (z.response - 1.0).abs().min(0.0)));
        let sample = unit_sample(&[1.0, 2.0]);
        let err = plausibility(&sample, &CandidatePoint::new(vec![0.0], 1.0), &measure).unwrap_err();
        assert!(matches!(err, ConformalError::NonFiniteScore { .. }));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let sample = unit_sample(&[1.0, 2.0]);
        let err = plausibility(
            &sample,
            &CandidatePoint::new(vec![0.0, 1.0], 1.0),
            &ce2_supervised(),
        )
        .unwrap_err();
        assert!(matches!(err, ConformalError::DimensionMismatch { .. }));
    }
}
