//! Counterexample measures.
//!
//! Each entry pairs a measure with the score comparison it is claimed to
//! induce, written directly over the raw responses so that checking the
//! claim never goes through the scores. Features enter every supervised
//! entry only through a bag-wide sum that cancels in `mu_i - mu_{n+1}`.

use rand::Rng;
use serde::Serialize;

use crate::error::{ConformalError, Result};
use crate::measure::{Bag, MeasureSpec};
use crate::region::{Endpoint, Interval, PredictionRegion};
use crate::types::{sorted_ascending, LabeledPoint};

/// Claimed equivalent of `mu_i >= mu_{n+1}`: (sample responses, candidate, i).
pub type ClaimFn = fn(&[f64], f64, usize) -> bool;

/// Closed-form region from the sample responses and the count threshold
/// `m = floor((n+1) alpha)`.
pub type ClosedFormFn = fn(&[f64], usize) -> PredictionRegion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    Supervised,
    Unsupervised,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    NonMonotone,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub setting: Setting,
    pub formula: &'static str,
    pub measure: MeasureSpec,
    pub claim: Option<ClaimFn>,
    pub closed_form: Option<ClosedFormFn>,
    /// Monotonicity of `y -> M(B, (x, y))` as labelled in the catalog.
    pub monotonicity: Monotonicity,
    pub alias_of: Option<&'static str>,
    /// Responses outside this range are rejected by the measure.
    pub domain: Option<(f64, f64)>,
}

impl CatalogEntry {
    /// Evaluates the claim for every sample index.
    pub fn claim_count(&self, responses: &[f64], candidate: f64) -> Option<usize> {
        self.claim
            .map(|claim| (0..responses.len()).filter(|&i| claim(responses, candidate, i)).count())
    }
}

/// `min` of the responses other than index `skip`; `+inf` when none remain.
fn min_excluding(responses: &[f64], skip: usize) -> f64 {
    responses
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != skip)
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min)
}

/// Feature sum over the bag and `z`, added in sorted order so that every
/// leave-one-out bag of the same `n + 1` points gives the identical value.
/// The response part is added afterwards; exact ties in it (such as the
/// sample minimum under the min-shift measure) then stay exact.
fn bag_feature_sum(bag: &Bag<'_, LabeledPoint>, z: &LabeledPoint) -> f64 {
    const STACK: usize = 32;
    let total = bag.len() + 1;
    let terms = bag.iter().map(LabeledPoint::feature_sum).chain(std::iter::once(z.feature_sum()));
    if total <= STACK {
        let mut buf = [0.0; STACK];
        for (slot, v) in buf.iter_mut().zip(terms) {
            *slot = v;
        }
        let used = &mut buf[..total];
        used.sort_unstable_by(f64::total_cmp);
        used.iter().sum()
    } else {
        let mut sums: Vec<f64> = terms.collect();
        sums.sort_unstable_by(f64::total_cmp);
        sums.iter().sum()
    }
}

// ---- measures -------------------------------------------------------------

pub fn ce1_supervised() -> MeasureSpec {
    MeasureSpec::supervised("ce1", |bag, z| {
        let bag_min = bag.iter().map(|p| p.response).fold(f64::INFINITY, f64::min);
        Ok(bag_feature_sum(&bag, z) + (bag_min + z.response))
    })
}

pub fn ce2_supervised() -> MeasureSpec {
    MeasureSpec::supervised("ce2", |bag, z| {
        let squares: f64 = bag.iter().map(|p| p.response * p.response).sum();
        let y = z.response;
        Ok(bag_feature_sum(&bag, z) + (squares + y * y + y))
    })
}

pub fn ce4_supervised() -> MeasureSpec {
    MeasureSpec::supervised("ce4", |bag, z| {
        let squares: f64 = bag.iter().map(|p| p.response * p.response).sum();
        Ok(bag_feature_sum(&bag, z) + (squares + z.response))
    })
}

/// Largest |y| accepted by the steep `exp(max(0, y)^8)` measure.
pub const CE9_DOMAIN: f64 = 2.0;

pub fn ce9_supervised() -> MeasureSpec {
    MeasureSpec::supervised("ce9", |bag, z| {
        let y = z.response;
        if y.abs() > CE9_DOMAIN {
            return Err(ConformalError::OutsideDomain {
                measure: "ce9".into(),
                detail: format!("|y| = {} exceeds {CE9_DOMAIN}", y.abs()),
            });
        }
        let pos = y.max(0.0);
        Ok(bag_feature_sum(&bag, z) + (pos.powi(8).exp() + pos))
    })
}

pub fn ce1_unsupervised() -> MeasureSpec {
    MeasureSpec::unsupervised("ce1u", |bag, x| {
        Ok(bag.iter().copied().fold(f64::INFINITY, f64::min) + x)
    })
}

pub fn ce2_unsupervised() -> MeasureSpec {
    MeasureSpec::unsupervised("ce2u", |bag, x| {
        let squares: f64 = bag.iter().map(|v| v * v).sum();
        Ok(squares + x * x + x)
    })
}

pub fn ce4_unsupervised() -> MeasureSpec {
    MeasureSpec::unsupervised("ce4u", |bag, x| {
        let squares: f64 = bag.iter().map(|v| v * v).sum();
        Ok(squares + x)
    })
}

// ---- claims ---------------------------------------------------------------

/// `min{m_i, y} + Y_i >= min{m_i, Y_i} + y`, resolved into its two cases.
fn claim_min_shift(responses: &[f64], y: f64, i: usize) -> bool {
    let yi = responses[i];
    let mi = min_excluding(responses, i);
    if mi >= y {
        true
    } else {
        y <= yi + mi - mi.min(yi)
    }
}

fn claim_below_response(responses: &[f64], y: f64, i: usize) -> bool {
    y <= responses[i]
}

fn claim_two_rays(responses: &[f64], y: f64, i: usize) -> bool {
    let yi = responses[i];
    y <= yi.min(1.0 - yi) || y >= yi.max(1.0 - yi)
}

// ---- closed forms ---------------------------------------------------------

/// `{y : #{i : y <= a_i} >= m}`.
pub(crate) fn left_ray_by_count(a: &[f64], m: usize) -> PredictionRegion {
    if m == 0 {
        return PredictionRegion::FullLine;
    }
    let sorted = sorted_ascending(a);
    PredictionRegion::LeftRay {
        upper: Endpoint::closed(sorted[a.len() - m]),
    }
}

fn closed_form_below_response(responses: &[f64], m: usize) -> PredictionRegion {
    left_ray_by_count(responses, m)
}

/// Shifted scores `a_i = Y_i + m_i - min_j Y_j`.
pub fn min_shift_scores(responses: &[f64]) -> Vec<f64> {
    let overall = responses.iter().copied().fold(f64::INFINITY, f64::min);
    (0..responses.len())
        .map(|i| {
            let mi = min_excluding(responses, i);
            if mi.is_finite() {
                responses[i] + mi - overall
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

fn closed_form_min_shift(responses: &[f64], m: usize) -> PredictionRegion {
    left_ray_by_count(&min_shift_scores(responses), m)
}

/// `{y : |y - 1/2| >= w_(m)}` with `w_i = |Y_i - 1/2|`.
fn closed_form_two_rays(responses: &[f64], m: usize) -> PredictionRegion {
    if m == 0 {
        return PredictionRegion::FullLine;
    }
    let widths: Vec<f64> = responses.iter().map(|y| (y - 0.5).abs()).collect();
    let h = sorted_ascending(&widths)[m - 1];
    if h == 0.0 {
        return PredictionRegion::FullLine;
    }
    PredictionRegion::from_intervals(vec![
        Interval {
            lower: None,
            upper: Some(Endpoint::closed(0.5 - h)),
        },
        Interval {
            lower: Some(Endpoint::closed(0.5 + h)),
            upper: None,
        },
    ])
}

// ---- catalog --------------------------------------------------------------

pub fn counterexample_catalog() -> Vec<CatalogEntry> {
    use Monotonicity::*;
    use Setting::*;
    let entry = |id, setting, formula, measure, claim, closed_form, monotonicity, alias_of| CatalogEntry {
        id,
        setting,
        formula,
        measure,
        claim,
        closed_form,
        monotonicity,
        alias_of,
        domain: None,
    };
    vec![
        entry(
            "ce1",
            Supervised,
            "(sum_B x + x) + min_B y + y",
            ce1_supervised(),
            Some(claim_min_shift as ClaimFn),
            None,
            Increasing,
            None,
        ),
        entry(
            "ce2",
            Supervised,
            "(sum_B x + x) + sum_B y^2 + y^2 + y",
            ce2_supervised(),
            Some(claim_below_response),
            Some(closed_form_below_response as ClosedFormFn),
            NonMonotone,
            None,
        ),
        entry(
            "ce4",
            Supervised,
            "(sum_B x + x) + sum_B y^2 + y",
            ce4_supervised(),
            Some(claim_two_rays),
            Some(closed_form_two_rays),
            Increasing,
            None,
        ),
        entry(
            "ce5",
            Supervised,
            "(sum_B x + x) + min_B y + y",
            ce1_supervised(),
            Some(claim_min_shift),
            Some(closed_form_min_shift),
            Increasing,
            Some("ce1"),
        ),
        CatalogEntry {
            domain: Some((-CE9_DOMAIN, CE9_DOMAIN)),
            ..entry(
                "ce9",
                Supervised,
                "(sum_B x + x) + exp(max(0, y)^8) + max(0, y)",
                ce9_supervised(),
                None,
                None,
                Increasing,
                None,
            )
        },
        entry(
            "ce1u",
            Unsupervised,
            "min_B x + x",
            ce1_unsupervised(),
            Some(claim_min_shift),
            None,
            Increasing,
            None,
        ),
        entry(
            "ce2u",
            Unsupervised,
            "sum_B x^2 + x^2 + x",
            ce2_unsupervised(),
            Some(claim_below_response),
            Some(closed_form_below_response),
            NonMonotone,
            None,
        ),
        entry(
            "ce4u",
            Unsupervised,
            "sum_B x^2 + x",
            ce4_unsupervised(),
            Some(claim_two_rays),
            Some(closed_form_two_rays),
            Increasing,
            None,
        ),
        entry(
            "ce5u",
            Unsupervised,
            "min_B x + x",
            ce1_unsupervised(),
            Some(claim_min_shift),
            Some(closed_form_min_shift),
            Increasing,
            Some("ce1u"),
        ),
    ]
}

pub fn catalog_entry(id: &str) -> Option<CatalogEntry> {
    counterexample_catalog().into_iter().find(|e| e.id == id)
}

/// Observes `y -> M(B, (x, y))` on random bags and ordered pairs `y < y'`.
pub fn observe_monotonicity<R: Rng>(entry: &CatalogEntry, rng: &mut R, trials: usize) -> Result<Monotonicity> {
    let (lo, hi) = entry.domain.unwrap_or((-4.0, 4.0));
    let mut saw_up = false;
    let mut saw_down = false;
    for _ in 0..trials {
        let n = rng.random_range(2..8);
        let mut y1 = rng.random_range(lo..hi);
        let mut y2 = rng.random_range(lo..hi);
        if y1 > y2 {
            std::mem::swap(&mut y1, &mut y2);
        }
        let (m1, m2) = match entry.setting {
            Setting::Supervised => {
                let bag: Vec<LabeledPoint> = (0..n)
                    .map(|_| LabeledPoint::new(vec![rng.random_range(-2.0..2.0)], rng.random_range(lo..hi)))
                    .collect();
                let x = vec![rng.random_range(-2.0..2.0)];
                let z1 = LabeledPoint::new(x.clone(), y1);
                let z2 = LabeledPoint::new(x, y2);
                (
                    entry.measure.score(Bag::original(&bag, &z1), &z1)?,
                    entry.measure.score(Bag::original(&bag, &z2), &z2)?,
                )
            }
            Setting::Unsupervised => {
                let bag: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
                (
                    entry.measure.score_value(Bag::original(&bag, &y1), y1)?,
                    entry.measure.score_value(Bag::original(&bag, &y2), y2)?,
                )
            }
        };
        saw_up |= m1 < m2;
        saw_down |= m1 > m2;
    }
    Ok(match (saw_up, saw_down) {
        (_, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (true, true) => Monotonicity::NonMonotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ce2_claim_examples() {
        assert!(claim_below_response(&[3.0, 1.0], 2.0, 0));
        assert!(!claim_below_response(&[3.0, 1.0], 2.0, 1));
    }

    #[test]
    fn ce4_claim_excludes_the_middle() {
        assert!(!claim_two_rays(&[0.3], 0.5, 0));
        assert!(claim_two_rays(&[0.3], 0.2, 0));
        assert!(claim_two_rays(&[0.3], 0.8, 0));
    }

    #[test]
    fn ce1_claim_holds_when_candidate_is_below_the_other_minimum() {
        // m_i >= y: the inequality collapses to Y_i >= min{m_i, Y_i}.
        let ys = [4.0, 2.0, 3.0];
        for i in 0..3 {
            assert!(claim_min_shift(&ys, 1.0, i));
        }
        // Y_1 = 2, m_1 = 3: holds exactly up to max{Y_1, m_1} = 3.
        assert!(claim_min_shift(&ys, 3.0, 1));
        assert!(!claim_min_shift(&ys, 3.5, 1));
        // Y_0 = 4, m_0 = 2: holds up to Y_0.
        assert!(claim_min_shift(&ys, 4.0, 0));
        assert!(!claim_min_shift(&ys, 4.1, 0));
    }

    #[test]
    fn min_shift_scores_are_the_max_of_response_and_other_minimum() {
        let ys = [4.0, 2.0, 3.0];
        assert_eq!(min_shift_scores(&ys), vec![4.0, 3.0, 3.0]);
    }

    #[test]
    fn ce9_rejects_out_of_domain() {
        let m = ce9_supervised();
        let z = LabeledPoint::new(vec![0.0], 2.5);
        let bag = [LabeledPoint::new(vec![0.0], 0.0)];
        assert!(matches!(
            m.score(Bag::original(&bag, &z), &z),
            Err(ConformalError::OutsideDomain { .. })
        ));
        let z = LabeledPoint::new(vec![0.0], 1.9);
        assert!(m.score(Bag::original(&bag, &z), &z).unwrap().is_finite());
    }

    #[test]
    fn catalog_ids_are_unique_and_aliases_resolve() {
        let catalog = counterexample_catalog();
        let mut ids: Vec<_> = catalog.iter().map(|e| e.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), catalog.len());
        for e in &catalog {
            if let Some(target) = e.alias_of {
                assert!(catalog.iter().any(|o| o.id == target));
            }
        }
    }

    #[test]
    fn declared_monotonicity_is_observed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for entry in counterexample_catalog() {
            let seen = observe_monotonicity(&entry, &mut rng, 1000).unwrap();
            assert_eq!(seen, entry.monotonicity, "{}", entry.id);
        }
    }
}
