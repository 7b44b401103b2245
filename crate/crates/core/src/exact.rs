//! Closed-form conformal prediction intervals.
//!
//! For the polynomial measures every comparison `mu_i >= mu_{n+1}` reduces
//! to a condition on the candidate of the form `y <= a_i`, `y >= a_i` or
//! `|y - c| <= s_i`, and `y` lies in the region exactly when at least
//! `m = floor((n+1) alpha)` of the `n` sample comparisons hold. The
//! endpoint is therefore an order statistic selected by `m`.
//!
//! The conventional ranks `r1`, `r2`, `r3` are reported next to the rank
//! actually used; they agree for the upper ray whenever `(n+1) alpha` is not
//! an integer and are off by one elsewhere, so every [`ExactInterval`]
//! carries both.

use serde::{Deserialize, Serialize};

use crate::error::{ConformalError, Result};
use crate::region::{Endpoint, PredictionRegion};
use crate::types::{check_alpha, order_statistic, scaled_floor, sorted_ascending, Sample};

/// Interval shapes offered by both the conformal and the linear-model
/// constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `(-inf, a]`
    Upper,
    /// `[a, inf)`
    Lower,
    /// `[a, b]`
    Bounded,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Upper, Shape::Lower, Shape::Bounded];

    pub fn as_str(&self) -> &'static str {
        match self {
            Shape::Upper => "upper",
            Shape::Lower => "lower",
            Shape::Bounded => "bounded",
        }
    }
}

impl std::str::FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "upper" => Ok(Shape::Upper),
            "lower" => Ok(Shape::Lower),
            "bounded" => Ok(Shape::Bounded),
            other => Err(format!("unknown shape `{other}` (expected upper, lower or bounded)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankConstants {
    pub n: usize,
    /// `floor((n+1) alpha)`
    pub m: usize,
    /// `min(n, floor((n+1)(1 - alpha)) + 1)`
    pub r1: usize,
    /// `(n+1) - floor((n+1)(1 - alpha))`
    pub r2: usize,
    /// `(n+1) - floor((n+1) alpha)`
    pub r3: usize,
    /// `m <= 1`: the region is the whole line.
    pub trivial: bool,
}

pub fn rank_constants(n: usize, alpha: f64) -> Result<RankConstants> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(ConformalError::EmptySample);
    }
    let m = scaled_floor(n + 1, alpha);
    let complement = scaled_floor(n + 1, 1.0 - alpha);
    Ok(RankConstants {
        n,
        m,
        r1: n.min(complement + 1),
        r2: n + 1 - complement,
        r3: n + 1 - m,
        trivial: m <= 1,
    })
}

/// The whole line when `floor((n+1) alpha) <= 1`, otherwise `None`.
pub fn trivial_region_guard(n: usize, alpha: f64) -> Option<PredictionRegion> {
    (scaled_floor(n + 1, alpha) <= 1).then_some(PredictionRegion::FullLine)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

/// Which order statistic an endpoint uses, next to the conventional rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankUsage {
    pub side: Side,
    /// 1-based ascending rank of the score list the endpoint is read from.
    pub used: usize,
    pub nominal: usize,
    pub nominal_name: &'static str,
}

impl RankUsage {
    pub fn agrees(&self) -> bool {
        self.used == self.nominal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactInterval {
    pub shape: Shape,
    pub region: PredictionRegion,
    pub ranks: RankConstants,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centre: Option<f64>,
    pub rank_usage: Vec<RankUsage>,
    pub notes: Vec<String>,
}

impl ExactInterval {
    fn new(shape: Shape, region: PredictionRegion, ranks: RankConstants) -> Self {
        let mut notes = Vec::new();
        match ranks.m {
            0 => notes.push("floor((n+1) alpha) = 0, so every candidate value is plausible".into()),
            1 => notes.push(
                "floor((n+1) alpha) = 1: the whole line is returned as a conservative region; \
                 {pl > alpha} itself stops at the extreme order statistic"
                    .into(),
            ),
            _ => {}
        }
        Self {
            shape,
            region,
            ranks,
            eta: None,
            kappa: None,
            centre: None,
            rank_usage: Vec::new(),
            notes,
        }
    }

    fn with_usage(mut self, usage: Vec<RankUsage>) -> Self {
        for u in &usage {
            if !u.agrees() {
                self.notes.push(format!(
                    "{:?} endpoint uses order statistic {} where the conventional rank {} = {}",
                    u.side, u.used, u.nominal_name, u.nominal
                ));
            }
        }
        self.rank_usage = usage;
        self
    }

    /// Endpoint ranks differing from the conventional ones.
    pub fn rank_mismatches(&self) -> impl Iterator<Item = &RankUsage> {
        self.rank_usage.iter().filter(|u| !u.agrees())
    }
}

/// `a_i = sum_j (x_{new,j} - x_ij) + y_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftScores(pub Vec<f64>);

impl ShiftScores {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

fn feature_shifts(sample: &Sample, features_new: &[f64]) -> Result<Vec<f64>> {
    sample.check_features(features_new)?;
    Ok(sample
        .points()
        .iter()
        .map(|p| {
            features_new
                .iter()
                .zip(&p.features)
                .map(|(new, old)| new - old)
                .sum::<f64>()
        })
        .collect())
}

pub fn shift_scores(sample: &Sample, features_new: &[f64]) -> Result<ShiftScores> {
    let shifts = feature_shifts(sample, features_new)?;
    Ok(ShiftScores(
        shifts
            .iter()
            .zip(sample.points())
            .map(|(d, p)| d + p.response)
            .collect(),
    ))
}

fn left_ray(scores: &[f64], m: usize) -> PredictionRegion {
    let sorted = sorted_ascending(scores);
    let value = order_statistic(&sorted, scores.len() + 1 - m);
    let closed = scores.iter().filter(|&&a| a >= value).count() >= m;
    PredictionRegion::LeftRay {
        upper: Endpoint { value, closed },
    }
}

fn right_ray(scores: &[f64], m: usize) -> PredictionRegion {
    let sorted = sorted_ascending(scores);
    let value = order_statistic(&sorted, m);
    let closed = scores.iter().filter(|&&a| a <= value).count() >= m;
    PredictionRegion::RightRay {
        lower: Endpoint { value, closed },
    }
}

/// `{y : #{i : |y - centre| <= radius_i} >= m}`.
fn symmetric_interval(centre: f64, radii: &[f64], m: usize) -> PredictionRegion {
    let sorted = sorted_ascending(radii);
    let h = order_statistic(&sorted, radii.len() + 1 - m);
    let lower = centre - h;
    let upper = centre + h;
    let closed = |e: f64| radii.iter().filter(|&&r| (e - centre).abs() <= r).count() >= m;
    PredictionRegion::Bounded {
        lower: Endpoint {
            value: lower,
            closed: closed(lower),
        },
        upper: Endpoint {
            value: upper,
            closed: closed(upper),
        },
    }
}

fn one_sided_usage(shape: Shape, ranks: &RankConstants) -> Vec<RankUsage> {
    match shape {
        Shape::Upper => vec![RankUsage {
            side: Side::Upper,
            used: ranks.n + 1 - ranks.m,
            nominal: ranks.r1,
            nominal_name: "r1",
        }],
        Shape::Lower => vec![RankUsage {
            side: Side::Lower,
            used: ranks.m,
            nominal: ranks.r2,
            nominal_name: "r2",
        }],
        Shape::Bounded => unreachable!("bounded usage is built by the caller"),
    }
}

/// Left ray `(-inf, a_(n+1-m)]` for the measure with `beta2 = 0`,
/// `beta1 = 1`, `gamma = -1` and any `eta > -1`.
pub fn exact_upper_interval(sample: &Sample, features_new: &[f64], alpha: f64) -> Result<ExactInterval> {
    let ranks = rank_constants(sample.len(), alpha)?;
    let a = shift_scores(sample, features_new)?;
    if ranks.trivial {
        return Ok(ExactInterval::new(Shape::Upper, PredictionRegion::FullLine, ranks));
    }
    Ok(ExactInterval::new(Shape::Upper, left_ray(a.as_slice(), ranks.m), ranks)
        .with_usage(one_sided_usage(Shape::Upper, &ranks)))
}

/// Right ray `[a_(m), inf)` for the measure with `beta2 = 0`, `beta1 = -1`,
/// `gamma = 1` and any `eta > -1`.
pub fn exact_lower_interval(sample: &Sample, features_new: &[f64], alpha: f64) -> Result<ExactInterval> {
    let ranks = rank_constants(sample.len(), alpha)?;
    let a = shift_scores(sample, features_new)?;
    if ranks.trivial {
        return Ok(ExactInterval::new(Shape::Lower, PredictionRegion::FullLine, ranks));
    }
    Ok(ExactInterval::new(Shape::Lower, right_ray(a.as_slice(), ranks.m), ranks)
        .with_usage(one_sided_usage(Shape::Lower, &ranks)))
}

/// Per-point quantities of the bounded construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundedScores {
    /// `c_i = y_i + sum_j (x_{new,j} - x_ij)`
    pub c: Vec<f64>,
    /// `d_i = y_i^2 + sum_j (x_{new,j} - x_ij)`
    pub d: Vec<f64>,
    /// `s_i = sqrt(eta^2/4 + eta c_i + d_i)`
    pub s: Vec<f64>,
    /// `a_i = -s_i - eta/2`
    pub a: Vec<f64>,
    /// `b_i = s_i - eta/2`
    pub b: Vec<f64>,
}

fn c_and_d(sample: &Sample, features_new: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let shifts = feature_shifts(sample, features_new)?;
    Ok(shifts
        .iter()
        .zip(sample.points())
        .map(|(shift, p)| (p.response + shift, p.response * p.response + shift))
        .unzip())
}

/// Smallest admissible eta: `max_i 2 (sqrt(max(0, c_i^2 - d_i)) - c_i)`.
pub fn eta_minimum_from(c: &[f64], d: &[f64]) -> f64 {
    c.iter()
        .zip(d)
        .map(|(&c, &d)| 2.0 * ((c * c - d).max(0.0).sqrt() - c))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `max_i 2 (sqrt(max(0, c_i^2 - d_i) + 1) - c_i)`, which keeps every
/// radicand at least 1.
pub fn default_eta_from(c: &[f64], d: &[f64]) -> f64 {
    c.iter()
        .zip(d)
        .map(|(&c, &d)| 2.0 * (((c * c - d).max(0.0) + 1.0).sqrt() - c))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn eta_minimum(sample: &Sample, features_new: &[f64]) -> Result<f64> {
    let (c, d) = c_and_d(sample, features_new)?;
    Ok(eta_minimum_from(&c, &d))
}

pub fn default_eta(sample: &Sample, features_new: &[f64]) -> Result<f64> {
    let (c, d) = c_and_d(sample, features_new)?;
    Ok(default_eta_from(&c, &d))
}

pub fn bounded_scores(sample: &Sample, features_new: &[f64], eta: f64) -> Result<BoundedScores> {
    let (c, d) = c_and_d(sample, features_new)?;
    let minimum = eta_minimum_from(&c, &d);
    if !eta.is_finite() || eta < minimum {
        return Err(ConformalError::EtaBelowBound { eta, minimum });
    }
    // Admissible eta keeps the radicand non-negative up to rounding.
    let s: Vec<f64> = c
        .iter()
        .zip(&d)
        .map(|(&c, &d)| (0.25 * eta * eta + eta * c + d).max(0.0).sqrt())
        .collect();
    let a = s.iter().map(|s| -s - 0.5 * eta).collect();
    let b = s.iter().map(|s| s - 0.5 * eta).collect();
    Ok(BoundedScores { c, d, s, a, b })
}

/// Bounded interval centred at `-eta/2` for the measure with `beta2 = 1`,
/// `beta1 = 0`, `gamma = -1`.
///
/// Each comparison holds on `[a_i, b_i]`, and all of these share the
/// centre, so the region is `|y + eta/2| <= s_(n+1-m)`.
pub fn exact_bounded_interval(
    sample: &Sample,
    features_new: &[f64],
    alpha: f64,
    eta: f64,
) -> Result<ExactInterval> {
    let ranks = rank_constants(sample.len(), alpha)?;
    let scores = bounded_scores(sample, features_new, eta)?;
    let centre = -0.5 * eta;
    let mut out = if ranks.trivial {
        ExactInterval::new(Shape::Bounded, PredictionRegion::FullLine, ranks)
    } else {
        ExactInterval::new(Shape::Bounded, symmetric_interval(centre, &scores.s, ranks.m), ranks).with_usage(vec![
            RankUsage {
                side: Side::Lower,
                used: ranks.m,
                nominal: ranks.r1,
                nominal_name: "r1",
            },
            RankUsage {
                side: Side::Upper,
                used: ranks.n + 1 - ranks.m,
                nominal: ranks.r3,
                nominal_name: "r3",
            },
        ])
    };
    out.eta = Some(eta);
    out.centre = Some(centre);
    Ok(out)
}

/// Supervised dispatcher; `eta` defaults to [`default_eta`] for the
/// bounded shape and is ignored by the rays.
pub fn exact_supervised_interval(
    sample: &Sample,
    features_new: &[f64],
    alpha: f64,
    shape: Shape,
    eta: Option<f64>,
) -> Result<ExactInterval> {
    match shape {
        Shape::Upper => exact_upper_interval(sample, features_new, alpha),
        Shape::Lower => exact_lower_interval(sample, features_new, alpha),
        Shape::Bounded => {
            let eta = match eta {
                Some(eta) => eta,
                None => default_eta(sample, features_new)?,
            };
            exact_bounded_interval(sample, features_new, alpha, eta)
        }
    }
}

/// Closed forms for `M(B, x) = lambda x^2 + theta x + kappa sum(B)`.
///
/// The rays are the classical order-statistic prediction intervals. The
/// bounded shape uses per-point intervals
/// `[min(x_i, kappa - x_i), max(x_i, kappa - x_i)]`, all centred at
/// `kappa / 2`.
pub fn exact_unsupervised_interval(
    values: &[f64],
    alpha: f64,
    shape: Shape,
    kappa: Option<f64>,
) -> Result<ExactInterval> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ConformalError::NonFiniteInput("unsupervised data"));
    }
    let ranks = rank_constants(values.len(), alpha)?;
    let kappa = match shape {
        Shape::Bounded => match kappa {
            Some(k) if k != 0.0 && k.is_finite() => Some(k),
            _ => return Err(ConformalError::ZeroKappa),
        },
        _ => None,
    };
    let mut out = if ranks.trivial {
        ExactInterval::new(shape, PredictionRegion::FullLine, ranks)
    } else {
        match shape {
            Shape::Upper => ExactInterval::new(shape, left_ray(values, ranks.m), ranks)
                .with_usage(one_sided_usage(shape, &ranks)),
            Shape::Lower => ExactInterval::new(shape, right_ray(values, ranks.m), ranks)
                .with_usage(one_sided_usage(shape, &ranks)),
            Shape::Bounded => {
                let centre = 0.5 * kappa.expect("checked above");
                let radii: Vec<f64> = values.iter().map(|x| (x - centre).abs()).collect();
                let mut out = ExactInterval::new(shape, symmetric_interval(centre, &radii, ranks.m), ranks)
                    .with_usage(vec![
                        RankUsage {
                            side: Side::Lower,
                            used: ranks.m,
                            nominal: ranks.r1,
                            nominal_name: "r1",
                        },
                        RankUsage {
                            side: Side::Upper,
                            used: ranks.n + 1 - ranks.m,
                            nominal: ranks.r2,
                            nominal_name: "r2",
                        },
                    ]);
                out.notes.push(
                    "per-point intervals are [min(x_i, kappa - x_i), max(x_i, kappa - x_i)]; \
                     endpoints of the form -(kappa + x_i) do not reproduce the score comparison"
                        .into(),
                );
                out
            }
        }
    };
    out.kappa = kappa;
    if let Some(k) = kappa {
        out.centre = Some(0.5 * k);
    }
    Ok(out)
}
