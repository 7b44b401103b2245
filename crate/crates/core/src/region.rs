//! Subsets of the real line produced by the oracle and the closed forms.

use serde::{Deserialize, Serialize};

/// A finite interval endpoint and whether it belongs to the set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Endpoint {
    pub value: f64,
    pub closed: bool,
}

impl Endpoint {
    pub fn closed(value: f64) -> Self {
        Self {
            value,
            closed: true,
        }
    }

    pub fn open(value: f64) -> Self {
        Self {
            value,
            closed: false,
        }
    }
}

/// A connected piece of a region; `None` means unbounded on that side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: Option<Endpoint>,
    pub upper: Option<Endpoint>,
}

impl Interval {
    pub fn contains(&self, y: f64) -> bool {
        let above = match self.lower {
            None => true,
            Some(e) if e.closed => y >= e.value,
            Some(e) => y > e.value,
        };
        let below = match self.upper {
            None => true,
            Some(e) if e.closed => y <= e.value,
            Some(e) => y < e.value,
        };
        above && below
    }
}

/// A conformal prediction region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictionRegion {
    /// No candidate value is plausible enough.
    Empty,
    FullLine,
    /// `(-inf, upper)` or `(-inf, upper]`.
    LeftRay { upper: Endpoint },
    /// `(lower, inf)` or `[lower, inf)`.
    RightRay { lower: Endpoint },
    Bounded { lower: Endpoint, upper: Endpoint },
    /// Two or more disjoint pieces, sorted ascending.
    Union { intervals: Vec<Interval> },
}

impl PredictionRegion {
    /// Canonical region from sorted, pairwise disjoint pieces.
    pub fn from_intervals(mut intervals: Vec<Interval>) -> Self {
        match intervals.len() {
            0 => Self::Empty,
            1 => {
                let piece = intervals.pop().expect("one interval");
                match (piece.lower, piece.upper) {
                    (None, None) => Self::FullLine,
                    (None, Some(upper)) => Self::LeftRay { upper },
                    (Some(lower), None) => Self::RightRay { lower },
                    (Some(lower), Some(upper)) => Self::Bounded { lower, upper },
                }
            }
            _ => Self::Union { intervals },
        }
    }

    pub fn intervals(&self) -> Vec<Interval> {
        match self {
            Self::Empty => Vec::new(),
            Self::FullLine => vec![Interval {
                lower: None,
                upper: None,
            }],
            Self::LeftRay { upper } => vec![Interval {
                lower: None,
                upper: Some(*upper),
            }],
            Self::RightRay { lower } => vec![Interval {
                lower: Some(*lower),
                upper: None,
            }],
            Self::Bounded { lower, upper } => vec![Interval {
                lower: Some(*lower),
                upper: Some(*upper),
            }],
            Self::Union { intervals } => intervals.clone(),
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        match self {
            Self::Empty => false,
            Self::FullLine => true,
            Self::Union { intervals } => intervals.iter().any(|piece| piece.contains(y)),
            other => other.intervals()[0].contains(y),
        }
    }

    /// A ray or the whole line.
    pub fn is_one_sided(&self) -> bool {
        matches!(self, Self::LeftRay { .. } | Self::RightRay { .. })
    }

    /// Connected and non-empty.
    pub fn is_interval(&self) -> bool {
        !matches!(self, Self::Empty | Self::Union { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Empty => "empty",
            Self::FullLine => "full_line",
            Self::LeftRay { .. } => "left_ray",
            Self::RightRay { .. } => "right_ray",
            Self::Bounded { .. } => "bounded",
            Self::Union { .. } => "union",
        }
    }

    /// Lebesgue measure; infinite for anything unbounded.
    pub fn length(&self) -> f64 {
        self.intervals()
            .iter()
            .map(|piece| match (piece.lower, piece.upper) {
                (Some(l), Some(u)) => u.value - l.value,
                _ => f64::INFINITY,
            })
            .sum()
    }

    /// Finite endpoints in ascending order.
    pub fn endpoints(&self) -> Vec<f64> {
        self.intervals()
            .iter()
            .flat_map(|piece| {
                piece
                    .lower
                    .map(|e| e.value)
                    .into_iter()
                    .chain(piece.upper.map(|e| e.value))
            })
            .collect()
    }

    /// Largest endpoint distance when both regions share a topology
    /// (same number of pieces with the same bounded sides), else `None`.
    pub fn endpoint_discrepancy(&self, other: &Self) -> Option<f64> {
        let left = self.intervals();
        let right = other.intervals();
        if left.len() != right.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for (a, b) in left.iter().zip(&right) {
            for (ea, eb) in [(a.lower, b.lower), (a.upper, b.upper)] {
                match (ea, eb) {
                    (None, None) => {}
                    (Some(x), Some(y)) => worst = worst.max((x.value - y.value).abs()),
                    _ => return None,
                }
            }
        }
        Some(worst)
    }

    /// Whether every point of `self` lies in `other`, judged on endpoints.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intervals().iter().all(|piece| {
            other.intervals().iter().any(|outer| {
                let lower_ok = match (piece.lower, outer.lower) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(p), Some(o)) => p.value > o.value || (p.value == o.value && (o.closed || !p.closed)),
                };
                let upper_ok = match (piece.upper, outer.upper) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(p), Some(o)) => p.value < o.value || (p.value == o.value && (o.closed || !p.closed)),
                };
                lower_ok && upper_ok
            })
        })
    }
}
