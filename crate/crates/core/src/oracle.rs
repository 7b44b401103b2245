//! Brute-force region determination.
//!
//! The plausibility function is evaluated on a uniform grid over a finite
//! window; every membership change between neighbouring grid points is then
//! refined by bisection. The observed responses are added to the grid as
//! extra nodes, so a gap around data points is found however narrow it is.
//! Membership at the window edges is extended to
//! infinity after probing well beyond the window, and an edge whose status
//! changes further out is reported as [`ConformalError::WindowTooSmall`].

use serde::{Deserialize, Serialize};

use crate::engine::Task;
use crate::error::{ConformalError, Result};
use crate::measure::MeasureSpec;
use crate::region::{Endpoint, Interval, PredictionRegion};
use crate::types::{check_alpha, Sample};

/// Scan window, grid resolution and bisection tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub lower: f64,
    pub upper: f64,
    pub grid_points: usize,
    pub tolerance: f64,
}

/// Multiples of the window width probed beyond each edge.
const EDGE_PROBES: [f64; 4] = [0.5, 2.0, 8.0, 64.0];

impl ScanSpec {
    pub const DEFAULT_GRID_POINTS: usize = 4096;
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;

    /// `[min - 10 r, max + 10 r]` where `r` is the spread of `values`
    /// (1.0 when all values coincide).
    pub fn around(values: &[f64]) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
        let spread = if hi > lo { hi - lo } else { 1.0 };
        Self {
            lower: lo - 10.0 * spread,
            upper: hi + 10.0 * spread,
            grid_points: Self::DEFAULT_GRID_POINTS,
            tolerance: Self::DEFAULT_TOLERANCE,
        }
    }

    pub fn with_window(mut self, lower: f64, upper: f64) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn with_grid_points(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Same centre, width multiplied by `factor`.
    pub fn widened(&self, factor: f64) -> Self {
        let centre = 0.5 * (self.lower + self.upper);
        let half = 0.5 * (self.upper - self.lower) * factor;
        Self {
            lower: centre - half,
            upper: centre + half,
            ..*self
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(ConformalError::InvalidScan(format!(
                "window [{}, {}] must be finite and non-empty",
                self.lower, self.upper
            )));
        }
        if self.grid_points < 2 {
            return Err(ConformalError::InvalidScan("need at least two grid points".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(ConformalError::InvalidScan("tolerance must be positive".into()));
        }
        Ok(())
    }

    fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let step = self.width() / (self.grid_points - 1) as f64;
        (0..self.grid_points).map(move |k| {
            if k + 1 == self.grid_points {
                self.upper
            } else {
                self.lower + step * k as f64
            }
        })
    }
}

/// Region `{y : member(y)}` determined by grid scan plus bisection.
pub fn scan_region<F>(scan: &ScanSpec, member: F) -> Result<PredictionRegion>
where
    F: Fn(f64) -> Result<bool>,
{
    scan_region_anchored(scan, &[], member)
}

/// [`scan_region`] with `anchors` inside the window added to the grid.
pub fn scan_region_anchored<F>(scan: &ScanSpec, anchors: &[f64], member: F) -> Result<PredictionRegion>
where
    F: Fn(f64) -> Result<bool>,
{
    scan.validate()?;
    let mut ys: Vec<f64> = scan.grid().collect();
    ys.extend(anchors.iter().copied().filter(|a| *a > scan.lower && *a < scan.upper));
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let status = ys.iter().map(|&y| member(y)).collect::<Result<Vec<bool>>>()?;

    let last = ys.len() - 1;
    for k in EDGE_PROBES {
        let below = scan.lower - k * scan.width();
        if member(below)? != status[0] {
            return Err(ConformalError::WindowTooSmall { edge: scan.lower });
        }
        let above = scan.upper + k * scan.width();
        if member(above)? != status[last] {
            return Err(ConformalError::WindowTooSmall { edge: scan.upper });
        }
    }

    let refine = |outside: f64, inside: f64| -> Result<Endpoint> {
        let (mut out, mut inn) = (outside, inside);
        while (inn - out).abs() > scan.tolerance {
            let mid = 0.5 * (out + inn);
            if mid == out || mid == inn {
                break;
            }
            if member(mid)? {
                inn = mid;
            } else {
                out = mid;
            }
        }
        let value = 0.5 * (out + inn);
        Ok(Endpoint {
            value,
            closed: member(value)?,
        })
    };

    let mut intervals = Vec::new();
    let mut k = 0;
    while k <= last {
        if !status[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k < last && status[k + 1] {
            k += 1;
        }
        let end = k;
        let lower = if start == 0 {
            None
        } else {
            Some(refine(ys[start - 1], ys[start])?)
        };
        let upper = if end == last {
            None
        } else {
            Some(refine(ys[end + 1], ys[end])?)
        };
        intervals.push(Interval { lower, upper });
        k += 1;
    }
    Ok(PredictionRegion::from_intervals(intervals))
}

/// Oracle region `{y : pl(y) > alpha}` for any task.
pub fn task_region(task: &Task<'_>, measure: &MeasureSpec, alpha: f64, scan: &ScanSpec) -> Result<PredictionRegion> {
    check_alpha(alpha)?;
    task.validate()?;
    scan_region_anchored(scan, &task.responses(), |y| task.is_member(measure, alpha, y))
}

/// Like [`task_region`], but retries with a four times wider window each
/// time the region reaches an edge, up to `max_widenings` times.
pub fn task_region_widening(
    task: &Task<'_>,
    measure: &MeasureSpec,
    alpha: f64,
    scan: &ScanSpec,
    max_widenings: usize,
) -> Result<(PredictionRegion, ScanSpec)> {
    let mut current = *scan;
    let mut attempt = 0;
    loop {
        match task_region(task, measure, alpha, &current) {
            Err(ConformalError::WindowTooSmall { .. }) if attempt < max_widenings => {
                current = current.widened(4.0);
                attempt += 1;
            }
            other => return other.map(|region| (region, current)),
        }
    }
}

/// Supervised oracle region at `features_new`.
pub fn region_oracle(
    sample: &Sample,
    features_new: &[f64],
    measure: &MeasureSpec,
    alpha: f64,
    scan: &ScanSpec,
) -> Result<PredictionRegion> {
    task_region(
        &Task::Supervised {
            sample,
            features_new,
        },
        measure,
        alpha,
        scan,
    )
}

/// Unsupervised oracle region.
pub fn region_oracle_unsupervised(
    values: &[f64],
    measure: &MeasureSpec,
    alpha: f64,
    scan: &ScanSpec,
) -> Result<PredictionRegion> {
    task_region(&Task::Unsupervised { values }, measure, alpha, scan)
}

/// Closed-form region checked against the oracle region and against direct
/// membership evaluation at probe points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionComparison {
    pub same_shape: bool,
    /// `None` when the shapes differ.
    pub max_endpoint_error: Option<f64>,
    pub probes: usize,
    pub membership_disagreements: usize,
}

impl RegionComparison {
    pub fn agrees(&self, tolerance: f64) -> bool {
        self.same_shape
            && self.membership_disagreements == 0
            && self.max_endpoint_error.is_some_and(|e| e <= tolerance)
    }
}

pub fn compare_regions<F>(
    closed: &PredictionRegion,
    oracle: &PredictionRegion,
    probes: &[f64],
    member: F,
) -> Result<RegionComparison>
where
    F: Fn(f64) -> Result<bool>,
{
    let max_endpoint_error = closed.endpoint_discrepancy(oracle);
    let mut membership_disagreements = 0;
    for &y in probes {
        if closed.contains(y) != member(y)? {
            membership_disagreements += 1;
        }
    }
    Ok(RegionComparison {
        same_shape: max_endpoint_error.is_some(),
        max_endpoint_error,
        probes: probes.len(),
        membership_disagreements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::catalog::{ce2_supervised, ce4_supervised};
    use crate::measures::{polynomial_supervised, PolynomialSupervisedParams};
    use crate::types::LabeledPoint;

    fn line_sample(ys: &[f64]) -> Sample {
        Sample::new(ys.iter().map(|&y| LabeledPoint::new(vec![0.0], y)).collect()).unwrap()
    }

    #[test]
    fn scan_recovers_a_known_set() {
        let scan = ScanSpec::around(&[0.0, 1.0]).with_grid_points(257);
        let region = scan_region(&scan, |y| Ok((-1.0..=2.5).contains(&y))).unwrap();
        match region {
            PredictionRegion::Bounded { lower, upper } => {
                assert!((lower.value + 1.0).abs() < 1e-9);
                assert!((upper.value - 2.5).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_threshold_gives_full_line() {
        // n = 3, alpha = 0.2: floor(4 * 0.2) = 0, the self-comparison suffices.
        let sample = line_sample(&[0.3, -1.2, 2.0]);
        let measure = polynomial_supervised(PolynomialSupervisedParams::upper());
        let region = region_oracle(&sample, &[0.0], &measure, 0.2, &ScanSpec::around(&sample.responses())).unwrap();
        assert_eq!(region, PredictionRegion::FullLine);
    }

    #[test]
    fn unit_threshold_is_not_the_full_line() {
        // n = 5, alpha = 0.2: floor(6 * 0.2) = 1, so one sample comparison
        // must hold and the region stops at the largest shift score.
        let sample = line_sample(&[0.3, -1.2, 2.0, 0.7, 1.1]);
        let measure = polynomial_supervised(PolynomialSupervisedParams::upper());
        let region = region_oracle(&sample, &[0.0], &measure, 0.2, &ScanSpec::around(&sample.responses())).unwrap();
        let PredictionRegion::LeftRay { upper } = region else {
            panic!("{region:?}");
        };
        assert!((upper.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn two_rays_for_the_squared_bag_measure() {
        let ys = [0.9, -0.4, 1.7, 0.2, 0.55, -1.1, 2.3, 0.05, 1.35];
        let sample = line_sample(&ys);
        let scan = ScanSpec::around(&ys);
        let region = region_oracle(&sample, &[0.0], &ce4_supervised(), 0.25, &scan).unwrap();
        let PredictionRegion::Union { intervals } = &region else {
            panic!("{region:?}");
        };
        assert_eq!(intervals.len(), 2);
        assert!(intervals[0].lower.is_none() && intervals[1].upper.is_none());
        let gap = intervals[1].lower.unwrap().value - intervals[0].upper.unwrap().value;
        assert!(gap > 0.0);
    }

    #[test]
    fn ce2_region_is_a_left_ray_at_an_order_statistic() {
        let ys = [5.0, 1.0, 3.0, 9.0, 7.0, 2.0, 8.0, 4.0, 6.0];
        let sample = line_sample(&ys);
        let region = region_oracle(&sample, &[0.0], &ce2_supervised(), 0.25, &ScanSpec::around(&ys)).unwrap();
        let PredictionRegion::LeftRay { upper } = region else {
            panic!("{region:?}");
        };
        assert!((upper.value - 8.0).abs() < 1e-9);
    }

    #[test]
    fn oracle_is_deterministic() {
        let ys = [0.9, -0.4, 1.7, 0.2, 0.55, -1.1, 2.3, 0.05, 1.35];
        let sample = line_sample(&ys);
        let scan = ScanSpec::around(&ys);
        let a = region_oracle(&sample, &[0.0], &ce4_supervised(), 0.3, &scan).unwrap();
        let b = region_oracle(&sample, &[0.0], &ce4_supervised(), 0.3, &scan).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn anchors_reveal_a_narrow_gap() {
        let scan = ScanSpec::around(&[0.0, 1.0]).with_grid_points(16);
        let member = |y: f64| Ok((y - 0.3).abs() > 1e-4);
        assert_eq!(scan_region(&scan, member).unwrap(), PredictionRegion::FullLine);
        let region = scan_region_anchored(&scan, &[0.3], member).unwrap();
        assert_eq!(region.intervals().len(), 2);
    }

    #[test]
    fn window_edge_is_flagged() {
        let scan = ScanSpec::around(&[0.0, 1.0]);
        let err = scan_region(&scan, |y| Ok(y < 100.0)).unwrap_err();
        assert!(matches!(err, ConformalError::WindowTooSmall { .. }));
    }

    #[test]
    fn invalid_scan_rejected() {
        let scan = ScanSpec::around(&[0.0]).with_grid_points(1);
        assert!(matches!(scan_region(&scan, |_| Ok(true)), Err(ConformalError::InvalidScan(_))));
    }
}
