//! Least-squares linear model and its Student-t prediction intervals.

use nalgebra::{DMatrix, DVector};
use statrs::function::beta::beta_reg;

use crate::error::{ConformalError, Result};
use crate::exact::Shape;
use crate::region::{Endpoint, PredictionRegion};
use crate::types::{check_alpha, Sample};

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// Intercept first when fitted with one.
    pub coefficients: DVector<f64>,
    /// Residual standard error, `sqrt(RSS / dof)`.
    pub sigma_hat: f64,
    /// `(X^T X)^{-1}`
    pub gram_inverse: DMatrix<f64>,
    pub dof: usize,
    pub intercept: bool,
}

/// `n x (p + 1)` design with a leading column of ones, or `n x p` without.
pub fn design_matrix(sample: &Sample, intercept: bool) -> DMatrix<f64> {
    let offset = usize::from(intercept);
    let cols = sample.dim() + offset;
    DMatrix::from_fn(sample.len(), cols, |i, j| {
        if intercept && j == 0 {
            1.0
        } else {
            sample.points()[i].features[j - offset]
        }
    })
}

pub fn ols_fit(sample: &Sample, intercept: bool) -> Result<OlsFit> {
    let x = design_matrix(sample, intercept);
    let (n, k) = x.shape();
    if k == 0 || n <= k {
        return Err(ConformalError::TooFewObservations {
            observations: n,
            parameters: k,
        });
    }
    let y = DVector::from_vec(sample.responses());
    let qr = x.clone().qr();
    let r = qr.r();
    let largest = r.diagonal().iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let cutoff = largest * n as f64 * f64::EPSILON;
    if largest == 0.0 || r.diagonal().iter().any(|v| v.abs() <= cutoff) {
        return Err(ConformalError::RankDeficient);
    }
    let qty = qr.q().transpose() * &y;
    let coefficients = r.solve_upper_triangular(&qty).ok_or(ConformalError::RankDeficient)?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(ConformalError::RankDeficient)?;
    let gram_inverse = &r_inv * r_inv.transpose();
    let residuals = &y - &x * &coefficients;
    let dof = n - k;
    let sigma_hat = (residuals.norm_squared() / dof as f64).sqrt();
    Ok(OlsFit {
        coefficients,
        sigma_hat,
        gram_inverse,
        dof,
        intercept,
    })
}

impl OlsFit {
    fn row(&self, features: &[f64]) -> Result<DVector<f64>> {
        let expected = self.coefficients.len() - usize::from(self.intercept);
        if features.len() != expected {
            return Err(ConformalError::DimensionMismatch {
                expected,
                found: features.len(),
            });
        }
        Ok(DVector::from_iterator(
            self.coefficients.len(),
            self.intercept.then_some(1.0).into_iter().chain(features.iter().copied()),
        ))
    }

    pub fn predict(&self, features: &[f64]) -> Result<f64> {
        Ok(self.row(features)?.dot(&self.coefficients))
    }

    /// `sigma_hat * sqrt(1 + x^T (X^T X)^{-1} x)`
    pub fn prediction_scale(&self, features: &[f64]) -> Result<f64> {
        let row = self.row(features)?;
        let leverage = row.dot(&(&self.gram_inverse * &row));
        Ok(self.sigma_hat * (1.0 + leverage).sqrt())
    }
}

/// `P(T <= t)` for Student-t with `dof` degrees of freedom.
pub fn t_cdf(dof: f64, t: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = 0.5 * beta_reg(0.5 * dof, 0.5, dof / (dof + t * t));
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Upper-tail quantile: `q` with `P(T > q) = upper_tail`.
///
/// Bisection on the CDF; the bracket is grown by doubling, then halved
/// until its width is below `1e-12` relative to `max(1, |q|)`.
pub fn t_quantile(dof: f64, upper_tail: f64) -> f64 {
    assert!(dof > 0.0, "degrees of freedom must be positive");
    assert!(upper_tail > 0.0 && upper_tail < 1.0, "tail probability must lie in (0, 1)");
    if upper_tail == 0.5 {
        return 0.0;
    }
    if upper_tail > 0.5 {
        return -t_quantile(dof, 1.0 - upper_tail);
    }
    let survival = |q: f64| 1.0 - t_cdf(dof, q);
    let mut hi = 1.0;
    while survival(hi) > upper_tail {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if survival(mid) > upper_tail {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Student-t prediction interval at `features`.
///
/// Bounded: `x^T b +- t(alpha/2) s sqrt(1 + x^T (X^T X)^{-1} x)`. The rays
/// keep one side with `t(alpha)`.
pub fn lm_interval(fit: &OlsFit, features: &[f64], alpha: f64, shape: Shape) -> Result<PredictionRegion> {
    check_alpha(alpha)?;
    let centre = fit.predict(features)?;
    let scale = fit.prediction_scale(features)?;
    let dof = fit.dof as f64;
    Ok(match shape {
        Shape::Upper => PredictionRegion::LeftRay {
            upper: Endpoint::closed(centre + t_quantile(dof, alpha) * scale),
        },
        Shape::Lower => PredictionRegion::RightRay {
            lower: Endpoint::closed(centre - t_quantile(dof, alpha) * scale),
        },
        Shape::Bounded => {
            let half = t_quantile(dof, 0.5 * alpha) * scale;
            PredictionRegion::Bounded {
                lower: Endpoint::closed(centre - half),
                upper: Endpoint::closed(centre + half),
            }
        }
    })
}
