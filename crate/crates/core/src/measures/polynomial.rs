use serde::{Deserialize, Serialize};

use crate::measure::{MeasureParams, MeasureSpec};

/// Coefficients of the supervised quadratic measure
///
/// ```text
/// M(B, z) = beta2 y^2 + beta1 y + gamma [ sum_j x_j + eta sum_{i in B} (y_i - sum_j x_ij) ]
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolynomialSupervisedParams {
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
    pub eta: f64,
}

impl PolynomialSupervisedParams {
    /// Produces the left ray `(-inf, a_(k)]` for any `eta > -1`.
    pub fn upper() -> Self {
        Self {
            beta1: 1.0,
            beta2: 0.0,
            gamma: -1.0,
            eta: 0.0,
        }
    }

    /// Produces the right ray `[a_(k), inf)` for any `eta > -1`.
    ///
    /// With `1 + eta < 0` the two sign flips cancel and the measure orders
    /// points exactly like [`Self::upper`] does.
    pub fn lower() -> Self {
        Self {
            beta1: -1.0,
            beta2: 0.0,
            gamma: 1.0,
            eta: 0.0,
        }
    }

    /// Produces a bounded interval centred at `-eta / 2`.
    pub fn bounded(eta: f64) -> Self {
        Self {
            beta1: 0.0,
            beta2: 1.0,
            gamma: -1.0,
            eta,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.beta1, self.beta2, self.gamma, self.eta]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Coefficients of `M(B, x) = lambda x^2 + theta x + kappa sum_{x_j in B} x_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolynomialUnsupervisedParams {
    pub lambda: f64,
    pub theta: f64,
    pub kappa: f64,
}

impl PolynomialUnsupervisedParams {
    pub fn upper() -> Self {
        Self {
            lambda: 0.0,
            theta: 1.0,
            kappa: -1.0,
        }
    }

    pub fn lower() -> Self {
        Self {
            lambda: 0.0,
            theta: -1.0,
            kappa: 1.0,
        }
    }

    pub fn bounded(kappa: f64) -> Self {
        Self {
            lambda: 1.0,
            theta: 0.0,
            kappa,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.lambda, self.theta, self.kappa]
            .iter()
            .all(|v| v.is_finite())
    }
}

pub fn polynomial_supervised(params: PolynomialSupervisedParams) -> MeasureSpec {
    let PolynomialSupervisedParams {
        beta1,
        beta2,
        gamma,
        eta,
    } = params;
    MeasureSpec::supervised("poly-sup", move |bag, z| {
        let y = z.response;
        let residual_sum: f64 = bag.iter().map(|p| p.response - p.feature_sum()).sum();
        Ok((beta2 * y * y + beta1 * y) + gamma * (z.feature_sum() + eta * residual_sum))
    })
    .with_params(MeasureParams::Supervised(params))
}

pub fn polynomial_unsupervised(params: PolynomialUnsupervisedParams) -> MeasureSpec {
    let PolynomialUnsupervisedParams {
        lambda,
        theta,
        kappa,
    } = params;
    MeasureSpec::unsupervised("poly-unsup", move |bag, x| {
        let total: f64 = bag.iter().sum();
        Ok(lambda * x * x + theta * x + kappa * total)
    })
    .with_params(MeasureParams::Unsupervised(params))
}
