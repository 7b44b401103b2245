//! Data-generating models `Y = X1 + X2 + eps` with `X1 ~ N(0, 2)`,
//! `X2 ~ N(0, 1)` and either normal or uniform noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as NormalDist};

use crate::error::{ConformalError, Result};
use crate::types::{check_alpha, LabeledPoint, Sample};

/// Half-width of the uniform noise in example B.
pub const UNIFORM_HALF_WIDTH: f64 = 0.6;
/// `Var(X1) + Var(X2)`.
pub const FEATURE_VARIANCE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorId {
    /// Normal noise.
    ExampleA,
    /// `U(-0.6, 0.6)` noise.
    ExampleB,
}

/// How the normal noise of example A is parameterised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseReading {
    /// `Var(eps) = 0.2`.
    #[default]
    Variance,
    /// `Var(eps) = sqrt(0.2)`, reading the second argument of `N(0, sqrt(0.2))`
    /// as a variance.
    RootVariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub id: GeneratorId,
    /// Points per replication, holdout included.
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseReading,
}

impl GeneratorSpec {
    pub fn new(id: GeneratorId, n: usize, seed: u64) -> Self {
        Self {
            id,
            n,
            seed,
            noise: NoiseReading::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(ConformalError::InvalidConfig(format!(
                "generator needs n >= 2 points, got {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn noise_variance(&self) -> f64 {
        match (self.id, self.noise) {
            (GeneratorId::ExampleA, NoiseReading::Variance) => 0.2,
            (GeneratorId::ExampleA, NoiseReading::RootVariance) => 0.2_f64.sqrt(),
            (GeneratorId::ExampleB, _) => UNIFORM_HALF_WIDTH * UNIFORM_HALF_WIDTH / 3.0,
        }
    }

    /// Stream for one replication: the ChaCha stream id is the replication
    /// index, so replications are independent of execution order.
    pub fn rng(&self, replication: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replication);
        rng
    }

    /// One labelled draw.
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> LabeledPoint {
        let x1 = Normal::new(0.0, 2.0_f64.sqrt()).expect("valid sd").sample(rng);
        let x2 = Normal::new(0.0, 1.0).expect("valid sd").sample(rng);
        let eps = match self.id {
            GeneratorId::ExampleA => Normal::new(0.0, self.noise_variance().sqrt())
                .expect("valid sd")
                .sample(rng),
            GeneratorId::ExampleB => Uniform::new(-UNIFORM_HALF_WIDTH, UNIFORM_HALF_WIDTH)
                .expect("valid range")
                .sample(rng),
        };
        LabeledPoint::new(vec![x1, x2], x1 + x2 + eps)
    }
}

/// `n - 1` training points plus the final draw as holdout.
pub fn generate(spec: &GeneratorSpec, replication: u64) -> Result<(Sample, LabeledPoint)> {
    spec.validate()?;
    let mut rng = spec.rng(replication);
    let mut points: Vec<LabeledPoint> = (0..spec.n).map(|_| spec.draw(&mut rng)).collect();
    let holdout = points.pop().expect("n >= 2");
    Ok((Sample::new(points)?, holdout))
}

fn standard_normal() -> NormalDist {
    NormalDist::new(0.0, 1.0).expect("unit normal")
}

/// CDF of `N(0, 3) + U(-0.6, 0.6)` by composite Simpson integration over
/// the uniform component.
pub fn example_b_response_cdf(y: f64) -> f64 {
    const PANELS: usize = 400;
    let phi = standard_normal();
    let sd = FEATURE_VARIANCE.sqrt();
    let (a, b) = (-UNIFORM_HALF_WIDTH, UNIFORM_HALF_WIDTH);
    let h = (b - a) / PANELS as f64;
    let f = |u: f64| phi.cdf((y - u) / sd);
    let mut total = f(a) + f(b);
    for k in 1..PANELS {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        total += weight * f(a + h * k as f64);
    }
    total * h / 3.0 / (b - a)
}

/// Length `q_{1-alpha/2} - q_{alpha/2}` of the central interval of the
/// marginal distribution of `Y`.
pub fn oracle_interval_length(spec: &GeneratorSpec, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let upper_prob = 1.0 - 0.5 * alpha;
    Ok(match spec.id {
        GeneratorId::ExampleA => {
            let sd = (FEATURE_VARIANCE + spec.noise_variance()).sqrt();
            2.0 * standard_normal().inverse_cdf(upper_prob) * sd
        }
        GeneratorId::ExampleB => {
            // Symmetric about zero, so only the upper quantile is needed.
            let (mut lo, mut hi) = (0.0, 1.0);
            while example_b_response_cdf(hi) < upper_prob {
                hi *= 2.0;
            }
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                if example_b_response_cdf(mid) < upper_prob {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo + hi
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::t_quantile;

    #[test]
    fn replication_is_deterministic() {
        let spec = GeneratorSpec::new(GeneratorId::ExampleA, 20, 7);
        let (a, ha) = generate(&spec, 3).unwrap();
        let (b, hb) = generate(&spec, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(ha, hb);
        let (c, _) = generate(&spec, 4).unwrap();
        assert_ne!(a, c);
        assert_eq!(a.len(), 19);
    }

    fn pooled_variance(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
        (var, ((m4 - var * var) / n).sqrt())
    }

    #[test]
    fn example_a_marginal_variances() {
        let spec = GeneratorSpec::new(GeneratorId::ExampleA, 1000, 11);
        let mut x1 = Vec::new();
        let mut eps = Vec::new();
        for rep in 0..100 {
            let mut rng = spec.rng(rep);
            for _ in 0..1000 {
                let p = spec.draw(&mut rng);
                eps.push(p.response - p.features[0] - p.features[1]);
                x1.push(p.features[0]);
            }
        }
        let (v, se) = pooled_variance(&x1);
        assert!((v - 2.0).abs() < 3.0 * se, "{v} {se}");
        let (v, se) = pooled_variance(&eps);
        assert!((v - 0.2).abs() < 3.0 * se, "{v} {se}");
    }

    #[test]
    fn example_a_oracle_length() {
        let spec = GeneratorSpec::new(GeneratorId::ExampleA, 10, 0);
        let len = oracle_interval_length(&spec, 0.1).unwrap();
        let z = 1.6448536269514722;
        assert!((len - 2.0 * z * 3.2_f64.sqrt()).abs() < 1e-9);
        // The normal quantile agrees with the large-dof Student-t quantile.
        assert!((t_quantile(1e6, 0.05) - z).abs() < 1e-3);
        assert!((len - 5.8848).abs() < 1e-3);
    }

    /// `int Phi = t Phi(t) + phi(t)` gives the convolution CDF in closed form.
    fn closed_form_cdf(y: f64) -> f64 {
        let n = standard_normal();
        let sd = 3.0_f64.sqrt();
        let g = |t: f64| t * n.cdf(t) + (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        sd / 1.2 * (g((y + 0.6) / sd) - g((y - 0.6) / sd))
    }

    #[test]
    fn example_b_cdf_matches_closed_form() {
        for y in [-4.0, -1.3, 0.0, 0.7, 2.9] {
            assert!((example_b_response_cdf(y) - closed_form_cdf(y)).abs() < 1e-10);
        }
        assert!((example_b_response_cdf(0.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn example_b_oracle_matches_monte_carlo() {
        let spec = GeneratorSpec::new(GeneratorId::ExampleB, 10, 0);
        let len = oracle_interval_length(&spec, 0.1).unwrap();
        let q = 0.5 * len;
        assert!((closed_form_cdf(q) - 0.95).abs() < 1e-9);
        // Empirical exceedance frequency of the upper quantile.
        let draws = 10_000_000u64;
        let mut rng = spec.rng(0);
        let above = (0..draws).filter(|_| spec.draw(&mut rng).response > q).count() as f64;
        let freq = above / draws as f64;
        let se = (0.05 * 0.95 / draws as f64).sqrt();
        assert!((freq - 0.05).abs() < 3.0 * se, "{freq}");
    }
}
