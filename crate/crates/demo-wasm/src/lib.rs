//! Browser bindings: a plausibility curve with its exact interval, and a
//! small sequential coverage experiment. Datasets cross the boundary as flat
//! row-major feature arrays plus a response array.

use conformal_exact::baseline::{lm_interval, ols_fit};
use conformal_exact::exact::{default_eta, exact_supervised_interval};
use conformal_exact::measures::{polynomial_supervised, PolynomialSupervisedParams};
use conformal_exact::sim::{generate, Family, GeneratorId, GeneratorSpec, Method};
use conformal_exact::{plausibility, CandidatePoint, LabeledPoint, PredictionRegion, Sample, Shape};
use wasm_bindgen::prelude::*;

const MAX_REPLICATIONS: u32 = 20_000;

fn generator(example: &str) -> Result<GeneratorId, String> {
    match example {
        "a" | "A" => Ok(GeneratorId::ExampleA),
        "b" | "B" => Ok(GeneratorId::ExampleB),
        other => Err(format!("unknown example `{other}`")),
    }
}

fn sample_from(features: &[f64], responses: &[f64]) -> Result<Sample, String> {
    let n = responses.len();
    if n == 0 || !features.len().is_multiple_of(n) {
        return Err("features must hold p values per response".into());
    }
    let p = features.len() / n;
    let points = responses
        .iter()
        .enumerate()
        .map(|(i, &y)| LabeledPoint::new(features[i * p..(i + 1) * p].to_vec(), y))
        .collect();
    Sample::new(points).map_err(|e| e.to_string())
}

fn eta_or_default(sample: &Sample, x: &[f64], eta: f64) -> Result<f64, String> {
    if eta.is_nan() {
        default_eta(sample, x).map_err(|e| e.to_string())
    } else {
        Ok(eta)
    }
}

fn params(shape: Shape, eta: f64) -> PolynomialSupervisedParams {
    match shape {
        Shape::Upper => PolynomialSupervisedParams::upper(),
        Shape::Lower => PolynomialSupervisedParams::lower(),
        Shape::Bounded => PolynomialSupervisedParams::bounded(eta),
    }
}

/// `[lower, upper]` of a connected region, infinite on unbounded sides.
fn bounds(region: &PredictionRegion) -> Vec<f64> {
    match region {
        PredictionRegion::Empty => vec![f64::NAN, f64::NAN],
        PredictionRegion::FullLine => vec![f64::NEG_INFINITY, f64::INFINITY],
        PredictionRegion::LeftRay { upper } => vec![f64::NEG_INFINITY, upper.value],
        PredictionRegion::RightRay { lower } => vec![lower.value, f64::INFINITY],
        PredictionRegion::Bounded { lower, upper } => vec![lower.value, upper.value],
        PredictionRegion::Union { intervals } => {
            let lo = intervals.first().and_then(|i| i.lower).map_or(f64::NEG_INFINITY, |e| e.value);
            let hi = intervals.last().and_then(|i| i.upper).map_or(f64::INFINITY, |e| e.value);
            vec![lo, hi]
        }
    }
}

/// Flat `[x1, x2, y]` rows: `n - 1` training rows then the holdout.
pub fn draw(example: &str, n: usize, seed: u64) -> Result<Vec<f64>, String> {
    let spec = GeneratorSpec::new(generator(example)?, n, seed);
    let (sample, holdout) = generate(&spec, 0).map_err(|e| e.to_string())?;
    Ok(sample
        .points()
        .iter()
        .chain(std::iter::once(&holdout))
        .flat_map(|p| p.features.iter().copied().chain(std::iter::once(p.response)))
        .collect())
}

/// Plausibility of each candidate in `ys` under the polynomial measure.
pub fn curve(
    features: &[f64],
    responses: &[f64],
    x_new: &[f64],
    shape: Shape,
    eta: f64,
    ys: &[f64],
) -> Result<Vec<f64>, String> {
    let sample = sample_from(features, responses)?;
    let eta = eta_or_default(&sample, x_new, eta)?;
    let measure = polynomial_supervised(params(shape, eta));
    ys.iter()
        .map(|&y| {
            let candidate = CandidatePoint::new(x_new.to_vec(), y);
            plausibility(&sample, &candidate, &measure)
                .map(|pl| pl.value())
                .map_err(|e| e.to_string())
        })
        .collect()
}

/// `[lower, upper, eta, m]`.
pub fn interval(
    features: &[f64],
    responses: &[f64],
    x_new: &[f64],
    alpha: f64,
    shape: Shape,
    eta: f64,
) -> Result<Vec<f64>, String> {
    let sample = sample_from(features, responses)?;
    let eta = eta_or_default(&sample, x_new, eta)?;
    let exact = exact_supervised_interval(&sample, x_new, alpha, shape, Some(eta)).map_err(|e| e.to_string())?;
    let mut out = bounds(&exact.region);
    out.push(eta);
    out.push(exact.ranks.m as f64);
    Ok(out)
}

/// Coverage of the six methods in [`Method::all`] order, then the mean
/// bounded lengths (lm, conformal).
pub fn coverage(example: &str, n: usize, replications: u32, alpha: f64, seed: u64) -> Result<Vec<f64>, String> {
    if replications == 0 || replications > MAX_REPLICATIONS {
        return Err(format!("replications must be between 1 and {MAX_REPLICATIONS}"));
    }
    let spec = GeneratorSpec::new(generator(example)?, n, seed);
    let methods = Method::all();
    let mut covered = vec![0u32; methods.len()];
    let mut lengths = [0.0; 2];
    for rep in 0..replications as u64 {
        let (sample, holdout) = generate(&spec, rep).map_err(|e| e.to_string())?;
        let x = &holdout.features;
        let fit = ols_fit(&sample, true).map_err(|e| e.to_string())?;
        for (k, method) in methods.iter().enumerate() {
            let region = match method.family {
                Family::Lm => lm_interval(&fit, x, alpha, method.shape),
                Family::Conformal => exact_supervised_interval(&sample, x, alpha, method.shape, None).map(|e| e.region),
            }
            .map_err(|e| e.to_string())?;
            if region.contains(holdout.response) {
                covered[k] += 1;
            }
            if method.shape == Shape::Bounded {
                lengths[usize::from(method.family == Family::Conformal)] += region.length();
            }
        }
    }
    let total = replications as f64;
    let mut out: Vec<f64> = covered.iter().map(|&c| c as f64 / total).collect();
    out.extend(lengths.iter().map(|l| l / total));
    Ok(out)
}

fn shape(name: &str) -> Result<Shape, JsValue> {
    name.parse().map_err(|e: String| JsValue::from_str(&e))
}

fn js<T>(r: Result<T, String>) -> Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = drawSample)]
pub fn draw_sample(example: &str, n: usize, seed: u32) -> Result<Vec<f64>, JsValue> {
    js(draw(example, n, seed as u64))
}

/// Pass `NaN` for `eta` to use the data-driven default.
#[wasm_bindgen(js_name = plausibilityCurve)]
pub fn plausibility_curve(
    features: &[f64],
    responses: &[f64],
    x_new: &[f64],
    shape_name: &str,
    eta: f64,
    ys: &[f64],
) -> Result<Vec<f64>, JsValue> {
    js(curve(features, responses, x_new, shape(shape_name)?, eta, ys))
}

#[wasm_bindgen(js_name = exactInterval)]
pub fn exact_interval(
    features: &[f64],
    responses: &[f64],
    x_new: &[f64],
    alpha: f64,
    shape_name: &str,
    eta: f64,
) -> Result<Vec<f64>, JsValue> {
    js(interval(features, responses, x_new, alpha, shape(shape_name)?, eta))
}

#[wasm_bindgen(js_name = coverageExperiment)]
pub fn coverage_experiment(example: &str, n: usize, replications: u32, alpha: f64, seed: u32) -> Result<Vec<f64>, JsValue> {
    js(coverage(example, n, replications, alpha, seed as u64))
}
