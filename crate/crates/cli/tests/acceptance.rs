//! Acceptance criteria. Runs without the libtest harness and prints one
//! `PASS` or `FAIL` line per criterion; exits non-zero if any fails.

use std::path::Path;
use std::time::Instant;

use conformal_cli::commands::load_simulation_config;
use conformal_exact::baseline::{ols_fit, t_cdf, t_quantile};
use conformal_exact::engine::Task;
use conformal_exact::exact::{default_eta, exact_supervised_interval, exact_unsupervised_interval};
use conformal_exact::measures::catalog::{ce1_supervised, ce2_supervised, ce4_supervised};
use conformal_exact::measures::{
    polynomial_supervised, polynomial_unsupervised, PolynomialSupervisedParams, PolynomialUnsupervisedParams,
};
use conformal_exact::oracle::{compare_regions, task_region_widening};
use conformal_exact::questions::{run_suite, SuiteConfig};
use conformal_exact::sim::{self, generate, Family, GeneratorId, GeneratorSpec, SimulationReport};
use conformal_exact::types::{scaled_floor, scaled_is_integer};
use conformal_exact::{
    plausibility, rank_constants, region_oracle, threshold, trivial_region_guard, CandidatePoint, LabeledPoint,
    PredictionRegion, Sample, ScanSpec, Shape,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn simulate(config: &str) -> SimulationReport {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(config);
    let (config, _) = load_simulation_config(&path).expect("bundled config");
    sim::run(&config).expect("simulation runs")
}

fn coverage(report: &SimulationReport, family: Family, shape: Shape) -> (f64, f64) {
    let r = report.result(family, shape).expect("method present");
    (r.coverage, r.monte_carlo_se)
}

/// Checks `observed` against `(value, tolerance)` and notes a miss.
fn near(label: &str, observed: f64, target: f64, tolerance: f64, misses: &mut Vec<String>) -> String {
    if (observed - target).abs() > tolerance {
        misses.push(format!("{label} {observed:.4} vs {target:.4}"));
    }
    format!("{label} {observed:.4}")
}

fn coverage_table(report: &SimulationReport, lm: [f64; 3], conformal: [f64; 3]) -> Outcome {
    let mut misses = Vec::new();
    let mut shown = Vec::new();
    for (family, targets) in [(Family::Lm, lm), (Family::Conformal, conformal)] {
        for (shape, target) in Shape::ALL.into_iter().zip(targets) {
            let (c, _) = coverage(report, family, shape);
            let label = format!("{family:?}-{}", shape.as_str()).to_lowercase();
            shown.push(near(&label, c, target, 0.02, &mut misses));
            if family == Family::Conformal && c < 0.89 {
                misses.push(format!("{label} below 0.89"));
            }
        }
    }
    let detail = if misses.is_empty() {
        shown.join(", ")
    } else {
        format!("{}; misses: {}", shown.join(", "), misses.join("; "))
    };
    outcome(misses.is_empty(), detail)
}

fn criterion_2(report: &SimulationReport) -> Outcome {
    let mut misses = Vec::new();
    let mut shown = Vec::new();
    for (shape, target) in [(Shape::Upper, 0.8750), (Shape::Lower, 0.8742)] {
        let (c, se) = coverage(report, Family::Lm, shape);
        let label = format!("lm-{}", shape.as_str());
        shown.push(near(&label, c, target, 0.02, &mut misses));
        if c >= 0.9 - 3.0 * se {
            misses.push(format!("{label} not below 0.9 - 3 SE = {:.4}", 0.9 - 3.0 * se));
        }
    }
    for (shape, target) in Shape::ALL.into_iter().zip([0.9052, 0.9034, 0.9150]) {
        let (c, _) = coverage(report, Family::Conformal, shape);
        let label = format!("conformal-{}", shape.as_str());
        shown.push(near(&label, c, target, 0.02, &mut misses));
        if c < 0.89 {
            misses.push(format!("{label} below 0.89"));
        }
    }
    let detail = if misses.is_empty() {
        shown.join(", ")
    } else {
        format!("{}; misses: {}", shown.join(", "), misses.join("; "))
    };
    outcome(misses.is_empty(), detail)
}

fn criterion_3(a: &SimulationReport, b: &SimulationReport) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, report, conformal_target, lm_target) in [("A", a, 1.1922, 0.1187), ("B", b, 1.1015, 0.1987)] {
        let conformal = report.result(Family::Conformal, Shape::Bounded).unwrap();
        let ratio = conformal.length_ratio_full.unwrap();
        let ok = (ratio - conformal_target).abs() <= 0.2;
        passed &= ok;
        let lm = report.result(Family::Lm, Shape::Bounded).unwrap();
        let (full, half) = (lm.length_ratio_full.unwrap(), lm.length_ratio_half.unwrap());
        let hits: Vec<&str> = [("full", full), ("half", half)]
            .into_iter()
            .filter(|(_, r)| (r - lm_target).abs() <= 0.05)
            .map(|(l, _)| l)
            .collect();
        let flag = if hits.is_empty() { "neither".to_string() } else { hits.join("+") };
        parts.push(format!(
            "{name}: conformal {ratio:.4} vs {conformal_target} ({}); lm full {full:.4} half {half:.4} vs {lm_target}, within 0.05: {flag}",
            if ok { "ok" } else { "miss" }
        ));
    }
    outcome(passed, parts.join(" | "))
}

fn normal_sample(rng: &mut ChaCha8Rng, n: usize, p: usize) -> (Sample, Vec<f64>) {
    let unit = Normal::new(0.0, 1.0).unwrap();
    let noise = rng.random_range(0.2..3.0);
    let point = |rng: &mut ChaCha8Rng| {
        let x: Vec<f64> = (0..p).map(|_| unit.sample(rng)).collect();
        let y = x.iter().sum::<f64>() + noise * unit.sample(rng);
        LabeledPoint::new(x, y)
    };
    let points = (0..n).map(|_| point(rng)).collect();
    let x = point(rng).features;
    (Sample::new(points).unwrap(), x)
}

fn criterion_4() -> Outcome {
    const INSTANCES: usize = 200;
    const PROBES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    let mut checks = 0;
    let mut done = 0;
    while done < INSTANCES {
        let n = rng.random_range(10..=50);
        let p = rng.random_range(1..=3);
        let alpha = rng.random_range(0.15..0.45);
        if scaled_is_integer(n + 1, alpha) || scaled_floor(n + 1, alpha) < 2 {
            continue;
        }
        done += 1;
        let (sample, x) = normal_sample(&mut rng, n, p);
        let values = sample.responses();
        let eta = default_eta(&sample, &x).unwrap();
        let kappa = rng.random_range(0.5..4.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let supervised = Task::Supervised {
            sample: &sample,
            features_new: &x,
        };
        let unsupervised = Task::Unsupervised { values: &values };
        let mut cases = Vec::new();
        for (shape, params) in [
            (Shape::Upper, PolynomialSupervisedParams::upper()),
            (Shape::Lower, PolynomialSupervisedParams::lower()),
            (Shape::Bounded, PolynomialSupervisedParams::bounded(eta)),
        ] {
            let closed = exact_supervised_interval(&sample, &x, alpha, shape, Some(eta)).unwrap().region;
            cases.push((format!("supervised-{}", shape.as_str()), &supervised, polynomial_supervised(params), closed));
        }
        for (shape, params) in [
            (Shape::Upper, PolynomialUnsupervisedParams::upper()),
            (Shape::Lower, PolynomialUnsupervisedParams::lower()),
            (Shape::Bounded, PolynomialUnsupervisedParams::bounded(kappa)),
        ] {
            let closed = exact_unsupervised_interval(&values, alpha, shape, Some(kappa)).unwrap().region;
            cases.push((format!("unsupervised-{}", shape.as_str()), &unsupervised, polynomial_unsupervised(params), closed));
        }
        for (label, task, measure, closed) in cases {
            let mut anchors = values.clone();
            anchors.extend(closed.endpoints());
            let (oracle, scan) = task_region_widening(task, &measure, alpha, &ScanSpec::around(&anchors), 4).unwrap();
            let probes: Vec<f64> = (0..PROBES).map(|_| rng.random_range(scan.lower..scan.upper)).collect();
            let cmp = compare_regions(&closed, &oracle, &probes, |y| task.is_member(&measure, alpha, y)).unwrap();
            checks += 1;
            if let Some(e) = cmp.max_endpoint_error {
                worst = worst.max(e);
            }
            if !cmp.agrees(1e-6) {
                failures.push(format!("{label} n={n} p={p} alpha={alpha:.3}: {cmp:?}"));
            }
        }
    }
    let detail = format!(
        "{INSTANCES} instances, {checks} closed forms, {PROBES} probes each, max endpoint error {worst:.2e}, {} disagreements{}",
        failures.len(),
        failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
    );
    outcome(failures.is_empty(), detail)
}

fn criterion_5() -> Outcome {
    let suite = run_suite(&SuiteConfig::default()).expect("suite runs");
    let violations: u64 = suite.verdicts.iter().map(|v| v.failures).sum();
    let failed: Vec<&str> = suite.failed().map(|v| v.question.as_str()).collect();
    let passed = suite.verdicts.len() == 18 && suite.all_passed() && violations == 0;
    outcome(
        passed,
        format!(
            "{} verdicts at {} trials, {} failed {:?}, {violations} claim violations",
            suite.verdicts.len(),
            suite.config.trials,
            failed.len(),
            failed
        ),
    )
}

fn criterion_6() -> Outcome {
    const N: u64 = 5000;
    const POINTS: usize = 40;
    let measures = [ce1_supervised(), ce2_supervised(), ce4_supervised()];
    let mut worst = f64::NEG_INFINITY;
    let mut misses = Vec::new();
    for id in [GeneratorId::ExampleA, GeneratorId::ExampleB] {
        let spec = GeneratorSpec::new(id, POINTS, 6);
        let draws: Vec<(Sample, LabeledPoint)> = (0..N).map(|r| generate(&spec, r).unwrap()).collect();
        for measure in &measures {
            let counts: Vec<usize> = draws
                .iter()
                .map(|(sample, holdout)| {
                    let candidate = CandidatePoint::new(holdout.features.clone(), holdout.response);
                    plausibility(sample, &candidate, measure).unwrap().count
                })
                .collect();
            for alpha in [0.1, 0.25] {
                let n = POINTS - 1;
                let t = threshold(n, alpha).unwrap();
                let hits = counts.iter().filter(|&&c| c as f64 / (n + 1) as f64 <= t + 1e-12).count();
                let freq = hits as f64 / N as f64;
                let bound = alpha + 3.0 * (alpha * (1.0 - alpha) / N as f64).sqrt();
                worst = worst.max(freq - alpha);
                if freq > bound {
                    misses.push(format!("{id:?} {} alpha={alpha}: {freq:.4} > {bound:.4}", measure.label()));
                }
            }
        }
    }
    outcome(
        misses.is_empty(),
        format!("3 measures x 2 generators x 2 levels at N={N}, largest excess over alpha {worst:+.4}{}", if misses.is_empty() { String::new() } else { format!("; {}", misses.join("; ")) }),
    )
}

fn criterion_7() -> Outcome {
    let mut flag_errors = 0;
    let mut cases = 0;
    for n in 1..=60usize {
        for k in 1..=50usize {
            let alpha = k as f64 / 100.0;
            // Integer arithmetic: floor((n+1) k / 100).
            let trivial = (n + 1) * k / 100 <= 1;
            let ranks = rank_constants(n, alpha).unwrap();
            cases += 1;
            if ranks.trivial != trivial || trivial_region_guard(n, alpha).is_some() != trivial {
                flag_errors += 1;
            }
        }
    }
    // Spot cases from the flag's whole range: m = 0 and m = 1.
    let spots = [(10, 0.05), (3, 0.2), (5, 0.2), (5, 0.25), (15, 0.1)];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut spot_notes = Vec::new();
    let mut full = 0;
    for (n, alpha) in spots {
        let (sample, x) = normal_sample(&mut rng, n, 1);
        let measure = polynomial_supervised(PolynomialSupervisedParams::upper());
        let scan = ScanSpec::around(&sample.responses()).with_window(-1e3, 1e3);
        let region = region_oracle(&sample, &x, &measure, alpha, &scan).unwrap();
        let m = scaled_floor(n + 1, alpha);
        if region == PredictionRegion::FullLine {
            full += 1;
        } else {
            spot_notes.push(format!("n={n} alpha={alpha} (m={m}) oracle gives {}", region.kind()));
        }
    }
    let passed = flag_errors == 0 && full == spots.len();
    let mut detail = format!(
        "trivial flag {}/{cases} correct; oracle full line on {full}/{} spot cases",
        cases - flag_errors,
        spots.len()
    );
    if !spot_notes.is_empty() {
        detail.push_str(&format!(
            "; {}: with m = 1 membership needs one sample comparison to hold, which bounds the region at the extreme order statistic",
            spot_notes.join(", ")
        ));
    }
    outcome(passed, detail)
}

fn criterion_8() -> Outcome {
    let mut worst_round_trip = 0.0_f64;
    for dof in [1.0, 2.0, 5.0, 10.0, 100.0, 1000.0] {
        for k in 1..=100 {
            let u = 0.005 * k as f64;
            let q = t_quantile(dof, u);
            worst_round_trip = worst_round_trip.max((t_cdf(dof, q) - (1.0 - u)).abs());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let unit = Normal::new(0.0, 1.0).unwrap();
    let mut worst_orthogonality = 0.0_f64;
    for _ in 0..100 {
        let n = rng.random_range(20..=200);
        let p = rng.random_range(1..=5);
        let beta: Vec<f64> = (0..=p).map(|_| rng.random_range(-5.0..5.0)).collect();
        let points: Vec<LabeledPoint> = (0..n)
            .map(|_| {
                let x: Vec<f64> = (0..p).map(|_| unit.sample(&mut rng)).collect();
                let y = beta[0] + x.iter().zip(&beta[1..]).map(|(a, b)| a * b).sum::<f64>() + unit.sample(&mut rng);
                LabeledPoint::new(x, y)
            })
            .collect();
        let sample = Sample::new(points).unwrap();
        let fit = ols_fit(&sample, true).unwrap();
        let mut gradient = vec![0.0; p + 1];
        let (mut design_norm, mut response_norm) = (n as f64, 0.0);
        for point in sample.points() {
            let r = point.response - fit.predict(&point.features).unwrap();
            gradient[0] += r;
            for (j, xj) in point.features.iter().enumerate() {
                gradient[j + 1] += xj * r;
                design_norm += xj * xj;
            }
            response_norm += point.response * point.response;
        }
        let scale = design_norm.sqrt() * response_norm.sqrt();
        let largest = gradient.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
        worst_orthogonality = worst_orthogonality.max(largest / scale);
    }
    outcome(
        worst_round_trip <= 1e-9 && worst_orthogonality <= 1e-8,
        format!("t round trip max error {worst_round_trip:.2e}; OLS |X^T r| / (|X| |y|) max {worst_orthogonality:.2e} over 100 designs"),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |id: u32, title: &str, run: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = run();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        println!("{verdict} criterion {id} ({title}, {:.1}s): {}", start.elapsed().as_secs_f64(), o.detail);
    };
    let start = Instant::now();
    let a = simulate("example_a.toml");
    let b = simulate("example_b.toml");
    println!("simulations for criteria 1-3 took {:.1}s", start.elapsed().as_secs_f64());
    report(1, "example A coverage", &|| coverage_table(&a, [0.9038, 0.9052, 0.9050], [0.9062, 0.9034, 0.9080]));
    report(2, "example B coverage", &|| criterion_2(&b));
    report(3, "length ratios", &|| criterion_3(&a, &b));
    report(4, "closed forms vs oracle", &criterion_4);
    report(5, "counterexample suite", &criterion_5);
    report(6, "validity of the plausibility threshold", &criterion_6);
    report(7, "trivial-region guard", &criterion_7);
    report(8, "baseline numerics", &criterion_8);
    println!("{failed} of 8 criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
