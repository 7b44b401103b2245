use std::path::Path;

use conformal_exact::engine::Task;
use conformal_exact::exact::{default_eta, exact_supervised_interval, exact_unsupervised_interval, ExactInterval};
use conformal_exact::measures::catalog::{catalog_entry, Setting};
use conformal_exact::measures::{
    polynomial_supervised, polynomial_unsupervised, PolynomialSupervisedParams, PolynomialUnsupervisedParams,
};
use conformal_exact::oracle::{compare_regions, task_region};
use conformal_exact::questions::{run_suite, SuiteConfig, SUITE_ALPHA};
use conformal_exact::sim::{self, SimulationConfig};
use conformal_exact::types::{check_alpha, scaled_floor};
use conformal_exact::{Interval, MeasureSpec, PredictionRegion, ScanSpec, Shape};
use serde_json::{json, Map, Value};

use crate::args::{Cli, Command, CounterexampleArgs, OracleArgs, PredictArgs, ScanArgs, SimulateArgs, SEED_ENV};
use crate::dataset::{read_dataset, Dataset};
use crate::error::{CliError, CliResult};
use crate::report::{sha256_hex, CommandEcho, RunReport, SeedEcho, SeedSource, Status};
use crate::targets;

pub const DEFAULT_ALPHA: f64 = 0.1;
/// Endpoint tolerance for oracle/closed-form agreement.
pub const AGREEMENT_TOLERANCE: f64 = 1e-6;
const COMPARISON_PROBES: usize = 1000;

pub fn run(cli: &Cli) -> CliResult<RunReport> {
    match &cli.command {
        Command::Predict(args) => predict(cli, args),
        Command::Oracle(args) => oracle(cli, args),
        Command::Counterexamples(args) => counterexamples(cli, args),
        Command::Simulate(args) => simulate(cli, args),
    }
}

/// `--seed`, then the environment, then `fallback`.
fn resolve_seed(cli: &Cli, fallback: (u64, SeedSource)) -> CliResult<SeedEcho> {
    if let Some(value) = cli.seed {
        return Ok(SeedEcho {
            value,
            source: SeedSource::Flag,
        });
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => {
            let value = text
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("{SEED_ENV}=`{text}` is not a 64-bit unsigned integer")))?;
            Ok(SeedEcho {
                value,
                source: SeedSource::Environment,
            })
        }
        Err(_) => Ok(SeedEcho {
            value: fallback.0,
            source: fallback.1,
        }),
    }
}

fn alpha(cli: &Cli, default: f64) -> CliResult<f64> {
    let alpha = cli.alpha.unwrap_or(default);
    check_alpha(alpha).map_err(|e| CliError::usage(e.to_string()))?;
    Ok(alpha)
}

fn file_name(path: &Path) -> Value {
    json!(path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned()))
}

fn interval_warnings(interval: &ExactInterval) -> Vec<String> {
    interval
        .rank_mismatches()
        .map(|u| {
            format!(
                "index discrepancy: {:?} endpoint is order statistic {}, conventional {} is {}",
                u.side, u.used, u.nominal_name, u.nominal
            )
        })
        .collect()
}

fn predict(cli: &Cli, args: &PredictArgs) -> CliResult<RunReport> {
    let alpha = alpha(cli, DEFAULT_ALPHA)?;
    let (dataset, bytes) = read_dataset(&args.dataset)?;
    let mut echo = Map::new();
    echo.insert("dataset".into(), file_name(&args.dataset));
    echo.insert("alpha".into(), json!(alpha));
    echo.insert("shape".into(), json!(args.shape));
    echo.insert("eta".into(), json!(args.eta));
    echo.insert("kappa".into(), json!(args.kappa));

    let mut payload = Map::new();
    let mut warnings = Vec::new();
    let interval = if dataset.is_unsupervised() {
        if args.eta.is_some() {
            warnings.push("--eta ignored for an unsupervised dataset".into());
        }
        payload.insert("setting".into(), json!("unsupervised"));
        exact_unsupervised_interval(&dataset.responses(), alpha, args.shape, args.kappa)?
    } else {
        if args.kappa.is_some() {
            warnings.push("--kappa ignored for a supervised dataset".into());
        }
        let sample = dataset.sample()?;
        let x = dataset.require_prediction()?;
        payload.insert("setting".into(), json!("supervised"));
        payload.insert("features".into(), json!(x));
        if args.shape == Shape::Bounded {
            let source = if args.eta.is_some() { "given" } else { "default" };
            payload.insert("eta_source".into(), json!(source));
        }
        exact_supervised_interval(&sample, x, alpha, args.shape, args.eta)?
    };
    payload.insert("n".into(), json!(dataset.points.len()));
    payload.insert("alpha".into(), json!(alpha));
    warnings.extend(interval_warnings(&interval));
    payload.insert("interval".into(), serde_json::to_value(&interval).expect("serialisable"));

    let mut report = RunReport::new(
        CommandEcho {
            name: "predict",
            arguments: echo,
        },
        &[&bytes],
        Value::Object(payload),
    );
    report.warnings = warnings;
    Ok(report)
}

/// Measure, task setting and optional closed-form region for an oracle run.
struct Resolved {
    measure: MeasureSpec,
    setting: Setting,
    closed_form: Option<PredictionRegion>,
    details: Map<String, Value>,
}

fn resolve_measure(args: &OracleArgs, dataset: &Dataset, alpha: f64) -> CliResult<Resolved> {
    let n = dataset.points.len();
    let mut details = Map::new();
    let require_supervised = |setting: Setting| -> CliResult<()> {
        if setting == Setting::Supervised && dataset.is_unsupervised() {
            return Err(CliError::usage(format!(
                "measure `{}` needs a supervised dataset (x1..xp columns)",
                args.measure
            )));
        }
        Ok(())
    };
    match args.measure.as_str() {
        "poly-sup" => {
            require_supervised(Setting::Supervised)?;
            let sample = dataset.sample()?;
            let x = dataset.require_prediction()?;
            let params = match args.shape {
                Shape::Upper => PolynomialSupervisedParams::upper(),
                Shape::Lower => PolynomialSupervisedParams::lower(),
                Shape::Bounded => {
                    let eta = match args.eta {
                        Some(eta) => eta,
                        None => default_eta(&sample, x)?,
                    };
                    details.insert("eta".into(), json!(eta));
                    PolynomialSupervisedParams::bounded(eta)
                }
            };
            details.insert("shape".into(), json!(args.shape));
            let closed = exact_supervised_interval(&sample, x, alpha, args.shape, Some(params.eta))?;
            Ok(Resolved {
                measure: polynomial_supervised(params),
                setting: Setting::Supervised,
                closed_form: Some(closed.region),
                details,
            })
        }
        "poly-unsup" => {
            let params = match args.shape {
                Shape::Upper => PolynomialUnsupervisedParams::upper(),
                Shape::Lower => PolynomialUnsupervisedParams::lower(),
                Shape::Bounded => {
                    let kappa = args
                        .kappa
                        .ok_or_else(|| CliError::usage("poly-unsup with shape bounded needs --kappa"))?;
                    details.insert("kappa".into(), json!(kappa));
                    PolynomialUnsupervisedParams::bounded(kappa)
                }
            };
            details.insert("shape".into(), json!(args.shape));
            let closed = exact_unsupervised_interval(&dataset.responses(), alpha, args.shape, args.kappa)?;
            Ok(Resolved {
                measure: polynomial_unsupervised(params),
                setting: Setting::Unsupervised,
                closed_form: Some(closed.region),
                details,
            })
        }
        id => {
            let entry = catalog_entry(id).ok_or_else(|| CliError::usage(format!("unknown measure id `{id}`")))?;
            if entry.domain.is_some() {
                return Err(CliError::usage(format!(
                    "`{id}` is evaluation-only: it is defined on a bounded response domain, so no region scan is attempted"
                )));
            }
            require_supervised(entry.setting)?;
            details.insert("formula".into(), json!(entry.formula));
            let m = scaled_floor(n + 1, alpha);
            let closed_form = match entry.closed_form {
                Some(f) if m >= 2 => Some(f(&dataset.responses(), m)),
                _ => None,
            };
            Ok(Resolved {
                measure: entry.measure,
                setting: entry.setting,
                closed_form,
                details,
            })
        }
    }
}

fn scan_spec(args: &ScanArgs, anchors: &[f64]) -> ScanSpec {
    let mut scan = ScanSpec::around(anchors);
    if let Some(lower) = args.scan_lower {
        scan.lower = lower;
    }
    if let Some(upper) = args.scan_upper {
        scan.upper = upper;
    }
    if let Some(points) = args.grid_points {
        scan.grid_points = points;
    }
    if let Some(tolerance) = args.tolerance {
        scan.tolerance = tolerance;
    }
    scan
}

/// Gaps between consecutive pieces of a region.
fn gaps(region: &PredictionRegion) -> Vec<[f64; 2]> {
    let pieces: Vec<Interval> = region.intervals();
    pieces
        .windows(2)
        .filter_map(|w| Some([w[0].upper?.value, w[1].lower?.value]))
        .collect()
}

fn oracle(cli: &Cli, args: &OracleArgs) -> CliResult<RunReport> {
    let alpha = alpha(cli, DEFAULT_ALPHA)?;
    let (dataset, bytes) = read_dataset(&args.dataset)?;
    let mut echo = Map::new();
    echo.insert("dataset".into(), file_name(&args.dataset));
    echo.insert("alpha".into(), json!(alpha));
    echo.insert("measure".into(), json!(args.measure));
    echo.insert("shape".into(), json!(args.shape));
    echo.insert("eta".into(), json!(args.eta));
    echo.insert("kappa".into(), json!(args.kappa));
    echo.insert("scan_lower".into(), json!(args.scan.scan_lower));
    echo.insert("scan_upper".into(), json!(args.scan.scan_upper));
    echo.insert("grid_points".into(), json!(args.scan.grid_points));
    echo.insert("tolerance".into(), json!(args.scan.tolerance));

    let resolved = resolve_measure(args, &dataset, alpha)?;
    let mut warnings = Vec::new();
    let responses = dataset.responses();
    let (sample, x);
    let task = match resolved.setting {
        Setting::Supervised => {
            sample = dataset.sample()?;
            x = dataset.require_prediction()?.to_vec();
            Task::Supervised {
                sample: &sample,
                features_new: &x,
            }
        }
        Setting::Unsupervised => {
            if !dataset.is_unsupervised() {
                warnings.push("unsupervised measure: feature columns ignored".into());
            }
            Task::Unsupervised { values: &responses }
        }
    };

    let mut anchors = responses.clone();
    if let Some(closed) = &resolved.closed_form {
        anchors.extend(closed.endpoints());
    }
    let scan = scan_spec(&args.scan, &anchors);
    let region = task_region(&task, &resolved.measure, alpha, &scan)?;

    let mut payload = Map::new();
    payload.insert("measure".into(), json!(args.measure));
    payload.insert("setting".into(), json!(resolved.setting));
    for (k, v) in resolved.details {
        payload.insert(k, v);
    }
    payload.insert("n".into(), json!(dataset.points.len()));
    payload.insert("alpha".into(), json!(alpha));
    payload.insert("scan".into(), json!(scan));
    payload.insert("region".into(), json!(region));
    payload.insert("gaps".into(), json!(gaps(&region)));

    let mut status = Status::Ok;
    match &resolved.closed_form {
        Some(closed) => {
            let step = scan.width() / COMPARISON_PROBES as f64;
            // Offset by an irrational fraction of a step to stay off data points.
            let probes: Vec<f64> = (0..COMPARISON_PROBES)
                .map(|k| scan.lower + step * (k as f64 + 0.5 * std::f64::consts::FRAC_1_SQRT_2))
                .collect();
            let comparison = compare_regions(closed, &region, &probes, |y| task.is_member(&resolved.measure, alpha, y))?;
            let agrees = comparison.agrees(AGREEMENT_TOLERANCE);
            if !agrees {
                status = Status::VerdictFailures;
            }
            payload.insert(
                "closed_form".into(),
                json!({
                    "region": closed,
                    "comparison": comparison,
                    "tolerance": AGREEMENT_TOLERANCE,
                    "agrees": agrees,
                }),
            );
        }
        None => {
            payload.insert("closed_form".into(), Value::Null);
        }
    }

    let mut report = RunReport::new(
        CommandEcho {
            name: "oracle",
            arguments: echo,
        },
        &[&bytes],
        Value::Object(payload),
    );
    report.status = status;
    report.warnings = warnings;
    Ok(report)
}

fn counterexamples(cli: &Cli, args: &CounterexampleArgs) -> CliResult<RunReport> {
    if args.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let seed = resolve_seed(cli, (SuiteConfig::default().seed, SeedSource::Default))?;
    let config = SuiteConfig {
        trials: args.trials,
        seed: seed.value,
        ..SuiteConfig::default()
    };
    let suite = run_suite(&config)?;
    let mut warnings = Vec::new();
    if cli.alpha.is_some() {
        warnings.push(format!("--alpha ignored: the suite runs at alpha = {SUITE_ALPHA}"));
    }
    let mut echo = Map::new();
    echo.insert("trials".into(), json!(args.trials));
    echo.insert("seed".into(), json!(seed.value));
    let status = if suite.all_passed() {
        Status::Ok
    } else {
        Status::VerdictFailures
    };
    let mut report = RunReport::new(
        CommandEcho {
            name: "counterexamples",
            arguments: echo,
        },
        &[],
        serde_json::to_value(&suite).expect("serialisable"),
    );
    report.seed = Some(seed);
    report.status = status;
    report.warnings = warnings;
    Ok(report)
}

pub fn load_simulation_config(path: &Path) -> CliResult<(SimulationConfig, Vec<u8>)> {
    let input_error = |message: String| CliError::Input {
        path: path.display().to_string(),
        message,
    };
    let bytes = std::fs::read(path).map_err(|e| input_error(e.to_string()))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| input_error("not valid UTF-8".into()))?;
    let config: SimulationConfig = toml::from_str(text).map_err(|e| input_error(e.to_string()))?;
    Ok((config, bytes))
}

fn simulate(cli: &Cli, args: &SimulateArgs) -> CliResult<RunReport> {
    let (mut config, bytes) = load_simulation_config(&args.config)?;
    let seed = resolve_seed(cli, (config.generator.seed, SeedSource::ConfigFile))?;
    config.generator.seed = seed.value;
    if let Some(alpha) = cli.alpha {
        config.alpha = alpha;
    }
    config.validate().map_err(|e| CliError::Input {
        path: args.config.display().to_string(),
        message: e.to_string(),
    })?;
    let effective = serde_json::to_vec(&config).expect("serialisable");
    let result = sim::run(&config)?;

    let mut payload = Map::new();
    payload.insert("config_sha256".into(), json!(sha256_hex(&effective)));
    payload.insert("report".into(), serde_json::to_value(&result).expect("serialisable"));

    let mut warnings = Vec::new();
    let mut status = Status::Ok;
    if args.check {
        let block = targets::check(&result);
        if !block.applicable {
            warnings.push(format!(
                "--check skipped: targets apply to N = {}, n = {}, alpha = {}",
                block.reference.replications, block.reference.n, block.reference.alpha
            ));
        } else if block.failures() > 0 {
            status = Status::VerdictFailures;
        }
        payload.insert("check".into(), json!(block));
    }

    let mut echo = Map::new();
    echo.insert("config".into(), file_name(&args.config));
    echo.insert("check".into(), json!(args.check));
    echo.insert("alpha".into(), json!(cli.alpha));
    let mut report = RunReport::new(
        CommandEcho {
            name: "simulate",
            arguments: echo,
        },
        &[&bytes],
        Value::Object(payload),
    );
    report.seed = Some(seed);
    report.status = status;
    report.warnings = warnings;
    Ok(report)
}

