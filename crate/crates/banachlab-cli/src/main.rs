//! Command-line front end: run experiments, compute individual norms, emit
//! JSON/CSV/SVG. Identical invocations produce byte-identical JSON.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use banachlab::experiments::{
    run_thm10, run_thm11, run_thm12, run_thm8, ExperimentReport, LambdaMode, ShiftMode,
    Thm10Config, Thm11Config, Thm12Config,
};
use banachlab::operators::{op_norm, LinearMap};
use banachlab::report::{from_serde, JsonValue};
use banachlab::spaces::{
    dual_norm, fourier_coeff, grid_integrate, lorentz21_norm, Exponent, GridFunction, Vector,
};
use banachlab::summing::{
    gamma2_norm, pi2, pi2_vs_opnorm, pi_pq_lower_search, weak_lq_norm, WeakFamily,
};
use banachlab::tensor::{eps_norm, eps_norm3_assoc, proj_norm, z_norm_bounds, Tensor2, Tensor3};

const USAGE_EXIT: u8 = 2;
const CHECK_FAILURE_EXIT: u8 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "banachlab",
    version,
    about = "Summing norms, tensor norms, and counterexample experiments on finite grids"
)]
struct Cli {
    /// RNG seed for randomized searches.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Iteration budget for searches.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Grid points for function-space discretization.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Worker pool size (defaults to available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output format for reports.
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    out: Option<String>,
    /// Write an SVG growth plot of the report table to this path.
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
    /// Flat key = value config file; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an experiment: thm8 | thm10 | thm11 | thm12 | fail-fixture.
    Exp {
        target: String,
        /// Truncation / block size / frequency window, construction-dependent.
        #[arg(long = "N")]
        n_upper: Option<usize>,
        /// Cap parameter for thm12.
        #[arg(long)]
        n: Option<usize>,
        /// Exponent p for thm10.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_parser = ["ones", "paper_weights"])]
        lambda_mode: Option<String>,
        #[arg(long, value_parser = ["paper_shifts", "uniform_shifts"])]
        shift_mode: Option<String>,
    },
    /// Norms of serialized objects: vector | dual | lorentz21 | integral |
    /// fourier | opnorm.
    Norm {
        kind: String,
        /// Input JSON path ("-" for stdin).
        #[arg(long)]
        input: Option<String>,
        /// Frequency for `fourier`.
        #[arg(long)]
        k: Option<i64>,
    },
    /// Summing computations: pietsch | pi-lower | gamma2 | ratio | weak.
    Summing {
        kind: String,
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
    },
    /// Tensor computations: eps | proj | znorm | assoc.
    Tensor {
        kind: String,
        #[arg(long)]
        input: Option<String>,
    },
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(USAGE_EXIT)
}

struct Settings {
    seed: u64,
    budget: usize,
    grid: usize,
    out: String,
    plot: Option<PathBuf>,
}

/// Parse a flat `key = value` file with `#` comments.
fn parse_config(path: &Path) -> Result<Vec<(String, String)>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!(
                "config line {} is not `key = value`: {raw:?}",
                lineno + 1
            ));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

const KNOWN_KEYS: &[&str] = &[
    "seed", "budget", "grid", "jobs", "out", "plot", "N", "n", "p", "q", "k", "lambda_mode",
    "shift_mode", "input",
];

#[derive(Default)]
struct FileConfig {
    map: std::collections::BTreeMap<String, String>,
}

impl FileConfig {
    fn get(&self, key: &str) -> Option<&String> {
        self.map.get(key)
    }
    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| format!("config key {key} has invalid value {raw:?}")),
        }
    }
}

fn read_input(path: &Option<String>) -> Result<String, String> {
    match path.as_deref() {
        None => Err("missing --input (path or '-')".to_string()),
        Some("-") => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| format!("stdin: {e}"))?;
            Ok(buf)
        }
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("cannot read {p}: {e}")),
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("invalid {what} JSON: {e}"))
}

fn value_output(fields: Vec<(&str, JsonValue)>) -> String {
    let mut o = JsonValue::object();
    for (k, v) in fields {
        o.push(k, v);
    }
    o.render()
}

fn emit_report(report: &ExperimentReport, settings: &Settings) -> ExitCode {
    if let Some(path) = &settings.plot {
        match report.growth_svg() {
            Some(svg) => {
                if let Err(e) = std::fs::write(path, svg) {
                    return usage_error(&format!("cannot write plot {}: {e}", path.display()));
                }
            }
            None => eprintln!("note: report has no table; plot skipped"),
        }
    }
    match settings.out.as_str() {
        "csv" => print!("{}", report.table_csv()),
        _ => println!("{}", report.to_json_string()),
    }
    let failed = report.failed_checks();
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        for c in failed {
            eprintln!("check failed: {}: {}", c.name, c.detail);
        }
        ExitCode::from(CHECK_FAILURE_EXIT)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let file_cfg = match &cli.config {
        Some(path) => match parse_config(path) {
            Ok(pairs) => {
                let mut cfg = FileConfig::default();
                for (k, v) in pairs {
                    if !KNOWN_KEYS.contains(&k.as_str()) {
                        return usage_error(&format!("unknown config key {k:?}"));
                    }
                    cfg.map.insert(k, v);
                }
                cfg
            }
            Err(e) => return usage_error(&e),
        },
        None => FileConfig::default(),
    };

    macro_rules! merged {
        ($flag:expr, $key:literal, $ty:ty) => {
            match $flag {
                Some(v) => Some(v),
                None => match file_cfg.parsed::<$ty>($key) {
                    Ok(v) => v,
                    Err(e) => return usage_error(&e),
                },
            }
        };
    }

    let jobs = merged!(cli.jobs, "jobs", usize);
    if let Some(j) = jobs {
        // Ignore failure: the global pool may already be initialized.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }

    let settings = Settings {
        seed: merged!(cli.seed, "seed", u64).unwrap_or(0),
        budget: merged!(cli.budget, "budget", usize).unwrap_or(10_000),
        grid: merged!(cli.grid, "grid", usize).unwrap_or(4096),
        out: merged!(cli.out.clone(), "out", String).unwrap_or_else(|| "json".to_string()),
        plot: cli
            .plot
            .clone()
            .or_else(|| file_cfg.get("plot").map(PathBuf::from)),
    };
    if settings.out != "json" && settings.out != "csv" {
        return usage_error(&format!("unknown output format {:?}", settings.out));
    }

    match cli.command {
        Command::Exp {
            target,
            n_upper,
            n,
            p,
            lambda_mode,
            shift_mode,
        } => {
            let n_upper = merged!(n_upper, "N", usize);
            let n = merged!(n, "n", usize);
            let p = merged!(p, "p", f64);
            let lambda_mode = merged!(lambda_mode, "lambda_mode", String);
            let shift_mode = merged!(shift_mode, "shift_mode", String);
            let result = match target.as_str() {
                "thm8" => run_thm8(n_upper.unwrap_or(8)),
                "thm10" => {
                    let mode = match lambda_mode.as_deref() {
                        None | Some("ones") => LambdaMode::Ones,
                        Some("paper_weights") => LambdaMode::PaperWeights,
                        Some(other) => {
                            return usage_error(&format!("unknown lambda mode {other:?}"))
                        }
                    };
                    run_thm10(&Thm10Config {
                        p: p.unwrap_or(2.0),
                        n_freq: n_upper.unwrap_or(16),
                        grid: settings.grid,
                        lambda_mode: mode,
                        seed: settings.seed,
                    })
                }
                "thm11" => run_thm11(&Thm11Config {
                    n_block: n_upper.unwrap_or(3),
                    grid: settings.grid,
                    seed: settings.seed,
                    budget: settings.budget.min(500),
                }),
                "thm12" => {
                    let mode = match shift_mode.as_deref() {
                        None | Some("uniform_shifts") => ShiftMode::UniformShifts,
                        Some("paper_shifts") => ShiftMode::PaperShifts,
                        Some(other) => {
                            return usage_error(&format!("unknown shift mode {other:?}"))
                        }
                    };
                    let nn = n.unwrap_or(64);
                    run_thm12(&Thm12Config {
                        n: nn,
                        grid: settings.grid.max(64 * nn),
                        shift_mode: mode,
                        seed: settings.seed,
                        ..Thm12Config::default()
                    })
                }
                "fail-fixture" => {
                    // Deliberately failing check: exercises the exit-status
                    // contract end to end.
                    let mut r = ExperimentReport::new("fail-fixture", settings.seed, 0, 0);
                    r.check(
                        "deliberate_fixture_failure",
                        false,
                        "this fixture always fails".into(),
                    );
                    Ok(r)
                }
                other => return usage_error(&format!("unknown experiment {other:?}")),
            };
            match result {
                Ok(report) => emit_report(&report, &settings),
                Err(e) => usage_error(&e.to_string()),
            }
        }

        Command::Norm { kind, input, k } => {
            let k = merged!(k, "k", i64);
            let text = match read_input(&input.or_else(|| file_cfg.get("input").cloned())) {
                Ok(t) => t,
                Err(e) => return usage_error(&e),
            };
            let rendered: Result<String, String> = match kind.as_str() {
                "vector" => parse_json::<Vector>(&text, "Vector")
                    .map(|v| value_output(vec![("value", JsonValue::Float(v.norm()))])),
                "dual" => parse_json::<Vector>(&text, "Vector").and_then(|v| {
                    dual_norm(&v, v.space())
                        .map(|d| value_output(vec![("value", JsonValue::Float(d))]))
                        .map_err(|e| e.to_string())
                }),
                "lorentz21" => parse_json::<GridFunction>(&text, "GridFunction")
                    .map(|f| value_output(vec![("value", JsonValue::Float(lorentz21_norm(&f)))])),
                "integral" => parse_json::<GridFunction>(&text, "GridFunction")
                    .map(|f| value_output(vec![("value", JsonValue::Float(grid_integrate(&f)))])),
                "fourier" => parse_json::<GridFunction>(&text, "GridFunction").and_then(|f| {
                    let k = k.ok_or_else(|| "fourier needs --k".to_string())?;
                    let c = fourier_coeff(&f, k).map_err(|e| e.to_string())?;
                    Ok(value_output(vec![
                        ("re", JsonValue::Float(c.re)),
                        ("im", JsonValue::Float(c.im)),
                    ]))
                }),
                "opnorm" => parse_json::<LinearMap>(&text, "LinearMap").and_then(|t| {
                    let r = op_norm(&t).map_err(|e| e.to_string())?;
                    Ok(value_output(vec![
                        ("value", JsonValue::Float(r.value)),
                        ("exact", JsonValue::Bool(r.exact)),
                    ]))
                }),
                other => return usage_error(&format!("unknown norm kind {other:?}")),
            };
            match rendered {
                Ok(s) => {
                    println!("{s}");
                    ExitCode::SUCCESS
                }
                Err(e) => usage_error(&e),
            }
        }

        Command::Summing { kind, input, p, q } => {
            let p = merged!(p, "p", f64);
            let q = merged!(q, "q", f64);
            let text = match read_input(&input.or_else(|| file_cfg.get("input").cloned())) {
                Ok(t) => t,
                Err(e) => return usage_error(&e),
            };
            let rendered: Result<String, String> = match kind.as_str() {
                "pietsch" => parse_json::<LinearMap>(&text, "LinearMap").and_then(|t| {
                    let est = pi2(&t).map_err(|e| e.to_string())?;
                    let v = serde_json::to_value(&est).map_err(|e| e.to_string())?;
                    Ok(from_serde(&v).render())
                }),
                "pi-lower" => parse_json::<LinearMap>(&text, "LinearMap").and_then(|t| {
                    let pe = Exponent::new(p.unwrap_or(2.0)).map_err(|e| e.to_string())?;
                    let qe =
                        Exponent::new(q.unwrap_or(pe.get().min(2.0))).map_err(|e| e.to_string())?;
                    let est = pi_pq_lower_search(&t, pe, qe, settings.budget, settings.seed)
                        .map_err(|e| e.to_string())?;
                    let v = serde_json::to_value(&est).map_err(|e| e.to_string())?;
                    Ok(from_serde(&v).render())
                }),
                "gamma2" => parse_json::<LinearMap>(&text, "LinearMap").and_then(|t| {
                    let g = gamma2_norm(&t, settings.budget.min(200), settings.seed)
                        .map_err(|e| e.to_string())?;
                    let v = serde_json::to_value(&g).map_err(|e| e.to_string())?;
                    Ok(from_serde(&v).render())
                }),
                "ratio" => parse_json::<LinearMap>(&text, "LinearMap").and_then(|t| {
                    let r = pi2_vs_opnorm(&t).map_err(|e| e.to_string())?;
                    Ok(value_output(vec![("value", JsonValue::Float(r))]))
                }),
                "weak" => parse_json::<WeakFamily>(&text, "WeakFamily").and_then(|f| {
                    let w = weak_lq_norm(&f).map_err(|e| e.to_string())?;
                    Ok(value_output(vec![
                        ("lower", JsonValue::Float(w.lower)),
                        ("upper", JsonValue::Float(w.upper)),
                        ("exact", JsonValue::Bool(w.exact)),
                    ]))
                }),
                other => return usage_error(&format!("unknown summing kind {other:?}")),
            };
            match rendered {
                Ok(s) => {
                    println!("{s}");
                    ExitCode::SUCCESS
                }
                Err(e) => usage_error(&e),
            }
        }

        Command::Tensor { kind, input } => {
            let text = match read_input(&input.or_else(|| file_cfg.get("input").cloned())) {
                Ok(t) => t,
                Err(e) => return usage_error(&e),
            };
            let rendered: Result<String, String> = match kind.as_str() {
                "eps" => parse_json::<Tensor2>(&text, "Tensor2").and_then(|u| {
                    let e = eps_norm(&u).map_err(|e| e.to_string())?;
                    Ok(value_output(vec![
                        ("value", JsonValue::Float(e.value)),
                        ("exact", JsonValue::Bool(e.exact)),
                    ]))
                }),
                "proj" => parse_json::<Tensor2>(&text, "Tensor2").and_then(|u| {
                    let p = proj_norm(&u).map_err(|e| e.to_string())?;
                    Ok(value_output(vec![
                        ("value", JsonValue::Float(p.value)),
                        ("exact", JsonValue::Bool(p.exact)),
                    ]))
                }),
                "znorm" => parse_json::<Tensor2>(&text, "Tensor2").and_then(|u| {
                    let z = z_norm_bounds(&u, settings.budget.min(500), settings.seed)
                        .map_err(|e| e.to_string())?;
                    Ok(value_output(vec![
                        ("lower", JsonValue::Float(z.lower)),
                        ("upper", JsonValue::Float(z.upper)),
                    ]))
                }),
                "assoc" => parse_json::<Tensor3>(&text, "Tensor3").and_then(|w| {
                    let a = eps_norm3_assoc(&w).map_err(|e| e.to_string())?;
                    Ok(value_output(vec![
                        ("left", JsonValue::Float(a.left)),
                        ("right", JsonValue::Float(a.right)),
                        ("exact", JsonValue::Bool(a.exact)),
                    ]))
                }),
                other => return usage_error(&format!("unknown tensor kind {other:?}")),
            };
            match rendered {
                Ok(s) => {
                    println!("{s}");
                    ExitCode::SUCCESS
                }
                Err(e) => usage_error(&e),
            }
        }
    }
}
