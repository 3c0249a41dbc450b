use clap::Parser;
use lpzeta::experiments::{run_all_checks, Experiment, ExperimentConfig, OutputFormat, Report};
use serde_json::{Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;

/// Run a named experiment, or `all` for the acceptance suite.
///
/// Parameters come from the experiment defaults, then `--config`, then the
/// flags below and any `--set key=json`. Unsupported flags for an experiment
/// are rejected.
#[derive(Debug, Parser)]
#[command(name = "lpzeta", version)]
struct Cli {
    /// moment, theorem3, lemma2-sup, kernel-check, parseval, smoothed-repr,
    /// ire-growth, omega-growth, holder-split, dioph-find, zeta-bounds, or all
    experiment: String,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long = "N-list", value_delimiter = ',')]
    big_n_list: Option<Vec<f64>>,
    #[arg(long)]
    primes_limit: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report file; for `all` a directory receiving one file per experiment.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    /// JSON file holding either a full config or a bare parameter map.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Raw parameter override, value parsed as JSON (falls back to a string).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

/// Parameter key a flag maps to, and whether it is a list.
fn key_for(e: Experiment, flag: &str) -> Option<(&'static str, bool)> {
    use Experiment::*;
    Some(match (flag, e) {
        ("delta", Theorem3 | HolderSplit) => ("deltas", true),
        ("delta", Moment | Lemma2Sup | Parseval | IreGrowth | OmegaGrowth) => ("delta", false),
        ("p", Theorem3 | Moment | HolderSplit) => ("ps", true),
        ("p", Lemma2Sup | Parseval | IreGrowth | OmegaGrowth) => ("p", false),
        ("sigma", Moment | Lemma2Sup | Parseval) => ("sigma", false),
        ("n", IreGrowth | OmegaGrowth) => ("n", false),
        ("n", KernelCheck) => ("orders", true),
        ("N-list", IreGrowth | OmegaGrowth) => ("N_list", false),
        ("primes-limit", Theorem3 | Lemma2Sup) => ("prime_bound", false),
        ("primes-limit", DiophFind) => ("primes_limit", false),
        ("eps", Lemma2Sup | DiophFind) => ("eps", false),
        ("tol", KernelCheck | Parseval) => ("quad_tol", false),
        ("tol", ZetaBounds) => ("value_tol", false),
        ("tol", DiophFind) => return None,
        ("tol", _) => ("tol", false),
        ("seed", Moment | Lemma2Sup | IreGrowth | HolderSplit) => ("seed", false),
        _ => return None,
    })
}

fn build_config(cli: &Cli, e: Experiment) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::new(e);
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|err| format!("{}: {err}", path.display()))?;
        let v: Value = serde_json::from_str(&text).map_err(|err| format!("{}: {err}", path.display()))?;
        match v {
            Value::Object(m) if m.contains_key("parameters") || m.contains_key("experiment") => {
                let full: ExperimentConfig = serde_json::from_value(Value::Object(m.clone()))
                    .or_else(|_| {
                        let mut m = m.clone();
                        m.insert("experiment".into(), serde_json::to_value(e).unwrap());
                        serde_json::from_value(Value::Object(m))
                    })
                    .map_err(|err| format!("{}: {err}", path.display()))?;
                if full.experiment != e {
                    return Err(format!(
                        "config is for {} but {} was requested",
                        full.experiment.name(),
                        e.name()
                    ));
                }
                cfg = full;
            }
            Value::Object(m) => cfg.parameters = m,
            _ => return Err("config must be a JSON object".into()),
        }
    }
    let flags: Vec<(&str, Option<Value>)> = vec![
        ("delta", cli.delta.map(Value::from)),
        ("p", cli.p.map(Value::from)),
        ("sigma", cli.sigma.map(Value::from)),
        ("n", cli.n.map(Value::from)),
        ("N-list", cli.big_n_list.clone().map(Value::from)),
        ("primes-limit", cli.primes_limit.map(Value::from)),
        ("eps", cli.eps.map(Value::from)),
        ("tol", cli.tol.map(Value::from)),
        ("seed", cli.seed.map(Value::from)),
    ];
    for (flag, v) in flags {
        let Some(v) = v else { continue };
        let (key, list) =
            key_for(e, flag).ok_or_else(|| format!("--{flag} is not used by {}", e.name()))?;
        let v = if list { Value::Array(vec![v]) } else { v };
        cfg.parameters.insert(key.to_string(), v);
    }
    apply_sets(&mut cfg.parameters, &cli.sets)?;
    if let Some(out) = &cli.out {
        cfg.output = Some(out.clone());
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse().map_err(|err| format!("{err}"))?;
    }
    Ok(cfg)
}

fn apply_sets(params: &mut Map<String, Value>, sets: &[String]) -> Result<(), String> {
    for s in sets {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| format!("--set expects KEY=VALUE, got {s:?}"))?;
        let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        params.insert(k.to_string(), v);
    }
    Ok(())
}

fn print_checks(r: &Report) {
    for c in &r.checks {
        let flag = if c.passed { "pass" } else { "FAIL" };
        eprintln!("{flag} {} {}", c.anchor, c.detail);
    }
}

fn run_one(cli: &Cli, e: Experiment) -> ExitCode {
    let cfg = match build_config(cli, e) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let report = match cfg.run() {
        Ok(r) => r,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(1);
        }
    };
    print_checks(&report);
    match &cfg.output {
        Some(path) => {
            if let Err(err) = report.write(path, cfg.format) {
                eprintln!("error: {err}");
                return ExitCode::from(1);
            }
        }
        None => {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            match cfg.format {
                OutputFormat::Csv => print!("{}", report.to_csv(now)),
                OutputFormat::Json => println!("{}", report.to_json(now)),
            }
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_all(cli: &Cli) -> ExitCode {
    let format = match cli.format.as_deref().map(str::parse::<OutputFormat>) {
        None => OutputFormat::Csv,
        Some(Ok(f)) => f,
        Some(Err(err)) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };
    let outcome = run_all_checks(|cfg| eprintln!("running {}", cfg.experiment.name()));
    if let Some(dir) = &cli.out {
        let ext = match format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        };
        for (i, r) in outcome.reports.iter().enumerate() {
            let Some(r) = r else { continue };
            let path = dir.join(format!("{:02}-{}.{ext}", i + 1, r.experiment.name()));
            if let Err(err) = r.write(&path, format) {
                eprintln!("error: {err}");
                return ExitCode::from(1);
            }
        }
    }
    for c in &outcome.criteria {
        let flag = if c.passed { "PASS" } else { "FAIL" };
        println!("{flag} criterion {:>2} ({} checks, {:.1} s): {}", c.id, c.checks, c.seconds, c.title);
        for f in &c.failures {
            println!("       {f}");
        }
    }
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.experiment == "all" {
        return run_all(&cli);
    }
    match cli.experiment.parse::<Experiment>() {
        Ok(e) => run_one(&cli, e),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
