//! Named experiments producing reproducible reports.
//!
//! Every experiment takes a flat JSON parameter map, resolves it against
//! typed defaults and returns a [`Report`]: a table whose rows each carry an
//! anchor naming the inequality or identity they exercise, plus pass/fail
//! checks. Bodies are deterministic for a fixed configuration; the only
//! run-dependent content is the `# generated-unix=` comment line.

mod checks;
mod dioph;
mod growth;
mod lemma2;
mod suite;
mod theorem3;

pub use checks::{
    run_holder_split, run_kernel_check, run_parseval, run_smoothed_repr, run_zeta_bounds,
    HolderParams, KernelParams, ParsevalParams, ReprCase, SmoothedReprParams, ZetaBoundsParams,
};
pub use dioph::{run_dioph_find, DiophParams};
pub use growth::{run_ire_growth, run_omega_growth, IreParams, OmegaParams};
pub use lemma2::{run_lemma2_sup, Lemma2Params};
pub use suite::{acceptance_plan, run_all_checks, CriterionResult, SuiteOutcome};
pub use theorem3::{run_moment, run_theorem3, MomentParams, Theorem3Params};

use crate::dirichlet::{build_smoothed, DirichletError, SmoothedPolynomial};
use crate::diophantine::DiophantineError;
use crate::kernels::KernelError;
use crate::moments::MomentError;
use crate::sieve::{SieveError, SpfTable};
use crate::zeta::ZetaError;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CACHE_ENV: &str = "LPZETA_CACHE_DIR";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Moment,
    Theorem3,
    Lemma2Sup,
    KernelCheck,
    Parseval,
    SmoothedRepr,
    IreGrowth,
    OmegaGrowth,
    HolderSplit,
    DiophFind,
    ZetaBounds,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::Moment,
        Experiment::Theorem3,
        Experiment::Lemma2Sup,
        Experiment::KernelCheck,
        Experiment::Parseval,
        Experiment::SmoothedRepr,
        Experiment::IreGrowth,
        Experiment::OmegaGrowth,
        Experiment::HolderSplit,
        Experiment::DiophFind,
        Experiment::ZetaBounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Moment => "moment",
            Experiment::Theorem3 => "theorem3",
            Experiment::Lemma2Sup => "lemma2-sup",
            Experiment::KernelCheck => "kernel-check",
            Experiment::Parseval => "parseval",
            Experiment::SmoothedRepr => "smoothed-repr",
            Experiment::IreGrowth => "ire-growth",
            Experiment::OmegaGrowth => "omega-growth",
            Experiment::HolderSplit => "holder-split",
            Experiment::DiophFind => "dioph-find",
            Experiment::ZetaBounds => "zeta-bounds",
        }
    }
}

impl FromStr for Experiment {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.replace('_', "-").to_ascii_lowercase();
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == key || e.name().replace('-', "") == key)
            .ok_or_else(|| ExperimentError::InvalidParameters(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(ExperimentError::InvalidParameters(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            parameters: Map::new(),
            output: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn run(&self) -> Result<Report, ExperimentError> {
        let p = &self.parameters;
        match self.experiment {
            Experiment::Moment => run_moment(&resolve(p)?),
            Experiment::Theorem3 => run_theorem3(&resolve(p)?),
            Experiment::Lemma2Sup => run_lemma2_sup(&resolve(p)?),
            Experiment::KernelCheck => run_kernel_check(&resolve(p)?),
            Experiment::Parseval => run_parseval(&resolve(p)?),
            Experiment::SmoothedRepr => run_smoothed_repr(&resolve(p)?),
            Experiment::IreGrowth => run_ire_growth(&resolve(p)?),
            Experiment::OmegaGrowth => run_omega_growth(&resolve(p)?),
            Experiment::HolderSplit => run_holder_split(&resolve(p)?),
            Experiment::DiophFind => run_dioph_find(&resolve(p)?),
            Experiment::ZetaBounds => run_zeta_bounds(&resolve(p)?),
        }
    }
}

/// Typed parameters from a partial map; absent keys take their defaults and
/// unknown keys are rejected.
pub fn resolve<P: for<'de> Deserialize<'de>>(params: &Map<String, Value>) -> Result<P, ExperimentError> {
    serde_json::from_value(Value::Object(params.clone()))
        .map_err(|e| ExperimentError::InvalidParameters(e.to_string()))
}

/// Hex SHA-256 of the canonical (key-sorted, compact) JSON of the experiment
/// name and its resolved parameters.
pub fn config_hash(experiment: Experiment, resolved: &Value) -> String {
    let canon = serde_json::json!({ "experiment": experiment, "parameters": resolved });
    hex::encode(Sha256::digest(canon.to_string().as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub anchor: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: Experiment,
    pub tool_version: String,
    pub config_hash: String,
    pub config: Value,
    pub columns: Vec<String>,
    /// Columns designated as `x`/`y` for plotting.
    pub plot: Option<(String, String)>,
    pub rows: Vec<Vec<Value>>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    /// `columns` excludes the leading `anchor` column, which is always present.
    pub fn new<P: Serialize>(experiment: Experiment, params: &P, columns: &[&str]) -> Self {
        let config = serde_json::to_value(params).expect("parameters serialise");
        let mut cols = vec!["anchor".to_string()];
        cols.extend(columns.iter().map(|c| c.to_string()));
        Self {
            experiment,
            tool_version: TOOL_VERSION.to_string(),
            config_hash: config_hash(experiment, &config),
            config,
            columns: cols,
            plot: None,
            rows: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_plot(mut self, x: &str, y: &str) -> Self {
        self.plot = Some((x.to_string(), y.to_string()));
        self
    }

    /// Appends a row given as `(column, value)` pairs; missing columns stay empty.
    pub fn row(&mut self, anchor: &str, cells: Vec<(&str, Value)>) {
        let mut r = vec![Value::Null; self.columns.len()];
        r[0] = Value::String(anchor.to_string());
        for (k, v) in cells {
            let i = self
                .columns
                .iter()
                .position(|c| c == k)
                .unwrap_or_else(|| panic!("unknown column {k}"));
            r[i] = v;
        }
        self.rows.push(r);
    }

    pub fn check(&mut self, anchor: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            anchor: anchor.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Column values by name, for tests and downstream fitting.
    pub fn column(&self, name: &str) -> Vec<&Value> {
        let i = self.columns.iter().position(|c| c == name);
        self.rows
            .iter()
            .map(|r| i.map(|i| &r[i]).unwrap_or(&Value::Null))
            .collect()
    }

    /// Everything after the designated timestamp line.
    pub fn csv_body(&self) -> String {
        let mut s = String::new();
        let cfg = serde_json::json!({ "experiment": self.experiment, "parameters": self.config });
        writeln!(s, "# config={cfg}").unwrap();
        if let Some((x, y)) = &self.plot {
            writeln!(s, "# plot x={x} y={y}").unwrap();
        }
        for c in &self.checks {
            let flag = if c.passed { "pass" } else { "fail" };
            writeln!(s, "# check {} {flag} {}", c.anchor, c.detail.replace('\n', " ")).unwrap();
        }
        for n in &self.notes {
            writeln!(s, "# note {}", n.replace('\n', " ")).unwrap();
        }
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(csv_cell).collect();
            writeln!(s, "{}", cells.join(",")).unwrap();
        }
        s
    }

    pub fn to_csv(&self, generated_unix: u64) -> String {
        format!(
            "# config-hash={} tool-version={}\n# generated-unix={generated_unix}\n{}",
            self.config_hash,
            self.tool_version,
            self.csv_body()
        )
    }

    pub fn to_json(&self, generated_unix: u64) -> String {
        let mut v = serde_json::to_value(self).expect("report serialises");
        v["generated_unix"] = Value::from(generated_unix);
        serde_json::to_string_pretty(&v).expect("report serialises")
    }

    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<(), ExperimentError> {
        let now = unix_now();
        let text = match format {
            OutputFormat::Csv => self.to_csv(now),
            OutputFormat::Json => self.to_json(now),
        };
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON cell for a float; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

/// Order-preserving parallel map over grid points.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(items.len());
    if threads <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let out: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                out.lock().unwrap()[i] = Some(r);
            });
        }
    });
    out.into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every index visited"))
        .collect()
}

/// Seeded ChaCha stream of uniform draws in `[lo, hi]`.
pub fn seeded_uniform(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(lo..=hi)).collect()
}

/// Smoothed polynomial, loaded from `$LPZETA_CACHE_DIR` when a matching file
/// exists and written there after a fresh build.
pub fn cached_smoothed(
    p: f64,
    n: u32,
    big_n: f64,
    signed: bool,
    spf: &SpfTable,
) -> Result<SmoothedPolynomial, ExperimentError> {
    let Some(dir) = std::env::var_os(CACHE_ENV).map(PathBuf::from) else {
        return Ok(build_smoothed(p, n, big_n, signed, spf)?);
    };
    let name = format!(
        "smoothed-p{:016x}-n{n}-N{:016x}-{}.bin",
        p.to_bits(),
        big_n.to_bits(),
        if signed { "signed" } else { "plain" }
    );
    let path = dir.join(name);
    if let Ok(f) = std::fs::File::open(&path) {
        if let Ok(poly) = SmoothedPolynomial::load(std::io::BufReader::new(f)) {
            if poly.p() == p && poly.n() == n && poly.big_n() == big_n && poly.signed() == signed {
                return Ok(poly);
            }
        }
    }
    let poly = build_smoothed(p, n, big_n, signed, spf)?;
    std::fs::create_dir_all(&dir)?;
    let tmp = dir.join(format!(".{}.tmp", std::process::id()));
    {
        let f = std::fs::File::create(&tmp)?;
        poly.dump(std::io::BufWriter::new(f))?;
    }
    std::fs::rename(&tmp, &path)?;
    Ok(poly)
}

/// Least-squares slope of `y` on `x` with its standard error.
pub fn fit_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    if x.len() < 3 {
        return (slope, f64::NAN);
    }
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - my - slope * (a - mx)).powi(2))
        .sum();
    (slope, (ssr / (n - 2.0) / sxx).sqrt())
}

/// `0..=count` evenly spaced points from `lo` to `hi` built from integer indices.
pub fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 0 {
        return vec![lo];
    }
    (0..=count)
        .map(|k| lo + (hi - lo) * k as f64 / count as f64)
        .collect()
}

fn bad(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::InvalidParameters(msg.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_names_roundtrip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert_eq!("Theorem3".parse::<Experiment>().unwrap(), Experiment::Theorem3);
        assert!("nope".parse::<Experiment>().is_err());
    }

    #[test]
    fn hash_ignores_key_order() {
        let a = serde_json::json!({"a": 1, "b": [1, 2]});
        let b: Value = serde_json::from_str(r#"{"b":[1,2],"a":1}"#).unwrap();
        assert_eq!(config_hash(Experiment::Moment, &a), config_hash(Experiment::Moment, &b));
        assert_ne!(config_hash(Experiment::Moment, &a), config_hash(Experiment::Parseval, &a));
    }

    #[test]
    fn csv_layout() {
        #[derive(Serialize)]
        struct P {
            x: f64,
        }
        let mut r = Report::new(Experiment::Moment, &P { x: 1.5 }, &["a", "b"]).with_plot("a", "b");
        r.row("first", vec![("a", num(1.0)), ("b", Value::from("x,y"))]);
        r.row("second", vec![("b", num(f64::NAN))]);
        r.check("first", true, "ok");
        let csv = r.to_csv(42);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], format!("# config-hash={} tool-version={TOOL_VERSION}", r.config_hash));
        assert_eq!(lines[1], "# generated-unix=42");
        assert!(csv.ends_with("anchor,a,b\nfirst,1.0,\"x,y\"\nsecond,,nan\n"));
        assert_eq!(r.to_csv(7).lines().skip(2).collect::<Vec<_>>(), lines[2..].to_vec());
    }

    #[test]
    fn par_map_keeps_order() {
        let v: Vec<u64> = (0..100).collect();
        assert_eq!(par_map(&v, |x| x * x), v.iter().map(|x| x * x).collect::<Vec<_>>());
    }

    #[test]
    fn seeded_draws_repeat() {
        let a = seeded_uniform(9, 5, 0.0, 1e6);
        assert_eq!(a, seeded_uniform(9, 5, 0.0, 1e6));
        assert_ne!(a, seeded_uniform(10, 5, 0.0, 1e6));
        assert!(a.iter().all(|x| (0.0..=1e6).contains(x)));
    }

    #[test]
    fn slope_of_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v + 2.0).collect();
        let (s, se) = fit_slope(&x, &y);
        assert!((s - 0.5).abs() < 1e-14);
        assert!(se < 1e-12);
    }

    #[test]
    fn unknown_parameter_is_rejected() {
        let cfg = ExperimentConfig::new(Experiment::KernelCheck).with("bogus", 1);
        assert!(matches!(cfg.run(), Err(ExperimentError::InvalidParameters(_))));
    }
}
