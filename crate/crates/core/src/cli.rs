//! Command-line front end.
//!
//! Reads a CSV matrix (one row per line) and an optional weights file (one
//! value per line), runs the requested mode, and renders a JSON report.
//! Column indices in the report are 1-based.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::generate::{matrix_with_spectrum, SpectrumShape};
use crate::linalg::{numerical_rank, DenseMatrix, WeightVector};
use crate::oracle::{self, Budgets};
use crate::selection::{
    bound_rank, certification_slack, greedy_select_with, select_stable, BoundReport, SelectionResult, Tolerances,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Greedy selection of `k` columns, certified against the rank bound.
    Rank,
    /// Selection at the stable-rank size for `epsilon`.
    Stable,
    /// Stable-rank selection with columns normalized to unit length.
    Normalized,
    /// Rank mode plus exhaustive oracle checks.
    Verify,
    /// Seeded synthetic matrices and a bound-tightness table.
    Bench,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Rank => "rank",
            Mode::Stable => "stable",
            Mode::Normalized => "normalized",
            Mode::Verify => "verify",
            Mode::Bench => "bench",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumArg {
    Flat,
    #[value(name = "decay", alias = "decay-1/sqrt(i)")]
    Decay,
    Spiked,
}

impl From<SpectrumArg> for SpectrumShape {
    fn from(s: SpectrumArg) -> Self {
        match s {
            SpectrumArg::Flat => SpectrumShape::Flat,
            SpectrumArg::Decay => SpectrumShape::Decay,
            SpectrumArg::Spiked => SpectrumShape::Spiked,
        }
    }
}

/// Parsed command line.
#[derive(Debug, Clone, Parser)]
#[command(name = "rinv", version, about = "Column subset selection with smallest-singular-value certificates")]
pub struct RunConfig {
    /// CSV matrix, one row per line.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Column weights, one per line; defaults to all ones.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Number of columns to select (rank and verify modes)
    #[arg(long)]
    pub k: Option<usize>,
    /// Singular-value threshold for the rank bound; defaults to the numerical rank.
    #[arg(long)]
    pub r: Option<usize>,
    /// Target fraction in (0, 1) for stable and normalized modes
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Seed for bench-mode matrices.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bench-mode spectrum; all shapes when omitted.
    #[arg(long, value_enum)]
    pub spectrum: Option<SpectrumArg>,
    /// Relative imaginary-part tolerance for polynomial roots
    #[arg(long)]
    pub imag_tol: Option<f64>,
    /// Relative singular-value cutoff for numerical rank
    #[arg(long)]
    pub rank_tol: Option<f64>,
    /// Enumeration budget for every oracle in verify mode.
    #[arg(long)]
    pub budget: Option<u128>,
    /// Bench-mode row count.
    #[arg(long = "n", default_value_t = 6)]
    pub rows: usize,
    /// Bench-mode column count.
    #[arg(long = "m", default_value_t = 8)]
    pub cols: usize,
}

impl RunConfig {
    /// A config for `mode` with every optional field unset.
    pub fn new(mode: Mode) -> Self {
        Self {
            matrix: None,
            weights: None,
            mode,
            k: None,
            r: None,
            epsilon: None,
            seed: None,
            spectrum: None,
            imag_tol: None,
            rank_tol: None,
            budget: None,
            rows: 6,
            cols: 8,
        }
    }

    fn tolerances(&self) -> Tolerances {
        let mut tol = Tolerances::default();
        if let Some(t) = self.imag_tol {
            tol.imag = t;
        }
        if let Some(t) = self.rank_tol {
            tol.rank_rel = t;
        }
        tol
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Selection(#[from] crate::Error),
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// 0 on success, 1 on input error, 2 when a certificate or oracle check fails.
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Serialize)]
struct OracleJson {
    best_subset: Vec<usize>,
    best_value: f64,
    expected_poly_match: bool,
    expected_poly_deviation: f64,
    interlacing_ok: bool,
    greedy_within_optimum: bool,
}

impl OracleJson {
    fn passed(&self) -> bool {
        self.expected_poly_match && self.interlacing_ok && self.greedy_within_optimum
    }
}

#[derive(Debug, Serialize)]
struct SelectionJson {
    mode: &'static str,
    n: usize,
    m: usize,
    k: usize,
    subset: Vec<usize>,
    sigma_min: f64,
    sigma_min_sq: f64,
    lambda_trace: Vec<f64>,
    bound_report: BoundReport,
    certified: bool,
    max_residual_imag: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleJson>,
}

impl SelectionJson {
    fn new(mode: Mode, a: &DenseMatrix, res: SelectionResult) -> Self {
        Self {
            mode: mode.name(),
            n: a.nrows(),
            m: a.ncols(),
            k: res.subset.len(),
            subset: one_based(&res.subset),
            sigma_min: res.sigma_min(),
            sigma_min_sq: res.sigma_min_sq,
            certified: res.is_certified(),
            max_residual_imag: res.max_residual_imag,
            lambda_trace: res.lambda_trace,
            bound_report: res.bound_report,
            oracle: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct BenchRow {
    spectrum: &'static str,
    k: usize,
    sigma_min_sq: f64,
    expected_root: f64,
    rank_bound: f64,
    best_rank_bound: f64,
    best_r: usize,
    stable_bound: f64,
    tightness: f64,
    certified: bool,
}

#[derive(Debug, Serialize)]
struct BenchJson {
    mode: &'static str,
    seed: u64,
    n: usize,
    m: usize,
    rows: Vec<BenchRow>,
    certified: bool,
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

/// Formats every float with 17 significant digits.
struct SigDigitsFormatter;

impl serde_json::ser::Formatter for SigDigitsFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitsFormatter);
    value.serialize(&mut ser).expect("report serialization cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Parse { path: path.to_owned(), message: e.to_string() })?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Parse { path: path.to_owned(), message: e.to_string() })?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| CliError::Parse {
                    path: path.to_owned(),
                    message: format!("line {}: `{field}` is not a number", line + 1),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Parse { path: path.to_owned(), message: "no rows".into() });
    }
    Ok(DenseMatrix::from_rows(&rows)?)
}

pub fn read_weights(path: &Path) -> Result<WeightVector, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    let weights = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<f64>().map_err(|_| CliError::Parse {
                path: path.to_owned(),
                message: format!("line {}: `{}` is not a number", i + 1, l.trim()),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WeightVector::new(weights)?)
}

fn require<T: Copy>(value: Option<T>, flag: &str, mode: Mode) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--mode {} requires {flag}", mode.name())))
}

fn load_inputs(config: &RunConfig) -> Result<(DenseMatrix, WeightVector), CliError> {
    let path = config
        .matrix
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("--mode {} requires --matrix", config.mode.name())))?;
    let a = read_matrix(path)?;
    let w = match &config.weights {
        Some(p) => read_weights(p)?,
        None => WeightVector::ones(a.ncols()),
    };
    w.check_columns(&a)?;
    Ok((a, w))
}

/// Executes one invocation and collects its output; never panics on bad input.
pub fn run(config: &RunConfig) -> RunOutput {
    match execute(config) {
        Ok((ok, stdout, stderr)) => RunOutput { exit_code: if ok { 0 } else { 2 }, stdout, stderr },
        Err(e) => RunOutput {
            exit_code: 1,
            stdout: to_json(&serde_json::json!({ "error": e.to_string() })),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn execute(config: &RunConfig) -> Result<(bool, String, String), CliError> {
    let tol = config.tolerances();
    let mode = config.mode;
    match mode {
        Mode::Rank | Mode::Verify => {
            let k = require(config.k, "--k", mode)?;
            let (a, w) = load_inputs(config)?;
            let res = greedy_select_with(&a, &w, k, config.r, &tol)?;
            let mut report = SelectionJson::new(mode, &a, res);
            let mut ok = report.certified;
            if mode == Mode::Verify {
                let budgets = config.budget.map(Budgets::uniform).unwrap_or_default();
                let oracle = oracle::verify(&a, &w, k, &budgets)?;
                let json = OracleJson {
                    greedy_within_optimum: report.sigma_min <= oracle.best_value + 1e-9,
                    best_subset: one_based(&oracle.best_subset),
                    best_value: oracle.best_value,
                    expected_poly_match: oracle.expected_poly_match,
                    expected_poly_deviation: oracle.expected_poly_deviation,
                    interlacing_ok: oracle.interlacing_ok,
                };
                ok &= json.passed();
                report.oracle = Some(json);
            }
            Ok((ok, to_json(&report), String::new()))
        }
        Mode::Stable | Mode::Normalized => {
            let epsilon = require(config.epsilon, "--epsilon", mode)?;
            let (a, mut w) = load_inputs(config)?;
            if mode == Mode::Normalized {
                w = WeightVector::column_normalizing(&a)?;
            }
            let mut res = select_stable(&a, &w, epsilon, &tol)?;
            if mode == Mode::Normalized {
                // ||A||_F = ||W^{-1}||_F under this weighting, so the bound is exactly epsilon.
                res.bound_report.stable_bound = epsilon * epsilon;
            }
            let report = SelectionJson::new(mode, &a, res);
            Ok((report.certified, to_json(&report), String::new()))
        }
        Mode::Bench => bench(config, &tol),
    }
}

fn bench(config: &RunConfig, tol: &Tolerances) -> Result<(bool, String, String), CliError> {
    if config.rows == 0 || config.cols == 0 {
        return Err(CliError::Usage("--n and --m must be positive".into()));
    }
    let seed = config.seed.unwrap_or(0);
    let shapes: Vec<SpectrumShape> = match config.spectrum {
        Some(s) => vec![s.into()],
        None => SpectrumShape::ALL.to_vec(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for shape in shapes {
        let a = matrix_with_spectrum(&mut rng, config.rows, config.cols, shape);
        let w = WeightVector::ones(a.ncols());
        let rank = numerical_rank(&a, tol.rank_rel);
        for k in 1..=rank {
            let res = greedy_select_with(&a, &w, k, None, tol)?;
            let (best_r, best_rank_bound) = (k..=rank)
                .map(|r| bound_rank(&a, &w, k, r).map(|b| (r, b)))
                .collect::<crate::Result<Vec<_>>>()?
                .into_iter()
                .fold((k, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
            let guaranteed = res.guaranteed_bound().max(best_rank_bound);
            rows.push(BenchRow {
                spectrum: shape.name(),
                k,
                sigma_min_sq: res.sigma_min_sq,
                expected_root: res.expected_root(),
                rank_bound: res.bound_report.rank_bound,
                best_rank_bound,
                best_r,
                stable_bound: res.bound_report.stable_bound,
                tightness: guaranteed / res.sigma_min_sq,
                certified: res.sigma_min_sq >= guaranteed - certification_slack(guaranteed),
            });
        }
    }

    let mut table = String::new();
    let _ = writeln!(
        table,
        "{:<16} {:>3} {:>12} {:>12} {:>12} {:>12} {:>4} {:>12} {:>9}",
        "spectrum", "k", "sigma_min^2", "lambda_k(f)", "rank_bound", "best_rank", "r*", "stable", "tightness"
    );
    for r in &rows {
        let _ = writeln!(
            table,
            "{:<16} {:>3} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>4} {:>12.5e} {:>9.4}",
            r.spectrum, r.k, r.sigma_min_sq, r.expected_root, r.rank_bound, r.best_rank_bound, r.best_r, r.stable_bound, r.tightness
        );
    }
    let certified = rows.iter().all(|r| r.certified);
    let report = BenchJson { mode: "bench", seed, n: config.rows, m: config.cols, rows, certified };
    Ok((certified, to_json(&report), table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_seventeen_digits() {
        let s = to_json(&serde_json::json!({ "x": 0.1, "y": [1.0], "z": f64::NAN }));
        assert_eq!(s, r#"{"x":1.0000000000000001e-1,"y":[1.0000000000000000e0],"z":null}"#);
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn missing_required_flags_are_usage_errors() {
        let out = run(&RunConfig::new(Mode::Rank));
        assert_eq!(out.exit_code, 1);
        assert!(out.stderr.contains("--k"));
        let mut cfg = RunConfig::new(Mode::Stable);
        cfg.matrix = Some("unused.csv".into());
        let out = run(&cfg);
        assert_eq!(out.exit_code, 1);
        assert!(out.stderr.contains("--epsilon"));
    }

    #[test]
    fn parses_flags() {
        let cfg = RunConfig::try_parse_from([
            "rinv", "--matrix", "a.csv", "--mode", "verify", "--k", "3", "--budget", "500", "--rank-tol", "1e-8",
        ])
        .unwrap();
        assert_eq!(cfg.mode, Mode::Verify);
        assert_eq!(cfg.k, Some(3));
        assert_eq!(cfg.budget, Some(500));
        assert_eq!(cfg.tolerances().rank_rel, 1e-8);
        let cfg = RunConfig::try_parse_from(["rinv", "--mode", "bench", "--spectrum", "decay-1/sqrt(i)"]).unwrap();
        assert_eq!(cfg.spectrum, Some(SpectrumArg::Decay));
        assert!(RunConfig::try_parse_from(["rinv", "--mode", "nope"]).is_err());
    }
}
