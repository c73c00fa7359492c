//! The `casimir` command-line driver.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{self, expected_sign, scaled_value, SCALED_LOG_BASE};
use crate::arithmetic::{to_sig_digits, PrecisionContext};
use crate::energy::{self, BoundaryCondition, EnergyResult};
use crate::error::Error;
use crate::oracle::{self, CutoffGrid};

pub const SCHEMA_VERSION: &str = "1";
pub const UNITS: &str = "beta";

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INSUFFICIENT_PRECISION: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

const SCAN_COLUMNS: [&str; 5] = ["D", "energy_beta", "sign", "scaled", "cancellation_digits_lost"];

#[derive(Debug, Parser)]
#[command(
    name = "casimir",
    version,
    about = "Casimir energy of a perfect fluid in a D-hypercube"
)]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON-lines result cache (compute and scan).
    #[arg(long, env = "CASIMIR_CACHE", global = true)]
    pub cache: Option<PathBuf>,
    /// Omit the generation timestamp from JSON output.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One energy with cancellation diagnostics.
    Compute {
        #[arg(long, default_value = "dirichlet", value_parser = parse_bc)]
        bc: BoundaryCondition,
        #[arg(long)]
        dim: u32,
        #[arg(long, default_value_t = 50)]
        digits: u32,
    },
    /// Energies and scaled values over a dimension range.
    Scan {
        #[arg(long, default_value = "dirichlet", value_parser = parse_bc)]
        bc: BoundaryCondition,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        #[arg(long, default_value_t = 50)]
        digits: u32,
    },
    /// Brute-force mode-sum fit, or the exact Neumann-sign check.
    Oracle {
        #[arg(long, required_unless_present = "appendix_b")]
        dim: Option<u32>,
        #[arg(long, default_value = "dirichlet", value_parser = parse_bc)]
        bc: BoundaryCondition,
        #[arg(long, default_value_t = 50)]
        digits: u32,
        #[arg(long, default_value_t = 0.4)]
        grid_start: f64,
        #[arg(long, default_value_t = 0.8)]
        grid_ratio: f64,
        #[arg(long, default_value_t = 12)]
        grid_points: usize,
        /// Modes with a·r above this are dropped.
        #[arg(long, default_value_t = 45.0)]
        threshold: f64,
        #[arg(long)]
        appendix_b: bool,
        #[arg(long, default_value_t = 60)]
        max_dim: u32,
    },
    /// Dirichlet energies at fixed decimal widths against a reference.
    PrecisionStudy {
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        digits: Vec<u32>,
        #[arg(long, default_value_t = 100)]
        reference: u32,
        /// Significant digits written per value.
        #[arg(long, default_value_t = 10)]
        sig: u32,
    },
}

fn parse_bc(s: &str) -> Result<BoundaryCondition, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Tabular payload plus everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, Value>,
    pub units: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
}

impl OutputRecord {
    fn new(command: &str, parameters: BTreeMap<String, Value>, columns: &[&str]) -> Self {
        OutputRecord {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            parameters,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            units: UNITS.into(),
            generated_unix: None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug)]
pub struct CliFailure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) => EXIT_USAGE,
            Error::InsufficientPrecision { .. } => EXIT_INSUFFICIENT_PRECISION,
            Error::IllConditioned { .. } | Error::Numerical(_) => EXIT_NUMERICAL,
        };
        CliFailure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliFailure {
    fn from(e: io::Error) -> Self {
        CliFailure {
            code: EXIT_NUMERICAL,
            message: format!("i/o error: {e}"),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliFailure {
    CliFailure {
        code: EXIT_USAGE,
        message: msg.into(),
    }
}

#[derive(Serialize, Deserialize)]
struct CacheKey {
    schema_version: String,
    command: String,
    bc: BoundaryCondition,
    dim: u32,
    digits: u32,
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    key: CacheKey,
    row: Vec<String>,
}

/// Append-only JSON-lines cache of energy rows. Lines that fail to parse are
/// ignored individually.
struct RowCache {
    path: PathBuf,
    rows: HashMap<String, Vec<String>>,
}

impl RowCache {
    fn key(command: &str, bc: BoundaryCondition, dim: u32, digits: u32) -> CacheKey {
        CacheKey {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            bc,
            dim,
            digits,
        }
    }

    fn id(key: &CacheKey) -> String {
        serde_json::to_string(key).unwrap()
    }

    fn open(path: &Path) -> io::Result<Self> {
        let mut rows = HashMap::new();
        match fs::read_to_string(path) {
            Ok(text) => {
                for line in text.lines() {
                    if let Ok(entry) = serde_json::from_str::<CacheLine>(line) {
                        rows.insert(Self::id(&entry.key), entry.row);
                    }
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        Ok(RowCache {
            path: path.to_path_buf(),
            rows,
        })
    }

    fn get(&self, key: &CacheKey) -> Option<&Vec<String>> {
        self.rows.get(&Self::id(key))
    }

    fn put(&mut self, key: CacheKey, row: Vec<String>) -> io::Result<()> {
        let line = serde_json::to_string(&CacheLine { key, row: row.clone() }).unwrap();
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        // A torn earlier write leaves no newline; start on a fresh line.
        writeln!(file, "\n{line}")?;
        let entry: CacheLine = serde_json::from_str(&line).unwrap();
        self.rows.insert(Self::id(&entry.key), row);
        Ok(())
    }
}

fn scaled_cell(r: &EnergyResult, sig: u32) -> String {
    match scaled_value(r) {
        Ok(s) => to_sig_digits(&s, sig).unwrap_or_default(),
        Err(_) => String::new(),
    }
}

fn scan_row(r: &EnergyResult) -> crate::Result<Vec<String>> {
    let sig = r.context.target_digits();
    Ok(vec![
        r.dimension.to_string(),
        to_sig_digits(&r.value, sig)?,
        r.sign.symbol().into(),
        scaled_cell(r, sig),
        format!("{:.3}", r.cancellation_digits_lost),
    ])
}

fn compute_row(r: &EnergyResult) -> crate::Result<Vec<String>> {
    let sig = r.context.target_digits();
    let mut row = scan_row(r)?;
    row.insert(1, r.bc.as_str().into());
    row.push(to_sig_digits(&r.max_abs_term, sig)?);
    row.push(r.context.working_digits().to_string());
    Ok(row)
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn cmd_compute(
    bc: BoundaryCondition,
    dim: u32,
    digits: u32,
    cache: Option<&mut RowCache>,
) -> Result<OutputRecord, CliFailure> {
    if dim == 0 {
        return Err(usage("--dim must be a positive integer"));
    }
    let ctx = PrecisionContext::new(digits)?;
    let mut rec = OutputRecord::new(
        "compute",
        params(&[
            ("bc", json!(bc)),
            ("dim", json!(dim)),
            ("digits", json!(digits)),
            ("significant_digits", json!(digits)),
        ]),
        &[
            "D",
            "bc",
            "energy_beta",
            "sign",
            "scaled",
            "cancellation_digits_lost",
            "max_abs_term",
            "working_digits",
        ],
    );
    let key = RowCache::key("compute", bc, dim, digits);
    let row = match cache.as_ref().and_then(|c| c.get(&key)) {
        Some(row) => row.clone(),
        None => {
            let row = compute_row(&energy::energy(bc, dim, &ctx)?)?;
            if let Some(c) = cache {
                c.put(key, row.clone())?;
            }
            row
        }
    };
    rec.rows.push(row);
    Ok(rec)
}

fn cmd_scan(
    bc: BoundaryCondition,
    from: u32,
    to: u32,
    digits: u32,
    cache: Option<&mut RowCache>,
) -> Result<OutputRecord, CliFailure> {
    if from == 0 || from > to {
        return Err(usage(format!(
            "scan range requires 1 <= --from <= --to, got {from}..{to}"
        )));
    }
    let ctx = PrecisionContext::new(digits)?;
    let mut rec = OutputRecord::new(
        "scan",
        params(&[
            ("bc", json!(bc)),
            ("from", json!(from)),
            ("to", json!(to)),
            ("digits", json!(digits)),
            ("significant_digits", json!(digits)),
            ("scaled_log_base", json!(SCALED_LOG_BASE)),
        ]),
        &SCAN_COLUMNS,
    );
    match cache {
        None => {
            let report = analysis::scan(bc, from, to, &ctx)?;
            for r in &report.results {
                rec.rows.push(scan_row(r)?);
            }
        }
        Some(cache) => {
            for d in from..=to {
                let key = RowCache::key("scan", bc, d, digits);
                let row = match cache.get(&key) {
                    Some(row) => row.clone(),
                    None => {
                        let row = scan_row(&energy::energy(bc, d, &ctx)?)?;
                        cache.put(key, row.clone())?;
                        row
                    }
                };
                rec.rows.push(row);
            }
        }
    }
    // Derived from the rows so cached and fresh runs summarize identically.
    let mut violations = Vec::new();
    let mut critical = None;
    for row in &rec.rows {
        let d: u32 = row[0].parse().map_err(|_| usage("corrupt cached row"))?;
        let sign = row[2].as_str();
        if bc == BoundaryCondition::Dirichlet && critical.is_none() && d.is_multiple_of(2) && sign == "-" {
            critical = Some(d);
        }
        if expected_sign(bc, d).symbol() != sign {
            violations.push(d);
        }
    }
    if bc == BoundaryCondition::Dirichlet {
        rec.summary.insert("critical_dimension".into(), json!(critical));
    }
    rec.summary.insert("sign_pattern_violations".into(), json!(violations));
    Ok(rec)
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    dim: Option<u32>,
    bc: BoundaryCondition,
    digits: u32,
    grid_start: f64,
    grid_ratio: f64,
    grid_points: usize,
    threshold: f64,
    appendix_b: bool,
    max_dim: u32,
) -> Result<OutputRecord, CliFailure> {
    if appendix_b {
        if max_dim == 0 {
            return Err(usage("--max-dim must be a positive integer"));
        }
        let report = oracle::verify_neumann_negativity(max_dim);
        let mut rec = OutputRecord::new(
            "oracle",
            params(&[("appendix_b", json!(true)), ("max_dim", json!(max_dim))]),
            &["max_dim", "pairs_checked", "violations"],
        );
        rec.rows.push(vec![
            max_dim.to_string(),
            report.pairs_checked.to_string(),
            report.violations.len().to_string(),
        ]);
        let listed: Vec<Value> = report
            .violations
            .iter()
            .map(|v| json!({"dim": v.dimension, "i": v.index, "kind": format!("{:?}", v.kind)}))
            .collect();
        rec.summary.insert("violations".into(), Value::Array(listed));
        rec.summary.insert("passed".into(), json!(report.passed()));
        return Ok(rec);
    }
    let dim = dim.ok_or_else(|| usage("--dim is required unless --appendix-b is given"))?;
    if dim == 0 || dim > oracle::MAX_FIT_DIMENSION {
        return Err(usage(format!(
            "oracle extraction is limited to 1 <= D <= {}, got {dim}",
            oracle::MAX_FIT_DIMENSION
        )));
    }
    let ctx = PrecisionContext::new(digits)?;
    let grid = CutoffGrid::geometric(grid_start, grid_ratio, grid_points, threshold, ctx.working_digits())?;
    let fit = oracle::extract_constant(dim, bc, &grid, &ctx)?;
    let exact = energy::energy(bc, dim, &ctx)?.value;
    let diff = fit.extracted_constant.add_with(&-&exact, ctx.working_digits()).abs();
    let mut rec = OutputRecord::new(
        "oracle",
        params(&[
            ("bc", json!(bc)),
            ("dim", json!(dim)),
            ("digits", json!(digits)),
            ("grid_start", json!(grid_start)),
            ("grid_ratio", json!(grid_ratio)),
            ("grid_points", json!(grid_points)),
            ("threshold", json!(threshold)),
            ("significant_digits", json!(12)),
        ]),
        &["a", "regularized_sum"],
    );
    for (a, s) in fit.grid.values().iter().zip(&fit.samples) {
        rec.rows.push(vec![to_sig_digits(a, 12)?, to_sig_digits(s, 12)?]);
    }
    let cell = |x| to_sig_digits(x, 12).map(Value::String);
    rec.summary
        .insert("extracted_constant".into(), cell(&fit.extracted_constant)?);
    rec.summary.insert("closed_form".into(), cell(&exact)?);
    rec.summary
        .insert("abs_difference".into(), to_sig_digits(&diff, 3).map(Value::String)?);
    rec.summary.insert(
        "max_residual".into(),
        to_sig_digits(&fit.max_residual, 3).map(Value::String)?,
    );
    rec.summary.insert(
        "max_relative_residual".into(),
        json!(format!("{:.3e}", fit.max_relative_residual)),
    );
    rec.summary
        .insert("condition_log10".into(), json!(format!("{:.2}", fit.condition_log10)));
    rec.summary.insert("basis_exponents".into(), json!(fit.basis_exponents));
    Ok(rec)
}

fn cmd_precision_study(
    from: u32,
    to: u32,
    digits: &[u32],
    reference: u32,
    sig: u32,
) -> Result<OutputRecord, CliFailure> {
    if digits.is_empty() {
        return Err(usage("--digits needs at least one setting"));
    }
    if sig == 0 {
        return Err(usage("--sig must be positive"));
    }
    let report = analysis::precision_study(from, to, digits, reference)?;
    let mut columns = vec!["D".to_string(), format!("digits_{reference}")];
    columns.extend(report.digit_settings.iter().map(|d| format!("digits_{d}")));
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut rec = OutputRecord::new(
        "precision-study",
        params(&[
            ("from", json!(from)),
            ("to", json!(to)),
            ("digits", json!(report.digit_settings)),
            ("reference", json!(reference)),
            ("significant_digits", json!(sig)),
            (
                "summation",
                json!("ascending-p, rounded half-even after every operation"),
            ),
        ]),
        &column_refs,
    );
    for d in report.dimensions() {
        let mut row = vec![d.to_string(), to_sig_digits(report.reference_value(d).unwrap(), sig)?];
        for s in &report.digit_settings {
            row.push(to_sig_digits(report.value(*s, d).unwrap(), sig)?);
        }
        rec.rows.push(row);
    }
    for (d, outcome) in &report.per_setting {
        rec.summary.insert(
            format!("first_first_digit_error_{d}"),
            json!(outcome.first_first_digit_error),
        );
        rec.summary
            .insert(format!("first_sign_error_{d}"), json!(outcome.first_sign_error));
    }
    Ok(rec)
}

fn summary_text(rec: &OutputRecord) -> String {
    rec.summary
        .iter()
        .map(|(k, v)| format!("{k}: {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Runs a parsed command line and returns the rendered output.
pub fn execute(cli: &Cli) -> Result<OutputRecord, CliFailure> {
    let mut cache = match &cli.output.cache {
        Some(p) => Some(RowCache::open(p)?),
        None => None,
    };
    let mut rec = match &cli.command {
        Command::Compute { bc, dim, digits } => cmd_compute(*bc, *dim, *digits, cache.as_mut())?,
        Command::Scan { bc, from, to, digits } => cmd_scan(*bc, *from, *to, *digits, cache.as_mut())?,
        Command::Oracle {
            dim,
            bc,
            digits,
            grid_start,
            grid_ratio,
            grid_points,
            threshold,
            appendix_b,
            max_dim,
        } => cmd_oracle(
            *dim,
            *bc,
            *digits,
            *grid_start,
            *grid_ratio,
            *grid_points,
            *threshold,
            *appendix_b,
            *max_dim,
        )?,
        Command::PrecisionStudy {
            from,
            to,
            digits,
            reference,
            sig,
        } => cmd_precision_study(*from, *to, digits, *reference, *sig)?,
    };
    if !cli.output.no_timestamp {
        rec.generated_unix = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
    }
    Ok(rec)
}

fn emit(cli: &Cli, rec: &OutputRecord) -> io::Result<()> {
    let text = match cli.output.format {
        Format::Csv => rec.to_csv(),
        Format::Json => rec.to_json(),
    };
    match &cli.output.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    // CSV carries only the table; the summary goes to stderr.
    if cli.output.format == Format::Csv && !rec.summary.is_empty() {
        eprintln!("{}", summary_text(rec));
    }
    Ok(())
}

pub fn main_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = execute(&cli).and_then(|rec| emit(&cli, &rec).map_err(CliFailure::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("casimir: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
