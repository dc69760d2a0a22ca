//! Command-line front end.
//!
//! A run is configured by one TOML file (every key optional), adjusted with
//! dotted `--set section.key=value` overrides. Results are assembled in
//! memory and written once at the end, so a failed run leaves no partial
//! output behind.
//!
//! ```toml
//! seed = 1
//! workers = 0          # 0 = all cores
//! out = "ber.csv"      # stdout when absent
//!
//! [ber]
//! nt = 128
//! k = 16
//! mod_order = 4
//! snr_db = [0, 5, 10, 15, 20, 25, 30]
//! frames = 1000
//! schemes = ["zf_fd", "quantized_zf", "ci_mapping", "symbol_scaling"]
//! beta = 0.0
//! p0 = 1.0
//! noiseless = false
//! channel_block = 1
//!
//! [eta]
//! nt_list = [16, 32, 48, 64, 80, 96, 112, 128]
//! k = 4
//! mod_order = 4
//! realizations = 500
//!
//! [complexity]
//! nt_list = [64, 96, 128, 256]
//! k = 8
//! n_max = 20
//!
//! [oracle]
//! nt_list = [2, 3, 4, 5, 6]
//! k = 2
//! mod_order = 4
//! instances = 40
//!
//! [proposition]
//! pairs = [[8, 2], [64, 8]]
//! trials = 1000
//! p0 = 1.0
//! mod_order = 4
//! massive_nt = 512
//! massive_k = 4
//! massive_trials = 200
//! scaling_tolerance = 0.1
//! ```

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complexity::{complexity_table, format_log10, symbol_scaling_stages};
use crate::sim::{
    compare_with_oracle, run_ber_sweep, run_eta_experiment, run_proposition_check, BerConfig, BerCurve, EtaConfig,
    EtaRow, OracleCompareConfig, OracleCompareRow, PropositionConfig, PropositionRow,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "onebit-ci",
    version,
    about = "1-bit DAC constructive-interference precoding experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration file; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output CSV path; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Master seed; overrides `seed` in the config
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Dotted-key override such as `ber.frames=500`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// BER against transmit SNR for the configured schemes.
    BerSweep,
    /// Fraction of relaxed LP components left inside the box.
    EtaTable,
    /// Analytical flop counts.
    ComplexityTable,
    /// Exhaustive-search bounds on small instances.
    OracleCompare,
    /// Closed-form CI beamformer checks.
    PropositionCheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::BerSweep => "ber-sweep",
            Command::EtaTable => "eta-table",
            Command::ComplexityTable => "complexity-table",
            Command::OracleCompare => "oracle-compare",
            Command::PropositionCheck => "proposition-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComplexityConfig {
    pub nt_list: Vec<usize>,
    pub k: usize,
    pub n_max: usize,
}

impl Default for ComplexityConfig {
    fn default() -> Self {
        Self {
            nt_list: vec![64, 96, 128, 256],
            k: 8,
            n_max: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub workers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub ber: BerConfig,
    pub eta: EtaConfig,
    pub complexity: ComplexityConfig,
    pub oracle: OracleCompareConfig,
    pub proposition: PropositionConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 1,
            workers: 0,
            out: None,
            ber: BerConfig::default(),
            eta: EtaConfig::default(),
            complexity: ComplexityConfig::default(),
            oracle: OracleCompareConfig::default(),
            proposition: PropositionConfig::default(),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    ConfigRead(PathBuf, io::Error),
    ConfigParse(PathBuf, String),
    Override(String),
    InvalidConfig(String),
    Experiment(crate::Error),
    Output(PathBuf, io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigRead(..) => 3,
            CliError::ConfigParse(..) => 4,
            CliError::Override(_) => 5,
            CliError::InvalidConfig(_) => 6,
            CliError::Experiment(_) => 7,
            CliError::Output(..) => 8,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::ConfigRead(p, e) => write!(f, "cannot read config file {}: {e}", p.display()),
            CliError::ConfigParse(p, e) => write!(f, "malformed config file {}: {e}", p.display()),
            CliError::Override(e) => write!(f, "bad --set override: {e}"),
            CliError::InvalidConfig(e) => write!(f, "invalid configuration: {e}"),
            CliError::Experiment(e) => write!(f, "experiment failed: {e}"),
            CliError::Output(p, e) => write!(f, "cannot write output {}: {e}", p.display()),
        }
    }
}

impl std::error::Error for CliError {}

/// Parses a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Applies `a.b.c=value` to `table`, creating intermediate tables.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Override(format!("expected KEY=VALUE, got '{assignment}'")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Override(format!("empty key segment in '{key}'")));
    }
    let (last, parents) = path.split_last().expect("split yields one segment");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Override(format!("'{p}' in '{key}' is not a section")))?;
    }
    cur.insert(last.to_string(), parse_value(raw.trim()));
    Ok(())
}

/// Reads the config file (if any), applies overrides and flags, and checks
/// the result against the schema.
pub fn load_config(cli: &Cli) -> Result<Config, CliError> {
    let mut table = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::ConfigRead(path.clone(), e))?;
            text.parse::<toml::Table>()
                .map_err(|e| CliError::ConfigParse(path.clone(), e.to_string().trim().to_string()))?
        }
        None => toml::Table::new(),
    };
    for s in &cli.set {
        apply_override(&mut table, s)?;
    }
    let mut cfg: Config = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::InvalidConfig(e.to_string().trim().to_string()))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

/// Finished experiment, not yet written anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: Command,
    /// `#` metadata lines, without the prefix.
    pub comments: Vec<String>,
    /// Header plus data rows.
    pub csv: String,
    /// One human-readable line per data row.
    pub summary: Vec<String>,
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.csv);
        out
    }
}

fn hash_of<T: Serialize>(section: &T, seed: u64) -> Result<String, CliError> {
    let text = toml::to_string(section).map_err(|e| CliError::InvalidConfig(e.to_string()))?;
    let digest = Sha256::digest(format!("seed = {seed}\n{text}").as_bytes());
    Ok(digest.iter().take(8).map(|b| format!("{b:02x}")).collect())
}

fn ber_report(cfg: &Config) -> Result<(String, Vec<String>), crate::Error> {
    let ber = BerConfig {
        seed: cfg.seed,
        workers: cfg.workers,
        ..cfg.ber.clone()
    };
    let curve: BerCurve = run_ber_sweep(&ber)?;
    let summary = curve
        .points
        .iter()
        .map(|p| {
            format!(
                "{} snr={} dB ber={:.3e} ({} errors / {} bits, {} failed frames)",
                p.scheme,
                p.snr_db,
                p.ber(),
                p.bit_errors,
                p.bits,
                p.failures
            )
        })
        .collect();
    Ok((curve.to_csv(), summary))
}

fn eta_report(cfg: &Config) -> Result<(String, Vec<String>), crate::Error> {
    let eta = EtaConfig {
        seed: cfg.seed,
        workers: cfg.workers,
        ..cfg.eta.clone()
    };
    let rows = run_eta_experiment(&eta)?;
    let mut csv = format!("{}\n", EtaRow::CSV_HEADER);
    let mut summary = Vec::new();
    for r in &rows {
        csv.push_str(&r.csv_line());
        summary.push(format!(
            "nt={} eta={:.2}% over {} realizations ({} LP failures)",
            r.nt,
            100.0 * r.mean_eta,
            r.realizations,
            r.failures
        ));
    }
    Ok((csv, summary))
}

fn complexity_report(cfg: &Config) -> Result<(String, Vec<String>), crate::Error> {
    let c = &cfg.complexity;
    let rows = complexity_table(&c.nt_list, c.k, c.n_max)?;
    let mut csv = String::from(
        "nt,k,n_max,exhaustive,ci_mapping,symbol_scaling,symbol_scaling_approx,pokemon,symbol_scaling_to_pokemon\n",
    );
    let mut summary = Vec::new();
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6}\n",
            r.nt,
            r.k,
            r.n_max,
            format_log10(r.log10_exhaustive, 6),
            r.ci_mapping,
            r.symbol_scaling,
            r.symbol_scaling_approx,
            r.pokemon,
            r.ratio_to_pokemon
        ));
        summary.push(format!(
            "nt={} exhaustive={} ci_mapping={:.3e} symbol_scaling={:.3e} pokemon={:.3e} ratio={:.3}",
            r.nt,
            format_log10(r.log10_exhaustive, 2),
            r.ci_mapping,
            r.symbol_scaling,
            r.pokemon,
            r.ratio_to_pokemon
        ));
    }
    Ok((csv, summary))
}

fn oracle_report(cfg: &Config) -> Result<(String, Vec<String>), crate::Error> {
    let o = OracleCompareConfig {
        seed: cfg.seed,
        workers: cfg.workers,
        ..cfg.oracle.clone()
    };
    let rows = compare_with_oracle(&o)?;
    let mut csv = format!("{}\n", OracleCompareRow::CSV_HEADER);
    let mut summary = Vec::new();
    for r in &rows {
        csv.push_str(&r.csv_line());
        summary.push(format!(
            "nt={} {}: relaxation {}/{}, scaling {}/{}, refine {}/{}, scaling optimal on {}",
            r.nt,
            if r.all_hold() { "bounds hold" } else { "BOUND VIOLATED" },
            r.relaxation_bound_ok,
            r.instances,
            r.scaling_bound_ok,
            r.instances,
            r.refine_ok,
            r.instances,
            r.scaling_optimal
        ));
    }
    Ok((csv, summary))
}

fn proposition_report(cfg: &Config) -> Result<(String, Vec<String>), crate::Error> {
    let p = PropositionConfig {
        seed: cfg.seed,
        workers: cfg.workers,
        ..cfg.proposition.clone()
    };
    let rows = run_proposition_check(&p)?;
    let mut csv = format!("{}\n", PropositionRow::CSV_HEADER);
    let mut summary = Vec::new();
    for r in &rows {
        csv.push_str(&r.csv_line());
        summary.push(format!(
            "{} nt={} k={}: {}/{} value={:.4} {}",
            r.check,
            r.nt,
            r.k,
            r.passes,
            r.trials,
            r.value,
            if r.passed { "pass" } else { "FAIL" }
        ));
    }
    Ok((csv, summary))
}

/// Runs `command` under `cfg`.
pub fn execute(command: Command, cfg: &Config) -> Result<Report, CliError> {
    let hash = match command {
        Command::BerSweep => hash_of(&cfg.ber, cfg.seed)?,
        Command::EtaTable => hash_of(&cfg.eta, cfg.seed)?,
        Command::ComplexityTable => hash_of(&cfg.complexity, cfg.seed)?,
        Command::OracleCompare => hash_of(&cfg.oracle, cfg.seed)?,
        Command::PropositionCheck => hash_of(&cfg.proposition, cfg.seed)?,
    };
    let mut comments = vec![
        format!("onebit-ci {VERSION} {}", command.name()),
        format!("config_hash: {hash}"),
        format!("seed: {}", cfg.seed),
    ];
    let (csv, summary) = match command {
        Command::BerSweep => ber_report(cfg),
        Command::EtaTable => eta_report(cfg),
        Command::ComplexityTable => {
            let s = symbol_scaling_stages(128, 8);
            comments.push("symbol_scaling is the exact stage sum 8*K*Nt + (2*Nt-1)*(2*K+2*Nt) + 16*Nt^2".into());
            comments.push("symbol_scaling_approx is the large-array form 20*Nt^2 + 12*K*Nt".into());
            comments.push(format!(
                "reference values quoted as 18*Nt^2 + 12*K*Nt (e.g. 3.05e5 at Nt=128, K=8) sit below the exact {:.3e} here",
                s.total()
            ));
            complexity_report(cfg)
        }
        Command::OracleCompare => oracle_report(cfg),
        Command::PropositionCheck => proposition_report(cfg),
    }
    .map_err(CliError::Experiment)?;
    Ok(Report {
        command,
        comments,
        csv,
        summary,
    })
}

fn check_writable(path: &Path) -> Result<(), CliError> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        return Err(CliError::Output(
            path.to_path_buf(),
            io::Error::new(io::ErrorKind::NotFound, "parent directory does not exist"),
        ));
    }
    if path.is_dir() {
        return Err(CliError::Output(
            path.to_path_buf(),
            io::Error::new(io::ErrorKind::InvalidInput, "path is a directory"),
        ));
    }
    Ok(())
}

/// Writes through a sibling temporary file so readers never see a
/// half-written result.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let err = |e| CliError::Output(path.to_path_buf(), e);
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(err)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        err(e)
    })
}

/// Loads the configuration, runs the command and writes the CSV.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let cfg = load_config(cli)?;
    if let Some(out) = &cfg.out {
        check_writable(out)?;
    }
    let report = execute(cli.command, &cfg)?;
    let text = report.to_csv();
    match &cfg.out {
        Some(out) => {
            write_atomic(out, &text)?;
            let mut stdout = io::stdout().lock();
            for line in &report.summary {
                let _ = writeln!(stdout, "{}: {line}", cli.command.name());
            }
        }
        None => {
            io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Output(PathBuf::from("<stdout>"), e))?;
            let mut stderr = io::stderr().lock();
            for line in &report.summary {
                let _ = writeln!(stderr, "{}: {line}", cli.command.name());
            }
        }
    }
    Ok(report)
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
