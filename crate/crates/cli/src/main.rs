mod input;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::RngCore;
use serde::Serialize;

use ecfnorm::null::table_from_statistics;
use ecfnorm::statistic::M1_EXACT_DEFAULT_CAP;
use ecfnorm::{
    decide, m1_exact, m_stat, p_value, run_suite, simulate_null, simulate_null_statistics,
    standardize, AlternativeSpec, CriticalValueTable, NullSimConfig, PowerStudyConfig,
    QuadratureConfig, RngStream, StatisticValue,
};

/// Stream id reserved for deriving the quadrature node seed from `--seed`.
const NODE_TAG: u64 = u64::MAX;
const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: String) -> Self {
        Self { code: 2, message }
    }

    pub fn data(message: String) -> Self {
        Self { code: 3, message }
    }
}

impl From<ecfnorm::Error> for CliError {
    fn from(e: ecfnorm::Error) -> Self {
        use ecfnorm::Error as E;
        let code = match e {
            E::Domain(_) | E::Config(_) | E::Parse(_) | E::CostGuard { .. } => 2,
            E::Lookup(_) | E::Provenance(_) => 4,
            E::Shape(_)
            | E::DegenerateColumn { .. }
            | E::InsufficientData { .. }
            | E::NonFinite { .. }
            | E::Io(_)
            | E::Json(_) => 3,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "ecfnorm",
    version,
    about = "Characteristic-function test of joint normality and independence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a data set: columns independent and normal.
    Test(TestArgs),
    /// Simulate a critical value table.
    Critvals(CritvalArgs),
    /// Run a size/power study.
    Power(PowerArgs),
}

#[derive(Args)]
struct Common {
    /// Seed for all randomness; drawn from system entropy when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct TestArgs {
    /// CSV file, `-` for standard input.
    #[arg(long, short)]
    input: PathBuf,
    /// Critical value table produced by `critvals`.
    #[arg(long)]
    critvals: Option<PathBuf>,
    /// Simulate this many null replicates for a p-value (and a critical value
    /// when no table is given).
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Quadrature node count; forces quadrature for m = 1.
    #[arg(long = "Q", visible_alias = "q")]
    q: Option<usize>,
    #[arg(long, default_value = ",")]
    delim: String,
    /// Also print a short human-readable summary to stderr.
    #[arg(long)]
    summary: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CritvalArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    alphas: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    replicates: usize,
    #[arg(long = "Q", visible_alias = "q")]
    q: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Univariate,
    Bivariate,
    Custom,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Alternative in canonical form, e.g. `PearVII(10)` (custom suite).
    #[arg(long = "alt")]
    alts: Vec<String>,
    /// File with one alternative per line (custom suite).
    #[arg(long)]
    alternatives: Option<PathBuf>,
    #[arg(long = "n", value_delimiter = ',', default_value = "20")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    replicates: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Null replicates for critical values not supplied via --critvals.
    #[arg(long, default_value_t = 10_000)]
    critval_replicates: usize,
    /// Pre-built critical value tables (repeatable).
    #[arg(long)]
    critvals: Vec<PathBuf>,
    /// Sphere Monte Carlo node count for bivariate laws.
    #[arg(long = "Q", visible_alias = "q", default_value_t = QuadratureConfig::DEFAULT_SPHERE_Q)]
    q: usize,
    /// Trapezoid node count for univariate laws.
    #[arg(long = "Q1", visible_alias = "q1", default_value_t = QuadratureConfig::DEFAULT_CIRCLE_Q)]
    q1: usize,
    /// Write PREFIX.json and PREFIX.txt instead of stdout/stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let common = match &cli.command {
        Command::Test(a) => &a.common,
        Command::Critvals(a) => &a.common,
        Command::Power(a) => &a.common,
    };
    if let Some(t) = common.threads {
        if t == 0 {
            return Err(CliError::usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot configure thread pool: {e}")))?;
    }
    match cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Critvals(a) => cmd_critvals(a),
        Command::Power(a) => cmd_power(a),
    }
}

/// The seed to use and whether it was drawn from entropy.
fn resolve_seed(seed: Option<u64>) -> (u64, bool) {
    match seed {
        Some(s) => (s, false),
        None => (rand::rng().next_u64(), true),
    }
}

fn node_seed(seed: u64) -> u64 {
    RngStream::new(seed, NODE_TAG).next_u64()
}

fn quadrature_for(m: usize, q: Option<usize>, seed: u64) -> CliResult<QuadratureConfig> {
    let cfg = match (m, q) {
        (1, Some(q)) => QuadratureConfig::circle(q),
        (1 | 2, None) => QuadratureConfig::default_for(m, node_seed(seed)),
        (_, Some(q)) => QuadratureConfig::sphere_mc(q, node_seed(seed)),
        (_, None) => {
            return Err(CliError::usage(format!(
                "m = {m} columns need an explicit --Q"
            )));
        }
    };
    cfg.validate(m)?;
    Ok(cfg)
}

fn parse_delim(s: &str) -> CliResult<u8> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(CliError::usage(format!(
            "delimiter must be one ASCII character, got `{s}`"
        ))),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::data(format!("cannot write to stdout: {e}"))),
    }
}

#[derive(Serialize)]
struct InputInfo {
    path: String,
    n: usize,
    m: usize,
    header: Option<Vec<String>>,
}

#[derive(Serialize)]
struct CalibrationInfo {
    source: &'static str,
    replicates: usize,
    root_seed: u64,
    quadrature: QuadratureConfig,
}

#[derive(Serialize)]
struct TestReport {
    schema_version: u32,
    input: InputInfo,
    statistic: StatisticValue,
    alpha: f64,
    critical_value: Option<f64>,
    calibration: Option<CalibrationInfo>,
    p_value: Option<f64>,
    decision: Option<&'static str>,
    seed: u64,
    seed_from_entropy: bool,
    quadrature: QuadratureConfig,
    warnings: Vec<String>,
}

fn cmd_test(a: TestArgs) -> CliResult<()> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::usage(format!(
            "--alpha must lie in (0, 1), got {}",
            a.alpha
        )));
    }
    let (seed, from_entropy) = resolve_seed(a.common.seed);
    let (x, header) = input::read_matrix(&a.input, parse_delim(&a.delim)?)?;
    let (n, m) = (x.n_rows(), x.n_cols());
    let z = standardize(&x)?;
    let table = a
        .critvals
        .as_deref()
        .map(CriticalValueTable::load)
        .transpose()?;
    let quadrature = match (&table, a.q) {
        (Some(t), None) => t.quadrature,
        _ => quadrature_for(m, a.q, seed)?,
    };
    let stat = if m == 1 && a.q.is_none() && n <= M1_EXACT_DEFAULT_CAP {
        m1_exact(&z)?
    } else {
        m_stat(&z, &quadrature)?
    };

    let mut warnings = Vec::new();
    if n < 10 {
        warnings.push(format!("N = {n} is small; the test has little power"));
    }
    let mut critical_value = None;
    let mut calibration = None;
    let mut decision = None;
    if let Some(t) = &table {
        let d = decide(&stat, t, a.alpha)?;
        critical_value = Some(d.critical_value);
        decision = Some(d.reject);
        calibration = Some(CalibrationInfo {
            source: "table",
            replicates: t.replicates,
            root_seed: t.root_seed,
            quadrature: t.quadrature,
        });
    }
    let mut pval = None;
    if let Some(r) = a.replicates {
        let cfg = NullSimConfig::new(m, n, r, vec![a.alpha], quadrature, seed);
        let null = simulate_null_statistics(&cfg)?;
        pval = Some(p_value(stat.value, &null)?);
        if table.is_none() {
            let t = table_from_statistics(&cfg, &null)?;
            let d = decide(&stat, &t, a.alpha)?;
            critical_value = Some(d.critical_value);
            decision = Some(d.reject);
            calibration = Some(CalibrationInfo {
                source: "simulated",
                replicates: r,
                root_seed: seed,
                quadrature,
            });
        }
    }
    if decision.is_none() {
        warnings
            .push("no calibration source (--critvals or --replicates); no decision made".into());
    }
    let report = TestReport {
        schema_version: REPORT_SCHEMA_VERSION,
        input: InputInfo {
            path: a.input.display().to_string(),
            n,
            m,
            header,
        },
        statistic: stat,
        alpha: a.alpha,
        critical_value,
        calibration,
        p_value: pval,
        decision: decision.map(|r| if r { "reject" } else { "retain" }),
        seed,
        seed_from_entropy: from_entropy,
        quadrature,
        warnings,
    };
    if a.summary {
        eprintln!("M{m} = {:.6} (N = {n})", report.statistic.value);
        if let Some(c) = report.critical_value {
            eprintln!("critical value at alpha = {}: {c:.6}", a.alpha);
        }
        if let Some(p) = report.p_value {
            eprintln!("Monte Carlo p-value: {p:.4}");
        }
        if let Some(d) = report.decision {
            eprintln!("decision: {d}");
        }
        if from_entropy {
            eprintln!("seed: {seed}");
        }
    }
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::data(e.to_string()))?;
    write_out(None, &(json + "\n"))
}

fn cmd_critvals(a: CritvalArgs) -> CliResult<()> {
    let (seed, from_entropy) = resolve_seed(a.common.seed);
    if from_entropy {
        eprintln!("seed: {seed}");
    }
    let mut alphas = a.alphas.clone();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let cfg = NullSimConfig::new(
        a.m,
        a.n,
        a.replicates,
        alphas,
        quadrature_for(a.m, a.q, seed)?,
        seed,
    );
    let table = simulate_null(&cfg)?;
    write_out(a.out.as_deref(), &table.to_json()?)
}

fn read_alternatives(path: &Path) -> CliResult<Vec<AlternativeSpec>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| AlternativeSpec::parse(l).map_err(CliError::from))
        .collect()
}

fn cmd_power(a: PowerArgs) -> CliResult<()> {
    let (seed, from_entropy) = resolve_seed(a.common.seed);
    if from_entropy {
        eprintln!("seed: {seed}");
    }
    let custom_given = !a.alts.is_empty() || a.alternatives.is_some();
    let alternatives = match a.suite {
        Suite::Univariate | Suite::Bivariate if custom_given => {
            return Err(CliError::usage(
                "--alt/--alternatives need --suite custom".into(),
            ));
        }
        Suite::Univariate => AlternativeSpec::univariate_suite(),
        Suite::Bivariate => AlternativeSpec::bivariate_suite(),
        Suite::Custom => {
            let mut v = a
                .alts
                .iter()
                .map(|s| AlternativeSpec::parse(s).map_err(CliError::from))
                .collect::<CliResult<Vec<_>>>()?;
            if let Some(p) = &a.alternatives {
                v.extend(read_alternatives(p)?);
            }
            if v.is_empty() {
                return Err(CliError::usage(
                    "--suite custom needs --alt or --alternatives".into(),
                ));
            }
            v
        }
    };
    let mut cfg = PowerStudyConfig::new(
        alternatives,
        a.sizes.clone(),
        a.alpha,
        a.replicates,
        seed,
        a.critval_replicates,
        node_seed(seed),
    );
    cfg.quadrature_m1 = QuadratureConfig::circle(a.q1);
    cfg.quadrature_m2 = QuadratureConfig::sphere_mc(a.q, node_seed(seed));
    cfg.tables = a
        .critvals
        .iter()
        .map(|p| CriticalValueTable::load(p).map_err(CliError::from))
        .collect::<CliResult<Vec<_>>>()?;
    let table = run_suite(&cfg)?;
    let json = table.to_json()?;
    let text = table.to_text();
    match &a.out {
        Some(prefix) => {
            let with_ext = |ext: &str| {
                let mut s = prefix.as_os_str().to_owned();
                s.push(ext);
                PathBuf::from(s)
            };
            write_out(Some(&with_ext(".json")), &json)?;
            write_out(Some(&with_ext(".txt")), &text)?;
        }
        None => {
            write_out(None, &json)?;
            eprint!("{text}");
        }
    }
    Ok(())
}
