//! Command-line driver: parses a [`SuiteConfig`], runs it, and renders a
//! CSV report whose first line echoes the canonical config.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use missmass::csv::fmt_f64;
use missmass::distribution::DistributionSpec;
use missmass::inequality::SIGN_SCAN_NOTE;
use missmass::lab::{run_tail_experiment, SampleConfig};
use missmass::oracle::OracleComparison;
use missmass::verify::{run_suite, GridSpec, Suite};
use missmass::{extremal, OccupancyBounds};
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_EPSILONS: [f64; 2] = [0.05, 0.1];
/// Absolute slack allowed in the oracle's MGF comparison.
pub const MGF_TOLERANCE: f64 = 1e-12;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(i32)]
pub enum ExitCode {
    Ok = 0,
    Usage = 2,
    Unreadable = 3,
    Domain = 4,
    InequalityFailure = 5,
    StatisticalFailure = 6,
    Internal = 7,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl std::error::Error for CliError {}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    fn new(code: ExitCode, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<missmass::Error> for CliError {
    fn from(e: missmass::Error) -> Self {
        use missmass::Error as E;
        let code = match e {
            E::Domain { .. }
            | E::UnsortedGrid { .. }
            | E::PuncturedGrid { .. }
            | E::InvalidDistribution(_)
            | E::InstanceTooLarge { .. } => ExitCode::Domain,
            E::NonConvergence { .. } | E::Degenerate { .. } | E::Internal(_) => ExitCode::Internal,
        };
        CliError::new(code, e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "missmass",
    version,
    about = "Missing-mass concentration: verification, bounds, simulation, exact laws"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the CSV here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan an inequality family on a grid.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = missmass::verify::DEFAULT_TOLERANCE)]
        tol: f64,
        /// Grid override, PRIMARYxSECONDARY (e.g. 401x301).
        #[arg(long)]
        grid: Option<GridSpec>,
    },
    /// Compute x₀ and C₀.
    Constants {
        #[arg(long, default_value_t = extremal::DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Tabulate the tail bounds.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
    },
    /// Monte Carlo tails of U_n against the bounds.
    Simulate {
        /// JSON config; flags given on the command line take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        /// uniform:K, zipf:K:ALPHA, geometric:K:RHO or explicit:P1,P2,...
        #[arg(long, value_parser = parse_dist)]
        dist: Option<DistributionSpec>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Also sample the independent analogue and report both dispersions.
        #[arg(long)]
        independent: bool,
    },
    /// Exact laws of U_n and U_n' by enumeration.
    Oracle {
        #[arg(long, value_parser = parse_dist)]
        dist: DistributionSpec,
        #[arg(long)]
        n: u64,
        /// LO:HI:STEP
        #[arg(long, default_value = "-20:20:0.1", value_parser = parse_lambda_grid)]
        lambda_grid: LambdaGrid,
    },
}

fn parse_dist(s: &str) -> Result<DistributionSpec, String> {
    s.parse().map_err(|e: missmass::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl LambdaGrid {
    /// `lo + i·step` for `i = 0..=round((hi - lo)/step)`.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step).round() as usize;
        (0..=count)
            .map(|i| self.lo + i as f64 * self.step)
            .collect()
    }
}

fn parse_lambda_grid(s: &str) -> Result<LambdaGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err("expected LO:HI:STEP".into());
    };
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| format!("not a number: {x:?}"))
    };
    let grid = LambdaGrid {
        lo: num(lo)?,
        hi: num(hi)?,
        step: num(step)?,
    };
    if !(grid.step > 0.0) || !(grid.hi >= grid.lo) || !grid.lo.is_finite() || !grid.hi.is_finite() {
        return Err("need finite LO <= HI and STEP > 0".into());
    }
    if (grid.hi - grid.lo) / grid.step > 1e6 {
        return Err("lambda grid exceeds 10^6 points".into());
    }
    Ok(grid)
}

/// Fields accepted in a `simulate` config file. All optional so that flags
/// can fill the gaps.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFile {
    pub distribution: Option<DistributionSpec>,
    pub n: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub epsilons: Option<Vec<f64>>,
}

/// A fully resolved run. Its JSON form is echoed as the output header.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum SuiteConfig {
    Verify {
        suite: Suite,
        tolerance: f64,
        grid: Option<GridSpec>,
    },
    Constants {
        tolerance: f64,
    },
    Bounds {
        n: u64,
        epsilons: Vec<f64>,
    },
    Simulate {
        distribution: DistributionSpec,
        n: u64,
        trials: u64,
        seed: u64,
        epsilons: Vec<f64>,
        independent: bool,
    },
    Oracle {
        distribution: DistributionSpec,
        n: u64,
        lambda_grid: LambdaGrid,
    },
}

impl SuiteConfig {
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Resolves parsed arguments (and a config file, if named) into a config.
pub fn resolve(command: Command) -> Result<SuiteConfig, CliError> {
    Ok(match command {
        Command::Verify { suite, tol, grid } => SuiteConfig::Verify {
            suite,
            tolerance: tol,
            grid,
        },
        Command::Constants { tol } => SuiteConfig::Constants { tolerance: tol },
        Command::Bounds { n, eps } => SuiteConfig::Bounds { n, epsilons: eps },
        Command::Simulate {
            config,
            dist,
            n,
            trials,
            seed,
            eps,
            independent,
        } => {
            let file = match config {
                Some(path) => read_simulate_file(&path)?,
                None => SimulateFile::default(),
            };
            let missing = |what: &str| {
                CliError::new(
                    ExitCode::Usage,
                    format!("simulate: {what} not given by flag or config file"),
                )
            };
            SuiteConfig::Simulate {
                distribution: dist
                    .or(file.distribution)
                    .ok_or_else(|| missing("distribution"))?,
                n: n.or(file.n).ok_or_else(|| missing("n"))?,
                trials: trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
                seed: seed.or(file.seed).unwrap_or(DEFAULT_SEED),
                epsilons: eps
                    .or(file.epsilons)
                    .unwrap_or_else(|| DEFAULT_EPSILONS.to_vec()),
                independent,
            }
        }
        Command::Oracle {
            dist,
            n,
            lambda_grid,
        } => SuiteConfig::Oracle {
            distribution: dist,
            n,
            lambda_grid,
        },
    })
}

pub fn read_simulate_file(path: &Path) -> Result<SimulateFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::new(
            ExitCode::Unreadable,
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::new(
            ExitCode::Usage,
            format!("invalid config {}: {e}", path.display()),
        )
    })
}

/// Rendered output and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub csv: String,
    pub status: ExitCode,
}

fn header(config: &SuiteConfig) -> String {
    format!("# missmass {VERSION} {}\n", config.canonical_json())
}

pub fn execute(config: &SuiteConfig) -> Result<Report, CliError> {
    let mut csv = header(config);
    let status = match config {
        SuiteConfig::Verify {
            suite,
            tolerance,
            grid,
        } => verify(&mut csv, *suite, *grid, *tolerance)?,
        SuiteConfig::Constants { tolerance } => constants(&mut csv, *tolerance)?,
        SuiteConfig::Bounds { n, epsilons } => bounds(&mut csv, *n, epsilons)?,
        SuiteConfig::Simulate {
            distribution,
            n,
            trials,
            seed,
            epsilons,
            independent,
        } => {
            let sample = SampleConfig {
                n: *n,
                trials: *trials,
                seed: *seed,
                epsilons: epsilons.clone(),
            };
            simulate(&mut csv, distribution, &sample, *independent)?
        }
        SuiteConfig::Oracle {
            distribution,
            n,
            lambda_grid,
        } => oracle(&mut csv, distribution, *n, lambda_grid)?,
    };
    Ok(Report { csv, status })
}

fn verify(
    csv: &mut String,
    suite: Suite,
    grid: Option<GridSpec>,
    tol: f64,
) -> Result<ExitCode, CliError> {
    let checks = run_suite(suite, grid, tol)?;
    if checks.iter().any(|c| c.suite == Suite::Gprime) {
        writeln!(csv, "# note: gprime: {SIGN_SCAN_NOTE}").unwrap();
    }
    csv.push_str("suite,check,points,worst,tolerance,loc_p,loc_t,pass\n");
    for c in &checks {
        let o = &c.outcome;
        let (lp, lt) = o.location.unwrap_or((f64::NAN, f64::NAN));
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            c.suite,
            o.name,
            o.points,
            fmt_f64(o.worst),
            fmt_f64(o.tolerance),
            fmt_f64(lp),
            fmt_f64(lt),
            o.pass
        )
        .unwrap();
    }
    Ok(if checks.iter().all(|c| c.outcome.pass) {
        ExitCode::Ok
    } else {
        ExitCode::InequalityFailure
    })
}

fn constants(csv: &mut String, tol: f64) -> Result<ExitCode, CliError> {
    let r = extremal::find_x0(tol)?;
    csv.push_str("x0,f_at_x0,c0,c0_over_4,eight_over_ln2\n");
    writeln!(
        csv,
        "{},{},{},{},{}",
        fmt_f64(r.x0),
        fmt_f64(r.f_at_x0),
        fmt_f64(r.c0),
        fmt_f64(r.c0 / 4.0),
        fmt_f64(extremal::eight_over_ln2())
    )
    .unwrap();
    Ok(ExitCode::Ok)
}

fn bounds(csv: &mut String, n: u64, epsilons: &[f64]) -> Result<ExitCode, CliError> {
    let b = OccupancyBounds::from_extremal();
    csv.push_str("n,epsilon,upper,lower,legacy_lower,lambda_upper,lambda_lower\n");
    for &eps in epsilons {
        let t = b.lower_tail_bound(n, eps)?;
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            t.n,
            fmt_f64(t.epsilon),
            fmt_f64(t.upper),
            fmt_f64(t.lower),
            fmt_f64(t.legacy_lower),
            fmt_f64(t.lambda_upper),
            fmt_f64(t.lambda_lower)
        )
        .unwrap();
    }
    Ok(ExitCode::Ok)
}

fn simulate(
    csv: &mut String,
    spec: &DistributionSpec,
    sample: &SampleConfig,
    independent: bool,
) -> Result<ExitCode, CliError> {
    let dist = spec.build()?;
    let result = run_tail_experiment(
        &dist,
        sample,
        &OccupancyBounds::from_extremal(),
        independent,
    )?;
    if dist.has_zero_mass_atoms() {
        csv.push_str("# note: distribution has zero-mass atoms\n");
    }
    csv.push_str(
        "epsilon,empirical_upper,wilson_lo,wilson_hi,bound_upper,empirical_lower,wilson_lo,wilson_hi,bound_lower,expected_mass\n",
    );
    for r in &result.rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.epsilon),
            fmt_f64(r.empirical_upper),
            fmt_f64(r.wilson_upper_ci.0),
            fmt_f64(r.wilson_upper_ci.1),
            fmt_f64(r.bound_upper),
            fmt_f64(r.empirical_lower),
            fmt_f64(r.wilson_lower_ci.0),
            fmt_f64(r.wilson_lower_ci.1),
            fmt_f64(r.bound_lower),
            fmt_f64(result.expected_mass)
        )
        .unwrap();
    }
    writeln!(
        csv,
        "# dependent: mean={} variance={}",
        fmt_f64(result.dependent.mean),
        fmt_f64(result.dependent.variance)
    )
    .unwrap();
    if let Some(ind) = &result.independent {
        writeln!(
            csv,
            "# independent: mean={} variance={}",
            fmt_f64(ind.mean),
            fmt_f64(ind.variance)
        )
        .unwrap();
    }
    Ok(if result.all_dominated() {
        ExitCode::Ok
    } else {
        ExitCode::StatisticalFailure
    })
}

fn oracle(
    csv: &mut String,
    spec: &DistributionSpec,
    n: u64,
    grid: &LambdaGrid,
) -> Result<ExitCode, CliError> {
    let dist = spec.build()?;
    let cmp = OracleComparison::new(&dist, n, &grid.points())?;
    csv.push_str("value,probability,provenance\n");
    for law in [&cmp.dependent, &cmp.independent] {
        for (v, p) in law.iter() {
            writeln!(csv, "{},{},{}", fmt_f64(v), fmt_f64(p), law.provenance()).unwrap();
        }
    }
    let (tail_x, tail_excess) = cmp.max_raw_tail_excess();
    csv.push_str("# summary\nstatistic,value\n");
    let rows = [
        ("mean_dependent", cmp.dependent.mean()),
        ("mean_independent", cmp.independent.mean()),
        ("mean_formula", cmp.formula_mean),
        ("variance_dependent", cmp.dependent.variance()),
        ("variance_independent", cmp.independent.variance()),
        ("min_mgf_slack", cmp.mgf_slack),
        ("min_mgf_slack_lambda", cmp.mgf_slack_lambda),
        ("max_raw_tail_excess", tail_excess),
        ("max_raw_tail_excess_threshold", tail_x),
    ];
    for (name, value) in rows {
        writeln!(csv, "{name},{}", fmt_f64(value)).unwrap();
    }
    if tail_excess > 0.0 {
        csv.push_str(
            "# note: P(U_n > x) exceeds P(U_n' > x) at the threshold above; \
             raw tail domination fails here while the MGF ordering is what the Chernoff bounds use\n",
        );
    }
    Ok(if cmp.mgf_dominated(MGF_TOLERANCE) {
        ExitCode::Ok
    } else {
        ExitCode::InequalityFailure
    })
}

/// Writes `report` to `out` (atomically, through a temporary file in the
/// same directory) or to stdout.
pub fn emit(report: &Report, out: Option<&Path>) -> Result<(), CliError> {
    let internal = |e: io::Error| CliError::new(ExitCode::Internal, format!("write failed: {e}"));
    match out {
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(report.csv.as_bytes()).map_err(internal)?;
            stdout.flush().map_err(internal)
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| {
                CliError::new(
                    ExitCode::Unreadable,
                    format!("cannot write into {}: {e}", dir.display()),
                )
            })?;
            tmp.write_all(report.csv.as_bytes()).map_err(internal)?;
            tmp.as_file().sync_all().map_err(internal)?;
            tmp.persist(path).map_err(|e| internal(e.error))?;
            Ok(())
        }
    }
}

/// Parses, runs and writes; returns the exit code. Errors go to stderr and
/// leave no output file behind.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::Usage.code()
            } else {
                ExitCode::Ok.code()
            };
        }
    };
    let out = cli.out.clone();
    let result = resolve(cli.command)
        .and_then(|config| execute(&config))
        .and_then(|report| emit(&report, out.as_deref()).map(|()| report.status));
    match result {
        Ok(status) => {
            if status != ExitCode::Ok {
                eprintln!("missmass: checks failed (exit {})", status.code());
            }
            status.code()
        }
        Err(e) => {
            eprintln!("missmass: {e}");
            e.code.code()
        }
    }
}
