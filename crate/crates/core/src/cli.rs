//! Command-line front end: `check`, `survey`, `oracle`, `space` and
//! `solve-dimacs`.
//!
//! `check` exits with [`EXIT_FOUND`], [`EXIT_REFUTED`] or [`EXIT_UNRESOLVED`].

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde_json::json;

use crate::cnf::{parse_dimacs, write_dimacs, SolveOutcome};
use crate::decode::{decode_profile, verify_at_least_dimension, ReportFormat, WitnessReport};
use crate::encoder::{build_instance, EncodeOptions};
use crate::model::{profile_space_size, AlternativeSet, PreferenceProfile};
use crate::solver::{solve, solve_builtin, SolverConfig};

pub const EXIT_FOUND: i32 = 10;
pub const EXIT_REFUTED: i32 = 20;
pub const EXIT_UNRESOLVED: i32 = 30;

#[derive(Debug, Clone)]
pub struct CheckRequest {
    pub options: EncodeOptions,
    pub solver: SolverConfig,
    pub emit_cnf: Option<PathBuf>,
    pub solve: bool,
}

impl CheckRequest {
    pub fn new(agents: usize, alternatives: usize, dimension: usize) -> Self {
        Self {
            options: EncodeOptions::new(agents, alternatives, dimension),
            solver: SolverConfig::builtin(),
            emit_cnf: None,
            solve: true,
        }
    }

    pub fn with_solver(mut self, solver: SolverConfig) -> Self {
        self.solver = solver;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    /// A verified profile. `report` is `None` only for `k = 1`.
    Found {
        profile: PreferenceProfile,
        report: Option<WitnessReport>,
    },
    /// Every profile of this size has a winning set of size `k - 1`.
    Refuted,
    Unresolved,
    /// CNF written, solving skipped.
    Emitted,
}

impl CheckOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            CheckOutcome::Found { .. } => "found",
            CheckOutcome::Refuted => "refuted",
            CheckOutcome::Unresolved => "unresolved",
            CheckOutcome::Emitted => "emitted",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CheckOutcome::Found { .. } => EXIT_FOUND,
            CheckOutcome::Refuted => EXIT_REFUTED,
            CheckOutcome::Unresolved => EXIT_UNRESOLVED,
            CheckOutcome::Emitted => 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub options: EncodeOptions,
    pub outcome: CheckOutcome,
    pub variables: u32,
    pub clauses: usize,
    pub elapsed: Duration,
}

impl CheckResult {
    pub fn to_text(&self) -> String {
        let o = &self.options;
        let (n, m, k) = (o.agents, o.alternatives, o.dimension);
        let mut out = String::new();
        match &self.outcome {
            CheckOutcome::Found {
                report: Some(report),
                ..
            } => out.push_str(&report.to_text()),
            CheckOutcome::Found {
                profile,
                report: None,
            } => {
                let _ = writeln!(
                    out,
                    "Every profile has Condorcet dimension at least 1, e.g.:"
                );
                out.push_str(&profile.to_string());
            }
            CheckOutcome::Refuted => {
                let _ = writeln!(
                    out,
                    "Every profile with {n} agents and {m} alternatives has a Condorcet winning set of size {}.",
                    k - 1
                );
            }
            CheckOutcome::Unresolved => {
                let _ = writeln!(
                    out,
                    "No answer within the time budget for {n} agents, {m} alternatives and k={k}."
                );
            }
            CheckOutcome::Emitted => {
                let _ = writeln!(
                    out,
                    "CNF written ({} variables, {} clauses).",
                    self.variables, self.clauses
                );
            }
        }
        let _ = writeln!(out, "outcome: {}", self.outcome.label());
        out
    }

    pub fn to_structured(&self) -> String {
        let o = &self.options;
        let mut doc = json!({
            "schema": "condim.check/v1",
            "agents": o.agents,
            "alternatives": o.alternatives,
            "k": o.dimension,
            "symmetry_breaking": o.symmetry_breaking,
            "outcome": self.outcome.label(),
            "variables": self.variables,
            "clauses": self.clauses,
        });
        if let CheckOutcome::Found { profile, report } = &self.outcome {
            doc["rankings"] = json!(profile.rankings());
            if let Some(report) = report {
                doc["report"] = report.to_json();
            }
        }
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Text => self.to_text(),
            ReportFormat::Structured => self.to_structured(),
        }
    }
}

/// Encode, solve, decode and verify.
pub fn check(request: &CheckRequest) -> Result<CheckResult> {
    let start = Instant::now();
    let options = request.options;
    let (n, m, k) = (options.agents, options.alternatives, options.dimension);
    if n == 0 || m == 0 || k == 0 {
        bail!("n, m and k must be positive");
    }
    let trivial = |outcome| CheckResult {
        options,
        outcome,
        variables: 0,
        clauses: 0,
        elapsed: start.elapsed(),
    };
    if k == 1 {
        let profile = PreferenceProfile::new(vec![(0..m).collect(); n])?;
        return Ok(trivial(CheckOutcome::Found {
            profile,
            report: None,
        }));
    }
    if k > m {
        // No profile has dimension above m.
        return Ok(trivial(CheckOutcome::Refuted));
    }

    let (formula, registry) = build_instance(&options)?;
    if let Some(path) = &request.emit_cnf {
        let file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_dimacs(&formula, file).with_context(|| format!("writing {}", path.display()))?;
    }
    let outcome = if !request.solve {
        CheckOutcome::Emitted
    } else {
        match solve(&formula, &request.solver)? {
            SolveOutcome::Satisfiable(assignment) => {
                let profile = decode_profile(&assignment, &registry)?;
                let report = verify_at_least_dimension(&profile, k, options.theta)
                    .context("solver model failed independent verification")?;
                CheckOutcome::Found {
                    profile,
                    report: Some(report),
                }
            }
            SolveOutcome::Unsatisfiable => CheckOutcome::Refuted,
            SolveOutcome::TimedOut => CheckOutcome::Unresolved,
        }
    };
    Ok(CheckResult {
        options,
        outcome,
        variables: formula.variable_count(),
        clauses: formula.clause_count(),
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellStatus {
    Found { profile_path: PathBuf },
    Refuted,
    Unresolved,
}

impl CellStatus {
    pub fn symbol(&self) -> &'static str {
        match self {
            CellStatus::Found { .. } => "+",
            CellStatus::Refuted => "-",
            CellStatus::Unresolved => "?",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SurveyCell {
    pub agents: usize,
    pub alternatives: usize,
    pub status: CellStatus,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SurveyRequest {
    pub agents: RangeInclusive<usize>,
    pub alternatives: RangeInclusive<usize>,
    pub dimension: usize,
    pub solver: SolverConfig,
    pub symmetry_breaking: bool,
    pub workers: usize,
    pub witness_dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct SurveyGrid {
    pub agents: RangeInclusive<usize>,
    pub alternatives: RangeInclusive<usize>,
    pub dimension: usize,
    /// Row-major: alternatives ascending, then agents ascending.
    pub cells: Vec<SurveyCell>,
}

impl SurveyGrid {
    pub fn cell(&self, agents: usize, alternatives: usize) -> Option<&SurveyCell> {
        self.cells
            .iter()
            .find(|c| c.agents == agents && c.alternatives == alternatives)
    }

    /// Rows are alternatives, columns agents.
    pub fn render(&self) -> String {
        let cols: Vec<usize> = self.agents.clone().collect();
        let mut out = String::from("m\\n");
        for n in &cols {
            let _ = write!(out, " {n:>3}");
        }
        out.push('\n');
        for m in self.alternatives.clone() {
            let _ = write!(out, "{m:>3}");
            for &n in &cols {
                let symbol = self.cell(n, m).map_or(" ", |c| c.status.symbol());
                let _ = write!(out, " {symbol:>3}");
            }
            out.push('\n');
        }
        out
    }
}

/// Runs `check` for every cell of the grid, `workers` cells at a time.
pub fn survey(request: &SurveyRequest) -> Result<SurveyGrid> {
    if request.agents.is_empty() || request.alternatives.is_empty() {
        bail!("survey ranges must be nonempty");
    }
    fs::create_dir_all(&request.witness_dir)
        .with_context(|| format!("creating {}", request.witness_dir.display()))?;
    let coords: Vec<(usize, usize)> = request
        .alternatives
        .clone()
        .flat_map(|m| request.agents.clone().map(move |n| (n, m)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(request.workers.max(1))
        .build()?;
    let cells = pool.install(|| {
        coords
            .par_iter()
            .map(|&(n, m)| survey_cell(request, n, m))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SurveyGrid {
        agents: request.agents.clone(),
        alternatives: request.alternatives.clone(),
        dimension: request.dimension,
        cells,
    })
}

fn survey_cell(request: &SurveyRequest, n: usize, m: usize) -> Result<SurveyCell> {
    let mut check_request =
        CheckRequest::new(n, m, request.dimension).with_solver(request.solver.clone());
    check_request.options.symmetry_breaking = request.symmetry_breaking;
    let result = check(&check_request).with_context(|| format!("cell n={n} m={m}"))?;
    let status = match &result.outcome {
        CheckOutcome::Found { profile, .. } => {
            let path = request
                .witness_dir
                .join(format!("n{n}_m{m}_k{}.profile", request.dimension));
            fs::write(&path, profile.to_string())
                .with_context(|| format!("writing {}", path.display()))?;
            CellStatus::Found { profile_path: path }
        }
        CheckOutcome::Refuted => CellStatus::Refuted,
        CheckOutcome::Unresolved | CheckOutcome::Emitted => CellStatus::Unresolved,
    };
    Ok(SurveyCell {
        agents: n,
        alternatives: m,
        status,
        elapsed: result.elapsed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub profile: PreferenceProfile,
    pub dimension: usize,
    pub minimal_set: AlternativeSet,
}

pub fn oracle(path: &Path) -> Result<OracleResult> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let profile: PreferenceProfile = text
        .parse()
        .with_context(|| format!("parsing {}", path.display()))?;
    let minimal_set = profile.minimal_winning_set();
    Ok(OracleResult {
        dimension: minimal_set.len(),
        minimal_set,
        profile,
    })
}

/// Two significant digits, `1.7e6` style.
pub fn scientific(value: &BigUint) -> String {
    let digits = value.to_string();
    if digits.len() < 2 {
        return format!("{digits}e0");
    }
    let mut lead: u32 = digits[..2].parse().expect("digits");
    let mut exponent = digits.len() - 1;
    if digits.as_bytes().get(2).is_some_and(|&d| d >= b'5') {
        lead += 1;
        if lead == 100 {
            lead = 10;
            exponent += 1;
        }
    }
    format!("{}.{}e{exponent}", lead / 10, lead % 10)
}

/// `(m!)^n` exactly and approximately.
pub fn space(agents: usize, alternatives: usize) -> String {
    let size = profile_space_size(agents, alternatives);
    format!("{size} (~{})", scientific(&size))
}

#[derive(Parser, Debug)]
#[command(
    name = "condim",
    version,
    about = "Search for preference profiles of a given Condorcet dimension"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether some profile has Condorcet dimension at least k.
    Check(CheckArgs),
    /// Run `check` over a grid of agent and alternative counts.
    Survey(SurveyArgs),
    /// Compute the Condorcet dimension of a profile file by brute force.
    Oracle { profile: PathBuf },
    /// Print the number of profiles, (m!)^n.
    Space {
        #[arg(short = 'n', long = "agents")]
        agents: usize,
        #[arg(short = 'm', long = "alternatives")]
        alternatives: usize,
    },
    /// Solve a DIMACS file with the built-in solver, SAT-competition style.
    SolveDimacs {
        cnf: PathBuf,
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// `builtin`, `ext` (command from CONDIM_EXTERNAL_SOLVER) or `ext:<command with {cnf}>`.
    #[arg(long, default_value = "builtin")]
    pub solver: String,
    /// Time budget in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub no_symmetry: bool,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let base = match self.solver.as_str() {
            "builtin" => SolverConfig::builtin(),
            "ext" => SolverConfig::external_from_env()?,
            other => match other.strip_prefix("ext:") {
                Some(template) => SolverConfig::external(template)?,
                None => bail!("unknown solver {other:?}; use builtin, ext or ext:<command>"),
            },
        };
        Ok(base
            .with_timeout(parse_timeout(self.timeout)?)
            .with_seed(self.seed))
    }
}

fn parse_timeout(seconds: Option<f64>) -> Result<Option<Duration>> {
    seconds
        .map(|s| Duration::try_from_secs_f64(s).context("timeout must be a non-negative number"))
        .transpose()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => ReportFormat::Text,
            FormatArg::Json => ReportFormat::Structured,
        }
    }
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(short = 'n', long = "agents")]
    pub agents: usize,
    #[arg(short = 'm', long = "alternatives")]
    pub alternatives: usize,
    #[arg(short = 'k', long = "dimension")]
    pub dimension: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the CNF instance to this path.
    #[arg(long)]
    pub emit_cnf: Option<PathBuf>,
    /// Only write the CNF (requires --emit-cnf).
    #[arg(long, requires = "emit_cnf")]
    pub no_solve: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: FormatArg,
}

#[derive(Args, Debug)]
pub struct SurveyArgs {
    /// Agent counts, e.g. `1..6`.
    #[arg(short = 'n', long = "agents", value_parser = parse_range)]
    pub agents: RangeInclusive<usize>,
    /// Alternative counts, e.g. `1..6`.
    #[arg(short = 'm', long = "alternatives", value_parser = parse_range)]
    pub alternatives: RangeInclusive<usize>,
    #[arg(short = 'k', long = "dimension", default_value_t = 3)]
    pub dimension: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Directory receiving one profile file per `+` cell.
    #[arg(long, default_value = "survey-witnesses")]
    pub witness_dir: PathBuf,
}

pub fn parse_range(text: &str) -> Result<RangeInclusive<usize>, String> {
    let bad = || format!("expected N or A..B, got {text:?}");
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo, hi.trim_start_matches('=')),
        None => (text, text),
    };
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

/// Executes a parsed command line and returns the process exit code.
pub fn run(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> Result<i32> {
    match cli.command {
        Command::Check(args) => {
            let mut options = EncodeOptions::new(args.agents, args.alternatives, args.dimension);
            options.symmetry_breaking = !args.solver.no_symmetry;
            let request = CheckRequest {
                options,
                solver: args.solver.config()?,
                emit_cnf: args.emit_cnf,
                solve: !args.no_solve,
            };
            let result = check(&request)?;
            out.write_all(result.render(args.format.into()).as_bytes())?;
            writeln!(
                err,
                "c {} variables, {} clauses, {:.3}s",
                result.variables,
                result.clauses,
                result.elapsed.as_secs_f64()
            )?;
            Ok(result.outcome.exit_code())
        }
        Command::Survey(args) => {
            let request = SurveyRequest {
                agents: args.agents,
                alternatives: args.alternatives,
                dimension: args.dimension,
                solver: args.solver.config()?,
                symmetry_breaking: !args.solver.no_symmetry,
                workers: args.workers,
                witness_dir: args.witness_dir,
            };
            let grid = survey(&request)?;
            out.write_all(grid.render().as_bytes())?;
            for cell in &grid.cells {
                writeln!(
                    err,
                    "c n={} m={} {} {:.3}s",
                    cell.agents,
                    cell.alternatives,
                    cell.status.symbol(),
                    cell.elapsed.as_secs_f64()
                )?;
            }
            Ok(0)
        }
        Command::Oracle { profile } => {
            let result = oracle(&profile)?;
            writeln!(out, "dimension: {}", result.dimension)?;
            writeln!(out, "minimal winning set: {}", result.minimal_set)?;
            Ok(0)
        }
        Command::Space {
            agents,
            alternatives,
        } => {
            if agents == 0 || alternatives == 0 {
                bail!("n and m must be positive");
            }
            writeln!(out, "{}", space(agents, alternatives))?;
            Ok(0)
        }
        Command::SolveDimacs { cnf, timeout, seed } => {
            let text =
                fs::read_to_string(&cnf).with_context(|| format!("reading {}", cnf.display()))?;
            let formula = parse_dimacs(&text)?;
            let config = SolverConfig::builtin()
                .with_timeout(parse_timeout(timeout)?)
                .with_seed(seed);
            match solve_builtin(&formula, &config)? {
                SolveOutcome::Satisfiable(assignment) => {
                    writeln!(out, "s SATISFIABLE")?;
                    let lits: Vec<String> = assignment.literals().map(|l| l.to_string()).collect();
                    for chunk in lits.chunks(20) {
                        writeln!(out, "v {}", chunk.join(" "))?;
                    }
                    writeln!(out, "v 0")?;
                    Ok(10)
                }
                SolveOutcome::Unsatisfiable => {
                    writeln!(out, "s UNSATISFIABLE")?;
                    Ok(20)
                }
                SolveOutcome::TimedOut => {
                    writeln!(out, "s UNKNOWN")?;
                    Ok(0)
                }
            }
        }
    }
}

/// Entry point used by the binary.
pub fn main_from_env() -> i32 {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    match run(cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
