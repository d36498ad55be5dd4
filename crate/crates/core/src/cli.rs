//! Command-line front end.
//!
//! Exit codes: 0 success, 1 solver or check failure, 2 configuration error,
//! 3 infeasible, 4 unbounded, 5 I/O error. `solve` and `oracle-check` print
//! a `STATUS objective=<value>` line on standard output.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::info;

use crate::lp::{export_lp_text, solve_milp_with, LpError, SolveStatus};
use crate::network::{compile, extract_solution, DispatchSolution, NetworkError, ObjectiveKind};
use crate::oracle::{enumerate_best, EnumerationGrid, OracleError};
use crate::scenario::{compute_kpis, load_scenario, read_dispatch_csv, write_results, ScenarioConfig, ScenarioError};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_UNBOUNDED: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "HEATLEVELS_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "heatlevels", version, about = "Dispatch optimisation for multi-temperature heat supply systems")]
pub struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario document (TOML).
    pub scenario: PathBuf,
    /// Override the objective named in the scenario.
    #[arg(long, value_parser = ["price", "exergy"])]
    pub objective: Option<String>,
}

impl ScenarioArgs {
    fn objective(&self, config: &ScenarioConfig) -> ObjectiveKind {
        self.objective.as_deref().map_or(config.objective, |o| o.parse().expect("validated by clap"))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a scenario and write dispatch, storage and KPI files.
    Solve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory.
        #[arg(short, long, env = OUTPUT_DIR_ENV, default_value = "results")]
        output: PathBuf,
    },
    /// Load and check a scenario without solving it.
    Validate {
        /// Scenario document (TOML).
        scenario: PathBuf,
    },
    /// Write the compiled program in LP text format.
    ExportLp {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Target file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the solver against brute-force enumeration on a tiny scenario.
    OracleCheck {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Grid points per decision.
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Largest accepted relative gap between enumeration and solver.
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
    },
    /// Recompute KPIs from a stored dispatch file.
    Kpi {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Directory holding `dispatch.csv`.
        #[arg(short, long, env = OUTPUT_DIR_ENV, default_value = "results")]
        results: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Infeasible,
    Unbounded,
    Io(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Infeasible => EXIT_INFEASIBLE,
            Failure::Unbounded => EXIT_UNBOUNDED,
            Failure::Io(_) => EXIT_IO,
            Failure::Other(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Config(m) => format!("configuration error: {m}"),
            Failure::Infeasible => "scenario is infeasible".into(),
            Failure::Unbounded => "scenario is unbounded".into(),
            Failure::Io(m) => format!("I/O error: {m}"),
            Failure::Other(m) => m.clone(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Io { .. } => Failure::Io(e.to_string()),
            ScenarioError::Network { source: NetworkError::NotOptimal(status), .. } => status.into(),
            ScenarioError::Kpi(_) => Failure::Other(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<SolveStatus> for Failure {
    fn from(status: SolveStatus) -> Self {
        match status {
            SolveStatus::Infeasible => Failure::Infeasible,
            SolveStatus::Unbounded => Failure::Unbounded,
            SolveStatus::Optimal => Failure::Other("unexpected optimal status".into()),
        }
    }
}

impl From<NetworkError> for Failure {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::NotOptimal(status) => status.into(),
            NetworkError::Lp(LpError::IterationLimit(_) | LpError::Numerical(_)) | NetworkError::Balance { .. } => {
                Failure::Other(format!("solver failure: {e}"))
            }
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Network(n) => n.into(),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn solve(config: &ScenarioConfig, objective: ObjectiveKind) -> Result<(crate::network::CompiledModel, DispatchSolution), Failure> {
    let started = Instant::now();
    let model = compile(&config.network, objective)?;
    info!("compiled {} columns, {} rows", model.program.num_variables(), model.program.num_constraints());
    let result = solve_milp_with(&model.program, &config.tolerances).map_err(NetworkError::from)?;
    info!("{:?} after {} iterations, {} nodes, {:.2} s", result.status, result.iterations, result.nodes, started.elapsed().as_secs_f64());
    if result.status != SolveStatus::Optimal {
        println!("{} objective=nan", status_word(result.status));
        return Err(result.status.into());
    }
    let solution = extract_solution(&result, &model, &config.network.grid)?;
    Ok((model, solution))
}

fn status_word(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "OPTIMAL",
        SolveStatus::Infeasible => "INFEASIBLE",
        SolveStatus::Unbounded => "UNBOUNDED",
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { scenario } => {
            let config = load_scenario(&scenario)?;
            compile(&config.network, config.objective)?;
            println!("VALID scenario={}", config.name);
        }
        Command::Solve { scenario, output } => {
            let config = load_scenario(&scenario.scenario)?;
            let objective = scenario.objective(&config);
            let (model, solution) = solve(&config, objective)?;
            let report = compute_kpis(&solution, &model)?;
            write_results(&solution, &report, &output)?;
            println!("OPTIMAL objective={}", solution.objective);
        }
        Command::ExportLp { scenario, output } => {
            let config = load_scenario(&scenario.scenario)?;
            let model = compile(&config.network, scenario.objective(&config))?;
            let text = export_lp_text(&model.program).map_err(|e| Failure::Config(e.to_string()))?;
            match output {
                Some(path) => fs::write(&path, text).map_err(|e| io_failure(&path, e))?,
                None => print!("{text}"),
            }
        }
        Command::OracleCheck { scenario, points, tolerance } => {
            let config = load_scenario(&scenario.scenario)?;
            let objective = scenario.objective(&config);
            let grid = EnumerationGrid::new(points);
            let enumerated = enumerate_best(&config.network, objective, &grid)?;
            let (_, solution) = solve(&config, objective)?;
            let Some(best) = enumerated else {
                return Err(Failure::Other(format!("no grid point is feasible at {points} points per decision")));
            };
            let scale = solution.objective.abs().max(1e-12);
            let gap = (best.objective - solution.objective) / scale;
            println!("OPTIMAL objective={} oracle={} gap={gap:e}", solution.objective, best.objective);
            if gap < -1e-9 {
                return Err(Failure::Other("enumeration beat the solver".into()));
            }
            if gap > tolerance {
                return Err(Failure::Other(format!("gap {gap:e} exceeds {tolerance:e}")));
            }
        }
        Command::Kpi { scenario, results } => {
            let config = load_scenario(&scenario.scenario)?;
            let objective = scenario.objective(&config);
            let model = compile(&config.network, objective)?;
            let flows = read_dispatch_csv(&results.join("dispatch.csv"), &config.network.grid)?;
            let solution = DispatchSolution {
                grid: config.network.grid.clone(),
                objective_kind: objective,
                objective: f64::NAN,
                flows,
                storage: Default::default(),
                surface_overestimate: Default::default(),
            };
            let report = compute_kpis(&solution, &model)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("KPI reports always serialize"));
        }
    }
    Ok(())
}

/// Parse `args` (program name first), run the command and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    match execute(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}
