//! Command-line front end. `run` is the whole program minus process exit,
//! so it can be driven from tests with in-memory writers.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::demand::{demand_closed_form, demand_direct, DemandResult};
use crate::economy::{tatonnement, TatonnementConfig};
use crate::error::Error;
use crate::group::{Bundle, GroupSpec};
use crate::scenario::{Scenario, ScenarioError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID_GROUP: i32 = 3;
pub const EXIT_NOT_COERCIVE: i32 = 4;
pub const EXIT_NO_CONVERGENCE: i32 = 5;

/// Relative deviation accepted by `verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "refpref", version, about = "Referential-preference demand and equilibrium")]
pub struct Cli {
    /// Seed for every random draw; printed in report headers.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check each agent's group (unique decomposition) and whether a
    /// minimizing matrix exists.
    Validate { scenario: PathBuf },
    /// Solve each agent's demand.
    Demand {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// Also write a CSV table to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Re-solve demand under random reference vectors and report the
    /// largest deviation.
    Verify {
        scenario: PathBuf,
        #[arg(long, default_value_t = 100)]
        references: usize,
    },
    /// Search for market-clearing prices, starting from the scenario prices.
    Equilibrium {
        scenario: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Direct,
    Closed,
    Both,
}

/// Formats with `digits` significant digits, `%g` style.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let sci = format!("{:.*e}", digits - 1, x);
    // Rounding may bump the exponent; re-read it from the formatted string.
    let exp = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse::<i32>().ok())
        .unwrap_or(exp);
    if exp < -5 || exp >= digits as i32 {
        let (mantissa, e) = sci.split_once('e').unwrap();
        let mantissa = trim_zeros(mantissa);
        format!(
            "{mantissa}e{}{:02}",
            if exp < 0 { '-' } else { '+' },
            e.trim_start_matches('-').parse::<i32>().unwrap()
        )
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| fmt_sig(*v, 12)).collect::<Vec<_>>().join(", ")
}

fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::SingularSystem { .. } => EXIT_INVALID_GROUP,
        Error::NotCoercive => EXIT_NOT_COERCIVE,
        Error::NotConverged { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_PARSE,
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, err: &Error) -> i32 {
        let _ = writeln!(self.err, "error: {err}");
        exit_code(err)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    execute(&cli, out, err)
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut io = Io { out, err };
    let path = match &cli.command {
        Command::Validate { scenario }
        | Command::Demand { scenario, .. }
        | Command::Verify { scenario, .. }
        | Command::Equilibrium { scenario, .. } => scenario,
    };
    let scenario = match Scenario::load(path) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            return EXIT_PARSE;
        }
    };
    let name = match &cli.command {
        Command::Validate { .. } => "validate",
        Command::Demand { .. } => "demand",
        Command::Verify { .. } => "verify",
        Command::Equilibrium { .. } => "equilibrium",
    };
    let _ = writeln!(io.out, "# refpref {name} scenario={} seed={}", path.display(), cli.seed);
    let result = match &cli.command {
        Command::Validate { .. } => validate(&scenario, &mut io),
        Command::Demand { method, csv, .. } => demand(&scenario, *method, csv.as_ref(), &mut io),
        Command::Verify { references, .. } => verify(&scenario, *references, cli.seed, &mut io),
        Command::Equilibrium {
            step, tol, max_iters, ..
        } => equilibrium(&scenario, *step, *tol, *max_iters, &mut io),
    };
    match result {
        Ok(code) => code,
        Err(CommandError::Library(e)) => io.fail(&e),
        Err(CommandError::Io(e)) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_PARSE
        }
    }
}

enum CommandError {
    Library(Error),
    Io(std::io::Error),
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        CommandError::Library(e)
    }
}

impl From<std::io::Error> for CommandError {
    fn from(e: std::io::Error) -> Self {
        CommandError::Io(e)
    }
}

impl From<ScenarioError> for CommandError {
    fn from(e: ScenarioError) -> Self {
        CommandError::Io(std::io::Error::other(e.to_string()))
    }
}

type CommandResult = Result<i32, CommandError>;

fn agent_error(index: usize, e: Error) -> Error {
    Error::Agent {
        index,
        source: Box::new(e),
    }
}

fn validate(scenario: &Scenario, io: &mut Io) -> CommandResult {
    let mut code = EXIT_OK;
    for (i, agent) in scenario.agents.iter().enumerate() {
        match agent.group(scenario.commodities) {
            Ok(g) if g.is_coercive() => writeln!(io.out, "agent {i}: valid, coercive")?,
            Ok(_) => writeln!(io.out, "agent {i}: valid, not coercive")?,
            Err(Error::SingularSystem { .. }) => {
                writeln!(io.out, "agent {i}: invalid: singular")?;
                code = EXIT_INVALID_GROUP;
            }
            Err(e) => {
                writeln!(io.out, "agent {i}: invalid: {e}")?;
                code = EXIT_INVALID_GROUP;
            }
        }
    }
    Ok(code)
}

struct Solved {
    spec: GroupSpec,
    direct: Option<DemandResult>,
    closed: Option<DemandResult>,
}

fn solve_agents(scenario: &Scenario, method: Method) -> Result<Vec<Solved>, Error> {
    let p = scenario.prices()?;
    scenario
        .agents
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let inner = || -> Result<Solved, Error> {
                let spec = a.group(scenario.commodities)?;
                let income = a.income();
                let direct = match method {
                    Method::Closed => None,
                    _ => Some(demand_direct(&spec, &p, &income, &a.reference()?)?),
                };
                let closed = match method {
                    Method::Direct => None,
                    _ => Some(demand_closed_form(&spec, &p, &income)?),
                };
                Ok(Solved { spec, direct, closed })
            };
            inner().map_err(|e| agent_error(i, e))
        })
        .collect()
}

fn max_rel_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()))
        .fold(0.0, f64::max)
}

fn demand(scenario: &Scenario, method: Method, csv: Option<&PathBuf>, io: &mut Io) -> CommandResult {
    let solved = solve_agents(scenario, method)?;
    let l = scenario.commodities;
    let mut csv_text = String::new();
    let header: Vec<String> = std::iter::once("agent_index".to_string())
        .chain((1..=l).map(|k| format!("x_{k}")))
        .chain(std::iter::once("v_max".to_string()))
        .chain((1..l).map(|k| format!("s_{k}")))
        .collect();
    csv_text.push_str(&header.join(","));
    csv_text.push('\n');

    writeln!(io.out, "{:<6} {:<8} {:<40} {:<20} s", "agent", "method", "x", "v_max")?;
    let mut worst = 0.0f64;
    for (i, s) in solved.iter().enumerate() {
        for (label, d) in [("direct", &s.direct), ("closed", &s.closed)] {
            if let Some(d) = d {
                writeln!(
                    io.out,
                    "{:<6} {:<8} {:<40} {:<20} ({})",
                    i,
                    label,
                    format!("({})", join(d.bundle.as_slice())),
                    fmt_sig(d.max_value, 12),
                    join(d.element.params())
                )?;
            }
        }
        if let (Some(d), Some(c)) = (&s.direct, &s.closed) {
            worst = worst.max(max_rel_deviation(d.bundle.as_slice(), c.bundle.as_slice()));
        }
        let row = s.direct.as_ref().or(s.closed.as_ref()).expect("one method ran");
        let fields: Vec<String> = std::iter::once(i.to_string())
            .chain(row.bundle.as_slice().iter().map(|v| fmt_sig(*v, 12)))
            .chain(std::iter::once(fmt_sig(row.max_value, 12)))
            .chain(row.element.params().iter().map(|v| fmt_sig(*v, 12)))
            .collect();
        csv_text.push_str(&fields.join(","));
        csv_text.push('\n');
        debug_assert_eq!(s.spec.commodities(), l);
    }
    if method == Method::Both {
        writeln!(
            io.out,
            "max relative discrepancy direct vs closed: {}",
            fmt_sig(worst, 3)
        )?;
    }
    if let Some(path) = csv {
        std::fs::write(path, csv_text)?;
    }
    Ok(EXIT_OK)
}

fn random_reference(rng: &mut ChaCha8Rng, l: usize) -> Bundle {
    // Log-uniform over [1e-3, 1e3].
    let r = (0..l).map(|_| 10f64.powf(rng.random_range(-3.0..=3.0))).collect();
    Bundle::new(r).expect("positive by construction")
}

fn verify(scenario: &Scenario, references: usize, seed: u64, io: &mut Io) -> CommandResult {
    if references == 0 {
        return Err(Error::InvalidParameter("need at least one reference".into()).into());
    }
    let p = scenario.prices()?;
    let l = scenario.commodities;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    writeln!(
        io.out,
        "references per agent: {references} (the first is the agent's own)"
    )?;
    writeln!(
        io.out,
        "{:<6} {:<24} {:<24}",
        "agent", "max deviation", "vs closed form"
    )?;
    let mut worst = 0.0f64;
    for (i, a) in scenario.agents.iter().enumerate() {
        let spec = a.group(l).map_err(|e| agent_error(i, e))?;
        let income = a.income();
        let own = a.reference().map_err(|e| agent_error(i, e))?;
        let baseline = demand_direct(&spec, &p, &income, &own).map_err(|e| agent_error(i, e))?;
        let closed = demand_closed_form(&spec, &p, &income).map_err(|e| agent_error(i, e))?;
        let mut deviation = 0.0f64;
        let mut vs_closed = max_rel_deviation(baseline.bundle.as_slice(), closed.bundle.as_slice());
        for _ in 1..references {
            let r = random_reference(&mut rng, l);
            let d = demand_direct(&spec, &p, &income, &r).map_err(|e| agent_error(i, e))?;
            deviation = deviation.max(max_rel_deviation(d.bundle.as_slice(), baseline.bundle.as_slice()));
            vs_closed = vs_closed.max(max_rel_deviation(d.bundle.as_slice(), closed.bundle.as_slice()));
        }
        writeln!(
            io.out,
            "{:<6} {:<24} {:<24}",
            i,
            fmt_sig(deviation, 3),
            fmt_sig(vs_closed, 3)
        )?;
        worst = worst.max(deviation).max(vs_closed);
    }
    if worst <= VERIFY_TOLERANCE {
        writeln!(
            io.out,
            "PASS: demand independent of reference (max deviation {})",
            fmt_sig(worst, 3)
        )?;
        Ok(EXIT_OK)
    } else {
        writeln!(
            io.out,
            "FAIL: max deviation {} exceeds {VERIFY_TOLERANCE:e}",
            fmt_sig(worst, 3)
        )?;
        Ok(EXIT_CHECK_FAILED)
    }
}

fn equilibrium(scenario: &Scenario, step: f64, tol: f64, max_iters: usize, io: &mut Io) -> CommandResult {
    let agents = scenario
        .agents
        .iter()
        .enumerate()
        .map(|(i, a)| a.market_agent(scenario.commodities).map_err(|e| agent_error(i, e)))
        .collect::<Result<Vec<_>, _>>()?;
    let config = TatonnementConfig {
        initial_prices: Some(scenario.prices.clone()),
        step,
        tolerance: tol,
        max_iters,
        ..Default::default()
    };
    let eq = tatonnement(&agents, &config)?;
    writeln!(io.out, "p_star: ({})", join(&eq.prices))?;
    writeln!(io.out, "excess: ({})", join(&eq.excess))?;
    writeln!(io.out, "excess_norm: {}", fmt_sig(eq.excess_norm, 6))?;
    writeln!(io.out, "iterations: {}", eq.iterations)?;
    writeln!(io.out, "walras_residual: {}", fmt_sig(eq.max_walras_residual, 6))?;
    writeln!(io.out, "converged: {}", eq.converged)?;
    Ok(if eq.converged { EXIT_OK } else { EXIT_NO_CONVERGENCE })
}
