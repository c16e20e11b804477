//! The `loebarena` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::agents::{builtin, compile_agent, is_builtin, parse_roster, Agent};
use crate::arena::{duel, duel_matrix, experiment_report, open_problem_pairs, DuelReport, TraceEntry};
use crate::dynamics::{evolve, payoff, PayoffMatrix, PopulationState, ReplicatorConfig};
use crate::error::{Error, ExitCode};
use crate::gl::{evaluate_system, eventual_value, FixedPointSystem};
use crate::modal::{parse_formula, ModalFormula};
use crate::sandbox::{
    bounded_duel, check_proof, proof_search, BoundedPlayer, Charset, Enumerator, ProofBudget, ProofSystem,
    DEFAULT_MAX_CANDIDATES,
};
use crate::stochastic::{sample_pdupoc_selfplay, write_csv, CouplingMode, SampleRecord};

#[derive(Debug, Parser)]
#[command(name = "loebarena", version, about = "Open-source game outcomes between proof-based agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnumKind {
    Lex,
    Guided,
    Oracle,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Proof enumerator.
    #[arg(long = "enum", value_enum, default_value = "guided")]
    enumerator: EnumKind,
    /// Cap on lexicographic candidates.
    #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
    max_candidates: u64,
}

impl SearchArgs {
    fn enumerator(&self) -> Enumerator {
        match self.enumerator {
            EnumKind::Lex => Enumerator::Lexicographic {
                charset: Charset::printable_ascii(),
                max_candidates: self.max_candidates,
            },
            EnumKind::Guided => Enumerator::Guided,
            EnumKind::Oracle => Enumerator::oracle(),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a fixed-point system (file or inline `v := ...` text) or a closed formula.
    Eval {
        input: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Include the rank-by-rank trace in JSON output.
        #[arg(long)]
        trace: bool,
    },
    /// Play two agents (builtin names or agent files) in the unbounded regime.
    Duel {
        row: String,
        col: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Play two agents with literal, character-bounded proof search.
    BoundedDuel {
        row: String,
        col: String,
        /// Budget for both agents, in characters.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long)]
        budget_a: Option<u64>,
        #[arg(long)]
        budget_b: Option<u64>,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// All ordered pairs of a roster, with payoffs.
    Tournament {
        agents: String,
        /// Payoff table: `encroachment`, `pd`, or a CSV file.
        #[arg(long, default_value = "encroachment")]
        payoffs: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Replicator dynamics over a roster.
    Evolve {
        agents: String,
        /// CSV `agent,share`; uniform over the roster when omitted.
        #[arg(long)]
        pop: Option<String>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value = "pd")]
        payoffs: String,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        shift: f64,
        #[arg(long, default_value_t = 0.0)]
        mutation: f64,
    },
    /// Monte Carlo self-play of the probabilistic DUPOC.
    Sample {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value = "independent")]
        mode: String,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Search for a proof of a goal from a system's equations.
    Prove {
        system: String,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check a proof file against a system and goal.
    Check {
        system: String,
        proof: String,
        #[arg(long)]
        goal: String,
    },
    /// Idealized analogues of the open bounded duels.
    Experiment {
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn read(path: &str) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.into(),
        source,
    })
}

/// A builtin name, else an agent source file.
fn resolve_agent(arg: &str) -> Result<Agent, Error> {
    if is_builtin(arg) {
        return Ok(builtin(arg)?);
    }
    if Path::new(arg).is_file() {
        return Ok(compile_agent(&read(arg)?)?);
    }
    Err(Error::Agent(crate::agents::AgentError::UnknownAgent(arg.to_string())))
}

/// A roster file, else an inline roster such as `CB, DB, DUPOC`.
fn resolve_roster(arg: &str) -> Result<Vec<Agent>, Error> {
    if Path::new(arg).is_file() {
        return Ok(parse_roster(&read(arg)?)?);
    }
    let roster = parse_roster(arg)?;
    if roster.is_empty() {
        return Err(Error::Usage(format!("roster `{arg}` names no agents")));
    }
    Ok(roster)
}

/// A system file, else inline system text.
fn resolve_system(arg: &str) -> Result<FixedPointSystem, Error> {
    if Path::new(arg).is_file() {
        Ok(FixedPointSystem::parse(&read(arg)?)?)
    } else if arg.contains(":=") {
        Ok(FixedPointSystem::parse(arg)?)
    } else {
        Err(Error::Usage(format!("`{arg}` is neither a system file nor inline system text")))
    }
}

fn resolve_payoffs(arg: &str) -> Result<PayoffMatrix, Error> {
    if Path::new(arg).is_file() {
        Ok(PayoffMatrix::from_csv(read(arg)?.as_bytes())?)
    } else {
        Ok(PayoffMatrix::builtin(arg)?)
    }
}

fn budget(k: u64) -> Result<ProofBudget, Error> {
    Ok(ProofBudget::new(k)?)
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Error> {
    // Round-tripping through `Value` sorts object keys.
    let value = serde_json::to_value(value).map_err(|e| Error::Internal(e.to_string()))?;
    let text = serde_json::to_string_pretty(&value).map_err(|e| Error::Internal(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn unsupported(format: Format, command: &str) -> Error {
    Error::Usage(format!("{command} does not support {format:?} output"))
}

fn trace_entries(sys: &FixedPointSystem) -> Result<(crate::gl::EvaluationResult, Vec<TraceEntry>), Error> {
    let ev = evaluate_system(sys)?;
    let trace = ev
        .trace
        .iter()
        .map(|row| TraceEntry {
            rank: row.rank,
            vars: ev.vars.iter().map(|v| v.to_string()).zip(row.vars.iter().copied()).collect(),
            boxes: ev.boxes.iter().map(|b| b.to_string()).zip(row.boxes.iter().copied()).collect(),
        })
        .collect();
    Ok((ev, trace))
}

fn cmd_eval(input: &str, format: Format, with_trace: bool, out: &mut dyn Write) -> Result<(), Error> {
    let system = if Path::new(input).is_file() || input.contains(":=") {
        Some(resolve_system(input)?)
    } else {
        None
    };
    match system {
        Some(sys) => {
            let (ev, trace) = trace_entries(&sys)?;
            match format {
                Format::Json => {
                    let values: serde_json::Map<String, Value> =
                        ev.vars.iter().zip(&ev.stable).map(|(v, b)| (v.to_string(), json!(b))).collect();
                    let mut report = json!({"values": values, "stabilization_rank": ev.stabilization_rank});
                    if with_trace {
                        report["trace"] = serde_json::to_value(&trace).map_err(|e| Error::Internal(e.to_string()))?;
                    }
                    emit_json(out, &report)
                }
                Format::Text => {
                    for (v, b) in ev.vars.iter().zip(&ev.stable) {
                        writeln!(out, "{v} = {b}")?;
                    }
                    writeln!(out, "stabilization rank {}", ev.stabilization_rank)?;
                    Ok(())
                }
                Format::Csv => Err(unsupported(format, "eval")),
            }
        }
        None => {
            let formula = parse_formula(input)?;
            let empty = FixedPointSystem::new(Vec::new(), Vec::new())?;
            let value = eventual_value(&empty, &formula)?;
            match format {
                Format::Json => emit_json(out, &json!({"formula": formula.to_string(), "value": value})),
                Format::Text => Ok(writeln!(out, "{value}")?),
                Format::Csv => Err(unsupported(format, "eval")),
            }
        }
    }
}

fn cmd_duel(row: &str, col: &str, format: Format, out: &mut dyn Write) -> Result<(), Error> {
    let (a, b) = (resolve_agent(row)?, resolve_agent(col)?);
    let outcome = duel(&a, &b)?;
    match format {
        Format::Json => emit_json(out, &DuelReport::new(&a, &b, &outcome)),
        Format::Text => {
            let (r, c) = outcome.actions();
            writeln!(out, "{} vs {}: ({r},{c})", a.name(), b.name())?;
            Ok(())
        }
        Format::Csv => {
            let (r, c) = outcome.actions();
            writeln!(out, "row_agent,col_agent,row_action,col_action")?;
            writeln!(out, "{},{},{r},{c}", a.name(), b.name())?;
            Ok(())
        }
    }
}

fn cmd_tournament(agents: &str, payoffs: &str, format: Format, out: &mut dyn Write) -> Result<(), Error> {
    let roster = resolve_roster(agents)?;
    let m = resolve_payoffs(payoffs)?;
    let matrix = duel_matrix(&roster)?;
    let mut cells = Vec::new();
    for (i, row) in matrix.agents.iter().enumerate() {
        for (j, col) in matrix.agents.iter().enumerate() {
            let outcome = matrix.get(i, j);
            let (rp, cp) = payoff(outcome, &m)?;
            let (ra, ca) = outcome.actions();
            cells.push((row.clone(), col.clone(), ra.to_string(), ca.to_string(), rp, cp));
        }
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["row_agent", "col_agent", "row_action", "col_action", "row_payoff", "col_payoff"])
                .map_err(|e| Error::Internal(e.to_string()))?;
            for (r, c, ra, ca, rp, cp) in &cells {
                w.write_record([r, c, ra, ca, &rp.to_string(), &cp.to_string()])
                    .map_err(|e| Error::Internal(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
            out.write_all(&bytes)?;
            Ok(())
        }
        Format::Json => {
            let cells: Vec<Value> = cells
                .iter()
                .map(|(r, c, ra, ca, rp, cp)| {
                    json!({"row_agent": r, "col_agent": c, "row_action": ra, "col_action": ca, "row_payoff": rp, "col_payoff": cp})
                })
                .collect();
            emit_json(out, &json!({"agents": matrix.agents, "cells": cells}))
        }
        Format::Text => {
            for (r, c, ra, ca, rp, cp) in &cells {
                writeln!(out, "{r} vs {c}: ({ra},{ca}) payoffs ({rp}, {cp})")?;
            }
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_evolve(
    agents: &str,
    pop: Option<&str>,
    steps: usize,
    payoffs: &str,
    shift: f64,
    mutation: f64,
    out: &mut dyn Write,
) -> Result<(), Error> {
    if steps == 0 {
        return Err(Error::Usage("--steps must be at least 1".into()));
    }
    let roster = resolve_roster(agents)?;
    let m = resolve_payoffs(payoffs)?;
    let population = match pop {
        Some(path) => PopulationState::from_csv(read(path)?.as_bytes())?,
        None => PopulationState::uniform(roster.iter().map(|a| a.name().to_string()))?,
    };
    let matrix = duel_matrix(&roster)?;
    let config = ReplicatorConfig { shift, mutation };
    let trajectory = evolve(&population, &matrix, &m, &config, steps)?;
    let mut buf = Vec::new();
    trajectory.write_csv(&mut buf).map_err(|e| Error::Internal(e.to_string()))?;
    out.write_all(&buf)?;
    Ok(())
}

fn cmd_sample(q: f64, mode: &str, n: u64, seed: u64, format: Format, out: &mut dyn Write) -> Result<(), Error> {
    let mode: CouplingMode = mode.parse()?;
    let freq = sample_pdupoc_selfplay(q, mode, n, seed)?;
    let record = SampleRecord::new(q, mode, &freq);
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&[record], &mut buf).map_err(|e| Error::Internal(e.to_string()))?;
            out.write_all(&buf)?;
            Ok(())
        }
        Format::Json => emit_json(out, &record),
        Format::Text => Err(unsupported(format, "sample")),
    }
}

fn cmd_bounded(
    row: &str,
    col: &str,
    budgets: (u64, u64),
    search: &SearchArgs,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Error> {
    let (a, b) = (resolve_agent(row)?, resolve_agent(col)?);
    let enumerator = search.enumerator();
    let row_player = BoundedPlayer {
        agent: &a,
        budget: budget(budgets.0)?,
        enumerator: &enumerator,
    };
    let col_player = BoundedPlayer {
        agent: &b,
        budget: budget(budgets.1)?,
        enumerator: &enumerator,
    };
    let outcome = bounded_duel(&row_player, &col_player)?;
    match format {
        Format::Json => emit_json(out, &outcome),
        Format::Text => {
            writeln!(out, "{} vs {}: ({},{})", a.name(), b.name(), outcome.row_action, outcome.col_action)?;
            for (who, searches) in [(a.name(), &outcome.row_searches), (b.name(), &outcome.col_searches)] {
                for s in searches {
                    match s.report.proof_length {
                        Some(len) => writeln!(out, "{who} rule {}: proof of {} in {len} characters", s.rule, s.goal)?,
                        None => writeln!(
                            out,
                            "{who} rule {}: no proof of {} ({} candidates examined)",
                            s.rule, s.goal, s.report.candidates_examined
                        )?,
                    }
                }
            }
            Ok(())
        }
        Format::Csv => Err(unsupported(format, "bounded-duel")),
    }
}

fn cmd_prove(
    system: &str,
    goal: &str,
    k: u64,
    search: &SearchArgs,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Error> {
    let sys = resolve_system(system)?;
    let goal: ModalFormula = parse_formula(goal)?;
    let result = proof_search(budget(k)?, &ProofSystem::for_system(&sys), &goal, &search.enumerator());
    match format {
        Format::Json => {
            let mut report = serde_json::to_value(result.report()).map_err(|e| Error::Internal(e.to_string()))?;
            report["proof"] = json!(result.found.as_ref().map(|p| p.text.clone()));
            report["truncated"] = json!(result.truncated);
            emit_json(out, &report)
        }
        Format::Text => {
            match &result.found {
                Some(p) => write!(out, "{}", p.text)?,
                None => writeln!(out, "no proof within {k} characters ({} candidates examined)", result.candidates_examined)?,
            }
            Ok(())
        }
        Format::Csv => Err(unsupported(format, "prove")),
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Error> {
    match command {
        Command::Eval { input, format, trace } => cmd_eval(&input, format, trace, out),
        Command::Duel { row, col, format } => cmd_duel(&row, &col, format, out),
        Command::BoundedDuel {
            row,
            col,
            budget,
            budget_a,
            budget_b,
            search,
            format,
        } => cmd_bounded(
            &row,
            &col,
            (budget_a.unwrap_or(budget), budget_b.unwrap_or(budget)),
            &search,
            format,
            out,
        ),
        Command::Tournament { agents, payoffs, format } => cmd_tournament(&agents, &payoffs, format, out),
        Command::Evolve {
            agents,
            pop,
            steps,
            payoffs,
            shift,
            mutation,
        } => cmd_evolve(&agents, pop.as_deref(), steps, &payoffs, shift, mutation, out),
        Command::Sample { q, mode, n, seed, format } => cmd_sample(q, &mode, n, seed, format, out),
        Command::Prove {
            system,
            goal,
            budget,
            search,
            format,
        } => cmd_prove(&system, &goal, budget, &search, format, out),
        Command::Check { system, proof, goal } => {
            let sys = resolve_system(&system)?;
            let accepted = check_proof(&ProofSystem::for_system(&sys), &read(&proof)?, &parse_formula(&goal)?);
            writeln!(out, "{accepted}")?;
            Ok(())
        }
        Command::Experiment { format } => {
            let report = experiment_report(&open_problem_pairs())?;
            match format {
                Format::Json => emit_json(out, &report),
                Format::Text => {
                    writeln!(out, "{}", report.banner)?;
                    for e in &report.entries {
                        writeln!(
                            out,
                            "{} vs {}: ({},{}) stabilized at rank {}; {}",
                            e.duel.row_agent, e.duel.col_agent, e.duel.row_action, e.duel.col_action,
                            e.duel.stabilization_rank, e.status
                        )?;
                    }
                    Ok(())
                }
                Format::Csv => Err(unsupported(format, "experiment")),
            }
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// process exit status. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::Usage } else { ExitCode::Success };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code as i32;
        }
    };
    let mut buf = Vec::new();
    match execute(cli.command, &mut buf) {
        Ok(()) => match out.write_all(&buf).and_then(|_| out.flush()) {
            Ok(()) => ExitCode::Success as i32,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write output: {e}");
                ExitCode::Internal as i32
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code() as i32
        }
    }
}
