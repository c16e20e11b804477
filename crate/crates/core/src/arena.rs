//! One-shot open-source games between agents, decided in the unbounded
//! (idealized proof search) regime.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::agents::{action_var, compile_duel, Action, Agent, AgentError, Seat};
use crate::gl::{evaluate_system, EvalError, EvaluationResult, FixedPointSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("agent `{agent}` plays `{action}`, which is outside the common alphabet")]
    ActionSetMismatch { agent: String, action: Action },
    #[error("internal error: seat `{seat}` settles on {count} actions instead of exactly one")]
    NotExactlyOneAction { seat: &'static str, count: usize },
    #[error("internal error: outcome matrix is not swap-consistent at ({row}, {col})")]
    SwapInconsistent { row: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub row_action: Action,
    pub col_action: Action,
    pub system: FixedPointSystem,
    pub evidence: EvaluationResult,
}

impl Outcome {
    pub fn actions(&self) -> (&str, &str) {
        (self.row_action.as_str(), self.col_action.as_str())
    }
}

fn settled_action(agent: &Agent, seat: Seat, result: &EvaluationResult) -> Result<Action, ArenaError> {
    let prefix = seat.prefix();
    let chosen: Vec<&Action> = agent
        .actions()
        .iter()
        .filter(|a| result.value(&action_var(prefix, a)) == Some(true))
        .collect();
    // Undeclared actions are defined as F; count every seat variable anyway.
    let total = result
        .vars
        .iter()
        .zip(&result.stable)
        .filter(|(v, &b)| b && v.as_str().split_once('.').map(|(p, _)| p) == Some(prefix))
        .count();
    match (chosen.as_slice(), total) {
        ([only], 1) => Ok((*only).clone()),
        _ => Err(ArenaError::NotExactlyOneAction { seat: prefix, count: total }),
    }
}

pub fn duel(row: &Agent, col: &Agent) -> Result<Outcome, ArenaError> {
    let system = compile_duel(row, col)?;
    let evidence = evaluate_system(&system)?;
    Ok(Outcome {
        row_action: settled_action(row, Seat::Row, &evidence)?,
        col_action: settled_action(col, Seat::Col, &evidence)?,
        system,
        evidence,
    })
}

#[derive(Debug, Clone)]
pub struct OutcomeMatrix {
    pub agents: Vec<String>,
    /// `cells[i][j]` is the outcome of agent `i` (row) against agent `j`.
    pub cells: Vec<Vec<Outcome>>,
}

impl OutcomeMatrix {
    pub fn get(&self, row: usize, col: usize) -> &Outcome {
        &self.cells[row][col]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }
}

/// All ordered pairs, including self-pairs, over the union of the agents'
/// action sets.
pub fn duel_matrix(agents: &[Agent]) -> Result<OutcomeMatrix, ArenaError> {
    let mut alphabet: Vec<Action> = Vec::new();
    for a in agents.iter().flat_map(|a| a.actions()) {
        if !alphabet.contains(a) {
            alphabet.push(a.clone());
        }
    }
    duel_matrix_over(agents, &alphabet)
}

/// Like [`duel_matrix`], but every agent's actions must come from `alphabet`.
pub fn duel_matrix_over(agents: &[Agent], alphabet: &[Action]) -> Result<OutcomeMatrix, ArenaError> {
    for agent in agents {
        if let Some(action) = agent.actions().iter().find(|a| !alphabet.contains(a)) {
            return Err(ArenaError::ActionSetMismatch {
                agent: agent.name().to_string(),
                action: action.clone(),
            });
        }
    }
    let n = agents.len();
    let flat: Vec<Outcome> = (0..n * n)
        .into_par_iter()
        .map(|k| duel(&agents[k / n], &agents[k % n]))
        .collect::<Result<_, _>>()?;
    let mut cells: Vec<Vec<Outcome>> = Vec::with_capacity(n);
    let mut it = flat.into_iter();
    for _ in 0..n {
        cells.push(it.by_ref().take(n).collect());
    }
    for i in 0..n {
        for j in 0..n {
            if cells[i][j].row_action != cells[j][i].col_action {
                return Err(ArenaError::SwapInconsistent { row: i, col: j });
            }
        }
    }
    Ok(OutcomeMatrix {
        agents: agents.iter().map(|a| a.name().to_string()).collect(),
        cells,
    })
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub rank: usize,
    pub vars: BTreeMap<String, bool>,
    pub boxes: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuelReport {
    pub row_agent: String,
    pub col_agent: String,
    pub row_action: String,
    pub col_action: String,
    pub stabilization_rank: usize,
    pub trace: Vec<TraceEntry>,
}

impl DuelReport {
    pub fn new(row: &Agent, col: &Agent, outcome: &Outcome) -> Self {
        let ev = &outcome.evidence;
        let trace = ev
            .trace
            .iter()
            .map(|row| TraceEntry {
                rank: row.rank,
                vars: ev.vars.iter().map(|v| v.to_string()).zip(row.vars.iter().copied()).collect(),
                boxes: ev.boxes.iter().map(|b| b.to_string()).zip(row.boxes.iter().copied()).collect(),
            })
            .collect();
        DuelReport {
            row_agent: row.name().to_string(),
            col_agent: col.name().to_string(),
            row_action: outcome.row_action.to_string(),
            col_action: outcome.col_action.to_string(),
            stabilization_rank: ev.stabilization_rank,
            trace,
        }
    }
}

/// Label carried by every experiment entry.
pub const IDEALIZED_BANNER: &str = "GL-idealized (k\u{2192}\u{221e}) analogue";

/// Outcomes conjectured for the bounded agents, keyed by (row, col).
const BOUNDED_CONJECTURES: [(&str, &str, &str, &str); 1] = [("DUPOC", "CUPOD", "D", "C")];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentEntry {
    pub label: String,
    pub status: String,
    #[serde(flatten)]
    pub duel: DuelReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentReport {
    pub banner: String,
    pub entries: Vec<ExperimentEntry>,
}

/// Settles the unbounded analogue of each pair. The bounded-k outcomes of
/// these pairs are not decided by this computation; the status line says so.
pub fn experiment_report(pairs: &[(Agent, Agent)]) -> Result<ExperimentReport, ArenaError> {
    let entries = pairs
        .iter()
        .map(|(row, col)| {
            let outcome = duel(row, col)?;
            let (ra, ca) = outcome.actions();
            let conjecture = BOUNDED_CONJECTURES
                .iter()
                .find(|(r, c, _, _)| *r == row.name() && *c == col.name());
            let status = match conjecture {
                Some((_, _, cr, cc)) if (*cr, *cc) == (ra, ca) => format!(
                    "bounded outcome open; conjectured ({cr},{cc}); idealized analogue agrees"
                ),
                Some((_, _, cr, cc)) => format!(
                    "bounded outcome open; conjectured ({cr},{cc}); idealized analogue disagrees"
                ),
                None => "bounded outcome open; no conjecture recorded".to_string(),
            };
            Ok(ExperimentEntry {
                label: IDEALIZED_BANNER.to_string(),
                status,
                duel: DuelReport::new(row, col, &outcome),
            })
        })
        .collect::<Result<_, ArenaError>>()?;
    Ok(ExperimentReport {
        banner: IDEALIZED_BANNER.to_string(),
        entries,
    })
}

/// The three pairs whose bounded outcomes are open questions.
pub fn open_problem_pairs() -> Vec<(Agent, Agent)> {
    use crate::agents::builtin;
    [("DUPOC", "CUPOD"), ("CUPOD", "CIMCIC"), ("DUPOC", "DIMCID")]
        .iter()
        .map(|(r, c)| (builtin(r).expect("builtin"), builtin(c).expect("builtin")))
        .collect()
}
