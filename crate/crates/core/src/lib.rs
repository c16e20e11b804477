//! Outcomes of one-shot open-source games between proof-based agents.
//!
//! Agents decide by searching for proofs about each other. In the unbounded
//! regime a duel compiles to a system of mutually referential provability
//! equations, which [`gl`] settles on the Kripke rank frame of Gödel–Löb
//! provability logic. [`sandbox`] replays the same duels with literal,
//! length-bounded proof search, [`stochastic`] samples randomized agents, and
//! [`dynamics`] runs replicator dynamics over populations of agents.

pub mod agents;
pub mod arena;
pub mod cli;
pub mod dynamics;
mod error;
pub mod gl;
pub mod modal;
pub mod sandbox;
pub mod stochastic;

pub use agents::{builtin, compile_agent, compile_duel, Action, Agent};
pub use arena::{duel, duel_matrix, experiment_report, Outcome, OutcomeMatrix};
pub use error::{Error, ExitCode};
pub use gl::{evaluate_system, rank_trace, EvaluationResult, FixedPointSystem};
pub use modal::{parse_formula, render_formula, Formula, ModalFormula, Name};
