//! Payoffs, population fitness and discrete replicator dynamics over agent
//! types.

use std::collections::HashMap;
use std::io;

use serde::Deserialize;
use thiserror::Error;

use crate::agents::Action;
use crate::arena::{Outcome, OutcomeMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("action `{0}` has no payoff entry")]
    UnknownAction(String),
    #[error("payoff table is missing the cell ({row}, {col})")]
    MissingCell { row: String, col: String },
    #[error("payoff cell ({row}, {col}) is given twice")]
    DuplicateCell { row: String, col: String },
    #[error("payoffs are not role-symmetric at ({row}, {col})")]
    Asymmetric { row: String, col: String },
    #[error("unknown payoff matrix `{0}` (expected encroachment or pd)")]
    UnknownMatrix(String),
    #[error("invalid payoff table: {0}")]
    Csv(String),
    #[error("population shares must be finite, nonnegative and sum to 1 (sum is {0})")]
    NotASimplex(f64),
    #[error("agent `{0}` appears twice in the population")]
    DuplicateAgent(String),
    #[error("agent `{0}` is not in the outcome matrix")]
    UnknownAgent(String),
    #[error("fitness of `{agent}` is {value} after the payoff shift; it must be positive")]
    NonpositiveFitness { agent: String, value: f64 },
    #[error("mutation rate must be in [0, 1], got {0}")]
    BadMutation(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    actions: Vec<String>,
    /// `cells[r][c]` = (row payoff, column payoff).
    cells: Vec<Vec<(f64, f64)>>,
}

#[derive(Debug, Deserialize)]
struct PayoffRow {
    row: String,
    col: String,
    row_payoff: f64,
    col_payoff: f64,
}

impl PayoffMatrix {
    pub fn new(actions: Vec<String>, cells: Vec<Vec<(f64, f64)>>) -> Result<Self, DynamicsError> {
        let n = actions.len();
        for (r, row) in actions.iter().enumerate() {
            for (c, col) in actions.iter().enumerate() {
                let missing = || DynamicsError::MissingCell {
                    row: row.clone(),
                    col: col.clone(),
                };
                let (rp, _) = *cells.get(r).and_then(|x| x.get(c)).ok_or_else(missing)?;
                let (_, cp) = *cells.get(c).and_then(|x| x.get(r)).ok_or_else(missing)?;
                if rp != cp {
                    return Err(DynamicsError::Asymmetric {
                        row: row.clone(),
                        col: col.clone(),
                    });
                }
            }
        }
        if cells.len() != n || cells.iter().any(|r| r.len() != n) {
            return Err(DynamicsError::Csv("payoff table is not square".into()));
        }
        Ok(PayoffMatrix { actions, cells })
    }

    /// The three-action game with encroachment.
    pub fn encroachment() -> Self {
        let cells = vec![
            vec![(2.0, 2.0), (0.0, 3.0), (-2.0, 4.0)],
            vec![(3.0, 0.0), (1.0, 1.0), (-1.0, 2.0)],
            vec![(4.0, -2.0), (2.0, -1.0), (0.0, 0.0)],
        ];
        Self::new(vec!["C".into(), "D".into(), "E".into()], cells).expect("valid matrix")
    }

    /// The prisoner's dilemma block (actions C and D) of [`Self::encroachment`].
    pub fn prisoners_dilemma() -> Self {
        let cells = vec![vec![(2.0, 2.0), (0.0, 3.0)], vec![(3.0, 0.0), (1.0, 1.0)]];
        Self::new(vec!["C".into(), "D".into()], cells).expect("valid matrix")
    }

    pub fn builtin(name: &str) -> Result<Self, DynamicsError> {
        match name {
            "encroachment" => Ok(Self::encroachment()),
            "pd" => Ok(Self::prisoners_dilemma()),
            _ => Err(DynamicsError::UnknownMatrix(name.to_string())),
        }
    }

    /// Reads CSV with header `row,col,row_payoff,col_payoff`, one line per cell.
    /// Actions are ordered by first appearance.
    pub fn from_csv<R: io::Read>(input: R) -> Result<Self, DynamicsError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let mut actions: Vec<String> = Vec::new();
        let mut entries: HashMap<(String, String), (f64, f64)> = HashMap::new();
        for record in reader.deserialize() {
            let r: PayoffRow = record.map_err(|e| DynamicsError::Csv(e.to_string()))?;
            for a in [&r.row, &r.col] {
                Action::new(a.as_str()).map_err(|e| DynamicsError::Csv(e.to_string()))?;
                if !actions.contains(a) {
                    actions.push(a.clone());
                }
            }
            let key = (r.row.clone(), r.col.clone());
            if entries.insert(key, (r.row_payoff, r.col_payoff)).is_some() {
                return Err(DynamicsError::DuplicateCell { row: r.row, col: r.col });
            }
        }
        let mut cells = Vec::with_capacity(actions.len());
        for row in &actions {
            let mut line = Vec::with_capacity(actions.len());
            for col in &actions {
                let cell = entries.get(&(row.clone(), col.clone())).ok_or_else(|| DynamicsError::MissingCell {
                    row: row.clone(),
                    col: col.clone(),
                })?;
                line.push(*cell);
            }
            cells.push(line);
        }
        Self::new(actions, cells)
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    fn index(&self, action: &str) -> Result<usize, DynamicsError> {
        self.actions
            .iter()
            .position(|a| a == action)
            .ok_or_else(|| DynamicsError::UnknownAction(action.to_string()))
    }

    pub fn get(&self, row: &str, col: &str) -> Result<(f64, f64), DynamicsError> {
        Ok(self.cells[self.index(row)?][self.index(col)?])
    }

    /// The same game with `c` added to every payoff.
    pub fn shifted(&self, c: f64) -> Self {
        PayoffMatrix {
            actions: self.actions.clone(),
            cells: self
                .cells
                .iter()
                .map(|row| row.iter().map(|&(a, b)| (a + c, b + c)).collect())
                .collect(),
        }
    }
}

pub fn payoff(outcome: &Outcome, m: &PayoffMatrix) -> Result<(f64, f64), DynamicsError> {
    let (r, c) = outcome.actions();
    m.get(r, c)
}

/// Tolerance on the sum of population shares.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    agents: Vec<String>,
    shares: Vec<f64>,
}

impl PopulationState {
    pub fn new(entries: impl IntoIterator<Item = (String, f64)>) -> Result<Self, DynamicsError> {
        let (agents, shares): (Vec<String>, Vec<f64>) = entries.into_iter().unzip();
        for (i, a) in agents.iter().enumerate() {
            if agents[..i].contains(a) {
                return Err(DynamicsError::DuplicateAgent(a.clone()));
            }
        }
        let sum: f64 = shares.iter().sum();
        if agents.is_empty() || shares.iter().any(|s| !s.is_finite() || *s < 0.0) || (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(DynamicsError::NotASimplex(sum));
        }
        Ok(PopulationState { agents, shares })
    }

    /// Equal shares over `agents`.
    pub fn uniform(agents: impl IntoIterator<Item = String>) -> Result<Self, DynamicsError> {
        let agents: Vec<String> = agents.into_iter().collect();
        let n = agents.len() as f64;
        Self::new(agents.into_iter().map(|a| (a, 1.0 / n)))
    }

    /// Reads CSV with header `agent,share`.
    pub fn from_csv<R: io::Read>(input: R) -> Result<Self, DynamicsError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let rows: Vec<(String, f64)> = reader
            .deserialize()
            .collect::<Result<_, _>>()
            .map_err(|e| DynamicsError::Csv(e.to_string()))?;
        Self::new(rows)
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn shares(&self) -> &[f64] {
        &self.shares
    }

    pub fn share(&self, agent: &str) -> Option<f64> {
        self.agents.iter().position(|a| a == agent).map(|i| self.shares[i])
    }

    fn indices_in(&self, outcomes: &OutcomeMatrix) -> Result<Vec<usize>, DynamicsError> {
        self.agents
            .iter()
            .map(|a| outcomes.index_of(a).ok_or_else(|| DynamicsError::UnknownAgent(a.clone())))
            .collect()
    }
}

/// Expected row payoff of each population agent against the population,
/// aligned with [`PopulationState::agents`].
pub fn fitness(pop: &PopulationState, outcomes: &OutcomeMatrix, m: &PayoffMatrix) -> Result<Vec<f64>, DynamicsError> {
    let idx = pop.indices_in(outcomes)?;
    idx.iter()
        .map(|&i| {
            idx.iter().zip(&pop.shares).try_fold(0.0, |acc, (&j, &s)| {
                Ok(acc + s * payoff(outcomes.get(i, j), m)?.0)
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicatorConfig {
    /// Constant added to every fitness value.
    pub shift: f64,
    /// Weight of uniform mutation mixed in after selection.
    pub mutation: f64,
}

impl Default for ReplicatorConfig {
    fn default() -> Self {
        ReplicatorConfig { shift: 3.0, mutation: 0.0 }
    }
}

impl ReplicatorConfig {
    pub fn with_shift(shift: f64) -> Self {
        ReplicatorConfig { shift, ..Self::default() }
    }
}

pub fn replicator_step(
    pop: &PopulationState,
    outcomes: &OutcomeMatrix,
    m: &PayoffMatrix,
    config: &ReplicatorConfig,
) -> Result<PopulationState, DynamicsError> {
    if !(0.0..=1.0).contains(&config.mutation) {
        return Err(DynamicsError::BadMutation(config.mutation));
    }
    let f: Vec<f64> = fitness(pop, outcomes, m)?.into_iter().map(|x| x + config.shift).collect();
    if let Some(i) = f.iter().position(|&x| x <= 0.0 || x.is_nan()) {
        return Err(DynamicsError::NonpositiveFitness {
            agent: pop.agents[i].clone(),
            value: f[i],
        });
    }
    let mean: f64 = pop.shares.iter().zip(&f).map(|(s, x)| s * x).sum();
    let n = pop.shares.len() as f64;
    let eps = config.mutation;
    let mut shares: Vec<f64> = pop
        .shares
        .iter()
        .zip(&f)
        .map(|(s, x)| s * x / mean)
        .map(|s| if eps > 0.0 { (1.0 - eps) * s + eps / n } else { s })
        .collect();
    let sum: f64 = shares.iter().sum();
    if sum != 1.0 {
        shares.iter_mut().for_each(|s| *s /= sum);
    }
    PopulationState::new(pop.agents.iter().cloned().zip(shares))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub agents: Vec<String>,
    /// Row `t` holds the shares after `t` steps; row 0 is the initial state.
    pub rows: Vec<Vec<f64>>,
}

pub fn evolve(
    pop: &PopulationState,
    outcomes: &OutcomeMatrix,
    m: &PayoffMatrix,
    config: &ReplicatorConfig,
    steps: usize,
) -> Result<Trajectory, DynamicsError> {
    let mut rows = vec![pop.shares.clone()];
    let mut current = pop.clone();
    for _ in 0..steps {
        current = replicator_step(&current, outcomes, m, config)?;
        rows.push(current.shares.clone());
    }
    Ok(Trajectory {
        agents: pop.agents.clone(),
        rows,
    })
}

/// Formats `x` with 17 significant digits.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..16).contains(&exponent) {
        let decimals = (16 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

impl Trajectory {
    /// CSV with header `step,<agent>...`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(std::iter::once("step").chain(self.agents.iter().map(String::as_str)))?;
        for (t, row) in self.rows.iter().enumerate() {
            w.write_record(std::iter::once(t.to_string()).chain(row.iter().map(|&x| format_sig17(x))))?;
        }
        w.flush()?;
        Ok(())
    }
}
