//! Kripke-rank evaluation of fully-modalized fixed-point systems.
//!
//! Worlds are the ranks `0, 1, 2, ...` of a linear, conversely well-founded
//! frame in which rank `n` sees every rank `m < n`. `[]f` holds at rank `n`
//! iff `f` held at every lower rank, so every box is vacuously true at rank 0
//! and, once false, stays false. Variable values at a rank are determined by
//! the box values at that rank because every variable occurrence in a
//! definition is guarded. The box profile therefore changes at most once per
//! box and the iteration settles after at most `|boxes|` ranks.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::modal::{parse_formula, ModalFormula, Name, ParseError};

/// Hard ceiling on the number of ranks a single evaluation may visit.
pub const RANK_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("variable `{var}` is defined more than once")]
    DuplicateVariable { var: Name },
    #[error("definition of `{var}` mentions `{unknown}`, which is not a system variable")]
    VariableMismatch { var: Name, unknown: Name },
    #[error("{vars} variables but {defs} definitions")]
    LengthMismatch { vars: usize, defs: usize },
    #[error("definition of `{var}` is not fully modalized: `{occurrence}` occurs outside [] at path {path:?}")]
    NotFullyModalized {
        var: Name,
        occurrence: Name,
        path: Vec<usize>,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("internal error: no fixed point after {0} ranks")]
    RankCapExceeded(usize),
}

/// Variables with fully-modalized defining formulas, `vars[i] <-> defs[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointSystem {
    vars: Vec<Name>,
    defs: Vec<ModalFormula>,
}

impl FixedPointSystem {
    pub fn new(vars: Vec<Name>, defs: Vec<ModalFormula>) -> Result<Self, SystemError> {
        if vars.len() != defs.len() {
            return Err(SystemError::LengthMismatch {
                vars: vars.len(),
                defs: defs.len(),
            });
        }
        let mut known = HashSet::new();
        for v in &vars {
            if !known.insert(v.clone()) {
                return Err(SystemError::DuplicateVariable { var: v.clone() });
            }
        }
        for (v, def) in vars.iter().zip(&defs) {
            if let Some(unknown) = def.atoms().into_iter().find(|a| !known.contains(*a)) {
                return Err(SystemError::VariableMismatch {
                    var: v.clone(),
                    unknown: unknown.clone(),
                });
            }
            if let Some(path) = def.first_unguarded(|_| true) {
                return Err(SystemError::NotFullyModalized {
                    var: v.clone(),
                    occurrence: occurrence_at(def, &path).clone(),
                    path,
                });
            }
        }
        Ok(FixedPointSystem { vars, defs })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, ModalFormula)>) -> Result<Self, SystemError> {
        let (vars, defs) = pairs.into_iter().unzip();
        Self::new(vars, defs)
    }

    /// Parses `name := formula` definitions separated by newlines or `;`.
    /// `#` starts a comment that runs to the end of the line.
    pub fn parse(text: &str) -> Result<Self, SystemError> {
        let mut pairs = Vec::new();
        let mut line_start = 0;
        for line in text.split_inclusive('\n') {
            let body = line.split('#').next().unwrap_or("");
            let mut piece_start = line_start;
            for piece in body.split(';') {
                let trimmed = piece.trim();
                if !trimmed.is_empty() {
                    let lead = piece.len() - piece.trim_start().len();
                    let at = piece_start + lead;
                    let Some((lhs, rhs)) = trimmed.split_once(":=") else {
                        return Err(ParseError::new(at, &[":="], trimmed).into());
                    };
                    let name = Name::new(lhs.trim()).map_err(|e| e.shifted(at))?;
                    let rhs_at = at + lhs.len() + 2;
                    let def = parse_formula(rhs).map_err(|e| e.shifted(rhs_at))?;
                    pairs.push((name, def));
                }
                piece_start += piece.len() + 1;
            }
            line_start += line.len();
        }
        Self::from_pairs(pairs)
    }

    pub fn vars(&self) -> &[Name] {
        &self.vars
    }

    pub fn defs(&self) -> &[ModalFormula] {
        &self.defs
    }

    pub fn def(&self, var: &Name) -> Option<&ModalFormula> {
        self.index_of(var).map(|i| &self.defs[i])
    }

    pub fn index_of(&self, var: &Name) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    /// Renames every variable; the mapping must be injective.
    pub fn rename(&self, mut f: impl FnMut(&Name) -> Name) -> Result<Self, SystemError> {
        let map: HashMap<Name, ModalFormula> = self
            .vars
            .iter()
            .map(|v| (v.clone(), ModalFormula::Var(f(v))))
            .collect();
        let vars = self
            .vars
            .iter()
            .map(|v| match &map[v] {
                ModalFormula::Var(n) => n.clone(),
                _ => unreachable!(),
            })
            .collect();
        let defs = self.defs.iter().map(|d| d.substitute(&map)).collect();
        Self::new(vars, defs)
    }

    /// Distinct box subformulas of all definitions, in definition order.
    pub fn box_subformulas(&self) -> Vec<&ModalFormula> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for d in &self.defs {
            d.collect_boxes(&mut out, &mut seen);
        }
        out
    }
}

fn occurrence_at<'a>(f: &'a ModalFormula, path: &[usize]) -> &'a Name {
    let mut cur = f;
    for &i in path {
        cur = match cur {
            ModalFormula::Not(x) | ModalFormula::Box(x) => x,
            ModalFormula::And(x, y)
            | ModalFormula::Or(x, y)
            | ModalFormula::Implies(x, y)
            | ModalFormula::Iff(x, y) => {
                if i == 0 {
                    x
                } else {
                    y
                }
            }
            _ => break,
        };
    }
    match cur {
        ModalFormula::Var(n) => n,
        _ => unreachable!("path does not lead to a variable"),
    }
}

impl fmt::Display for FixedPointSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, d) in self.vars.iter().zip(&self.defs) {
            writeln!(f, "{v} := {d}")?;
        }
        Ok(())
    }
}

/// One rank of the evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub rank: usize,
    pub vars: Vec<bool>,
    pub boxes: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationResult {
    pub vars: Vec<Name>,
    /// Box subformulas, indexed like `TraceRow::boxes`.
    pub boxes: Vec<ModalFormula>,
    pub stable: Vec<bool>,
    pub stabilization_rank: usize,
    /// Rows `0..=stabilization_rank`.
    pub trace: Vec<TraceRow>,
}

impl EvaluationResult {
    pub fn value(&self, var: &Name) -> Option<bool> {
        self.vars.iter().position(|v| v == var).map(|i| self.stable[i])
    }

    /// Value of a box subformula from the stabilization rank on.
    pub fn stable_box(&self, f: &ModalFormula) -> Option<bool> {
        let i = self.boxes.iter().position(|b| b == f)?;
        self.trace.last().map(|row| row.boxes[i])
    }
}

// ---------------------------------------------------------------------------
// Compiled form: variables and boxes are referenced by index.

#[derive(Debug, Clone)]
enum Node {
    Const(bool),
    Var(usize),
    Box(usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
}

impl Node {
    fn eval(&self, vars: &[bool], boxes: &[bool]) -> bool {
        match self {
            Node::Const(b) => *b,
            Node::Var(i) => vars[*i],
            Node::Box(i) => boxes[*i],
            Node::Not(x) => !x.eval(vars, boxes),
            Node::And(x, y) => x.eval(vars, boxes) && y.eval(vars, boxes),
            Node::Or(x, y) => x.eval(vars, boxes) || y.eval(vars, boxes),
            Node::Implies(x, y) => !x.eval(vars, boxes) || y.eval(vars, boxes),
            Node::Iff(x, y) => x.eval(vars, boxes) == y.eval(vars, boxes),
        }
    }
}

struct Compiled {
    defs: Vec<Node>,
    queries: Vec<Node>,
    /// Argument of each box, in innermost-first order.
    box_args: Vec<Node>,
    boxes: Vec<ModalFormula>,
}

struct Compiler<'a> {
    var_index: HashMap<&'a Name, usize>,
    box_index: HashMap<&'a ModalFormula, usize>,
}

impl Compiler<'_> {
    fn node(&self, f: &ModalFormula) -> Node {
        let bin = |x: &ModalFormula, y: &ModalFormula| (Box::new(self.node(x)), Box::new(self.node(y)));
        match f {
            ModalFormula::Top => Node::Const(true),
            ModalFormula::Bottom => Node::Const(false),
            ModalFormula::Var(n) => Node::Var(self.var_index[n]),
            ModalFormula::Box(_) => Node::Box(self.box_index[f]),
            ModalFormula::Not(x) => Node::Not(Box::new(self.node(x))),
            ModalFormula::And(x, y) => {
                let (a, b) = bin(x, y);
                Node::And(a, b)
            }
            ModalFormula::Or(x, y) => {
                let (a, b) = bin(x, y);
                Node::Or(a, b)
            }
            ModalFormula::Implies(x, y) => {
                let (a, b) = bin(x, y);
                Node::Implies(a, b)
            }
            ModalFormula::Iff(x, y) => {
                let (a, b) = bin(x, y);
                Node::Iff(a, b)
            }
        }
    }
}

fn compile(sys: &FixedPointSystem, queries: &[ModalFormula]) -> Compiled {
    let mut boxes = Vec::new();
    let mut seen = HashSet::new();
    for d in sys.defs.iter().chain(queries) {
        d.collect_boxes(&mut boxes, &mut seen);
    }
    let compiler = Compiler {
        var_index: sys.vars.iter().enumerate().map(|(i, v)| (v, i)).collect(),
        box_index: boxes.iter().enumerate().map(|(i, b)| (*b, i)).collect(),
    };
    let box_args = boxes
        .iter()
        .map(|b| match b {
            ModalFormula::Box(arg) => compiler.node(arg),
            _ => unreachable!(),
        })
        .collect();
    Compiled {
        defs: sys.defs.iter().map(|d| compiler.node(d)).collect(),
        queries: queries.iter().map(|q| compiler.node(q)).collect(),
        box_args,
        boxes: boxes.into_iter().cloned().collect(),
    }
}

struct Ranks<'a> {
    compiled: &'a Compiled,
    rank: usize,
    boxes: Vec<bool>,
}

struct RankState {
    row: TraceRow,
    queries: Vec<bool>,
    /// Whether the box profile of the next rank equals this one.
    settled: bool,
}

impl<'a> Ranks<'a> {
    fn new(compiled: &'a Compiled) -> Self {
        Ranks {
            compiled,
            rank: 0,
            boxes: vec![true; compiled.box_args.len()],
        }
    }

    fn step(&mut self) -> RankState {
        let c = self.compiled;
        // Definitions read only box values, never bare variables.
        let vars: Vec<bool> = c.defs.iter().map(|d| d.eval(&[], &self.boxes)).collect();
        let queries = c.queries.iter().map(|q| q.eval(&vars, &self.boxes)).collect();
        let next: Vec<bool> = c
            .box_args
            .iter()
            .zip(&self.boxes)
            .map(|(arg, &now)| now && arg.eval(&vars, &self.boxes))
            .collect();
        let settled = next == self.boxes;
        let row = TraceRow {
            rank: self.rank,
            vars,
            boxes: std::mem::replace(&mut self.boxes, next),
        };
        self.rank += 1;
        RankState { row, queries, settled }
    }
}

/// Runs ranks until the box profile is a fixed point.
fn settle(compiled: &Compiled) -> Result<(Vec<TraceRow>, Vec<bool>), EvalError> {
    let mut ranks = Ranks::new(compiled);
    let mut trace = Vec::new();
    loop {
        if ranks.rank >= RANK_CAP {
            return Err(EvalError::RankCapExceeded(RANK_CAP));
        }
        let state = ranks.step();
        trace.push(state.row);
        if state.settled {
            return Ok((trace, state.queries));
        }
    }
}

pub fn evaluate_system(sys: &FixedPointSystem) -> Result<EvaluationResult, EvalError> {
    let compiled = compile(sys, &[]);
    let (trace, _) = settle(&compiled)?;
    let last = trace.last().expect("at least one rank");
    Ok(EvaluationResult {
        vars: sys.vars.clone(),
        boxes: compiled.boxes.clone(),
        stable: last.vars.clone(),
        stabilization_rank: last.rank,
        trace,
    })
}

/// The first `max_rank + 1` rows of the rank iteration.
pub fn rank_trace(sys: &FixedPointSystem, max_rank: usize) -> Result<Vec<TraceRow>, EvalError> {
    if max_rank >= RANK_CAP {
        return Err(EvalError::RankCapExceeded(RANK_CAP));
    }
    let compiled = compile(sys, &[]);
    let mut ranks = Ranks::new(&compiled);
    Ok((0..=max_rank).map(|_| ranks.step().row).collect())
}

/// Eventual truth value of an arbitrary formula over the system's variables.
///
/// The formula need not be modalized; its boxes join the iteration so the
/// value is read at a rank where both the system and the query have settled.
pub fn eventual_value(sys: &FixedPointSystem, query: &ModalFormula) -> Result<bool, SystemError> {
    if let Some(unknown) = query.atoms().into_iter().find(|a| sys.index_of(a).is_none()) {
        return Err(SystemError::VariableMismatch {
            var: Name::new("query").expect("valid name"),
            unknown: unknown.clone(),
        });
    }
    let compiled = compile(sys, std::slice::from_ref(query));
    // A cap hit is unreachable for validated systems; report it as settled-false.
    Ok(settle(&compiled).map(|(_, q)| q[0]).unwrap_or(false))
}

/// Whether a formula holds at every rank, i.e. is valid in the system's model.
pub fn holds_everywhere(sys: &FixedPointSystem, query: &ModalFormula) -> Result<bool, SystemError> {
    eventual_value(sys, &ModalFormula::boxed(query.clone()))
}
