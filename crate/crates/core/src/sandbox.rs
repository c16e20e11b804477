//! Literal, length-bounded proof search.
//!
//! Proofs are Hilbert-style derivations in provability logic over the
//! equations of a compiled duel. A proof is plain text, one line per step:
//!
//! ```text
//! 1. a.C & b.C -> b.C [Taut]
//! 2. [](a.C & b.C -> b.C) [Nec 1]
//! ```
//!
//! Justifications are `Taut` (abbreviated `T`), `K`, `Lob`, `Agent v-def`,
//! `Agent v-def + Taut`, `MP i,j` and `Nec i`. The line number prefix is
//! optional when checking; the canonical rendering always carries it and
//! ends every line with a newline. A proof's length is its character count,
//! which is what a search budget bounds.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::agents::{compile_duel, instantiate, Action, Agent, AgentError, Seat};
use crate::gl::FixedPointSystem;
use crate::modal::{parse_formula, Formula, ModalFormula, Name};

/// Default cap on candidates examined by a lexicographic search.
pub const DEFAULT_MAX_CANDIDATES: u64 = 1_000_000;

/// Tautology checks give up (reject) above this many distinct atoms.
pub const MAX_TAUT_ATOMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SandboxError {
    #[error("charset must be nonempty and duplicate-free")]
    BadCharset,
    #[error("budget must be at least 1 character")]
    ZeroBudget,
    #[error("agent `{agent}`: rule {rule} is not a single provability condition `[]phi`")]
    UnsupportedCondition { agent: String, rule: usize },
    #[error(transparent)]
    Agent(#[from] AgentError),
}

// ---------------------------------------------------------------------------
// Candidate strings

/// An ordered, duplicate-free alphabet for lexicographic enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Charset(Vec<char>);

impl Charset {
    pub fn new(chars: impl IntoIterator<Item = char>) -> Result<Self, SandboxError> {
        let chars: Vec<char> = chars.into_iter().collect();
        let distinct: HashSet<char> = chars.iter().copied().collect();
        if chars.is_empty() || distinct.len() != chars.len() {
            return Err(SandboxError::BadCharset);
        }
        Ok(Charset(chars))
    }

    /// The 95 printable ASCII characters, space through tilde.
    pub fn printable_ascii() -> Self {
        Charset((0x20u8..=0x7e).map(char::from).collect())
    }

    pub fn chars(&self) -> &[char] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// All strings of length `1..=length_bound`, shortest first, each length in
/// charset order. This is an odometer: the last digit spins fastest and a
/// carry out of the leading digit lengthens the string.
pub struct StringGenerator<'a> {
    charset: &'a [char],
    length_bound: usize,
    digits: Vec<usize>,
    char_pos: usize,
    done: bool,
}

pub fn string_generator(length_bound: usize, charset: &Charset) -> StringGenerator<'_> {
    StringGenerator {
        charset: charset.chars(),
        length_bound,
        digits: vec![0],
        char_pos: 1,
        done: length_bound == 0,
    }
}

impl Iterator for StringGenerator<'_> {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        if self.done {
            return None;
        }
        let base = self.charset.len();
        loop {
            let len = self.digits.len();
            if self.digits[len - self.char_pos] == base {
                if self.char_pos == self.length_bound {
                    self.done = true;
                    return None;
                }
                for i in 1..=self.char_pos {
                    self.digits[len - i] = 0;
                }
                self.char_pos += 1;
                if self.char_pos > len {
                    self.digits.insert(0, 0);
                } else {
                    self.digits[len - self.char_pos] += 1;
                }
                continue;
            }
            let s = self.digits.iter().map(|&d| self.charset[d]).collect();
            self.char_pos = 1;
            self.digits[len - 1] += 1;
            return Some(s);
        }
    }
}

/// Number of strings of length `1..=length_bound`, saturating.
pub fn candidate_count(base: usize, length_bound: usize) -> u64 {
    let mut total: u64 = 0;
    let mut block: u64 = 1;
    for _ in 0..length_bound {
        block = block.saturating_mul(base as u64);
        total = total.saturating_add(block);
    }
    total
}

/// Writes the `index`-th string of the generator order into `buf`.
fn decode_candidate(mut index: u64, chars: &[char], buf: &mut String) {
    let base = chars.len() as u64;
    let mut len = 1;
    let mut block = base;
    while index >= block {
        index -= block;
        len += 1;
        block = block.saturating_mul(base);
    }
    buf.clear();
    let mut digits = [0usize; 64];
    for slot in digits[..len].iter_mut().rev() {
        *slot = (index % base) as usize;
        index /= base;
    }
    buf.extend(digits[..len].iter().map(|&d| chars[d]));
}

// ---------------------------------------------------------------------------
// Proof objects

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// Propositional tautology, boxes and variables read as atoms.
    Taut,
    /// Distribution: `[](p -> q) -> ([]p -> []q)`.
    K,
    /// Loeb's axiom: `[]([]p -> p) -> []p`.
    Lob,
    /// The defining equation of a system variable, or (with `taut`) a
    /// tautological consequence of it.
    Agent { var: Name, taut: bool },
    /// Modus ponens from two earlier lines (1-based, either order).
    MP(usize, usize),
    /// Necessitation of an earlier line.
    Nec(usize),
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Taut => f.write_str("Taut"),
            Justification::K => f.write_str("K"),
            Justification::Lob => f.write_str("Lob"),
            Justification::Agent { var, taut: false } => write!(f, "Agent {var}-def"),
            Justification::Agent { var, taut: true } => write!(f, "Agent {var}-def + Taut"),
            Justification::MP(i, j) => write!(f, "MP {i},{j}"),
            Justification::Nec(i) => write!(f, "Nec {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub formula: ModalFormula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofObject {
    pub lines: Vec<ProofLine>,
    pub goal: ModalFormula,
}

impl ProofObject {
    /// Canonical rendering: `<n>. <formula> [<justification>]\n` per line.
    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Character length of the canonical rendering.
    pub fn length(&self) -> usize {
        self.render().chars().count()
    }
}

impl fmt::Display for ProofObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, line) in self.lines.iter().enumerate() {
            writeln!(f, "{}. {} [{}]", i + 1, line.formula, line.justification)?;
        }
        Ok(())
    }
}

fn parse_index(s: &str) -> Option<usize> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || s.len() > 9 {
        return None;
    }
    s.parse().ok().filter(|&n| n >= 1)
}

fn parse_justification(text: &str) -> Option<Justification> {
    let text = text.trim();
    match text {
        "Taut" | "T" => return Some(Justification::Taut),
        "K" => return Some(Justification::K),
        "Lob" => return Some(Justification::Lob),
        _ => {}
    }
    if let Some(rest) = text.strip_prefix("Agent ") {
        let (body, taut) = match rest.strip_suffix("+ Taut").or_else(|| rest.strip_suffix("+Taut")) {
            Some(body) => (body.trim_end(), true),
            None => (rest, false),
        };
        let var = body.trim().strip_suffix("-def")?;
        return Some(Justification::Agent {
            var: Name::new(var).ok()?,
            taut,
        });
    }
    if let Some(rest) = text.strip_prefix("MP ") {
        let (i, j) = rest.split_once(',')?;
        return Some(Justification::MP(parse_index(i)?, parse_index(j)?));
    }
    if let Some(rest) = text.strip_prefix("Nec ") {
        return Some(Justification::Nec(parse_index(rest)?));
    }
    None
}

fn parse_line(line: &str, number: usize) -> Option<ProofLine> {
    let body = line.strip_suffix(']')?;
    let open = body.rfind('[')?;
    let justification = parse_justification(&body[open + 1..])?;
    let mut formula_text = body[..open].trim();
    let digits = formula_text.bytes().take_while(u8::is_ascii_digit).count();
    if digits > 0 {
        let rest = formula_text[digits..].strip_prefix('.')?;
        if formula_text[..digits].parse::<usize>().ok()? != number {
            return None;
        }
        formula_text = rest.trim_start();
    }
    let formula = parse_formula(formula_text).ok()?;
    Some(ProofLine {
        formula,
        justification,
    })
}

/// Parses proof text into lines, or `None` if any line is malformed.
pub fn parse_proof(text: &str) -> Option<Vec<ProofLine>> {
    // Cheap rejection for the bulk of brute-force candidates.
    if !text.ends_with(']') && !text.ends_with("]\n") {
        return None;
    }
    let text = text.strip_suffix('\n').unwrap_or(text);
    text.split('\n')
        .enumerate()
        .map(|(i, line)| parse_line(line, i + 1))
        .collect()
}

// ---------------------------------------------------------------------------
// Checking

/// Logical axioms plus the equations of one fixed-point system.
#[derive(Debug, Clone, Default)]
pub struct ProofSystem {
    axioms: HashMap<Name, ModalFormula>,
    system: Option<FixedPointSystem>,
}

impl ProofSystem {
    /// Pure provability logic, with no agent axioms.
    pub fn logic_only() -> Self {
        Self::default()
    }

    pub fn for_system(system: &FixedPointSystem) -> Self {
        ProofSystem {
            axioms: system
                .vars()
                .iter()
                .zip(system.defs())
                .map(|(v, d)| (v.clone(), ModalFormula::iff(ModalFormula::Var(v.clone()), d.clone())))
                .collect(),
            system: Some(system.clone()),
        }
    }

    pub fn system(&self) -> Option<&FixedPointSystem> {
        self.system.as_ref()
    }

    pub fn agent_axiom(&self, var: &Name) -> Option<&ModalFormula> {
        self.axioms.get(var)
    }

    fn line_is_valid(&self, lines: &[ProofLine], n: usize) -> bool {
        let line = &lines[n];
        let earlier = |i: usize| (i >= 1 && i <= n).then(|| &lines[i - 1].formula);
        match &line.justification {
            Justification::Taut => is_tautology(&line.formula),
            Justification::K => is_k_instance(&line.formula),
            Justification::Lob => is_lob_instance(&line.formula),
            Justification::Agent { var, taut } => match self.axioms.get(var) {
                None => false,
                Some(axiom) if !taut => *axiom == line.formula,
                Some(axiom) => is_tautology(&ModalFormula::implies(axiom.clone(), line.formula.clone())),
            },
            Justification::MP(i, j) => match (earlier(*i), earlier(*j)) {
                (Some(a), Some(b)) => modus_ponens(a, b, &line.formula) || modus_ponens(b, a, &line.formula),
                _ => false,
            },
            Justification::Nec(i) => match (earlier(*i), &line.formula) {
                (Some(prev), Formula::Box(inner)) => **inner == *prev,
                _ => false,
            },
        }
    }

    /// Whether every line of a parsed proof is justified and the last line
    /// is `goal`.
    pub fn accepts(&self, lines: &[ProofLine], goal: &ModalFormula) -> bool {
        lines.last().is_some_and(|l| l.formula == *goal)
            && (0..lines.len()).all(|n| self.line_is_valid(lines, n))
    }
}

fn modus_ponens(implication: &ModalFormula, antecedent: &ModalFormula, result: &ModalFormula) -> bool {
    matches!(implication, Formula::Implies(p, q) if **p == *antecedent && **q == *result)
}

fn is_k_instance(f: &ModalFormula) -> bool {
    let Formula::Implies(lhs, rhs) = f else { return false };
    let Formula::Box(inner) = &**lhs else { return false };
    let Formula::Implies(p, q) = &**inner else { return false };
    let Formula::Implies(bp, bq) = &**rhs else { return false };
    matches!((&**bp, &**bq), (Formula::Box(p2), Formula::Box(q2)) if p2 == p && q2 == q)
}

fn is_lob_instance(f: &ModalFormula) -> bool {
    let Formula::Implies(lhs, rhs) = f else { return false };
    let Formula::Box(inner) = &**lhs else { return false };
    let Formula::Implies(bp, p) = &**inner else { return false };
    matches!((&**bp, &**rhs), (Formula::Box(p1), Formula::Box(p2)) if p1 == p && p2 == p)
}

enum Prop {
    Const(bool),
    Atom(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Implies(Box<Prop>, Box<Prop>),
    Iff(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn build<'a>(f: &'a ModalFormula, atoms: &mut HashMap<&'a ModalFormula, usize>) -> Prop {
        let two = |x: &'a ModalFormula, y: &'a ModalFormula, atoms: &mut HashMap<&'a ModalFormula, usize>| {
            (Box::new(Prop::build(x, atoms)), Box::new(Prop::build(y, atoms)))
        };
        match f {
            Formula::Top => Prop::Const(true),
            Formula::Bottom => Prop::Const(false),
            Formula::Var(_) | Formula::Box(_) => {
                let next = atoms.len();
                Prop::Atom(*atoms.entry(f).or_insert(next))
            }
            Formula::Not(x) => Prop::Not(Box::new(Prop::build(x, atoms))),
            Formula::And(x, y) => {
                let (a, b) = two(x, y, atoms);
                Prop::And(a, b)
            }
            Formula::Or(x, y) => {
                let (a, b) = two(x, y, atoms);
                Prop::Or(a, b)
            }
            Formula::Implies(x, y) => {
                let (a, b) = two(x, y, atoms);
                Prop::Implies(a, b)
            }
            Formula::Iff(x, y) => {
                let (a, b) = two(x, y, atoms);
                Prop::Iff(a, b)
            }
        }
    }

    fn eval(&self, bits: u32) -> bool {
        match self {
            Prop::Const(b) => *b,
            Prop::Atom(i) => bits >> i & 1 == 1,
            Prop::Not(x) => !x.eval(bits),
            Prop::And(x, y) => x.eval(bits) && y.eval(bits),
            Prop::Or(x, y) => x.eval(bits) || y.eval(bits),
            Prop::Implies(x, y) => !x.eval(bits) || y.eval(bits),
            Prop::Iff(x, y) => x.eval(bits) == y.eval(bits),
        }
    }
}

/// Truth-table check with variables and boxed subformulas as atoms. Formulas
/// with more than [`MAX_TAUT_ATOMS`] atoms are rejected.
pub fn is_tautology(f: &ModalFormula) -> bool {
    let mut atoms = HashMap::new();
    let prop = Prop::build(f, &mut atoms);
    if atoms.len() > MAX_TAUT_ATOMS {
        return false;
    }
    (0..1u32 << atoms.len()).all(|bits| prop.eval(bits))
}

/// True iff `proof_text` is a valid derivation of `goal`. Never fails on
/// malformed input; garbage is simply not a proof.
pub fn check_proof(system: &ProofSystem, proof_text: &str, goal: &ModalFormula) -> bool {
    parse_proof(proof_text).is_some_and(|lines| system.accepts(&lines, goal))
}

// ---------------------------------------------------------------------------
// Proof templates

fn line(formula: ModalFormula, justification: Justification) -> ProofLine {
    ProofLine { formula, justification }
}

/// Variables reachable from the goal through definitions, in system order.
fn goal_closure(system: &FixedPointSystem, goal: &ModalFormula) -> Vec<Name> {
    let mut reached: HashSet<&Name> = goal.atoms().into_iter().collect();
    let mut frontier: Vec<&Name> = reached.iter().copied().collect();
    while let Some(v) = frontier.pop() {
        if let Some(def) = system.def(v) {
            for a in def.atoms() {
                if reached.insert(a) {
                    frontier.push(a);
                }
            }
        }
    }
    system.vars().iter().filter(|v| reached.contains(v)).cloned().collect()
}

/// A Loeb-style derivation of `goal` through the conjunction of `targets`.
///
/// With `G` the conjunction, the derivation lifts `G -> psi` to
/// `[]G -> []psi` for every box `[]psi` in the targets' definitions that `G`
/// tautologically implies, combines those with the targets' defining
/// equations into `[]G -> G`, applies necessitation and Loeb's axiom to get
/// `[]G` and so `G`, and finally weakens `G` to the goal. The result is only
/// a candidate; the checker decides whether it is a proof.
pub fn lob_template(system: &FixedPointSystem, goal: &ModalFormula, targets: &[Name]) -> Option<ProofObject> {
    if targets.is_empty() {
        return None;
    }
    let g = ModalFormula::conjunction(targets.iter().cloned().map(ModalFormula::Var));
    let box_g = ModalFormula::boxed(g.clone());
    let mut lines: Vec<ProofLine> = Vec::new();
    let mut premises: Vec<(ModalFormula, usize)> = Vec::new();

    let mut seen = HashSet::new();
    let mut psis = Vec::new();
    for t in targets {
        for b in system.def(t)?.box_subformulas() {
            if let Formula::Box(psi) = b {
                if seen.insert(psi) && is_tautology(&ModalFormula::implies(g.clone(), (**psi).clone())) {
                    psis.push((**psi).clone());
                }
            }
        }
    }
    for psi in psis {
        let imp = ModalFormula::implies(g.clone(), psi.clone());
        lines.push(line(imp.clone(), Justification::Taut));
        let n1 = lines.len();
        lines.push(line(ModalFormula::boxed(imp.clone()), Justification::Nec(n1)));
        let n2 = lines.len();
        let lifted = ModalFormula::implies(box_g.clone(), ModalFormula::boxed(psi));
        lines.push(line(
            ModalFormula::implies(ModalFormula::boxed(imp), lifted.clone()),
            Justification::K,
        ));
        let n3 = lines.len();
        lines.push(line(lifted.clone(), Justification::MP(n3, n2)));
        premises.push((lifted, lines.len()));
    }
    for t in targets {
        let axiom = ModalFormula::iff(ModalFormula::Var(t.clone()), system.def(t)?.clone());
        lines.push(line(axiom.clone(), Justification::Agent { var: t.clone(), taut: false }));
        premises.push((axiom, lines.len()));
    }
    let reflection = ModalFormula::implies(box_g.clone(), g.clone());
    let chain = premises
        .iter()
        .rev()
        .fold(reflection.clone(), |acc, (p, _)| ModalFormula::implies(p.clone(), acc));
    lines.push(line(chain.clone(), Justification::Taut));
    let mut current = chain;
    let mut at = lines.len();
    for (_, premise_line) in &premises {
        let Formula::Implies(_, rest) = current else { unreachable!() };
        current = *rest;
        lines.push(line(current.clone(), Justification::MP(at, *premise_line)));
        at = lines.len();
    }
    let reflection_line = at;
    lines.push(line(ModalFormula::boxed(reflection.clone()), Justification::Nec(reflection_line)));
    let nec_line = lines.len();
    lines.push(line(
        ModalFormula::implies(ModalFormula::boxed(reflection), box_g.clone()),
        Justification::Lob,
    ));
    let lob_line = lines.len();
    lines.push(line(box_g, Justification::MP(lob_line, nec_line)));
    let boxed_line = lines.len();
    lines.push(line(g.clone(), Justification::MP(reflection_line, boxed_line)));
    if g != *goal {
        let g_line = lines.len();
        lines.push(line(ModalFormula::implies(g, goal.clone()), Justification::Taut));
        let weaken_line = lines.len();
        lines.push(line(goal.clone(), Justification::MP(weaken_line, g_line)));
    }
    Some(ProofObject {
        lines,
        goal: goal.clone(),
    })
}

/// The Loeb template over the goal's definitional closure.
pub fn default_lob_seed(system: &FixedPointSystem, goal: &ModalFormula) -> Option<ProofObject> {
    lob_template(system, goal, &goal_closure(system, goal))
}

/// Seat prefix of a variable such as `a.C` or `b_vs_DB.D`.
fn seat_of(v: &Name) -> &str {
    v.as_str().rsplit_once('.').map_or(v.as_str(), |(p, _)| p)
}

/// Candidate target sets for the Loeb template.
fn template_targets(system: &FixedPointSystem, goal: &ModalFormula) -> Vec<Vec<Name>> {
    let closure = goal_closure(system, goal);
    let mut out = vec![closure.clone()];
    let goal_vars: Vec<Name> = system
        .vars()
        .iter()
        .filter(|v| goal.atoms().contains(v))
        .cloned()
        .collect();
    out.push(goal_vars);
    // One variable per seat among the closure's seats.
    let mut seats: Vec<(&str, Vec<Name>)> = Vec::new();
    for v in &closure {
        let seat = seat_of(v);
        match seats.iter_mut().find(|(s, _)| *s == seat) {
            Some((_, vs)) => vs.push(v.clone()),
            None => seats.push((seat, vec![v.clone()])),
        }
    }
    let mut combos: Vec<Vec<Name>> = vec![Vec::new()];
    for (_, vs) in &seats {
        combos = combos
            .iter()
            .flat_map(|c| {
                vs.iter().map(move |v| {
                    let mut next = c.clone();
                    next.push(v.clone());
                    next
                })
            })
            .take(64)
            .collect();
    }
    out.extend(combos);
    let mut unique = Vec::new();
    for t in out {
        if !t.is_empty() && !unique.contains(&t) {
            unique.push(t);
        }
    }
    unique
}

/// The guided schedule: single-axiom citations, modus-ponens closures of the
/// agent axioms, then Loeb templates, ordered by length (stable).
pub fn guided_candidates(system: &ProofSystem, goal: &ModalFormula) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let single = |j: Justification| {
        ProofObject {
            lines: vec![line(goal.clone(), j)],
            goal: goal.clone(),
        }
        .render()
    };
    out.push(single(Justification::Taut));
    out.push(single(Justification::K));
    out.push(single(Justification::Lob));
    if let Some(sys) = system.system() {
        for v in sys.vars() {
            out.push(single(Justification::Agent { var: v.clone(), taut: false }));
            out.push(single(Justification::Agent { var: v.clone(), taut: true }));
        }
        let goal_vars: Vec<Name> = sys
            .vars()
            .iter()
            .filter(|v| goal.atoms().contains(v))
            .cloned()
            .collect();
        for vars in [goal_vars, goal_closure(sys, goal), sys.vars().to_vec()] {
            if let Some(p) = axiom_closure(sys, goal, &vars) {
                out.push(p.render());
            }
        }
        for targets in template_targets(sys, goal) {
            if let Some(p) = lob_template(sys, goal, &targets) {
                out.push(p.render());
            }
        }
    }
    let mut seen = HashSet::new();
    out.retain(|s| seen.insert(s.clone()));
    out.sort_by_key(|s| s.chars().count());
    out
}

/// Cites the agent axioms of `vars`, then a tautology
/// `A1 -> ... -> An -> goal`, then modus ponens down the chain.
fn axiom_closure(system: &FixedPointSystem, goal: &ModalFormula, vars: &[Name]) -> Option<ProofObject> {
    if vars.is_empty() {
        return None;
    }
    let mut lines = Vec::new();
    for v in vars {
        let axiom = ModalFormula::iff(ModalFormula::Var(v.clone()), system.def(v)?.clone());
        lines.push(line(axiom, Justification::Agent { var: v.clone(), taut: false }));
    }
    let chain = lines
        .iter()
        .rev()
        .fold(goal.clone(), |acc, l| ModalFormula::implies(l.formula.clone(), acc));
    lines.push(line(chain.clone(), Justification::Taut));
    let mut current = chain;
    let mut at = lines.len();
    for premise in 1..=vars.len() {
        let Formula::Implies(_, rest) = current else { unreachable!() };
        current = *rest;
        lines.push(line(current.clone(), Justification::MP(at, premise)));
        at = lines.len();
    }
    Some(ProofObject {
        lines,
        goal: goal.clone(),
    })
}

// ---------------------------------------------------------------------------
// Search

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Seeds {
    /// The Loeb template over the goal's definitional closure.
    LobTemplate,
    Fixed(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumerator {
    Lexicographic { charset: Charset, max_candidates: u64 },
    Guided,
    /// Seed proofs first, then the guided schedule.
    OracleFirst { seeds: Seeds },
}

impl Enumerator {
    pub fn lexicographic() -> Self {
        Enumerator::Lexicographic {
            charset: Charset::printable_ascii(),
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }

    pub fn oracle() -> Self {
        Enumerator::OracleFirst { seeds: Seeds::LobTemplate }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Enumerator::Lexicographic { .. } => "lexicographic",
            Enumerator::Guided => "guided",
            Enumerator::OracleFirst { .. } => "oracle-first",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ProofBudget(u64);

impl ProofBudget {
    pub fn new(k: u64) -> Result<Self, SandboxError> {
        if k == 0 {
            Err(SandboxError::ZeroBudget)
        } else {
            Ok(ProofBudget(k))
        }
    }

    pub fn chars(self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoundProof {
    pub text: String,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub found: Option<FoundProof>,
    pub candidates_examined: u64,
    /// The candidate cap stopped the search before the budget was covered.
    pub truncated: bool,
    pub enumerator: &'static str,
    pub budget: ProofBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub found: bool,
    pub proof_length: Option<usize>,
    pub candidates_examined: u64,
    pub enumerator: String,
    pub budget: u64,
}

impl SearchOutcome {
    pub fn report(&self) -> SearchReport {
        SearchReport {
            found: self.found.is_some(),
            proof_length: self.found.as_ref().map(|p| p.length),
            candidates_examined: self.candidates_examined,
            enumerator: self.enumerator.to_string(),
            budget: self.budget.chars(),
        }
    }
}

const CHUNK: u64 = 1 << 14;

fn lexicographic_search(
    system: &ProofSystem,
    goal: &ModalFormula,
    budget: ProofBudget,
    charset: &Charset,
    max_candidates: u64,
) -> (Option<FoundProof>, u64, bool) {
    let bound = usize::try_from(budget.chars()).unwrap_or(usize::MAX).min(64);
    let total = candidate_count(charset.len(), bound);
    let limit = total.min(max_candidates);
    let chars = charset.chars();
    let mut start = 0;
    while start < limit {
        let end = (start + CHUNK).min(limit);
        // Workers test a chunk in parallel; the lowest accepted index wins.
        let hit = (start as usize..end as usize)
            .into_par_iter()
            .map_init(String::new, |buf, i| {
                decode_candidate(i as u64, chars, buf);
                check_proof(system, buf, goal)
            })
            .position_first(|ok| ok);
        if let Some(offset) = hit {
            let index = start + offset as u64;
            let mut text = String::new();
            decode_candidate(index, chars, &mut text);
            let length = text.chars().count();
            return (Some(FoundProof { text, length }), index + 1, false);
        }
        start = end;
    }
    (None, limit, limit < total)
}

fn scan(
    system: &ProofSystem,
    goal: &ModalFormula,
    budget: ProofBudget,
    candidates: impl IntoIterator<Item = String>,
) -> (Option<FoundProof>, u64) {
    let mut examined = 0;
    for text in candidates {
        examined += 1;
        let length = text.chars().count();
        if length as u64 <= budget.chars() && check_proof(system, &text, goal) {
            return (Some(FoundProof { text, length }), examined);
        }
    }
    (None, examined)
}

/// Returns the first candidate in the enumerator's stream, among those of at
/// most `budget` characters, that checks as a proof of `goal`.
pub fn proof_search(
    budget: ProofBudget,
    system: &ProofSystem,
    goal: &ModalFormula,
    enumerator: &Enumerator,
) -> SearchOutcome {
    let (found, candidates_examined, truncated) = match enumerator {
        Enumerator::Lexicographic { charset, max_candidates } => {
            lexicographic_search(system, goal, budget, charset, *max_candidates)
        }
        Enumerator::Guided => {
            let (found, n) = scan(system, goal, budget, guided_candidates(system, goal));
            (found, n, false)
        }
        Enumerator::OracleFirst { seeds } => {
            let seeds: Vec<String> = match seeds {
                Seeds::Fixed(texts) => texts.clone(),
                Seeds::LobTemplate => system
                    .system()
                    .and_then(|s| default_lob_seed(s, goal))
                    .map(|p| p.render())
                    .into_iter()
                    .collect(),
            };
            let stream = seeds.into_iter().chain(guided_candidates(system, goal));
            let (found, n) = scan(system, goal, budget, stream);
            (found, n, false)
        }
    };
    SearchOutcome {
        found,
        candidates_examined,
        truncated,
        enumerator: enumerator.label(),
        budget,
    }
}

// ---------------------------------------------------------------------------
// Bounded duels

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleSearch {
    pub rule: usize,
    pub action: String,
    pub goal: String,
    #[serde(flatten)]
    pub report: SearchReport,
    pub proof: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundedOutcome {
    pub row_agent: String,
    pub col_agent: String,
    pub row_action: String,
    pub col_action: String,
    pub row_searches: Vec<RuleSearch>,
    pub col_searches: Vec<RuleSearch>,
}

/// One seat's configuration for a bounded duel.
#[derive(Debug, Clone)]
pub struct BoundedPlayer<'a> {
    pub agent: &'a Agent,
    pub budget: ProofBudget,
    pub enumerator: &'a Enumerator,
}

/// Provability goals of an agent's rules, instantiated for its seat.
pub fn rule_goals(agent: &Agent, seat: Seat) -> Result<Vec<(Action, ModalFormula)>, SandboxError> {
    let (me, opp) = match seat {
        Seat::Row => (Seat::Row.prefix(), Seat::Col.prefix()),
        Seat::Col => (Seat::Col.prefix(), Seat::Row.prefix()),
    };
    let opp_vs_db = format!("{opp}_vs_DB");
    agent
        .rules()
        .iter()
        .enumerate()
        .map(|(i, rule)| match &rule.condition {
            Formula::Box(phi) => Ok((rule.action.clone(), instantiate(phi, me, opp, &opp_vs_db))),
            _ => Err(SandboxError::UnsupportedCondition {
                agent: agent.name().to_string(),
                rule: i + 1,
            }),
        })
        .collect()
}

fn play(player: &BoundedPlayer<'_>, seat: Seat, system: &ProofSystem) -> Result<(Action, Vec<RuleSearch>), SandboxError> {
    let mut searches = Vec::new();
    for (i, (action, goal)) in rule_goals(player.agent, seat)?.into_iter().enumerate() {
        let outcome = proof_search(player.budget, system, &goal, player.enumerator);
        let found = outcome.found.is_some();
        searches.push(RuleSearch {
            rule: i + 1,
            action: action.to_string(),
            goal: goal.to_string(),
            report: outcome.report(),
            proof: outcome.found.map(|p| p.text),
        });
        if found {
            return Ok((action, searches));
        }
    }
    Ok((player.agent.default_action().clone(), searches))
}

/// Plays a duel in which every `[]phi` condition is decided by a literal,
/// budgeted search for a proof of `phi` from the duel's equations.
pub fn bounded_duel(row: &BoundedPlayer<'_>, col: &BoundedPlayer<'_>) -> Result<BoundedOutcome, SandboxError> {
    // Validate both agents before spending any search effort.
    rule_goals(row.agent, Seat::Row)?;
    rule_goals(col.agent, Seat::Col)?;
    let system = ProofSystem::for_system(&compile_duel(row.agent, col.agent)?);
    let (row_play, col_play) = rayon::join(|| play(row, Seat::Row, &system), || play(col, Seat::Col, &system));
    let (row_action, row_searches) = row_play?;
    let (col_action, col_searches) = col_play?;
    Ok(BoundedOutcome {
        row_agent: row.agent.name().to_string(),
        col_agent: col.agent.name().to_string(),
        row_action: row_action.to_string(),
        col_action: col_action.to_string(),
        row_searches,
        col_searches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::builtin;
    use crate::arena::duel;
    use crate::gl::holds_everywhere;
    use proptest::prelude::*;

    fn f(s: &str) -> ModalFormula {
        parse_formula(s).unwrap()
    }

    fn duel_system(a: &str, b: &str) -> FixedPointSystem {
        compile_duel(&builtin(a).unwrap(), &builtin(b).unwrap()).unwrap()
    }

    fn budget(k: u64) -> ProofBudget {
        ProofBudget::new(k).unwrap()
    }

    fn gen(bound: usize, chars: &str) -> Vec<String> {
        string_generator(bound, &Charset::new(chars.chars()).unwrap()).collect()
    }

    /// Hand-built derivation of `b.C` in the DUPOC self-duel, row seat.
    const DUPOC_ROW_PROOF: &str = "\
1. a.C & b.C -> b.C [Taut]
2. [](a.C & b.C -> b.C) [Nec 1]
3. [](a.C & b.C -> b.C) -> [](a.C & b.C) -> []b.C [K]
4. [](a.C & b.C) -> []b.C [MP 3,2]
5. a.C & b.C -> a.C [Taut]
6. [](a.C & b.C -> a.C) [Nec 5]
7. [](a.C & b.C -> a.C) -> [](a.C & b.C) -> []a.C [K]
8. [](a.C & b.C) -> []a.C [MP 7,6]
9. a.C <-> []b.C [Agent a.C-def]
10. b.C <-> []a.C [Agent b.C-def]
11. ([](a.C & b.C) -> []b.C) -> ([](a.C & b.C) -> []a.C) -> (a.C <-> []b.C) -> (b.C <-> []a.C) -> [](a.C & b.C) -> a.C & b.C [Taut]
12. ([](a.C & b.C) -> []a.C) -> (a.C <-> []b.C) -> (b.C <-> []a.C) -> [](a.C & b.C) -> a.C & b.C [MP 11,4]
13. (a.C <-> []b.C) -> (b.C <-> []a.C) -> [](a.C & b.C) -> a.C & b.C [MP 12,8]
14. (b.C <-> []a.C) -> [](a.C & b.C) -> a.C & b.C [MP 13,9]
15. [](a.C & b.C) -> a.C & b.C [MP 14,10]
16. []([](a.C & b.C) -> a.C & b.C) [Nec 15]
17. []([](a.C & b.C) -> a.C & b.C) -> [](a.C & b.C) [Lob]
18. [](a.C & b.C) [MP 17,16]
19. a.C & b.C [MP 15,18]
20. a.C & b.C -> b.C [Taut]
21. b.C [MP 20,19]
";

    #[test]
    fn generator_small_cases() {
        assert_eq!(gen(2, "ab"), ["a", "b", "aa", "ab", "ba", "bb"]);
        assert_eq!(gen(1, "xyz"), ["x", "y", "z"]);
        assert_eq!(gen(3, "a"), ["a", "aa", "aaa"]);
        assert_eq!(gen(3, "ab").len(), 14);
        assert!(gen(0, "ab").is_empty());
    }

    #[test]
    fn charset_validation() {
        assert_eq!(Charset::new("".chars()), Err(SandboxError::BadCharset));
        assert_eq!(Charset::new("aba".chars()), Err(SandboxError::BadCharset));
        assert_eq!(Charset::printable_ascii().len(), 95);
        assert_eq!(ProofBudget::new(0), Err(SandboxError::ZeroBudget));
    }

    #[test]
    fn justification_syntax() {
        for (text, j) in [
            ("Taut", Justification::Taut),
            ("T", Justification::Taut),
            (" K ", Justification::K),
            ("Lob", Justification::Lob),
            ("MP 3,1", Justification::MP(3, 1)),
            ("MP 3, 1", Justification::MP(3, 1)),
            ("Nec 2", Justification::Nec(2)),
        ] {
            assert_eq!(parse_justification(text), Some(j));
        }
        let a = parse_justification("Agent b.C-def + Taut").unwrap();
        assert_eq!(a.to_string(), "Agent b.C-def + Taut");
        for bad in ["", "MP 0,1", "MP 1", "Nec", "Agent b.C", "Agent T-def", "taut"] {
            assert_eq!(parse_justification(bad), None, "{bad}");
        }
    }

    #[test]
    fn check_proof_examples() {
        let sys = ProofSystem::for_system(&duel_system("CUPOD", "DB"));
        assert!(check_proof(&sys, "1. ~(b.C) [Agent b.C-def + Taut]", &f("~b.C")));
        assert!(check_proof(&sys, "~b.C[Agent b.C-def + Taut]\n", &f("~b.C")));
        assert!(!check_proof(&sys, "2. ~b.C [Agent b.C-def + Taut]", &f("~b.C")));
        assert!(!check_proof(&sys, "1. ~b.C [Agent b.C-def]", &f("~b.C")));
        assert!(!check_proof(&sys, "", &f("~b.C")));
        assert!(!check_proof(&sys, "", &f("T")));

        let pq = FixedPointSystem::parse("p := T\nq := T").unwrap();
        let sys = ProofSystem::for_system(&pq);
        let proof = "1. p -> q [Agent q-def + Taut]\n2. p [Agent p-def + Taut]\n3. q [MP 1,2]\n";
        assert!(check_proof(&sys, proof, &f("q")));
        assert!(check_proof(&sys, proof.replace("MP 1,2", "MP 2,1").as_str(), &f("q")));
        assert!(!check_proof(&sys, proof, &f("p")));
        assert!(!check_proof(&sys, "1. q [MP 1,1]", &f("q")));
        assert!(!check_proof(&ProofSystem::logic_only(), proof, &f("q")));
    }

    #[test]
    fn cited_lines_must_precede() {
        let sys = ProofSystem::logic_only();
        assert!(check_proof(&sys, "1. T [Taut]\n2. []T [Nec 1]", &f("[]T")));
        assert!(!check_proof(&sys, "1. []T [Nec 1]\n2. T [Taut]\n3. []T [Nec 1]", &f("[]T")));
        assert!(!check_proof(&sys, "1. []T [Nec 2]\n2. T [Taut]", &f("T")));
    }

    #[test]
    fn axiom_shapes() {
        assert!(is_k_instance(&f("[](p -> q) -> []p -> []q")));
        assert!(is_k_instance(&f("[](a & b -> []c) -> [](a & b) -> [][]c")));
        assert!(!is_k_instance(&f("[](p -> q) -> []q -> []p")));
        assert!(is_lob_instance(&f("[]([]p -> p) -> []p")));
        assert!(!is_lob_instance(&f("[]([]p -> q) -> []p")));
        assert!(!is_tautology(&f("[]p -> p")));
        assert!(is_tautology(&f("[]p -> []p | q")));
        assert!(is_tautology(&f("(p <-> []q) -> ~[]q -> ~p")));
    }

    #[test]
    fn tautology_atom_cap() {
        let conj = |n: usize| (0..n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(" & ");
        let at_cap = f(&format!("{} -> x0", conj(MAX_TAUT_ATOMS)));
        let over = f(&format!("{} -> x0", conj(MAX_TAUT_ATOMS + 1)));
        assert!(is_tautology(&at_cap));
        assert!(!is_tautology(&over));
    }

    #[test]
    fn lexicographic_small_budget_finds_nothing() {
        let sys = ProofSystem::for_system(&duel_system("CUPOD", "DB"));
        let out = proof_search(budget(3), &sys, &f("~b.C"), &Enumerator::lexicographic());
        assert_eq!(out.found, None);
        assert_eq!(out.candidates_examined, 95 + 95 * 95 + 95 * 95 * 95);
        assert!(!out.truncated);
    }

    #[test]
    fn lexicographic_cap_truncates() {
        let sys = ProofSystem::logic_only();
        let lex = Enumerator::Lexicographic {
            charset: Charset::printable_ascii(),
            max_candidates: 1000,
        };
        let out = proof_search(budget(5), &sys, &f("F"), &lex);
        assert_eq!((out.candidates_examined, out.truncated), (1000, true));
    }

    #[test]
    fn guided_finds_one_axiom_proof() {
        let sys = ProofSystem::for_system(&duel_system("CUPOD", "DB"));
        let out = proof_search(budget(10_000), &sys, &f("~b.C"), &Enumerator::Guided);
        let found = out.found.as_ref().unwrap();
        assert_eq!(found.text, "1. ~b.C [Agent b.C-def + Taut]\n");
        assert_eq!(found.length, 31);
        let report = out.report();
        assert_eq!(report.proof_length, Some(31));
        assert_eq!(report.enumerator, "guided");
    }

    #[test]
    fn lexicographic_minimality_by_reenumeration() {
        let sys = ProofSystem::logic_only();
        for (chars, goal, k) in [(" T[]", "T", 8), ("~T[]", "~~T", 8), ("&T[]", "T & T", 7), (" T[]", "F", 6)] {
            let charset = Charset::new(chars.chars()).unwrap();
            let lex = Enumerator::Lexicographic {
                charset: charset.clone(),
                max_candidates: u64::MAX,
            };
            let goal = f(goal);
            let out = proof_search(budget(k), &sys, &goal, &lex);
            let expected = string_generator(k as usize, &charset)
                .enumerate()
                .find(|(_, s)| check_proof(&sys, s, &goal));
            match expected {
                Some((i, text)) => {
                    let found = out.found.unwrap();
                    assert_eq!(found.text, text);
                    assert_eq!(out.candidates_examined, i as u64 + 1);
                }
                None => {
                    assert_eq!(out.found, None);
                    assert_eq!(out.candidates_examined, candidate_count(charset.len(), k as usize));
                }
            }
        }
    }

    #[test]
    fn desk_scale_first_proofs() {
        let sys = ProofSystem::logic_only();
        let lex = |chars: &str| Enumerator::Lexicographic {
            charset: Charset::new(chars.chars()).unwrap(),
            max_candidates: u64::MAX,
        };
        let first = |chars: &str, goal: &str| proof_search(budget(8), &sys, &f(goal), &lex(chars)).found.map(|p| p.text);
        assert_eq!(first(" T[]", "T").as_deref(), Some("T[T]"));
        assert_eq!(first("~T[]", "~~T").as_deref(), Some("~~T[T]"));
        assert_eq!(first(" T[]", "F"), None);
    }

    #[test]
    fn hand_built_lob_derivation_is_accepted() {
        let system = duel_system("DUPOC", "DUPOC");
        let sys = ProofSystem::for_system(&system);
        assert!(check_proof(&sys, DUPOC_ROW_PROOF, &f("b.C")));
        assert!(!check_proof(&sys, DUPOC_ROW_PROOF, &f("a.C")));
        let template = default_lob_seed(&system, &f("b.C")).unwrap();
        assert_eq!(template.render(), DUPOC_ROW_PROOF);
        assert_eq!(template.length(), DUPOC_ROW_PROOF.chars().count());
        // Dropping the necessitation breaks the derivation.
        let broken = DUPOC_ROW_PROOF.replace("[Nec 15]", "[Taut]");
        assert!(!check_proof(&sys, &broken, &f("b.C")));
    }

    #[test]
    fn bounded_examples() {
        let cupod = builtin("CUPOD").unwrap();
        let db = builtin("DB").unwrap();
        let lex = Enumerator::lexicographic();
        let play = |a: &Agent, k: u64, e: &Enumerator, b: &Agent, kb: u64, eb: &Enumerator| {
            let row = BoundedPlayer { agent: a, budget: budget(k), enumerator: e };
            let col = BoundedPlayer { agent: b, budget: budget(kb), enumerator: eb };
            bounded_duel(&row, &col).unwrap()
        };
        let small = play(&cupod, 3, &lex, &db, 3, &lex);
        assert_eq!((small.row_action.as_str(), small.col_action.as_str()), ("C", "D"));
        assert!(!small.row_searches[0].report.found);
        assert!(small.col_searches.is_empty());

        let large = play(&cupod, 10_000, &Enumerator::Guided, &db, 10_000, &Enumerator::Guided);
        assert_eq!((large.row_action.as_str(), large.col_action.as_str()), ("D", "D"));

        let dupoc = builtin("DUPOC").unwrap();
        let oracle = Enumerator::oracle();
        let out = play(&dupoc, 10_000, &oracle, &dupoc, 10_000, &oracle);
        assert_eq!((out.row_action.as_str(), out.col_action.as_str()), ("C", "C"));
        let row = &out.row_searches[0];
        assert_eq!(row.report.proof_length, Some(DUPOC_ROW_PROOF.chars().count()));
        assert_eq!(row.report.candidates_examined, 1);
        let col_proof = DUPOC_ROW_PROOF.replace("20. a.C & b.C -> b.C", "20. a.C & b.C -> a.C").replace("21. b.C", "21. a.C");
        assert_eq!(out.col_searches[0].proof.as_deref(), Some(col_proof.as_str()));
    }

    #[test]
    fn unsupported_conditions_are_rejected() {
        let agent = crate::agents::compile_agent("agent Z { actions C, D default D; C if []opp(C) & []opp(C) }").unwrap();
        let lex = Enumerator::lexicographic();
        let p = BoundedPlayer { agent: &agent, budget: budget(3), enumerator: &lex };
        assert!(matches!(
            bounded_duel(&p, &p),
            Err(SandboxError::UnsupportedCondition { rule: 1, .. })
        ));
    }

    const THEOREM_PAIRS: [(&str, &str); 6] = [
        ("CUPOD", "CUPOD"),
        ("DUPOC", "DUPOC"),
        ("CIMCIC", "CIMCIC"),
        ("DUPOC", "CIMCIC"),
        ("DIMCID", "DIMCID"),
        ("CUPOD", "DIMCID"),
    ];

    #[test]
    fn oracle_search_agrees_with_evaluator_in_the_limit() {
        let oracle = Enumerator::oracle();
        for (a, b) in THEOREM_PAIRS {
            let (a, b) = (builtin(a).unwrap(), builtin(b).unwrap());
            let row = BoundedPlayer { agent: &a, budget: budget(10_000), enumerator: &oracle };
            let col = BoundedPlayer { agent: &b, budget: budget(10_000), enumerator: &oracle };
            let bounded = bounded_duel(&row, &col).unwrap();
            let ideal = duel(&a, &b).unwrap();
            assert_eq!(
                (bounded.row_action.as_str(), bounded.col_action.as_str()),
                ideal.actions(),
                "{} vs {}",
                a.name(),
                b.name()
            );
        }
    }

    #[test]
    fn accepted_proofs_are_sound_for_the_evaluator() {
        let names = ["CB", "DB", "CUPOD", "DUPOC", "CIMCIC", "DIMCID", "EUPOD", "CDEBot"];
        let mut checked = 0;
        for a in names {
            for b in names {
                let system = duel_system(a, b);
                let sys = ProofSystem::for_system(&system);
                for seat in [Seat::Row, Seat::Col] {
                    let agent = builtin(if seat == Seat::Row { a } else { b }).unwrap();
                    for (_, goal) in rule_goals(&agent, seat).unwrap() {
                        for e in [Enumerator::Guided, Enumerator::oracle()] {
                            let Some(found) = proof_search(budget(20_000), &sys, &goal, &e).found else {
                                continue;
                            };
                            assert!(check_proof(&sys, &found.text, &goal));
                            for line in parse_proof(&found.text).unwrap() {
                                assert!(holds_everywhere(&system, &line.formula).unwrap(), "{a} vs {b}: {}", line.formula);
                            }
                            checked += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 20, "only {checked} proofs found");
    }

    #[test]
    fn guided_stream_is_length_ordered() {
        let system = duel_system("DIMCID", "DIMCID");
        let sys = ProofSystem::for_system(&system);
        let lens: Vec<usize> = guided_candidates(&sys, &f("a.C -> b.D")).iter().map(|s| s.chars().count()).collect();
        assert!(lens.windows(2).all(|w| w[0] <= w[1]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn decode_matches_generator(chars in proptest::sample::subsequence(vec!['a', 'b', '[', ']', 'T'], 1..=5), bound in 1usize..5) {
            let charset = Charset::new(chars.iter().copied()).unwrap();
            let mut buf = String::new();
            let mut n = 0u64;
            for (i, s) in string_generator(bound, &charset).enumerate() {
                decode_candidate(i as u64, charset.chars(), &mut buf);
                prop_assert_eq!(&buf, &s);
                n += 1;
            }
            prop_assert_eq!(n, candidate_count(charset.len(), bound));
        }

        #[test]
        fn garbage_is_never_a_proof_and_never_panics(text in "\\PC{0,40}", tail in "[\\[\\]0-9A-Za-z .,&|~<>()-]{0,40}") {
            let sys = ProofSystem::for_system(&duel_system("CUPOD", "DB"));
            let candidate = format!("{text}{tail}");
            if check_proof(&sys, &candidate, &f("F")) {
                prop_assert!(false, "accepted a proof of F: {:?}", candidate);
            }
        }

        #[test]
        fn found_proofs_respect_budget_and_checker(k in 1u64..200) {
            let system = duel_system("CUPOD", "DB");
            let sys = ProofSystem::for_system(&system);
            for e in [Enumerator::Guided, Enumerator::oracle()] {
                let out = proof_search(budget(k), &sys, &f("b.D"), &e);
                if let Some(p) = out.found {
                    prop_assert!(p.length as u64 <= k);
                    prop_assert!(check_proof(&sys, &p.text, &f("b.D")));
                }
            }
        }

        #[test]
        fn search_is_monotone_in_budget(k in 1u64..2_000, extra in 0u64..5_000) {
            let system = duel_system("DUPOC", "DUPOC");
            let sys = ProofSystem::for_system(&system);
            let goal = f("b.C");
            for e in [Enumerator::Guided, Enumerator::oracle()] {
                let small = proof_search(budget(k), &sys, &goal, &e).found;
                let large = proof_search(budget(k + extra), &sys, &goal, &e).found;
                if small.is_some() {
                    prop_assert!(large.is_some());
                    if e == Enumerator::Guided {
                        prop_assert_eq!(small, large);
                    }
                }
            }
        }

        #[test]
        fn lexicographic_is_monotone_in_budget(k in 1u64..8, extra in 0u64..3) {
            let sys = ProofSystem::logic_only();
            let lex = Enumerator::Lexicographic {
                charset: Charset::new(" T[]".chars()).unwrap(),
                max_candidates: u64::MAX,
            };
            let small = proof_search(budget(k), &sys, &f("T"), &lex).found;
            let large = proof_search(budget(k + extra), &sys, &f("T"), &lex).found;
            if small.is_some() {
                prop_assert_eq!(small, large);
            }
        }
    }
}
