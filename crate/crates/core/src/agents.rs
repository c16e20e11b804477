//! Proof-based agents as ordered provability rules, and their compilation into
//! fixed-point systems.
//!
//! An agent plays the action of its first rule whose condition holds, or its
//! default action when none does. Conditions are formulas over the atoms
//! `me(X)` ("I play X"), `opp(X)` ("my opponent plays X against me") and
//! `opp_vs_DB(X)` ("my opponent plays X against DefectBot").
//!
//! Agent source syntax:
//!
//! ```text
//! agent DUPOC { actions C, D default D; C if [] opp(C) }
//! ```

use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::gl::{FixedPointSystem, SystemError};
use crate::modal::{is_qualified_ident, AtomSyntax, Formula, ModalFormula, Name, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action(String);

impl Action {
    pub fn new(label: impl Into<String>) -> Result<Self, ParseError> {
        let label = label.into();
        if is_qualified_ident(&label) && !label.contains('.') {
            Ok(Action(label))
        } else {
            Err(ParseError::new(0, &["action label"], &label))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Whose action a condition atom talks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subject {
    Me,
    Opp,
    /// The opponent, playing against DefectBot instead of against me.
    OppVsDefectBot,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionAtom {
    pub subject: Subject,
    pub action: Action,
}

impl ActionAtom {
    pub fn me(action: &str) -> Self {
        Self::make(Subject::Me, action)
    }

    pub fn opp(action: &str) -> Self {
        Self::make(Subject::Opp, action)
    }

    pub fn opp_vs_db(action: &str) -> Self {
        Self::make(Subject::OppVsDefectBot, action)
    }

    fn make(subject: Subject, action: &str) -> Self {
        ActionAtom {
            subject,
            action: Action::new(action).expect("valid action label"),
        }
    }
}

impl fmt::Display for ActionAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.subject {
            Subject::Me => "me",
            Subject::Opp => "opp",
            Subject::OppVsDefectBot => "opp_vs_DB",
        };
        write!(f, "{head}({})", self.action)
    }
}

impl AtomSyntax for ActionAtom {
    fn from_ident(_name: &str) -> Option<Self> {
        None
    }

    fn from_call(head: &str, arg: &str) -> Option<Self> {
        let subject = match head {
            "me" => Subject::Me,
            "opp" => Subject::Opp,
            "opp_vs_DB" => Subject::OppVsDefectBot,
            _ => return None,
        };
        Some(ActionAtom {
            subject,
            action: Action::new(arg).ok()?,
        })
    }

    fn describe() -> &'static str {
        "me(X) | opp(X) | opp_vs_DB(X)"
    }
}

pub type Condition = Formula<ActionAtom>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub condition: Condition,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("agent `{agent}`: condition of rule {rule} is not fully modalized (`{atom}` occurs outside [])")]
    NotFullyModalized { agent: String, rule: usize, atom: String },
    #[error("agent `{agent}`: action `{action}` is not in its action list")]
    UndeclaredAction { agent: String, action: Action },
    #[error("agent `{agent}`: duplicate action `{action}`")]
    DuplicateAction { agent: String, action: Action },
    #[error("agent `{agent}` has no actions")]
    NoActions { agent: String },
    #[error("compiled duel is malformed: {0}")]
    System(#[from] SystemError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    name: String,
    actions: Vec<Action>,
    default: Action,
    rules: Vec<Rule>,
}

impl Agent {
    pub fn new(
        name: impl Into<String>,
        actions: Vec<Action>,
        default: Action,
        rules: Vec<Rule>,
    ) -> Result<Self, AgentError> {
        let name = name.into();
        if actions.is_empty() {
            return Err(AgentError::NoActions { agent: name });
        }
        let mut seen = HashSet::new();
        for a in &actions {
            if !seen.insert(a) {
                return Err(AgentError::DuplicateAction {
                    agent: name,
                    action: a.clone(),
                });
            }
        }
        let undeclared = |action: &Action| AgentError::UndeclaredAction {
            agent: name.clone(),
            action: action.clone(),
        };
        if !seen.contains(&default) {
            return Err(undeclared(&default));
        }
        for (i, rule) in rules.iter().enumerate() {
            if !seen.contains(&rule.action) {
                return Err(undeclared(&rule.action));
            }
            let mut bad_me = None;
            rule.condition.for_each_atom(&mut |atom| {
                if atom.subject == Subject::Me && !seen.contains(&atom.action) && bad_me.is_none() {
                    bad_me = Some(atom.action.clone());
                }
            });
            if let Some(action) = bad_me {
                return Err(undeclared(&action));
            }
            if let Some(path) = rule.condition.first_unguarded(|_| true) {
                let atom = atom_at(&rule.condition, &path);
                return Err(AgentError::NotFullyModalized {
                    agent: name.clone(),
                    rule: i + 1,
                    atom,
                });
            }
        }
        Ok(Agent {
            name,
            actions,
            default,
            rules,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn default_action(&self) -> &Action {
        &self.default
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Equality of behaviour definitions, ignoring names.
    pub fn same_definition(&self, other: &Agent) -> bool {
        self.actions == other.actions && self.default == other.default && self.rules == other.rules
    }

    pub(crate) fn mentions_opp_vs_db(&self) -> bool {
        let mut found = false;
        for r in &self.rules {
            r.condition.for_each_atom(&mut |a| found |= a.subject == Subject::OppVsDefectBot);
        }
        found
    }

    /// Actions named anywhere in the definition, in first-mention order.
    fn mentioned_actions(&self) -> Vec<Action> {
        let mut out: Vec<Action> = self.actions.clone();
        for r in &self.rules {
            r.condition.for_each_atom(&mut |a| {
                if !out.contains(&a.action) {
                    out.push(a.action.clone());
                }
            });
        }
        out
    }
}

fn atom_at(f: &Condition, path: &[usize]) -> String {
    let mut cur = f;
    for &i in path {
        cur = match cur {
            Formula::Not(x) | Formula::Box(x) => x,
            Formula::And(x, y) | Formula::Or(x, y) | Formula::Implies(x, y) | Formula::Iff(x, y) => {
                if i == 0 {
                    x
                } else {
                    y
                }
            }
            _ => break,
        };
    }
    cur.to_string()
}

/// Renders the agent in its source syntax.
impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "agent {} {{ actions ", self.name)?;
        for (i, a) in self.actions.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, " default {}", self.default)?;
        for r in &self.rules {
            write!(f, "; {} if {}", r.action, r.condition)?;
        }
        f.write_str(" }")
    }
}

pub const BUILTIN_NAMES: [&str; 9] = [
    "CB",
    "DB",
    "CUPOD",
    "DUPOC",
    "CIMCIC",
    "DIMCID",
    "PrudentBot",
    "EUPOD",
    "CDEBot",
];

fn builtin_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "CB" => "agent CB { actions C default C }",
        "DB" => "agent DB { actions D default D }",
        "CUPOD" => "agent CUPOD { actions D, C default C; D if [] opp(D) }",
        "DUPOC" => "agent DUPOC { actions C, D default D; C if [] opp(C) }",
        "CIMCIC" => "agent CIMCIC { actions C, D default D; C if [](me(C) -> opp(C)) }",
        "DIMCID" => "agent DIMCID { actions D, C default C; D if [](me(C) -> opp(D)) }",
        "PrudentBot" => {
            "agent PrudentBot { actions C, D default D; C if [] opp(C) & [](~[]F -> opp_vs_DB(D)) }"
        }
        "EUPOD" => "agent EUPOD { actions E, D default E; D if [] opp(D) }",
        "CDEBot" => {
            "agent CDEBot { actions C, D, E default E; C if [](me(C) & opp(C)); D if [](me(D) & opp(D)) }"
        }
        _ => return None,
    })
}

/// One of the named library agents.
pub fn builtin(name: &str) -> Result<Agent, AgentError> {
    let src = builtin_source(name).ok_or_else(|| AgentError::UnknownAgent(name.to_string()))?;
    Ok(compile_agent(src).expect("builtin agent sources are valid"))
}

pub fn is_builtin(name: &str) -> bool {
    builtin_source(name).is_some()
}

// ---------------------------------------------------------------------------
// Source parsing

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else if c == '#' {
                self.pos += self.src[self.pos..].find('\n').unwrap_or(self.src.len() - self.pos);
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let found: String = self.src[self.pos..]
            .split(|c: char| c.is_whitespace())
            .next()
            .unwrap_or("")
            .to_string();
        ParseError::new(self.pos, expected, &found)
    }

    fn ident(&mut self, what: &str) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        let word = &rest[..len];
        if word.is_empty() || word.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(self.error(&[what]));
        }
        self.pos += len;
        Ok(word)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        self.skip_ws();
        let save = self.pos;
        match self.ident(kw) {
            Ok(w) if w == kw => Ok(()),
            _ => {
                self.pos = save;
                Err(self.error(&[kw]))
            }
        }
    }

    fn punct(&mut self, p: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(p) {
            self.pos += p.len_utf8();
            true
        } else {
            false
        }
    }
}

fn parse_agent_at(cur: &mut Cursor<'_>) -> Result<Agent, AgentError> {
    cur.keyword("agent")?;
    let name = cur.ident("agent name")?.to_string();
    if !cur.punct('{') {
        return Err(cur.error(&["{"]).into());
    }
    cur.keyword("actions")?;
    let mut actions = Vec::new();
    loop {
        let a = cur.ident("action label")?;
        actions.push(Action::new(a)?);
        if !cur.punct(',') {
            break;
        }
    }
    cur.keyword("default")?;
    let default = Action::new(cur.ident("action label")?)?;
    let mut rules = Vec::new();
    loop {
        if cur.punct('}') {
            break;
        }
        if !cur.punct(';') {
            return Err(cur.error(&[";", "}"]).into());
        }
        let action = Action::new(cur.ident("action label")?)?;
        cur.keyword("if")?;
        let start = cur.pos;
        let len = cur.src[start..]
            .find([';', '}'])
            .ok_or_else(|| ParseError::new(cur.src.len(), &[";", "}"], ""))?;
        let condition = crate::modal::parse_with::<ActionAtom>(&cur.src[start..start + len])
            .map_err(|e| e.shifted(start))?;
        cur.pos = start + len;
        rules.push(Rule { condition, action });
    }
    Agent::new(name, actions, default, rules)
}

/// Parses a single agent definition.
pub fn compile_agent(text: &str) -> Result<Agent, AgentError> {
    let mut cur = Cursor { src: text, pos: 0 };
    let agent = parse_agent_at(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error(&["end of input"]).into());
    }
    Ok(agent)
}

/// Parses a roster: a sequence of agent definitions and builtin agent names.
pub fn parse_roster(text: &str) -> Result<Vec<Agent>, AgentError> {
    let mut cur = Cursor { src: text, pos: 0 };
    let mut out = Vec::new();
    while !cur.at_end() {
        let save = cur.pos;
        let word = cur.ident("agent name or definition")?;
        if word == "agent" {
            cur.pos = save;
            out.push(parse_agent_at(&mut cur)?);
        } else {
            out.push(builtin(word)?);
        }
        cur.punct(',');
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Duel compilation

/// Which seat of a duel an agent occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seat {
    Row,
    Col,
}

impl Seat {
    pub fn prefix(self) -> &'static str {
        match self {
            Seat::Row => "a",
            Seat::Col => "b",
        }
    }
}

pub fn action_var(prefix: &str, action: &Action) -> Name {
    Name::new(format!("{prefix}.{action}")).expect("prefixes and labels are identifiers")
}

struct DuelBuilder {
    vars: Vec<Name>,
    defs: Vec<ModalFormula>,
    alphabet: Vec<Action>,
    done: HashSet<String>,
    defect_bot: Agent,
    pending: VecDeque<(Agent, String, Agent, String)>,
}

impl DuelBuilder {
    /// Defines `x` at `px` playing against `y` at `py`, and vice versa.
    fn pair(&mut self, x: &Agent, px: &str, y: &Agent, py: &str) {
        if !self.done.insert(px.to_string()) {
            return;
        }
        self.done.insert(py.to_string());
        self.side(x, px, y, py);
        self.side(y, py, x, px);
    }

    fn side(&mut self, me: &Agent, pm: &str, opp: &Agent, po: &str) {
        let db_prefix = format!("{po}_vs_DB");
        if me.mentions_opp_vs_db() {
            let defect_bot = self.defect_bot.clone();
            self.pending
                .push_back((opp.clone(), db_prefix.clone(), defect_bot, format!("DB_vs_{po}")));
        }
        let conditions: Vec<ModalFormula> = me
            .rules
            .iter()
            .map(|r| instantiate(&r.condition, pm, po, &db_prefix))
            .collect();
        for action in &self.alphabet {
            let mut cases = Vec::new();
            for (i, rule) in me.rules.iter().enumerate() {
                if &rule.action == action {
                    let earlier = conditions[..i].iter().cloned().map(Formula::not);
                    cases.push(Formula::conjunction(
                        std::iter::once(conditions[i].clone()).chain(earlier),
                    ));
                }
            }
            if action == &me.default {
                cases.push(if conditions.is_empty() {
                    Formula::Top
                } else {
                    Formula::not(Formula::disjunction(conditions.iter().cloned()))
                });
            }
            self.vars.push(action_var(pm, action));
            self.defs.push(Formula::disjunction(cases));
        }
    }
}

/// Actions the row agent mentions, then the column agent's, then DefectBot's
/// when a subgame against it is needed.
fn duel_alphabet(x: &Agent, y: &Agent, defect_bot: &Agent) -> Vec<Action> {
    let mut out: Vec<Action> = Vec::new();
    let db = if x.mentions_opp_vs_db() || y.mentions_opp_vs_db() {
        defect_bot.actions.clone()
    } else {
        Vec::new()
    };
    for a in x.mentioned_actions().into_iter().chain(y.mentioned_actions()).chain(db) {
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

/// Maps `me`/`opp`/`opp_vs_DB` atoms onto the variables of the given seats.
pub fn instantiate(cond: &Condition, me: &str, opp: &str, opp_vs_db: &str) -> ModalFormula {
    let result: Result<_, std::convert::Infallible> = cond.map_atoms(&mut |atom| {
        let prefix = match atom.subject {
            Subject::Me => me,
            Subject::Opp => opp,
            Subject::OppVsDefectBot => opp_vs_db,
        };
        Ok(Formula::Var(action_var(prefix, &atom.action)))
    });
    match result {
        Ok(f) => f,
        Err(never) => match never {},
    }
}

/// Compiles the game between `row` (seat `a`) and `col` (seat `b`) into one
/// fixed-point system.
///
/// Both seats get a variable for every action either agent declares or
/// mentions; an action an agent cannot play is defined as `F`.
/// Subgames against DefectBot required by `opp_vs_DB` atoms are appended as
/// auxiliary variable families (`b_vs_DB.*`, `DB_vs_b.*`).
pub fn compile_duel(row: &Agent, col: &Agent) -> Result<FixedPointSystem, AgentError> {
    let defect_bot = builtin("DB")?;
    let mut builder = DuelBuilder {
        vars: Vec::new(),
        defs: Vec::new(),
        alphabet: duel_alphabet(row, col, &defect_bot),
        done: HashSet::new(),
        defect_bot,
        pending: VecDeque::new(),
    };
    builder.pair(row, Seat::Row.prefix(), col, Seat::Col.prefix());
    while let Some((x, px, y, py)) = builder.pending.pop_front() {
        builder.pair(&x, &px, &y, &py);
    }
    Ok(FixedPointSystem::new(builder.vars, builder.defs)?)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl::evaluate_system;
    use crate::modal::parse_formula;
    use proptest::prelude::*;

    fn sys(text: &str) -> FixedPointSystem {
        FixedPointSystem::parse(text).unwrap()
    }

    #[test]
    fn builtin_definitions() {
        let dupoc = builtin("DUPOC").unwrap();
        assert_eq!(dupoc.default_action().as_str(), "D");
        assert_eq!(dupoc.rules().len(), 1);
        assert_eq!(dupoc.rules()[0].action.as_str(), "C");
        assert_eq!(dupoc.rules()[0].condition.to_string(), "[]opp(C)");
        assert_eq!(builtin("CUPOD").unwrap().default_action().as_str(), "C");
        let db = builtin("DB").unwrap();
        assert!(db.rules().is_empty());
        assert_eq!(db.actions(), [Action::new("D").unwrap()]);
        assert_eq!(builtin("EUPOD").unwrap().actions().len(), 2);
        assert_eq!(builtin("CDEBot").unwrap().rules().len(), 2);
        assert_eq!(builtin("Nope"), Err(AgentError::UnknownAgent("Nope".into())));
        assert!(is_builtin("PrudentBot") && !is_builtin("prudentbot"));
    }

    #[test]
    fn builtins_round_trip_through_source() {
        for name in BUILTIN_NAMES {
            let agent = builtin(name).unwrap();
            assert_eq!(compile_agent(&agent.to_string()).unwrap(), agent, "{name}");
        }
    }

    #[test]
    fn dsl_examples() {
        let x = compile_agent("agent X { actions C, D default D; C if [] opp(C) }").unwrap();
        assert!(x.same_definition(&builtin("DUPOC").unwrap()));
        assert_eq!(x.with_name("DUPOC"), builtin("DUPOC").unwrap());
        let y = compile_agent("agent Y { actions C default C }").unwrap();
        assert!(y.same_definition(&builtin("CB").unwrap()));
        let z = compile_agent("agent Z { actions C, D default D; C if opp(C) }");
        assert!(matches!(z, Err(AgentError::NotFullyModalized { rule: 1, ref atom, .. }) if atom == "opp(C)"));
        let w = compile_agent("agent W { actions C, D default D; C if []opp(C) | me(D) }");
        assert!(matches!(w, Err(AgentError::NotFullyModalized { ref atom, .. }) if atom == "me(D)"));
    }

    #[test]
    fn dsl_errors() {
        let err = |s: &str| compile_agent(s).unwrap_err();
        assert!(matches!(err("agent A { actions C default D }"), AgentError::UndeclaredAction { .. }));
        assert!(matches!(err("agent A { actions C, C default C }"), AgentError::DuplicateAction { .. }));
        assert!(matches!(err("agent A { actions C default C; D if []opp(C) }"), AgentError::UndeclaredAction { .. }));
        assert!(matches!(err("agent A { actions C default C; C if []me(D) }"), AgentError::UndeclaredAction { .. }));
        assert!(matches!(err("agent A { actions C default C; C if []foo(C) }"), AgentError::Parse(_)));
        assert!(matches!(err("agent A { actions C default C"), AgentError::Parse(_)));
        assert!(matches!(err("agent A { actions C default C } extra"), AgentError::Parse(_)));
        match err("agent A { actions C default C; C if [](opp(C) & ) }") {
            AgentError::Parse(e) => assert_eq!(e.offset, 48),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn roster_mixes_builtins_and_definitions() {
        let roster = parse_roster("CB, DB\n# comment\nagent X { actions C default C }\nDUPOC").unwrap();
        let names: Vec<&str> = roster.iter().map(Agent::name).collect();
        assert_eq!(names, ["CB", "DB", "X", "DUPOC"]);
        assert_eq!(parse_roster("CB Bogus").unwrap_err(), AgentError::UnknownAgent("Bogus".into()));
    }

    #[test]
    fn compile_examples() {
        let dupoc = builtin("DUPOC").unwrap();
        assert_eq!(
            compile_duel(&dupoc, &dupoc).unwrap(),
            sys("a.C := []b.C; a.D := ~[]b.C; b.C := []a.C; b.D := ~[]a.C")
        );
        let s = compile_duel(&builtin("CB").unwrap(), &builtin("DB").unwrap()).unwrap();
        assert_eq!(s, sys("a.C := T; a.D := F; b.C := F; b.D := T"));
        let s = compile_duel(&builtin("CUPOD").unwrap(), &builtin("DIMCID").unwrap()).unwrap();
        assert_eq!(s.def(&Name::new("a.D").unwrap()).unwrap().to_string(), "[]b.D");
        assert_eq!(s.def(&Name::new("b.D").unwrap()).unwrap().to_string(), "[](b.C -> a.D)");
    }

    #[test]
    fn first_match_rules() {
        let cde = builtin("CDEBot").unwrap();
        let s = compile_duel(&cde, &builtin("CB").unwrap()).unwrap();
        assert_eq!(s.def(&Name::new("a.C").unwrap()).unwrap().to_string(), "[](a.C & b.C)");
        assert_eq!(
            s.def(&Name::new("a.D").unwrap()).unwrap().to_string(),
            "[](a.D & b.D) & ~[](a.C & b.C)"
        );
        assert_eq!(
            s.def(&Name::new("a.E").unwrap()).unwrap().to_string(),
            "~([](a.C & b.C) | [](a.D & b.D))"
        );
        assert_eq!(s.def(&Name::new("b.E").unwrap()).unwrap().to_string(), "F");
    }

    #[test]
    fn prudent_bot_adds_defect_bot_subgames() {
        let pb = builtin("PrudentBot").unwrap();
        let s = compile_duel(&pb, &builtin("CB").unwrap()).unwrap();
        let names: Vec<&str> = s.vars().iter().map(Name::as_str).collect();
        assert_eq!(names, ["a.C", "a.D", "b.C", "b.D", "b_vs_DB.C", "b_vs_DB.D", "DB_vs_b.C", "DB_vs_b.D"]);
        assert_eq!(
            s.def(&Name::new("a.C").unwrap()).unwrap(),
            &parse_formula("[]b.C & [](~[]F -> b_vs_DB.D)").unwrap()
        );
        assert_eq!(s.def(&Name::new("b_vs_DB.C").unwrap()).unwrap(), &Formula::Top);
    }

    #[test]
    fn swapped_duels_rename_into_each_other() {
        for x in BUILTIN_NAMES {
            for y in BUILTIN_NAMES {
                let (ax, ay) = (builtin(x).unwrap(), builtin(y).unwrap());
                let ab = compile_duel(&ax, &ay).unwrap();
                let ba = compile_duel(&ay, &ax).unwrap();
                let swapped = ba
                    .rename(|n| {
                        let s = n.as_str();
                        let t: String = s
                            .split('_')
                            .map(|part| match part.split_once('.') {
                                Some(("a", r)) => format!("b.{r}"),
                                Some(("b", r)) => format!("a.{r}"),
                                _ if part == "a" => "b".into(),
                                _ if part == "b" => "a".into(),
                                _ => part.to_string(),
                            })
                            .collect::<Vec<_>>()
                            .join("_");
                        Name::new(t).unwrap()
                    })
                    .unwrap();
                let mut left: Vec<String> = ab.to_string().lines().map(String::from).collect();
                let mut right: Vec<String> = swapped.to_string().lines().map(String::from).collect();
                left.sort();
                right.sort();
                assert_eq!(left, right, "{x} vs {y}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn random_agents_round_trip(agent in strategies::agent()) {
            let text = agent.to_string();
            prop_assert_eq!(compile_agent(&text).unwrap(), agent);
        }

        #[test]
        fn exactly_one_action_per_seat(x in strategies::agent(), y in strategies::agent()) {
            let system = compile_duel(&x, &y).unwrap();
            let result = evaluate_system(&system).unwrap();
            let mut per_prefix = std::collections::HashMap::<&str, usize>::new();
            for (v, &b) in result.vars.iter().zip(&result.stable) {
                let (prefix, _) = v.as_str().rsplit_once('.').unwrap();
                *per_prefix.entry(prefix).or_default() += usize::from(b);
            }
            for (prefix, count) in per_prefix {
                prop_assert_eq!(count, 1, "{}", prefix);
            }
        }

        #[test]
        fn compilation_is_deterministic(x in strategies::agent(), y in strategies::agent()) {
            prop_assert_eq!(compile_duel(&x, &y).unwrap(), compile_duel(&x, &y).unwrap());
        }
    }
}
