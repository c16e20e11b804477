//! Propositional provability-logic formulas.
//!
//! A [`Formula`] is generic over its atom type so the same parser and printer
//! serve both closed fixed-point systems (atoms are [`Name`]s) and agent
//! condition templates (atoms are `me(X)` / `opp(X)` references).
//!
//! Surface syntax, loosest to tightest binding:
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "[]" unary | atom
//! atom    := "T" | "F" | ident | ident "(" ident ")" | "(" formula ")"
//! ident   := segment ("." segment)*,  segment := [a-zA-Z_][a-zA-Z0-9_]*
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// A validated variable name such as `p` or `a.C`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(String);

impl Name {
    pub fn new(text: impl Into<String>) -> Result<Self, ParseError> {
        let text = text.into();
        if is_qualified_ident(&text) && text != "T" && text != "F" {
            Ok(Name(text))
        } else {
            Err(ParseError::new(0, &["identifier"], &text))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Name {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

fn is_segment(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn is_qualified_ident(s: &str) -> bool {
    !s.is_empty() && s.split('.').all(is_segment)
}

/// Syntax tree of a provability-logic formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula<A = Name> {
    Top,
    Bottom,
    Var(A),
    Not(Box<Formula<A>>),
    And(Box<Formula<A>>, Box<Formula<A>>),
    Or(Box<Formula<A>>, Box<Formula<A>>),
    Implies(Box<Formula<A>>, Box<Formula<A>>),
    Iff(Box<Formula<A>>, Box<Formula<A>>),
    /// Provability: "there is a proof of the argument".
    Box(Box<Formula<A>>),
}

pub type ModalFormula = Formula<Name>;

impl<A> Formula<A> {
    pub fn not(f: Self) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(f: Self, g: Self) -> Self {
        Formula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: Self, g: Self) -> Self {
        Formula::Or(Box::new(f), Box::new(g))
    }

    pub fn implies(f: Self, g: Self) -> Self {
        Formula::Implies(Box::new(f), Box::new(g))
    }

    pub fn iff(f: Self, g: Self) -> Self {
        Formula::Iff(Box::new(f), Box::new(g))
    }

    pub fn boxed(f: Self) -> Self {
        Formula::Box(Box::new(f))
    }

    /// Left-folded conjunction; `T` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Self>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-folded disjunction; `F` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Self>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bottom)
    }

    pub fn is_box(&self) -> bool {
        matches!(self, Formula::Box(_))
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Var(_) => 1,
            Formula::Not(f) | Formula::Box(f) => 1 + f.size(),
            Formula::And(f, g)
            | Formula::Or(f, g)
            | Formula::Implies(f, g)
            | Formula::Iff(f, g) => 1 + f.size() + g.size(),
        }
    }

    /// Rebuilds the tree, replacing every atom by the formula `f` returns.
    pub fn map_atoms<B, E>(
        &self,
        f: &mut impl FnMut(&A) -> Result<Formula<B>, E>,
    ) -> Result<Formula<B>, E> {
        Ok(match self {
            Formula::Top => Formula::Top,
            Formula::Bottom => Formula::Bottom,
            Formula::Var(a) => f(a)?,
            Formula::Not(x) => Formula::not(x.map_atoms(f)?),
            Formula::Box(x) => Formula::boxed(x.map_atoms(f)?),
            Formula::And(x, y) => Formula::and(x.map_atoms(f)?, y.map_atoms(f)?),
            Formula::Or(x, y) => Formula::or(x.map_atoms(f)?, y.map_atoms(f)?),
            Formula::Implies(x, y) => Formula::implies(x.map_atoms(f)?, y.map_atoms(f)?),
            Formula::Iff(x, y) => Formula::iff(x.map_atoms(f)?, y.map_atoms(f)?),
        })
    }

    /// Visits every atom in left-to-right order.
    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a A)) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Var(a) => f(a),
            Formula::Not(x) | Formula::Box(x) => x.for_each_atom(f),
            Formula::And(x, y)
            | Formula::Or(x, y)
            | Formula::Implies(x, y)
            | Formula::Iff(x, y) => {
                x.for_each_atom(f);
                y.for_each_atom(f);
            }
        }
    }

    /// Atoms in first-occurrence order, without duplicates.
    pub fn atoms(&self) -> Vec<&A>
    where
        A: Eq + Hash,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.for_each_atom(&mut |a| {
            if seen.insert(a) {
                out.push(a);
            }
        });
        out
    }
}

impl<A: Clone + Eq + Hash> Formula<A> {
    /// Simultaneous substitution; atoms without a binding are left alone.
    pub fn substitute(&self, bindings: &HashMap<A, Formula<A>>) -> Formula<A> {
        let result: Result<_, std::convert::Infallible> = self.map_atoms(&mut |a| {
            Ok(bindings
                .get(a)
                .cloned()
                .unwrap_or_else(|| Formula::Var(a.clone())))
        });
        match result {
            Ok(f) => f,
            Err(never) => match never {},
        }
    }

    /// True iff every occurrence of every atom in `vars` lies beneath a `Box`.
    pub fn is_fully_modalized(&self, vars: &HashSet<A>) -> bool {
        self.first_unguarded(|a| vars.contains(a)).is_none()
    }

    /// Path (child indices from the root) to the first atom matching `pred`
    /// that is not under a `Box`.
    pub fn first_unguarded(&self, pred: impl Fn(&A) -> bool) -> Option<Vec<usize>> {
        fn walk<A>(f: &Formula<A>, pred: &dyn Fn(&A) -> bool, path: &mut Vec<usize>) -> bool {
            match f {
                Formula::Top | Formula::Bottom | Formula::Box(_) => false,
                Formula::Var(a) => pred(a),
                Formula::Not(x) => {
                    path.push(0);
                    if walk(x, pred, path) {
                        return true;
                    }
                    path.pop();
                    false
                }
                Formula::And(x, y)
                | Formula::Or(x, y)
                | Formula::Implies(x, y)
                | Formula::Iff(x, y) => {
                    for (i, child) in [x, y].into_iter().enumerate() {
                        path.push(i);
                        if walk(child, pred, path) {
                            return true;
                        }
                        path.pop();
                    }
                    false
                }
            }
        }
        let mut path = Vec::new();
        walk(self, &pred, &mut path).then_some(path)
    }

    /// Distinct `Box`-rooted subformulas, innermost first, then left to right.
    pub fn box_subformulas(&self) -> Vec<&Formula<A>> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        self.collect_boxes(&mut out, &mut seen);
        out
    }

    pub(crate) fn collect_boxes<'a>(
        &'a self,
        out: &mut Vec<&'a Formula<A>>,
        seen: &mut HashSet<&'a Formula<A>>,
    ) {
        match self {
            Formula::Top | Formula::Bottom | Formula::Var(_) => {}
            Formula::Not(x) => x.collect_boxes(out, seen),
            Formula::Box(x) => {
                x.collect_boxes(out, seen);
                if seen.insert(self) {
                    out.push(self);
                }
            }
            Formula::And(x, y)
            | Formula::Or(x, y)
            | Formula::Implies(x, y)
            | Formula::Iff(x, y) => {
                x.collect_boxes(out, seen);
                y.collect_boxes(out, seen);
            }
        }
    }
}

pub fn substitute(f: &ModalFormula, bindings: &HashMap<Name, ModalFormula>) -> ModalFormula {
    f.substitute(bindings)
}

pub fn is_fully_modalized(f: &ModalFormula, vars: &[Name]) -> bool {
    f.is_fully_modalized(&vars.iter().cloned().collect())
}

pub fn box_subformulas(f: &ModalFormula) -> Vec<ModalFormula> {
    f.box_subformulas().into_iter().cloned().collect()
}

// ---------------------------------------------------------------------------
// Printing

const PREC_IFF: u8 = 1;
const PREC_IMP: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_UNARY: u8 = 5;
const PREC_ATOM: u8 = 6;

impl<A> Formula<A> {
    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => PREC_IFF,
            Formula::Implies(..) => PREC_IMP,
            Formula::Or(..) => PREC_OR,
            Formula::And(..) => PREC_AND,
            Formula::Not(_) | Formula::Box(_) => PREC_UNARY,
            Formula::Top | Formula::Bottom | Formula::Var(_) => PREC_ATOM,
        }
    }
}

impl<A: fmt::Display> Formula<A> {
    fn write_at(&self, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.precedence() < min_prec {
            f.write_str("(")?;
            self.write_at(0, f)?;
            return f.write_str(")");
        }
        match self {
            Formula::Top => f.write_str("T"),
            Formula::Bottom => f.write_str("F"),
            Formula::Var(a) => write!(f, "{a}"),
            Formula::Not(x) => {
                f.write_str("~")?;
                x.write_at(PREC_UNARY, f)
            }
            Formula::Box(x) => {
                f.write_str("[]")?;
                x.write_at(PREC_UNARY, f)
            }
            // Iff, Or and And associate to the left; Implies to the right.
            Formula::Iff(x, y) => binary(f, x, " <-> ", y, PREC_IFF, PREC_IMP),
            Formula::Implies(x, y) => binary(f, x, " -> ", y, PREC_OR, PREC_IMP),
            Formula::Or(x, y) => binary(f, x, " | ", y, PREC_OR, PREC_AND),
            Formula::And(x, y) => binary(f, x, " & ", y, PREC_AND, PREC_UNARY),
        }
    }
}

fn binary<A: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    lhs: &Formula<A>,
    op: &str,
    rhs: &Formula<A>,
    lhs_prec: u8,
    rhs_prec: u8,
) -> fmt::Result {
    lhs.write_at(lhs_prec, f)?;
    f.write_str(op)?;
    rhs.write_at(rhs_prec, f)
}

/// Canonical rendering with minimal parentheses.
impl<A: fmt::Display> fmt::Display for Formula<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(0, f)
    }
}

impl<A: fmt::Display> Serialize for Formula<A> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn render_formula(f: &ModalFormula) -> String {
    f.to_string()
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    pub fn new(offset: usize, expected: &[&str], found: &str) -> Self {
        ParseError {
            offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: if found.is_empty() {
                "end of input".to_string()
            } else {
                format!("`{found}`")
            },
        }
    }

    /// Shifts the offset when the parsed text was a slice of a larger input.
    pub fn shifted(mut self, by: usize) -> Self {
        self.offset += by;
        self
    }
}

/// How a formula's atoms are written.
pub trait AtomSyntax: Sized {
    /// A bare identifier atom.
    fn from_ident(name: &str) -> Option<Self>;

    /// A call-shaped atom `head(arg)`.
    fn from_call(_head: &str, _arg: &str) -> Option<Self> {
        None
    }

    /// Names the accepted atom shapes, for error messages.
    fn describe() -> &'static str {
        "identifier"
    }
}

impl AtomSyntax for Name {
    fn from_ident(name: &str) -> Option<Self> {
        Name::new(name).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    BoxOp,
    LParen,
    RParen,
    Ident(String),
    End,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Tilde => "~".into(),
            Tok::Amp => "&".into(),
            Tok::Pipe => "|".into(),
            Tok::Arrow => "->".into(),
            Tok::DoubleArrow => "<->".into(),
            Tok::BoxOp => "[]".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Ident(s) => s.clone(),
            Tok::End => String::new(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'~' => {
                i += 1;
                Tok::Tilde
            }
            b'&' => {
                i += 1;
                Tok::Amp
            }
            b'|' => {
                i += 1;
                Tok::Pipe
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Tok::Arrow
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 3;
                Tok::DoubleArrow
            }
            b'[' if bytes.get(i + 1) == Some(&b']') => {
                i += 2;
                Tok::BoxOp
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                i += 1;
                loop {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    // Continue a dotted name only if a segment follows the dot.
                    let next_starts_segment = bytes
                        .get(i + 1)
                        .is_some_and(|&b| b.is_ascii_alphabetic() || b == b'_');
                    if bytes.get(i) == Some(&b'.') && next_starts_segment {
                        i += 1;
                    } else {
                        break;
                    }
                }
                Tok::Ident(src[start..i].to_string())
            }
            _ => {
                let found: String = src[start..].chars().take(1).collect();
                return Err(ParseError::new(
                    start,
                    &["~", "[]", "(", ")", "&", "|", "->", "<->", "T", "F", "identifier"],
                    &found,
                ));
            }
        };
        toks.push((tok, start));
    }
    toks.push((Tok::End, src.len()));
    Ok(toks)
}

struct Parser<A> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    _atom: std::marker::PhantomData<A>,
}

impl<A: AtomSyntax> Parser<A> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError::new(self.offset(), expected, &self.peek().text())
    }

    fn iff(&mut self) -> Result<Formula<A>, ParseError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            lhs = Formula::iff(lhs, self.imp()?);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula<A>, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            return Ok(Formula::implies(lhs, self.imp()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula<A>, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula<A>, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula<A>, ParseError> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::BoxOp => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula<A>, ParseError> {
        let start = self.offset();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&[")", "&", "|", "->", "<->"]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let arg = match self.bump() {
                        Tok::Ident(arg) => arg,
                        _ => {
                            self.pos -= 1;
                            return Err(self.error(&["identifier"]));
                        }
                    };
                    if *self.peek() != Tok::RParen {
                        return Err(self.error(&[")"]));
                    }
                    self.bump();
                    return A::from_call(&name, &arg)
                        .map(Formula::Var)
                        .ok_or_else(|| ParseError::new(start, &[A::describe()], &format!("{name}({arg})")));
                }
                match name.as_str() {
                    "T" => Ok(Formula::Top),
                    "F" => Ok(Formula::Bottom),
                    _ => A::from_ident(&name)
                        .map(Formula::Var)
                        .ok_or_else(|| ParseError::new(start, &[A::describe()], &name)),
                }
            }
            _ => Err(self.error(&["~", "[]", "(", "T", "F", A::describe()])),
        }
    }
}

/// Parses a complete formula with a custom atom syntax.
pub fn parse_with<A: AtomSyntax>(text: &str) -> Result<Formula<A>, ParseError> {
    let mut parser = Parser {
        toks: tokenize(text)?,
        pos: 0,
        _atom: std::marker::PhantomData,
    };
    let f = parser.iff()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error(&["&", "|", "->", "<->", "end of input"]));
    }
    Ok(f)
}

pub fn parse_formula(text: &str) -> Result<ModalFormula, ParseError> {
    parse_with(text)
}

impl std::str::FromStr for Formula<Name> {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

#[cfg(test)]
pub(crate) mod strategies {
    use super::*;
    use proptest::prelude::*;

    pub fn name() -> impl Strategy<Value = Name> {
        prop_oneof![
            Just(Name::new("a").unwrap()),
            Just(Name::new("b").unwrap()),
            Just(Name::new("a.C").unwrap()),
            Just(Name::new("x_1").unwrap()),
        ]
    }

    pub fn formula(depth: u32) -> impl Strategy<Value = ModalFormula> {
        let leaf = prop_oneof![
            Just(Formula::Top),
            Just(Formula::Bottom),
            name().prop_map(Formula::Var),
        ];
        leaf.prop_recursive(depth, 64, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                inner.clone().prop_map(Formula::boxed),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
            ]
        })
    }
}
