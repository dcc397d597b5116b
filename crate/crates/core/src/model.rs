//! Finite weighted systems: a signature of labels with arities, a finite set
//! of states, and for each state a finitely supported weighted combination
//! of one-step behaviours `(label, successor tuple)`, plus a per-state offset.
//!
//! Text format (whitespace-insensitive, `#` comments):
//!
//! ```text
//! semiring prob            # bool | prob | trop | trop[B]
//! label */0
//! label a/1
//! state x { 1/2 a -> y; 1/2 * }
//! state y { }
//! offset x = 1/2
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::lexer::{tokenize, Cursor, Pos, Tok};
use crate::semiring::{Semiring, Value};

pub type StateId = usize;
pub type LabelId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Label {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    labels: Vec<Label>,
    index: HashMap<String, LabelId>,
}

impl Signature {
    /// Builds a signature; `None` if a name repeats.
    pub fn new(labels: impl IntoIterator<Item = (impl Into<String>, usize)>) -> Option<Signature> {
        let mut sig = Signature { labels: Vec::new(), index: HashMap::new() };
        for (name, arity) in labels {
            let name = name.into();
            if sig.index.insert(name.clone(), sig.labels.len()).is_some() {
                return None;
            }
            sig.labels.push(Label { name, arity });
        }
        Some(sig)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn lookup(&self, name: &str) -> Option<LabelId> {
        self.index.get(name).copied()
    }

    pub fn label(&self, id: LabelId) -> &Label {
        &self.labels[id]
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.lookup(name).map(|id| self.labels[id].arity)
    }

    pub fn max_arity(&self) -> usize {
        self.labels.iter().map(|l| l.arity).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub weight: Value,
    pub label: LabelId,
    pub successors: Vec<StateId>,
}

/// A validated model. Transitions out of each state are kept sorted by
/// `(label, successors)` with duplicates merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    semiring: Semiring,
    signature: Signature,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    transitions: Vec<Vec<Transition>>,
    offsets: Vec<Value>,
}

impl Model {
    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        0..self.states.len()
    }

    pub fn state_name(&self, c: StateId) -> &str {
        &self.states[c]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn transitions(&self, c: StateId) -> &[Transition] {
        &self.transitions[c]
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.iter().map(Vec::len).sum()
    }

    pub fn offset(&self, c: StateId) -> &Value {
        &self.offsets[c]
    }

    /// True when every offset is the semiring one, i.e. offsetting is inert.
    pub fn is_plain(&self) -> bool {
        let one = self.semiring.one();
        self.offsets.iter().all(|o| *o == one)
    }

    pub fn deadlocks(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|&c| self.transitions[c].is_empty())
    }

    /// Largest finite transition weight, for the tropical instances.
    pub fn max_finite_cost(&self) -> u64 {
        self.transitions.iter().flatten().filter_map(|t| t.weight.as_cost().and_then(|c| c.finite())).max().unwrap_or(0)
    }

    /// Same model with every offset replaced by the semiring one.
    pub fn without_offsets(&self) -> Model {
        let mut m = self.clone();
        m.offsets = vec![self.semiring.one(); self.states.len()];
        m
    }

    /// Same model with the given offsets.
    ///
    /// # Panics
    /// If the length differs from the state count or a value is outside the carrier.
    pub fn with_offsets(&self, offsets: Vec<Value>) -> Model {
        assert_eq!(offsets.len(), self.states.len());
        assert!(offsets.iter().all(|o| self.semiring.contains(o)));
        Model { offsets, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl Diagnostic {
    fn new(severity: Severity, message: impl Into<String>, pos: Option<Pos>) -> Self {
        Diagnostic { severity, message: message.into(), line: pos.map(|p| p.line), column: pos.map(|p| p.column) }
    }

    pub fn error(message: impl Into<String>, pos: Option<Pos>) -> Self {
        Self::new(Severity::Error, message, pos)
    }

    pub fn warning(message: impl Into<String>) -> Self {
        Self::new(Severity::Warning, message, None)
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{sev} at {l}:{c}: {}", self.message),
            _ => write!(f, "{sev}: {}", self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("invalid model: {}", .0.first().map(ToString::to_string).unwrap_or_default())]
    Invalid(Vec<Diagnostic>),
}

impl ModelError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            ModelError::Syntax { pos, message } => {
                vec![Diagnostic::error(format!("syntax error: {message}"), Some(*pos))]
            }
            ModelError::Invalid(d) => d.clone(),
        }
    }
}

#[derive(Debug, Clone)]
struct PendingTransition {
    from: String,
    weight: Value,
    label: String,
    successors: Vec<String>,
    pos: Option<Pos>,
}

/// Incremental construction of a [`Model`]; all invariants are checked in
/// [`build`](Self::build).
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    semiring: Semiring,
    labels: Vec<(Label, Option<Pos>)>,
    states: Vec<(String, Option<Pos>)>,
    transitions: Vec<PendingTransition>,
    offsets: Vec<(String, Value, Option<Pos>)>,
}

impl ModelBuilder {
    pub fn new(semiring: Semiring) -> Self {
        ModelBuilder { semiring, labels: Vec::new(), states: Vec::new(), transitions: Vec::new(), offsets: Vec::new() }
    }

    pub fn label(&mut self, name: impl Into<String>, arity: usize) -> &mut Self {
        self.labels.push((Label { name: name.into(), arity }, None));
        self
    }

    pub fn state(&mut self, name: impl Into<String>) -> &mut Self {
        self.states.push((name.into(), None));
        self
    }

    pub fn transition(&mut self, from: &str, weight: Value, label: &str, successors: &[&str]) -> &mut Self {
        self.transitions.push(PendingTransition {
            from: from.to_string(),
            weight,
            label: label.to_string(),
            successors: successors.iter().map(|s| s.to_string()).collect(),
            pos: None,
        });
        self
    }

    pub fn offset(&mut self, state: &str, value: Value) -> &mut Self {
        self.offsets.push((state.to_string(), value, None));
        self
    }

    pub fn build(&self) -> Result<Model, ModelError> {
        let sr = self.semiring;
        let mut errors = Vec::new();

        let mut label_index = HashMap::new();
        let mut labels = Vec::new();
        for (label, pos) in &self.labels {
            if label_index.insert(label.name.clone(), labels.len()).is_some() {
                errors.push(Diagnostic::error(format!("duplicate label `{}`", label.name), *pos));
            } else {
                labels.push(label.clone());
            }
        }
        if labels.is_empty() {
            errors.push(Diagnostic::error("signature declares no labels", None));
        }
        let signature = Signature { labels, index: label_index };

        let mut state_index = HashMap::new();
        let mut states = Vec::new();
        for (name, pos) in &self.states {
            if state_index.insert(name.clone(), states.len()).is_some() {
                errors.push(Diagnostic::error(format!("duplicate state `{name}`"), *pos));
            } else {
                states.push(name.clone());
            }
        }

        // (label, successors) -> merged weight, per state
        type Merged = BTreeMap<(LabelId, Vec<StateId>), (Value, Option<Pos>)>;
        let mut merged: Vec<Merged> = vec![BTreeMap::new(); states.len()];
        for t in &self.transitions {
            let Some(&from) = state_index.get(&t.from) else {
                errors.push(Diagnostic::error(format!("transition from undeclared state `{}`", t.from), t.pos));
                continue;
            };
            let Some(label) = signature.lookup(&t.label) else {
                errors.push(Diagnostic::error(format!("unknown label `{}`", t.label), t.pos));
                continue;
            };
            let arity = signature.label(label).arity;
            if t.successors.len() != arity {
                errors.push(Diagnostic::error(
                    format!("label `{}` has arity {arity} but {} successor(s) given", t.label, t.successors.len()),
                    t.pos,
                ));
                continue;
            }
            let mut succ = Vec::with_capacity(arity);
            for s in &t.successors {
                match state_index.get(s) {
                    Some(&id) => succ.push(id),
                    None => errors.push(Diagnostic::error(format!("undeclared successor state `{s}`"), t.pos)),
                }
            }
            if succ.len() != arity {
                continue;
            }
            if !sr.contains(&t.weight) {
                errors.push(Diagnostic::error(format!("weight {} outside the {sr} carrier", t.weight), t.pos));
                continue;
            }
            if sr.is_zero(&t.weight) {
                errors.push(Diagnostic::error(
                    format!("transition `{} {} ...` from `{}` has weight zero", t.weight, t.label, t.from),
                    t.pos,
                ));
                continue;
            }
            let entry = merged[from].entry((label, succ));
            match entry {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert((t.weight.clone(), t.pos));
                }
                std::collections::btree_map::Entry::Occupied(mut o) => match sr.plus(&o.get().0, &t.weight) {
                    Some(w) => o.get_mut().0 = w,
                    None => errors.push(Diagnostic::error(
                        format!("merging duplicate `{}` transitions from `{}` gives an undefined sum", t.label, t.from),
                        t.pos,
                    )),
                },
            }
        }

        let transitions: Vec<Vec<Transition>> = merged
            .into_iter()
            .map(|m| {
                m.into_iter()
                    .map(|((label, successors), (weight, _))| Transition { weight, label, successors })
                    .collect()
            })
            .collect();
        for (c, ts) in transitions.iter().enumerate() {
            if sr.sum(ts.iter().map(|t| &t.weight)).is_none() {
                errors.push(Diagnostic::error(
                    format!("outgoing weight sum of state `{}` is undefined", states[c]),
                    self.states.iter().find(|(n, _)| *n == states[c]).and_then(|(_, p)| *p),
                ));
            }
        }

        let mut offsets: Vec<Option<Value>> = vec![None; states.len()];
        for (state, value, pos) in &self.offsets {
            let Some(&c) = state_index.get(state) else {
                errors.push(Diagnostic::error(format!("offset declared for unknown state `{state}`"), *pos));
                continue;
            };
            if !sr.contains(value) {
                errors.push(Diagnostic::error(format!("offset {value} outside the {sr} carrier"), *pos));
            } else if offsets[c].replace(value.clone()).is_some() {
                errors.push(Diagnostic::error(format!("offset for `{state}` declared twice"), *pos));
            }
        }
        let offsets = offsets.into_iter().map(|o| o.unwrap_or_else(|| sr.one())).collect();

        if errors.is_empty() {
            Ok(Model { semiring: sr, signature, states, state_index, transitions, offsets })
        } else {
            Err(ModelError::Invalid(errors))
        }
    }
}

/// Re-checks every model invariant and reports deadlocks and (probabilistic)
/// mass leaks as warnings.
pub fn validate(model: &Model) -> Vec<Diagnostic> {
    let sr = model.semiring;
    let mut out = Vec::new();
    if model.signature.is_empty() {
        out.push(Diagnostic::error("signature declares no labels", None));
    }
    if model.offsets.len() != model.num_states() || model.transitions.len() != model.num_states() {
        out.push(Diagnostic::error("state tables have inconsistent sizes", None));
        return out;
    }
    for c in model.states() {
        let name = model.state_name(c);
        let ts = model.transitions(c);
        let mut seen = HashSet::new();
        for t in ts {
            let label = model.signature.labels.get(t.label);
            match label {
                None => out.push(Diagnostic::error(format!("state `{name}` uses an unknown label"), None)),
                Some(l) if l.arity != t.successors.len() => {
                    out.push(Diagnostic::error(format!("arity mismatch on `{}` from `{name}`", l.name), None))
                }
                Some(_) => {}
            }
            if t.successors.iter().any(|&s| s >= model.num_states()) {
                out.push(Diagnostic::error(format!("state `{name}` references an undeclared state"), None));
            }
            if !sr.contains(&t.weight) || sr.is_zero(&t.weight) {
                out.push(Diagnostic::error(format!("state `{name}` has an invalid weight {}", t.weight), None));
            }
            if !seen.insert((t.label, t.successors.clone())) {
                out.push(Diagnostic::error(format!("state `{name}` has duplicate transitions"), None));
            }
        }
        match sr.sum(ts.iter().map(|t| &t.weight)) {
            None => out.push(Diagnostic::error(format!("outgoing weight sum of state `{name}` is undefined"), None)),
            Some(total) => {
                if ts.is_empty() {
                    out.push(Diagnostic::warning(format!("deadlock: {name}")));
                } else if sr == Semiring::Probabilistic && total != sr.one() {
                    out.push(Diagnostic::warning(format!("substochastic: {name} (outgoing mass {total})")));
                }
            }
        }
        if !sr.contains(model.offset(c)) {
            out.push(Diagnostic::error(format!("offset of `{name}` outside the carrier"), None));
        }
    }
    out
}

/// Parses and validates a model.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let tokens = tokenize(text)
        .map_err(|e| ModelError::Syntax { pos: e.pos, message: format!("unexpected character `{}`", e.found) })?;
    let mut p = ModelParser { cur: Cursor::new(tokens) };
    p.model()?.build()
}

struct ModelParser {
    cur: Cursor,
}

fn syntax<T>(pos: Pos, message: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError::Syntax { pos, message: message.into() })
}

impl ModelParser {
    fn expect(&mut self, tok: Tok) -> Result<Pos, ModelError> {
        let t = self.cur.next();
        if t.tok == tok {
            Ok(t.pos)
        } else {
            syntax(t.pos, format!("expected {tok}, found {}", t.tok))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), ModelError> {
        let t = self.cur.next();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.pos)),
            other => syntax(t.pos, format!("expected {what}, found {other}")),
        }
    }

    fn label_name(&mut self) -> Result<(String, Pos), ModelError> {
        let t = self.cur.next();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.pos)),
            Tok::Star => Ok(("*".to_string(), t.pos)),
            other => syntax(t.pos, format!("expected a label name, found {other}")),
        }
    }

    fn nat(&mut self) -> Result<u64, ModelError> {
        let t = self.cur.next();
        match &t.tok {
            Tok::Number(s) if s.bytes().all(|b| b.is_ascii_digit()) => {
                s.parse().or_else(|_| syntax(t.pos, format!("natural `{s}` out of range")))
            }
            other => syntax(t.pos, format!("expected a natural number, found {other}")),
        }
    }

    fn weight(&mut self, sr: Semiring) -> Result<(Value, Pos), ModelError> {
        let t = self.cur.next();
        let text = match &t.tok {
            Tok::Number(s) => s.clone(),
            Tok::Ident(s) if s == "inf" => s.clone(),
            other => return syntax(t.pos, format!("expected a weight, found {other}")),
        };
        sr.parse_scalar(&text)
            .map(|v| (v, t.pos))
            .or_else(|e| syntax(Pos { line: t.pos.line, column: t.pos.column + e.column - 1 }, e.kind.to_string()))
    }

    fn semiring(&mut self) -> Result<Semiring, ModelError> {
        let (kw, pos) = self.ident("`semiring`")?;
        if kw != "semiring" {
            return syntax(pos, format!("model must start with `semiring`, found `{kw}`"));
        }
        let (name, pos) = self.ident("a semiring name")?;
        match name.as_str() {
            "bool" => Ok(Semiring::Boolean),
            "prob" => Ok(Semiring::Probabilistic),
            "trop" if self.cur.eat(&Tok::LBracket) => {
                let bound = self.nat()?;
                self.expect(Tok::RBracket)?;
                Semiring::bounded_tropical(bound).map_or_else(|| syntax(pos, "bound must be at least 1"), Ok)
            }
            "trop" => Ok(Semiring::Tropical),
            other => syntax(pos, format!("unknown semiring `{other}`")),
        }
    }

    fn model(&mut self) -> Result<ModelBuilder, ModelError> {
        let sr = self.semiring()?;
        let mut b = ModelBuilder::new(sr);
        let mut declared_labels = HashSet::new();
        loop {
            let t = self.cur.next();
            match &t.tok {
                Tok::Eof => return Ok(b),
                Tok::Ident(kw) if kw == "label" => {
                    let (name, pos) = self.label_name()?;
                    self.expect(Tok::Slash)?;
                    let arity = self.nat()? as usize;
                    declared_labels.insert(name.clone());
                    b.labels.push((Label { name, arity }, Some(pos)));
                }
                Tok::Ident(kw) if kw == "state" => {
                    let (name, pos) = self.ident("a state name")?;
                    b.states.push((name.clone(), Some(pos)));
                    self.expect(Tok::LBrace)?;
                    while !self.cur.eat(&Tok::RBrace) {
                        let (weight, pos) = self.weight(sr)?;
                        let (label, lpos) = self.label_name()?;
                        if !declared_labels.contains(&label) {
                            return syntax(
                                lpos,
                                format!("unknown label `{label}` (labels must be declared before use)"),
                            );
                        }
                        let mut successors = Vec::new();
                        if self.cur.eat(&Tok::Arrow) {
                            while let Tok::Ident(_) = self.cur.peek().tok {
                                successors.push(self.ident("a state name")?.0);
                            }
                            if successors.is_empty() {
                                let t = self.cur.peek();
                                return syntax(t.pos, format!("expected a successor state, found {}", t.tok));
                            }
                        }
                        b.transitions.push(PendingTransition {
                            from: name.clone(),
                            weight,
                            label,
                            successors,
                            pos: Some(pos),
                        });
                        if !self.cur.eat(&Tok::Semi) && self.cur.peek().tok != Tok::RBrace {
                            let t = self.cur.peek();
                            return syntax(t.pos, format!("expected `;` or `}}`, found {}", t.tok));
                        }
                    }
                }
                Tok::Ident(kw) if kw == "offset" => {
                    let (state, pos) = self.ident("a state name")?;
                    self.expect(Tok::Eq)?;
                    let (value, _) = self.weight(sr)?;
                    b.offsets.push((state, value, Some(pos)));
                }
                other => return syntax(t.pos, format!("expected `label`, `state` or `offset`, found {other}")),
            }
        }
    }
}

/// Renders the model in the text format accepted by [`parse_model`].
impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "semiring {}", self.semiring)?;
        for l in &self.signature.labels {
            writeln!(f, "label {}/{}", l.name, l.arity)?;
        }
        for c in self.states() {
            write!(f, "state {} {{", self.states[c])?;
            for (i, t) in self.transitions[c].iter().enumerate() {
                f.write_str(if i == 0 { " " } else { "; " })?;
                write!(f, "{} {}", t.weight, self.signature.labels[t.label].name)?;
                if !t.successors.is_empty() {
                    f.write_str(" ->")?;
                    for &s in &t.successors {
                        write!(f, " {}", self.states[s])?;
                    }
                }
            }
            f.write_str(if self.transitions[c].is_empty() { "}\n" } else { " }\n" })?;
        }
        let one = self.semiring.one();
        for c in self.states() {
            if self.offsets[c] != one {
                writeln!(f, "offset {} = {}", self.states[c], self.offsets[c])?;
            }
        }
        Ok(())
    }
}
