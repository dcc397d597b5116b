//! Trace fragments (finite label trees, possibly cut by `⊤` leaves), the
//! linear-time behaviour `lt`, finite-trace behaviour, the approximants
//! `trⁿ` of the maximal-trace behaviour, and depth-bounded equivalence.
//!
//! Fragment syntax: `T` for a cut, `label(child, ...)` for a node, bare
//! `label` for a nullary node, e.g. `a(b(T), *)`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::eval::{nu_extent, EvalConfig, EvalError, Predicate};
use crate::lexer::{tokenize, Cursor, Pos, Tok};
use crate::logic::Formula;
use crate::model::{Model, Signature, StateId};
use crate::semiring::{Semiring, Value};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TraceFragment {
    Top,
    Node(String, Vec<TraceFragment>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("label `{label}` has arity {expected} but {found} child(ren) given")]
    Arity { label: String, expected: usize, found: usize },
    #[error("trace behaviour is defined only for models without offsets")]
    OffsetUnsupported,
    #[error("fragment contains a `T` leaf; a completed trace is required")]
    NotCompleted,
    #[error("fragment is cut by `T` above the truncation depth {0}")]
    CutAboveDepth(usize),
    #[error("{count} fragments exceed the enumeration cap {cap}")]
    Sizing { count: u128, cap: u128 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl TraceFragment {
    pub fn node(label: impl Into<String>, children: Vec<TraceFragment>) -> TraceFragment {
        TraceFragment::Node(label.into(), children)
    }

    pub fn depth(&self) -> usize {
        match self {
            TraceFragment::Top => 0,
            TraceFragment::Node(_, ch) => 1 + ch.iter().map(TraceFragment::depth).max().unwrap_or(0),
        }
    }

    /// No `T` leaves: every leaf is a nullary node.
    pub fn is_completed(&self) -> bool {
        match self {
            TraceFragment::Top => false,
            TraceFragment::Node(_, ch) => ch.iter().all(TraceFragment::is_completed),
        }
    }

    pub fn check(&self, signature: &Signature) -> Result<(), TraceError> {
        match self {
            TraceFragment::Top => Ok(()),
            TraceFragment::Node(label, ch) => {
                let expected = signature.arity_of(label).ok_or_else(|| TraceError::UnknownLabel(label.clone()))?;
                if expected != ch.len() {
                    return Err(TraceError::Arity { label: label.clone(), expected, found: ch.len() });
                }
                ch.iter().try_for_each(|c| c.check(signature))
            }
        }
    }

    /// `T ↦ ⊤`, `λ(b̄) ↦ [λ](b̄)`.
    pub fn to_formula(&self) -> Formula {
        match self {
            TraceFragment::Top => Formula::Top,
            TraceFragment::Node(label, ch) => Formula::modal(label.clone(), ch.iter().map(Self::to_formula).collect()),
        }
    }
}

pub fn fragment_to_formula(b: &TraceFragment) -> Formula {
    b.to_formula()
}

impl fmt::Display for TraceFragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceFragment::Top => f.write_str("T"),
            TraceFragment::Node(label, ch) if ch.is_empty() => f.write_str(label),
            TraceFragment::Node(label, ch) => {
                write!(f, "{label}(")?;
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Serialize for TraceFragment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn parse_fragment(text: &str, signature: &Signature) -> Result<TraceFragment, TraceError> {
    let tokens = tokenize(text)
        .map_err(|e| TraceError::Syntax { pos: e.pos, message: format!("unexpected character `{}`", e.found) })?;
    let mut cur = Cursor::new(tokens);
    let b = fragment(&mut cur)?;
    let t = cur.peek();
    if t.tok != Tok::Eof {
        return Err(TraceError::Syntax { pos: t.pos, message: format!("unexpected {} after fragment", t.tok) });
    }
    b.check(signature)?;
    Ok(b)
}

fn fragment(cur: &mut Cursor) -> Result<TraceFragment, TraceError> {
    let t = cur.next();
    let label = match t.tok {
        Tok::Ident(s) if s == "T" => return Ok(TraceFragment::Top),
        Tok::Ident(s) => s,
        Tok::Star => "*".to_string(),
        other => {
            return Err(TraceError::Syntax { pos: t.pos, message: format!("expected a label or `T`, found {other}") })
        }
    };
    let mut children = Vec::new();
    if cur.eat(&Tok::LParen) {
        loop {
            children.push(fragment(cur)?);
            let t = cur.next();
            match t.tok {
                Tok::Comma => continue,
                Tok::RParen => break,
                other => {
                    return Err(TraceError::Syntax {
                        pos: t.pos,
                        message: format!("expected `,` or `)`, found {other}"),
                    })
                }
            }
        }
    }
    Ok(TraceFragment::Node(label, children))
}

/// Linear-time behaviour of every state on one fragment:
/// `lt(c, T) = ext(c)` and `lt(c, λ(b̄)) = (Σ w • Π lt(cⱼ, bⱼ)) ⊘ ρ(c)`.
///
/// `extent` is the model's ν-extent.
pub fn lt_all(model: &Model, b: &TraceFragment, extent: &Predicate) -> Predicate {
    let sr = model.semiring();
    match b {
        TraceFragment::Top => extent.clone(),
        TraceFragment::Node(label, ch) => {
            let id = model.signature().lookup(label).expect("fragment checked against the signature");
            let sub: Vec<Predicate> = ch.iter().map(|c| lt_all(model, c, extent)).collect();
            model
                .states()
                .map(|c| {
                    let total = model
                        .transitions(c)
                        .iter()
                        .filter(|t| t.label == id)
                        .map(|t| weighted_product(sr, &t.weight, &t.successors, &sub))
                        .try_fold(sr.zero(), |acc, v| sr.plus(&acc, &v))
                        .expect("a sub-sum of a defined transition sum is defined");
                    sr.oslash(&total, model.offset(c))
                })
                .collect()
        }
    }
}

fn weighted_product(sr: Semiring, w: &Value, succ: &[StateId], sub: &[Predicate]) -> Value {
    succ.iter().zip(sub).fold(w.clone(), |v, (&s, p)| sr.times(&v, &p[s]))
}

pub fn lt(model: &Model, c: StateId, b: &TraceFragment, config: &EvalConfig) -> Result<Value, TraceError> {
    b.check(model.signature())?;
    let ext = nu_extent(model, config)?.values;
    Ok(lt_all(model, b, &ext)[c].clone())
}

fn require_plain(model: &Model) -> Result<(), TraceError> {
    if model.is_plain() {
        Ok(())
    } else {
        Err(TraceError::OffsetUnsupported)
    }
}

/// Finite-trace behaviour on a completed trace:
/// `Σ w • Π finite_tr(cⱼ, tⱼ)` over the matching transitions.
pub fn finite_tr(model: &Model, c: StateId, t: &TraceFragment) -> Result<Value, TraceError> {
    require_plain(model)?;
    t.check(model.signature())?;
    if !t.is_completed() {
        return Err(TraceError::NotCompleted);
    }
    Ok(finite_tr_all(model, t)[c].clone())
}

fn finite_tr_all(model: &Model, t: &TraceFragment) -> Predicate {
    let TraceFragment::Node(label, ch) = t else { unreachable!("completed traces have no cut") };
    node_sum(model, label, ch.iter().map(|c| finite_tr_all(model, c)).collect())
}

fn node_sum(model: &Model, label: &str, sub: Vec<Predicate>) -> Predicate {
    let sr = model.semiring();
    let id = model.signature().lookup(label).expect("fragment checked against the signature");
    model
        .states()
        .map(|c| {
            model
                .transitions(c)
                .iter()
                .filter(|t| t.label == id)
                .map(|t| weighted_product(sr, &t.weight, &t.successors, &sub))
                .try_fold(sr.zero(), |acc, v| sr.plus(&acc, &v))
                .expect("a sub-sum of a defined transition sum is defined")
        })
        .collect()
}

/// `trⁿ(c, t)`: `tr⁰ ≡ 1` and `trᵏ⁺¹(c, λ(t̄)) = Σ w • Π trᵏ(cⱼ, tⱼ)`.
///
/// `t` is a truncation: its `T` leaves sit at depth `n` exactly. A `T` leaf
/// reached with steps remaining is an error.
pub fn tr_approx(model: &Model, c: StateId, t: &TraceFragment, n: usize) -> Result<Value, TraceError> {
    require_plain(model)?;
    t.check(model.signature())?;
    Ok(tr_approx_all(model, t, n)?[c].clone())
}

fn tr_approx_all(model: &Model, t: &TraceFragment, n: usize) -> Result<Predicate, TraceError> {
    if n == 0 {
        return Ok(vec![model.semiring().one(); model.num_states()]);
    }
    match t {
        TraceFragment::Top => Err(TraceError::CutAboveDepth(n)),
        TraceFragment::Node(label, ch) => {
            let sub = ch.iter().map(|c| tr_approx_all(model, c, n - 1)).collect::<Result<_, _>>()?;
            Ok(node_sum(model, label, sub))
        }
    }
}

/// `Uₙ(c) = ⨆_λ Σ_{(w,λ,c̄)} w • Π Uₙ₋₁(cⱼ)` from `U₀ ≡ 1`: an upper bound,
/// in `⊑`, on `trⁿ(c, t)` over every depth-`n` truncation `t`.
pub fn tr_envelope(model: &Model, n: usize) -> Result<Predicate, TraceError> {
    require_plain(model)?;
    let sr = model.semiring();
    let mut u = vec![sr.one(); model.num_states()];
    for _ in 0..n {
        u = model
            .states()
            .map(|c| {
                let mut per_label = vec![sr.zero(); model.signature().len()];
                for t in model.transitions(c) {
                    let term = t.successors.iter().fold(t.weight.clone(), |v, &s| sr.times(&v, &u[s]));
                    per_label[t.label] = sr.plus(&per_label[t.label], &term).expect("defined transition sum");
                }
                per_label.into_iter().fold(sr.zero(), |a, b| if sr.leq(&a, &b) { b } else { a })
            })
            .collect();
    }
    Ok(u)
}

/// Number of fragments of depth `≤ depth`, saturating.
pub fn count_fragments(signature: &Signature, depth: usize) -> u128 {
    let mut count: u128 = 1;
    for _ in 0..depth {
        count =
            signature.labels().iter().fold(1u128, |acc, l| acc.saturating_add(count.saturating_pow(l.arity as u32)));
    }
    count
}

/// All fragments of depth `≤ depth`, by increasing depth and, within a
/// depth, in signature label order.
pub fn enumerate_fragments(signature: &Signature, depth: usize, cap: u128) -> Result<Vec<TraceFragment>, TraceError> {
    let count = count_fragments(signature, depth);
    if count > cap {
        return Err(TraceError::Sizing { count, cap });
    }
    // levels[k]: fragments of depth exactly k
    let mut levels: Vec<Vec<TraceFragment>> = vec![vec![TraceFragment::Top]];
    for k in 1..=depth {
        let below: Vec<&TraceFragment> = levels.iter().flatten().collect();
        let mut level = Vec::new();
        for l in signature.labels() {
            if l.arity == 0 {
                if k == 1 {
                    level.push(TraceFragment::node(l.name.clone(), Vec::new()));
                }
                continue;
            }
            for tuple in tuples(&below, l.arity) {
                if tuple.iter().any(|b| b.depth() == k - 1) {
                    level.push(TraceFragment::node(l.name.clone(), tuple.into_iter().cloned().collect()));
                }
            }
        }
        levels.push(level);
    }
    Ok(levels.into_iter().flatten().collect())
}

fn tuples<'a, T>(items: &[&'a T], n: usize) -> Vec<Vec<&'a T>> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |&it| {
                    let mut p = prefix.clone();
                    p.push(it);
                    p
                })
            })
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EquivKind {
    Lt,
    Tr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub fragment: TraceFragment,
    pub left: Value,
    pub right: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub witness: Option<Witness>,
    /// Fragments compared.
    pub checked: usize,
    /// For `tr`: the envelopes `U_depth` at both states, bounding the
    /// truncation values of every maximal trace at that depth.
    pub envelope: Option<(Value, Value)>,
}

/// Compares `c` and `d` on every fragment of depth `≤ depth`.
///
/// `lt` compares linear-time behaviour on all fragments. `tr` compares the
/// finite-trace behaviour on the completed traces among them; maximal traces
/// are only reachable through truncations, whose decay is reported via the
/// envelope.
pub fn equiv_upto(
    model: &Model,
    c: StateId,
    d: StateId,
    depth: usize,
    kind: EquivKind,
    config: &EvalConfig,
    cap: u128,
) -> Result<Equivalence, TraceError> {
    if kind == EquivKind::Tr {
        require_plain(model)?;
    }
    let fragments = enumerate_fragments(model.signature(), depth, cap)?;
    let ext = match kind {
        EquivKind::Lt => Some(nu_extent(model, config)?.values),
        EquivKind::Tr => None,
    };
    let mut checked = 0;
    let mut witness = None;
    for b in fragments {
        let values = match (&ext, kind) {
            (Some(ext), EquivKind::Lt) => lt_all(model, &b, ext),
            (_, EquivKind::Tr) if b.is_completed() => finite_tr_all(model, &b),
            _ => continue,
        };
        checked += 1;
        if values[c] != values[d] {
            witness = Some(Witness { fragment: b, left: values[c].clone(), right: values[d].clone() });
            break;
        }
    }
    let envelope = match kind {
        EquivKind::Tr => {
            let u = tr_envelope(model, depth)?;
            Some((u[c].clone(), u[d].clone()))
        }
        EquivKind::Lt => None,
    };
    Ok(Equivalence { equivalent: witness.is_none(), witness, checked, envelope })
}
