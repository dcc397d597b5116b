//! Formulas of the linear-time fixpoint logic: `⊤`, variables, weighted sums
//! (the empty sum is `⊥`), modalities with restricted disjunction over
//! distinct labels, and `μ`/`ν` binders.
//!
//! Concrete syntax:
//!
//! ```text
//! formula := summand ("+" summand)*        # weights mandatory on multi-term sums
//! summand := WEIGHT "*" atom | atom
//! atom    := "T" | "F" | IDENT | modal ("|" modal)*
//!          | ("mu" | "nu") IDENT "." formula | "(" formula ")"
//! modal   := "[" LABEL "]" ["(" formula ("," formula)* ")"]
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::lexer::{tokenize, Cursor, Pos, Tok};
use crate::model::Signature;
use crate::semiring::{Semiring, Value};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Var(String),
    /// `Σ cᵢ • φᵢ`; the empty sum is `⊥`.
    Sum(Vec<(Value, Formula)>),
    /// Disjunctive modality: one argument tuple per (distinct) label.
    Modal(BTreeMap<String, Vec<Formula>>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulaClass {
    pub closed: bool,
    /// No propositional operators besides `⊤` and `⊥`: every sum is empty.
    pub qualitative: bool,
    /// No fixpoints and no variables.
    pub modal_only: bool,
    pub modal_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("label `{label}` has arity {expected} but {found} argument(s) given")]
    Arity { label: String, expected: usize, found: usize },
    #[error("label `{0}` occurs twice in one disjunction")]
    DuplicateLabel(String),
    #[error("modality without disjuncts")]
    EmptyModal,
    #[error("coefficient {0} lies outside the semiring carrier")]
    CoefficientOutOfCarrier(Value),
    #[error("coefficient sum {0} is undefined in the semiring")]
    UndefinedCoefficientSum(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}

const RESERVED: [&str; 5] = ["T", "F", "mu", "nu", "inf"];

impl Formula {
    pub fn bottom() -> Formula {
        Formula::Sum(Vec::new())
    }

    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    /// Single-label modality `[label](args)`.
    pub fn modal(label: impl Into<String>, args: Vec<Formula>) -> Formula {
        Formula::Modal(BTreeMap::from([(label.into(), args)]))
    }

    pub fn mu(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Mu(var.into(), Box::new(body))
    }

    pub fn nu(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Nu(var.into(), Box::new(body))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Formula::Sum(terms) if terms.is_empty())
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Formula::Top | Formula::Var(_) => 0,
            Formula::Sum(terms) => terms.iter().map(|(_, f)| f.size()).sum(),
            Formula::Modal(d) => d.values().flatten().map(Formula::size).sum(),
            Formula::Mu(_, b) | Formula::Nu(_, b) => b.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Top => {}
                Formula::Var(v) => {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
                Formula::Sum(terms) => terms.iter().for_each(|(_, g)| go(g, bound, out)),
                Formula::Modal(d) => d.values().flatten().for_each(|g| go(g, bound, out)),
                Formula::Mu(x, b) | Formula::Nu(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    fn all_names(&self, out: &mut HashSet<String>) {
        match self {
            Formula::Top => {}
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Sum(terms) => terms.iter().for_each(|(_, g)| g.all_names(out)),
            Formula::Modal(d) => d.values().flatten().for_each(|g| g.all_names(out)),
            Formula::Mu(x, b) | Formula::Nu(x, b) => {
                out.insert(x.clone());
                b.all_names(out);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn require_closed(&self) -> Result<(), FormulaError> {
        match self.free_vars().into_iter().next() {
            Some(v) => Err(FormulaError::UnboundVariable(v)),
            None => Ok(()),
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Var(_) => 0,
            Formula::Sum(terms) => terms.iter().map(|(_, f)| f.modal_depth()).max().unwrap_or(0),
            Formula::Modal(d) => 1 + d.values().flatten().map(Formula::modal_depth).max().unwrap_or(0),
            Formula::Mu(_, b) | Formula::Nu(_, b) => b.modal_depth(),
        }
    }

    /// Fixpoint nesting depth.
    pub fn fnd(&self) -> usize {
        match self {
            Formula::Top | Formula::Var(_) => 0,
            Formula::Sum(terms) => terms.iter().map(|(_, f)| f.fnd()).max().unwrap_or(0),
            Formula::Modal(d) => d.values().flatten().map(Formula::fnd).max().unwrap_or(0),
            Formula::Mu(_, b) | Formula::Nu(_, b) => b.fnd() + 1,
        }
    }

    pub fn classify(&self) -> FormulaClass {
        fn qualitative(f: &Formula) -> bool {
            match f {
                Formula::Top | Formula::Var(_) => true,
                Formula::Sum(terms) => terms.is_empty(),
                Formula::Modal(d) => d.values().flatten().all(qualitative),
                Formula::Mu(_, b) | Formula::Nu(_, b) => qualitative(b),
            }
        }
        fn modal_only(f: &Formula) -> bool {
            match f {
                Formula::Top => true,
                Formula::Var(_) | Formula::Mu(..) | Formula::Nu(..) => false,
                Formula::Sum(terms) => terms.iter().all(|(_, g)| modal_only(g)),
                Formula::Modal(d) => d.values().flatten().all(modal_only),
            }
        }
        FormulaClass {
            closed: self.is_closed(),
            qualitative: qualitative(self),
            modal_only: modal_only(self),
            modal_depth: self.modal_depth(),
        }
    }

    /// Capture-avoiding substitution of `replacement` for the free
    /// occurrences of `var`.
    pub fn substitute(&self, var: &str, replacement: &Formula) -> Formula {
        let repl_free = replacement.free_vars();
        self.subst(var, replacement, &repl_free)
    }

    fn subst(&self, var: &str, repl: &Formula, repl_free: &BTreeSet<String>) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Var(v) if v == var => repl.clone(),
            Formula::Var(v) => Formula::Var(v.clone()),
            Formula::Sum(terms) => {
                Formula::Sum(terms.iter().map(|(c, g)| (c.clone(), g.subst(var, repl, repl_free))).collect())
            }
            Formula::Modal(d) => Formula::Modal(
                d.iter()
                    .map(|(l, args)| (l.clone(), args.iter().map(|a| a.subst(var, repl, repl_free)).collect()))
                    .collect(),
            ),
            Formula::Mu(x, b) | Formula::Nu(x, b) => {
                let rebuild = |x: String, b: Formula| match self {
                    Formula::Mu(..) => Formula::Mu(x, Box::new(b)),
                    _ => Formula::Nu(x, Box::new(b)),
                };
                if x == var || !b.free_vars().contains(var) {
                    return self.clone();
                }
                if repl_free.contains(x) {
                    let mut used = HashSet::new();
                    b.all_names(&mut used);
                    used.extend(repl_free.iter().cloned());
                    used.insert(var.to_string());
                    let fresh = fresh_name(x, &used);
                    let renamed = b.subst(x, &Formula::Var(fresh.clone()), &BTreeSet::from([fresh.clone()]));
                    rebuild(fresh, renamed.subst(var, repl, repl_free))
                } else {
                    rebuild(x.clone(), b.subst(var, repl, repl_free))
                }
            }
        }
    }

    /// Replaces every fixpoint, innermost first, by its `k`-th Kleene
    /// approximant: `μx.b ↦ b'⁽ᵏ⁾` from `⊥` and `νx.b ↦ b'⁽ᵏ⁾` from `⊤`,
    /// where `b'` is the unrolled body and `b'⁽ⁱ⁺¹⁾ = b'[b'⁽ⁱ⁾/x]`.
    pub fn unroll(&self, k: usize) -> Formula {
        match self {
            Formula::Top | Formula::Var(_) => self.clone(),
            Formula::Sum(terms) => Formula::Sum(terms.iter().map(|(c, g)| (c.clone(), g.unroll(k))).collect()),
            Formula::Modal(d) => Formula::Modal(
                d.iter().map(|(l, args)| (l.clone(), args.iter().map(|a| a.unroll(k)).collect())).collect(),
            ),
            Formula::Mu(x, b) | Formula::Nu(x, b) => {
                let body = b.unroll(k);
                let mut approx = if matches!(self, Formula::Mu(..)) { Formula::bottom() } else { Formula::Top };
                for _ in 0..k {
                    approx = body.substitute(x, &approx);
                }
                approx
            }
        }
    }

    /// Checks labels, arities and coefficient sums against a signature.
    pub fn check(&self, signature: &Signature, semiring: Semiring) -> Result<(), FormulaError> {
        match self {
            Formula::Top | Formula::Var(_) => Ok(()),
            Formula::Sum(terms) => {
                for (c, _) in terms {
                    if !semiring.contains(c) {
                        return Err(FormulaError::CoefficientOutOfCarrier(c.clone()));
                    }
                }
                if semiring.sum(terms.iter().map(|(c, _)| c)).is_none() {
                    let text = terms.iter().map(|(c, _)| c.to_string()).collect::<Vec<_>>().join(" + ");
                    return Err(FormulaError::UndefinedCoefficientSum(text));
                }
                terms.iter().try_for_each(|(_, g)| g.check(signature, semiring))
            }
            Formula::Modal(d) => {
                if d.is_empty() {
                    return Err(FormulaError::EmptyModal);
                }
                for (label, args) in d {
                    let expected =
                        signature.arity_of(label).ok_or_else(|| FormulaError::UnknownLabel(label.clone()))?;
                    if expected != args.len() {
                        return Err(FormulaError::Arity { label: label.clone(), expected, found: args.len() });
                    }
                    args.iter().try_for_each(|a| a.check(signature, semiring))?;
                }
                Ok(())
            }
            Formula::Mu(_, b) | Formula::Nu(_, b) => b.check(signature, semiring),
        }
    }

    /// Renames binders so that no variable is bound twice along any path.
    pub fn alpha_normalize(&self) -> Formula {
        let mut used = HashSet::new();
        self.all_names(&mut used);
        self.normalize(&mut Vec::new(), &mut used)
    }

    fn normalize(&self, bound: &mut Vec<String>, used: &mut HashSet<String>) -> Formula {
        match self {
            Formula::Top | Formula::Var(_) => self.clone(),
            Formula::Sum(terms) => {
                Formula::Sum(terms.iter().map(|(c, g)| (c.clone(), g.normalize(bound, used))).collect())
            }
            Formula::Modal(d) => Formula::Modal(
                d.iter()
                    .map(|(l, args)| (l.clone(), args.iter().map(|a| a.normalize(bound, used)).collect()))
                    .collect(),
            ),
            Formula::Mu(x, b) | Formula::Nu(x, b) => {
                let (name, body) = if bound.contains(x) {
                    let fresh = fresh_name(x, used);
                    used.insert(fresh.clone());
                    let body = b.substitute(x, &Formula::Var(fresh.clone()));
                    (fresh, body)
                } else {
                    (x.clone(), (**b).clone())
                };
                bound.push(name.clone());
                let body = body.normalize(bound, used);
                bound.pop();
                if matches!(self, Formula::Mu(..)) {
                    Formula::Mu(name, Box::new(body))
                } else {
                    Formula::Nu(name, Box::new(body))
                }
            }
        }
    }
}

fn fresh_name(base: &str, used: &HashSet<String>) -> String {
    (1..).map(|i| format!("{base}_{i}")).find(|n| !used.contains(n)).expect("unbounded search")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(g: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match g {
                Formula::Mu(..) | Formula::Nu(..) => write!(f, "({g})"),
                Formula::Sum(t) if !t.is_empty() => write!(f, "({g})"),
                _ => write!(f, "{g}"),
            }
        }
        match self {
            Formula::Top => f.write_str("T"),
            Formula::Var(v) => f.write_str(v),
            Formula::Sum(terms) if terms.is_empty() => f.write_str("F"),
            Formula::Sum(terms) => {
                for (i, (c, g)) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{c}*")?;
                    atom(g, f)?;
                }
                Ok(())
            }
            Formula::Modal(d) => {
                for (i, (label, args)) in d.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "[{label}]")?;
                    if !args.is_empty() {
                        f.write_str("(")?;
                        for (j, a) in args.iter().enumerate() {
                            if j > 0 {
                                f.write_str(", ")?;
                            }
                            write!(f, "{a}")?;
                        }
                        f.write_str(")")?;
                    }
                }
                Ok(())
            }
            Formula::Mu(x, b) => write!(f, "mu {x}. {b}"),
            Formula::Nu(x, b) => write!(f, "nu {x}. {b}"),
        }
    }
}

/// Parses a formula, validates it against the signature and semiring, and
/// alpha-renames shadowed binders. Free variables are allowed; use
/// [`Formula::require_closed`] where a closed formula is needed.
pub fn parse_formula(text: &str, signature: &Signature, semiring: Semiring) -> Result<Formula, FormulaError> {
    let tokens = tokenize(text)
        .map_err(|e| FormulaError::Syntax { pos: e.pos, message: format!("unexpected character `{}`", e.found) })?;
    let mut p = FormulaParser { cur: Cursor::new(tokens), semiring };
    let f = p.formula()?;
    let t = p.cur.peek();
    if t.tok != Tok::Eof {
        return Err(FormulaError::Syntax { pos: t.pos, message: format!("unexpected {} after formula", t.tok) });
    }
    f.check(signature, semiring)?;
    Ok(f.alpha_normalize())
}

struct FormulaParser {
    cur: Cursor,
    semiring: Semiring,
}

fn syntax<T>(pos: Pos, message: impl Into<String>) -> Result<T, FormulaError> {
    Err(FormulaError::Syntax { pos, message: message.into() })
}

impl FormulaParser {
    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let first_pos = self.cur.peek().pos;
        let first = self.summand()?;
        if self.cur.peek().tok != Tok::Plus {
            return Ok(match first {
                (Some(c), g) => Formula::Sum(vec![(c, g)]),
                (None, g) => g,
            });
        }
        let mut terms = Vec::new();
        let mut push = |s: (Option<Value>, Formula), pos: Pos| match s {
            (Some(c), g) => {
                terms.push((c, g));
                Ok(())
            }
            (None, _) => syntax(pos, "weights are mandatory on every term of a multi-term sum"),
        };
        push(first, first_pos)?;
        while self.cur.eat(&Tok::Plus) {
            let pos = self.cur.peek().pos;
            let s = self.summand()?;
            push(s, pos)?;
        }
        Ok(Formula::Sum(terms))
    }

    fn summand(&mut self) -> Result<(Option<Value>, Formula), FormulaError> {
        let t = self.cur.peek().clone();
        let weight_text = match &t.tok {
            Tok::Number(s) => Some(s.clone()),
            Tok::Ident(s) if s == "inf" => Some(s.clone()),
            _ => None,
        };
        let Some(text) = weight_text else {
            return Ok((None, self.atom()?));
        };
        self.cur.next();
        let c = self
            .semiring
            .parse_scalar(&text)
            .or_else(|e| syntax(Pos { line: t.pos.line, column: t.pos.column + e.column - 1 }, e.kind.to_string()))?;
        let star = self.cur.next();
        if star.tok != Tok::Star {
            return syntax(star.pos, format!("expected `*` after weight, found {}", star.tok));
        }
        Ok((Some(c), self.atom()?))
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        let t = self.cur.next();
        match t.tok {
            Tok::Ident(s) if s == "T" => Ok(Formula::Top),
            Tok::Ident(s) if s == "F" => Ok(Formula::bottom()),
            Tok::Ident(s) if s == "mu" || s == "nu" => {
                let v = self.cur.next();
                let name = match v.tok {
                    Tok::Ident(n) if !RESERVED.contains(&n.as_str()) => n,
                    other => return syntax(v.pos, format!("expected a variable name, found {other}")),
                };
                let dot = self.cur.next();
                if dot.tok != Tok::Dot {
                    return syntax(dot.pos, format!("expected `.` after binder, found {}", dot.tok));
                }
                let body = self.formula()?;
                Ok(if s == "mu" { Formula::mu(name, body) } else { Formula::nu(name, body) })
            }
            Tok::Ident(s) if s == "inf" => syntax(t.pos, "`inf` is a weight, not a variable"),
            Tok::Ident(s) => Ok(Formula::Var(s)),
            Tok::LParen => {
                let f = self.formula()?;
                let close = self.cur.next();
                if close.tok != Tok::RParen {
                    return syntax(close.pos, format!("expected `)`, found {}", close.tok));
                }
                Ok(f)
            }
            Tok::LBracket => {
                let mut disjuncts = BTreeMap::new();
                let (label, args) = self.modal_rest()?;
                disjuncts.insert(label, args);
                while self.cur.eat(&Tok::Pipe) {
                    let open = self.cur.next();
                    if open.tok != Tok::LBracket {
                        return syntax(open.pos, format!("only modalities may be joined by `|`, found {}", open.tok));
                    }
                    let (label, args) = self.modal_rest()?;
                    if disjuncts.contains_key(&label) {
                        return Err(FormulaError::DuplicateLabel(label));
                    }
                    disjuncts.insert(label, args);
                }
                Ok(Formula::Modal(disjuncts))
            }
            other => syntax(t.pos, format!("expected a formula, found {other}")),
        }
    }

    /// After the opening `[`: `LABEL "]" ["(" args ")"]`.
    fn modal_rest(&mut self) -> Result<(String, Vec<Formula>), FormulaError> {
        let l = self.cur.next();
        let label = match l.tok {
            Tok::Ident(s) => s,
            Tok::Star => "*".to_string(),
            other => return syntax(l.pos, format!("expected a label, found {other}")),
        };
        let close = self.cur.next();
        if close.tok != Tok::RBracket {
            return syntax(close.pos, format!("expected `]`, found {}", close.tok));
        }
        let mut args = Vec::new();
        if self.cur.eat(&Tok::LParen) {
            loop {
                args.push(self.formula()?);
                let t = self.cur.next();
                match t.tok {
                    Tok::Comma => continue,
                    Tok::RParen => break,
                    other => return syntax(t.pos, format!("expected `,` or `)`, found {other}")),
                }
            }
        }
        Ok((label, args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new([("*", 0), ("a", 1), ("b", 1), ("c", 1), ("l", 2)]).unwrap()
    }

    fn parse(s: &str) -> Formula {
        parse_formula(s, &sig(), Semiring::Probabilistic).unwrap()
    }

    #[test]
    fn parses_eventually_formula() {
        let f = parse("mu X. ([a](T) | [b](X) | [c](X))");
        let Formula::Mu(x, body) = &f else { panic!("{f:?}") };
        assert_eq!(x, "X");
        let Formula::Modal(d) = &**body else { panic!() };
        assert_eq!(d.keys().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(d["a"], vec![Formula::Top]);
        assert_eq!(d["b"], vec![Formula::var("X")]);
    }

    #[test]
    fn parses_weighted_sum() {
        let f = parse("1/2*[a](T) + 1/4*[b](T)");
        assert_eq!(
            f,
            Formula::Sum(vec![
                (Value::prob(1, 2), Formula::modal("a", vec![Formula::Top])),
                (Value::prob(1, 4), Formula::modal("b", vec![Formula::Top])),
            ])
        );
        assert_eq!(parse("1/2*T"), Formula::Sum(vec![(Value::prob(1, 2), Formula::Top)]));
    }

    #[test]
    fn rejects_bad_formulas() {
        let p = |s| parse_formula(s, &sig(), Semiring::Probabilistic);
        assert_eq!(p("[a](T) | [a](F)"), Err(FormulaError::DuplicateLabel("a".into())));
        assert!(matches!(p("[q](T)"), Err(FormulaError::UnknownLabel(_))));
        assert!(matches!(p("[a](T, T)"), Err(FormulaError::Arity { expected: 1, found: 2, .. })));
        assert!(matches!(p("[a]"), Err(FormulaError::Arity { expected: 1, found: 0, .. })));
        assert!(matches!(p("3/4*T + 1/2*T"), Err(FormulaError::UndefinedCoefficientSum(_))));
        assert!(matches!(p("T + T"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(p("3/2*T"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(p("[a](T) | T"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(p("mu T. T"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(p("[a](T))"), Err(FormulaError::Syntax { .. })));
        assert_eq!(p("[a](X)").unwrap().require_closed(), Err(FormulaError::UnboundVariable("X".into())));
    }

    #[test]
    fn nullary_and_binary_modalities() {
        let f = parse("[*] | [l](T, [*])");
        let Formula::Modal(d) = &f else { panic!() };
        assert_eq!(d["*"], vec![]);
        assert_eq!(d["l"].len(), 2);
        assert_eq!(f.modal_depth(), 2);
    }

    #[test]
    fn binder_body_extends_right() {
        let f = parse("mu X. [a](X) | [b](T)");
        assert!(matches!(f, Formula::Mu(_, ref b) if matches!(**b, Formula::Modal(ref d) if d.len() == 2)));
    }

    #[test]
    fn classify_examples() {
        let c = Formula::Top.classify();
        assert_eq!(c, FormulaClass { closed: true, qualitative: true, modal_only: true, modal_depth: 0 });
        let c = parse("mu X.([a](X))").classify();
        assert!(c.closed && c.qualitative && !c.modal_only);
        assert!(!parse("1/2*T + 1/2*T").classify().qualitative);
        assert!(Formula::bottom().classify().qualitative);
    }

    #[test]
    fn fnd_examples() {
        assert_eq!(parse("nu X. mu Y. ([a](X) | [b](Y))").fnd(), 2);
        assert_eq!(parse("[a](T)").fnd(), 0);
        assert_eq!(parse("[a](mu X.([a](X)))").fnd(), 1);
    }

    #[test]
    fn substitute_examples() {
        let f = parse("[a](X)");
        assert_eq!(f.substitute("X", &Formula::bottom()), parse("[a](F)"));
        assert_eq!(Formula::Top.substitute("X", &f), Formula::Top);
        let bound = parse("mu X.[a](X)");
        assert_eq!(bound.substitute("X", &Formula::Top), bound);
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = parse("mu Y. [a](X) | [b](Y)");
        let out = f.substitute("X", &Formula::var("Y"));
        let Formula::Mu(y, body) = &out else { panic!() };
        assert_ne!(y, "Y");
        assert_eq!(out.free_vars(), BTreeSet::from(["Y".to_string()]));
        let Formula::Modal(d) = &**body else { panic!() };
        assert_eq!(d["a"], vec![Formula::var("Y")]);
        assert_eq!(d["b"], vec![Formula::var(y.clone())]);
    }

    #[test]
    fn unroll_examples() {
        assert_eq!(parse("mu X.[a](X)").unroll(0), Formula::bottom());
        assert_eq!(parse("nu X.[a](X)").unroll(2), parse("[a]([a](T))"));
        // inner μ first (one step from ⊥), then outer ν one step from ⊤
        let nested = parse("nu X. mu Y.([a](X) | [b](Y))");
        let inner = parse("[a](X) | [b](Y)").substitute("Y", &Formula::bottom());
        assert_eq!(inner, parse("[a](X) | [b](F)"));
        let outer = inner.substitute("X", &Formula::Top);
        assert_eq!(nested.unroll(1), outer);
        assert_eq!(nested.unroll(1), parse("[a](T) | [b](F)"));
    }

    #[test]
    fn alpha_renames_shadowing() {
        let f = parse("mu X. [a](X) | [b](nu X. [c](X))");
        let Formula::Mu(_, body) = &f else { panic!() };
        let Formula::Modal(d) = &**body else { panic!() };
        let Formula::Nu(inner, _) = &d["b"][0] else { panic!() };
        assert_eq!(inner, "X_1");
        // siblings may reuse a name
        let g = parse("[l](mu X.[a](X), mu X.[b](X))");
        let Formula::Modal(d) = &g else { panic!() };
        assert!(matches!(&d["l"][1], Formula::Mu(x, _) if x == "X"));
    }

    #[test]
    fn render_round_trips() {
        for s in [
            "mu X. [a](T) | [b](X) | [c](X)",
            "1/2*[a](T) + 1/4*(mu Y. [b](Y))",
            "nu X. mu Y. [a](X) | [b](Y)",
            "[l]([*], 1/3*T + 2/3*F)",
            "F",
        ] {
            let f = parse(s);
            assert_eq!(parse(&f.to_string()), f, "{s}");
        }
    }
}
