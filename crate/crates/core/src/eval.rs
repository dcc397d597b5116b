//! Step-wise semantics: structural recursion over formulas with Kleene
//! iteration at fixpoints, plus the dedicated ν-/μ-extent routines.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::logic::{Formula, FormulaError};
use crate::model::Model;
use crate::semiring::{Cost, Distance, Semiring, Value};

/// One value per state, indexed by [`StateId`](crate::model::StateId).
pub type Predicate = Vec<Value>;

/// Bindings for free variables, searched innermost (last) first.
pub type Valuation = Vec<(String, Predicate)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalConfig {
    /// Probabilistic stop threshold on the per-state change.
    pub epsilon: BigRational,
    pub max_iterations: usize,
    /// Tropical divergence cutoff; `None` derives it from model and formula.
    pub promote_bound: Option<u64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            epsilon: BigRational::new(BigInt::from(1), BigInt::from(1_000_000_000u64)),
            max_iterations: 1_000_000,
            promote_bound: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Least,
    Greatest,
}

/// Convergence record of one or more Kleene iterations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// Total operator applications.
    pub iterations: usize,
    /// Largest per-state change in the final step of any iteration.
    pub last_delta: Distance,
    /// Whether every chain was ⊑-monotone in its expected direction.
    pub monotone: bool,
}

impl Default for Certificate {
    fn default() -> Self {
        Certificate { iterations: 0, last_delta: Distance::zero(), monotone: true }
    }
}

impl Certificate {
    pub fn absorb(&mut self, other: &Certificate) {
        self.iterations += other.iterations;
        if other.last_delta > self.last_delta {
            self.last_delta = other.last_delta.clone();
        }
        self.monotone &= other.monotone;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub values: Predicate,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(
        "no convergence after {iterations} iterations; last two iterates: [{}] and [{}]",
        render(previous),
        render(last)
    )]
    NonConvergence { iterations: usize, previous: Predicate, last: Predicate },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("weighted sum undefined at state `{0}`")]
    UndefinedSum(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

fn render(p: &[Value]) -> String {
    p.iter().map(Value::to_string).collect::<Vec<_>>().join(", ")
}

/// Default tropical promotion bound:
/// `|C| · (1 + w) · (1 + size) · max(1, max arity)^|C|`, saturating, where
/// `w` is the largest finite transition weight or formula coefficient.
///
/// The arity factor covers branching models, where a finite value may sum
/// the weights of exponentially many paths of a tree.
pub fn default_promote_bound(model: &Model, formula: &Formula) -> u64 {
    let w = model.max_finite_cost().max(max_coefficient(formula));
    let n = model.num_states() as u64;
    let branching = (model.signature().max_arity().max(1) as u64).saturating_pow(n.min(u32::MAX as u64) as u32);
    n.max(1).saturating_mul(w.saturating_add(1)).saturating_mul(formula.size() as u64 + 1).saturating_mul(branching)
}

fn max_coefficient(f: &Formula) -> u64 {
    match f {
        Formula::Top | Formula::Var(_) => 0,
        Formula::Sum(terms) => terms
            .iter()
            .map(|(c, g)| c.as_cost().and_then(Cost::finite).unwrap_or(0).max(max_coefficient(g)))
            .max()
            .unwrap_or(0),
        Formula::Modal(d) => d.values().flatten().map(max_coefficient).max().unwrap_or(0),
        Formula::Mu(_, b) | Formula::Nu(_, b) => max_coefficient(b),
    }
}

/// Kleene iteration of `step` from `start`.
///
/// Stops on exact stabilisation; on the probabilistic instance also once
/// every state changes by less than `epsilon`. On the (unbounded) tropical
/// instance a state whose value numerically increases past `promote_bound`
/// is set to `∞` and kept there, so that a neighbour still on its way up
/// cannot pull it back.
pub fn kleene(
    semiring: Semiring,
    start: Predicate,
    direction: Direction,
    config: &EvalConfig,
    promote_bound: u64,
    mut step: impl FnMut(&Predicate) -> Result<Predicate, EvalError>,
) -> Result<Evaluation, EvalError> {
    let mut cert = Certificate::default();
    let mut previous: Option<Predicate> = None;
    let mut promoted = vec![false; start.len()];
    let mut current = start;
    loop {
        if cert.iterations >= config.max_iterations {
            return Err(EvalError::NonConvergence {
                iterations: cert.iterations,
                previous: previous.unwrap_or_else(|| current.clone()),
                last: current,
            });
        }
        let mut next = step(&current)?;
        cert.iterations += 1;
        if semiring == Semiring::Tropical {
            for ((n, c), p) in next.iter_mut().zip(&current).zip(promoted.iter_mut()) {
                if let (Value::Cost(Cost::Finite(a)), Value::Cost(Cost::Finite(b))) = (&*n, c) {
                    *p |= a > b && *a > promote_bound;
                }
                if *p {
                    *n = Value::INFINITY;
                }
            }
        }
        if semiring == Semiring::Probabilistic {
            for (n, c) in next.iter_mut().zip(&current) {
                *n = round_outward(n, c, direction);
            }
        }
        let monotone = current.iter().zip(&next).all(|(c, n)| match direction {
            Direction::Least => semiring.leq(c, n),
            Direction::Greatest => semiring.leq(n, c),
        });
        cert.monotone &= monotone;
        let delta =
            current.iter().zip(&next).map(|(c, n)| semiring.distance(c, n)).max().unwrap_or_else(Distance::zero);
        if next == current {
            cert.last_delta = delta;
            return Ok(Evaluation { values: next, certificate: cert });
        }
        if let (Semiring::Probabilistic, Distance::Finite(d)) = (semiring, &delta) {
            if *d < config.epsilon {
                if cert.monotone {
                    if let Some(p) = snap(&next, direction, &(d * BigRational::from_integer(SNAP_WINDOW.into()))) {
                        cert.iterations += 1;
                        if step(&p)? == p {
                            cert.last_delta = Distance::zero();
                            return Ok(Evaluation { values: p, certificate: cert });
                        }
                    }
                }
                cert.last_delta = delta;
                return Ok(Evaluation { values: next, certificate: cert });
            }
        }
        cert.last_delta = delta;
        previous = Some(std::mem::replace(&mut current, next));
    }
}

/// Denominator size, in bits, above which probabilistic iterates are rounded.
const ROUND_ABOVE_BITS: u64 = 256;
/// Rounding grid `2^-GRID_BITS`.
const GRID_BITS: usize = 192;

/// Keeps iterate sizes bounded on branching models, where exact products
/// double the denominator size every step. Rounds towards the start of the
/// chain (down for least, up for greatest fixpoints) and never past the
/// previous iterate, so the chain stays on its side of the limit.
fn round_outward(next: &Value, current: &Value, direction: Direction) -> Value {
    let (Value::Prob(r), Value::Prob(c)) = (next, current) else { return next.clone() };
    if r.denom().bits() <= ROUND_ABOVE_BITS {
        return next.clone();
    }
    let scale = BigRational::from_integer(BigInt::one() << GRID_BITS);
    let scaled = r * &scale;
    let rounded = match direction {
        Direction::Least => scaled.floor() / &scale,
        Direction::Greatest => scaled.ceil() / &scale,
    };
    Value::Prob(match direction {
        Direction::Least if rounded < *c && c <= r => c.clone(),
        Direction::Greatest if rounded > *c && c >= r => c.clone(),
        _ => rounded,
    })
}

/// Width of the snapping window, in multiples of the last Kleene change.
const SNAP_WINDOW: u32 = 1000;

/// Simplest rationals in the window of width `eta` beyond each state of an
/// ε-converged iterate, on the side the chain was heading. If the operator
/// fixes them exactly they form a fixpoint that, together with the iterate,
/// brackets the limit of the chain.
fn snap(p: &Predicate, direction: Direction, eta: &BigRational) -> Option<Predicate> {
    let (zero, one) = (BigRational::zero(), BigRational::one());
    p.iter()
        .map(|v| {
            let r = v.as_rational()?;
            let (lo, hi) = match direction {
                Direction::Least => (r.clone(), (r + eta).min(one.clone())),
                Direction::Greatest => ((r - eta).max(zero.clone()), r.clone()),
            };
            Some(Value::Prob(simplest_between(&lo, &hi)))
        })
        .collect()
}

/// The rational with the smallest denominator in `[lo, hi]`, `0 ≤ lo ≤ hi`.
fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if fl.clone() + BigRational::one() <= *hi {
        return fl + BigRational::one();
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Applies the offsetted modal clause at every state: for each state `c`,
/// `(Σ w • Π args(λ)ⱼ(cⱼ)) ⊘ ρ(c)` over the transitions whose label has
/// arguments in `args` (indexed by label id).
fn modal_step(model: &Model, args: &[Option<Vec<&Predicate>>]) -> Result<Predicate, EvalError> {
    let sr = model.semiring();
    model
        .states()
        .map(|c| {
            let mut acc = sr.zero();
            for t in model.transitions(c) {
                let Some(preds) = &args[t.label] else { continue };
                let term = t.successors.iter().zip(preds).fold(t.weight.clone(), |v, (&s, p)| sr.times(&v, &p[s]));
                acc = sr.plus(&acc, &term).ok_or_else(|| EvalError::UndefinedSum(model.state_name(c).into()))?;
            }
            Ok(sr.oslash(&acc, model.offset(c)))
        })
        .collect()
}

fn extent(model: &Model, config: &EvalConfig, direction: Direction) -> Result<Evaluation, EvalError> {
    let sr = model.semiring();
    let seed = match direction {
        Direction::Greatest => sr.one(),
        Direction::Least => sr.zero(),
    };
    let bound = config.promote_bound.unwrap_or_else(|| default_promote_bound(model, &Formula::Top));
    let labels = model.signature().labels();
    kleene(sr, vec![seed; model.num_states()], direction, config, bound, |p| {
        let args: Vec<_> = labels.iter().map(|l| Some(vec![p; l.arity])).collect();
        modal_step(model, &args)
    })
}

/// Greatest fixpoint of the extent operator, seeded at the constant one.
pub fn nu_extent(model: &Model, config: &EvalConfig) -> Result<Evaluation, EvalError> {
    extent(model, config, Direction::Greatest)
}

/// Least fixpoint of the extent operator, seeded at the constant zero.
pub fn mu_extent(model: &Model, config: &EvalConfig) -> Result<Evaluation, EvalError> {
    extent(model, config, Direction::Least)
}

/// Evaluates a closed formula.
pub fn eval(model: &Model, formula: &Formula, config: &EvalConfig) -> Result<Evaluation, EvalError> {
    eval_with(model, formula, &Vec::new(), config)
}

/// Evaluates a formula whose free variables are bound by `valuation`.
pub fn eval_with(
    model: &Model,
    formula: &Formula,
    valuation: &Valuation,
    config: &EvalConfig,
) -> Result<Evaluation, EvalError> {
    formula.check(model.signature(), model.semiring())?;
    let mut ev = Evaluator {
        model,
        config,
        bound: config.promote_bound.unwrap_or_else(|| default_promote_bound(model, formula)),
        top: None,
        cert: Certificate::default(),
    };
    let mut env = valuation.clone();
    let values = ev.eval(formula, &mut env)?;
    Ok(Evaluation { values, certificate: ev.cert })
}

/// Name bound by the formula-level greatest fixpoint that interprets `⊤`.
/// Not lexable, so it cannot clash with a user variable.
const TOP_VAR: &str = "%top";

struct Evaluator<'a> {
    model: &'a Model,
    config: &'a EvalConfig,
    bound: u64,
    top: Option<Predicate>,
    cert: Certificate,
}

impl Evaluator<'_> {
    /// `⟦⊤⟧`, computed as the formula `ν%top. ⋁_λ [λ](%top, …)` from the
    /// constant one rather than through [`nu_extent`].
    fn top(&mut self) -> Result<Predicate, EvalError> {
        if let Some(t) = &self.top {
            return Ok(t.clone());
        }
        let all = Formula::Modal(
            self.model
                .signature()
                .labels()
                .iter()
                .map(|l| (l.name.clone(), vec![Formula::var(TOP_VAR); l.arity]))
                .collect(),
        );
        let seed = vec![self.model.semiring().one(); self.model.num_states()];
        let t = self.fixpoint(TOP_VAR, &all, seed, Direction::Greatest, &mut Vec::new())?;
        self.top = Some(t.clone());
        Ok(t)
    }

    fn fixpoint(
        &mut self,
        var: &str,
        body: &Formula,
        seed: Predicate,
        direction: Direction,
        env: &mut Valuation,
    ) -> Result<Predicate, EvalError> {
        let (sr, config, bound) = (self.model.semiring(), self.config, self.bound);
        let result = kleene(sr, seed, direction, config, bound, |p| {
            env.push((var.to_string(), p.clone()));
            let r = self.eval(body, env);
            env.pop();
            r
        })?;
        self.cert.absorb(&result.certificate);
        Ok(result.values)
    }

    fn eval(&mut self, f: &Formula, env: &mut Valuation) -> Result<Predicate, EvalError> {
        let sr = self.model.semiring();
        match f {
            Formula::Top => self.top(),
            Formula::Var(x) => env
                .iter()
                .rev()
                .find(|(name, _)| name == x)
                .map(|(_, p)| p.clone())
                .ok_or_else(|| EvalError::UnboundVariable(x.clone())),
            Formula::Sum(terms) => {
                let mut acc = vec![sr.zero(); self.model.num_states()];
                for (coef, g) in terms {
                    let p = self.eval(g, env)?;
                    for (c, (a, v)) in acc.iter_mut().zip(&p).enumerate() {
                        *a = sr
                            .plus(a, &sr.times(coef, v))
                            .ok_or_else(|| EvalError::UndefinedSum(self.model.state_name(c).into()))?;
                    }
                }
                Ok(acc)
            }
            Formula::Modal(d) => {
                let sig = self.model.signature();
                let mut evaluated: Vec<Option<Vec<Predicate>>> = vec![None; sig.len()];
                for (label, args) in d {
                    let id = sig.lookup(label).ok_or_else(|| FormulaError::UnknownLabel(label.clone()))?;
                    evaluated[id] = Some(args.iter().map(|a| self.eval(a, env)).collect::<Result<_, _>>()?);
                }
                let refs: Vec<Option<Vec<&Predicate>>> =
                    evaluated.iter().map(|o| o.as_ref().map(|v| v.iter().collect())).collect();
                modal_step(self.model, &refs)
            }
            Formula::Mu(x, b) => {
                let seed = vec![sr.zero(); self.model.num_states()];
                self.fixpoint(x, b, seed, Direction::Least, env)
            }
            Formula::Nu(x, b) => {
                let seed = self.top()?;
                self.fixpoint(x, b, seed, Direction::Greatest, env)
            }
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "iterations={} last_delta={} monotone={}", self.iterations, self.last_delta, self.monotone)
    }
}
