//! Path-based semantics by brute force: uniform-depth path fragments, the
//! measure of their cylinders, satisfaction of modal formulas on fragments,
//! and a cross-check of the step-wise evaluator against it.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::eval::{eval, nu_extent, Certificate, EvalConfig, EvalError, Predicate};
use crate::logic::{Formula, FormulaError};
use crate::model::{LabelId, Model, StateId};
use crate::semiring::{Distance, Semiring, Value};

/// A finite path prefix: states annotated with the label taken and the
/// successor subtrees. `StateLeaf`s sit at the cut depth; nullary nodes may
/// end a branch earlier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathFragment {
    StateLeaf(StateId),
    Node(StateId, LabelId, Vec<Arc<PathFragment>>),
}

impl PathFragment {
    pub fn root(&self) -> StateId {
        match self {
            PathFragment::StateLeaf(c) | PathFragment::Node(c, _, _) => *c,
        }
    }

    pub fn display<'a>(&'a self, model: &'a Model) -> impl fmt::Display + 'a {
        DisplayFragment { q: self, model }
    }
}

struct DisplayFragment<'a> {
    q: &'a PathFragment,
    model: &'a Model,
}

impl fmt::Display for DisplayFragment<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.q {
            PathFragment::StateLeaf(c) => write!(f, "{}", self.model.state_name(*c)),
            PathFragment::Node(c, l, ch) => {
                write!(f, "({} {}", self.model.state_name(*c), self.model.signature().label(*l).name)?;
                for q in ch {
                    write!(f, " {}", DisplayFragment { q, model: self.model })?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{count} path fragments exceed the enumeration cap {cap}")]
    Sizing { count: u128, cap: u128 },
    #[error("no transition from `{state}` with label `{label}` to the given successors")]
    UnknownTransition { state: String, label: String },
    #[error("formula is deeper than the path fragment")]
    DepthExceeded,
    #[error("the path oracle needs a formula without variables or fixpoints")]
    NotModalOnly,
    #[error("the path oracle needs a qualitative formula (no weighted sums)")]
    NotQualitative,
    #[error("sum of cylinder measures undefined at state `{0}`")]
    UndefinedSum(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Number of uniform-depth-`depth` fragments from each state, saturating.
pub fn count_fragments(model: &Model, depth: usize) -> Vec<u128> {
    let mut n = vec![1u128; model.num_states()];
    for _ in 0..depth {
        n = model
            .states()
            .map(|c| {
                model.transitions(c).iter().fold(0u128, |acc, t| {
                    let prod = t.successors.iter().fold(1u128, |p, &s| p.saturating_mul(n[s]));
                    acc.saturating_add(prod)
                })
            })
            .collect();
    }
    n
}

/// All uniform-depth-`depth` fragments from `c`, in transition order.
pub fn enum_fragments(
    model: &Model,
    c: StateId,
    depth: usize,
    cap: u128,
) -> Result<Vec<Arc<PathFragment>>, OracleError> {
    let count = count_fragments(model, depth)[c];
    if count > cap {
        return Err(OracleError::Sizing { count, cap });
    }
    let mut memo = HashMap::new();
    Ok(fragments(model, c, depth, &mut memo))
}

type Memo = HashMap<(StateId, usize), Vec<Arc<PathFragment>>>;

fn fragments(model: &Model, c: StateId, depth: usize, memo: &mut Memo) -> Vec<Arc<PathFragment>> {
    if let Some(v) = memo.get(&(c, depth)) {
        return v.clone();
    }
    let out = if depth == 0 {
        vec![Arc::new(PathFragment::StateLeaf(c))]
    } else {
        let mut out = Vec::new();
        for t in model.transitions(c) {
            let mut combos: Vec<Vec<Arc<PathFragment>>> = vec![Vec::new()];
            for &s in &t.successors {
                let subs = fragments(model, s, depth - 1, memo);
                combos = combos
                    .into_iter()
                    .flat_map(|prefix| {
                        subs.iter().map(move |q| {
                            let mut p = prefix.clone();
                            p.push(q.clone());
                            p
                        })
                    })
                    .collect();
            }
            out.extend(combos.into_iter().map(|ch| Arc::new(PathFragment::Node(c, t.label, ch))));
        }
        out
    };
    memo.insert((c, depth), out.clone());
    out
}

/// Cylinder measure with the ν-extent computed once.
pub struct PathMeasure<'a> {
    model: &'a Model,
    extent: Predicate,
    certificate: Certificate,
}

impl<'a> PathMeasure<'a> {
    pub fn new(model: &'a Model, config: &EvalConfig) -> Result<Self, OracleError> {
        let ext = nu_extent(model, config)?;
        Ok(PathMeasure { model, extent: ext.values, certificate: ext.certificate })
    }

    pub fn extent(&self) -> &Predicate {
        &self.extent
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// `StateLeaf(c) ↦ ext(c)`; `Node(c, λ, q̄) ↦ (w • Π measure(qⱼ)) ⊘ ρ(c)`
    /// with `w` the weight of the transition `c —λ→ roots(q̄)`.
    pub fn measure(&self, q: &PathFragment) -> Result<Value, OracleError> {
        let sr = self.model.semiring();
        match q {
            PathFragment::StateLeaf(c) => Ok(self.extent[*c].clone()),
            PathFragment::Node(c, label, ch) => {
                let roots: Vec<StateId> = ch.iter().map(|q| q.root()).collect();
                let t =
                    self.model.transitions(*c).iter().find(|t| t.label == *label && t.successors == roots).ok_or_else(
                        || OracleError::UnknownTransition {
                            state: self.model.state_name(*c).into(),
                            label: self.model.signature().label(*label).name.clone(),
                        },
                    )?;
                let mut v = t.weight.clone();
                for q in ch {
                    v = sr.times(&v, &self.measure(q)?);
                }
                Ok(sr.oslash(&v, self.model.offset(*c)))
            }
        }
    }
}

pub fn cyl_measure(model: &Model, q: &PathFragment, config: &EvalConfig) -> Result<Value, OracleError> {
    PathMeasure::new(model, config)?.measure(q)
}

/// Satisfaction of a modal-only qualitative formula on a fragment.
pub fn frag_sat(model: &Model, q: &PathFragment, psi: &Formula) -> Result<bool, OracleError> {
    match psi {
        Formula::Top => Ok(true),
        Formula::Sum(terms) if terms.is_empty() => Ok(false),
        Formula::Sum(_) => Err(OracleError::NotQualitative),
        Formula::Var(_) | Formula::Mu(..) | Formula::Nu(..) => Err(OracleError::NotModalOnly),
        Formula::Modal(d) => match q {
            PathFragment::StateLeaf(_) => Err(OracleError::DepthExceeded),
            PathFragment::Node(_, label, ch) => match d.get(&model.signature().label(*label).name) {
                None => Ok(false),
                Some(args) => {
                    for (q, a) in ch.iter().zip(args) {
                        if !frag_sat(model, q, a)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
            },
        },
    }
}

fn require_oracle_formula(psi: &Formula) -> Result<(), OracleError> {
    let class = psi.classify();
    if !class.modal_only {
        return Err(OracleError::NotModalOnly);
    }
    if !class.qualitative {
        return Err(OracleError::NotQualitative);
    }
    Ok(())
}

impl PathMeasure<'_> {
    /// `Σ` of the measures of the depth-`depth` fragments from `c` satisfying `psi`.
    pub fn oracle_eval(&self, psi: &Formula, c: StateId, depth: usize, cap: u128) -> Result<Value, OracleError> {
        require_oracle_formula(psi)?;
        if psi.modal_depth() > depth {
            return Err(OracleError::DepthExceeded);
        }
        let sr = self.model.semiring();
        let mut acc = sr.zero();
        for q in enum_fragments(self.model, c, depth, cap)? {
            if frag_sat(self.model, &q, psi)? {
                acc = sr
                    .plus(&acc, &self.measure(&q)?)
                    .ok_or_else(|| OracleError::UndefinedSum(self.model.state_name(c).into()))?;
            }
        }
        Ok(acc)
    }
}

pub fn oracle_eval(
    model: &Model,
    psi: &Formula,
    c: StateId,
    depth: usize,
    config: &EvalConfig,
    cap: u128,
) -> Result<Value, OracleError> {
    psi.check(model.signature(), model.semiring())?;
    PathMeasure::new(model, config)?.oracle_eval(psi, c, depth, cap)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateComparison {
    pub state: String,
    pub stepwise: Value,
    pub oracle: Value,
    pub difference: Distance,
    pub agree: bool,
    /// Distance between the fixpoint formula and its unrolling (diagnostic).
    pub approximant_distance: Distance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub formula: String,
    pub unrolled: String,
    pub k: usize,
    pub depth: usize,
    pub tolerance: Distance,
    pub max_discrepancy: Distance,
    pub agree: bool,
    pub certificate: Certificate,
    pub states: Vec<StateComparison>,
}

/// Tolerance for comparing two sides that both read the ε-converged extent
/// at depth-`depth` leaves: `δ · Σ_{i=1}^{depth+1} Aⁱ` with `δ` the last
/// Kleene change and `A = max(1, max arity)`. Zero for the exact carriers.
pub fn tolerance(model: &Model, certificate: &Certificate, depth: usize) -> Distance {
    if model.semiring() != Semiring::Probabilistic {
        return Distance::zero();
    }
    let Distance::Finite(delta) = &certificate.last_delta else {
        return Distance::Infinite;
    };
    let a = BigInt::from(model.signature().max_arity().max(1));
    let factor: BigInt = (1..=depth + 1).map(|i| a.pow(i as u32)).sum();
    Distance::Finite(delta * BigRational::from_integer(factor))
}

/// Evaluates `unroll(phi, k)` step-wise and through the path oracle at every
/// state and reports the largest discrepancy.
pub fn compare_semantics(
    model: &Model,
    phi: &Formula,
    k: usize,
    config: &EvalConfig,
    cap: u128,
) -> Result<ComparisonReport, OracleError> {
    phi.check(model.signature(), model.semiring())?;
    phi.require_closed()?;
    if !phi.classify().qualitative {
        return Err(OracleError::NotQualitative);
    }
    let psi = phi.unroll(k);
    let depth = psi.modal_depth();
    let sr = model.semiring();
    let measure = PathMeasure::new(model, config)?;
    let stepwise = eval(model, &psi, config)?;
    let limit = eval(model, phi, config)?;
    let mut certificate = stepwise.certificate.clone();
    certificate.absorb(measure.certificate());
    let tol = tolerance(model, &certificate, depth);
    let mut states = Vec::new();
    for c in model.states() {
        let oracle = measure.oracle_eval(&psi, c, depth, cap)?;
        let difference = sr.distance(&stepwise.values[c], &oracle);
        states.push(StateComparison {
            state: model.state_name(c).into(),
            stepwise: stepwise.values[c].clone(),
            agree: difference <= tol,
            oracle,
            difference,
            approximant_distance: sr.distance(&stepwise.values[c], &limit.values[c]),
        });
    }
    let max_discrepancy = states.iter().map(|s| s.difference.clone()).max().unwrap_or_else(Distance::zero);
    Ok(ComparisonReport {
        formula: phi.to_string(),
        unrolled: psi.to_string(),
        k,
        depth,
        agree: states.iter().all(|s| s.agree),
        tolerance: tol,
        max_discrepancy,
        certificate,
        states,
    })
}
