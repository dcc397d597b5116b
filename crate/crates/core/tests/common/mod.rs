//! Shared generators and checks for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use linmu::{parse_model, Formula, Model, ModelBuilder, Semiring, Value};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join("models")
}

/// Every corpus model as `(file name, model)`, sorted by name.
pub fn corpus() -> Vec<(String, Model)> {
    let mut paths: Vec<PathBuf> = fs::read_dir(models_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "model"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let model = parse_model(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, model)
        })
        .collect()
}

pub fn load(name: &str) -> Model {
    let text = fs::read_to_string(models_dir().join(name)).unwrap();
    parse_model(&text).unwrap()
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub const SEMIRINGS: [Semiring; 4] =
    [Semiring::Boolean, Semiring::Probabilistic, Semiring::Tropical, Semiring::BoundedTropical { bound: 5 }];

/// A random carrier element. Probabilistic values have small denominators so
/// sums are defined often but not always.
pub fn random_value(sr: Semiring, rng: &mut StdRng) -> Value {
    match sr {
        Semiring::Boolean => Value::Bool(rng.gen()),
        Semiring::Probabilistic => {
            let d = rng.gen_range(1..=12);
            Value::prob(rng.gen_range(0..=d), d)
        }
        Semiring::Tropical => {
            if rng.gen_ratio(1, 8) {
                Value::INFINITY
            } else {
                Value::cost(rng.gen_range(0..=20))
            }
        }
        Semiring::BoundedTropical { .. } => sr.carrier().unwrap().choose(rng).unwrap().clone(),
    }
}

fn random_weight(sr: Semiring, rng: &mut StdRng) -> Value {
    loop {
        let v = random_value(sr, rng);
        if !sr.is_zero(&v) {
            return v;
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ModelShape {
    pub max_states: usize,
    pub max_labels: usize,
    pub max_arity: usize,
    pub max_transitions: usize,
    pub offsets: bool,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape { max_states: 5, max_labels: 4, max_arity: 2, max_transitions: 3, offsets: true }
    }
}

/// A random valid model. Probabilistic models are plain and each state's
/// outgoing mass is 1, 3/4 or 1/2 (or 0 for a deadlock). Offsets are only
/// drawn for the other semirings.
pub fn random_model(sr: Semiring, shape: ModelShape, rng: &mut StdRng) -> Model {
    let mut b = ModelBuilder::new(sr);
    let nl = rng.gen_range(1..=shape.max_labels);
    let labels: Vec<(String, usize)> = (0..nl).map(|i| (format!("l{i}"), rng.gen_range(0..=shape.max_arity))).collect();
    for (name, arity) in &labels {
        b.label(name.clone(), *arity);
    }
    let n = rng.gen_range(1..=shape.max_states);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    for s in &states {
        b.state(s.clone());
    }
    for s in &states {
        let k = rng.gen_range(0..=shape.max_transitions);
        let mut picks = Vec::new();
        for _ in 0..k {
            let (label, arity) = labels.choose(rng).unwrap();
            let succ: Vec<&str> = (0..*arity).map(|_| states.choose(rng).unwrap().as_str()).collect();
            picks.push((label.clone(), succ));
        }
        if sr == Semiring::Probabilistic {
            let raw: Vec<i64> = picks.iter().map(|_| rng.gen_range(1..=4)).collect();
            let total: i64 = raw.iter().sum();
            let mass = [rat(1, 1), rat(3, 4), rat(1, 2)].choose(rng).unwrap().clone();
            for ((label, succ), r) in picks.iter().zip(&raw) {
                let w = &mass * rat(*r, total);
                b.transition(s, Value::Prob(w), label, succ);
            }
        } else {
            for (label, succ) in &picks {
                b.transition(s, random_weight(sr, rng), label, succ);
            }
        }
        if shape.offsets && sr != Semiring::Probabilistic && rng.gen_ratio(1, 3) {
            b.offset(s, random_value(sr, rng));
        }
    }
    b.build().expect("generated models are valid")
}

/// A random closed formula over the model's signature with fixpoint nesting
/// depth `≤ max_fnd` and size `≤ max_size`. Qualitative formulas use no
/// weighted sums.
pub fn random_formula(model: &Model, qualitative: bool, max_fnd: usize, max_size: usize, rng: &mut StdRng) -> Formula {
    loop {
        let f = gen(model, qualitative, max_fnd, &mut Vec::new(), 4, rng);
        if f.size() <= max_size && f.fnd() <= max_fnd && f.is_closed() {
            return f;
        }
    }
}

/// A random formula whose only free variable is `var`.
pub fn random_open_formula(model: &Model, var: &str, max_size: usize, rng: &mut StdRng) -> Formula {
    loop {
        let f = gen(model, false, 1, &mut vec![var.to_string()], 3, rng);
        if f.size() <= max_size && f.free_vars().iter().all(|v| v == var) {
            return f;
        }
    }
}

/// Disjoint union of `m` with a copy whose states are suffixed `'`. Copied
/// transitions lead into the copy or, when `mix` says so, back into the
/// original; either way each state is bisimilar to its copy.
pub fn with_copy(m: &Model, mut mix: impl FnMut() -> bool) -> Model {
    let sr = m.semiring();
    let mut b = ModelBuilder::new(sr);
    for l in m.signature().labels() {
        b.label(l.name.clone(), l.arity);
    }
    let names: Vec<String> = m.state_names().to_vec();
    let primed: Vec<String> = names.iter().map(|n| format!("{n}'")).collect();
    for n in names.iter().chain(&primed) {
        b.state(n.clone());
    }
    for c in m.states() {
        for t in m.transitions(c) {
            let label = &m.signature().label(t.label).name;
            let orig: Vec<&str> = t.successors.iter().map(|&s| names[s].as_str()).collect();
            let copy: Vec<&str> =
                t.successors.iter().map(|&s| if mix() { names[s].as_str() } else { primed[s].as_str() }).collect();
            b.transition(&names[c], t.weight.clone(), label, &orig);
            b.transition(&primed[c], t.weight.clone(), label, &copy);
        }
        if *m.offset(c) != sr.one() {
            b.offset(&names[c], m.offset(c).clone());
            b.offset(&primed[c], m.offset(c).clone());
        }
    }
    b.build().unwrap()
}

fn gen(
    model: &Model,
    qualitative: bool,
    fnd: usize,
    scope: &mut Vec<String>,
    budget: usize,
    rng: &mut StdRng,
) -> Formula {
    let sr = model.semiring();
    let leaf = |scope: &Vec<String>, rng: &mut StdRng| -> Formula {
        match rng.gen_range(0..3) {
            0 => Formula::Top,
            1 if !scope.is_empty() => Formula::var(scope.choose(rng).unwrap().clone()),
            _ => Formula::bottom(),
        }
    };
    if budget == 0 {
        return leaf(scope, rng);
    }
    match rng.gen_range(0..10) {
        0 | 1 => leaf(scope, rng),
        2..=5 => {
            let labels = model.signature().labels();
            let count = rng.gen_range(1..=labels.len().min(2));
            let mut map = BTreeMap::new();
            for l in labels.choose_multiple(rng, count) {
                let args = (0..l.arity).map(|_| gen(model, qualitative, fnd, scope, budget - 1, rng)).collect();
                map.insert(l.name.clone(), args);
            }
            Formula::Modal(map)
        }
        6 if !qualitative => {
            let terms = (0..rng.gen_range(1..=2))
                .map(|_| (random_value(sr, rng), gen(model, qualitative, fnd, scope, budget - 1, rng)))
                .collect::<Vec<_>>();
            // keep coefficient sums defined
            if sr.sum(terms.iter().map(|(c, _)| c)).is_some() {
                Formula::Sum(terms)
            } else {
                Formula::Sum(terms.into_iter().take(1).collect())
            }
        }
        _ if fnd > 0 => {
            let v = format!("X{}", scope.len());
            scope.push(v.clone());
            let body = gen(model, qualitative, fnd - 1, scope, budget - 1, rng);
            scope.pop();
            if rng.gen() {
                Formula::mu(v, body)
            } else {
                Formula::nu(v, body)
            }
        }
        _ => leaf(scope, rng),
    }
}

/// Each check returns a description of the first violation.
pub type Check = Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// Commutativity, associativity, units, annihilation, distributivity,
/// definedness closure, order laws and monotonicity on one draw.
pub fn semiring_axioms(sr: Semiring, a: &Value, b: &Value, c: &Value, d: &Value) -> Check {
    let zero = sr.zero();
    let one = sr.one();
    ensure(sr.plus(a, b) == sr.plus(b, a), || format!("plus not commutative on {a}, {b}"))?;
    ensure(sr.times(a, b) == sr.times(b, a), || format!("times not commutative on {a}, {b}"))?;
    let left = sr.plus(a, b).and_then(|ab| sr.plus(&ab, c));
    let right = sr.plus(b, c).and_then(|bc| sr.plus(a, &bc));
    ensure(left == right, || format!("plus not associative on {a}, {b}, {c}"))?;
    ensure(sr.times(&sr.times(a, b), c) == sr.times(a, &sr.times(b, c)), || {
        format!("times not associative on {a}, {b}, {c}")
    })?;
    ensure(sr.plus(a, &zero).as_ref() == Some(a), || format!("zero is not neutral for plus on {a}"))?;
    ensure(sr.times(a, &one) == *a, || format!("one is not neutral for times on {a}"))?;
    ensure(sr.times(a, &zero) == zero, || format!("zero does not annihilate {a}"))?;
    if let Some(bc) = sr.plus(b, c) {
        let lhs = sr.plus(&sr.times(a, b), &sr.times(a, c));
        ensure(lhs == Some(sr.times(a, &bc)), || format!("distributivity fails on {a}, {b}, {c}"))?;
    }
    if sr.plus(a, b).is_some() {
        ensure(sr.plus(&sr.times(a, c), &sr.times(b, d)).is_some(), || {
            format!("definedness closure fails on {a}, {b} scaled by {c}, {d}")
        })?;
    }
    ensure(sr.leq(a, a), || format!("leq not reflexive on {a}"))?;
    ensure(!(sr.leq(a, b) && sr.leq(b, a)) || a == b, || format!("leq not antisymmetric on {a}, {b}"))?;
    ensure(!(sr.leq(a, b) && sr.leq(b, c)) || sr.leq(a, c), || format!("leq not transitive on {a}, {b}, {c}"))?;
    ensure(sr.leq(&zero, a), || format!("zero is not below {a}"))?;
    ensure(sr.leq(a, &one), || format!("{a} is not below one"))?;
    // monotonicity with (a ⊑ a') and (b ⊑ b') where a' = a + c, b' = b + d when defined
    if let (Some(a2), Some(b2)) = (sr.plus(a, c), sr.plus(b, d)) {
        ensure(sr.leq(a, &a2) && sr.leq(b, &b2), || format!("plus not inflationary on {a}, {b}"))?;
        if let (Some(s1), Some(s2)) = (sr.plus(a, b), sr.plus(&a2, &b2)) {
            ensure(sr.leq(&s1, &s2), || format!("plus not monotone on {a}, {b}, {c}, {d}"))?;
        }
        ensure(sr.leq(&sr.times(a, b), &sr.times(&a2, &b2)), || format!("times not monotone on {a}, {b}, {c}, {d}"))?;
    }
    if sr.leq(a, b) && sr.leq(c, d) {
        ensure(sr.leq(&sr.times(a, c), &sr.times(b, d)), || format!("times not monotone on {a}, {b}, {c}, {d}"))?;
        if let (Some(s1), Some(s2)) = (sr.plus(a, c), sr.plus(b, d)) {
            ensure(sr.leq(&s1, &s2), || format!("plus not monotone on {a}, {b}, {c}, {d}"))?;
        }
    }
    ensure(sr.oslash(a, &one) == *a, || format!("{a} offset by one is not {a}"))?;
    Ok(())
}

/// The residuation law of `⊘` for `s`, `t` against the candidate set `us`:
/// if some `u` has `s ⊑ u • t`, then `s ⊑ (s ⊘ t) • t` and `s ⊘ t ⊑ u` for
/// every such `u`.
pub fn residuation(sr: Semiring, s: &Value, t: &Value, us: &[Value]) -> Check {
    let q = sr.oslash(s, t);
    ensure(sr.contains(&q), || format!("{s} ⊘ {t} = {q} leaves the carrier"))?;
    let mut any = false;
    for u in us.iter().filter(|u| sr.leq(s, &sr.times(u, t))) {
        any = true;
        ensure(sr.leq(&q, u), || format!("{s} ⊘ {t} = {q} is not below the witness {u}"))?;
    }
    if any {
        ensure(sr.leq(s, &sr.times(&q, t)), || format!("{s} is not below ({s} ⊘ {t}) • {t}"))?;
    }
    Ok(())
}

/// A finite grid standing in for the carrier of an infinite semiring.
pub fn grid(sr: Semiring) -> Vec<Value> {
    match sr {
        Semiring::Probabilistic => {
            let mut v: Vec<Value> = (1..=12).flat_map(|d| (0..=d).map(move |n| Value::prob(n, d))).collect();
            v.sort_by(|a, b| a.as_rational().cmp(&b.as_rational()));
            v.dedup();
            v
        }
        Semiring::Tropical => (0..=30).map(Value::cost).chain([Value::INFINITY]).collect(),
        _ => sr.carrier().unwrap(),
    }
}
