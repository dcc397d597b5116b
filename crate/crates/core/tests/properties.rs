//! Semantic invariants on randomly generated models and formulas.

mod common;

use common::{
    random_formula, random_model, random_open_formula, random_value, residuation, semiring_axioms, with_copy,
    ModelShape,
};
use linmu::eval::{eval_with, EvalConfig, Predicate};
use linmu::oracle::{self, PathMeasure};
use linmu::semiring::Distance;
use linmu::traces::{
    enumerate_fragments, equiv_upto, finite_tr, lt_all, parse_fragment, tr_approx, EquivKind, TraceFragment,
};
use linmu::{eval, nu_extent, parse_formula, parse_model, Formula, Model, Semiring, Value};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn cfg() -> EvalConfig {
    EvalConfig::default()
}

fn exact() -> impl Strategy<Value = Semiring> {
    prop_oneof![
        Just(Semiring::Boolean),
        Just(Semiring::Tropical),
        (1u64..=6).prop_map(|b| Semiring::BoundedTropical { bound: b }),
    ]
}

fn any_semiring() -> impl Strategy<Value = Semiring> {
    prop_oneof![exact(), Just(Semiring::Probabilistic)]
}

fn small() -> ModelShape {
    ModelShape { max_states: 3, max_labels: 3, max_arity: 2, max_transitions: 3, offsets: true }
}

fn close(sr: Semiring, a: &Value, b: &Value) -> bool {
    match sr.distance(a, b) {
        Distance::Finite(d) => d <= BigRational::new(1.into(), 1_000_000_000.into()),
        Distance::Infinite => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn semiring_laws(sr in any_semiring(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let [a, b, c, d] = std::array::from_fn(|_| random_value(sr, &mut rng));
        prop_assert_eq!(semiring_axioms(sr, &a, &b, &c, &d), Ok(()));
        prop_assert_eq!(residuation(sr, &a, &b, &common::grid(sr)), Ok(()));
    }

    #[test]
    fn scalars_round_trip(sr in any_semiring(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let v = random_value(sr, &mut rng);
        prop_assert_eq!(sr.parse_scalar(&v.to_string()), Ok(v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// Offsetting every state by one changes nothing.
    #[test]
    fn unit_offsets_are_neutral(sr in any_semiring(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_model(sr, ModelShape { offsets: false, ..small() }, &mut rng);
        let phi = random_formula(&m, false, 2, 12, &mut rng);
        let unit = m.with_offsets(vec![sr.one(); m.num_states()]);
        prop_assert_eq!(eval(&m, &phi, &cfg()).unwrap().values, eval(&unit, &phi, &cfg()).unwrap().values);
    }

    /// Formulas are monotone in the valuation of their free variable.
    #[test]
    fn valuation_monotone(sr in exact(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_model(sr, small(), &mut rng);
        let phi = random_open_formula(&m, "Z", 12, &mut rng);
        let p: Predicate = m.states().map(|_| random_value(sr, &mut rng)).collect();
        let q: Predicate = p
            .iter()
            .map(|v| {
                let w = random_value(sr, &mut rng);
                if sr.leq(v, &w) { w } else { v.clone() }
            })
            .collect();
        let lo = eval_with(&m, &phi, &vec![("Z".into(), p)], &cfg()).unwrap().values;
        let hi = eval_with(&m, &phi, &vec![("Z".into(), q)], &cfg()).unwrap().values;
        for c in m.states() {
            prop_assert!(sr.leq(&lo[c], &hi[c]), "{phi} at {}: {} vs {}", m.state_name(c), lo[c], hi[c]);
        }
    }

    /// On the boolean carrier the uniform approximants reach the fixpoint
    /// once `k` exceeds the height of the state lattice.
    #[test]
    fn boolean_approximants_converge(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_model(Semiring::Boolean, small(), &mut rng);
        let phi = random_formula(&m, true, 2, 8, &mut rng);
        let k = m.num_states() + 1;
        let psi = phi.unroll(k);
        prop_assume!(psi.size() < 200_000);
        prop_assert_eq!(eval(&m, &psi, &cfg()).unwrap().values, eval(&m, &phi, &cfg()).unwrap().values);
    }

    /// Each state and its copy in a disjoint union agree on every formula and
    /// are linear-time equivalent.
    #[test]
    fn bisimilar_copies_agree(sr in any_semiring(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_model(sr, small(), &mut rng);
        let u = with_copy(&m, || rng.gen());
        let mut rng = StdRng::seed_from_u64(seed ^ 1);
        let phi = random_formula(&m, false, 2, 12, &mut rng);
        let v = eval(&u, &phi, &cfg()).unwrap().values;
        let n = m.num_states();
        for c in 0..n {
            let ok = if sr == Semiring::Probabilistic { close(sr, &v[c], &v[c + n]) } else { v[c] == v[c + n] };
            prop_assert!(ok, "{phi} at {}: {} vs {}", m.state_name(c), v[c], v[c + n]);
            let lt = equiv_upto(&u, c, c + n, 2, EquivKind::Lt, &cfg(), 1_000_000).unwrap();
            prop_assert!(lt.equivalent, "{:?}", lt.witness);
            if u.is_plain() {
                let tr = equiv_upto(&u, c, c + n, 2, EquivKind::Tr, &cfg(), 1_000_000).unwrap();
                prop_assert!(tr.equivalent, "{:?}", tr.witness);
            }
        }
    }

    /// Linear-time equivalence implies finite-trace equivalence.
    #[test]
    fn lt_equivalence_implies_tr(sr in prop_oneof![Just(Semiring::Boolean), Just(Semiring::Probabilistic)], seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_model(sr, ModelShape { offsets: false, ..small() }, &mut rng);
        for c in m.states() {
            for d in m.states() {
                let lt = equiv_upto(&m, c, d, 2, EquivKind::Lt, &cfg(), 1_000_000).unwrap();
                let tr = equiv_upto(&m, c, d, 2, EquivKind::Tr, &cfg(), 1_000_000).unwrap();
                prop_assert!(!lt.equivalent || tr.equivalent);
            }
        }
    }

    /// `lt` agrees with evaluating the fragment as a formula.
    #[test]
    fn lt_is_formula_evaluation(sr in any_semiring(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_model(sr, small(), &mut rng);
        let ext = nu_extent(&m, &cfg()).unwrap().values;
        let fragments = enumerate_fragments(m.signature(), 2, 10_000).unwrap();
        for _ in 0..8 {
            let b = &fragments[rng.gen_range(0..fragments.len())];
            let lt = lt_all(&m, b, &ext);
            let ev = eval(&m, &b.to_formula(), &cfg()).unwrap().values;
            for c in m.states() {
                let ok = if sr == Semiring::Probabilistic { close(sr, &lt[c], &ev[c]) } else { lt[c] == ev[c] };
                prop_assert!(ok, "{b} at {}: {} vs {}", m.state_name(c), lt[c], ev[c]);
            }
        }
    }

    /// Cylinder measures of the depth-n fragments from a state sum to its extent.
    #[test]
    fn partition_law(sr in any_semiring(), seed in any::<u64>(), depth in 0usize..=2) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_model(sr, small(), &mut rng);
        let pm = PathMeasure::new(&m, &cfg()).unwrap();
        let tol = oracle::tolerance(&m, pm.certificate(), depth);
        for c in m.states() {
            let mut total = sr.zero();
            for q in oracle::enum_fragments(&m, c, depth, 1_000_000).unwrap() {
                total = sr.plus(&total, &pm.measure(&q).unwrap()).unwrap();
            }
            prop_assert!(sr.distance(&total, &pm.extent()[c]) <= tol, "{}: {} vs {}", m.state_name(c), total, pm.extent()[c]);
        }
    }

    /// Extending a truncation by one step can only lower its value.
    #[test]
    fn truncations_decrease(sr in any_semiring(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_model(sr, ModelShape { offsets: false, ..small() }, &mut rng);
        let n = rng.gen_range(0..=2);
        let t = random_truncation(&m, n, &mut rng);
        let longer = extend(&m, &t, &mut rng);
        for c in m.states() {
            let a = tr_approx(&m, c, &t, n).unwrap();
            let b = tr_approx(&m, c, &longer, n + 1).unwrap();
            prop_assert!(sr.leq(&b, &a), "{t} -> {longer} at {}: {a} then {b}", m.state_name(c));
        }
    }

    /// On the boolean carrier `finite_tr` is a search for a run tree.
    #[test]
    fn boolean_finite_traces_are_runs(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_model(Semiring::Boolean, ModelShape { offsets: false, ..small() }, &mut rng);
        for t in enumerate_fragments(m.signature(), 2, 10_000).unwrap().into_iter().filter(TraceFragment::is_completed) {
            for c in m.states() {
                prop_assert_eq!(finite_tr(&m, c, &t).unwrap(), Value::Bool(has_run(&m, c, &t)));
            }
        }
    }

    #[test]
    fn formulas_round_trip(sr in any_semiring(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_model(sr, small(), &mut rng);
        let phi = random_formula(&m, false, 2, 12, &mut rng).alpha_normalize();
        let back = parse_formula(&phi.to_string(), m.signature(), sr).unwrap();
        prop_assert_eq!(back, phi);
    }

    #[test]
    fn models_round_trip(sr in any_semiring(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_model(sr, ModelShape::default(), &mut rng);
        prop_assert_eq!(parse_model(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn fragments_round_trip(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_model(Semiring::Boolean, small(), &mut rng);
        for b in enumerate_fragments(m.signature(), 2, 10_000).unwrap() {
            prop_assert_eq!(parse_fragment(&b.to_string(), m.signature()).unwrap(), b);
        }
    }
}

fn random_truncation(m: &Model, n: usize, rng: &mut StdRng) -> TraceFragment {
    if n == 0 {
        return TraceFragment::Top;
    }
    let labels = m.signature().labels();
    let l = &labels[rng.gen_range(0..labels.len())];
    TraceFragment::node(l.name.clone(), (0..l.arity).map(|_| random_truncation(m, n - 1, rng)).collect())
}

/// Replaces every `T` leaf by a random one-step node.
fn extend(m: &Model, t: &TraceFragment, rng: &mut StdRng) -> TraceFragment {
    match t {
        TraceFragment::Top => random_truncation(m, 1, rng),
        TraceFragment::Node(l, ch) => TraceFragment::node(l.clone(), ch.iter().map(|c| extend(m, c, rng)).collect()),
    }
}

fn has_run(m: &Model, c: usize, t: &TraceFragment) -> bool {
    let TraceFragment::Node(label, ch) = t else { return false };
    m.transitions(c).iter().any(|tr| {
        m.signature().label(tr.label).name == *label && tr.successors.iter().zip(ch).all(|(&s, sub)| has_run(m, s, sub))
    })
}

#[test]
fn prob_unrolling_keeps_formula_semantics_small_example() {
    let m = parse_model(
        "semiring prob
         label */0 label a/1
         state s { 1/2 a -> s; 1/4 * }",
    )
    .unwrap();
    let phi: Formula = parse_formula("mu X.([*]|[a](X))", m.signature(), m.semiring()).unwrap();
    // x = 1/4 + x/2 has least solution 1/2; the k-th approximant is 1/2 - 1/2^(k+1)
    let v = eval(&m, &phi, &cfg()).unwrap().values;
    assert_eq!(v, vec![Value::prob(1, 2)]);
    for k in 0..5 {
        let a = eval(&m, &phi.unroll(k), &cfg()).unwrap().values;
        assert_eq!(
            a,
            vec![Value::Prob(
                BigRational::new(1.into(), 2.into()) - BigRational::new(1.into(), (1i64 << (k + 1)).into())
            )]
        );
    }
}
