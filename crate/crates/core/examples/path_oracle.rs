//! Cylinder measures of path fragments, and the oracle cross-check of the
//! step-wise evaluator on an unrolled fixpoint formula.

use linmu::oracle::{compare_semantics, enum_fragments, PathMeasure};
use linmu::{parse_formula, parse_model, EvalConfig};

fn main() {
    let model = parse_model(include_str!("models/extent-example.prob.model")).expect("valid model");
    let config = EvalConfig::default();
    let x = model.state_id("x").unwrap();

    let measure = PathMeasure::new(&model, &config).unwrap();
    println!("depth-2 fragments from x:");
    for q in enum_fragments(&model, x, 2, 1_000).unwrap() {
        println!("  {:<24} {}", q.display(&model).to_string(), measure.measure(&q).unwrap());
    }
    println!("extent at x: {}", measure.extent()[x]);

    let phi = parse_formula("mu X.([a](T)|[b](X)|[c](X))", model.signature(), model.semiring()).unwrap();
    let report = compare_semantics(&model, &phi, 3, &config, 1_000_000).unwrap();
    println!("{} unrolled 3 times (modal depth {}):", report.formula, report.depth);
    for s in &report.states {
        println!(
            "  {:<3} step-wise {:<8} oracle {:<8} limit distance {}",
            s.state, s.stepwise, s.oracle, s.approximant_distance
        );
    }
    println!("agree: {} (max discrepancy {}, tolerance {})", report.agree, report.max_discrepancy, report.tolerance);
}
