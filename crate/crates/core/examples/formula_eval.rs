//! Parse a formula against a model's signature and evaluate it at every state.
//!
//! With arguments, `formula_eval MODEL FORMULA` evaluates a user formula.

use linmu::{eval, parse_formula, parse_model, EvalConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let (text, formula) = match args.as_slice() {
        [_, path, formula] => (std::fs::read_to_string(path).expect("readable model"), formula.clone()),
        _ => (include_str!("models/extent-example.prob.model").to_string(), "mu X.([a](T)|[b](X)|[c](X))".to_string()),
    };
    let model = parse_model(&text).unwrap_or_else(|e| {
        e.diagnostics().iter().for_each(|d| eprintln!("{d}"));
        std::process::exit(1)
    });
    let phi = parse_formula(&formula, model.signature(), model.semiring()).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(1)
    });
    let class = phi.classify();
    println!("{phi}");
    println!("fixpoint nesting {}, modal depth {}, qualitative {}", phi.fnd(), class.modal_depth, class.qualitative);
    let result = eval(&model, &phi, &EvalConfig::default()).expect("converges");
    for c in model.states() {
        println!("{}\t{}", model.state_name(c), result.values[c]);
    }
}
