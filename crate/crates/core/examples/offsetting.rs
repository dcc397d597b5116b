//! Resource replenishment through offsets: the same formula under three
//! offset placements on a two-state cost model.

use linmu::{eval, parse_formula, parse_model, EvalConfig, Value};

fn main() {
    let base = parse_model(include_str!("models/offset-none.trop.model")).expect("valid model");
    let phi = parse_formula("nu X. mu Y.([a](X)|[b](Y))", base.signature(), base.semiring()).unwrap();
    let s = base.state_id("s").unwrap();
    let t = base.state_id("t").unwrap();
    for (name, at) in [("none", None), ("at s", Some(s)), ("at t", Some(t))] {
        let mut offsets = vec![Value::cost(0); base.num_states()];
        if let Some(c) = at {
            offsets[c] = Value::cost(1);
        }
        let model = base.with_offsets(offsets);
        let v = eval(&model, &phi, &EvalConfig::default()).expect("converges").values;
        println!("offset {name:<5} s = {:<4} t = {}", v[s], v[t]);
    }
}
