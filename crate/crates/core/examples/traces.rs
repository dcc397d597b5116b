//! Linear-time versus trace behaviour on two states that only differ in how
//! their probability is spread before the first step.

use linmu::traces::{equiv_upto, finite_tr, lt, parse_fragment, tr_approx, tr_envelope, EquivKind};
use linmu::{parse_model, EvalConfig};

fn main() {
    let model = parse_model(include_str!("models/lt-counterexample.prob.model")).expect("valid model");
    let config = EvalConfig::default();
    let x = model.state_id("x").unwrap();
    let u = model.state_id("u").unwrap();

    let b = parse_fragment("a(T)", model.signature()).unwrap();
    println!("lt(x, {b}) = {}", lt(&model, x, &b, &config).unwrap());
    println!("lt(u, {b}) = {}", lt(&model, u, &b, &config).unwrap());

    let e = equiv_upto(&model, x, u, 2, EquivKind::Lt, &config, 1_000_000).unwrap();
    if let Some(w) = e.witness {
        println!("lt-inequivalent, witness {} ({} vs {})", w.fragment, w.left, w.right);
    }

    let stop = parse_fragment("*", model.signature()).unwrap();
    println!(
        "finite_tr on {stop}: {} vs {}",
        finite_tr(&model, x, &stop).unwrap(),
        finite_tr(&model, u, &stop).unwrap()
    );
    let t = parse_fragment("a(c(b(T)))", model.signature()).unwrap();
    println!("tr^3 on {t}: {} vs {}", tr_approx(&model, x, &t, 3).unwrap(), tr_approx(&model, u, &t, 3).unwrap());
    let e = equiv_upto(&model, x, u, 3, EquivKind::Tr, &config, 1_000_000).unwrap();
    println!("tr-equivalent up to depth 3: {} ({} completed traces)", e.equivalent, e.checked);
    let env = tr_envelope(&model, 20).unwrap();
    println!("every depth-20 truncation is worth at most {} at x and {} at u", env[x], env[u]);
}
