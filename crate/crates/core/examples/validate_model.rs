//! Build models programmatically and through the text format, and print the
//! diagnostics of a broken one.

use linmu::model::validate;
use linmu::{parse_model, ModelBuilder, Semiring, Value};

fn main() {
    let mut b = ModelBuilder::new(Semiring::Probabilistic);
    b.label("go", 1).label("stop", 0);
    b.state("p").state("q");
    b.transition("p", Value::prob(1, 2), "go", &["q"]).transition("p", Value::prob(1, 2), "stop", &[]);
    b.transition("q", Value::prob(1, 3), "go", &["p"]);
    let model = b.build().expect("valid model");
    print!("{model}");
    for d in validate(&model) {
        println!("{d}");
    }

    let broken = "semiring trop[5]
label a/1
state s { 7 a -> s; 1 b -> s }
state s { }";
    match parse_model(broken) {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => e.diagnostics().iter().for_each(|d| println!("{d}")),
    }
}
