//! Greatest and least extents of the same system over two semirings.

use linmu::{mu_extent, nu_extent, parse_model, EvalConfig};

fn main() {
    let config = EvalConfig::default();
    for text in [include_str!("models/extent-example.prob.model"), include_str!("models/extent-example.trop.model")] {
        let model = parse_model(text).expect("valid model");
        let nu = nu_extent(&model, &config).expect("converges");
        let mu = mu_extent(&model, &config).expect("converges");
        println!("{} semiring", model.semiring());
        for c in model.states() {
            println!("  {:<3} nu {:<6} mu {}", model.state_name(c), nu.values[c], mu.values[c]);
        }
        println!("  ({})", nu.certificate);
    }
}
