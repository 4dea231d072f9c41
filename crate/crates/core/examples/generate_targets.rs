//! Random targets for the three learning cases, with the geometry that
//! realizes them.
//!
//! `cargo run --example generate_targets -- [calculus] [n] [seed]`

use qcn_core::generation::{generate_target, Case, GenConfig};
use qcn_core::network::all_edges;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let calculus = args.first().map(String::as_str).unwrap_or("ia");
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);

    for case in Case::ALL {
        let t = generate_target(&GenConfig::new(calculus, n, case, seed)).expect("valid config");
        let calc = t.network.calculus().clone();
        let universal = all_edges(n)
            .filter(|&(i, j)| t.network.get(i, j) == calc.universal())
            .count();
        let atoms: usize = all_edges(n).map(|(i, j)| t.network.get(i, j).len()).sum();
        println!(
            "case {case}: {} edges, {universal} universal, {:.2} relations per edge",
            n * (n - 1) / 2,
            atoms as f64 / (n * (n - 1) / 2) as f64
        );
        if case == Case::One {
            println!("  witness {:?}", t.witness);
        }
    }
    let t = generate_target(&GenConfig::new(calculus, n, Case::One, seed)).expect("valid config");
    println!("\n{}", t.network.to_json());
}
