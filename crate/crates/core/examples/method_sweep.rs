//! Mean queries per method on a small sweep.
//!
//! `cargo run --release --example method_sweep -- [n] [case] [runs] [p_yes]`

use qcn_core::generation::Case;
use qcn_core::harness::{mean_queries, run_sweep, Method, SweepSpec};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |k: usize, d: &str| args.get(k).cloned().unwrap_or_else(|| d.to_string());
    let n: usize = arg(0, "30").parse().expect("n");
    let case: Case = arg(1, "1").parse().expect("case");
    let runs: usize = arg(2, "5").parse().expect("runs");
    let p_yes: f64 = arg(3, "0").parse().expect("p_yes");

    let methods: Vec<Method> = Method::ALL
        .into_iter()
        .filter(|m| case == Case::Two || !m.is_ppc())
        .collect();
    let spec = SweepSpec {
        cases: vec![case],
        n,
        p_yes: vec![p_yes],
        methods: methods.clone(),
        runs,
        ..SweepSpec::default()
    };
    let rows = run_sweep(&spec).expect("sweep");
    println!("case {case}, ia, n = {n}, p_yes = {p_yes}, {runs} runs");
    for m in methods {
        println!("{:>14} {:>10.1}", m.name(), mean_queries(&rows, m, None));
    }
}
