//! A simulated user who answers wrongly now and then. The learner
//! backtracks through its snapshots, re-asks, and repairs the answers.
//!
//! `cargo run --release --example learn_with_mistakes -- [n] [p_mistake] [seed]`

use qcn_core::generation::{generate_target, Case, GenConfig};
use qcn_core::learner::{learn_with_mistakes, Heuristic, LearnerConfig, Propagation};
use qcn_core::network::{all_edges, Qcn};
use qcn_core::oracle::{OracleConfig, SimulatedOracle};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(15);
    let p_mistake: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);

    let t = generate_target(&GenConfig::new("ia", n, Case::One, seed)).expect("valid config");
    let mut oracle = SimulatedOracle::new(
        t.oracle_view.clone(),
        OracleConfig {
            p_mistake,
            seed,
            ..OracleConfig::default()
        },
    );
    let mut cfg = LearnerConfig::new(Case::One, Propagation::Pc, Heuristic::Random);
    cfg.seed = seed;
    cfg.p_yes_bias = 0.3;
    cfg.verify_singletons = true;
    let initial = Qcn::new_universal(t.network.calculus().clone(), n).expect("n >= 2");
    let r = learn_with_mistakes(cfg, &mut oracle, initial).expect("runs");

    let wrong = all_edges(n)
        .filter(|&(i, j)| r.network.get(i, j) != t.network.get(i, j))
        .count();
    println!("queries            {}", r.stats.queries);
    println!("mistakes injected  {}", oracle.mistakes_injected);
    println!("mistakes detected  {}", r.stats.detected_mistakes);
    println!("frames popped      {}", r.stats.backtracks);
    println!("converged          {}", r.converged);
    println!("wrong edges        {wrong}");
}
