//! Learns a case-1 target with every propagation and ordering, counting the
//! questions a truthful user has to answer.
//!
//! `cargo run --release --example learn_target -- [n] [seed]`

use qcn_core::baselines::{learn_conacq2, learn_naive};
use qcn_core::generation::{generate_target, Case, GenConfig};
use qcn_core::learner::{learn, Heuristic, LearnerConfig, Propagation};
use qcn_core::network::Qcn;
use qcn_core::oracle::SimulatedOracle;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(20);
    let seed: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let t = generate_target(&GenConfig::new("ia", n, Case::One, seed)).expect("valid config");
    let fresh = || Qcn::new_universal(t.network.calculus().clone(), n).expect("n >= 2");
    let oracle = || SimulatedOracle::truthful(t.oracle_view.clone());

    let r = learn_naive(Case::One, &mut oracle(), fresh(), seed, 0.0, false).expect("runs");
    println!("{:<24} {:>6} queries", "naive", r.stats.queries);
    let c = learn_conacq2(Case::One, &mut oracle(), fresh(), seed, 0.0).expect("runs");
    println!(
        "{:<24} {:>6} queries ({} entailed)",
        "conacq2", c.result.stats.queries, c.skipped
    );
    for h in [
        Heuristic::Random,
        Heuristic::Cardinality,
        Heuristic::Weight,
        Heuristic::CardinalityDescending,
    ] {
        let mut cfg = LearnerConfig::new(Case::One, Propagation::Pc, h);
        cfg.seed = seed;
        let r = learn(cfg, &mut oracle(), fresh()).expect("runs");
        assert!(r.converged && r.network == t.network);
        println!(
            "{:<24} {:>6} queries, {} relations pruned",
            format!("pc + {h}"),
            r.stats.queries,
            r.stats.pruned_by_pc
        );
    }
}
