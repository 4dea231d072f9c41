use proptest::prelude::*;
use qcn_core::algebra::Relation;
use qcn_core::baselines::{learn_conacq2, learn_naive};
use qcn_core::generation::{generate_target, Case, GenConfig};
use qcn_core::harness::{manifest, run_sweep, to_csv, Method, SweepSpec, CSV_HEADER};
use qcn_core::learner::{
    edge_score, learn, learn_with_mistakes, Heuristic, LearnerConfig, Propagation,
};
use qcn_core::network::{all_edges, Qcn};
use qcn_core::oracle::{
    truthful_answer, Answer, Oracle, OracleConfig, OracleError, Query, SimulatedOracle,
};
use qcn_core::propagation::path_consistency;

fn universal_like(t: &Qcn) -> Qcn {
    Qcn::new_universal(t.calculus().clone(), t.n()).unwrap()
}

#[test]
fn case_one_targets_are_realized_by_their_witness() {
    for calc in ["ia", "rcc8", "point"] {
        for seed in 0..10 {
            let t = generate_target(&GenConfig::new(calc, 9, Case::One, seed)).unwrap();
            assert!(t.network.is_atomic());
            let mut g = t.network.clone();
            assert!(path_consistency(&mut g).pruned.is_empty());
            assert_eq!(t.witness.len(), 9);
        }
    }
}

#[test]
fn case_two_and_three_relax_the_same_scenario() {
    for seed in 0..10 {
        let one = generate_target(&GenConfig::new("ia", 10, Case::One, seed)).unwrap();
        let two = generate_target(&GenConfig::new("ia", 10, Case::Two, seed)).unwrap();
        let three = generate_target(&GenConfig::new("ia", 10, Case::Three, seed)).unwrap();
        let u = one.network.calculus().universal();
        for (i, j) in all_edges(10) {
            let r2 = two.network.get(i, j);
            assert!(r2 == one.network.get(i, j) || r2 == u);
            assert!(one.network.get(i, j).is_subset_of(three.network.get(i, j)));
            assert!(three
                .network
                .get(i, j)
                .is_subset_of(three.oracle_view.get(i, j)));
        }
        let mut closed = three.network.clone();
        assert!(path_consistency(&mut closed).pruned.is_empty());
    }
}

#[test]
fn no_extra_density_gives_the_scenario() {
    let mut cfg = GenConfig::new("ia", 8, Case::Three, 5);
    cfg.extra_density = 0.0;
    let three = generate_target(&cfg).unwrap();
    let one = generate_target(&GenConfig::new("ia", 8, Case::One, 5)).unwrap();
    assert_eq!(three.network, one.network);
}

#[test]
fn generation_is_a_function_of_its_config() {
    let cfg = GenConfig::new("rcc8", 12, Case::Three, 77);
    let a = generate_target(&cfg).unwrap();
    let b = generate_target(&cfg).unwrap();
    assert_eq!(a.network, b.network);
    assert_eq!(a.witness, b.witness);
}

fn truthful_run(calc: &str, case: Case, prop: Propagation, h: Heuristic, seed: u64) {
    let t = generate_target(&GenConfig::new(calc, 10, case, seed)).unwrap();
    let mut cfg = LearnerConfig::new(case, prop, h);
    cfg.seed = seed;
    let mut o = SimulatedOracle::truthful(t.oracle_view.clone());
    let r = learn(cfg, &mut o, universal_like(&t.network)).unwrap();
    assert!(r.converged, "{calc} {case} {prop:?} {h}");
    // without propagation a case-3 learner ends on the oracle's own edges,
    // which are not path consistent
    let want = if prop == Propagation::None {
        &t.oracle_view
    } else {
        &t.network
    };
    assert_eq!(&r.network, want, "{calc} {case} {prop:?} {h} seed {seed}");
    assert_eq!(r.stats.backtracks, 0);
}

#[test]
fn truthful_learning_finds_the_target() {
    let hs = [
        Heuristic::Random,
        Heuristic::Cardinality,
        Heuristic::Weight,
        Heuristic::CardinalityDescending,
    ];
    for calc in ["ia", "rcc8", "point"] {
        for case in Case::ALL {
            for h in hs {
                for seed in 0..3 {
                    truthful_run(calc, case, Propagation::Pc, h, seed);
                    truthful_run(calc, case, Propagation::None, h, seed);
                }
            }
        }
        for seed in 0..3 {
            truthful_run(calc, Case::Two, Propagation::Ppc, Heuristic::Weight, seed);
        }
    }
}

#[test]
fn baselines_find_the_target_and_conacq2_never_asks_more() {
    for case in Case::ALL {
        for seed in 0..4 {
            let t = generate_target(&GenConfig::new("ia", 10, case, seed)).unwrap();
            let mut o = SimulatedOracle::truthful(t.oracle_view.clone());
            let naive =
                learn_naive(case, &mut o, universal_like(&t.network), seed, 0.3, false).unwrap();
            let mut o = SimulatedOracle::truthful(t.oracle_view.clone());
            let clausal =
                learn_conacq2(case, &mut o, universal_like(&t.network), seed, 0.3).unwrap();
            assert!(naive.converged && clausal.result.converged);
            assert_eq!(naive.network, t.oracle_view);
            assert_eq!(clausal.result.network, t.oracle_view);
            assert!(clausal.result.stats.queries <= naive.stats.queries);
            assert_eq!(
                clausal.result.stats.queries + clausal.skipped,
                naive.stats.queries
            );
        }
    }
}

#[test]
fn mistake_handling_is_free_without_mistakes() {
    for case in Case::ALL {
        for seed in 0..5 {
            let t = generate_target(&GenConfig::new("ia", 10, case, seed)).unwrap();
            let mut cfg = LearnerConfig::new(case, Propagation::Pc, Heuristic::Weight);
            cfg.seed = seed;
            let mut o = SimulatedOracle::truthful(t.oracle_view.clone());
            let plain = learn(cfg, &mut o, universal_like(&t.network)).unwrap();
            let mut o = SimulatedOracle::truthful(t.oracle_view.clone());
            let guarded = learn_with_mistakes(cfg, &mut o, universal_like(&t.network)).unwrap();
            assert_eq!(plain.network, guarded.network);
            assert_eq!(plain.stats.queries, guarded.stats.queries);
            assert_eq!(guarded.stats.backtracks, 0);
        }
    }
}

// Truthful except for the `k`-th question asked for the first time, whose
// answer is flipped. Re-asks are truthful.
struct FlipOne {
    target: Qcn,
    k: u64,
    seen: u64,
    flipped: Option<Query>,
}

impl Oracle for FlipOne {
    fn ask(&mut self, q: &Query, is_reask: bool) -> Result<Answer, OracleError> {
        let truth = truthful_answer(&self.target, q)?;
        if is_reask {
            return Ok(Answer::truthful(truth));
        }
        self.seen += 1;
        if self.seen == self.k {
            self.flipped = Some(*q);
            return Ok(Answer {
                yes: !truth,
                was_mistake: true,
            });
        }
        Ok(Answer::truthful(truth))
    }

    fn target_hint(&self, i: usize, j: usize) -> Option<Relation> {
        Some(self.target.get(i, j))
    }
}

#[test]
fn a_wrong_no_is_always_repaired() {
    // A wrong "no" drops the true relation of its edge; with every edge
    // confirmed by a "yes" the edge must eventually empty, so the mistake is
    // found. (A wrong "yes" can be consistent with everything else and is
    // not covered here.)
    let mut repaired = 0;
    for seed in 0..6 {
        let t = generate_target(&GenConfig::new("ia", 8, Case::One, seed)).unwrap();
        for k in [1, 3, 10, 25, 60] {
            for h in [Heuristic::Random, Heuristic::Cardinality] {
                let mut cfg = LearnerConfig::new(Case::One, Propagation::Pc, h);
                cfg.seed = seed;
                cfg.p_yes_bias = 0.3;
                cfg.verify_singletons = true;
                let mut o = FlipOne {
                    target: t.network.clone(),
                    k,
                    seen: 0,
                    flipped: None,
                };
                let r = learn_with_mistakes(cfg, &mut o, universal_like(&t.network)).unwrap();
                let Some(q) = o.flipped else { continue };
                if !truthful_answer(&t.network, &q).unwrap() {
                    continue;
                }
                assert!(r.converged);
                assert_eq!(r.network, t.network, "seed {seed} k {k} {h}");
                assert_eq!(r.stats.detected_mistakes, 1);
                assert!(r.stats.detected_mistakes <= r.stats.backtracks + 1);
                repaired += 1;
            }
        }
    }
    assert!(repaired > 10, "{repaired}");
}

#[test]
fn simulated_mistake_rate_matches_its_parameter() {
    let t = generate_target(&GenConfig::new("ia", 50, Case::One, 1)).unwrap();
    let cfg = OracleConfig {
        p_mistake: 0.05,
        seed: 9,
        ..OracleConfig::default()
    };
    let mut o = SimulatedOracle::new(t.network.clone(), cfg);
    let mut asked = 0u64;
    let mut flips = 0u64;
    for (i, j) in all_edges(50) {
        for b in 0..13 {
            let a = o.ask(&Query::relation(i, j, b), false).unwrap();
            asked += 1;
            flips += a.was_mistake as u64;
            assert_eq!(a.yes ^ a.was_mistake, t.network.get(i, j).contains(b));
        }
    }
    assert!(asked >= 10_000);
    let rate = flips as f64 / asked as f64;
    assert!((0.04..=0.06).contains(&rate), "{rate}");
    assert_eq!(o.mistakes_injected, flips);
}

#[test]
fn simulated_mistakes_are_reproducible() {
    let t = generate_target(&GenConfig::new("ia", 20, Case::One, 4)).unwrap();
    let cfg = OracleConfig {
        p_mistake: 0.2,
        seed: 5,
        ..OracleConfig::default()
    };
    let answers = |mut o: SimulatedOracle| -> Vec<bool> {
        all_edges(20)
            .map(|(i, j)| o.ask(&Query::relation(i, j, 0), false).unwrap().yes)
            .collect()
    };
    assert_eq!(
        answers(SimulatedOracle::new(t.network.clone(), cfg)),
        answers(SimulatedOracle::new(t.network.clone(), cfg))
    );
}

proptest! {
    #[test]
    fn scaling_weights_keeps_the_chosen_edge(
        sets in proptest::collection::vec(1u32..(1 << 13), 1..30),
        factor in 1u32..50,
    ) {
        let ia = qcn_core::algebra::interval_algebra();
        let w = ia.weights().to_vec();
        let scaled: Vec<u32> = w.iter().map(|x| x * factor).collect();
        let argmin = |ws: &[u32]| {
            sets.iter()
                .enumerate()
                .min_by_key(|(k, &s)| (edge_score(Heuristic::Weight, ws, Relation::from_bits(s)), *k))
                .map(|(k, _)| k)
        };
        prop_assert_eq!(argmin(&w), argmin(&scaled));
    }
}

fn small_spec() -> SweepSpec {
    SweepSpec {
        cases: vec![Case::One, Case::Two],
        n: 10,
        p_yes: vec![0.0, 0.5],
        methods: vec![Method::Naive, Method::Conacq2, Method::Pc, Method::PcWeight],
        runs: 3,
        p_mistake: 0.01,
        ..SweepSpec::default()
    }
}

#[test]
fn sweeps_are_byte_identical() {
    let spec = small_spec();
    let a = to_csv(&run_sweep(&spec).unwrap()).unwrap();
    let b = to_csv(&run_sweep(&spec).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with(CSV_HEADER));
    assert_eq!(a.lines().count(), 1 + spec.cell_count());
}

#[test]
fn manifest_records_the_oracle_model() {
    let spec = small_spec();
    let rows = run_sweep(&spec).unwrap();
    let m = manifest(&spec, rows);
    let json = serde_json::to_value(&m).unwrap();
    assert_eq!(json["oracle"]["reask_truthful"], true);
    assert_eq!(json["oracle"]["consistent_user"], true);
    assert_eq!(json["oracle"]["verify_singletons"], true);
    assert_eq!(json["rows"].as_array().unwrap().len(), spec.cell_count());
}
