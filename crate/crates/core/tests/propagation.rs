use std::sync::Arc;

use proptest::prelude::*;
use qcn_core::algebra::{interval_algebra, point_algebra, rcc8, Calculus, Relation};
use qcn_core::network::{all_edges, Qcn};
use qcn_core::propagation::{
    partial_path_consistency, path_consistency, path_consistency_incremental,
    path_consistency_with, triangulate, PcOptions, PopOrder,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ENUM_CAP: usize = 200_000;

// Either a loose network around a hidden scenario (mostly consistent) or
// arbitrary small edges (often inconsistent).
fn network(calc: &Arc<Calculus>, n: usize, seed: u64) -> Qcn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = calc.p();
    let mut q = Qcn::new_universal(calc.clone(), n).unwrap();
    let loose = rng.random_bool(0.5);
    for (i, j) in all_edges(n) {
        let mut r = Relation::singleton(rng.random_range(0..p));
        let extra = if loose { 0.3 } else { 0.1 };
        for b in 0..p {
            if rng.random_bool(extra) {
                r.insert(b);
            }
        }
        if rng.random_bool(0.15) {
            r = calc.universal();
        }
        q.set(i, j, r);
    }
    q
}

fn calc(k: usize) -> Arc<Calculus> {
    [interval_algebra, rcc8, point_algebra][k]()
}

fn sub_of(a: &Qcn, b: &Qcn) -> bool {
    all_edges(a.n()).all(|(i, j)| a.get(i, j).is_subset_of(b.get(i, j)))
}

fn arb() -> impl Strategy<Value = (usize, usize, u64)> {
    (0usize..3, 3usize..=6, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn pc_keeps_every_scenario((k, n, seed) in arb()) {
        let c = calc(k);
        let q = network(&c, n, seed);
        let before = q.enumerate_scenarios(ENUM_CAP).unwrap();
        prop_assume!(before.len() < ENUM_CAP);
        let mut g = q.clone();
        let res = path_consistency(&mut g);
        if res.is_consistent() {
            prop_assert!(sub_of(&g, &q));
            prop_assert_eq!(g.enumerate_scenarios(ENUM_CAP).unwrap(), before);
        } else {
            prop_assert!(before.is_empty());
        }
    }

    #[test]
    fn pc_is_idempotent((k, n, seed) in arb()) {
        let mut g = network(&calc(k), n, seed);
        prop_assume!(path_consistency(&mut g).is_consistent());
        let once = g.clone();
        let again = path_consistency(&mut g);
        prop_assert!(again.pruned.is_empty());
        prop_assert_eq!(g, once);
    }

    #[test]
    fn pc_fixpoint_does_not_depend_on_queue_order((k, n, seed) in arb(), order in any::<u64>()) {
        let q = network(&calc(k), n, seed);
        let mut fifo = q.clone();
        let a = path_consistency(&mut fifo);
        let mut shuffled = q.clone();
        let b = path_consistency_with(
            &mut shuffled,
            PcOptions { order: PopOrder::Shuffled(order), one_support: true },
        );
        prop_assert_eq!(a.is_consistent(), b.is_consistent());
        if a.is_consistent() {
            prop_assert_eq!(fifo, shuffled);
        }
    }

    #[test]
    fn one_support_changes_nothing((k, n, seed) in arb()) {
        let q = network(&calc(k), n, seed);
        let mut full = q.clone();
        let a = path_consistency_with(&mut full, PcOptions { order: PopOrder::Fifo, one_support: false });
        let mut short = q.clone();
        let b = path_consistency(&mut short);
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(full, short);
    }

    #[test]
    fn pc_is_monotone((k, n, seed) in arb(), drop in any::<u64>()) {
        let c = calc(k);
        let big = network(&c, n, seed);
        // a tighter network: drop some members, never emptying an edge
        let mut rng = ChaCha8Rng::seed_from_u64(drop);
        let mut small = big.clone();
        for (i, j) in all_edges(n) {
            let mut r = small.get(i, j);
            for b in r.iter() {
                if r.len() > 1 && rng.random_bool(0.3) {
                    r.remove(b);
                }
            }
            small.set(i, j, r);
        }
        let (mut a, mut b) = (small, big);
        let ra = path_consistency(&mut a);
        let rb = path_consistency(&mut b);
        if !rb.is_consistent() {
            prop_assert!(!ra.is_consistent());
        } else if ra.is_consistent() {
            prop_assert!(sub_of(&a, &b));
        }
    }

    #[test]
    fn incremental_matches_full((k, n, seed) in arb(), pick in any::<u64>()) {
        let c = calc(k);
        let mut g = network(&c, n, seed);
        prop_assume!(path_consistency(&mut g).is_consistent());
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let edges: Vec<_> = all_edges(n).collect();
        let (i, j) = edges[rng.random_range(0..edges.len())];
        let r = g.get(i, j);
        let keep = r.iter().nth(rng.random_range(0..r.len())).unwrap();
        g.set(i, j, Relation::singleton(keep));
        let mut inc = g.clone();
        let a = path_consistency_incremental(&mut inc, (i, j));
        let mut full = g.clone();
        let b = path_consistency(&mut full);
        prop_assert_eq!(a.is_consistent(), b.is_consistent());
        if a.is_consistent() {
            prop_assert_eq!(inc, full);
        }
    }

    #[test]
    fn ppc_on_the_complete_graph_is_pc((k, n, seed) in arb()) {
        let q = network(&calc(k), n, seed);
        let every: Vec<_> = all_edges(n).collect();
        let cs = triangulate(&q, &every);
        prop_assert_eq!(cs.edges().len(), every.len());
        let mut a = q.clone();
        let ra = partial_path_consistency(&mut a, &cs);
        let mut b = q.clone();
        let rb = path_consistency(&mut b);
        prop_assert_eq!(ra.is_consistent(), rb.is_consistent());
        if ra.is_consistent() {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn triangulation_is_chordal_and_covers_known_edges((k, n, seed) in (0usize..3, 3usize..=9, any::<u64>())) {
        let q = Qcn::new_universal(calc(k), n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let known: Vec<_> = all_edges(n).filter(|_| rng.random_bool(0.4)).collect();
        let cs = triangulate(&q, &known);
        prop_assert!(cs.is_chordal());
        for &(i, j) in &known {
            prop_assert!(cs.contains(i, j));
        }
    }
}

#[test]
fn ppc_never_touches_edges_outside_the_structure() {
    let ia = interval_algebra();
    let mut q = Qcn::new_universal(ia.clone(), 4).unwrap();
    let p = ia.relation(&["P"]).unwrap();
    q.set(0, 1, p);
    q.set(1, 2, p);
    // a path 0-1-2 with no third edge is already chordal
    let cs = triangulate(&q, &[(0, 1), (1, 2)]);
    let res = partial_path_consistency(&mut q, &cs);
    assert!(res.is_consistent());
    assert_eq!(q.get(0, 2), ia.universal());
    // full PC infers 0 P 2
    path_consistency(&mut q);
    assert_eq!(q.get(0, 2), p);
}
