use std::collections::HashMap;
use std::sync::Arc;

use proptest::prelude::*;
use qcn_core::algebra::{interval_algebra, load_calculus, point_algebra, rcc8, Calculus, Relation};
use qcn_core::generation::{interval_symbol, point_symbol, region_symbol};

// Composition observed on concrete objects: for every triple x, y, z,
// rel(x, z) belongs to rel(x, y) ∘ rel(y, z).
fn observed(
    calc: &Calculus,
    objects: &[(i64, i64)],
    rel: impl Fn((i64, i64), (i64, i64)) -> &'static str,
) -> HashMap<(usize, usize), Relation> {
    let id = |x, y| calc.id_of(rel(x, y)).unwrap();
    let mut seen: HashMap<(usize, usize), Relation> = HashMap::new();
    for &x in objects {
        for &y in objects {
            for &z in objects {
                seen.entry((id(x, y), id(y, z)))
                    .or_default()
                    .insert(id(x, z));
            }
        }
    }
    seen
}

fn intervals(max: i64) -> Vec<(i64, i64)> {
    let mut v = Vec::new();
    for a in 0..max {
        for b in a + 1..max {
            v.push((a, b));
        }
    }
    v
}

#[test]
fn interval_table_matches_endpoint_semantics() {
    let ia = interval_algebra();
    let seen = observed(&ia, &intervals(7), |x, y| interval_symbol(x, y).unwrap());
    for a in 0..13 {
        for b in 0..13 {
            assert_eq!(
                seen[&(a, b)],
                ia.compose_basic(a, b),
                "{} o {}",
                ia.symbol(a),
                ia.symbol(b)
            );
        }
    }
}

#[test]
fn point_table_matches_order_semantics() {
    let pa = point_algebra();
    let pts: Vec<(i64, i64)> = (0..4).map(|x| (x, x)).collect();
    let seen = observed(&pa, &pts, |x, y| point_symbol(x.0, y.0));
    for a in 0..3 {
        for b in 0..3 {
            assert_eq!(seen[&(a, b)], pa.compose_basic(a, b));
        }
    }
}

#[test]
fn rcc8_table_is_sound_on_segments() {
    // Segments of a line realize only part of RCC8, so this is a soundness
    // check: whatever happens on the line is allowed by the table.
    let r = rcc8();
    let seen = observed(&r, &intervals(7), |x, y| region_symbol(x, y).unwrap());
    assert!(seen.len() > 20);
    for (&(a, b), &zs) in &seen {
        assert!(
            zs.is_subset_of(r.compose_basic(a, b)),
            "{} o {}: saw {}",
            r.symbol(a),
            r.symbol(b),
            r.format(zs)
        );
    }
}

#[test]
fn weights_are_row_sums_of_the_table() {
    for calc in [interval_algebra(), rcc8(), point_algebra()] {
        for b in 0..calc.p() {
            let w: usize = (0..calc.p()).map(|c| calc.compose_basic(b, c).len()).sum();
            assert_eq!(calc.weights()[b] as usize, w);
        }
        // the identity composes to a singleton with everything
        let w = calc.weights();
        assert_eq!(w[calc.identity()] as usize, calc.p());
        assert_eq!(w.iter().min(), Some(&w[calc.identity()]));
    }
}

#[test]
fn definitions_round_trip() {
    for name in ["ia", "rcc8", "point"] {
        let c = load_calculus(name).unwrap();
        let rebuilt = c.definition().build().unwrap();
        for a in 0..c.p() {
            for b in 0..c.p() {
                assert_eq!(rebuilt.compose_basic(a, b), c.compose_basic(a, b));
            }
        }
    }
}

fn calc_and_relations(k: usize) -> impl Strategy<Value = (Arc<Calculus>, Vec<Relation>)> {
    (0usize..3).prop_flat_map(move |c| {
        let calc = [interval_algebra, rcc8, point_algebra][c]();
        let max = (1u32 << calc.p()) - 1;
        proptest::collection::vec(1u32..=max, k).prop_map(move |bits| {
            (
                calc.clone(),
                bits.into_iter().map(Relation::from_bits).collect(),
            )
        })
    })
}

proptest! {
    #[test]
    fn converse_is_an_involution((calc, rs) in calc_and_relations(1)) {
        prop_assert_eq!(calc.inverse(calc.inverse(rs[0])), rs[0]);
    }

    #[test]
    fn converse_reverses_composition((calc, rs) in calc_and_relations(2)) {
        let (a, b) = (rs[0], rs[1]);
        prop_assert_eq!(
            calc.inverse(calc.compose(a, b)),
            calc.compose(calc.inverse(b), calc.inverse(a))
        );
    }

    #[test]
    fn composition_is_associative((calc, rs) in calc_and_relations(3)) {
        let (a, b, c) = (rs[0], rs[1], rs[2]);
        prop_assert_eq!(
            calc.compose(calc.compose(a, b), c),
            calc.compose(a, calc.compose(b, c))
        );
    }

    #[test]
    fn composition_distributes_over_union((calc, rs) in calc_and_relations(3)) {
        let (a, b, c) = (rs[0], rs[1], rs[2]);
        prop_assert_eq!(
            calc.compose(a, b.union(c)),
            calc.compose(a, b).union(calc.compose(a, c))
        );
    }

    #[test]
    fn identity_is_neutral((calc, rs) in calc_and_relations(1)) {
        let id = Relation::singleton(calc.identity());
        prop_assert_eq!(calc.compose(id, rs[0]), rs[0]);
        prop_assert_eq!(calc.compose(rs[0], id), rs[0]);
    }

    #[test]
    fn bounded_composition_keeps_every_supported_bit((calc, rs) in calc_and_relations(3)) {
        let (a, b, bound) = (rs[0], rs[1], rs[2]);
        prop_assert_eq!(
            calc.compose_within(a, b, bound),
            calc.compose(a, b).intersect(bound)
        );
    }
}
