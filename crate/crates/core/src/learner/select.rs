//! Query generation: which edge to ask about next, and which relation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Relation;
use crate::generation::Case;
use crate::network::{all_edges, Qcn, UniversalCheck};
use crate::oracle::Query;

/// Edge ordering used by the learner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Heuristic {
    /// Uniformly random unresolved edge and relation.
    #[default]
    Random,
    /// Fewest undecided relations first.
    Cardinality,
    /// Lowest summed relation weight first.
    Weight,
    /// Most undecided relations first.
    CardinalityDescending,
}

impl std::str::FromStr for Heuristic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(Heuristic::Random),
            "cardinality" | "card" => Ok(Heuristic::Cardinality),
            "weight" => Ok(Heuristic::Weight),
            "cardinality_descending" | "cardinality-descending" | "card-desc" => {
                Ok(Heuristic::CardinalityDescending)
            }
            other => Err(format!(
                "unknown heuristic `{other}` (expected random, cardinality, weight or cardinality_descending)"
            )),
        }
    }
}

impl std::fmt::Display for Heuristic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Heuristic::Random => "random",
            Heuristic::Cardinality => "cardinality",
            Heuristic::Weight => "weight",
            Heuristic::CardinalityDescending => "cardinality_descending",
        })
    }
}

/// Whether edge `(i, j)` still needs questions under `case`. With `verify`
/// a case-1 edge stays open until its last candidate was confirmed.
pub fn is_unresolved(g: &Qcn, case: Case, verify: bool, i: usize, j: usize) -> bool {
    let cand = g.get(i, j);
    match case {
        Case::One if verify => cand != g.confirmed(i, j),
        Case::One => !cand.is_singleton() && !cand.is_empty(),
        Case::Two => g.universal_check(i, j) == UniversalCheck::Unknown,
        Case::Three => cand != g.confirmed(i, j),
    }
}

/// Relations of `(i, j)` that are neither ruled out nor confirmed.
pub fn undecided(g: &Qcn, case: Case, i: usize, j: usize) -> Relation {
    match case {
        Case::One => g.get(i, j) - g.confirmed(i, j),
        Case::Two | Case::Three => g.get(i, j) - g.confirmed(i, j),
    }
}

/// Score of an edge: lower is picked first. Descending cardinality is
/// expressed by negation so every heuristic is an argmin.
pub fn edge_score(h: Heuristic, weights: &[u32], und: Relation) -> i64 {
    match h {
        Heuristic::Random => 0,
        Heuristic::Cardinality => und.len() as i64,
        Heuristic::CardinalityDescending => -(und.len() as i64),
        Heuristic::Weight => und.iter().map(|b| weights[b] as i64).sum(),
    }
}

/// Chooses the next query, or `None` when every edge is resolved.
///
/// `hint` gives the true relation of an edge when the oracle is simulated;
/// relations in the hint are then picked with probability `p_yes`.
///
/// `verify` makes a candidate that was never confirmed get asked even when
/// it is the only one left; in case 2 it is asked before the universal
/// check.
pub fn next_query(
    g: &Qcn,
    case: Case,
    verify: bool,
    heuristic: Heuristic,
    p_yes: f64,
    hint: &dyn Fn(usize, usize) -> Option<Relation>,
    rng: &mut impl Rng,
) -> Option<Query> {
    let weights = g.calculus().weights();
    let (i, j) = match heuristic {
        Heuristic::Random => {
            let open: Vec<(usize, usize)> = all_edges(g.n())
                .filter(|&(i, j)| is_unresolved(g, case, verify, i, j))
                .collect();
            if open.is_empty() {
                return None;
            }
            open[rng.random_range(0..open.len())]
        }
        h => {
            let mut best: Option<(i64, (usize, usize))> = None;
            for (i, j) in all_edges(g.n()) {
                if !is_unresolved(g, case, verify, i, j) {
                    continue;
                }
                let s = edge_score(h, weights, undecided(g, case, i, j));
                if best.is_none_or(|(b, _)| s < b) {
                    best = Some((s, (i, j)));
                }
            }
            best?.1
        }
    };

    if case == Case::Two {
        let cand = g.get(i, j);
        if (cand.is_singleton() && !verify) || !g.confirmed(i, j).is_empty() {
            return Some(Query::universal(i, j));
        }
    }

    let und = undecided(g, case, i, j);
    debug_assert!(!und.is_empty());
    let pool = match hint(i, j) {
        Some(h) => {
            let yes = und & h;
            let no = und - h;
            if !yes.is_empty() && !no.is_empty() {
                if rng.random_bool(p_yes) {
                    yes
                } else {
                    no
                }
            } else if yes.is_empty() {
                no
            } else {
                yes
            }
        }
        None => und,
    };
    let b = match heuristic {
        Heuristic::Random => {
            let k = rng.random_range(0..pool.len());
            pool.iter().nth(k).unwrap()
        }
        _ => pool.iter().min_by_key(|&b| (weights[b], b)).unwrap(),
    };
    Some(Query::relation(i, j, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::interval_algebra;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn no_hint(_: usize, _: usize) -> Option<Relation> {
        None
    }

    #[test]
    fn all_singletons_terminate_case_one() {
        let ia = interval_algebra();
        let mut g = Qcn::new_universal(ia.clone(), 3).unwrap();
        for (i, j) in all_edges(3) {
            g.set(i, j, ia.relation(&["P"]).unwrap());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            next_query(
                &g,
                Case::One,
                false,
                Heuristic::Random,
                0.5,
                &no_hint,
                &mut rng
            ),
            None
        );
    }

    #[test]
    fn cardinality_picks_the_small_edge() {
        let ia = interval_algebra();
        let mut g = Qcn::new_universal(ia.clone(), 3).unwrap();
        g.set(1, 2, ia.relation(&["O", "M"]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let q = next_query(
            &g,
            Case::One,
            false,
            Heuristic::Cardinality,
            0.0,
            &no_hint,
            &mut rng,
        )
        .unwrap();
        assert_eq!((q.i, q.j), (1, 2));
        let q = next_query(
            &g,
            Case::One,
            false,
            Heuristic::CardinalityDescending,
            0.0,
            &no_hint,
            &mut rng,
        )
        .unwrap();
        assert_eq!((q.i, q.j), (0, 1));
    }

    #[test]
    fn heuristic_names() {
        assert_eq!(
            "card-desc".parse::<Heuristic>().unwrap(),
            Heuristic::CardinalityDescending
        );
        assert!("fastest".parse::<Heuristic>().is_err());
    }
}
