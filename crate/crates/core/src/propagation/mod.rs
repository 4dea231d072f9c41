//! Path consistency and partial path consistency over chordal graphs.
//!
//! Both algorithms are the classic queue-based closure: an edge `(i, j)` is
//! taken off the queue and every triangle `(i, j, k)` through it gets
//!
//! ```text
//! C_ik <- C_ik ∩ (C_ij ∘ C_jk)
//! C_kj <- C_kj ∩ (C_ki ∘ C_ij)
//! ```
//!
//! Any edge that shrinks goes back on the queue. Propagation stops the moment
//! an edge becomes empty.

mod chordal;

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Relation;
use crate::network::{all_edges, edge_index, Qcn};

pub use chordal::{triangulate, ChordalStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Consistent,
    /// `edge` is the first edge that became empty.
    Inconsistent {
        edge: (usize, usize),
    },
}

/// Basic relations removed from one edge, oriented `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pruned {
    pub i: usize,
    pub j: usize,
    pub removed: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationResult {
    pub status: Status,
    /// Per-edge removals, merged and sorted by edge.
    pub pruned: Vec<Pruned>,
    /// Number of queue pops.
    pub revisions: u64,
}

impl PropagationResult {
    pub fn is_consistent(&self) -> bool {
        self.status == Status::Consistent
    }

    /// Total number of basic relations removed.
    pub fn removed_count(&self) -> usize {
        self.pruned.iter().map(|p| p.removed.len()).sum()
    }
}

/// Order in which queued edges are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PopOrder {
    #[default]
    Fifo,
    /// Uniformly random queued edge; used to test that the fixpoint does not
    /// depend on the order.
    Shuffled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcOptions {
    pub order: PopOrder,
    /// Stop composing once every bit of the current edge has a support.
    pub one_support: bool,
}

impl Default for PcOptions {
    fn default() -> Self {
        PcOptions {
            order: PopOrder::Fifo,
            one_support: true,
        }
    }
}

/// Enforces path consistency on the whole network.
pub fn path_consistency(q: &mut Qcn) -> PropagationResult {
    path_consistency_with(q, PcOptions::default())
}

pub fn path_consistency_with(q: &mut Qcn, opts: PcOptions) -> PropagationResult {
    let seeds: Vec<_> = all_edges(q.n()).collect();
    propagate(q, &seeds, None, opts)
}

/// Re-establishes path consistency after `changed` was restricted on a
/// network that was path consistent before.
pub fn path_consistency_incremental(q: &mut Qcn, changed: (usize, usize)) -> PropagationResult {
    path_consistency_from(q, &[changed], PcOptions::default())
}

/// Path consistency with the queue seeded by `seeds` only.
pub fn path_consistency_from(
    q: &mut Qcn,
    seeds: &[(usize, usize)],
    opts: PcOptions,
) -> PropagationResult {
    propagate(q, seeds, None, opts)
}

/// Enforces the triangle rule on the triangles of a chordal graph only.
pub fn partial_path_consistency(q: &mut Qcn, cs: &ChordalStructure) -> PropagationResult {
    let seeds = cs.edges();
    propagate(q, &seeds, Some(cs), PcOptions::default())
}

/// Partial path consistency seeded by `seeds`, which must be chordal edges.
pub fn partial_path_consistency_from(
    q: &mut Qcn,
    cs: &ChordalStructure,
    seeds: &[(usize, usize)],
) -> PropagationResult {
    propagate(q, seeds, Some(cs), PcOptions::default())
}

struct WorkQueue {
    items: VecDeque<(usize, usize)>,
    queued: Vec<bool>,
    n: usize,
    rng: Option<ChaCha8Rng>,
}

impl WorkQueue {
    fn new(n: usize, order: PopOrder) -> Self {
        WorkQueue {
            items: VecDeque::new(),
            queued: vec![false; n * (n - 1) / 2],
            n,
            rng: match order {
                PopOrder::Fifo => None,
                PopOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            },
        }
    }

    fn push(&mut self, i: usize, j: usize) {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let idx = edge_index(self.n, a, b);
        if !self.queued[idx] {
            self.queued[idx] = true;
            self.items.push_back((a, b));
        }
    }

    fn pop(&mut self) -> Option<(usize, usize)> {
        let e = match &mut self.rng {
            None => self.items.pop_front()?,
            Some(rng) => {
                if self.items.is_empty() {
                    return None;
                }
                let k = rng.random_range(0..self.items.len());
                self.items.swap_remove_back(k)?
            }
        };
        self.queued[edge_index(self.n, e.0, e.1)] = false;
        Some(e)
    }
}

fn propagate(
    q: &mut Qcn,
    seeds: &[(usize, usize)],
    chordal: Option<&ChordalStructure>,
    opts: PcOptions,
) -> PropagationResult {
    let n = q.n();
    let calc = q.calculus().clone();
    let universal = calc.universal();
    let mut queue = WorkQueue::new(n, opts.order);
    let mut removed: BTreeMap<(usize, usize), Relation> = BTreeMap::new();
    let mut revisions = 0u64;

    for &(i, j) in seeds {
        if q.get(i, j).is_empty() {
            let edge = if i < j { (i, j) } else { (j, i) };
            return PropagationResult {
                status: Status::Inconsistent { edge },
                pruned: Vec::new(),
                revisions,
            };
        }
        queue.push(i, j);
    }

    let compose = |r1: Relation, r2: Relation, bound: Relation| {
        if opts.one_support {
            calc.compose_within(r1, r2, bound)
        } else {
            calc.compose(r1, r2) & bound
        }
    };

    let record = |i: usize, j: usize, lost: Relation, removed: &mut BTreeMap<_, Relation>| {
        let (key, lost) = if i < j {
            ((i, j), lost)
        } else {
            ((j, i), calc.inverse(lost))
        };
        *removed.entry(key).or_insert(Relation::EMPTY) |= lost;
    };

    let mut scratch = Vec::with_capacity(n);
    while let Some((i, j)) = queue.pop() {
        revisions += 1;
        let cij = q.get(i, j);
        if cij == universal && calc.universal_absorbs() {
            continue;
        }
        scratch.clear();
        match chordal {
            None => scratch.extend((0..n).filter(|&k| k != i && k != j)),
            Some(cs) => scratch.extend(cs.common_neighbours(i, j)),
        }
        for &k in &scratch {
            let cik = q.get(i, k);
            let t = compose(cij, q.get(j, k), cik);
            if t != cik {
                q.set(i, k, t);
                record(i, k, cik - t, &mut removed);
                if t.is_empty() {
                    return finish(
                        Status::Inconsistent {
                            edge: (i.min(k), i.max(k)),
                        },
                        removed,
                        revisions,
                    );
                }
                queue.push(i, k);
            }
            let ckj = q.get(k, j);
            let t = compose(q.get(k, i), cij, ckj);
            if t != ckj {
                q.set(k, j, t);
                record(k, j, ckj - t, &mut removed);
                if t.is_empty() {
                    return finish(
                        Status::Inconsistent {
                            edge: (k.min(j), k.max(j)),
                        },
                        removed,
                        revisions,
                    );
                }
                queue.push(k, j);
            }
        }
    }
    finish(Status::Consistent, removed, revisions)
}

fn finish(
    status: Status,
    removed: BTreeMap<(usize, usize), Relation>,
    revisions: u64,
) -> PropagationResult {
    let pruned = removed
        .into_iter()
        .filter(|(_, r)| !r.is_empty())
        .map(|((i, j), removed)| Pruned { i, j, removed })
        .collect();
    PropagationResult {
        status,
        pruned,
        revisions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{interval_algebra, point_algebra};

    #[test]
    fn precedes_then_meets_gives_precedes() {
        let ia = interval_algebra();
        let mut q = Qcn::new_universal(ia.clone(), 3).unwrap();
        q.set(0, 1, ia.relation(&["P"]).unwrap());
        q.set(1, 2, ia.relation(&["M"]).unwrap());
        let res = path_consistency(&mut q);
        assert!(res.is_consistent());
        assert_eq!(q.get(0, 2), ia.relation(&["P"]).unwrap());
    }

    #[test]
    fn second_run_is_a_no_op() {
        let ia = interval_algebra();
        let mut q = Qcn::new_universal(ia.clone(), 4).unwrap();
        q.set(0, 1, ia.relation(&["O", "D"]).unwrap());
        q.set(1, 2, ia.relation(&["M"]).unwrap());
        q.set(2, 3, ia.relation(&["S", "P"]).unwrap());
        path_consistency(&mut q);
        let res = path_consistency(&mut q);
        assert!(res.is_consistent());
        assert!(res.pruned.is_empty());
    }

    #[test]
    fn contradictory_triangle_is_detected() {
        let pa = point_algebra();
        let mut q = Qcn::new_universal(pa.clone(), 3).unwrap();
        q.set(0, 1, pa.relation(&["<"]).unwrap());
        q.set(1, 2, pa.relation(&["<"]).unwrap());
        q.set(0, 2, pa.relation(&[">"]).unwrap());
        let res = path_consistency(&mut q);
        assert!(matches!(res.status, Status::Inconsistent { .. }));
    }

    #[test]
    fn incremental_on_unchanged_network_prunes_nothing() {
        let ia = interval_algebra();
        let mut q = Qcn::new_universal(ia.clone(), 4).unwrap();
        q.set(0, 1, ia.relation(&["P"]).unwrap());
        path_consistency(&mut q);
        let res = path_consistency_incremental(&mut q, (0, 1));
        assert!(res.pruned.is_empty());
    }

    #[test]
    fn empty_seed_is_inconsistent_immediately() {
        let ia = interval_algebra();
        let mut q = Qcn::new_universal(ia, 3).unwrap();
        q.set(1, 2, Relation::EMPTY);
        let res = path_consistency_incremental(&mut q, (1, 2));
        assert_eq!(res.status, Status::Inconsistent { edge: (1, 2) });
        assert_eq!(res.revisions, 0);
    }

    #[test]
    fn pruned_is_oriented_low_to_high() {
        let ia = interval_algebra();
        let mut q = Qcn::new_universal(ia.clone(), 3).unwrap();
        q.set(2, 1, ia.relation(&["P"]).unwrap());
        q.set(1, 0, ia.relation(&["P"]).unwrap());
        let res = path_consistency(&mut q);
        let e02 = res.pruned.iter().find(|p| (p.i, p.j) == (0, 2)).unwrap();
        assert_eq!(e02.removed, ia.universal() - ia.relation(&["Pi"]).unwrap());
    }
}
