//! A clausal theory over edge/relation atoms with procedural unit
//! propagation.
//!
//! Atom `a(i, j, b)` reads "basic relation `b` belongs to the target edge
//! `(i, j)`". Besides the asserted answers the theory holds:
//!
//! * on an exact edge (one holding a single basic relation) at most one
//!   atom is true;
//! * background clauses from the composition table,
//!   `a(i,j,b) ∧ a(j,k,b') → ∨ a(i,k,b'')` over `b'' ∈ b∘b'`, which are only
//!   sound when both antecedent edges are exact.
//!
//! Which edges are exact depends on the learning case: every edge in case 1,
//! edges known not to be universal in case 2, none in case 3. Background
//! clauses are never materialized; whenever an edge's assignment changes the
//! triangles through it are re-examined.
//!
//! There is no "at least one atom per edge" clause: the theory only knows
//! what was answered or follows from the composition table, so an edge
//! narrowed to one candidate by "no" answers alone stays unknown.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::algebra::{Calculus, Relation};
use crate::generation::Case;
use crate::network::edge_index;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict {
    pub edge: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct ClausalTheory {
    calc: Arc<Calculus>,
    n: usize,
    case: Case,
    // per edge i < j, oriented i -> j
    pos: Vec<Relation>,
    neg: Vec<Relation>,
    // case 2: whether the edge is known to be universal
    univ: Vec<Option<bool>>,
    /// Atoms fixed by propagation rather than by an answer.
    pub derived: u64,
}

impl ClausalTheory {
    pub fn new(calc: Arc<Calculus>, n: usize, case: Case) -> Self {
        let m = n * (n - 1) / 2;
        ClausalTheory {
            calc,
            n,
            case,
            pos: vec![Relation::EMPTY; m],
            neg: vec![Relation::EMPTY; m],
            univ: vec![None; m],
            derived: 0,
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        if i < j {
            edge_index(self.n, i, j)
        } else {
            edge_index(self.n, j, i)
        }
    }

    fn orient(&self, i: usize, j: usize, r: Relation) -> Relation {
        if i < j {
            r
        } else {
            self.calc.inverse(r)
        }
    }

    /// Atoms known true on `(i, j)`, oriented `i -> j`.
    pub fn positive(&self, i: usize, j: usize) -> Relation {
        self.orient(i, j, self.pos[self.idx(i, j)])
    }

    /// Atoms known false on `(i, j)`, oriented `i -> j`.
    pub fn negative(&self, i: usize, j: usize) -> Relation {
        self.orient(i, j, self.neg[self.idx(i, j)])
    }

    fn unknown(&self, i: usize, j: usize) -> Relation {
        self.calc.universal() - self.positive(i, j) - self.negative(i, j)
    }

    /// Value of atom `a(i, j, b)`, if entailed.
    pub fn value(&self, i: usize, j: usize, b: usize) -> Option<bool> {
        if self.positive(i, j).contains(b) {
            Some(true)
        } else if self.negative(i, j).contains(b) {
            Some(false)
        } else {
            None
        }
    }

    /// Whether `(i, j)` is entailed to be universal.
    pub fn universal_value(&self, i: usize, j: usize) -> Option<bool> {
        let k = self.idx(i, j);
        if let Some(v) = self.univ[k] {
            return Some(v);
        }
        if self.pos[k] == self.calc.universal() {
            Some(true)
        } else if !self.neg[k].is_empty() {
            Some(false)
        } else {
            None
        }
    }

    pub fn is_fully_assigned(&self) -> bool {
        let u = self.calc.universal();
        self.pos.iter().zip(&self.neg).all(|(p, q)| (*p | *q) == u)
    }

    fn exact(&self, i: usize, j: usize) -> bool {
        match self.case {
            Case::One => true,
            Case::Two => self.universal_value(i, j) == Some(false),
            Case::Three => false,
        }
    }

    fn add(&mut self, i: usize, j: usize, positive: Relation, negative: Relation) -> bool {
        let k = self.idx(i, j);
        let p = self.orient(i, j, positive);
        let q = self.orient(i, j, negative);
        let (np, nq) = (self.pos[k] | p, self.neg[k] | q);
        let changed = np != self.pos[k] || nq != self.neg[k];
        self.pos[k] = np;
        self.neg[k] = nq;
        changed
    }

    /// Records an answer about `a(i, j, b)` and propagates.
    pub fn assert_atom(
        &mut self,
        i: usize,
        j: usize,
        b: usize,
        value: bool,
    ) -> Result<(), Conflict> {
        let r = Relation::singleton(b);
        let changed = if value {
            self.add(i, j, r, Relation::EMPTY)
        } else {
            self.add(i, j, Relation::EMPTY, r)
        };
        if changed {
            self.propagate(i, j)
        } else {
            self.check_edge(i, j)
        }
    }

    /// Records the answer to "is `(i, j)` unconstrained?" and propagates.
    pub fn assert_universal(&mut self, i: usize, j: usize, value: bool) -> Result<(), Conflict> {
        let k = self.idx(i, j);
        match self.univ[k] {
            Some(v) if v != value => {
                return Err(Conflict {
                    edge: (i.min(j), i.max(j)),
                })
            }
            _ => self.univ[k] = Some(value),
        }
        self.propagate(i, j)
    }

    fn check_edge(&self, i: usize, j: usize) -> Result<(), Conflict> {
        let k = self.idx(i, j);
        if !(self.pos[k] & self.neg[k]).is_empty() {
            return Err(Conflict {
                edge: (i.min(j), i.max(j)),
            });
        }
        Ok(())
    }

    // Edge-local rules.
    fn close_edge(&mut self, i: usize, j: usize) -> Result<(), Conflict> {
        let (a, b) = (i.min(j), i.max(j));
        let k = self.idx(a, b);
        let u = self.calc.universal();
        let conflict = Err(Conflict { edge: (a, b) });
        loop {
            let before = (self.pos[k], self.neg[k], self.univ[k]);
            if !(self.pos[k] & self.neg[k]).is_empty() {
                return conflict;
            }
            if self.case == Case::Two {
                if !self.neg[k].is_empty() {
                    if self.univ[k] == Some(true) {
                        return conflict;
                    }
                    self.univ[k] = Some(false);
                }
                if self.pos[k].len() >= 2 {
                    if self.univ[k] == Some(false) {
                        return conflict;
                    }
                    self.univ[k] = Some(true);
                }
                if self.univ[k] == Some(true) {
                    if !self.neg[k].is_empty() {
                        return conflict;
                    }
                    self.pos[k] = u;
                }
            }
            if self.exact(a, b) {
                if self.pos[k].len() > 1 {
                    return conflict;
                }
                if self.pos[k].len() == 1 {
                    self.neg[k] = u - self.pos[k];
                }
            }
            if (self.pos[k], self.neg[k], self.univ[k]) == before {
                break;
            }
        }
        Ok(())
    }

    fn propagate(&mut self, i: usize, j: usize) -> Result<(), Conflict> {
        let mut queue = VecDeque::new();
        let mut queued = vec![false; self.pos.len()];
        self.close_edge(i, j)?;
        queue.push_back((i.min(j), i.max(j)));
        queued[self.idx(i, j)] = true;
        while let Some((i, j)) = queue.pop_front() {
            queued[self.idx(i, j)] = false;
            for k in 0..self.n {
                if k == i || k == j {
                    continue;
                }
                for (x, y, z) in [(i, j, k), (k, i, j), (i, k, j)] {
                    for (e0, e1) in self.family(x, y, z)? {
                        self.close_edge(e0, e1)?;
                        let id = self.idx(e0, e1);
                        if !queued[id] {
                            queued[id] = true;
                            queue.push_back((e0.min(e1), e0.max(e1)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    // Unit propagation over the clauses a(x,y,b) ∧ a(y,z,b') → ∨ a(x,z,·).
    // Returns the edges that gained assignments.
    fn family(&mut self, x: usize, y: usize, z: usize) -> Result<Vec<(usize, usize)>, Conflict> {
        if !(self.exact(x, y) && self.exact(y, z)) {
            return Ok(Vec::new());
        }
        let calc = self.calc.clone();
        let (p1, p2) = (self.positive(x, y), self.positive(y, z));
        let (u1, u2) = (self.unknown(x, y), self.unknown(y, z));
        let (n3, p3) = (self.negative(x, z), self.positive(x, z));
        let mut touched = Vec::new();
        let mut new_p3 = Relation::EMPTY;
        for b in p1 {
            for c in p2 {
                let rest = calc.compose_basic(b, c) - n3;
                if rest.is_empty() {
                    return Err(Conflict {
                        edge: (x.min(z), x.max(z)),
                    });
                }
                if rest.is_singleton() && (rest & p3).is_empty() {
                    new_p3 |= rest;
                }
            }
        }
        if !new_p3.is_empty() && self.add(x, z, new_p3, Relation::EMPTY) {
            self.derived += new_p3.len() as u64;
            touched.push((x, z));
        }
        let mut new_n2 = Relation::EMPTY;
        for b in p1 {
            for c in u2 {
                if calc.compose_basic(b, c).is_subset_of(n3) {
                    new_n2.insert(c);
                }
            }
        }
        if !new_n2.is_empty() && self.add(y, z, Relation::EMPTY, new_n2) {
            self.derived += new_n2.len() as u64;
            touched.push((y, z));
        }
        let mut new_n1 = Relation::EMPTY;
        for b in u1 {
            for c in p2 {
                if calc.compose_basic(b, c).is_subset_of(n3) {
                    new_n1.insert(b);
                }
            }
        }
        if !new_n1.is_empty() && self.add(x, y, Relation::EMPTY, new_n1) {
            self.derived += new_n1.len() as u64;
            touched.push((x, y));
        }
        Ok(touched)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::interval_algebra;

    #[test]
    fn precedes_chain_fixes_the_third_edge() {
        let ia = interval_algebra();
        let p = ia.id_of("P").unwrap();
        let mut t = ClausalTheory::new(ia.clone(), 3, Case::One);
        t.assert_atom(0, 1, p, true).unwrap();
        t.assert_atom(1, 2, p, true).unwrap();
        assert_eq!(t.value(0, 2, p), Some(true));
        for b in 0..13 {
            if b != p {
                assert_eq!(t.value(0, 2, b), Some(false));
            }
        }
        assert!(t.is_fully_assigned());
    }

    #[test]
    fn wide_clause_stays_open() {
        let ia = interval_algebra();
        let p = ia.id_of("P").unwrap();
        let d = ia.id_of("D").unwrap();
        let mut t = ClausalTheory::new(ia.clone(), 3, Case::One);
        t.assert_atom(0, 1, p, true).unwrap();
        t.assert_atom(1, 2, d, true).unwrap();
        // the converse clauses rule out everything outside P∘D = {P, O, M, D, S}
        // but no single relation is forced
        let pd = ia.compose_basic(p, d);
        for b in 0..13 {
            let expected = if pd.contains(b) { None } else { Some(false) };
            assert_eq!(t.value(0, 2, b), expected, "{}", ia.symbol(b));
        }
    }

    #[test]
    fn case_three_has_no_background_inference() {
        let ia = interval_algebra();
        let p = ia.id_of("P").unwrap();
        let mut t = ClausalTheory::new(ia.clone(), 3, Case::Three);
        t.assert_atom(0, 1, p, true).unwrap();
        t.assert_atom(1, 2, p, true).unwrap();
        assert_eq!(t.value(0, 2, p), None);
    }

    #[test]
    fn contradiction_is_reported() {
        let ia = interval_algebra();
        let p = ia.id_of("P").unwrap();
        let mut t = ClausalTheory::new(ia.clone(), 3, Case::One);
        t.assert_atom(0, 1, p, true).unwrap();
        t.assert_atom(1, 2, p, true).unwrap();
        assert!(t.assert_atom(0, 2, p, false).is_err());
    }

    #[test]
    fn case_two_universal_answers() {
        let ia = interval_algebra();
        let mut t = ClausalTheory::new(ia.clone(), 3, Case::Two);
        t.assert_atom(0, 1, 0, true).unwrap();
        t.assert_atom(0, 1, 3, true).unwrap();
        assert_eq!(t.universal_value(0, 1), Some(true));
        assert_eq!(t.value(0, 1, 7), Some(true));
        t.assert_atom(1, 2, 4, false).unwrap();
        assert_eq!(t.universal_value(1, 2), Some(false));
    }
}
