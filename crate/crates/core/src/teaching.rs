//! Brute-force teaching dimension for tiny concept classes.
//!
//! An instance is a triple `(i, j, b)`; a concept labels an instance
//! positive when `b` belongs to edge `(i, j)` of the network it comes from.
//! The teaching dimension of a class is the largest, over its concepts, of
//! the smallest instance set on which no other concept of the class agrees.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Calculus, Relation};
use crate::network::{all_edges, NetworkError, Qcn};

#[derive(Debug, Error)]
pub enum TeachingError {
    #[error("brute force is limited to n <= 3 and p <= 3, got n = {n}, p = {p}")]
    TooLarge { n: usize, p: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConceptKind {
    /// One basic relation per edge.
    Complete,
    /// Each edge a single basic relation or the universal relation.
    Incomplete,
    /// Any non-empty relation per edge.
    All,
}

impl fmt::Display for ConceptKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConceptKind::Complete => "complete",
            ConceptKind::Incomplete => "incomplete",
            ConceptKind::All => "all",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ConceptClass {
    pub kind: ConceptKind,
    pub calc: Arc<Calculus>,
    pub n: usize,
    /// Keep only concepts whose network has a consistent scenario. On by
    /// default for the complete class, off for the others.
    pub require_consistency: bool,
}

impl ConceptClass {
    pub fn new(kind: ConceptKind, calc: Arc<Calculus>, n: usize) -> Self {
        ConceptClass {
            kind,
            calc,
            n,
            require_consistency: kind == ConceptKind::Complete,
        }
    }

    /// Size of the instance space, `n(n-1)p/2`.
    pub fn instance_count(&self) -> usize {
        self.n * (self.n - 1) / 2 * self.calc.p()
    }

    /// The value the closed-form result predicts for this class.
    pub fn formula(&self) -> usize {
        let m = self.n * (self.n - 1) / 2;
        match self.kind {
            ConceptKind::Complete => m,
            ConceptKind::Incomplete => 2 * m,
            ConceptKind::All => self.instance_count(),
        }
    }
}

/// Labels of every instance, bit `edge_index * p + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Concept {
    pub labeling: u64,
}

impl Concept {
    pub fn label(&self, instance: usize) -> bool {
        self.labeling >> instance & 1 == 1
    }
}

fn concept_of(relations: &[Relation], p: usize) -> Concept {
    let labeling = relations
        .iter()
        .enumerate()
        .fold(0u64, |acc, (e, r)| acc | (r.bits() as u64) << (e * p));
    Concept { labeling }
}

/// Every concept of the class, sorted and without duplicates.
pub fn enumerate_concepts(cls: &ConceptClass) -> Result<Vec<Concept>, TeachingError> {
    let p = cls.calc.p();
    if cls.n > 3 || p > 3 || cls.n < 2 {
        return Err(TeachingError::TooLarge { n: cls.n, p });
    }
    let m = cls.n * (cls.n - 1) / 2;
    let edge_choices: Vec<Relation> = match cls.kind {
        ConceptKind::Complete => (0..p).map(Relation::singleton).collect(),
        ConceptKind::Incomplete => (0..p)
            .map(Relation::singleton)
            .chain([cls.calc.universal()])
            .collect(),
        ConceptKind::All => (1..(1u32 << p)).map(Relation::from_bits).collect(),
    };
    let mut out = Vec::new();
    let mut pick = vec![0usize; m];
    loop {
        let rels: Vec<Relation> = pick.iter().map(|&k| edge_choices[k]).collect();
        let keep = if cls.require_consistency {
            let mut q = Qcn::new_universal(cls.calc.clone(), cls.n)?;
            for ((i, j), r) in all_edges(cls.n).zip(&rels) {
                q.set(i, j, *r);
            }
            q.is_consistent_brute()?
        } else {
            true
        };
        if keep {
            out.push(concept_of(&rels, p));
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == m {
                out.sort();
                out.dedup();
                return Ok(out);
            }
            pick[pos] += 1;
            if pick[pos] < edge_choices.len() {
                break;
            }
            pick[pos] = 0;
            pos += 1;
        }
    }
}

/// A smallest instance set on which `concepts[target]` differs from every
/// other concept, found by trying subsets in order of increasing size.
pub fn minimum_teaching_set(concepts: &[Concept], target: usize, instances: usize) -> Vec<usize> {
    let f = concepts[target].labeling;
    let diffs: Vec<u64> = concepts
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != target)
        .map(|(_, g)| g.labeling ^ f)
        .collect();
    for size in 0..=instances {
        if let Some(mask) =
            subsets_of_size(instances, size).find(|&t| diffs.iter().all(|d| d & t != 0))
        {
            return (0..instances).filter(|&x| mask >> x & 1 == 1).collect();
        }
    }
    (0..instances).collect()
}

// Bitmasks over `n` bits with exactly `k` set, in increasing order.
fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let mut cur = if k == 0 {
        Some(0u64)
    } else {
        Some((1u64 << k) - 1)
    };
    std::iter::from_fn(move || {
        let c = cur?;
        if c >= limit {
            cur = None;
            return None;
        }
        cur = if c == 0 {
            None
        } else {
            // Gosper's hack
            let u = c & c.wrapping_neg();
            let v = c + u;
            Some(v + (((v ^ c) / u) >> 2))
        };
        Some(c)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeachingReport {
    pub kind: ConceptKind,
    pub n: usize,
    pub p: usize,
    pub concepts: usize,
    pub instances: usize,
    pub dimension: usize,
    pub formula: usize,
    /// Labeling of a concept attaining the dimension.
    pub hardest: u64,
    /// Every minimum set was re-checked to separate its concept.
    pub verified: bool,
}

impl TeachingReport {
    pub fn matches(&self) -> bool {
        self.dimension == self.formula
    }
}

pub fn teaching_dimension(cls: &ConceptClass) -> Result<TeachingReport, TeachingError> {
    let concepts = enumerate_concepts(cls)?;
    let instances = cls.instance_count();
    let sets: Vec<Vec<usize>> = (0..concepts.len())
        .into_par_iter()
        .map(|k| minimum_teaching_set(&concepts, k, instances))
        .collect();
    let verified = sets.iter().enumerate().all(|(k, set)| {
        concepts
            .iter()
            .enumerate()
            .all(|(g, other)| g == k || set.iter().any(|&x| other.label(x) != concepts[k].label(x)))
    });
    let (hardest, dimension) = sets
        .iter()
        .enumerate()
        .map(|(k, s)| (k, s.len()))
        .max_by_key(|&(k, s)| (s, std::cmp::Reverse(k)))
        .unwrap_or((0, 0));
    Ok(TeachingReport {
        kind: cls.kind,
        n: cls.n,
        p: cls.calc.p(),
        concepts: concepts.len(),
        instances,
        dimension,
        formula: cls.formula(),
        hardest: concepts.get(hardest).map_or(0, |c| c.labeling),
        verified,
    })
}
