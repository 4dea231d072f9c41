//! The QCN data model: a complete graph over `n` variables whose edges carry
//! a candidate relation, a confirmed relation and a universal-check flag.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{load_calculus, AlgebraError, Calculus, Relation};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("a network needs at least 2 variables, got {0}")]
    TooFewVariables(usize),
    #[error("edge ({i}, {j}) is out of range for {n} variables")]
    OutOfRange { i: usize, j: usize, n: usize },
    #[error("edge ({0}, {0}) is a self loop")]
    SelfLoop(usize),
    #[error("{count} names given for {n} variables")]
    NameCount { count: usize, n: usize },
    #[error("brute-force enumeration is limited to {max} variables for this calculus, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("network file names calculus `{file}` but `{expected}` was supplied")]
    CalculusMismatch { file: String, expected: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("cannot parse network: {0}")]
    Json(#[from] serde_json::Error),
}

/// Outcome of the case-2 follow-up question "is this pair unconstrained?".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniversalCheck {
    #[default]
    Unknown,
    ConfirmedUniversal,
    Rejected,
}

/// Everything known about one edge `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeState {
    /// Basic relations not yet ruled out.
    pub candidates: Relation,
    /// Basic relations the oracle has affirmed.
    pub confirmed: Relation,
    pub universal_check: UniversalCheck,
}

/// Index of edge `(i, j)`, `i < j`, in upper-triangular row-major order.
pub fn edge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// All edges `(i, j)` with `i < j` in lexicographic order.
pub fn all_edges(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// One basic relation per edge, stored in [`edge_index`] order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub n: usize,
    pub assignment: Vec<usize>,
}

impl Scenario {
    /// Basic relation on `(i, j)`; requires `i < j`.
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.assignment[edge_index(self.n, i, j)]
    }
}

/// A qualitative constraint network.
///
/// The full `n × n` candidate matrix is kept so that `(j, i)` reads are plain
/// lookups; every write goes through [`Qcn::set`] which keeps the two
/// triangles converse to each other.
#[derive(Clone)]
pub struct Qcn {
    calc: Arc<Calculus>,
    n: usize,
    names: Option<Vec<String>>,
    rel: Vec<Relation>,
    confirmed: Vec<Relation>,
    checks: Vec<UniversalCheck>,
}

impl PartialEq for Qcn {
    fn eq(&self, other: &Self) -> bool {
        self.calc.name() == other.calc.name()
            && self.n == other.n
            && self.names == other.names
            && self.rel == other.rel
            && self.confirmed == other.confirmed
            && self.checks == other.checks
    }
}

impl Eq for Qcn {}

impl fmt::Debug for Qcn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Qcn({}, n={})", self.calc.name(), self.n)?;
        for (i, j) in all_edges(self.n) {
            let r = self.get(i, j);
            if r != self.calc.universal() || !self.confirmed(i, j).is_empty() {
                writeln!(f, "  {i}-{j}: {}", self.calc.format(r))?;
            }
        }
        Ok(())
    }
}

impl Qcn {
    /// Complete network with every edge universal and nothing confirmed.
    pub fn new_universal(calc: Arc<Calculus>, n: usize) -> Result<Qcn, NetworkError> {
        if n < 2 {
            return Err(NetworkError::TooFewVariables(n));
        }
        let u = calc.universal();
        let id = Relation::singleton(calc.identity());
        let mut rel = vec![u; n * n];
        for i in 0..n {
            rel[i * n + i] = id;
        }
        let m = n * (n - 1) / 2;
        Ok(Qcn {
            calc,
            n,
            names: None,
            rel,
            confirmed: vec![Relation::EMPTY; m],
            checks: vec![UniversalCheck::Unknown; m],
        })
    }

    /// Network whose candidates are exactly the scenario's relations.
    pub fn from_scenario(calc: Arc<Calculus>, s: &Scenario) -> Result<Qcn, NetworkError> {
        let mut q = Qcn::new_universal(calc, s.n)?;
        for (i, j) in all_edges(s.n) {
            q.set(i, j, Relation::singleton(s.get(i, j)));
        }
        Ok(q)
    }

    pub fn calculus(&self) -> &Arc<Calculus> {
        &self.calc
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn set_names(&mut self, names: Option<Vec<String>>) -> Result<(), NetworkError> {
        if let Some(v) = &names {
            if v.len() != self.n {
                return Err(NetworkError::NameCount {
                    count: v.len(),
                    n: self.n,
                });
            }
        }
        self.names = names;
        Ok(())
    }

    /// Label of variable `i`: its name, or `v{i}`.
    pub fn name(&self, i: usize) -> String {
        match &self.names {
            Some(v) => v[i].clone(),
            None => format!("v{i}"),
        }
    }

    /// Candidate relation on `(i, j)`; `(j, i)` reads the converse.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Relation {
        self.rel[i * self.n + j]
    }

    /// Overwrites the candidates of `(i, j)` and its converse view.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, r: Relation) {
        debug_assert!(i != j);
        let inv = self.calc.inverse(r);
        self.rel[i * self.n + j] = r;
        self.rel[j * self.n + i] = inv;
    }

    pub fn check_edge(&self, i: usize, j: usize) -> Result<(), NetworkError> {
        if i >= self.n || j >= self.n {
            return Err(NetworkError::OutOfRange { i, j, n: self.n });
        }
        if i == j {
            return Err(NetworkError::SelfLoop(i));
        }
        Ok(())
    }

    pub fn confirmed(&self, i: usize, j: usize) -> Relation {
        if i < j {
            self.confirmed[edge_index(self.n, i, j)]
        } else {
            self.calc.inverse(self.confirmed[edge_index(self.n, j, i)])
        }
    }

    pub fn set_confirmed(&mut self, i: usize, j: usize, r: Relation) {
        if i < j {
            self.confirmed[edge_index(self.n, i, j)] = r;
        } else {
            let inv = self.calc.inverse(r);
            self.confirmed[edge_index(self.n, j, i)] = inv;
        }
    }

    pub fn universal_check(&self, i: usize, j: usize) -> UniversalCheck {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.checks[edge_index(self.n, a, b)]
    }

    pub fn set_universal_check(&mut self, i: usize, j: usize, c: UniversalCheck) {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.checks[edge_index(self.n, a, b)] = c;
    }

    pub fn edge(&self, i: usize, j: usize) -> EdgeState {
        EdgeState {
            candidates: self.get(i, j),
            confirmed: self.confirmed(i, j),
            universal_check: self.universal_check(i, j),
        }
    }

    /// Removes every confirmed bit and universal-check mark, keeping candidates.
    pub fn clear_knowledge(&mut self) {
        self.confirmed.iter_mut().for_each(|c| *c = Relation::EMPTY);
        self.checks
            .iter_mut()
            .for_each(|c| *c = UniversalCheck::Unknown);
    }

    /// First edge (lexicographic) whose candidates are empty.
    pub fn first_empty_edge(&self) -> Option<(usize, usize)> {
        all_edges(self.n).find(|&(i, j)| self.get(i, j).is_empty())
    }

    /// True when every edge holds exactly one basic relation.
    pub fn is_atomic(&self) -> bool {
        all_edges(self.n).all(|(i, j)| self.get(i, j).is_singleton())
    }

    /// The scenario spelled by an atomic network.
    pub fn to_scenario(&self) -> Option<Scenario> {
        let assignment = all_edges(self.n)
            .map(|(i, j)| self.get(i, j).single())
            .collect::<Option<Vec<_>>>()?;
        Some(Scenario {
            n: self.n,
            assignment,
        })
    }

    /// Largest `n` accepted by [`Qcn::enumerate_scenarios`] for this calculus.
    pub fn enumeration_limit(&self) -> usize {
        if self.calc.p() <= 3 {
            10
        } else {
            8
        }
    }

    /// Every consistent scenario drawn from the candidate sets, up to `limit`
    /// of them, by plain backtracking. Meant as a test oracle: the only
    /// pruning is the triangle check on fully assigned triangles.
    pub fn enumerate_scenarios(&self, limit: usize) -> Result<Vec<Scenario>, NetworkError> {
        let max = self.enumeration_limit();
        if self.n > max {
            return Err(NetworkError::TooLarge { n: self.n, max });
        }
        let edges: Vec<(usize, usize)> = all_edges(self.n).collect();
        let mut assign: Vec<Option<usize>> = vec![None; edges.len()];
        let mut out = Vec::new();
        self.enumerate_from(0, &edges, &mut assign, limit, &mut out);
        Ok(out)
    }

    fn enumerate_from(
        &self,
        k: usize,
        edges: &[(usize, usize)],
        assign: &mut Vec<Option<usize>>,
        limit: usize,
        out: &mut Vec<Scenario>,
    ) {
        if out.len() >= limit {
            return;
        }
        if k == edges.len() {
            out.push(Scenario {
                n: self.n,
                assignment: assign.iter().map(|a| a.unwrap()).collect(),
            });
            return;
        }
        let (i, j) = edges[k];
        for b in self.get(i, j) {
            assign[k] = Some(b);
            if self.triangles_ok(i, j, assign) {
                self.enumerate_from(k + 1, edges, assign, limit, out);
                if out.len() >= limit {
                    break;
                }
            }
        }
        assign[k] = None;
    }

    fn triangles_ok(&self, i: usize, j: usize, assign: &[Option<usize>]) -> bool {
        let n = self.n;
        let at = |a: usize, b: usize| -> Option<usize> {
            if a < b {
                assign[edge_index(n, a, b)]
            } else {
                assign[edge_index(n, b, a)].map(|x| self.calc.inverse_id(x))
            }
        };
        for k in 0..n {
            if k == i || k == j {
                continue;
            }
            let mut t = [i, j, k];
            t.sort_unstable();
            let [a, b, c] = t;
            let (Some(ab), Some(bc), Some(ac)) = (at(a, b), at(b, c), at(a, c)) else {
                continue;
            };
            if !self.calc.compose_basic(ab, bc).contains(ac) {
                return false;
            }
        }
        true
    }

    /// Whether at least one consistent scenario exists (brute force).
    pub fn is_consistent_brute(&self) -> Result<bool, NetworkError> {
        Ok(!self.enumerate_scenarios(1)?.is_empty())
    }

    pub fn to_file(&self) -> NetworkFile {
        let calc = &self.calc;
        let constraints = all_edges(self.n)
            .filter_map(|(i, j)| {
                let e = self.edge(i, j);
                let plain = e.candidates == calc.universal()
                    && e.confirmed.is_empty()
                    && e.universal_check == UniversalCheck::Unknown;
                (!plain).then(|| ConstraintEntry {
                    i,
                    j,
                    rels: calc.symbols_of(e.candidates),
                    confirmed: (!e.confirmed.is_empty()).then(|| calc.symbols_of(e.confirmed)),
                    universal_check: (e.universal_check != UniversalCheck::Unknown)
                        .then_some(e.universal_check),
                })
            })
            .collect();
        NetworkFile {
            calculus: calc.name().to_string(),
            n: self.n,
            names: self.names.clone(),
            constraints,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("network serialization cannot fail")
    }

    /// Parses a network file, resolving the calculus by name (built-in name or
    /// definition path).
    pub fn from_json(text: &str) -> Result<Qcn, NetworkError> {
        let file: NetworkFile = serde_json::from_str(text)?;
        let calc = load_calculus(&file.calculus)?;
        Qcn::from_file(&file, calc)
    }

    /// Parses a network file against an already loaded calculus.
    pub fn from_json_with(text: &str, calc: Arc<Calculus>) -> Result<Qcn, NetworkError> {
        let file: NetworkFile = serde_json::from_str(text)?;
        if file.calculus != calc.name() {
            return Err(NetworkError::CalculusMismatch {
                file: file.calculus,
                expected: calc.name().to_string(),
            });
        }
        Qcn::from_file(&file, calc)
    }

    pub fn from_file(file: &NetworkFile, calc: Arc<Calculus>) -> Result<Qcn, NetworkError> {
        let mut q = Qcn::new_universal(calc.clone(), file.n)?;
        q.set_names(file.names.clone())?;
        for c in &file.constraints {
            q.check_edge(c.i, c.j)?;
            q.set(c.i, c.j, calc.relation(&c.rels)?);
            if let Some(conf) = &c.confirmed {
                q.set_confirmed(c.i, c.j, calc.relation(conf)?);
            }
            if let Some(u) = c.universal_check {
                q.set_universal_check(c.i, c.j, u);
            }
        }
        Ok(q)
    }
}

/// On-disk form of a network (`.qcn.json`). Edges that are absent are
/// universal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub calculus: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default)]
    pub constraints: Vec<ConstraintEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintEntry {
    pub i: usize,
    pub j: usize,
    pub rels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confirmed: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub universal_check: Option<UniversalCheck>,
}
