//! Membership queries and the oracles that answer them.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Calculus, Relation};
use crate::network::Qcn;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("query on ({i}, {j}) is out of range for {n} variables")]
    OutOfRange { i: usize, j: usize, n: usize },
    #[error("basic relation {0} does not exist in this calculus")]
    UnknownRelation(usize),
    #[error("the oracle gave up: {0}")]
    Aborted(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QueryKind {
    /// "Does basic relation `b` hold between i and j?"
    Relation { b: usize },
    /// "Is the pair i, j unconstrained?"
    Universal,
}

/// A yes/no question about edge `(i, j)`, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Query {
    pub i: usize,
    pub j: usize,
    #[serde(flatten)]
    pub kind: QueryKind,
}

impl Query {
    pub fn relation(i: usize, j: usize, b: usize) -> Query {
        Query {
            i,
            j,
            kind: QueryKind::Relation { b },
        }
    }

    pub fn universal(i: usize, j: usize) -> Query {
        Query {
            i,
            j,
            kind: QueryKind::Universal,
        }
    }
}

/// An oracle reply. `was_mistake` is bookkeeping for the harness; learners
/// never look at it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub yes: bool,
    pub was_mistake: bool,
}

impl Answer {
    pub fn truthful(yes: bool) -> Answer {
        Answer {
            yes,
            was_mistake: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub p_mistake: f64,
    pub seed: u64,
    /// Re-asked questions are answered truthfully.
    pub reask_truthful: bool,
    /// A question asked again in normal querying gets the answer it got
    /// last time; only a re-ask can change it. Mistakes are thus a property
    /// of the question, not of each asking.
    #[serde(default = "yes")]
    pub consistent_user: bool,
}

fn yes() -> bool {
    true
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            p_mistake: 0.0,
            seed: 0,
            reask_truthful: true,
            consistent_user: true,
        }
    }
}

/// Something that answers queries about a hidden network.
pub trait Oracle {
    fn ask(&mut self, q: &Query, is_reask: bool) -> Result<Answer, OracleError>;

    /// The true relation on `(i, j)`, when the oracle is a simulation that
    /// may share it. Used only to bias which relation gets asked.
    fn target_hint(&self, _i: usize, _j: usize) -> Option<Relation> {
        None
    }
}

/// The truthful answer to `q` against `target`.
pub fn truthful_answer(target: &Qcn, q: &Query) -> Result<bool, OracleError> {
    let n = target.n();
    if q.i >= n || q.j >= n || q.i == q.j {
        return Err(OracleError::OutOfRange { i: q.i, j: q.j, n });
    }
    let r = target.get(q.i, q.j);
    match q.kind {
        QueryKind::Relation { b } => {
            if b >= target.calculus().p() {
                return Err(OracleError::UnknownRelation(b));
            }
            Ok(r.contains(b))
        }
        QueryKind::Universal => Ok(r == target.calculus().universal()),
    }
}

/// Answers `q` against `target`, flipping the truth with probability
/// `p_mistake` unless this is a re-ask and re-asks are truthful. Mistakes
/// apply to both kinds of query.
pub fn ask_simulated(
    target: &Qcn,
    q: &Query,
    cfg: &OracleConfig,
    is_reask: bool,
    rng: &mut impl Rng,
) -> Result<Answer, OracleError> {
    let truth = truthful_answer(target, q)?;
    if is_reask && cfg.reask_truthful {
        return Ok(Answer::truthful(truth));
    }
    let flip = cfg.p_mistake > 0.0 && rng.random_bool(cfg.p_mistake);
    Ok(Answer {
        yes: truth ^ flip,
        was_mistake: flip,
    })
}

/// A deterministic simulated user.
#[derive(Debug, Clone)]
pub struct SimulatedOracle {
    target: Qcn,
    cfg: OracleConfig,
    rng: ChaCha8Rng,
    given: HashMap<Query, bool>,
    pub asked: u64,
    pub yes_answers: u64,
    pub mistakes_injected: u64,
}

impl SimulatedOracle {
    pub fn new(target: Qcn, cfg: OracleConfig) -> Self {
        SimulatedOracle {
            target,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg,
            given: HashMap::new(),
            asked: 0,
            yes_answers: 0,
            mistakes_injected: 0,
        }
    }

    pub fn truthful(target: Qcn) -> Self {
        SimulatedOracle::new(target, OracleConfig::default())
    }

    pub fn target(&self) -> &Qcn {
        &self.target
    }

    pub fn config(&self) -> &OracleConfig {
        &self.cfg
    }
}

impl Oracle for SimulatedOracle {
    fn ask(&mut self, q: &Query, is_reask: bool) -> Result<Answer, OracleError> {
        let remembered = match self.given.get(q) {
            Some(&yes) if self.cfg.consistent_user && !is_reask => Some(yes),
            _ => None,
        };
        let a = match remembered {
            Some(yes) => Answer {
                yes,
                was_mistake: yes != truthful_answer(&self.target, q)?,
            },
            None => {
                let a = ask_simulated(&self.target, q, &self.cfg, is_reask, &mut self.rng)?;
                self.mistakes_injected += a.was_mistake as u64;
                a
            }
        };
        if self.cfg.consistent_user {
            self.given.insert(*q, a.yes);
        }
        self.asked += 1;
        self.yes_answers += a.yes as u64;
        Ok(a)
    }

    fn target_hint(&self, i: usize, j: usize) -> Option<Relation> {
        Some(self.target.get(i, j))
    }
}

/// Natural-language form of a query, e.g. `Does 'John rides' overlap
/// 'soccer game'?`.
pub fn render_query(q: &Query, name_i: &str, name_j: &str, calc: &Calculus) -> String {
    match q.kind {
        QueryKind::Universal => {
            format!("Is there no known constraint between '{name_i}' and '{name_j}'?")
        }
        QueryKind::Relation { b } => match &calc.basics()[b].phrase {
            Some(phrase) => format!("Does '{name_i}' {phrase} '{name_j}'?"),
            None => format!(
                "Does '{name_i}' stand in relation {} to '{name_j}'?",
                calc.symbol(b)
            ),
        },
    }
}

/// [`render_query`] using the network's variable names.
pub fn render_for(q: &Query, net: &Qcn) -> String {
    render_query(q, &net.name(q.i), &net.name(q.j), net.calculus())
}
