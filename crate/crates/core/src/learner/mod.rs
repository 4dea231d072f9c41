//! Query-based acquisition of a network from a yes/no oracle.
//!
//! [`Learner`] is a step-wise state machine: [`Learner::prompt`] yields the
//! next question and [`Learner::answer`] feeds the reply back. The simulated
//! driver [`learn`] and the HTTP elicitation service both sit on top of it.
//!
//! With mistakes enabled every forward question pushes a snapshot of the
//! network. When an answer makes the network inconsistent the learner pops
//! the most recent snapshot, restores it and asks that snapshot's question
//! again. A re-asked answer that matches the original is taken as confirmed
//! and the next snapshot is popped; popping stops at the first answer the
//! oracle changes, and goes on if the corrected state is still inconsistent.
//! Querying then resumes forward from the corrected state.

mod select;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Relation;
use crate::generation::Case;
use crate::network::{all_edges, NetworkError, Qcn, UniversalCheck};
use crate::oracle::{Oracle, OracleError, Query, QueryKind};
use crate::propagation::{
    partial_path_consistency, partial_path_consistency_from, path_consistency,
    path_consistency_incremental, triangulate, ChordalStructure, Pruned,
};

pub use select::{edge_score, is_unresolved, next_query, undecided, Heuristic};

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("invalid learner configuration: {0}")]
    InvalidConfig(String),
    #[error("no question is outstanding")]
    NoPendingQuery,
    #[error("the learner has already finished")]
    Finished,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Propagation {
    None,
    #[default]
    Pc,
    /// Partial path consistency on a chordal graph of the known edges.
    Ppc,
}

impl std::str::FromStr for Propagation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Propagation::None),
            "pc" => Ok(Propagation::Pc),
            "ppc" => Ok(Propagation::Ppc),
            other => Err(format!(
                "unknown propagation `{other}` (expected none, pc or ppc)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub case: Case,
    pub propagation: Propagation,
    pub heuristic: Heuristic,
    /// Probability of asking a relation the simulated target holds, when
    /// the edge has both kinds left. Ignored without a target hint.
    pub p_yes_bias: f64,
    pub seed: u64,
    pub mistakes_enabled: bool,
    /// An edge narrowed to one candidate without a "yes" is not resolved
    /// until that candidate is asked (cases 1 and 2). Without it a wrong "no"
    /// can leave a different but consistent scenario that nothing ever
    /// contradicts, so mistake handling needs it to detect every error.
    #[serde(default)]
    pub verify_singletons: bool,
}

impl LearnerConfig {
    pub fn new(case: Case, propagation: Propagation, heuristic: Heuristic) -> Self {
        LearnerConfig {
            case,
            propagation,
            heuristic,
            p_yes_bias: 0.0,
            seed: 0,
            mistakes_enabled: false,
            verify_singletons: false,
        }
    }

    pub fn validate(&self) -> Result<(), LearnerError> {
        if self.propagation == Propagation::Ppc && self.case != Case::Two {
            return Err(LearnerError::InvalidConfig(
                "ppc propagation is only meaningful for case 2".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.p_yes_bias) {
            return Err(LearnerError::InvalidConfig(format!(
                "p_yes_bias {} not in [0, 1]",
                self.p_yes_bias
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    /// Every answered question, re-asks included.
    pub queries: u64,
    pub yes_answers: u64,
    /// Snapshots popped.
    pub backtracks: u64,
    /// Re-asked questions whose new answer differs from the original.
    pub detected_mistakes: u64,
    pub reasks: u64,
    /// Basic relations removed by propagation.
    pub pruned_by_pc: u64,
    pub wall_time: Duration,
}

/// A question waiting for an answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingQuery {
    pub query: Query,
    /// For a re-asked question, the answer originally given.
    pub reask: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prompt {
    Ask(PendingQuery),
    Converged,
    Collapsed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Running,
    Reasking,
    Converged,
    Collapsed,
}

/// What one answer did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReport {
    /// Removals made by propagation after this answer.
    pub pruned: Vec<Pruned>,
    /// The answer (or propagation) emptied an edge.
    pub inconsistent: bool,
    /// A re-asked answer differed from the original one.
    pub mistake_detected: bool,
    pub phase: Phase,
}

#[derive(Debug, Clone)]
struct Frame {
    net: Qcn,
    query: Query,
    answer_given: bool,
    rng: ChaCha8Rng,
    scheduled: Option<(usize, usize)>,
}

/// The acquisition state machine.
#[derive(Debug, Clone)]
pub struct Learner {
    cfg: LearnerConfig,
    net: Qcn,
    rng: ChaCha8Rng,
    stack: Vec<Frame>,
    pending: Option<PendingQuery>,
    // rng state right after the pending forward query was chosen
    pending_rng: Option<ChaCha8Rng>,
    // case 2: universal check owed for this edge
    scheduled: Option<(usize, usize)>,
    chordal: Option<ChordalStructure>,
    phase: Phase,
    stats: RunStats,
}

impl Learner {
    /// Starts from `initial`, normally [`Qcn::new_universal`].
    pub fn new(cfg: LearnerConfig, initial: Qcn) -> Result<Self, LearnerError> {
        cfg.validate()?;
        Ok(Learner {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg,
            net: initial,
            stack: Vec::new(),
            pending: None,
            pending_rng: None,
            scheduled: None,
            chordal: None,
            phase: Phase::Running,
            stats: RunStats::default(),
        })
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.cfg
    }

    /// Current knowledge, including confirmed sets and universal checks.
    pub fn network(&self) -> &Qcn {
        &self.net
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn pending(&self) -> Option<PendingQuery> {
        self.pending
    }

    pub fn stack_depth(&self) -> usize {
        self.stack.len()
    }

    /// The network learned so far: candidates only, with edges confirmed
    /// universal by a case-2 check reported as universal.
    pub fn learned(&self) -> Qcn {
        let mut out = self.net.clone();
        let u = out.calculus().universal();
        for (i, j) in all_edges(out.n()) {
            if out.universal_check(i, j) == UniversalCheck::ConfirmedUniversal {
                out.set(i, j, u);
            }
        }
        out.clear_knowledge();
        out
    }

    /// The outstanding question, choosing a new one if needed.
    pub fn prompt(&mut self, hint: &dyn Fn(usize, usize) -> Option<Relation>) -> Prompt {
        loop {
            match self.phase {
                Phase::Converged => return Prompt::Converged,
                Phase::Collapsed => return Prompt::Collapsed,
                _ => {}
            }
            if let Some(p) = self.pending {
                return Prompt::Ask(p);
            }
            let query = match self.scheduled.take() {
                Some((i, j)) => Some(Query::universal(i, j)),
                None => next_query(
                    &self.net,
                    self.cfg.case,
                    self.cfg.verify_singletons,
                    self.cfg.heuristic,
                    self.cfg.p_yes_bias,
                    hint,
                    &mut self.rng,
                ),
            };
            match query {
                Some(query) => {
                    self.pending = Some(PendingQuery { query, reask: None });
                    self.pending_rng = Some(self.rng.clone());
                }
                None => {
                    if self.final_check_fails() {
                        self.inconsistency();
                        continue;
                    }
                    self.phase = Phase::Converged;
                }
            }
        }
    }

    // Without full PC along the way, an all-resolved network can still be
    // inconsistent; check once at the end.
    fn final_check_fails(&self) -> bool {
        if self.cfg.propagation == Propagation::Pc {
            return false;
        }
        let mut probe = self.learned();
        !path_consistency(&mut probe).is_consistent()
    }

    /// Applies the answer to the outstanding question.
    pub fn answer(&mut self, yes: bool) -> Result<StepReport, LearnerError> {
        if matches!(self.phase, Phase::Converged | Phase::Collapsed) {
            return Err(LearnerError::Finished);
        }
        let pending = self.pending.take().ok_or(LearnerError::NoPendingQuery)?;
        let rng_after = self.pending_rng.take();
        self.stats.queries += 1;
        self.stats.yes_answers += yes as u64;
        let mut mistake_detected = false;
        match pending.reask {
            None => {
                if self.cfg.mistakes_enabled {
                    self.stack.push(Frame {
                        net: self.net.clone(),
                        query: pending.query,
                        answer_given: yes,
                        rng: rng_after.unwrap_or_else(|| self.rng.clone()),
                        scheduled: self.scheduled,
                    });
                }
            }
            Some(original) => {
                self.stats.reasks += 1;
                if original == yes {
                    // confirmed; the culprit is further down the stack
                    self.inconsistency();
                    return Ok(StepReport {
                        pruned: Vec::new(),
                        inconsistent: true,
                        mistake_detected,
                        phase: self.phase,
                    });
                }
                self.stats.detected_mistakes += 1;
                mistake_detected = true;
            }
        }

        let (pruned, consistent) = self.apply(pending.query, yes);
        if consistent {
            self.phase = Phase::Running;
        } else {
            self.inconsistency();
        }
        Ok(StepReport {
            pruned,
            inconsistent: !consistent,
            mistake_detected,
            phase: self.phase,
        })
    }

    // Either collapse or pop a snapshot and re-ask its question.
    fn inconsistency(&mut self) {
        if !self.cfg.mistakes_enabled {
            self.phase = Phase::Collapsed;
            return;
        }
        match self.stack.pop() {
            None => self.phase = Phase::Collapsed,
            Some(frame) => {
                self.stats.backtracks += 1;
                self.net = frame.net;
                self.rng = frame.rng;
                self.scheduled = frame.scheduled;
                self.chordal = None;
                self.pending = Some(PendingQuery {
                    query: frame.query,
                    reask: Some(frame.answer_given),
                });
                self.pending_rng = None;
                self.phase = Phase::Reasking;
            }
        }
    }

    /// Updates the edge, propagates if it shrank, and reports consistency.
    fn apply(&mut self, q: Query, yes: bool) -> (Vec<Pruned>, bool) {
        let (i, j) = (q.i, q.j);
        let before = self.net.get(i, j);
        let u = self.net.calculus().universal();
        let conf = self.net.confirmed(i, j);
        match (self.cfg.case, q.kind) {
            (Case::One, QueryKind::Relation { b }) => {
                if yes {
                    self.net.set(i, j, before & Relation::singleton(b));
                    self.net.set_confirmed(i, j, Relation::singleton(b));
                } else {
                    self.net.set(i, j, before.without(b));
                }
            }
            (Case::Two, QueryKind::Relation { b }) => {
                if yes {
                    self.net.set_confirmed(i, j, conf.with(b));
                    self.scheduled = Some((i, j));
                } else {
                    self.net.set(i, j, before.without(b));
                }
            }
            (Case::Two, QueryKind::Universal) => {
                if yes {
                    self.net.set(i, j, u);
                    self.net.set_confirmed(i, j, u);
                    self.net
                        .set_universal_check(i, j, UniversalCheck::ConfirmedUniversal);
                } else {
                    let kept = if conf.is_empty() {
                        before
                    } else {
                        before & conf
                    };
                    self.net.set(i, j, kept);
                    self.net.set_confirmed(i, j, kept);
                    self.net.set_universal_check(i, j, UniversalCheck::Rejected);
                }
            }
            (Case::Three, QueryKind::Relation { b }) => {
                if yes {
                    self.net.set_confirmed(i, j, conf.with(b) & before);
                } else {
                    self.net.set(i, j, before.without(b));
                }
            }
            (_, QueryKind::Universal) => {
                // universal checks only exist in case 2; nothing to record
            }
        }
        let after = self.net.get(i, j);
        if after.is_empty() {
            return (Vec::new(), false);
        }
        if after == before || !after.is_subset_of(before) {
            return (Vec::new(), true);
        }
        let res = match self.cfg.propagation {
            Propagation::None => return (Vec::new(), true),
            Propagation::Pc => path_consistency_incremental(&mut self.net, (i, j)),
            Propagation::Ppc => self.ppc(i, j),
        };
        self.stats.pruned_by_pc += res.removed_count() as u64;
        for p in &res.pruned {
            let c = self.net.confirmed(p.i, p.j);
            let cand = self.net.get(p.i, p.j);
            if !c.is_subset_of(cand) {
                self.net.set_confirmed(p.i, p.j, c & cand);
            }
        }
        let ok = res.is_consistent();
        (res.pruned, ok)
    }

    fn ppc(&mut self, i: usize, j: usize) -> crate::propagation::PropagationResult {
        let fresh = match &self.chordal {
            Some(cs) => !cs.contains(i, j),
            None => true,
        };
        if fresh {
            let u = self.net.calculus().universal();
            let known: Vec<(usize, usize)> = all_edges(self.net.n())
                .filter(|&(a, b)| self.net.get(a, b) != u)
                .collect();
            let cs = triangulate(&self.net, &known);
            let res = partial_path_consistency(&mut self.net, &cs);
            self.chordal = Some(cs);
            res
        } else {
            let cs = self.chordal.as_ref().expect("checked above");
            partial_path_consistency_from(&mut self.net, cs, &[(i, j)])
        }
    }
}

/// Result of a simulated run.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// The learned network (the state reached, if the run collapsed).
    pub network: Qcn,
    pub converged: bool,
    /// The run hit [`query_budget`] and was stopped.
    pub exhausted: bool,
    pub stats: RunStats,
}

/// Hard cap on answered questions, far above anything a terminating run
/// needs; protects against oracles that never settle.
pub fn query_budget(n: usize, p: usize) -> u64 {
    let edges = (n * (n - 1) / 2) as u64;
    edges * (p as u64 + 1) * 1000 + 10_000
}

/// Runs the learner against an oracle until it converges or collapses.
pub fn learn(
    cfg: LearnerConfig,
    oracle: &mut dyn Oracle,
    initial: Qcn,
) -> Result<RunResult, LearnerError> {
    let start = Instant::now();
    let budget = query_budget(initial.n(), initial.calculus().p());
    let mut learner = Learner::new(cfg, initial)?;
    let mut exhausted = false;
    let converged = loop {
        let prompt = {
            let o: &dyn Oracle = oracle;
            learner.prompt(&|i, j| o.target_hint(i, j))
        };
        match prompt {
            Prompt::Converged => break true,
            Prompt::Collapsed => break false,
            Prompt::Ask(p) => {
                if learner.stats.queries >= budget {
                    exhausted = true;
                    break false;
                }
                let a = oracle.ask(&p.query, p.reask.is_some())?;
                learner.answer(a.yes)?;
            }
        }
    };
    learner.stats.wall_time = start.elapsed();
    Ok(RunResult {
        network: learner.learned(),
        converged,
        exhausted,
        stats: learner.stats,
    })
}

/// [`learn`] with snapshot backtracking switched on.
pub fn learn_with_mistakes(
    mut cfg: LearnerConfig,
    oracle: &mut dyn Oracle,
    initial: Qcn,
) -> Result<RunResult, LearnerError> {
    cfg.mistakes_enabled = true;
    learn(cfg, oracle, initial)
}
