//! One elicitation session: a learner whose oracle is a person.
//!
//! The session owns the learner and mirrors its snapshot stack in an answer
//! history, so the history always lists the answers currently in effect.

use std::sync::Arc;

use qcn_core::algebra::{load_calculus, Calculus};
use qcn_core::generation::Case;
use qcn_core::learner::{
    Heuristic, Learner, LearnerConfig, PendingQuery, Prompt, Propagation, RunStats,
};
use qcn_core::network::{all_edges, NetworkFile, Qcn, UniversalCheck};
use qcn_core::oracle::{render_query, Query, QueryKind};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SessionError {
    #[error("invalid session config: {0}")]
    Invalid(String),
    #[error("no session with id {0}")]
    NotFound(String),
    #[error("stale query id {got}; the outstanding query is {expected:?}")]
    Stale { expected: Option<u64>, got: u64 },
    #[error("session is {0}; no answer expected")]
    NotAwaiting(SessionState),
}

fn default_calculus() -> String {
    "ia".into()
}

fn default_case() -> Case {
    Case::One
}

fn yes() -> bool {
    true
}

/// Body of `POST /sessions`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    #[serde(default = "default_calculus")]
    pub calculus: String,
    /// One name per entity; `n` is their number.
    pub names: Vec<String>,
    #[serde(default = "default_case")]
    pub case: Case,
    /// `none`, `pc` (default) or `ppc`.
    #[serde(default)]
    pub propagation: Option<String>,
    /// `random` (default), `cardinality`, `weight` or `cardinality_descending`.
    #[serde(default)]
    pub heuristic: Option<String>,
    #[serde(default)]
    pub seed: u64,
    /// Re-ask earlier questions when answers contradict each other.
    #[serde(default = "yes")]
    pub mistakes_enabled: bool,
    /// Ask about a relation even when it is the only one left.
    #[serde(default = "yes")]
    pub verify_singletons: bool,
}

impl CreateSession {
    pub fn new(names: &[&str]) -> Self {
        CreateSession {
            calculus: default_calculus(),
            names: names.iter().map(|s| s.to_string()).collect(),
            case: Case::One,
            propagation: None,
            heuristic: None,
            seed: 0,
            mistakes_enabled: true,
            verify_singletons: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    AwaitingAnswer,
    Reasking,
    Converged,
    Collapsed,
}

impl std::fmt::Display for SessionState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SessionState::AwaitingAnswer => "awaiting_answer",
            SessionState::Reasking => "reasking",
            SessionState::Converged => "converged",
            SessionState::Collapsed => "collapsed",
        })
    }
}

/// Body of `POST /sessions/{id}/answer`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerRequest {
    pub query_id: u64,
    pub yes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryView {
    pub query_id: u64,
    pub i: usize,
    pub j: usize,
    /// `relation` or `universal`.
    pub kind: String,
    /// Symbol of the asked relation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    pub text: String,
    pub reask: bool,
    /// For a re-asked question, the answer given the first time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub original_answer: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrunedView {
    pub i: usize,
    pub j: usize,
    pub removed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub i: usize,
    pub j: usize,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    pub text: String,
    pub yes: bool,
    /// Given while re-asking.
    pub reask: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsView {
    pub queries: u64,
    pub yes_answers: u64,
    pub backtracks: u64,
    pub detected_mistakes: u64,
    pub reasks: u64,
    pub pruned_by_pc: u64,
}

impl From<&RunStats> for StatsView {
    fn from(s: &RunStats) -> Self {
        StatsView {
            queries: s.queries,
            yes_answers: s.yes_answers,
            backtracks: s.backtracks,
            detected_mistakes: s.detected_mistakes,
            reasks: s.reasks,
            pruned_by_pc: s.pruned_by_pc,
        }
    }
}

/// Response of most endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub state: SessionState,
    pub calculus: String,
    pub n: usize,
    pub names: Vec<String>,
    pub case: Case,
    pub propagation: String,
    pub heuristic: String,
    pub query: Option<QueryView>,
    /// Relations removed by propagation after the last answer.
    pub pruned: Vec<PrunedView>,
    pub history_len: usize,
    pub stats: StatsView,
    /// The learned network, once converged.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeView {
    pub i: usize,
    pub j: usize,
    pub candidates: Vec<String>,
    pub confirmed: Vec<String>,
    pub universal_check: UniversalCheck,
}

/// Response of `GET /sessions/{id}/network`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkView {
    pub id: String,
    pub state: SessionState,
    pub calculus: String,
    pub n: usize,
    pub names: Vec<String>,
    pub symbols: Vec<String>,
    pub edges: Vec<EdgeView>,
    pub stats: StatsView,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    calc: Arc<Calculus>,
    names: Vec<String>,
    learner: Learner,
    state: SessionState,
    query_seq: u64,
    current: Option<(u64, PendingQuery)>,
    history: Vec<HistoryEntry>,
    // history position of each snapshot on the learner's stack
    frames: Vec<usize>,
    last_pruned: Vec<PrunedView>,
}

impl Session {
    pub fn create(id: String, req: &CreateSession) -> Result<Session, SessionError> {
        let invalid = |e: String| SessionError::Invalid(e);
        let calc = load_calculus(&req.calculus).map_err(|e| invalid(e.to_string()))?;
        if req.names.len() < 2 {
            return Err(invalid(format!(
                "need at least 2 entities, got {}",
                req.names.len()
            )));
        }
        let propagation: Propagation = match &req.propagation {
            Some(s) => s.parse().map_err(invalid)?,
            None => Propagation::default(),
        };
        let heuristic: Heuristic = match &req.heuristic {
            Some(s) => s.parse().map_err(invalid)?,
            None => Heuristic::default(),
        };
        let cfg = LearnerConfig {
            case: req.case,
            propagation,
            heuristic,
            p_yes_bias: 0.0,
            seed: req.seed,
            mistakes_enabled: req.mistakes_enabled,
            verify_singletons: req.verify_singletons,
        };
        let mut net = Qcn::new_universal(calc.clone(), req.names.len())
            .map_err(|e| invalid(e.to_string()))?;
        net.set_names(Some(req.names.clone()))
            .map_err(|e| invalid(e.to_string()))?;
        let learner = Learner::new(cfg, net).map_err(|e| invalid(e.to_string()))?;
        let mut s = Session {
            id,
            calc,
            names: req.names.clone(),
            learner,
            state: SessionState::AwaitingAnswer,
            query_seq: 0,
            current: None,
            history: Vec::new(),
            frames: Vec::new(),
            last_pruned: Vec::new(),
        };
        s.advance();
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    /// Id of the outstanding query, if any.
    pub fn query_id(&self) -> Option<u64> {
        self.current.map(|(id, _)| id)
    }

    /// The network as the learner currently sees it.
    pub fn network(&self) -> &Qcn {
        self.learner.network()
    }

    pub fn learned(&self) -> Qcn {
        self.learner.learned()
    }

    // Pulls the next prompt from the learner.
    fn advance(&mut self) {
        match self.learner.prompt(&|_, _| None) {
            Prompt::Ask(p) => {
                self.query_seq += 1;
                self.current = Some((self.query_seq, p));
                self.state = if p.reask.is_some() {
                    SessionState::Reasking
                } else {
                    SessionState::AwaitingAnswer
                };
            }
            Prompt::Converged => {
                self.current = None;
                self.state = SessionState::Converged;
            }
            Prompt::Collapsed => {
                self.current = None;
                self.state = SessionState::Collapsed;
            }
        }
    }

    pub fn answer(&mut self, req: AnswerRequest) -> Result<(), SessionError> {
        let (id, pending) = match self.current {
            Some(c) => c,
            None => return Err(SessionError::NotAwaiting(self.state)),
        };
        if id != req.query_id {
            return Err(SessionError::Stale {
                expected: Some(id),
                got: req.query_id,
            });
        }
        let mistakes = self.learner.config().mistakes_enabled;
        if pending.reask.is_none() && mistakes {
            self.frames.push(self.history.len());
        }
        self.history
            .push(self.entry(&pending.query, req.yes, pending.reask.is_some()));
        let report = self
            .learner
            .answer(req.yes)
            .map_err(|e| SessionError::Invalid(e.to_string()))?;
        self.last_pruned = report
            .pruned
            .iter()
            .map(|p| PrunedView {
                i: p.i,
                j: p.j,
                removed: self.calc.symbols_of(p.removed),
            })
            .collect();
        let popped = matches!(
            self.learner.pending(),
            Some(PendingQuery { reask: Some(_), .. })
        );
        if report.inconsistent && popped {
            if let Some(at) = self.frames.pop() {
                self.history.truncate(at);
            }
        }
        self.advance();
        Ok(())
    }

    fn kind_and_symbol(&self, q: &Query) -> (String, Option<String>) {
        match q.kind {
            QueryKind::Relation { b } => ("relation".into(), Some(self.calc.symbol(b).to_string())),
            QueryKind::Universal => ("universal".into(), None),
        }
    }

    fn text(&self, q: &Query) -> String {
        render_query(q, &self.names[q.i], &self.names[q.j], &self.calc)
    }

    fn entry(&self, q: &Query, yes: bool, reask: bool) -> HistoryEntry {
        let (kind, relation) = self.kind_and_symbol(q);
        HistoryEntry {
            i: q.i,
            j: q.j,
            kind,
            relation,
            text: self.text(q),
            yes,
            reask,
        }
    }

    pub fn view(&self) -> SessionView {
        let cfg = self.learner.config();
        let query = self.current.map(|(query_id, p)| {
            let (kind, relation) = self.kind_and_symbol(&p.query);
            QueryView {
                query_id,
                i: p.query.i,
                j: p.query.j,
                kind,
                relation,
                text: self.text(&p.query),
                reask: p.reask.is_some(),
                original_answer: p.reask,
            }
        });
        SessionView {
            id: self.id.clone(),
            state: self.state,
            calculus: self.calc.name().to_string(),
            n: self.names.len(),
            names: self.names.clone(),
            case: cfg.case,
            propagation: format!("{:?}", cfg.propagation).to_lowercase(),
            heuristic: cfg.heuristic.to_string(),
            query,
            pruned: self.last_pruned.clone(),
            history_len: self.history.len(),
            stats: self.learner.stats().into(),
            network: (self.state == SessionState::Converged)
                .then(|| self.learner.learned().to_file()),
        }
    }

    pub fn network_view(&self) -> NetworkView {
        let net = self.learner.network();
        let edges = all_edges(net.n())
            .map(|(i, j)| EdgeView {
                i,
                j,
                candidates: self.calc.symbols_of(net.get(i, j)),
                confirmed: self.calc.symbols_of(net.confirmed(i, j)),
                universal_check: net.universal_check(i, j),
            })
            .collect();
        NetworkView {
            id: self.id.clone(),
            state: self.state,
            calculus: self.calc.name().to_string(),
            n: net.n(),
            names: self.names.clone(),
            symbols: self
                .calc
                .basics()
                .iter()
                .map(|b| b.symbol.clone())
                .collect(),
            edges,
            stats: self.learner.stats().into(),
        }
    }
}
