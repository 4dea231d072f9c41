//! Comparison learners: the plain backtracking learner and a clausal
//! learner in the style of CONACQ.2.

mod clausal;

use std::time::Instant;

use crate::generation::Case;
use crate::learner::{
    learn, query_budget, Heuristic, Learner, LearnerConfig, LearnerError, Prompt, Propagation,
    RunResult,
};
use crate::network::Qcn;
use crate::oracle::{Oracle, QueryKind};

pub use clausal::{ClausalTheory, Conflict};

/// The learner with no propagation and random ordering. With mistakes
/// enabled it still backtracks by snapshot, but only notices a problem when
/// an edge empties or the finished network fails a final consistency check.
/// Mistake handling also switches on
/// [`LearnerConfig::verify_singletons`].
pub fn learn_naive(
    case: Case,
    oracle: &mut dyn Oracle,
    initial: Qcn,
    seed: u64,
    p_yes_bias: f64,
    mistakes_enabled: bool,
) -> Result<RunResult, LearnerError> {
    learn(
        naive_config(case, seed, p_yes_bias, mistakes_enabled),
        oracle,
        initial,
    )
}

fn naive_config(case: Case, seed: u64, p_yes_bias: f64, mistakes_enabled: bool) -> LearnerConfig {
    LearnerConfig {
        case,
        propagation: Propagation::None,
        heuristic: Heuristic::Random,
        p_yes_bias,
        seed,
        mistakes_enabled,
        verify_singletons: mistakes_enabled,
    }
}

/// Outcome of a clausal run, with the number of questions it could skip.
#[derive(Debug, Clone)]
pub struct ClausalRun {
    pub result: RunResult,
    /// Questions answered from the theory instead of the oracle.
    pub skipped: u64,
    /// Atoms fixed by unit propagation.
    pub derived: u64,
}

/// Clausal learner: follows the same question sequence as [`learn_naive`]
/// but first checks whether the theory (answers so far plus the
/// composition-table background clauses, under unit propagation) already
/// entails the answer. Entailed questions are not sent to the oracle.
/// A contradiction in the theory collapses the run.
pub fn learn_conacq2(
    case: Case,
    oracle: &mut dyn Oracle,
    initial: Qcn,
    seed: u64,
    p_yes_bias: f64,
) -> Result<ClausalRun, LearnerError> {
    let start = Instant::now();
    let n = initial.n();
    let calc = initial.calculus().clone();
    let budget = query_budget(n, calc.p());
    let mut theory = ClausalTheory::new(calc, n, case);
    let mut shadow = Learner::new(naive_config(case, seed, p_yes_bias, false), initial)?;
    let mut asked = 0u64;
    let mut yes_answers = 0u64;
    let mut skipped = 0u64;
    let mut exhausted = false;
    let converged = loop {
        let prompt = {
            let o: &dyn Oracle = oracle;
            shadow.prompt(&|i, j| o.target_hint(i, j))
        };
        let q = match prompt {
            Prompt::Converged => break true,
            Prompt::Collapsed => break false,
            Prompt::Ask(p) => p.query,
        };
        let entailed = match q.kind {
            QueryKind::Relation { b } => theory.value(q.i, q.j, b),
            QueryKind::Universal => theory.universal_value(q.i, q.j),
        };
        let yes = match entailed {
            Some(v) => {
                skipped += 1;
                v
            }
            None => {
                if asked >= budget {
                    exhausted = true;
                    break false;
                }
                let a = oracle.ask(&q, false)?;
                asked += 1;
                yes_answers += a.yes as u64;
                let told = match q.kind {
                    QueryKind::Relation { b } => theory.assert_atom(q.i, q.j, b, a.yes),
                    QueryKind::Universal => theory.assert_universal(q.i, q.j, a.yes),
                };
                if told.is_err() {
                    break false;
                }
                a.yes
            }
        };
        shadow.answer(yes)?;
    };
    let mut result = RunResult {
        network: shadow.learned(),
        converged,
        exhausted,
        stats: shadow.stats().clone(),
    };
    result.stats.queries = asked;
    result.stats.yes_answers = yes_answers;
    result.stats.pruned_by_pc = theory.derived;
    result.stats.wall_time = start.elapsed();
    Ok(ClausalRun {
        result,
        skipped,
        derived: theory.derived,
    })
}
