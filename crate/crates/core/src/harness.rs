//! Benchmark sweeps: every (case, p_yes, method, run) cell learns one
//! generated target and produces one CSV row.
//!
//! Seeds are derived from the base seed so that every method in a sweep
//! faces the same targets and the same oracle behaviour. Rows are sorted
//! before output, so the worker pool size never changes the bytes produced.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{load_calculus, AlgebraError};
use crate::baselines::{learn_conacq2, learn_naive};
use crate::generation::{generate_target, Case, GenConfig, GenError, DEFAULT_EXTRA_DENSITY};
use crate::learner::{learn, Heuristic, LearnerConfig, LearnerError, Propagation, RunResult};
use crate::network::Qcn;
use crate::oracle::{OracleConfig, SimulatedOracle};

/// Environment variable holding the worker-pool size.
pub const WORKERS_ENV: &str = "QCN_WORKERS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep: {0}")]
    Invalid(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    Naive,
    Conacq2,
    Pc,
    PcCard,
    PcWeight,
    PcCardDesc,
    Ppc,
    PpcCard,
    PpcWeight,
    PpcCardDesc,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Naive,
        Method::Conacq2,
        Method::Pc,
        Method::PcCard,
        Method::PcWeight,
        Method::PcCardDesc,
        Method::Ppc,
        Method::PpcCard,
        Method::PpcWeight,
        Method::PpcCardDesc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Conacq2 => "conacq2",
            Method::Pc => "pc",
            Method::PcCard => "pc-card",
            Method::PcWeight => "pc-weight",
            Method::PcCardDesc => "pc-card-desc",
            Method::Ppc => "ppc",
            Method::PpcCard => "ppc-card",
            Method::PpcWeight => "ppc-weight",
            Method::PpcCardDesc => "ppc-card-desc",
        }
    }

    /// Propagation and ordering of the propagating methods.
    pub fn learner_setup(self) -> Option<(Propagation, Heuristic)> {
        use Heuristic::*;
        match self {
            Method::Naive | Method::Conacq2 => None,
            Method::Pc => Some((Propagation::Pc, Random)),
            Method::PcCard => Some((Propagation::Pc, Cardinality)),
            Method::PcWeight => Some((Propagation::Pc, Weight)),
            Method::PcCardDesc => Some((Propagation::Pc, CardinalityDescending)),
            Method::Ppc => Some((Propagation::Ppc, Random)),
            Method::PpcCard => Some((Propagation::Ppc, Cardinality)),
            Method::PpcWeight => Some((Propagation::Ppc, Weight)),
            Method::PpcCardDesc => Some((Propagation::Ppc, CardinalityDescending)),
        }
    }

    pub fn is_ppc(self) -> bool {
        matches!(self.learner_setup(), Some((Propagation::Ppc, _)))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                format!(
                    "unknown method `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub cases: Vec<Case>,
    pub n: usize,
    pub calculus: String,
    pub p_yes: Vec<f64>,
    pub methods: Vec<Method>,
    pub runs: usize,
    pub p_mistake: f64,
    pub base_seed: u64,
    pub p_universal: f64,
    pub extra_density: f64,
    /// Record wall time per run. Off by default so output is reproducible.
    pub measure_time: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            cases: vec![Case::One],
            n: 50,
            calculus: "ia".into(),
            p_yes: vec![0.0],
            methods: vec![Method::Naive, Method::Pc],
            runs: 10,
            p_mistake: 0.0,
            base_seed: 0,
            p_universal: 0.5,
            extra_density: DEFAULT_EXTRA_DENSITY,
            measure_time: false,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Invalid(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.cases.is_empty()
            || self.methods.is_empty()
            || self.p_yes.is_empty()
            || self.runs == 0
        {
            return bad("cases, methods, p_yes and runs must all be non-empty".into());
        }
        if let Some(p) = self.p_yes.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("p_yes {p} not in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.p_mistake) {
            return bad(format!("p_mistake {} not in [0, 1]", self.p_mistake));
        }
        if let Some(m) = self.methods.iter().find(|m| m.is_ppc()) {
            if self.cases.iter().any(|&c| c != Case::Two) {
                return bad(format!("method {m} is only valid for case 2"));
            }
        }
        load_calculus(&self.calculus)?;
        Ok(())
    }

    /// Number of rows the sweep produces.
    pub fn cell_count(&self) -> usize {
        self.cases.len() * self.p_yes.len() * self.methods.len() * self.runs
    }
}

/// One CSV row; the header is exactly these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub case: u8,
    pub calculus: String,
    pub n: usize,
    pub p_yes: f64,
    pub method: String,
    pub run_index: usize,
    pub seed: u64,
    pub queries: u64,
    pub time_ms: u64,
    pub mistakes_injected: u64,
    pub mistakes_detected: u64,
    pub backtracks: u64,
    pub yes_rate_observed: f64,
    pub converged: bool,
}

pub const CSV_HEADER: &str = "case,calculus,n,p_yes,method,run_index,seed,queries,time_ms,mistakes_injected,mistakes_detected,backtracks,yes_rate_observed,converged";

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn hash(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5151_u64, |acc, &p| mix(acc ^ mix(p)))
}

/// Seed of the target for one (case, run).
pub fn target_seed(base: u64, case: Case, run: usize) -> u64 {
    hash(&[base, 1, case.number() as u64, run as u64])
}

/// Seed shared by learner and oracle for one (case, p_yes, run); independent
/// of the method so that methods are compared on equal footing.
pub fn run_seed(base: u64, case: Case, p_yes: f64, run: usize) -> u64 {
    hash(&[base, 2, case.number() as u64, p_yes.to_bits(), run as u64])
}

/// Full outcome of one cell, before it is flattened into a row.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub row: ResultRow,
    pub result: RunResult,
    pub target: Qcn,
}

pub fn run_cell(
    spec: &SweepSpec,
    case: Case,
    p_yes: f64,
    method: Method,
    run: usize,
) -> Result<CellOutcome, HarnessError> {
    let mut gcfg = GenConfig::new(
        &spec.calculus,
        spec.n,
        case,
        target_seed(spec.base_seed, case, run),
    );
    gcfg.p_universal = spec.p_universal;
    gcfg.extra_density = spec.extra_density;
    let target = generate_target(&gcfg)?;
    let seed = run_seed(spec.base_seed, case, p_yes, run);
    let ocfg = OracleConfig {
        p_mistake: spec.p_mistake,
        seed: mix(seed ^ 0x0dd),
        reask_truthful: true,
        consistent_user: true,
    };
    let mut oracle = SimulatedOracle::new(target.oracle_view.clone(), ocfg);
    let initial = Qcn::new_universal(target.network.calculus().clone(), spec.n)
        .map_err(|e| HarnessError::Invalid(e.to_string()))?;
    let mistakes = spec.p_mistake > 0.0;

    let start = Instant::now();
    let result = match method.learner_setup() {
        None if method == Method::Naive => {
            learn_naive(case, &mut oracle, initial, seed, p_yes, mistakes)?
        }
        None => learn_conacq2(case, &mut oracle, initial, seed, p_yes)?.result,
        Some((propagation, heuristic)) => {
            let cfg = LearnerConfig {
                case,
                propagation,
                heuristic,
                p_yes_bias: p_yes,
                seed,
                mistakes_enabled: mistakes,
                verify_singletons: mistakes,
            };
            learn(cfg, &mut oracle, initial)?
        }
    };
    let elapsed = start.elapsed();

    let row = ResultRow {
        case: case.number(),
        calculus: spec.calculus.clone(),
        n: spec.n,
        p_yes,
        method: method.name().to_string(),
        run_index: run,
        seed: target_seed(spec.base_seed, case, run),
        queries: result.stats.queries,
        time_ms: if spec.measure_time {
            elapsed.as_millis() as u64
        } else {
            0
        },
        mistakes_injected: oracle.mistakes_injected,
        mistakes_detected: result.stats.detected_mistakes,
        backtracks: result.stats.backtracks,
        yes_rate_observed: if oracle.asked == 0 {
            0.0
        } else {
            (oracle.yes_answers as f64 / oracle.asked as f64 * 1e4).round() / 1e4
        },
        converged: result.converged,
    };
    Ok(CellOutcome {
        row,
        result,
        target: target.network,
    })
}

fn worker_count() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()?
        .parse()
        .ok()
        .filter(|&k| k > 0)
}

/// Runs every cell of the sweep and returns rows in canonical order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>, HarnessError> {
    Ok(run_sweep_detailed(spec)?
        .into_iter()
        .map(|c| c.row)
        .collect())
}

/// Like [`run_sweep`] but keeps the learned networks and targets.
pub fn run_sweep_detailed(spec: &SweepSpec) -> Result<Vec<CellOutcome>, HarnessError> {
    spec.validate()?;
    let mut cells = Vec::with_capacity(spec.cell_count());
    for &case in &spec.cases {
        for &p_yes in &spec.p_yes {
            for &method in &spec.methods {
                for run in 0..spec.runs {
                    cells.push((case, p_yes, method, run));
                }
            }
        }
    }
    let work = || -> Result<Vec<CellOutcome>, HarnessError> {
        cells
            .par_iter()
            .map(|&(c, p, m, r)| run_cell(spec, c, p, m, r))
            .collect()
    };
    let mut out = match worker_count() {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()?
            .install(work)?,
        None => work()?,
    };
    out.sort_by(|a, b| {
        let key = |r: &ResultRow| {
            (
                r.case,
                r.p_yes.to_bits(),
                r.method.parse::<Method>().ok(),
                r.run_index,
            )
        };
        key(&a.row).cmp(&key(&b.row))
    });
    Ok(out)
}

/// Renders rows as CSV with a header line.
pub fn to_csv(rows: &[ResultRow]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| HarnessError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Machine-readable record of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub spec: SweepSpec,
    pub oracle: OracleManifest,
    pub rows: Vec<ResultRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleManifest {
    pub p_mistake: f64,
    pub reask_truthful: bool,
    /// Which questions mistakes may affect.
    pub mistake_scope: String,
    /// A question asked again outside a re-ask gets its earlier answer.
    pub consistent_user: bool,
    /// Case-1 edges must be confirmed by a "yes" before they count as
    /// resolved; on whenever mistakes are injected.
    pub verify_singletons: bool,
}

pub fn manifest(spec: &SweepSpec, rows: Vec<ResultRow>) -> RunManifest {
    RunManifest {
        spec: spec.clone(),
        oracle: OracleManifest {
            p_mistake: spec.p_mistake,
            reask_truthful: true,
            mistake_scope: "relation queries and universal checks alike; re-asks are truthful"
                .into(),
            consistent_user: true,
            verify_singletons: spec.p_mistake > 0.0,
        },
        rows,
    }
}

/// Mean of a per-row quantity over rows matching `method` (and optionally a
/// case).
pub fn mean_queries(rows: &[ResultRow], method: Method, case: Option<u8>) -> f64 {
    let v: Vec<f64> = rows
        .iter()
        .filter(|r| r.method == method.name() && case.is_none_or(|c| r.case == c))
        .map(|r| r.queries as f64)
        .collect();
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepSpec {
        SweepSpec {
            n: 8,
            runs: 2,
            methods: vec![Method::Naive, Method::Conacq2, Method::PcCard],
            ..SweepSpec::default()
        }
    }

    #[test]
    fn header_matches_fields() {
        let csv = to_csv(&run_sweep(&small()).unwrap()).unwrap();
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(to_csv(&[]).unwrap().trim_end(), CSV_HEADER);
    }

    #[test]
    fn one_cell_one_row() {
        let spec = SweepSpec {
            runs: 1,
            methods: vec![Method::Pc],
            n: 6,
            ..SweepSpec::default()
        };
        assert_eq!(run_sweep(&spec).unwrap().len(), 1);
    }

    #[test]
    fn repeatable_output() {
        let a = to_csv(&run_sweep(&small()).unwrap()).unwrap();
        let b = to_csv(&run_sweep(&small()).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ppc_outside_case_two_is_rejected() {
        let spec = SweepSpec {
            methods: vec![Method::Ppc],
            ..SweepSpec::default()
        };
        assert!(matches!(spec.validate(), Err(HarnessError::Invalid(_))));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
    }
}
