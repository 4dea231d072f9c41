//! `qcn`: generate, propagate, learn, benchmark and serve.
//!
//! Exit status is 0 on success, 1 on usage or input errors and 2 when a
//! network is inconsistent or a learning run collapses.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcn_core::algebra::load_calculus;
use qcn_core::baselines::{learn_conacq2, learn_naive};
use qcn_core::generation::{generate_target, Case, GenConfig, DEFAULT_EXTRA_DENSITY};
use qcn_core::harness::{manifest, run_sweep, to_csv, Method, SweepSpec};
use qcn_core::learner::{learn, Heuristic, LearnerConfig, RunResult};
use qcn_core::network::Qcn;
use qcn_core::oracle::{OracleConfig, SimulatedOracle};
use qcn_core::propagation::{path_consistency, Status};
use qcn_core::teaching::{teaching_dimension, ConceptClass, ConceptKind};

#[derive(Parser)]
#[command(
    name = "qcn",
    version,
    about = "Qualitative constraint networks: propagate and learn"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random target network.
    Gen(GenArgs),
    /// Enforce path consistency on a network file.
    Pc(PcArgs),
    /// Learn a target network from a simulated user.
    Learn(LearnArgs),
    /// Run a benchmark sweep and write one CSV row per run.
    Bench(BenchArgs),
    /// Brute-force the teaching dimension of small concept classes.
    TdVerify(TdArgs),
    /// Serve the elicitation HTTP API.
    Serve(ServeArgs),
}

#[derive(Args)]
struct GenArgs {
    /// ia, rcc8 or point.
    #[arg(long, default_value = "ia")]
    calculus: String,
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// 1 (scenario), 2 (some edges universal) or 3 (disjunctive edges).
    #[arg(long, default_value = "1")]
    case: Case,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability that an edge is universal (case 2).
    #[arg(long, default_value_t = 0.5)]
    p_universal: f64,
    /// Probability that each other basic relation joins an edge (case 3).
    #[arg(long, default_value_t = DEFAULT_EXTRA_DENSITY)]
    extra_density: f64,
    /// Output file; standard output if absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PcArgs {
    /// Network file (`.qcn.json`).
    #[arg(short, long)]
    input: PathBuf,
    /// Write the path-consistent network here.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LearnArgs {
    /// Target network file; the simulated user answers from it.
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value = "1")]
    case: Case,
    /// naive, conacq2, pc, pc-card, pc-weight, pc-card-desc, ppc, ...
    #[arg(long, default_value = "pc")]
    method: Method,
    /// Overrides the ordering of pc and ppc methods.
    #[arg(long)]
    heuristic: Option<Heuristic>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bias towards asking relations the target holds.
    #[arg(long, default_value_t = 0.0)]
    p_yes: f64,
    /// Probability that the simulated user answers wrongly.
    #[arg(long, default_value_t = 0.0)]
    p_mistake: f64,
    /// Write the learned network here.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated cases.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    cases: Vec<Case>,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value = "ia")]
    calculus: String,
    /// Comma-separated yes-bias values.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    p_yes: Vec<f64>,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_value = "naive,pc")]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 0.0)]
    p_mistake: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    p_universal: f64,
    #[arg(long, default_value_t = DEFAULT_EXTRA_DENSITY)]
    extra_density: f64,
    /// Record wall time per run (output is then no longer reproducible).
    #[arg(long)]
    time: bool,
    /// CSV file; standard output if absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write a JSON manifest (spec, oracle model, rows).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct TdArgs {
    #[arg(long, default_value = "point")]
    calculus: String,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Count every assignment of basic relations, consistent or not.
    #[arg(long)]
    syntactic: bool,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Write a JSON snapshot of each session after every change.
    #[arg(long)]
    snapshot_dir: Option<PathBuf>,
    /// Send permissive cross-origin headers.
    #[arg(long)]
    cors: bool,
}

/// A failure and the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: 1,
        message: message.to_string(),
    }
}

fn collapse(message: impl ToString) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

fn read_network(path: &Path) -> Result<Qcn, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Qcn::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    let mut cfg = GenConfig::new(&a.calculus, a.n, a.case, a.seed);
    cfg.p_universal = a.p_universal;
    cfg.extra_density = a.extra_density;
    let t = generate_target(&cfg).map_err(usage)?;
    emit(a.output.as_deref(), &(t.network.to_json() + "\n"))
}

fn pc(a: PcArgs) -> Result<(), Failure> {
    let mut q = read_network(&a.input)?;
    let res = path_consistency(&mut q);
    if let Status::Inconsistent { edge: (i, j) } = res.status {
        return Err(collapse(format!(
            "inconsistent: edge {i}-{j} ({} / {}) became empty",
            q.name(i),
            q.name(j)
        )));
    }
    let calc = q.calculus().clone();
    for p in &res.pruned {
        println!(
            "{}-{}: removed {}, left {}",
            p.i,
            p.j,
            calc.format(p.removed),
            calc.format(q.get(p.i, p.j))
        );
    }
    println!(
        "consistent: {} relations removed in {} revisions",
        res.removed_count(),
        res.revisions
    );
    if let Some(out) = &a.output {
        emit(Some(out), &(q.to_json() + "\n"))?;
    }
    Ok(())
}

fn learn_cmd(a: LearnArgs) -> Result<(), Failure> {
    let target = read_network(&a.target)?;
    if !(0.0..=1.0).contains(&a.p_mistake) {
        return Err(usage(format!("p_mistake {} not in [0, 1]", a.p_mistake)));
    }
    let mistakes = a.p_mistake > 0.0;
    let mut oracle = SimulatedOracle::new(
        target.clone(),
        OracleConfig {
            p_mistake: a.p_mistake,
            seed: a.seed ^ 0x0dd,
            ..OracleConfig::default()
        },
    );
    let initial = Qcn::new_universal(target.calculus().clone(), target.n()).map_err(usage)?;
    let result: RunResult = match a.method.learner_setup() {
        None if a.method == Method::Naive => {
            learn_naive(a.case, &mut oracle, initial, a.seed, a.p_yes, mistakes)
        }
        None => learn_conacq2(a.case, &mut oracle, initial, a.seed, a.p_yes).map(|r| r.result),
        Some((propagation, heuristic)) => {
            let cfg = LearnerConfig {
                case: a.case,
                propagation,
                heuristic: a.heuristic.unwrap_or(heuristic),
                p_yes_bias: a.p_yes,
                seed: a.seed,
                mistakes_enabled: mistakes,
                verify_singletons: mistakes,
            };
            learn(cfg, &mut oracle, initial)
        }
    }
    .map_err(usage)?;
    let s = &result.stats;
    let report = serde_json::json!({
        "method": a.method.name(),
        "converged": result.converged,
        "exhausted": result.exhausted,
        "matches_target": result.network == target,
        "queries": s.queries,
        "yes_answers": s.yes_answers,
        "mistakes_injected": oracle.mistakes_injected,
        "mistakes_detected": s.detected_mistakes,
        "backtracks": s.backtracks,
        "reasks": s.reasks,
        "pruned_by_pc": s.pruned_by_pc,
        "wall_time_ms": s.wall_time.as_millis() as u64,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    if let Some(out) = &a.output {
        emit(Some(out), &(result.network.to_json() + "\n"))?;
    }
    if result.converged {
        Ok(())
    } else if result.exhausted {
        Err(collapse("query budget exhausted before convergence"))
    } else {
        Err(collapse("the learner collapsed: answers are inconsistent"))
    }
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let spec = SweepSpec {
        cases: a.cases,
        n: a.n,
        calculus: a.calculus,
        p_yes: a.p_yes,
        methods: a.methods,
        runs: a.runs,
        p_mistake: a.p_mistake,
        base_seed: a.seed,
        p_universal: a.p_universal,
        extra_density: a.extra_density,
        measure_time: a.time,
    };
    spec.validate().map_err(usage)?;
    let rows = run_sweep(&spec).map_err(usage)?;
    emit(a.output.as_deref(), &to_csv(&rows).map_err(usage)?)?;
    if let Some(path) = &a.manifest {
        let m = manifest(&spec, rows);
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        emit(Some(path), &(text + "\n"))?;
    }
    Ok(())
}

fn td_verify(a: TdArgs) -> Result<(), Failure> {
    let calc = load_calculus(&a.calculus).map_err(usage)?;
    println!("class,n,p,tdim,formula,match");
    for kind in [
        ConceptKind::Complete,
        ConceptKind::Incomplete,
        ConceptKind::All,
    ] {
        let mut cls = ConceptClass::new(kind, calc.clone(), a.n);
        if a.syntactic {
            cls.require_consistency = false;
        }
        let r = teaching_dimension(&cls).map_err(usage)?;
        println!(
            "{kind},{},{},{},{},{}",
            r.n,
            r.p,
            r.dimension,
            r.formula,
            r.matches()
        );
    }
    Ok(())
}

fn serve(a: ServeArgs) -> Result<(), Failure> {
    let rt = tokio::runtime::Runtime::new().map_err(usage)?;
    let cfg = qcn_elicit::ServiceConfig {
        snapshot_dir: a.snapshot_dir,
        cors: a.cors,
    };
    rt.block_on(qcn_elicit::serve(SocketAddr::new(a.host, a.port), cfg))
        .map_err(usage)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Pc(a) => pc(a),
        Command::Learn(a) => learn_cmd(a),
        Command::Bench(a) => bench(a),
        Command::TdVerify(a) => td_verify(a),
        Command::Serve(a) => serve(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qcn: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
