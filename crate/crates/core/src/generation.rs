//! Random target networks for the three learning cases.
//!
//! Every target starts from a consistent scenario realized by concrete
//! geometry: integer intervals for the interval algebra, closed 1-D regions
//! for RCC8 and integer points for the point algebra.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{load_calculus, AlgebraError, Calculus, Relation};
use crate::network::{all_edges, NetworkError, Qcn};
use crate::propagation::path_consistency;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("degenerate interval ({0}, {1}): start must be before end")]
    Degenerate(i64, i64),
    #[error("no geometric generator for calculus `{0}` (supported: ia, rcc8, point)")]
    UnsupportedCalculus(String),
    #[error("invalid generator setting: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Which learning problem a target belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Case {
    /// Complete scenario: one basic relation per edge.
    One,
    /// Scenario with some edges relaxed to the universal relation.
    Two,
    /// Every edge a disjunction; the target is path consistent.
    Three,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::One, Case::Two, Case::Three];

    pub fn number(self) -> u8 {
        match self {
            Case::One => 1,
            Case::Two => 2,
            Case::Three => 3,
        }
    }
}

impl TryFrom<u8> for Case {
    type Error = String;
    fn try_from(v: u8) -> Result<Case, String> {
        match v {
            1 => Ok(Case::One),
            2 => Ok(Case::Two),
            3 => Ok(Case::Three),
            other => Err(format!("case must be 1, 2 or 3, got {other}")),
        }
    }
}

impl From<Case> for u8 {
    fn from(c: Case) -> u8 {
        c.number()
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl std::str::FromStr for Case {
    type Err = String;
    fn from_str(s: &str) -> Result<Case, String> {
        s.parse::<u8>().map_err(|e| e.to_string())?.try_into()
    }
}

pub const DEFAULT_EXTRA_DENSITY: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub calculus: String,
    pub n: usize,
    pub case: Case,
    /// Probability that an edge becomes universal (case 2).
    pub p_universal: f64,
    /// Probability that each other basic relation joins an edge (case 3).
    pub extra_density: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(calculus: &str, n: usize, case: Case, seed: u64) -> Self {
        GenConfig {
            calculus: calculus.to_string(),
            n,
            case,
            p_universal: 0.5,
            extra_density: DEFAULT_EXTRA_DENSITY,
            seed,
        }
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.n < 2 {
            return Err(GenError::InvalidConfig(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if !(0.0..=1.0).contains(&self.p_universal) {
            return Err(GenError::InvalidConfig(format!(
                "p_universal {} not in [0, 1]",
                self.p_universal
            )));
        }
        if !(0.0..=1.0).contains(&self.extra_density) {
            return Err(GenError::InvalidConfig(format!(
                "extra_density {} not in [0, 1]",
                self.extra_density
            )));
        }
        Ok(())
    }
}

/// A generated target.
#[derive(Debug, Clone)]
pub struct Target {
    /// What a truthful learner must converge to. In case 3 this is the path
    /// consistent closure of `oracle_view`.
    pub network: Qcn,
    /// The relations a simulated oracle answers from. Equal to `network`
    /// except in case 3, where it holds the edge sets before closure.
    pub oracle_view: Qcn,
    /// Geometry realizing the underlying scenario, `(start, end)` per
    /// variable (points use `start == end`).
    pub witness: Vec<(i64, i64)>,
}

/// Allen relation of interval `x` to interval `y`, as a symbol.
pub fn interval_symbol(x: (i64, i64), y: (i64, i64)) -> Result<&'static str, GenError> {
    for &(s, e) in &[x, y] {
        if s >= e {
            return Err(GenError::Degenerate(s, e));
        }
    }
    let ((xs, xe), (ys, ye)) = (x, y);
    Ok(if xe < ys {
        "P"
    } else if xe == ys {
        "M"
    } else if ye < xs {
        "Pi"
    } else if ye == xs {
        "Mi"
    } else if xs == ys && xe == ye {
        "E"
    } else if xs == ys {
        if xe < ye {
            "S"
        } else {
            "Si"
        }
    } else if xe == ye {
        if xs > ys {
            "F"
        } else {
            "Fi"
        }
    } else if xs > ys && xe < ye {
        "D"
    } else if xs < ys && xe > ye {
        "Di"
    } else if xs < ys {
        "O"
    } else {
        "Oi"
    })
}

/// RCC8 relation between two closed 1-D regions, as a symbol.
pub fn region_symbol(x: (i64, i64), y: (i64, i64)) -> Result<&'static str, GenError> {
    for &(s, e) in &[x, y] {
        if s >= e {
            return Err(GenError::Degenerate(s, e));
        }
    }
    let ((xs, xe), (ys, ye)) = (x, y);
    Ok(if xe < ys || ye < xs {
        "DC"
    } else if xe == ys || ye == xs {
        "EC"
    } else if xs == ys && xe == ye {
        "EQ"
    } else if ys <= xs && xe <= ye {
        if ys < xs && xe < ye {
            "NTPP"
        } else {
            "TPP"
        }
    } else if xs <= ys && ye <= xe {
        if xs < ys && ye < xe {
            "NTPPi"
        } else {
            "TPPi"
        }
    } else {
        "PO"
    })
}

/// Point-algebra relation of `x` to `y`.
pub fn point_symbol(x: i64, y: i64) -> &'static str {
    match x.cmp(&y) {
        std::cmp::Ordering::Less => "<",
        std::cmp::Ordering::Equal => "=",
        std::cmp::Ordering::Greater => ">",
    }
}

/// Interval-algebra relation id of `x` to `y` in `ia`.
pub fn relation_from_intervals(
    ia: &Calculus,
    x: (i64, i64),
    y: (i64, i64),
) -> Result<usize, GenError> {
    Ok(ia.id_of(interval_symbol(x, y)?)?)
}

/// RCC8 relation id between two closed 1-D regions.
pub fn relation_from_regions(
    rcc8: &Calculus,
    x: (i64, i64),
    y: (i64, i64),
) -> Result<usize, GenError> {
    Ok(rcc8.id_of(region_symbol(x, y)?)?)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Geometry {
    Intervals,
    Regions,
    Points,
}

fn geometry_of(calc: &Calculus) -> Result<Geometry, GenError> {
    match calc.name() {
        "ia" => Ok(Geometry::Intervals),
        "rcc8" => Ok(Geometry::Regions),
        "point" => Ok(Geometry::Points),
        other => Err(GenError::UnsupportedCalculus(other.to_string())),
    }
}

/// Draws `n` random objects and returns them with the atomic network they
/// realize.
pub fn random_scenario(
    calc: Arc<Calculus>,
    n: usize,
    rng: &mut impl Rng,
) -> Result<(Qcn, Vec<(i64, i64)>), GenError> {
    let geometry = geometry_of(&calc)?;
    let span = 4 * n as i64;
    let witness: Vec<(i64, i64)> = (0..n)
        .map(|_| match geometry {
            Geometry::Points => {
                let x = rng.random_range(0..(2 * n as i64).max(2));
                (x, x)
            }
            _ => loop {
                let a = rng.random_range(0..span);
                let b = rng.random_range(0..span);
                if a != b {
                    break (a.min(b), a.max(b));
                }
            },
        })
        .collect();
    let mut q = Qcn::new_universal(calc.clone(), n)?;
    for (i, j) in all_edges(n) {
        let (x, y) = (witness[i], witness[j]);
        let sym = match geometry {
            Geometry::Intervals => interval_symbol(x, y)?,
            Geometry::Regions => region_symbol(x, y)?,
            Geometry::Points => point_symbol(x.0, y.0),
        };
        q.set(i, j, Relation::singleton(calc.id_of(sym)?));
    }
    Ok((q, witness))
}

/// Generates a target network; a pure function of the configuration.
pub fn generate_target(cfg: &GenConfig) -> Result<Target, GenError> {
    cfg.validate()?;
    let calc = load_calculus(&cfg.calculus)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (scenario, witness) = random_scenario(calc.clone(), cfg.n, &mut rng)?;
    let p = calc.p();
    match cfg.case {
        Case::One => Ok(Target {
            network: scenario.clone(),
            oracle_view: scenario,
            witness,
        }),
        Case::Two => {
            let mut q = scenario;
            for (i, j) in all_edges(cfg.n) {
                if rng.random_bool(cfg.p_universal) {
                    q.set(i, j, calc.universal());
                }
            }
            Ok(Target {
                network: q.clone(),
                oracle_view: q,
                witness,
            })
        }
        Case::Three => {
            let mut q = scenario;
            for (i, j) in all_edges(cfg.n) {
                let mut r = q.get(i, j);
                for b in 0..p {
                    if !r.contains(b) && rng.random_bool(cfg.extra_density) {
                        r.insert(b);
                    }
                }
                q.set(i, j, r);
            }
            let oracle_view = q.clone();
            let res = path_consistency(&mut q);
            debug_assert!(
                res.is_consistent(),
                "a relaxed scenario cannot be inconsistent"
            );
            Ok(Target {
                network: q,
                oracle_view,
                witness,
            })
        }
    }
}
