//! Relation algebras (calculi) and the bit-vector [`Relation`] type.
//!
//! A [`Calculus`] is a finite set of jointly exhaustive, pairwise disjoint
//! basic relations closed under converse, with an identity relation and a
//! composition table. Three calculi are built in: Allen's interval algebra
//! (`"ia"`, 13 basics), RCC8 (`"rcc8"`, 8 basics) and the point algebra
//! (`"point"`, 3 basics). Custom calculi can be loaded from JSON definition
//! files; every table is validated before use.

mod relation;
mod tables;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use relation::{Members, Relation, MAX_BASICS};

use tables::BuiltinTable;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("unknown calculus `{0}` (expected ia, rcc8, point or a definition file)")]
    UnknownCalculus(String),
    #[error("calculus `{name}` declares {p} basic relations, supported range is 1..={max}")]
    TooManyBasics { name: String, p: usize, max: usize },
    #[error("unknown relation symbol `{symbol}` in calculus `{calculus}`")]
    UnknownSymbol { calculus: String, symbol: String },
    #[error("duplicate relation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("malformed calculus definition: {0}")]
    Malformed(String),
    #[error("composition table of `{calculus}` is invalid: {reason}")]
    Invalid { calculus: String, reason: String },
    #[error("cannot read calculus definition {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse calculus definition: {0}")]
    Json(#[from] serde_json::Error),
}

/// One atomic relation of a calculus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicRelation {
    pub id: usize,
    pub symbol: String,
    pub inverse_id: usize,
    /// Verb phrase used when rendering membership questions, e.g. "overlap".
    pub phrase: Option<String>,
}

/// An immutable relation algebra: basic relations, converse map, identity and
/// composition table.
pub struct Calculus {
    name: String,
    basics: Vec<BasicRelation>,
    identity: usize,
    table: Vec<Relation>,
    // composition of basic `a` with any relation, looked up one byte of the
    // right operand at a time
    lut: Vec<Relation>,
    chunks: usize,
    universal: Relation,
    universal_absorbs: bool,
    weights: Vec<u32>,
    symbols: HashMap<String, usize>,
}

impl fmt::Debug for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Calculus")
            .field("name", &self.name)
            .field("p", &self.basics.len())
            .finish()
    }
}

impl PartialEq for Calculus {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.basics == other.basics && self.table == other.table
    }
}

impl Calculus {
    /// Builds and validates a calculus from its basic relations, identity and
    /// row-major `p × p` composition table of basic relations.
    pub fn new(
        name: impl Into<String>,
        basics: Vec<BasicRelation>,
        identity: usize,
        table: Vec<Relation>,
    ) -> Result<Self, AlgebraError> {
        let name = name.into();
        let p = basics.len();
        if p == 0 || p > MAX_BASICS {
            return Err(AlgebraError::TooManyBasics {
                name,
                p,
                max: MAX_BASICS,
            });
        }
        if table.len() != p * p {
            return Err(AlgebraError::Malformed(format!(
                "composition table has {} cells, expected {}",
                table.len(),
                p * p
            )));
        }
        let mut symbols = HashMap::with_capacity(p);
        for (k, b) in basics.iter().enumerate() {
            if b.id != k {
                return Err(AlgebraError::Malformed(format!(
                    "basic relation `{}` has id {} at position {k}",
                    b.symbol, b.id
                )));
            }
            if symbols.insert(b.symbol.clone(), k).is_some() {
                return Err(AlgebraError::DuplicateSymbol(b.symbol.clone()));
            }
        }
        let universal = Relation::all(p);
        let chunks = p.div_ceil(8);
        let mut calc = Calculus {
            name,
            basics,
            identity,
            table,
            lut: Vec::new(),
            chunks,
            universal,
            universal_absorbs: false,
            weights: Vec::new(),
            symbols,
        };
        calc.validate()?;
        calc.build_lut();
        calc.universal_absorbs = (0..p).all(|k| {
            calc.compose(universal, Relation::singleton(k)) == universal
                && calc.compose(Relation::singleton(k), universal) == universal
        });
        calc.weights = (0..p)
            .map(|a| (0..p).map(|b| calc.compose_basic(a, b).len() as u32).sum())
            .collect();
        Ok(calc)
    }

    fn validate(&self) -> Result<(), AlgebraError> {
        let p = self.p();
        let fail = |reason: String| AlgebraError::Invalid {
            calculus: self.name.clone(),
            reason,
        };
        if self.identity >= p {
            return Err(fail(format!("identity id {} out of range", self.identity)));
        }
        for b in &self.basics {
            if b.inverse_id >= p {
                return Err(fail(format!("inverse of `{}` out of range", b.symbol)));
            }
            if self.basics[b.inverse_id].inverse_id != b.id {
                return Err(fail(format!(
                    "inverse of `{}` is not an involution",
                    b.symbol
                )));
            }
        }
        if self.basics[self.identity].inverse_id != self.identity {
            return Err(fail("identity relation is not self-inverse".into()));
        }
        for cell in &self.table {
            if !cell.is_subset_of(self.universal) {
                return Err(fail(
                    "composition cell mentions an undeclared relation".into(),
                ));
            }
        }
        for k in 0..p {
            let sym = &self.basics[k].symbol;
            if self.compose_basic(self.identity, k) != Relation::singleton(k)
                || self.compose_basic(k, self.identity) != Relation::singleton(k)
            {
                return Err(fail(format!("identity does not act neutrally on `{sym}`")));
            }
        }
        for a in 0..p {
            for b in 0..p {
                let ab = self.compose_basic(a, b);
                if ab.is_empty() {
                    return Err(fail(format!(
                        "composition of `{}` and `{}` is empty",
                        self.basics[a].symbol, self.basics[b].symbol
                    )));
                }
                let lhs = self.inverse(ab);
                let rhs = self.compose_basic(self.basics[b].inverse_id, self.basics[a].inverse_id);
                if lhs != rhs {
                    return Err(fail(format!(
                        "converse law fails for `{}` and `{}`",
                        self.basics[a].symbol, self.basics[b].symbol
                    )));
                }
            }
        }
        Ok(())
    }

    fn build_lut(&mut self) {
        let p = self.p();
        let mut lut = vec![Relation::EMPTY; p * self.chunks * 256];
        for a in 0..p {
            for c in 0..self.chunks {
                for byte in 0..256usize {
                    let mut acc = Relation::EMPTY;
                    for bit in 0..8 {
                        let b = c * 8 + bit;
                        if b < p && byte & (1 << bit) != 0 {
                            acc |= self.table[a * p + b];
                        }
                    }
                    lut[(a * self.chunks + c) * 256 + byte] = acc;
                }
            }
        }
        self.lut = lut;
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of basic relations.
    pub fn p(&self) -> usize {
        self.basics.len()
    }

    pub fn basics(&self) -> &[BasicRelation] {
        &self.basics
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn universal(&self) -> Relation {
        self.universal
    }

    /// Whether composing the universal relation with any basic relation, on
    /// either side, yields the universal relation again.
    pub fn universal_absorbs(&self) -> bool {
        self.universal_absorbs
    }

    pub fn symbol(&self, id: usize) -> &str {
        &self.basics[id].symbol
    }

    pub fn id_of(&self, symbol: &str) -> Result<usize, AlgebraError> {
        self.symbols
            .get(symbol)
            .copied()
            .ok_or_else(|| AlgebraError::UnknownSymbol {
                calculus: self.name.clone(),
                symbol: symbol.to_string(),
            })
    }

    /// Parses a list of symbols into a relation.
    pub fn relation<S: AsRef<str>>(&self, symbols: &[S]) -> Result<Relation, AlgebraError> {
        symbols
            .iter()
            .try_fold(Relation::EMPTY, |r, s| Ok(r.with(self.id_of(s.as_ref())?)))
    }

    pub fn symbols_of(&self, r: Relation) -> Vec<String> {
        r.iter().map(|k| self.basics[k].symbol.clone()).collect()
    }

    /// Formats a relation as `{P, O, M}`.
    pub fn format(&self, r: Relation) -> String {
        format!("{{{}}}", self.symbols_of(r).join(", "))
    }

    pub fn compose_basic(&self, a: usize, b: usize) -> Relation {
        self.table[a * self.p() + b]
    }

    fn compose_one(&self, a: usize, r: Relation) -> Relation {
        let base = a * self.chunks * 256;
        let bits = r.bits();
        let mut acc = Relation::EMPTY;
        for c in 0..self.chunks {
            acc |= self.lut[base + c * 256 + ((bits >> (8 * c)) & 0xff) as usize];
        }
        acc
    }

    /// Union of the table entries over every pair of members of `r1` and `r2`.
    pub fn compose(&self, r1: Relation, r2: Relation) -> Relation {
        if r2.is_empty() {
            return Relation::EMPTY;
        }
        r1.iter()
            .fold(Relation::EMPTY, |acc, a| acc | self.compose_one(a, r2))
    }

    /// `compose(r1, r2) ∩ bound`, stopping as soon as every member of `bound`
    /// has found one supporting pair.
    pub fn compose_within(&self, r1: Relation, r2: Relation, bound: Relation) -> Relation {
        if r1.is_empty() || r2.is_empty() || bound.is_empty() {
            return Relation::EMPTY;
        }
        if self.universal_absorbs && (r1 == self.universal || r2 == self.universal) {
            return bound;
        }
        let mut acc = Relation::EMPTY;
        for a in r1 {
            acc |= self.compose_one(a, r2) & bound;
            if acc == bound {
                break;
            }
        }
        acc
    }

    /// Element-wise converse.
    pub fn inverse(&self, r: Relation) -> Relation {
        r.iter().fold(Relation::EMPTY, |acc, k| {
            acc.with(self.basics[k].inverse_id)
        })
    }

    pub fn inverse_id(&self, id: usize) -> usize {
        self.basics[id].inverse_id
    }

    /// Restrictiveness of each basic relation: the summed size of its row in
    /// the composition table. Lower means more constraining.
    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    /// Serializable definition of this calculus.
    pub fn definition(&self) -> CalculusDefinition {
        let p = self.p();
        CalculusDefinition {
            name: self.name.clone(),
            basics: self
                .basics
                .iter()
                .map(|b| BasicDefinition {
                    symbol: b.symbol.clone(),
                    inverse: self.basics[b.inverse_id].symbol.clone(),
                    phrase: b.phrase.clone(),
                })
                .collect(),
            identity: self.basics[self.identity].symbol.clone(),
            composition: (0..p)
                .map(|a| {
                    (0..p)
                        .map(|b| self.symbols_of(self.compose_basic(a, b)))
                        .collect()
                })
                .collect(),
        }
    }
}

/// Bitwise intersection of two relations.
pub fn intersect(r1: Relation, r2: Relation) -> Relation {
    r1 & r2
}

/// JSON form of a calculus definition file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalculusDefinition {
    pub name: String,
    pub basics: Vec<BasicDefinition>,
    pub identity: String,
    pub composition: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasicDefinition {
    pub symbol: String,
    pub inverse: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phrase: Option<String>,
}

impl CalculusDefinition {
    pub fn build(&self) -> Result<Calculus, AlgebraError> {
        let p = self.basics.len();
        if p == 0 || p > MAX_BASICS {
            return Err(AlgebraError::TooManyBasics {
                name: self.name.clone(),
                p,
                max: MAX_BASICS,
            });
        }
        let mut index = HashMap::new();
        for (k, b) in self.basics.iter().enumerate() {
            if index.insert(b.symbol.as_str(), k).is_some() {
                return Err(AlgebraError::DuplicateSymbol(b.symbol.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| AlgebraError::UnknownSymbol {
                    calculus: self.name.clone(),
                    symbol: s.to_string(),
                })
        };
        let basics = self
            .basics
            .iter()
            .enumerate()
            .map(|(k, b)| {
                Ok(BasicRelation {
                    id: k,
                    symbol: b.symbol.clone(),
                    inverse_id: lookup(&b.inverse)?,
                    phrase: b.phrase.clone(),
                })
            })
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        let identity = lookup(&self.identity)?;
        if self.composition.len() != p || self.composition.iter().any(|row| row.len() != p) {
            return Err(AlgebraError::Malformed(format!(
                "composition must be a {p}x{p} array"
            )));
        }
        let mut table = Vec::with_capacity(p * p);
        for row in &self.composition {
            for cell in row {
                let mut r = Relation::EMPTY;
                for s in cell {
                    r.insert(lookup(s)?);
                }
                table.push(r);
            }
        }
        Calculus::new(self.name.clone(), basics, identity, table)
    }
}

fn from_builtin(t: &BuiltinTable) -> Calculus {
    let def = CalculusDefinition {
        name: t.name.to_string(),
        basics: t
            .basics
            .iter()
            .map(|(s, inv, phrase)| BasicDefinition {
                symbol: s.to_string(),
                inverse: inv.to_string(),
                phrase: Some(phrase.to_string()),
            })
            .collect(),
        identity: t.identity.to_string(),
        composition: t
            .cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| cell.split_whitespace().map(String::from).collect())
                    .collect()
            })
            .collect(),
    };
    def.build()
        .unwrap_or_else(|e| panic!("built-in calculus `{}` is corrupt: {e}", t.name))
}

/// Allen's interval algebra.
pub fn interval_algebra() -> Arc<Calculus> {
    static IA: OnceLock<Arc<Calculus>> = OnceLock::new();
    IA.get_or_init(|| Arc::new(from_builtin(&tables::INTERVAL_ALGEBRA)))
        .clone()
}

/// RCC8 region connection calculus.
pub fn rcc8() -> Arc<Calculus> {
    static RCC: OnceLock<Arc<Calculus>> = OnceLock::new();
    RCC.get_or_init(|| Arc::new(from_builtin(&tables::RCC8)))
        .clone()
}

/// Point algebra (`<`, `=`, `>`).
pub fn point_algebra() -> Arc<Calculus> {
    static PA: OnceLock<Arc<Calculus>> = OnceLock::new();
    PA.get_or_init(|| Arc::new(from_builtin(&tables::POINT)))
        .clone()
}

/// Loads a calculus by built-in name (`ia`, `rcc8`, `point`) or from a JSON
/// definition file.
pub fn load_calculus(name: &str) -> Result<Arc<Calculus>, AlgebraError> {
    match name {
        "ia" => Ok(interval_algebra()),
        "rcc8" => Ok(rcc8()),
        "point" => Ok(point_algebra()),
        other => {
            let path = Path::new(other);
            if !path.is_file() {
                return Err(AlgebraError::UnknownCalculus(other.to_string()));
            }
            let text = std::fs::read_to_string(path).map_err(|source| AlgebraError::Io {
                path: other.to_string(),
                source,
            })?;
            let def: CalculusDefinition = serde_json::from_str(&text)?;
            Ok(Arc::new(def.build()?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(c: &Calculus, s: &str) -> Relation {
        c.relation(&s.split_whitespace().collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn builtin_sizes() {
        assert_eq!(interval_algebra().p(), 13);
        assert_eq!(rcc8().p(), 8);
        assert_eq!(point_algebra().p(), 3);
        assert_eq!(rcc8().symbol(rcc8().identity()), "EQ");
    }

    #[test]
    fn ia_entries_from_the_table() {
        let ia = interval_algebra();
        assert_eq!(ia.compose(rel(&ia, "P"), rel(&ia, "P")), rel(&ia, "P"));
        assert_eq!(
            ia.compose(rel(&ia, "P"), rel(&ia, "D")),
            rel(&ia, "P O M D S")
        );
        assert_eq!(ia.compose(rel(&ia, "O"), rel(&ia, "O")), rel(&ia, "P O M"));
    }

    #[test]
    fn rcc8_nested_proper_parts() {
        let c = rcc8();
        assert_eq!(c.compose(rel(&c, "NTPP"), rel(&c, "NTPP")), rel(&c, "NTPP"));
    }

    #[test]
    fn identity_composition_is_neutral() {
        let ia = interval_algebra();
        let r = rel(&ia, "O Mi D");
        assert_eq!(ia.compose(rel(&ia, "E"), r), r);
        assert_eq!(ia.compose(r, rel(&ia, "E")), r);
    }

    #[test]
    fn inverse_examples() {
        let ia = interval_algebra();
        assert_eq!(ia.inverse(rel(&ia, "P")), rel(&ia, "Pi"));
        assert_eq!(ia.inverse(ia.universal()), ia.universal());
        assert_eq!(ia.inverse(rel(&ia, "O M")), rel(&ia, "Oi Mi"));
    }

    #[test]
    fn intersect_examples() {
        let ia = interval_algebra();
        assert_eq!(intersect(rel(&ia, "P M"), rel(&ia, "M O")), rel(&ia, "M"));
        let r = rel(&ia, "S F");
        assert_eq!(intersect(r, ia.universal()), r);
        assert!(intersect(rel(&ia, "P"), rel(&ia, "Pi")).is_empty());
    }

    #[test]
    fn empty_operands_compose_to_empty() {
        let ia = interval_algebra();
        assert!(ia.compose(Relation::EMPTY, ia.universal()).is_empty());
        assert!(ia.compose(ia.universal(), Relation::EMPTY).is_empty());
    }

    #[test]
    fn compose_within_agrees_with_compose() {
        let ia = interval_algebra();
        let a = rel(&ia, "O D S");
        let b = rel(&ia, "Di M");
        let bound = rel(&ia, "P O M D");
        assert_eq!(ia.compose_within(a, b, bound), ia.compose(a, b) & bound);
        assert_eq!(ia.compose_within(ia.universal(), b, bound), bound);
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert!(matches!(
            load_calculus("allen"),
            Err(AlgebraError::UnknownCalculus(_))
        ));
    }

    #[test]
    fn definition_round_trip() {
        let def = rcc8().definition();
        let rebuilt = def.build().unwrap();
        assert_eq!(&rebuilt, rcc8().as_ref());
    }

    #[test]
    fn broken_converse_is_rejected() {
        let mut def = point_algebra().definition();
        // < ∘ = := {<, =} breaks both the identity row and the converse law
        def.composition[0][1] = vec!["<".into(), "=".into()];
        assert!(matches!(def.build(), Err(AlgebraError::Invalid { .. })));
    }

    #[test]
    fn non_involutive_inverse_is_rejected() {
        let mut def = point_algebra().definition();
        def.basics[0].inverse = "=".into();
        assert!(matches!(def.build(), Err(AlgebraError::Invalid { .. })));
    }

    #[test]
    fn too_many_basics_rejected() {
        let basics = (0..33)
            .map(|k| BasicDefinition {
                symbol: format!("r{k}"),
                inverse: format!("r{k}"),
                phrase: None,
            })
            .collect();
        let def = CalculusDefinition {
            name: "wide".into(),
            basics,
            identity: "r0".into(),
            composition: vec![],
        };
        assert!(matches!(
            def.build(),
            Err(AlgebraError::TooManyBasics { p: 33, .. })
        ));
    }

    #[test]
    fn weights_rank_equality_most_constraining() {
        let ia = interval_algebra();
        let w = ia.weights();
        let e = ia.id_of("E").unwrap();
        assert_eq!(w[e], 13);
        assert!(w.iter().all(|&x| x >= w[e]));
    }
}
