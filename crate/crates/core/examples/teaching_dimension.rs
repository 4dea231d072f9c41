//! Brute-force teaching dimension of the point-algebra concept classes.

use qcn_core::algebra::point_algebra;
use qcn_core::teaching::{teaching_dimension, ConceptClass, ConceptKind};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3);
    println!(
        "{:<11} {:>2} {:>2} {:>9} {:>5} {:>8} {:>5}",
        "class", "n", "p", "concepts", "TDim", "formula", "match"
    );
    for kind in [
        ConceptKind::Complete,
        ConceptKind::Incomplete,
        ConceptKind::All,
    ] {
        let r = teaching_dimension(&ConceptClass::new(kind, point_algebra(), n))
            .expect("n must be 2 or 3");
        println!(
            "{:<11} {:>2} {:>2} {:>9} {:>5} {:>8} {:>5}",
            kind.to_string(),
            r.n,
            r.p,
            r.concepts,
            r.dimension,
            r.formula,
            r.matches()
        );
    }
}
