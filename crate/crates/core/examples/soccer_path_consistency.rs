//! Path consistency on the soccer story: John, Mary and Wendy ride to a
//! soccer game, John starts or arrives as Mary starts, John's trip overlaps
//! the game, Mary's trip is during the game or contains it.

use qcn_core::network::{all_edges, Qcn};
use qcn_core::propagation::path_consistency;

fn main() {
    let mut q = Qcn::from_json(include_str!("../data/soccer.qcn.json")).expect("bundled file");
    let calc = q.calculus().clone();
    let res = path_consistency(&mut q);
    println!("status: {:?}", res.status);
    for p in &res.pruned {
        println!(
            "{} / {}: removed {}",
            q.name(p.i),
            q.name(p.j),
            calc.format(p.removed)
        );
    }
    println!();
    for (i, j) in all_edges(q.n()) {
        println!(
            "{:>12} {:<22} {}",
            q.name(i),
            calc.format(q.get(i, j)),
            q.name(j)
        );
    }
    // every relation left on John-Mary is realized by some scenario
    let scenarios = q.enumerate_scenarios(usize::MAX).expect("n = 4");
    let jm: std::collections::BTreeSet<_> =
        scenarios.iter().map(|s| calc.symbol(s.get(0, 1))).collect();
    println!("\n{} scenarios; John-Mary takes {:?}", scenarios.len(), jm);
}
