//! The README library example: parse a fixture, decompose it, count.
//! Run from the workspace root: `cargo run -p relgrowth-core --example kernel_counts`

use relgrowth_core::automaton::parse_automaton;
use relgrowth_core::components::decompose;
use relgrowth_core::counting::{count_by_weight, CountBudget};
use relgrowth_core::weights::EdgeWeighting;

fn main() {
    let text = std::fs::read_to_string("fixtures/f2_abelian.aut").unwrap();
    let parsed = parse_automaton(&text).unwrap();
    let hom = parsed.homomorphism.as_ref().unwrap();
    let weighting = EdgeWeighting::new(&parsed.automaton, hom).unwrap();
    let analysis = decompose(&parsed.automaton).unwrap();
    let table =
        count_by_weight(&parsed.automaton, &weighting, 60, &CountBudget::default()).unwrap();
    println!("growth rate {}", analysis.lambda);
    println!("kernel count at length 60: {}", table.zero_count(60));
}
