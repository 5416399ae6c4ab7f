//! Checks a solver witness, then the same witness with one value changed.

use xcsp_mini::engine::{solve, SearchConfig};
use xcsp_mini::generators::gen_langford;
use xcsp_mini::harness::verify;

fn main() {
    let instance = gen_langford(3).unwrap();
    let witness = solve(&instance, &SearchConfig::default()).unwrap().witness.unwrap();
    println!("{}", verify(&instance, &witness, None));

    let mut corrupted = witness.clone();
    let first = &instance.variables[0];
    let other = first.domain.values().iter().copied().find(|&v| Some(v) != witness.get(&first.id)).unwrap();
    corrupted.insert(first.id.clone(), other);
    println!("{}", verify(&instance, &corrupted, None));
}
