//! Generates one instance from each kind of input: a parameter, a JSON
//! payload and the catalog name.

use serde_json::json;
use xcsp_mini::generators::{gen_catalog, gen_dubois, gen_golomb_ruler, Omit, ProblemData, ProblemId};
use xcsp_mini::xcsp::write_instance;

fn main() {
    let dubois = gen_dubois(3).unwrap();
    println!("dubois 3: {} variables", dubois.variables.len());

    let golomb = gen_golomb_ruler(4, Omit::default()).unwrap();
    println!("golomb 4: {} constraints", golomb.constraints.len());

    let problem: ProblemId = "knapsack".parse().unwrap();
    let data = json!({
        "capacity": 10,
        "items": [
            { "weight": 2, "value": 54 },
            { "weight": 2, "value": 92 },
            { "weight": 1, "value": 62 }
        ]
    });
    let knapsack = gen_catalog(&ProblemData::new(problem, data)).unwrap();
    print!("{}", write_instance(&knapsack).unwrap());
}
