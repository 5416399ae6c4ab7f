//! Proves verdicts on small satisfaction instances.

use std::time::Duration;

use xcsp_mini::engine::{solve, SearchConfig};
use xcsp_mini::generators::{gen_dubois, gen_langford};
use xcsp_mini::xcsp::write_solution;

fn main() {
    let config = SearchConfig::default().with_time_limit(Duration::from_secs(10));
    for (name, instance) in [
        ("dubois 5", gen_dubois(5).unwrap()),
        ("langford 2", gen_langford(2).unwrap()),
        ("langford 4", gen_langford(4).unwrap()),
    ] {
        let out = solve(&instance, &config).unwrap();
        println!("{name}: {} after {} nodes", out.status, out.stats.nodes);
        if let Some(w) = &out.witness {
            println!("{}", write_solution(&instance, w, None));
        }
    }
}
