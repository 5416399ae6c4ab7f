//! Branch and bound on a Golomb ruler, printing every improving bound.

use std::time::Duration;

use xcsp_mini::engine::{optimize, SearchConfig};
use xcsp_mini::generators::{gen_golomb_ruler, Omit};

fn main() {
    let instance = gen_golomb_ruler(5, Omit::default()).unwrap();
    let config = SearchConfig::default().with_time_limit(Duration::from_secs(30));
    let out = optimize(&instance, &config, |cost, _| println!("o {cost}")).unwrap();
    println!("{} {:?}", out.status, out.bound);
}
