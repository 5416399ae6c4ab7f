//! Counts the solutions of the order-3 magic square.

use xcsp_mini::engine::enumerate_all;
use xcsp_mini::generators::gen_magic_square;

fn main() {
    let e = enumerate_all(&gen_magic_square(3, None).unwrap(), 1000).unwrap();
    println!("{} solutions (complete: {})", e.count, e.complete);
}
