//! Demonstration selection: similar to the target, diverse among
//! themselves.
//!
//! Run with: cargo run --example exemplar_selection

use efparse::exemplar::ExemplarPool;
use efparse::template::LogRecord;

fn main() {
    let mut pool = ExemplarPool::new(100, 0.75, 3);
    for raw in [
        "fetch page 1 of 9 done",
        "fetch page 2 of 9 done",
        "fetch page 3 of 9 done",
        "fetch page 4 of 9 done",
        "fetch page 8 of 9 fast",
        "unrelated metrics snapshot uploaded to archive",
    ] {
        pool.observe(&LogRecord::new(1, raw));
    }

    let target = LogRecord::new(2, "fetch page 8 of 9 done");
    println!("target: {}", target.raw());
    println!("pool size: {}", pool.len());
    for exemplar in pool.select(&target) {
        println!("  selected: {exemplar}");
    }
    println!("(the \"fast\" variant displaces a near-duplicate because it lowers the set's mean pairwise similarity)");
}
