//! Tour of the dual cache: insertion, tree matching, length-bucket
//! retrieval, and relevance search.
//!
//! Run with: cargo run --example dual_cache

use efparse::cache::DualCache;
use efparse::template::{LogRecord, Template};

fn main() {
    let mut cache = DualCache::new(0.75);
    for rendered in [
        "Scheduled snapshot period at <*> seconds.",
        "User <*> logged in from IP <*>",
        "connection from <*> at <*>",
        "<*> kernel: memory threshold exceeded today",
    ] {
        let id = cache.insert(Template::parse(rendered).unwrap());
        println!("cached {id}: {rendered}");
    }

    // tree lookup consumes one token per edge; wildcards take any token
    for raw in [
        "User alice logged in from IP 10.0.0.1",
        "web01 kernel: memory threshold exceeded today",
        "User alice logged out of the session",
    ] {
        let record = LogRecord::new(1, raw);
        match cache.tree_match(&record) {
            Some(t) => println!("hit : {raw}\n  -> {} ({})", t.render(), t.id()),
            None => println!("miss: {raw}"),
        }
    }

    // the bucket index narrows relevance search by token count
    let (lo, hi) = cache.length_bounds(6);
    println!("\nlength bounds for a 6-token template: {lo}..={hi}");
    for t in cache.candidates_by_length(6) {
        println!("  candidate ({} tokens): {}", t.len(), t.render());
    }

    let incoming = Template::parse("User <*> logged in from terminal <*>").unwrap();
    match cache.most_relevant(&incoming) {
        Some((t, sim)) => println!("\nmost relevant to {incoming}: {t} (similarity {sim:.3})"),
        None => println!("\nnothing similar enough to {incoming}"),
    }

    println!("\nsnapshot:\n{}", cache.snapshot());
}
