//! Adaptive merging: how two templates are segmented along their common
//! subsequence, assessed gate by gate, and merged fully or partially.
//!
//! Run with: cargo run --example template_merging

use std::sync::Arc;

use efparse::cache::DualCache;
use efparse::gateway::{Gateway, MockScript};
use efparse::lexicon::Lexicon;
use efparse::merge::{pair_segments, CacheUpdater, MergeOutcome};
use efparse::template::Template;

fn show_segmentation(a: &Template, b: &Template) {
    let seg = pair_segments(a, b);
    let anchors: Vec<&str> = seg.anchors().iter().map(|t| t.as_str()).collect();
    println!("  anchors: {anchors:?}");
    for pair in seg.pairs() {
        let left: Vec<&str> = pair.left.iter().map(|t| t.as_str()).collect();
        let right: Vec<&str> = pair.right.iter().map(|t| t.as_str()).collect();
        println!(
            "  segment pair at slot {}: {left:?} vs {right:?}",
            pair.slot
        );
    }
}

fn main() {
    let updater = CacheUpdater::new(Arc::new(Lexicon::bundled().clone()));
    let gateway = Gateway::with_mock(
        MockScript::parse("extract | * | {target}\nmerge | * | <*>\nconfirm | * |\n").unwrap(),
    );

    // Case 1: different lengths, same event. The stray "Mon" constant and
    // the trailing wildcard form one segment pair that merges via the model.
    println!("case 1: full merge across different lengths");
    let mut cached = Template::parse("connection from <*> at Mon <*>").unwrap();
    cached.add_sample("connection from 210.202.115.220 at Mon Aug 9 09:12:50 2005");
    let mut incoming = Template::parse("connection from <*> at <*>").unwrap();
    incoming.add_sample("connection from 261.218.671.604 at Tue Oct 13 02:01:27 2005");
    show_segmentation(&cached, &incoming);

    let mut cache = DualCache::new(0.75);
    cache.insert(cached);
    match updater.update(&mut cache, incoming, &gateway) {
        MergeOutcome::FullMerge { id, .. } => {
            println!("  -> full merge: {}", cache.get(id).unwrap().render())
        }
        other => println!("  -> unexpected outcome {other:?}"),
    }

    // Case 2: equal lengths, two differing segments. The verbs must stay
    // apart (they carry the event's meaning); the host names merge.
    println!("\ncase 2: partial merge preserving verbs");
    let mut failed =
        Template::parse("ERROR: Database connection failed - Host: db-primary").unwrap();
    failed.add_sample("ERROR: Database connection failed - Host: db-primary");
    let mut refused =
        Template::parse("ERROR: Database connection refused - Host: db-cache").unwrap();
    refused.add_sample("ERROR: Database connection refused - Host: db-cache");
    show_segmentation(&failed, &refused);

    let mut cache = DualCache::new(0.7);
    cache.insert(failed);
    match updater.update(&mut cache, refused, &gateway) {
        MergeOutcome::PartialMerge {
            refined_relevant,
            refined_new,
            ..
        } => {
            println!(
                "  -> kept: {}",
                cache.get(refined_relevant).unwrap().render()
            );
            println!("  -> kept: {}", cache.get(refined_new).unwrap().render());
        }
        other => println!("  -> unexpected outcome {other:?}"),
    }

    // Case 3: nothing qualifies; the new template is simply inserted.
    println!("\ncase 3: no merge");
    let mut cache = DualCache::new(0.75);
    cache.insert(Template::parse("took 42 ms").unwrap());
    let outcome = updater.update(
        &mut cache,
        Template::parse("took forever ms").unwrap(),
        &gateway,
    );
    println!("  -> {outcome:?}, cache now has {} templates", cache.len());
}
