//! Stream a small corpus through the full pipeline with a scripted mock
//! model, then show per-line results and run statistics.
//!
//! Run with: cargo run --example parse_corpus

use std::sync::Arc;

use efparse::gateway::{Gateway, MockScript};
use efparse::lexicon::Lexicon;
use efparse::pipeline::{Parser, PipelineConfig};

fn main() {
    // Scripted answers stand in for the language model: the first rule
    // deliberately keeps "Mon" as a constant so the later merge has
    // something to fix.
    let script = "\
extract | Log: connection from 210 | connection from <*> at Mon <*>
extract | Log: connection from     | connection from <*> at <*>
extract | Log: Scheduled           | Scheduled snapshot period at <*> seconds.
extract | *                        | {target}
merge   | Segment A: Mon           | <*>
merge   | *                        | {left}
confirm | *                        |
";
    let gateway = Gateway::with_mock(MockScript::parse(script).unwrap());
    let mut parser = Parser::new(
        PipelineConfig::default(),
        Arc::new(Lexicon::bundled().clone()),
        gateway,
    );

    let corpus = [
        "Scheduled snapshot period at 10 seconds.",
        "connection from 210.202.115.220 at Mon Aug 9 09:12:50 2005",
        "Scheduled snapshot period at 30 seconds.",
        "connection from 261.218.671.604 at Tue Oct 13 02:01:27 2005",
        "Scheduled snapshot period at 60 seconds.",
        "connection from 10.40.2.9 at Wed Nov 1 18:02:44 2005",
    ];
    let output = parser.parse_stream(corpus.iter().map(|s| s.to_string()));

    println!("{:<4} {:<10} {:<45} parameters", "line", "path", "template");
    for r in &output.results {
        println!(
            "{:<4} {:<10} {:<45} {:?}",
            r.line_id,
            format!("{:?}", r.provenance),
            r.rendered,
            r.parameters
        );
    }
    println!("\nfinal templates:\n{}", output.snapshot);
    println!(
        "lines={} hits={} llm_calls={} templates={}",
        output.stats.lines,
        output.stats.cache_hits,
        output.stats.llm_calls,
        output.stats.template_count
    );
}
