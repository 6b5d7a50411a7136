//! The three-stage template correction: format rebuild, over-specific
//! abstraction, over-general restoration.
//!
//! Run with: cargo run --example correction

use std::sync::Arc;

use efparse::corrector::Corrector;
use efparse::gateway::{Gateway, MockScript};
use efparse::lexicon::Lexicon;
use efparse::template::{LogRecord, Template};

fn main() {
    let corrector = Corrector::new(Arc::new(Lexicon::bundled().clone()));
    let gateway = Gateway::with_mock(
        MockScript::parse(
            "confirm | apache2 | apache2\nconfirm | * |\nextract | * | {target}\nmerge | * | {left}\n",
        )
        .unwrap(),
    );

    let cases = [
        // format: stray comma makes the template unmatchable
        (
            "User alice logged in from IP 10.0.0.1",
            "User <*> logged in, from IP <*>",
        ),
        // over-specific: a process name survived as a constant
        (
            "Process apache2 terminated with exit code 1",
            "Process apache2 terminated with exit code <*>",
        ),
        // over-general: a verb was abstracted away
        ("Database connection failed", "Database connection <*>"),
        // already correct: passes through untouched
        (
            "Scheduled snapshot period at 10 seconds.",
            "Scheduled snapshot period at <*> seconds.",
        ),
    ];

    for (raw, faulty) in cases {
        let log = LogRecord::new(1, raw);
        let template = Template::parse(faulty).unwrap();
        let (fixed, trace) = corrector.validate(&log, template, true, &gateway);
        println!("log      : {raw}");
        println!("generated: {faulty}");
        println!("validated: {}", fixed.render());
        println!(
            "trace    : format={} abstracted={:?} restored={:?}\n",
            trace.format_applied, trace.over_specific_tokens, trace.over_general_restored
        );
    }
}
