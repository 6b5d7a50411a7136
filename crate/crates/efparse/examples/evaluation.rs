//! Computing grouping and parsing accuracy against ground truth.
//!
//! Run with: cargo run --example evaluation

use std::collections::BTreeMap;

use efparse::eval::{evaluate_templates, GroundTruth};

fn main() {
    let truth = GroundTruth::from_pairs([
        (1, "User <*> logged in from IP <*>".to_string()),
        (2, "User <*> logged in from IP <*>".to_string()),
        (3, "Database connection failed".to_string()),
        (4, "Database connection failed".to_string()),
        (5, "Queue depth now <*>".to_string()),
    ]);

    // one message keeps a constant it should have abstracted, so its whole
    // group splits off and both grouping and parsing metrics suffer
    let predicted: BTreeMap<u64, String> = [
        (1, "User <*> logged in from IP <*>"),
        (2, "User alice logged in from IP <*>"),
        (3, "Database connection failed"),
        (4, "Database connection failed"),
        (5, "Queue depth now <*>"),
    ]
    .into_iter()
    .map(|(l, s)| (l, s.to_string()))
    .collect();

    let report = evaluate_templates(&predicted, &truth).unwrap();
    print!("{}", report.to_key_values());
    println!(
        "\ncsv row:\n{}\n{}",
        efparse::eval::EvalReport::csv_header(),
        report.to_csv_row()
    );
}
