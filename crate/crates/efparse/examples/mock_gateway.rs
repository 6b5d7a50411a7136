//! The scripted mock backend: rule format, placeholders, and the three
//! query kinds.
//!
//! Run with: cargo run --example mock_gateway

use efparse::gateway::{Gateway, MockScript};

fn main() {
    // kind | substring-matcher | response
    // '*' (or empty) matches anything; first matching rule wins; every
    // kind needs a reachable default. Responses may embed the values the
    // prompt was built from: {target}, {exemplars}, {left}, {right},
    // {template_a}, {template_b}, {log}, {template}, {suspects}.
    let script = "\
# template extraction
extract | snapshot period | Scheduled snapshot period at <*> seconds.
extract | *               | {target}

# segment merging: echo the left side unless scripted otherwise
merge   | Segment A: Mon  | <*>
merge   | *               | {left}

# variable confirmation: silence means nothing confirmed
confirm | apache2         | apache2
confirm | *               |
";
    let gateway = Gateway::with_mock(MockScript::parse(script).unwrap());

    let template = gateway
        .extract_template("Scheduled snapshot period at 10 seconds.", &[])
        .unwrap();
    println!("extract  -> {template}");

    let echoed = gateway
        .extract_template(
            "something never scripted",
            &["a comparison log".to_string()],
        )
        .unwrap();
    println!("extract  -> {echoed} (default rule echoes the target)");

    let merged = gateway
        .semantic_merge(
            "Mon <*>",
            "<*>",
            "connection from <*> at Mon <*>",
            "connection from <*> at <*>",
        )
        .unwrap();
    println!("merge    -> {merged}");

    let confirmed = gateway.confirm_variables(
        "Process apache2 terminated with exit code 1",
        "Process apache2 terminated with exit code <*>",
        &["apache2".to_string()],
    );
    println!("confirm  -> {confirmed:?}");
    println!("calls    -> {}", gateway.call_count());
}
