//! Thin command-line wrapper around the library.
//!
//! Default action parses `--input` into `--output-dir`; with
//! `--eval-parsed`, an existing parsed CSV is evaluated against
//! `--ground-truth` instead.

use std::path::PathBuf;

use clap::Parser;

#[derive(Parser, Debug)]
#[command(
    name = "efparse",
    version,
    about = "Streaming log template extraction with a dual template cache"
)]
struct Args {
    /// Input corpus: raw text (one message per line) or Loghub structured
    /// CSV (Content column)
    #[arg(long)]
    input: Option<PathBuf>,

    /// Directory for parsed.csv, templates.txt, stats.txt
    #[arg(long)]
    output_dir: Option<PathBuf>,

    /// Similarity threshold in (0, 1] for merge retrieval
    #[arg(long)]
    threshold: Option<f64>,

    /// Maximum demonstrations per extraction prompt
    #[arg(long)]
    max_demos: Option<usize>,

    /// Model backend
    #[arg(long, value_parser = ["http", "mock"])]
    backend: Option<String>,

    /// Rule file for the mock backend
    #[arg(long)]
    mock_script: Option<PathBuf>,

    /// Chat-completions endpoint URL for the http backend
    #[arg(long)]
    endpoint: Option<String>,

    /// Model name sent to the http backend
    #[arg(long)]
    model: Option<String>,

    /// Environment variable holding the API key
    #[arg(long)]
    api_key_env: Option<String>,

    /// Ground-truth CSV (LineId, EventTemplate); enables the metric report
    #[arg(long)]
    ground_truth: Option<PathBuf>,

    /// Also write the final template snapshot to this path
    #[arg(long)]
    dump_templates: Option<PathBuf>,

    /// Flat key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,

    /// Evaluate this parsed.csv against --ground-truth instead of parsing
    #[arg(long)]
    eval_parsed: Option<PathBuf>,
}

fn main() {
    let args = Args::parse();
    let code = efparse::cli::run(efparse::cli::CliOverrides {
        input: args.input,
        output_dir: args.output_dir,
        threshold: args.threshold,
        max_demos: args.max_demos,
        backend: args.backend,
        mock_script: args.mock_script,
        endpoint: args.endpoint,
        model: args.model,
        api_key_env: args.api_key_env,
        ground_truth: args.ground_truth,
        dump_templates: args.dump_templates,
        config: args.config,
        eval_parsed: args.eval_parsed,
    });
    std::process::exit(code);
}
