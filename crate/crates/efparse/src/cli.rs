//! Command-line front end: corpus ingestion, the parse run, evaluation,
//! and result serialization.
//!
//! Output files written into the output directory:
//! - `parsed.csv`    — LineId, Content, EventTemplate (RFC 4180)
//! - `templates.txt` — final cache snapshot, one template per line
//! - `stats.txt`     — flat `key=value` run counters
//! - `eval.txt` / `eval.csv` — metric report, when ground truth is given

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crate::config::{BackendKind, RunConfig};
use crate::eval::{self, EvalError, EvalReport, GroundTruth};
use crate::gateway::{Gateway, HttpBackend, MockScript, PromptSet};
use crate::lexicon::Lexicon;
use crate::pipeline::{Parser, StreamOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_MISSING_INPUT: i32 = 2;
pub const EXIT_GATEWAY_CONFIG: i32 = 3;
pub const EXIT_LINE_ID_MISMATCH: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input not readable: {0}")]
    MissingInput(String),
    #[error("gateway misconfigured: {0}")]
    GatewayConfig(String),
    #[error("line id mismatch: {0}")]
    LineIdMismatch(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingInput(_) => EXIT_MISSING_INPUT,
            CliError::GatewayConfig(_) => EXIT_GATEWAY_CONFIG,
            CliError::LineIdMismatch(_) => EXIT_LINE_ID_MISMATCH,
            CliError::Other(_) => EXIT_ERROR,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::LineIdMismatch(msg) => CliError::LineIdMismatch(msg),
            other => CliError::Other(other.to_string()),
        }
    }
}

/// Build the gateway the config asks for.
pub fn build_gateway(config: &RunConfig) -> Result<Gateway, CliError> {
    let gw_config = crate::gateway::GatewayConfig {
        endpoint: config.endpoint.clone(),
        model: config.model.clone(),
        api_key_env: config.api_key_env.clone(),
        temperature: config.temperature,
        timeout_secs: config.timeout_secs,
        max_retries: config.max_retries,
    };
    match config.backend {
        BackendKind::Mock => {
            let script = match &config.mock_script {
                Some(path) => {
                    MockScript::from_file(path).map_err(|e| CliError::Other(e.to_string()))?
                }
                None => MockScript::echo(),
            };
            Ok(Gateway::new(
                Box::new(script),
                PromptSet::default(),
                config.max_retries,
            ))
        }
        BackendKind::Http => {
            let backend = HttpBackend::from_config(&gw_config)
                .map_err(|e| CliError::GatewayConfig(e.to_string()))?;
            Ok(Gateway::new(
                Box::new(backend),
                PromptSet::default(),
                config.max_retries,
            ))
        }
    }
}

fn build_lexicon(config: &RunConfig) -> Result<Arc<Lexicon>, CliError> {
    match (&config.verb_lexicon, &config.wordlist) {
        (Some(verbs), Some(words)) => Ok(Arc::new(
            Lexicon::from_files(verbs, words).map_err(|e| CliError::Other(e.to_string()))?,
        )),
        (None, None) => Ok(Arc::new(Lexicon::bundled().clone())),
        _ => Err(CliError::Other(
            "verb_lexicon and wordlist must be configured together".to_string(),
        )),
    }
}

/// Read the input corpus as `(line_id, content)` pairs. A `.csv` input is
/// treated as Loghub structured output (uses the `Content` column and, when
/// present, `LineId`); anything else is raw text, one message per line.
pub fn read_corpus(path: &Path) -> Result<Vec<(u64, String)>, CliError> {
    if !path.is_file() {
        return Err(CliError::MissingInput(path.display().to_string()));
    }
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if !is_csv {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::MissingInput(format!("{}: {e}", path.display())))?;
        return Ok(text
            .lines()
            .enumerate()
            .map(|(i, l)| (i as u64 + 1, l.to_string()))
            .collect());
    }
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::MissingInput(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Other(e.to_string()))?
        .clone();
    let content_col = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case("Content"))
        .ok_or_else(|| CliError::Other(format!("{}: no Content column", path.display())))?;
    let line_col = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case("LineId"));
    let mut out = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Other(e.to_string()))?;
        let line_id = line_col
            .and_then(|c| record.get(c))
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(idx as u64 + 1);
        out.push((line_id, record.get(content_col).unwrap_or("").to_string()));
    }
    Ok(out)
}

fn write_parsed_csv(path: &Path, output: &StreamOutput) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::Other(e.to_string()))?;
    writer
        .write_record(["LineId", "Content", "EventTemplate"])
        .map_err(|e| CliError::Other(e.to_string()))?;
    for result in &output.results {
        writer
            .write_record([
                result.line_id.to_string().as_str(),
                &result.raw,
                &result.rendered,
            ])
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

fn write_stats(path: &Path, output: &StreamOutput) -> Result<(), CliError> {
    let stats = &output.stats;
    let mut f = std::fs::File::create(path)?;
    write!(
        f,
        "lines={}\nblank_lines={}\ncache_hits={}\nllm_path_lines={}\nllm_calls={}\n\
         templates={}\nhit_rate={:.6}\nwall_seconds={:.3}\n",
        stats.lines,
        stats.blank_lines,
        stats.cache_hits,
        stats.llm_path_lines,
        stats.llm_calls,
        stats.template_count,
        stats.hit_rate(),
        stats.wall.as_secs_f64(),
    )?;
    Ok(())
}

fn write_report(dir: &Path, report: &EvalReport) -> Result<(), CliError> {
    std::fs::write(dir.join("eval.txt"), report.to_key_values())?;
    std::fs::write(
        dir.join("eval.csv"),
        format!("{}\n{}\n", EvalReport::csv_header(), report.to_csv_row()),
    )?;
    Ok(())
}

/// Execute a parse run per the configuration. Returns the process exit
/// code.
pub fn run_parse(config: &RunConfig) -> Result<i32, CliError> {
    config
        .validate()
        .map_err(|e| CliError::Other(e.to_string()))?;
    let input = config
        .input
        .as_ref()
        .ok_or_else(|| CliError::MissingInput("no input path configured".to_string()))?;
    let output_dir = config
        .output_dir
        .as_ref()
        .ok_or_else(|| CliError::Other("no output directory configured".to_string()))?;
    let corpus = read_corpus(input)?;
    let gateway = build_gateway(config)?;
    let lexicon = build_lexicon(config)?;
    std::fs::create_dir_all(output_dir)?;

    let mut parser = Parser::new(config.pipeline_config(), lexicon, gateway);
    let output = parser.parse_stream_with_ids(corpus);

    write_parsed_csv(&output_dir.join("parsed.csv"), &output)?;
    std::fs::write(output_dir.join("templates.txt"), &output.snapshot)?;
    write_stats(&output_dir.join("stats.txt"), &output)?;
    if let Some(dump) = &config.dump_templates {
        std::fs::write(dump, &output.snapshot)?;
    }

    if let Some(truth_path) = &config.ground_truth {
        let truth = GroundTruth::from_csv_path(truth_path)?;
        let pred: BTreeMap<u64, String> = output
            .results
            .iter()
            .map(|r| (r.line_id, r.rendered.clone()))
            .collect();
        let mut report = eval::evaluate_templates(&pred, &truth)?;
        report.wall_seconds = output.stats.wall.as_secs_f64();
        write_report(output_dir, &report)?;
        print!("{}", report.to_key_values());
    }
    Ok(EXIT_OK)
}

/// Evaluate an existing parsed CSV against ground truth. Returns the
/// process exit code.
pub fn run_eval(parsed: &Path, truth: &Path) -> Result<i32, CliError> {
    if !parsed.is_file() {
        return Err(CliError::MissingInput(parsed.display().to_string()));
    }
    if !truth.is_file() {
        return Err(CliError::MissingInput(truth.display().to_string()));
    }
    let started = Instant::now();
    let pred = eval::read_template_csv(parsed)?;
    let truth = GroundTruth::from_csv_path(truth)?;
    let mut report = eval::evaluate_templates(&pred, &truth)?;
    report.wall_seconds = started.elapsed().as_secs_f64();
    let dir = parsed
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    write_report(&dir, &report)?;
    print!("{}", report.to_key_values());
    Ok(EXIT_OK)
}

/// Flag values collected by the binary; `None` means "not given".
#[derive(Debug, Default, Clone)]
pub struct CliOverrides {
    pub input: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub threshold: Option<f64>,
    pub max_demos: Option<usize>,
    pub backend: Option<String>,
    pub mock_script: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key_env: Option<String>,
    pub ground_truth: Option<PathBuf>,
    pub dump_templates: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub eval_parsed: Option<PathBuf>,
}

/// Assemble the layered configuration and run. Returns the exit code.
pub fn run(overrides: CliOverrides) -> i32 {
    match run_inner(overrides) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("efparse: {err}");
            err.exit_code()
        }
    }
}

fn run_inner(overrides: CliOverrides) -> Result<i32, CliError> {
    let mut config = RunConfig::default();
    if let Some(path) = &overrides.config {
        config
            .apply_file(path)
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    config
        .apply_env()
        .map_err(|e| CliError::Other(e.to_string()))?;

    if let Some(v) = overrides.input {
        config.input = Some(v);
    }
    if let Some(v) = overrides.output_dir {
        config.output_dir = Some(v);
    }
    if let Some(v) = overrides.threshold {
        config.threshold = v;
    }
    if let Some(v) = overrides.max_demos {
        config.max_demos = v;
    }
    if let Some(v) = overrides.backend {
        config
            .set("backend", &v)
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    if let Some(v) = overrides.mock_script {
        config.mock_script = Some(v);
    }
    if let Some(v) = overrides.endpoint {
        config.endpoint = v;
    }
    if let Some(v) = overrides.model {
        config.model = v;
    }
    if let Some(v) = overrides.api_key_env {
        config.api_key_env = v;
    }
    if let Some(v) = overrides.ground_truth {
        config.ground_truth = Some(v);
    }
    if let Some(v) = overrides.dump_templates {
        config.dump_templates = Some(v);
    }

    if let Some(parsed) = &overrides.eval_parsed {
        let truth = config
            .ground_truth
            .as_ref()
            .ok_or_else(|| CliError::Other("--eval-parsed requires --ground-truth".to_string()))?;
        return run_eval(parsed, truth);
    }
    run_parse(&config)
}
