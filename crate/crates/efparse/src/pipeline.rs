//! Per-log orchestration: tree match, exemplar selection, extraction,
//! correction, adaptive cache update, and end-of-run id resolution.
//!
//! Lines are processed strictly in order by a single writer. Merges retire
//! template ids mid-run; a resolution map rewrites already-emitted results
//! to the surviving templates once the stream ends, so reported groupings
//! reflect the final cache state.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::cache::DualCache;
use crate::corrector::{Corrector, DEFAULT_SPECIAL_CHARS};
use crate::exemplar::ExemplarPool;
use crate::gateway::Gateway;
use crate::lexicon::Lexicon;
use crate::matcher::match_template;
use crate::merge::CacheUpdater;
use crate::template::{LogRecord, Template, TemplateId};
use crate::tokenize::Tokenizer;

/// Tunables for a parsing run.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Similarity bound for merge retrieval and the length pre-selection.
    pub similarity_threshold: f64,
    pub max_demonstrations: usize,
    pub exemplar_pool_size: usize,
    pub exemplar_threshold: f64,
    pub special_chars: Vec<char>,
    pub sample_capacity: usize,
    /// Disable to skip template validation entirely (ablation).
    pub correction_enabled: bool,
    /// Disable to fall back to exact-length rule-based updating (ablation).
    pub adaptive_updates: bool,
    pub extra_delimiters: Vec<char>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            similarity_threshold: 0.75,
            max_demonstrations: 3,
            exemplar_pool_size: 10_000,
            exemplar_threshold: 0.75,
            special_chars: DEFAULT_SPECIAL_CHARS.to_vec(),
            sample_capacity: 3,
            correction_enabled: true,
            adaptive_updates: true,
            extra_delimiters: Vec::new(),
        }
    }
}

/// How a line got its template.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    CacheHit,
    LlmPath,
}

/// Per-line outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseResult {
    pub line_id: u64,
    pub raw: String,
    pub template_id: TemplateId,
    pub rendered: String,
    pub parameters: Vec<String>,
    pub provenance: Provenance,
    pub latency: Duration,
}

/// Maps retired template ids to their successors. Resolution chases
/// chains, so an id retired twice still lands on a live template.
#[derive(Debug, Clone, Default)]
pub struct IdResolutionMap {
    map: HashMap<TemplateId, TemplateId>,
}

impl IdResolutionMap {
    pub fn record(&mut self, retired: TemplateId, successor: TemplateId) {
        debug_assert_ne!(retired, successor);
        self.map.insert(retired, successor);
    }

    pub fn resolve(&self, id: TemplateId) -> TemplateId {
        let mut current = id;
        for _ in 0..=self.map.len() {
            match self.map.get(&current) {
                Some(next) => current = *next,
                None => return current,
            }
        }
        current
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Run-level counters.
#[derive(Debug, Clone, Default)]
pub struct StreamStats {
    pub lines: u64,
    pub blank_lines: u64,
    pub cache_hits: u64,
    pub llm_path_lines: u64,
    pub llm_calls: u64,
    pub template_count: usize,
    pub wall: Duration,
}

impl StreamStats {
    pub fn hit_rate(&self) -> f64 {
        let parsed = self.lines - self.blank_lines;
        if parsed == 0 {
            0.0
        } else {
            self.cache_hits as f64 / parsed as f64
        }
    }
}

/// Output of a whole-stream run.
#[derive(Debug, Clone)]
pub struct StreamOutput {
    pub results: Vec<ParseResult>,
    /// Final cache snapshot, one rendered template per line in id order.
    pub snapshot: String,
    pub stats: StreamStats,
}

/// The streaming parser: owns the cache, exemplar pool, corrector, updater,
/// and gateway.
pub struct Parser {
    config: PipelineConfig,
    cache: DualCache,
    pool: ExemplarPool,
    corrector: Corrector,
    updater: CacheUpdater,
    gateway: Gateway,
    resolution: IdResolutionMap,
    tokenizer: Tokenizer,
}

impl Parser {
    pub fn new(config: PipelineConfig, lexicon: Arc<Lexicon>, gateway: Gateway) -> Parser {
        let cache = DualCache::new(config.similarity_threshold)
            .with_sample_capacity(config.sample_capacity);
        let pool = ExemplarPool::new(
            config.exemplar_pool_size,
            config.exemplar_threshold,
            config.max_demonstrations,
        );
        let corrector =
            Corrector::new(lexicon.clone()).with_special_chars(config.special_chars.clone());
        let updater = CacheUpdater::new(lexicon);
        let tokenizer = Tokenizer::new(config.extra_delimiters.clone());
        Parser {
            config,
            cache,
            pool,
            corrector,
            updater,
            gateway,
            resolution: IdResolutionMap::default(),
            tokenizer,
        }
    }

    pub fn cache(&self) -> &DualCache {
        &self.cache
    }

    pub fn gateway(&self) -> &Gateway {
        &self.gateway
    }

    pub fn resolution(&self) -> &IdResolutionMap {
        &self.resolution
    }

    pub fn record(&self, line_id: u64, raw: &str) -> LogRecord {
        LogRecord::with_tokens(line_id, raw, self.tokenizer.tokenize(raw))
    }

    /// Parse one non-blank log line.
    pub fn parse_line(&mut self, log: &LogRecord) -> ParseResult {
        debug_assert!(!log.is_blank());
        let start = Instant::now();

        if let Some(hit) = self.cache.tree_match(log) {
            let template_id = hit.id();
            let rendered = hit.render();
            let parameters = match_template(hit, log).expect("tree match verified");
            self.cache.add_sample(template_id, log.raw());
            self.pool.observe(log);
            return ParseResult {
                line_id: log.line_id(),
                raw: log.raw().to_string(),
                template_id,
                rendered,
                parameters,
                provenance: Provenance::CacheHit,
                latency: start.elapsed(),
            };
        }

        let exemplars = self.pool.select(log);
        let had_demonstrations = !exemplars.is_empty();
        let raw_template = self
            .gateway
            .extract_template(log.raw(), &exemplars)
            .unwrap_or_else(|_| log.raw().to_string());
        let draft = Template::parse(&raw_template)
            .or_else(|_| Template::parse(log.raw()))
            .expect("log is non-blank");
        let mut validated = if self.config.correction_enabled {
            self.corrector
                .validate(log, draft, had_demonstrations, &self.gateway)
                .0
        } else {
            draft
        };
        validated.add_sample(log.raw());

        let outcome = if self.config.adaptive_updates {
            self.updater
                .update(&mut self.cache, validated, &self.gateway)
        } else {
            self.updater.update_same_length(&mut self.cache, validated)
        };
        if let Some((retired, successor)) = outcome.retirement() {
            self.resolution.record(retired, successor);
        }

        let template_id = outcome.current_id();
        let current = self.cache.get(template_id).expect("outcome id is live");
        let rendered = current.render();
        let parameters = match_template(current, log).unwrap_or_default();
        self.pool.observe(log);
        ParseResult {
            line_id: log.line_id(),
            raw: log.raw().to_string(),
            template_id,
            rendered,
            parameters,
            provenance: Provenance::LlmPath,
            latency: start.elapsed(),
        }
    }

    /// Parse lines with explicit ids. Blank lines are counted and skipped.
    pub fn parse_stream_with_ids(
        &mut self,
        lines: impl IntoIterator<Item = (u64, String)>,
    ) -> StreamOutput {
        let start = Instant::now();
        let mut stats = StreamStats::default();
        let mut results = Vec::new();
        for (line_id, raw) in lines {
            stats.lines += 1;
            let record = self.record(line_id, &raw);
            if record.is_blank() {
                stats.blank_lines += 1;
                continue;
            }
            let result = self.parse_line(&record);
            match result.provenance {
                Provenance::CacheHit => stats.cache_hits += 1,
                Provenance::LlmPath => stats.llm_path_lines += 1,
            }
            results.push(result);
        }
        self.resolve_results(&mut results);
        stats.llm_calls = self.gateway.call_count();
        stats.template_count = self.cache.len();
        stats.wall = start.elapsed();
        StreamOutput {
            results,
            snapshot: self.cache.snapshot(),
            stats,
        }
    }

    /// Parse lines numbered 1, 2, 3, ... in input order.
    pub fn parse_stream(&mut self, lines: impl IntoIterator<Item = String>) -> StreamOutput {
        self.parse_stream_with_ids(
            lines
                .into_iter()
                .enumerate()
                .map(|(i, raw)| (i as u64 + 1, raw)),
        )
    }

    /// Rewrite results whose templates were retired by merges so they
    /// reference the surviving template. A result is only rewritten when
    /// the successor still matches its raw log; otherwise the original
    /// (matching) rendering is kept.
    pub fn resolve_results(&self, results: &mut [ParseResult]) {
        if self.resolution.is_empty() {
            return;
        }
        for result in results.iter_mut() {
            let final_id = self.resolution.resolve(result.template_id);
            if final_id == result.template_id {
                continue;
            }
            let Some(template) = self.cache.get(final_id) else {
                continue;
            };
            let record = LogRecord::with_tokens(
                result.line_id,
                result.raw.clone(),
                self.tokenizer.tokenize(&result.raw),
            );
            if let Some(parameters) = match_template(template, &record) {
                result.template_id = final_id;
                result.rendered = template.render();
                result.parameters = parameters;
            }
        }
    }
}
