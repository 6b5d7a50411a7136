//! Streaming log template extraction.
//!
//! efparse splits log messages into constant templates and variable
//! parameters. Templates live in a dual cache (a wildcard-aware prefix tree
//! for per-log matching plus token-length buckets for relevance retrieval),
//! new templates are merged adaptively into the cache via LCS segment
//! pairing, and every LLM-generated template passes a three-stage
//! correction before it is cached. A deterministic scripted mock stands in
//! for the LLM so whole runs are reproducible offline.
//!
//! Entry points:
//! - [`pipeline::Parser`] for streaming parsing,
//! - [`cache::DualCache`] / [`merge::CacheUpdater`] for the template store,
//! - [`corrector::Corrector`] for template validation,
//! - [`eval`] for grouping/parsing accuracy metrics,
//! - [`cli`] for the command-line front end.
//!
//! The `examples/` directory shows one runnable program per capability.

pub mod align;
pub mod cache;
pub mod cli;
pub mod config;
pub mod corrector;
pub mod distance;
pub mod eval;
pub mod exemplar;
pub mod gateway;
pub mod lexicon;
pub mod matcher;
pub mod merge;
pub mod pipeline;
pub mod template;
pub mod tokenize;

pub use cache::DualCache;
pub use corrector::{CorrectionTrace, Corrector};
pub use eval::{EvalReport, GroundTruth};
pub use exemplar::ExemplarPool;
pub use gateway::{Gateway, GatewayConfig, MockScript};
pub use lexicon::{composition_class, CompositionClass, Lexicon, PosClass};
pub use matcher::match_template;
pub use merge::{CacheUpdater, MergeOutcome};
pub use pipeline::{ParseResult, Parser, PipelineConfig, Provenance};
pub use template::{LogRecord, Template, TemplateId, Token, WILDCARD};
pub use tokenize::tokenize;
