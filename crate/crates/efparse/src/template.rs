//! Tokens, templates, and log records: the vocabulary the whole parser
//! operates on.
//!
//! A template is an ordered token sequence mixing literal constants and
//! `<*>` wildcards. Rendering joins tokens with single spaces; re-tokenizing
//! a rendered template always yields the same token sequence back.

use std::fmt;

use crate::matcher::match_template;
use crate::tokenize::tokenize;

/// The wildcard literal used in rendered templates.
pub const WILDCARD: &str = "<*>";

/// Default number of raw sample logs retained per template.
pub const DEFAULT_SAMPLE_CAPACITY: usize = 3;

/// One element of a template: either a literal constant or a wildcard.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    /// Matches any non-empty run of characters.
    Wildcard,
    /// Matches exactly this text. Never empty, never contains whitespace,
    /// never equal to the wildcard literal.
    Constant(String),
}

impl Token {
    /// Interpret a single tokenized word as a template token.
    ///
    /// `"<*>"` becomes [`Token::Wildcard`]; anything else is a constant.
    /// The input must be a token produced by [`tokenize`] (non-empty, no
    /// whitespace).
    pub fn parse(word: &str) -> Token {
        debug_assert!(!word.is_empty() && !word.chars().any(char::is_whitespace));
        if word == WILDCARD {
            Token::Wildcard
        } else {
            Token::Constant(word.to_string())
        }
    }

    /// Build a constant token, rejecting text that would violate the token
    /// invariants.
    pub fn constant(text: impl Into<String>) -> Result<Token, TemplateError> {
        let text = text.into();
        if text.is_empty() || text == WILDCARD || text.chars().any(char::is_whitespace) {
            return Err(TemplateError::InvalidConstant(text));
        }
        Ok(Token::Constant(text))
    }

    pub fn is_wildcard(&self) -> bool {
        matches!(self, Token::Wildcard)
    }

    /// The rendered form of this token.
    pub fn as_str(&self) -> &str {
        match self {
            Token::Wildcard => WILDCARD,
            Token::Constant(text) => text,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("template must contain at least one token")]
    Empty,
    #[error("invalid constant token {0:?}")]
    InvalidConstant(String),
}

/// Identifier of a cached template. Ids are assigned by the cache in
/// insertion order and never reused; `0` marks a draft that has not been
/// inserted yet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TemplateId(pub u64);

impl TemplateId {
    pub const DRAFT: TemplateId = TemplateId(0);

    pub fn is_draft(&self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.0)
    }
}

/// An ordered token sequence plus a bounded list of raw logs it has matched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    id: TemplateId,
    tokens: Vec<Token>,
    sample_logs: Vec<String>,
    sample_capacity: usize,
}

impl Template {
    /// Create a draft template (no id assigned yet) from tokens.
    pub fn draft(tokens: Vec<Token>) -> Result<Template, TemplateError> {
        if tokens.is_empty() {
            return Err(TemplateError::Empty);
        }
        Ok(Template {
            id: TemplateId::DRAFT,
            tokens,
            sample_logs: Vec::new(),
            sample_capacity: DEFAULT_SAMPLE_CAPACITY,
        })
    }

    /// Parse a rendered template string ("a <*> c") into a draft template.
    pub fn parse(rendered: &str) -> Result<Template, TemplateError> {
        let tokens: Vec<Token> = tokenize(rendered).iter().map(|w| Token::parse(w)).collect();
        Template::draft(tokens)
    }

    pub fn id(&self) -> TemplateId {
        self.id
    }

    pub(crate) fn set_id(&mut self, id: TemplateId) {
        self.id = id;
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Token count.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn wildcard_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_wildcard()).count()
    }

    /// Join tokens with single spaces, wildcards rendered as `<*>`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, tok) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(tok.as_str());
        }
        out
    }

    pub fn sample_logs(&self) -> &[String] {
        &self.sample_logs
    }

    pub fn sample_capacity(&self) -> usize {
        self.sample_capacity
    }

    pub fn set_sample_capacity(&mut self, capacity: usize) {
        self.sample_capacity = capacity.max(1);
        self.sample_logs.truncate(self.sample_capacity);
    }

    /// Record a raw log as a sample if it matches this template, the list
    /// has room, and the log is not already stored. Returns whether the
    /// sample was added.
    pub fn add_sample(&mut self, raw: &str) -> bool {
        if self.sample_logs.len() >= self.sample_capacity {
            return false;
        }
        if self.sample_logs.iter().any(|s| s == raw) {
            return false;
        }
        let record = LogRecord::new(0, raw);
        if match_template(self, &record).is_none() {
            return false;
        }
        self.sample_logs.push(raw.to_string());
        true
    }

    /// Copy samples from another template, keeping only those that match.
    pub(crate) fn absorb_samples<'a>(&mut self, samples: impl IntoIterator<Item = &'a String>) {
        for raw in samples {
            self.add_sample(raw);
        }
    }

    /// Replace the token range `[start, start + len)` with `replacement`,
    /// producing a new draft template. Returns `None` when the result would
    /// be empty.
    pub(crate) fn splice(
        &self,
        start: usize,
        len: usize,
        replacement: &[Token],
    ) -> Option<Template> {
        let mut tokens = Vec::with_capacity(self.tokens.len() - len + replacement.len());
        tokens.extend_from_slice(&self.tokens[..start]);
        tokens.extend_from_slice(replacement);
        tokens.extend_from_slice(&self.tokens[start + len..]);
        Template::draft(tokens).ok()
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A single input log line: its 1-based line id, raw text, and whitespace
/// tokenization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogRecord {
    line_id: u64,
    raw: String,
    tokens: Vec<String>,
}

impl LogRecord {
    pub fn new(line_id: u64, raw: impl Into<String>) -> LogRecord {
        let raw = raw.into();
        let tokens = tokenize(&raw);
        LogRecord {
            line_id,
            raw,
            tokens,
        }
    }

    pub fn with_tokens(line_id: u64, raw: impl Into<String>, tokens: Vec<String>) -> LogRecord {
        LogRecord {
            line_id,
            raw: raw.into(),
            tokens,
        }
    }

    pub fn line_id(&self) -> u64 {
        self.line_id
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn is_blank(&self) -> bool {
        self.tokens.is_empty()
    }
}
