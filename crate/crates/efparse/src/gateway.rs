//! Language-model gateway.
//!
//! Three query kinds flow through one interface: template extraction for a
//! target log, semantic merging of two template segments, and confirmation
//! of suspected variables. Backends are pluggable: an HTTP chat-completions
//! client for real models and a deterministic scripted mock for offline
//! runs and tests.

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use serde::Deserialize;

/// What a prompt is asking for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryKind {
    Extract,
    Merge,
    Confirm,
}

impl QueryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            QueryKind::Extract => "extract",
            QueryKind::Merge => "merge",
            QueryKind::Confirm => "confirm",
        }
    }

    fn parse(s: &str) -> Option<QueryKind> {
        match s {
            "extract" => Some(QueryKind::Extract),
            "merge" => Some(QueryKind::Merge),
            "confirm" => Some(QueryKind::Confirm),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("backend returned an unusable response: {0}")]
    Protocol(String),
    #[error("mock script error: {0}")]
    Script(String),
    #[error("gateway misconfigured: {0}")]
    Config(String),
}

/// A chat backend answers one rendered prompt with one text response.
///
/// `placeholders` carries the named values that were substituted into the
/// prompt, so scripted backends can echo them back.
pub trait ChatBackend: Send + Sync {
    fn complete(
        &self,
        kind: QueryKind,
        prompt: &str,
        placeholders: &[(&str, String)],
    ) -> Result<String, GatewayError>;
}

/// Backend selection plus transport parameters.
#[derive(Debug, Clone)]
pub struct GatewayConfig {
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub temperature: f64,
    pub timeout_secs: u64,
    pub max_retries: u32,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        GatewayConfig {
            endpoint: String::new(),
            model: "gpt-3.5-turbo".to_string(),
            api_key_env: "EFPARSE_API_KEY".to_string(),
            temperature: 0.0,
            timeout_secs: 30,
            max_retries: 2,
        }
    }
}

/// The three prompt templates, with named `{placeholder}` slots.
#[derive(Debug, Clone)]
pub struct PromptSet {
    pub extract: String,
    pub merge: String,
    pub confirm: String,
}

impl Default for PromptSet {
    fn default() -> Self {
        PromptSet {
            extract: include_str!("../prompts/extract.txt").to_string(),
            merge: include_str!("../prompts/merge.txt").to_string(),
            confirm: include_str!("../prompts/confirm.txt").to_string(),
        }
    }
}

impl PromptSet {
    /// Load prompt files `extract.txt`, `merge.txt`, `confirm.txt` from a
    /// directory.
    pub fn from_dir(dir: &Path) -> std::io::Result<PromptSet> {
        Ok(PromptSet {
            extract: std::fs::read_to_string(dir.join("extract.txt"))?,
            merge: std::fs::read_to_string(dir.join("merge.txt"))?,
            confirm: std::fs::read_to_string(dir.join("confirm.txt"))?,
        })
    }
}

fn fill(template: &str, placeholders: &[(&str, String)]) -> String {
    let mut out = template.to_string();
    for (name, value) in placeholders {
        out = out.replace(&format!("{{{name}}}"), value);
    }
    out
}

/// Front end used by the pipeline: renders prompts, dispatches to the
/// backend with bounded retries, and normalizes responses.
pub struct Gateway {
    backend: Box<dyn ChatBackend>,
    prompts: PromptSet,
    max_retries: u32,
    calls: AtomicU64,
}

impl Gateway {
    pub fn new(backend: Box<dyn ChatBackend>, prompts: PromptSet, max_retries: u32) -> Gateway {
        Gateway {
            backend,
            prompts,
            max_retries,
            calls: AtomicU64::new(0),
        }
    }

    pub fn with_mock(script: MockScript) -> Gateway {
        Gateway::new(Box::new(script), PromptSet::default(), 0)
    }

    /// Number of backend calls made so far (successful or not).
    pub fn call_count(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    fn dispatch(
        &self,
        kind: QueryKind,
        prompt: &str,
        placeholders: &[(&str, String)],
    ) -> Result<String, GatewayError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let mut last = None;
        for _ in 0..=self.max_retries {
            match self.backend.complete(kind, prompt, placeholders) {
                Ok(resp) => return Ok(resp),
                Err(err) => last = Some(err),
            }
        }
        Err(last.unwrap_or_else(|| GatewayError::Transport("no attempt made".into())))
    }

    /// Ask for a template for `target`, with unlabeled comparison logs as
    /// context. Returns the first response line containing a wildcard, or
    /// the longest line when none does.
    pub fn extract_template(
        &self,
        target: &str,
        exemplars: &[String],
    ) -> Result<String, GatewayError> {
        debug_assert!(!target.trim().is_empty());
        let exemplar_block = if exemplars.is_empty() {
            "(none)".to_string()
        } else {
            exemplars
                .iter()
                .map(|e| format!("- {e}"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        let placeholders = [
            ("target", target.to_string()),
            ("exemplars", exemplar_block),
        ];
        let prompt = fill(&self.prompts.extract, &placeholders);
        let response = self.dispatch(QueryKind::Extract, &prompt, &placeholders)?;
        let lines: Vec<&str> = response
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let best = lines
            .iter()
            .find(|l| l.contains(crate::template::WILDCARD))
            .or_else(|| lines.iter().max_by_key(|l| l.len()))
            .copied()
            .ok_or_else(|| GatewayError::Protocol("empty extraction response".into()))?;
        Ok(best.to_string())
    }

    /// Ask for a merged form of two differing template segments. The reply
    /// is trimmed to a single line; the caller validates it.
    pub fn semantic_merge(
        &self,
        left: &str,
        right: &str,
        template_a: &str,
        template_b: &str,
    ) -> Result<String, GatewayError> {
        let placeholders = [
            ("left", left.to_string()),
            ("right", right.to_string()),
            ("template_a", template_a.to_string()),
            ("template_b", template_b.to_string()),
        ];
        let prompt = fill(&self.prompts.merge, &placeholders);
        let response = self.dispatch(QueryKind::Merge, &prompt, &placeholders)?;
        Ok(response
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty())
            .unwrap_or("")
            .to_string())
    }

    /// Ask which of the suspected tokens are variables. Hallucinated extras
    /// are dropped; transport failures yield an empty subset.
    pub fn confirm_variables(&self, log: &str, template: &str, suspects: &[String]) -> Vec<String> {
        debug_assert!(!suspects.is_empty());
        let placeholders = [
            ("log", log.to_string()),
            ("template", template.to_string()),
            ("suspects", suspects.join(", ")),
        ];
        let prompt = fill(&self.prompts.confirm, &placeholders);
        let Ok(response) = self.dispatch(QueryKind::Confirm, &prompt, &placeholders) else {
            return Vec::new();
        };
        let named: Vec<&str> = response
            .split(['\n', ','])
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        suspects
            .iter()
            .filter(|s| named.contains(&s.as_str()))
            .cloned()
            .collect()
    }
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway")
            .field("max_retries", &self.max_retries)
            .field("calls", &self.call_count())
            .finish()
    }
}

/// One scripted rule: `kind | matcher | response`.
#[derive(Debug, Clone)]
struct MockRule {
    kind: Option<QueryKind>,
    matcher: Option<String>,
    response: String,
}

/// Deterministic scripted backend.
///
/// Line-oriented rule file, `#` comments allowed:
///
/// ```text
/// kind | substring-matcher | response
/// ```
///
/// `kind` is `extract`, `merge`, `confirm`, or `*`. The matcher is a
/// substring tested against the rendered prompt; `*` or empty always
/// matches. The first matching rule wins. Responses may use `\n` for
/// newlines and `{placeholder}` names (`{target}`, `{left}`, `{right}`,
/// `{log}`, `{template}`, `{suspects}`, ...) which expand to the values the
/// prompt was built from. Every query kind must be covered by a catch-all
/// rule so replay never falls through.
#[derive(Debug, Clone)]
pub struct MockScript {
    rules: Vec<MockRule>,
}

impl MockScript {
    pub fn parse(text: &str) -> Result<MockScript, GatewayError> {
        let mut rules = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(3, '|');
            let kind_s = parts.next().unwrap_or("").trim();
            let matcher_s = parts.next().map(str::trim).ok_or_else(|| {
                GatewayError::Script(format!(
                    "line {}: expected `kind | matcher | response`",
                    idx + 1
                ))
            })?;
            let response_s = parts.next().map(str::trim).unwrap_or("");
            let kind = if kind_s == "*" {
                None
            } else {
                Some(QueryKind::parse(kind_s).ok_or_else(|| {
                    GatewayError::Script(format!("line {}: unknown query kind {kind_s:?}", idx + 1))
                })?)
            };
            let matcher = match matcher_s {
                "" | "*" => None,
                m => Some(m.to_string()),
            };
            rules.push(MockRule {
                kind,
                matcher,
                response: response_s.replace("\\n", "\n"),
            });
        }
        let script = MockScript { rules };
        for kind in [QueryKind::Extract, QueryKind::Merge, QueryKind::Confirm] {
            if !script
                .rules
                .iter()
                .any(|r| r.matcher.is_none() && (r.kind.is_none() || r.kind == Some(kind)))
            {
                return Err(GatewayError::Script(format!(
                    "no default rule for query kind {:?}",
                    kind.as_str()
                )));
            }
        }
        Ok(script)
    }

    pub fn from_file(path: &Path) -> Result<MockScript, GatewayError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GatewayError::Script(format!("{}: {e}", path.display())))?;
        MockScript::parse(&text)
    }

    /// A script that answers every extraction with the target itself and
    /// every merge with the left segment.
    pub fn echo() -> MockScript {
        MockScript::parse("extract | * | {target}\nmerge | * | {left}\nconfirm | * |\n")
            .expect("builtin script parses")
    }
}

impl ChatBackend for MockScript {
    fn complete(
        &self,
        kind: QueryKind,
        prompt: &str,
        placeholders: &[(&str, String)],
    ) -> Result<String, GatewayError> {
        let rule = self
            .rules
            .iter()
            .find(|r| {
                (r.kind.is_none() || r.kind == Some(kind))
                    && r.matcher.as_deref().is_none_or(|m| prompt.contains(m))
            })
            .ok_or_else(|| GatewayError::Script("no rule matched".into()))?;
        Ok(fill(&rule.response, placeholders))
    }
}

/// Chat-completions HTTP backend. POSTs the standard JSON shape (`model`,
/// `messages`, `temperature`) and reads `choices[0].message.content`.
pub struct HttpBackend {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    temperature: f64,
    client: reqwest::blocking::Client,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

impl HttpBackend {
    /// Build from config, reading the API key from the configured
    /// environment variable. A missing key is a configuration error.
    pub fn from_config(config: &GatewayConfig) -> Result<HttpBackend, GatewayError> {
        if config.endpoint.is_empty() {
            return Err(GatewayError::Config(
                "http backend requires an endpoint".into(),
            ));
        }
        let api_key = std::env::var(&config.api_key_env)
            .ok()
            .filter(|k| !k.is_empty());
        if api_key.is_none() {
            return Err(GatewayError::Config(format!(
                "http backend requires an API key in ${}",
                config.api_key_env
            )));
        }
        Ok(HttpBackend::new(
            &config.endpoint,
            &config.model,
            api_key,
            config.temperature,
            Duration::from_secs(config.timeout_secs),
        ))
    }

    pub fn new(
        endpoint: &str,
        model: &str,
        api_key: Option<String>,
        temperature: f64,
        timeout: Duration,
    ) -> HttpBackend {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .expect("http client");
        HttpBackend {
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            api_key,
            temperature,
            client,
        }
    }
}

impl ChatBackend for HttpBackend {
    fn complete(
        &self,
        _kind: QueryKind,
        prompt: &str,
        _placeholders: &[(&str, String)],
    ) -> Result<String, GatewayError> {
        let body = serde_json::json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
        });
        let mut req = self.client.post(&self.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req
            .send()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(GatewayError::Transport(format!("http status {status}")));
        }
        let parsed: ChatResponse = resp
            .json()
            .map_err(|e| GatewayError::Protocol(e.to_string()))?;
        parsed
            .choices
            .first()
            .map(|c| c.message.content.clone())
            .ok_or_else(|| GatewayError::Protocol("response had no choices".into()))
    }
}
