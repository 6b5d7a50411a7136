//! Run configuration with layered sources.
//!
//! Precedence, highest first: CLI flag, environment variable
//! (`EFPARSE_<KEY>`), config file (flat `key = value` lines), built-in
//! default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::corrector::DEFAULT_SPECIAL_CHARS;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid value for {key}: {value:?} ({reason})")]
    Invalid {
        key: String,
        value: String,
        reason: String,
    },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Which backend answers model queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackendKind {
    Http,
    #[default]
    Mock,
}

impl BackendKind {
    fn parse(s: &str) -> Option<BackendKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "http" => Some(BackendKind::Http),
            "mock" => Some(BackendKind::Mock),
            _ => None,
        }
    }
}

/// Full configuration of a run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub threshold: f64,
    pub max_demos: usize,
    pub exemplar_pool_size: usize,
    pub exemplar_threshold: f64,
    pub special_chars: String,
    pub sample_capacity: usize,
    pub correction: bool,
    pub adaptive_updates: bool,
    pub backend: BackendKind,
    pub mock_script: Option<PathBuf>,
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub temperature: f64,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub ground_truth: Option<PathBuf>,
    pub dump_templates: Option<PathBuf>,
    pub verb_lexicon: Option<PathBuf>,
    pub wordlist: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            output_dir: None,
            threshold: 0.75,
            max_demos: 3,
            exemplar_pool_size: 10_000,
            exemplar_threshold: 0.75,
            special_chars: DEFAULT_SPECIAL_CHARS.iter().collect(),
            sample_capacity: 3,
            correction: true,
            adaptive_updates: true,
            backend: BackendKind::Mock,
            mock_script: None,
            endpoint: String::new(),
            model: "gpt-3.5-turbo".to_string(),
            api_key_env: "EFPARSE_API_KEY".to_string(),
            temperature: 0.0,
            timeout_secs: 30,
            max_retries: 2,
            ground_truth: None,
            dump_templates: None,
            verb_lexicon: None,
            wordlist: None,
        }
    }
}

/// Every settable key, used by file and environment loading.
pub const CONFIG_KEYS: &[&str] = &[
    "input",
    "output_dir",
    "threshold",
    "max_demos",
    "exemplar_pool_size",
    "exemplar_threshold",
    "special_chars",
    "sample_capacity",
    "correction",
    "adaptive_updates",
    "backend",
    "mock_script",
    "endpoint",
    "model",
    "api_key_env",
    "temperature",
    "timeout_secs",
    "max_retries",
    "ground_truth",
    "dump_templates",
    "verb_lexicon",
    "wordlist",
];

impl RunConfig {
    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "input" => self.input = Some(PathBuf::from(value)),
            "output_dir" => self.output_dir = Some(PathBuf::from(value)),
            "threshold" => self.threshold = parse_f64(key, value)?,
            "max_demos" => self.max_demos = parse_usize(key, value)?,
            "exemplar_pool_size" => self.exemplar_pool_size = parse_usize(key, value)?,
            "exemplar_threshold" => self.exemplar_threshold = parse_f64(key, value)?,
            "special_chars" => self.special_chars = value.to_string(),
            "sample_capacity" => self.sample_capacity = parse_usize(key, value)?,
            "correction" => self.correction = parse_bool(key, value)?,
            "adaptive_updates" => self.adaptive_updates = parse_bool(key, value)?,
            "backend" => {
                self.backend = BackendKind::parse(value).ok_or_else(|| ConfigError::Invalid {
                    key: "backend".to_string(),
                    value: value.to_string(),
                    reason: "expected http or mock".to_string(),
                })?
            }
            "mock_script" => self.mock_script = Some(PathBuf::from(value)),
            "endpoint" => self.endpoint = value.to_string(),
            "model" => self.model = value.to_string(),
            "api_key_env" => self.api_key_env = value.to_string(),
            "temperature" => self.temperature = parse_f64(key, value)?,
            "timeout_secs" => self.timeout_secs = parse_usize(key, value)? as u64,
            "max_retries" => self.max_retries = parse_usize(key, value)? as u32,
            "ground_truth" => self.ground_truth = Some(PathBuf::from(value)),
            "dump_templates" => self.dump_templates = Some(PathBuf::from(value)),
            "verb_lexicon" => self.verb_lexicon = Some(PathBuf::from(value)),
            "wordlist" => self.wordlist = Some(PathBuf::from(value)),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Load `key = value` lines from a file (`#` comments and blank lines
    /// allowed).
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Invalid {
                    key: "config".to_string(),
                    value: line.to_string(),
                    reason: "expected key = value".to_string(),
                });
            };
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// Read `EFPARSE_<KEY>` environment variables for every config key.
    pub fn apply_env(&mut self) -> Result<(), ConfigError> {
        for key in CONFIG_KEYS {
            let var = format!("EFPARSE_{}", key.to_uppercase());
            if let Ok(value) = std::env::var(&var) {
                if !value.is_empty() {
                    self.set(key, &value)?;
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let check_threshold = |key: &'static str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(ConfigError::Invalid {
                    key: key.to_string(),
                    value: v.to_string(),
                    reason: "must be in (0, 1]".to_string(),
                })
            }
        };
        check_threshold("threshold", self.threshold)?;
        check_threshold("exemplar_threshold", self.exemplar_threshold)?;
        if self.max_demos < 1 {
            return Err(ConfigError::Invalid {
                key: "max_demos".to_string(),
                value: self.max_demos.to_string(),
                reason: "must be at least 1".to_string(),
            });
        }
        if self.exemplar_pool_size < 1 {
            return Err(ConfigError::Invalid {
                key: "exemplar_pool_size".to_string(),
                value: self.exemplar_pool_size.to_string(),
                reason: "must be at least 1".to_string(),
            });
        }
        Ok(())
    }

    /// The pipeline tunables this configuration implies.
    pub fn pipeline_config(&self) -> crate::pipeline::PipelineConfig {
        crate::pipeline::PipelineConfig {
            similarity_threshold: self.threshold,
            max_demonstrations: self.max_demos,
            exemplar_pool_size: self.exemplar_pool_size,
            exemplar_threshold: self.exemplar_threshold,
            special_chars: self.special_chars.chars().collect(),
            sample_capacity: self.sample_capacity,
            correction_enabled: self.correction,
            adaptive_updates: self.adaptive_updates,
            extra_delimiters: Vec::new(),
        }
    }

    /// Dump the effective configuration as sorted `key = value` lines.
    pub fn describe(&self) -> String {
        let mut map: BTreeMap<&str, String> = BTreeMap::new();
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        map.insert("input", path(&self.input));
        map.insert("output_dir", path(&self.output_dir));
        map.insert("threshold", self.threshold.to_string());
        map.insert("max_demos", self.max_demos.to_string());
        map.insert("exemplar_pool_size", self.exemplar_pool_size.to_string());
        map.insert("exemplar_threshold", self.exemplar_threshold.to_string());
        map.insert("special_chars", self.special_chars.clone());
        map.insert("sample_capacity", self.sample_capacity.to_string());
        map.insert("correction", self.correction.to_string());
        map.insert("adaptive_updates", self.adaptive_updates.to_string());
        map.insert(
            "backend",
            match self.backend {
                BackendKind::Http => "http".to_string(),
                BackendKind::Mock => "mock".to_string(),
            },
        );
        map.insert("mock_script", path(&self.mock_script));
        map.insert("endpoint", self.endpoint.clone());
        map.insert("model", self.model.clone());
        map.insert("api_key_env", self.api_key_env.clone());
        map.insert("temperature", self.temperature.to_string());
        map.insert("timeout_secs", self.timeout_secs.to_string());
        map.insert("max_retries", self.max_retries.to_string());
        map.insert("ground_truth", path(&self.ground_truth));
        map.insert("dump_templates", path(&self.dump_templates));
        map.insert("verb_lexicon", path(&self.verb_lexicon));
        map.insert("wordlist", path(&self.wordlist));
        map.into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse().map_err(|_| ConfigError::Invalid {
        key: key.to_string(),
        value: value.to_string(),
        reason: "expected a number".to_string(),
    })
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse().map_err(|_| ConfigError::Invalid {
        key: key.to_string(),
        value: value.to_string(),
        reason: "expected a non-negative integer".to_string(),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "1" | "on" | "yes" => Ok(true),
        "false" | "0" | "off" | "no" => Ok(false),
        _ => Err(ConfigError::Invalid {
            key: key.to_string(),
            value: value.to_string(),
            reason: "expected true or false".to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let c = RunConfig::default();
        assert_eq!(c.threshold, 0.75);
        assert_eq!(c.max_demos, 3);
        assert_eq!(c.exemplar_pool_size, 10_000);
        assert_eq!(c.exemplar_threshold, 0.75);
        assert_eq!(c.temperature, 0.0);
        assert_eq!(c.timeout_secs, 30);
        assert_eq!(c.max_retries, 2);
        assert_eq!(c.api_key_env, "EFPARSE_API_KEY");
        assert!(c.correction);
        assert!(c.adaptive_updates);
    }

    #[test]
    fn file_assignments_apply() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "# comment\nthreshold = 0.8\nmax_demos=5\nbackend = http\n",
        )
        .unwrap();
        let mut c = RunConfig::default();
        c.apply_file(&path).unwrap();
        assert_eq!(c.threshold, 0.8);
        assert_eq!(c.max_demos, 5);
        assert_eq!(c.backend, BackendKind::Http);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut c = RunConfig::default();
        assert!(matches!(
            c.set("bogus", "1"),
            Err(ConfigError::UnknownKey(_))
        ));
    }

    #[test]
    fn validation_rejects_out_of_range() {
        let mut c = RunConfig::default();
        c.threshold = 0.0;
        assert!(c.validate().is_err());
        c.threshold = 1.5;
        assert!(c.validate().is_err());
        c.threshold = 1.0;
        assert!(c.validate().is_ok());
        c.max_demos = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn every_key_round_trips_through_set() {
        let mut c = RunConfig::default();
        for key in CONFIG_KEYS {
            let value = match *key {
                "threshold" | "exemplar_threshold" => "0.8",
                "temperature" => "0.5",
                "correction" | "adaptive_updates" => "false",
                "backend" => "http",
                "special_chars" => "/:.",
                "max_demos" | "sample_capacity" | "max_retries" => "2",
                "exemplar_pool_size" | "timeout_secs" => "77",
                _ => "some-value",
            };
            c.set(key, value).unwrap_or_else(|e| panic!("{key}: {e}"));
        }
        assert!(!c.correction);
        assert_eq!(c.model, "some-value");
    }
}
