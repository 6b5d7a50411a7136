//! Whitespace tokenization.
//!
//! Splitting is on runs of whitespace only; punctuation stays attached to
//! its token, so `"10 seconds."` yields `["10", "seconds."]`. Joining the
//! tokens back with single spaces and re-tokenizing reproduces the same
//! sequence.

/// Split a raw string on runs of whitespace. Blank input yields an empty
/// sequence.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.split_whitespace().map(str::to_string).collect()
}

/// Tokenizer with optional extra single-character delimiters.
///
/// Extra delimiters are treated like whitespace: they split tokens and are
/// not preserved. The default tokenizer has none.
#[derive(Debug, Clone, Default)]
pub struct Tokenizer {
    extra_delimiters: Vec<char>,
}

impl Tokenizer {
    pub fn new(extra_delimiters: impl Into<Vec<char>>) -> Tokenizer {
        Tokenizer {
            extra_delimiters: extra_delimiters.into(),
        }
    }

    pub fn tokenize(&self, raw: &str) -> Vec<String> {
        if self.extra_delimiters.is_empty() {
            return tokenize(raw);
        }
        raw.split(|c: char| c.is_whitespace() || self.extra_delimiters.contains(&c))
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_whitespace_keeping_punctuation() {
        assert_eq!(
            tokenize("Scheduled snapshot period at 10 seconds."),
            vec!["Scheduled", "snapshot", "period", "at", "10", "seconds."]
        );
    }

    #[test]
    fn blank_input_yields_empty() {
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(tokenize(" \t\n"), Vec::<String>::new());
    }

    #[test]
    fn whitespace_runs_collapse() {
        assert_eq!(tokenize("a  b\tc"), vec!["a", "b", "c"]);
    }

    #[test]
    fn join_and_retokenize_is_stable() {
        let toks = tokenize("x  y\t z\nw");
        assert_eq!(tokenize(&toks.join(" ")), toks);
    }

    #[test]
    fn extra_delimiters_split_and_vanish() {
        let t = Tokenizer::new(vec!['=', ',']);
        assert_eq!(t.tokenize("k=v, a b"), vec!["k", "v", "a", "b"]);
    }
}
