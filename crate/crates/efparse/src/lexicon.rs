//! Lexical classification of tokens: character composition, a lightweight
//! part-of-speech heuristic, and vocabulary membership.
//!
//! Tagging is lexicon-driven and fully deterministic. The bundled verb list
//! and wordlist live under `lexicons/` and can be replaced with custom
//! files at run time.

use std::collections::HashSet;
use std::io;
use std::path::Path;
use std::sync::OnceLock;

/// Character composition of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompositionClass {
    /// Letters only.
    AlphabeticOnly,
    /// Digits, optionally one leading sign and internal dots ("42", "3.14",
    /// "-1.5", "10.0.0.1").
    NumericOnly,
    /// At least one letter and one digit, other characters permitted.
    Alphanumeric,
    /// Everything else.
    Symbolic,
}

/// Classify a non-empty token by its characters. Total: every non-empty
/// token maps to exactly one class.
///
/// Panics on an empty token; passing one is a caller bug.
pub fn composition_class(token: &str) -> CompositionClass {
    assert!(
        !token.is_empty(),
        "composition_class called with empty token"
    );
    if token.chars().all(char::is_alphabetic) {
        return CompositionClass::AlphabeticOnly;
    }
    if is_numeric_only(token) {
        return CompositionClass::NumericOnly;
    }
    let has_letter = token.chars().any(char::is_alphabetic);
    let has_digit = token.chars().any(|c| c.is_ascii_digit());
    if has_letter && has_digit {
        return CompositionClass::Alphanumeric;
    }
    CompositionClass::Symbolic
}

fn is_numeric_only(token: &str) -> bool {
    let body = token.strip_prefix(['+', '-']).unwrap_or(token);
    if body.is_empty() || body.starts_with('.') || body.ends_with('.') {
        return false;
    }
    let mut saw_digit = false;
    for c in body.chars() {
        match c {
            '0'..='9' => saw_digit = true,
            '.' => {}
            _ => return false,
        }
    }
    saw_digit
}

/// Syntactic role of a token, reduced to the classes that matter for
/// deciding whether it can be a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosClass {
    /// Identifier-like: URLs, paths, emails, key=value, mixed-separator ids.
    X,
    /// Numeric value.
    Num,
    /// Proper noun.
    Propn,
    /// Verb (lexicon lookup, inflections included).
    Verb,
    /// Anything else.
    Other,
}

impl PosClass {
    /// Whether tokens of this class are treated as potential variables.
    pub fn is_potential_variable(&self) -> bool {
        matches!(self, PosClass::X | PosClass::Num | PosClass::Propn)
    }
}

/// Verb lexicon plus English wordlist backing [`pos_class`] and
/// [`in_vocabulary`].
#[derive(Debug, Clone)]
pub struct Lexicon {
    verbs: HashSet<String>,
    words: HashSet<String>,
}

const BUNDLED_VERBS: &str = include_str!("../lexicons/verbs.txt");
const BUNDLED_WORDS: &str = include_str!("../lexicons/words.txt");

static BUNDLED: OnceLock<Lexicon> = OnceLock::new();

impl Lexicon {
    /// The lexicon compiled in from `lexicons/verbs.txt` and
    /// `lexicons/words.txt`.
    pub fn bundled() -> &'static Lexicon {
        BUNDLED.get_or_init(|| Lexicon {
            verbs: parse_wordlist(BUNDLED_VERBS),
            words: parse_wordlist(BUNDLED_WORDS),
        })
    }

    /// Load a lexicon from plain-text files: one lowercase entry per line,
    /// `#` comments allowed.
    pub fn from_files(verbs: &Path, words: &Path) -> io::Result<Lexicon> {
        Ok(Lexicon {
            verbs: parse_wordlist(&std::fs::read_to_string(verbs)?),
            words: parse_wordlist(&std::fs::read_to_string(words)?),
        })
    }

    pub fn from_parts(verbs: HashSet<String>, words: HashSet<String>) -> Lexicon {
        Lexicon { verbs, words }
    }

    /// True iff the lowercased token is in the wordlist. Empty tokens are
    /// never in vocabulary.
    pub fn in_vocabulary(&self, token: &str) -> bool {
        if token.is_empty() {
            return false;
        }
        self.words.contains(&token.to_lowercase())
    }

    pub fn is_verb(&self, token: &str) -> bool {
        !token.is_empty() && self.verbs.contains(&token.to_lowercase())
    }

    /// Heuristic part-of-speech class for `sentence[index]`.
    ///
    /// Order of checks: numeric, identifier shapes, verb lexicon, proper
    /// noun. A capitalized common-vocabulary word at the start of the
    /// sentence is not treated as a proper noun.
    pub fn pos_class(&self, token: &str, sentence: &[String], index: usize) -> PosClass {
        debug_assert!(index < sentence.len(), "pos_class index out of range");
        debug_assert!(sentence.get(index).map(String::as_str) == Some(token));
        if token.is_empty() {
            return PosClass::Other;
        }
        let composition = composition_class(token);
        if composition == CompositionClass::NumericOnly {
            return PosClass::Num;
        }
        if has_identifier_shape(token, composition) {
            return PosClass::X;
        }
        if self.is_verb(token) {
            return PosClass::Verb;
        }
        let capitalized_alpha = composition == CompositionClass::AlphabeticOnly
            && token.chars().next().is_some_and(char::is_uppercase);
        if capitalized_alpha {
            let sentence_initial_common = index == 0 && self.in_vocabulary(token);
            if !sentence_initial_common {
                return PosClass::Propn;
            }
        }
        PosClass::Other
    }
}

/// Identifier/URL/path/email shapes: tokens containing `/`, `@`, or `=`,
/// any letter+digit mix, or alphanumerics joined by internal separators
/// (`-`, `_`, `.`, `:` with alphanumeric neighbors).
fn has_identifier_shape(token: &str, composition: CompositionClass) -> bool {
    if token.contains(['/', '@', '=']) {
        return true;
    }
    if composition == CompositionClass::Alphanumeric {
        return true;
    }
    let chars: Vec<char> = token.chars().collect();
    chars.windows(3).any(|w| {
        matches!(w[1], '-' | '_' | '.' | ':') && w[0].is_alphanumeric() && w[2].is_alphanumeric()
    })
}

fn parse_wordlist(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentence(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn composition_examples() {
        assert_eq!(composition_class("apache2"), CompositionClass::Alphanumeric);
        assert_eq!(composition_class("42"), CompositionClass::NumericOnly);
        assert_eq!(composition_class("3.14"), CompositionClass::NumericOnly);
        assert_eq!(composition_class("-1.5"), CompositionClass::NumericOnly);
        assert_eq!(composition_class("--"), CompositionClass::Symbolic);
        assert_eq!(composition_class("seconds."), CompositionClass::Symbolic);
        assert_eq!(
            composition_class("failed"),
            CompositionClass::AlphabeticOnly
        );
        assert_eq!(composition_class("10.0.0.1"), CompositionClass::NumericOnly);
        assert_eq!(composition_class("."), CompositionClass::Symbolic);
        assert_eq!(composition_class("1."), CompositionClass::Symbolic);
    }

    #[test]
    #[should_panic]
    fn composition_panics_on_empty() {
        composition_class("");
    }

    #[test]
    fn pos_examples() {
        let lex = Lexicon::bundled();
        let s = sentence("value is 3.14 for Microsoft and failed db-primary");
        assert_eq!(lex.pos_class("3.14", &s, 2), PosClass::Num);
        assert_eq!(lex.pos_class("Microsoft", &s, 4), PosClass::Propn);
        assert_eq!(lex.pos_class("failed", &s, 6), PosClass::Verb);
        assert_eq!(lex.pos_class("db-primary", &s, 7), PosClass::X);
        assert_eq!(lex.pos_class("for", &s, 3), PosClass::Other);
    }

    #[test]
    fn sentence_initial_common_word_is_not_propn() {
        let lex = Lexicon::bundled();
        let s = sentence("Database connection failed");
        assert_eq!(lex.pos_class("Database", &s, 0), PosClass::Other);
        let s2 = sentence("at Mon we start");
        assert_eq!(lex.pos_class("Mon", &s2, 1), PosClass::Propn);
    }

    #[test]
    fn identifier_shapes() {
        let lex = Lexicon::bundled();
        let s = sentence("/var/log a@b k=v host:8080 09:12:50 in, seconds.");
        assert_eq!(lex.pos_class("/var/log", &s, 0), PosClass::X);
        assert_eq!(lex.pos_class("a@b", &s, 1), PosClass::X);
        assert_eq!(lex.pos_class("k=v", &s, 2), PosClass::X);
        assert_eq!(lex.pos_class("host:8080", &s, 3), PosClass::X);
        assert_eq!(lex.pos_class("09:12:50", &s, 4), PosClass::X);
        assert_eq!(lex.pos_class("in,", &s, 5), PosClass::Other);
        assert_eq!(lex.pos_class("seconds.", &s, 6), PosClass::Other);
    }

    #[test]
    fn vocabulary_lookups() {
        let lex = Lexicon::bundled();
        assert!(lex.in_vocabulary("failed"));
        assert!(lex.in_vocabulary("Failed"));
        assert!(!lex.in_vocabulary("db-primary"));
        assert!(!lex.in_vocabulary(""));
        assert!(!lex.in_vocabulary("10.0.0.1"));
    }
}
