//! Template correction: every generated template passes three sequential
//! checks before it may touch the cache.
//!
//! 1. Format: a template that fails to match its source log is rebuilt
//!    from the log, keeping only tokens the template also contains.
//! 2. Over-specific: constants that look like runtime values (repeated
//!    special characters, letter+digit mixes) are confirmed with the model
//!    and abstracted to wildcards.
//! 3. Over-general: wildcards covering ordinary vocabulary (no
//!    demonstrations) or verbs (with demonstrations) are restored to
//!    constants.
//!
//! Every stage only ever returns a template that still matches the log.

use std::sync::Arc;

use crate::align::lcs_match_pairs;
use crate::gateway::Gateway;
use crate::lexicon::{Lexicon, PosClass};
use crate::matcher::match_template;
use crate::template::{LogRecord, Template, Token, WILDCARD};

/// Default set of special characters that flag a constant as suspect.
pub const DEFAULT_SPECIAL_CHARS: &[char] = &['/', '\\', ':', '.', '-', '=', '@', ','];

/// What each correction stage did to the template.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorrectionTrace {
    pub format_applied: bool,
    /// Constants abstracted to wildcards by the over-specific stage.
    pub over_specific_tokens: Vec<String>,
    /// Log tokens restored to constants by the over-general stage.
    pub over_general_restored: Vec<String>,
}

impl CorrectionTrace {
    pub fn is_empty(&self) -> bool {
        !self.format_applied
            && self.over_specific_tokens.is_empty()
            && self.over_general_restored.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Corrector {
    lexicon: Arc<Lexicon>,
    special_chars: Vec<char>,
}

impl Corrector {
    pub fn new(lexicon: Arc<Lexicon>) -> Corrector {
        Corrector {
            lexicon,
            special_chars: DEFAULT_SPECIAL_CHARS.to_vec(),
        }
    }

    pub fn with_special_chars(mut self, chars: Vec<char>) -> Corrector {
        self.special_chars = chars;
        self
    }

    /// Run all three stages in order. The returned template always matches
    /// the log.
    pub fn validate(
        &self,
        log: &LogRecord,
        t_ori: Template,
        had_demonstrations: bool,
        gateway: &Gateway,
    ) -> (Template, CorrectionTrace) {
        let mut trace = CorrectionTrace::default();
        let formatted = self.format_correct(log, t_ori);
        trace.format_applied = formatted.1;
        let (specific, abstracted) = self.over_specific_correct(log, formatted.0, gateway);
        trace.over_specific_tokens = abstracted;
        let (general, restored) = self.over_general_correct(log, specific, had_demonstrations);
        trace.over_general_restored = restored;
        debug_assert!(match_template(&general, log).is_some());
        (general, trace)
    }

    /// Stage 1. If the template already matches, it passes through.
    /// Otherwise the template is rebuilt over the log's own tokens: tokens
    /// shared with the template's constants stay, everything else becomes a
    /// wildcard. The result has exactly the log's token count and always
    /// matches. The flag reports whether a rebuild happened.
    pub fn format_correct(&self, log: &LogRecord, t: Template) -> (Template, bool) {
        if match_template(&t, log).is_some() {
            return (t, false);
        }
        let constants: Vec<&str> = t
            .tokens()
            .iter()
            .filter_map(|tok| match tok {
                Token::Constant(text) => Some(text.as_str()),
                Token::Wildcard => None,
            })
            .collect();
        let words = log.tokens();
        let aligned = lcs_match_pairs(words, &constants, |w, c| tokens_equivalent(w, c));
        let mut keep = vec![false; words.len()];
        for (wi, _) in aligned {
            keep[wi] = true;
        }
        let tokens: Vec<Token> = words
            .iter()
            .zip(&keep)
            .map(|(w, &k)| if k { Token::parse(w) } else { Token::Wildcard })
            .collect();
        let rebuilt = Template::draft(tokens).expect("log is non-blank");
        debug_assert!(match_template(&rebuilt, log).is_some());
        (rebuilt, true)
    }

    /// Constants of `t` that look like runtime values: at least two special
    /// characters, or a letter+digit mix.
    pub fn suspect_constants(&self, t: &Template) -> Vec<String> {
        let mut suspects = Vec::new();
        for tok in t.tokens() {
            let Token::Constant(text) = tok else { continue };
            if suspects.iter().any(|s| s == text) {
                continue;
            }
            let special = text
                .chars()
                .filter(|c| self.special_chars.contains(c))
                .count();
            let alnum_mix = crate::lexicon::composition_class(text)
                == crate::lexicon::CompositionClass::Alphanumeric;
            if special >= 2 || alnum_mix {
                suspects.push(text.clone());
            }
        }
        suspects
    }

    /// Stage 2. Suspect constants are sent to the model; confirmed ones are
    /// abstracted to wildcards. If abstraction breaks matching, the input
    /// template is returned untouched. No suspects means no model call.
    pub fn over_specific_correct(
        &self,
        log: &LogRecord,
        t: Template,
        gateway: &Gateway,
    ) -> (Template, Vec<String>) {
        let suspects = self.suspect_constants(&t);
        if suspects.is_empty() {
            return (t, Vec::new());
        }
        let confirmed = gateway.confirm_variables(log.raw(), &t.render(), &suspects);
        if confirmed.is_empty() {
            return (t, Vec::new());
        }
        let tokens: Vec<Token> = t
            .tokens()
            .iter()
            .map(|tok| match tok {
                Token::Constant(text) if confirmed.iter().any(|c| c == text) => Token::Wildcard,
                other => other.clone(),
            })
            .collect();
        match Template::draft(tokens) {
            Ok(candidate) if match_template(&candidate, log).is_some() => (candidate, confirmed),
            _ => (t, Vec::new()),
        }
    }

    /// Stage 3. Requires the template and log to have equal token counts
    /// (so wildcards align 1:1 with log tokens); otherwise the template is
    /// returned untouched. Without demonstrations, wildcards over
    /// vocabulary words are restored; with demonstrations, wildcards over
    /// verbs are restored.
    pub fn over_general_correct(
        &self,
        log: &LogRecord,
        t: Template,
        had_demonstrations: bool,
    ) -> (Template, Vec<String>) {
        let words = log.tokens();
        if t.len() != words.len() || match_template(&t, log).is_none() {
            return (t, Vec::new());
        }
        let mut restored = Vec::new();
        let tokens: Vec<Token> = t
            .tokens()
            .iter()
            .zip(words)
            .enumerate()
            .map(|(i, (tok, word))| {
                if !tok.is_wildcard() || word == WILDCARD {
                    return tok.clone();
                }
                let restore = if had_demonstrations {
                    self.lexicon.pos_class(word, words, i) == PosClass::Verb
                } else {
                    self.lexicon.in_vocabulary(word)
                };
                if restore {
                    restored.push(word.clone());
                    Token::parse(word)
                } else {
                    tok.clone()
                }
            })
            .collect();
        let result = Template::draft(tokens).expect("token count unchanged");
        debug_assert!(match_template(&result, log).is_some());
        (result, restored)
    }
}

/// Loose token equality used by the format-correct alignment: exact, or
/// equal after stripping non-alphanumeric edges (so a stray comma in the
/// template does not orphan the log token it was attached to).
fn tokens_equivalent(word: &str, constant: &str) -> bool {
    fn strip(s: &str) -> &str {
        s.trim_matches(|c: char| !c.is_alphanumeric())
    }
    if word == constant {
        return true;
    }
    let (w, c) = (strip(word), strip(constant));
    !w.is_empty() && w == c
}
