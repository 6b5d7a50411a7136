//! Template-to-log matching.
//!
//! A template accepts a raw log when its constants match whole
//! whitespace-delimited tokens literally, in order, and every wildcard
//! covers a non-empty run of tokens in between. Wildcards are non-greedy:
//! each one captures the shortest run that still lets the rest of the
//! template match, so captures are deterministic. Substituting the captures
//! back into the template reproduces the log up to whitespace
//! normalization.

use crate::template::{LogRecord, Template, Token};

/// Match a template against a log, returning the wildcard captures in
/// order, or `None` when the log does not fit the template.
pub fn match_template(t: &Template, log: &LogRecord) -> Option<Vec<String>> {
    let tokens = t.tokens();
    let words = log.tokens();

    if tokens.len() == words.len() {
        return match_positional(tokens, words);
    }
    // A template can only be shorter than the log (wildcards swallow extra
    // tokens), never longer.
    if tokens.len() > words.len() {
        return None;
    }
    match_with_spans(tokens, words)
}

/// Equal-length fast path: every wildcard covers exactly one token.
fn match_positional(tokens: &[Token], words: &[String]) -> Option<Vec<String>> {
    let mut params = Vec::new();
    for (tok, word) in tokens.iter().zip(words) {
        match tok {
            Token::Wildcard => params.push(word.clone()),
            Token::Constant(text) => {
                if text != word {
                    return None;
                }
            }
        }
    }
    Some(params)
}

/// General case: wildcards may cover multiple tokens. A feasibility table
/// over (template suffix, log suffix) drives a forward walk that gives each
/// wildcard the shortest viable span.
fn match_with_spans(tokens: &[Token], words: &[String]) -> Option<Vec<String>> {
    let n = tokens.len();
    let m = words.len();
    let width = m + 1;
    // feasible[i * width + j] == true iff tokens[i..] matches words[j..]
    let mut feasible = vec![false; (n + 1) * width];
    feasible[n * width + m] = true;

    for i in (0..n).rev() {
        match &tokens[i] {
            Token::Constant(text) => {
                for j in 0..m {
                    feasible[i * width + j] =
                        words[j] == *text && feasible[(i + 1) * width + j + 1];
                }
            }
            Token::Wildcard => {
                // suffix-OR over the row below, shifted by one (non-empty span)
                let mut any = false;
                for j in (0..m).rev() {
                    any |= feasible[(i + 1) * width + j + 1];
                    feasible[i * width + j] = any;
                }
            }
        }
    }

    if !feasible[0] {
        return None;
    }

    let mut params = Vec::new();
    let mut j = 0;
    for (i, tok) in tokens.iter().enumerate() {
        match tok {
            Token::Constant(_) => j += 1,
            Token::Wildcard => {
                let mut span = 1;
                while !feasible[(i + 1) * width + j + span] {
                    span += 1;
                    debug_assert!(j + span <= m);
                }
                params.push(words[j..j + span].join(" "));
                j += span;
            }
        }
    }
    debug_assert_eq!(j, m);
    Some(params)
}
