//! Demonstration selection for template extraction.
//!
//! A sliding window over recently seen raw logs supplies candidates; the
//! selector keeps those similar enough to the target and then trades
//! members for a lower mean pairwise similarity, so the final set is both
//! relevant and diverse.

use std::collections::VecDeque;

use crate::distance::{bag_similarity_bound, levenshtein_within, similarity};
use crate::template::LogRecord;

pub const DEFAULT_POOL_CAPACITY: usize = 10_000;
pub const DEFAULT_CANDIDATE_THRESHOLD: f64 = 0.75;
pub const DEFAULT_MAX_DEMONSTRATIONS: usize = 3;

#[derive(Debug, Clone)]
struct PoolEntry {
    raw: String,
    tokens: Vec<String>,
    sorted_tokens: Vec<String>,
}

/// Ring buffer of recent raw logs with similarity-driven selection.
#[derive(Debug, Clone)]
pub struct ExemplarPool {
    entries: VecDeque<PoolEntry>,
    capacity: usize,
    candidate_threshold: f64,
    max_demonstrations: usize,
}

impl Default for ExemplarPool {
    fn default() -> Self {
        ExemplarPool::new(
            DEFAULT_POOL_CAPACITY,
            DEFAULT_CANDIDATE_THRESHOLD,
            DEFAULT_MAX_DEMONSTRATIONS,
        )
    }
}

impl ExemplarPool {
    pub fn new(
        capacity: usize,
        candidate_threshold: f64,
        max_demonstrations: usize,
    ) -> ExemplarPool {
        assert!(capacity >= 1);
        assert!(candidate_threshold > 0.0 && candidate_threshold <= 1.0);
        assert!(max_demonstrations >= 1);
        ExemplarPool {
            entries: VecDeque::with_capacity(capacity.min(4096)),
            capacity,
            candidate_threshold,
            max_demonstrations,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Append a log, evicting the oldest entry when full. A log identical
    /// to the most recent entry is skipped.
    pub fn observe(&mut self, log: &LogRecord) {
        if self.entries.back().is_some_and(|e| e.raw == log.raw()) {
            return;
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        let mut sorted_tokens = log.tokens().to_vec();
        sorted_tokens.sort_unstable();
        self.entries.push_back(PoolEntry {
            raw: log.raw().to_string(),
            tokens: log.tokens().to_vec(),
            sorted_tokens,
        });
    }

    /// Pick up to the configured number of demonstrations for `target`.
    ///
    /// Candidates are pool entries (oldest first) whose similarity to the
    /// target reaches the candidate threshold, excluding exact duplicates
    /// of the target. The set fills in pool order; each further candidate
    /// then replaces the member whose removal lowers the mean pairwise
    /// similarity the most, but only if the mean strictly drops.
    pub fn select(&self, target: &LogRecord) -> Vec<String> {
        let mut target_sorted = target.tokens().to_vec();
        target_sorted.sort_unstable();
        // a candidate must satisfy the same length bounds the similarity
        // threshold implies for templates
        let lo = (self.candidate_threshold * target.tokens().len() as f64).ceil() as usize;
        let hi = (target.tokens().len() as f64 / self.candidate_threshold).floor() as usize;
        let mut chosen: Vec<&PoolEntry> = Vec::with_capacity(self.max_demonstrations);
        let mut overflow: Vec<&PoolEntry> = Vec::new();
        for entry in &self.entries {
            if !(lo..=hi).contains(&entry.tokens.len()) {
                continue;
            }
            if entry.raw == target.raw() {
                continue;
            }
            if !self.is_candidate(entry, &target_sorted, target) {
                continue;
            }
            if chosen.len() < self.max_demonstrations {
                chosen.push(entry);
            } else {
                overflow.push(entry);
            }
        }
        for candidate in overflow {
            self.try_swap(&mut chosen, candidate);
        }
        chosen.into_iter().map(|e| e.raw.clone()).collect()
    }

    fn is_candidate(
        &self,
        entry: &PoolEntry,
        target_sorted: &[String],
        target: &LogRecord,
    ) -> bool {
        let max = entry.tokens.len().max(target.tokens().len());
        if max == 0 {
            return false;
        }
        if bag_similarity_bound(&entry.sorted_tokens, target_sorted) < self.candidate_threshold {
            return false;
        }
        let limit = ((1.0 - self.candidate_threshold) * max as f64 + 1e-9).floor() as usize;
        match levenshtein_within(&entry.tokens, target.tokens(), limit) {
            Some(dist) => 1.0 - dist as f64 / max as f64 >= self.candidate_threshold,
            None => false,
        }
    }

    /// Swap `candidate` for the member whose replacement lowers the mean
    /// pairwise similarity the most, if any replacement strictly lowers it.
    fn try_swap<'a>(&self, chosen: &mut [&'a PoolEntry], candidate: &'a PoolEntry) {
        let current = mean_pairwise(chosen);
        let mut best: Option<(usize, f64)> = None;
        for i in 0..chosen.len() {
            let replaced = chosen[i];
            chosen[i] = candidate;
            let mean = mean_pairwise(chosen);
            chosen[i] = replaced;
            if mean < current && best.is_none_or(|(_, b)| mean < b) {
                best = Some((i, mean));
            }
        }
        if let Some((i, _)) = best {
            chosen[i] = candidate;
        }
    }
}

fn mean_pairwise(entries: &[&PoolEntry]) -> f64 {
    if entries.len() < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            total += similarity(&entries[i].tokens, &entries[j].tokens);
            pairs += 1;
        }
    }
    total / pairs as f64
}
