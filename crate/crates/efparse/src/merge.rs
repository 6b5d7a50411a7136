//! Adaptive cache updates.
//!
//! A freshly generated template is compared with its most relevant cached
//! template. Their longest common subsequence splits both into aligned
//! differing segments; three sequential gates decide per segment whether it
//! merges mechanically, merges via the language model, or stays distinct.
//! All segments merging yields one unified template; a subset merging
//! yields two refined templates; none merging inserts the new template
//! untouched.

use std::sync::Arc;

use crate::align::lcs_match_pairs;
use crate::cache::DualCache;
use crate::distance::similarity;
use crate::gateway::Gateway;
use crate::lexicon::{composition_class, Lexicon, PosClass};
use crate::matcher::match_template;
use crate::template::{LogRecord, Template, TemplateId, Token};

/// Aligned differing region of two templates, delimited by common-
/// subsequence anchors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentPair {
    /// Gap position: this pair sits before anchor `slot` (or at the end
    /// when `slot == anchors.len()`).
    pub slot: usize,
    pub left: Vec<Token>,
    pub right: Vec<Token>,
    /// Absolute token offset of `left` within the first template.
    pub left_start: usize,
    /// Absolute token offset of `right` within the second template.
    pub right_start: usize,
    pub anchor_before: Option<Token>,
    pub anchor_after: Option<Token>,
}

/// The full alignment of two templates: anchors plus all gaps (including
/// empty ones, so both inputs can be reassembled exactly).
#[derive(Debug, Clone)]
pub struct Segmentation {
    anchors: Vec<Token>,
    /// `anchors.len() + 1` gaps; gap `s` sits before anchor `s`.
    gaps: Vec<(Vec<Token>, Vec<Token>)>,
}

/// Partition two templates around their longest common subsequence.
///
/// Gaps where exactly one side is empty (pure insertions) absorb a
/// neighboring anchor so that every reported pair has content on both
/// sides.
pub fn pair_segments(a: &Template, b: &Template) -> Segmentation {
    Segmentation::new(a.tokens(), b.tokens())
}

impl Segmentation {
    pub fn new(a: &[Token], b: &[Token]) -> Segmentation {
        let matches = lcs_match_pairs(a, b, |x, y| x == y);
        let mut anchors: Vec<Token> = matches.iter().map(|&(i, _)| a[i].clone()).collect();
        let mut gaps: Vec<(Vec<Token>, Vec<Token>)> = Vec::with_capacity(anchors.len() + 1);
        let mut prev = (0usize, 0usize);
        for &(ai, bi) in &matches {
            gaps.push((a[prev.0..ai].to_vec(), b[prev.1..bi].to_vec()));
            prev = (ai + 1, bi + 1);
        }
        gaps.push((a[prev.0..].to_vec(), b[prev.1..].to_vec()));

        // Pure insertions (one side empty) cannot be compared on their own;
        // fold a neighboring anchor into the gap so both sides have content.
        let mut s = 0;
        while s < gaps.len() {
            let one_sided = gaps[s].0.is_empty() != gaps[s].1.is_empty();
            if !one_sided {
                s += 1;
                continue;
            }
            if s < anchors.len() {
                let anchor = anchors.remove(s);
                let (next_l, next_r) = gaps.remove(s + 1);
                let gap = &mut gaps[s];
                gap.0.push(anchor.clone());
                gap.0.extend(next_l);
                gap.1.push(anchor);
                gap.1.extend(next_r);
            } else {
                debug_assert!(s > 0, "one-sided gap with no anchors");
                let anchor = anchors.remove(s - 1);
                let (cur_l, cur_r) = gaps.remove(s);
                s -= 1;
                let gap = &mut gaps[s];
                gap.0.push(anchor.clone());
                gap.0.extend(cur_l);
                gap.1.push(anchor);
                gap.1.extend(cur_r);
            }
        }
        Segmentation { anchors, gaps }
    }

    pub fn anchors(&self) -> &[Token] {
        &self.anchors
    }

    /// The non-empty gaps as segment pairs, in order.
    pub fn pairs(&self) -> Vec<SegmentPair> {
        let mut out = Vec::new();
        let mut left_off = 0;
        let mut right_off = 0;
        for (s, (left, right)) in self.gaps.iter().enumerate() {
            if !left.is_empty() || !right.is_empty() {
                out.push(SegmentPair {
                    slot: s,
                    left: left.clone(),
                    right: right.clone(),
                    left_start: left_off,
                    right_start: right_off,
                    anchor_before: (s > 0).then(|| self.anchors[s - 1].clone()),
                    anchor_after: (s < self.anchors.len()).then(|| self.anchors[s].clone()),
                });
            }
            left_off += left.len() + 1;
            right_off += right.len() + 1;
        }
        out
    }

    /// Rebuild a token sequence by interleaving gap contents (chosen per
    /// slot) with the anchors.
    pub fn reassemble(&self, mut content: impl FnMut(usize) -> Vec<Token>) -> Vec<Token> {
        let mut out = Vec::new();
        for s in 0..self.gaps.len() {
            out.extend(content(s));
            if s < self.anchors.len() {
                out.push(self.anchors[s].clone());
            }
        }
        out
    }

    pub fn reassemble_left(&self) -> Vec<Token> {
        self.reassemble(|s| self.gaps[s].0.clone())
    }

    pub fn reassemble_right(&self) -> Vec<Token> {
        self.reassemble(|s| self.gaps[s].1.clone())
    }
}

/// Verdict of the sequential gates for one segment pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentDecision {
    /// Merge mechanically, token by token.
    MergeFast,
    /// Ask the language model to merge.
    MergeSemantic,
    /// Keep both sides distinct.
    Keep,
}

/// Outcome of updating the cache with a new template.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeOutcome {
    /// No relevant template, or nothing qualified: the new template was
    /// inserted as-is (or deduplicated onto an identical cached one).
    InsertNew { id: TemplateId },
    /// Every segment merged: one unified template replaces the relevant
    /// one. `retired` is `None` when the unified form already was the
    /// cached template.
    FullMerge {
        id: TemplateId,
        retired: Option<TemplateId>,
    },
    /// Only some segments merged: the relevant template was replaced by a
    /// refined pair.
    PartialMerge {
        refined_relevant: TemplateId,
        refined_new: TemplateId,
        retired: TemplateId,
    },
}

impl MergeOutcome {
    /// The cached template the triggering log should be attributed to.
    pub fn current_id(&self) -> TemplateId {
        match self {
            MergeOutcome::InsertNew { id } => *id,
            MergeOutcome::FullMerge { id, .. } => *id,
            MergeOutcome::PartialMerge { refined_new, .. } => *refined_new,
        }
    }

    /// Retired id and its successor, when the update replaced a template.
    pub fn retirement(&self) -> Option<(TemplateId, TemplateId)> {
        match self {
            MergeOutcome::InsertNew { .. } => None,
            MergeOutcome::FullMerge { id, retired } => retired.map(|r| (r, *id)),
            MergeOutcome::PartialMerge {
                refined_relevant,
                retired,
                ..
            } => Some((*retired, *refined_relevant)),
        }
    }
}

/// Merge a segment pair of equal token counts position by position:
/// matching tokens stay, differing positions become wildcards. Adjacent
/// wildcards are not collapsed.
pub fn merge_segment_fast(pair: &SegmentPair) -> Vec<Token> {
    assert_eq!(
        pair.left.len(),
        pair.right.len(),
        "fast merge needs equal lengths"
    );
    pair.left
        .iter()
        .zip(&pair.right)
        .map(|(l, r)| if l == r { l.clone() } else { Token::Wildcard })
        .collect()
}

/// Applies the segment gates and merge strategies against a cache.
#[derive(Debug, Clone)]
pub struct CacheUpdater {
    lexicon: Arc<Lexicon>,
}

impl CacheUpdater {
    pub fn new(lexicon: Arc<Lexicon>) -> CacheUpdater {
        CacheUpdater { lexicon }
    }

    /// Run the three sequential gates on one segment pair.
    ///
    /// 1. Equal-length segments differing only where a wildcard is present
    ///    merge immediately.
    /// 2. Differing tokens with incompatible character compositions keep
    ///    the segments apart (positional pairs for equal lengths, all pairs
    ///    otherwise).
    /// 3. Merging requires at least one potential-variable token and no
    ///    verbs on either side; unequal lengths defer to the model.
    pub fn assess_segment(
        &self,
        pair: &SegmentPair,
        a: &Template,
        b: &Template,
    ) -> SegmentDecision {
        let equal_len = pair.left.len() == pair.right.len();

        if equal_len {
            let trivially_mergeable = pair
                .left
                .iter()
                .zip(&pair.right)
                .all(|(l, r)| l == r || l.is_wildcard() || r.is_wildcard());
            if trivially_mergeable {
                return SegmentDecision::MergeFast;
            }
        }

        let compatible = |l: &Token, r: &Token| match (l, r) {
            (Token::Wildcard, _) | (_, Token::Wildcard) => true,
            (Token::Constant(lt), Token::Constant(rt)) => {
                lt == rt || composition_class(lt) == composition_class(rt)
            }
        };
        let composition_ok = if equal_len {
            pair.left
                .iter()
                .zip(&pair.right)
                .filter(|(l, r)| l != r)
                .all(|(l, r)| compatible(l, r))
        } else {
            pair.left
                .iter()
                .flat_map(|l| pair.right.iter().map(move |r| (l, r)))
                .filter(|(l, r)| l != r)
                .all(|(l, r)| compatible(l, r))
        };
        if !composition_ok {
            return SegmentDecision::Keep;
        }

        let a_sentence: Vec<String> = a.tokens().iter().map(|t| t.as_str().to_string()).collect();
        let b_sentence: Vec<String> = b.tokens().iter().map(|t| t.as_str().to_string()).collect();
        let mut has_variable_evidence = false;
        let mut has_verb = false;
        let mut scan = |tokens: &[Token], start: usize, sentence: &[String]| {
            for (off, tok) in tokens.iter().enumerate() {
                match tok {
                    Token::Wildcard => has_variable_evidence = true,
                    Token::Constant(text) => {
                        match self.lexicon.pos_class(text, sentence, start + off) {
                            PosClass::Verb => has_verb = true,
                            cls if cls.is_potential_variable() => has_variable_evidence = true,
                            _ => {}
                        }
                    }
                }
            }
        };
        scan(&pair.left, pair.left_start, &a_sentence);
        scan(&pair.right, pair.right_start, &b_sentence);

        if has_variable_evidence && !has_verb {
            if equal_len {
                SegmentDecision::MergeFast
            } else {
                SegmentDecision::MergeSemantic
            }
        } else {
            SegmentDecision::Keep
        }
    }

    /// Ask the model for a merged segment and accept it only when the
    /// substituted templates still match their sample logs. `None` means
    /// the segment stays unmerged.
    pub fn merge_segment_semantic(
        &self,
        pair: &SegmentPair,
        a: &Template,
        b: &Template,
        gateway: &Gateway,
    ) -> Option<Vec<Token>> {
        let render = |tokens: &[Token]| {
            tokens
                .iter()
                .map(|t| t.as_str())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let response = gateway
            .semantic_merge(
                &render(&pair.left),
                &render(&pair.right),
                &a.render(),
                &b.render(),
            )
            .ok()?;
        let segment: Vec<Token> = crate::tokenize::tokenize(&response)
            .iter()
            .map(|w| Token::parse(w))
            .collect();
        let candidate_a = a.splice(pair.left_start, pair.left.len(), &segment)?;
        let candidate_b = b.splice(pair.right_start, pair.right.len(), &segment)?;
        let matches_all = |t: &Template, samples: &[String]| {
            samples
                .iter()
                .all(|raw| match_template(t, &LogRecord::new(0, raw)).is_some())
        };
        (matches_all(&candidate_a, a.sample_logs()) && matches_all(&candidate_b, b.sample_logs()))
            .then_some(segment)
    }

    /// Adaptive update: retrieve the most relevant cached template, pair
    /// segments, assess each, and insert / fully merge / partially merge.
    pub fn update(
        &self,
        cache: &mut DualCache,
        t_new: Template,
        gateway: &Gateway,
    ) -> MergeOutcome {
        let Some((relevant, _sim)) = cache.most_relevant(&t_new) else {
            return MergeOutcome::InsertNew {
                id: cache.insert(t_new),
            };
        };
        let relevant = relevant.clone();
        let seg = Segmentation::new(relevant.tokens(), t_new.tokens());
        let pairs = seg.pairs();
        if pairs.is_empty() {
            return MergeOutcome::InsertNew {
                id: cache.insert(t_new),
            };
        }

        let mut merged: Vec<Option<Vec<Token>>> = vec![None; pairs.len()];
        for (idx, pair) in pairs.iter().enumerate() {
            merged[idx] = match self.assess_segment(pair, &relevant, &t_new) {
                SegmentDecision::MergeFast => Some(merge_segment_fast(pair)),
                SegmentDecision::MergeSemantic => {
                    self.merge_segment_semantic(pair, &relevant, &t_new, gateway)
                }
                SegmentDecision::Keep => None,
            };
        }
        let merged_count = merged.iter().filter(|m| m.is_some()).count();

        let content_for = |side_left: bool, merged: &[Option<Vec<Token>>], slot: usize| {
            if let Some(idx) = pairs.iter().position(|p| p.slot == slot) {
                if let Some(m) = &merged[idx] {
                    return m.clone();
                }
                let p = &pairs[idx];
                return if side_left {
                    p.left.clone()
                } else {
                    p.right.clone()
                };
            }
            Vec::new()
        };

        if merged_count == pairs.len() {
            let tokens = seg.reassemble(|slot| content_for(true, &merged, slot));
            return self.commit_full_merge(cache, tokens, &relevant, t_new);
        }

        if merged_count > 0 {
            let rel_tokens = seg.reassemble(|slot| content_for(true, &merged, slot));
            let new_tokens = seg.reassemble(|slot| content_for(false, &merged, slot));
            if rel_tokens == new_tokens {
                return self.commit_full_merge(cache, rel_tokens, &relevant, t_new);
            }
            let build = |tokens: Vec<Token>, samples: &[String]| -> Option<Template> {
                let mut t = Template::draft(tokens).ok()?;
                t.absorb_samples(samples.iter());
                samples
                    .iter()
                    .all(|raw| match_template(&t, &LogRecord::new(0, raw)).is_some())
                    .then_some(t)
            };
            let refined_rel = build(rel_tokens, relevant.sample_logs());
            let refined_new = build(new_tokens, t_new.sample_logs());
            if let (Some(refined_rel), Some(refined_new)) = (refined_rel, refined_new) {
                let retired = relevant.id();
                cache.remove(retired);
                let id_rel = cache.insert(refined_rel);
                let id_new = cache.insert(refined_new);
                return MergeOutcome::PartialMerge {
                    refined_relevant: id_rel,
                    refined_new: id_new,
                    retired,
                };
            }
            return MergeOutcome::InsertNew {
                id: cache.insert(t_new),
            };
        }

        MergeOutcome::InsertNew {
            id: cache.insert(t_new),
        }
    }

    fn commit_full_merge(
        &self,
        cache: &mut DualCache,
        tokens: Vec<Token>,
        relevant: &Template,
        t_new: Template,
    ) -> MergeOutcome {
        let Ok(mut result) = Template::draft(tokens) else {
            return MergeOutcome::InsertNew {
                id: cache.insert(t_new),
            };
        };
        let all_samples: Vec<&String> = relevant
            .sample_logs()
            .iter()
            .chain(t_new.sample_logs())
            .collect();
        let sound = all_samples
            .iter()
            .all(|raw| match_template(&result, &LogRecord::new(0, raw.as_str())).is_some());
        if !sound {
            return MergeOutcome::InsertNew {
                id: cache.insert(t_new),
            };
        }
        if result.tokens() == relevant.tokens() {
            for raw in t_new.sample_logs() {
                cache.add_sample(relevant.id(), raw);
            }
            return MergeOutcome::FullMerge {
                id: relevant.id(),
                retired: None,
            };
        }
        result.absorb_samples(all_samples);
        let retired = relevant.id();
        cache.remove(retired);
        let id = cache.insert(result);
        MergeOutcome::FullMerge {
            id,
            retired: Some(retired),
        }
    }

    /// Ablation update: only templates of the exact same token count are
    /// considered, and merging is a plain position-by-position wildcard
    /// replacement (the pre-adaptive strategy).
    pub fn update_same_length(&self, cache: &mut DualCache, t_new: Template) -> MergeOutcome {
        let threshold = cache.threshold();
        let best = cache
            .templates()
            .filter(|t| t.len() == t_new.len() && t.tokens() != t_new.tokens())
            .map(|t| (t.id(), similarity(t.tokens(), t_new.tokens())))
            .filter(|(_, sim)| *sim >= threshold)
            .max_by(|(ida, sa), (idb, sb)| sa.partial_cmp(sb).unwrap().then(idb.cmp(ida)))
            .map(|(id, _)| id);
        let Some(rel_id) = best else {
            return MergeOutcome::InsertNew {
                id: cache.insert(t_new),
            };
        };
        let relevant = cache.get(rel_id).expect("live id").clone();
        let tokens: Vec<Token> = relevant
            .tokens()
            .iter()
            .zip(t_new.tokens())
            .map(|(l, r)| if l == r { l.clone() } else { Token::Wildcard })
            .collect();
        self.commit_full_merge(cache, tokens, &relevant, t_new)
    }
}
