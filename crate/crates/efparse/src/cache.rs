//! The dual template cache: one template store indexed twice.
//!
//! A wildcard-aware prefix tree answers per-log lookups token by token,
//! while length buckets answer "give me every template whose token count
//! could be similar enough" during updates. Every mutation keeps the two
//! indexes and the store referencing the identical id set.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::distance::{bag_similarity_bound, levenshtein_within};
use crate::matcher::match_template;
use crate::template::{LogRecord, Template, TemplateId, Token};

#[derive(Debug, Default)]
struct TreeNode {
    children: BTreeMap<String, TreeNode>,
    wildcard: Option<Box<TreeNode>>,
    /// Template whose token sequence ends at this node.
    template: Option<TemplateId>,
}

impl TreeNode {
    fn is_empty(&self) -> bool {
        self.children.is_empty() && self.wildcard.is_none() && self.template.is_none()
    }

    fn child(&self, token: &Token) -> Option<&TreeNode> {
        match token {
            Token::Wildcard => self.wildcard.as_deref(),
            Token::Constant(text) => self.children.get(text),
        }
    }

    fn child_mut(&mut self, token: &Token) -> &mut TreeNode {
        match token {
            Token::Wildcard => self.wildcard.get_or_insert_with(Default::default),
            Token::Constant(text) => self.children.entry(text.clone()).or_default(),
        }
    }
}

/// Template store plus synchronized prefix-tree and length-bucket indexes.
#[derive(Debug)]
pub struct DualCache {
    store: BTreeMap<TemplateId, Template>,
    root: TreeNode,
    buckets: BTreeMap<usize, BTreeSet<TemplateId>>,
    /// Sorted copy of each template's tokens, for cheap similarity bounds.
    sorted_tokens: HashMap<TemplateId, Vec<Token>>,
    threshold: f64,
    sample_capacity: usize,
    next_id: u64,
}

impl DualCache {
    /// `threshold` is the similarity bound in `(0, 1]` used for relevance
    /// retrieval.
    pub fn new(threshold: f64) -> DualCache {
        assert!(
            threshold > 0.0 && threshold <= 1.0,
            "threshold must be in (0, 1]"
        );
        DualCache {
            store: BTreeMap::new(),
            root: TreeNode::default(),
            buckets: BTreeMap::new(),
            sorted_tokens: HashMap::new(),
            threshold,
            sample_capacity: crate::template::DEFAULT_SAMPLE_CAPACITY,
            next_id: 1,
        }
    }

    pub fn with_sample_capacity(mut self, capacity: usize) -> DualCache {
        self.sample_capacity = capacity.max(1);
        self
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    pub fn get(&self, id: TemplateId) -> Option<&Template> {
        self.store.get(&id)
    }

    /// Templates in id (insertion) order.
    pub fn templates(&self) -> impl Iterator<Item = &Template> {
        self.store.values()
    }

    /// Insert a template, assigning a fresh id. Inserting a token sequence
    /// that is already cached is idempotent: the existing id is returned
    /// and the new template's samples are folded in.
    pub fn insert(&mut self, mut t: Template) -> TemplateId {
        if let Some(existing) = self.find_exact(t.tokens()) {
            let samples: Vec<String> = t.sample_logs().to_vec();
            let slot = self.store.get_mut(&existing).expect("tree/store desync");
            slot.absorb_samples(samples.iter());
            return existing;
        }
        let id = TemplateId(self.next_id);
        self.next_id += 1;
        t.set_id(id);
        t.set_sample_capacity(self.sample_capacity);

        let mut node = &mut self.root;
        for token in t.tokens() {
            node = node.child_mut(token);
        }
        debug_assert!(node.template.is_none());
        node.template = Some(id);

        self.buckets.entry(t.len()).or_default().insert(id);
        let mut sorted = t.tokens().to_vec();
        sorted.sort_unstable();
        self.sorted_tokens.insert(id, sorted);
        let len = t.len();
        let tokens = t.tokens().to_vec();
        self.store.insert(id, t);
        debug_assert!(self.find_exact(&tokens) == Some(id));
        debug_assert!(self.buckets.get(&len).is_some_and(|b| b.contains(&id)));
        id
    }

    /// Remove a template by id from all three structures. Returns whether
    /// it existed.
    pub fn remove(&mut self, id: TemplateId) -> bool {
        let Some(t) = self.store.remove(&id) else {
            return false;
        };
        if let Some(bucket) = self.buckets.get_mut(&t.len()) {
            bucket.remove(&id);
            if bucket.is_empty() {
                self.buckets.remove(&t.len());
            }
        }
        remove_path(&mut self.root, t.tokens());
        self.sorted_tokens.remove(&id);
        debug_assert!(self.find_exact(t.tokens()).is_none());
        true
    }

    /// Id of the cached template with exactly this token sequence, if any.
    pub fn find_exact(&self, tokens: &[Token]) -> Option<TemplateId> {
        let mut node = &self.root;
        for token in tokens {
            node = node.child(token)?;
        }
        node.template
    }

    /// Append a raw log to a cached template's bounded sample list.
    pub fn add_sample(&mut self, id: TemplateId, raw: &str) {
        if let Some(t) = self.store.get_mut(&id) {
            t.add_sample(raw);
        }
    }

    /// Match a log against the tree: one token per edge, a wildcard edge
    /// consuming any single token. Among complete paths whose template also
    /// accepts the raw log, the template with the fewest wildcards wins
    /// (ties break toward the lowest id).
    pub fn tree_match(&self, log: &LogRecord) -> Option<&Template> {
        let words = log.tokens();
        if words.is_empty() {
            return None;
        }
        let mut candidates: Vec<TemplateId> = Vec::new();
        collect_tree_candidates(&self.root, words, &mut candidates);
        candidates.sort_by_key(|id| {
            let t = &self.store[id];
            (t.wildcard_count(), *id)
        });
        candidates
            .into_iter()
            .map(|id| &self.store[&id])
            .find(|t| match_template(t, log).is_some())
    }

    /// Inclusive token-length bounds a template must satisfy to possibly
    /// reach the similarity threshold against a length-`l_target` template.
    pub fn length_bounds(&self, l_target: usize) -> (usize, usize) {
        length_bounds(self.threshold, l_target)
    }

    /// Every cached template whose length falls within the pre-selection
    /// bounds for `l_target`, in id order.
    pub fn candidates_by_length(&self, l_target: usize) -> Vec<&Template> {
        assert!(l_target >= 1);
        let (lo, hi) = self.length_bounds(l_target);
        let mut ids: Vec<TemplateId> = self
            .buckets
            .range(lo..=hi)
            .flat_map(|(_, set)| set.iter().copied())
            .collect();
        ids.sort_unstable();
        ids.into_iter().map(|id| &self.store[&id]).collect()
    }

    /// The cached template most similar to `t` (token-level), provided the
    /// similarity reaches the threshold. Ties break toward the lowest id;
    /// a cached template with the identical token sequence is skipped.
    pub fn most_relevant(&self, t: &Template) -> Option<(&Template, f64)> {
        let mut target_sorted = t.tokens().to_vec();
        target_sorted.sort_unstable();
        let mut best: Option<(&Template, f64)> = None;
        for candidate in self.candidates_by_length(t.len()) {
            if candidate.tokens() == t.tokens() {
                continue;
            }
            let candidate_sorted = &self.sorted_tokens[&candidate.id()];
            if bag_similarity_bound(&target_sorted, candidate_sorted) < self.threshold {
                continue;
            }
            let max = t.len().max(candidate.len());
            let limit = ((1.0 - self.threshold) * max as f64 + 1e-9).floor() as usize;
            let Some(dist) = levenshtein_within(t.tokens(), candidate.tokens(), limit) else {
                continue;
            };
            let sim = 1.0 - dist as f64 / max as f64;
            if sim >= self.threshold && best.is_none_or(|(_, s)| sim > s) {
                best = Some((candidate, sim));
            }
        }
        best
    }

    /// Rendered templates, one per line, in id order.
    pub fn snapshot(&self) -> String {
        let mut out = String::new();
        for t in self.store.values() {
            out.push_str(&t.render());
            out.push('\n');
        }
        out
    }

    /// Rebuild a cache from a snapshot produced by [`DualCache::snapshot`].
    pub fn from_snapshot(
        text: &str,
        threshold: f64,
    ) -> Result<DualCache, crate::template::TemplateError> {
        let mut cache = DualCache::new(threshold);
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            cache.insert(Template::parse(line)?);
        }
        Ok(cache)
    }

    /// Check that store, tree, and buckets reference the identical id set.
    pub fn is_synchronized(&self) -> bool {
        let store_ids: BTreeSet<TemplateId> = self.store.keys().copied().collect();
        let bucket_ids: BTreeSet<TemplateId> = self
            .buckets
            .values()
            .flat_map(|s| s.iter().copied())
            .collect();
        if store_ids != bucket_ids {
            return false;
        }
        // every bucket holds exactly the templates of its length
        for (len, set) in &self.buckets {
            for id in set {
                match self.store.get(id) {
                    Some(t) if t.len() == *len => {}
                    _ => return false,
                }
            }
        }
        let mut tree_ids = BTreeSet::new();
        collect_tree_ids(&self.root, &mut tree_ids);
        if store_ids != tree_ids {
            return false;
        }
        // each template is reachable by the path spelling its tokens
        self.store
            .iter()
            .all(|(id, t)| self.find_exact(t.tokens()) == Some(*id))
    }
}

fn length_bounds(threshold: f64, l_target: usize) -> (usize, usize) {
    let lo = (threshold * l_target as f64).ceil() as usize;
    let hi = (l_target as f64 / threshold).floor() as usize;
    (lo.max(1), hi)
}

fn collect_tree_candidates(node: &TreeNode, words: &[String], out: &mut Vec<TemplateId>) {
    match words.split_first() {
        None => {
            if let Some(id) = node.template {
                out.push(id);
            }
        }
        Some((head, rest)) => {
            if let Some(child) = node.children.get(head) {
                collect_tree_candidates(child, rest, out);
            }
            if let Some(wild) = &node.wildcard {
                collect_tree_candidates(wild, rest, out);
            }
        }
    }
}

fn collect_tree_ids(node: &TreeNode, out: &mut BTreeSet<TemplateId>) {
    if let Some(id) = node.template {
        out.insert(id);
    }
    for child in node.children.values() {
        collect_tree_ids(child, out);
    }
    if let Some(wild) = &node.wildcard {
        collect_tree_ids(wild, out);
    }
}

/// Remove the leaf marker for `tokens`, pruning nodes that become empty.
/// Returns whether the subtree rooted at `node` is now empty.
fn remove_path(node: &mut TreeNode, tokens: &[Token]) -> bool {
    match tokens.split_first() {
        None => {
            node.template = None;
        }
        Some((head, rest)) => match head {
            Token::Wildcard => {
                if let Some(wild) = &mut node.wildcard {
                    if remove_path(wild, rest) {
                        node.wildcard = None;
                    }
                }
            }
            Token::Constant(text) => {
                if let Some(child) = node.children.get_mut(text) {
                    if remove_path(child, rest) {
                        node.children.remove(text);
                    }
                }
            }
        },
    }
    node.is_empty()
}
