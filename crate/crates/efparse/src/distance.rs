//! Token-level edit distance and the similarity score built on it.

/// Levenshtein distance where the alphabet is whole tokens and every
/// insert/delete/substitute costs 1.
pub fn token_levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, ta) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, tb) in b.iter().enumerate() {
            let cost = usize::from(ta != tb);
            curr[j + 1] = (prev[j] + cost).min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Similarity in `[0, 1]`: `1 - distance / max(|a|, |b|)`.
///
/// Two empty sequences are defined as identical (similarity 1).
pub fn similarity<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    let max = a.len().max(b.len());
    if max == 0 {
        return 1.0;
    }
    1.0 - token_levenshtein(a, b) as f64 / max as f64
}

/// Banded Levenshtein: returns the distance if it is `<= limit`, `None`
/// otherwise. Equivalent to [`token_levenshtein`] on the hit path but only
/// fills cells within `limit` of the diagonal.
pub fn levenshtein_within<T: PartialEq>(a: &[T], b: &[T], limit: usize) -> Option<usize> {
    let (n, m) = (a.len(), b.len());
    if n.abs_diff(m) > limit {
        return None;
    }
    if n == 0 {
        return Some(m);
    }
    if m == 0 {
        return Some(n);
    }
    const BIG: usize = usize::MAX / 2;
    let mut prev = vec![BIG; m + 1];
    let mut curr = vec![BIG; m + 1];
    for (j, cell) in prev.iter_mut().enumerate().take(limit.min(m) + 1) {
        *cell = j;
    }
    for i in 1..=n {
        curr.fill(BIG);
        let lo = i.saturating_sub(limit);
        let hi = (i + limit).min(m);
        if lo == 0 {
            curr[0] = i;
        }
        let mut row_min = BIG;
        for j in lo.max(1)..=hi {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let val = (prev[j - 1] + cost).min(prev[j] + 1).min(curr[j - 1] + 1);
            curr[j] = val;
            row_min = row_min.min(val);
        }
        if lo == 0 {
            row_min = row_min.min(curr[0]);
        }
        if row_min > limit {
            return None;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    (prev[m] <= limit).then_some(prev[m])
}

/// Size of the multiset intersection of two sorted sequences.
pub fn common_sorted_count<T: Ord>(a_sorted: &[T], b_sorted: &[T]) -> usize {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a_sorted.len() && j < b_sorted.len() {
        match a_sorted[i].cmp(&b_sorted[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    common
}

/// Upper bound on similarity from token multiset overlap, far cheaper than
/// the full DP: `similarity(a, b) <= bag_similarity_bound(a, b)`. Both
/// inputs must be pre-sorted.
pub fn bag_similarity_bound<T: Ord>(a_sorted: &[T], b_sorted: &[T]) -> f64 {
    let max = a_sorted.len().max(b_sorted.len());
    if max == 0 {
        return 1.0;
    }
    common_sorted_count(a_sorted, b_sorted) as f64 / max as f64
}
