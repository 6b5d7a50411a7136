//! Longest-common-subsequence alignment over token sequences.

use crate::template::Token;

/// Index pairs `(i, j)` of a longest common subsequence of `a` and `b`
/// under the given equality, in order.
///
/// Tie-breaking is deterministic: among all maximum-length subsequences the
/// one whose match positions come earliest in `a` (then earliest in `b`) is
/// chosen.
pub fn lcs_match_pairs<T, U, F>(a: &[T], b: &[U], eq: F) -> Vec<(usize, usize)>
where
    F: Fn(&T, &U) -> bool,
{
    let n = a.len();
    let m = b.len();
    if n == 0 || m == 0 {
        return Vec::new();
    }
    // dp[i][j] = LCS length of a[i..] and b[j..]
    let width = m + 1;
    let mut dp = vec![0usize; (n + 1) * width];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i * width + j] = if eq(&a[i], &b[j]) {
                dp[(i + 1) * width + j + 1] + 1
            } else {
                dp[(i + 1) * width + j].max(dp[i * width + j + 1])
            };
        }
    }

    let mut pairs = Vec::with_capacity(dp[0]);
    let (mut i, mut j) = (0, 0);
    while i < n && dp[i * width + j] > 0 {
        // earliest b position where matching a[i] keeps the LCS optimal
        let target = dp[i * width + j];
        let hit =
            (j..m).find(|&j2| eq(&a[i], &b[j2]) && target == 1 + dp[(i + 1) * width + j2 + 1]);
        match hit {
            Some(j2) => {
                pairs.push((i, j2));
                j = j2 + 1;
                i += 1;
            }
            None => i += 1, // a[i] is in no optimal subsequence from here
        }
    }
    pairs
}

/// A longest common subsequence of two token sequences under exact token
/// equality (a wildcard equals only a wildcard).
pub fn lcs_tokens(a: &[Token], b: &[Token]) -> Vec<Token> {
    lcs_match_pairs(a, b, |x, y| x == y)
        .into_iter()
        .map(|(i, _)| a[i].clone())
        .collect()
}
