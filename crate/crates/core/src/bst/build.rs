use super::BstTree;
use crate::demand::{Addressing, DemandSequence, Generator};
use crate::error::{invalid, Error, Result};

/// Access weights for keys `1..=n`. Keys that are never requested carry
/// weight zero; at least one key must be positive.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyWeights {
    w: Vec<f64>,
    total: f64,
}

impl KeyWeights {
    /// Explicit positive weights for some keys; unlisted keys get zero.
    pub fn new<I>(n: usize, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        if n == 0 {
            return Err(invalid("need at least one key"));
        }
        let mut w = vec![0.0; n];
        let mut seen = vec![false; n];
        for (k, x) in weights {
            if k == 0 || k > n {
                return Err(Error::KeyAbsent(k));
            }
            if !(x.is_finite() && x > 0.0) {
                return Err(invalid(format!("weight of key {k} must be positive, got {x}")));
            }
            if std::mem::replace(&mut seen[k - 1], true) {
                return Err(invalid(format!("key {k} weighted twice")));
            }
            w[k - 1] = x;
        }
        Self::from_vec(w)
    }

    /// Weight of key `i + 1` is `weights[i]`; every weight must be positive.
    pub fn from_dense(weights: &[f64]) -> Result<Self> {
        Self::new(weights.len(), weights.iter().enumerate().map(|(i, &x)| (i + 1, x)))
    }

    /// Empirical key frequencies of a search trace.
    pub fn from_sequence(seq: &DemandSequence) -> Result<Self> {
        if seq.addressing() != Addressing::Search {
            return Err(Error::Incompatible(
                "key weights need a search trace".into(),
            ));
        }
        if seq.is_empty() {
            return Err(Error::EmptyDemand);
        }
        let mut w = vec![0.0; seq.n()];
        for r in seq.requests() {
            w[r.dst - 1] += 1.0;
        }
        Self::from_vec(w)
    }

    /// Long-run key frequencies of a search generator.
    pub fn from_generator(gen: &Generator) -> Result<Self> {
        if gen.addressing() != Addressing::Search {
            return Err(Error::Incompatible(
                "key weights need a search generator".into(),
            ));
        }
        let mut w = vec![0.0; gen.n()];
        for (r, p) in gen.request_distribution() {
            w[r.dst - 1] += p;
        }
        Self::from_vec(w)
    }

    fn from_vec(w: Vec<f64>) -> Result<Self> {
        let total = crate::entropy::compensated_sum(w.iter().copied());
        if total <= 0.0 {
            return Err(Error::EmptyDemand);
        }
        Ok(KeyWeights { w, total })
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn get(&self, key: usize) -> f64 {
        self.w[key - 1]
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn entropy(&self) -> f64 {
        crate::entropy::entropy_of_weights(self.w.iter().copied()).unwrap_or(0.0)
    }
}

/// Complete balanced tree over `n = 2^k - 1` keys.
pub fn build_balanced(n: usize) -> Result<BstTree> {
    if n == 0 || !(n + 1).is_power_of_two() {
        return Err(invalid(format!("balanced tree needs n = 2^k - 1, got {n}")));
    }
    Ok(build_near_balanced(n))
}

/// Midpoint tree for any `n >= 1`; identical to [`build_balanced`] when
/// `n = 2^k - 1`.
pub fn build_near_balanced(n: usize) -> BstTree {
    BstTree::from_root_choice(n, |lo, hi| lo + (hi - lo) / 2)
}

/// Exactly optimal tree for `weights`: minimises `sum_k w_k * depth(k)`.
///
/// Interval dynamic program with Knuth's monotone-root window, O(n^2).
/// Among optimal roots of an interval the smallest key is chosen.
pub fn build_optimal(weights: &KeyWeights) -> BstTree {
    let n = weights.n();
    let w = weights.as_slice();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + w[i];
    }
    // cost(i, j) over keys i..=j, 1 <= i <= n + 1, i - 1 <= j <= n.
    let stride = n + 1;
    let idx = |i: usize, j: usize| i * stride + j;
    let mut cost = vec![0.0f64; (n + 2) * stride];
    let mut root = vec![0u32; (n + 2) * stride];
    for i in 1..=n {
        cost[idx(i, i)] = w[i - 1];
        root[idx(i, i)] = i as u32;
    }
    for len in 2..=n {
        for i in 1..=n + 1 - len {
            let j = i + len - 1;
            let lo = root[idx(i, j - 1)] as usize;
            let hi = root[idx(i + 1, j)] as usize;
            let mut best = f64::INFINITY;
            let mut best_r = lo;
            for r in lo..=hi {
                let c = cost[idx(i, r - 1)] + cost[idx(r + 1, j)];
                if c < best {
                    best = c;
                    best_r = r;
                }
            }
            cost[idx(i, j)] = best + (prefix[j] - prefix[i - 1]);
            root[idx(i, j)] = best_r as u32;
        }
    }
    BstTree::from_root_choice(n, |lo, hi| root[idx(lo, hi)] as usize)
}

/// Approximately optimal tree: the root of each interval is the key that
/// minimises the heavier of its two sides (ties to the smaller key).
/// O(n log n).
pub fn build_weight_balanced(weights: &KeyWeights) -> BstTree {
    let n = weights.n();
    let w = weights.as_slice();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + w[i];
    }
    BstTree::from_root_choice(n, |lo, hi| balanced_root(&prefix, lo, hi))
}

// With prefix sums P, choosing r in lo..=hi leaves L(r) = P[r-1] - P[lo-1]
// on the left and R(r) = P[hi] - P[r] on the right. L rises and R falls in r.
fn balanced_root(prefix: &[f64], lo: usize, hi: usize) -> usize {
    let left = |r: usize| prefix[r - 1] - prefix[lo - 1];
    let right = |r: usize| prefix[hi] - prefix[r];
    // First r with L(r) >= R(r); past it the objective is L, nondecreasing.
    let (mut a, mut b) = (lo, hi + 1);
    while a < b {
        let mid = a + (b - a) / 2;
        if left(mid) >= right(mid) {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    let cross = a;
    if cross == lo {
        return lo;
    }
    // Before the crossing the objective is R, nonincreasing, so its minimum
    // there is R(cross - 1), first reached where P[r] == P[cross - 1].
    let before = right(cross - 1);
    if cross <= hi && left(cross) < before {
        return cross;
    }
    let target = prefix[cross - 1];
    let (mut a, mut b) = (lo, cross - 1);
    while a < b {
        let mid = a + (b - a) / 2;
        if prefix[mid] >= target {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::make_tau_workload;
    use proptest::prelude::*;

    // Exhaustive minimum over every root choice at every interval (no
    // memoisation), i.e. over all BST shapes.
    fn brute_optimal_total(w: &[f64], lo: usize, hi: usize) -> f64 {
        if lo > hi {
            return 0.0;
        }
        let span: f64 = w[lo - 1..hi].iter().sum();
        (lo..=hi)
            .map(|r| {
                brute_optimal_total(w, lo, r - 1) + brute_optimal_total(w, r + 1, hi)
            })
            .fold(f64::INFINITY, f64::min)
            + span
    }

    // Every BST on keys lo..=hi as a list of (key, depth) profiles.
    fn all_profiles(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
        if lo > hi {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for r in lo..=hi {
            for l in all_profiles(lo, r - 1) {
                for rt in all_profiles(r + 1, hi) {
                    let mut p = vec![(r, 1)];
                    p.extend(l.iter().chain(&rt).map(|&(k, d)| (k, d + 1)));
                    out.push(p);
                }
            }
        }
        out
    }

    // Cubic DP over all roots, smallest optimal root.
    fn cubic_roots(w: &[f64]) -> BstTree {
        let n = w.len();
        let mut cost = vec![vec![0.0f64; n + 2]; n + 2];
        let mut root = vec![vec![0usize; n + 2]; n + 2];
        for len in 1..=n {
            for i in 1..=n + 1 - len {
                let j = i + len - 1;
                let span: f64 = w[i - 1..j].iter().sum();
                let mut best = f64::INFINITY;
                for r in i..=j {
                    let c = cost[i][r - 1] + cost[r + 1][j];
                    if c < best {
                        best = c;
                        root[i][j] = r;
                    }
                }
                cost[i][j] = best + span;
            }
        }
        BstTree::from_root_choice(n, |lo, hi| root[lo][hi])
    }

    #[test]
    fn balanced_depths() {
        let t = build_balanced(7).unwrap();
        assert_eq!(t.root(), 4);
        assert_eq!(t.depth(4).unwrap(), 1);
        assert_eq!(t.depth(2).unwrap(), 2);
        assert_eq!(t.depth(6).unwrap(), 2);
        for k in [1, 3, 5, 7] {
            assert_eq!(t.depth(k).unwrap(), 3);
        }
        assert_eq!(build_balanced(15).unwrap().depth(1).unwrap(), 4);
        let big = build_balanced(1023).unwrap();
        assert!((1..=1023).step_by(2).all(|k| big.depth(k).unwrap() == 10));
        assert!(build_balanced(6).is_err());
        assert!(build_balanced(0).is_err());
    }

    #[test]
    fn enumeration_counts_catalan() {
        assert_eq!(all_profiles(1, 3).len(), 5);
        assert_eq!(all_profiles(1, 7).len(), 429);
    }

    #[test]
    fn optimal_three_keys() {
        let w = KeyWeights::from_dense(&[0.5, 0.25, 0.25]).unwrap();
        let oracle = all_profiles(1, 3)
            .iter()
            .map(|p| p.iter().map(|&(k, d)| w.get(k) * d as f64).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(oracle, 1.75);
        let t = build_optimal(&w);
        assert_eq!(t.expected_cost(&w).unwrap(), 1.75);
        assert_eq!(t.root(), 1);
    }

    #[test]
    fn optimal_uniform_seven_matches_balanced() {
        let w = KeyWeights::from_dense(&[1.0; 7]).unwrap();
        let oracle = all_profiles(1, 7)
            .iter()
            .map(|p| p.iter().map(|&(_, d)| d as f64).sum::<f64>() / 7.0)
            .fold(f64::INFINITY, f64::min);
        assert!((oracle - 17.0 / 7.0).abs() < 1e-12);
        let t = build_optimal(&w);
        assert!((t.expected_cost(&w).unwrap() - 17.0 / 7.0).abs() < 1e-12);
        assert_eq!(t, build_balanced(7).unwrap());
    }

    #[test]
    fn optimal_single_key() {
        let w = KeyWeights::from_dense(&[3.0]).unwrap();
        assert_eq!(build_optimal(&w).expected_cost(&w).unwrap(), 1.0);
    }

    #[test]
    fn rejects_nonpositive_weights() {
        assert!(KeyWeights::from_dense(&[1.0, 0.0]).is_err());
        assert!(KeyWeights::from_dense(&[1.0, -2.0]).is_err());
        assert!(KeyWeights::new(3, [(4, 1.0)]).is_err());
        assert!(KeyWeights::new(3, [(1, 1.0), (1, 2.0)]).is_err());
    }

    #[test]
    fn weight_balanced_examples() {
        let w = KeyWeights::from_dense(&[1.0; 7]).unwrap();
        assert_eq!(build_weight_balanced(&w), build_balanced(7).unwrap());
        let w = KeyWeights::from_dense(&[0.97, 0.01, 0.01, 0.01]).unwrap();
        assert_eq!(build_weight_balanced(&w).root(), 1);
    }

    #[test]
    fn tau_distribution_trees() {
        let tau = make_tau_workload(10, 1000).unwrap();
        let w = KeyWeights::from_sequence(&tau).unwrap();
        let bound = 10f64.log2() + 2.0;
        let wb = build_weight_balanced(&w);
        assert!(wb.is_valid());
        assert!(wb.expected_cost(&w).unwrap() <= bound);
        let opt = build_optimal(&w);
        assert!(opt.is_valid());
        // Ten equally likely keys: 1 + 2*2 + 4*3 + 3*4 = 29 over 10.
        assert!((opt.expected_cost(&w).unwrap() - 2.9).abs() < 1e-12);
    }

    #[test]
    fn weights_from_generator() {
        let g = Generator::zipf_searches(5, 1.0, 3, 0).unwrap();
        let w = KeyWeights::from_generator(&g).unwrap();
        assert!((w.total() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn knuth_window_matches_exhaustive(ws in prop::collection::vec(0u8..4, 1..10)) {
            prop_assume!(ws.iter().any(|&x| x > 0));
            let w: Vec<f64> = ws.iter().map(|&x| x as f64).collect();
            let kw = KeyWeights::new(w.len(), w.iter().enumerate().filter(|(_, &x)| x > 0.0).map(|(i, &x)| (i + 1, x))).unwrap();
            let t = build_optimal(&kw);
            prop_assert!(t.is_valid());
            let total = t.expected_cost(&kw).unwrap() * kw.total();
            prop_assert!((total - brute_optimal_total(&w, 1, w.len())).abs() < 1e-9);
            // Same smallest-root tie-breaking as the full cubic recurrence.
            prop_assert_eq!(t, cubic_roots(&w));
        }

        #[test]
        fn weight_balanced_roots_minimise_heavier_side(ws in prop::collection::vec(0u8..5, 1..40)) {
            prop_assume!(ws.iter().any(|&x| x > 0));
            let w: Vec<f64> = ws.iter().map(|&x| x as f64).collect();
            let mut prefix = vec![0.0; w.len() + 1];
            for i in 0..w.len() { prefix[i + 1] = prefix[i] + w[i]; }
            for lo in 1..=w.len() {
                for hi in lo..=w.len() {
                    let score = |r: usize| f64::max(prefix[r - 1] - prefix[lo - 1], prefix[hi] - prefix[r]);
                    let linear = (lo..=hi).min_by(|&a, &b| score(a).partial_cmp(&score(b)).unwrap().then(a.cmp(&b))).unwrap();
                    prop_assert_eq!(balanced_root(&prefix, lo, hi), linear, "lo {} hi {}", lo, hi);
                }
            }
        }
    }
}
