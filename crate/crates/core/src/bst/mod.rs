//! Binary search trees over keys `1..=n`, viewed as networks whose root
//! serves every search: balanced (demand-oblivious), optimal and
//! weight-balanced (fixed demand-aware) and splay (self-adjusting).

mod build;
mod splay;

pub use build::{build_balanced, build_near_balanced, build_optimal, build_weight_balanced, KeyWeights};
pub use splay::{serve_sequence, splay_access, AccessResult, Policy};

use crate::error::{Error, Result};

/// Absent link.
pub const NIL: usize = 0;

/// Pointer-based BST over keys `1..=n`. Links are indexed by key, `NIL`
/// marks an absent parent or child.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BstTree {
    root: usize,
    parent: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl BstTree {
    /// Builds a tree by repeatedly asking `pick(lo, hi)` for the root of the
    /// key interval `lo..=hi`.
    pub(crate) fn from_root_choice<F>(n: usize, mut pick: F) -> BstTree
    where
        F: FnMut(usize, usize) -> usize,
    {
        let mut t = BstTree {
            root: NIL,
            parent: vec![NIL; n + 1],
            left: vec![NIL; n + 1],
            right: vec![NIL; n + 1],
        };
        // (lo, hi, parent, is_left)
        let mut stack = vec![(1usize, n, NIL, false)];
        while let Some((lo, hi, p, is_left)) = stack.pop() {
            if lo > hi {
                continue;
            }
            let r = pick(lo, hi);
            debug_assert!((lo..=hi).contains(&r));
            t.parent[r] = p;
            if p == NIL {
                t.root = r;
            } else if is_left {
                t.left[p] = r;
            } else {
                t.right[p] = r;
            }
            stack.push((lo, r - 1, r, true));
            stack.push((r + 1, hi, r, false));
        }
        t
    }

    pub fn n(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, key: usize) -> usize {
        self.parent[key]
    }

    pub fn left(&self, key: usize) -> usize {
        self.left[key]
    }

    pub fn right(&self, key: usize) -> usize {
        self.right[key]
    }

    pub fn contains(&self, key: usize) -> bool {
        key >= 1 && key <= self.n()
    }

    fn check_key(&self, key: usize) -> Result<()> {
        if self.contains(key) {
            Ok(())
        } else {
            Err(Error::KeyAbsent(key))
        }
    }

    /// Number of nodes on the root-to-`key` path (the root has depth 1).
    pub fn depth(&self, key: usize) -> Result<usize> {
        self.check_key(key)?;
        Ok(self.depth_unchecked(key))
    }

    pub(crate) fn depth_unchecked(&self, mut key: usize) -> usize {
        let mut d = 1;
        while self.parent[key] != NIL {
            key = self.parent[key];
            d += 1;
        }
        d
    }

    /// Depth of every key, indexed by key (entry 0 unused).
    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.parent.len()];
        let mut stack = vec![(self.root, 1)];
        while let Some((k, depth)) = stack.pop() {
            if k == NIL {
                continue;
            }
            d[k] = depth;
            stack.push((self.left[k], depth + 1));
            stack.push((self.right[k], depth + 1));
        }
        d
    }

    /// Lowest common ancestor of two keys.
    pub fn lca(&self, a: usize, b: usize) -> Result<usize> {
        self.check_key(a)?;
        self.check_key(b)?;
        let (lo, hi) = (a.min(b), a.max(b));
        let mut x = self.root;
        loop {
            if x < lo {
                x = self.right[x];
            } else if x > hi {
                x = self.left[x];
            } else {
                return Ok(x);
            }
        }
    }

    /// Hops on the tree path between two keys.
    pub fn distance(&self, a: usize, b: usize) -> Result<usize> {
        let w = self.lca(a, b)?;
        Ok(self.depth_unchecked(a) + self.depth_unchecked(b) - 2 * self.depth_unchecked(w))
    }

    /// Rotates `x` above its parent. Returns false (and does nothing) at the root.
    pub fn rotate_up(&mut self, x: usize) -> bool {
        let p = self.parent[x];
        if p == NIL {
            return false;
        }
        let g = self.parent[p];
        if self.left[p] == x {
            let b = self.right[x];
            self.left[p] = b;
            if b != NIL {
                self.parent[b] = p;
            }
            self.right[x] = p;
        } else {
            let b = self.left[x];
            self.right[p] = b;
            if b != NIL {
                self.parent[b] = p;
            }
            self.left[x] = p;
        }
        self.parent[p] = x;
        self.parent[x] = g;
        if g == NIL {
            self.root = x;
        } else if self.left[g] == p {
            self.left[g] = x;
        } else {
            self.right[g] = x;
        }
        true
    }

    /// Splays `x` upward until its parent is `stop` (`NIL` splays to the
    /// root) using zig, zig-zig and zig-zag steps. Returns the number of
    /// single rotations. `stop` must be a proper ancestor of `x` or `NIL`.
    pub(crate) fn splay_below(&mut self, x: usize, stop: usize) -> u64 {
        let mut rotations = 0;
        while self.parent[x] != stop {
            let p = self.parent[x];
            let g = self.parent[p];
            if g == stop {
                self.rotate_up(x);
                rotations += 1;
            } else if (self.left[g] == p) == (self.left[p] == x) {
                self.rotate_up(p);
                self.rotate_up(x);
                rotations += 2;
            } else {
                self.rotate_up(x);
                self.rotate_up(x);
                rotations += 2;
            }
        }
        rotations
    }

    /// In-order keys.
    pub fn in_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n());
        let mut stack = Vec::new();
        let mut cur = self.root;
        while cur != NIL || !stack.is_empty() {
            while cur != NIL {
                stack.push(cur);
                cur = self.left[cur];
            }
            let k = stack.pop().unwrap();
            out.push(k);
            cur = self.right[k];
        }
        out
    }

    /// Search-order and link-consistency check.
    pub fn is_valid(&self) -> bool {
        let n = self.n();
        if n == 0 || self.root == NIL || self.parent[self.root] != NIL {
            return false;
        }
        for k in 1..=n {
            let (l, r) = (self.left[k], self.right[k]);
            if l != NIL && (self.parent[l] != k || l >= k) {
                return false;
            }
            if r != NIL && (self.parent[r] != k || r <= k) {
                return false;
            }
        }
        self.in_order().into_iter().eq(1..=n)
    }

    /// Parent-child links, each once.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (1..=self.n())
            .filter(|&k| self.parent[k] != NIL)
            .map(|k| (self.parent[k], k))
            .collect()
    }

    /// Compact encoding of the shape; equal codes mean equal trees.
    pub fn shape_code(&self) -> Vec<u16> {
        self.parent[1..].iter().map(|&p| p as u16).collect()
    }

    /// `sum_k w_k * depth(k) / sum_k w_k`.
    pub fn expected_cost(&self, weights: &KeyWeights) -> Result<f64> {
        if weights.n() != self.n() {
            return Err(Error::Incompatible(format!(
                "weights over {} keys, tree over {}",
                weights.n(),
                self.n()
            )));
        }
        let d = self.depths();
        let total = crate::entropy::compensated_sum(
            (1..=self.n()).map(|k| weights.get(k) * d[k] as f64),
        );
        Ok(total / weights.total())
    }

    /// One `key parent left right` line per node, `0` for absent links.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for k in 1..=self.n() {
            s.push_str(&format!(
                "{} {} {} {}\n",
                k, self.parent[k], self.left[k], self.right[k]
            ));
        }
        s
    }

    /// Parses the [`dump`](Self::dump) format and validates the result.
    pub fn from_dump(text: &str) -> Result<BstTree> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            if nums.len() != 4 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "expected `key parent left right`".into(),
                });
            }
            rows.push((i + 1, nums));
        }
        let n = rows.len();
        if n == 0 {
            return Err(Error::Parse {
                line: 1,
                msg: "empty tree dump".into(),
            });
        }
        let mut t = BstTree {
            root: NIL,
            parent: vec![NIL; n + 1],
            left: vec![NIL; n + 1],
            right: vec![NIL; n + 1],
        };
        let mut seen = vec![false; n + 1];
        for (line, v) in rows {
            let k = v[0];
            if k == 0 || k > n || v[1..].iter().any(|&x| x > n) {
                return Err(Error::Parse {
                    line,
                    msg: format!("key out of range 1..={n}"),
                });
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate key {k}"),
                });
            }
            t.parent[k] = v[1];
            t.left[k] = v[2];
            t.right[k] = v[3];
            if v[1] == NIL {
                t.root = k;
            }
        }
        if !t.is_valid() {
            return Err(Error::Parse {
                line: 1,
                msg: "links do not form a binary search tree".into(),
            });
        }
        Ok(t)
    }
}
