use std::collections::BTreeMap;

use super::{Addressing, CommRequest, DemandSequence};
use crate::error::{invalid, Error, Result};

/// Weighted directed aggregation of a trace.
///
/// Weights built from a trace are occurrence counts; they are whole numbers
/// stored exactly in `f64` (exact up to 2^53). Hand-built graphs such as a
/// skewed star may carry arbitrary positive real weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandGraph {
    n: usize,
    edges: BTreeMap<(usize, usize), f64>,
}

impl DemandGraph {
    pub fn empty(n: usize) -> Self {
        DemandGraph {
            n,
            edges: BTreeMap::new(),
        }
    }

    pub fn from_sequence(seq: &DemandSequence) -> Result<Self> {
        if seq.is_empty() {
            return Err(Error::EmptyDemand);
        }
        let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for r in seq.requests() {
            *counts.entry((r.src, r.dst)).or_insert(0) += 1;
        }
        Ok(DemandGraph {
            n: seq.addressing().id_space(seq.n()),
            edges: counts.into_iter().map(|(k, c)| (k, c as f64)).collect(),
        })
    }

    /// `rows x cols` mesh, node id `r * cols + c`.
    pub fn grid(rows: usize, cols: usize, weight: u64) -> Result<Self> {
        if rows < 1 || cols < 1 || rows * cols < 2 {
            return Err(invalid("grid needs at least two nodes"));
        }
        if weight == 0 {
            return Err(invalid("grid weight must be positive"));
        }
        let mut g = DemandGraph::empty(rows * cols);
        let w = weight as f64;
        for r in 0..rows {
            for c in 0..cols {
                let u = r * cols + c;
                if c + 1 < cols {
                    g.add(u, u + 1, w)?;
                    g.add(u + 1, u, w)?;
                }
                if r + 1 < rows {
                    g.add(u, u + cols, w)?;
                    g.add(u + cols, u, w)?;
                }
            }
        }
        Ok(g)
    }

    /// Adds `weight` to edge `(src, dst)`.
    pub fn add(&mut self, src: usize, dst: usize, weight: f64) -> Result<()> {
        Addressing::Pairs.check(self.n, CommRequest::new(src, dst))?;
        if !(weight.is_finite() && weight > 0.0) {
            return Err(invalid(format!("edge weight must be positive, got {weight}")));
        }
        *self.edges.entry((src, dst)).or_insert(0.0) += weight;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, src: usize, dst: usize) -> f64 {
        self.edges.get(&(src, dst)).copied().unwrap_or(0.0)
    }

    /// Edges in `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(s, d), &w)| (s, d, w))
    }

    pub fn total_weight(&self) -> f64 {
        crate::entropy::compensated_sum(self.edges.values().copied())
    }

    /// Destinations of `src` with their weights, by destination id.
    pub fn out_edges(&self, src: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.edges
            .range((src, 0)..(src + 1, 0))
            .map(|(&(_, d), &w)| (d, w))
    }

    /// Nodes with at least one outgoing demand edge.
    pub fn sources(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.edges.keys().map(|&(u, _)| u).collect();
        s.dedup();
        s
    }

    pub fn out_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n];
        for (&(s, _), &x) in &self.edges {
            w[s] += x;
        }
        w
    }

    pub fn in_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n];
        for (&(_, d), &x) in &self.edges {
            w[d] += x;
        }
        w
    }

    pub fn max_out_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n];
        for &(s, _) in self.edges.keys() {
            deg[s] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Mean number of distinct partners per node, counting a pair once even
    /// if it communicates in both directions.
    pub fn average_degree(&self) -> f64 {
        let mut undirected: Vec<(usize, usize)> = self
            .edges
            .keys()
            .map(|&(s, d)| (s.min(d), s.max(d)))
            .collect();
        undirected.sort_unstable();
        undirected.dedup();
        2.0 * undirected.len() as f64 / self.n as f64
    }

    /// Renames node `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<DemandGraph> {
        if perm.len() != self.n {
            return Err(invalid("permutation length differs from node count"));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(invalid("relabeling is not a permutation"));
            }
        }
        Ok(DemandGraph {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|(&(s, d), &w)| ((perm[s], perm[d]), w))
                .collect(),
        })
    }

    /// Same graph with weights summing to one.
    pub fn normalized(&self) -> DemandGraph {
        let total = self.total_weight();
        DemandGraph {
            n: self.n,
            edges: self.edges.iter().map(|(&k, &w)| (k, w / total)).collect(),
        }
    }

    /// Expands an integer-weighted graph into a trace: `passes` rounds, each
    /// emitting every edge `weight` times in edge order.
    pub fn to_trace(&self, passes: usize) -> Result<DemandSequence> {
        if self.is_empty() {
            return Err(Error::EmptyDemand);
        }
        let mut requests = Vec::new();
        for _ in 0..passes {
            for (&(s, d), &w) in &self.edges {
                if w.fract() != 0.0 {
                    return Err(invalid("trace expansion needs integer weights"));
                }
                for _ in 0..w as u64 {
                    requests.push(CommRequest::new(s, d));
                }
            }
        }
        DemandSequence::new(self.n, Addressing::Pairs, requests)
    }
}
