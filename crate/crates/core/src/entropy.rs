//! Empirical Shannon entropies (in bits) of traces and demand graphs.

use std::collections::BTreeMap;

use crate::demand::{DemandGraph, DemandSequence};
use crate::error::{Error, Result};

/// Neumaier-compensated summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Entropy of the distribution proportional to `weights`. Zero weights
/// contribute nothing.
pub fn entropy_of_weights<I: IntoIterator<Item = f64>>(weights: I) -> Result<f64> {
    let w: Vec<f64> = weights.into_iter().collect();
    if w.is_empty() {
        return Err(Error::EmptyDemand);
    }
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(crate::error::invalid("weights must be finite and nonnegative"));
    }
    let total = compensated_sum(w.iter().copied());
    if total <= 0.0 {
        return Err(Error::EmptyDemand);
    }
    Ok(entropy_unchecked(&w, total))
}

fn entropy_unchecked(w: &[f64], total: f64) -> f64 {
    compensated_sum(w.iter().filter(|&&x| x > 0.0).map(|&x| {
        let p = x / total;
        -p * p.log2()
    }))
    .max(0.0)
}

/// Entropy of a table of symbol counts.
pub fn empirical_entropy<I: IntoIterator<Item = u64>>(counts: I) -> Result<f64> {
    entropy_of_weights(counts.into_iter().map(|c| c as f64))
}

/// Entropy of the symbols of a slice, by occurrence count.
pub fn entropy_of_symbols<T: Ord>(symbols: &[T]) -> Result<f64> {
    let mut counts: BTreeMap<&T, u64> = BTreeMap::new();
    for s in symbols {
        *counts.entry(s).or_insert(0) += 1;
    }
    empirical_entropy(counts.into_values())
}

/// Entropies of a demand: joint over pairs, both marginals and both
/// conditionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub n: usize,
    /// Total weight (number of requests for a trace).
    pub m: f64,
    pub entropy_bits: f64,
    pub source_entropy_bits: f64,
    pub dest_entropy_bits: f64,
    /// H(Y | X): destination given source.
    pub conditional_yx_bits: f64,
    /// H(X | Y): source given destination.
    pub conditional_xy_bits: f64,
}

impl EntropyReport {
    pub const CSV_HEADER: &'static str = "n,m,H_pair,H_src,H_dst,H_dst_given_src,H_src_given_dst";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.9},{:.9},{:.9},{:.9},{:.9}",
            self.n,
            self.m,
            self.entropy_bits,
            self.source_entropy_bits,
            self.dest_entropy_bits,
            self.conditional_yx_bits,
            self.conditional_xy_bits
        )
    }
}

pub fn sequence_entropies(seq: &DemandSequence) -> Result<EntropyReport> {
    let g = DemandGraph::from_sequence(seq)?;
    let mut r = graph_entropies(&g)?;
    r.n = seq.n();
    Ok(r)
}

pub fn graph_entropies(g: &DemandGraph) -> Result<EntropyReport> {
    if g.is_empty() {
        return Err(Error::EmptyDemand);
    }
    let total = g.total_weight();
    let pair: Vec<f64> = g.edges().map(|(_, _, w)| w).collect();
    Ok(EntropyReport {
        n: g.n(),
        m: total,
        entropy_bits: entropy_unchecked(&pair, total),
        source_entropy_bits: entropy_unchecked(&g.out_weights(), total),
        dest_entropy_bits: entropy_unchecked(&g.in_weights(), total),
        conditional_yx_bits: conditional(g.edges(), total),
        conditional_xy_bits: conditional(g.edges().map(|(s, d, w)| (d, s, w)), total),
    })
}

/// H(Y | X) = sum over sources u of p(u) * H(destinations of u).
pub fn conditional_entropy(g: &DemandGraph) -> Result<f64> {
    if g.is_empty() {
        return Err(Error::EmptyDemand);
    }
    Ok(conditional(g.edges(), g.total_weight()))
}

/// Conditional entropy of the second coordinate given the first.
fn conditional<I: Iterator<Item = (usize, usize, f64)>>(edges: I, total: f64) -> f64 {
    let mut rows: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (given, _, w) in edges {
        rows.entry(given).or_default().push(w);
    }
    compensated_sum(rows.values().map(|row| {
        let row_total = compensated_sum(row.iter().copied());
        (row_total / total) * entropy_unchecked(row, row_total)
    }))
}
