use std::collections::{BTreeMap, BTreeSet};

use super::{Family, Network};
use crate::bst::{build_weight_balanced, KeyWeights, NIL};
use crate::demand::DemandGraph;
use crate::error::{Error, Result};

/// Union of per-source ego-trees.
#[derive(Debug, Clone)]
pub struct EgoTreeNetwork {
    pub network: Network,
    pub max_degree: usize,
    /// Set when a degree cap was requested and the union exceeds it; no
    /// degree reduction is attempted.
    pub degree_cap_exceeded: bool,
    /// Hops from `u` to `v` inside `u`'s own ego-tree, per demand edge.
    pub ego_depth: BTreeMap<(usize, usize), usize>,
    /// Links added only to join components the demand leaves apart.
    pub bridge_edges: Vec<(usize, usize)>,
}

/// Builds, for every source `u`, a weight-balanced BST over `u`'s
/// destinations (ordered by node id, weighted by demand) hanging below `u`,
/// and returns the union of those trees as one network.
pub fn build_ego_tree_network(g: &DemandGraph, degree_cap: Option<usize>) -> Result<EgoTreeNetwork> {
    if g.is_empty() {
        return Err(Error::EmptyDemand);
    }
    let mut edges = BTreeSet::new();
    let mut ego_depth = BTreeMap::new();
    for u in g.sources() {
        let dests: Vec<(usize, f64)> = g.out_edges(u).collect();
        let kw = KeyWeights::from_dense(&dests.iter().map(|&(_, w)| w).collect::<Vec<_>>())?;
        let tree = build_weight_balanced(&kw);
        let node = |key: usize| dests[key - 1].0;
        let link = |a: usize, b: usize| (a.min(b), a.max(b));
        edges.insert(link(u, node(tree.root())));
        for (p, c) in tree.edges() {
            edges.insert(link(node(p), node(c)));
        }
        let depths = tree.depths();
        for (key, &(v, _)) in dests.iter().enumerate() {
            ego_depth.insert((u, v), depths[key + 1]);
        }
        debug_assert_ne!(tree.root(), NIL);
    }
    let bridge_edges = bridges(g.n(), &edges);
    edges.extend(bridge_edges.iter().copied());
    let network = Network::new(g.n(), edges, Family::Unconstrained)?;
    let max_degree = network.max_degree();
    Ok(EgoTreeNetwork {
        degree_cap_exceeded: degree_cap.is_some_and(|cap| max_degree > cap),
        network,
        max_degree,
        ego_depth,
        bridge_edges,
    })
}

// Chains the smallest node of each connected component to the next one.
fn bridges(n: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<(usize, usize)> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut reps = Vec::new();
    let mut seen = BTreeSet::new();
    for u in 0..n {
        if seen.insert(find(&mut parent, u)) {
            reps.push(u);
        }
    }
    reps.windows(2).map(|w| (w[0], w[1])).collect()
}
