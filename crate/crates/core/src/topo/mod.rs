//! Undirected network topologies, shortest-path routing and edge-edit
//! reconfiguration.

mod ego;
mod expander;
mod splaynet;

pub use ego::{build_ego_tree_network, EgoTreeNetwork};
pub use expander::{build_random_regular, random_permutation};
pub use splaynet::{build_selfadjusting_tree, sat_route_and_adjust, SelfAdjustingTree};

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;

use crate::bst::BstTree;
use crate::demand::{CommRequest, DemandGraph};
use crate::error::{invalid, Error, Result};

/// Topology constraint every snapshot of a network must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    BoundedDegree(usize),
    Tree,
    Unconstrained,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::BoundedDegree(d) => write!(f, "bounded_degree({d})"),
            Family::Tree => write!(f, "tree"),
            Family::Unconstrained => write!(f, "unconstrained"),
        }
    }
}

fn norm(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Connected undirected graph over nodes `0..n` that satisfies its family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    n: usize,
    family: Family,
    adj: Vec<Vec<usize>>,
}

impl Network {
    /// Validates connectivity and the family constraint. Duplicate edges
    /// collapse; self-loops are rejected.
    pub fn new<I>(n: usize, edges: I, family: Family) -> Result<Network>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(invalid("network needs at least one node"));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(invalid(format!("self-loop at {u}")));
            }
            set.insert(norm(u, v));
        }
        let net = Self::from_edge_set(n, &set, family);
        net.validate()?;
        Ok(net)
    }

    fn from_edge_set(n: usize, set: &BTreeSet<(usize, usize)>, family: Family) -> Network {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in set {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Network { n, family, adj }
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Network> {
        Network::new(n, (1..n).map(|i| (i - 1, i)), Family::Tree)
    }

    /// `rows x cols` mesh, node `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Result<Network> {
        let mut e = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let u = r * cols + c;
                if c + 1 < cols {
                    e.push((u, u + 1));
                }
                if r + 1 < rows {
                    e.push((u, u + cols));
                }
            }
        }
        Network::new(rows * cols, e, Family::BoundedDegree(4))
    }

    /// Tree network of a BST over keys `1..=n`; key `k` is node `k - 1`.
    pub fn from_tree(tree: &BstTree) -> Network {
        let set = tree.edges().into_iter().map(|(p, c)| norm(p - 1, c - 1)).collect();
        Self::from_edge_set(tree.n(), &set, Family::Tree)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::with_capacity(self.edge_count());
        for (u, a) in self.adj.iter().enumerate() {
            e.extend(a.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        e
    }

    pub fn is_connected(&self) -> bool {
        self.bfs(0).iter().all(|&d| d != usize::MAX)
    }

    /// Checks connectivity and the family constraint.
    pub fn validate(&self) -> Result<()> {
        if !self.is_connected() {
            return Err(Error::ConstraintBreach("network is disconnected".into()));
        }
        match self.family {
            Family::BoundedDegree(d) => {
                if let Some(u) = (0..self.n).find(|&u| self.degree(u) > d) {
                    return Err(Error::ConstraintBreach(format!(
                        "node {u} has degree {} > {d}",
                        self.degree(u)
                    )));
                }
            }
            Family::Tree => {
                if self.edge_count() + 1 != self.n {
                    return Err(Error::ConstraintBreach(format!(
                        "{} edges on {} nodes is not a tree",
                        self.edge_count(),
                        self.n
                    )));
                }
            }
            Family::Unconstrained => {}
        }
        Ok(())
    }

    /// Hop distances from `src`; `usize::MAX` for unreachable nodes.
    pub fn bfs(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Eccentricity maximum over all nodes.
    pub fn diameter(&self) -> usize {
        (0..self.n)
            .into_par_iter()
            .map(|u| self.bfs(u).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Mean hop distance over all ordered pairs of distinct nodes.
    pub fn average_distance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let sums: Vec<u64> = (0..self.n)
            .into_par_iter()
            .map(|u| self.bfs(u).into_iter().map(|d| d as u64).sum())
            .collect();
        sums.iter().sum::<u64>() as f64 / (self.n * (self.n - 1)) as f64
    }
}

/// Shortest-path hop count of a request.
pub fn route_length(net: &Network, req: CommRequest) -> Result<usize> {
    if req.src >= net.n() || req.dst >= net.n() {
        return Err(invalid(format!(
            "request ({}, {}) outside network of {} nodes",
            req.src,
            req.dst,
            net.n()
        )));
    }
    let d = net.bfs(req.src)[req.dst];
    if d == usize::MAX {
        return Err(Error::Disconnected {
            src: req.src,
            dst: req.dst,
        });
    }
    Ok(d)
}

/// Demand-weighted mean route length of `g` served on `net`.
pub fn avg_route_length(net: &Network, g: &DemandGraph) -> Result<f64> {
    if g.is_empty() {
        return Err(Error::EmptyDemand);
    }
    if g.n() > net.n() {
        return Err(invalid("demand has more nodes than the network"));
    }
    let sources = g.sources();
    let per_source: Vec<Result<f64>> = sources
        .par_iter()
        .map(|&u| {
            let dist = net.bfs(u);
            let mut acc = 0.0;
            for (v, w) in g.out_edges(u) {
                if dist[v] == usize::MAX {
                    return Err(Error::Disconnected { src: u, dst: v });
                }
                acc += w * dist[v] as f64;
            }
            Ok(acc)
        })
        .collect();
    let total = crate::entropy::compensated_sum(
        per_source.into_iter().collect::<Result<Vec<_>>>()?,
    );
    Ok(total / g.total_weight())
}

/// Links to add and remove in one reconfiguration step.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeEdit {
    pub additions: BTreeSet<(usize, usize)>,
    pub removals: BTreeSet<(usize, usize)>,
}

impl EdgeEdit {
    pub fn new<A, R>(additions: A, removals: R) -> Result<EdgeEdit>
    where
        A: IntoIterator<Item = (usize, usize)>,
        R: IntoIterator<Item = (usize, usize)>,
    {
        let additions: BTreeSet<_> = additions.into_iter().map(|(u, v)| norm(u, v)).collect();
        let removals: BTreeSet<_> = removals.into_iter().map(|(u, v)| norm(u, v)).collect();
        if let Some(e) = additions.intersection(&removals).next() {
            return Err(invalid(format!("edge {e:?} both added and removed")));
        }
        Ok(EdgeEdit {
            additions,
            removals,
        })
    }

    /// Adjustment charge: number of links changed.
    pub fn size(&self) -> u64 {
        (self.additions.len() + self.removals.len()) as u64
    }
}

/// Applies an edit, returning the new network and its adjustment charge.
pub fn apply_edit(net: &Network, edit: &EdgeEdit) -> Result<(Network, u64)> {
    if let Some(e) = edit.additions.intersection(&edit.removals).next() {
        return Err(invalid(format!("edge {e:?} both added and removed")));
    }
    let mut set: BTreeSet<(usize, usize)> = net.edges().into_iter().collect();
    for &(u, v) in &edit.removals {
        if !set.remove(&(u, v)) {
            return Err(invalid(format!("cannot remove missing edge ({u}, {v})")));
        }
    }
    for &(u, v) in &edit.additions {
        if u == v || v >= net.n() {
            return Err(invalid(format!("cannot add edge ({u}, {v})")));
        }
        if !set.insert((u, v)) {
            return Err(invalid(format!("edge ({u}, {v}) already present")));
        }
    }
    let next = Network::from_edge_set(net.n(), &set, net.family());
    next.validate()?;
    Ok((next, edit.size()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::{make_grid_demand, DemandGraph};
    use proptest::prelude::*;

    #[test]
    fn route_examples() {
        let p = Network::path(4).unwrap();
        assert_eq!(route_length(&p, CommRequest::new(0, 3)).unwrap(), 3);
        assert_eq!(route_length(&p, CommRequest::new(1, 2)).unwrap(), 1);
        let g = Network::grid(4, 4).unwrap();
        assert_eq!(route_length(&g, CommRequest::new(0, 15)).unwrap(), 6);
        assert!(route_length(&g, CommRequest::new(0, 16)).is_err());
    }

    #[test]
    fn disconnected_graphs_are_rejected() {
        assert!(matches!(
            Network::new(4, [(0, 1), (2, 3)], Family::Unconstrained),
            Err(Error::ConstraintBreach(_))
        ));
        assert!(Network::new(3, [(0, 0)], Family::Unconstrained).is_err());
    }

    #[test]
    fn average_route_on_matching_topology() {
        let g = make_grid_demand(5, 2).unwrap();
        let net = Network::grid(5, 5).unwrap();
        assert_eq!(avg_route_length(&net, &g).unwrap(), 1.0);

        let mut d = DemandGraph::empty(4);
        d.add(0, 1, 3.0).unwrap();
        d.add(3, 2, 1.0).unwrap();
        assert_eq!(avg_route_length(&Network::path(4).unwrap(), &d).unwrap(), 1.0);
    }

    #[test]
    fn edits() {
        let net = Network::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)], Family::BoundedDegree(2))
            .unwrap();
        let (same, c) = apply_edit(&net, &EdgeEdit::default()).unwrap();
        assert_eq!((same, c), (net.clone(), 0));

        let swap = EdgeEdit::new([(0, 2), (1, 3)], [(0, 1), (2, 3)]).unwrap();
        let (next, c) = apply_edit(&net, &swap).unwrap();
        assert_eq!(c, 4);
        assert!(next.has_edge(0, 2) && !next.has_edge(0, 1));

        let path = Network::path(4).unwrap();
        let one_each = EdgeEdit::new([(1, 3)], [(2, 3)]).unwrap();
        let (moved, c) = apply_edit(&path, &one_each).unwrap();
        assert_eq!(c, 2);
        assert_eq!(moved.degree(1), 3);

        let over = EdgeEdit::new([(0, 2)], []).unwrap();
        assert!(matches!(apply_edit(&net, &over), Err(Error::ConstraintBreach(_))));

        let cut = EdgeEdit::new([], [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(apply_edit(&net, &cut), Err(Error::ConstraintBreach(_))));

        assert!(EdgeEdit::new([(0, 1)], [(1, 0)]).is_err());
    }

    #[test]
    fn tree_family_rejects_cycles() {
        let p = Network::path(3).unwrap();
        let close = EdgeEdit::new([(0, 2)], []).unwrap();
        assert!(matches!(apply_edit(&p, &close), Err(Error::ConstraintBreach(_))));
    }

    proptest! {
        #[test]
        fn distances_are_symmetric_and_triangular(seed in 0u64..200) {
            let net = build_random_regular(40, 3, seed).unwrap();
            let all: Vec<Vec<usize>> = (0..net.n()).map(|u| net.bfs(u)).collect();
            for u in 0..net.n() {
                for v in 0..net.n() {
                    prop_assert_eq!(all[u][v], all[v][u]);
                }
            }
            for a in 0..net.n() {
                for b in 0..net.n() {
                    for c in 0..net.n() {
                        prop_assert!(all[a][c] <= all[a][b] + all[b][c]);
                    }
                }
            }
        }
    }
}
