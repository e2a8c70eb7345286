//! Communication demand: request traces, the canonical workloads, and
//! their aggregation into weighted demand graphs.

mod generator;
mod graph;

pub use generator::{Generator, Model, PRNG_ID};
pub use graph::DemandGraph;

use crate::error::{Error, Result};

/// Virtual source of every request in a search trace: searches start at the
/// tree root rather than at a node of the network.
pub const ROOT: usize = 0;

/// One unit of communication from `src` to `dst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommRequest {
    pub src: usize,
    pub dst: usize,
}

impl CommRequest {
    pub fn new(src: usize, dst: usize) -> Self {
        CommRequest { src, dst }
    }
}

/// How the endpoints of a trace are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Addressing {
    /// Source and destination are node ids in `[0, n)`, `src != dst`.
    Pairs,
    /// BST search semantics: the source is always [`ROOT`] and the
    /// destination is a key in `1..=n`.
    Search,
}

impl Addressing {
    pub fn check(self, n: usize, req: CommRequest) -> Result<()> {
        let bad = |reason| Error::InvalidRequest {
            src: req.src,
            dst: req.dst,
            n,
            reason,
        };
        match self {
            Addressing::Pairs => {
                if req.src >= n || req.dst >= n {
                    return Err(bad("endpoint out of range"));
                }
                if req.src == req.dst {
                    return Err(bad("source equals destination"));
                }
            }
            Addressing::Search => {
                if req.src != ROOT {
                    return Err(bad("search requests must originate at the root"));
                }
                if req.dst == 0 || req.dst > n {
                    return Err(bad("key out of range"));
                }
            }
        }
        Ok(())
    }

    /// Size of the node-id space a demand graph over this addressing needs.
    pub fn id_space(self, n: usize) -> usize {
        match self {
            Addressing::Pairs => n,
            Addressing::Search => n + 1,
        }
    }
}

/// An ordered trace of communication requests over `n` nodes (or keys).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandSequence {
    n: usize,
    addressing: Addressing,
    requests: Vec<CommRequest>,
}

impl DemandSequence {
    pub fn new(n: usize, addressing: Addressing, requests: Vec<CommRequest>) -> Result<Self> {
        if n == 0 {
            return Err(crate::error::invalid("node count must be positive"));
        }
        for &req in &requests {
            addressing.check(n, req)?;
        }
        Ok(DemandSequence {
            n,
            addressing,
            requests,
        })
    }

    pub fn pairs<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let requests = pairs
            .into_iter()
            .map(|(s, d)| CommRequest::new(s, d))
            .collect();
        Self::new(n, Addressing::Pairs, requests)
    }

    pub fn searches<I>(n: usize, keys: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let requests = keys
            .into_iter()
            .map(|k| CommRequest::new(ROOT, k))
            .collect();
        Self::new(n, Addressing::Search, requests)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn addressing(&self) -> Addressing {
        self.addressing
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn requests(&self) -> &[CommRequest] {
        &self.requests
    }

    pub fn destinations(&self) -> Vec<usize> {
        self.requests.iter().map(|r| r.dst).collect()
    }

    /// First `m` requests (or all of them when `m` exceeds the length).
    pub fn prefix(&self, m: usize) -> DemandSequence {
        DemandSequence {
            n: self.n,
            addressing: self.addressing,
            requests: self.requests[..m.min(self.len())].to_vec(),
        }
    }

    pub fn concat(&self, other: &DemandSequence) -> Result<DemandSequence> {
        if self.n != other.n || self.addressing != other.addressing {
            return Err(Error::Incompatible(
                "sequences over different node sets".into(),
            ));
        }
        let mut requests = self.requests.clone();
        requests.extend_from_slice(&other.requests);
        Ok(DemandSequence {
            n: self.n,
            addressing: self.addressing,
            requests,
        })
    }

    /// Number of positions where the request differs from its predecessor.
    pub fn change_points(&self) -> usize {
        self.requests.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// The search trace over a complete BST with `n = 2^k - 1` keys that
/// requests the `k` smallest leaves (keys `1, 3, ..., 2k-1`), each `r` times
/// in a row.
pub fn make_tau_workload(k: u32, r: usize) -> Result<DemandSequence> {
    if k < 2 {
        return Err(crate::error::invalid("tau workload needs k >= 2"));
    }
    if k > 30 {
        return Err(crate::error::invalid("tau workload supports k <= 30"));
    }
    if r == 0 {
        return Err(crate::error::invalid("tau workload needs r >= 1"));
    }
    let n = (1usize << k) - 1;
    let keys = (0..k as usize).flat_map(|i| std::iter::repeat_n(2 * i + 1, r));
    DemandSequence::searches(n, keys)
}

/// Aggregates a trace into its demand graph (exact occurrence counts).
pub fn build_demand_graph(seq: &DemandSequence) -> Result<DemandGraph> {
    DemandGraph::from_sequence(seq)
}

/// Grid communication pattern on a `side x side` mesh, both directions of
/// every 4-neighbour adjacency weighted `weight`.
pub fn make_grid_demand(side: usize, weight: u64) -> Result<DemandGraph> {
    if side < 2 {
        return Err(crate::error::invalid("grid side must be >= 2"));
    }
    DemandGraph::grid(side, side, weight)
}

/// Star pattern: hub 0 sends to leaf `i + 1` with weight `weights[i]`.
pub fn make_star_demand(n: usize, weights: &[f64]) -> Result<DemandGraph> {
    if n < 2 {
        return Err(crate::error::invalid("star needs n >= 2"));
    }
    if weights.len() != n - 1 {
        return Err(crate::error::invalid(format!(
            "star over {n} nodes needs {} weights, got {}",
            n - 1,
            weights.len()
        )));
    }
    let mut g = DemandGraph::empty(n);
    for (i, &w) in weights.iter().enumerate() {
        g.add(0, i + 1, w)?;
    }
    Ok(g)
}

/// Draws `m` requests from `gen`.
pub fn sample(gen: &Generator, m: usize) -> Result<DemandSequence> {
    gen.sample(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_small_blocks() {
        let t = make_tau_workload(2, 3).unwrap();
        assert_eq!(t.n(), 3);
        assert_eq!(t.destinations(), vec![1, 1, 1, 3, 3, 3]);
        assert!(t.requests().iter().all(|r| r.src == ROOT));
    }

    #[test]
    fn tau_k4() {
        let t = make_tau_workload(4, 1).unwrap();
        assert_eq!(t.n(), 15);
        assert_eq!(t.destinations(), vec![1, 3, 5, 7]);
    }

    #[test]
    fn tau_k10() {
        let t = make_tau_workload(10, 1000).unwrap();
        assert_eq!(t.len(), 10_000);
        assert_eq!(t.n(), 1023);
        assert_eq!(t.change_points(), 9);
        let mut d = t.destinations();
        d.dedup();
        assert_eq!(d, (0..10).map(|i| 2 * i + 1).collect::<Vec<_>>());
    }

    #[test]
    fn tau_rejects_small_k() {
        assert!(make_tau_workload(1, 5).is_err());
        assert!(make_tau_workload(0, 5).is_err());
    }

    #[test]
    fn request_validation() {
        assert!(DemandSequence::pairs(3, [(0, 0)]).is_err());
        assert!(DemandSequence::pairs(3, [(0, 3)]).is_err());
        assert!(DemandSequence::searches(3, [0]).is_err());
        assert!(DemandSequence::searches(3, [4]).is_err());
        assert!(DemandSequence::searches(3, [3]).is_ok());
    }

    #[test]
    fn single_and_repeated_pairs() {
        let s = DemandSequence::pairs(2, [(0, 1)]).unwrap();
        let g = build_demand_graph(&s).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1), 1.0);

        let s = DemandSequence::pairs(3, [(0, 1), (0, 1), (2, 0)]).unwrap();
        let g = build_demand_graph(&s).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.weight(0, 1), 2.0);
        assert_eq!(g.weight(2, 0), 1.0);
    }

    #[test]
    fn empty_demand_is_rejected() {
        let s = DemandSequence::pairs(3, []).unwrap();
        assert_eq!(build_demand_graph(&s).unwrap_err(), Error::EmptyDemand);
    }

    #[test]
    fn grid_shapes() {
        let g = make_grid_demand(2, 1).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 8);
        let g = make_grid_demand(4, 1).unwrap();
        assert_eq!(g.n(), 16);
        assert_eq!(g.edge_count(), 48);
        let g = make_grid_demand(16, 3).unwrap();
        assert!(g.max_out_degree() <= 4);
        assert!(make_grid_demand(1, 1).is_err());
    }

    #[test]
    fn grid_trace_counts() {
        let g = make_grid_demand(4, 1).unwrap();
        let trace = g.to_trace(1).unwrap();
        let back = build_demand_graph(&trace).unwrap();
        assert_eq!(back.edge_count(), 48);
        assert!(back.edges().all(|(_, _, w)| w == 1.0));
    }

    #[test]
    fn star_shapes() {
        let g = make_star_demand(3, &[1.0, 1.0]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(make_star_demand(3, &[1.0]).is_err());
        assert!(make_star_demand(3, &[1.0, 0.0]).is_err());
    }
}
