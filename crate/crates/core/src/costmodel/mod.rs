//! Cost accounting for demand-oblivious, static demand-aware and
//! self-adjusting algorithms, exact small-instance optima, and optimality
//! ratios between them.

mod ledger;
mod oracle;
mod ratio;
mod shapes;

pub use ledger::{Charge, CostLedger};
pub use oracle::{
    best_tree_network, off_oracle, stat_oracle, OfflineSchedule, StaticClass, StaticOptimum,
    OFF_MAX_M, OFF_MAX_N, STAT_TREE_NETWORK_MAX_N,
};
pub use ratio::{evaluate_learning, evaluate_ratio, InstanceRatio, RatioKind, RatioReport, LEARNING_MIN_SEEDS};
pub use shapes::ShapeSpace;

use std::collections::{BTreeMap, HashMap};

use crate::bst::{build_optimal, serve_sequence, BstTree, KeyWeights, Policy};
use crate::demand::{Addressing, DemandGraph, DemandSequence, Generator};
use crate::error::{Error, Result};
use crate::topo::{build_ego_tree_network, Network, SelfAdjustingTree};

/// Algorithm classes of the taxonomy.
#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    /// OBL: serve on the initial topology, never reconfigure.
    Oblivious,
    /// STAT: best fixed topology for the whole trace, chosen in hindsight.
    Static,
    /// GEN: best fixed topology for the known parameters of a generator.
    Generator(Generator),
    /// ON: online self-adjustment (splay tree, double-splay tree network).
    Online,
    /// OFF: exact offline reconfiguration schedule (small BSTs only).
    Offline,
}

impl Algorithm {
    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::Oblivious => "OBL",
            Algorithm::Static => "STAT",
            Algorithm::Generator(_) => "GEN",
            Algorithm::Online => "ON",
            Algorithm::Offline => "OFF",
        }
    }
}

/// Initial configuration `N_0` an algorithm starts from.
#[derive(Debug, Clone, PartialEq)]
pub enum Topology {
    /// BST serving root-originated searches.
    Bst(BstTree),
    /// BST-shaped tree network over node ids (node `v` is key `v + 1`).
    TreeNetwork(BstTree),
    /// General network with shortest-path routing.
    Graph(Network),
}

impl Topology {
    fn class(&self) -> &'static str {
        match self {
            Topology::Bst(_) => "bst",
            Topology::TreeNetwork(_) => "tree-network",
            Topology::Graph(_) => "graph",
        }
    }

    fn size(&self) -> usize {
        match self {
            Topology::Bst(t) | Topology::TreeNetwork(t) => t.n(),
            Topology::Graph(g) => g.n(),
        }
    }
}

fn incompatible(alg: &Algorithm, n0: &Topology) -> Error {
    Error::Incompatible(format!("{} cannot run on a {} topology", alg.label(), n0.class()))
}

/// Serves `seq` with `alg` starting from `n0`, one ledger entry per request.
pub fn run_algorithm(alg: &Algorithm, n0: &Topology, seq: &DemandSequence) -> Result<CostLedger> {
    if seq.is_empty() {
        return Err(Error::EmptyDemand);
    }
    let wants = match n0 {
        Topology::Bst(_) => Addressing::Search,
        _ => Addressing::Pairs,
    };
    if seq.addressing() != wants {
        return Err(Error::Incompatible(format!(
            "{:?} trace on a {} topology",
            seq.addressing(),
            n0.class()
        )));
    }
    if seq.n() != n0.size() {
        return Err(Error::Incompatible(format!(
            "trace over {} nodes, topology over {}",
            seq.n(),
            n0.size()
        )));
    }
    match (alg, n0) {
        (Algorithm::Oblivious, Topology::Bst(t)) => {
            serve_sequence(&mut t.clone(), Policy::Fixed, &seq.destinations())
        }
        (Algorithm::Static, Topology::Bst(_)) => {
            let opt = stat_oracle(seq, StaticClass::Bst)?;
            serve_sequence(&mut opt.tree.clone(), Policy::Fixed, &seq.destinations())
        }
        (Algorithm::Generator(g), Topology::Bst(_)) => {
            check_generator(g, seq)?;
            let mut t = build_optimal(&KeyWeights::from_generator(g)?);
            serve_sequence(&mut t, Policy::Fixed, &seq.destinations())
        }
        (Algorithm::Online, Topology::Bst(t)) => {
            serve_sequence(&mut t.clone(), Policy::Splay, &seq.destinations())
        }
        (Algorithm::Offline, Topology::Bst(t)) => Ok(off_oracle(seq, Some(t))?.ledger),

        (Algorithm::Oblivious, Topology::TreeNetwork(t)) => serve_fixed_tree(t, seq),
        (Algorithm::Static, Topology::TreeNetwork(_)) => {
            let opt = stat_oracle(seq, StaticClass::TreeNetwork)?;
            serve_fixed_tree(&opt.tree, seq)
        }
        (Algorithm::Generator(g), Topology::TreeNetwork(_)) => {
            check_generator(g, seq)?;
            let weights: BTreeMap<(usize, usize), f64> = g
                .request_distribution()
                .into_iter()
                .map(|(r, p)| ((r.src + 1, r.dst + 1), p))
                .collect();
            let (tree, _) = best_tree_network(g.n(), &weights)?;
            serve_fixed_tree(&tree, seq)
        }
        (Algorithm::Online, Topology::TreeNetwork(t)) => {
            let mut net = SelfAdjustingTree::from_tree(t.clone());
            let mut ledger = CostLedger::with_capacity(seq.len());
            for &r in seq.requests() {
                let a = net.route_and_adjust(r)?;
                ledger.push(a.service_cost, a.rotations);
            }
            Ok(ledger)
        }

        (Algorithm::Oblivious, Topology::Graph(net)) => serve_fixed_graph(net, seq),
        (Algorithm::Static, Topology::Graph(_)) => {
            let ego = build_ego_tree_network(&DemandGraph::from_sequence(seq)?, None)?;
            serve_fixed_graph(&ego.network, seq)
        }

        (alg, n0) => Err(incompatible(alg, n0)),
    }
}

fn check_generator(g: &Generator, seq: &DemandSequence) -> Result<()> {
    if g.n() != seq.n() || g.addressing() != seq.addressing() {
        return Err(Error::Incompatible("generator and trace disagree on node set".into()));
    }
    Ok(())
}

fn serve_fixed_tree(t: &BstTree, seq: &DemandSequence) -> Result<CostLedger> {
    let mut ledger = CostLedger::with_capacity(seq.len());
    for r in seq.requests() {
        ledger.push(t.distance(r.src + 1, r.dst + 1)? as u64, 0);
    }
    Ok(ledger)
}

fn serve_fixed_graph(net: &Network, seq: &DemandSequence) -> Result<CostLedger> {
    let mut cache: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut ledger = CostLedger::with_capacity(seq.len());
    for r in seq.requests() {
        let dist = cache.entry(r.src).or_insert_with(|| net.bfs(r.src));
        let d = dist[r.dst];
        if d == usize::MAX {
            return Err(Error::Disconnected {
                src: r.src,
                dst: r.dst,
            });
        }
        ledger.push(d as u64, 0);
    }
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bst::{build_balanced, build_near_balanced};
    use crate::demand::{make_tau_workload, CommRequest};
    use crate::topo::build_random_regular;

    #[test]
    fn tau_on_each_bst_class() {
        let tau = make_tau_workload(10, 1000).unwrap();
        let n0 = Topology::Bst(build_balanced(1023).unwrap());
        let obl = run_algorithm(&Algorithm::Oblivious, &n0, &tau).unwrap();
        assert_eq!(obl.average(), 10.0);
        let stat = run_algorithm(&Algorithm::Static, &n0, &tau).unwrap();
        assert!(stat.average() <= 10f64.log2() + 2.0);
        assert_eq!(stat.adjust_total(), 0);
        let on = run_algorithm(&Algorithm::Online, &n0, &tau).unwrap();
        assert!(on.average() <= 4.0);
    }

    #[test]
    fn single_request_average() {
        let s = DemandSequence::searches(7, [1]).unwrap();
        let n0 = Topology::Bst(build_balanced(7).unwrap());
        let on = run_algorithm(&Algorithm::Online, &n0, &s).unwrap();
        assert_eq!(on.average(), 3.0 + 2.0);
        let obl = run_algorithm(&Algorithm::Oblivious, &n0, &s).unwrap();
        assert_eq!(obl.average(), 3.0);
    }

    #[test]
    fn incompatible_pairings() {
        let pairs = DemandSequence::pairs(8, [(0, 1)]).unwrap();
        let net = Topology::Graph(build_random_regular(8, 3, 1).unwrap());
        assert!(matches!(
            run_algorithm(&Algorithm::Online, &net, &pairs),
            Err(Error::Incompatible(_))
        ));
        assert!(matches!(
            run_algorithm(&Algorithm::Offline, &net, &pairs),
            Err(Error::Incompatible(_))
        ));
        let bst = Topology::Bst(build_near_balanced(8));
        assert!(matches!(
            run_algorithm(&Algorithm::Oblivious, &bst, &pairs),
            Err(Error::Incompatible(_))
        ));
    }

    #[test]
    fn tree_network_classes() {
        let s = DemandSequence::pairs(6, [(0, 5), (0, 5), (2, 3), (0, 5)]).unwrap();
        let n0 = Topology::TreeNetwork(build_near_balanced(6));
        let obl = run_algorithm(&Algorithm::Oblivious, &n0, &s).unwrap();
        let stat = run_algorithm(&Algorithm::Static, &n0, &s).unwrap();
        let on = run_algorithm(&Algorithm::Online, &n0, &s).unwrap();
        assert!(stat.total() <= obl.total());
        assert_eq!(stat.total(), stat_oracle(&s, StaticClass::TreeNetwork).unwrap().cost);
        assert_eq!(on.charges()[1], Charge { service: 1, adjust: 0 });
    }

    #[test]
    fn graph_static_uses_demand_aware_network() {
        let g = crate::demand::make_grid_demand(8, 1).unwrap();
        let s = g.to_trace(2).unwrap();
        let net = Topology::Graph(build_random_regular(64, 3, 4).unwrap());
        let obl = run_algorithm(&Algorithm::Oblivious, &net, &s).unwrap();
        let stat = run_algorithm(&Algorithm::Static, &net, &s).unwrap();
        assert!(stat.average() < obl.average());
    }

    #[test]
    fn generator_baseline() {
        let g = Generator::iid(
            4,
            Addressing::Search,
            vec![CommRequest::new(0, 4)],
            vec![1.0],
            0,
        )
        .unwrap();
        let s = g.sample(10).unwrap();
        let n0 = Topology::Bst(build_near_balanced(4));
        let gen = run_algorithm(&Algorithm::Generator(g), &n0, &s).unwrap();
        assert_eq!(gen.total(), 10);
    }
}
