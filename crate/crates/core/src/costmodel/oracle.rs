use std::collections::BTreeMap;

use super::{CostLedger, ShapeSpace};
use crate::bst::{build_optimal, BstTree, KeyWeights};
use crate::demand::{Addressing, DemandSequence};
use crate::error::{Error, Result};

/// Largest tree network searched exhaustively by [`stat_oracle`].
pub const STAT_TREE_NETWORK_MAX_N: usize = 8;
/// Largest key count for [`off_oracle`] (Catalan(5) = 42 shapes).
pub const OFF_MAX_N: usize = 5;
/// Longest trace for [`off_oracle`].
pub const OFF_MAX_M: usize = 12;

/// Configuration class a static optimum is chosen from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StaticClass {
    /// BSTs serving root-originated searches.
    Bst,
    /// BST-shaped tree networks serving source-destination pairs.
    TreeNetwork,
}

/// Best fixed configuration for a trace and its total cost on that trace.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticOptimum {
    pub tree: BstTree,
    pub cost: u64,
}

/// Exact optimum over a fixed-configuration class for the empirical demand
/// of `seq`.
pub fn stat_oracle(seq: &DemandSequence, class: StaticClass) -> Result<StaticOptimum> {
    if seq.is_empty() {
        return Err(Error::EmptyDemand);
    }
    match class {
        StaticClass::Bst => {
            let w = KeyWeights::from_sequence(seq)?;
            let tree = build_optimal(&w);
            let depth = tree.depths();
            let cost = seq.requests().iter().map(|r| depth[r.dst] as u64).sum();
            Ok(StaticOptimum { tree, cost })
        }
        StaticClass::TreeNetwork => {
            if seq.addressing() != Addressing::Pairs {
                return Err(Error::Incompatible(
                    "tree-network class serves source-destination pairs".into(),
                ));
            }
            let mut counts: BTreeMap<(usize, usize), f64> = BTreeMap::new();
            for r in seq.requests() {
                *counts.entry((r.src + 1, r.dst + 1)).or_insert(0.0) += 1.0;
            }
            let (tree, cost) = best_tree_network(seq.n(), &counts)?;
            Ok(StaticOptimum {
                tree,
                cost: cost.round() as u64,
            })
        }
    }
}

/// Exhaustive search over all BST-shaped tree networks on keys `1..=n`
/// minimising `sum w(u, v) * hops(u, v)`. Ties keep the first shape found.
pub fn best_tree_network(n: usize, weights: &BTreeMap<(usize, usize), f64>) -> Result<(BstTree, f64)> {
    if n > STAT_TREE_NETWORK_MAX_N {
        return Err(Error::LimitExceeded(format!(
            "tree-network static oracle supports n <= {STAT_TREE_NETWORK_MAX_N}, got {n}"
        )));
    }
    let space = ShapeSpace::enumerate(n);
    let mut best: Option<(usize, f64)> = None;
    for (i, t) in space.trees().iter().enumerate() {
        let mut c = 0.0;
        for (&(u, v), &w) in weights {
            c += w * t.distance(u, v)? as f64;
        }
        if best.is_none_or(|(_, b)| c < b) {
            best = Some((i, c));
        }
    }
    let (i, c) = best.expect("at least one shape");
    Ok((space.tree(i).clone(), c))
}

/// Optimal offline reconfiguration schedule.
#[derive(Debug, Clone)]
pub struct OfflineSchedule {
    /// Minimum total of service plus rotation-distance adjustment.
    pub cost: u64,
    /// Tree serving each request, as indices into `space`.
    pub shapes: Vec<usize>,
    /// Per-request charges; the adjustment of request `i` is the rotation
    /// distance to the tree serving request `i + 1`.
    pub ledger: CostLedger,
    pub space: ShapeSpace,
}

/// Exact offline optimum for a search trace over at most [`OFF_MAX_N`] keys
/// and [`OFF_MAX_M`] requests.
///
/// Request `i` is served on tree `T_i` at its search depth, then the tree may
/// change to `T_{i+1}` at rotation-distance cost. With `start` given, `T_0`
/// is fixed to it; otherwise the schedule may pick `T_0` freely.
/// Dynamic programming over (time, shape).
pub fn off_oracle(seq: &DemandSequence, start: Option<&BstTree>) -> Result<OfflineSchedule> {
    let (space, service, dist) = off_tables(seq, start)?;
    let k = space.len();
    let m = seq.len();
    let start_idx = start.map(|t| space.index_of(t).expect("start tree enumerated"));
    let inf = u64::MAX;
    let mut cost = vec![vec![inf; k]; m];
    let mut back = vec![vec![usize::MAX; k]; m];
    for t in 0..k {
        if start_idx.is_none_or(|s| s == t) {
            cost[0][t] = service[0][t];
        }
    }
    for i in 1..m {
        for t in 0..k {
            let mut best = inf;
            let mut arg = usize::MAX;
            for p in 0..k {
                if cost[i - 1][p] == inf {
                    continue;
                }
                let c = cost[i - 1][p] + dist[p][t] as u64;
                if c < best {
                    best = c;
                    arg = p;
                }
            }
            cost[i][t] = best + service[i][t];
            back[i][t] = arg;
        }
    }
    let (mut t, &total) = cost[m - 1]
        .iter()
        .enumerate()
        .min_by_key(|&(i, &c)| (c, i))
        .expect("nonempty");
    let mut shapes = vec![0; m];
    for i in (0..m).rev() {
        shapes[i] = t;
        if i > 0 {
            t = back[i][t];
        }
    }
    let mut ledger = CostLedger::with_capacity(m);
    for i in 0..m {
        let adjust = if i + 1 < m {
            dist[shapes[i]][shapes[i + 1]] as u64
        } else {
            0
        };
        ledger.push(service[i][shapes[i]], adjust);
    }
    debug_assert_eq!(ledger.total(), total);
    Ok(OfflineSchedule {
        cost: total,
        shapes,
        ledger,
        space,
    })
}

type OffTables = (ShapeSpace, Vec<Vec<u64>>, Vec<Vec<u32>>);

/// Shape space, per-request service cost on every shape, rotation distances.
pub(crate) fn off_tables(seq: &DemandSequence, start: Option<&BstTree>) -> Result<OffTables> {
    if seq.is_empty() {
        return Err(Error::EmptyDemand);
    }
    if seq.addressing() != Addressing::Search {
        return Err(Error::Incompatible(
            "offline oracle is defined for BST search traces".into(),
        ));
    }
    if seq.n() > OFF_MAX_N || seq.len() > OFF_MAX_M {
        return Err(Error::LimitExceeded(format!(
            "offline oracle supports n <= {OFF_MAX_N} and m <= {OFF_MAX_M}, got n = {}, m = {}",
            seq.n(),
            seq.len()
        )));
    }
    if let Some(t) = start {
        if t.n() != seq.n() {
            return Err(Error::Incompatible("start tree size differs from trace".into()));
        }
    }
    let space = ShapeSpace::enumerate(seq.n());
    let depths: Vec<Vec<usize>> = space.trees().iter().map(BstTree::depths).collect();
    let service = seq
        .requests()
        .iter()
        .map(|r| depths.iter().map(|d| d[r.dst] as u64).collect())
        .collect();
    let dist = space.rotation_distances();
    Ok((space, service, dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bst::{build_balanced, serve_sequence, Policy};
    use crate::demand::make_tau_workload;

    #[test]
    fn single_request_takes_best_shape() {
        let s = DemandSequence::searches(4, [3]).unwrap();
        let off = off_oracle(&s, None).unwrap();
        assert_eq!(off.cost, 1);
        assert_eq!(off.ledger.adjust_total(), 0);
    }

    #[test]
    fn hand_dp_on_three_keys() {
        // Stay: 4 * 2 = 8. Rotate 1 up after the first access: 2 + 1 + 3 * 1 = 6.
        let s = DemandSequence::searches(3, [1, 1, 1, 1]).unwrap();
        let start = build_balanced(3).unwrap();
        let off = off_oracle(&s, Some(&start)).unwrap();
        assert_eq!(off.cost, 6);
        assert_eq!(off.ledger.charges()[0].adjust, 1);
        assert_eq!(off.space.tree(off.shapes[3]).root(), 1);
    }

    #[test]
    fn offline_beats_splay() {
        let s = DemandSequence::searches(5, [5, 1, 4, 2, 3, 5, 5, 1, 2, 4, 3, 1]).unwrap();
        let start = crate::bst::build_near_balanced(5);
        let off = off_oracle(&s, Some(&start)).unwrap();
        let mut t = start.clone();
        let on = serve_sequence(&mut t, Policy::Splay, &s.destinations()).unwrap();
        assert!(off.cost <= on.total());
        let mut fixed = start;
        let obl = serve_sequence(&mut fixed, Policy::Fixed, &s.destinations()).unwrap();
        assert!(off.cost <= obl.total());
    }

    #[test]
    fn limits() {
        let long = DemandSequence::searches(3, vec![1; 13]).unwrap();
        assert!(matches!(off_oracle(&long, None), Err(Error::LimitExceeded(_))));
        let wide = DemandSequence::searches(6, [1]).unwrap();
        assert!(matches!(off_oracle(&wide, None), Err(Error::LimitExceeded(_))));
        let pairs = DemandSequence::pairs(9, [(0, 1)]).unwrap();
        assert!(matches!(
            stat_oracle(&pairs, StaticClass::TreeNetwork),
            Err(Error::LimitExceeded(_))
        ));
        assert!(matches!(
            stat_oracle(&pairs, StaticClass::Bst),
            Err(Error::Incompatible(_))
        ));
    }

    #[test]
    fn static_bst_examples() {
        let s = DemandSequence::searches(7, vec![5; 20]).unwrap();
        let opt = stat_oracle(&s, StaticClass::Bst).unwrap();
        assert_eq!(opt.tree.root(), 5);
        assert_eq!(opt.cost, 20);

        let u = DemandSequence::searches(7, 1..=7).unwrap();
        let opt = stat_oracle(&u, StaticClass::Bst).unwrap();
        assert_eq!(opt.cost, 17);

        let tau = make_tau_workload(3, 4).unwrap();
        let opt = stat_oracle(&tau, StaticClass::Bst).unwrap();
        let w = KeyWeights::from_sequence(&tau).unwrap();
        assert_eq!(opt.cost as f64, build_optimal(&w).expected_cost(&w).unwrap() * 12.0);
    }

    #[test]
    fn static_tree_network_single_pair() {
        let s = DemandSequence::pairs(5, vec![(0, 4); 7]).unwrap();
        let opt = stat_oracle(&s, StaticClass::TreeNetwork).unwrap();
        assert_eq!(opt.cost, 7);
        assert_eq!(opt.tree.distance(1, 5).unwrap(), 1);
    }
}
