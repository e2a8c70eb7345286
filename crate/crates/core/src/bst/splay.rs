use super::{BstTree, NIL};
use crate::costmodel::CostLedger;
use crate::error::{Error, Result};

/// Charges of one access: `service_cost` counts the nodes on the search
/// path, `rotations` the single rotations performed afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AccessResult {
    pub service_cost: u64,
    pub rotations: u64,
}

/// Whether a tree stays fixed or splays each accessed key to the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    Fixed,
    Splay,
}

/// Searches `key`, then splays it to the root.
pub fn splay_access(tree: &mut BstTree, key: usize) -> Result<AccessResult> {
    let service_cost = tree.depth(key)? as u64;
    let rotations = tree.splay_below(key, NIL);
    debug_assert!(tree.is_valid());
    Ok(AccessResult {
        service_cost,
        rotations,
    })
}

/// Serves a list of searched keys on `tree`, recording one ledger entry per
/// request. Under [`Policy::Fixed`] the tree is never modified.
pub fn serve_sequence(tree: &mut BstTree, policy: Policy, keys: &[usize]) -> Result<CostLedger> {
    if let Some(&k) = keys.iter().find(|&&k| !tree.contains(k)) {
        return Err(Error::KeyAbsent(k));
    }
    let mut ledger = CostLedger::with_capacity(keys.len());
    match policy {
        Policy::Fixed => {
            let depth = tree.depths();
            for &k in keys {
                ledger.push(depth[k] as u64, 0);
            }
        }
        Policy::Splay => {
            for &k in keys {
                let a = splay_access(tree, k)?;
                ledger.push(a.service_cost, a.rotations);
            }
        }
    }
    Ok(ledger)
}
