use super::Network;
use crate::bst::{build_near_balanced, AccessResult, BstTree};
use crate::demand::CommRequest;
use crate::error::{invalid, Result};

/// Self-adjusting tree network: a BST over node ids (node `v` is key
/// `v + 1`) that moves the two endpoints of each request next to each other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfAdjustingTree {
    tree: BstTree,
}

impl SelfAdjustingTree {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("tree network needs at least two nodes"));
        }
        Ok(SelfAdjustingTree {
            tree: build_near_balanced(n),
        })
    }

    pub fn from_tree(tree: BstTree) -> Self {
        SelfAdjustingTree { tree }
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn tree(&self) -> &BstTree {
        &self.tree
    }

    pub fn network(&self) -> Network {
        Network::from_tree(&self.tree)
    }

    /// Routes `req` along the current tree, then restructures.
    pub fn route_and_adjust(&mut self, req: CommRequest) -> Result<AccessResult> {
        if req.src == req.dst {
            return Err(invalid("source equals destination"));
        }
        self.serve_keys(req.src + 1, req.dst + 1)
    }

    /// Double splay on keys: `u` is splayed into the position of the lowest
    /// common ancestor of `u` and `v`, then `v` is splayed until it is a
    /// child of `u`. Service is the hop count before restructuring.
    pub fn serve_keys(&mut self, u: usize, v: usize) -> Result<AccessResult> {
        if u == v {
            return Err(invalid("source equals destination"));
        }
        let w = self.tree.lca(u, v)?;
        let service_cost = self.tree.distance(u, v)? as u64;
        let above = self.tree.parent(w);
        let mut rotations = self.tree.splay_below(u, above);
        rotations += self.tree.splay_below(v, u);
        debug_assert!(self.tree.is_valid());
        debug_assert!(self.tree.parent(v) == u && self.tree.parent(u) == above);
        Ok(AccessResult {
            service_cost,
            rotations,
        })
    }
}

pub fn build_selfadjusting_tree(n: usize) -> Result<SelfAdjustingTree> {
    SelfAdjustingTree::new(n)
}

pub fn sat_route_and_adjust(net: &mut SelfAdjustingTree, req: CommRequest) -> Result<AccessResult> {
    net.route_and_adjust(req)
}
