use std::collections::{HashMap, VecDeque};

use crate::bst::{build_near_balanced, BstTree};

/// Every BST shape over keys `1..=n`, discovered by breadth-first search of
/// the rotation graph from the midpoint tree.
#[derive(Debug, Clone)]
pub struct ShapeSpace {
    trees: Vec<BstTree>,
    index: HashMap<Vec<u16>, usize>,
    neighbors: Vec<Vec<usize>>,
}

impl ShapeSpace {
    pub fn enumerate(n: usize) -> ShapeSpace {
        let start = build_near_balanced(n);
        let mut trees = vec![start.clone()];
        let mut index = HashMap::from([(start.shape_code(), 0)]);
        let mut neighbors = Vec::new();
        let mut i = 0;
        while i < trees.len() {
            let mut adj = Vec::with_capacity(n);
            for k in 1..=n {
                let mut t = trees[i].clone();
                if !t.rotate_up(k) {
                    continue;
                }
                let code = t.shape_code();
                let j = *index.entry(code).or_insert_with(|| {
                    trees.push(t);
                    trees.len() - 1
                });
                adj.push(j);
            }
            neighbors.push(adj);
            i += 1;
        }
        ShapeSpace {
            trees,
            index,
            neighbors,
        }
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn tree(&self, i: usize) -> &BstTree {
        &self.trees[i]
    }

    pub fn trees(&self) -> &[BstTree] {
        &self.trees
    }

    pub fn index_of(&self, tree: &BstTree) -> Option<usize> {
        self.index.get(&tree.shape_code()).copied()
    }

    /// Shapes reachable by one rotation.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Rotation distance between every pair of shapes.
    pub fn rotation_distances(&self) -> Vec<Vec<u32>> {
        (0..self.len())
            .map(|s| {
                let mut d = vec![u32::MAX; self.len()];
                let mut q = VecDeque::from([s]);
                d[s] = 0;
                while let Some(u) = q.pop_front() {
                    for &v in &self.neighbors[u] {
                        if d[v] == u32::MAX {
                            d[v] = d[u] + 1;
                            q.push_back(v);
                        }
                    }
                }
                d
            })
            .collect()
    }
}
