//! Reference implementation of finite derivation that never reads rank tags.
//!
//! A point survives `k` prunings iff it is a leaf (`k = 0`) or infinitely
//! many children around it still contain points after `k − 1` prunings.
//! "Infinitely many" is decided on a window of far-out children: with the
//! construction's cofinal rank layout, children beyond index
//! [`WINDOW_START`] are representative of the tail.

use std::collections::HashMap;

use rug::Rational;

use super::{Node, RankTree};

pub const WINDOW_START: usize = 64;
const WINDOW_LEN: usize = 3;

#[derive(Default)]
pub struct PruningOracle {
    memo: HashMap<(Node, usize), bool>,
}

impl PruningOracle {
    pub fn new() -> Self {
        Self::default()
    }

    /// Whether the anchor of `node` is a point of the `k`-th derived set.
    pub fn anchor_survives(&mut self, node: &Node, k: usize) -> bool {
        if k == 0 {
            return matches!(node, Node::Leaf(_));
        }
        if matches!(node, Node::Leaf(_)) {
            return false;
        }
        if let Some(&v) = self.memo.get(&(node.clone(), k)) {
            return v;
        }
        let window: Vec<Node> = node
            .children()
            .skip(WINDOW_START)
            .take(WINDOW_LEN)
            .map(|(_, c)| c)
            .collect();
        let v = window.iter().all(|c| self.meets(c, k - 1));
        self.memo.insert((node.clone(), k), v);
        v
    }

    /// Whether the subtree of `node` still has points after `k` prunings.
    pub fn meets(&mut self, node: &Node, k: usize) -> bool {
        k == 0 || self.anchor_survives(node, k) || self.child_meets(node, k)
    }

    fn child_meets(&mut self, node: &Node, k: usize) -> bool {
        // only the first child can carry points without the anchor surviving
        // when every child looks alike; the window covers the rest
        let first: Vec<Node> = node.children().take(1).map(|(_, c)| c).collect();
        first.iter().any(|c| self.meets(c, k))
    }

    /// Points of the `k`-th derived set of the (uncut) tree, expanded like
    /// [`RankTree::materialize`].
    pub fn pruned_points(&mut self, tree: &RankTree, k: usize, depth: usize, per_level: usize) -> Vec<Rational> {
        let mut out = Vec::new();
        for (node, cut) in tree.nodes() {
            let base = cut.as_finite().expect("oracle needs finite cuts") as usize;
            self.expand(node, base + k, depth, per_level, &mut out);
        }
        out.sort();
        out.dedup();
        out
    }

    fn expand(&mut self, node: &Node, k: usize, depth: usize, per_level: usize, out: &mut Vec<Rational>) {
        if let Node::Leaf(a) = node {
            if k == 0 {
                out.push(a.clone());
            }
            return;
        }
        if k > 0 {
            if !self.anchor_survives(node, k) {
                return;
            }
            out.push(node.anchor().clone());
            if !self.anchor_survives(node, k + 1) {
                return;
            }
        }
        if depth == 0 {
            return;
        }
        let mut taken = 0;
        for (_, child) in node.children() {
            if taken == per_level {
                break;
            }
            if self.meets(&child, k) {
                taken += 1;
                self.expand(&child, k, depth - 1, per_level, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::Ordinal;
    use crate::pointset::{build_rank_set, Arc};

    #[test]
    fn agrees_on_small_ranks() {
        let host = Arc::new(Rational::from((1, 8)), Rational::from((1, 32))).unwrap();
        let mut oracle = PruningOracle::new();
        for (a, nu) in [("2", 1), ("3", 2), ("w", 1), ("w+1", 1)] {
            let alpha: Ordinal = a.parse().unwrap();
            let e = build_rank_set(&alpha, nu, &host).unwrap();
            for k in 0..4 {
                let sym = e.derive(&Ordinal::finite(k as u64)).materialize(2, 3);
                assert_eq!(oracle.pruned_points(&e, k, 2, 3), sym, "alpha {a} nu {nu} k {k}");
            }
        }
    }
}
