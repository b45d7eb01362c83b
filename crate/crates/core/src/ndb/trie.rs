//! Ternary prefix tree over fixed-length `{0, 1, *}` patterns.
//!
//! Children are ordered `0, 1, *`, so a depth-first walk yields patterns in
//! their canonical order. Removal only decrements the live counters along a
//! path; dead nodes are skipped by searches and dropped by [`PatternTrie::compacted`].

use crate::bits::{BinaryTemplate, Symbol, TriPattern};

const NONE: u32 = 0;
const SYMBOLS: [Symbol; 3] = [Symbol::Zero, Symbol::One, Symbol::Wild];

#[derive(Clone, Copy, Debug, Default)]
struct Node {
    child: [u32; 3],
    /// Number of stored patterns in this subtree.
    live: u32,
}

#[derive(Clone, Debug)]
pub(crate) struct PatternTrie {
    depth: usize,
    nodes: Vec<Node>,
}

impl PatternTrie {
    pub fn new(depth: usize) -> Self {
        PatternTrie {
            depth,
            nodes: vec![Node::default()],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes[0].live as usize
    }

    fn leaf(&self, p: &TriPattern) -> Option<usize> {
        let mut node = 0usize;
        for s in p.symbols() {
            let next = self.nodes[node].child[s.index()];
            if next == NONE {
                return None;
            }
            node = next as usize;
        }
        Some(node)
    }

    pub fn contains(&self, p: &TriPattern) -> bool {
        self.leaf(p).is_some_and(|n| self.nodes[n].live > 0)
    }

    /// Returns false if the pattern was already present.
    pub fn insert(&mut self, p: &TriPattern) -> bool {
        debug_assert_eq!(p.len(), self.depth);
        if self.contains(p) {
            return false;
        }
        let mut node = 0usize;
        self.nodes[0].live += 1;
        for s in p.symbols() {
            let next = self.nodes[node].child[s.index()];
            node = if next == NONE {
                let id = self.nodes.len();
                self.nodes.push(Node::default());
                self.nodes[node].child[s.index()] = id as u32;
                id
            } else {
                next as usize
            };
            self.nodes[node].live += 1;
        }
        true
    }

    /// Returns false if the pattern was absent.
    pub fn remove(&mut self, p: &TriPattern) -> bool {
        if !self.contains(p) {
            return false;
        }
        let mut node = 0usize;
        self.nodes[0].live -= 1;
        for s in p.symbols() {
            node = self.nodes[node].child[s.index()] as usize;
            self.nodes[node].live -= 1;
        }
        true
    }

    #[inline]
    fn live_child(&self, node: usize, s: Symbol) -> Option<usize> {
        let c = self.nodes[node].child[s.index()];
        (c != NONE && self.nodes[c as usize].live > 0).then_some(c as usize)
    }

    /// True iff some stored pattern matches `x`.
    pub fn any_match(&self, x: &BinaryTemplate) -> bool {
        if self.len() == 0 {
            return false;
        }
        let mut stack = vec![(0usize, 0usize)];
        while let Some((node, depth)) = stack.pop() {
            if depth == self.depth {
                return true;
            }
            let bit = Symbol::from_bit(x.get(depth));
            if let Some(c) = self.live_child(node, Symbol::Wild) {
                stack.push((c, depth + 1));
            }
            if let Some(c) = self.live_child(node, bit) {
                stack.push((c, depth + 1));
            }
        }
        false
    }

    /// All stored patterns matching `x`, in canonical order.
    pub fn matching(&self, x: &BinaryTemplate) -> Vec<TriPattern> {
        let mut out = Vec::new();
        let mut path = TriPattern::wildcards(self.depth);
        self.walk(0, 0, &mut path, &mut out, &|d, s| {
            s == Symbol::Wild || s == Symbol::from_bit(x.get(d))
        });
        out
    }

    /// All stored patterns whose cover contains the cover of `q`.
    pub fn generalizations(&self, q: &TriPattern) -> Vec<TriPattern> {
        let mut out = Vec::new();
        let mut path = TriPattern::wildcards(self.depth);
        self.walk(0, 0, &mut path, &mut out, &|d, s| {
            s == Symbol::Wild || s == q.get(d)
        });
        out
    }

    pub fn patterns(&self) -> Vec<TriPattern> {
        let mut out = Vec::with_capacity(self.len());
        let mut path = TriPattern::wildcards(self.depth);
        self.walk(0, 0, &mut path, &mut out, &|_, _| true);
        out
    }

    fn walk(
        &self,
        node: usize,
        depth: usize,
        path: &mut TriPattern,
        out: &mut Vec<TriPattern>,
        admit: &dyn Fn(usize, Symbol) -> bool,
    ) {
        if depth == self.depth {
            out.push(path.clone());
            return;
        }
        for s in SYMBOLS {
            if !admit(depth, s) {
                continue;
            }
            if let Some(c) = self.live_child(node, s) {
                path.set(depth, s);
                self.walk(c, depth + 1, path, out, admit);
            }
        }
        path.set(depth, Symbol::Wild);
    }

    /// A copy without dead nodes.
    pub fn compacted(&self) -> Self {
        let mut t = PatternTrie::new(self.depth);
        for p in self.patterns() {
            t.insert(&p);
        }
        t
    }

    #[cfg(test)]
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}
