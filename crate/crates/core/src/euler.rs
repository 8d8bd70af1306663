//! Preorder intervals of a tree: after deleting a few vertices, the survivors
//! split into few contiguous runs of the preorder, each inside one subtree.

use crate::tree::Tree;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EulerError {
    #[error("vertex {0} is not on the tree")]
    NotInTree(usize),
    #[error("vertex {0} has failed")]
    Failed(usize),
}

const NONE: u32 = u32::MAX;

/// Preorder of a tree rooted at its smallest vertex, children by ascending id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerTourIndex {
    vertices: Vec<usize>,
    order: Vec<usize>,
    pos: Vec<u32>,
    last: Vec<u32>,
    parent: Vec<u32>,
    depth: Vec<u32>,
    children: Vec<Vec<u32>>,
    is_terminal: Vec<bool>,
    /// `term_prefix[i]` = terminals among `order[..i]`.
    term_prefix: Vec<u32>,
}

/// Inclusive run `[lo, hi]` of positions with the root of its surviving subtree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lo: u32,
    pub hi: u32,
    pub label: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet {
    pub intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Interval holding position `p`, by binary search.
    pub fn find(&self, p: u32) -> Option<usize> {
        let k = self.intervals.partition_point(|iv| iv.lo <= p);
        (k > 0 && self.intervals[k - 1].hi >= p).then(|| k - 1)
    }

    pub fn label_count(&self) -> usize {
        let mut labels: Vec<usize> = self.intervals.iter().map(|iv| iv.label).collect();
        labels.sort_unstable();
        labels.dedup();
        labels.len()
    }
}

/// Index with every vertex counted as a terminal.
pub fn preprocess_tree(tree: &Tree) -> EulerTourIndex {
    EulerTourIndex::new(tree, &tree.vertices)
}

impl EulerTourIndex {
    pub fn new(tree: &Tree, terminals: &[usize]) -> Self {
        let vertices = tree.vertices.clone();
        let k = vertices.len();
        let local = |v: usize| vertices.binary_search(&v).unwrap();
        let mut children: Vec<Vec<u32>> = vec![Vec::new(); k];
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); k];
        for &(a, b) in &tree.edges {
            let (x, y) = (local(a), local(b));
            adj[x].push(y as u32);
            adj[y].push(x as u32);
        }
        let mut order = Vec::with_capacity(k);
        let mut pos = vec![0u32; k];
        let mut last = vec![0u32; k];
        let mut parent = vec![NONE; k];
        let mut depth = vec![0u32; k];
        if k > 0 {
            for list in &mut adj {
                list.sort_unstable();
            }
            // (vertex, next neighbour index)
            let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
            pos[0] = 0;
            order.push(vertices[0]);
            while let Some(&mut (x, ref mut i)) = stack.last_mut() {
                let xs = x as usize;
                if *i < adj[xs].len() {
                    let y = adj[xs][*i];
                    *i += 1;
                    if y == parent[xs] {
                        continue;
                    }
                    let ys = y as usize;
                    parent[ys] = x;
                    depth[ys] = depth[xs] + 1;
                    children[xs].push(y);
                    pos[ys] = order.len() as u32;
                    order.push(vertices[ys]);
                    stack.push((y, 0));
                } else {
                    last[xs] = order.len() as u32 - 1;
                    stack.pop();
                }
            }
        }
        let mut is_terminal = vec![false; k];
        for &t in terminals {
            if let Ok(i) = vertices.binary_search(&t) {
                is_terminal[i] = true;
            }
        }
        let mut term_prefix = vec![0u32; k + 1];
        for (p, &v) in order.iter().enumerate() {
            term_prefix[p + 1] = term_prefix[p] + is_terminal[local(v)] as u32;
        }
        EulerTourIndex {
            vertices,
            order,
            pos,
            last,
            parent,
            depth,
            children,
            is_terminal,
            term_prefix,
        }
    }

    fn local(&self, v: usize) -> Result<usize, EulerError> {
        self.vertices
            .binary_search(&v)
            .map_err(|_| EulerError::NotInTree(v))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Vertices in preorder.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, v: usize) -> Result<u32, EulerError> {
        Ok(self.pos[self.local(v)?])
    }

    /// Last preorder position inside the subtree of `v`.
    pub fn subtree_end(&self, v: usize) -> Result<u32, EulerError> {
        Ok(self.last[self.local(v)?])
    }

    pub fn parent(&self, v: usize) -> Result<Option<usize>, EulerError> {
        let p = self.parent[self.local(v)?];
        Ok((p != NONE).then(|| self.vertices[p as usize]))
    }

    pub fn depth(&self, v: usize) -> Result<u32, EulerError> {
        Ok(self.depth[self.local(v)?])
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertices.len())
            .map(|i| self.children[i].len() + (self.parent[i] != NONE) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn terminal_count(&self) -> usize {
        self.term_prefix[self.order.len()] as usize
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.local(v).map(|i| self.is_terminal[i]).unwrap_or(false)
    }

    /// Terminals in preorder.
    pub fn terminal_order(&self) -> Vec<usize> {
        self.order
            .iter()
            .copied()
            .filter(|&v| self.is_terminal(v))
            .collect()
    }

    /// Position of terminal `v` within [`Self::terminal_order`].
    pub fn terminal_rank(&self, v: usize) -> Option<u32> {
        let i = self.local(v).ok()?;
        self.is_terminal[i].then(|| self.term_prefix[self.pos[i] as usize])
    }

    /// Runs of preorder positions left after deleting `failed`, each labelled
    /// by the root of its surviving subtree.
    pub fn intervals_after_failures(&self, failed: &[usize]) -> Result<IntervalSet, EulerError> {
        let k = self.order.len();
        let mut f: Vec<usize> = failed
            .iter()
            .map(|&v| self.local(v))
            .collect::<Result<_, _>>()?;
        f.sort_unstable_by_key(|&x| self.pos[x]);
        f.dedup();
        if k == 0 {
            return Ok(IntervalSet::default());
        }
        let mut cuts: Vec<u32> = Vec::with_capacity(f.len() * 3 + 2);
        cuts.push(0);
        cuts.push(k as u32);
        for &x in &f {
            cuts.push(self.pos[x]);
            cuts.push(self.pos[x] + 1);
            cuts.extend(self.children[x].iter().map(|&c| self.pos[c as usize]));
            cuts.push(self.last[x] + 1);
        }
        cuts.sort_unstable();
        cuts.dedup();

        let failed_pos: Vec<u32> = f.iter().map(|&x| self.pos[x]).collect();
        let mut out = Vec::with_capacity(cuts.len());
        let mut stack: Vec<usize> = Vec::new();
        let mut next = 0;
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1] - 1);
            if failed_pos.binary_search(&lo).is_ok() {
                continue;
            }
            while next < f.len() && self.pos[f[next]] < lo {
                let x = f[next];
                while stack.last().is_some_and(|&t| self.last[t] < self.pos[x]) {
                    stack.pop();
                }
                stack.push(x);
                next += 1;
            }
            while stack.last().is_some_and(|&t| self.last[t] < lo) {
                stack.pop();
            }
            let root = match stack.last() {
                None => 0,
                Some(&a) => {
                    let ch = &self.children[a];
                    let j = ch.partition_point(|&c| self.pos[c as usize] <= lo);
                    ch[j - 1] as usize
                }
            };
            out.push(Interval {
                lo,
                hi,
                label: self.vertices[root],
            });
        }
        Ok(IntervalSet { intervals: out })
    }

    /// The interval of `iset` holding surviving vertex `v`.
    pub fn locate_interval(&self, iset: &IntervalSet, v: usize) -> Result<usize, EulerError> {
        let p = self.position(v)?;
        iset.find(p).ok_or(EulerError::Failed(v))
    }

    /// Re-expresses `iset` over terminal ranks, dropping runs with no terminal.
    pub fn restrict_to_terminals(&self, iset: &IntervalSet) -> IntervalSet {
        let intervals = iset
            .intervals
            .iter()
            .filter_map(|iv| {
                let a = self.term_prefix[iv.lo as usize];
                let b = self.term_prefix[iv.hi as usize + 1];
                (b > a).then(|| Interval {
                    lo: a,
                    hi: b - 1,
                    label: iv.label,
                })
            })
            .collect();
        IntervalSet { intervals }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::collections::HashSet;

    fn path(vs: &[usize]) -> Tree {
        Tree::from_edges(
            vs.iter().copied(),
            vs.windows(2).map(|w| (w[0], w[1])).collect(),
        )
    }

    fn star() -> Tree {
        Tree::from_edges(0..4, vec![(0, 1), (0, 2), (0, 3)])
    }

    fn spans(s: &IntervalSet) -> Vec<(u32, u32)> {
        s.intervals.iter().map(|iv| (iv.lo, iv.hi)).collect()
    }

    #[test]
    fn preorders() {
        assert_eq!(preprocess_tree(&path(&[1, 2, 3])).order(), &[1, 2, 3]);
        assert_eq!(preprocess_tree(&star()).order(), &[0, 1, 2, 3]);
        assert_eq!(preprocess_tree(&Tree::singleton(7)).order(), &[7]);
    }

    #[test]
    fn path_with_middle_failure() {
        let idx = preprocess_tree(&path(&[1, 2, 3, 4, 5]));
        let s = idx.intervals_after_failures(&[3]).unwrap();
        assert_eq!(spans(&s), vec![(0, 1), (3, 4)]);
        assert_ne!(s.intervals[0].label, s.intervals[1].label);
        assert_eq!(
            s.intervals[idx.locate_interval(&s, 4).unwrap()],
            s.intervals[1]
        );
        assert_eq!(idx.locate_interval(&s, 3), Err(EulerError::Failed(3)));
        assert_eq!(idx.locate_interval(&s, 9), Err(EulerError::NotInTree(9)));
    }

    #[test]
    fn star_center_failure() {
        let idx = preprocess_tree(&star());
        let s = idx.intervals_after_failures(&[0]).unwrap();
        assert_eq!(spans(&s), vec![(1, 1), (2, 2), (3, 3)]);
        assert_eq!(s.label_count(), 3);
        assert_eq!(idx.locate_interval(&s, 2).unwrap(), 1);
    }

    #[test]
    fn no_failures() {
        let idx = preprocess_tree(&star());
        let s = idx.intervals_after_failures(&[]).unwrap();
        assert_eq!(spans(&s), vec![(0, 3)]);
        for v in 0..4 {
            assert_eq!(idx.locate_interval(&s, v).unwrap(), 0);
        }
    }

    #[test]
    fn terminal_restriction() {
        let t = path(&[1, 2, 3, 4, 5]);
        let full = preprocess_tree(&t);
        let s = full.intervals_after_failures(&[3]).unwrap();
        assert_eq!(full.restrict_to_terminals(&s), s);

        let idx = EulerTourIndex::new(&t, &[1, 4, 5]);
        let s = idx.intervals_after_failures(&[3]).unwrap();
        let r = idx.restrict_to_terminals(&s);
        // Terminal order is [1, 4, 5]: {1} and {4, 5}.
        assert_eq!(spans(&r), vec![(0, 0), (1, 2)]);

        let idx = EulerTourIndex::new(&t, &[4, 5]);
        let r = idx.restrict_to_terminals(&idx.intervals_after_failures(&[3]).unwrap());
        assert_eq!(spans(&r), vec![(0, 1)]);
    }

    fn random_tree(rng: &mut impl Rng, n: usize) -> Tree {
        let mut ids: Vec<usize> = (0..3 * n).collect();
        for i in (1..ids.len()).rev() {
            ids.swap(i, rng.gen_range(0..=i));
        }
        ids.truncate(n);
        let edges = (1..n).map(|i| (ids[rng.gen_range(0..i)], ids[i])).collect();
        Tree::from_edges(ids, edges)
    }

    fn brute_label_classes(t: &Tree, failed: &HashSet<usize>) -> Vec<Vec<usize>> {
        let g = crate::graph::Graph::from_edges(
            t.vertices.iter().max().unwrap() + 1,
            t.edges.iter().copied(),
        )
        .unwrap();
        let live: HashSet<usize> = t
            .vertices
            .iter()
            .copied()
            .filter(|v| !failed.contains(v))
            .collect();
        crate::graph::components_where(&g, |v| live.contains(&v))
    }

    #[test]
    fn random_labels_match_brute_connectivity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let n = rng.gen_range(1..30);
            let t = random_tree(&mut rng, n);
            let idx = preprocess_tree(&t);
            let failed: HashSet<usize> = t
                .vertices
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.2))
                .collect();
            let fv: Vec<usize> = failed.iter().copied().collect();
            let s = idx.intervals_after_failures(&fv).unwrap();
            assert!(s.len() <= (idx.max_degree() + 1) * failed.len() + 1);
            let covered: usize = s
                .intervals
                .iter()
                .map(|iv| (iv.hi - iv.lo + 1) as usize)
                .sum();
            assert_eq!(covered, n - failed.len());
            for class in brute_label_classes(&t, &failed) {
                let labels: HashSet<usize> = class
                    .iter()
                    .map(|&v| s.intervals[idx.locate_interval(&s, v).unwrap()].label)
                    .collect();
                assert_eq!(labels.len(), 1);
            }
            assert_eq!(s.label_count(), brute_label_classes(&t, &failed).len());
        }
    }
}
