//! Static products built once per graph: the global vertex order, the outside
//! neighbourhoods of every component, and the edge-counting table over the
//! graph augmented with per-component artificial edges.

use std::collections::HashSet;
use std::rc::Rc;

use crate::euler::EulerTourIndex;
use crate::graph::Graph;
use crate::hierarchy::Hierarchy;
use crate::range_count::RangeCountTable;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PreprocessError {
    #[error("artificial edges need {needed} pairs, above the cap of {cap}")]
    MemoryCap { needed: u64, cap: u64 },
}

pub const DEFAULT_MEMORY_CAP: u64 = 20_000_000;

/// Tree terminal blocks (trees by level, then smallest terminal), followed by
/// every off-vertex in id order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GlobalOrder {
    pub pi: Vec<usize>,
    pub pos: Vec<u32>,
    /// `(start, len)` of each tree's block, indexed by tree id.
    pub blocks: Vec<(u32, u32)>,
    pub off_start: u32,
}

impl GlobalOrder {
    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }
}

/// Euler indices restricted to each tree's terminals.
pub fn tree_indices(h: &Hierarchy) -> Vec<EulerTourIndex> {
    h.trees
        .iter()
        .map(|t| EulerTourIndex::new(&t.tree, &t.terminals))
        .collect()
}

pub fn build_global_order(g: &Graph, h: &Hierarchy, euler: &[EulerTourIndex]) -> GlobalOrder {
    let n = g.n();
    let mut ids: Vec<usize> = (0..h.trees.len()).collect();
    ids.sort_by_key(|&t| (h.trees[t].level, h.trees[t].terminals[0]));
    let mut pi = Vec::with_capacity(n);
    let mut blocks = vec![(0u32, 0u32); h.trees.len()];
    for t in ids {
        let start = pi.len() as u32;
        pi.extend(euler[t].terminal_order());
        blocks[t] = (start, pi.len() as u32 - start);
    }
    let off_start = pi.len() as u32;
    pi.extend(g.off_vertices());
    let mut pos = vec![u32::MAX; n];
    for (i, &v) in pi.iter().enumerate() {
        pos[v] = i as u32;
    }
    GlobalOrder {
        pi,
        pos,
        blocks,
        off_start,
    }
}

/// Which off-vertices neighbour which components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OffIndicator {
    Bitmap { bits: Vec<u64>, components: usize },
    Sparse(HashSet<(u32, u32)>),
}

impl OffIndicator {
    /// `off` is the rank of the vertex among off-vertices.
    #[inline]
    pub fn get(&self, off: usize, comp: usize) -> bool {
        match self {
            OffIndicator::Bitmap { bits, components } => {
                let i = off * components + comp;
                bits[i / 64] >> (i % 64) & 1 == 1
            }
            OffIndicator::Sparse(set) => set.contains(&(off as u32, comp as u32)),
        }
    }

    pub fn is_bitmap(&self) -> bool {
        matches!(self, OffIndicator::Bitmap { .. })
    }
}

/// Outside neighbourhoods `A` of every component as sorted positions in the
/// global order. On-vertices precede off-vertices there, so `A[..on_len]` is
/// the on part and `B = A[..b_on_len] ∪ A[on_len..]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyLists {
    pub a: Vec<Vec<u32>>,
    pub on_len: Vec<u32>,
    pub b_on_len: Vec<u32>,
    pub off: OffIndicator,
}

impl AdjacencyLists {
    pub fn a_on(&self, c: usize) -> &[u32] {
        &self.a[c][..self.on_len[c] as usize]
    }

    pub fn a_off(&self, c: usize) -> &[u32] {
        &self.a[c][self.on_len[c] as usize..]
    }

    pub fn b_on(&self, c: usize) -> &[u32] {
        &self.a[c][..self.b_on_len[c] as usize]
    }

    /// `A \ B`, which is a contiguous run of the on part.
    pub fn a_minus_b(&self, c: usize) -> &[u32] {
        &self.a[c][self.b_on_len[c] as usize..self.on_len[c] as usize]
    }

    pub fn b_len(&self, c: usize) -> usize {
        self.a[c].len() - self.a_minus_b(c).len()
    }

    pub fn total_len(&self) -> usize {
        self.a.iter().map(Vec::len).sum()
    }

    /// `Σ |A||B|` over all components.
    pub fn artificial_load(&self) -> u64 {
        (0..self.a.len())
            .map(|c| self.a[c].len() as u64 * self.b_len(c) as u64)
            .sum()
    }
}

pub fn compute_adjacency_lists(
    g: &Graph,
    h: &Hierarchy,
    order: &GlobalOrder,
    d_star: usize,
    memory_cap: u64,
) -> AdjacencyLists {
    let nc = h.components.len();
    let mut a = Vec::with_capacity(nc);
    let mut on_len = Vec::with_capacity(nc);
    let mut b_on_len = Vec::with_capacity(nc);
    let mut off_pairs: Vec<(u32, u32)> = Vec::new();
    for (id, c) in h.components.iter().enumerate() {
        let inside = |w: usize| g.is_on(w) && h.component_at(w, c.level) == Some(id);
        let mut list: Vec<u32> = c
            .vertices
            .iter()
            .flat_map(|&v| g.neighbors(v).iter().map(|&w| w as usize))
            .filter(|&w| !inside(w))
            .map(|w| order.pos[w])
            .collect();
        list.sort_unstable();
        list.dedup();
        let on = list.partition_point(|&p| p < order.off_start);
        for &p in &list[on..] {
            off_pairs.push((p - order.off_start, id as u32));
        }
        on_len.push(on as u32);
        b_on_len.push(on.min(d_star + 1) as u32);
        a.push(list);
    }
    let n_off = order.len() - order.off_start as usize;
    let cells = n_off as u64 * nc as u64;
    let off = if cells <= memory_cap.saturating_mul(64) {
        let mut bits = vec![0u64; (cells as usize).div_ceil(64)];
        for (o, c) in off_pairs {
            let i = o as usize * nc + c as usize;
            bits[i / 64] |= 1 << (i % 64);
        }
        OffIndicator::Bitmap {
            bits,
            components: nc,
        }
    } else {
        OffIndicator::Sparse(off_pairs.into_iter().collect())
    };
    AdjacencyLists {
        a,
        on_len,
        b_on_len,
        off,
    }
}

/// Artificial edges of component `c`: a clique on `B` and every pair between
/// `B` and `A \ B`, as position pairs.
pub fn artificial_pairs(lists: &AdjacencyLists, c: usize) -> impl Iterator<Item = (u32, u32)> + '_ {
    let b: Rc<[u32]> = lists
        .b_on(c)
        .iter()
        .chain(lists.a_off(c))
        .copied()
        .collect();
    let rest = lists.a_minus_b(c);
    let nb = b.len();
    (0..nb).flat_map(move |i| {
        let b = Rc::clone(&b);
        let x = b[i];
        let clique = (i + 1..nb).map(move |j| (x, b[j]));
        let bi = rest.iter().map(move |&y| (x, y));
        clique.chain(bi)
    })
}

pub fn build_table(
    g: &Graph,
    lists: &AdjacencyLists,
    order: &GlobalOrder,
    memory_cap: u64,
) -> Result<RangeCountTable, PreprocessError> {
    let needed = lists.artificial_load();
    if needed > memory_cap {
        return Err(PreprocessError::MemoryCap {
            needed,
            cap: memory_cap,
        });
    }
    let original = g.edges().map(|(u, v)| (order.pos[u], order.pos[v]));
    let artificial = (0..lists.a.len()).flat_map(|c| artificial_pairs(lists, c));
    Ok(RangeCountTable::new(
        order.len(),
        original.chain(artificial),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::build_hierarchy;

    fn setup(g: &Graph, d: usize) -> (Hierarchy, GlobalOrder, AdjacencyLists) {
        let h = build_hierarchy(g).unwrap();
        let e = tree_indices(&h);
        let o = build_global_order(g, &h, &e);
        let l = compute_adjacency_lists(g, &h, &o, d, DEFAULT_MEMORY_CAP);
        (h, o, l)
    }

    #[test]
    fn connected_on_graph_has_empty_top_list() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let (h, _, l) = setup(&g, 1);
        let top = h
            .components
            .iter()
            .position(|c| c.level == h.levels)
            .unwrap();
        assert!(l.a[top].is_empty());
    }

    #[test]
    fn off_neighbour_lands_in_b() {
        // a = 0 (on), b = 1 (on), c = 2 (off)
        let g = Graph::from_edges(3, [(0, 1), (1, 2)])
            .unwrap()
            .with_off([2]);
        let (h, o, l) = setup(&g, 1);
        let id = h
            .components
            .iter()
            .position(|c| c.vertices == vec![0, 1])
            .unwrap();
        assert_eq!(l.a[id], vec![o.pos[2]]);
        assert_eq!(l.a_off(id), &[o.pos[2]]);
        assert_eq!(l.b_len(id), 1);
        assert!(l.off.get(0, id));
    }

    #[test]
    fn kernel_size_is_capped() {
        let g = Graph::from_edges(5, (1..5).map(|l| (0, l))).unwrap();
        let (h, _, l) = setup(&g, 1);
        for (id, c) in h.components.iter().enumerate() {
            if c.vertices == vec![0] {
                assert_eq!(l.a_on(id).len(), 4);
                assert_eq!(l.b_on(id).len(), 2);
            }
        }
    }

    #[test]
    fn all_off_order_is_by_id() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap().with_off([0, 1, 2]);
        let (h, o, _) = setup(&g, 1);
        assert_eq!(h.levels, 0);
        assert_eq!(o.pi, vec![0, 1, 2]);
        assert_eq!(o.off_start, 0);
    }

    #[test]
    fn single_tree_then_off_tail() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)])
            .unwrap()
            .with_off([3]);
        let (h, o, _) = setup(&g, 1);
        assert_eq!(*o.pi.last().unwrap(), 3);
        assert_eq!(o.off_start, 3);
        for (t, &(s, len)) in o.blocks.iter().enumerate() {
            let block: Vec<usize> = o.pi[s as usize..(s + len) as usize].to_vec();
            let mut sorted = block.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, h.trees[t].terminals);
        }
    }

    fn lists_by_hand(a: Vec<u32>, on_len: u32, b_on_len: u32) -> AdjacencyLists {
        AdjacencyLists {
            a: vec![a],
            on_len: vec![on_len],
            b_on_len: vec![b_on_len],
            off: OffIndicator::Sparse(HashSet::new()),
        }
    }

    #[test]
    fn artificial_pairs_by_hand() {
        let l = lists_by_hand(vec![0, 1], 2, 2);
        assert_eq!(artificial_pairs(&l, 0).collect::<Vec<_>>(), vec![(0, 1)]);

        let l = lists_by_hand(vec![0, 1, 2], 3, 2);
        let mut got: Vec<_> = artificial_pairs(&l, 0).collect();
        got.sort_unstable();
        // Clique on {0, 1, 2} minus the clique on {2}: C(3,2) - C(1,2) = 3.
        assert_eq!(got, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn table_without_big_lists_counts_graph_edges() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let (_, o, l) = setup(&g, 0);
        let t = build_table(&g, &l, &o, DEFAULT_MEMORY_CAP).unwrap();
        assert!(t.point_count() >= 3);
        let p = |v: usize| o.pos[v] as usize;
        assert!(t.range_count(p(0)..p(0) + 1, p(1)..p(1) + 1).unwrap() >= 1);
    }

    #[test]
    fn memory_cap_is_enforced() {
        let g = Graph::from_edges(5, (1..5).map(|l| (0, l))).unwrap();
        let (_, o, l) = setup(&g, 3);
        assert!(matches!(
            build_table(&g, &l, &o, 0),
            Err(PreprocessError::MemoryCap { .. })
        ));
    }
}
