//! Applying one batch of state switches: affected components and trees, the
//! interval partition of the affected vertex set, and Borůvka merging of the
//! intervals driven by batched adjacency counts.

use std::collections::HashSet;

use crate::dsu::UnionFind;
use crate::euler::EulerTourIndex;
use crate::hierarchy::Hierarchy;
use crate::par::Execution;
use crate::preprocess::{AdjacencyLists, GlobalOrder};
use crate::range_count::RangeCountTable;

pub const OFF_TREE: u32 = u32::MAX;

/// A run `[lo, hi]` of global positions whose vertices are already known to
/// be connected. `tree` is [`OFF_TREE`] for a switched-on off-vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GlobalInterval {
    pub lo: u32,
    pub hi: u32,
    pub tree: u32,
    pub label: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UpdateStats {
    pub intervals: usize,
    pub interval_bound: usize,
    /// Active groups at the start of each phase.
    pub phase_sizes: Vec<usize>,
    pub phases: usize,
    pub phase_guard: usize,
    pub halving_ok: bool,
    pub batched_queries: usize,
    pub max_queries_per_search: usize,
}

/// Everything derived from one update.
#[derive(Clone, Debug)]
pub struct UpdateState {
    pub d: Vec<usize>,
    pub d_on: Vec<usize>,
    pub d_off: Vec<usize>,
    pub affected_components: Vec<usize>,
    pub affected_trees: Vec<usize>,
    pub intervals: Vec<GlobalInterval>,
    /// Connected group of each interval.
    pub group: Vec<u32>,
    pub groups: usize,
    pub stats: UpdateStats,
    d_on_set: HashSet<usize>,
    d_off_set: HashSet<usize>,
    comp_set: HashSet<usize>,
    tree_set: HashSet<usize>,
}

impl UpdateState {
    pub fn in_d_on(&self, v: usize) -> bool {
        self.d_on_set.contains(&v)
    }

    pub fn in_d_off(&self, v: usize) -> bool {
        self.d_off_set.contains(&v)
    }

    pub fn is_affected_component(&self, c: usize) -> bool {
        self.comp_set.contains(&c)
    }

    pub fn is_affected_tree(&self, t: usize) -> bool {
        self.tree_set.contains(&t)
    }

    /// Interval holding global position `p`.
    pub fn interval_at(&self, p: u32) -> Option<usize> {
        let k = self.intervals.partition_point(|iv| iv.lo <= p);
        (k > 0 && self.intervals[k - 1].hi >= p).then(|| k - 1)
    }
}

/// Components meeting `d_on` (every level of each chain) and their trees.
pub fn compute_affected(h: &Hierarchy, d_on: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut comps: Vec<usize> = d_on
        .iter()
        .flat_map(|&v| h.chain[v].iter().map(|&c| c as usize))
        .collect();
    comps.sort_unstable();
    comps.dedup();
    let mut trees: Vec<usize> = comps.iter().filter_map(|&c| h.components[c].tree).collect();
    trees.sort_unstable();
    trees.dedup();
    (comps, trees)
}

/// Surviving terminal runs of every affected tree plus one singleton per
/// switched-on off-vertex, sorted by position. Also returns the size bound.
pub fn build_intervals(
    euler: &[EulerTourIndex],
    order: &GlobalOrder,
    trees: &[usize],
    d_on: &HashSet<usize>,
    d_off: &[usize],
) -> (Vec<GlobalInterval>, usize) {
    let mut out = Vec::new();
    let mut bound = d_off.len();
    for &t in trees {
        let idx = &euler[t];
        let failed: Vec<usize> = d_on.iter().copied().filter(|&v| idx.contains(v)).collect();
        bound += (idx.max_degree() + 1) * failed.len() + 1;
        let iset = idx
            .intervals_after_failures(&failed)
            .expect("failed vertices come from the tree");
        let start = order.blocks[t].0;
        for iv in idx.restrict_to_terminals(&iset).intervals {
            out.push(GlobalInterval {
                lo: start + iv.lo,
                hi: start + iv.hi,
                tree: t as u32,
                label: iv.label,
            });
        }
    }
    for &v in d_off {
        let p = order.pos[v];
        out.push(GlobalInterval {
            lo: p,
            hi: p,
            tree: OFF_TREE,
            label: v,
        });
    }
    out.sort_unstable_by_key(|iv| iv.lo);
    (out, bound)
}

/// Count arrays for one phase over `k` groups.
#[derive(Clone, Debug)]
pub struct Phase {
    pub k: usize,
    /// Row-major `k × k` Ĝ-edge counts between groups (zero diagonal).
    pub all: Vec<u64>,
    row_pre: Vec<u64>,
    /// Per affected component, `|A ∩ R_x|` and `|(A \ B) ∩ R_x|`.
    pub count_a: Vec<Vec<u64>>,
    pub count_amb: Vec<Vec<u64>>,
    a_pre: Vec<Vec<u64>>,
    amb_pre: Vec<Vec<u64>>,
}

fn prefix(xs: &[u64]) -> Vec<u64> {
    let mut p = Vec::with_capacity(xs.len() + 1);
    p.push(0);
    let mut acc = 0;
    for &x in xs {
        acc += x;
        p.push(acc);
    }
    p
}

fn count_in(sorted: &[u32], lo: u32, hi: u32) -> u64 {
    (sorted.partition_point(|&p| p <= hi) - sorted.partition_point(|&p| p < lo)) as u64
}

impl Phase {
    fn assemble(k: usize, all: Vec<u64>, count_a: Vec<Vec<u64>>, count_amb: Vec<Vec<u64>>) -> Self {
        let mut row_pre = Vec::with_capacity(k * (k + 1));
        for x in 0..k {
            row_pre.extend(prefix(&all[x * k..(x + 1) * k]));
        }
        let a_pre = count_a.iter().map(|c| prefix(c)).collect();
        let amb_pre = count_amb.iter().map(|c| prefix(c)).collect();
        Phase {
            k,
            all,
            row_pre,
            count_a,
            count_amb,
            a_pre,
            amb_pre,
        }
    }

    /// Phase-one arrays: groups are the intervals themselves.
    pub fn initial(
        table: &RangeCountTable,
        lists: &AdjacencyLists,
        affected: &[usize],
        intervals: &[GlobalInterval],
        exec: Execution,
    ) -> Self {
        let k = intervals.len();
        let rows: Vec<Vec<u64>> = exec.map_range(k, |x| {
            let a = &intervals[x];
            (x + 1..k)
                .map(|y| {
                    let b = &intervals[y];
                    table
                        .range_count(
                            a.lo as usize..a.hi as usize + 1,
                            b.lo as usize..b.hi as usize + 1,
                        )
                        .expect("intervals are disjoint")
                })
                .collect()
        });
        let mut all = vec![0u64; k * k];
        for (x, row) in rows.into_iter().enumerate() {
            for (j, c) in row.into_iter().enumerate() {
                let y = x + 1 + j;
                all[x * k + y] = c;
                all[y * k + x] = c;
            }
        }
        let count_a = affected
            .iter()
            .map(|&c| {
                intervals
                    .iter()
                    .map(|iv| count_in(&lists.a[c], iv.lo, iv.hi))
                    .collect()
            })
            .collect();
        let count_amb = affected
            .iter()
            .map(|&c| {
                let amb = lists.a_minus_b(c);
                intervals
                    .iter()
                    .map(|iv| count_in(amb, iv.lo, iv.hi))
                    .collect()
            })
            .collect();
        Phase::assemble(k, all, count_a, count_amb)
    }

    /// Arrays for the groups `merged`, each a list of current group indices.
    pub fn aggregate(&self, merged: &[Vec<usize>]) -> Self {
        let k2 = merged.len();
        let mut tmp = vec![0u64; self.k * k2];
        for x in 0..self.k {
            for (y2, members) in merged.iter().enumerate() {
                tmp[x * k2 + y2] = members.iter().map(|&y| self.all[x * self.k + y]).sum();
            }
        }
        let mut all = vec![0u64; k2 * k2];
        for (x2, members) in merged.iter().enumerate() {
            for y2 in 0..k2 {
                if x2 != y2 {
                    all[x2 * k2 + y2] = members.iter().map(|&x| tmp[x * k2 + y2]).sum();
                }
            }
        }
        let agg = |cs: &Vec<Vec<u64>>| -> Vec<Vec<u64>> {
            cs.iter()
                .map(|c| {
                    merged
                        .iter()
                        .map(|m| m.iter().map(|&x| c[x]).sum())
                        .collect()
                })
                .collect()
        };
        Phase::assemble(k2, all, agg(&self.count_a), agg(&self.count_amb))
    }

    /// Whether group `k` has a G★ edge into any of groups `l..=r` (`k` outside).
    pub fn batched(&self, k: usize, l: usize, r: usize) -> bool {
        self.star_edges(k, l, r) > 0
    }

    /// G★ edges between group `k` and groups `l..=r`.
    pub fn star_edges(&self, k: usize, l: usize, r: usize) -> i128 {
        assert!(k < l || k > r, "group {k} inside the batch {l}..={r}");
        let row = &self.row_pre[k * (self.k + 1)..(k + 1) * (self.k + 1)];
        let mut s = (row[r + 1] - row[l]) as i128;
        for g in 0..self.count_a.len() {
            let ca = self.count_a[g][k] as i128;
            let cm = self.count_amb[g][k] as i128;
            let sa = (self.a_pre[g][r + 1] - self.a_pre[g][l]) as i128;
            let sm = (self.amb_pre[g][r + 1] - self.amb_pre[g][l]) as i128;
            s -= ca * sa - cm * sm;
        }
        debug_assert!(s >= 0);
        s
    }

    /// Some group adjacent to `k` (rightward search first) and the number of
    /// batched queries spent.
    pub fn adjacency_query(&self, k: usize) -> (Option<usize>, usize) {
        let mut queries = 0;
        if k + 1 < self.k {
            queries += 1;
            if self.batched(k, k + 1, self.k - 1) {
                let (mut lo, mut hi) = (k + 1, self.k - 1);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    queries += 1;
                    if self.batched(k, k + 1, mid) {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                return (Some(lo), queries);
            }
        }
        if k > 0 {
            queries += 1;
            if self.batched(k, 0, k - 1) {
                let (mut lo, mut hi) = (0, k - 1);
                while lo < hi {
                    let mid = (lo + hi).div_ceil(2);
                    queries += 1;
                    if self.batched(k, mid, k - 1) {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                return (Some(lo), queries);
            }
        }
        (None, queries)
    }
}

fn ceil_log2(x: usize) -> usize {
    (usize::BITS - x.max(1).saturating_sub(1).leading_zeros()) as usize
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MergeError {
    #[error("merging took {phases} phases, above the guard {guard}")]
    PhaseGuard { phases: usize, guard: usize },
}

/// Groups intervals into the connected components of the affected graph.
/// Returns the group of each interval and the number of groups.
pub fn boruvka_merge(
    table: &RangeCountTable,
    lists: &AdjacencyLists,
    affected: &[usize],
    intervals: &[GlobalInterval],
    exec: Execution,
    stats: &mut UpdateStats,
) -> Result<(Vec<u32>, usize), MergeError> {
    let n = intervals.len();
    stats.halving_ok = true;
    stats.phase_guard = ceil_log2(n) + 2;
    let mut group = vec![u32::MAX; n];
    let mut next_id = 0u32;
    if n == 0 {
        return Ok((group, 0));
    }
    // Members (interval indices) of each active group, ordered by first interval.
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut phase = Phase::initial(table, lists, affected, intervals, exec);
    loop {
        let k = members.len();
        if k == 1 {
            for &i in &members[0] {
                group[i] = next_id;
            }
            next_id += 1;
            break;
        }
        stats.phases += 1;
        stats.phase_sizes.push(k);
        if stats.phases > stats.phase_guard {
            return Err(MergeError::PhaseGuard {
                phases: stats.phases,
                guard: stats.phase_guard,
            });
        }
        let found = exec.map_range(k, |x| phase.adjacency_query(x));
        let mut uf = UnionFind::new(k);
        for (x, &(hit, q)) in found.iter().enumerate() {
            stats.batched_queries += q;
            stats.max_queries_per_search = stats.max_queries_per_search.max(q);
            if let Some(y) = hit {
                uf.union(x, y);
            }
        }
        let mut merged: Vec<Vec<usize>> = Vec::new();
        for part in uf.groups() {
            if part.len() == 1 && found[part[0]].0.is_none() {
                for &i in &members[part[0]] {
                    group[i] = next_id;
                }
                next_id += 1;
            } else {
                merged.push(part);
            }
        }
        if 2 * merged.len() > k {
            stats.halving_ok = false;
        }
        if merged.is_empty() {
            break;
        }
        members = merged
            .iter()
            .map(|part| {
                let mut m: Vec<usize> = part
                    .iter()
                    .flat_map(|&x| members[x].iter().copied())
                    .collect();
                m.sort_unstable();
                m
            })
            .collect();
        phase = phase.aggregate(&merged);
    }
    Ok((group, next_id as usize))
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn build_state(
    h: &Hierarchy,
    euler: &[EulerTourIndex],
    order: &GlobalOrder,
    lists: &AdjacencyLists,
    table: &RangeCountTable,
    is_on: impl Fn(usize) -> bool,
    d: &[usize],
    exec: Execution,
) -> Result<UpdateState, MergeError> {
    let mut d = d.to_vec();
    d.sort_unstable();
    d.dedup();
    let (d_on, d_off): (Vec<usize>, Vec<usize>) = d.iter().partition(|&&v| is_on(v));
    let d_on_set: HashSet<usize> = d_on.iter().copied().collect();
    let d_off_set: HashSet<usize> = d_off.iter().copied().collect();
    let (comps, trees) = compute_affected(h, &d_on);
    let (intervals, bound) = build_intervals(euler, order, &trees, &d_on_set, &d_off);
    let mut stats = UpdateStats {
        intervals: intervals.len(),
        interval_bound: bound,
        ..Default::default()
    };
    let (group, groups) = boruvka_merge(table, lists, &comps, &intervals, exec, &mut stats)?;
    Ok(UpdateState {
        comp_set: comps.iter().copied().collect(),
        tree_set: trees.iter().copied().collect(),
        d,
        d_on,
        d_off,
        affected_components: comps,
        affected_trees: trees,
        intervals,
        group,
        groups,
        stats,
        d_on_set,
        d_off_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::OffIndicator;

    fn lists(a: Vec<Vec<u32>>, on_len: Vec<u32>, b_on_len: Vec<u32>) -> AdjacencyLists {
        AdjacencyLists {
            a,
            on_len,
            b_on_len,
            off: OffIndicator::Sparse(HashSet::new()),
        }
    }

    fn singletons(ps: &[u32]) -> Vec<GlobalInterval> {
        ps.iter()
            .map(|&p| GlobalInterval {
                lo: p,
                hi: p,
                tree: 0,
                label: p as usize,
            })
            .collect()
    }

    #[test]
    fn isolated_intervals_stay_apart() {
        let t = RangeCountTable::new(4, []);
        let l = lists(vec![], vec![], vec![]);
        let iv = singletons(&[0, 1, 2]);
        let mut st = UpdateStats::default();
        let (g, k) = boruvka_merge(&t, &l, &[], &iv, Execution::Sequential, &mut st).unwrap();
        assert_eq!(k, 3);
        assert_eq!(g.len(), 3);
        assert_ne!(g[0], g[1]);
    }

    #[test]
    fn one_edge_joins_two_intervals() {
        let t = RangeCountTable::new(2, [(0, 1)]);
        let l = lists(vec![], vec![], vec![]);
        let iv = singletons(&[0, 1]);
        let mut st = UpdateStats::default();
        let (g, k) = boruvka_merge(&t, &l, &[], &iv, Execution::Sequential, &mut st).unwrap();
        assert_eq!(k, 1);
        assert_eq!(g[0], g[1]);
    }

    #[test]
    fn affected_artificial_edge_is_cancelled() {
        // Ĝ has only the artificial edge of component 0 with A = B = {0, 1}.
        let t = RangeCountTable::new(2, [(0, 1)]);
        let l = lists(vec![vec![0, 1]], vec![2], vec![2]);
        let iv = singletons(&[0, 1]);
        let p = Phase::initial(&t, &l, &[0], &iv, Execution::Sequential);
        assert!(!p.batched(0, 1, 1));
        let p = Phase::initial(&t, &l, &[], &iv, Execution::Sequential);
        assert!(p.batched(0, 1, 1));
    }

    #[test]
    fn clique_minus_clique_count() {
        // A = {1, 2, 3}, B = {1, 2}: Ê = {12, 13, 23}; from {1} into {3}: 1·1 − 0·1 = 1.
        let l = lists(vec![vec![1, 2, 3]], vec![3], vec![2]);
        let pairs: Vec<_> = crate::preprocess::artificial_pairs(&l, 0).collect();
        let t = RangeCountTable::new(4, pairs.iter().copied());
        let iv = singletons(&[1, 3]);
        let p = Phase::initial(&t, &l, &[], &iv, Execution::Sequential);
        assert_eq!(p.all[1], 1);
        assert_eq!(p.count_a[..], [] as [Vec<u64>; 0]);
        let p = Phase::initial(&t, &l, &[0], &iv, Execution::Sequential);
        assert_eq!((p.count_a[0][0], p.count_amb[0][0]), (1, 0));
        assert_eq!((p.count_a[0][1], p.count_amb[0][1]), (1, 1));
        assert!(!p.batched(0, 1, 1));
    }

    #[test]
    fn rightward_neighbour_first() {
        // Group 1 touches both 0 and 2.
        let t = RangeCountTable::new(3, [(0, 1), (1, 2)]);
        let l = lists(vec![], vec![], vec![]);
        let iv = singletons(&[0, 1, 2]);
        let p = Phase::initial(&t, &l, &[], &iv, Execution::Sequential);
        assert_eq!(p.adjacency_query(1).0, Some(2));
        assert_eq!(p.adjacency_query(0).0, Some(1));
        assert_eq!(p.adjacency_query(2).0, Some(1));
    }

    #[test]
    fn search_cost_is_logarithmic() {
        let k = 64u32;
        let t = RangeCountTable::new(k as usize, [(0, k - 1)]);
        let l = lists(vec![], vec![], vec![]);
        let iv = singletons(&(0..k).collect::<Vec<_>>());
        let p = Phase::initial(&t, &l, &[], &iv, Execution::Sequential);
        let (hit, q) = p.adjacency_query(0);
        assert_eq!(hit, Some(k as usize - 1));
        assert!(q <= ceil_log2(k as usize) + 1);
    }

    #[test]
    fn aggregation_matches_recomputation() {
        let pairs = [(0, 1), (1, 2), (2, 3), (0, 3), (1, 3)];
        let t = RangeCountTable::new(4, pairs);
        let l = lists(vec![vec![0, 2, 3]], vec![3], vec![1]);
        let iv = singletons(&[0, 1, 2, 3]);
        let p = Phase::initial(&t, &l, &[0], &iv, Execution::Sequential);
        let merged = vec![vec![0, 1], vec![2, 3]];
        let agg = p.aggregate(&merged);
        let wide = vec![
            GlobalInterval {
                lo: 0,
                hi: 1,
                tree: 0,
                label: 0,
            },
            GlobalInterval {
                lo: 2,
                hi: 3,
                tree: 0,
                label: 2,
            },
        ];
        let direct = Phase::initial(&t, &l, &[0], &wide, Execution::Sequential);
        assert_eq!(agg.all, direct.all);
        assert_eq!(agg.count_a, direct.count_a);
        assert_eq!(agg.count_amb, direct.count_amb);
    }
}
