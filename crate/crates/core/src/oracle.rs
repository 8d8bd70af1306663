//! The oracle: preprocess a graph once, switch up to `d★` vertices, then ask
//! connectivity questions about the resulting activated subgraph.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use crate::euler::EulerTourIndex;
use crate::graph::Graph;
use crate::hierarchy::{build_hierarchy, DecompError, Hierarchy};
use crate::par::Execution;
use crate::preprocess::{
    build_global_order, build_table, compute_adjacency_lists, tree_indices, AdjacencyLists,
    GlobalOrder, PreprocessError, DEFAULT_MEMORY_CAP,
};
use crate::query::{QueryContext, QueryResult, Representative};
use crate::range_count::RangeCountTable;
use crate::sparsify::{on_on_edges, sparsify_ni};
use crate::update::{build_state, MergeError, UpdateState};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Hierarchy(#[from] DecompError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Merge(#[from] MergeError),
    #[error("vertex {v} out of range for {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("update of {size} vertices exceeds d★ = {d_star}")]
    UpdateTooLarge { size: usize, d_star: usize },
    #[error("no update has been applied")]
    NoUpdate,
    #[error("vertex {0} is not active after the update")]
    Inactive(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub sparsify: bool,
    pub memory_cap: u64,
    pub execution: Execution,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            sparsify: false,
            memory_cap: DEFAULT_MEMORY_CAP,
            execution: Execution::default(),
        }
    }
}

/// Size and timing figures gathered during preprocessing.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PreprocessMetrics {
    pub n: usize,
    pub m: usize,
    pub n_off: usize,
    pub d_star: usize,
    pub preprocessing_ms: f64,
    pub on_on_edges: usize,
    pub levels: usize,
    pub components: usize,
    pub trees: usize,
    pub max_tree_degree: usize,
    pub max_decomp_depth: usize,
    pub game_rounds: usize,
    pub contract_violations: usize,
    pub adjacency_total: usize,
    pub artificial_load: u64,
    pub table_points: usize,
    pub indicator_bitmap: bool,
}

#[derive(Clone, Debug)]
pub struct Oracle {
    graph: Graph,
    d_star: usize,
    options: OracleOptions,
    hierarchy: Hierarchy,
    euler: Vec<EulerTourIndex>,
    order: GlobalOrder,
    lists: AdjacencyLists,
    table: RangeCountTable,
    metrics: PreprocessMetrics,
    state: Option<UpdateState>,
}

impl Oracle {
    pub fn preprocess(
        g: &Graph,
        d_star: usize,
        options: OracleOptions,
    ) -> Result<Self, OracleError> {
        let start = Instant::now();
        let graph = if options.sparsify {
            sparsify_ni(g, d_star)
        } else {
            g.clone()
        };
        let hierarchy = build_hierarchy(&graph)?;
        let euler = tree_indices(&hierarchy);
        let order = build_global_order(&graph, &hierarchy, &euler);
        let lists = compute_adjacency_lists(&graph, &hierarchy, &order, d_star, options.memory_cap);
        let table = build_table(&graph, &lists, &order, options.memory_cap)?;
        let metrics = PreprocessMetrics {
            n: graph.n(),
            m: graph.m(),
            n_off: graph.off_count(),
            d_star,
            preprocessing_ms: start.elapsed().as_secs_f64() * 1e3,
            on_on_edges: on_on_edges(&graph),
            levels: hierarchy.levels,
            components: hierarchy.components.len(),
            trees: hierarchy.trees.len(),
            max_tree_degree: hierarchy.max_tree_degree(),
            max_decomp_depth: hierarchy.stats.max_decomp_depth,
            game_rounds: hierarchy.stats.game.rounds,
            contract_violations: hierarchy.stats.game.contract_violations,
            adjacency_total: lists.total_len(),
            artificial_load: lists.artificial_load(),
            table_points: table.point_count(),
            indicator_bitmap: lists.off.is_bitmap(),
        };
        Ok(Oracle {
            graph,
            d_star,
            options,
            hierarchy,
            euler,
            order,
            lists,
            table,
            metrics,
            state: None,
        })
    }

    /// Decremental oracle: every vertex starts on.
    pub fn decremental(
        g: &Graph,
        d_star: usize,
        options: OracleOptions,
    ) -> Result<Self, OracleError> {
        let all_on = g.clone().with_states(vec![true; g.n()]);
        Oracle::preprocess(&all_on, d_star, options)
    }

    /// Builds the state for `d` without touching the oracle.
    pub fn apply_update(&self, d: &[usize]) -> Result<UpdateState, OracleError> {
        let n = self.graph.n();
        if let Some(&v) = d.iter().find(|&&v| v >= n) {
            return Err(OracleError::VertexOutOfRange { v, n });
        }
        let mut distinct = d.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() > self.d_star {
            return Err(OracleError::UpdateTooLarge {
                size: distinct.len(),
                d_star: self.d_star,
            });
        }
        Ok(build_state(
            &self.hierarchy,
            &self.euler,
            &self.order,
            &self.lists,
            &self.table,
            |v| self.graph.is_on(v),
            &distinct,
            self.options.execution,
        )?)
    }

    /// Replaces the active update. Each call starts from the original states.
    pub fn update(&mut self, d: &[usize]) -> Result<&UpdateState, OracleError> {
        let st = self.apply_update(d)?;
        Ok(self.state.insert(st))
    }

    pub fn query(&self, u: usize, v: usize) -> Result<bool, OracleError> {
        self.query_detailed(u, v).map(|r| r.connected)
    }

    pub fn query_detailed(&self, u: usize, v: usize) -> Result<QueryResult, OracleError> {
        let st = self.state.as_ref().ok_or(OracleError::NoUpdate)?;
        self.query_with(st, u, v)
    }

    pub fn query_with(
        &self,
        st: &UpdateState,
        u: usize,
        v: usize,
    ) -> Result<QueryResult, OracleError> {
        let cx = self.context();
        for w in [u, v] {
            if w >= self.graph.n() {
                return Err(OracleError::VertexOutOfRange {
                    v: w,
                    n: self.graph.n(),
                });
            }
            if !cx.in_v_new(st, w) {
                return Err(OracleError::Inactive(w));
            }
        }
        Ok(cx.query(st, u, v))
    }

    pub fn representative(
        &self,
        st: &UpdateState,
        u: usize,
    ) -> Result<Representative, OracleError> {
        let cx = self.context();
        if u >= self.graph.n() {
            return Err(OracleError::VertexOutOfRange {
                v: u,
                n: self.graph.n(),
            });
        }
        if !cx.in_v_new(st, u) {
            return Err(OracleError::Inactive(u));
        }
        Ok(cx.find_representative(st, u))
    }

    /// Group of a `Q★` vertex, if it is one.
    pub fn group_of(&self, st: &UpdateState, w: usize) -> Option<u32> {
        let cx = self.context();
        (w < self.graph.n() && cx.in_q_star(st, w))
            .then(|| cx.lift_to_group(st, w))
            .flatten()
    }

    pub fn in_q_star(&self, st: &UpdateState, w: usize) -> bool {
        w < self.graph.n() && self.context().in_q_star(st, w)
    }

    pub fn in_v_new(&self, st: &UpdateState, w: usize) -> bool {
        w < self.graph.n() && self.context().in_v_new(st, w)
    }

    fn context(&self) -> QueryContext<'_> {
        QueryContext {
            h: &self.hierarchy,
            order: &self.order,
            lists: &self.lists,
            on: self.graph.states(),
        }
    }

    pub fn state(&self) -> Option<&UpdateState> {
        self.state.as_ref()
    }

    /// The graph the products were built from (sparsified when requested).
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn d_star(&self) -> usize {
        self.d_star
    }

    pub fn options(&self) -> OracleOptions {
        self.options
    }

    pub fn set_execution(&mut self, execution: Execution) {
        self.options.execution = execution;
    }

    pub fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    pub fn euler(&self) -> &[EulerTourIndex] {
        &self.euler
    }

    pub fn order(&self) -> &GlobalOrder {
        &self.order
    }

    pub fn lists(&self) -> &AdjacencyLists {
        &self.lists
    }

    pub fn table(&self) -> &RangeCountTable {
        &self.table
    }

    pub fn metrics(&self) -> &PreprocessMetrics {
        &self.metrics
    }

    /// Hash of every preprocessing product; unchanged by updates and queries.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.graph.n().hash(&mut h);
        for e in self.graph.edges() {
            e.hash(&mut h);
        }
        self.graph.states().hash(&mut h);
        self.d_star.hash(&mut h);
        self.hierarchy.chain.hash(&mut h);
        self.hierarchy.terminal_tree.hash(&mut h);
        self.hierarchy.terminal_level.hash(&mut h);
        for c in &self.hierarchy.components {
            (c.level, &c.vertices, &c.terminals, c.parent, c.tree).hash(&mut h);
        }
        for t in &self.hierarchy.trees {
            (t.level, &t.tree.vertices, &t.tree.edges, &t.terminals).hash(&mut h);
        }
        self.order.hash(&mut h);
        (&self.lists.a, &self.lists.on_len, &self.lists.b_on_len).hash(&mut h);
        self.table.hash(&mut h);
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ComponentLabels;
    use crate::query::Resolution;
    use rand::{Rng, SeedableRng};

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn same_vertex_is_connected() {
        let mut o = Oracle::preprocess(&path(3), 1, OracleOptions::default()).unwrap();
        o.update(&[]).unwrap();
        assert!(o.query(2, 2).unwrap());
    }

    #[test]
    fn failed_middle_splits_path() {
        let mut o = Oracle::preprocess(&path(3), 1, OracleOptions::default()).unwrap();
        o.update(&[1]).unwrap();
        assert!(!o.query(0, 2).unwrap());
        assert_eq!(o.query(1, 0), Err(OracleError::Inactive(1)));
    }

    #[test]
    fn query_before_update_fails() {
        let o = Oracle::preprocess(&path(3), 1, OracleOptions::default()).unwrap();
        assert_eq!(o.query(0, 1), Err(OracleError::NoUpdate));
    }

    #[test]
    fn oversized_update_fails() {
        let mut o = Oracle::preprocess(&path(4), 1, OracleOptions::default()).unwrap();
        assert_eq!(
            o.update(&[0, 1]).err(),
            Some(OracleError::UpdateTooLarge { size: 2, d_star: 1 })
        );
    }

    #[test]
    fn empty_graph() {
        let mut o = Oracle::preprocess(&Graph::empty(0), 0, OracleOptions::default()).unwrap();
        o.update(&[]).unwrap();
        assert_eq!(o.state().unwrap().intervals.len(), 0);
    }

    #[test]
    fn all_off_graph_routes_through_switched_vertices() {
        let g = path(4).with_off(0..4);
        let mut o = Oracle::preprocess(&g, 3, OracleOptions::default()).unwrap();
        assert!(o.hierarchy().components.is_empty());
        assert_eq!(o.order().pi, vec![0, 1, 2, 3]);
        o.update(&[0, 1, 3]).unwrap();
        assert!(o.query(0, 1).unwrap());
        assert!(!o.query(1, 3).unwrap());
    }

    #[test]
    fn switched_on_vertex_bridges() {
        let g = path(5).with_off([2]);
        let mut o = Oracle::preprocess(&g, 1, OracleOptions::default()).unwrap();
        o.update(&[]).unwrap();
        assert!(!o.query(0, 4).unwrap());
        o.update(&[2]).unwrap();
        assert!(o.query(0, 4).unwrap());
    }

    #[test]
    fn untouched_components_resolve_as_isolated() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let mut o = Oracle::preprocess(&g, 1, OracleOptions::default()).unwrap();
        o.update(&[4]).unwrap();
        let r = o.query_detailed(0, 2).unwrap();
        assert_eq!(
            r,
            QueryResult {
                connected: true,
                resolution: Resolution::SameIsolatedComponent
            }
        );
        assert!(!o.query(3, 5).unwrap());
        assert!(!o.query(0, 3).unwrap());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 60;
        let edges: Vec<(usize, usize)> = (0..150)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .filter(|(a, b)| a != b)
            .collect();
        let g = Graph::from_edges(n, edges).unwrap().with_off(0..10);
        let mut o = Oracle::preprocess(&g, 6, OracleOptions::default()).unwrap();
        let d = [0, 3, 12, 20, 33, 41];
        let par = o.apply_update(&d).unwrap();
        o.set_execution(Execution::Sequential);
        let seq = o.apply_update(&d).unwrap();
        assert_eq!(par.group, seq.group);
        assert_eq!(par.stats, seq.stats);
    }

    #[test]
    fn random_instances_match_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for trial in 0..150 {
            let n = rng.gen_range(1..40);
            let m = rng.gen_range(0..n * 3);
            let edges: Vec<(usize, usize)> = (0..m)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .filter(|(a, b)| a != b)
                .collect();
            let off: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.25)).collect();
            let g = Graph::from_edges(n, edges).unwrap().with_off(off);
            let d_star = rng.gen_range(0..6);
            let opts = OracleOptions {
                sparsify: trial % 2 == 1,
                ..Default::default()
            };
            let o = Oracle::preprocess(&g, d_star, opts).unwrap();
            let before = o.fingerprint();
            for _ in 0..5 {
                let d: Vec<usize> = (0..rng.gen_range(0..=d_star))
                    .map(|_| rng.gen_range(0..n))
                    .collect();
                let st = o.apply_update(&d).unwrap();
                let active: Vec<bool> = (0..n).map(|v| g.is_on(v) != d.contains(&v)).collect();
                let labels = ComponentLabels::new(&g, &active);
                for u in 0..n {
                    for v in 0..n {
                        if active[u] && active[v] {
                            let got = o.query_with(&st, u, v).unwrap().connected;
                            assert_eq!(
                                got,
                                labels.connected(u, v).unwrap(),
                                "trial {trial} d {d:?} u {u} v {v}"
                            );
                        }
                    }
                }
            }
            assert_eq!(o.fingerprint(), before);
        }
    }
}
