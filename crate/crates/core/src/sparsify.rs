//! Sparse certificate for connectivity under few vertex deletions.
//!
//! A maximum-adjacency scan labels every on-on edge with the index of the
//! forest it lands in; keeping forests `1..=k` preserves connectivity between
//! survivors of any `k - 1` deleted on-vertices. Edges touching an off-vertex
//! are always kept.

use crate::graph::Graph;

/// Forest index (1-based) of every on-on edge, keyed like `g.edges()`.
pub fn forest_indices(g: &Graph) -> Vec<((usize, usize), usize)> {
    let n = g.n();
    let mut r = vec![0usize; n];
    let mut scanned = vec![false; n];
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new()];
    let mut out = Vec::new();
    for v in 0..n {
        if g.is_on(v) {
            buckets[0].push(v as u32);
        }
    }
    let mut top = 0usize;
    loop {
        while top > 0 && buckets[top].is_empty() {
            top -= 1;
        }
        let Some(v) = buckets[top].pop() else { break };
        let v = v as usize;
        if scanned[v] || r[v] != top {
            continue;
        }
        scanned[v] = true;
        for &w in g.neighbors(v) {
            let w = w as usize;
            if !g.is_on(w) || scanned[w] {
                continue;
            }
            r[w] += 1;
            out.push(((v.min(w), v.max(w)), r[w]));
            if r[w] == buckets.len() {
                buckets.push(Vec::new());
            }
            buckets[r[w]].push(w as u32);
            top = top.max(r[w]);
        }
    }
    out
}

/// Keeps the first `d_star + 1` forests of the on-subgraph plus every edge
/// incident to an off-vertex.
pub fn sparsify_ni(g: &Graph, d_star: usize) -> Graph {
    let k = d_star + 1;
    let mut edges: Vec<(usize, usize)> = forest_indices(g)
        .into_iter()
        .filter(|&(_, f)| f <= k)
        .map(|(e, _)| e)
        .collect();
    edges.extend(g.edges().filter(|&(a, b)| !g.is_on(a) || !g.is_on(b)));
    Graph::from_edges(g.n(), edges)
        .expect("edges come from a valid graph")
        .with_states(g.states().to_vec())
}

/// On-on edges of `g`.
pub fn on_on_edges(g: &Graph) -> usize {
    g.edges().filter(|&(a, b)| g.is_on(a) && g.is_on(b)).count()
}
