//! Undirected simple graphs with on/off vertex states.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::dsu::UnionFind;

/// Dense vertex index in `[0, n)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    fn from(v: usize) -> Self {
        VertexId(v as u32)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {0} is not active")]
    Inactive(usize),
}

/// Set of vertices with O(1) membership and sorted iteration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexSet {
    members: Vec<VertexId>,
    index: HashSet<VertexId>,
}

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index.contains(&v)
    }

    pub fn insert(&mut self, v: VertexId) -> bool {
        if !self.index.insert(v) {
            return false;
        }
        let at = self.members.partition_point(|&w| w < v);
        self.members.insert(at, v);
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.members
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        let mut members: Vec<VertexId> = iter.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        let index = members.iter().copied().collect();
        VertexSet { members, index }
    }
}

/// Undirected simple graph. Adjacency lists are sorted; `on[v]` marks `V_on`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    on: Vec<bool>,
    m: usize,
}

impl Graph {
    /// Graph on `n` vertices, no edges, all on.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            on: vec![true; n],
            m: 0,
        }
    }

    /// Builds a graph from an edge list. Duplicate edges are merged; self-loops
    /// and out-of-range endpoints are rejected. All vertices start on.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        let mut m2 = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            m2 += list.len();
        }
        Ok(Graph {
            adj,
            on: vec![true; n],
            m: m2 / 2,
        })
    }

    pub fn with_states(mut self, on: Vec<bool>) -> Self {
        assert_eq!(on.len(), self.n(), "state vector length must equal n");
        self.on = on;
        self
    }

    /// Marks exactly the listed vertices as off.
    pub fn with_off<I: IntoIterator<Item = usize>>(mut self, off: I) -> Self {
        self.on.iter_mut().for_each(|s| *s = true);
        for v in off {
            self.on[v] = false;
        }
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn is_on(&self, v: usize) -> bool {
        self.on[v]
    }

    pub fn states(&self) -> &[bool] {
        &self.on
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    pub fn on_count(&self) -> usize {
        self.on.iter().filter(|&&s| s).count()
    }

    pub fn off_count(&self) -> usize {
        self.n() - self.on_count()
    }

    pub fn on_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.on[v]).collect()
    }

    pub fn off_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| !self.on[v]).collect()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .map(|&v| v as usize)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }
}

/// An induced subgraph together with the map from local to original ids.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    pub original: Vec<usize>,
}

/// `g[s]`: vertex `i` of the result is `s[i]` (sorted) in `g`. States are kept.
pub fn induced_subgraph(g: &Graph, s: &[usize]) -> Subgraph {
    let mut original = s.to_vec();
    original.sort_unstable();
    original.dedup();
    let dense = original.len() * 16 >= g.n();
    let mut local = if dense {
        vec![u32::MAX; g.n()]
    } else {
        Vec::new()
    };
    let mut sparse = std::collections::HashMap::new();
    for (i, &v) in original.iter().enumerate() {
        if dense {
            local[v] = i as u32;
        } else {
            sparse.insert(v, i as u32);
        }
    }
    let lookup = |w: usize| {
        if dense {
            local[w]
        } else {
            sparse.get(&w).copied().unwrap_or(u32::MAX)
        }
    };
    let mut m2 = 0;
    let adj: Vec<Vec<u32>> = original
        .iter()
        .map(|&v| {
            // Neighbor lists stay sorted because the relabelling is monotone.
            let list: Vec<u32> = g.adj[v]
                .iter()
                .filter_map(|&w| {
                    let l = lookup(w as usize);
                    (l != u32::MAX).then_some(l)
                })
                .collect();
            m2 += list.len();
            list
        })
        .collect();
    let on = original.iter().map(|&v| g.on[v]).collect();
    Subgraph {
        graph: Graph { adj, on, m: m2 / 2 },
        original,
    }
}

/// Connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    components_where(g, |_| true)
}

/// Connected components of the subgraph induced by vertices passing `keep`.
pub fn components_where<F: Fn(usize) -> bool>(g: &Graph, keep: F) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if seen[s] || !keep(s) {
            continue;
        }
        seen[s] = true;
        queue.push_back(s);
        let mut comp = Vec::new();
        while let Some(x) = queue.pop_front() {
            comp.push(x);
            for &y in g.neighbors(x) {
                let y = y as usize;
                if !seen[y] && keep(y) {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Per-vertex component labels of `g[active]`; inactive vertices get `None`.
#[derive(Clone, Debug)]
pub struct ComponentLabels {
    label: Vec<Option<u32>>,
}

impl ComponentLabels {
    pub fn new(g: &Graph, active: &[bool]) -> Self {
        let n = g.n();
        let mut uf = UnionFind::new(n);
        for (u, v) in g.edges() {
            if active[u] && active[v] {
                uf.union(u, v);
            }
        }
        let label = (0..n)
            .map(|v| active[v].then(|| uf.find(v) as u32))
            .collect();
        ComponentLabels { label }
    }

    pub fn connected(&self, u: usize, v: usize) -> Result<bool, GraphError> {
        let lu = self.label[u].ok_or(GraphError::Inactive(u))?;
        let lv = self.label[v].ok_or(GraphError::Inactive(v))?;
        Ok(lu == lv)
    }

    pub fn is_active(&self, v: usize) -> bool {
        self.label[v].is_some()
    }
}

/// Reference connectivity: breadth-first search in `g[active]`.
pub fn brute_connected(
    g: &Graph,
    active: &VertexSet,
    u: VertexId,
    v: VertexId,
) -> Result<bool, GraphError> {
    for x in [u, v] {
        if !active.contains(x) {
            return Err(GraphError::Inactive(x.index()));
        }
    }
    if u == v {
        return Ok(true);
    }
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([u.index()]);
    seen.insert(u.index());
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            let y = y as usize;
            if y == v.index() {
                return Ok(true);
            }
            if active.contains(VertexId(y as u32)) && seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    Ok(false)
}

/// Parses the edge-list text format:
///
/// ```text
/// # comment
/// n m
/// on: 0 1 2
/// 0 1
/// 1 2
/// ```
///
/// Vertices missing from the `on:` line are off. Duplicate edges are merged.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(GraphError::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    let nums = parse_numbers(hline, header)?;
    let [n, m] = nums[..] else {
        return Err(GraphError::Parse {
            line: hline,
            msg: "header must be `n m`".into(),
        });
    };

    let (sline, states) = lines.next().ok_or(GraphError::Parse {
        line: hline,
        msg: "missing `on:` line".into(),
    })?;
    let rest = states.strip_prefix("on:").ok_or(GraphError::Parse {
        line: sline,
        msg: "expected `on:` line".into(),
    })?;
    let mut on = vec![false; n];
    for v in parse_numbers(sline, rest)? {
        if v >= n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n });
        }
        on[v] = true;
    }

    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let nums = parse_numbers(line, l)?;
        let [u, v] = nums[..] else {
            return Err(GraphError::Parse {
                line,
                msg: "edge line must be `u v`".into(),
            });
        };
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: 0,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Ok(Graph::from_edges(n, edges)?.with_states(on))
}

fn parse_numbers(line: usize, s: &str) -> Result<Vec<usize>, GraphError> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| GraphError::Parse {
                line,
                msg: format!("not a vertex index: {t:?}"),
            })
        })
        .collect()
}

/// Serializes `g` in the edge-list format read by [`parse_edge_list`].
pub fn write_edge_list(g: &Graph) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "{} {}", g.n(), g.m()).unwrap();
    out.push_str("on:");
    for v in g.on_vertices() {
        write!(out, " {v}").unwrap();
    }
    out.push('\n');
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn set(vs: &[u32]) -> VertexSet {
        vs.iter().map(|&v| VertexId(v)).collect()
    }

    #[test]
    fn parses_path() {
        let g = parse_edge_list("3 2\non: 0 1 2\n0 1\n1 2\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.on_count(), 3);
    }

    #[test]
    fn parses_single_vertex() {
        let g = parse_edge_list("1 0\non: 0\n").unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
        assert!(g.is_on(0));
    }

    #[test]
    fn duplicate_edges_are_merged() {
        let g = parse_edge_list("2 2\non: 0 1\n0 1\n1 0\n").unwrap();
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn off_vertices_come_from_on_line() {
        let g = parse_edge_list("# demo\n3 1\non: 2\n\n0 2\n").unwrap();
        assert_eq!(g.off_vertices(), vec![0, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_edge_list("2 1\non: 0 1\n0 0\n"),
            Err(GraphError::SelfLoop(0))
        ));
        assert!(matches!(
            parse_edge_list("2 1\non: 0 1\n0 5\n"),
            Err(GraphError::VertexOutOfRange { vertex: 5, n: 2 })
        ));
        assert!(matches!(
            parse_edge_list("2 1\non: 0 1\n0 x\n"),
            Err(GraphError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_edge_list("2 1\n0 1\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)])
            .unwrap()
            .with_off([2, 4]);
        assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn induced_subgraph_cases() {
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = induced_subgraph(&tri, &[0, 1]);
        assert_eq!(s.graph.edges().collect::<Vec<_>>(), vec![(0, 1)]);

        let s = induced_subgraph(&tri, &[0, 1, 2]);
        assert_eq!(s.graph, tri);

        let s = induced_subgraph(&path(3), &[0, 2]);
        assert_eq!(s.graph.m(), 0);
        assert_eq!(s.original, vec![0, 2]);
    }

    #[test]
    fn components_cases() {
        assert_eq!(connected_components(&path(5)).len(), 1);
        assert_eq!(connected_components(&Graph::empty(3)).len(), 3);
        let two = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(
            connected_components(&two),
            vec![vec![0, 1, 2], vec![3, 4, 5]]
        );
    }

    #[test]
    fn brute_star_and_path() {
        let star = Graph::from_edges(5, (1..5).map(|l| (0, l))).unwrap();
        let leaves = set(&[1, 2, 3, 4]);
        assert!(!brute_connected(&star, &leaves, VertexId(1), VertexId(2)).unwrap());

        let p = path(5);
        let act = set(&[0, 1, 3, 4]);
        assert!(brute_connected(&p, &act, VertexId(0), VertexId(1)).unwrap());
        assert!(!brute_connected(&p, &act, VertexId(1), VertexId(3)).unwrap());
        assert!(brute_connected(&p, &act, VertexId(3), VertexId(3)).unwrap());
        assert!(brute_connected(&p, &act, VertexId(2), VertexId(3)).is_err());
    }

    #[test]
    fn labels_match_bfs() {
        let p = path(6);
        let active = vec![true, true, false, true, true, true];
        let labels = ComponentLabels::new(&p, &active);
        let act: VertexSet = (0..6u32).filter(|&v| v != 2).map(VertexId).collect();
        for u in [0usize, 1, 3, 4, 5] {
            for v in [0usize, 1, 3, 4, 5] {
                assert_eq!(
                    labels.connected(u, v).unwrap(),
                    brute_connected(&p, &act, VertexId(u as u32), VertexId(v as u32)).unwrap()
                );
            }
        }
    }
}
