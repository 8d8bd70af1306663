//! Vertex-labelled trees given by an edge list.

use std::collections::{HashMap, VecDeque};

use crate::graph::Graph;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Tree {
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Tree {
    pub fn singleton(v: usize) -> Self {
        Tree {
            vertices: vec![v],
            edges: Vec::new(),
        }
    }

    pub fn from_edges(
        vertices: impl IntoIterator<Item = usize>,
        edges: Vec<(usize, usize)>,
    ) -> Self {
        let mut vertices: Vec<usize> = vertices.into_iter().collect();
        vertices.sort_unstable();
        vertices.dedup();
        Tree { vertices, edges }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn degrees(&self) -> HashMap<usize, usize> {
        let mut deg: HashMap<usize, usize> = self.vertices.iter().map(|&v| (v, 0)).collect();
        for &(a, b) in &self.edges {
            *deg.entry(a).or_default() += 1;
            *deg.entry(b).or_default() += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_values().max().unwrap_or(0)
    }

    /// Relabels every vertex through `map`.
    pub fn mapped(&self, map: &[usize]) -> Tree {
        Tree::from_edges(
            self.vertices.iter().map(|&v| map[v]),
            self.edges.iter().map(|&(a, b)| (map[a], map[b])).collect(),
        )
    }

    /// Problems that keep this from being a tree (inside `host`, if given).
    pub fn defects(&self, host: Option<&Graph>) -> Vec<String> {
        let mut out = Vec::new();
        if self.vertices.is_empty() {
            out.push("tree has no vertices".to_string());
            return out;
        }
        if self.edges.len() + 1 != self.vertices.len() {
            out.push(format!(
                "{} edges on {} vertices",
                self.edges.len(),
                self.vertices.len()
            ));
        }
        let idx = |v: usize| self.vertices.binary_search(&v).ok();
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            match (idx(a), idx(b)) {
                (Some(x), Some(y)) => {
                    adj[x].push(y);
                    adj[y].push(x);
                }
                _ => out.push(format!("edge ({a}, {b}) leaves the vertex set")),
            }
            if let Some(g) = host {
                if a >= g.n() || b >= g.n() || !g.has_edge(a, b) {
                    out.push(format!("edge ({a}, {b}) is not a graph edge"));
                }
            }
        }
        let mut seen = vec![false; self.vertices.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    queue.push_back(y);
                }
            }
        }
        if reached != self.vertices.len() {
            out.push("tree is disconnected".to_string());
        }
        out
    }
}
