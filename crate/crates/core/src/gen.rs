//! Deterministic graph generators for tests, verification and benchmarks.

use std::collections::HashSet;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GenError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("unknown graph kind {0:?}")]
    UnknownKind(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphKind {
    Gnm,
    Path,
    Star,
    Grid,
    CliquesBridge,
}

impl FromStr for GraphKind {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        Ok(match s {
            "gnm" => GraphKind::Gnm,
            "path" => GraphKind::Path,
            "star" => GraphKind::Star,
            "grid" => GraphKind::Grid,
            "cliques-bridge" => GraphKind::CliquesBridge,
            _ => return Err(GenError::UnknownKind(s.to_string())),
        })
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform graph with exactly `m` distinct edges.
pub fn gnm(n: usize, m: usize, seed: u64) -> Result<Graph, GenError> {
    let max = n * n.saturating_sub(1) / 2;
    if m > max {
        return Err(GenError::Infeasible(format!("{m} edges on {n} vertices")));
    }
    let mut rng = rng(seed);
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    if 2 * m > max {
        // Dense: sample edge indices directly.
        let all: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        edges.extend(sample(&mut rng, max, m).into_iter().map(|i| all[i]));
    } else {
        while edges.len() < m {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b && seen.insert((a.min(b), a.max(b))) {
                edges.push((a.min(b), a.max(b)));
            }
        }
    }
    Ok(Graph::from_edges(n, edges).expect("generated edges are valid"))
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
}

/// `K_{1, n-1}` centred at 0.
pub fn star(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (0, i))).expect("star edges are valid")
}

/// Row-major grid with `⌊√n⌋` columns, the last row possibly partial.
pub fn grid(n: usize) -> Graph {
    let w = ((n as f64).sqrt() as usize).max(1);
    let mut edges = Vec::new();
    for v in 0..n {
        if v % w + 1 < w && v + 1 < n {
            edges.push((v, v + 1));
        }
        if v + w < n {
            edges.push((v, v + w));
        }
    }
    Graph::from_edges(n, edges).expect("grid edges are valid")
}

/// Two cliques on `⌈n/2⌉` and `⌊n/2⌋` vertices joined by the edge `{0, ⌈n/2⌉}`.
pub fn cliques_bridge(n: usize) -> Result<Graph, GenError> {
    if n < 2 {
        return Err(GenError::Infeasible(format!(
            "cliques-bridge needs 2 vertices, got {n}"
        )));
    }
    let h = n.div_ceil(2);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (lo, hi) in [(0, h), (h, n)] {
        for a in lo..hi {
            edges.extend((a + 1..hi).map(|b| (a, b)));
        }
    }
    edges.push((0, h));
    Ok(Graph::from_edges(n, edges).expect("clique edges are valid"))
}

pub fn generate(kind: GraphKind, n: usize, m: usize, seed: u64) -> Result<Graph, GenError> {
    match kind {
        GraphKind::Gnm => gnm(n, m, seed),
        GraphKind::Path => Ok(path(n)),
        GraphKind::Star => Ok(star(n)),
        GraphKind::Grid => Ok(grid(n)),
        GraphKind::CliquesBridge => cliques_bridge(n),
    }
}

/// Turns `n_off` uniformly chosen vertices off.
pub fn random_off(g: Graph, n_off: usize, seed: u64) -> Result<Graph, GenError> {
    if n_off > g.n() {
        return Err(GenError::Infeasible(format!(
            "{n_off} off-vertices out of {}",
            g.n()
        )));
    }
    let mut rng = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let off = sample(&mut rng, g.n(), n_off).into_vec();
    Ok(g.with_off(off))
}

/// `k` distinct vertices drawn uniformly.
pub fn random_subset(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    let mut v = sample(rng, n, k.min(n)).into_vec();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::write_edge_list;

    #[test]
    fn path_five_has_four_edges() {
        let g = path(5);
        assert_eq!(g.m(), 4);
        assert!(g.has_edge(3, 4));
    }

    #[test]
    fn star_nine() {
        let g = star(9);
        assert_eq!(g.m(), 8);
        assert_eq!(g.degree(0), 8);
    }

    #[test]
    fn gnm_is_deterministic() {
        let a = write_edge_list(&gnm(100, 300, 1).unwrap());
        let b = write_edge_list(&gnm(100, 300, 1).unwrap());
        assert_eq!(a, b);
        assert_eq!(gnm(100, 300, 1).unwrap().m(), 300);
        assert_ne!(a, write_edge_list(&gnm(100, 300, 2).unwrap()));
    }

    #[test]
    fn gnm_dense_and_infeasible() {
        assert_eq!(gnm(6, 15, 3).unwrap().m(), 15);
        assert!(gnm(4, 7, 0).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = grid(9);
        assert_eq!(g.m(), 12);
        assert_eq!(grid(1).m(), 0);
    }

    #[test]
    fn two_cliques() {
        let g = cliques_bridge(12).unwrap();
        assert_eq!(g.m(), 2 * 15 + 1);
        assert!(g.has_edge(0, 6));
    }

    #[test]
    fn off_split_size() {
        let g = random_off(path(20), 5, 4).unwrap();
        assert_eq!(g.off_count(), 5);
        assert!(random_off(path(3), 4, 0).is_err());
    }

    #[test]
    fn kinds_parse() {
        assert_eq!(
            "cliques-bridge".parse::<GraphKind>(),
            Ok(GraphKind::CliquesBridge)
        );
        assert!("cube".parse::<GraphKind>().is_err());
    }
}
