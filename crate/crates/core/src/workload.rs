//! Update/query workloads as stored in JSON files.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gen::random_subset;
use crate::graph::{ComponentLabels, Graph};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    /// Vertices whose state is switched.
    pub d: Vec<usize>,
    pub queries: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Vec<bool>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Workload {
    pub trials: Vec<Trial>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WorkloadError {
    #[error("trial {trial}: update of {size} vertices exceeds d★ = {d_star}")]
    TooLarge {
        trial: usize,
        size: usize,
        d_star: usize,
    },
    #[error("trial {trial}: vertex {v} out of range")]
    OutOfRange { trial: usize, v: usize },
    #[error("trial {trial}: query endpoint {v} is inactive")]
    Inactive { trial: usize, v: usize },
    #[error("trial {trial}: {expected} expected answers for {queries} queries")]
    ExpectedLength {
        trial: usize,
        expected: usize,
        queries: usize,
    },
}

/// Activity of every vertex after switching `d`.
pub fn activated(g: &Graph, d: &[usize]) -> Vec<bool> {
    let mut a = g.states().to_vec();
    let mut d = d.to_vec();
    d.sort_unstable();
    d.dedup();
    for v in d {
        a[v] = !a[v];
    }
    a
}

impl Trial {
    /// A random switch set of at most `d_star` vertices and `queries` pairs
    /// drawn from the activated vertices.
    pub fn random(g: &Graph, d_star: usize, queries: usize, rng: &mut impl Rng) -> Trial {
        let size = rng.gen_range(0..=d_star.min(g.n()));
        let d = random_subset(rng, g.n(), size);
        let live: Vec<usize> = activated(g, &d)
            .iter()
            .enumerate()
            .filter_map(|(v, &a)| a.then_some(v))
            .collect();
        let queries = if live.is_empty() {
            Vec::new()
        } else {
            (0..queries)
                .map(|_| {
                    (
                        live[rng.gen_range(0..live.len())],
                        live[rng.gen_range(0..live.len())],
                    )
                })
                .collect()
        };
        Trial {
            d,
            queries,
            expected: None,
        }
    }

    /// Ground-truth answers from a component labelling.
    pub fn brute_answers(&self, g: &Graph) -> Vec<bool> {
        let labels = ComponentLabels::new(g, &activated(g, &self.d));
        self.queries
            .iter()
            .map(|&(u, v)| labels.connected(u, v).unwrap_or(false))
            .collect()
    }
}

impl Workload {
    pub fn random(
        g: &Graph,
        d_star: usize,
        trials: usize,
        queries: usize,
        rng: &mut impl Rng,
    ) -> Workload {
        Workload {
            trials: (0..trials)
                .map(|_| Trial::random(g, d_star, queries, rng))
                .collect(),
        }
    }

    pub fn fill_expected(&mut self, g: &Graph) {
        for t in &mut self.trials {
            t.expected = Some(t.brute_answers(g));
        }
    }

    pub fn validate(&self, g: &Graph, d_star: usize) -> Result<(), WorkloadError> {
        for (i, t) in self.trials.iter().enumerate() {
            if let Some(&v) = t.d.iter().find(|&&v| v >= g.n()) {
                return Err(WorkloadError::OutOfRange { trial: i, v });
            }
            let mut d = t.d.clone();
            d.sort_unstable();
            d.dedup();
            if d.len() > d_star {
                return Err(WorkloadError::TooLarge {
                    trial: i,
                    size: d.len(),
                    d_star,
                });
            }
            let live = activated(g, &d);
            for &(u, v) in &t.queries {
                for w in [u, v] {
                    if w >= g.n() {
                        return Err(WorkloadError::OutOfRange { trial: i, v: w });
                    }
                    if !live[w] {
                        return Err(WorkloadError::Inactive { trial: i, v: w });
                    }
                }
            }
            if let Some(e) = &t.expected {
                if e.len() != t.queries.len() {
                    return Err(WorkloadError::ExpectedLength {
                        trial: i,
                        expected: e.len(),
                        queries: t.queries.len(),
                    });
                }
            }
        }
        Ok(())
    }
}
