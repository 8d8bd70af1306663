//! Update and query timing as a function of the update size.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gen::random_subset;
use crate::graph::Graph;
use crate::oracle::{Oracle, OracleError};
use crate::workload::activated;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub d: usize,
    pub mean_update_us: f64,
    pub mean_query_us: f64,
    pub intervals: f64,
    pub phases: f64,
    pub preprocessing_ms: f64,
}

pub const CSV_HEADER: &str = "d,mean_update_us,mean_query_us,intervals,phases,preprocessing_ms";

impl ScalingRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{:.3},{:.3},{:.2},{:.2},{:.3}",
            self.d,
            self.mean_update_us,
            self.mean_query_us,
            self.intervals,
            self.phases,
            self.preprocessing_ms
        )
    }
}

/// Least-squares slope of `ln y` against `ln x`, over points with positive
/// coordinates. `None` with fewer than two such points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Times `reps` random updates of exactly `d` switches for every `d`, each
/// followed by `queries` random queries. The oracle needs `d★ ≥ max d`.
pub fn measure(
    o: &Oracle,
    g: &Graph,
    d_values: &[usize],
    reps: usize,
    queries: usize,
    rng: &mut impl Rng,
) -> Result<Vec<ScalingRow>, OracleError> {
    let mut rows = Vec::with_capacity(d_values.len());
    for &d in d_values {
        let (mut upd, mut qry, mut nq, mut iv, mut ph) = (0.0, 0.0, 0usize, 0usize, 0usize);
        for _ in 0..reps.max(1) {
            let set = random_subset(rng, g.n(), d);
            let t = Instant::now();
            let st = o.apply_update(&set)?;
            upd += t.elapsed().as_secs_f64();
            iv += st.stats.intervals;
            ph += st.stats.phases;
            let live: Vec<usize> = activated(o.graph(), &set)
                .iter()
                .enumerate()
                .filter_map(|(v, &a)| a.then_some(v))
                .collect();
            if live.is_empty() {
                continue;
            }
            let pairs: Vec<(usize, usize)> = (0..queries)
                .map(|_| {
                    (
                        live[rng.gen_range(0..live.len())],
                        live[rng.gen_range(0..live.len())],
                    )
                })
                .collect();
            let t = Instant::now();
            for &(u, v) in &pairs {
                std::hint::black_box(o.query_with(&st, u, v)?);
            }
            qry += t.elapsed().as_secs_f64();
            nq += pairs.len();
        }
        let r = reps.max(1) as f64;
        rows.push(ScalingRow {
            d,
            mean_update_us: upd / r * 1e6,
            mean_query_us: if nq == 0 { 0.0 } else { qry / nq as f64 * 1e6 },
            intervals: iv as f64 / r,
            phases: ph as f64 / r,
            preprocessing_ms: o.metrics().preprocessing_ms,
        });
    }
    Ok(rows)
}
