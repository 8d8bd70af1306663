//! Verification harness: runs workloads through the oracle and a brute-force
//! reference, together with structural checks on every product.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::hierarchy::validate_hierarchy;
use crate::oracle::{Oracle, OracleError, OracleOptions, PreprocessMetrics};
use crate::shadow::{check_update, ShadowConfig, ShadowReport};
use crate::sparsify::on_on_edges;
use crate::workload::{Trial, Workload};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub d_star: usize,
    pub trials: usize,
    pub queries_per_trial: usize,
    pub options: OracleOptions,
    pub shadow: Option<ShadowConfig>,
    /// Negate the first answer of every trial, to prove the harness notices.
    pub fault_inject: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            d_star: 4,
            trials: 10,
            queries_per_trial: 100,
            options: OracleOptions::default(),
            shadow: None,
            fault_inject: false,
        }
    }
}

pub fn ceil_log2(x: usize) -> usize {
    (usize::BITS - x.max(1).saturating_sub(1).leading_zeros()) as usize
}

/// Tree-degree level above which the measured degree is flagged.
pub fn degree_flag_threshold(n: usize) -> f64 {
    8.0 * ((n + 2) as f64).log2().powi(2)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub graphs: usize,
    pub trials: usize,
    pub queries: usize,
    pub mismatches: usize,
    pub first_mismatch: Option<String>,
    pub hierarchy_violations: usize,
    pub level_bound_failures: usize,
    pub separator_failures: usize,
    pub contract_violations: usize,
    pub max_game_rounds: usize,
    pub degree_flags: usize,
    pub max_tree_degree: usize,
    pub sparsify_bound_failures: usize,
    pub interval_bound_failures: usize,
    pub phase_guard_failures: usize,
    pub halving_failures: usize,
    pub max_phases: usize,
    pub shadow: ShadowReport,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub metrics: Vec<PreprocessMetrics>,
}

impl VerifyReport {
    /// Any failed check at all.
    pub fn failures(&self) -> usize {
        self.mismatches
            + self.hierarchy_violations
            + self.level_bound_failures
            + self.separator_failures
            + self.contract_violations
            + self.sparsify_bound_failures
            + self.interval_bound_failures
            + self.phase_guard_failures
            + self.halving_failures
            + self.shadow.mismatches()
    }

    pub fn absorb(&mut self, o: VerifyReport) {
        self.graphs += o.graphs;
        self.trials += o.trials;
        self.queries += o.queries;
        self.mismatches += o.mismatches;
        if self.first_mismatch.is_none() {
            self.first_mismatch = o.first_mismatch;
        }
        self.hierarchy_violations += o.hierarchy_violations;
        self.level_bound_failures += o.level_bound_failures;
        self.separator_failures += o.separator_failures;
        self.contract_violations += o.contract_violations;
        self.max_game_rounds = self.max_game_rounds.max(o.max_game_rounds);
        self.degree_flags += o.degree_flags;
        self.max_tree_degree = self.max_tree_degree.max(o.max_tree_degree);
        self.sparsify_bound_failures += o.sparsify_bound_failures;
        self.interval_bound_failures += o.interval_bound_failures;
        self.phase_guard_failures += o.phase_guard_failures;
        self.halving_failures += o.halving_failures;
        self.max_phases = self.max_phases.max(o.max_phases);
        self.shadow.absorb(&o.shadow);
        self.metrics.extend(o.metrics);
    }
}

/// Structural checks on a freshly preprocessed oracle.
pub fn check_products(o: &Oracle, original: &Graph, rep: &mut VerifyReport) {
    let h = o.hierarchy();
    rep.graphs += 1;
    rep.hierarchy_violations += validate_hierarchy(o.graph(), h).len();
    if h.levels > ceil_log2(original.n()) + 1 {
        rep.level_bound_failures += 1;
    }
    if !h.stats.separator_sizes_ok {
        rep.separator_failures += 1;
    }
    rep.contract_violations += h.stats.game.contract_violations;
    rep.max_game_rounds = rep.max_game_rounds.max(h.stats.game.rounds);
    let delta = h.max_tree_degree();
    rep.max_tree_degree = rep.max_tree_degree.max(delta);
    if delta as f64 > degree_flag_threshold(original.n()) {
        rep.degree_flags += 1;
    }
    if o.options().sparsify && on_on_edges(o.graph()) > original.n() * (o.d_star() + 1) {
        rep.sparsify_bound_failures += 1;
    }
    rep.metrics.push(o.metrics().clone());
}

/// Runs one trial; `g` is the graph that defines ground truth.
pub fn run_trial(
    o: &Oracle,
    g: &Graph,
    trial: &Trial,
    cfg: &VerifyConfig,
    rng: &mut impl Rng,
    rep: &mut VerifyReport,
) -> Result<Vec<bool>, OracleError> {
    let st = o.apply_update(&trial.d)?;
    rep.trials += 1;
    if st.stats.intervals > st.stats.interval_bound {
        rep.interval_bound_failures += 1;
    }
    if !st.stats.halving_ok {
        rep.halving_failures += 1;
    }
    if st.stats.phases > st.stats.phase_guard {
        rep.phase_guard_failures += 1;
    }
    rep.max_phases = rep.max_phases.max(st.stats.phases);
    let expected = match &trial.expected {
        Some(e) => e.clone(),
        None => trial.brute_answers(g),
    };
    let mut answers = Vec::with_capacity(trial.queries.len());
    for (i, (&(u, v), &want)) in trial.queries.iter().zip(&expected).enumerate() {
        let mut got = o.query_with(&st, u, v)?.connected;
        if cfg.fault_inject && i == 0 {
            got = !got;
        }
        rep.queries += 1;
        if got != want {
            rep.mismatches += 1;
            if rep.first_mismatch.is_none() {
                rep.first_mismatch = Some(format!(
                    "d={:?} query ({u}, {v}): oracle {got}, brute {want}",
                    trial.d
                ));
            }
        }
        answers.push(got);
    }
    if let Some(sc) = cfg.shadow {
        rep.shadow.absorb(&check_update(o, g, &st, sc, rng));
    }
    Ok(answers)
}

pub fn run_workload(
    o: &Oracle,
    g: &Graph,
    w: &Workload,
    cfg: &VerifyConfig,
    rng: &mut impl Rng,
) -> Result<VerifyReport, OracleError> {
    let mut rep = VerifyReport::default();
    for t in &w.trials {
        run_trial(o, g, t, cfg, rng, &mut rep)?;
    }
    Ok(rep)
}

/// Preprocesses `g`, then runs `cfg.trials` random trials against it.
pub fn verify_graph(
    g: &Graph,
    cfg: &VerifyConfig,
    rng: &mut impl Rng,
) -> Result<VerifyReport, OracleError> {
    let o = Oracle::preprocess(g, cfg.d_star, cfg.options)?;
    let before = o.fingerprint();
    let mut rep = VerifyReport::default();
    check_products(&o, g, &mut rep);
    for _ in 0..cfg.trials {
        let t = Trial::random(g, cfg.d_star, cfg.queries_per_trial, rng);
        run_trial(&o, g, &t, cfg, rng, &mut rep)?;
    }
    assert_eq!(
        o.fingerprint(),
        before,
        "preprocessing products changed during a workload"
    );
    Ok(rep)
}
