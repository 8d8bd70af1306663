//! Explicit materialization of the artificial graph `Ĝ` and the affected
//! graph `G★` for cross-checking the counting machinery on small inputs.

use std::collections::HashMap;

use rand::Rng;

use crate::dsu::UnionFind;
use crate::graph::{ComponentLabels, Graph};
use crate::oracle::Oracle;
use crate::preprocess::artificial_pairs;
use crate::query::Representative;
use crate::update::{Phase, UpdateState};

/// Edge cap on `Ĝ` above which no shadow is built.
pub const DEFAULT_SHADOW_CAP: usize = 1_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ShadowReport {
    pub skipped: bool,
    pub star_vertices: usize,
    pub star_edges: usize,
    pub count_checks: usize,
    pub count_mismatches: usize,
    pub clique_checks: usize,
    pub clique_mismatches: usize,
    pub range_checks: usize,
    pub range_mismatches: usize,
    pub partition_mismatches: usize,
    pub conn_checks: usize,
    pub conn_mismatches: usize,
    pub representative_checks: usize,
    pub representative_mismatches: usize,
}

impl ShadowReport {
    pub fn mismatches(&self) -> usize {
        self.count_mismatches
            + self.clique_mismatches
            + self.range_mismatches
            + self.partition_mismatches
            + self.conn_mismatches
            + self.representative_mismatches
    }

    pub fn absorb(&mut self, o: &ShadowReport) {
        self.skipped |= o.skipped;
        self.star_vertices += o.star_vertices;
        self.star_edges += o.star_edges;
        self.count_checks += o.count_checks;
        self.count_mismatches += o.count_mismatches;
        self.clique_checks += o.clique_checks;
        self.clique_mismatches += o.clique_mismatches;
        self.range_checks += o.range_checks;
        self.range_mismatches += o.range_mismatches;
        self.partition_mismatches += o.partition_mismatches;
        self.conn_checks += o.conn_checks;
        self.conn_mismatches += o.conn_mismatches;
        self.representative_checks += o.representative_checks;
        self.representative_mismatches += o.representative_mismatches;
    }
}

/// How many samples each randomized check draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShadowConfig {
    pub cap: usize,
    pub range_pairs: usize,
    pub conn_pairs: usize,
}

impl Default for ShadowConfig {
    fn default() -> Self {
        ShadowConfig {
            cap: DEFAULT_SHADOW_CAP,
            range_pairs: 1000,
            conn_pairs: 100,
        }
    }
}

/// Edges of `Ĝ` as position pairs, repeats kept.
pub fn artificial_graph_edges(o: &Oracle) -> Vec<(u32, u32)> {
    let pos = &o.order().pos;
    let mut out: Vec<(u32, u32)> = o.graph().edges().map(|(a, b)| (pos[a], pos[b])).collect();
    for c in 0..o.lists().a.len() {
        out.extend(artificial_pairs(o.lists(), c));
    }
    out
}

/// Edges of `G★` as position pairs: `Ĝ[Q★]` without the artificial edges of
/// affected components.
pub fn star_graph_edges(o: &Oracle, st: &UpdateState) -> Vec<(u32, u32)> {
    let pi = &o.order().pi;
    let pos = &o.order().pos;
    let inq = |p: u32| o.in_q_star(st, pi[p as usize]);
    let mut out: Vec<(u32, u32)> = o
        .graph()
        .edges()
        .map(|(a, b)| (pos[a], pos[b]))
        .filter(|&(a, b)| inq(a) && inq(b))
        .collect();
    for c in 0..o.lists().a.len() {
        if !st.is_affected_component(c) {
            out.extend(artificial_pairs(o.lists(), c).filter(|&(a, b)| inq(a) && inq(b)));
        }
    }
    out
}

/// `|A ∩ V1||A ∩ V2| − |(A∖B) ∩ V1||(A∖B) ∩ V2|`, the artificial edges of one
/// component between disjoint position sets.
pub fn clique_formula(
    a: &[u32],
    a_minus_b: &[u32],
    v1: impl Fn(u32) -> bool,
    v2: impl Fn(u32) -> bool,
) -> i128 {
    let c = |s: &[u32], f: &dyn Fn(u32) -> bool| s.iter().filter(|&&p| f(p)).count() as i128;
    c(a, &v1) * c(a, &v2) - c(a_minus_b, &v1) * c(a_minus_b, &v2)
}

/// Runs every shadow check for one update. `g` is the graph whose activated
/// subgraph defines ground truth.
pub fn check_update(
    o: &Oracle,
    g: &Graph,
    st: &UpdateState,
    cfg: ShadowConfig,
    rng: &mut impl Rng,
) -> ShadowReport {
    let mut rep = ShadowReport::default();
    if o.table().point_count() > cfg.cap {
        rep.skipped = true;
        return rep;
    }
    let n = g.n();
    let pi = &o.order().pi;
    let positions = o.order().len();
    let iv = &st.intervals;
    let k = iv.len();
    let interval_of: Vec<Option<usize>> =
        (0..positions as u32).map(|p| st.interval_at(p)).collect();

    // Range counting against a double loop over Ĝ.
    if positions >= 2 && cfg.range_pairs > 0 {
        let hat = artificial_graph_edges(o);
        for _ in 0..cfg.range_pairs {
            let mut cuts = [0usize; 4];
            for c in &mut cuts {
                *c = rng.gen_range(0..=positions);
            }
            cuts.sort_unstable();
            let (a, b) = (cuts[0]..cuts[1], cuts[2]..cuts[3]);
            let want = hat
                .iter()
                .filter(|&&(x, y)| {
                    let (x, y) = (x as usize, y as usize);
                    (a.contains(&x) && b.contains(&y)) || (a.contains(&y) && b.contains(&x))
                })
                .count() as u64;
            rep.range_checks += 1;
            if o.table().range_count(a, b) != Ok(want) {
                rep.range_mismatches += 1;
            }
        }
    }

    // Interval-pair edge counts of G★: formula versus enumeration.
    let star = star_graph_edges(o, st);
    rep.star_edges = star.len();
    rep.star_vertices = (0..n).filter(|&v| o.in_q_star(st, v)).count();
    let mut direct: HashMap<(usize, usize), i128> = HashMap::new();
    for &(a, b) in &star {
        if let (Some(x), Some(y)) = (interval_of[a as usize], interval_of[b as usize]) {
            if x != y {
                *direct.entry((x.min(y), x.max(y))).or_default() += 1;
            }
        }
    }
    let phase = Phase::initial(
        o.table(),
        o.lists(),
        &st.affected_components,
        iv,
        crate::par::Execution::Sequential,
    );
    for x in 0..k {
        for y in x + 1..k {
            rep.count_checks += 1;
            if phase.star_edges(x, y, y) != direct.get(&(x, y)).copied().unwrap_or(0) {
                rep.count_mismatches += 1;
            }
        }
    }

    // Per affected component, artificial edges between interval pairs.
    for &c in &st.affected_components {
        let a = &o.lists().a[c];
        let amb = o.lists().a_minus_b(c);
        let mut direct: HashMap<(usize, usize), i128> = HashMap::new();
        for (p, q) in artificial_pairs(o.lists(), c) {
            if let (Some(x), Some(y)) = (interval_of[p as usize], interval_of[q as usize]) {
                if x != y {
                    *direct.entry((x.min(y), x.max(y))).or_default() += 1;
                }
            }
        }
        let within = |s: &[u32], x: usize| {
            (s.partition_point(|&p| p <= iv[x].hi) - s.partition_point(|&p| p < iv[x].lo)) as i128
        };
        let ca: Vec<i128> = (0..k).map(|x| within(a, x)).collect();
        let cm: Vec<i128> = (0..k).map(|x| within(amb, x)).collect();
        for x in 0..k {
            for y in x + 1..k {
                let f = ca[x] * ca[y] - cm[x] * cm[y];
                rep.clique_checks += 1;
                if f != direct.get(&(x, y)).copied().unwrap_or(0) {
                    rep.clique_mismatches += 1;
                }
            }
        }
    }

    // Connected components of G★ versus the merged groups.
    let mut uf = UnionFind::new(positions);
    for &(a, b) in &star {
        uf.union(a as usize, b as usize);
    }
    let mut comp_of_group: HashMap<u32, usize> = HashMap::new();
    let mut group_of_comp: HashMap<usize, u32> = HashMap::new();
    for (i, ivl) in iv.iter().enumerate() {
        let g_id = st.group[i];
        for p in ivl.lo..=ivl.hi {
            let c = uf.find(p as usize);
            if *comp_of_group.entry(g_id).or_insert(c) != c
                || *group_of_comp.entry(c).or_insert(g_id) != g_id
            {
                rep.partition_mismatches += 1;
            }
        }
    }

    // G★ connectivity versus the activated subgraph on sampled Q★ pairs.
    let active: Vec<bool> = (0..n).map(|v| o.in_v_new(st, v)).collect();
    let truth = ComponentLabels::new(g, &active);
    let q: Vec<usize> = (0..positions).filter(|&p| o.in_q_star(st, pi[p])).collect();
    if !q.is_empty() {
        for _ in 0..cfg.conn_pairs {
            let (p, r) = (q[rng.gen_range(0..q.len())], q[rng.gen_range(0..q.len())]);
            rep.conn_checks += 1;
            let want = truth.connected(pi[p], pi[r]).unwrap_or(false);
            if uf.same(p, r) != want {
                rep.conn_mismatches += 1;
            }
        }
    }

    // Every lifted representative is connected to its vertex.
    for v in (0..n).filter(|&v| active[v]) {
        if let Ok(Representative::Lifted(w)) = o.representative(st, v) {
            rep.representative_checks += 1;
            if !truth.connected(v, w).unwrap_or(false) {
                rep.representative_mismatches += 1;
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::oracle::OracleOptions;
    use rand::SeedableRng;

    #[test]
    fn clique_formula_matches_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rng.gen_range(1..30u32);
            let mut a: Vec<u32> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            a.sort_unstable();
            let split = rng.gen_range(0..=a.len());
            let (b, amb) = a.split_at(split);
            let side: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let mut direct = 0i128;
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    let (p, q) = (a[i], a[j]);
                    let in_clique = b.contains(&p) || b.contains(&q);
                    let crosses = (side[p as usize], side[q as usize]);
                    if in_clique && (crosses == (1, 2) || crosses == (2, 1)) {
                        direct += 1;
                    }
                }
            }
            let f = clique_formula(
                &a,
                amb,
                |p| side[p as usize] == 1,
                |p| side[p as usize] == 2,
            );
            assert_eq!(f, direct);
        }
    }

    #[test]
    fn random_updates_pass_every_check() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for seed in 0..30 {
            let n = rng.gen_range(5..40);
            let m = rng.gen_range(0..(n * (n - 1) / 2).min(3 * n));
            let g = gen::random_off(gen::gnm(n, m, seed).unwrap(), n / 4, seed).unwrap();
            let d_star = rng.gen_range(1..6);
            let o = Oracle::preprocess(&g, d_star, OracleOptions::default()).unwrap();
            let d = gen::random_subset(&mut rng, n, d_star);
            let st = o.apply_update(&d).unwrap();
            let cfg = ShadowConfig {
                range_pairs: 50,
                ..Default::default()
            };
            let rep = check_update(&o, &g, &st, cfg, &mut rng);
            assert_eq!(rep.mismatches(), 0, "{rep:?}");
            assert!(!rep.skipped);
        }
    }
}
