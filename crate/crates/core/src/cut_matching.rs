//! Balanced sparse vertex cuts or low-degree Steiner trees, found by a
//! cut-matching game whose witness only has to become connected.

use std::collections::{HashSet, VecDeque};

use num_rational::Ratio;

use crate::dsu::UnionFind;
use crate::flow::{
    decompose_flow_paths, max_flow_vertex_capacitated, Capacity, FlowError, FlowNetwork, VertexCut,
};
use crate::graph::Graph;
use crate::tree::Tree;

pub type Rational = Ratio<u64>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CutMatchingError {
    #[error("A and B must partition the terminal set")]
    NotAPartition,
    #[error("parameter out of range: {0}")]
    Parameter(&'static str),
    #[error("terminal set is empty")]
    NoTerminals,
    #[error("game did not finish within {0} rounds")]
    RoundCap(usize),
    #[error("tree degree {degree} exceeds the bound {bound}")]
    DegreeBound { degree: usize, bound: u64 },
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Matching between `A` and `B` with one embedding path per pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    /// `paths[i]` runs from `pairs[i].0` to `pairs[i].1` in the host graph.
    pub paths: Vec<Vec<usize>>,
    pub embedding_edges: Vec<(usize, usize)>,
}

impl Matching {
    /// Largest number of embedding paths through one vertex.
    pub fn congestion(&self, n: usize) -> u64 {
        let mut load = vec![0u64; n];
        for p in &self.paths {
            for &v in p {
                load[v] += 1;
            }
        }
        load.into_iter().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlayerOutcome {
    Cut(VertexCut),
    Matching(Matching),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutOrTree {
    Cut(VertexCut),
    Tree { dropped: Vec<usize>, tree: Tree },
}

/// Counters from one game.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GameStats {
    pub rounds: usize,
    pub player_calls: usize,
    pub contract_violations: usize,
    pub max_congestion: u64,
}

impl GameStats {
    pub fn absorb(&mut self, o: &GameStats) {
        self.rounds = self.rounds.max(o.rounds);
        self.player_calls += o.player_calls;
        self.contract_violations += o.contract_violations;
        self.max_congestion = self.max_congestion.max(o.max_congestion);
    }
}

/// `⌈1/phi⌉`.
pub fn inverse_ceil(phi: Rational) -> u64 {
    phi.denom().div_ceil(*phi.numer())
}

/// `floor(50 * log2(k + 2))`.
pub fn round_cap(k: usize) -> usize {
    (50.0 * ((k + 2) as f64).log2()).floor() as usize
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// One move of the matching player on the partition `(A, B)` of `U`.
pub fn matching_player(
    g: &Graph,
    terminals: &[usize],
    phi: Rational,
    a: &[usize],
    b: &[usize],
) -> Result<PlayerOutcome, CutMatchingError> {
    if *phi.numer() == 0 || phi > Rational::from_integer(1) {
        return Err(CutMatchingError::Parameter("phi must lie in (0, 1]"));
    }
    let u = sorted(terminals);
    let (sa, sb) = (sorted(a), sorted(b));
    let mut union: Vec<usize> = sa.iter().chain(&sb).copied().collect();
    union.sort_unstable();
    if sa.len() + sb.len() != u.len() || union != u || union.windows(2).any(|w| w[0] == w[1]) {
        return Err(CutMatchingError::NotAPartition);
    }
    let n = g.n();
    let (na, nb) = (sa.len(), sb.len());
    let s = n + na + nb;
    let t = s + 1;
    let mut net = FlowNetwork::new(n + na + nb + 2, s, t);
    let cap = inverse_ceil(phi);
    for v in 0..n {
        net.set_capacity(v, Capacity::Finite(cap));
    }
    for (i, &x) in sa.iter().enumerate() {
        net.add_edge(s, n + i);
        net.add_edge(n + i, x);
    }
    for (x, y) in g.edges() {
        net.add_edge(x, y);
    }
    for (j, &y) in sb.iter().enumerate() {
        net.add_edge(y, n + na + j);
        net.add_edge(n + na + j, t);
    }
    let (flow, cut) = max_flow_vertex_capacitated(&net)?;

    let smaller = na.min(nb) as u64;
    if 3 * flow.value < smaller {
        let keep = |xs: &[usize]| xs.iter().copied().filter(|&x| x < n).collect::<Vec<_>>();
        let mut left = keep(&cut.left);
        let separator = keep(&cut.separator);
        let mut right = keep(&cut.right);
        let count_u = |xs: &[usize]| xs.iter().filter(|x| u.binary_search(x).is_ok()).count();
        if count_u(&left) > count_u(&right) {
            std::mem::swap(&mut left, &mut right);
        }
        return Ok(PlayerOutcome::Cut(VertexCut {
            left,
            separator,
            right,
        }));
    }

    let mut pairs = Vec::new();
    let mut paths = Vec::new();
    let mut edges = HashSet::new();
    for p in decompose_flow_paths(&net, &flow)? {
        // s, u_A, u, ..., v, v_B, t
        let inner = p.nodes[2..p.nodes.len() - 2].to_vec();
        for w in inner.windows(2) {
            edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
        pairs.push((inner[0], *inner.last().unwrap()));
        paths.push(inner);
    }
    let mut embedding_edges: Vec<_> = edges.into_iter().collect();
    embedding_edges.sort_unstable();
    Ok(PlayerOutcome::Matching(Matching {
        pairs,
        paths,
        embedding_edges,
    }))
}

/// Checks a player outcome against its contract; returns the failed clauses.
pub fn player_contract_defects(
    g: &Graph,
    terminals: &[usize],
    phi: Rational,
    a: &[usize],
    b: &[usize],
    outcome: &PlayerOutcome,
) -> Vec<String> {
    let u: HashSet<usize> = terminals.iter().copied().collect();
    let smaller = a.len().min(b.len()) as u64;
    let mut out = Vec::new();
    match outcome {
        PlayerOutcome::Cut(c) => {
            out.extend(cut_defects(g, c));
            let lu = c.left.iter().filter(|x| u.contains(x)).count() as u64;
            let ru = c.right.iter().filter(|x| u.contains(x)).count() as u64;
            if ru < lu {
                out.push(format!("|R∩U| = {ru} < |L∩U| = {lu}"));
            }
            if 3 * lu < smaller {
                out.push(format!("|L∩U| = {lu} below min(|A|,|B|)/3"));
            }
            if Rational::from_integer(c.separator.len() as u64) > phi * lu {
                out.push(format!("|S| = {} exceeds phi·|L∩U|", c.separator.len()));
            }
        }
        PlayerOutcome::Matching(m) => {
            let sa: HashSet<usize> = a.iter().copied().collect();
            let sb: HashSet<usize> = b.iter().copied().collect();
            let mut used = HashSet::new();
            for &(x, y) in &m.pairs {
                if !sa.contains(&x) || !sb.contains(&y) {
                    out.push(format!("pair ({x}, {y}) not in A×B"));
                }
                if !used.insert(x) || !used.insert(y) {
                    out.push(format!("pair ({x}, {y}) reuses an endpoint"));
                }
            }
            if 3 * (m.pairs.len() as u64) < smaller {
                out.push(format!(
                    "matching size {} below min(|A|,|B|)/3",
                    m.pairs.len()
                ));
            }
            let emb: HashSet<(usize, usize)> = m.embedding_edges.iter().copied().collect();
            for (p, &(x, y)) in m.paths.iter().zip(&m.pairs) {
                if p.first() != Some(&x) || p.last() != Some(&y) {
                    out.push(format!("path for ({x}, {y}) has wrong endpoints"));
                }
                for w in p.windows(2) {
                    let e = (w[0].min(w[1]), w[0].max(w[1]));
                    if !g.has_edge(e.0, e.1) || !emb.contains(&e) {
                        out.push(format!("path step {e:?} is not an embedding edge"));
                    }
                }
            }
            if m.congestion(g.n()) > inverse_ceil(phi) {
                out.push(format!("congestion {} above ⌈1/phi⌉", m.congestion(g.n())));
            }
        }
    }
    out
}

/// Partition and separation defects of a vertex cut of `g`.
pub fn cut_defects(g: &Graph, c: &VertexCut) -> Vec<String> {
    let mut out = Vec::new();
    let mut side = vec![u8::MAX; g.n()];
    for (k, part) in [&c.left, &c.separator, &c.right].into_iter().enumerate() {
        for &v in part {
            if side[v] != u8::MAX {
                out.push(format!("vertex {v} appears twice"));
            }
            side[v] = k as u8;
        }
    }
    if side.contains(&u8::MAX) {
        out.push("cut does not cover every vertex".to_string());
    }
    for (x, y) in g.edges() {
        if (side[x] == 0 && side[y] == 2) || (side[x] == 2 && side[y] == 0) {
            out.push(format!("edge ({x}, {y}) joins L and R"));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClusterSplit {
    /// Index of a cluster holding at least `(1 - eps)` of the terminals.
    Giant(usize),
    /// Cluster indices on each side; `balanced` marks case (a).
    Split {
        a: Vec<usize>,
        b: Vec<usize>,
        balanced: bool,
    },
}

/// Groups clusters for the next round of the game.
pub fn partition_clusters(sizes: &[usize], u_size: usize, eps: Rational) -> ClusterSplit {
    let (num, den) = (*eps.numer() as u128, *eps.denom() as u128);
    let giant = |s: usize| (s as u128) * den >= (den - num) * (u_size as u128);
    if let Some(i) = (0..sizes.len()).max_by_key(|&i| (sizes[i], std::cmp::Reverse(i))) {
        if giant(sizes[i]) {
            return ClusterSplit::Giant(i);
        }
    }
    if sizes.iter().all(|&s| 2 * s <= u_size) {
        let mut order: Vec<usize> = (0..sizes.len()).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(sizes[i]), i));
        let (mut a, mut b) = (Vec::new(), Vec::new());
        let (mut wa, mut wb) = (0usize, 0usize);
        for i in order {
            if wa <= wb {
                a.push(i);
                wa += sizes[i];
            } else {
                b.push(i);
                wb += sizes[i];
            }
        }
        a.sort_unstable();
        b.sort_unstable();
        return ClusterSplit::Split {
            a,
            b,
            balanced: true,
        };
    }
    let star = (0..sizes.len()).find(|&i| 2 * sizes[i] > u_size).unwrap();
    ClusterSplit::Split {
        a: (0..sizes.len()).filter(|&i| i != star).collect(),
        b: vec![star],
        balanced: false,
    }
}

/// Runs the game on `g` with terminals `U` until a cut appears or one witness
/// cluster covers `(1 - eps)|U|`. Every player move is audited into `stats`.
pub fn cut_or_steiner_tree(
    g: &Graph,
    terminals: &[usize],
    eps: Rational,
    phi: Rational,
) -> Result<(CutOrTree, GameStats), CutMatchingError> {
    let quarter = Rational::new(1, 4);
    if *eps.numer() == 0 || eps > quarter {
        return Err(CutMatchingError::Parameter("eps must lie in (0, 1/4]"));
    }
    if *phi.numer() == 0 || phi > quarter {
        return Err(CutMatchingError::Parameter("phi must lie in (0, 1/4]"));
    }
    let u = sorted(terminals);
    if u.is_empty() {
        return Err(CutMatchingError::NoTerminals);
    }
    let k = u.len();
    let slot = |v: usize| u.binary_search(&v).unwrap();
    let mut witness = UnionFind::new(k);
    let mut embedding: HashSet<(usize, usize)> = HashSet::new();
    let mut stats = GameStats::default();
    let cap = round_cap(k);

    let giant = loop {
        let clusters = witness.groups();
        let sizes: Vec<usize> = clusters.iter().map(Vec::len).collect();
        let (ca, cb) = match partition_clusters(&sizes, k, eps) {
            ClusterSplit::Giant(i) => break clusters[i].clone(),
            ClusterSplit::Split { a, b, .. } => (a, b),
        };
        if stats.rounds == cap {
            return Err(CutMatchingError::RoundCap(cap));
        }
        stats.rounds += 1;
        let side = |cs: &[usize]| {
            let mut v: Vec<usize> = cs
                .iter()
                .flat_map(|&c| clusters[c].iter().map(|&i| u[i]))
                .collect();
            v.sort_unstable();
            v
        };
        let (a, b) = (side(&ca), side(&cb));
        let outcome = matching_player(g, &u, phi, &a, &b)?;
        stats.player_calls += 1;
        if !player_contract_defects(g, &u, phi, &a, &b, &outcome).is_empty() {
            stats.contract_violations += 1;
        }
        match outcome {
            PlayerOutcome::Cut(c) => return Ok((CutOrTree::Cut(c), stats)),
            PlayerOutcome::Matching(m) => {
                stats.max_congestion = stats.max_congestion.max(m.congestion(g.n()));
                for &(x, y) in &m.pairs {
                    witness.union(slot(x), slot(y));
                }
                embedding.extend(m.embedding_edges);
            }
        }
    };

    let tree = steiner_tree_from_embedding(g.n(), &u, u[giant[0]], &embedding);
    let bound = 2 * stats.rounds as u64 * inverse_ceil(phi);
    let degree = tree.max_degree();
    if degree as u64 > bound {
        return Err(CutMatchingError::DegreeBound { degree, bound });
    }
    let dropped = u.iter().copied().filter(|&x| !tree.contains(x)).collect();
    Ok((CutOrTree::Tree { dropped, tree }, stats))
}

/// BFS spanning tree of the embedding component holding `root`, with
/// non-terminal leaves pruned away.
fn steiner_tree_from_embedding(
    n: usize,
    terminals: &[usize],
    root: usize,
    embedding: &HashSet<(usize, usize)>,
) -> Tree {
    let mut adj = vec![Vec::new(); n];
    let mut sorted_edges: Vec<_> = embedding.iter().copied().collect();
    sorted_edges.sort_unstable();
    for (x, y) in sorted_edges {
        adj[x].push(y);
        adj[y].push(x);
    }
    let mut parent = vec![usize::MAX; n];
    let mut order = vec![root];
    parent[root] = root;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                order.push(y);
                queue.push_back(y);
            }
        }
    }
    let mut children = vec![0usize; n];
    for &v in &order[1..] {
        children[parent[v]] += 1;
    }
    let is_terminal = |v: usize| terminals.binary_search(&v).is_ok();
    let mut alive = vec![false; n];
    for &v in &order {
        alive[v] = true;
    }
    // Reverse BFS order visits every vertex after all of its descendants.
    for &v in order.iter().rev() {
        if v != root && children[v] == 0 && !is_terminal(v) {
            alive[v] = false;
            children[parent[v]] -= 1;
        }
    }
    let vertices: Vec<usize> = order.iter().copied().filter(|&v| alive[v]).collect();
    let edges = vertices
        .iter()
        .filter(|&&v| v != root)
        .map(|&v| (parent[v].min(v), parent[v].max(v)))
        .collect();
    Tree::from_edges(vertices, edges)
}
