//! Low-degree Steiner forest decomposition and the laminar component
//! hierarchy built from repeated decompositions of the on-subgraph.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write;

use crate::cut_matching::{cut_or_steiner_tree, CutMatchingError, CutOrTree, GameStats, Rational};
use crate::dsu::UnionFind;
use crate::graph::{components_where, induced_subgraph, Graph};
use crate::tree::Tree;

/// Separator and trees returned by [`sf_decomp`].
#[derive(Clone, Debug, Default)]
pub struct Decomposition {
    pub separator: Vec<usize>,
    pub trees: Vec<Tree>,
    pub stats: DecompStats,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecompStats {
    pub max_depth: usize,
    pub depth_bound: usize,
    pub cut_steps: usize,
    pub leaf_steps: usize,
    pub game: GameStats,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DecompError {
    #[error(transparent)]
    Game(#[from] CutMatchingError),
    #[error("separator of size {size} exceeds eps·|U| for |U| = {terminals}")]
    SeparatorBound { size: usize, terminals: usize },
    #[error("recursion depth {depth} exceeds {bound}")]
    DepthBound { depth: usize, bound: usize },
}

fn ceil_log2(x: usize) -> u64 {
    (usize::BITS - x.max(1).saturating_sub(1).leading_zeros()) as u64
}

/// Sparsity used for every game inside one decomposition of `u` terminals.
pub fn decomposition_phi(eps: Rational, u: usize) -> Rational {
    let eps2 = eps / 2;
    eps2 / ceil_log2(u.max(4)).max(2)
}

/// Splits `g[vertices]` by a small separator `X` so that every component of
/// what remains that meets `terminals` gets one tree spanning its terminals.
pub fn sf_decomp(
    g: &Graph,
    vertices: &[usize],
    terminals: &[usize],
    eps: Rational,
) -> Result<Decomposition, DecompError> {
    if *eps.numer() == 0 || eps > Rational::new(1, 2) {
        return Err(CutMatchingError::Parameter("eps must lie in (0, 1/2]").into());
    }
    let total = terminals.len();
    let eps2 = eps / 2;
    let phi = decomposition_phi(eps, total);
    let depth_bound = {
        let per = 3.0 * ceil_log2(total) as f64 * (*eps2.denom() as f64) / (*eps2.numer() as f64);
        (2.0 * (per + 2.0)).floor() as usize
    };
    let mut out = Decomposition {
        stats: DecompStats {
            depth_bound,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut stack: Vec<(Vec<usize>, Vec<usize>, usize)> =
        vec![(vertices.to_vec(), terminals.to_vec(), 0)];

    while let Some((verts, terms, depth)) = stack.pop() {
        if terms.is_empty() {
            continue;
        }
        out.stats.max_depth = out.stats.max_depth.max(depth);
        if depth > depth_bound {
            return Err(DecompError::DepthBound {
                depth,
                bound: depth_bound,
            });
        }
        let sub = induced_subgraph(g, &verts);
        let local = &sub.graph;
        let to_local: HashMap<usize, usize> = sub
            .original
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let mut is_term = vec![false; local.n()];
        for t in &terms {
            is_term[to_local[t]] = true;
        }
        let comps: Vec<Vec<usize>> = components_where(local, |_| true)
            .into_iter()
            .filter(|c| c.iter().any(|&v| is_term[v]))
            .collect();
        if comps.len() > 1 {
            for c in comps {
                let cv: Vec<usize> = c.iter().map(|&v| sub.original[v]).collect();
                let ct: Vec<usize> = c
                    .iter()
                    .filter(|&&v| is_term[v])
                    .map(|&v| sub.original[v])
                    .collect();
                stack.push((cv, ct, depth));
            }
            continue;
        }
        let comp = &comps[0];
        let piece = induced_subgraph(local, comp);
        let map: Vec<usize> = piece.original.iter().map(|&v| sub.original[v]).collect();
        let pg = &piece.graph;
        let lterms: Vec<usize> = (0..pg.n())
            .filter(|&v| is_term[piece.original[v]])
            .collect();

        match lterms.len() {
            1 => {
                out.stats.leaf_steps += 1;
                out.trees.push(Tree::singleton(map[lterms[0]]));
            }
            2 => {
                out.stats.leaf_steps += 1;
                out.trees
                    .push(shortest_path_tree(pg, lterms[0], lterms[1]).mapped(&map));
            }
            _ => {
                let (res, gs) = cut_or_steiner_tree(pg, &lterms, eps2, phi)?;
                out.stats.game.absorb(&gs);
                match res {
                    CutOrTree::Cut(c) => {
                        out.stats.cut_steps += 1;
                        out.separator.extend(c.separator.iter().map(|&v| map[v]));
                        for side in [&c.left, &c.right] {
                            let sv: Vec<usize> = side.iter().map(|&v| map[v]).collect();
                            let st: Vec<usize> = side
                                .iter()
                                .filter(|&&v| lterms.binary_search(&v).is_ok())
                                .map(|&v| map[v])
                                .collect();
                            stack.push((sv, st, depth + 1));
                        }
                    }
                    CutOrTree::Tree { dropped, tree } => {
                        out.stats.leaf_steps += 1;
                        out.separator.extend(dropped.iter().map(|&v| map[v]));
                        out.trees.push(tree.mapped(&map));
                    }
                }
            }
        }
    }
    out.separator.sort_unstable();
    out.separator.dedup();
    if Rational::from_integer(out.separator.len() as u64) > eps * total as u64 {
        return Err(DecompError::SeparatorBound {
            size: out.separator.len(),
            terminals: total,
        });
    }
    out.trees.sort_by_key(|t| t.vertices[0]);
    Ok(out)
}

fn shortest_path_tree(g: &Graph, a: usize, b: usize) -> Tree {
    let mut parent = vec![usize::MAX; g.n()];
    parent[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            break;
        }
        for &y in g.neighbors(x) {
            let y = y as usize;
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut vertices = vec![b];
    let mut edges = Vec::new();
    let mut x = b;
    while x != a {
        let p = parent[x];
        edges.push((p.min(x), p.max(x)));
        vertices.push(p);
        x = p;
    }
    Tree::from_edges(vertices, edges)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub level: usize,
    pub vertices: Vec<usize>,
    pub terminals: Vec<usize>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub tree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerTree {
    pub level: usize,
    pub tree: Tree,
    /// Sorted terminals: level-`level` terminals that lie on the tree.
    pub terminals: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HierarchyStats {
    pub separator_sizes_ok: bool,
    pub max_decomp_depth: usize,
    pub game: GameStats,
    pub max_tree_degree: usize,
}

pub const NONE: u32 = u32::MAX;

/// Laminar components on levels `1..=p` (level 1 finest, level `p` the
/// connected components of the on-subgraph) plus per-level Steiner trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hierarchy {
    pub n: usize,
    pub levels: usize,
    pub components: Vec<Component>,
    pub trees: Vec<SteinerTree>,
    /// Terminal level of each on-vertex, 0 for off-vertices.
    pub terminal_level: Vec<u32>,
    /// Component of `v` at levels `terminal_level[v]..=levels`, finest first.
    pub chain: Vec<Vec<u32>>,
    /// Tree whose terminal set holds `v`.
    pub terminal_tree: Vec<u32>,
    pub stats: HierarchyStats,
}

impl Hierarchy {
    pub fn component_at(&self, v: usize, level: usize) -> Option<usize> {
        let t = self.terminal_level[v] as usize;
        if t == 0 || level < t || level > self.levels {
            return None;
        }
        Some(self.chain[v][level - t] as usize)
    }

    pub fn max_tree_degree(&self) -> usize {
        self.trees
            .iter()
            .map(|t| t.tree.max_degree())
            .max()
            .unwrap_or(0)
    }
}

/// Builds the hierarchy of `g[V_on]`.
pub fn build_hierarchy(g: &Graph) -> Result<Hierarchy, DecompError> {
    let n = g.n();
    let on = g.on_vertices();
    let half = Rational::new(1, 2);
    let mut top = vec![0u32; n];
    let mut level_trees: Vec<Vec<Tree>> = Vec::new();
    let mut stats = HierarchyStats {
        separator_sizes_ok: true,
        ..Default::default()
    };
    let mut x = on.clone();
    while !x.is_empty() {
        let level = level_trees.len() + 1;
        for &v in &x {
            top[v] = level as u32;
        }
        let d = sf_decomp(g, &on, &x, half)?;
        stats.max_decomp_depth = stats.max_decomp_depth.max(d.stats.max_depth);
        stats.game.absorb(&d.stats.game);
        if 2 * d.separator.len() > x.len() {
            stats.separator_sizes_ok = false;
        }
        level_trees.push(d.trees);
        x = d.separator;
    }
    let p = level_trees.len();

    let mut trees = Vec::new();
    let mut terminal_tree = vec![NONE; n];
    for (i, ts) in level_trees.into_iter().enumerate() {
        let level = i + 1;
        for t in ts {
            let terminals: Vec<usize> = t
                .vertices
                .iter()
                .copied()
                .filter(|&v| top[v] as usize == level)
                .collect();
            if terminals.is_empty() {
                continue;
            }
            for &v in &terminals {
                terminal_tree[v] = trees.len() as u32;
            }
            trees.push(SteinerTree {
                level,
                tree: t,
                terminals,
            });
        }
    }

    let mut components: Vec<Component> = Vec::new();
    let mut chain: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut uf = UnionFind::new(n);
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); p + 1];
    for &v in &on {
        by_level[top[v] as usize].push(v);
    }
    let mut active: Vec<usize> = Vec::new();
    for (level, vs) in by_level.iter().enumerate().take(p + 1).skip(1) {
        for &v in vs {
            for &w in g.neighbors(v) {
                let w = w as usize;
                if g.is_on(w) && top[w] as usize <= level {
                    uf.union(v, w);
                }
            }
        }
        active.extend_from_slice(&by_level[level]);
        active.sort_unstable();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        let first = components.len();
        for &v in &active {
            let r = uf.find(v);
            let id = *slot.entry(r).or_insert_with(|| {
                components.push(Component {
                    level,
                    vertices: Vec::new(),
                    terminals: Vec::new(),
                    parent: None,
                    children: Vec::new(),
                    tree: None,
                });
                components.len() - 1
            });
            components[id].vertices.push(v);
            if top[v] as usize == level {
                components[id].terminals.push(v);
            }
            chain[v].push(id as u32);
        }
        for &v in &active {
            if top[v] as usize != level {
                let below = chain[v][chain[v].len() - 2] as usize;
                let here = *chain[v].last().unwrap() as usize;
                if components[below].parent.is_none() {
                    components[below].parent = Some(here);
                    components[here].children.push(below);
                }
            }
        }
        for c in &mut components[first..] {
            if let Some(&t) = c.terminals.first() {
                c.tree = Some(terminal_tree[t] as usize);
            }
        }
    }

    let mut h = Hierarchy {
        n,
        levels: p,
        components,
        trees,
        terminal_level: top,
        chain,
        terminal_tree,
        stats,
    };
    h.stats.max_tree_degree = h.max_tree_degree();
    Ok(h)
}

/// Every way in which `h` fails to be a valid hierarchy of `g[V_on]`.
pub fn validate_hierarchy(g: &Graph, h: &Hierarchy) -> Vec<String> {
    let mut out = Vec::new();
    let n = g.n();
    let p = h.levels;
    let on = g.on_vertices();

    // (1) per-level disjointness, connectivity inside G_on, no crossing edges.
    let mut owner: Vec<Vec<u32>> = vec![vec![NONE; n]; p + 1];
    for (id, c) in h.components.iter().enumerate() {
        if c.level == 0 || c.level > p {
            out.push(format!("component {id} has level {}", c.level));
            continue;
        }
        for &v in &c.vertices {
            if v >= n || !g.is_on(v) {
                out.push(format!("component {id} holds non-on vertex {v}"));
                continue;
            }
            if owner[c.level][v] != NONE {
                out.push(format!("vertex {v} in two level-{} components", c.level));
            }
            owner[c.level][v] = id as u32;
        }
        let set: HashSet<usize> = c.vertices.iter().copied().collect();
        if let Some(&s) = c.vertices.first() {
            let mut seen = HashSet::from([s]);
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in g.neighbors(x) {
                    let y = y as usize;
                    if set.contains(&y) && seen.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
            if seen.len() != set.len() {
                out.push(format!("component {id} is not connected"));
            }
        } else {
            out.push(format!("component {id} is empty"));
        }
    }
    for (level, own) in owner.iter().enumerate().take(p + 1).skip(1) {
        for (u, v) in g.edges() {
            let (a, b) = (own[u], own[v]);
            if a != NONE && b != NONE && a != b {
                out.push(format!(
                    "edge ({u}, {v}) joins two level-{level} components"
                ));
            }
        }
    }
    if p > 0 {
        for &v in &on {
            if owner[p][v] == NONE {
                out.push(format!("vertex {v} missing from the top level"));
            }
        }
        let mut top_sets: Vec<Vec<usize>> = h
            .components
            .iter()
            .filter(|c| c.level == p)
            .map(|c| c.vertices.clone())
            .collect();
        top_sets.sort();
        let mut want = components_where(g, |v| g.is_on(v));
        want.sort();
        if top_sets != want {
            out.push("top level differs from the components of the on-subgraph".to_string());
        }
    } else if !on.is_empty() {
        out.push("no levels but on-vertices exist".to_string());
    }

    // (2) parents and (3) terminals.
    let mut term_owner = vec![NONE; n];
    for (id, c) in h.components.iter().enumerate() {
        match c.parent {
            None if c.level < p => out.push(format!("component {id} below the top lacks a parent")),
            Some(q) => {
                let pc = &h.components[q];
                if pc.level != c.level + 1 {
                    out.push(format!("component {id} has parent at level {}", pc.level));
                }
                let pset: HashSet<usize> = pc.vertices.iter().copied().collect();
                if !c.vertices.iter().all(|v| pset.contains(v)) {
                    out.push(format!("component {id} not inside its parent"));
                }
                if !pc.children.contains(&id) {
                    out.push(format!("component {id} missing from its parent's children"));
                }
            }
            None => {}
        }
        if c.level > 1 || !c.children.is_empty() {
            let mut inner: HashSet<usize> = HashSet::new();
            for &ch in &c.children {
                for &v in &h.components[ch].vertices {
                    if !inner.insert(v) {
                        out.push(format!("children of component {id} overlap at {v}"));
                    }
                }
            }
            let want: Vec<usize> = c
                .vertices
                .iter()
                .copied()
                .filter(|v| !inner.contains(v))
                .collect();
            if want != c.terminals {
                out.push(format!(
                    "terminals of component {id} are not V minus children"
                ));
            }
        } else if c.terminals != c.vertices {
            out.push(format!(
                "terminals of leaf component {id} differ from its vertices"
            ));
        }
        for &t in &c.terminals {
            if term_owner[t] != NONE {
                out.push(format!("vertex {t} is a terminal twice"));
            }
            term_owner[t] = id as u32;
            if h.terminal_level.get(t).copied() != Some(c.level as u32) {
                out.push(format!(
                    "terminal level of {t} disagrees with component {id}"
                ));
            }
        }
    }
    for &v in &on {
        if term_owner[v] == NONE {
            out.push(format!("vertex {v} is nobody's terminal"));
        }
    }
    // Components at lower levels must sit inside a component one level up.
    for level in 1..p {
        for &v in &on {
            if owner[level][v] != NONE && owner[level + 1][v] == NONE {
                out.push(format!("vertex {v} disappears above level {level}"));
            }
        }
    }

    // (4) tree disjointness per level and (5) tree terminals.
    let mut tree_owner: Vec<HashMap<usize, usize>> = vec![HashMap::new(); p + 1];
    let mut tterm_owner = vec![NONE; n];
    for (id, t) in h.trees.iter().enumerate() {
        if t.level == 0 || t.level > p {
            out.push(format!("tree {id} has level {}", t.level));
            continue;
        }
        for d in t.tree.defects(Some(g)) {
            out.push(format!("tree {id}: {d}"));
        }
        for &v in &t.tree.vertices {
            if v >= n || !g.is_on(v) {
                out.push(format!("tree {id} uses non-on vertex {v}"));
                continue;
            }
            if let Some(o) = tree_owner[t.level].insert(v, id) {
                out.push(format!("trees {o} and {id} share vertex {v}"));
            }
        }
        let want: Vec<usize> = t
            .tree
            .vertices
            .iter()
            .copied()
            .filter(|&v| v < n && h.terminal_level[v] as usize == t.level)
            .collect();
        if want != t.terminals {
            out.push(format!("terminals of tree {id} are not U_i ∩ V(tree)"));
        }
        for &v in &t.terminals {
            tterm_owner[v] = id as u32;
        }
    }
    for &v in &on {
        if tterm_owner[v] == NONE {
            out.push(format!("vertex {v} is on no tree's terminal set"));
        }
    }

    // (6) every component with terminals has a covering tree on its level.
    for (id, c) in h.components.iter().enumerate() {
        if c.terminals.is_empty() {
            continue;
        }
        match c.tree {
            None => out.push(format!("component {id} has terminals but no tree")),
            Some(t) => {
                let tr = &h.trees[t];
                if tr.level != c.level
                    || !c
                        .terminals
                        .iter()
                        .all(|v| tr.terminals.binary_search(v).is_ok())
                {
                    out.push(format!(
                        "tree {t} does not cover the terminals of component {id}"
                    ));
                }
            }
        }
    }

    // Per-vertex pointers.
    for &v in &on {
        let tl = h.terminal_level[v] as usize;
        if tl == 0 {
            continue;
        }
        if h.chain[v].len() != p + 1 - tl {
            out.push(format!("chain of {v} has wrong length"));
            continue;
        }
        for (k, &cid) in h.chain[v].iter().enumerate() {
            if owner[tl + k][v] != cid {
                out.push(format!("chain of {v} wrong at level {}", tl + k));
            }
        }
        if h.terminal_tree[v] != tterm_owner[v] {
            out.push(format!("terminal tree pointer of {v} is wrong"));
        }
    }
    out
}

/// Plain-text listing of levels, components and trees.
pub fn dump(h: &Hierarchy) -> String {
    let mut s = String::new();
    let list = |xs: &[usize]| {
        xs.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(s, "levels {}", h.levels).unwrap();
    for (id, c) in h.components.iter().enumerate() {
        let parent = c.parent.map_or("-".to_string(), |q| q.to_string());
        let tree = c.tree.map_or("-".to_string(), |t| t.to_string());
        writeln!(
            s,
            "component {id} level {} parent {parent} tree {tree} vertices [{}] terminals [{}]",
            c.level,
            list(&c.vertices),
            list(&c.terminals)
        )
        .unwrap();
    }
    for (id, t) in h.trees.iter().enumerate() {
        let edges: Vec<String> = t
            .tree
            .edges
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect();
        writeln!(
            s,
            "tree {id} level {} terminals [{}] edges [{}]",
            t.level,
            list(&t.terminals),
            edges.join(" ")
        )
        .unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn half() -> Rational {
        Rational::new(1, 2)
    }

    fn check_decomp(g: &Graph, vertices: &[usize], u: &[usize], d: &Decomposition) {
        let eps = half();
        assert!(Rational::from_integer(d.separator.len() as u64) <= eps * u.len() as u64);
        let xs: HashSet<usize> = d.separator.iter().copied().collect();
        let vs: HashSet<usize> = vertices.iter().copied().collect();
        let comps = components_where(g, |v| vs.contains(&v) && !xs.contains(&v));
        for comp in comps {
            let cu: Vec<usize> = comp.iter().copied().filter(|v| u.contains(v)).collect();
            if cu.is_empty() {
                continue;
            }
            let owners: Vec<&Tree> = d.trees.iter().filter(|t| t.contains(cu[0])).collect();
            assert_eq!(owners.len(), 1);
            let t = owners[0];
            assert!(t.defects(Some(g)).is_empty());
            assert!(cu.iter().all(|&v| t.contains(v)));
            assert!(t.vertices.iter().all(|v| comp.binary_search(v).is_ok()));
        }
    }

    #[test]
    fn singleton_terminal() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let d = sf_decomp(&g, &[0, 1, 2], &[1], half()).unwrap();
        assert!(d.separator.is_empty());
        assert_eq!(d.trees, vec![Tree::singleton(1)]);
    }

    #[test]
    fn isolated_pair_splits_for_free() {
        let g = Graph::empty(2);
        let d = sf_decomp(&g, &[0, 1], &[0, 1], half()).unwrap();
        assert!(d.separator.is_empty());
        assert_eq!(d.trees, vec![Tree::singleton(0), Tree::singleton(1)]);
    }

    #[test]
    fn path_of_sixteen() {
        let g = Graph::from_edges(16, (1..16).map(|i| (i - 1, i))).unwrap();
        let all: Vec<usize> = (0..16).collect();
        let d = sf_decomp(&g, &all, &all, half()).unwrap();
        assert!(d.separator.len() <= 8);
        check_decomp(&g, &all, &all, &d);
        assert_eq!(d.stats.game.contract_violations, 0);
    }

    #[test]
    fn random_decompositions_hold() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(2..40);
            let m = rng.gen_range(0..3 * n);
            let edges: Vec<(usize, usize)> = (0..m)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .filter(|(a, b)| a != b)
                .collect();
            let g = Graph::from_edges(n, edges).unwrap();
            let all: Vec<usize> = (0..n).collect();
            let u: Vec<usize> = all.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
            let d = sf_decomp(&g, &all, &u, half()).unwrap();
            check_decomp(&g, &all, &u, &d);
        }
    }

    #[test]
    fn empty_graph_has_no_levels() {
        let h = build_hierarchy(&Graph::empty(0)).unwrap();
        assert_eq!(h.levels, 0);
        assert!(h.components.is_empty());
    }

    #[test]
    fn single_vertex() {
        let g = Graph::empty(1);
        let h = build_hierarchy(&g).unwrap();
        assert_eq!(h.levels, 1);
        assert_eq!(h.components.len(), 1);
        assert_eq!(h.trees.len(), 1);
        assert_eq!(h.trees[0].tree, Tree::singleton(0));
        assert!(validate_hierarchy(&g, &h).is_empty());
    }

    #[test]
    fn star_of_eight_leaves() {
        let g = Graph::from_edges(9, (1..9).map(|l| (0, l))).unwrap();
        let h = build_hierarchy(&g).unwrap();
        assert!(
            validate_hierarchy(&g, &h).is_empty(),
            "{:?}",
            validate_hierarchy(&g, &h)
        );
        assert!(h.levels <= 5);
    }

    #[test]
    fn off_vertices_are_outside() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
            .unwrap()
            .with_off([2]);
        let h = build_hierarchy(&g).unwrap();
        assert!(validate_hierarchy(&g, &h).is_empty());
        assert_eq!(h.terminal_level[2], 0);
        assert_eq!(
            h.components.iter().filter(|c| c.level == h.levels).count(),
            2
        );
    }

    #[test]
    fn validator_catches_moved_vertex() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let mut h = build_hierarchy(&g).unwrap();
        assert!(validate_hierarchy(&g, &h).is_empty());
        let top = h.levels;
        let ids: Vec<usize> = (0..h.components.len())
            .filter(|&i| h.components[i].level == top)
            .collect();
        assert_eq!(ids.len(), 2);
        let v = h.components[ids[0]].vertices.pop().unwrap();
        h.components[ids[1]].vertices.push(v);
        h.components[ids[1]].vertices.sort_unstable();
        assert!(!validate_hierarchy(&g, &h).is_empty());
    }

    #[test]
    fn validator_catches_cut_tree() {
        let g = Graph::from_edges(16, (1..16).map(|i| (i - 1, i))).unwrap();
        let mut h = build_hierarchy(&g).unwrap();
        let t = h
            .trees
            .iter()
            .position(|t| !t.tree.edges.is_empty())
            .unwrap();
        h.trees[t].tree.edges.pop();
        assert!(!validate_hierarchy(&g, &h).is_empty());
    }

    #[test]
    fn random_hierarchies_validate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n = rng.gen_range(1..60);
            let m = rng.gen_range(0..3 * n);
            let edges: Vec<(usize, usize)> = (0..m)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .filter(|(a, b)| a != b)
                .collect();
            let off: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.2)).collect();
            let g = Graph::from_edges(n, edges).unwrap().with_off(off);
            let h = build_hierarchy(&g).unwrap();
            let v = validate_hierarchy(&g, &h);
            assert!(v.is_empty(), "{v:?}");
            let bound = ceil_log2(g.on_count().max(1)) as usize + 1;
            assert!(h.levels <= bound);
            assert!(h.stats.separator_sizes_ok);
        }
    }

    #[test]
    fn dump_lists_everything() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let h = build_hierarchy(&g).unwrap();
        let text = dump(&h);
        assert!(text.starts_with(&format!("levels {}", h.levels)));
        assert_eq!(
            text.lines().filter(|l| l.starts_with("tree ")).count(),
            h.trees.len()
        );
    }
}
