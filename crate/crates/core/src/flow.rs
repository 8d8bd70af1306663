//! Exact integral s-t max flow with vertex capacities.
//!
//! Vertices are split into an in-node and an out-node joined by an arc of the
//! vertex capacity; undirected edges become a pair of uncapacitated arcs.
//! Blocking flows are found Dinic-style with an explicit stack so that long
//! paths do not recurse.

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Capacity {
    Finite(u64),
    Infinite,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FlowError {
    #[error("source and sink are adjacent")]
    TerminalsAdjacent,
    #[error("source and sink must be distinct")]
    SameTerminal,
    #[error("node {0} has zero capacity")]
    ZeroCapacity(usize),
    #[error("node {0} has infinite capacity but is not a terminal")]
    UnexpectedInfinite(usize),
    #[error("terminal {0} must have infinite capacity")]
    FiniteTerminal(usize),
    #[error("edge endpoint {0} out of range")]
    NodeOutOfRange(usize),
    #[error("flow violates conservation at node {0}")]
    Conservation(usize),
    #[error("flow exceeds the capacity of node {0}")]
    OverCapacity(usize),
}

/// Undirected network with vertex capacities and a distinguished source/sink.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    caps: Vec<Capacity>,
    edges: Vec<(usize, usize)>,
    source: usize,
    sink: usize,
}

impl FlowNetwork {
    /// `n` nodes of capacity 1; source and sink are set to infinite capacity.
    pub fn new(n: usize, source: usize, sink: usize) -> Self {
        let mut caps = vec![Capacity::Finite(1); n];
        caps[source] = Capacity::Infinite;
        caps[sink] = Capacity::Infinite;
        FlowNetwork {
            caps,
            edges: Vec::new(),
            source,
            sink,
        }
    }

    pub fn set_capacity(&mut self, v: usize, c: Capacity) {
        self.caps[v] = c;
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> usize {
        self.edges.push((u, v));
        self.edges.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.caps.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn capacity(&self, v: usize) -> Capacity {
        self.caps[v]
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let n = self.caps.len();
        if self.source == self.sink {
            return Err(FlowError::SameTerminal);
        }
        for (v, &c) in self.caps.iter().enumerate() {
            let terminal = v == self.source || v == self.sink;
            match c {
                Capacity::Finite(0) => return Err(FlowError::ZeroCapacity(v)),
                Capacity::Finite(_) if terminal => return Err(FlowError::FiniteTerminal(v)),
                Capacity::Infinite if !terminal => return Err(FlowError::UnexpectedInfinite(v)),
                _ => {}
            }
        }
        for &(u, v) in &self.edges {
            for x in [u, v] {
                if x >= n {
                    return Err(FlowError::NodeOutOfRange(x));
                }
            }
            if (u == self.source && v == self.sink) || (u == self.sink && v == self.source) {
                return Err(FlowError::TerminalsAdjacent);
            }
        }
        Ok(())
    }
}

/// Net flow per edge, signed along the edge's stored orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralFlow {
    pub edge_flow: Vec<i64>,
    pub value: u64,
}

impl IntegralFlow {
    /// Flow routed through each node (inflow for non-terminals).
    pub fn throughput(&self, net: &FlowNetwork) -> Vec<u64> {
        let mut inflow = vec![0u64; net.node_count()];
        for (&(u, v), &f) in net.edges.iter().zip(&self.edge_flow) {
            if f > 0 {
                inflow[v] += f as u64;
            } else if f < 0 {
                inflow[u] += (-f) as u64;
            }
        }
        inflow
    }
}

/// Partition `(L, S, R)` of a node set with no edge between `L` and `R`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexCut {
    pub left: Vec<usize>,
    pub separator: Vec<usize>,
    pub right: Vec<usize>,
}

/// One unit of flow from source to sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowPath {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

const INF: i64 = i64::MAX / 4;

struct Residual {
    to: Vec<u32>,
    cap: Vec<i64>,
    start: Vec<usize>,
    order: Vec<u32>,
}

impl Residual {
    fn build(n_nodes: usize, arcs: &[(usize, usize, i64)]) -> Self {
        let mut to = Vec::with_capacity(arcs.len() * 2);
        let mut cap = Vec::with_capacity(arcs.len() * 2);
        let mut deg = vec![0usize; n_nodes + 1];
        for &(a, b, c) in arcs {
            to.push(b as u32);
            cap.push(c);
            to.push(a as u32);
            cap.push(0);
            deg[a] += 1;
            deg[b] += 1;
        }
        let mut start = vec![0usize; n_nodes + 1];
        for v in 0..n_nodes {
            start[v + 1] = start[v] + deg[v];
        }
        let mut fill = start.clone();
        let mut order = vec![0u32; to.len()];
        for a in 0..to.len() {
            let tail = to[a ^ 1] as usize;
            order[fill[tail]] = a as u32;
            fill[tail] += 1;
        }
        Residual {
            to,
            cap,
            start,
            order,
        }
    }

    fn bfs(&self, s: usize, level: &mut [i32]) {
        level.iter_mut().for_each(|l| *l = -1);
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.order[self.start[v]..self.start[v + 1]] {
                let a = a as usize;
                let w = self.to[a] as usize;
                if self.cap[a] > 0 && level[w] < 0 {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let n = self.start.len() - 1;
        let mut level = vec![-1i32; n];
        let mut it = vec![0usize; n];
        let mut path: Vec<usize> = Vec::new();
        let mut total = 0i64;
        loop {
            self.bfs(s, &mut level);
            if level[t] < 0 {
                return total;
            }
            it.copy_from_slice(&self.start[..n]);
            path.clear();
            let mut v = s;
            loop {
                if v == t {
                    let push = path.iter().map(|&a| self.cap[a]).min().unwrap_or(0);
                    for &a in &path {
                        self.cap[a] -= push;
                        self.cap[a ^ 1] += push;
                    }
                    total += push;
                    let cut = path.iter().position(|&a| self.cap[a] == 0).unwrap_or(0);
                    path.truncate(cut);
                    v = path.last().map_or(s, |&a| self.to[a] as usize);
                    continue;
                }
                let end = self.start[v + 1];
                let mut next = None;
                while it[v] < end {
                    let a = self.order[it[v]] as usize;
                    let w = self.to[a] as usize;
                    if self.cap[a] > 0 && level[w] == level[v] + 1 {
                        next = Some(a);
                        break;
                    }
                    it[v] += 1;
                }
                match next {
                    Some(a) => {
                        path.push(a);
                        v = self.to[a] as usize;
                    }
                    None => {
                        level[v] = -1;
                        match path.pop() {
                            None => break,
                            Some(a) => {
                                v = self.to[a ^ 1] as usize;
                                it[v] += 1;
                            }
                        }
                    }
                }
            }
        }
    }
}

#[inline]
fn node_in(v: usize) -> usize {
    2 * v
}

#[inline]
fn node_out(v: usize) -> usize {
    2 * v + 1
}

/// Maximum integral s-t flow and a minimum vertex cut `S` with `c(S) = value`.
///
/// `L` holds the nodes reachable from the source once `S` is deleted (the
/// source included); `R` holds everything else, the sink included.
pub fn max_flow_vertex_capacitated(
    net: &FlowNetwork,
) -> Result<(IntegralFlow, VertexCut), FlowError> {
    net.validate()?;
    let n = net.node_count();
    let mut arcs = Vec::with_capacity(n + 2 * net.edges.len());
    for (v, &c) in net.caps.iter().enumerate() {
        let c = match c {
            Capacity::Finite(c) => c.min(INF as u64) as i64,
            Capacity::Infinite => INF,
        };
        arcs.push((node_in(v), node_out(v), c));
    }
    for &(u, v) in &net.edges {
        arcs.push((node_out(u), node_in(v), INF));
        arcs.push((node_out(v), node_in(u), INF));
    }
    let mut res = Residual::build(2 * n, &arcs);
    let value = res.max_flow(node_in(net.source), node_out(net.sink)) as u64;

    // Arc ids: node arc for v is 2v, edge i contributes arcs 2(n+2i) and 2(n+2i+1).
    let edge_flow = (0..net.edges.len())
        .map(|i| {
            let fwd = 2 * (n + 2 * i);
            let bwd = 2 * (n + 2 * i + 1);
            (INF - res.cap[fwd]) - (INF - res.cap[bwd])
        })
        .collect();

    let mut level = vec![-1i32; 2 * n];
    res.bfs(node_in(net.source), &mut level);
    let reach = |x: usize| level[x] >= 0;
    let in_separator: Vec<bool> = (0..n)
        .map(|v| reach(node_in(v)) && !reach(node_out(v)))
        .collect();

    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &net.edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut left = vec![false; n];
    left[net.source] = true;
    let mut queue = VecDeque::from([net.source]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !left[y] && !in_separator[y] {
                left[y] = true;
                queue.push_back(y);
            }
        }
    }
    let mut cut = VertexCut::default();
    for v in 0..n {
        if in_separator[v] {
            cut.separator.push(v);
        } else if left[v] {
            cut.left.push(v);
        } else {
            cut.right.push(v);
        }
    }
    debug_assert!(!left[net.sink]);
    Ok((IntegralFlow { edge_flow, value }, cut))
}

/// Strips `value(f)` unit source-sink paths out of `f`. Flow circulations are
/// cancelled on the way, so every returned path is simple.
pub fn decompose_flow_paths(
    net: &FlowNetwork,
    f: &IntegralFlow,
) -> Result<Vec<FlowPath>, FlowError> {
    let n = net.node_count();
    let (s, t) = (net.source, net.sink);
    let mut balance = vec![0i64; n];
    for (&(u, v), &x) in net.edges.iter().zip(&f.edge_flow) {
        balance[u] -= x;
        balance[v] += x;
    }
    for (v, &bal) in balance.iter().enumerate() {
        let expected = if v == s {
            -(f.value as i64)
        } else if v == t {
            f.value as i64
        } else {
            0
        };
        if bal != expected {
            return Err(FlowError::Conservation(v));
        }
    }
    for (v, &through) in f.throughput(net).iter().enumerate() {
        if let Capacity::Finite(c) = net.caps[v] {
            if through > c {
                return Err(FlowError::OverCapacity(v));
            }
        }
    }

    // Directed arcs carrying flow, grouped by tail.
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut remaining = vec![0i64; net.edges.len()];
    for (i, (&(u, v), &x)) in net.edges.iter().zip(&f.edge_flow).enumerate() {
        if x > 0 {
            out[u].push((i, v));
        } else if x < 0 {
            out[v].push((i, u));
        }
        remaining[i] = x.abs();
    }
    let mut ptr = vec![0usize; n];
    let mut on_path = vec![usize::MAX; n];
    let mut paths = Vec::with_capacity(f.value as usize);

    for _ in 0..f.value {
        let mut nodes = vec![s];
        let mut edges: Vec<usize> = Vec::new();
        on_path[s] = 0;
        while *nodes.last().unwrap() != t {
            let x = *nodes.last().unwrap();
            while ptr[x] < out[x].len() && remaining[out[x][ptr[x]].0] == 0 {
                ptr[x] += 1;
            }
            // Conservation guarantees an outgoing arc with flow left.
            let (e, y) = out[x][ptr[x]];
            if on_path[y] != usize::MAX {
                // Cancel the cycle y -> ... -> x -> y.
                let at = on_path[y];
                let cyc: Vec<usize> = edges[at..].iter().copied().chain([e]).collect();
                let amount = cyc.iter().map(|&c| remaining[c]).min().unwrap();
                for c in cyc {
                    remaining[c] -= amount;
                }
                for &w in &nodes[at + 1..] {
                    on_path[w] = usize::MAX;
                }
                nodes.truncate(at + 1);
                edges.truncate(at);
                continue;
            }
            on_path[y] = nodes.len();
            nodes.push(y);
            edges.push(e);
        }
        for &e in &edges {
            remaining[e] -= 1;
        }
        for &w in &nodes {
            on_path[w] = usize::MAX;
        }
        paths.push(FlowPath { nodes, edges });
    }
    Ok(paths)
}
