//! Undirected weighted graphs with nonnegative edge weights, plus the handful
//! of exact primitives everything else is built on: MST, all-pairs shortest
//! paths, filtered Dijkstra and a canonical shortest-path extractor.

use crate::error::{invalid, precondition, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    /// The endpoint that is not `x`; panics if `x` is not an endpoint.
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            debug_assert_eq!(x, self.v);
            self.u
        }
    }
}

/// Immutable weighted graph. Construction canonicalizes edges to `u < v`,
/// sorts them by `(u, v)` and rejects loops, parallel edges, negative or
/// non-finite weights, and disconnected inputs. All later stages rely on
/// this canonical edge order for determinism.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>, // vertex -> [(neighbor, edge id)]
}

impl WeightedGraph {
    pub fn new(n: usize, raw: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("graph must have at least one vertex"));
        }
        let mut edges = Vec::with_capacity(raw.len());
        for (u, v, w) in raw {
            if u == v {
                return Err(invalid(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(invalid(format!("edge ({u},{v}) has bad weight {w}")));
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            edges.push(Edge { u, v, w });
        }
        edges.sort_by(|a, b| (a.u, a.v).cmp(&(b.u, b.v)));
        for pair in edges.windows(2) {
            if pair[0].u == pair[1].u && pair[0].v == pair[1].v {
                return Err(invalid(format!(
                    "parallel edge ({},{})",
                    pair[0].u, pair[0].v
                )));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        let g = WeightedGraph { n, edges, adj };
        if !g.is_connected() {
            return Err(invalid("graph is not connected"));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adj[u]
    }

    /// Edge id for the pair `{u, v}`, if present.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].iter().find(|&&(x, _)| x == b).map(|&(_, id)| id)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|a| a.len()).max().unwrap_or(0)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.n
    }

    /// A copy of the graph with one edge removed. Fails if removing the edge
    /// disconnects the graph.
    pub fn without_edge(&self, u: usize, v: usize) -> Result<WeightedGraph> {
        let id = self
            .edge_between(u, v)
            .ok_or_else(|| precondition(format!("no edge ({u},{v}) to remove")))?;
        let raw = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != id)
            .map(|(_, e)| (e.u, e.v, e.w))
            .collect();
        WeightedGraph::new(self.n, raw)
    }

    /// Minimum spanning tree via Kruskal. Ties are broken by the canonical
    /// `(weight, u, v)` order, so the result is unique and deterministic.
    pub fn mst(&self) -> EdgeSubgraph {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by(|&a, &b| {
            let ea = &self.edges[a];
            let eb = &self.edges[b];
            ea.w.total_cmp(&eb.w).then((ea.u, ea.v).cmp(&(eb.u, eb.v)))
        });
        let mut dsu = Dsu::new(self.n);
        let mut picked = Vec::with_capacity(self.n.saturating_sub(1));
        for id in order {
            let e = &self.edges[id];
            if dsu.union(e.u, e.v) {
                picked.push(id);
                if picked.len() + 1 == self.n {
                    break;
                }
            }
        }
        picked.sort_unstable();
        EdgeSubgraph::new(picked)
    }

    /// All-pairs shortest path distances (dense cubic recurrence over
    /// intermediate vertices).
    pub fn apsp(&self) -> DistanceMatrix {
        let n = self.n;
        let mut d = vec![f64::INFINITY; n * n];
        for i in 0..n {
            d[i * n + i] = 0.0;
        }
        for e in &self.edges {
            let cur = d[e.u * n + e.v];
            if e.w < cur {
                d[e.u * n + e.v] = e.w;
                d[e.v * n + e.u] = e.w;
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = d[i * n + k];
                if !dik.is_finite() {
                    continue;
                }
                for j in 0..n {
                    let via = dik + d[k * n + j];
                    if via < d[i * n + j] {
                        d[i * n + j] = via;
                    }
                }
            }
        }
        DistanceMatrix { n, d }
    }

    /// Dijkstra from `src`, optionally restricted to edges where
    /// `active[edge id]` holds, and optionally abandoning labels strictly
    /// above `cap`. Unreached vertices get `f64::INFINITY`.
    pub fn dijkstra(&self, src: usize, active: Option<&[bool]>, cap: Option<f64>) -> Vec<f64> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        let mut dist = vec![f64::INFINITY; self.n];
        dist[src] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse(HeapKey {
            d: 0.0,
            h: 0,
            v: src,
        }));
        while let Some(Reverse(HeapKey { d, v, .. })) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(y, eid) in &self.adj[v] {
                if let Some(mask) = active {
                    if !mask[eid] {
                        continue;
                    }
                }
                let nd = d + self.edges[eid].w;
                if let Some(c) = cap {
                    if nd > c {
                        continue;
                    }
                }
                if nd < dist[y] {
                    dist[y] = nd;
                    heap.push(Reverse(HeapKey { d: nd, h: 0, v: y }));
                }
            }
        }
        dist
    }

    /// The canonical shortest path between `u` and `v`: among all shortest
    /// paths, prefer fewer edges, then smaller parent ids along a search
    /// rooted at `min(u, v)`. Hop counting keeps the choice well defined even
    /// when zero-weight edges create ties; the result is always simple.
    pub fn canonical_shortest_path(&self, u: usize, v: usize) -> Result<Vec<usize>> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        if u == v || u >= self.n || v >= self.n {
            return Err(precondition(format!("bad path endpoints ({u},{v})")));
        }
        let root = u.min(v);
        let goal = u.max(v);
        let mut best: Vec<(f64, u32, usize)> = vec![(f64::INFINITY, u32::MAX, usize::MAX); self.n];
        best[root] = (0.0, 0, root);
        let mut heap = BinaryHeap::new();
        heap.push(Reverse(HeapKey {
            d: 0.0,
            h: 0,
            v: root,
        }));
        while let Some(Reverse(HeapKey { d, h, v })) = heap.pop() {
            if (d, h) != (best[v].0, best[v].1) {
                continue;
            }
            for &(y, eid) in &self.adj[v] {
                let nd = d + self.edges[eid].w;
                let nh = h + 1;
                let cand = (nd, nh, v);
                let cur = best[y];
                let better = match nd.total_cmp(&cur.0) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => (nh, v) < (cur.1, cur.2),
                };
                if better {
                    best[y] = cand;
                    heap.push(Reverse(HeapKey { d: nd, h: nh, v: y }));
                }
            }
        }
        if !best[goal].0.is_finite() {
            return Err(precondition(format!("no path between {u} and {v}")));
        }
        let mut path = vec![goal];
        let mut cur = goal;
        while cur != root {
            cur = best[cur].2;
            path.push(cur);
        }
        if path[0] != u {
            path.reverse();
        }
        debug_assert_eq!(path[0], u);
        debug_assert_eq!(*path.last().unwrap(), v);
        Ok(path)
    }

    /// Total weight of a vertex path; errors if a hop is not an edge.
    pub fn path_weight(&self, path: &[usize]) -> Result<f64> {
        let mut total = 0.0;
        for pair in path.windows(2) {
            let id = self
                .edge_between(pair[0], pair[1])
                .ok_or_else(|| invalid(format!("path hop ({},{}) is not an edge", pair[0], pair[1])))?;
            total += self.edges[id].w;
        }
        Ok(total)
    }
}

/// Heap key ordered by `(distance, hops, vertex)`; weights are always finite
/// so `total_cmp` gives a proper total order.
#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapKey {
    d: f64,
    h: u32,
    v: usize,
}

impl Eq for HeapKey {}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.d
            .total_cmp(&other.d)
            .then(self.h.cmp(&other.h))
            .then(self.v.cmp(&other.v))
    }
}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Symmetric matrix of pairwise distances.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.d[u * self.n + v]
    }
}

/// A subset of a host graph's edges, stored as sorted edge ids. The host is
/// passed explicitly to the operations that need weights or endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSubgraph {
    ids: Vec<usize>,
}

impl EdgeSubgraph {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        EdgeSubgraph { ids }
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    pub fn weight(&self, g: &WeightedGraph) -> f64 {
        self.ids.iter().map(|&id| g.edge(id).w).sum()
    }

    /// Membership mask over all edges of `g`.
    pub fn mask(&self, g: &WeightedGraph) -> Vec<bool> {
        let mut mask = vec![false; g.m()];
        for &id in &self.ids {
            mask[id] = true;
        }
        mask
    }

    pub fn is_spanning(&self, g: &WeightedGraph) -> bool {
        let mut dsu = Dsu::new(g.n());
        let mut parts = g.n();
        for &id in &self.ids {
            let e = g.edge(id);
            if dsu.union(e.u, e.v) {
                parts -= 1;
            }
        }
        parts == 1
    }
}

#[derive(Debug)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    /// Returns true if the two components were merged (i.e. were distinct).
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}
