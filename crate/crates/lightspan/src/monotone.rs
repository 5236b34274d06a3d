//! Monotone spanning trees of completed interval instances: trees in which
//! every path away from the root moves strictly rightward in the interval
//! order. Two constructions are provided: a recursive one that follows the
//! shortest-path/MST decomposition argument, and a per-vertex greedy one that
//! is provably the lightest monotone tree.

use crate::error::{precondition, Error, Result};
use crate::graph::{Dsu, EdgeSubgraph, WeightedGraph};
use crate::interval::IntervalRepresentation;

/// A spanning tree given by a parent array; the root is its own parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<usize>,
    root: usize,
}

impl RootedTree {
    /// Certify that `parent` describes a tree: the root maps to itself and
    /// every vertex reaches the root without revisiting anything.
    pub fn new(parent: Vec<usize>, root: usize) -> Result<Self> {
        let n = parent.len();
        if root >= n || parent[root] != root {
            return Err(precondition("root must be its own parent"));
        }
        if let Some(v) = parent.iter().position(|&p| p >= n) {
            return Err(precondition(format!("vertex {v} has out-of-range parent")));
        }
        let mut state = vec![0u8; n];
        state[root] = 2;
        for start in 0..n {
            let mut trail = Vec::new();
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                trail.push(v);
                v = parent[v];
            }
            if state[v] == 1 {
                return Err(precondition(format!(
                    "parent array contains a cycle through vertex {v}"
                )));
            }
            for x in trail {
                state[x] = 2;
            }
        }
        Ok(RootedTree { parent, root })
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    /// Parent of `v`, or `None` for the root.
    pub fn parent(&self, v: usize) -> Option<usize> {
        if v == self.root {
            None
        } else {
            Some(self.parent[v])
        }
    }

    /// Children of every vertex, each list ascending by child id.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.parent.len()];
        for v in 0..self.parent.len() {
            if v != self.root {
                out[self.parent[v]].push(v);
            }
        }
        out
    }

    /// The tree's edges as ids in `g`; errors if some parent link is not an
    /// edge of `g`.
    pub fn edge_ids(&self, g: &WeightedGraph) -> Result<EdgeSubgraph> {
        if g.n() != self.n() {
            return Err(precondition("tree and graph disagree on vertex count"));
        }
        let mut ids = Vec::with_capacity(self.n().saturating_sub(1));
        for v in 0..self.n() {
            if v == self.root {
                continue;
            }
            let id = g.edge_between(v, self.parent[v]).ok_or_else(|| {
                precondition(format!("tree link ({v},{}) is not an edge", self.parent[v]))
            })?;
            ids.push(id);
        }
        Ok(EdgeSubgraph::new(ids))
    }

    pub fn weight(&self, g: &WeightedGraph) -> Result<f64> {
        Ok(self.edge_ids(g)?.weight(g))
    }
}

/// True when every non-root vertex's parent starts strictly earlier in the
/// interval order, i.e. every root-to-leaf path moves rightward.
pub fn is_monotone(t: &RootedTree, iv: &IntervalRepresentation) -> bool {
    (0..t.n()).all(|v| match t.parent(v) {
        None => true,
        Some(p) => iv.left(p) < iv.left(v),
    })
}

/// Error unless `g` is completed with respect to `iv`: an edge exists exactly
/// between the pairs whose intervals intersect.
pub(crate) fn require_completed(g: &WeightedGraph, iv: &IntervalRepresentation) -> Result<()> {
    if g.n() != iv.n() {
        return Err(precondition("graph and interval representation sizes differ"));
    }
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            let has = g.edge_between(u, v).is_some();
            if has != iv.intersects(u, v) {
                return Err(precondition(format!(
                    "instance is not completed: pair ({u},{v}) {} an edge but intervals {}",
                    if has { "has" } else { "lacks" },
                    if iv.intersects(u, v) { "intersect" } else { "are disjoint" },
                )));
            }
        }
    }
    Ok(())
}

/// Lightest spanning tree subject to monotonicity. Valid parents of `v` are
/// exactly the vertices whose interval covers `left(v)`, and choosing each
/// vertex's cheapest valid parent (ties to the smaller id) can never create a
/// cycle, so the per-vertex minima are simultaneously attainable and the
/// result is exactly optimal.
pub fn lightest_monotone_tree(
    g: &WeightedGraph,
    iv: &IntervalRepresentation,
) -> Result<RootedTree> {
    require_completed(g, iv)?;
    let n = g.n();
    let root = iv.leftmost(None);
    let mut parent = vec![usize::MAX; n];
    parent[root] = root;
    for v in 0..n {
        if v == root {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for p in 0..n {
            if p == v || !(iv.left(p) < iv.left(v) && iv.left(v) <= iv.right(p)) {
                continue;
            }
            let id = g
                .edge_between(v, p)
                .expect("completed instance joins intersecting intervals");
            let w = g.edge(id).w;
            if best.map_or(true, |(bw, bp)| w < bw || (w == bw && p < bp)) {
                best = Some((w, p));
            }
        }
        match best {
            Some((_, p)) => parent[v] = p,
            None => {
                return Err(Error::Certification(format!(
                    "vertex {v} is introduced with no earlier interval covering it"
                )))
            }
        }
    }
    RootedTree::new(parent, root)
}

/// MST of the subgraph induced by `sub` (assumed connected there), as edge
/// ids of `g`.
fn induced_mst(g: &WeightedGraph, sub: &[usize]) -> Vec<usize> {
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in sub.iter().enumerate() {
        index[v] = i;
    }
    let mut ids: Vec<usize> = (0..g.m())
        .filter(|&id| {
            let e = g.edge(id);
            index[e.u] != usize::MAX && index[e.v] != usize::MAX
        })
        .collect();
    ids.sort_by(|&a, &b| {
        let (x, y) = (g.edge(a), g.edge(b));
        x.w.total_cmp(&y.w).then(x.u.cmp(&y.u)).then(x.v.cmp(&y.v))
    });
    let mut dsu = Dsu::new(sub.len());
    let mut out = Vec::with_capacity(sub.len().saturating_sub(1));
    for id in ids {
        let e = g.edge(id);
        if dsu.union(index[e.u], index[e.v]) {
            out.push(id);
        }
    }
    out
}

/// Shortest strictly-rightward path from `from` to `to` inside `sub`,
/// as a vertex sequence. Vertices are relaxed in interval order, so this is a
/// plain DAG shortest path; ties prefer the smaller predecessor id.
fn monotone_shortest_path(
    g: &WeightedGraph,
    iv: &IntervalRepresentation,
    sub: &[usize],
    from: usize,
    to: usize,
) -> Option<(Vec<usize>, f64)> {
    let mut order: Vec<usize> = sub.to_vec();
    order.sort_by_key(|&v| iv.left(v));
    let mut dist = vec![f64::INFINITY; g.n()];
    let mut pred = vec![usize::MAX; g.n()];
    dist[from] = 0.0;
    for (i, &v) in order.iter().enumerate() {
        if !dist[v].is_finite() {
            continue;
        }
        for &u in &order[i + 1..] {
            if let Some(id) = g.edge_between(v, u) {
                let nd = dist[v] + g.edge(id).w;
                if nd < dist[u] || (nd == dist[u] && v < pred[u]) {
                    dist[u] = nd;
                    pred[u] = v;
                }
            }
        }
    }
    if !dist[to].is_finite() {
        return None;
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = pred[cur];
        path.push(cur);
    }
    path.reverse();
    Some((path, dist[to]))
}

/// Build a monotone spanning tree recursively: take the shortest rightward
/// path from the leftmost to the rightmost-starting vertex, compute the MST
/// of the piece, and hang every remaining MST component off the path at the
/// interval covering the component's leftmost vertex, recursing inside the
/// component. On completed instances the rightward path is certified to be a
/// genuine shortest path.
pub fn monotone_tree_recursive(
    g: &WeightedGraph,
    iv: &IntervalRepresentation,
) -> Result<RootedTree> {
    require_completed(g, iv)?;
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let root = iv.leftmost(None);
    parent[root] = root;
    let all: Vec<usize> = (0..n).collect();
    build_recursive(g, iv, &all, &mut parent)?;
    RootedTree::new(parent, root)
}

fn build_recursive(
    g: &WeightedGraph,
    iv: &IntervalRepresentation,
    sub: &[usize],
    parent: &mut [usize],
) -> Result<()> {
    if sub.len() <= 1 {
        return Ok(());
    }
    let l = iv.leftmost(Some(sub));
    let r = iv.rightmost_start(Some(sub));
    let (p1, mono_dist) = monotone_shortest_path(g, iv, sub, l, r).ok_or_else(|| {
        Error::Certification(format!("no rightward path from {l} to {r}"))
    })?;
    // the rightward path must already be shortest; anything else means the
    // instance was not a completed connected interval graph
    let mut in_sub = vec![false; g.n()];
    for &v in sub {
        in_sub[v] = true;
    }
    let active: Vec<bool> = (0..g.m())
        .map(|id| {
            let e = g.edge(id);
            in_sub[e.u] && in_sub[e.v]
        })
        .collect();
    let free = g.dijkstra(l, Some(&active), None)[r];
    if mono_dist > free + 1e-9 * free.max(1.0) {
        return Err(Error::Certification(format!(
            "rightward path {l}->{r} weighs {mono_dist} but the shortest is {free}"
        )));
    }
    for hop in p1.windows(2) {
        parent[hop[1]] = hop[0];
    }
    let on_path = {
        let mut m = vec![false; g.n()];
        for &v in &p1 {
            m[v] = true;
        }
        m
    };
    // components of the induced MST with the path vertices deleted
    let mst = induced_mst(g, sub);
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in sub.iter().enumerate() {
        index[v] = i;
    }
    let mut dsu = Dsu::new(sub.len());
    for &id in &mst {
        let e = g.edge(id);
        if !on_path[e.u] && !on_path[e.v] {
            dsu.union(index[e.u], index[e.v]);
        }
    }
    let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for &v in sub {
        if !on_path[v] {
            comps.entry(dsu.find(index[v])).or_default().push(v);
        }
    }
    for comp in comps.values() {
        let x = iv.leftmost(Some(comp));
        // attach at the cheapest path vertex whose interval covers left(x)
        let mut best: Option<(f64, usize)> = None;
        for &p in &p1 {
            if iv.left(p) < iv.left(x) && iv.left(x) <= iv.right(p) {
                let id = g
                    .edge_between(x, p)
                    .expect("completed instance joins intersecting intervals");
                let w = g.edge(id).w;
                if best.map_or(true, |(bw, bp)| w < bw || (w == bw && p < bp)) {
                    best = Some((w, p));
                }
            }
        }
        let (_, p) = best.ok_or_else(|| {
            Error::Certification(format!(
                "no path interval covers the start of component vertex {x}"
            ))
        })?;
        parent[x] = p;
        build_recursive(g, iv, comp, parent)?;
    }
    Ok(())
}
