//! Instance generators: seeded random graphs with a sliding-window path
//! decomposition, and the recursive lower-bound family whose lightest
//! decomposition-monotone spanning tree grows heavier with depth while the
//! minimum spanning tree stays fixed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use crate::decomposition::PathDecomposition;
use crate::error::{invalid, Result};
use crate::graph::WeightedGraph;

/// Weight distribution for random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// Uniform real weights in `[0.1, 10)`.
    Uniform,
    /// Uniform integer weights in `1..=20`; produces many ties.
    Integer,
    /// Powers of two `2^0 .. 2^6`; produces a wide spread.
    Skewed,
}

impl std::str::FromStr for WeightKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(WeightKind::Uniform),
            "integer" => Ok(WeightKind::Integer),
            "skewed" => Ok(WeightKind::Skewed),
            other => Err(format!(
                "unknown weight kind {other:?} (expected uniform, integer, or skewed)"
            )),
        }
    }
}

impl std::fmt::Display for WeightKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WeightKind::Uniform => "uniform",
            WeightKind::Integer => "integer",
            WeightKind::Skewed => "skewed",
        })
    }
}

/// Parameters for [`gen_random`].
#[derive(Debug, Clone, Copy)]
pub struct GenSpec {
    /// Window size minus one; the decomposition width is exactly this.
    pub width: usize,
    /// Number of bags; the graph has `bags + width` vertices.
    pub bags: usize,
    pub seed: u64,
    /// Probability that each non-path window pair becomes an edge.
    pub density: f64,
    pub weights: WeightKind,
}

/// Generate a connected graph together with the sliding-window path
/// decomposition it was built on: bag `i` is `{i, ..., i + width}`. The path
/// `0-1-...-n-1` is always present so the result is connected; every other
/// pair inside a common window is included with probability `density`.
/// Fully deterministic in the parameters.
pub fn gen_random(spec: &GenSpec) -> Result<(WeightedGraph, PathDecomposition)> {
    if spec.width == 0 {
        return Err(invalid("width must be at least 1"));
    }
    if spec.bags == 0 {
        return Err(invalid("bag count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&spec.density) {
        return Err(invalid(format!(
            "density must lie in [0, 1], got {}",
            spec.density
        )));
    }
    let n = spec.bags + spec.width;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let draw = |rng: &mut ChaCha8Rng| -> f64 {
        match spec.weights {
            WeightKind::Uniform => rng.gen_range(0.1..10.0),
            WeightKind::Integer => rng.gen_range(1..=20) as f64,
            WeightKind::Skewed => (2.0_f64).powi(rng.gen_range(0..7)),
        }
    };
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for u in 0..n - 1 {
        let w = draw(&mut rng);
        edges.push((u, u + 1, w));
    }
    for u in 0..n {
        for v in u + 2..n.min(u + spec.width + 1) {
            if rng.gen::<f64>() < spec.density {
                let w = draw(&mut rng);
                edges.push((u, v, w));
            }
        }
    }
    let g = WeightedGraph::new(n, edges)?;
    let bags = (0..spec.bags).map(|i| (i..=i + spec.width).collect()).collect();
    Ok((g, PathDecomposition::new(bags)))
}

/// A member of the lower-bound family: the graph, the binary tree
/// decomposition it is built around, and enough structure to measure the
/// lightest decomposition-monotone spanning tree against the MST.
#[derive(Debug, Clone)]
pub struct LowerBoundInstance {
    pub graph: WeightedGraph,
    pub depth: usize,
    /// Number of nodes of the decomposition tree (preorder ids, root 0).
    pub tree_nodes: usize,
    /// Parent-child pairs of the decomposition tree.
    pub tree_edges: Vec<(usize, usize)>,
    /// Bag of each decomposition-tree node.
    pub tree_bags: Vec<Vec<usize>>,
    /// For each graph vertex, the tree node nearest the root whose bag
    /// contains it.
    pub top_node: Vec<usize>,
    /// Edge ids of the heavy spine: the Hamiltonian path the instance is
    /// threaded on, which is also its unique minimum spanning tree.
    pub spine: Vec<usize>,
}

/// Result of measuring a lower-bound instance.
#[derive(Debug, Clone)]
pub struct LowerBoundMeasurement {
    /// Parent of each vertex in the lightest monotone tree (root maps to
    /// itself).
    pub parent: Vec<usize>,
    pub root: usize,
    pub tree_weight: f64,
    pub mst_weight: f64,
    pub ratio: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    X,
    B,
    Y,
    U,
    V,
}

struct Builder {
    /// children[node] = None for leaves.
    children: Vec<Option<(usize, usize)>>,
}

impl Builder {
    fn build(&mut self, depth: usize) -> usize {
        let id = self.children.len();
        self.children.push(None);
        if depth > 0 {
            let l = self.build(depth - 1);
            let r = self.build(depth - 1);
            self.children[id] = Some((l, r));
        }
        id
    }

    fn seg(&self, node: usize, out: &mut Vec<(usize, Role)>) {
        match self.children[node] {
            None => {
                out.push((node, Role::U));
                out.push((node, Role::V));
            }
            Some((l, r)) => {
                out.push((node, Role::X));
                self.seg(l, out);
                out.push((node, Role::B));
                self.seg(r, out);
                out.push((node, Role::Y));
            }
        }
    }
}

/// Build the depth-`d` lower-bound instance. The graph is threaded on a
/// Hamiltonian spine: each leaf of a complete binary tree of depth `d`
/// contributes a unit-weight edge, and all connecting edges weigh zero; every
/// pair of vertices sharing a bag is joined by an edge weighing exactly their
/// spine distance. The spine is the unique MST, of weight `2^d`, while every
/// spanning tree that picks each vertex's parent inside the vertex's topmost
/// bag must pay roughly `(d+1)/2` times that.
pub fn gen_lowerbound(depth: usize) -> Result<LowerBoundInstance> {
    if depth == 0 || depth > 20 {
        return Err(invalid(format!("depth must lie in 1..=20, got {depth}")));
    }
    let mut b = Builder { children: Vec::new() };
    let root = b.build(depth);
    debug_assert_eq!(root, 0);
    let mut seq: Vec<(usize, Role)> = Vec::new();
    b.seg(root, &mut seq);

    // leaf vertices take the low ids, in spine order; internal vertices follow
    let n = seq.len();
    let mut id_of = vec![usize::MAX; n];
    let mut next = 0usize;
    for (pos, &(_, role)) in seq.iter().enumerate() {
        if matches!(role, Role::U | Role::V) {
            id_of[pos] = next;
            next += 1;
        }
    }
    for (pos, &(_, role)) in seq.iter().enumerate() {
        if !matches!(role, Role::U | Role::V) {
            id_of[pos] = next;
            next += 1;
        }
    }

    // prefix spine weight by position: unit edges sit inside leaves
    let mut prefix = vec![0.0f64; n];
    for pos in 1..n {
        let heavy = seq[pos - 1].1 == Role::U && seq[pos].1 == Role::V;
        prefix[pos] = prefix[pos - 1] + if heavy { 1.0 } else { 0.0 };
    }

    // bags: own vertices plus, for each child, the two parent-side endpoints
    // of the zero edges stitching the child segment in
    let nodes = b.children.len();
    let mut vert_of: Vec<BTreeMap<char, usize>> = vec![BTreeMap::new(); nodes];
    for (pos, &(node, role)) in seq.iter().enumerate() {
        let c = match role {
            Role::X => 'x',
            Role::B => 'b',
            Role::Y => 'y',
            Role::U => 'u',
            Role::V => 'v',
        };
        vert_of[node].insert(c, id_of[pos]);
    }
    let mut bags: Vec<Vec<usize>> = (0..nodes)
        .map(|i| vert_of[i].values().copied().collect())
        .collect();
    let mut tree_edges = Vec::new();
    for i in 0..nodes {
        if let Some((l, r)) = b.children[i] {
            tree_edges.push((i, l));
            tree_edges.push((i, r));
            bags[l].push(vert_of[i][&'x']);
            bags[l].push(vert_of[i][&'b']);
            bags[r].push(vert_of[i][&'b']);
            bags[r].push(vert_of[i][&'y']);
        }
    }
    for bag in &mut bags {
        bag.sort_unstable();
    }

    // edges: consecutive spine pairs, then completions for every other
    // bag-cohabiting pair at exact spine distance
    let mut pos_of = vec![usize::MAX; n];
    for (pos, &id) in id_of.iter().enumerate() {
        pos_of[id] = pos;
    }
    let mut edge_w: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut spine_pairs = Vec::new();
    for pos in 1..n {
        let (a, bb) = (id_of[pos - 1], id_of[pos]);
        let key = (a.min(bb), a.max(bb));
        edge_w.insert(key, prefix[pos] - prefix[pos - 1]);
        spine_pairs.push(key);
    }
    for bag in &bags {
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                edge_w
                    .entry((u, v))
                    .or_insert_with(|| (prefix[pos_of[u]] - prefix[pos_of[v]]).abs());
            }
        }
    }
    let raw: Vec<(usize, usize, f64)> = edge_w.iter().map(|(&(u, v), &w)| (u, v, w)).collect();
    let graph = WeightedGraph::new(n, raw)?;
    let spine: Vec<usize> = spine_pairs
        .iter()
        .map(|&(u, v)| graph.edge_between(u, v).expect("spine pair is an edge"))
        .collect();

    // additions only push parent vertices down, so every vertex tops out at
    // its own node
    let mut top_node = vec![usize::MAX; n];
    for (node, vs) in vert_of.iter().enumerate() {
        for &id in vs.values() {
            top_node[id] = node;
        }
    }

    let inst = LowerBoundInstance {
        graph,
        depth,
        tree_nodes: nodes,
        tree_edges,
        tree_bags: bags,
        top_node,
        spine,
    };
    validate_tree_decomposition(&inst)?;
    Ok(inst)
}

/// Check the tree-decomposition conditions of a lower-bound instance: the
/// node edges form a tree, every vertex's bags induce a connected subtree,
/// and every graph edge lands inside some bag.
pub fn validate_tree_decomposition(inst: &LowerBoundInstance) -> Result<()> {
    let nodes = inst.tree_nodes;
    if inst.tree_bags.len() != nodes {
        return Err(invalid("bag count does not match node count"));
    }
    if inst.tree_edges.len() + 1 != nodes {
        return Err(invalid("decomposition node edges do not form a tree"));
    }
    let mut dsu = crate::graph::Dsu::new(nodes);
    for &(a, b) in &inst.tree_edges {
        if a >= nodes || b >= nodes || !dsu.union(a, b) {
            return Err(invalid("decomposition node edges do not form a tree"));
        }
    }
    let n = inst.graph.n();
    let mut nodes_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (node, bag) in inst.tree_bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return Err(invalid(format!("bag {node} mentions vertex {v} >= {n}")));
            }
            nodes_of[v].push(node);
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for &(a, b) in &inst.tree_edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for (v, occ) in nodes_of.iter().enumerate() {
        if occ.is_empty() {
            return Err(invalid(format!("vertex {v} appears in no bag")));
        }
        // BFS within the occurrence set
        let inset: std::collections::BTreeSet<usize> = occ.iter().copied().collect();
        let mut seen = std::collections::BTreeSet::new();
        let mut queue = vec![occ[0]];
        seen.insert(occ[0]);
        while let Some(x) = queue.pop() {
            for &y in &adj[x] {
                if inset.contains(&y) && seen.insert(y) {
                    queue.push(y);
                }
            }
        }
        if seen.len() != inset.len() {
            return Err(invalid(format!(
                "vertex {v} occupies a disconnected set of bags"
            )));
        }
    }
    for e in inst.graph.edges() {
        let covered = inst
            .tree_bags
            .iter()
            .any(|bag| bag.binary_search(&e.u).is_ok() && bag.binary_search(&e.v).is_ok());
        if !covered {
            return Err(invalid(format!(
                "edge ({},{}) is covered by no bag",
                e.u, e.v
            )));
        }
    }
    Ok(())
}

/// Measure the lightest spanning tree in which every non-root vertex's parent
/// lies inside the vertex's topmost bag. Each vertex independently takes its
/// cheapest admissible parent (ties by smaller id); the assignment is then
/// certified to be a spanning tree, which makes the per-vertex minimum
/// globally tight. The root is the smallest-id vertex of the root bag.
pub fn measure_lowerbound(inst: &LowerBoundInstance) -> Result<LowerBoundMeasurement> {
    let g = &inst.graph;
    let n = g.n();
    let root = *inst.tree_bags[0]
        .iter()
        .min()
        .ok_or_else(|| invalid("empty root bag"))?;
    let mut parent = vec![usize::MAX; n];
    parent[root] = root;
    let mut tree_weight = 0.0f64;
    for v in 0..n {
        if v == root {
            continue;
        }
        let bag = &inst.tree_bags[inst.top_node[v]];
        let mut best: Option<(f64, usize)> = None;
        for &p in bag {
            if p == v {
                continue;
            }
            if let Some(id) = g.edge_between(v, p) {
                let w = g.edge(id).w;
                let cand = (w, p);
                if best.map_or(true, |(bw, bp)| cand.0 < bw || (cand.0 == bw && p < bp)) {
                    best = Some(cand);
                }
            }
        }
        let (w, p) = best.ok_or_else(|| {
            invalid(format!("vertex {v} has no admissible parent in its top bag"))
        })?;
        parent[v] = p;
        tree_weight += w;
    }
    // certify: every vertex walks up to the root without revisiting
    let mut state = vec![0u8; n]; // 0 unseen, 1 on stack, 2 done
    state[root] = 2;
    for start in 0..n {
        let mut path = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = parent[v];
        }
        if state[v] == 1 {
            return Err(crate::error::Error::Certification(format!(
                "parent assignment contains a cycle through vertex {v}"
            )));
        }
        for x in path {
            state[x] = 2;
        }
    }
    let mst_weight = g.mst().weight(g);
    Ok(LowerBoundMeasurement {
        parent,
        root,
        tree_weight,
        mst_weight,
        ratio: tree_weight / mst_weight,
    })
}
