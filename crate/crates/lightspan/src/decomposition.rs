//! Path decompositions and the reduction chain that turns an arbitrary
//! instance into a nice, degree-bounded, completed interval form, plus the
//! trace needed to lift a spanner of the reduced graph back to the original.

use std::collections::BTreeSet;

use crate::error::{precondition, Result};
use crate::graph::{EdgeSubgraph, WeightedGraph};

/// A sequence of bags over vertex ids. Bags are kept sorted; validity with
/// respect to a graph is checked by [`PathDecomposition::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDecomposition {
    bags: Vec<Vec<usize>>,
}

/// Outcome of validating a decomposition against a graph.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub width: usize,
    pub violations: Vec<String>,
}

impl DecompositionReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl PathDecomposition {
    pub fn new(bags: Vec<Vec<usize>>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        PathDecomposition { bags }
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Maximum bag size minus one (zero for an all-empty bag list).
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(|b| b.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// Nice means every pair of consecutive bags differs by exactly one
    /// vertex: a single insertion or a single removal.
    pub fn is_nice(&self) -> bool {
        self.bags.windows(2).all(|p| {
            let only_a = p[0].iter().filter(|v| !p[1].contains(v)).count();
            let only_b = p[1].iter().filter(|v| !p[0].contains(v)).count();
            only_a + only_b == 1
        })
    }

    /// Check the three path-decomposition conditions against `g`: vertex
    /// coverage, edge coverage, and contiguous occurrence of each vertex.
    pub fn validate(&self, g: &WeightedGraph) -> DecompositionReport {
        let n = g.n();
        let mut violations = Vec::new();
        let mut first = vec![usize::MAX; n];
        let mut last = vec![usize::MAX; n];
        for (b, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= n {
                    violations.push(format!("bag {b} mentions vertex {v} >= n = {n}"));
                    continue;
                }
                if first[v] == usize::MAX {
                    first[v] = b;
                } else if last[v] != b - 1 {
                    violations.push(format!(
                        "vertex {v} occurs in bags {} and {b} but not in between",
                        last[v]
                    ));
                }
                last[v] = b;
            }
        }
        for v in 0..n {
            if first[v] == usize::MAX {
                violations.push(format!("vertex {v} appears in no bag"));
            }
        }
        for e in g.edges() {
            let covered = first[e.u] != usize::MAX
                && first[e.v] != usize::MAX
                && first[e.u].max(first[e.v]) <= last[e.u].min(last[e.v])
                && self
                    .bags
                    .iter()
                    .any(|bag| bag.binary_search(&e.u).is_ok() && bag.binary_search(&e.v).is_ok());
            if !covered {
                violations.push(format!("edge ({},{}) is covered by no bag", e.u, e.v));
            }
        }
        DecompositionReport {
            width: self.width(),
            violations,
        }
    }

    /// Expand into a nice decomposition: duplicate consecutive bags are
    /// collapsed, and each remaining transition is replaced by removals of
    /// the departing vertices (ascending id) followed by insertions of the
    /// arriving ones (ascending id). Width never grows, and the result is
    /// unchanged when the input is already nice.
    pub fn make_nice(&self) -> PathDecomposition {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for bag in &self.bags {
            match out.last() {
                None => out.push(bag.clone()),
                Some(prev) if prev == bag => continue,
                Some(prev) => {
                    let prev = prev.clone();
                    let departing: Vec<usize> =
                        prev.iter().copied().filter(|v| !bag.contains(v)).collect();
                    let arriving: Vec<usize> =
                        bag.iter().copied().filter(|v| !prev.contains(v)).collect();
                    let mut cur = prev;
                    for v in departing {
                        cur.retain(|&x| x != v);
                        out.push(cur.clone());
                    }
                    for v in arriving {
                        cur.push(v);
                        cur.sort_unstable();
                        out.push(cur.clone());
                    }
                    // last pushed bag equals `bag`
                    debug_assert_eq!(out.last().unwrap(), bag);
                }
            }
        }
        PathDecomposition { bags: out }
    }
}

/// One completion edge and the path of pre-completion edges realizing its
/// weight exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub u: usize,
    pub v: usize,
    pub path: Vec<usize>,
}

/// Everything needed to undo the reductions on a subgraph: which reduced
/// vertex is a copy of which original, the zero-weight copy edges, and the
/// recorded path for every completion edge.
#[derive(Debug, Clone)]
pub struct ReductionTrace {
    /// `copy_map[x]` = original vertex that reduced vertex `x` stands for.
    pub copy_map: Vec<usize>,
    /// Zero-weight edges joining a vertex to its fresh copy.
    pub zero_edges: Vec<(usize, usize)>,
    pub completions: Vec<Completion>,
}

impl ReductionTrace {
    pub fn identity(n: usize) -> Self {
        ReductionTrace {
            copy_map: (0..n).collect(),
            zero_edges: Vec::new(),
            completions: Vec::new(),
        }
    }

    /// Compose a later completion trace into this one (same vertex space).
    pub fn with_completions(mut self, completions: Vec<Completion>) -> Self {
        self.completions = completions;
        self
    }
}

/// Bound the maximum degree by splitting long-lived vertices into chains of
/// zero-weight-connected copies. After every `width` original bags (while
/// more bags follow), each vertex of the group's final bag is swapped for a
/// fresh copy via an insert bag and a remove bag, keeping the decomposition
/// nice. Each copy then lives through O(width) bags, so its degree is O(width).
/// Width grows by at most one.
pub fn bound_degree(
    g: &WeightedGraph,
    pd: &PathDecomposition,
) -> Result<(WeightedGraph, PathDecomposition, ReductionTrace)> {
    if !pd.is_nice() && pd.len() > 1 {
        return Err(precondition("bound_degree requires a nice decomposition"));
    }
    let report = pd.validate(g);
    if !report.ok() {
        return Err(precondition(format!(
            "bound_degree requires a valid decomposition: {}",
            report.violations.join("; ")
        )));
    }
    let n = g.n();
    let k = pd.width().max(1);
    let m = pd.len();

    let mut cur: Vec<usize> = (0..n).collect();
    let mut orig_of: Vec<usize> = (0..n).collect();
    // per original vertex: (first original bag where this copy is active, copy id)
    let mut activations: Vec<Vec<(usize, usize)>> = (0..n).map(|v| vec![(0, v)]).collect();
    let mut zero_edges: Vec<(usize, usize)> = Vec::new();
    let mut out_bags: Vec<Vec<usize>> = Vec::new();

    for (b, bag) in pd.bags().iter().enumerate() {
        let mut renamed: Vec<usize> = bag.iter().map(|&v| cur[v]).collect();
        renamed.sort_unstable();
        out_bags.push(renamed);
        let boundary = (b + 1) % k == 0 && b + 1 < m;
        if boundary {
            for &v in bag {
                let old = cur[v];
                let fresh = orig_of.len();
                orig_of.push(v);
                zero_edges.push((old, fresh));
                activations[v].push((b + 1, fresh));
                let mut with_fresh = out_bags.last().unwrap().clone();
                with_fresh.push(fresh);
                with_fresh.sort_unstable();
                out_bags.push(with_fresh.clone());
                with_fresh.retain(|&x| x != old);
                out_bags.push(with_fresh);
                cur[v] = fresh;
            }
        }
    }

    // first bag of the input decomposition covering each original edge
    let mut first_cover = vec![usize::MAX; g.m()];
    for (b, bag) in pd.bags().iter().enumerate() {
        for (id, e) in g.edges().iter().enumerate() {
            if first_cover[id] == usize::MAX
                && bag.binary_search(&e.u).is_ok()
                && bag.binary_search(&e.v).is_ok()
            {
                first_cover[id] = b;
            }
        }
    }
    let active_at = |v: usize, b: usize| -> usize {
        activations[v]
            .iter()
            .rev()
            .find(|&&(start, _)| start <= b)
            .expect("copy active from bag 0")
            .1
    };
    let mut raw: Vec<(usize, usize, f64)> = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        let b = first_cover[id];
        raw.push((active_at(e.u, b), active_at(e.v, b), e.w));
    }
    for &(a, b) in &zero_edges {
        raw.push((a, b, 0.0));
    }
    let out_graph = WeightedGraph::new(orig_of.len(), raw)?;
    let out_pd = PathDecomposition::new(out_bags);
    debug_assert!(out_pd.is_nice() || out_pd.len() <= 1);
    let trace = ReductionTrace {
        copy_map: orig_of,
        zero_edges,
        completions: Vec::new(),
    };
    Ok((out_graph, out_pd, trace))
}

/// Turn the instance into a metric interval graph over its decomposition:
/// every pair of vertices sharing a bag gets an edge weighing exactly their
/// shortest-path distance. Absent pairs are added; existing edges heavier
/// than the distance between their endpoints are tightened down to it. Both
/// kinds record a realizing path so a spanner can later be mapped back.
/// Distances between all pairs are unchanged. The metric property matters:
/// with untightened heavy edges the completed graph can fail to contain any
/// light tree that only grows rightward in the interval order.
pub fn complete(
    g: &WeightedGraph,
    pd: &PathDecomposition,
) -> Result<(WeightedGraph, Vec<Completion>)> {
    let report = pd.validate(g);
    if !report.ok() {
        return Err(precondition(format!(
            "complete requires a valid decomposition: {}",
            report.violations.join("; ")
        )));
    }
    let mut missing: BTreeSet<(usize, usize)> = BTreeSet::new();
    for bag in pd.bags() {
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                if g.edge_between(u, v).is_none() {
                    missing.insert((u, v));
                }
            }
        }
    }
    let slack = |w: f64, d: f64| w - d > 1e-9 * w.max(1.0);
    let heavy: Vec<(usize, usize)> = {
        let dist = g.apsp();
        g.edges()
            .iter()
            .filter(|e| slack(e.w, dist.get(e.u, e.v)))
            .map(|e| (e.u, e.v))
            .collect()
    };
    if missing.is_empty() && heavy.is_empty() {
        return Ok((g.clone(), Vec::new()));
    }
    let dist = g.apsp();
    let mut completions: Vec<Completion> = Vec::with_capacity(missing.len() + heavy.len());
    let mut raw: Vec<(usize, usize, f64)> = Vec::with_capacity(g.m() + missing.len());
    for e in g.edges() {
        if heavy.contains(&(e.u, e.v)) {
            raw.push((e.u, e.v, dist.get(e.u, e.v)));
            completions.push(Completion {
                u: e.u,
                v: e.v,
                path: g.canonical_shortest_path(e.u, e.v)?,
            });
        } else {
            raw.push((e.u, e.v, e.w));
        }
    }
    for (u, v) in missing {
        raw.push((u, v, dist.get(u, v)));
        completions.push(Completion {
            u,
            v,
            path: g.canonical_shortest_path(u, v)?,
        });
    }
    completions.sort_by_key(|c| (c.u, c.v));
    let out = WeightedGraph::new(g.n(), raw)?;
    Ok((out, completions))
}

/// Map a spanner of the reduced graph back to the original: completion edges
/// are replaced by their recorded paths, then every vertex is identified with
/// the original it is a copy of, dropping the edges that collapse into loops.
/// The lifted edge set never weighs more than the input spanner and preserves
/// every original distance the spanner certified.
pub fn lift_spanner(
    spanner: &EdgeSubgraph,
    reduced: &WeightedGraph,
    trace: &ReductionTrace,
    original: &WeightedGraph,
) -> Result<EdgeSubgraph> {
    if trace.copy_map.len() != reduced.n() {
        return Err(precondition(format!(
            "trace maps {} vertices but reduced graph has {}",
            trace.copy_map.len(),
            reduced.n()
        )));
    }
    let by_pair: std::collections::BTreeMap<(usize, usize), &Completion> = trace
        .completions
        .iter()
        .map(|c| ((c.u.min(c.v), c.u.max(c.v)), c))
        .collect();
    let mut reduced_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &id in spanner.ids() {
        if id >= reduced.m() {
            return Err(precondition(format!("spanner edge id {id} out of range")));
        }
        let e = reduced.edge(id);
        match by_pair.get(&(e.u, e.v)) {
            Some(c) => {
                for hop in c.path.windows(2) {
                    let (a, b) = (hop[0].min(hop[1]), hop[0].max(hop[1]));
                    reduced_pairs.insert((a, b));
                }
            }
            None => {
                reduced_pairs.insert((e.u, e.v));
            }
        }
    }
    let mut lifted: BTreeSet<usize> = BTreeSet::new();
    for (a, b) in reduced_pairs {
        let oa = *trace
            .copy_map
            .get(a)
            .ok_or_else(|| precondition(format!("vertex {a} missing from trace")))?;
        let ob = trace.copy_map[b];
        if oa == ob {
            continue; // zero-weight copy edge collapses
        }
        let id = original.edge_between(oa, ob).ok_or_else(|| {
            precondition(format!(
                "lifted pair ({oa},{ob}) is not an edge of the original graph"
            ))
        })?;
        lifted.insert(id);
    }
    let result = EdgeSubgraph::new(lifted.into_iter().collect());
    if !result.is_spanning(original) {
        return Err(precondition("lifted spanner does not span the original graph"));
    }
    Ok(result)
}
