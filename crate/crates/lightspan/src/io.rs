//! On-disk formats and conversions: instances with optional decompositions,
//! reduction traces, trees, charging schemes, spanner edge sets, run results
//! and the stats CSV row. All serialization is deterministic: canonical edge
//! order, sorted maps, struct field order.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::charging::{ChargingScheme, Detour};
use crate::decomposition::{Completion, PathDecomposition, ReductionTrace};
use crate::error::{invalid, Result};
use crate::gen::LowerBoundInstance;
use crate::graph::{EdgeSubgraph, WeightedGraph};
use crate::monotone::RootedTree;
use crate::spanner::SpannerResult;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let data = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&data)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub bags: Vec<Vec<usize>>,
}

/// Binary bag tree of a lower-bound instance. `nodes` lists the tree node
/// ids, `edges` the parent-child pairs, `bags` maps each node to its bag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeDecompositionJson {
    pub nodes: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub bags: BTreeMap<usize, Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub edges: Vec<EdgeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_decomposition: Option<TreeDecompositionJson>,
}

pub fn instance_json(g: &WeightedGraph, pd: Option<&PathDecomposition>) -> InstanceJson {
    InstanceJson {
        n: g.n(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeJson { u: e.u, v: e.v, w: e.w })
            .collect(),
        decomposition: pd.map(|p| DecompositionJson { bags: p.bags().to_vec() }),
        tree_decomposition: None,
    }
}

pub fn parse_instance(doc: &InstanceJson) -> Result<(WeightedGraph, Option<PathDecomposition>)> {
    let g = WeightedGraph::new(
        doc.n,
        doc.edges.iter().map(|e| (e.u, e.v, e.w)).collect(),
    )?;
    let pd = doc
        .decomposition
        .as_ref()
        .map(|d| PathDecomposition::new(d.bags.clone()));
    Ok((g, pd))
}

pub fn read_instance(path: &Path) -> Result<(WeightedGraph, Option<PathDecomposition>)> {
    parse_instance(&read_json(path)?)
}

pub fn write_instance(path: &Path, g: &WeightedGraph, pd: Option<&PathDecomposition>) -> Result<()> {
    write_json(path, &instance_json(g, pd))
}

pub fn lowerbound_json(inst: &LowerBoundInstance) -> InstanceJson {
    let mut doc = instance_json(&inst.graph, None);
    doc.tree_decomposition = Some(TreeDecompositionJson {
        nodes: (0..inst.tree_nodes).collect(),
        edges: inst.tree_edges.clone(),
        bags: inst.tree_bags.iter().cloned().enumerate().collect(),
    });
    doc
}

/// Rebuild a lower-bound instance from its JSON form. The derived structure
/// (depth, per-vertex top node, spine) is recomputed rather than stored: the
/// spine is the minimum spanning tree, and the top node of a vertex is its
/// occurrence nearest the root.
pub fn parse_lowerbound(doc: &InstanceJson) -> Result<LowerBoundInstance> {
    let td = doc
        .tree_decomposition
        .as_ref()
        .ok_or_else(|| invalid("instance has no tree_decomposition block"))?;
    let (graph, _) = parse_instance(doc)?;
    let nodes = td.nodes.len();
    if td.nodes.iter().enumerate().any(|(i, &x)| i != x) {
        return Err(invalid("tree decomposition nodes must be 0..count"));
    }
    if td.bags.len() != nodes || td.bags.keys().enumerate().any(|(i, &k)| i != k) {
        return Err(invalid("tree decomposition bags must cover exactly the nodes"));
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let mut has_parent = vec![false; nodes];
    for &(p, c) in &td.edges {
        if p >= nodes || c >= nodes || has_parent[c] || c == 0 {
            return Err(invalid(format!("bad tree decomposition edge ({p},{c})")));
        }
        has_parent[c] = true;
        children[p].push(c);
    }
    if td.edges.len() + 1 != nodes {
        return Err(invalid("tree decomposition edges do not form a tree"));
    }
    // breadth-first from the root: depths and nearest-the-root occurrences
    let mut depth_of = vec![usize::MAX; nodes];
    depth_of[0] = 0;
    let mut order = vec![0usize];
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for &c in &children[x] {
            depth_of[c] = depth_of[x] + 1;
            order.push(c);
        }
    }
    if order.len() != nodes {
        return Err(invalid("tree decomposition is not connected to node 0"));
    }
    let mut top_node = vec![usize::MAX; graph.n()];
    for &x in &order {
        for &v in &td.bags[&x] {
            if v >= graph.n() {
                return Err(invalid(format!("bag vertex {v} out of range")));
            }
            if top_node[v] == usize::MAX {
                top_node[v] = x;
            }
        }
    }
    if top_node.contains(&usize::MAX) {
        return Err(invalid("some vertex appears in no bag"));
    }
    // the spine is the MST, which must be a Hamiltonian path; orient it from
    // its smaller-id endpoint, matching the generator
    let mst = graph.mst();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph.n()];
    for &id in mst.ids() {
        let e = graph.edge(id);
        adj[e.u].push((e.v, id));
        adj[e.v].push((e.u, id));
    }
    let ends: Vec<usize> = (0..graph.n()).filter(|&v| adj[v].len() == 1).collect();
    if ends.len() != 2 {
        return Err(invalid("minimum spanning tree is not a path"));
    }
    let mut spine = Vec::with_capacity(mst.len());
    let mut prev = usize::MAX;
    let mut cur = ends[0].min(ends[1]);
    while spine.len() < mst.len() {
        let &(next, id) = adj[cur]
            .iter()
            .find(|&&(x, _)| x != prev)
            .ok_or_else(|| invalid("minimum spanning tree is not a path"))?;
        spine.push(id);
        prev = cur;
        cur = next;
    }
    let inst = LowerBoundInstance {
        depth: depth_of.iter().copied().max().unwrap_or(0),
        tree_nodes: nodes,
        tree_edges: td.edges.clone(),
        tree_bags: (0..nodes).map(|i| td.bags[&i].clone()).collect(),
        top_node,
        spine,
        graph,
    };
    crate::gen::validate_tree_decomposition(&inst)?;
    Ok(inst)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletionJson {
    pub u: usize,
    pub v: usize,
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceJson {
    pub copy_map: Vec<usize>,
    pub zero_edges: Vec<(usize, usize)>,
    pub completions: Vec<CompletionJson>,
}

pub fn trace_json(trace: &ReductionTrace) -> TraceJson {
    TraceJson {
        copy_map: trace.copy_map.clone(),
        zero_edges: trace.zero_edges.clone(),
        completions: trace
            .completions
            .iter()
            .map(|c| CompletionJson { u: c.u, v: c.v, path: c.path.clone() })
            .collect(),
    }
}

pub fn parse_trace(doc: &TraceJson) -> ReductionTrace {
    ReductionTrace {
        copy_map: doc.copy_map.clone(),
        zero_edges: doc.zero_edges.clone(),
        completions: doc
            .completions
            .iter()
            .map(|c| Completion { u: c.u, v: c.v, path: c.path.clone() })
            .collect(),
    }
}

/// Rooted tree as a parent array; the root's entry is -1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeJson {
    pub parent: Vec<i64>,
    pub root: usize,
    pub weight: f64,
}

pub fn tree_json(t: &RootedTree, g: &WeightedGraph) -> Result<TreeJson> {
    let parent = (0..t.n())
        .map(|v| match t.parent(v) {
            Some(p) => p as i64,
            None => -1,
        })
        .collect();
    Ok(TreeJson {
        parent,
        root: t.root(),
        weight: t.weight(g)?,
    })
}

pub fn parse_tree(doc: &TreeJson) -> Result<RootedTree> {
    let n = doc.parent.len();
    let mut parent = Vec::with_capacity(n);
    for (v, &p) in doc.parent.iter().enumerate() {
        if v == doc.root {
            if p != -1 {
                return Err(invalid(format!("root {v} must carry parent -1, got {p}")));
            }
            parent.push(v);
        } else if p < 0 || p as usize >= n {
            return Err(invalid(format!("parent {p} of vertex {v} out of range")));
        } else {
            parent.push(p as usize);
        }
    }
    RootedTree::new(parent, doc.root)
}

/// Exact rational as decimal strings, to keep arbitrary precision intact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioJson {
    pub num: String,
    pub den: String,
}

pub fn ratio_json(x: &BigRational) -> RatioJson {
    RatioJson {
        num: x.numer().to_string(),
        den: x.denom().to_string(),
    }
}

pub fn parse_ratio(doc: &RatioJson) -> Result<BigRational> {
    let num = BigInt::from_str(&doc.num)
        .map_err(|e| invalid(format!("bad numerator {:?}: {e}", doc.num)))?;
    let den = BigInt::from_str(&doc.den)
        .map_err(|e| invalid(format!("bad denominator {:?}: {e}", doc.den)))?;
    if den == BigInt::from(0) {
        return Err(invalid("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoveJson {
    pub edge: (usize, usize),
    pub path: Vec<usize>,
    pub value: RatioJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeJson {
    pub moves: Vec<MoveJson>,
}

pub fn scheme_json(scheme: &ChargingScheme) -> SchemeJson {
    SchemeJson {
        moves: scheme
            .iter()
            .map(|(d, x)| MoveJson {
                edge: d.edge(),
                path: d.path.clone(),
                value: ratio_json(x),
            })
            .collect(),
    }
}

pub fn parse_scheme(doc: &SchemeJson) -> Result<ChargingScheme> {
    let mut scheme = ChargingScheme::new();
    for m in &doc.moves {
        let d = Detour::new(m.edge.0, m.edge.1, m.path.clone())?;
        scheme.add(d, parse_ratio(&m.value)?);
    }
    Ok(scheme)
}

/// Edge subset of a known parent graph, stored as endpoint pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubgraphJson {
    pub edges: Vec<(usize, usize)>,
    pub weight: f64,
}

pub fn subgraph_json(g: &WeightedGraph, sub: &EdgeSubgraph) -> SubgraphJson {
    SubgraphJson {
        edges: sub
            .ids()
            .iter()
            .map(|&id| {
                let e = g.edge(id);
                (e.u, e.v)
            })
            .collect(),
        weight: sub.weight(g),
    }
}

pub fn parse_subgraph(g: &WeightedGraph, doc: &SubgraphJson) -> Result<EdgeSubgraph> {
    let mut ids = Vec::with_capacity(doc.edges.len());
    for &(u, v) in &doc.edges {
        if u >= g.n() || v >= g.n() {
            return Err(invalid(format!("edge ({u},{v}) out of range")));
        }
        ids.push(
            g.edge_between(u, v)
                .ok_or_else(|| invalid(format!("({u},{v}) is not an edge of the graph")))?,
        );
    }
    Ok(EdgeSubgraph::new(ids))
}

/// Summary of a pipeline run. The lifted spanner lives on the original
/// graph; the tree, scheme value and weight bound live on the reduced one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultJson {
    pub epsilon: f64,
    pub n: usize,
    pub reduced_n: usize,
    pub tree_weight: f64,
    pub scheme_value: RatioJson,
    pub spanner_weight: f64,
    pub lifted_weight: f64,
    pub mst_weight: f64,
    pub tree_ratio: f64,
    pub spanner_ratio: f64,
    pub max_stretch: f64,
    pub reduced_stretch: f64,
    pub lifted_edges: Vec<(usize, usize)>,
}

pub fn result_json(g: &WeightedGraph, res: &SpannerResult) -> ResultJson {
    ResultJson {
        epsilon: res.epsilon,
        n: g.n(),
        reduced_n: res.reduced.n(),
        tree_weight: res.tree_weight,
        scheme_value: ratio_json(&res.scheme_value),
        spanner_weight: res.spanner_weight,
        lifted_weight: res.lifted_weight,
        mst_weight: res.mst_weight,
        tree_ratio: res.tree_ratio(),
        spanner_ratio: res.spanner_ratio(),
        max_stretch: res.max_stretch,
        reduced_stretch: res.reduced_stretch,
        lifted_edges: res
            .lifted
            .ids()
            .iter()
            .map(|&id| {
                let e = g.edge(id);
                (e.u, e.v)
            })
            .collect(),
    }
}

pub const CSV_HEADER: &str =
    "instance,n,k,eps,tree_ratio,scheme_v,spanner_ratio,max_stretch,runtime_ms";

/// One stats row matching [`CSV_HEADER`]. The instance name is written as-is
/// (no quoting); keep commas out of file names.
pub fn csv_row(
    instance: &str,
    n: usize,
    k: usize,
    res: &SpannerResult,
    runtime_ms: u128,
) -> String {
    format!(
        "{instance},{n},{k},{},{},{},{},{},{runtime_ms}",
        res.epsilon,
        res.tree_ratio(),
        res.scheme_value_f64(),
        res.spanner_ratio(),
        res.max_stretch
    )
}
