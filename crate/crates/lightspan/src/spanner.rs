//! The greedy spanner with forced tree edges, the all-pairs stretch
//! verifier, and the end-to-end pipeline: make the decomposition nice, bound
//! degrees, complete, build a monotone tree, certify a charging scheme, run
//! the greedy scan, lift the result back to the original graph and re-check
//! every guarantee on the way out.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::charging::{build_scheme, verify_scheme, ChargingScheme};
use crate::decomposition::{
    bound_degree, complete, lift_spanner, PathDecomposition, ReductionTrace,
};
use crate::error::{precondition, Error, Result};
use crate::graph::{EdgeSubgraph, WeightedGraph};
use crate::interval::IntervalRepresentation;
use crate::monotone::{lightest_monotone_tree, monotone_tree_recursive, RootedTree};

/// Which monotone spanning tree the pipeline forces into the spanner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TreeMode {
    /// Exact lightest monotone tree: each vertex takes its cheapest valid
    /// parent.
    #[default]
    Lightest,
    /// Recursive construction along rightward shortest paths.
    Recursive,
}

impl FromStr for TreeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lightest" => Ok(TreeMode::Lightest),
            "recursive" => Ok(TreeMode::Recursive),
            _ => Err(precondition(format!(
                "unknown tree mode {s:?} (expected \"lightest\" or \"recursive\")"
            ))),
        }
    }
}

impl fmt::Display for TreeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeMode::Lightest => "lightest",
            TreeMode::Recursive => "recursive",
        })
    }
}

/// Greedy spanner scan with a pre-inserted edge set. Starts from `forced`,
/// then scans the remaining edges in nondecreasing weight order (ties by
/// endpoint pair) and inserts an edge exactly when its weight times (1+eps)
/// still beats the distance its endpoints have in the spanner built so far.
/// Equal-length detours cause rejection: the test is strict.
pub fn greedy_scan(g: &WeightedGraph, forced: &EdgeSubgraph, eps: f64) -> Result<EdgeSubgraph> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(precondition(format!("eps must be a positive number, got {eps}")));
    }
    for &id in forced.ids() {
        if id >= g.m() {
            return Err(precondition(format!("forced edge id {id} out of range")));
        }
    }
    let mut active = forced.mask(g);
    let mut order: Vec<usize> = (0..g.m()).filter(|&id| !forced.contains(id)).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (g.edge(a), g.edge(b));
        ea.w.total_cmp(&eb.w).then((ea.u, ea.v).cmp(&(eb.u, eb.v)))
    });
    for id in order {
        let e = g.edge(id);
        let cap = (1.0 + eps) * e.w;
        // capped single-source run: anything beyond the budget is abandoned,
        // so an unreached far endpoint reads as infinite
        let dist = g.dijkstra(e.u, Some(&active), Some(cap));
        if cap < dist[e.v] {
            active[id] = true;
        }
    }
    let ids = active
        .iter()
        .enumerate()
        .filter_map(|(id, &on)| on.then_some(id))
        .collect();
    Ok(EdgeSubgraph::new(ids))
}

/// Greedy spanner that contains the spanning tree `t` whole.
pub fn greedy_spanner(g: &WeightedGraph, t: &RootedTree, eps: f64) -> Result<EdgeSubgraph> {
    if t.n() != g.n() {
        return Err(precondition(format!(
            "tree has {} vertices but the graph has {}",
            t.n(),
            g.n()
        )));
    }
    let forced = t.edge_ids(g)?;
    greedy_scan(g, &forced, eps)
}

/// Measure the worst distance blowup of the spanning subgraph `h` over all
/// vertex pairs and insist it stays within 1+eps (relative slack 1e-9).
/// Pairs at distance zero in `g` must stay at distance zero in `h`; anything
/// else reads as infinite stretch. Returns the measured maximum.
pub fn verify_stretch(g: &WeightedGraph, h: &EdgeSubgraph, eps: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(precondition(format!("eps must be a positive number, got {eps}")));
    }
    for &id in h.ids() {
        if id >= g.m() {
            return Err(precondition(format!("subgraph edge id {id} out of range")));
        }
    }
    if !h.is_spanning(g) {
        return Err(precondition("subgraph does not span the graph"));
    }
    let dg = g.apsp();
    let mask = h.mask(g);
    let mut worst = 1.0f64;
    let mut worst_pair = (0, 0);
    for u in 0..g.n() {
        let dh = g.dijkstra(u, Some(&mask), None);
        for v in u + 1..g.n() {
            let base = dg.get(u, v);
            let r = if base == 0.0 {
                if dh[v] == 0.0 {
                    continue;
                }
                f64::INFINITY
            } else {
                dh[v] / base
            };
            if r > worst {
                worst = r;
                worst_pair = (u, v);
            }
        }
    }
    let limit = (1.0 + eps) * (1.0 + 1e-9);
    if worst > limit {
        return Err(Error::Certification(format!(
            "stretch bound violated: pair ({},{}) stretched by {} with 1+eps = {}",
            worst_pair.0,
            worst_pair.1,
            worst,
            1.0 + eps
        )));
    }
    Ok(worst)
}

/// Everything the pipeline produced, both on the reduced instance the
/// certificates live on and lifted back to the original graph.
#[derive(Debug, Clone)]
pub struct SpannerResult {
    pub epsilon: f64,
    /// Degree-bounded, completed instance.
    pub reduced: WeightedGraph,
    pub reduced_pd: PathDecomposition,
    pub interval: IntervalRepresentation,
    pub trace: ReductionTrace,
    /// Tree forced into the spanner, on the reduced instance.
    pub tree: RootedTree,
    pub tree_weight: f64,
    pub scheme: ChargingScheme,
    /// Verifier-reported scheme value, exact.
    pub scheme_value: BigRational,
    /// Spanner on the reduced instance; always contains the tree.
    pub spanner: EdgeSubgraph,
    pub spanner_weight: f64,
    pub reduced_stretch: f64,
    /// Spanner mapped back onto the original graph.
    pub lifted: EdgeSubgraph,
    pub lifted_weight: f64,
    /// Worst pairwise stretch of the lifted spanner on the original graph.
    pub max_stretch: f64,
    /// Minimum spanning tree weight of the original graph.
    pub mst_weight: f64,
}

impl SpannerResult {
    /// Scheme value as a float, for reports.
    pub fn scheme_value_f64(&self) -> f64 {
        self.scheme_value.to_f64().unwrap_or(f64::INFINITY)
    }

    /// w(T) / MST of the original graph.
    pub fn tree_ratio(&self) -> f64 {
        self.tree_weight / self.mst_weight
    }

    /// Lifted spanner weight / MST of the original graph.
    pub fn spanner_ratio(&self) -> f64 {
        self.lifted_weight / self.mst_weight
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineOptions {
    pub tree_mode: TreeMode,
}

fn rel_slack(x: f64) -> f64 {
    1e-9 * x.abs() + 1e-12
}

/// Full run: validate, make nice, bound degrees, complete, build the chosen
/// monotone tree, certify a charging scheme onto it, greedy-scan with the
/// tree forced, check the weight bound with the certified value, lift back
/// and verify the stretch on the original graph. Any failed guarantee comes
/// back as a certification error naming the condition.
pub fn pipeline(
    g: &WeightedGraph,
    pd: &PathDecomposition,
    eps: f64,
    options: PipelineOptions,
) -> Result<SpannerResult> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(precondition(format!("eps must be a positive number, got {eps}")));
    }
    let report = pd.validate(g);
    if !report.ok() {
        return Err(precondition(format!(
            "decomposition invalid: {}",
            report.violations.join("; ")
        )));
    }
    let nice = pd.make_nice();
    let (rg, rpd, trace) = bound_degree(g, &nice)?;
    let (cg, completions) = complete(&rg, &rpd)?;
    let trace = trace.with_completions(completions);
    let iv = IntervalRepresentation::from_decomposition(&rpd, cg.n())?;
    let tree = match options.tree_mode {
        TreeMode::Lightest => lightest_monotone_tree(&cg, &iv)?,
        TreeMode::Recursive => monotone_tree_recursive(&cg, &iv)?,
    };
    let tree_ids = tree.edge_ids(&cg)?;
    let scheme = build_scheme(&cg, &iv, &tree)?;
    let scheme_report = verify_scheme(&cg, &tree_ids, &scheme, true)?;
    let spanner = greedy_scan(&cg, &tree_ids, eps)?;
    for &id in tree_ids.ids() {
        if !spanner.contains(id) {
            return Err(Error::Certification(format!(
                "forced tree edge {id} missing from the spanner"
            )));
        }
    }
    let tree_weight = tree_ids.weight(&cg);
    let spanner_weight = spanner.weight(&cg);
    let v = scheme_report.value.to_f64().unwrap_or(f64::INFINITY);
    // both algebraic forms of the greedy weight guarantee
    let extra = spanner_weight - tree_weight;
    if eps * extra > v * tree_weight + rel_slack(v * tree_weight) {
        return Err(Error::Certification(format!(
            "weight bound violated: eps * w(G'-T) = {} exceeds v * w(T) = {}",
            eps * extra,
            v * tree_weight
        )));
    }
    let bound = (1.0 + v / eps) * tree_weight;
    if spanner_weight > bound + rel_slack(bound) {
        return Err(Error::Certification(format!(
            "weight bound violated: w(G') = {spanner_weight} exceeds (1+v/eps) * w(T) = {bound}"
        )));
    }
    let reduced_stretch = verify_stretch(&cg, &spanner, eps)?;
    let lifted = lift_spanner(&spanner, &cg, &trace, g)?;
    let lifted_weight = lifted.weight(g);
    if lifted_weight > spanner_weight + rel_slack(spanner_weight) {
        return Err(Error::Certification(format!(
            "lift increased weight: {lifted_weight} from {spanner_weight}"
        )));
    }
    let max_stretch = verify_stretch(g, &lifted, eps)?;
    let mst_weight = g.mst().weight(g);
    Ok(SpannerResult {
        epsilon: eps,
        reduced: cg,
        reduced_pd: rpd,
        interval: iv,
        trace,
        tree,
        tree_weight,
        scheme,
        scheme_value: scheme_report.value,
        spanner,
        spanner_weight,
        reduced_stretch,
        lifted,
        lifted_weight,
        max_stretch,
        mst_weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_random, GenSpec, WeightKind};

    fn triangle() -> (WeightedGraph, RootedTree) {
        let g = WeightedGraph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let t = RootedTree::new(vec![0, 0, 1], 0).unwrap();
        (g, t)
    }

    #[test]
    fn greedy_on_a_triangle() {
        let (g, t) = triangle();
        // 1.5 < 2: the chord pays off
        let s = greedy_spanner(&g, &t, 0.5).unwrap();
        assert_eq!(s.len(), 3);
        // 2.5 < 2 fails
        let s = greedy_spanner(&g, &t, 1.5).unwrap();
        assert_eq!(s.ids(), t.edge_ids(&g).unwrap().ids());
        // exact tie rejects: the test is strict
        let s = greedy_spanner(&g, &t, 1.0).unwrap();
        assert_eq!(s.len(), 2);
        assert!(greedy_spanner(&g, &t, 0.0).is_err());
        assert!(greedy_spanner(&g, &t, -1.0).is_err());
    }

    #[test]
    fn greedy_on_a_tree_returns_the_tree() {
        let g = WeightedGraph::new(
            5,
            vec![(0, 1, 2.0), (1, 2, 1.0), (2, 3, 4.0), (3, 4, 0.5)],
        )
        .unwrap();
        let t = RootedTree::new(vec![0, 0, 1, 2, 3], 0).unwrap();
        let s = greedy_spanner(&g, &t, 0.25).unwrap();
        assert_eq!(s.len(), g.m());
    }

    #[test]
    fn plain_scan_without_forced_edges() {
        let (g, _) = triangle();
        let s = greedy_scan(&g, &EdgeSubgraph::new(Vec::new()), 0.5).unwrap();
        assert_eq!(s.len(), 3);
        let s = greedy_scan(&g, &EdgeSubgraph::new(Vec::new()), 1.5).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn stretch_verifier_basics() {
        let (g, t) = triangle();
        let all = EdgeSubgraph::new((0..g.m()).collect());
        assert_eq!(verify_stretch(&g, &all, 0.1).unwrap(), 1.0);
        let two = t.edge_ids(&g).unwrap();
        // detour around the missing chord doubles the distance
        assert_eq!(verify_stretch(&g, &two, 1.0).unwrap(), 2.0);
        let err = verify_stretch(&g, &two, 0.5).unwrap_err();
        assert!(err.to_string().contains("stretch"));
        // not spanning
        let one = EdgeSubgraph::new(vec![0]);
        assert!(verify_stretch(&g, &one, 1.0).is_err());
    }

    fn corpus() -> Vec<GenSpec> {
        let mut specs = Vec::new();
        for (seed, &(width, bags)) in [(2usize, 9usize), (3, 12), (4, 10)].iter().enumerate() {
            for &weights in &[WeightKind::Uniform, WeightKind::Integer] {
                specs.push(GenSpec {
                    width,
                    bags,
                    seed: seed as u64 + 40,
                    density: 0.7,
                    weights,
                });
            }
        }
        specs
    }

    #[test]
    fn pipeline_certifies_for_both_tree_modes() {
        for spec in corpus() {
            let (g, pd) = gen_random(&spec).unwrap();
            for mode in [TreeMode::Lightest, TreeMode::Recursive] {
                for eps in [0.1, 1.0] {
                    let res =
                        pipeline(&g, &pd, eps, PipelineOptions { tree_mode: mode }).unwrap();
                    assert!(res.max_stretch <= (1.0 + eps) * (1.0 + 1e-9));
                    assert!(res.reduced_stretch <= (1.0 + eps) * (1.0 + 1e-9));
                    assert!(res.lifted_weight <= res.spanner_weight + rel_slack(res.spanner_weight));
                    assert!(res.tree_weight <= res.spanner_weight + rel_slack(res.spanner_weight));
                    assert!(res.spanner_ratio() >= 1.0 - 1e-9);
                    assert!(res.lifted.is_spanning(&g));
                }
            }
        }
    }

    #[test]
    fn pipeline_on_a_tree_instance_changes_nothing() {
        let g = WeightedGraph::new(
            6,
            vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0)],
        )
        .unwrap();
        let pd = PathDecomposition::new((0..5).map(|i| vec![i, i + 1]).collect());
        let res = pipeline(&g, &pd, 0.5, PipelineOptions::default()).unwrap();
        assert_eq!(res.lifted.len(), g.m());
        assert_eq!(res.max_stretch, 1.0);
        assert!((res.spanner_ratio() - 1.0).abs() <= 1e-9);
        assert!((res.tree_ratio() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn single_bag_clique_stays_within_bound() {
        let spec = GenSpec {
            width: 5,
            bags: 1,
            seed: 3,
            density: 1.0,
            weights: WeightKind::Uniform,
        };
        let (g, pd) = gen_random(&spec).unwrap();
        let res = pipeline(&g, &pd, 0.5, PipelineOptions::default()).unwrap();
        assert!(res.max_stretch <= 1.5 * (1.0 + 1e-9));
    }

    #[test]
    fn all_pairs_stretch_equals_edge_pair_stretch() {
        for spec in corpus().into_iter().take(3) {
            let (g, pd) = gen_random(&spec).unwrap();
            let res = pipeline(&g, &pd, 0.5, PipelineOptions::default()).unwrap();
            let measured = res.max_stretch;
            let dg = g.apsp();
            let mask = res.lifted.mask(&g);
            let mut edge_max = 1.0f64;
            for e in g.edges() {
                let dh = g.dijkstra(e.u, Some(&mask), None);
                let base = dg.get(e.u, e.v);
                if base > 0.0 {
                    edge_max = edge_max.max(dh[e.v] / base);
                }
            }
            assert!((measured - edge_max).abs() <= 1e-9 * edge_max.max(1.0));
        }
    }

    #[test]
    fn spanner_weight_never_grows_with_eps() {
        for spec in corpus().into_iter().take(4) {
            let (g, pd) = gen_random(&spec).unwrap();
            let mut last = f64::INFINITY;
            for eps in [0.1, 0.5, 1.0, 2.0] {
                let res = pipeline(&g, &pd, eps, PipelineOptions::default()).unwrap();
                assert!(
                    res.spanner_weight <= last + rel_slack(last),
                    "weight rose from {last} to {} at eps={eps}",
                    res.spanner_weight
                );
                last = res.spanner_weight;
            }
        }
    }

    #[test]
    fn pipeline_is_deterministic() {
        let spec = GenSpec {
            width: 3,
            bags: 10,
            seed: 11,
            density: 0.6,
            weights: WeightKind::Uniform,
        };
        let (g, pd) = gen_random(&spec).unwrap();
        let a = pipeline(&g, &pd, 0.3, PipelineOptions::default()).unwrap();
        let b = pipeline(&g, &pd, 0.3, PipelineOptions::default()).unwrap();
        assert_eq!(a.spanner.ids(), b.spanner.ids());
        assert_eq!(a.lifted.ids(), b.lifted.ids());
        assert_eq!(a.tree.parents(), b.tree.parents());
        assert_eq!(a.scheme, b.scheme);
        assert_eq!(a.spanner_weight.to_bits(), b.spanner_weight.to_bits());
        assert_eq!(a.max_stretch.to_bits(), b.max_stretch.to_bits());
    }

    #[test]
    fn tree_mode_parsing() {
        assert_eq!("lightest".parse::<TreeMode>().unwrap(), TreeMode::Lightest);
        assert_eq!("recursive".parse::<TreeMode>().unwrap(), TreeMode::Recursive);
        assert!("fastest".parse::<TreeMode>().is_err());
        assert_eq!(TreeMode::default(), TreeMode::Lightest);
        assert_eq!(TreeMode::Recursive.to_string(), "recursive");
    }
}
