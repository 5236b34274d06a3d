//! End-to-end acceptance suite. Each test pins one shipped guarantee at its
//! stated tolerance, most of them over a shared corpus of 225 seeded
//! bounded-width instances (width 1..=5, n <= 37). The expensive artifacts
//! (three certified pipeline runs per instance) are computed once and shared.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use lightspan::charging::{remove_edge, value_ceiling, verify_scheme};
use lightspan::decomposition::{bound_degree, complete, PathDecomposition};
use lightspan::gen::{gen_lowerbound, gen_random, measure_lowerbound, GenSpec, WeightKind};
use lightspan::graph::WeightedGraph;
use lightspan::interval::IntervalRepresentation;
use lightspan::io;
use lightspan::monotone::{is_monotone, lightest_monotone_tree, monotone_tree_recursive};
use lightspan::spanner::{pipeline, PipelineOptions, SpannerResult, TreeMode};

const EPS_GRID: [f64; 3] = [0.1, 0.5, 1.0];

fn rel_slack(x: f64) -> f64 {
    1e-9 * x.abs() + 1e-12
}

struct Case {
    spec: GenSpec,
    g: WeightedGraph,
    pd: PathDecomposition,
}

/// 225 seeded instances covering width 1..=5, 4..=32 bags, three densities
/// and three weight distributions. Everything stays desk-sized.
fn corpus() -> &'static [Case] {
    static CORPUS: OnceLock<Vec<Case>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut out = Vec::new();
        let mut seed = 1000u64;
        for width in 1..=5usize {
            for bags in [4usize, 8, 14, 22, 32] {
                for density in [0.3, 0.7, 1.0] {
                    for weights in [WeightKind::Uniform, WeightKind::Integer, WeightKind::Skewed] {
                        seed += 1;
                        let spec = GenSpec { width, bags, seed, density, weights };
                        let (g, pd) = gen_random(&spec)
                            .unwrap_or_else(|e| panic!("{spec:?} failed to generate: {e}"));
                        assert!(g.n() <= 60, "{spec:?} too large: n={}", g.n());
                        assert!(pd.width() <= 5, "{spec:?} too wide");
                        out.push(Case { spec, g, pd });
                    }
                }
            }
        }
        assert!(out.len() >= 200, "corpus holds only {} instances", out.len());
        out
    })
}

/// Certified pipeline runs for every corpus instance and every eps in
/// `EPS_GRID`, lightest tree forced. Indexed [instance][eps].
fn runs() -> &'static [Vec<SpannerResult>] {
    static RUNS: OnceLock<Vec<Vec<SpannerResult>>> = OnceLock::new();
    RUNS.get_or_init(|| {
        corpus()
            .iter()
            .map(|c| {
                EPS_GRID
                    .iter()
                    .map(|&eps| {
                        pipeline(&c.g, &c.pd, eps, PipelineOptions::default()).unwrap_or_else(
                            |e| panic!("pipeline failed on {:?} at eps={eps}: {e}", c.spec),
                        )
                    })
                    .collect()
            })
            .collect()
    })
}

/// The lifted spanner keeps every pairwise distance within (1+eps)(1+1e-9),
/// checked against from-scratch all-pairs matrices of both graphs.
#[test]
fn a1_lifted_stretch_within_eps_against_apsp_oracle() {
    for (case, per_eps) in corpus().iter().zip(runs()) {
        let dg = case.g.apsp();
        for (res, &eps) in per_eps.iter().zip(EPS_GRID.iter()) {
            let raw: Vec<(usize, usize, f64)> = res
                .lifted
                .ids()
                .iter()
                .map(|&id| {
                    let e = case.g.edge(id);
                    (e.u, e.v, e.w)
                })
                .collect();
            let h = WeightedGraph::new(case.g.n(), raw)
                .unwrap_or_else(|e| panic!("{:?}: lifted edges do not span: {e}", case.spec));
            let dh = h.apsp();
            let limit = (1.0 + eps) * (1.0 + 1e-9);
            for u in 0..case.g.n() {
                for v in u + 1..case.g.n() {
                    let base = dg.get(u, v);
                    let got = dh.get(u, v);
                    if base == 0.0 {
                        assert_eq!(got, 0.0, "{:?}: zero pair ({u},{v}) stretched", case.spec);
                    } else {
                        assert!(
                            got <= limit * base,
                            "{:?} eps={eps}: pair ({u},{v}) stretched to {}",
                            case.spec,
                            got / base
                        );
                    }
                }
            }
        }
    }
}

/// The greedy output obeys w(G') <= (1 + v/eps) * w(T) with v taken from the
/// verifier's report, to relative 1e-9.
#[test]
fn a2_spanner_weight_within_certified_bound() {
    for (case, per_eps) in corpus().iter().zip(runs()) {
        for res in per_eps {
            let v = res.scheme_value_f64();
            let bound = (1.0 + v / res.epsilon) * res.tree_weight;
            assert!(
                res.spanner_weight <= bound + rel_slack(bound),
                "{:?} eps={}: spanner weighs {} against bound {}",
                case.spec,
                res.epsilon,
                res.spanner_weight,
                bound
            );
        }
    }
}

/// A fresh verification of the constructed scheme passes every condition in
/// exact rational arithmetic, and its value stays under twice the maximum
/// degree of the instance it charges.
#[test]
fn a3_scheme_certifies_exactly_with_value_under_ceiling() {
    for (case, per_eps) in corpus().iter().zip(runs()) {
        let res = &per_eps[0];
        let tree_ids = res.tree.edge_ids(&res.reduced).expect("tree links are edges");
        let report = verify_scheme(&res.reduced, &tree_ids, &res.scheme, true)
            .unwrap_or_else(|e| panic!("{:?}: scheme rejected: {e}", case.spec));
        assert_eq!(report.value, res.scheme_value, "{:?}: value drifted", case.spec);
        assert!(
            report.value <= value_ceiling(&res.reduced),
            "{:?}: value {} above ceiling {}",
            case.spec,
            report.value,
            value_ceiling(&res.reduced)
        );
    }
}

/// Deleting a non-tree edge and repairing the scheme keeps every condition
/// intact on the smaller graph without raising the certified value; exercised
/// on 50 distinct (instance, edge) pairs.
#[test]
fn a4_scheme_repair_survives_fifty_edge_deletions() {
    let mut done = 0usize;
    for (i, per_eps) in runs().iter().enumerate() {
        if done >= 50 {
            break;
        }
        let res = &per_eps[1];
        let g = &res.reduced;
        let tree_ids = res.tree.edge_ids(g).unwrap();
        let non_tree: Vec<usize> = (0..g.m()).filter(|&id| !tree_ids.contains(id)).collect();
        if non_tree.is_empty() {
            continue;
        }
        let id = non_tree[(i * 7919) % non_tree.len()];
        let (u, v) = {
            let e = g.edge(id);
            (e.u, e.v)
        };
        let repaired = remove_edge(g, &tree_ids, &res.scheme, u, v)
            .unwrap_or_else(|e| panic!("case {i}: repair after deleting ({u},{v}) failed: {e}"));
        let g2 = g.without_edge(u, v).unwrap();
        let tree2 = res.tree.edge_ids(&g2).unwrap();
        let report = verify_scheme(&g2, &tree2, &repaired, true)
            .unwrap_or_else(|e| panic!("case {i}: repaired scheme rejected on G-e: {e}"));
        assert!(
            report.value <= res.scheme_value,
            "case {i}: deleting ({u},{v}) raised the value from {} to {}",
            res.scheme_value,
            report.value
        );
        done += 1;
    }
    assert_eq!(done, 50, "not enough instances with removable edges");
}

/// On every small corpus instance (n <= 9) the per-vertex greedy tree weighs
/// exactly as much as the best assignment found by enumerating all valid
/// parent choices. Candidate parents are rederived here straight from the
/// bags: a parent must be alive in the child's first bag and start earlier
/// in (first bag, id) order.
#[test]
fn a5_lightest_tree_matches_exhaustive_search_on_small_instances() {
    let mut checked = 0usize;
    for case in corpus() {
        let n = case.g.n();
        if n > 9 {
            continue;
        }
        let (cg, _) = complete(&case.g, &case.pd).expect("small instance completes");
        let iv = IntervalRepresentation::from_decomposition(&case.pd, n).unwrap();
        let bags = case.pd.bags();
        let mut firsts = vec![usize::MAX; n];
        for (b, bag) in bags.iter().enumerate() {
            for &x in bag {
                if firsts[x] == usize::MAX {
                    firsts[x] = b;
                }
            }
        }
        let root = (0..n).min_by_key(|&v| (firsts[v], v)).unwrap();
        let slots: Vec<usize> = (0..n).filter(|&v| v != root).collect();
        let mut cands: Vec<Vec<f64>> = vec![Vec::new(); n];
        for &v in &slots {
            for &p in &bags[firsts[v]] {
                if p != v && (firsts[p], p) < (firsts[v], v) {
                    let id = cg.edge_between(v, p).expect("completed graph joins bag mates");
                    cands[v].push(cg.edge(id).w);
                }
            }
        }
        let t = match lightest_monotone_tree(&cg, &iv) {
            Ok(t) => t,
            Err(_) => {
                assert!(
                    slots.iter().any(|&v| cands[v].is_empty()),
                    "{:?}: builder failed although every vertex has a parent choice",
                    case.spec
                );
                continue;
            }
        };
        // greedy weight, summed in the same vertex order the search uses
        let algo: f64 = slots
            .iter()
            .map(|&v| {
                let p = t.parent(v).unwrap();
                cg.edge(cg.edge_between(v, p).unwrap()).w
            })
            .sum();
        let mut idx = vec![0usize; slots.len()];
        let mut best = f64::INFINITY;
        'assignments: loop {
            let w: f64 = slots.iter().enumerate().map(|(s, &v)| cands[v][idx[s]]).sum();
            if w < best {
                best = w;
            }
            let mut s = slots.len();
            while s > 0 {
                s -= 1;
                idx[s] += 1;
                if idx[s] < cands[slots[s]].len() {
                    continue 'assignments;
                }
                idx[s] = 0;
            }
            break;
        }
        assert!(
            algo == best,
            "{:?}: greedy weight {algo} differs from exhaustive minimum {best}",
            case.spec
        );
        checked += 1;
    }
    assert!(checked >= 30, "only {checked} small instances were enumerated");
}

/// The recursive construction yields a monotone spanning tree that is never
/// lighter than the optimal monotone tree nor the minimum spanning tree.
#[test]
fn a6_recursive_tree_monotone_and_bounded_below() {
    for (case, per_eps) in corpus().iter().zip(runs()) {
        let res = &per_eps[0];
        let rec = monotone_tree_recursive(&res.reduced, &res.interval)
            .unwrap_or_else(|e| panic!("{:?}: recursive construction failed: {e}", case.spec));
        assert!(is_monotone(&rec, &res.interval), "{:?}: tree not monotone", case.spec);
        let ids = rec.edge_ids(&res.reduced).unwrap();
        assert!(ids.is_spanning(&res.reduced), "{:?}: tree not spanning", case.spec);
        assert_eq!(ids.len(), res.reduced.n() - 1);
        let rw = ids.weight(&res.reduced);
        let lw = res.tree_weight;
        let mw = res.reduced.mst().weight(&res.reduced);
        assert!(
            rw >= lw - rel_slack(lw),
            "{:?}: recursive tree {rw} lighter than the optimal {lw}",
            case.spec
        );
        assert!(
            rw >= mw - rel_slack(mw),
            "{:?}: recursive tree {rw} lighter than the MST {mw}",
            case.spec
        );
    }
}

/// The hard family: the forced-tree/MST ratio climbs by at least one half per
/// depth level (so it grows like log n), and the MST is exactly the spine.
#[test]
fn a7_lowerbound_ratio_climbs_half_per_level_and_mst_is_spine() {
    // regression floor recorded from the first computed table; the ratio
    // gains exactly one half per level
    const MIN_STEP: f64 = 0.5;
    let mut prev = f64::NEG_INFINITY;
    for depth in 1..=8usize {
        let inst = gen_lowerbound(depth).unwrap();
        let m = measure_lowerbound(&inst).unwrap();
        assert!(m.ratio > prev, "depth {depth}: ratio {} stopped increasing", m.ratio);
        if prev.is_finite() {
            assert!(
                m.ratio - prev >= MIN_STEP - 1e-9,
                "depth {depth}: increment {} fell under the floor",
                m.ratio - prev
            );
        }
        prev = m.ratio;
        let mst = inst.graph.mst();
        let mut spine = inst.spine.clone();
        spine.sort_unstable();
        assert_eq!(mst.ids(), &spine[..], "depth {depth}: MST is not the spine");
        assert_eq!(
            m.mst_weight,
            (1u64 << depth) as f64,
            "depth {depth}: spine weight drifted"
        );
    }
}

/// Reduction soundness: completing never moves a distance, degree-bounding
/// contracts back to the untouched input, and lifting can only shed weight
/// and never worsens the certified stretch.
#[test]
fn a8_reductions_preserve_metric_and_lift_loses_nothing() {
    for (case, per_eps) in corpus().iter().zip(runs()) {
        let nice = case.pd.make_nice();
        let (bg, bpd, trace) = bound_degree(&case.g, &nice).unwrap();
        let zero: BTreeSet<(usize, usize)> = trace.zero_edges.iter().copied().collect();
        let mut back: Vec<(usize, usize, f64)> = Vec::new();
        for e in bg.edges() {
            if zero.contains(&(e.u, e.v)) {
                assert_eq!(trace.copy_map[e.u], trace.copy_map[e.v]);
                assert_eq!(e.w, 0.0, "{:?}: copy link carries weight", case.spec);
            } else {
                let (a, b) = (trace.copy_map[e.u], trace.copy_map[e.v]);
                assert_ne!(a, b, "{:?}: edge collapsed into a loop", case.spec);
                back.push((a.min(b), a.max(b), e.w));
            }
        }
        back.sort_by_key(|t| (t.0, t.1));
        let orig: Vec<(usize, usize, f64)> =
            case.g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
        assert_eq!(back, orig, "{:?}: contraction does not reproduce the input", case.spec);

        let (cg, _) = complete(&bg, &bpd).unwrap();
        let before = bg.apsp();
        let after = cg.apsp();
        for u in 0..bg.n() {
            for v in u + 1..bg.n() {
                let (x, y) = (before.get(u, v), after.get(u, v));
                assert!(
                    (x - y).abs() <= 1e-9 * x.max(1.0),
                    "{:?}: completion moved d({u},{v}) from {x} to {y}",
                    case.spec
                );
            }
        }

        for res in per_eps {
            let direct: f64 = res.lifted.ids().iter().map(|&id| case.g.edge(id).w).sum();
            assert!(
                (direct - res.lifted_weight).abs() <= rel_slack(direct),
                "{:?}: reported lifted weight drifted",
                case.spec
            );
            assert!(
                res.lifted_weight <= res.spanner_weight + rel_slack(res.spanner_weight),
                "{:?} eps={}: lift gained weight: {} from {}",
                case.spec,
                res.epsilon,
                res.lifted_weight,
                res.spanner_weight
            );
            assert!(
                res.max_stretch <= res.reduced_stretch * (1.0 + 1e-9) + 1e-12,
                "{:?} eps={}: lift worsened stretch: {} from {}",
                case.spec,
                res.epsilon,
                res.max_stretch,
                res.reduced_stretch
            );
        }
    }
}

/// Regenerating and rerunning with the same seed and flags reproduces every
/// stage artifact byte for byte.
#[test]
fn a9_byte_identical_reruns() {
    for case in corpus().iter().step_by(23) {
        let (g1, pd1) = gen_random(&case.spec).unwrap();
        let (g2, pd2) = gen_random(&case.spec).unwrap();
        let inst1 = to_pretty(&io::instance_json(&g1, Some(&pd1)));
        let inst2 = to_pretty(&io::instance_json(&g2, Some(&pd2)));
        assert_eq!(inst1, inst2, "{:?}: generator output differs", case.spec);
        for mode in [TreeMode::Lightest, TreeMode::Recursive] {
            let opts = PipelineOptions { tree_mode: mode };
            let r1 = pipeline(&g1, &pd1, 0.5, opts).unwrap();
            let r2 = pipeline(&g2, &pd2, 0.5, opts).unwrap();
            assert_eq!(
                artifact_bytes(&g1, &r1),
                artifact_bytes(&g2, &r2),
                "{:?} mode {mode}: artifacts differ between runs",
                case.spec
            );
        }
    }
}

fn to_pretty<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

/// Every stage artifact of one run, serialized the way the CLI writes them,
/// concatenated.
fn artifact_bytes(g: &WeightedGraph, res: &SpannerResult) -> String {
    let mut out = String::new();
    out.push_str(&to_pretty(&io::instance_json(&res.reduced, Some(&res.reduced_pd))));
    out.push_str(&to_pretty(&io::trace_json(&res.trace)));
    out.push_str(&to_pretty(&io::tree_json(&res.tree, &res.reduced).unwrap()));
    out.push_str(&to_pretty(&io::scheme_json(&res.scheme)));
    out.push_str(&to_pretty(&io::ratio_json(&res.scheme_value)));
    out.push_str(&to_pretty(&io::subgraph_json(&res.reduced, &res.spanner)));
    out.push_str(&to_pretty(&io::subgraph_json(g, &res.lifted)));
    out.push_str(&to_pretty(&io::result_json(g, res)));
    out
}
