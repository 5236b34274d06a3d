//! Charging schemes: fractional systems of moves in which non-tree edges
//! push their weight onto detour paths, certifying that a greedy spanner
//! stays light. All bookkeeping is exact rational arithmetic; the verifier
//! recomputes every condition (including its own topological order) from
//! scratch rather than trusting the construction.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{precondition, Error, Result};
use crate::graph::{EdgeSubgraph, WeightedGraph};
use crate::interval::IntervalRepresentation;
use crate::monotone::{is_monotone, require_completed, RootedTree};

/// An edge `{u, v}` together with a path from `u` to `v` forming a simple
/// cycle with it. Stored canonically: `u < v`, path runs from `u` to `v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Detour {
    pub u: usize,
    pub v: usize,
    pub path: Vec<usize>,
}

impl Detour {
    pub fn new(u: usize, v: usize, mut path: Vec<usize>) -> Result<Self> {
        if u == v {
            return Err(precondition("detour edge endpoints coincide"));
        }
        let (u, v) = (u.min(v), u.max(v));
        if path.first() == Some(&v) {
            path.reverse();
        }
        if path.first() != Some(&u) || path.last() != Some(&v) {
            return Err(precondition(format!(
                "detour path must run between {u} and {v}"
            )));
        }
        if path.len() < 3 {
            return Err(precondition("detour path must have at least two hops"));
        }
        let mut seen = BTreeSet::new();
        if !path.iter().all(|&x| seen.insert(x)) {
            return Err(precondition("detour path revisits a vertex"));
        }
        Ok(Detour { u, v, path })
    }

    /// The charged edge as an unordered pair.
    pub fn edge(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    /// True when the path traverses the undirected edge `{a, b}`.
    pub fn path_contains(&self, a: usize, b: usize) -> bool {
        self.path
            .windows(2)
            .any(|h| (h[0] == a && h[1] == b) || (h[0] == b && h[1] == a))
    }

    fn hops(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.path
            .windows(2)
            .map(|h| (h[0].min(h[1]), h[0].max(h[1])))
    }
}

/// A nonnegative rational value per detour.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChargingScheme {
    moves: BTreeMap<Detour, BigRational>,
}

impl ChargingScheme {
    pub fn new() -> Self {
        ChargingScheme { moves: BTreeMap::new() }
    }

    pub fn add(&mut self, d: Detour, x: BigRational) {
        if x.is_zero() {
            return;
        }
        match self.moves.entry(d) {
            std::collections::btree_map::Entry::Occupied(mut cell) => {
                *cell.get_mut() += x;
                if cell.get().is_zero() {
                    cell.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(x);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Detour, &BigRational)> {
        self.moves.iter()
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn get(&self, d: &Detour) -> BigRational {
        self.moves.get(d).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Total charge moved out of the edge `{u, v}`.
    pub fn out_of(&self, u: usize, v: usize) -> BigRational {
        let (u, v) = (u.min(v), u.max(v));
        self.moves
            .iter()
            .filter(|(d, _)| d.edge() == (u, v))
            .fold(BigRational::zero(), |acc, (_, x)| acc + x)
    }

    /// Total charge moved onto the edge `{u, v}` by detour paths.
    pub fn into_edge(&self, u: usize, v: usize) -> BigRational {
        self.moves
            .iter()
            .filter(|(d, _)| d.path_contains(u, v))
            .fold(BigRational::zero(), |acc, (_, x)| acc + x)
    }
}

/// Outcome of a successful verification.
#[derive(Debug, Clone)]
pub struct SchemeReport {
    /// Smallest `v` for which the tree condition holds: the largest net
    /// charge resting on any tree edge (at least zero).
    pub value: BigRational,
    /// Number of (nonzero) moves checked.
    pub moves_checked: usize,
    /// A charge-respecting edge order found by the verifier itself, as edge
    /// ids of `g`; present only when acyclicity was required.
    pub edge_order: Option<Vec<usize>>,
}

/// Check a scheme from `g` to the spanning tree `tree`:
/// every charged edge and path hop must exist in `g`, every non-tree edge
/// must send out at least one unit and end up with no positive net charge,
/// and the reported value is the worst net charge on a tree edge. With
/// `require_acyclic`, additionally: only non-tree edges may charge, and the
/// "charger before charged" relation must admit a topological order, which
/// is recomputed here by Kahn's algorithm rather than taken on faith.
pub fn verify_scheme(
    g: &WeightedGraph,
    tree: &EdgeSubgraph,
    scheme: &ChargingScheme,
    require_acyclic: bool,
) -> Result<SchemeReport> {
    if tree.len() + 1 != g.n() || !tree.is_spanning(g) {
        return Err(precondition("tree edge set is not a spanning tree"));
    }
    let zero = BigRational::zero;
    let mut out: BTreeMap<usize, BigRational> = BTreeMap::new();
    let mut inc: BTreeMap<usize, BigRational> = BTreeMap::new();
    let mut arcs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut moves_checked = 0usize;
    for (d, x) in scheme.iter() {
        if x.is_negative() {
            return Err(Error::Certification(format!(
                "move on ({},{}) has negative value",
                d.u, d.v
            )));
        }
        if x.is_zero() {
            continue;
        }
        moves_checked += 1;
        let eid = g.edge_between(d.u, d.v).ok_or_else(|| {
            Error::Certification(format!("charged pair ({},{}) is not an edge", d.u, d.v))
        })?;
        if require_acyclic && tree.contains(eid) {
            return Err(Error::Certification(format!(
                "tree edge ({},{}) sends charge, which an acyclic scheme forbids",
                d.u, d.v
            )));
        }
        // Detour::new enforced shape; hop existence is re-checked against g
        let mut hop_ids = Vec::with_capacity(d.path.len() - 1);
        for (a, b) in d.hops() {
            let hid = g.edge_between(a, b).ok_or_else(|| {
                Error::Certification(format!("detour hop ({a},{b}) is not an edge"))
            })?;
            hop_ids.push(hid);
        }
        if hop_ids.contains(&eid) {
            return Err(Error::Certification(format!(
                "detour for ({},{}) travels through its own edge",
                d.u, d.v
            )));
        }
        *out.entry(eid).or_insert_with(zero) += x.clone();
        for hid in hop_ids {
            *inc.entry(hid).or_insert_with(zero) += x.clone();
            if require_acyclic {
                arcs.insert((eid, hid));
            }
        }
    }
    let one = BigRational::one();
    let mut value = BigRational::zero();
    for id in 0..g.m() {
        let o = out.get(&id).cloned().unwrap_or_else(zero);
        let i = inc.get(&id).cloned().unwrap_or_else(zero);
        let e = g.edge(id);
        if tree.contains(id) {
            let net = &i - &o;
            if net > value {
                value = net;
            }
        } else {
            if o < one {
                return Err(Error::Certification(format!(
                    "non-tree edge ({},{}) sends out {} < 1",
                    e.u, e.v, o
                )));
            }
            if i > o {
                return Err(Error::Certification(format!(
                    "non-tree edge ({},{}) retains positive net charge",
                    e.u, e.v
                )));
            }
        }
    }
    let edge_order = if require_acyclic {
        Some(charge_order(g.m(), &arcs)?)
    } else {
        None
    };
    Ok(SchemeReport { value, moves_checked, edge_order })
}

/// Lexicographically least topological order of the charge arcs, or an error
/// naming an edge on a cycle.
fn charge_order(m: usize, arcs: &BTreeSet<(usize, usize)>) -> Result<Vec<usize>> {
    let mut indeg = vec![0usize; m];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &(a, b) in arcs {
        succ[a].push(b);
        indeg[b] += 1;
    }
    let mut ready: BTreeSet<usize> = (0..m).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(&v) = ready.iter().next() {
        ready.remove(&v);
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.insert(w);
            }
        }
    }
    if order.len() != m {
        let stuck = (0..m).find(|&v| indeg[v] > 0).unwrap();
        return Err(Error::Certification(format!(
            "charge relation is cyclic (edge id {stuck} never becomes free)"
        )));
    }
    Ok(order)
}

/// Combine two detours: `inner`'s edge must lie on `outer`'s path, and
/// `outer`'s edge must not lie on `inner`'s path. The result charges
/// `outer`'s edge along `outer`'s path with the inner edge replaced by the
/// inner path, reduced to a simple path by cutting out loops.
pub fn shortcut(outer: &Detour, inner: &Detour) -> Result<Detour> {
    if !outer.path_contains(inner.u, inner.v) {
        return Err(precondition("inner edge does not lie on the outer path"));
    }
    if inner.path_contains(outer.u, outer.v) {
        return Err(precondition("outer edge lies on the inner path"));
    }
    let mut walk: Vec<usize> = Vec::with_capacity(outer.path.len() + inner.path.len());
    for (idx, h) in outer.path.windows(2).enumerate() {
        if idx == 0 {
            walk.push(h[0]);
        }
        if (h[0] == inner.u && h[1] == inner.v) || (h[0] == inner.v && h[1] == inner.u) {
            // splice the inner path in, oriented to match
            if h[0] == inner.path[0] {
                walk.extend(&inner.path[1..]);
            } else {
                walk.extend(inner.path.iter().rev().skip(1));
            }
        } else {
            walk.push(h[1]);
        }
    }
    // reduce the walk: on revisiting a vertex, drop the loop since it left
    let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
    let mut stack: Vec<usize> = Vec::with_capacity(walk.len());
    for x in walk {
        if let Some(&q) = pos.get(&x) {
            for y in stack.drain(q + 1..) {
                pos.remove(&y);
            }
        } else {
            pos.insert(x, stack.len());
            stack.push(x);
        }
    }
    Detour::new(outer.u, outer.v, stack)
}

/// Rewrite an acyclic scheme for `g` into one for `g` minus the non-tree
/// edge `{u, v}`, of no greater value. While charge still lands on the
/// doomed edge, the smallest move charging it is combined with the smallest
/// move leaving it via a shortcut; once nothing lands on it, its own
/// outgoing moves are deleted. Chargers and out-moves are never replenished,
/// so this terminates.
pub fn remove_edge(
    g: &WeightedGraph,
    tree: &EdgeSubgraph,
    scheme: &ChargingScheme,
    u: usize,
    v: usize,
) -> Result<ChargingScheme> {
    let (u, v) = (u.min(v), u.max(v));
    let eid = g
        .edge_between(u, v)
        .ok_or_else(|| precondition(format!("({u},{v}) is not an edge")))?;
    if tree.contains(eid) {
        return Err(precondition("cannot remove a tree edge"));
    }
    let mut cur = scheme.clone();
    loop {
        let charger = cur
            .iter()
            .find(|(d, x)| !x.is_zero() && d.path_contains(u, v))
            .map(|(d, x)| (d.clone(), x.clone()));
        let Some((outer, x_outer)) = charger else { break };
        let out_move = cur
            .iter()
            .find(|(d, x)| !x.is_zero() && d.edge() == (u, v))
            .map(|(d, x)| (d.clone(), x.clone()))
            .ok_or_else(|| {
                Error::Certification(format!(
                    "({u},{v}) is charged but has nothing left to pass on; \
                     the input scheme cannot have been valid"
                ))
            })?;
        let (inner, x_inner) = out_move;
        let merged = shortcut(&outer, &inner)?;
        let alpha = x_outer.min(x_inner);
        cur.add(outer, -alpha.clone());
        cur.add(inner, -alpha.clone());
        cur.add(merged, alpha);
    }
    let doomed: Vec<Detour> = cur
        .iter()
        .filter(|(d, _)| d.edge() == (u, v))
        .map(|(d, _)| d.clone())
        .collect();
    for d in doomed {
        let x = cur.get(&d);
        cur.add(d, -x);
    }
    Ok(cur)
}

/// Parent structure over the edges of `g` induced by a monotone tree: each
/// non-tree edge `{j,k}` (with `k` the later endpoint) points at the edge
/// `{i,j}` where `i` is `k`'s tree parent; `{i,j,k}` is then a triangle.
/// Components are rooted at tree edges, and parent links strictly decrease
/// the later endpoint's position, so the structure is a forest.
#[derive(Debug, Clone)]
pub struct EdgeForest {
    /// For each edge id: `Some((parent_edge_id, i, j, k))` when non-tree.
    link: Vec<Option<(usize, usize, usize, usize)>>,
    /// Children of each edge id, ordered by (interval position, id).
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
}

impl EdgeForest {
    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn parent_of(&self, edge_id: usize) -> Option<usize> {
        self.link[edge_id].map(|(p, ..)| p)
    }
}

/// Build the edge forest for a completed instance and a monotone spanning
/// tree of it.
pub fn build_edge_forest(
    g: &WeightedGraph,
    iv: &IntervalRepresentation,
    tree: &RootedTree,
) -> Result<EdgeForest> {
    require_completed(g, iv)?;
    if !is_monotone(tree, iv) {
        return Err(precondition("edge forest requires a monotone tree"));
    }
    let tree_ids = tree.edge_ids(g)?;
    let m = g.m();
    let mut link = vec![None; m];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); m];
    for id in 0..m {
        if tree_ids.contains(id) {
            continue;
        }
        let e = g.edge(id);
        let (j, k) = if iv.left(e.u) < iv.left(e.v) {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        };
        let i = tree
            .parent(k)
            .expect("later endpoint of a non-tree edge cannot be the root");
        let pid = g.edge_between(i, j).ok_or_else(|| {
            Error::Certification(format!(
                "triangle edge ({i},{j}) missing; instance is not completed"
            ))
        })?;
        link[id] = Some((pid, i, j, k));
        children[pid].push(id);
    }
    for kids in children.iter_mut() {
        kids.sort_by_key(|&c| {
            let e = g.edge(c);
            (iv.left(e.u).max(iv.left(e.v)), c)
        });
    }
    let roots: Vec<usize> = tree_ids.ids().to_vec();
    Ok(EdgeForest { link, children, roots })
}

/// One directed traversal step between an edge and its forest parent, as a
/// triangle move: in either direction the moving edge charges the two other
/// sides of its triangle.
fn step_move(forest: &EdgeForest, from: usize, to: usize) -> Result<Detour> {
    if forest.parent_of(from) == Some(to) {
        // ascend: {j,k} charges j-i-k
        let (_, i, j, k) = forest.link[from].unwrap();
        Detour::new(j, k, vec![j.min(k), i, j.max(k)])
    } else if forest.parent_of(to) == Some(from) {
        // descend: the parent {i,j} charges i-k-j through the child's later
        // endpoint
        let (_, i, j, k) = forest.link[to].unwrap();
        Detour::new(i, j, vec![i.min(j), k, i.max(j)])
    } else {
        Err(precondition("step does not follow a forest link"))
    }
}

/// Walks of the doubled forest: for every root, each child subtree yields
/// one segment (its full depth-first walk, then the root). Segments list
/// edge ids; consecutive entries are forest neighbors.
fn segments(forest: &EdgeForest) -> Vec<Vec<usize>> {
    fn walk(forest: &EdgeForest, v: usize, out: &mut Vec<usize>) {
        out.push(v);
        for &c in &forest.children[v] {
            walk(forest, c, out);
            out.push(v);
        }
    }
    let mut segs = Vec::new();
    for &r in &forest.roots {
        for &c in &forest.children[r] {
            let mut s = Vec::new();
            walk(forest, c, &mut s);
            s.push(r);
            segs.push(s);
        }
    }
    segs
}

/// Construct an acyclic charging scheme from a completed instance `g` to a
/// monotone spanning tree of it, of value at most twice the maximum degree.
/// Each segment of the doubled edge forest contributes one unit move per
/// step; repeated appearances inside a segment are then cut out with
/// shortcuts, rightmost first, leaving each non-tree edge charging exactly
/// once and every charged path pointing strictly later in the segment.
pub fn build_scheme(
    g: &WeightedGraph,
    iv: &IntervalRepresentation,
    tree: &RootedTree,
) -> Result<ChargingScheme> {
    let forest = build_edge_forest(g, iv, tree)?;
    let mut scheme = ChargingScheme::new();
    for seg in segments(&forest) {
        let mut verts = seg;
        let mut moves: Vec<Detour> = verts
            .windows(2)
            .map(|h| step_move(&forest, h[0], h[1]))
            .collect::<Result<_>>()?;
        // repeat = a later appearance of an edge already seen in this segment
        let mut seen = BTreeSet::new();
        let repeats: Vec<usize> = verts
            .iter()
            .enumerate()
            .filter(|&(_, &v)| !seen.insert(v))
            .map(|(t, _)| t)
            .collect();
        // the final root entry is never a repeat within its segment
        debug_assert!(repeats.last() != Some(&(verts.len() - 1)));
        for &t in repeats.iter().rev() {
            let merged = shortcut(&moves[t - 1], &moves[t])?;
            moves[t - 1] = merged;
            moves.remove(t);
            verts.remove(t);
        }
        for d in moves {
            scheme.add(d, BigRational::one());
        }
    }
    Ok(scheme)
}

/// Convenience: the provable ceiling for the scheme value on a completed
/// instance, two charges per triangle through any tree edge.
pub fn value_ceiling(g: &WeightedGraph) -> BigRational {
    BigRational::from_integer(BigInt::from(2 * g.max_degree() as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::complete;
    use crate::gen::{gen_random, GenSpec, WeightKind};
    use crate::monotone::lightest_monotone_tree;

    fn ratio(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn completed_instance(
        width: usize,
        bags: usize,
        seed: u64,
        density: f64,
        weights: WeightKind,
    ) -> (WeightedGraph, IntervalRepresentation) {
        let (g, pd) = gen_random(&GenSpec { width, bags, seed, density, weights }).unwrap();
        let (cg, _) = complete(&g, &pd).unwrap();
        let iv = IntervalRepresentation::from_decomposition(&pd, g.n()).unwrap();
        (cg, iv)
    }

    #[test]
    fn detour_canonicalization_and_validation() {
        let d = Detour::new(2, 0, vec![2, 1, 0]).unwrap();
        assert_eq!((d.u, d.v), (0, 2));
        assert_eq!(d.path, vec![0, 1, 2]);
        assert!(d.path_contains(1, 0));
        assert!(!d.path_contains(0, 2));
        assert!(Detour::new(0, 0, vec![0]).is_err());
        assert!(Detour::new(0, 2, vec![0, 2]).is_err());
        assert!(Detour::new(0, 2, vec![0, 1, 1, 2]).is_err());
        assert!(Detour::new(0, 2, vec![1, 0, 2]).is_err());
    }

    #[test]
    fn verify_accepts_a_hand_built_square_scheme() {
        // 4-cycle with a chord: tree = {01, 12, 23}; chords 03 and 02
        let g = WeightedGraph::new(
            4,
            vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 3.0), (0, 2, 2.0)],
        )
        .unwrap();
        let t = |a: usize, b: usize| g.edge_between(a, b).unwrap();
        let tree = EdgeSubgraph::new(vec![t(0, 1), t(1, 2), t(2, 3)]);
        let mut s = ChargingScheme::new();
        // 03 charges 0-2-3 (through the chord), 02 charges 0-1-2
        s.add(Detour::new(0, 3, vec![0, 2, 3]).unwrap(), ratio(1));
        s.add(Detour::new(0, 2, vec![0, 1, 2]).unwrap(), ratio(1));
        let rep = verify_scheme(&g, &tree, &s, true).unwrap();
        assert_eq!(rep.value, ratio(1));
        assert_eq!(rep.moves_checked, 2);
        let order = rep.edge_order.unwrap();
        // charged-before relation: 03 before 02, 02 before tree edges it hits
        let pos = |id: usize| order.iter().position(|&x| x == id).unwrap();
        let id03 = g.edge_between(0, 3).unwrap();
        let id02 = g.edge_between(0, 2).unwrap();
        assert!(pos(id03) < pos(id02));
        assert!(pos(id02) < pos(g.edge_between(0, 1).unwrap()));
    }

    #[test]
    fn verify_rejects_broken_schemes() {
        let g = WeightedGraph::new(
            4,
            vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 3.0), (0, 2, 2.0)],
        )
        .unwrap();
        let t = |a: usize, b: usize| g.edge_between(a, b).unwrap();
        let tree = EdgeSubgraph::new(vec![t(0, 1), t(1, 2), t(2, 3)]);
        // missing move for 02
        let mut s = ChargingScheme::new();
        s.add(Detour::new(0, 3, vec![0, 2, 3]).unwrap(), ratio(1));
        assert!(verify_scheme(&g, &tree, &s, false).is_err());
        // cyclic: 03 charges through 02, 02 charges through 03
        let mut s = ChargingScheme::new();
        s.add(Detour::new(0, 3, vec![0, 2, 3]).unwrap(), ratio(1));
        s.add(Detour::new(0, 2, vec![0, 3, 2]).unwrap(), ratio(1));
        assert!(verify_scheme(&g, &tree, &s, true).is_err());
        assert!(verify_scheme(&g, &tree, &s, false).is_ok());
        // tree edge charging violates acyclicity condition
        let mut s = ChargingScheme::new();
        s.add(Detour::new(0, 3, vec![0, 2, 3]).unwrap(), ratio(1));
        s.add(Detour::new(0, 2, vec![0, 1, 2]).unwrap(), ratio(1));
        s.add(Detour::new(0, 1, vec![0, 2, 1]).unwrap(), ratio(1));
        assert!(verify_scheme(&g, &tree, &s, true).is_err());
    }

    #[test]
    fn shortcut_splices_and_reduces() {
        // outer: (0,4) charges 0-1-2-3-4; inner: (2,3) charges 2-5-3
        let outer = Detour::new(0, 4, vec![0, 1, 2, 3, 4]).unwrap();
        let inner = Detour::new(2, 3, vec![2, 5, 3]).unwrap();
        let s = shortcut(&outer, &inner).unwrap();
        assert_eq!(s.path, vec![0, 1, 2, 5, 3, 4]);
        // inserting a path that doubles back over the outer prefix
        let outer = Detour::new(0, 3, vec![0, 1, 2, 3]).unwrap();
        let inner = Detour::new(2, 3, vec![2, 1, 4, 3]).unwrap();
        let s = shortcut(&outer, &inner).unwrap();
        assert_eq!(s.path, vec![0, 1, 4, 3]);
        // preconditions
        assert!(shortcut(&outer, &Detour::new(4, 5, vec![4, 6, 5]).unwrap()).is_err());
        let bad_inner = Detour::new(2, 3, vec![2, 0, 3]).unwrap();
        let outer2 = Detour::new(0, 3, vec![0, 2, 3]).unwrap();
        // the inner detour routes through the outer edge itself
        assert!(shortcut(&outer2, &bad_inner).is_err());
    }

    #[test]
    fn chained_shortcuts_commute() {
        // d1 charges through e2, d2 (= e2's move) charges through e3, and so
        // on; cutting the middle edges out in either order leaves the same
        // single move.
        let d1 = Detour::new(0, 9, vec![0, 2, 9]).unwrap();
        let d2 = Detour::new(2, 9, vec![2, 4, 9]).unwrap();
        let d3 = Detour::new(4, 9, vec![4, 6, 9]).unwrap();
        let a = shortcut(&shortcut(&d1, &d2).unwrap(), &d3).unwrap();
        let b = shortcut(&d1, &shortcut(&d2, &d3).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.path, vec![0, 2, 4, 6, 9]);
    }

    #[test]
    fn scheme_construction_verifies_on_corpus() {
        for seed in 0..10u64 {
            let (cg, iv) = completed_instance(
                2 + (seed as usize % 3),
                5 + (seed as usize % 4),
                40 + seed,
                [0.4, 0.8, 1.0][seed as usize % 3],
                [WeightKind::Uniform, WeightKind::Integer, WeightKind::Skewed]
                    [seed as usize % 3],
            );
            let tree = lightest_monotone_tree(&cg, &iv).unwrap();
            let scheme = build_scheme(&cg, &iv, &tree).unwrap();
            let tree_ids = tree.edge_ids(&cg).unwrap();
            let rep = verify_scheme(&cg, &tree_ids, &scheme, true).unwrap();
            assert!(
                rep.value <= value_ceiling(&cg),
                "seed {seed}: value {} exceeds 2*maxdeg {}",
                rep.value,
                value_ceiling(&cg)
            );
            // every non-tree edge charges exactly once, with unit value
            for id in 0..cg.m() {
                if !tree_ids.contains(id) {
                    let e = cg.edge(id);
                    assert_eq!(scheme.out_of(e.u, e.v), ratio(1), "seed {seed} edge {id}");
                }
            }
        }
    }

    #[test]
    fn removing_edges_preserves_validity_and_value() {
        for seed in [3u64, 7, 11] {
            let (cg, iv) = completed_instance(3, 6, seed, 0.9, WeightKind::Uniform);
            let tree = lightest_monotone_tree(&cg, &iv).unwrap();
            let tree_ids = tree.edge_ids(&cg).unwrap();
            let scheme = build_scheme(&cg, &iv, &tree).unwrap();
            let before = verify_scheme(&cg, &tree_ids, &scheme, true).unwrap();
            // remove each non-tree edge in turn
            for id in 0..cg.m() {
                if tree_ids.contains(id) {
                    continue;
                }
                let e = cg.edge(id);
                let smaller = remove_edge(&cg, &tree_ids, &scheme, e.u, e.v).unwrap();
                let g2 = cg.without_edge(e.u, e.v).unwrap();
                let tree2 = tree.edge_ids(&g2).unwrap();
                let rep = verify_scheme(&g2, &tree2, &smaller, true).unwrap();
                assert!(
                    rep.value <= before.value,
                    "seed {seed}: value grew from {} to {}",
                    before.value,
                    rep.value
                );
            }
        }
    }

    #[test]
    fn empty_scheme_passes_when_every_edge_is_in_the_tree() {
        let g = WeightedGraph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let tree = EdgeSubgraph::new(vec![0, 1]);
        let rep = verify_scheme(&g, &tree, &ChargingScheme::new(), true).unwrap();
        assert_eq!(rep.value, BigRational::zero());
        assert_eq!(rep.moves_checked, 0);
    }
}
