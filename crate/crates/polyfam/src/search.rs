//! Exhaustive search for the largest polygon family on a small point set
//! under each of the three relations, with checks against the counting
//! bounds those relations obey.
//!
//! The search is an exact maximum-clique computation over the compatibility
//! graph (candidate polygons as vertices, relation-satisfying pairs as
//! edges), run by branch and bound with a greedy-coloring bound. Candidates
//! are explored in lexicographic order and the incumbent is only replaced by
//! strictly larger cliques, so the reported witness is the lexicographically
//! least maximum family and identical problems always yield identical
//! results.

use crate::classify::{classify_pair, satisfies, ClassifyError, Relation};
use crate::kernel::{planar_hull, supporting_plane, Point3};
use crate::model::{validate_polygon, ConvexPlanarPolygon, Family, ModelError, PointSet};
use crate::scalar::{int, Scalar};
use rayon::prelude::*;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("polygon size must be at least 3, got {0}")]
    KTooSmall(usize),
    #[error("point set has {n} points, above the configured maximum of {max}")]
    TooManyPoints { n: usize, max: usize },
    #[error("bound checks need an exhausted search result")]
    NotExhausted,
    #[error("maximum {value} violates the bound {name} = {bound}")]
    BoundViolation {
        name: &'static str,
        value: usize,
        bound: Scalar,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// Budgets for one search run. The node budget caps branch-and-bound calls
/// (deterministic); the optional wall-clock budget is a safety valve whose
/// trigger point is not deterministic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SearchLimits {
    pub node_budget: u64,
    pub time_budget_ms: Option<u64>,
    /// Refuse point sets above this size (candidate counts explode).
    pub max_points: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            node_budget: 50_000_000,
            time_budget_ms: None,
            max_points: 10,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SearchProblem {
    pub point_set: PointSet,
    pub k: usize,
    pub relation: Relation,
    pub limits: SearchLimits,
}

/// Result of a search run. `exhausted` is true when the search completed
/// within budget, making `max_size` the exact maximum.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SearchResult {
    pub relation: Relation,
    pub k: usize,
    pub max_size: usize,
    pub witness_family: Family,
    pub candidates_count: usize,
    pub nodes_explored: u64,
    pub exhausted: bool,
}

/// All convex planar `k`-gons on the point set, one per `k`-subset in
/// strictly convex coplanar position, in lexicographic subset order.
pub fn enumerate_candidate_kgons(
    ps: &PointSet,
    k: usize,
) -> Result<Vec<ConvexPlanarPolygon>, SearchError> {
    if k < 3 {
        return Err(SearchError::KTooSmall(k));
    }
    let n = ps.len();
    let mut out = Vec::new();
    if n < k {
        return Ok(out);
    }
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        if let Some(poly) = subset_polygon(ps, &subset)? {
            out.push(poly);
        }
        // Next lexicographic combination.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if subset[i] != i + n - k {
                break;
            }
        }
        subset[i] += 1;
        for j in (i + 1)..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// The convex polygon on a point subset, if the subset is coplanar and in
/// strictly convex position (its planar hull uses every point).
fn subset_polygon(ps: &PointSet, subset: &[usize]) -> Result<Option<ConvexPlanarPolygon>, SearchError> {
    let pts: Vec<Point3> = subset.iter().map(|&i| ps.get(i).clone()).collect();
    let plane = match supporting_plane(&pts) {
        Ok(p) => p,
        Err(_) => return Ok(None), // collinear or not coplanar
    };
    let hull = planar_hull(&pts, &plane);
    if hull.len() != subset.len() {
        return Ok(None); // some point is inside the hull or on an edge
    }
    let indices: Vec<usize> = hull
        .iter()
        .map(|h| {
            subset
                .iter()
                .copied()
                .find(|&i| ps.get(i) == h)
                .expect("hull vertices come from the subset")
        })
        .collect();
    Ok(Some(validate_polygon(ps, &indices)?))
}

/// Fixed-width bitset over candidate indices.
#[derive(Clone)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn empty(n: usize) -> Self {
        BitRow(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut row = BitRow::empty(n);
        for i in 0..n {
            row.insert(i);
        }
        row
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersect(&self, other: &BitRow) -> BitRow {
        BitRow(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a & b)
                .collect(),
        )
    }

    fn disjoint(&self, other: &BitRow) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == 0)
    }

    /// Clears all bits at positions `<= i`.
    fn clear_through(&mut self, i: usize) {
        let w = i / 64;
        for word in &mut self.0[..w] {
            *word = 0;
        }
        let keep_from = (i % 64) + 1;
        if keep_from < 64 {
            self.0[w] &= !0u64 << keep_from;
        } else {
            self.0[w] = 0;
        }
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

struct CliqueSearch {
    adj: Vec<BitRow>,
    best: Vec<usize>,
    nodes: u64,
    node_budget: u64,
    deadline: Option<(Instant, u64)>,
    aborted: bool,
}

impl CliqueSearch {
    /// Greedy-coloring upper bound on the clique number of the subgraph
    /// induced by `p`.
    fn coloring_bound(&self, p: &BitRow) -> usize {
        let mut classes: Vec<BitRow> = Vec::new();
        for v in p.iter() {
            match classes.iter_mut().find(|cl| cl.disjoint(&self.adj[v])) {
                Some(cl) => cl.insert(v),
                None => {
                    let mut cl = BitRow::empty(self.adj.len());
                    cl.insert(v);
                    classes.push(cl);
                }
            }
        }
        classes.len()
    }

    fn over_budget(&mut self) -> bool {
        if self.nodes > self.node_budget {
            return true;
        }
        if let Some((start, ms)) = self.deadline {
            if self.nodes % 4096 == 0 && start.elapsed().as_millis() as u64 > ms {
                return true;
            }
        }
        false
    }

    fn dfs(&mut self, cur: &mut Vec<usize>, p: &BitRow) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.over_budget() {
            self.aborted = true;
            return;
        }
        if cur.len() > self.best.len() {
            self.best = cur.clone();
        }
        if p.is_empty() {
            return;
        }
        let remaining = p.count();
        if cur.len() + remaining <= self.best.len() {
            return;
        }
        if cur.len() + self.coloring_bound(p) <= self.best.len() {
            return;
        }
        let vs: Vec<usize> = p.iter().collect();
        for (pos, &v) in vs.iter().enumerate() {
            if self.aborted {
                return;
            }
            if cur.len() + (vs.len() - pos) <= self.best.len() {
                return;
            }
            let mut p2 = p.intersect(&self.adj[v]);
            p2.clear_through(v);
            cur.push(v);
            self.dfs(cur, &p2);
            cur.pop();
        }
    }
}

/// Exact maximum family on the problem's point set. The witness is the
/// lexicographically least maximum clique of candidates; when a budget
/// aborts the search, the best family found so far is returned with
/// `exhausted = false`.
pub fn max_family(problem: &SearchProblem) -> Result<SearchResult, SearchError> {
    let n = problem.point_set.len();
    if n > problem.limits.max_points {
        return Err(SearchError::TooManyPoints {
            n,
            max: problem.limits.max_points,
        });
    }
    let candidates = enumerate_candidate_kgons(&problem.point_set, problem.k)?;
    let m = candidates.len();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
        .collect();
    let compatible: Vec<bool> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let c = classify_pair(&problem.point_set, &candidates[i], &candidates[j])
                .expect("distinct candidates");
            satisfies(problem.relation, &c)
        })
        .collect();
    let mut adj: Vec<BitRow> = (0..m).map(|_| BitRow::empty(m)).collect();
    for (&(i, j), &ok) in pairs.iter().zip(&compatible) {
        if ok {
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    let mut search = CliqueSearch {
        adj,
        best: Vec::new(),
        nodes: 0,
        node_budget: problem.limits.node_budget,
        deadline: problem
            .limits
            .time_budget_ms
            .map(|ms| (Instant::now(), ms)),
        aborted: false,
    };
    if m > 0 {
        search.dfs(&mut Vec::new(), &BitRow::full(m));
    }
    let index_lists: Vec<Vec<usize>> = search
        .best
        .iter()
        .map(|&c| candidates[c].vertices().to_vec())
        .collect();
    let mut witness_family = Family::new(problem.point_set.clone(), &index_lists)?;
    witness_family.set_metadata("relation", problem.relation.name());
    witness_family.set_metadata("k", &problem.k.to_string());
    witness_family.set_metadata("search", "max-family");
    Ok(SearchResult {
        relation: problem.relation,
        k: problem.k,
        max_size: search.best.len(),
        witness_family,
        candidates_count: m,
        nodes_explored: search.nodes,
        exhausted: !search.aborted,
    })
}

/// One counting bound evaluated against a search result.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoundCheck {
    pub name: &'static str,
    pub bound: Scalar,
    pub value: usize,
    pub slack: Scalar,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BoundReport {
    pub checks: Vec<BoundCheck>,
    /// Bounds that do not apply to this problem (with the reason).
    pub skipped: Vec<String>,
}

impl BoundReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "bound {}: {} <= {} (slack {})\n",
                c.name, c.value, c.bound, c.slack
            ));
        }
        for s in &self.skipped {
            out.push_str(&format!("bound skipped: {s}\n"));
        }
        out
    }
}

/// Checks the counting bounds the three relations obey on `n` points:
/// families of almost-disjoint triangles have at most `n(n-1)/6` members,
/// vertex-or-edge-compatible triangle families at most `n(n-3)` (for
/// `n >= 4`), and no-bad-pair families fewer than `n^2` for every `k`.
/// Requires an exhausted result; a violation would mean a bug, not geometry.
pub fn check_counting_bounds(result: &SearchResult) -> Result<BoundReport, SearchError> {
    if !result.exhausted {
        return Err(SearchError::NotExhausted);
    }
    let n = int(result.witness_family.point_set().len() as i64);
    let value = result.max_size;
    let mut report = BoundReport::default();
    match (result.relation, result.k) {
        (Relation::AlmostDisjoint, 3) => {
            apply_bound(
                &mut report,
                "n(n-1)/6",
                &n * (&n - int(1)) / int(6),
                value,
                false,
            )?;
        }
        (Relation::VertexOrEdge, 3) => {
            if n >= int(4) {
                apply_bound(&mut report, "n(n-3)", &n * (&n - int(3)), value, false)?;
            } else {
                report
                    .skipped
                    .push("n(n-3) needs n >= 4 to be meaningful".into());
            }
        }
        (Relation::NoBadIntersection, _) => {}
        _ => {
            report.skipped.push(format!(
                "no k = {} bound for relation {}",
                result.k,
                result.relation.name()
            ));
        }
    }
    // The diagonal-sharing bound applies to every relation in the hierarchy:
    // anything almost disjoint or vertex-or-edge compatible has no bad pair.
    apply_bound(&mut report, "n^2 (strict)", &n * &n, value, true)?;
    Ok(report)
}

fn apply_bound(
    report: &mut BoundReport,
    name: &'static str,
    bound: Scalar,
    value: usize,
    strict: bool,
) -> Result<(), SearchError> {
    let val = int(value as i64);
    let ok = if strict { val < bound } else { val <= bound };
    if !ok {
        return Err(SearchError::BoundViolation { name, value, bound });
    }
    report.checks.push(BoundCheck {
        name,
        bound: bound.clone(),
        value,
        slack: bound - val,
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::verify_family;
    use crate::construct::{christmas_tree, prism_quads};

    fn tetrahedron() -> PointSet {
        PointSet::new(vec![
            Point3::from_i64(0, 0, 0),
            Point3::from_i64(1, 0, 0),
            Point3::from_i64(0, 1, 0),
            Point3::from_i64(0, 0, 1),
        ])
        .unwrap()
    }

    fn problem(ps: &PointSet, k: usize, relation: Relation) -> SearchProblem {
        SearchProblem {
            point_set: ps.clone(),
            k,
            relation,
            limits: SearchLimits::default(),
        }
    }

    #[test]
    fn enumerate_tetrahedron_triangles() {
        let cands = enumerate_candidate_kgons(&tetrahedron(), 3).unwrap();
        assert_eq!(cands.len(), 4);
        assert!(enumerate_candidate_kgons(&tetrahedron(), 2).is_err());
        // No coplanar 4-subset on a tetrahedron.
        assert!(enumerate_candidate_kgons(&tetrahedron(), 4)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn enumerate_square_quad() {
        let ps = PointSet::new(vec![
            Point3::from_i64(0, 0, 0),
            Point3::from_i64(1, 0, 0),
            Point3::from_i64(1, 1, 0),
            Point3::from_i64(0, 1, 0),
        ])
        .unwrap();
        let cands = enumerate_candidate_kgons(&ps, 4).unwrap();
        assert_eq!(cands.len(), 1);
        // A collinear point contributes no extra quad through it.
        let ps5 = PointSet::new(vec![
            Point3::from_i64(0, 0, 0),
            Point3::from_i64(1, 0, 0),
            Point3::from_i64(1, 1, 0),
            Point3::from_i64(0, 1, 0),
            Point3::from_i64(2, 0, 0),
        ])
        .unwrap();
        let cands5 = enumerate_candidate_kgons(&ps5, 4).unwrap();
        // Subsets {0,1,2,3}, {0,2,3,4}, {1,2,3,4} are in convex position;
        // {0,1,2,4} and {0,1,3,4} have a point on the hull boundary or inside.
        assert_eq!(cands5.len(), 3);
    }

    #[test]
    fn enumerate_prism_includes_construction_quads() {
        let fam = prism_quads(4, 0, None).unwrap();
        let cands = enumerate_candidate_kgons(fam.point_set(), 4).unwrap();
        // Six side parallelograms plus the base and top quadrilaterals.
        assert_eq!(cands.len(), 8);
        for poly in fam.polygons() {
            assert!(cands.contains(poly));
        }
    }

    #[test]
    fn tetrahedron_maxima_across_relations() {
        let ps = tetrahedron();
        let r1 = max_family(&problem(&ps, 3, Relation::AlmostDisjoint)).unwrap();
        assert!(r1.exhausted);
        assert_eq!(r1.max_size, 1);
        let r2 = max_family(&problem(&ps, 3, Relation::VertexOrEdge)).unwrap();
        assert_eq!(r2.max_size, 4);
        let r3 = max_family(&problem(&ps, 3, Relation::NoBadIntersection)).unwrap();
        assert_eq!(r3.max_size, 4);
        // Witnesses re-verify.
        assert!(verify_family(&r2.witness_family, Relation::VertexOrEdge).is_empty());
        assert!(verify_family(&r3.witness_family, Relation::NoBadIntersection).is_empty());
        // Bound reports pass; tetrahedron vertex-or-edge is tight.
        let b2 = check_counting_bounds(&r2).unwrap();
        assert_eq!(b2.checks[0].slack, int(0));
        let b1 = check_counting_bounds(&r1).unwrap();
        assert_eq!(b1.checks[0].bound, int(2));
    }

    #[test]
    fn tree_points_vertex_or_edge_exceeds_construction() {
        // On the 5 points of the m = 2 tree, exhaustive search finds more
        // compatible triangles than the construction's 4: circle-pair
        // triangles and axis-diagonal triangles join in.
        let fam = christmas_tree(2).unwrap();
        let r = max_family(&problem(fam.point_set(), 3, Relation::VertexOrEdge)).unwrap();
        assert!(r.exhausted);
        assert!(r.max_size >= 4, "construction gives a family of 4");
        assert!(verify_family(&r.witness_family, Relation::VertexOrEdge).is_empty());
        check_counting_bounds(&r).unwrap();
    }

    #[test]
    fn budget_abort_is_honest_and_deterministic() {
        let fam = christmas_tree(3).unwrap();
        let mut p = problem(fam.point_set(), 3, Relation::NoBadIntersection);
        p.limits.node_budget = 5;
        let a = max_family(&p).unwrap();
        assert!(!a.exhausted);
        assert!(check_counting_bounds(&a).is_err());
        let b = max_family(&p).unwrap();
        assert_eq!(a, b);
        assert!(a.nodes_explored <= 6);
    }

    #[test]
    fn identical_problems_identical_witnesses() {
        let ps = tetrahedron();
        let a = max_family(&problem(&ps, 3, Relation::VertexOrEdge)).unwrap();
        let b = max_family(&problem(&ps, 3, Relation::VertexOrEdge)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn point_cap_enforced() {
        let fam = christmas_tree(5).unwrap(); // 11 points > default cap 10
        let p = problem(fam.point_set(), 3, Relation::VertexOrEdge);
        assert!(matches!(
            max_family(&p),
            Err(SearchError::TooManyPoints { n: 11, max: 10 })
        ));
    }
}
