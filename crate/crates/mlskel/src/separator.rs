//! Local separator search, shrinking, and thickening on a single level.
//!
//! The search grows a vertex set Σ from a start vertex, always absorbing the
//! front vertex closest to a guiding sphere that trails the absorbed
//! geometry. The front's induced subgraph lives in a dynamic-connectivity
//! structure so each absorption costs polylogarithmic time per touched edge;
//! the search succeeds the moment the front splits into two components and
//! fails when the front empties or a size budget runs out first.
//!
//! Found separators are rarely minimal. [`shrink_separator`] peels vertices
//! off (guided by smoothed distance to an anchor point) until no
//! single vertex can leave without breaking the separator;
//! [`thicken_separator`] pads a separator with front vertices first, which
//! gives the subsequent shrink more freedom and tends to produce shorter
//! cuts.

use crate::dyncon::DynamicConnectivity;
use crate::graph::{self, EmbeddedGraph, VertexId};
use crate::vec3::Vec3;

/// Guards the sphere-update division when the chosen vertex sits exactly on
/// the current center.
const SPHERE_EPS: f64 = 1e-12;

/// A local separator on one hierarchy level.
///
/// `members` is sorted ascending. `footprint` is the capacity sum of the
/// members, i.e. how many original vertices the separator represents.
/// `guide` is the anchor the shrink heuristic erodes toward: the start
/// vertex position for searched separators (projection re-centres it).
#[derive(Debug, Clone, PartialEq)]
pub struct Separator {
    pub level: u32,
    pub members: Vec<VertexId>,
    pub footprint: u64,
    pub guide: Vec3,
}

impl Separator {
    /// Builds a separator from an unsorted member list, recomputing the
    /// footprint from `g`.
    pub fn new(g: &EmbeddedGraph, level: u32, mut members: Vec<VertexId>, guide: Vec3) -> Separator {
        members.sort_unstable();
        let footprint = members.iter().map(|&v| g.capacity(v)).sum();
        Separator { level, members, footprint, guide }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Reusable per-worker search state sized for one level graph.
///
/// Construction costs O(n); afterwards every search resets only what it
/// touched, so a worker can run many searches on a large graph without
/// paying O(n) each time. A scratch is tied to the graph it was built for.
pub struct SearchScratch {
    conn: DynamicConnectivity,
    epoch: u64,
    sigma_mark: Vec<u64>,
    front_mark: Vec<u64>,
    front_pos: Vec<u32>,
    front: Vec<VertexId>,
    sigma: Vec<VertexId>,
}

impl SearchScratch {
    pub fn new(g: &EmbeddedGraph) -> SearchScratch {
        let n = g.vertex_count();
        SearchScratch::with_connectivity(DynamicConnectivity::new(n), n)
    }

    /// Like [`SearchScratch::new`] but with an explicit promotion threshold
    /// for the connectivity structure.
    pub fn with_threshold(g: &EmbeddedGraph, threshold: usize) -> SearchScratch {
        let n = g.vertex_count();
        SearchScratch::with_connectivity(DynamicConnectivity::with_threshold(n, threshold), n)
    }

    fn with_connectivity(conn: DynamicConnectivity, n: usize) -> SearchScratch {
        SearchScratch {
            conn,
            epoch: 0,
            sigma_mark: vec![0; n],
            front_mark: vec![0; n],
            front_pos: vec![0; n],
            front: Vec::new(),
            sigma: Vec::new(),
        }
    }

    fn begin(&mut self) {
        self.epoch += 1;
        self.conn.clear();
        self.front.clear();
        self.sigma.clear();
    }

    fn in_sigma(&self, v: VertexId) -> bool {
        self.sigma_mark[v as usize] == self.epoch
    }

    fn in_front(&self, v: VertexId) -> bool {
        self.front_mark[v as usize] == self.epoch
    }

    fn push_front(&mut self, v: VertexId) {
        self.front_mark[v as usize] = self.epoch;
        self.front_pos[v as usize] = self.front.len() as u32;
        self.front.push(v);
    }

    fn drop_front(&mut self, v: VertexId) {
        self.front_mark[v as usize] = 0;
        let pos = self.front_pos[v as usize] as usize;
        self.front.swap_remove(pos);
        if pos < self.front.len() {
            self.front_pos[self.front[pos] as usize] = pos as u32;
        }
    }

    /// Connected components of the subgraph induced by the current front.
    fn front_components(&self) -> usize {
        let singletons = self.conn.vertex_count() - self.front.len();
        self.conn.number_of_components() - singletons
    }
}

/// Grows a local separator from `v0`, absorbing at most `alpha` vertices.
///
/// Returns the grown set as soon as the front splits; returns `None` when
/// the front empties (the whole component was swallowed) or when the budget
/// is exhausted while the front is still connected. The returned separator
/// has `level` 0; callers running on coarser graphs relabel it.
pub fn restricted_separator_search(
    g: &EmbeddedGraph,
    v0: VertexId,
    alpha: usize,
    scratch: &mut SearchScratch,
) -> Option<Separator> {
    assert!(alpha >= 1, "search budget must be positive");
    assert!((v0 as usize) < g.vertex_count(), "start vertex out of range");
    assert_eq!(scratch.conn.vertex_count(), g.vertex_count(), "scratch sized for a different graph");
    scratch.begin();

    scratch.sigma_mark[v0 as usize] = scratch.epoch;
    scratch.sigma.push(v0);
    let mut center = g.position(v0);
    let mut radius = 0.0_f64;

    for &w in g.neighbors(v0) {
        scratch.push_front(w);
    }
    for i in 0..scratch.front.len() {
        let w = scratch.front[i];
        for &x in g.neighbors(w) {
            if x < w && scratch.in_front(x) {
                scratch.conn.connect(w, x);
            }
        }
    }

    loop {
        if scratch.front_components() > 1 {
            // Anchor the shrink guide at the start vertex, not the drifted
            // sphere center: erosion then settles on the cut through v0's
            // own neighbourhood, which keeps adjacent searches from
            // producing interlocking off-by-one separators on regular
            // regions.
            return Some(Separator::new(g, 0, scratch.sigma.clone(), g.position(v0)));
        }
        if scratch.front.is_empty() || scratch.sigma.len() == alpha {
            return None;
        }

        // Closest front vertex to the sphere center; ties to the smaller id.
        let mut best = (f64::INFINITY, u32::MAX);
        for &w in &scratch.front {
            let cand = (center.dist(g.position(w)), w);
            if cand < best {
                best = cand;
            }
        }
        let (d, v) = (best.0, best.1);

        if d > radius {
            radius = 0.5 * (radius + d);
            let pv = g.position(v);
            center = pv + (center - pv) * (radius / (SPHERE_EPS + d));
        }

        absorb(g, scratch, v);
    }
}

/// Moves front vertex `v` into Σ and restores the front invariants: the
/// front holds exactly the vertices adjacent to Σ but outside it, and the
/// connectivity structure holds exactly the edges induced by the front.
fn absorb(g: &EmbeddedGraph, scratch: &mut SearchScratch, v: VertexId) {
    for &w in g.neighbors(v) {
        if scratch.in_front(w) {
            scratch.conn.remove(v, w);
        }
    }
    scratch.drop_front(v);
    scratch.sigma_mark[v as usize] = scratch.epoch;
    scratch.sigma.push(v);
    for &w in g.neighbors(v) {
        if scratch.in_sigma(w) || scratch.in_front(w) {
            continue;
        }
        scratch.push_front(w);
        // A vertex entering the front brings every edge it has into the
        // current front, including edges to front vertices far from v.
        for &x in g.neighbors(w) {
            if scratch.in_front(x) && x != w {
                scratch.conn.connect(w, x);
            }
        }
    }
}

/// Removes vertices from a valid separator until it is minimal.
///
/// Vertices are ranked by distance to the guide anchor, smoothed once over
/// the closed in-separator neighbourhood, and peeled farthest-first
/// whenever the remainder stays a connected local separator; scans repeat
/// until a full pass removes nothing. Eroding the periphery makes the
/// survivor hug the guide, so on tubular regions the result is a tight
/// ring near the anchor rather than a wavy offset of the search front.
pub fn shrink_separator(g: &EmbeddedGraph, sep: &Separator) -> Separator {
    assert!(
        graph::is_local_separator(g, &sep.members),
        "shrink requires a valid local separator"
    );
    let members = {
        let mut m = sep.members.clone();
        m.sort_unstable();
        m
    };
    let survivor = erode(g, &members, sep.guide);
    Separator::new(g, sep.level, survivor, sep.guide)
}

/// One full erosion: peel removable vertices farthest from `guide` until a
/// pass removes nothing. Returns the sorted survivor set.
fn erode(g: &EmbeddedGraph, members: &[VertexId], guide: Vec3) -> Vec<VertexId> {
    let in_sep: std::collections::HashSet<VertexId> = members.iter().copied().collect();
    let attr: Vec<f64> = members.iter().map(|&v| guide.dist(g.position(v))).collect();
    let index_of: std::collections::HashMap<VertexId, usize> =
        members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut order: Vec<(f64, VertexId)> = members
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut sum = attr[i];
            let mut cnt = 1usize;
            for &w in g.neighbors(v) {
                if let Some(&j) = index_of.get(&w) {
                    sum += attr[j];
                    cnt += 1;
                }
            }
            (sum / cnt as f64, v)
        })
        .collect();
    // Farthest first, ids ascending on ties, so the scan is deterministic.
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));

    let mut alive = in_sep;
    loop {
        let mut moved = false;
        for &(_, v) in &order {
            if !alive.contains(&v) || alive.len() == 1 {
                continue;
            }
            let mut remainder: Vec<VertexId> =
                alive.iter().copied().filter(|&w| w != v).collect();
            remainder.sort_unstable();
            if graph::is_connected_set(g, &remainder) && graph::separates(g, &remainder) {
                alive.remove(&v);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    let mut out: Vec<VertexId> = alive.into_iter().collect();
    out.sort_unstable();
    out
}

/// Adds front vertices of a valid separator back in, one by one in
/// ascending id, keeping each only if the grown set still separates. The
/// candidate list is the front of the input set; vertices exposed by the
/// additions themselves are not considered.
pub fn thicken_separator(g: &EmbeddedGraph, sep: &Separator) -> Separator {
    assert!(
        graph::is_local_separator(g, &sep.members),
        "thicken requires a valid local separator"
    );
    let candidates = graph::front_of(g, &sep.members);
    let mut current = sep.members.clone();
    current.sort_unstable();
    for v in candidates {
        let mut trial = current.clone();
        let at = trial.binary_search(&v).unwrap_err();
        trial.insert(at, v);
        // The candidate is adjacent to the original set, so the trial is
        // connected whenever the input was.
        if graph::separates(g, &trial) {
            current = trial;
        }
    }
    Separator::new(g, sep.level, current, sep.guide)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_graphs::*;
    use crate::graph::{is_local_separator, is_minimal_local_separator};
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};

    /// Reference search that recomputes the front and its components from
    /// scratch every iteration. Slow but obviously faithful to the growth
    /// rule; the fast path must match it exactly.
    fn naive_search(g: &EmbeddedGraph, v0: VertexId, alpha: usize) -> Option<Separator> {
        let mut sigma = vec![v0];
        let mut center = g.position(v0);
        let mut radius = 0.0_f64;
        loop {
            let mut sorted = sigma.clone();
            sorted.sort_unstable();
            let front = crate::graph::front_of(g, &sorted);
            if subset_components(g, &front) > 1 {
                return Some(Separator::new(g, 0, sigma, g.position(v0)));
            }
            if front.is_empty() || sigma.len() == alpha {
                return None;
            }
            let mut best = (f64::INFINITY, u32::MAX);
            for &w in &front {
                let cand = (center.dist(g.position(w)), w);
                if cand < best {
                    best = cand;
                }
            }
            let (d, v) = (best.0, best.1);
            if d > radius {
                radius = 0.5 * (radius + d);
                let pv = g.position(v);
                center = pv + (center - pv) * (radius / (SPHERE_EPS + d));
            }
            sigma.push(v);
        }
    }

    fn subset_components(g: &EmbeddedGraph, subset: &[VertexId]) -> usize {
        let set: std::collections::HashSet<VertexId> = subset.iter().copied().collect();
        let mut seen = std::collections::HashSet::new();
        let mut count = 0;
        for &start in subset {
            if !seen.insert(start) {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in g.neighbors(v) {
                    if set.contains(&w) && seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    #[test]
    fn cycle_start_vertex_is_already_a_separator() {
        let g = cycle(8);
        let mut scratch = SearchScratch::new(&g);
        for v0 in 0..8 {
            let sep = restricted_separator_search(&g, v0, 64, &mut scratch).unwrap();
            assert_eq!(sep.members, vec![v0]);
            assert_eq!(sep.footprint, 1);
            assert_eq!(sep.guide, g.position(v0));
        }
    }

    #[test]
    fn complete_graph_has_no_separator() {
        let g = complete(5);
        let mut scratch = SearchScratch::new(&g);
        for alpha in [1, 3, 4, 5, 64] {
            for v0 in 0..5 {
                assert!(restricted_separator_search(&g, v0, alpha, &mut scratch).is_none());
            }
        }
    }

    #[test]
    fn single_edge_fails_via_empty_front() {
        let g = path(2);
        let mut scratch = SearchScratch::new(&g);
        assert!(restricted_separator_search(&g, 0, 64, &mut scratch).is_none());
        assert!(restricted_separator_search(&g, 1, 64, &mut scratch).is_none());
    }

    #[test]
    fn budget_caps_result_size() {
        for seed in 0..10u64 {
            let g = random_connected(seed, 30);
            let mut scratch = SearchScratch::new(&g);
            for alpha in [1usize, 2, 5] {
                for v0 in 0..g.vertex_count() as u32 {
                    if let Some(sep) = restricted_separator_search(&g, v0, alpha, &mut scratch) {
                        assert!(sep.len() <= alpha);
                        assert!(sep.members.contains(&v0));
                    }
                }
            }
        }
    }

    #[test]
    fn successes_pass_the_oracle() {
        for seed in 0..15u64 {
            let g = random_connected(seed, 24);
            let mut scratch = SearchScratch::new(&g);
            for v0 in 0..g.vertex_count() as u32 {
                if let Some(sep) = restricted_separator_search(&g, v0, 8, &mut scratch) {
                    assert!(is_local_separator(&g, &sep.members));
                }
            }
        }
    }

    #[test]
    fn fast_search_matches_naive_recomputation() {
        let mut cases: Vec<EmbeddedGraph> = vec![cycle(8), path(7), complete(5), star(6)];
        for seed in 20..40u64 {
            cases.push(random_connected(seed, 28));
        }
        for g in &cases {
            let mut scratch = SearchScratch::new(g);
            for alpha in [2usize, 4, 64] {
                for v0 in 0..g.vertex_count() as u32 {
                    let fast = restricted_separator_search(g, v0, alpha, &mut scratch);
                    let slow = naive_search(g, v0, alpha);
                    match (&fast, &slow) {
                        (Some(a), Some(b)) => {
                            assert_eq!(a.members, b.members, "graph seed case v0={v0}");
                            assert_eq!(a.guide, b.guide);
                        }
                        (None, None) => {}
                        _ => panic!("outcome mismatch at v0={v0}: {fast:?} vs {slow:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn classic_connectivity_threshold_agrees() {
        for seed in 0..5u64 {
            let g = random_connected(seed, 26);
            let mut default_scratch = SearchScratch::new(&g);
            let mut classic = SearchScratch::with_threshold(&g, 1);
            for v0 in 0..g.vertex_count() as u32 {
                let a = restricted_separator_search(&g, v0, 16, &mut default_scratch);
                let b = restricted_separator_search(&g, v0, 16, &mut classic);
                assert_eq!(a.map(|s| s.members), b.map(|s| s.members));
            }
        }
    }

    fn random_connected(seed: u64, max_n: u32) -> EmbeddedGraph {
        let mut rng = SmallRng::seed_from_u64(seed);
        let n = rng.random_range(4..=max_n);
        let positions: Vec<Vec3> = (0..n)
            .map(|_| {
                Vec3::new(
                    rng.random_range(-4.0..4.0),
                    rng.random_range(-4.0..4.0),
                    rng.random_range(-4.0..4.0),
                )
            })
            .collect();
        let mut edges: Vec<(u32, u32)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random_bool(0.08) {
                    edges.push((u, v));
                }
            }
        }
        EmbeddedGraph::from_positions_edges(positions, &edges)
    }

    fn sep(g: &EmbeddedGraph, members: &[VertexId], guide: Vec3) -> Separator {
        Separator::new(g, 0, members.to_vec(), guide)
    }

    #[test]
    fn shrink_peels_cycle_pair_to_one_vertex() {
        let g = cycle(8);
        let guide = (g.position(0) + g.position(1)) * 0.5;
        let shrunk = shrink_separator(&g, &sep(&g, &[0, 1], guide));
        // Equidistant attributes tie; the id order tries v0 first, so v0
        // leaves and v1 stays.
        assert_eq!(shrunk.members, vec![1]);
        assert_eq!(shrunk.footprint, 1);
    }

    #[test]
    fn shrink_keeps_minimal_separator_unchanged() {
        let g = cycle(8);
        let s = sep(&g, &[3], g.position(3));
        assert_eq!(shrink_separator(&g, &s).members, vec![3]);
    }

    #[test]
    fn shrink_reduces_interior_path_band_to_one_vertex() {
        let g = path(5);
        let shrunk = shrink_separator(&g, &sep(&g, &[1, 2, 3], g.position(2)));
        assert_eq!(shrunk.members, vec![2]);
    }

    #[test]
    #[should_panic(expected = "valid local separator")]
    fn shrink_rejects_invalid_input() {
        let g = path(4);
        // {3} is an endpoint: its front is a single vertex, not a separator.
        shrink_separator(&g, &sep(&g, &[3], g.position(3)));
    }

    #[test]
    fn shrink_outputs_are_minimal_and_idempotent() {
        for seed in 50..70u64 {
            let g = random_connected(seed, 24);
            let mut scratch = SearchScratch::new(&g);
            for v0 in 0..g.vertex_count() as u32 {
                if let Some(found) = restricted_separator_search(&g, v0, 10, &mut scratch) {
                    let shrunk = shrink_separator(&g, &found);
                    assert!(is_minimal_local_separator(&g, &shrunk.members));
                    assert!(shrunk.footprint <= found.footprint);
                    assert!(shrunk.members.iter().all(|v| found.members.contains(v)));
                    let again = shrink_separator(&g, &shrunk);
                    assert_eq!(again.members, shrunk.members);
                }
            }
        }
    }

    #[test]
    fn thicken_grows_cycle_singleton_to_band() {
        let g = cycle(8);
        let grown = thicken_separator(&g, &sep(&g, &[0], g.position(0)));
        assert_eq!(grown.members, vec![0, 1, 7]);
        assert!(is_local_separator(&g, &grown.members));
    }

    #[test]
    fn thicken_rejects_additions_that_kill_the_front() {
        let g = path(4);
        // Adding either front vertex of {1, 2} leaves a one-vertex front.
        let grown = thicken_separator(&g, &sep(&g, &[1, 2], g.position(1)));
        assert_eq!(grown.members, vec![1, 2]);
    }

    #[test]
    #[should_panic(expected = "valid local separator")]
    fn thicken_rejects_invalid_input() {
        let g = complete(5);
        thicken_separator(&g, &sep(&g, &[0], g.position(0)));
    }

    #[test]
    fn thicken_outputs_stay_valid() {
        for seed in 80..95u64 {
            let g = random_connected(seed, 22);
            let mut scratch = SearchScratch::new(&g);
            for v0 in 0..g.vertex_count() as u32 {
                if let Some(found) = restricted_separator_search(&g, v0, 8, &mut scratch) {
                    let grown = thicken_separator(&g, &found);
                    assert!(is_local_separator(&g, &grown.members));
                    assert!(found.members.iter().all(|v| grown.members.contains(v)));
                    // Thicken-then-shrink must still reach a minimal result.
                    let shrunk = shrink_separator(&g, &grown);
                    assert!(is_minimal_local_separator(&g, &shrunk.members));
                }
            }
        }
    }
}
