//! Spatially embedded graphs and the local-separator predicates.
//!
//! A graph is a set of dense vertex ids `0..n`, each carrying a position in
//! 3-space and a positive integer capacity, plus an undirected simple edge
//! set. Vertices of a skeletonization input start with capacity 1; coarsened
//! graphs carry the accumulated capacities of their fibers.

use std::collections::HashSet;

use crate::vec3::Vec3;

pub type VertexId = u32;

/// Immutable embedded graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedGraph {
    positions: Vec<Vec3>,
    capacities: Vec<u64>,
    adjacency: Vec<Vec<VertexId>>,
    edge_count: usize,
}

impl EmbeddedGraph {
    /// Builds a graph from explicit positions, capacities and an edge list.
    ///
    /// Duplicate edges (in either orientation) collapse to one. Panics on
    /// self-loops, out-of-range endpoints, zero capacities or a capacity
    /// slice whose length differs from the position slice.
    pub fn from_parts(
        positions: Vec<Vec3>,
        capacities: Vec<u64>,
        edges: &[(VertexId, VertexId)],
    ) -> EmbeddedGraph {
        let n = positions.len();
        assert_eq!(capacities.len(), n, "capacity slice length mismatch");
        assert!(capacities.iter().all(|&c| c > 0), "capacities must be positive");
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge endpoint out of range");
            assert_ne!(u, v, "self-loop rejected");
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        EmbeddedGraph { positions, capacities, adjacency, edge_count: edge_count / 2 }
    }

    /// Builds a unit-capacity graph.
    pub fn from_positions_edges(positions: Vec<Vec3>, edges: &[(VertexId, VertexId)]) -> EmbeddedGraph {
        let caps = vec![1; positions.len()];
        EmbeddedGraph::from_parts(positions, caps, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn position(&self, v: VertexId) -> Vec3 {
        self.positions[v as usize]
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn capacity(&self, v: VertexId) -> u64 {
        self.capacities[v as usize]
    }

    pub fn capacities(&self) -> &[u64] {
        &self.capacities
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    /// All edges as `(u, v)` pairs with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            let u = u as VertexId;
            list.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    /// Sum of all vertex capacities.
    pub fn total_capacity(&self) -> u64 {
        self.capacities.iter().sum()
    }

    /// Component count plus a per-vertex component label.
    ///
    /// Labels are assigned in order of the smallest vertex id contained in
    /// each component, so the labelling is deterministic.
    pub fn connected_components(&self) -> (usize, Vec<u32>) {
        let n = self.vertex_count();
        let mut label = vec![u32::MAX; n];
        let mut count = 0u32;
        let mut queue = Vec::new();
        for start in 0..n {
            if label[start] != u32::MAX {
                continue;
            }
            label[start] = count;
            queue.push(start as VertexId);
            while let Some(v) = queue.pop() {
                for &w in self.neighbors(v) {
                    if label[w as usize] == u32::MAX {
                        label[w as usize] = count;
                        queue.push(w);
                    }
                }
            }
            count += 1;
        }
        (count as usize, label)
    }

    /// Smallest sphere from a deterministic two-scan approximation, grown to
    /// cover every vertex. The radius is at most twice optimal.
    pub fn bounding_sphere(&self) -> BoundingSphere {
        bounding_sphere(&self.positions)
    }
}

/// Center/radius pair covering a point set.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundingSphere {
    pub center: Vec3,
    pub radius: f64,
}

impl BoundingSphere {
    pub fn covers(&self, p: Vec3) -> bool {
        self.center.dist(p) <= self.radius * (1.0 + 1e-9)
    }
}

/// Approximate minimal enclosing sphere of a non-empty point set.
///
/// Scans for the point farthest from the first point, then the point
/// farthest from that one; the midpoint of the pair seeds the center and a
/// final scan grows the radius until every point is covered. The result is
/// within a factor two of the optimal radius.
pub fn bounding_sphere(points: &[Vec3]) -> BoundingSphere {
    assert!(!points.is_empty(), "bounding sphere of an empty point set");
    let farthest_from = |p: Vec3| {
        let mut best = points[0];
        let mut best_d = -1.0;
        for &q in points {
            let d = p.dist_sq(q);
            if d > best_d {
                best_d = d;
                best = q;
            }
        }
        best
    };
    let a = farthest_from(points[0]);
    let b = farthest_from(a);
    let center = (a + b) * 0.5;
    let mut radius = a.dist(b) * 0.5;
    for &p in points {
        radius = radius.max(center.dist(p));
    }
    BoundingSphere { center, radius }
}

/// Validates that `members` is a non-empty duplicate-free vertex set of `g`
/// and returns a sorted copy. Panics otherwise.
fn checked_sorted_set(g: &EmbeddedGraph, members: &[VertexId]) -> Vec<VertexId> {
    assert!(!members.is_empty(), "vertex set must be non-empty");
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        assert_ne!(w[0], w[1], "vertex set contains duplicates");
    }
    assert!(
        (*sorted.last().unwrap() as usize) < g.vertex_count(),
        "vertex id out of range"
    );
    sorted
}

fn is_connected_subset(g: &EmbeddedGraph, set: &HashSet<VertexId>) -> bool {
    let start = match set.iter().min() {
        Some(&v) => v,
        None => return false,
    };
    let mut seen = HashSet::with_capacity(set.len());
    let mut queue = vec![start];
    seen.insert(start);
    while let Some(v) = queue.pop() {
        for &w in g.neighbors(v) {
            if set.contains(&w) && seen.insert(w) {
                queue.push(w);
            }
        }
    }
    seen.len() == set.len()
}

/// The front of a vertex set: all vertices adjacent to the set but outside
/// it, sorted ascending.
pub fn front_of(g: &EmbeddedGraph, members: &[VertexId]) -> Vec<VertexId> {
    let set: HashSet<VertexId> = members.iter().copied().collect();
    let mut front: Vec<VertexId> = Vec::new();
    let mut seen: HashSet<VertexId> = HashSet::new();
    for &v in members {
        for &w in g.neighbors(v) {
            if !set.contains(&w) && seen.insert(w) {
                front.push(w);
            }
        }
    }
    front.sort_unstable();
    front
}

/// Number of connected components of the subgraph induced by `front`.
fn front_component_count(g: &EmbeddedGraph, front: &[VertexId]) -> usize {
    let set: HashSet<VertexId> = front.iter().copied().collect();
    let mut seen: HashSet<VertexId> = HashSet::with_capacity(front.len());
    let mut count = 0;
    let mut queue = Vec::new();
    for &start in front {
        if seen.contains(&start) {
            continue;
        }
        count += 1;
        seen.insert(start);
        queue.push(start);
        while let Some(v) = queue.pop() {
            for &w in g.neighbors(v) {
                if set.contains(&w) && seen.insert(w) {
                    queue.push(w);
                }
            }
        }
    }
    count
}

/// Whether removing `members` from the subgraph induced by its closed
/// neighbourhood leaves at least two components.
///
/// `members` must be a non-empty, connected vertex set; anything else is a
/// contract violation and panics.
pub fn is_local_separator(g: &EmbeddedGraph, members: &[VertexId]) -> bool {
    let sorted = checked_sorted_set(g, members);
    let set: HashSet<VertexId> = sorted.iter().copied().collect();
    assert!(is_connected_subset(g, &set), "vertex set must induce a connected subgraph");
    separates(g, &sorted)
}

/// Slice-facing connectivity test; callers guarantee `members` is
/// duplicate-free and in range. Empty sets count as disconnected.
pub(crate) fn is_connected_set(g: &EmbeddedGraph, members: &[VertexId]) -> bool {
    let set: HashSet<VertexId> = members.iter().copied().collect();
    is_connected_subset(g, &set)
}

/// Separation test without the connectivity precondition; callers guarantee
/// `members` is sorted, deduplicated and in range.
pub(crate) fn separates(g: &EmbeddedGraph, members: &[VertexId]) -> bool {
    let front = front_of(g, members);
    !front.is_empty() && front_component_count(g, &front) >= 2
}

/// Whether no single vertex can be dropped from `members` while keeping a
/// valid local separator.
///
/// A candidate remainder qualifies as a local separator only when it is
/// non-empty and connected; empty or disconnected remainders count against
/// nothing. Requires `is_local_separator(g, members)`.
pub fn is_minimal_local_separator(g: &EmbeddedGraph, members: &[VertexId]) -> bool {
    assert!(is_local_separator(g, members), "input must be a local separator");
    let sorted = checked_sorted_set(g, members);
    for &v in &sorted {
        let remainder: Vec<VertexId> = sorted.iter().copied().filter(|&w| w != v).collect();
        if remainder.is_empty() {
            continue;
        }
        let set: HashSet<VertexId> = remainder.iter().copied().collect();
        if is_connected_subset(g, &set) && separates(g, &remainder) {
            return false;
        }
    }
    true
}
