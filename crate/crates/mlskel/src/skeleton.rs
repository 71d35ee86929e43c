//! Skeleton extraction from disjoint separators, plus comparison metrics.
//!
//! The skeleton is the quotient of the input under the partition formed
//! by the packed separators and the connected components left over after
//! removing them: each block becomes one node at its capacity-weighted
//! barycenter, and blocks adjacent in the input are joined by an edge. The
//! construction preserves component count and cycle structure by quotient
//! properties, which is what the genus estimate reads off.

use serde::{Deserialize, Serialize};

use crate::graph::{self, EmbeddedGraph};
use crate::parallel;
use crate::separator::Separator;
use crate::vec3::Vec3;

/// Edge sampling density for Hausdorff distances, as a fraction of the
/// normalizing radius.
const HAUSDORFF_SPACING_DIV: f64 = 256.0;

/// Where a skeleton node came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeSource {
    /// Index into the packed separator list.
    Separator(u32),
    /// Residual component index, in order of smallest contained vertex id.
    Residual(u32),
}

/// A curve skeleton: an embedded graph whose node capacities count the
/// input vertices each node represents, plus per-node provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    pub graph: EmbeddedGraph,
    pub sources: Vec<NodeSource>,
}

impl Skeleton {
    pub fn metrics(&self) -> SkeletonMetrics {
        skeleton_metrics(&self.graph)
    }
}

/// Counting metrics of a skeleton graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonMetrics {
    pub vertices: usize,
    pub edges: usize,
    pub leafs: usize,
    pub branches: usize,
    pub components: usize,
    pub genus_estimate: usize,
}

/// Collapses the input onto one node per separator and one node per
/// residual component, connecting nodes whose vertex sets are adjacent.
///
/// The separators must be pairwise disjoint and each valid on `g`;
/// violations panic. Degree-2 residual chains are kept as-is, so node count
/// equals separator count plus residual component count exactly.
pub fn extract_skeleton(g: &EmbeddedGraph, packed: &[Separator]) -> Skeleton {
    let n = g.vertex_count();
    let unassigned = u32::MAX;
    let mut label = vec![unassigned; n];
    for (i, sep) in packed.iter().enumerate() {
        assert!(
            graph::is_local_separator(g, &sep.members),
            "separator {i} is not a valid local separator of this graph"
        );
        for &v in &sep.members {
            assert!(
                label[v as usize] == unassigned,
                "separators overlap at vertex {v}"
            );
            label[v as usize] = i as u32;
        }
    }

    // Components of the graph minus all separator vertices, numbered by
    // smallest contained id.
    let sep_count = packed.len() as u32;
    let mut residuals = 0u32;
    let mut stack = Vec::new();
    for v in 0..n as u32 {
        if label[v as usize] != unassigned {
            continue;
        }
        let id = sep_count + residuals;
        residuals += 1;
        label[v as usize] = id;
        stack.push(v);
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if label[w as usize] == unassigned {
                    label[w as usize] = id;
                    stack.push(w);
                }
            }
        }
    }

    let node_count = (sep_count + residuals) as usize;
    let mut capacities = vec![0u64; node_count];
    let mut weighted = vec![Vec3::ZERO; node_count];
    for v in 0..n as u32 {
        let c = label[v as usize] as usize;
        let cap = g.capacity(v);
        capacities[c] += cap;
        weighted[c] += g.position(v) * cap as f64;
    }
    let positions: Vec<Vec3> = weighted
        .iter()
        .zip(&capacities)
        .map(|(&w, &cap)| w / cap as f64)
        .collect();

    let mut edges: Vec<(u32, u32)> = g
        .edges()
        .filter_map(|(u, v)| {
            let (a, b) = (label[u as usize], label[v as usize]);
            (a != b).then(|| (a.min(b), a.max(b)))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();

    let sources = (0..sep_count)
        .map(NodeSource::Separator)
        .chain((0..residuals).map(NodeSource::Residual))
        .collect();
    Skeleton {
        graph: EmbeddedGraph::from_parts(positions, capacities, &edges),
        sources,
    }
}

/// Degree and cycle statistics of a skeleton graph.
pub fn skeleton_metrics(skel: &EmbeddedGraph) -> SkeletonMetrics {
    let (components, _) = skel.connected_components();
    let mut leafs = 0;
    let mut branches = 0;
    for v in 0..skel.vertex_count() as u32 {
        match skel.neighbors(v).len() {
            1 => leafs += 1,
            d if d >= 3 => branches += 1,
            _ => {}
        }
    }
    SkeletonMetrics {
        vertices: skel.vertex_count(),
        edges: skel.edge_count(),
        leafs,
        branches,
        components,
        genus_estimate: skel.edge_count() + components - skel.vertex_count(),
    }
}

/// Evenly spaced points covering the skeleton's nodes and edges; spacing is
/// at most `spacing` along every edge.
fn sample_points(g: &EmbeddedGraph, spacing: f64) -> Vec<Vec3> {
    let mut pts: Vec<Vec3> = (0..g.vertex_count() as u32).map(|v| g.position(v)).collect();
    for (u, v) in g.edges() {
        let (pu, pv) = (g.position(u), g.position(v));
        let segments = (pu.dist(pv) / spacing).ceil().max(1.0) as usize;
        for i in 1..segments {
            pts.push(pu + (pv - pu) * (i as f64 / segments as f64));
        }
    }
    pts
}

/// Directed Hausdorff distance from `a` to `b`, normalized by `normalizer`
/// (typically the input's bounding-sphere radius).
///
/// Both skeletons are sampled along their edges at spacing
/// `normalizer / 256`, so the result approximates the curve-to-curve
/// distance to within that spacing. Both graphs must be non-empty and the
/// normalizer positive.
pub fn directed_hausdorff(a: &EmbeddedGraph, b: &EmbeddedGraph, normalizer: f64) -> f64 {
    assert!(normalizer > 0.0, "normalizer must be positive");
    assert!(
        a.vertex_count() > 0 && b.vertex_count() > 0,
        "hausdorff distance over an empty skeleton"
    );
    let spacing = normalizer / HAUSDORFF_SPACING_DIV;
    let from = sample_points(a, spacing);
    let to = sample_points(b, spacing);
    let nearest = parallel::map_collect(&from, |p| {
        to.iter().map(|q| p.dist_sq(*q)).fold(f64::INFINITY, f64::min)
    });
    let worst = nearest.into_iter().fold(0.0_f64, f64::max);
    worst.sqrt() / normalizer
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_graphs::*;
    use crate::graph::VertexId;
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};

    fn sep(g: &EmbeddedGraph, members: &[VertexId]) -> Separator {
        Separator::new(g, 0, members.to_vec(), g.position(members[0]))
    }

    #[test]
    fn no_separators_collapse_to_one_node() {
        let g = path(5);
        let skel = extract_skeleton(&g, &[]);
        assert_eq!(skel.graph.vertex_count(), 1);
        assert_eq!(skel.graph.edge_count(), 0);
        assert_eq!(skel.graph.capacity(0), 5);
        assert_eq!(skel.sources, vec![NodeSource::Residual(0)]);
        let mean = (0..5).map(|v| g.position(v)).fold(Vec3::ZERO, |a, p| a + p) / 5.0;
        assert_eq!(skel.graph.position(0), mean);
    }

    #[test]
    fn path_with_middle_separator_stays_a_path() {
        let g = path(9);
        let skel = extract_skeleton(&g, &[sep(&g, &[4])]);
        assert_eq!(skel.graph.vertex_count(), 3);
        assert_eq!(skel.graph.edge_count(), 2);
        assert_eq!(
            skel.sources,
            vec![
                NodeSource::Separator(0),
                NodeSource::Residual(0),
                NodeSource::Residual(1)
            ]
        );
        assert_eq!(skel.graph.position(0), g.position(4));
        assert_eq!(skel.graph.capacity(1), 4);
        assert_eq!(skel.graph.capacity(2), 4);
        let m = skel.metrics();
        assert_eq!(m.leafs, 2);
        assert_eq!(m.branches, 0);
        assert_eq!(m.genus_estimate, 0);
        assert_eq!(m.components, 1);
    }

    #[test]
    fn cycle_with_two_separators_keeps_its_cycle() {
        let g = cycle(12);
        let skel = extract_skeleton(&g, &[sep(&g, &[0]), sep(&g, &[6])]);
        assert_eq!(skel.graph.vertex_count(), 4);
        assert_eq!(skel.graph.edge_count(), 4);
        let m = skel.metrics();
        assert_eq!(m.leafs, 0);
        assert_eq!(m.branches, 0);
        assert_eq!(m.genus_estimate, 1);
    }

    #[test]
    fn component_count_survives_extraction() {
        // Two separate paths; a separator in the first only.
        let mut pos: Vec<Vec3> = (0..5).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        pos.extend((0..3).map(|i| Vec3::new(i as f64, 5.0, 0.0)));
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (6, 7)];
        let g = EmbeddedGraph::from_positions_edges(pos, &edges);
        let skel = extract_skeleton(&g, &[sep(&g, &[2])]);
        assert_eq!(skel.metrics().components, 2);
        assert_eq!(skel.graph.vertex_count(), 4);
    }

    #[test]
    #[should_panic(expected = "separators overlap")]
    fn overlapping_separators_panic() {
        let g = cycle(8);
        extract_skeleton(&g, &[sep(&g, &[0, 1]), sep(&g, &[1, 2])]);
    }

    #[test]
    #[should_panic(expected = "not a valid local separator")]
    fn invalid_separator_panics() {
        let g = path(4);
        // An endpoint never separates.
        extract_skeleton(&g, &[sep(&g, &[0])]);
    }

    #[test]
    fn metrics_count_degrees() {
        let line = path(3);
        let m = skeleton_metrics(&line);
        assert_eq!((m.vertices, m.leafs, m.branches, m.genus_estimate), (3, 2, 0, 0));

        let ring = cycle(4);
        let m = skeleton_metrics(&ring);
        assert_eq!((m.leafs, m.branches, m.genus_estimate), (0, 0, 1));

        let hub = star(4);
        let m = skeleton_metrics(&hub);
        assert_eq!((m.vertices, m.leafs, m.branches, m.genus_estimate), (5, 4, 1, 0));
    }

    fn node_at(p: Vec3) -> EmbeddedGraph {
        EmbeddedGraph::from_positions_edges(vec![p], &[])
    }

    #[test]
    fn hausdorff_to_self_is_zero() {
        let g = cycle(6);
        assert_eq!(directed_hausdorff(&g, &g, 1.0), 0.0);
    }

    #[test]
    fn hausdorff_between_points_is_their_distance() {
        let a = node_at(Vec3::ZERO);
        let b = node_at(Vec3::new(3.0, 0.0, 0.0));
        assert_eq!(directed_hausdorff(&a, &b, 1.0), 3.0);
        assert_eq!(directed_hausdorff(&a, &b, 2.0), 1.5);
    }

    #[test]
    fn hausdorff_is_directed() {
        let seg = EmbeddedGraph::from_positions_edges(
            vec![Vec3::ZERO, Vec3::new(2.0, 0.0, 0.0)],
            &[(0, 1)],
        );
        let origin = node_at(Vec3::ZERO);
        assert_eq!(directed_hausdorff(&seg, &origin, 1.0), 2.0);
        assert_eq!(directed_hausdorff(&origin, &seg, 1.0), 0.0);
    }

    #[test]
    fn hausdorff_edge_samples_see_interior_deviation() {
        // A straight segment vs a detour through a distant midpoint: node
        // positions alone agree at the ends, the interior does not.
        let straight = EmbeddedGraph::from_positions_edges(
            vec![Vec3::ZERO, Vec3::new(2.0, 0.0, 0.0)],
            &[(0, 1)],
        );
        let detour = EmbeddedGraph::from_positions_edges(
            vec![Vec3::ZERO, Vec3::new(1.0, 1.0, 0.0), Vec3::new(2.0, 0.0, 0.0)],
            &[(0, 1), (1, 2)],
        );
        let h = directed_hausdorff(&detour, &straight, 1.0);
        assert!((h - 1.0).abs() < 0.01, "expected ~1, got {h}");
    }

    #[test]
    fn hausdorff_triangle_inequality() {
        let mut rng = SmallRng::seed_from_u64(9);
        let mut random_skel = |n: u32| {
            let pos: Vec<Vec3> = (0..n)
                .map(|_| {
                    Vec3::new(
                        rng.random_range(-2.0..2.0),
                        rng.random_range(-2.0..2.0),
                        rng.random_range(-2.0..2.0),
                    )
                })
                .collect();
            let edges: Vec<(u32, u32)> = (1..n).map(|v| (v - 1, v)).collect();
            EmbeddedGraph::from_positions_edges(pos, &edges)
        };
        for _ in 0..10 {
            let (a, b, c) = (random_skel(5), random_skel(4), random_skel(6));
            let (ab, bc, ac) = (
                directed_hausdorff(&a, &b, 1.0),
                directed_hausdorff(&b, &c, 1.0),
                directed_hausdorff(&a, &c, 1.0),
            );
            assert!(ac <= ab + bc + 1e-12, "{ac} > {ab} + {bc}");
        }
    }
}
