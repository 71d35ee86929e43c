//! Curve skeletonization of spatially embedded graphs.
//!
//! The pipeline turns a mesh 1-skeleton, a voxel adjacency graph, or any
//! embedded graph into a curve skeleton: it coarsens the input into a
//! hierarchy by repeated light-edge matching, finds local separators on the
//! coarse levels with a sphere-guided restricted search, projects and
//! refines them down the hierarchy, packs a disjoint subset under vertex
//! capacities, and extracts the quotient skeleton with per-node provenance.
//!
//! The crate is organised along the pipeline stages:
//!
//! * [`graph`] — embedded graphs, local-separator predicates, bounding spheres
//! * [`io`] — PLY/OBJ/voxel/native ingestion and skeleton output
//! * [`dyncon`] — fully dynamic connectivity used by the separator search
//! * [`coarsen`] — matching-based hierarchy construction
//! * [`separator`] — restricted separator search, shrinking, thickening
//! * [`multilevel`] — the level driver: project, refine, sample, pack
//! * [`skeleton`] — quotient skeleton extraction and comparison metrics
//! * [`synth`] — synthetic meshes and voxel solids for tests and benches
//!
//! Hot phases fan out over a rayon pool when the default `parallel` feature
//! is enabled and degrade to sequential execution without it; results are
//! identical either way for a fixed configuration.

pub mod coarsen;
pub mod dyncon;
pub mod graph;
pub mod io;
pub mod multilevel;
pub mod parallel;
pub mod separator;
pub mod skeleton;
pub mod synth;
pub mod vec3;

pub use graph::{
    bounding_sphere, is_local_separator, is_minimal_local_separator, BoundingSphere,
    EmbeddedGraph, VertexId,
};
pub use multilevel::{multilevel_skeletonize, RefineMode, RunConfig, RunReport};
pub use separator::Separator;
pub use skeleton::{
    directed_hausdorff, extract_skeleton, skeleton_metrics, Skeleton, SkeletonMetrics,
};
pub use vec3::Vec3;

use rand::SeedableRng;

/// Independent random streams drawn from one run seed. Every randomised
/// stage owns a stream id, so adding draws to one stage never perturbs
/// another.
pub(crate) const STREAM_COARSEN: u64 = 1;
pub(crate) const STREAM_SAMPLE: u64 = 2;

/// A deterministic generator for (`stream`, `index`) under `seed`.
pub(crate) fn stream_rng(seed: u64, stream: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream << 32 | index);
    rng
}
