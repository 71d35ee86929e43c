//! File ingestion and skeleton output.
//!
//! Meshes arrive as PLY (ASCII or binary little-endian) or OBJ and are
//! reduced to their 1-skeleton: every vertex, plus the distinct undirected
//! edges of the (fan-triangulated) faces. Voxel grids arrive as ASCII
//! `x y z` lines and connect under 6- or 26-connectivity. The native format
//! carries an embedded graph verbatim, including capacities. Skeletons are
//! written as PLY with an edge element or as OBJ with `l` records, and both
//! can be read back for comparison runs.

mod native;
mod obj;
mod ply;
pub(crate) mod voxel;

pub use native::{read_native, write_native};
pub use obj::{read_obj, write_mesh_obj, write_skeleton_obj};
pub use ply::{read_ply, write_mesh_ply, write_skeleton_ply};
pub use voxel::{read_voxels, write_voxels, Connectivity};

use std::path::Path;

use crate::graph::EmbeddedGraph;

/// Errors raised while loading or storing graphs.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}:{location}: {msg}")]
    Parse { path: String, location: String, msg: String },
    #[error("{path}: empty mesh")]
    EmptyMesh { path: String },
    #[error("{path}: unsupported file extension")]
    UnknownFormat { path: String },
}

impl IoError {
    fn at_line(path: &str, line: usize, msg: impl Into<String>) -> IoError {
        IoError::Parse { path: path.to_string(), location: format!("line {line}"), msg: msg.into() }
    }

    fn at_offset(path: &str, offset: usize, msg: impl Into<String>) -> IoError {
        IoError::Parse {
            path: path.to_string(),
            location: format!("byte {offset}"),
            msg: msg.into(),
        }
    }
}

/// Mesh container formats with explicit loaders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Ply,
    Obj,
}

/// Loads a mesh in the given format and returns its 1-skeleton.
pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<EmbeddedGraph, IoError> {
    match format {
        MeshFormat::Ply => read_ply(path),
        MeshFormat::Obj => read_obj(path),
    }
}

/// Loads any supported input by file extension: `.ply`, `.obj`, `.graph`
/// (native), or `.vox`/`.xyz` (ASCII voxels under `voxel_connectivity`).
pub fn load_graph(path: &Path, voxel_connectivity: Connectivity) -> Result<EmbeddedGraph, IoError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "ply" => read_ply(path),
        "obj" => read_obj(path),
        "graph" => read_native(path),
        "vox" | "xyz" => read_voxels(path, voxel_connectivity),
        _ => Err(IoError::UnknownFormat { path: path.display().to_string() }),
    }
}

/// Builds the 1-skeleton graph from mesh data: fan-triangulates every face,
/// collects distinct edges, and keeps explicit extra edges (used by skeleton
/// files). Rejects out-of-range indices and faces with fewer than 3 corners.
fn mesh_to_graph(
    path: &str,
    positions: Vec<crate::vec3::Vec3>,
    faces: &[(usize, Vec<u32>)],
    extra_edges: &[(u32, u32)],
) -> Result<EmbeddedGraph, IoError> {
    if positions.is_empty() {
        return Err(IoError::EmptyMesh { path: path.to_string() });
    }
    let n = positions.len() as u32;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut push_edge = |a: u32, b: u32| {
        if a != b {
            edges.push((a.min(b), a.max(b)));
        }
    };
    for (line, ring) in faces {
        if ring.len() < 3 {
            return Err(IoError::at_line(path, *line, "face with fewer than 3 vertices"));
        }
        for &i in ring {
            if i >= n {
                return Err(IoError::at_line(path, *line, format!("vertex index {i} out of range")));
            }
        }
        for t in 1..ring.len() - 1 {
            push_edge(ring[0], ring[t]);
            push_edge(ring[t], ring[t + 1]);
            push_edge(ring[t + 1], ring[0]);
        }
    }
    for &(a, b) in extra_edges {
        push_edge(a, b);
    }
    Ok(EmbeddedGraph::from_positions_edges(positions, &edges))
}
