use std::collections::HashMap;
use std::path::Path;

use super::IoError;
use crate::graph::EmbeddedGraph;
use crate::vec3::Vec3;

/// Which voxel pairs count as adjacent: face neighbours only, or every cell
/// of the surrounding 3x3x3 block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Six,
    TwentySix,
}

impl Connectivity {
    /// Half of the neighbourhood: only lexicographically positive offsets,
    /// so every undirected pair is generated once.
    fn positive_offsets(self) -> Vec<(i32, i32, i32)> {
        let mut out = Vec::new();
        for dx in -1i32..=1 {
            for dy in -1i32..=1 {
                for dz in -1i32..=1 {
                    if (dx, dy, dz) <= (0, 0, 0) {
                        continue;
                    }
                    if self == Connectivity::Six && dx.abs() + dy.abs() + dz.abs() != 1 {
                        continue;
                    }
                    out.push((dx, dy, dz));
                }
            }
        }
        out
    }
}

/// Reads an ASCII voxel set (one `x y z` integer triple per line) and
/// connects occupied cells under the requested connectivity. Duplicate
/// cells are ignored; an empty file gives an empty graph.
pub fn read_voxels(path: &Path, connectivity: Connectivity) -> Result<EmbeddedGraph, IoError> {
    let text = std::fs::read_to_string(path)?;
    parse_voxels(&path.display().to_string(), &text, connectivity)
}

fn parse_voxels(name: &str, text: &str, connectivity: Connectivity) -> Result<EmbeddedGraph, IoError> {
    let mut cells: Vec<(i32, i32, i32)> = Vec::new();
    let mut index: HashMap<(i32, i32, i32), u32> = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(IoError::at_line(name, line_no, "expected three coordinates"));
        }
        let parse = |tok: &str| -> Result<i32, IoError> {
            tok.parse()
                .map_err(|_| IoError::at_line(name, line_no, format!("non-integer coordinate {tok:?}")))
        };
        let cell = (parse(toks[0])?, parse(toks[1])?, parse(toks[2])?);
        if !index.contains_key(&cell) {
            index.insert(cell, cells.len() as u32);
            cells.push(cell);
        }
    }
    Ok(voxel_graph(&cells, &index, connectivity))
}

/// Writes occupied cells as whitespace-separated integer triples, one per
/// line.
pub fn write_voxels(w: &mut impl std::io::Write, cells: &[(i32, i32, i32)]) -> std::io::Result<()> {
    for &(x, y, z) in cells {
        writeln!(w, "{x} {y} {z}")?;
    }
    Ok(())
}

/// Builds the adjacency graph of a set of distinct occupied cells.
pub(crate) fn voxel_graph(
    cells: &[(i32, i32, i32)],
    index: &HashMap<(i32, i32, i32), u32>,
    connectivity: Connectivity,
) -> EmbeddedGraph {
    let offsets = connectivity.positive_offsets();
    let mut edges = Vec::new();
    for (i, &(x, y, z)) in cells.iter().enumerate() {
        for &(dx, dy, dz) in &offsets {
            if let Some(&j) = index.get(&(x + dx, y + dy, z + dz)) {
                edges.push((i as u32, j));
            }
        }
    }
    let positions: Vec<Vec3> =
        cells.iter().map(|&(x, y, z)| Vec3::new(x as f64, y as f64, z as f64)).collect();
    EmbeddedGraph::from_positions_edges(positions, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_neighbours() {
        let g = parse_voxels("v.vox", "0 0 0\n1 0 0\n", Connectivity::Six).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn diagonal_only_under_26() {
        let text = "0 0 0\n1 1 1\n";
        let g6 = parse_voxels("v.vox", text, Connectivity::Six).unwrap();
        assert_eq!(g6.edge_count(), 0);
        let g26 = parse_voxels("v.vox", text, Connectivity::TwentySix).unwrap();
        assert_eq!(g26.edge_count(), 1);
    }

    #[test]
    fn duplicates_ignored() {
        let g = parse_voxels("v.vox", "0 0 0\n0 0 0\n1 0 0\n", Connectivity::Six).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn empty_file_is_empty_graph() {
        let g = parse_voxels("v.vox", "", Connectivity::TwentySix).unwrap();
        assert_eq!(g.vertex_count(), 0);
    }

    #[test]
    fn bad_token_is_a_parse_error() {
        let err = parse_voxels("v.vox", "0 0 0\n1 one 0\n", Connectivity::Six).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn full_block_degree_check() {
        // 3x3x3 block: the center touches every other cell under 26-conn.
        let mut text = String::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    text.push_str(&format!("{x} {y} {z}\n"));
                }
            }
        }
        let g = parse_voxels("v.vox", &text, Connectivity::TwentySix).unwrap();
        let center = 13; // (1,1,1) in row-major insertion order
        assert_eq!(g.degree(center), 26);
        let g6 = parse_voxels("v.vox", &text, Connectivity::Six).unwrap();
        assert_eq!(g6.degree(center), 6);
    }
}
