use std::io::Write;
use std::path::Path;

use super::{mesh_to_graph, IoError};
use crate::graph::EmbeddedGraph;
use crate::vec3::Vec3;

/// Resolves an OBJ vertex reference (1-based, possibly negative-relative,
/// possibly `v/vt/vn`) against the current vertex count.
fn resolve_index(path: &str, line_no: usize, tok: &str, n_vertices: usize) -> Result<u32, IoError> {
    let head = tok.split('/').next().unwrap_or("");
    let raw: i64 = head
        .parse()
        .map_err(|_| IoError::at_line(path, line_no, format!("bad vertex reference {tok:?}")))?;
    let resolved = if raw > 0 {
        raw - 1
    } else if raw < 0 {
        n_vertices as i64 + raw
    } else {
        return Err(IoError::at_line(path, line_no, "vertex reference 0"));
    };
    if resolved < 0 || resolved >= n_vertices as i64 {
        return Err(IoError::at_line(path, line_no, format!("vertex reference {raw} out of range")));
    }
    Ok(resolved as u32)
}

/// Reads an OBJ mesh (`v`/`f` records, faces fan-triangulated) or skeleton
/// (`l` records) and returns its 1-skeleton graph.
pub fn read_obj(path: &Path) -> Result<EmbeddedGraph, IoError> {
    let text = std::fs::read_to_string(path)?;
    parse_obj(&path.display().to_string(), &text)
}

fn parse_obj(name: &str, text: &str) -> Result<EmbeddedGraph, IoError> {
    let mut positions: Vec<Vec3> = Vec::new();
    let mut faces: Vec<(usize, Vec<u32>)> = Vec::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next().unwrap() {
            "v" => {
                let mut coord = |what: &str| -> Result<f64, IoError> {
                    let tok = toks
                        .next()
                        .ok_or_else(|| IoError::at_line(name, line_no, format!("missing {what}")))?;
                    tok.parse().map_err(|_| {
                        IoError::at_line(name, line_no, format!("bad coordinate {tok:?}"))
                    })
                };
                positions.push(Vec3::new(coord("x")?, coord("y")?, coord("z")?));
            }
            "f" => {
                let mut ring = Vec::new();
                for tok in toks {
                    ring.push(resolve_index(name, line_no, tok, positions.len())?);
                }
                faces.push((line_no, ring));
            }
            "l" => {
                let refs: Vec<u32> = toks
                    .map(|tok| resolve_index(name, line_no, tok, positions.len()))
                    .collect::<Result<_, _>>()?;
                if refs.len() < 2 {
                    return Err(IoError::at_line(name, line_no, "polyline with fewer than 2 vertices"));
                }
                for w in refs.windows(2) {
                    edges.push((w[0], w[1]));
                }
            }
            // Normals, texture coordinates, groups, materials and the like
            // carry nothing the 1-skeleton needs.
            _ => {}
        }
    }
    mesh_to_graph(name, positions, &faces, &edges)
}

/// Writes a triangle mesh as OBJ `v` and `f` records.
pub fn write_mesh_obj(
    w: &mut impl Write,
    positions: &[Vec3],
    faces: &[[u32; 3]],
) -> std::io::Result<()> {
    for p in positions {
        writeln!(w, "v {} {} {}", p.x, p.y, p.z)?;
    }
    for f in faces {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

/// Writes a skeleton as OBJ: `v` records plus one `l` record per edge.
pub fn write_skeleton_obj(w: &mut impl Write, g: &EmbeddedGraph) -> std::io::Result<()> {
    for p in g.positions() {
        writeln!(w, "v {} {} {}", p.x, p.y, p.z)?;
    }
    for (u, v) in g.edges() {
        writeln!(w, "l {} {}", u + 1, v + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_and_quad() {
        let g = parse_obj(
            "t.obj",
            "# test\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 4 3\n",
        )
        .unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 5);
    }

    #[test]
    fn slash_and_negative_references() {
        let g = parse_obj(
            "t.obj",
            "v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1/1/1 2//1 -1\n",
        )
        .unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn out_of_range_reference() {
        let err = parse_obj("t.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 7\n").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
    }

    #[test]
    fn empty_mesh_error() {
        let err = parse_obj("t.obj", "# nothing\n").unwrap_err();
        assert!(matches!(err, IoError::EmptyMesh { .. }));
    }

    #[test]
    fn vertices_without_faces_load_as_isolated() {
        let g = parse_obj("t.obj", "v 0 0 0\nv 1 0 0\n").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn skeleton_round_trip() {
        let g = crate::graph::test_graphs::path(4);
        let mut buf = Vec::new();
        write_skeleton_obj(&mut buf, &g).unwrap();
        let back = parse_obj("skel.obj", std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.vertex_count(), 4);
        assert_eq!(back.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn polyline_chain_expands_to_edges() {
        let g = parse_obj("t.obj", "v 0 0 0\nv 1 0 0\nv 2 0 0\nl 1 2 3\n").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }
}
