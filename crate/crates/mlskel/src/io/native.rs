use std::io::Write;
use std::path::Path;

use super::IoError;
use crate::graph::EmbeddedGraph;
use crate::vec3::Vec3;

/// Reads the native graph format:
///
/// ```text
/// graph <n> <m>
/// <x> <y> <z> <capacity>     (n lines)
/// <u> <v>                    (m lines)
/// ```
pub fn read_native(path: &Path) -> Result<EmbeddedGraph, IoError> {
    let text = std::fs::read_to_string(path)?;
    parse_native(&path.display().to_string(), &text)
}

fn parse_native(name: &str, text: &str) -> Result<EmbeddedGraph, IoError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (idx, header) = lines
        .next()
        .ok_or_else(|| IoError::at_line(name, 1, "missing graph header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 || toks[0] != "graph" {
        return Err(IoError::at_line(name, idx + 1, "expected `graph <n> <m>`"));
    }
    let n: usize = toks[1]
        .parse()
        .map_err(|_| IoError::at_line(name, idx + 1, "bad vertex count"))?;
    let m: usize = toks[2]
        .parse()
        .map_err(|_| IoError::at_line(name, idx + 1, "bad edge count"))?;

    let mut positions = Vec::with_capacity(n);
    let mut capacities = Vec::with_capacity(n);
    for _ in 0..n {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| IoError::at_line(name, 0, "missing vertex line"))?;
        let line_no = idx + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(IoError::at_line(name, line_no, "expected `x y z capacity`"));
        }
        let coord = |tok: &str| -> Result<f64, IoError> {
            tok.parse()
                .map_err(|_| IoError::at_line(name, line_no, format!("bad coordinate {tok:?}")))
        };
        positions.push(Vec3::new(coord(toks[0])?, coord(toks[1])?, coord(toks[2])?));
        let cap: u64 = toks[3]
            .parse()
            .map_err(|_| IoError::at_line(name, line_no, format!("bad capacity {:?}", toks[3])))?;
        if cap == 0 {
            return Err(IoError::at_line(name, line_no, "capacity must be positive"));
        }
        capacities.push(cap);
    }

    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| IoError::at_line(name, 0, "missing edge line"))?;
        let line_no = idx + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(IoError::at_line(name, line_no, "expected `u v`"));
        }
        let endpoint = |tok: &str| -> Result<u32, IoError> {
            let v: u32 = tok
                .parse()
                .map_err(|_| IoError::at_line(name, line_no, format!("bad vertex id {tok:?}")))?;
            if v as usize >= n {
                return Err(IoError::at_line(name, line_no, format!("vertex id {v} out of range")));
            }
            Ok(v)
        };
        let (u, v) = (endpoint(toks[0])?, endpoint(toks[1])?);
        if u == v {
            return Err(IoError::at_line(name, line_no, "self-loop rejected"));
        }
        edges.push((u, v));
    }
    if let Some((idx, _)) = lines.next() {
        return Err(IoError::at_line(name, idx + 1, "trailing content"));
    }
    Ok(EmbeddedGraph::from_parts(positions, capacities, &edges))
}

/// Writes the native graph format; the inverse of [`read_native`].
pub fn write_native(w: &mut impl Write, g: &EmbeddedGraph) -> std::io::Result<()> {
    writeln!(w, "graph {} {}", g.vertex_count(), g.edge_count())?;
    for v in 0..g.vertex_count() as u32 {
        let p = g.position(v);
        writeln!(w, "{} {} {} {}", p.x, p.y, p.z, g.capacity(v))?;
    }
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}
