use std::io::Write;
use std::path::Path;

use super::{mesh_to_graph, IoError};
use crate::graph::EmbeddedGraph;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(tok: &str) -> Option<Scalar> {
        Some(match tok {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 => 4,
            Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { ty: Scalar, name: String },
    List { count: Scalar, item: Scalar, name: String },
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    BinaryLe,
}

struct Header {
    encoding: Encoding,
    elements: Vec<Element>,
    body_start: usize,
    header_lines: usize,
}

struct LineCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line_no: usize,
}

impl<'a> LineCursor<'a> {
    fn next_line(&mut self) -> Option<(usize, String)> {
        if self.pos >= self.bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
            self.pos += 1;
        }
        let raw = &self.bytes[start..self.pos];
        self.pos += 1; // past the newline
        self.line_no += 1;
        let text = String::from_utf8_lossy(raw).trim_end_matches('\r').trim().to_string();
        Some((self.line_no, text))
    }
}

fn parse_header(path: &str, bytes: &[u8]) -> Result<Header, IoError> {
    let mut cur = LineCursor { bytes, pos: 0, line_no: 0 };
    let (first_no, magic) =
        cur.next_line().ok_or_else(|| IoError::at_line(path, 1, "empty file"))?;
    if magic != "ply" {
        return Err(IoError::at_line(path, first_no, "missing ply magic"));
    }
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let end_line = cur.line_no;
        let (no, line) = cur
            .next_line()
            .ok_or_else(|| IoError::at_line(path, end_line, "header ended without end_header"))?;
        if line.is_empty() || line.starts_with("comment") || line.starts_with("obj_info") {
            continue;
        }
        if line == "end_header" {
            break;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "format" => {
                encoding = Some(match toks.get(1).copied() {
                    Some("ascii") => Encoding::Ascii,
                    Some("binary_little_endian") => Encoding::BinaryLe,
                    Some(other) => {
                        return Err(IoError::at_line(path, no, format!("unsupported format {other}")))
                    }
                    None => return Err(IoError::at_line(path, no, "format line too short")),
                });
            }
            "element" => {
                if toks.len() != 3 {
                    return Err(IoError::at_line(path, no, "malformed element line"));
                }
                let count: usize = toks[2]
                    .parse()
                    .map_err(|_| IoError::at_line(path, no, "bad element count"))?;
                elements.push(Element { name: toks[1].to_string(), count, properties: Vec::new() });
            }
            "property" => {
                let elem = elements
                    .last_mut()
                    .ok_or_else(|| IoError::at_line(path, no, "property before element"))?;
                let prop = if toks.get(1) == Some(&"list") {
                    if toks.len() != 5 {
                        return Err(IoError::at_line(path, no, "malformed list property"));
                    }
                    let count = Scalar::parse(toks[2])
                        .ok_or_else(|| IoError::at_line(path, no, "unknown list count type"))?;
                    let item = Scalar::parse(toks[3])
                        .ok_or_else(|| IoError::at_line(path, no, "unknown list item type"))?;
                    Property::List { count, item, name: toks[4].to_string() }
                } else {
                    if toks.len() != 3 {
                        return Err(IoError::at_line(path, no, "malformed property line"));
                    }
                    let ty = Scalar::parse(toks[1])
                        .ok_or_else(|| IoError::at_line(path, no, "unknown property type"))?;
                    Property::Scalar { ty, name: toks[2].to_string() }
                };
                elem.properties.push(prop);
            }
            other => return Err(IoError::at_line(path, no, format!("unknown header keyword {other}"))),
        }
    }
    let encoding =
        encoding.ok_or_else(|| IoError::at_line(path, cur.line_no, "missing format line"))?;
    Ok(Header { encoding, elements, body_start: cur.pos, header_lines: cur.line_no })
}

/// One parsed property value; lists flatten to their items.
enum Value {
    Num(f64),
    List(Vec<f64>),
}

struct AsciiBody<'a> {
    path: &'a str,
    lines: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> AsciiBody<'a> {
    fn next_record(&mut self, props: &[Property]) -> Result<(usize, Vec<Value>), IoError> {
        let line = loop {
            let line = self
                .lines
                .next()
                .ok_or_else(|| IoError::at_line(self.path, self.line_no, "unexpected end of file"))?;
            self.line_no += 1;
            if !line.trim().is_empty() {
                break line;
            }
        };
        let mut toks = line.split_whitespace();
        let mut take = |what: &str| -> Result<f64, IoError> {
            let tok = toks
                .next()
                .ok_or_else(|| IoError::at_line(self.path, self.line_no, format!("missing {what}")))?;
            tok.parse::<f64>()
                .map_err(|_| IoError::at_line(self.path, self.line_no, format!("bad number {tok:?}")))
        };
        let mut values = Vec::with_capacity(props.len());
        for p in props {
            match p {
                Property::Scalar { .. } => values.push(Value::Num(take("value")?)),
                Property::List { .. } => {
                    let count = take("list count")? as usize;
                    let mut items = Vec::with_capacity(count);
                    for _ in 0..count {
                        items.push(take("list item")?);
                    }
                    values.push(Value::List(items));
                }
            }
        }
        Ok((self.line_no, values))
    }
}

struct BinaryBody<'a> {
    path: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BinaryBody<'a> {
    fn read_scalar(&mut self, ty: Scalar) -> Result<f64, IoError> {
        let size = ty.size();
        if self.pos + size > self.bytes.len() {
            return Err(IoError::at_offset(self.path, self.pos, "unexpected end of file"));
        }
        let b = &self.bytes[self.pos..self.pos + size];
        self.pos += size;
        Ok(match ty {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F64 => f64::from_le_bytes(b.try_into().unwrap()),
        })
    }

    fn next_record(&mut self, props: &[Property]) -> Result<(usize, Vec<Value>), IoError> {
        let at = self.pos;
        let mut values = Vec::with_capacity(props.len());
        for p in props {
            match p {
                Property::Scalar { ty, .. } => values.push(Value::Num(self.read_scalar(*ty)?)),
                Property::List { count, item, .. } => {
                    let count = self.read_scalar(*count)? as usize;
                    let mut items = Vec::with_capacity(count);
                    for _ in 0..count {
                        items.push(self.read_scalar(*item)?);
                    }
                    values.push(Value::List(items));
                }
            }
        }
        Ok((at, values))
    }
}

enum Body<'a> {
    Ascii(AsciiBody<'a>),
    Binary(BinaryBody<'a>),
}

impl<'a> Body<'a> {
    fn next_record(&mut self, props: &[Property]) -> Result<(usize, Vec<Value>), IoError> {
        match self {
            Body::Ascii(b) => b.next_record(props),
            Body::Binary(b) => b.next_record(props),
        }
    }
}

fn prop_index(props: &[Property], wanted: &str) -> Option<usize> {
    props.iter().position(|p| match p {
        Property::Scalar { name, .. } | Property::List { name, .. } => name == wanted,
    })
}

/// Reads a PLY mesh or skeleton and returns its 1-skeleton graph.
pub fn read_ply(path: &Path) -> Result<EmbeddedGraph, IoError> {
    let bytes = std::fs::read(path)?;
    let name = path.display().to_string();
    parse_ply(&name, &bytes)
}

fn parse_ply(name: &str, bytes: &[u8]) -> Result<EmbeddedGraph, IoError> {
    let header = parse_header(name, bytes)?;
    let mut body = match header.encoding {
        Encoding::Ascii => {
            let text = std::str::from_utf8(&bytes[header.body_start..])
                .map_err(|_| IoError::at_line(name, header.header_lines + 1, "body is not UTF-8"))?;
            Body::Ascii(AsciiBody { path: name, lines: text.lines(), line_no: header.header_lines })
        }
        Encoding::BinaryLe => Body::Binary(BinaryBody { path: name, bytes, pos: header.body_start }),
    };
    read_elements(name, &header, &mut body)
}

fn read_elements(name: &str, header: &Header, body: &mut Body) -> Result<EmbeddedGraph, IoError> {
    let mut positions: Vec<Vec3> = Vec::new();
    let mut faces: Vec<(usize, Vec<u32>)> = Vec::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for elem in &header.elements {
        match elem.name.as_str() {
            "vertex" => {
                let ix = prop_index(&elem.properties, "x");
                let iy = prop_index(&elem.properties, "y");
                let iz = prop_index(&elem.properties, "z");
                let (ix, iy, iz) = match (ix, iy, iz) {
                    (Some(a), Some(b), Some(c)) => (a, b, c),
                    _ => {
                        return Err(IoError::at_line(name, 1, "vertex element lacks x/y/z properties"))
                    }
                };
                for _ in 0..elem.count {
                    let (loc, vals) = body.next_record(&elem.properties)?;
                    let get = |i: usize| -> Result<f64, IoError> {
                        match &vals[i] {
                            Value::Num(v) => Ok(*v),
                            Value::List(_) => {
                                Err(IoError::at_line(name, loc, "coordinate property is a list"))
                            }
                        }
                    };
                    positions.push(Vec3::new(get(ix)?, get(iy)?, get(iz)?));
                }
            }
            "face" => {
                let il = prop_index(&elem.properties, "vertex_indices")
                    .or_else(|| prop_index(&elem.properties, "vertex_index"))
                    .ok_or_else(|| IoError::at_line(name, 1, "face element lacks vertex_indices"))?;
                for _ in 0..elem.count {
                    let (loc, vals) = body.next_record(&elem.properties)?;
                    match &vals[il] {
                        Value::List(items) => {
                            let ring: Vec<u32> = items.iter().map(|&v| v as u32).collect();
                            faces.push((loc, ring));
                        }
                        Value::Num(_) => {
                            return Err(IoError::at_line(name, loc, "vertex_indices is not a list"))
                        }
                    }
                }
            }
            "edge" => {
                let i1 = prop_index(&elem.properties, "vertex1");
                let i2 = prop_index(&elem.properties, "vertex2");
                let (i1, i2) = match (i1, i2) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(IoError::at_line(name, 1, "edge element lacks vertex1/vertex2")),
                };
                for _ in 0..elem.count {
                    let (loc, vals) = body.next_record(&elem.properties)?;
                    let get = |i: usize| -> Result<u32, IoError> {
                        match &vals[i] {
                            Value::Num(v) if *v >= 0.0 => Ok(*v as u32),
                            _ => Err(IoError::at_line(name, loc, "bad edge endpoint")),
                        }
                    };
                    edges.push((get(i1)?, get(i2)?));
                }
            }
            _ => {
                for _ in 0..elem.count {
                    body.next_record(&elem.properties)?;
                }
            }
        }
    }
    let n = positions.len() as u32;
    for &(a, b) in &edges {
        if a >= n || b >= n {
            return Err(IoError::at_line(name, 1, format!("edge endpoint {} out of range", a.max(b))));
        }
    }
    mesh_to_graph(name, positions, &faces, &edges)
}

/// Writes a triangle mesh as ASCII PLY with a vertex and a face element.
pub fn write_mesh_ply(
    w: &mut impl Write,
    positions: &[Vec3],
    faces: &[[u32; 3]],
) -> std::io::Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "element vertex {}", positions.len())?;
    writeln!(w, "property double x")?;
    writeln!(w, "property double y")?;
    writeln!(w, "property double z")?;
    writeln!(w, "element face {}", faces.len())?;
    writeln!(w, "property list uchar int vertex_indices")?;
    writeln!(w, "end_header")?;
    for p in positions {
        writeln!(w, "{} {} {}", p.x, p.y, p.z)?;
    }
    for f in faces {
        writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    Ok(())
}

/// Writes a skeleton as ASCII PLY with a vertex and an edge element.
pub fn write_skeleton_ply(w: &mut impl Write, g: &EmbeddedGraph) -> std::io::Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "element vertex {}", g.vertex_count())?;
    writeln!(w, "property double x")?;
    writeln!(w, "property double y")?;
    writeln!(w, "property double z")?;
    writeln!(w, "element edge {}", g.edge_count())?;
    writeln!(w, "property int vertex1")?;
    writeln!(w, "property int vertex2")?;
    writeln!(w, "end_header")?;
    for p in g.positions() {
        writeln!(w, "{} {} {}", p.x, p.y, p.z)?;
    }
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}
