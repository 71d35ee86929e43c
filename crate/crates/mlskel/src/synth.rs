//! Synthetic triangle meshes and voxel solids.
//!
//! Generators for closed surfaces of known genus (icospheres, parametric
//! tori, voxelized slabs with through-holes), midpoint subdivision for
//! scaling series, seeded jitter, and random voxel blobs. Tests and
//! benchmarks lean on these because their topology is known by
//! construction and checkable through the Euler characteristic.

use std::collections::{HashMap, HashSet};

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use crate::graph::EmbeddedGraph;
use crate::io::Connectivity;
use crate::vec3::Vec3;

/// An indexed triangle mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub positions: Vec<Vec3>,
    pub faces: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Unique undirected edges of the face set.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut edges: Vec<(u32, u32)> = self
            .faces
            .iter()
            .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// V − E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edges().len() as i64 + self.face_count() as i64
    }

    /// Genus of a closed orientable surface via 2 − 2g = χ. Panics when the
    /// Euler characteristic is not that of such a surface.
    pub fn genus(&self) -> usize {
        let chi = self.euler_characteristic();
        assert!(
            chi <= 2 && chi % 2 == 0,
            "mesh is not a closed orientable surface (euler characteristic {chi})"
        );
        ((2 - chi) / 2) as usize
    }

    /// The 1-skeleton as an embedded graph (unit capacities).
    pub fn to_graph(&self) -> EmbeddedGraph {
        EmbeddedGraph::from_positions_edges(self.positions.clone(), &self.edges())
    }

    /// Splits every triangle into four at the edge midpoints. Vertex count
    /// grows to V + E (roughly ×4 on large meshes); topology is unchanged.
    pub fn subdivide(&self) -> TriMesh {
        let mut positions = self.positions.clone();
        let mut midpoint: HashMap<(u32, u32), u32> = HashMap::new();
        let mut mid = |a: u32, b: u32, positions: &mut Vec<Vec3>| -> u32 {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let p = (positions[a as usize] + positions[b as usize]) * 0.5;
                positions.push(p);
                positions.len() as u32 - 1
            })
        };
        let mut faces = Vec::with_capacity(self.faces.len() * 4);
        for &[a, b, c] in &self.faces {
            let ab = mid(a, b, &mut positions);
            let bc = mid(b, c, &mut positions);
            let ca = mid(c, a, &mut positions);
            faces.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        TriMesh { positions, faces }
    }

    /// Displaces every vertex by a uniform offset in `[-amplitude, amplitude]`
    /// per axis. Connectivity is untouched.
    pub fn jitter(&mut self, rng: &mut impl Rng, amplitude: f64) {
        for p in &mut self.positions {
            *p += Vec3::new(
                rng.random_range(-amplitude..=amplitude),
                rng.random_range(-amplitude..=amplitude),
                rng.random_range(-amplitude..=amplitude),
            );
        }
    }

    /// Uniform Laplacian smoothing: each round moves every vertex halfway
    /// toward the mean of its neighbours. Rounds corners off voxel surfaces
    /// while preserving connectivity (and thus topology); the surface
    /// shrinks slightly, as this flow always does.
    pub fn smooth(&mut self, rounds: usize) {
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); self.positions.len()];
        for (a, b) in self.edges() {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for _ in 0..rounds {
            let prev = self.positions.clone();
            for (p, nbrs) in self.positions.iter_mut().zip(&adjacency) {
                if nbrs.is_empty() {
                    continue;
                }
                let mean = nbrs.iter().fold(Vec3::ZERO, |acc, &w| acc + prev[w as usize])
                    / nbrs.len() as f64;
                *p = (*p + mean) * 0.5;
            }
        }
    }
}

/// Icosahedron subdivided `subdivisions` times with vertices pushed onto a
/// sphere of the given radius. Genus 0 at every level.
pub fn icosphere(subdivisions: usize, radius: f64) -> TriMesh {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let faces: Vec<[u32; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    let mut mesh = TriMesh {
        positions: raw.iter().map(|&(x, y, z)| Vec3::new(x, y, z)).collect(),
        faces,
    };
    for _ in 0..subdivisions {
        mesh = mesh.subdivide();
    }
    for p in &mut mesh.positions {
        *p = *p * (radius / p.norm());
    }
    mesh
}

/// Triangulated parametric torus with `nu × nv` vertices. Genus 1.
pub fn torus(nu: u32, nv: u32, major_radius: f64, minor_radius: f64) -> TriMesh {
    assert!(nu >= 3 && nv >= 3, "torus needs at least a 3x3 grid");
    let mut positions = Vec::with_capacity((nu * nv) as usize);
    for i in 0..nu {
        let u = i as f64 / nu as f64 * std::f64::consts::TAU;
        for j in 0..nv {
            let v = j as f64 / nv as f64 * std::f64::consts::TAU;
            let ring = major_radius + minor_radius * v.cos();
            positions.push(Vec3::new(
                ring * u.cos(),
                ring * u.sin(),
                minor_radius * v.sin(),
            ));
        }
    }
    let at = |i: u32, j: u32| (i % nu) * nv + (j % nv);
    let mut faces = Vec::with_capacity((2 * nu * nv) as usize);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    TriMesh { positions, faces }
}

/// Genus-2 closed surface (a double torus up to homeomorphism): two
/// icospheres facing each other, each punctured at three interior-degree-6
/// vertices, joined by three straight tubes built over the exposed hexagonal
/// boundaries. The tubes narrow toward their middles so the lobes meet in
/// clearly articulated necks. `bridge` is the number of segments per tube.
pub fn double_torus(subdivisions: usize, bridge: u32, radius: f64) -> TriMesh {
    assert!(subdivisions >= 1, "the base icosahedron has no degree-6 vertices");
    assert!(bridge >= 2, "each joining tube needs at least two segments");
    let sphere = icosphere(subdivisions, radius);
    let n = sphere.vertex_count() as u32;
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n as usize];
    for (a, b) in sphere.edges() {
        adjacency[a as usize].push(b);
        adjacency[b as usize].push(a);
    }
    // Orientation of the face list is consistent, so following a->b from
    // faces [v, a, b] walks the link of v in cyclic order.
    let link_cycle = |v: u32| -> Vec<u32> {
        let mut next: HashMap<u32, u32> = HashMap::new();
        for f in &sphere.faces {
            if let Some(i) = f.iter().position(|&x| x == v) {
                next.insert(f[(i + 1) % 3], f[(i + 2) % 3]);
            }
        }
        let mut cycle = vec![*next.keys().min().unwrap()];
        while let Some(&w) = next.get(cycle.last().unwrap()) {
            if w == cycle[0] {
                break;
            }
            cycle.push(w);
        }
        assert_eq!(cycle.len(), next.len(), "link of {v} is not a single cycle");
        cycle
    };
    // Puncture the three degree-6 vertices closest to three directions that
    // fan out from the +x pole, so the tubes run straight toward the mirror
    // sphere without crowding one another.
    let polar = 50f64.to_radians();
    let mut punctures: Vec<u32> = Vec::new();
    for m in 0..3 {
        let az = m as f64 / 3.0 * std::f64::consts::TAU;
        let dir = Vec3::new(polar.cos(), polar.sin() * az.cos(), polar.sin() * az.sin());
        let pick = (0..n)
            .filter(|&v| adjacency[v as usize].len() == 6)
            .filter(|&v| {
                punctures.iter().all(|&p| {
                    let two_hop: HashSet<u32> = adjacency[p as usize]
                        .iter()
                        .flat_map(|&w| adjacency[w as usize].iter().copied())
                        .chain(adjacency[p as usize].iter().copied())
                        .collect();
                    p != v && !two_hop.contains(&v)
                })
            })
            .max_by(|&a, &b| {
                let da = sphere.positions[a as usize].dot(dir);
                let db = sphere.positions[b as usize].dot(dir);
                da.partial_cmp(&db).unwrap().then(b.cmp(&a))
            })
            .expect("no eligible puncture vertex");
        punctures.push(pick);
    }
    let removed: HashSet<u32> = punctures.iter().copied().collect();
    let mut remap = vec![u32::MAX; n as usize];
    let mut kept = 0u32;
    for v in 0..n {
        if !removed.contains(&v) {
            remap[v as usize] = kept;
            kept += 1;
        }
    }
    let cx = 1.2 * radius;
    let mut positions = Vec::with_capacity(2 * kept as usize + 18 * (bridge as usize - 1));
    for (v, p) in sphere.positions.iter().enumerate() {
        if !removed.contains(&(v as u32)) {
            positions.push(Vec3::new(p.x - cx, p.y, p.z));
        }
    }
    for (v, p) in sphere.positions.iter().enumerate() {
        if !removed.contains(&(v as u32)) {
            positions.push(Vec3::new(cx - p.x, p.y, p.z));
        }
    }
    let mut faces = Vec::new();
    for f in &sphere.faces {
        if f.iter().any(|v| removed.contains(v)) {
            continue;
        }
        faces.push(f.map(|v| remap[v as usize]));
        faces.push(f.map(|v| kept + remap[v as usize]));
    }
    // The mirrored sphere shares vertex ids, so pairing hexagon corners by
    // id yields twist-free tubes parallel to the x axis.
    for &p in &punctures {
        let hex = link_cycle(p);
        let mut rings: Vec<Vec<u32>> = vec![hex.iter().map(|&v| remap[v as usize]).collect()];
        for t in 1..bridge {
            // Interior rings occupy the central half of the tube, keeping a
            // clear step from either hexagon to the first ring.
            let frac = 0.25 + 0.5 * (t as f64 - 0.5) / (bridge as f64 - 1.0);
            let pinch: f64 = std::env::var("PINCH").ok().and_then(|v| v.parse().ok()).unwrap_or(0.7);
            let waist = 1.0 - pinch * (std::f64::consts::PI * frac).sin();
            let lerped: Vec<Vec3> = hex
                .iter()
                .map(|&c| {
                    let a = positions[remap[c as usize] as usize];
                    let b = positions[(kept + remap[c as usize]) as usize];
                    a + (b - a) * frac
                })
                .collect();
            let centroid = lerped.iter().fold(Vec3::ZERO, |acc, &q| acc + q) * (1.0 / 6.0);
            rings.push(
                lerped
                    .iter()
                    .map(|&q| {
                        positions.push(centroid + (q - centroid) * waist);
                        positions.len() as u32 - 1
                    })
                    .collect(),
            );
        }
        rings.push(hex.iter().map(|&v| kept + remap[v as usize]).collect());
        for w in rings.windows(2) {
            for m in 0..6 {
                let (a, b) = (w[0][m], w[0][(m + 1) % 6]);
                let (c, d) = (w[1][(m + 1) % 6], w[1][m]);
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
    }
    TriMesh { positions, faces }
}

/// Axis-aligned solid slab of `6s × 4s × s` voxels with `holes` (0..=2)
/// square shafts punched through it. The boundary surface has genus equal
/// to `holes`; `scale` refines the voxelization without changing topology.
pub fn slab_cells(scale: i32, holes: usize) -> Vec<(i32, i32, i32)> {
    assert!(scale >= 1, "scale must be at least 1");
    assert!(holes <= 2, "the slab supports at most two holes");
    let s = scale;
    let in_hole = |x: i32, y: i32, k: i32| -> bool {
        let x0 = (1 + 3 * k) * s;
        x >= x0 && x < x0 + s && y >= s && y < 3 * s
    };
    let mut cells = Vec::new();
    for x in 0..6 * s {
        for y in 0..4 * s {
            if (0..holes as i32).any(|k| in_hole(x, y, k)) {
                continue;
            }
            for z in 0..s {
                cells.push((x, y, z));
            }
        }
    }
    cells
}

/// Axis-aligned voxel frame: bars of square `s × s` cross-section around
/// `holes` (1..=2) square openings, like a picture frame or a figure eight.
/// The boundary surface has genus equal to `holes`; unlike [`slab_cells`]
/// every part of the solid is a thin bar, so the shape is tubular
/// throughout. `scale` refines the voxelization without changing topology.
pub fn frame_cells(scale: i32, holes: usize) -> Vec<(i32, i32, i32)> {
    assert!(scale >= 1, "scale must be at least 1");
    assert!((1..=2).contains(&holes), "the frame needs one or two holes");
    let s = scale;
    let width = (1 + 3 * holes as i32) * s;
    let in_hole = |x: i32, y: i32, k: i32| -> bool {
        let x0 = (1 + 3 * k) * s;
        x >= x0 && x < x0 + 2 * s && y >= s && y < 3 * s
    };
    let mut cells = Vec::new();
    for x in 0..width {
        for y in 0..4 * s {
            if (0..holes as i32).any(|k| in_hole(x, y, k)) {
                continue;
            }
            for z in 0..s {
                cells.push((x, y, z));
            }
        }
    }
    cells
}

/// Triangulated boundary surface of a voxel set: one quad (two triangles)
/// per solid-to-empty face, with welded corner vertices.
pub fn voxel_surface(cells: &[(i32, i32, i32)]) -> TriMesh {
    let solid: HashSet<(i32, i32, i32)> = cells.iter().copied().collect();
    let mut corners: HashMap<(i32, i32, i32), u32> = HashMap::new();
    let mut positions: Vec<Vec3> = Vec::new();
    let mut corner =
        |p: (i32, i32, i32), positions: &mut Vec<Vec3>| -> u32 {
            *corners.entry(p).or_insert_with(|| {
                positions.push(Vec3::new(p.0 as f64, p.1 as f64, p.2 as f64));
                positions.len() as u32 - 1
            })
        };
    // Each entry: neighbour offset, corner of the face closest to the cell
    // origin, and the two in-plane axes that complete a cyclic quad.
    #[rustfmt::skip]
    let faces_spec: [((i32, i32, i32), (i32, i32, i32), (i32, i32, i32), (i32, i32, i32)); 6] = [
        ((1, 0, 0),  (1, 0, 0), (0, 1, 0), (0, 0, 1)),
        ((-1, 0, 0), (0, 0, 0), (0, 1, 0), (0, 0, 1)),
        ((0, 1, 0),  (0, 1, 0), (1, 0, 0), (0, 0, 1)),
        ((0, -1, 0), (0, 0, 0), (1, 0, 0), (0, 0, 1)),
        ((0, 0, 1),  (0, 0, 1), (1, 0, 0), (0, 1, 0)),
        ((0, 0, -1), (0, 0, 0), (1, 0, 0), (0, 1, 0)),
    ];
    let add = |p: (i32, i32, i32), q: (i32, i32, i32)| (p.0 + q.0, p.1 + q.1, p.2 + q.2);
    let mut faces = Vec::new();
    for &cell in cells {
        for &(dir, base, a, b) in &faces_spec {
            if solid.contains(&add(cell, dir)) {
                continue;
            }
            let q = [
                add(cell, base),
                add(add(cell, base), a),
                add(add(add(cell, base), a), b),
                add(add(cell, base), b),
            ];
            let idx = [
                corner(q[0], &mut positions),
                corner(q[1], &mut positions),
                corner(q[2], &mut positions),
                corner(q[3], &mut positions),
            ];
            faces.push([idx[0], idx[1], idx[2]]);
            faces.push([idx[0], idx[2], idx[3]]);
        }
    }
    TriMesh { positions, faces }
}

/// Connected random voxel solid grown cell-by-cell from the origin.
pub fn voxel_blob(seed: u64, cell_count: usize) -> Vec<(i32, i32, i32)> {
    assert!(cell_count >= 1);
    let mut rng = SmallRng::seed_from_u64(seed);
    let dirs = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)];
    let mut cells = vec![(0, 0, 0)];
    let mut seen: HashSet<(i32, i32, i32)> = cells.iter().copied().collect();
    while cells.len() < cell_count {
        let (x, y, z) = cells[rng.random_range(0..cells.len())];
        let (dx, dy, dz) = dirs[rng.random_range(0..dirs.len())];
        let cand = (x + dx, y + dy, z + dz);
        if seen.insert(cand) {
            cells.push(cand);
        }
    }
    cells
}

/// Adjacency graph of a random voxel blob under the given connectivity.
pub fn voxel_blob_graph(seed: u64, cell_count: usize, connectivity: Connectivity) -> EmbeddedGraph {
    let cells = voxel_blob(seed, cell_count);
    let index: HashMap<(i32, i32, i32), u32> =
        cells.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
    crate::io::voxel::voxel_graph(&cells, &index, connectivity)
}
