//! Throwaway corpus evaluation harness (not shipped).

use mlskel::graph::EmbeddedGraph;
use mlskel::multilevel::{multilevel_skeletonize, RefineMode, RunConfig};
use mlskel::synth;

fn refine_mode() -> RefineMode {
    match std::env::var("REFINE").as_deref() {
        Ok("lemts") => RefineMode::ThickenThenShrink,
        _ => RefineMode::ShrinkOnly,
    }
}

fn eval(label: &str, g: &EmbeddedGraph, expected: usize) {
    let seeds: u64 = std::env::var("SEEDS").ok().and_then(|s| s.parse().ok()).unwrap_or(5);
    let mut ok = 0;
    let mut results = Vec::new();
    for seed in 0..seeds {
        let cfg = RunConfig {
            seed,
            refine: refine_mode(),
            ..RunConfig::default()
        };
        let (skel, _) = multilevel_skeletonize(g, &cfg);
        let m = skel.metrics();
        if m.genus_estimate == expected && m.components == 1 {
            ok += 1;
        }
        results.push((m.genus_estimate, m.components, m.vertices));
    }
    println!(
        "{label}: {} vertices, expected genus {expected}: {ok}/{seeds} exact, (genus, comps, nodes) {results:?}",
        g.vertex_count()
    );
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("frames");

    if which == "frames" {
        for holes in [1usize, 2] {
            for scale in [2i32, 3] {
                for rounds in [0usize, 10] {
                    let cells = synth::frame_cells(scale, holes);
                    let mut mesh = synth::voxel_surface(&cells);
                    mesh.smooth(rounds);
                    let g = mesh.to_graph();
                    eval(
                        &format!("frame h={holes} s={scale} smooth={rounds}"),
                        &g,
                        holes,
                    );
                }
            }
        }
    }

    if which == "tori" {
        for (nu, nv, minor) in [
            (24u32, 12u32, 0.3f64),
            (24, 12, 0.5),
            (32, 12, 0.5),
            (48, 12, 0.3),
            (48, 12, 0.5),
        ] {
            let mesh = synth::torus(nu, nv, 2.0, minor);
            assert_eq!(mesh.genus(), 1);
            eval(&format!("torus {nu}x{nv} r={minor}"), &mesh.to_graph(), 1);
        }
    }

    if which == "double" {
        for (sub, k) in [(2usize, 4u32), (2, 6), (3, 4), (3, 6)] {
            let mesh = synth::double_torus(sub, k, 1.0);
            assert_eq!(mesh.genus(), 2);
            eval(&format!("double sub={sub} k={k}"), &mesh.to_graph(), 2);
        }
    }

    if which == "inspect" {
        let nu: u64 = args[2].parse().unwrap();
        let nv: u64 = args[3].parse().unwrap();
        let seed: u64 = args[4].parse().unwrap();
        let minor: f64 = args
            .get(5)
            .map(|s| s.parse().unwrap())
            .unwrap_or(0.5);
        let mesh = synth::torus(nu as u32, nv as u32, 2.0, minor);
        let g = mesh.to_graph();
        let cfg = RunConfig {
            seed,
            refine: refine_mode(),
            ..RunConfig::default()
        };
        let (skel, report) = multilevel_skeletonize(&g, &cfg);
        let m = skel.metrics();
        println!("genus {} comps {} nodes {}", m.genus_estimate, m.components, m.vertices);
        for s in &report.levels {
            println!(
                "level {}: {}v {}e projected {} refinefail {} searched {} found {} deduped {} packed {}",
                s.level, s.vertices, s.edges, s.projected, s.refine_failures, s.searched,
                s.found, s.deduped, s.packed
            );
        }
        for (n, src) in skel.sources.iter().enumerate() {
            let deg = skel.graph.neighbors(n as u32).len();
            println!("node {n}: {src:?} degree {deg} nbrs {:?}", skel.graph.neighbors(n as u32));
        }
    }

    if which == "dinspect" {
        let sub: usize = args[2].parse().unwrap();
        let k: u32 = args[3].parse().unwrap();
        let seed: u64 = args[4].parse().unwrap();
        let mesh = synth::double_torus(sub, k, 1.0);
        let g = mesh.to_graph();
        let cfg = RunConfig {
            seed,
            refine: refine_mode(),
            ..RunConfig::default()
        };
        let (skel, report) = multilevel_skeletonize(&g, &cfg);
        let m = skel.metrics();
        println!("genus {} comps {} nodes {}", m.genus_estimate, m.components, m.vertices);
        for s in &report.levels {
            println!(
                "level {}: {}v {}e projected {} refinefail {} searched {} found {} deduped {} packed {}",
                s.level, s.vertices, s.edges, s.projected, s.refine_failures, s.searched,
                s.found, s.deduped, s.packed
            );
        }
        for (nd, src) in skel.sources.iter().enumerate() {
            let deg = skel.graph.neighbors(nd as u32).len();
            let nbrs = skel.graph.neighbors(nd as u32);
            println!("node {nd}: {src:?} degree {deg} nbrs {nbrs:?} at {:?}", skel.graph.position(nd as u32));
        }
    }

    if which == "dallstarts" {
        use mlskel::separator::{restricted_separator_search, shrink_separator, SearchScratch};
        let sub: usize = args[2].parse().unwrap();
        let k: u32 = args[3].parse().unwrap();
        let mesh = synth::double_torus(sub, k, 1.0);
        let g = mesh.to_graph();
        let kept = (mesh.vertex_count() - 18 * (k as usize - 1)) / 2;
        let label = |v: u32| -> String {
            let v = v as usize;
            if v < kept {
                "A".to_string()
            } else if v < 2 * kept {
                "B".to_string()
            } else {
                let ring = (v - 2 * kept) / 6;
                let tube = ring / (k as usize - 1);
                let t = ring % (k as usize - 1) + 1;
                format!("t{tube}r{t}")
            }
        };
        let classify = |members: &[u32]| -> String {
            let mut parts: Vec<String> = members.iter().map(|&v| label(v)).collect();
            parts.sort();
            parts.dedup();
            format!("{}({})", parts.join("+"), members.len())
        };
        let mut scratch = SearchScratch::new(&g);
        let mut histo: std::collections::BTreeMap<String, usize> = std::collections::BTreeMap::new();
        for v0 in 0..g.vertex_count() as u32 {
            let out = match restricted_separator_search(&g, v0, 64, &mut scratch) {
                None => "FAIL".to_string(),
                Some(raw) => {
                    let sep = shrink_separator(&g, &raw);
                    let cls = classify(&sep.members);
                    if std::env::var("DUMPCLS").map(|w| cls.contains(&w)).unwrap_or(false) {
                        println!("start {v0} ({}) -> {cls}", label(v0));
                        for &mv in &sep.members {
                            println!("   member {mv} {} nbrs {:?} at {:?}", label(mv), g.neighbors(mv), g.position(mv));
                        }
                    }
                    cls
                }
            };
            *histo.entry(format!("{} -> {out}", label(v0))).or_default() += 1;
        }
        for (kk, c) in &histo {
            println!("{c:4} {kk}");
        }
    }

    if which == "allstarts" {
        use mlskel::separator::{
            restricted_separator_search, shrink_separator, thicken_separator, SearchScratch,
        };
        let thicken = std::env::var("THICKEN").is_ok();
        let nu: u32 = args[2].parse().unwrap();
        let nv: u32 = args[3].parse().unwrap();
        let minor: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0.5);
        let mesh = synth::torus(nu, nv, 2.0, minor);
        let g = mesh.to_graph();
        let mut scratch = SearchScratch::new(&g);
        let mut own_straight = 0;
        let mut other_straight = 0;
        let mut stepped = 0;
        let mut fail = 0;
        let mut examples = Vec::new();
        for v0 in 0..g.vertex_count() as u32 {
            let col = v0 / nv;
            match restricted_separator_search(&g, v0, 64, &mut scratch) {
                None => fail += 1,
                Some(raw) => {
                    let raw = if thicken { thicken_separator(&g, &raw) } else { raw };
                    let sep = shrink_separator(&g, &raw);
                    let cols: std::collections::BTreeSet<u32> =
                        sep.members.iter().map(|&v| v / nv).collect();
                    if cols.len() == 1 {
                        if cols.contains(&col) {
                            own_straight += 1;
                        } else {
                            other_straight += 1;
                        }
                    } else {
                        stepped += 1;
                        if examples.len() < 6 {
                            let coords: Vec<(u32, u32)> =
                                sep.members.iter().map(|&v| (v / nv, v % nv)).collect();
                            examples.push((v0 / nv, v0 % nv, raw.members.len(), coords));
                        }
                    }
                }
            }
        }
        println!(
            "torus {nu}x{nv} r={minor}: own-column {own_straight}, other-column {other_straight}, stepped {stepped}, fail {fail}"
        );
        for (c, r, rawlen, coords) in examples {
            println!("  start ({c},{r}) raw {rawlen} -> {coords:?}");
        }
    }

    if which == "spheres" {
        for sub in [3usize, 4] {
            let mesh = synth::icosphere(sub, 1.0);
            eval(&format!("icosphere sub={sub}"), &mesh.to_graph(), 0);
        }
    }
}
