//! Command-line front end for curve skeletonization.
//!
//! Subcommands: `skeletonize` runs the full pipeline on a mesh, voxel, or
//! graph file; `compare` reports metric deltas and Hausdorff distances
//! between two skeletons; `bench` sweeps configurations over a corpus
//! directory with median-of-3 timings; `coarsen` dumps the coarsening
//! hierarchy; `gen` produces synthetic inputs of known topology.
//!
//! Exit codes: 0 on success, 2 on user errors (bad paths, formats, flags),
//! 3 when an internal invariant trips.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::panic::AssertUnwindSafe;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mlskel::io::{self, Connectivity};
use mlskel::multilevel::{multilevel_skeletonize, RefineMode, RunConfig, RunReport};
use mlskel::skeleton::{directed_hausdorff, skeleton_metrics, SkeletonMetrics};
use mlskel::synth;
use mlskel::EmbeddedGraph;

#[derive(Parser)]
#[command(name = "mlskel", version, about = "Curve skeletons of embedded graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Skeletonize a mesh, voxel, or graph file.
    Skeletonize(SkeletonizeArgs),
    /// Compare two skeleton files, normalized by an input's size.
    Compare(CompareArgs),
    /// Run configuration sweeps over a corpus directory, CSV to stdout.
    Bench(BenchArgs),
    /// Write every level of the coarsening hierarchy as graph files.
    Coarsen(CoarsenArgs),
    /// Generate synthetic meshes and voxel solids of known topology.
    Gen(GenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RefineArg {
    /// Shrink projected separators.
    Lem,
    /// Thicken, then shrink.
    Lemts,
}

impl From<RefineArg> for RefineMode {
    fn from(r: RefineArg) -> RefineMode {
        match r {
            RefineArg::Lem => RefineMode::ShrinkOnly,
            RefineArg::Lemts => RefineMode::ThickenThenShrink,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Ply,
    Obj,
}

#[derive(Args, Clone)]
struct PipelineFlags {
    /// Coarsening target and per-search absorption budget.
    #[arg(long, default_value_t = 64)]
    alpha: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker count; also fixes the sampling tick width, so results are
    /// reproducible per (seed, threads) pair.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Refinement of projected separators.
    #[arg(long, value_enum, default_value_t = RefineArg::Lem)]
    refine: RefineArg,
    /// Single-level run with unrestricted search budget.
    #[arg(long)]
    baseline: bool,
    /// Promotion threshold for the search connectivity structure.
    #[arg(long)]
    dyncon_threshold: Option<usize>,
}

impl PipelineFlags {
    fn config(&self) -> RunConfig {
        RunConfig {
            alpha: self.alpha,
            seed: self.seed,
            threads: self.threads,
            refine: self.refine.into(),
            baseline: self.baseline,
            dyncon_threshold: self.dyncon_threshold,
        }
    }
}

#[derive(Args)]
struct SkeletonizeArgs {
    input: PathBuf,
    #[command(flatten)]
    pipeline: PipelineFlags,
    /// Neighbour rule for voxel inputs.
    #[arg(long, default_value_t = 26)]
    voxel_connectivity: u8,
    /// Skeleton output path (default: input path with extension
    /// `skeleton.<format>`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Ply)]
    out_format: OutFormat,
    /// Where to write the JSON run report (default: `<out>.report.json`).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Skeleton under test.
    skeleton_a: PathBuf,
    /// Reference skeleton.
    skeleton_b: PathBuf,
    /// Input whose bounding-sphere radius normalizes distances.
    input: PathBuf,
    #[arg(long, default_value_t = 26)]
    voxel_connectivity: u8,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of inputs (ply/obj/graph/vox/xyz files).
    corpus: PathBuf,
    /// Comma-separated α sweep.
    #[arg(long, default_value = "8,16,32,64,128")]
    alphas: String,
    /// Optional comma-separated dyncon-threshold sweep.
    #[arg(long)]
    dyncon_thresholds: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = RefineArg::Lem)]
    refine: RefineArg,
    /// Add a single-level unrestricted row per input.
    #[arg(long)]
    baseline: bool,
    #[arg(long, default_value_t = 26)]
    voxel_connectivity: u8,
}

#[derive(Args)]
struct CoarsenArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 64)]
    alpha: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 26)]
    voxel_connectivity: u8,
    /// Output directory for `level_###.graph` dumps.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    shape: Shape,
}

#[derive(Args, Clone)]
struct GenCommon {
    /// Output path; `.ply`/`.obj` select the mesh format.
    #[arg(long)]
    out: PathBuf,
    /// Extra midpoint-subdivision steps (each is roughly ×4 vertices).
    #[arg(long, default_value_t = 0)]
    subdivide: usize,
    /// Laplacian smoothing rounds applied after subdivision.
    #[arg(long, default_value_t = 0)]
    smooth: usize,
    /// Uniform per-axis jitter amplitude.
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    /// Jitter seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Shape {
    /// Icosphere of genus 0.
    Sphere {
        #[arg(long, default_value_t = 3)]
        subdivisions: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Triangulated torus of genus 1.
    Torus {
        #[arg(long, default_value_t = 32)]
        nu: u32,
        #[arg(long, default_value_t = 16)]
        nv: u32,
        #[arg(long, default_value_t = 2.0)]
        major_radius: f64,
        #[arg(long, default_value_t = 0.5)]
        minor_radius: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Voxel-slab boundary surface of genus equal to the hole count.
    Slab {
        #[arg(long, default_value_t = 1)]
        scale: i32,
        #[arg(long, default_value_t = 0)]
        holes: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Tubular voxel-frame surface of genus equal to the hole count.
    Frame {
        #[arg(long, default_value_t = 1)]
        scale: i32,
        #[arg(long, default_value_t = 1)]
        holes: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Random connected voxel solid, written as `x y z` lines.
    Blob {
        #[arg(long, default_value_t = 500)]
        cells: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
        Err(_) => {
            eprintln!("internal error: a pipeline invariant was violated (this is a bug)");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Skeletonize(args) => cmd_skeletonize(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Coarsen(args) => cmd_coarsen(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn connectivity(flag: u8) -> Result<Connectivity> {
    match flag {
        6 => Ok(Connectivity::Six),
        26 => Ok(Connectivity::TwentySix),
        other => bail!("--voxel-connectivity must be 6 or 26, got {other}"),
    }
}

/// Loads any supported input and checks it is usable for skeletonization.
fn load_input(path: &Path, conn: Connectivity) -> Result<EmbeddedGraph> {
    let g = io::load_graph(path, conn)
        .with_context(|| format!("cannot load {}", path.display()))?;
    if g.vertex_count() == 0 {
        bail!("{} contains no vertices", path.display());
    }
    Ok(g)
}

fn ensure_unit_capacities(g: &EmbeddedGraph, path: &Path) -> Result<()> {
    if (0..g.vertex_count() as u32).any(|v| g.capacity(v) != 1) {
        bail!(
            "{} carries vertex capacities; skeletonize expects raw inputs (unit capacities)",
            path.display()
        );
    }
    Ok(())
}

fn write_skeleton(path: &Path, format: OutFormat, g: &EmbeddedGraph) -> Result<()> {
    let file = File::create(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    match format {
        OutFormat::Ply => io::write_skeleton_ply(&mut w, g)?,
        OutFormat::Obj => io::write_skeleton_obj(&mut w, g)?,
    }
    w.flush()?;
    Ok(())
}

fn cmd_skeletonize(args: SkeletonizeArgs) -> Result<()> {
    let conn = connectivity(args.voxel_connectivity)?;
    if args.pipeline.alpha == 0 {
        bail!("--alpha must be at least 1");
    }
    if args.pipeline.threads == 0 {
        bail!("--threads must be at least 1");
    }
    let g = load_input(&args.input, conn)?;
    ensure_unit_capacities(&g, &args.input)?;

    let config = args.pipeline.config();
    let (skeleton, report) = multilevel_skeletonize(&g, &config);

    let ext = match args.out_format {
        OutFormat::Ply => "skeleton.ply",
        OutFormat::Obj => "skeleton.obj",
    };
    let out = args.out.unwrap_or_else(|| args.input.with_extension(ext));
    write_skeleton(&out, args.out_format, &skeleton.graph)?;

    let report_path = args.report.unwrap_or_else(|| {
        let mut p = out.as_os_str().to_owned();
        p.push(".report.json");
        PathBuf::from(p)
    });
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&report_path, json)
        .with_context(|| format!("cannot write {}", report_path.display()))?;

    let m = &report.skeleton;
    println!(
        "{}: {} nodes, {} edges, {} leafs, {} branches, genus {}, {} components; \
         {} separators over {} levels in {:.3}s -> {}",
        args.input.display(),
        m.vertices,
        m.edges,
        m.leafs,
        m.branches,
        m.genus_estimate,
        m.components,
        report.separators,
        report.levels.len(),
        report.timings.total,
        out.display()
    );
    Ok(())
}

/// One comparison row: metric deltas are A minus B; distances are directed
/// and normalized by the input's bounding-sphere radius.
#[derive(serde::Serialize)]
struct Comparison {
    input: String,
    dvertices: i64,
    dleafs: i64,
    dbranches: i64,
    dgenus: i64,
    h_ab: f64,
    h_ba: f64,
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let conn = connectivity(args.voxel_connectivity)?;
    let a = load_input(&args.skeleton_a, conn)?;
    let b = load_input(&args.skeleton_b, conn)?;
    let input = load_input(&args.input, conn)?;
    let radius = input.bounding_sphere().radius;
    if radius <= 0.0 {
        bail!("{} is degenerate (zero bounding radius)", args.input.display());
    }
    let (ma, mb) = (skeleton_metrics(&a), skeleton_metrics(&b));
    let row = Comparison {
        input: args.input.display().to_string(),
        dvertices: ma.vertices as i64 - mb.vertices as i64,
        dleafs: ma.leafs as i64 - mb.leafs as i64,
        dbranches: ma.branches as i64 - mb.branches as i64,
        dgenus: ma.genus_estimate as i64 - mb.genus_estimate as i64,
        h_ab: directed_hausdorff(&a, &b, radius),
        h_ba: directed_hausdorff(&b, &a, radius),
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&row).expect("row serializes"));
    } else {
        println!("input,dvertices,dleafs,dbranches,dgenus,h_ab,h_ba");
        println!(
            "{},{},{},{},{},{},{}",
            csv_field(&row.input),
            row.dvertices,
            row.dleafs,
            row.dbranches,
            row.dgenus,
            row.h_ab,
            row.h_ba
        );
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn parse_list<T: std::str::FromStr>(list: &str, what: &str) -> Result<Vec<T>> {
    list.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| anyhow::anyhow!("bad {what} value {t:?}")))
        .collect()
}

const BENCH_HEADER: &str = "input,alpha,dyncon_threshold,vertices,edges,levels,separators,\
coarsen_s,search_s,project_s,pack_s,extract_s,total_s,\
skel_vertices,skel_edges,skel_leafs,skel_branches,skel_components,skel_genus,error";

fn bench_row(input: &Path, alpha_label: &str, threshold: Option<usize>, outcome: &Result<RunReport>) -> String {
    let input = csv_field(&input.display().to_string());
    let threshold = threshold.map_or(String::new(), |t| t.to_string());
    match outcome {
        Ok(report) => {
            let t = &report.timings;
            let m: &SkeletonMetrics = &report.skeleton;
            let top = &report.levels[report.levels.len() - 1];
            format!(
                "{input},{alpha_label},{threshold},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},",
                top.vertices,
                top.edges,
                report.levels.len(),
                report.separators,
                t.coarsen,
                t.search,
                t.project,
                t.pack,
                t.extract,
                t.total,
                m.vertices,
                m.edges,
                m.leafs,
                m.branches,
                m.components,
                m.genus_estimate
            )
        }
        Err(err) => format!(
            "{input},{alpha_label},{threshold},,,,,,,,,,,,,,,,,{}",
            csv_field(&format!("{err:#}"))
        ),
    }
}

/// Runs one configuration three times and keeps the run with the median
/// total time (outputs are deterministic, timings are not).
fn median_of_three(g: &EmbeddedGraph, config: &RunConfig) -> RunReport {
    let mut reports: Vec<RunReport> =
        (0..3).map(|_| multilevel_skeletonize(g, config).1).collect();
    reports.sort_by(|a, b| a.timings.total.total_cmp(&b.timings.total));
    reports.swap_remove(1)
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let conn = connectivity(args.voxel_connectivity)?;
    let alphas: Vec<usize> = parse_list(&args.alphas, "--alphas")?;
    if alphas.iter().any(|&a| a == 0) {
        bail!("--alphas entries must be at least 1");
    }
    let thresholds: Vec<Option<usize>> = match &args.dyncon_thresholds {
        Some(list) => parse_list::<usize>(list, "--dyncon-thresholds")?
            .into_iter()
            .map(Some)
            .collect(),
        None => vec![None],
    };

    let mut files: Vec<PathBuf> = std::fs::read_dir(&args.corpus)
        .with_context(|| format!("cannot read {}", args.corpus.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| matches!(e, "ply" | "obj" | "graph" | "vox" | "xyz"))
        })
        .collect();
    files.sort();

    println!("{BENCH_HEADER}");
    for file in &files {
        let loaded = load_input(file, conn)
            .and_then(|g| ensure_unit_capacities(&g, file).map(|()| g));
        let g = match loaded {
            Ok(g) => g,
            Err(err) => {
                println!("{}", bench_row(file, "", None, &Err(err)));
                continue;
            }
        };
        let base = RunConfig {
            seed: args.seed,
            threads: args.threads,
            refine: args.refine.into(),
            ..RunConfig::default()
        };
        for &alpha in &alphas {
            for &threshold in &thresholds {
                let config = RunConfig { alpha, dyncon_threshold: threshold, ..base.clone() };
                let report = median_of_three(&g, &config);
                println!("{}", bench_row(file, &alpha.to_string(), threshold, &Ok(report)));
            }
        }
        if args.baseline {
            let config = RunConfig { baseline: true, ..base };
            let report = median_of_three(&g, &config);
            println!("{}", bench_row(file, "baseline", None, &Ok(report)));
        }
    }
    Ok(())
}

fn cmd_coarsen(args: CoarsenArgs) -> Result<()> {
    let conn = connectivity(args.voxel_connectivity)?;
    if args.alpha == 0 {
        bail!("--alpha must be at least 1");
    }
    let g = load_input(&args.input, conn)?;
    let hierarchy = mlskel::coarsen::build_hierarchy(&g, args.alpha, args.seed);
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    for (i, level) in hierarchy.levels.iter().enumerate() {
        let path = args.out_dir.join(format!("level_{i:03}.graph"));
        let mut w = BufWriter::new(
            File::create(&path).with_context(|| format!("cannot create {}", path.display()))?,
        );
        io::write_native(&mut w, level)?;
        w.flush()?;
        println!(
            "level {i}: {} vertices, {} edges -> {}",
            level.vertex_count(),
            level.edge_count(),
            path.display()
        );
    }
    if hierarchy.stalled {
        println!("coarsening stalled before reaching {} vertices", args.alpha);
    }
    Ok(())
}

fn write_mesh(common: &GenCommon, mut mesh: synth::TriMesh) -> Result<()> {
    for _ in 0..common.subdivide {
        mesh = mesh.subdivide();
    }
    mesh.smooth(common.smooth);
    if common.jitter > 0.0 {
        use rand::SeedableRng;
        let mut rng = rand::rngs::SmallRng::seed_from_u64(common.seed);
        mesh.jitter(&mut rng, common.jitter);
    }
    let ext = common
        .out
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let file = File::create(&common.out)
        .with_context(|| format!("cannot create {}", common.out.display()))?;
    let mut w = BufWriter::new(file);
    match ext.as_deref() {
        Some("ply") => io::write_mesh_ply(&mut w, &mesh.positions, &mesh.faces)?,
        Some("obj") => io::write_mesh_obj(&mut w, &mesh.positions, &mesh.faces)?,
        _ => bail!("mesh output must end in .ply or .obj"),
    }
    w.flush()?;
    println!(
        "{}: {} vertices, {} faces",
        common.out.display(),
        mesh.vertex_count(),
        mesh.face_count()
    );
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    match args.shape {
        Shape::Sphere { subdivisions, radius, common } => {
            if radius <= 0.0 {
                bail!("--radius must be positive");
            }
            write_mesh(&common, synth::icosphere(subdivisions, radius))
        }
        Shape::Torus { nu, nv, major_radius, minor_radius, common } => {
            if nu < 3 || nv < 3 {
                bail!("--nu and --nv must be at least 3");
            }
            if minor_radius <= 0.0 || major_radius <= minor_radius {
                bail!("need 0 < minor radius < major radius");
            }
            write_mesh(&common, synth::torus(nu, nv, major_radius, minor_radius))
        }
        Shape::Slab { scale, holes, common } => {
            if scale < 1 {
                bail!("--scale must be at least 1");
            }
            if holes > 2 {
                bail!("--holes must be 0, 1, or 2");
            }
            write_mesh(&common, synth::voxel_surface(&synth::slab_cells(scale, holes)))
        }
        Shape::Frame { scale, holes, common } => {
            if scale < 1 {
                bail!("--scale must be at least 1");
            }
            if !(1..=2).contains(&holes) {
                bail!("--holes must be 1 or 2");
            }
            write_mesh(&common, synth::voxel_surface(&synth::frame_cells(scale, holes)))
        }
        Shape::Blob { cells, seed, out } => {
            if cells == 0 {
                bail!("--cells must be at least 1");
            }
            let ext = out.extension().and_then(|e| e.to_str());
            if !matches!(ext, Some("vox") | Some("xyz")) {
                bail!("blob output must end in .vox or .xyz");
            }
            let solid = synth::voxel_blob(seed, cells);
            let file = File::create(&out)
                .with_context(|| format!("cannot create {}", out.display()))?;
            let mut w = BufWriter::new(file);
            io::write_voxels(&mut w, &solid)?;
            w.flush()?;
            println!("{}: {} cells", out.display(), solid.len());
            Ok(())
        }
    }
}
