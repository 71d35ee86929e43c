//! The multilevel driver: orchestrates coarsening, per-level separator
//! search, projection, refinement, duplicate filtering, capacity packing,
//! and final skeleton extraction.
//!
//! Levels are processed coarsest-first. On each level the surviving pool is
//! projected down and re-minimised, then new searches start from a sampled
//! subset of vertices: a vertex contained in `x` pool separators starts a
//! search with probability `2^-x`, so already-covered regions quiet down.
//! Sampling decisions, search-result merges, and packing all follow fixed
//! deterministic orders, which makes a run a pure function of the input,
//! the seed, and the configured worker count. Worker count matters because
//! sampling is batched in ticks of one vertex per worker: a tick's
//! decisions see the pool as of the tick start, and its results merge in
//! sample order before the next tick begins.

use std::collections::HashSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coarsen::{build_hierarchy, ContractionRecord, LevelHierarchy};
use crate::graph::{self, EmbeddedGraph, VertexId};
use crate::parallel;
use crate::separator::{
    restricted_separator_search, shrink_separator, thicken_separator, SearchScratch, Separator,
};
use crate::skeleton::{extract_skeleton, Skeleton, SkeletonMetrics};
use crate::vec3::Vec3;

/// How projected separators are re-minimised after landing on a finer level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineMode {
    /// Shrink the projected separator back to minimality.
    ShrinkOnly,
    /// Thicken first, then shrink; slower but tends to find shorter cuts.
    ThickenThenShrink,
}

/// Pipeline configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Coarsening target size and per-search absorption budget.
    pub alpha: usize,
    pub seed: u64,
    /// Worker count; also the sampling tick width, so it is part of the
    /// run's identity: outputs are reproducible per (seed, threads).
    pub threads: usize,
    pub refine: RefineMode,
    /// Skip coarsening and search every vertex of the input with an
    /// unrestricted budget.
    pub baseline: bool,
    /// Override the promotion threshold of the search connectivity
    /// structure (`None` keeps the single-level default).
    pub dyncon_threshold: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            alpha: 64,
            seed: 0,
            threads: 1,
            refine: RefineMode::ShrinkOnly,
            baseline: false,
            dyncon_threshold: None,
        }
    }
}

/// Per-level counters for the run report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: usize,
    pub vertices: usize,
    pub edges: usize,
    /// Pool separators that arrived by projection from the coarser level.
    pub projected: usize,
    /// Projected separators discarded because contraction artifacts
    /// destroyed validity.
    pub refine_failures: usize,
    /// Sampled start vertices (searches attempted).
    pub searched: usize,
    /// Successful searches merged into the pool.
    pub found: usize,
    /// Pool entries removed as exact duplicates.
    pub deduped: usize,
    /// Pool size after capacity packing.
    pub packed: usize,
}

/// Wall-clock seconds per pipeline phase.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub coarsen: f64,
    pub search: f64,
    pub project: f64,
    pub pack: f64,
    pub extract: f64,
    pub total: f64,
}

/// Everything a run reports besides the skeleton itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    /// Stats in processing order: coarsest level first.
    pub levels: Vec<LevelStats>,
    pub timings: PhaseTimings,
    /// Final packed separator count on the input graph.
    pub separators: usize,
    pub skeleton: SkeletonMetrics,
}

/// Lifts a separator one level down by expanding every member into the fine
/// vertices it was contracted from. Footprint is conserved; validity on the
/// finer graph is not guaranteed.
pub fn project_separator(record: &ContractionRecord, sep: &Separator) -> Separator {
    assert!(sep.level > 0, "level-0 separators cannot be projected");
    Separator {
        level: sep.level - 1,
        members: record.expand(&sep.members),
        footprint: sep.footprint,
        guide: sep.guide,
    }
}

/// Re-minimises a projected separator on its new level. Returns `None` when
/// the projected set no longer separates; the set must still be connected
/// (projection guarantees this, so a violation panics).
///
/// The guide is re-centred on the projected members' capacity-weighted
/// barycenter before minimising: the sphere center inherited from a coarse
/// search drifts away from the set it produced after a few projections, and
/// erosion toward a stale center leaves wavy, poorly packed separators.
pub fn refine_separator(
    g: &EmbeddedGraph,
    sep: &Separator,
    mode: RefineMode,
) -> Option<Separator> {
    assert!(
        graph::is_connected_set(g, &sep.members),
        "projected separator must be connected"
    );
    if !graph::separates(g, &sep.members) {
        return None;
    }
    let mut weighted = Vec3::ZERO;
    let mut total = 0.0;
    for &v in &sep.members {
        let w = g.capacity(v) as f64;
        weighted = weighted + g.position(v) * w;
        total += w;
    }
    let recentred = Separator { guide: weighted / total, ..sep.clone() };
    let grown = match mode {
        RefineMode::ThickenThenShrink => thicken_separator(g, &recentred),
        RefineMode::ShrinkOnly => recentred,
    };
    Some(shrink_separator(g, &grown))
}

/// Drops exact duplicates (set equality on members), keeping the first
/// occurrence in pool order. Returns the number removed.
pub fn dedup_filter(pool: &mut Vec<Separator>) -> usize {
    let before = pool.len();
    let mut seen: HashSet<Vec<VertexId>> = HashSet::with_capacity(pool.len());
    pool.retain(|s| seen.insert(s.members.clone()));
    before - pool.len()
}

/// Greedy packing under vertex capacities: separators are scanned by
/// ascending footprint (ties by lexicographically smallest member set) and
/// accepted only if no member vertex would exceed its capacity. On a
/// unit-capacity graph the accepted separators are pairwise disjoint.
pub fn capacity_pack(g: &EmbeddedGraph, pool: Vec<Separator>) -> Vec<Separator> {
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| {
        (pool[a].footprint, &pool[a].members).cmp(&(pool[b].footprint, &pool[b].members))
    });
    let mut usage = vec![0u64; g.vertex_count()];
    let mut accepted = Vec::new();
    for idx in order {
        let sep = &pool[idx];
        if sep.members.iter().all(|&v| usage[v as usize] < g.capacity(v)) {
            for &v in &sep.members {
                usage[v as usize] += 1;
            }
            accepted.push(sep.clone());
        }
    }
    accepted
}

/// Seeded visit order plus one uniform draw per visit slot. Sampling
/// decisions compare a slot's draw against `2^-x` for whatever `x` is
/// current when the slot is reached.
fn sample_plan(n: usize, rng: &mut impl Rng) -> (Vec<VertexId>, Vec<f64>) {
    let mut order: Vec<VertexId> = (0..n as u32).collect();
    order.shuffle(rng);
    let draws = (0..n).map(|_| rng.random::<f64>()).collect();
    (order, draws)
}

fn accepts(draw: f64, in_pool: u32) -> bool {
    draw < (-(in_pool as f64)).exp2()
}

/// Visits every vertex in seeded random order and keeps it with
/// probability `2^-x`, where `x` counts the pool separators containing it.
/// The returned list preserves visit order.
pub fn sample_start_vertices(
    g: &EmbeddedGraph,
    pool: &[Separator],
    rng: &mut impl Rng,
) -> Vec<VertexId> {
    let mut in_pool = vec![0u32; g.vertex_count()];
    for sep in pool {
        for &v in &sep.members {
            in_pool[v as usize] += 1;
        }
    }
    let (order, draws) = sample_plan(g.vertex_count(), rng);
    order
        .into_iter()
        .zip(draws)
        .filter(|&(v, d)| accepts(d, in_pool[v as usize]))
        .map(|(v, _)| v)
        .collect()
}

fn make_scratch(g: &EmbeddedGraph, threshold: Option<usize>) -> SearchScratch {
    match threshold {
        Some(t) => SearchScratch::with_threshold(g, t),
        None => SearchScratch::new(g),
    }
}

/// Runs the sampled searches of one level, merging successes into the pool
/// in sample order. Returns (searched, found).
fn run_level_searches(
    g: &EmbeddedGraph,
    pool: &mut Vec<Separator>,
    level: usize,
    budget: usize,
    config: &RunConfig,
) -> (usize, usize) {
    let n = g.vertex_count();
    let mut rng = crate::stream_rng(config.seed, crate::STREAM_SAMPLE, level as u64);
    let (order, draws) = sample_plan(n, &mut rng);

    let mut in_pool = vec![0u32; n];
    for sep in pool.iter() {
        for &v in &sep.members {
            in_pool[v as usize] += 1;
        }
    }

    let mut scratches: Vec<SearchScratch> = (0..config.threads)
        .map(|_| make_scratch(g, config.dyncon_threshold))
        .collect();

    let mut searched = 0;
    let mut found = 0;
    let mut starts: Vec<VertexId> = Vec::with_capacity(config.threads);
    for tick in 0..n.div_ceil(config.threads) {
        let base = tick * config.threads;
        starts.clear();
        for slot in base..(base + config.threads).min(n) {
            let v = order[slot];
            if accepts(draws[slot], in_pool[v as usize]) {
                starts.push(v);
            }
        }
        searched += starts.len();
        let results = parallel::zip_map_collect(&mut scratches, &starts, |scratch, &v0| {
            restricted_separator_search(g, v0, budget, scratch)
                .map(|raw| shrink_separator(g, &raw))
        });
        for sep in results.into_iter().flatten() {
            let mut sep = sep;
            sep.level = level as u32;
            for &v in &sep.members {
                in_pool[v as usize] += 1;
            }
            pool.push(sep);
            found += 1;
        }
    }
    (searched, found)
}

/// Projects the pool one level down and re-minimises each entry, using at
/// most two workers. Returns the surviving separators (prior pool order)
/// and the number discarded.
fn project_and_refine(
    g: &EmbeddedGraph,
    record: &ContractionRecord,
    pool: Vec<Separator>,
    mode: RefineMode,
) -> (Vec<Separator>, usize) {
    let projected: Vec<Separator> =
        pool.iter().map(|s| project_separator(record, s)).collect();
    let refine_all = |part: &[Separator]| -> Vec<Option<Separator>> {
        part.iter().map(|s| refine_separator(g, s, mode)).collect()
    };
    let mid = projected.len() / 2;
    let (lo, hi) = parallel::join(
        || refine_all(&projected[..mid]),
        || refine_all(&projected[mid..]),
    );
    let mut survivors = Vec::with_capacity(projected.len());
    let mut failures = 0;
    for item in lo.into_iter().chain(hi) {
        match item {
            Some(sep) => survivors.push(sep),
            None => failures += 1,
        }
    }
    (survivors, failures)
}

/// Runs the full pipeline and returns the skeleton with its run report.
///
/// The input must be non-empty with unit vertex capacities (every mesh and
/// voxel loader produces such graphs); packing relies on unit capacities to
/// make the final separators disjoint.
pub fn multilevel_skeletonize(g: &EmbeddedGraph, config: &RunConfig) -> (Skeleton, RunReport) {
    assert!(config.alpha >= 1, "alpha must be positive");
    assert!(config.threads >= 1, "worker count must be positive");
    assert!(g.vertex_count() > 0, "cannot skeletonize an empty graph");
    assert!(
        (0..g.vertex_count() as u32).all(|v| g.capacity(v) == 1),
        "skeletonization expects unit input capacities"
    );
    parallel::run_with_threads(config.threads, || skeletonize_in_pool(g, config))
}

fn skeletonize_in_pool(g: &EmbeddedGraph, config: &RunConfig) -> (Skeleton, RunReport) {
    let total_start = Instant::now();
    let mut timings = PhaseTimings::default();

    let coarsen_start = Instant::now();
    let hierarchy = if config.baseline {
        LevelHierarchy { levels: vec![g.clone()], records: Vec::new(), stalled: false }
    } else {
        build_hierarchy(g, config.alpha, config.seed)
    };
    timings.coarsen = coarsen_start.elapsed().as_secs_f64();

    let mut pool: Vec<Separator> = Vec::new();
    let mut levels = Vec::with_capacity(hierarchy.len());
    for level in (0..hierarchy.len()).rev() {
        let level_graph = &hierarchy.levels[level];
        let mut stats = LevelStats {
            level,
            vertices: level_graph.vertex_count(),
            edges: level_graph.edge_count(),
            projected: 0,
            refine_failures: 0,
            searched: 0,
            found: 0,
            deduped: 0,
            packed: 0,
        };

        if level + 1 < hierarchy.len() {
            let project_start = Instant::now();
            let record = &hierarchy.records[level];
            let (survivors, failures) =
                project_and_refine(level_graph, record, pool, config.refine);
            pool = survivors;
            stats.projected = pool.len();
            stats.refine_failures = failures;
            timings.project += project_start.elapsed().as_secs_f64();
        }

        let search_start = Instant::now();
        let budget = if config.baseline { level_graph.vertex_count() } else { config.alpha };
        let (searched, found) =
            run_level_searches(level_graph, &mut pool, level, budget, config);
        stats.searched = searched;
        stats.found = found;
        timings.search += search_start.elapsed().as_secs_f64();

        let pack_start = Instant::now();
        stats.deduped = dedup_filter(&mut pool);
        pool = capacity_pack(level_graph, std::mem::take(&mut pool));
        stats.packed = pool.len();
        timings.pack += pack_start.elapsed().as_secs_f64();

        levels.push(stats);
    }

    if std::env::var("DUMP_SEPS").is_ok() {
        for (i, sep) in pool.iter().enumerate() {
            eprintln!("sep {i}: {:?}", sep.members);
        }
    }
    let extract_start = Instant::now();
    let skeleton = extract_skeleton(g, &pool);
    timings.extract = extract_start.elapsed().as_secs_f64();
    timings.total = total_start.elapsed().as_secs_f64();

    let report = RunReport {
        config: config.clone(),
        levels,
        timings,
        separators: pool.len(),
        skeleton: skeleton.metrics(),
    };
    (skeleton, report)
}
