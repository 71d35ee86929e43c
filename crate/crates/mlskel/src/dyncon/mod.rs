//! Fully dynamic connectivity for the separator search front.
//!
//! The structure keeps a hierarchy of Euler tour forests. Every edge lives
//! on a level; level-0 forests span all present edges, and a forest at level
//! `i` spans the edges of level `>= i`. Deleting a tree edge searches the
//! affected levels for a replacement among same-level non-tree edges,
//! promoting scanned edges upward so repeated searches stay cheap.
//!
//! Promotion only happens while the smaller split side has at least
//! `level_threshold` vertices. The default threshold equals the vertex
//! count, which disables promotion entirely and collapses the hierarchy to
//! a single augmented Euler tour forest — the fastest configuration for the
//! small, short-lived fronts this crate maintains. A threshold of 1 gives
//! the classic fully hierarchical behaviour with its O(log^2 n) amortized
//! updates.
//!
//! Instances are not thread-safe; each in-flight separator search owns one.
//! Because the structure always counts all `n` vertices, callers tracking a
//! subset (such as a search front) subtract the singletons they do not care
//! about from [`DynamicConnectivity::number_of_components`].

mod forest;

use std::collections::HashMap;

use forest::{Forest, FLAG_NT, FLAG_TREE, NIL};

fn edge_key(u: u32, v: u32) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    ((a as u64) << 32) | b as u64
}

#[derive(Debug)]
enum EdgeState {
    /// Forest arcs per level `0..=level`.
    Tree { level: usize, arcs: Vec<(u32, u32)> },
    NonTree { level: usize },
}

#[derive(Debug, Default)]
struct LevelForest {
    forest: Forest,
    /// Loop node per vertex, `NIL` when the vertex is absent at this level.
    loop_node: Vec<u32>,
    /// Non-tree neighbours stored at this level.
    nt_adj: Vec<Vec<u32>>,
    /// Vertices with any state at this level, for cheap clearing.
    touched: Vec<u32>,
}

impl LevelForest {
    fn with_capacity(n: usize) -> LevelForest {
        LevelForest {
            forest: Forest::default(),
            loop_node: vec![NIL; n],
            nt_adj: vec![Vec::new(); n],
            touched: Vec::new(),
        }
    }

    fn loop_of(&mut self, v: u32) -> u32 {
        let h = self.loop_node[v as usize];
        if h != NIL {
            return h;
        }
        let h = self.forest.new_loop(v);
        self.loop_node[v as usize] = h;
        self.touched.push(v);
        h
    }

    fn clear(&mut self) {
        for &v in &self.touched {
            self.loop_node[v as usize] = NIL;
            self.nt_adj[v as usize].clear();
        }
        self.touched.clear();
        self.forest.reset();
    }

    /// Records a non-tree neighbour and maintains the vertex flag.
    fn nt_add(&mut self, x: u32, y: u32) {
        let lx = self.loop_of(x);
        self.nt_adj[x as usize].push(y);
        if self.nt_adj[x as usize].len() == 1 {
            self.forest.set_flag(lx, FLAG_NT, true);
        }
    }

    fn nt_remove(&mut self, x: u32, y: u32) {
        let list = &mut self.nt_adj[x as usize];
        let pos = list.iter().position(|&w| w == y).expect("non-tree neighbour missing");
        list.swap_remove(pos);
        if list.is_empty() {
            let lx = self.loop_node[x as usize];
            self.forest.set_flag(lx, FLAG_NT, false);
        }
    }
}

/// Fully dynamic connectivity over vertices `0..n`.
pub struct DynamicConnectivity {
    n: usize,
    level_threshold: usize,
    levels: Vec<LevelForest>,
    edges: HashMap<u64, EdgeState>,
    tree_edge_count: usize,
}

impl DynamicConnectivity {
    /// An empty (edgeless) structure on `n` vertices with the default level
    /// threshold of `n`: a single augmented Euler tour forest.
    pub fn new(n: usize) -> DynamicConnectivity {
        DynamicConnectivity::with_threshold(n, n)
    }

    /// As [`DynamicConnectivity::new`] with an explicit promotion threshold.
    /// Replacement searches promote edges only while the smaller side of the
    /// split tree has at least `level_threshold` vertices.
    pub fn with_threshold(n: usize, level_threshold: usize) -> DynamicConnectivity {
        DynamicConnectivity {
            n,
            level_threshold,
            levels: vec![LevelForest::with_capacity(n)],
            edges: HashMap::new(),
            tree_edge_count: 0,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of connected components, counting isolated vertices.
    pub fn number_of_components(&self) -> usize {
        self.n - self.tree_edge_count
    }

    /// Whether an edge is currently present.
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.edges.contains_key(&edge_key(u, v))
    }

    fn check_pair(&self, u: u32, v: u32) {
        assert!((u as usize) < self.n && (v as usize) < self.n, "vertex out of range");
        assert_ne!(u, v, "self-loops are not supported");
    }

    /// Whether `u` and `v` are in the same component. Splay trees
    /// self-adjust on lookup, hence `&mut`.
    pub fn connected(&mut self, u: u32, v: u32) -> bool {
        assert!((u as usize) < self.n && (v as usize) < self.n, "vertex out of range");
        if u == v {
            return true;
        }
        let lu = self.levels[0].loop_node[u as usize];
        let lv = self.levels[0].loop_node[v as usize];
        if lu == NIL || lv == NIL {
            return false;
        }
        self.levels[0].forest.same_tree(lu, lv)
    }

    /// Inserts an edge. Inserting a present edge is a no-op.
    pub fn connect(&mut self, u: u32, v: u32) {
        self.check_pair(u, v);
        let key = edge_key(u, v);
        if self.edges.contains_key(&key) {
            return;
        }
        if self.connected(u, v) {
            self.levels[0].nt_add(u, v);
            self.levels[0].nt_add(v, u);
            self.edges.insert(key, EdgeState::NonTree { level: 0 });
        } else {
            let arcs = self.link_at(0, u, v);
            self.levels[0].forest.set_flag(arcs.0, FLAG_TREE, true);
            self.edges.insert(key, EdgeState::Tree { level: 0, arcs: vec![arcs] });
            self.tree_edge_count += 1;
        }
    }

    fn link_at(&mut self, level: usize, u: u32, v: u32) -> (u32, u32) {
        let lf = &mut self.levels[level];
        let lu = lf.loop_of(u);
        let lv = lf.loop_of(v);
        lf.forest.link(lu, lv)
    }

    /// Removes an edge. Removing an absent edge is a contract violation.
    pub fn remove(&mut self, u: u32, v: u32) {
        self.check_pair(u, v);
        let key = edge_key(u, v);
        let state = self.edges.remove(&key).expect("removing an edge that is not present");
        match state {
            EdgeState::NonTree { level } => {
                self.levels[level].nt_remove(u, v);
                self.levels[level].nt_remove(v, u);
            }
            EdgeState::Tree { level, arcs } => {
                for (i, &(a1, a2)) in arcs.iter().enumerate() {
                    self.levels[i].forest.cut(a1, a2);
                }
                self.tree_edge_count -= 1;
                for i in (0..=level).rev() {
                    if let Some((x, y)) = self.replacement_at(i, u, v) {
                        let mut arcs = Vec::with_capacity(i + 1);
                        for f in 0..=i {
                            arcs.push(self.link_at(f, x, y));
                        }
                        self.levels[i].forest.set_flag(arcs[i].0, FLAG_TREE, true);
                        self.edges.insert(edge_key(x, y), EdgeState::Tree { level: i, arcs });
                        self.tree_edge_count += 1;
                        return;
                    }
                }
            }
        }
    }

    /// Searches level `i` for a non-tree edge reconnecting the two trees
    /// left by a cut between `u` and `v`. Promotes scanned edges to level
    /// `i + 1` when the smaller tree is at least `level_threshold` large.
    /// On success the replacement edge has already been removed from the
    /// non-tree registry.
    fn replacement_at(&mut self, i: usize, u: u32, v: u32) -> Option<(u32, u32)> {
        let lf = &mut self.levels[i];
        let lu = lf.loop_node[u as usize];
        let lv = lf.loop_node[v as usize];
        debug_assert!(lu != NIL && lv != NIL);
        let su = lf.forest.tree_size(lu);
        let sv = lf.forest.tree_size(lv);
        let (small, small_size) = if su <= sv { (u, su) } else { (v, sv) };
        let big = if su <= sv { v } else { u };
        let promote = (small_size as usize) >= self.level_threshold;

        if promote {
            self.ensure_level(i + 1);
            // Raise the smaller tree's level-i tree edges so the next level
            // spans it, then the scanned non-tree edges may follow.
            let mut arcs = Vec::new();
            let small_loop = self.levels[i].loop_node[small as usize];
            self.levels[i].forest.collect_flagged(small_loop, FLAG_TREE, &mut arcs);
            for h in arcs {
                let (a, b) = self.levels[i].forest.endpoints(h);
                self.levels[i].forest.set_flag(h, FLAG_TREE, false);
                let new_arcs = self.link_at(i + 1, a, b);
                self.levels[i + 1].forest.set_flag(new_arcs.0, FLAG_TREE, true);
                match self.edges.get_mut(&edge_key(a, b)) {
                    Some(EdgeState::Tree { level, arcs }) => {
                        debug_assert_eq!(*level, i);
                        *level = i + 1;
                        arcs.push(new_arcs);
                    }
                    _ => unreachable!("flagged arc without a tree edge"),
                }
            }
        }

        let mut flagged = Vec::new();
        let small_loop = self.levels[i].loop_node[small as usize];
        self.levels[i].forest.collect_flagged(small_loop, FLAG_NT, &mut flagged);
        let mut candidates: Vec<(u32, u32)> = Vec::new();
        for h in flagged {
            let (x, _) = self.levels[i].forest.endpoints(h);
            for &y in &self.levels[i].nt_adj[x as usize] {
                candidates.push((x, y));
            }
        }
        for (x, y) in candidates {
            // The edge may already have moved when seen from both endpoints.
            match self.edges.get(&edge_key(x, y)) {
                Some(EdgeState::NonTree { level }) if *level == i => {}
                _ => continue,
            }
            let lf = &mut self.levels[i];
            let ly = lf.loop_node[y as usize];
            let lbig = lf.loop_node[big as usize];
            debug_assert!(ly != NIL && lbig != NIL);
            if lf.forest.same_tree(ly, lbig) {
                lf.nt_remove(x, y);
                lf.nt_remove(y, x);
                return Some((x, y));
            }
            if promote {
                lf.nt_remove(x, y);
                lf.nt_remove(y, x);
                let next = &mut self.levels[i + 1];
                next.nt_add(x, y);
                next.nt_add(y, x);
                match self.edges.get_mut(&edge_key(x, y)) {
                    Some(EdgeState::NonTree { level }) => *level = i + 1,
                    _ => unreachable!(),
                }
            }
        }
        None
    }

    fn ensure_level(&mut self, i: usize) {
        while self.levels.len() <= i {
            self.levels.push(LevelForest::with_capacity(self.n));
        }
    }

    /// Drops all edges, returning every vertex to a singleton. Keeps the
    /// allocated capacity, so a pooled instance resets in time proportional
    /// to what the previous use touched.
    pub fn clear(&mut self) {
        for lf in &mut self.levels {
            lf.clear();
        }
        self.edges.clear();
        self.tree_edge_count = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};
    use std::collections::HashSet;

    #[test]
    fn singletons_then_chain() {
        let mut dc = DynamicConnectivity::new(5);
        assert_eq!(dc.number_of_components(), 5);
        dc.connect(0, 1);
        dc.connect(1, 2);
        dc.connect(3, 4);
        assert_eq!(dc.number_of_components(), 2);
        assert!(dc.connected(0, 2));
        assert!(!dc.connected(2, 3));
        dc.remove(1, 2);
        assert_eq!(dc.number_of_components(), 3);
        assert!(!dc.connected(0, 2));
    }

    #[test]
    fn cycle_edge_removal_keeps_connectivity() {
        let mut dc = DynamicConnectivity::new(4);
        for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            dc.connect(u, v);
        }
        assert_eq!(dc.number_of_components(), 1);
        dc.remove(0, 1);
        assert_eq!(dc.number_of_components(), 1);
        assert!(dc.connected(0, 1));
        dc.remove(2, 3);
        assert_eq!(dc.number_of_components(), 2);
        assert!(dc.connected(0, 3));
        assert!(dc.connected(1, 2));
        assert!(!dc.connected(0, 2));
    }

    #[test]
    fn insert_is_idempotent() {
        let mut dc = DynamicConnectivity::new(3);
        dc.connect(0, 1);
        dc.connect(0, 1);
        dc.connect(1, 0);
        assert_eq!(dc.number_of_components(), 2);
        dc.remove(0, 1);
        assert_eq!(dc.number_of_components(), 3);
        assert!(!dc.has_edge(0, 1));
    }

    #[test]
    #[should_panic(expected = "not present")]
    fn removing_absent_edge_panics() {
        let mut dc = DynamicConnectivity::new(3);
        dc.connect(0, 1);
        dc.remove(0, 1);
        dc.remove(0, 1);
    }

    #[test]
    #[should_panic(expected = "self-loops")]
    fn self_loop_panics() {
        DynamicConnectivity::new(3).connect(1, 1);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn out_of_range_panics() {
        DynamicConnectivity::new(3).connect(0, 3);
    }

    #[test]
    fn star_collapse() {
        let mut dc = DynamicConnectivity::new(6);
        for v in 1..6 {
            dc.connect(0, v);
        }
        assert_eq!(dc.number_of_components(), 1);
        for v in 1..6 {
            dc.remove(0, v);
        }
        assert_eq!(dc.number_of_components(), 6);
    }

    #[test]
    fn clear_resets_to_singletons() {
        let mut dc = DynamicConnectivity::new(8);
        for v in 1..8 {
            dc.connect(v - 1, v);
        }
        dc.connect(0, 7);
        dc.clear();
        assert_eq!(dc.number_of_components(), 8);
        assert!(!dc.connected(0, 1));
        dc.connect(2, 5);
        assert!(dc.connected(2, 5));
        assert_eq!(dc.number_of_components(), 7);
    }

    /// Reference implementation: adjacency sets plus BFS.
    struct NaiveConnectivity {
        adj: Vec<HashSet<u32>>,
    }

    impl NaiveConnectivity {
        fn new(n: usize) -> NaiveConnectivity {
            NaiveConnectivity { adj: vec![HashSet::new(); n] }
        }

        fn components(&self) -> usize {
            let n = self.adj.len();
            let mut seen = vec![false; n];
            let mut count = 0;
            for s in 0..n {
                if seen[s] {
                    continue;
                }
                count += 1;
                seen[s] = true;
                let mut stack = vec![s as u32];
                while let Some(v) = stack.pop() {
                    for &w in &self.adj[v as usize] {
                        if !seen[w as usize] {
                            seen[w as usize] = true;
                            stack.push(w);
                        }
                    }
                }
            }
            count
        }

        fn connected(&self, u: u32, v: u32) -> bool {
            let mut seen = HashSet::new();
            let mut stack = vec![u];
            seen.insert(u);
            while let Some(x) = stack.pop() {
                if x == v {
                    return true;
                }
                for &w in &self.adj[x as usize] {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            false
        }
    }

    fn random_trace(seed: u64, n: usize, ops: usize, threshold: usize) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let mut dc = DynamicConnectivity::with_threshold(n, threshold);
        let mut naive = NaiveConnectivity::new(n);
        let mut present: Vec<(u32, u32)> = Vec::new();
        for step in 0..ops {
            let remove = !present.is_empty() && rng.random_bool(0.45);
            if remove {
                let k = rng.random_range(0..present.len());
                let (u, v) = present.swap_remove(k);
                dc.remove(u, v);
                naive.adj[u as usize].remove(&v);
                naive.adj[v as usize].remove(&u);
            } else {
                let u = rng.random_range(0..n as u32);
                let v = rng.random_range(0..n as u32);
                if u == v {
                    continue;
                }
                if !naive.adj[u as usize].contains(&v) {
                    present.push((u.min(v), u.max(v)));
                }
                dc.connect(u, v);
                naive.adj[u as usize].insert(v);
                naive.adj[v as usize].insert(u);
            }
            assert_eq!(
                dc.number_of_components(),
                naive.components(),
                "component mismatch at step {step} (threshold {threshold})"
            );
            let a = rng.random_range(0..n as u32);
            let b = rng.random_range(0..n as u32);
            assert_eq!(dc.connected(a, b), naive.connected(a, b), "pair mismatch at step {step}");
        }
    }

    #[test]
    fn random_traces_match_oracle() {
        for seed in 0..4 {
            random_trace(seed, 40, 800, 40);
            random_trace(seed, 40, 800, 1);
            random_trace(seed + 100, 7, 500, 2);
        }
    }

    #[test]
    fn threshold_settings_agree() {
        let n = 50;
        let mut rng = SmallRng::seed_from_u64(42);
        let mut structures: Vec<DynamicConnectivity> = [1usize, 4, 16, n]
            .iter()
            .map(|&t| DynamicConnectivity::with_threshold(n, t))
            .collect();
        let mut present: Vec<(u32, u32)> = Vec::new();
        let mut seen = HashSet::new();
        for _ in 0..1500 {
            if !present.is_empty() && rng.random_bool(0.45) {
                let k = rng.random_range(0..present.len());
                let (u, v) = present.swap_remove(k);
                seen.remove(&(u, v));
                for dc in &mut structures {
                    dc.remove(u, v);
                }
            } else {
                let u = rng.random_range(0..n as u32);
                let v = rng.random_range(0..n as u32);
                if u == v {
                    continue;
                }
                if seen.insert((u.min(v), u.max(v))) {
                    present.push((u.min(v), u.max(v)));
                }
                for dc in &mut structures {
                    dc.connect(u, v);
                }
            }
            let reference = structures[0].number_of_components();
            for dc in &mut structures[1..] {
                assert_eq!(dc.number_of_components(), reference);
            }
        }
    }
}
