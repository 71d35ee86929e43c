//! Euler tour forest over an arena of splay-tree nodes.
//!
//! Each spanning tree is stored as its Euler tour: one loop node per vertex
//! and a pair of directed arc nodes per tree edge, ordered by an implicit
//! in-order key. Splaying keeps accesses amortized logarithmic. Nodes carry
//! flag bits with subtree ORs so the connectivity layer can enumerate
//! vertices with incident non-tree edges and tree edges living on a given
//! level without touching the whole tree.

pub const NIL: u32 = u32::MAX;

/// Set on loop nodes whose vertex has at least one non-tree edge stored at
/// this forest's level.
pub const FLAG_NT: u8 = 1;
/// Set on the primary arc of a tree edge whose current level equals this
/// forest's level.
pub const FLAG_TREE: u8 = 2;

#[derive(Debug, Clone)]
struct Node {
    parent: u32,
    child: [u32; 2],
    a: u32,
    b: u32,
    /// Loop nodes in this subtree (tree size in vertices).
    count: u32,
    /// All nodes in this subtree (for in-order position queries).
    total: u32,
    flags: u8,
    agg: u8,
}

impl Node {
    fn is_loop(&self) -> bool {
        self.a == self.b
    }
}

#[derive(Debug, Default)]
pub struct Forest {
    nodes: Vec<Node>,
    free: Vec<u32>,
}

impl Forest {
    fn node(&self, h: u32) -> &Node {
        &self.nodes[h as usize]
    }

    fn node_mut(&mut self, h: u32) -> &mut Node {
        &mut self.nodes[h as usize]
    }

    fn alloc(&mut self, a: u32, b: u32) -> u32 {
        let node = Node {
            parent: NIL,
            child: [NIL, NIL],
            a,
            b,
            count: (a == b) as u32,
            total: 1,
            flags: 0,
            agg: 0,
        };
        match self.free.pop() {
            Some(h) => {
                self.nodes[h as usize] = node;
                h
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        }
    }

    pub fn new_loop(&mut self, v: u32) -> u32 {
        self.alloc(v, v)
    }

    fn new_arc(&mut self, a: u32, b: u32) -> u32 {
        debug_assert_ne!(a, b);
        self.alloc(a, b)
    }

    fn release(&mut self, h: u32) {
        self.free.push(h);
    }

    /// Drops every node; handles become invalid.
    pub fn reset(&mut self) {
        self.nodes.clear();
        self.free.clear();
    }

    pub fn endpoints(&self, arc: u32) -> (u32, u32) {
        let n = self.node(arc);
        (n.a, n.b)
    }

    fn pull(&mut self, h: u32) {
        let [l, r] = self.node(h).child;
        let mut count = self.node(h).is_loop() as u32;
        let mut total = 1;
        let mut agg = self.node(h).flags;
        for c in [l, r] {
            if c != NIL {
                let cn = self.node(c);
                count += cn.count;
                total += cn.total;
                agg |= cn.agg;
            }
        }
        let n = self.node_mut(h);
        n.count = count;
        n.total = total;
        n.agg = agg;
    }

    fn rotate(&mut self, x: u32) {
        let p = self.node(x).parent;
        let g = self.node(p).parent;
        let dir = (self.node(p).child[1] == x) as usize;
        let mid = self.node(x).child[1 - dir];
        self.node_mut(p).child[dir] = mid;
        if mid != NIL {
            self.node_mut(mid).parent = p;
        }
        self.node_mut(x).child[1 - dir] = p;
        self.node_mut(p).parent = x;
        self.node_mut(x).parent = g;
        if g != NIL {
            let gdir = (self.node(g).child[1] == p) as usize;
            self.node_mut(g).child[gdir] = x;
        }
        self.pull(p);
        self.pull(x);
    }

    fn splay(&mut self, x: u32) {
        loop {
            let p = self.node(x).parent;
            if p == NIL {
                return;
            }
            let g = self.node(p).parent;
            if g == NIL {
                self.rotate(x);
            } else if (self.node(g).child[0] == p) == (self.node(p).child[0] == x) {
                self.rotate(p);
                self.rotate(x);
            } else {
                self.rotate(x);
                self.rotate(x);
            }
        }
    }

    /// Number of vertices in the tree containing `h`.
    pub fn tree_size(&mut self, h: u32) -> u32 {
        self.splay(h);
        self.node(h).count
    }

    /// Whether two handles live in the same tree.
    pub fn same_tree(&mut self, x: u32, y: u32) -> bool {
        if x == y {
            return true;
        }
        self.splay(x);
        self.splay(y);
        self.node(x).parent != NIL
    }

    /// In-order position of `h` within its tour.
    fn position(&mut self, h: u32) -> u32 {
        self.splay(h);
        let l = self.node(h).child[0];
        if l == NIL {
            0
        } else {
            self.node(l).total
        }
    }

    /// Concatenates two tours; the arguments may be any handles inside their
    /// (distinct) trees.
    fn join(&mut self, l: u32, r: u32) -> u32 {
        if l == NIL {
            return r;
        }
        if r == NIL {
            return l;
        }
        self.splay(l);
        let mut m = l;
        while self.node(m).child[1] != NIL {
            m = self.node(m).child[1];
        }
        self.splay(m);
        self.splay(r);
        self.node_mut(m).child[1] = r;
        self.node_mut(r).parent = m;
        self.pull(m);
        m
    }

    /// Splits into (everything before `x`, tree rooted at `x`).
    fn split_before(&mut self, x: u32) -> (u32, u32) {
        self.splay(x);
        let l = self.node(x).child[0];
        if l != NIL {
            self.node_mut(l).parent = NIL;
            self.node_mut(x).child[0] = NIL;
            self.pull(x);
        }
        (l, x)
    }

    /// Splits into (tree rooted at `x`, everything after `x`).
    fn split_after(&mut self, x: u32) -> (u32, u32) {
        self.splay(x);
        let r = self.node(x).child[1];
        if r != NIL {
            self.node_mut(r).parent = NIL;
            self.node_mut(x).child[1] = NIL;
            self.pull(x);
        }
        (x, r)
    }

    /// Rotates the tour so it starts at `x`.
    fn reroot(&mut self, x: u32) {
        let (l, r) = self.split_before(x);
        self.join(r, l);
    }

    /// Links the trees containing loop nodes `lu` and `lv` with a tree edge,
    /// returning the two new arc handles `(arc_uv, arc_vu)`. The trees must
    /// be distinct.
    pub fn link(&mut self, lu: u32, lv: u32) -> (u32, u32) {
        debug_assert!(!self.same_tree(lu, lv));
        let (u, v) = (self.node(lu).a, self.node(lv).a);
        let auv = self.new_arc(u, v);
        let avu = self.new_arc(v, u);
        self.reroot(lu);
        self.reroot(lv);
        self.splay(lu);
        let t = self.join(lu, auv);
        let t = self.join(t, lv);
        self.join(t, avu);
        (auv, avu)
    }

    /// Removes the tree edge represented by the arc pair, splitting one tree
    /// into two. Frees both arc handles.
    pub fn cut(&mut self, arc1: u32, arc2: u32) {
        let (first, second) = if self.position(arc1) < self.position(arc2) {
            (arc1, arc2)
        } else {
            (arc2, arc1)
        };
        let (before, _) = self.split_before(first);
        let (_, after) = self.split_after(second);
        // first is now leftmost and second rightmost of the remaining tree.
        self.splay(first);
        debug_assert_eq!(self.node(first).child[0], NIL);
        let rest = self.node(first).child[1];
        if rest != NIL {
            self.node_mut(rest).parent = NIL;
            self.node_mut(first).child[1] = NIL;
        }
        self.splay(second);
        debug_assert_eq!(self.node(second).child[1], NIL);
        let inner = self.node(second).child[0];
        if inner != NIL {
            self.node_mut(inner).parent = NIL;
            self.node_mut(second).child[0] = NIL;
        }
        self.release(first);
        self.release(second);
        self.join(before, after);
    }

    /// Sets or clears a flag bit on a node and fixes aggregates.
    pub fn set_flag(&mut self, h: u32, bit: u8, on: bool) {
        self.splay(h);
        let n = self.node_mut(h);
        if on {
            n.flags |= bit;
        } else {
            n.flags &= !bit;
        }
        self.pull(h);
    }

    /// Collects every node in `h`'s tree whose own flags contain `bit`.
    pub fn collect_flagged(&mut self, h: u32, bit: u8, out: &mut Vec<u32>) {
        self.splay(h);
        let mut stack = vec![h];
        while let Some(x) = stack.pop() {
            if self.node(x).agg & bit == 0 {
                continue;
            }
            if self.node(x).flags & bit != 0 {
                out.push(x);
            }
            for c in self.node(x).child {
                if c != NIL {
                    stack.push(c);
                }
            }
        }
    }
}
