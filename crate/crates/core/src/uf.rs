//! The union-find decoding heuristic.
//!
//! Clusters are trees of a disjoint-set forest over the Tanner-graph vertices
//! (weighted union, path compression). Each root carries the list of cluster
//! vertices that still have a neighbour outside the cluster; growth only
//! expands from that list, and the list is refreshed incrementally after each
//! step. Validity is decided by a peeling pass over the cluster interior
//! instead of Gaussian elimination, so a cluster can be reported invalid even
//! though a local correction exists.
//!
//! One iteration of the main loop:
//!
//! 1. re-check validity of the clusters touched in the last step,
//! 2. pick the clusters to grow and grow them from their boundary lists,
//! 3. union clusters that touched,
//! 4. refresh the boundary lists of the surviving roots that changed.
//!
//! When no invalid cluster can grow any more, the cached peeling estimates of
//! all clusters are combined into the final estimate.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::mem;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::{CssCode, Side, TannerGraph, VertexId};
use crate::decoder::{timed, DecodeOutcome};
use crate::error::{Error, Result};
use crate::general::solve_local;
use crate::gf2::BitVector;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    parent: u32,
    // circular member list
    next: u32,
    // boundary list of the owning root, NONE-terminated
    bnext: u32,
    slot: u32,
}

const EMPTY: Node = Node {
    parent: NONE,
    next: NONE,
    bnext: NONE,
    slot: NONE,
};

#[derive(Clone, Copy, Debug)]
struct RootData {
    size: usize,
    // boundary vertices, followed by vertices added since the last refresh
    head: u32,
    tail: u32,
    len: usize,
    stale: bool,
}

/// Disjoint-set forest over flat vertex indices, with per-root member and
/// boundary lists. Both lists are threaded through the vertices themselves:
/// members form a circular list, so merging is a single swap, and boundary
/// lists are singly linked with a tail pointer, so they concatenate in
/// constant time. Per-root data lives in slots handed out on registration.
#[derive(Clone, Debug)]
pub struct UnionFindForest {
    nodes: Vec<Node>,
    roots: Vec<RootData>,
}

/// Iterator over the members of one tree.
#[derive(Clone, Debug)]
pub struct Members<'a> {
    nodes: &'a [Node],
    start: usize,
    cur: Option<usize>,
}

impl Iterator for Members<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let v = self.cur?;
        let n = self.nodes[v].next as usize;
        self.cur = (n != self.start).then_some(n);
        Some(v)
    }
}

/// Iterator over the boundary list of one tree.
#[derive(Clone, Debug)]
pub struct Boundary<'a> {
    nodes: &'a [Node],
    cur: u32,
    left: usize,
}

impl Iterator for Boundary<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.cur == NONE {
            return None;
        }
        let v = self.cur as usize;
        self.cur = self.nodes[v].bnext;
        self.left -= 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.left, Some(self.left))
    }
}

impl ExactSizeIterator for Boundary<'_> {}

impl UnionFindForest {
    /// A forest able to hold `len` vertices; none registered yet.
    pub fn new(len: usize) -> Self {
        assert!(len < NONE as usize, "too many vertices");
        Self {
            nodes: vec![EMPTY; len],
            roots: Vec::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_registered(&self, v: usize) -> bool {
        self.nodes[v].parent != NONE
    }

    #[inline]
    fn is_root(&self, v: usize) -> bool {
        v < self.capacity() && self.nodes[v].parent == v as u32
    }

    #[inline]
    fn data(&self, root: usize) -> &RootData {
        &self.roots[self.nodes[root].slot as usize]
    }

    #[inline]
    fn data_mut(&mut self, root: usize) -> &mut RootData {
        &mut self.roots[self.nodes[root].slot as usize]
    }

    /// Slot index of a root, stable until the root is merged away.
    #[inline]
    pub(crate) fn slot_of(&self, root: usize) -> usize {
        self.nodes[root].slot as usize
    }

    /// Adds `v` as a singleton tree. Returns false if it was already present.
    pub fn register(&mut self, v: usize) -> bool {
        if self.is_registered(v) {
            return false;
        }
        self.nodes[v] = Node {
            parent: v as u32,
            next: v as u32,
            bnext: NONE,
            slot: self.roots.len() as u32,
        };
        self.roots.push(RootData {
            size: 1,
            head: v as u32,
            tail: v as u32,
            len: 1,
            stale: true,
        });
        true
    }

    fn push_boundary(&mut self, root: usize, v: usize) {
        self.nodes[v].bnext = NONE;
        let d = self.roots[self.nodes[root].slot as usize];
        if d.tail == NONE {
            self.data_mut(root).head = v as u32;
        } else {
            self.nodes[d.tail as usize].bnext = v as u32;
        }
        let d = self.data_mut(root);
        d.tail = v as u32;
        d.len += 1;
    }

    /// Adds unregistered `v` directly below `root`.
    fn attach(&mut self, v: usize, root: usize) {
        debug_assert!(!self.is_registered(v));
        debug_assert!(self.is_root(root));
        let after = self.nodes[root].next;
        self.nodes[v].parent = root as u32;
        self.nodes[v].next = after;
        self.nodes[root].next = v as u32;
        self.push_boundary(root, v);
        let d = self.data_mut(root);
        d.size += 1;
        d.stale = true;
    }

    /// Root of `v`'s tree. Every vertex on the way is re-linked to the root.
    pub fn find(&mut self, v: usize) -> Result<usize> {
        if v >= self.capacity() || !self.is_registered(v) {
            return Err(Error::Unregistered(v));
        }
        Ok(self.root(v))
    }

    #[inline]
    pub(crate) fn root(&mut self, v: usize) -> usize {
        let r = self.root_ro(v);
        let mut cur = v;
        while self.nodes[cur].parent as usize != r {
            let next = self.nodes[cur].parent as usize;
            self.nodes[cur].parent = r as u32;
            cur = next;
        }
        r
    }

    /// Current parent pointer of `v`, without compression.
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.is_registered(v).then(|| self.nodes[v].parent as usize)
    }

    /// Links `child` below `parent`; both must be registered roots. Used to
    /// build specific tree shapes.
    pub fn link_roots(&mut self, child: usize, parent: usize) -> Result<()> {
        let (c, p) = (self.find(child)?, self.find(parent)?);
        if c != child || p != parent {
            return Err(Error::InvalidParameter(format!(
                "link_roots needs two roots, got {child} and {parent}"
            )));
        }
        if c != p {
            self.merge_into(c, p);
        }
        Ok(())
    }

    /// Merges the trees of `a` and `b`; the smaller tree goes below the larger
    /// root, ties going to `a`'s root. Returns the surviving root.
    pub fn union(&mut self, a: usize, b: usize) -> Result<usize> {
        let ra = self.find(a)?;
        let rb = self.find(b)?;
        if ra == rb {
            return Ok(ra);
        }
        let (big, small) = if self.data(ra).size >= self.data(rb).size {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.merge_into(small, big);
        Ok(big)
    }

    fn merge_into(&mut self, small: usize, big: usize) {
        let moved = *self.data(small);
        let (sn, bn) = (self.nodes[small].next, self.nodes[big].next);
        self.nodes[small].next = bn;
        self.nodes[big].next = sn;
        self.nodes[small].parent = big as u32;
        self.nodes[small].slot = NONE;
        let d = *self.data(big);
        if moved.head != NONE {
            if d.tail == NONE {
                self.data_mut(big).head = moved.head;
            } else {
                self.nodes[d.tail as usize].bnext = moved.head;
            }
            self.data_mut(big).tail = moved.tail;
        }
        let d = self.data_mut(big);
        d.size += moved.size;
        d.len += moved.len;
        d.stale = true;
    }

    /// Size of the tree rooted at `root` (0 for non-roots).
    pub fn size(&self, root: usize) -> usize {
        if self.is_root(root) {
            self.data(root).size
        } else {
            0
        }
    }

    /// Vertices of the tree rooted at `root` (empty for non-roots).
    pub fn members(&self, root: usize) -> Members<'_> {
        Members {
            nodes: &self.nodes,
            start: root,
            cur: self.is_root(root).then_some(root),
        }
    }

    /// Boundary list of `root`, exact after [`Self::refresh_boundary`].
    pub fn boundary(&self, root: usize) -> Boundary<'_> {
        let (cur, left) = if self.is_root(root) {
            let d = self.data(root);
            (d.head, d.len)
        } else {
            (NONE, 0)
        };
        Boundary {
            nodes: &self.nodes,
            cur,
            left,
        }
    }

    pub fn has_boundary(&self, root: usize) -> bool {
        self.is_root(root) && self.data(root).head != NONE
    }

    pub fn is_stale(&self, root: usize) -> bool {
        self.is_root(root) && self.data(root).stale
    }

    /// Recomputes the boundary of `root` from the previous boundary and the
    /// vertices added since the last refresh. Interior vertices never become
    /// boundary vertices again, so nothing else needs to be re-examined.
    pub fn refresh_boundary(&mut self, root: usize, g: &TannerGraph) {
        if !self.is_root(root) {
            return;
        }
        let mut cur = self.data(root).head;
        let (mut head, mut tail, mut len) = (NONE, NONE, 0);
        while cur != NONE {
            let v = cur as usize;
            let after = self.nodes[v].bnext;
            let open = g
                .flat_neighbours(v)
                .iter()
                .any(|&u| self.nodes[u].parent == NONE || self.root_ro(u) != root);
            if open {
                if tail == NONE {
                    head = cur;
                } else {
                    self.nodes[tail as usize].bnext = cur;
                }
                tail = cur;
                len += 1;
            }
            cur = after;
        }
        if tail != NONE {
            self.nodes[tail as usize].bnext = NONE;
        }
        let d = self.data_mut(root);
        d.head = head;
        d.tail = tail;
        d.len = len;
        d.stale = false;
    }

    /// Grows `root` by the neighbourhood of its current boundary list. New
    /// vertices join the tree; contacts with other trees are recorded as
    /// `(root, vertex)` pairs.
    fn grow(&mut self, root: usize, g: &TannerGraph, fusions: &mut Vec<(usize, usize)>) {
        let (head, tail) = {
            let d = self.data(root);
            (d.head, d.tail)
        };
        if head == NONE {
            return;
        }
        // vertices added here are appended after `tail`
        let mut v = head as usize;
        loop {
            for &u in g.flat_neighbours(v) {
                if !self.is_registered(u) {
                    self.attach(u, root);
                } else if self.root(u) != root {
                    fusions.push((root, u));
                }
            }
            if v == tail as usize {
                break;
            }
            v = self.nodes[v].bnext as usize;
        }
    }

    fn root_ro(&self, v: usize) -> usize {
        let mut r = v;
        while self.nodes[r].parent as usize != r {
            r = self.nodes[r].parent as usize;
        }
        r
    }
}

/// Which clusters grow in a growth step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum GrowthStrategy {
    /// Every cluster, valid ones included.
    All,
    /// The invalid cluster with the fewest vertices (lowest root on ties).
    #[default]
    SmallestSingle,
    /// One invalid cluster drawn from a stream keyed by `(seed, step)`.
    RandomSingle,
}

impl GrowthStrategy {
    pub fn label(&self) -> &'static str {
        match self {
            Self::All => "ag",
            Self::SmallestSingle => "ssg",
            Self::RandomSingle => "srg",
        }
    }
}

impl core::str::FromStr for GrowthStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ag" => Ok(Self::All),
            "ssg" => Ok(Self::SmallestSingle),
            "srg" => Ok(Self::RandomSingle),
            other => Err(Error::InvalidParameter(format!(
                "unknown growth strategy '{other}'"
            ))),
        }
    }
}

/// What to do when peeling fails on a cluster that passes the interior test.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PeelFallback {
    #[default]
    KeepGrowing,
    /// Solve the cluster's local system exactly instead.
    GaussianElimination,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct UfOptions {
    pub strategy: GrowthStrategy,
    pub fallback: PeelFallback,
}

// typical cluster scale at low error rates
const LOCAL_CAPACITY: usize = 64;

const ON_BOUNDARY: u8 = 1;
const ELIGIBLE: u8 = 2;
const RESIDUAL: u8 = 4;

/// Reusable per-decode flags, cleared after every use.
struct Scratch {
    // per flat vertex; ELIGIBLE is kept on bits, RESIDUAL on checks
    flags: Vec<u8>,
    m: usize,
    // per check: eligible degree, then position in the local forest
    degree: Vec<u32>,
    local: Vec<u32>,
    dsu: Vec<usize>,
    // buffers, taken out while in use
    checks: Vec<usize>,
    interior: Vec<usize>,
    kept: Vec<usize>,
    roots: Vec<usize>,
    leaves: BinaryHeap<Reverse<usize>>,
}

impl Scratch {
    fn new(g: &TannerGraph) -> Self {
        Self {
            flags: vec![0; g.vertex_count()],
            m: g.check_count(),
            degree: vec![0; g.check_count()],
            local: vec![0; g.check_count()],
            dsu: Vec::with_capacity(LOCAL_CAPACITY),
            checks: Vec::with_capacity(LOCAL_CAPACITY),
            interior: Vec::with_capacity(LOCAL_CAPACITY),
            kept: Vec::with_capacity(LOCAL_CAPACITY),
            roots: Vec::with_capacity(LOCAL_CAPACITY),
            leaves: BinaryHeap::with_capacity(LOCAL_CAPACITY),
        }
    }

    #[inline]
    fn eligible(&self, b: usize) -> bool {
        self.flags[self.m + b] & ELIGIBLE != 0
    }

    #[inline]
    fn set_eligible(&mut self, b: usize, on: bool) {
        let f = &mut self.flags[self.m + b];
        *f = if on { *f | ELIGIBLE } else { *f & !ELIGIBLE };
    }

    #[inline]
    fn residual(&self, c: usize) -> bool {
        self.flags[c] & RESIDUAL != 0
    }

    #[inline]
    fn set_residual(&mut self, c: usize, on: bool) {
        let f = &mut self.flags[c];
        *f = if on { *f | RESIDUAL } else { *f & !RESIDUAL };
    }
}

fn dsu_find(dsu: &mut [usize], mut x: usize) -> usize {
    while dsu[x] != x {
        dsu[x] = dsu[dsu[x]];
        x = dsu[x];
    }
    x
}

/// Interior bits that join at least two components of the cluster checks,
/// taken in ascending order. Bits with a single check join that check to a
/// shared ground node. For bits with two checks this is a spanning forest.
fn forest_bits(
    g: &TannerGraph,
    checks: &[usize],
    interior: &[usize],
    scratch: &mut Scratch,
    kept: &mut Vec<usize>,
) {
    let ground = checks.len();
    scratch.dsu.clear();
    scratch.dsu.extend(0..=ground);
    for (i, &c) in checks.iter().enumerate() {
        scratch.local[c] = i as u32;
    }
    kept.clear();
    let mut roots = mem::take(&mut scratch.roots);
    for &b in interior {
        roots.clear();
        for &c in g.bit_checks(b) {
            roots.push(dsu_find(&mut scratch.dsu, scratch.local[c] as usize));
        }
        if roots.len() == 1 {
            roots.push(dsu_find(&mut scratch.dsu, ground));
        }
        roots.sort_unstable();
        roots.dedup();
        if roots.len() > 1 {
            for &r in &roots[1..] {
                scratch.dsu[r] = roots[0];
            }
            kept.push(b);
        }
    }
    scratch.roots = roots;
}

/// Peels a correction for the syndrome on `checks` out of `bits`.
///
/// A check with exactly one remaining bit fixes that bit to its residual
/// syndrome; the lowest such check goes first. When none is left but the
/// residual is nonzero, the lowest eligible bit of the lowest unsatisfied
/// check is added. Every bit is decided at most once. Fails when an
/// unsatisfied check has no remaining bit. The estimate is appended to `out`,
/// which is left unchanged on failure.
fn peel_bits(
    g: &TannerGraph,
    checks: &[usize],
    bits: &[usize],
    syndrome: &BitVector,
    scratch: &mut Scratch,
    out: &mut Vec<usize>,
) -> bool {
    let mut unsatisfied = 0usize;
    for &c in checks {
        let s = syndrome.get(c);
        scratch.set_residual(c, s);
        unsatisfied += s as usize;
    }
    for &b in bits {
        scratch.set_eligible(b, true);
        for &c in g.bit_checks(b) {
            scratch.degree[c] += 1;
        }
    }
    let mut leaves = mem::take(&mut scratch.leaves);
    leaves.clear();
    leaves.extend(
        checks
            .iter()
            .copied()
            .filter(|&c| scratch.degree[c] == 1)
            .map(Reverse),
    );

    let start = out.len();
    let mut cursor = 0usize;
    while unsatisfied > 0 {
        let (check, take) = if let Some(Reverse(c)) = leaves.pop() {
            if scratch.degree[c] != 1 {
                continue;
            }
            (c, scratch.residual(c))
        } else {
            while cursor < checks.len() {
                let c = checks[cursor];
                if scratch.residual(c) && scratch.degree[c] > 0 {
                    break;
                }
                cursor += 1;
            }
            match checks.get(cursor) {
                Some(&c) => (c, true),
                None => break,
            }
        };
        let bit = g
            .check_bits(check)
            .iter()
            .copied()
            .find(|&b| scratch.eligible(b))
            .expect("degree counts eligible neighbours");
        scratch.set_eligible(bit, false);
        if take {
            out.push(bit);
        }
        for &c in g.bit_checks(bit) {
            scratch.degree[c] -= 1;
            if scratch.degree[c] == 1 {
                leaves.push(Reverse(c));
            }
            if take {
                let r = !scratch.residual(c);
                scratch.set_residual(c, r);
                if r {
                    unsatisfied += 1;
                    // a newly unsatisfied check may sit before the cursor
                    cursor = 0;
                } else {
                    unsatisfied -= 1;
                }
            }
        }
    }

    for &c in checks {
        scratch.set_residual(c, false);
        scratch.degree[c] = 0;
    }
    for &b in bits {
        scratch.set_eligible(b, false);
    }
    scratch.leaves = leaves;
    if unsatisfied > 0 {
        out.truncate(start);
    }
    unsatisfied == 0
}

/// Peeling over a spanning forest of the interior first, then over the whole
/// interior if that gets stuck.
fn peel(
    g: &TannerGraph,
    checks: &[usize],
    interior: &[usize],
    syndrome: &BitVector,
    scratch: &mut Scratch,
    out: &mut Vec<usize>,
) -> bool {
    let mut forest = mem::take(&mut scratch.kept);
    forest_bits(g, checks, interior, scratch, &mut forest);
    let mut ok = peel_bits(g, checks, &forest, syndrome, scratch, out);
    if !ok && forest.len() != interior.len() {
        ok = peel_bits(g, checks, interior, syndrome, scratch, out);
    }
    scratch.kept = forest;
    ok
}

/// Checks in the cluster (ascending) and its interior bits (ascending).
fn split_cluster(
    forest: &UnionFindForest,
    root: usize,
    g: &TannerGraph,
    scratch: &mut Scratch,
    checks: &mut Vec<usize>,
    interior: &mut Vec<usize>,
) {
    for v in forest.boundary(root) {
        scratch.flags[v] |= ON_BOUNDARY;
    }
    let m = g.check_count();
    checks.clear();
    interior.clear();
    for v in forest.members(root) {
        if v < m {
            checks.push(v);
        } else if scratch.flags[v] & ON_BOUNDARY == 0 {
            interior.push(v - m);
        }
    }
    for v in forest.boundary(root) {
        scratch.flags[v] &= !ON_BOUNDARY;
    }
    checks.sort_unstable();
    interior.sort_unstable();
}

fn validate(
    forest: &UnionFindForest,
    root: usize,
    g: &TannerGraph,
    syndrome: &BitVector,
    fallback: PeelFallback,
    scratch: &mut Scratch,
    out: &mut Vec<usize>,
) -> bool {
    let mut checks = mem::take(&mut scratch.checks);
    let mut interior = mem::take(&mut scratch.interior);
    split_cluster(forest, root, g, scratch, &mut checks, &mut interior);
    for &b in &interior {
        scratch.set_eligible(b, true);
    }
    let covered = checks
        .iter()
        .filter(|&&c| syndrome.get(c))
        .all(|&c| g.check_bits(c).iter().any(|&b| scratch.eligible(b)));
    for &b in &interior {
        scratch.set_eligible(b, false);
    }
    let ok = covered
        && (peel(g, &checks, &interior, syndrome, scratch, out)
            || (fallback == PeelFallback::GaussianElimination
                && solve_local(g, &checks, &interior, syndrome)
                    .map(|est| out.extend(est))
                    .is_some()));
    scratch.checks = checks;
    scratch.interior = interior;
    ok
}

/// The heuristic validity test for the cluster rooted at `root`: every
/// syndrome check of the cluster has an interior neighbour and peeling
/// succeeds. The boundary list of `root` must be fresh.
pub fn check_validity_heuristic(
    forest: &UnionFindForest,
    root: usize,
    code: &CssCode,
    side: Side,
    syndrome: &BitVector,
) -> Result<bool> {
    let g = code.tanner(side);
    check_syndrome_len(g, syndrome)?;
    if forest.capacity() != g.vertex_count() || forest.size(root) == 0 {
        return Err(Error::Unregistered(root));
    }
    let mut scratch = Scratch::new(g);
    Ok(validate(
        forest,
        root,
        g,
        syndrome,
        PeelFallback::KeepGrowing,
        &mut scratch,
        &mut Vec::new(),
    ))
}

/// Runs the peeling procedure on a finished cluster given by its vertices.
/// Returns the local estimate, or `None` if peeling gets stuck.
pub fn peel_erasure(
    code: &CssCode,
    side: Side,
    cluster: &[VertexId],
    syndrome: &BitVector,
) -> Result<Option<BitVector>> {
    let g = code.tanner(side);
    check_syndrome_len(g, syndrome)?;
    let mut inside = vec![false; g.vertex_count()];
    for &v in cluster {
        inside[g.flat(v)?] = true;
    }
    let m = g.check_count();
    let checks: Vec<usize> = (0..m).filter(|&c| inside[c]).collect();
    let interior: Vec<usize> = (0..g.bit_count())
        .filter(|&b| inside[m + b] && g.bit_checks(b).iter().all(|&c| inside[c]))
        .collect();
    let mut scratch = Scratch::new(g);
    let mut bits = Vec::new();
    Ok(
        peel(g, &checks, &interior, syndrome, &mut scratch, &mut bits)
            .then(|| BitVector::from_support(g.bit_count(), &bits)),
    )
}

fn check_syndrome_len(g: &TannerGraph, syndrome: &BitVector) -> Result<()> {
    if syndrome.len() != g.check_count() {
        return Err(Error::DimensionMismatch {
            op: "syndrome",
            expected: g.check_count(),
            found: syndrome.len(),
        });
    }
    Ok(())
}

/// Decodes `syndrome` with the union-find heuristic. `seed` keys the random
/// stream of [`GrowthStrategy::RandomSingle`].
pub fn decode_uf(
    code: &CssCode,
    side: Side,
    syndrome: &BitVector,
    opts: &UfOptions,
    seed: u64,
) -> Result<DecodeOutcome> {
    check_syndrome_len(code.tanner(side), syndrome)?;
    let (outcome, elapsed) = timed(|| run(code, side, syndrome, opts, seed, &mut |_, _| {}));
    Ok(DecodeOutcome { elapsed, ..outcome })
}

#[derive(Clone, Copy, Debug)]
enum Status {
    Invalid,
    // range of the cluster estimate in the shared arena
    Valid(usize, usize),
}

/// The decode loop. `observe` sees the forest and the root list after every
/// bookkeeping pass.
fn run(
    code: &CssCode,
    side: Side,
    syndrome: &BitVector,
    opts: &UfOptions,
    seed: u64,
    observe: &mut dyn FnMut(&UnionFindForest, &[usize]),
) -> DecodeOutcome {
    let g = code.tanner(side);
    let mut clusters: Vec<usize> = syndrome.iter_ones().collect();
    if clusters.is_empty() {
        return DecodeOutcome {
            estimate: BitVector::zeros(code.n()),
            growth_steps: 0,
            converged: true,
            elapsed: Default::default(),
            diagnostic: None,
        };
    }
    let k = clusters.len();
    let mut forest = UnionFindForest::new(g.vertex_count());
    forest.roots.reserve_exact(k);
    let mut scratch = Scratch::new(g);
    for &c in &clusters {
        forest.register(c);
        forest.refresh_boundary(c, g);
    }
    // both indexed by root slot; a lone unsatisfied check has no interior
    let mut status = vec![Status::Invalid; k];
    let mut listed = vec![false; k];
    let mut arena = Vec::with_capacity(LOCAL_CAPACITY);

    let mut growth_steps = 0usize;
    let mut diagnostic = None;
    let mut rng =
        (opts.strategy == GrowthStrategy::RandomSingle).then(|| ChaCha8Rng::seed_from_u64(seed));
    // invalid clusters by (size, root); entries go stale when a cluster changes
    let mut smallest: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
    if opts.strategy == GrowthStrategy::SmallestSingle {
        smallest.extend(clusters.iter().map(|&r| Reverse((1, r))));
    }
    let mut dirty: Vec<usize> = Vec::with_capacity(k);
    let mut grow_set = Vec::with_capacity(k);
    let mut fusions = Vec::with_capacity(k);
    let mut touched = Vec::with_capacity(k);
    let mut active = Vec::with_capacity(k);

    loop {
        for &r in &dirty {
            let start = arena.len();
            let valid = validate(
                &forest,
                r,
                g,
                syndrome,
                opts.fallback,
                &mut scratch,
                &mut arena,
            );
            status[forest.slot_of(r)] = if valid {
                Status::Valid(start, arena.len())
            } else {
                if opts.strategy == GrowthStrategy::SmallestSingle {
                    smallest.push(Reverse((forest.size(r), r)));
                }
                Status::Invalid
            };
        }
        dirty.clear();

        grow_set.clear();
        match opts.strategy {
            GrowthStrategy::SmallestSingle => {
                while let Some(Reverse((size, r))) = smallest.pop() {
                    if forest.size(r) == size
                        && matches!(status[forest.slot_of(r)], Status::Invalid)
                        && forest.has_boundary(r)
                    {
                        grow_set.push(r);
                        break;
                    }
                }
            }
            GrowthStrategy::All | GrowthStrategy::RandomSingle => {
                active.clear();
                active.extend(clusters.iter().copied().filter(|&r| {
                    matches!(status[forest.slot_of(r)], Status::Invalid) && forest.has_boundary(r)
                }));
                if let Some(rng) = rng.as_mut().filter(|_| !active.is_empty()) {
                    active.sort_unstable();
                    rng.set_stream(growth_steps as u64);
                    rng.set_word_pos(0);
                    grow_set.push(active[rng.gen_range(0..active.len())]);
                } else if !active.is_empty() {
                    grow_set.extend(clusters.iter().copied().filter(|&r| forest.has_boundary(r)));
                }
            }
        }
        if grow_set.is_empty() {
            // closed clusters cannot change any more
            let stuck = clusters
                .iter()
                .filter(|&&r| matches!(status[forest.slot_of(r)], Status::Invalid))
                .count();
            if stuck > 0 {
                diagnostic = Some(format!(
                    "no correction found: {stuck} closed cluster(s) remain invalid"
                ));
            }
            break;
        }
        growth_steps += 1;

        // grow from the boundary; contacts with other clusters become fusions
        fusions.clear();
        touched.clear();
        for &r in &grow_set {
            touched.push(r);
            forest.grow(r, g, &mut fusions);
        }
        for &(a, b) in &fusions {
            forest.union(a, b).expect("fusion endpoints are registered");
            touched.push(b);
        }
        if !fusions.is_empty() {
            clusters.retain(|&r| forest.is_root(r));
        }

        for &t in &touched {
            let root = forest.root(t);
            let slot = forest.slot_of(root);
            if !listed[slot] {
                listed[slot] = true;
                dirty.push(root);
            }
        }
        for &r in &dirty {
            listed[forest.slot_of(r)] = false;
            forest.refresh_boundary(r, g);
        }
        observe(&forest, &clusters);
    }

    let converged = diagnostic.is_none();
    let mut estimate = BitVector::zeros(code.n());
    if converged {
        for &r in &clusters {
            if let Status::Valid(a, b) = status[forest.slot_of(r)] {
                for &bit in &arena[a..b] {
                    estimate.flip(bit);
                }
            }
        }
    }
    DecodeOutcome {
        estimate,
        growth_steps,
        converged,
        elapsed: Default::default(),
        diagnostic,
    }
}
