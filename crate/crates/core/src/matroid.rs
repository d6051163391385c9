//! Ground-set and matroid abstractions: rank oracles with query accounting,
//! the built-in matroid families, and the oracle transformations (truncation,
//! zero-weight padding, ground-set restriction).
//!
//! A [`RankOracle`] is the sole access path to matroid structure. Every call
//! to [`RankOracle::rank`] increments the attached [`QueryStats`] by exactly
//! one, no matter how many wrappers (truncation, padding, restriction) sit
//! between the caller and the base family.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};

/// Dense element index in `[0, n_hat)`. Ordering by id is the global
/// deterministic tiebreak.
pub type Element = usize;

/// Arbitrary rank function for custom oracles.
pub type RankFn = Arc<dyn Fn(&[Element]) -> usize + Send + Sync>;

const NUM_PHASES: usize = 5;

/// Solve phases used to attribute rank queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Init = 0,
    Adjustment = 1,
    Sssp = 2,
    Augmentation = 3,
    Verification = 4,
}

impl Phase {
    pub const ALL: [Phase; NUM_PHASES] = [
        Phase::Init,
        Phase::Adjustment,
        Phase::Sssp,
        Phase::Augmentation,
        Phase::Verification,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Init => "init",
            Phase::Adjustment => "adjustment",
            Phase::Sssp => "sssp",
            Phase::Augmentation => "augmentation",
            Phase::Verification => "verification",
        }
    }
}

/// Per-phase, per-matroid counters of rank-oracle calls.
///
/// Counters never decrease; the phase marker selects which cell subsequent
/// queries land in. Increments are atomic so a harness may run independent
/// solves in parallel, each with its own stats; a single solve is strictly
/// single-threaded.
#[derive(Debug)]
pub struct QueryStats {
    phase: AtomicUsize,
    counts: [[AtomicU64; 2]; NUM_PHASES],
}

impl Default for QueryStats {
    fn default() -> Self {
        Self::new()
    }
}

impl QueryStats {
    pub fn new() -> Self {
        QueryStats {
            phase: AtomicUsize::new(Phase::Init as usize),
            counts: Default::default(),
        }
    }

    pub fn set_phase(&self, phase: Phase) {
        self.phase.store(phase as usize, Ordering::Relaxed);
    }

    pub fn phase(&self) -> Phase {
        Phase::ALL[self.phase.load(Ordering::Relaxed)]
    }

    fn record(&self, side: usize) {
        let p = self.phase.load(Ordering::Relaxed);
        self.counts[p][side].fetch_add(1, Ordering::Relaxed);
    }

    pub fn count(&self, phase: Phase, side: usize) -> u64 {
        self.counts[phase as usize][side].load(Ordering::Relaxed)
    }

    pub fn phase_total(&self, phase: Phase) -> u64 {
        self.count(phase, 0) + self.count(phase, 1)
    }

    pub fn total(&self) -> u64 {
        Phase::ALL.iter().map(|&p| self.phase_total(p)).sum()
    }

    /// Queries attributable to the algorithm proper: everything except the
    /// init phase and our own verification overhead.
    pub fn total_algorithm(&self) -> u64 {
        self.phase_total(Phase::Adjustment)
            + self.phase_total(Phase::Sssp)
            + self.phase_total(Phase::Augmentation)
    }
}

/// Temporarily switches the stats phase, restoring the previous one on drop.
pub struct PhaseGuard<'a> {
    stats: &'a QueryStats,
    prev: Phase,
}

impl<'a> PhaseGuard<'a> {
    pub fn new(stats: &'a QueryStats, phase: Phase) -> Self {
        let prev = stats.phase();
        stats.set_phase(phase);
        PhaseGuard { stats, prev }
    }
}

impl Drop for PhaseGuard<'_> {
    fn drop(&mut self) {
        self.stats.set_phase(self.prev);
    }
}

/// A dense element set over a fixed-capacity ground set, stored as a bitset.
/// Iteration is in ascending id order.
#[derive(Clone, PartialEq, Eq)]
pub struct ElemSet {
    words: Vec<u64>,
    capacity: usize,
    len: usize,
}

impl ElemSet {
    pub fn new(capacity: usize) -> Self {
        ElemSet {
            words: vec![0; capacity.div_ceil(64)],
            capacity,
            len: 0,
        }
    }

    pub fn from_elems<I: IntoIterator<Item = Element>>(capacity: usize, elems: I) -> Self {
        let mut s = ElemSet::new(capacity);
        for e in elems {
            s.insert(e);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, e: Element) -> bool {
        debug_assert!(e < self.capacity);
        self.words[e / 64] >> (e % 64) & 1 == 1
    }

    /// Inserts `e`, returning true if it was absent.
    pub fn insert(&mut self, e: Element) -> bool {
        assert!(
            e < self.capacity,
            "element {e} out of range {}",
            self.capacity
        );
        let w = &mut self.words[e / 64];
        let bit = 1u64 << (e % 64);
        if *w & bit == 0 {
            *w |= bit;
            self.len += 1;
            true
        } else {
            false
        }
    }

    /// Removes `e`, returning true if it was present.
    pub fn remove(&mut self, e: Element) -> bool {
        assert!(
            e < self.capacity,
            "element {e} out of range {}",
            self.capacity
        );
        let w = &mut self.words[e / 64];
        let bit = 1u64 << (e % 64);
        if *w & bit != 0 {
            *w &= !bit;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + bit)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<Element> {
        self.iter().collect()
    }

    /// Elements of `self` not in `other` (ascending).
    pub fn difference(&self, other: &ElemSet) -> Vec<Element> {
        self.iter().filter(|&e| !other.contains(e)).collect()
    }

    pub fn intersection_len(&self, other: &ElemSet) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}

impl std::fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A structured set description evaluated by rank oracles without
/// materializing intermediate sets at the call site.
///
/// The evaluated set is `(base \ remove_one \ remove_slice) ∪ add_slice ∪
/// add_one`. Contracts: `remove_one` and every element of `remove_slice` lie
/// in `base`; `add_one` and `add_slice` elements do not; slices contain no
/// duplicates. The slice forms let binary-search exchange probes charge a
/// single oracle call per probe.
#[derive(Clone, Copy, Default)]
pub struct SetExpr<'a> {
    pub base: Option<&'a ElemSet>,
    pub add_one: Option<Element>,
    pub remove_one: Option<Element>,
    pub add_slice: &'a [Element],
    pub remove_slice: &'a [Element],
}

impl<'a> SetExpr<'a> {
    pub fn of(base: &'a ElemSet) -> Self {
        SetExpr {
            base: Some(base),
            ..Default::default()
        }
    }

    /// A set expression over a plain element list (no base set).
    pub fn from_slice(elems: &'a [Element]) -> Self {
        SetExpr {
            add_slice: elems,
            ..Default::default()
        }
    }

    pub fn plus(mut self, e: Element) -> Self {
        debug_assert!(self.add_one.is_none());
        self.add_one = Some(e);
        self
    }

    pub fn minus(mut self, e: Element) -> Self {
        debug_assert!(self.remove_one.is_none());
        self.remove_one = Some(e);
        self
    }

    pub fn plus_slice(mut self, s: &'a [Element]) -> Self {
        debug_assert!(self.add_slice.is_empty());
        self.add_slice = s;
        self
    }

    pub fn minus_slice(mut self, s: &'a [Element]) -> Self {
        debug_assert!(self.remove_slice.is_empty());
        self.remove_slice = s;
        self
    }

    /// Cardinality of the evaluated set, computable without materialization.
    pub fn card(&self) -> usize {
        self.base.map_or(0, |b| b.len()) + self.add_slice.len() + self.add_one.iter().len()
            - self.remove_slice.len()
            - self.remove_one.iter().len()
    }
}

/// Matroid families and oracle transformations.
enum Family {
    Uniform {
        cap: usize,
    },
    Partition {
        block_of: Vec<u32>,
        caps: Vec<u32>,
    },
    Graphic {
        vertices: usize,
        endpoints: Vec<(u32, u32)>,
    },
    /// Columns of a 0/1 matrix over GF(2); rank by bitset Gaussian
    /// elimination. Rows are packed into `words` u64 words per column.
    LinearGf2 {
        rows: usize,
        words: usize,
        cols: Vec<u64>,
    },
    /// Arbitrary rank function for tests and negative controls. Receives the
    /// evaluated set sorted ascending.
    Custom {
        f: RankFn,
    },
    Truncated {
        inner: Box<Family>,
        cap: usize,
    },
    Padded {
        inner: Box<Family>,
        first_pad: usize,
        cap: usize,
    },
    Restricted {
        inner: Box<Family>,
        to_inner: Vec<Element>,
    },
}

impl Family {
    fn name(&self) -> &'static str {
        match self {
            Family::Uniform { .. } => "uniform",
            Family::Partition { .. } => "partition",
            Family::Graphic { .. } => "graphic",
            Family::LinearGf2 { .. } => "linear_gf2",
            Family::Custom { .. } => "custom",
            Family::Truncated { .. } => "truncated",
            Family::Padded { .. } => "padded",
            Family::Restricted { .. } => "restricted",
        }
    }

    fn clone_family(&self) -> Family {
        match self {
            Family::Uniform { cap } => Family::Uniform { cap: *cap },
            Family::Partition { block_of, caps } => Family::Partition {
                block_of: block_of.clone(),
                caps: caps.clone(),
            },
            Family::Graphic {
                vertices,
                endpoints,
            } => Family::Graphic {
                vertices: *vertices,
                endpoints: endpoints.clone(),
            },
            Family::LinearGf2 { rows, words, cols } => Family::LinearGf2 {
                rows: *rows,
                words: *words,
                cols: cols.clone(),
            },
            Family::Custom { f } => Family::Custom { f: Arc::clone(f) },
            Family::Truncated { inner, cap } => Family::Truncated {
                inner: Box::new(inner.clone_family()),
                cap: *cap,
            },
            Family::Padded {
                inner,
                first_pad,
                cap,
            } => Family::Padded {
                inner: Box::new(inner.clone_family()),
                first_pad: *first_pad,
                cap: *cap,
            },
            Family::Restricted { inner, to_inner } => Family::Restricted {
                inner: Box::new(inner.clone_family()),
                to_inner: to_inner.clone(),
            },
        }
    }

    /// Rank of the materialized working set. Wrappers may permute or rewrite
    /// the buffer in place.
    fn rank_slice(&self, elems: &mut [Element], scratch: &mut Scratch) -> usize {
        match self {
            Family::Uniform { cap } => elems.len().min(*cap),
            Family::Partition { block_of, caps } => {
                scratch.bump_epoch();
                let ep = scratch.epoch;
                let mut rank = 0;
                for &e in elems.iter() {
                    let b = block_of[e] as usize;
                    if scratch.stamp_a[b] != ep {
                        scratch.stamp_a[b] = ep;
                        scratch.val_a[b] = 0;
                    }
                    if scratch.val_a[b] < caps[b] {
                        scratch.val_a[b] += 1;
                        rank += 1;
                    }
                }
                rank
            }
            Family::Graphic { endpoints, .. } => {
                scratch.bump_epoch();
                let ep = scratch.epoch;
                let mut rank = 0;
                for &e in elems.iter() {
                    let (u, v) = endpoints[e];
                    let ru = scratch.uf_find(u, ep);
                    let rv = scratch.uf_find(v, ep);
                    if ru != rv {
                        // union by stamped size
                        let (big, small) =
                            if scratch.val_a[ru as usize] >= scratch.val_a[rv as usize] {
                                (ru, rv)
                            } else {
                                (rv, ru)
                            };
                        scratch.uf_parent[small as usize] = big;
                        scratch.val_a[big as usize] += scratch.val_a[small as usize];
                        rank += 1;
                    }
                }
                rank
            }
            Family::LinearGf2 { rows, words, cols } => {
                scratch.bump_epoch();
                let ep = scratch.epoch;
                let w = *words;
                let mut rank = 0;
                for &e in elems.iter() {
                    scratch.gf2_tmp.clear();
                    scratch.gf2_tmp.extend_from_slice(&cols[e * w..(e + 1) * w]);
                    // reduce against pivots; a column surviving to a fresh
                    // leading bit becomes a new pivot
                    while let Some(lead) = leading_bit(&scratch.gf2_tmp) {
                        if scratch.stamp_a[lead] == ep {
                            for i in 0..w {
                                scratch.gf2_tmp[i] ^= scratch.gf2_pivots[lead * w + i];
                            }
                        } else {
                            scratch.stamp_a[lead] = ep;
                            scratch.gf2_pivots[lead * w..(lead + 1) * w]
                                .copy_from_slice(&scratch.gf2_tmp);
                            rank += 1;
                            break;
                        }
                    }
                    let _ = rows;
                }
                rank
            }
            Family::Custom { f } => {
                elems.sort_unstable();
                f(elems)
            }
            Family::Truncated { inner, cap } => inner.rank_slice(elems, scratch).min(*cap),
            Family::Padded {
                inner,
                first_pad,
                cap,
            } => {
                // stable partition: non-pad elements first
                let mut m = 0;
                for i in 0..elems.len() {
                    if elems[i] < *first_pad {
                        elems.swap(m, i);
                        m += 1;
                    }
                }
                let pads = elems.len() - m;
                let inner_rank = inner.rank_slice(&mut elems[..m], scratch);
                (inner_rank + pads).min(*cap)
            }
            Family::Restricted { inner, to_inner } => {
                for e in elems.iter_mut() {
                    *e = to_inner[*e];
                }
                inner.rank_slice(elems, scratch)
            }
        }
    }

    fn truncation_cap(&self) -> Option<usize> {
        match self {
            Family::Truncated { cap, .. } => Some(*cap),
            _ => None,
        }
    }
}

fn leading_bit(v: &[u64]) -> Option<usize> {
    for (wi, &w) in v.iter().enumerate().rev() {
        if w != 0 {
            return Some(wi * 64 + 63 - w.leading_zeros() as usize);
        }
    }
    None
}

/// Reusable per-oracle evaluation buffers, epoch-stamped to avoid clears.
struct Scratch {
    elems: Vec<Element>,
    mark: Vec<u32>,
    // stamp_a/val_a serve partition counts, graphic union sizes, and gf2
    // pivot presence; sized for the maximum requirement of the family stack.
    stamp_a: Vec<u32>,
    val_a: Vec<u32>,
    uf_parent: Vec<u32>,
    uf_stamp: Vec<u32>,
    gf2_pivots: Vec<u64>,
    gf2_tmp: Vec<u64>,
    epoch: u32,
}

impl Scratch {
    fn for_family(family: &Family, ground: usize) -> Self {
        let mut slots = 0usize;
        let mut verts = 0usize;
        let mut gf2_words = 0usize;
        fn walk(f: &Family, slots: &mut usize, verts: &mut usize, gf2_words: &mut usize) {
            match f {
                Family::Partition { caps, .. } => *slots = (*slots).max(caps.len()),
                Family::Graphic { vertices, .. } => {
                    *verts = (*verts).max(*vertices);
                    *slots = (*slots).max(*vertices);
                }
                Family::LinearGf2 { rows, words, .. } => {
                    *slots = (*slots).max(*rows);
                    *gf2_words = (*gf2_words).max(*words);
                }
                Family::Truncated { inner, .. }
                | Family::Padded { inner, .. }
                | Family::Restricted { inner, .. } => walk(inner, slots, verts, gf2_words),
                Family::Uniform { .. } | Family::Custom { .. } => {}
            }
        }
        walk(family, &mut slots, &mut verts, &mut gf2_words);
        Scratch {
            elems: Vec::with_capacity(ground),
            mark: vec![0; ground],
            stamp_a: vec![0; slots],
            val_a: vec![0; slots],
            uf_parent: vec![0; verts],
            uf_stamp: vec![0; verts],
            gf2_pivots: vec![0; slots * gf2_words],
            gf2_tmp: vec![0; gf2_words],
            epoch: 0,
        }
    }

    fn bump_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            // wrapped: clear stale stamps once
            self.mark.fill(0);
            self.stamp_a.fill(0);
            self.uf_stamp.fill(0);
            self.epoch = 1;
        }
    }

    /// find with path halving over epoch-stamped parents; val_a doubles as
    /// component size (stamped lazily alongside the parent).
    fn uf_find(&mut self, v: u32, ep: u32) -> u32 {
        let mut v = v;
        if self.uf_stamp[v as usize] != ep {
            self.uf_stamp[v as usize] = ep;
            self.uf_parent[v as usize] = v;
            self.stamp_a[v as usize] = ep;
            self.val_a[v as usize] = 1;
            return v;
        }
        loop {
            let p = self.uf_parent[v as usize];
            if p == v {
                return v;
            }
            let gp = self.uf_parent[p as usize];
            self.uf_parent[v as usize] = gp;
            v = gp;
        }
    }
}

/// A matroid accessed through its rank function, with query accounting.
///
/// Immutable after construction apart from the query counter and internal
/// evaluation scratch.
pub struct RankOracle {
    family: Family,
    ground: usize,
    stats: Arc<QueryStats>,
    side: usize,
    scratch: Mutex<Scratch>,
}

impl Clone for RankOracle {
    fn clone(&self) -> Self {
        let family = self.family.clone_family();
        let scratch = Mutex::new(Scratch::for_family(&family, self.ground));
        RankOracle {
            family,
            ground: self.ground,
            stats: Arc::clone(&self.stats),
            side: self.side,
            scratch,
        }
    }
}

impl std::fmt::Debug for RankOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RankOracle")
            .field("family", &self.family.name())
            .field("ground", &self.ground)
            .finish()
    }
}

impl RankOracle {
    fn from_family(family: Family, ground: usize) -> Self {
        let scratch = Mutex::new(Scratch::for_family(&family, ground));
        RankOracle {
            family,
            ground,
            stats: Arc::new(QueryStats::new()),
            side: 0,
            scratch,
        }
    }

    /// Uniform matroid: `rank(S) = min(|S|, k)`.
    pub fn uniform(n: usize, k: usize) -> Self {
        Self::from_family(Family::Uniform { cap: k }, n)
    }

    /// Partition matroid over disjoint blocks covering `[0, n)` with
    /// per-block capacities: `rank(S) = Σ_b min(|S ∩ b|, cap_b)`.
    pub fn partition(blocks: &[Vec<Element>], caps: &[usize]) -> Result<Self> {
        if blocks.len() != caps.len() {
            return Err(Error::InstanceFormat(format!(
                "partition: {} blocks but {} caps",
                blocks.len(),
                caps.len()
            )));
        }
        let n: usize = blocks.iter().map(|b| b.len()).sum();
        let mut block_of = vec![u32::MAX; n];
        for (bi, block) in blocks.iter().enumerate() {
            for &e in block {
                if e >= n {
                    return Err(Error::InstanceFormat(format!(
                        "partition: element {e} out of range {n}"
                    )));
                }
                if block_of[e] != u32::MAX {
                    return Err(Error::InstanceFormat(format!(
                        "partition: element {e} in two blocks"
                    )));
                }
                block_of[e] = bi as u32;
            }
        }
        let caps = caps.iter().map(|&c| c as u32).collect();
        Ok(Self::from_family(Family::Partition { block_of, caps }, n))
    }

    /// Graphic matroid: elements are edges; `rank(S)` is the size of a
    /// spanning forest of `S`, recomputed per query with a disjoint-set
    /// forest (a swap point for dynamic-connectivity structures).
    pub fn graphic(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        for &(u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::InstanceFormat(format!(
                    "graphic: edge ({u},{v}) exceeds vertex count {vertices}"
                )));
            }
        }
        let endpoints = edges.iter().map(|&(u, v)| (u as u32, v as u32)).collect();
        Ok(Self::from_family(
            Family::Graphic {
                vertices,
                endpoints,
            },
            edges.len(),
        ))
    }

    /// Binary linear matroid: elements are columns of a 0/1 matrix; rank by
    /// bitset Gaussian elimination (multi-word rows supported).
    pub fn linear_gf2(rows: usize, cols: &[Vec<bool>]) -> Result<Self> {
        let words = rows.div_ceil(64).max(1);
        let mut packed = vec![0u64; cols.len() * words];
        for (ci, col) in cols.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::InstanceFormat(format!(
                    "linear_gf2: column {ci} has {} rows, expected {rows}",
                    col.len()
                )));
            }
            for (ri, &bit) in col.iter().enumerate() {
                if bit {
                    packed[ci * words + ri / 64] |= 1 << (ri % 64);
                }
            }
        }
        Ok(Self::from_family(
            Family::LinearGf2 {
                rows,
                words,
                cols: packed,
            },
            cols.len(),
        ))
    }

    /// An arbitrary rank function over `[0, n)`, for tests and negative
    /// controls. `f` receives the evaluated set sorted ascending; it must be
    /// a genuine matroid rank function for the solver to be meaningful.
    pub fn custom(n: usize, f: RankFn) -> Self {
        Self::from_family(Family::Custom { f }, n)
    }

    /// Regards all sets of rank greater than `r` as having rank `r`:
    /// the returned oracle computes `min(rank(S), r)` with one inner
    /// evaluation per outer query.
    pub fn truncate(self, r: usize) -> Self {
        let ground = self.ground;
        Self::from_family(
            Family::Truncated {
                inner: Box::new(self.family),
                cap: r,
            },
            ground,
        )
        .with_stats_of(&self.stats, self.side)
    }

    /// Extends the ground set by `r` free elements `Z` with ids
    /// `[n, n + r)`; the returned oracle computes
    /// `min(rank(S \ Z) + |S ∩ Z|, r)`. Requires the oracle to already be
    /// truncated to rank `r`.
    pub fn pad_with_free_elements(self, r: usize) -> Self {
        assert_eq!(
            self.family.truncation_cap(),
            Some(r),
            "pad_with_free_elements requires an oracle truncated to rank {r}"
        );
        let first_pad = self.ground;
        let ground = self.ground + r;
        Self::from_family(
            Family::Padded {
                inner: Box::new(self.family),
                first_pad,
                cap: r,
            },
            ground,
        )
        .with_stats_of(&self.stats, self.side)
    }

    /// Restricts the ground set to `kept` (in order), re-indexing densely.
    pub fn restrict_to(self, kept: &[Element]) -> Self {
        for &e in kept {
            assert!(e < self.ground, "restrict_to: element {e} out of range");
        }
        let ground = kept.len();
        Self::from_family(
            Family::Restricted {
                inner: Box::new(self.family),
                to_inner: kept.to_vec(),
            },
            ground,
        )
        .with_stats_of(&self.stats, self.side)
    }

    fn with_stats_of(mut self, stats: &Arc<QueryStats>, side: usize) -> Self {
        self.stats = Arc::clone(stats);
        self.side = side;
        self
    }

    /// Attaches a shared stats sink; `side` is 0 for matroid 1, 1 for
    /// matroid 2.
    pub fn attach_stats(&mut self, stats: Arc<QueryStats>, side: usize) {
        assert!(side < 2);
        self.stats = stats;
        self.side = side;
    }

    pub fn stats(&self) -> &Arc<QueryStats> {
        &self.stats
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    /// Rank of the evaluated set. Exactly one query is counted per call,
    /// regardless of wrapper depth.
    pub fn rank(&self, expr: &SetExpr) -> usize {
        self.stats.record(self.side);
        let mut scratch = self.scratch.lock().unwrap();
        let scratch = &mut *scratch;

        // materialize: base minus removals, then additions
        scratch.bump_epoch();
        let ep = scratch.epoch;
        if let Some(e) = expr.remove_one {
            assert!(
                e < self.ground,
                "instance format error: element {e} out of range"
            );
            scratch.mark[e] = ep;
        }
        for &e in expr.remove_slice {
            assert!(
                e < self.ground,
                "instance format error: element {e} out of range"
            );
            scratch.mark[e] = ep;
        }
        scratch.elems.clear();
        if let Some(base) = expr.base {
            debug_assert!(base.capacity() <= self.ground);
            for e in base.iter() {
                if scratch.mark[e] != ep {
                    scratch.elems.push(e);
                }
            }
        }
        for &e in expr.add_slice {
            assert!(
                e < self.ground,
                "instance format error: element {e} out of range"
            );
            debug_assert!(expr.base.is_none_or(|b| !b.contains(e)));
            scratch.elems.push(e);
        }
        if let Some(e) = expr.add_one {
            assert!(
                e < self.ground,
                "instance format error: element {e} out of range"
            );
            debug_assert!(expr.base.is_none_or(|b| !b.contains(e)));
            scratch.elems.push(e);
        }
        debug_assert_eq!(scratch.elems.len(), expr.card());

        let mut elems = std::mem::take(&mut scratch.elems);
        let rank = self.family.rank_slice(&mut elems, scratch);
        scratch.elems = elems;
        rank
    }

    /// One rank query; true iff `rank(S) = |S|`.
    pub fn is_independent(&self, s: &ElemSet) -> bool {
        self.rank(&SetExpr::of(s)) == s.len()
    }

    /// One rank query over an explicit element list.
    pub fn is_independent_slice(&self, elems: &[Element]) -> bool {
        self.rank(&SetExpr::from_slice(elems)) == elems.len()
    }
}

/// Outcome of dropping negative-weight elements: the kept ids (ascending)
/// and the old-id → new-id remapping.
#[derive(Debug, Clone)]
pub struct DiscardOutcome {
    pub kept: Vec<Element>,
    pub old_to_new: Vec<Option<Element>>,
}

/// Elements with negative weights can never improve a maximum-weight common
/// independent set, so the solve runs on the restricted ground set.
pub fn discard_negative(weights: &[i64]) -> DiscardOutcome {
    let mut kept = Vec::new();
    let mut old_to_new = vec![None; weights.len()];
    for (e, &w) in weights.iter().enumerate() {
        if w >= 0 {
            old_to_new[e] = Some(kept.len());
            kept.push(e);
        }
    }
    DiscardOutcome { kept, old_to_new }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> RankOracle {
        RankOracle::graphic(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn uniform_rank() {
        let m = RankOracle::uniform(4, 2);
        let s = ElemSet::from_elems(4, [0, 1, 2]);
        assert_eq!(m.rank(&SetExpr::of(&s)), 2);
        assert!(m.is_independent(&ElemSet::from_elems(4, [0, 1])));
        assert!(!m.is_independent(&ElemSet::from_elems(4, [0, 1, 2])));
    }

    #[test]
    fn partition_rank_by_enumeration() {
        // blocks {a,b},{c,d} caps 1,1; S={a,b,c} has max independent subset
        // of size 2 ({a,c} or {b,c})
        let m = RankOracle::partition(&[vec![0, 1], vec![2, 3]], &[1, 1]).unwrap();
        let s = ElemSet::from_elems(4, [0, 1, 2]);
        assert_eq!(m.rank(&SetExpr::of(&s)), 2);
    }

    #[test]
    fn graphic_triangle_rank() {
        let m = triangle();
        let s = ElemSet::from_elems(3, [0, 1, 2]);
        assert_eq!(m.rank(&SetExpr::of(&s)), 2);
        // 3-cycle is a circuit
        assert!(!m.is_independent(&s));
        assert!(m.is_independent(&ElemSet::from_elems(3, [0, 1])));
    }

    #[test]
    fn graphic_self_loop_is_loop() {
        let m = RankOracle::graphic(2, &[(0, 0), (0, 1)]).unwrap();
        assert_eq!(m.rank(&SetExpr::from_slice(&[0])), 0);
        assert_eq!(m.rank(&SetExpr::from_slice(&[0, 1])), 1);
    }

    #[test]
    fn gf2_rank() {
        // cols: e0=(1,0), e1=(0,1), e2=(1,1): any two independent, all three rank 2
        let m =
            RankOracle::linear_gf2(2, &[vec![true, false], vec![false, true], vec![true, true]])
                .unwrap();
        assert_eq!(m.rank(&SetExpr::from_slice(&[0, 1, 2])), 2);
        assert_eq!(m.rank(&SetExpr::from_slice(&[0, 2])), 2);
        assert_eq!(m.rank(&SetExpr::from_slice(&[2])), 1);
        // zero column is a loop
        let z = RankOracle::linear_gf2(2, &[vec![false, false]]).unwrap();
        assert_eq!(z.rank(&SetExpr::from_slice(&[0])), 0);
    }

    #[test]
    fn gf2_multiword_rows() {
        // 100 rows: unit columns at rows 0, 64, 99 plus their sum
        let rows = 100;
        let unit = |r: usize| {
            let mut v = vec![false; rows];
            v[r] = true;
            v
        };
        let mut sum = vec![false; rows];
        sum[0] = true;
        sum[64] = true;
        sum[99] = true;
        let m = RankOracle::linear_gf2(rows, &[unit(0), unit(64), unit(99), sum]).unwrap();
        assert_eq!(m.rank(&SetExpr::from_slice(&[0, 1, 2, 3])), 3);
        assert_eq!(m.rank(&SetExpr::from_slice(&[0, 1, 3])), 3);
        assert_eq!(m.rank(&SetExpr::from_slice(&[3])), 1);
    }

    #[test]
    fn truncate_examples() {
        let m = RankOracle::uniform(4, 3).truncate(2);
        assert_eq!(m.rank(&SetExpr::from_slice(&[0, 1, 2])), 2);
        let z = RankOracle::uniform(4, 3).truncate(0);
        assert_eq!(z.rank(&SetExpr::from_slice(&[0, 1, 2])), 0);
        let g = triangle().truncate(1);
        assert_eq!(g.rank(&SetExpr::from_slice(&[0, 1])), 1);
    }

    #[test]
    fn pad_examples() {
        // pad(truncate(uniform(2,1),1), 1): rank({z0}) = 1
        let m = RankOracle::uniform(2, 1)
            .truncate(1)
            .pad_with_free_elements(1);
        assert_eq!(m.ground_size(), 3);
        assert_eq!(m.rank(&SetExpr::from_slice(&[2])), 1);
        // rank(Z) = r
        let m2 = RankOracle::uniform(3, 2)
            .truncate(2)
            .pad_with_free_elements(2);
        assert_eq!(m2.rank(&SetExpr::from_slice(&[3, 4])), 2);
        // pad(truncate(partition {a,b} cap 1, 1), 1): rank({a, z0}) = min(1+1, 1) = 1
        let p = RankOracle::partition(&[vec![0, 1]], &[1])
            .unwrap()
            .truncate(1)
            .pad_with_free_elements(1);
        assert_eq!(p.rank(&SetExpr::from_slice(&[0, 2])), 1);
    }

    #[test]
    fn truncate_pad_composition_matches_direct() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let base =
            RankOracle::partition(&[vec![0, 1, 2], vec![3, 4], vec![5]], &[2, 1, 1]).unwrap();
        let r = 3;
        let padded = base.clone().truncate(r).pad_with_free_elements(r);
        let n_hat = padded.ground_size();
        for _ in 0..1000 {
            let elems: Vec<usize> = (0..n_hat).filter(|_| rng.gen_bool(0.5)).collect();
            let direct: Vec<usize> = elems.iter().copied().filter(|&e| e < 6).collect();
            let z = elems.len() - direct.len();
            let expect = (base.rank(&SetExpr::from_slice(&direct)) + z).min(r);
            let got = padded.rank(&SetExpr::from_slice(&elems));
            assert_eq!(got, expect);
            assert!(got <= r);
        }
    }

    #[test]
    fn set_expr_slices_and_card() {
        let m = RankOracle::partition(&[vec![0, 1], vec![2, 3]], &[1, 1]).unwrap();
        let s = ElemSet::from_elems(4, [0, 2]);
        // (S ∪ {1}) \ {0, 2} = {1}
        let expr = SetExpr::of(&s).plus(1).minus_slice(&[0, 2]);
        assert_eq!(expr.card(), 1);
        assert_eq!(m.rank(&expr), 1);
        // (S \ {0}) ∪ {1, 3} = {1, 2, 3}
        let expr = SetExpr::of(&s).minus(0).plus_slice(&[1, 3]);
        assert_eq!(expr.card(), 3);
        assert_eq!(m.rank(&expr), 2);
    }

    #[test]
    fn query_counter_counts_every_invocation() {
        let mut m = RankOracle::uniform(5, 3).truncate(2);
        let stats = Arc::new(QueryStats::new());
        m.attach_stats(Arc::clone(&stats), 1);
        let s = ElemSet::from_elems(5, [0, 1]);
        assert_eq!(stats.total(), 0);
        m.rank(&SetExpr::of(&s));
        m.is_independent(&s);
        assert_eq!(stats.count(Phase::Init, 1), 2);
        stats.set_phase(Phase::Sssp);
        m.rank(&SetExpr::of(&s));
        assert_eq!(stats.count(Phase::Sssp, 1), 1);
        assert_eq!(stats.total(), 3);
        {
            let _g = PhaseGuard::new(&stats, Phase::Verification);
            m.rank(&SetExpr::of(&s));
        }
        assert_eq!(stats.phase(), Phase::Sssp);
        assert_eq!(stats.count(Phase::Verification, 1), 1);
    }

    #[test]
    fn discard_negative_examples() {
        let out = discard_negative(&[3, -1, 0]);
        assert_eq!(out.kept, vec![0, 2]);
        assert_eq!(out.old_to_new, vec![Some(0), None, Some(1)]);
        let all_neg = discard_negative(&[-2, -7]);
        assert!(all_neg.kept.is_empty());
    }

    #[test]
    fn restrict_remaps_ids() {
        let m = triangle().restrict_to(&[0, 2]);
        assert_eq!(m.ground_size(), 2);
        // edges (0,1) and (0,2): share vertex 0, no cycle
        assert_eq!(m.rank(&SetExpr::from_slice(&[0, 1])), 2);
    }

    #[test]
    fn set_expr_matches_materialized_evaluation() {
        use proptest::prelude::*;

        let mut runner = proptest::test_runner::TestRunner::deterministic();
        let oracles = [
            RankOracle::uniform(12, 5),
            RankOracle::partition(
                &[vec![0, 1, 2, 3], vec![4, 5], vec![6, 7, 8, 9, 10, 11]],
                &[2, 1, 3],
            )
            .unwrap(),
            RankOracle::graphic(
                5,
                &[
                    (0, 1),
                    (1, 2),
                    (2, 3),
                    (3, 4),
                    (4, 0),
                    (0, 2),
                    (1, 3),
                    (2, 4),
                    (1, 4),
                    (0, 3),
                    (3, 3),
                    (0, 4),
                ],
            )
            .unwrap()
            .truncate(3)
            .pad_with_free_elements(3),
        ];
        // base set, removal choices from it, additions outside it
        let strategy = (
            proptest::collection::btree_set(0usize..12, 0..10),
            proptest::collection::vec(proptest::bool::ANY, 12),
            proptest::collection::vec(proptest::bool::ANY, 12),
        );
        runner
            .run(&strategy, |(base, take_out, put_in)| {
                for oracle in &oracles {
                    let n = oracle.ground_size();
                    let base: Vec<usize> = base.iter().copied().filter(|&e| e < n).collect();
                    let set = ElemSet::from_elems(n, base.iter().copied());
                    let removes: Vec<usize> =
                        base.iter().copied().filter(|&e| take_out[e]).collect();
                    let adds: Vec<usize> = (0..n.min(12))
                        .filter(|&e| put_in[e] && !set.contains(e))
                        .collect();
                    let (rm_one, rm_slice) = removes
                        .split_last()
                        .map_or((None, &removes[..]), |(last, rest)| (Some(*last), rest));
                    let (add_one, add_slice) = adds
                        .split_last()
                        .map_or((None, &adds[..]), |(last, rest)| (Some(*last), rest));
                    let mut expr = SetExpr::of(&set)
                        .plus_slice(add_slice)
                        .minus_slice(rm_slice);
                    expr.add_one = add_one;
                    expr.remove_one = rm_one;

                    let materialized: Vec<usize> = base
                        .iter()
                        .copied()
                        .filter(|e| !removes.contains(e))
                        .chain(adds.iter().copied())
                        .collect();
                    prop_assert_eq!(expr.card(), materialized.len());
                    prop_assert_eq!(
                        oracle.rank(&expr),
                        oracle.rank(&SetExpr::from_slice(&materialized))
                    );
                }
                Ok(())
            })
            .unwrap();
    }

    #[test]
    fn rank_axioms_sampled() {
        use rand::prelude::*;
        let oracles = [
            RankOracle::uniform(10, 4),
            RankOracle::partition(
                &[vec![0, 1, 2], vec![3, 4], vec![5, 6, 7, 8, 9]],
                &[1, 2, 2],
            )
            .unwrap(),
            RankOracle::graphic(
                5,
                &[
                    (0, 1),
                    (1, 2),
                    (2, 3),
                    (3, 4),
                    (4, 0),
                    (0, 2),
                    (1, 3),
                    (0, 0),
                    (2, 4),
                    (1, 4),
                ],
            )
            .unwrap(),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for m in &oracles {
            let n = m.ground_size();
            assert_eq!(m.rank(&SetExpr::from_slice(&[])), 0);
            for _ in 0..1000 {
                let a: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
                let b: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
                let ra = m.rank(&SetExpr::from_slice(&a));
                let rb = m.rank(&SetExpr::from_slice(&b));
                assert!(ra <= a.len());
                // monotonicity + unit increments
                let x = rng.gen_range(0..n);
                if !a.contains(&x) {
                    let mut ax = a.clone();
                    ax.push(x);
                    let rax = m.rank(&SetExpr::from_slice(&ax));
                    assert!(rax == ra || rax == ra + 1);
                }
                // submodularity
                let mut union: Vec<usize> = a.clone();
                for &e in &b {
                    if !union.contains(&e) {
                        union.push(e);
                    }
                }
                let inter: Vec<usize> = a.iter().copied().filter(|e| b.contains(e)).collect();
                let ru = m.rank(&SetExpr::from_slice(&union));
                let ri = m.rank(&SetExpr::from_slice(&inter));
                assert!(ra + rb >= ru + ri, "submodularity failed");
            }
        }
    }
}
