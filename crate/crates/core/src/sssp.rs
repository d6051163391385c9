//! Buffered shortest-path trees over the implicit exchange graph of an
//! ε-partial-solution.
//!
//! The exchange graph has an `E1` edge `(x, y)` of weight `w1(x) - w1(y)`
//! for every valid swap `(S1 \ {x}) ∪ {y}` and an `E2` edge `(y, x)` of
//! weight `w2(x) - w2(y)` for every valid swap `(S2 \ {x}) ∪ {y}`; both
//! weight families are non-negative while the bases are maximum. Instead of
//! materializing the `Θ(nr)` edges, Dijkstra defers relaxation through two
//! buffers of recently finalized vertices: once a buffer reaches `τ`
//! elements its outgoing edges are batch-relaxed with one binary-search
//! exchange probe per head (then the buffer clears); below the threshold,
//! each buffered vertex only relaxes its single best outgoing edge per
//! iteration.
//!
//! "Shortest path with fewest edges" is realized by hop-augmented combined
//! labels: every edge weight `w` is mapped to `w * (n_hat + 1) + 1`, so one
//! integer key orders by true distance first and hop count second.

use std::io::Write;

use crate::error::{Error, Result};
use crate::exchange::{find_insertion_exchange, find_removal_exchange};
use crate::matroid::{Element, Phase, PhaseGuard, SetExpr};
use crate::pool::{Objective, OrderedPool};
use crate::solver::SolveContext;
use crate::splitting::{PartialSolution, WeightSplit};
use crate::{exact, Num};

/// Which side of the exchange graph an edge belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeSide {
    E1,
    E2,
}

/// A path edge. For `E1`, `from ∈ S1` and `to ∉ S1`; for `E2`, `from ∉ S2`
/// and `to ∈ S2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathEdge {
    pub from: Element,
    pub to: Element,
    pub side: EdgeSide,
}

/// Hop-augmented combined distance: `true_distance * (n_hat + 1) + hops`.
/// Lexicographic `(distance, hops)` order coincides with combined order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DistanceLabel {
    pub combined: Num,
}

impl DistanceLabel {
    pub fn true_distance(self, multiplier: Num) -> Num {
        self.combined / multiplier
    }

    pub fn hops(self, multiplier: Num) -> Num {
        self.combined % multiplier
    }
}

/// Distance labels and the chosen source-to-sink path.
#[derive(Clone, Debug)]
pub struct ShortestPathResult {
    /// Combined labels per element; unreachable elements carry `sentinel`.
    pub labels: Vec<Num>,
    /// Finite stand-in strictly above any finite path weight.
    pub sentinel: Num,
    /// `n_hat + 1`.
    pub multiplier: Num,
    /// Reachability per element (false means `labels[x] == sentinel`).
    pub reached: Vec<bool>,
    /// The chosen sink-side element: minimal `(label, id)` over `S2 \ S1`.
    pub target: Element,
    /// Combined label of the virtual sink `t`: `labels[target] + 1`.
    pub t_label: Num,
    /// Alternating path from `S1 \ S2` to `target`, earliest edge first.
    pub path: Vec<PathEdge>,
    /// Rank queries spent by this call (sssp phase only).
    pub queries: u64,
    /// Batch-relaxation flushes per side.
    pub case1_fires: [u32; 2],
    pub iterations: u32,
}

impl ShortestPathResult {
    pub fn label(&self, x: Element) -> DistanceLabel {
        DistanceLabel {
            combined: self.labels[x],
        }
    }

    /// True distance used by the weight update; `2 * n_hat * M + 1` for
    /// unreachable elements.
    pub fn true_distance(&self, x: Element) -> Num {
        self.labels[x] / self.multiplier
    }
}

/// Sentinel for unreachable vertices: `(n_hat + 1) * (2 * n_hat * M + 1)` in
/// combined units, with `M` the largest current `|w_i(x)|`. Any finite path
/// has at most `n_hat` edges of true weight at most `2M`, so this strictly
/// exceeds every finite combined label.
pub fn unreachable_sentinel(n_hat: usize, split: &WeightSplit) -> Num {
    let m = split
        .w1
        .iter()
        .chain(split.w2.iter())
        .map(|&w| w.abs())
        .max()
        .unwrap_or(0);
    let n = n_hat as Num;
    exact::mul(n + 1, exact::add(exact::mul(2, exact::mul(n, m)), 1))
}

const INF: Num = Num::MAX;

/// In-progress Dijkstra state over the implicit exchange graph: finalized
/// set, the two buffers with their keyed pools, the two candidate pools of
/// unvisited edge heads, estimates and parents.
pub(crate) struct ExchangeGraphView<'a> {
    ctx: &'a SolveContext<'a>,
    sol: &'a PartialSolution,
    mult: Num,
    tau: usize,
    pub(crate) d_hat: Vec<Num>,
    labels: Vec<Num>,
    finalized: Vec<bool>,
    parent: Vec<Option<PathEdge>>,
    queue: OrderedPool,
    /// Unvisited heads of `E1` (elements outside `S1`), keyed by `w1`
    /// descending: case-2 probes want the head maximizing `w1`.
    cand1: OrderedPool,
    /// Unvisited heads of `E2` (elements of `S2`), keyed by `w2` ascending.
    cand2: OrderedPool,
    /// Buffered vertices per side, in finalization order, with their best
    /// known outgoing edge (None = not yet computed, Some(None) = no edge).
    buf1: Vec<Element>,
    buf2: Vec<Element>,
    cache1: Vec<Option<Option<(Element, Num)>>>,
    cache2: Vec<Option<Option<(Element, Num)>>>,
    /// Buffer pools: `B1` keyed `label + mult * w1`, `B2` keyed
    /// `label - mult * w2`, both ascending.
    pool_b1: OrderedPool,
    pool_b2: OrderedPool,
    pub(crate) case1_fires: [u32; 2],
    iterations: u32,
    last_pop: Num,
}

impl<'a> ExchangeGraphView<'a> {
    pub(crate) fn new(ctx: &'a SolveContext<'a>, sol: &'a PartialSolution) -> Self {
        let n = ctx.n_hat;
        let mult = n as Num + 1;
        let r = sol.s1.len();
        let tau = buffer_threshold(ctx, r);
        let mut d_hat = vec![INF; n];
        let mut queue = OrderedPool::with_capacity(n);
        for x in sol.s1.iter() {
            if !sol.s2.contains(x) {
                d_hat[x] = 0;
                queue.insert(x, 0);
            }
        }
        let cand1 = OrderedPool::from_priorities(
            Objective::Max,
            (0..n)
                .filter(|&e| !sol.s1.contains(e))
                .map(|e| (e, sol.split.w1[e])),
        );
        let cand2 = OrderedPool::from_priorities(
            Objective::Min,
            sol.s2.iter().map(|e| (e, sol.split.w2[e])),
        );
        ExchangeGraphView {
            ctx,
            sol,
            mult,
            tau,
            d_hat,
            labels: vec![0; n],
            finalized: vec![false; n],
            parent: vec![None; n],
            queue,
            cand1,
            cand2,
            buf1: Vec::new(),
            buf2: Vec::new(),
            cache1: Vec::new(),
            cache2: Vec::new(),
            pool_b1: OrderedPool::new(),
            pool_b2: OrderedPool::new(),
            case1_fires: [0, 0],
            iterations: 0,
            last_pop: 0,
        }
    }

    /// Pops and finalizes the next vertex, then relaxes through the buffers
    /// (Case 1 flush at `|B_i| >= tau`, else Case 2 best-edge probes).
    /// Returns the finalized vertex, its label, and which sides flushed, or
    /// `None` once the queue is exhausted.
    pub(crate) fn step(&mut self) -> Result<Option<(Element, Num, [bool; 2])>> {
        let Some((v, dv)) = self.queue.first() else {
            return Ok(None);
        };
        self.queue.remove(v, dv);
        if dv < self.last_pop {
            return Err(Error::Invariant(format!(
                "finalization order regressed: {} after {}",
                dv, self.last_pop
            )));
        }
        self.last_pop = dv;
        self.iterations += 1;
        self.finalized[v] = true;
        self.labels[v] = dv;

        let w1 = &self.sol.split.w1;
        let w2 = &self.sol.split.w2;
        if !self.sol.s1.contains(v) {
            self.cand1.remove(v, Objective::Max.key_for(w1[v]));
        }
        if self.sol.s2.contains(v) {
            self.cand2.remove(v, w2[v]);
        }

        if self.sol.s1.contains(v) {
            self.buf1.push(v);
            self.cache1.push(None);
            self.pool_b1
                .insert(v, exact::add(dv, exact::mul(self.mult, w1[v])));
        }
        if !self.sol.s2.contains(v) {
            self.buf2.push(v);
            self.cache2.push(None);
            self.pool_b2
                .insert(v, exact::sub(dv, exact::mul(self.mult, w2[v])));
        }

        let mut flushed = [false, false];
        if self.buf1.len() >= self.tau {
            self.batch_relax(EdgeSide::E1)?;
            self.buf1.clear();
            self.cache1.clear();
            self.pool_b1.clear();
            self.case1_fires[0] += 1;
            flushed[0] = true;
        } else {
            self.relax_buffer_best_edges(EdgeSide::E1)?;
        }
        if self.buf2.len() >= self.tau {
            self.batch_relax(EdgeSide::E2)?;
            self.buf2.clear();
            self.cache2.clear();
            self.pool_b2.clear();
            self.case1_fires[1] += 1;
            flushed[1] = true;
        } else {
            self.relax_buffer_best_edges(EdgeSide::E2)?;
        }

        Ok(Some((v, dv, flushed)))
    }

    /// Case 1: relax every edge from the buffer with one exchange probe per
    /// unvisited head, `d_hat(v) <- min(d_hat(v), d~(v, E(B_i)))`.
    ///
    /// A head whose estimate is already at most the cheapest possible
    /// buffer-edge value is skipped without a probe; the relaxation could
    /// not lower it.
    pub(crate) fn batch_relax(&mut self, side: EdgeSide) -> Result<()> {
        let mult = self.mult;
        let w1 = &self.sol.split.w1;
        let w2 = &self.sol.split.w2;
        match side {
            EdgeSide::E1 => {
                let Some(min_key) = self.pool_b1.min_key() else {
                    return Ok(());
                };
                for ti in 0..self.cand1.len() {
                    let (v, _) = self.cand1.kth(ti).unwrap();
                    let floor = exact::add(exact::sub(min_key, exact::mul(mult, w1[v])), 1);
                    if self.d_hat[v] <= floor {
                        continue;
                    }
                    if let Some(b) =
                        find_removal_exchange(self.ctx.m1, &self.sol.s1, v, &self.pool_b1)
                    {
                        let true_w = exact::sub(w1[b], w1[v]);
                        if true_w < 0 {
                            return Err(Error::MaximalityViolated(format!(
                                "negative E1 edge ({b} -> {v}): w1 {} -> {}",
                                w1[b], w1[v]
                            )));
                        }
                        let cand = combine(self.labels[b], true_w, mult);
                        relax(
                            &mut self.d_hat,
                            &mut self.queue,
                            &mut self.parent,
                            v,
                            cand,
                            PathEdge {
                                from: b,
                                to: v,
                                side: EdgeSide::E1,
                            },
                        );
                    }
                }
            }
            EdgeSide::E2 => {
                let Some(min_key) = self.pool_b2.min_key() else {
                    return Ok(());
                };
                for ti in 0..self.cand2.len() {
                    let (v, _) = self.cand2.kth(ti).unwrap();
                    let floor = exact::add(exact::add(min_key, exact::mul(mult, w2[v])), 1);
                    if self.d_hat[v] <= floor {
                        continue;
                    }
                    if let Some(b) =
                        find_insertion_exchange(self.ctx.m2, &self.sol.s2, v, &self.pool_b2)
                    {
                        let true_w = exact::sub(w2[v], w2[b]);
                        if true_w < 0 {
                            return Err(Error::MaximalityViolated(format!(
                                "negative E2 edge ({b} -> {v}): w2 {} -> {}",
                                w2[b], w2[v]
                            )));
                        }
                        let cand = combine(self.labels[b], true_w, mult);
                        relax(
                            &mut self.d_hat,
                            &mut self.queue,
                            &mut self.parent,
                            v,
                            cand,
                            PathEdge {
                                from: b,
                                to: v,
                                side: EdgeSide::E2,
                            },
                        );
                    }
                }
            }
        }
        Ok(())
    }

    /// Case 2: each buffered vertex relaxes only its best outgoing edge.
    /// The best head of `b` stays valid until it gets finalized (candidate
    /// pools only shrink), so the probe result is cached until then.
    fn relax_buffer_best_edges(&mut self, side: EdgeSide) -> Result<()> {
        let mult = self.mult;
        let w1 = &self.sol.split.w1;
        let w2 = &self.sol.split.w2;
        let (buf, cache) = match side {
            EdgeSide::E1 => (&self.buf1, &mut self.cache1),
            EdgeSide::E2 => (&self.buf2, &mut self.cache2),
        };
        for (i, &b) in buf.iter().enumerate() {
            let cached = cache[i];
            let entry = match cached {
                Some(Some((y, cand))) if !self.finalized[y] => Some((y, cand)),
                Some(None) => None,
                _ => {
                    // recompute: previous best head (if any) was consumed
                    let found =
                        match side {
                            EdgeSide::E1 => {
                                find_insertion_exchange(self.ctx.m1, &self.sol.s1, b, &self.cand1)
                                    .map(|y| {
                                        let true_w = exact::sub(w1[b], w1[y]);
                                        (y, true_w)
                                    })
                            }
                            EdgeSide::E2 => {
                                find_removal_exchange(self.ctx.m2, &self.sol.s2, b, &self.cand2)
                                    .map(|y| {
                                        let true_w = exact::sub(w2[y], w2[b]);
                                        (y, true_w)
                                    })
                            }
                        };
                    let entry = match found {
                        None => None,
                        Some((y, true_w)) => {
                            if true_w < 0 {
                                return Err(Error::MaximalityViolated(format!(
                                    "negative {side:?} edge ({b} -> {y})"
                                )));
                            }
                            Some((y, combine(self.labels[b], true_w, mult)))
                        }
                    };
                    cache[i] = Some(entry);
                    entry
                }
            };
            if let Some((y, cand)) = entry {
                relax(
                    &mut self.d_hat,
                    &mut self.queue,
                    &mut self.parent,
                    y,
                    cand,
                    PathEdge {
                        from: b,
                        to: y,
                        side,
                    },
                );
            }
        }
        Ok(())
    }

    /// Explicit-scan verification of the two Dijkstra invariants, for small
    /// instances under raised assertion levels. Checks that every estimate
    /// is at most its relaxation through non-buffered finalized edges, and
    /// that some unfinalized vertex already carries the next exact distance.
    fn debug_check_invariants(&self) -> Result<()> {
        let _phase = PhaseGuard::new(self.ctx.stats, Phase::Verification);
        let n = self.ctx.n_hat;
        let mult = self.mult;
        let w1 = &self.sol.split.w1;
        let w2 = &self.sol.split.w2;
        let mut d_star = INF;
        for v in 0..n {
            if self.finalized[v] {
                continue;
            }
            let mut best_outside_buffers = INF;
            let mut best_all = INF;
            if !self.sol.s1.contains(v) {
                for u in self.sol.s1.iter() {
                    if !self.finalized[u] {
                        continue;
                    }
                    let valid = self
                        .ctx
                        .m1
                        .rank(&SetExpr::of(&self.sol.s1).minus(u).plus(v))
                        == self.sol.s1.len();
                    if !valid {
                        continue;
                    }
                    let cand = combine(self.labels[u], exact::sub(w1[u], w1[v]), mult);
                    best_all = best_all.min(cand);
                    if !self.buf1.contains(&u) {
                        best_outside_buffers = best_outside_buffers.min(cand);
                    }
                }
            }
            if self.sol.s2.contains(v) {
                for u in 0..n {
                    if self.sol.s2.contains(u) || !self.finalized[u] {
                        continue;
                    }
                    let valid = self
                        .ctx
                        .m2
                        .rank(&SetExpr::of(&self.sol.s2).minus(v).plus(u))
                        == self.sol.s2.len();
                    if !valid {
                        continue;
                    }
                    let cand = combine(self.labels[u], exact::sub(w2[v], w2[u]), mult);
                    best_all = best_all.min(cand);
                    if !self.buf2.contains(&u) {
                        best_outside_buffers = best_outside_buffers.min(cand);
                    }
                }
            }
            if self.d_hat[v] > best_outside_buffers {
                return Err(Error::Invariant(format!(
                    "estimate invariant broken at {v}: d_hat {} > relaxed {}",
                    self.d_hat[v], best_outside_buffers
                )));
            }
            d_star = d_star.min(best_all);
        }
        if d_star != INF {
            let witnessed = (0..n).any(|v| !self.finalized[v] && self.d_hat[v] == d_star);
            if !witnessed {
                return Err(Error::Invariant(format!(
                    "frontier invariant broken: no unfinalized vertex holds d* = {d_star}"
                )));
            }
        }
        Ok(())
    }
}

fn buffer_threshold(ctx: &SolveContext, r: usize) -> usize {
    ctx.config.buffer_threshold(r)
}

#[inline]
fn combine(base_label: Num, true_weight: Num, mult: Num) -> Num {
    exact::add(base_label, exact::add(exact::mul(true_weight, mult), 1))
}

fn relax(
    d_hat: &mut [Num],
    queue: &mut OrderedPool,
    parent: &mut [Option<PathEdge>],
    v: Element,
    cand: Num,
    edge: PathEdge,
) {
    if cand < d_hat[v] {
        if d_hat[v] != INF {
            queue.remove(v, d_hat[v]);
        }
        queue.insert(v, cand);
        d_hat[v] = cand;
        parent[v] = Some(edge);
    }
}

/// Builds the full shortest-path tree from the source side `S1 \ S2` and
/// extracts the combined-minimal path to the sink side `S2 \ S1`.
///
/// Runs Dijkstra to queue exhaustion, so every reachable vertex carries its
/// exact hop-augmented label; unreachable vertices get the finite sentinel.
/// The sink label is the minimum over `S2 \ S1` of `label + 1` (the
/// zero-weight sink edge costs one hop); sink edges are never materialized.
pub fn shortest_path_tree(
    ctx: &SolveContext,
    sol: &PartialSolution,
    mut trace: Option<&mut dyn Write>,
) -> Result<ShortestPathResult> {
    assert!(!sol.is_solution(), "shortest_path_tree requires S1 != S2");
    let _phase = PhaseGuard::new(ctx.stats, Phase::Sssp);
    let queries_before = ctx.stats.phase_total(Phase::Sssp);
    let n = ctx.n_hat;
    let r = sol.s1.len();
    let mut view = ExchangeGraphView::new(ctx, sol);
    let check_invariants = ctx.config.debug_assert_level >= 1 && n <= 64;

    while let Some((v, dv, flushed)) = view.step()? {
        if check_invariants && !view.queue.is_empty() {
            view.debug_check_invariants()?;
        }
        if let Some(w) = trace.as_deref_mut() {
            let queries = ctx.stats.phase_total(Phase::Sssp) - queries_before;
            writeln!(
                w,
                "{{\"iter\":{},\"popped\":{},\"label\":{},\"b1\":{},\"b2\":{},\
                 \"case\":[{},{}],\"queries\":{}}}",
                view.iterations,
                v,
                dv,
                view.buf1.len(),
                view.buf2.len(),
                if flushed[0] { 1 } else { 2 },
                if flushed[1] { 1 } else { 2 },
                queries
            )?;
        }
    }

    let mult = view.mult;
    let sentinel = unreachable_sentinel(n, &sol.split);
    let mut labels = vec![sentinel; n];
    let mut reached = vec![false; n];
    for x in 0..n {
        if view.finalized[x] {
            labels[x] = view.labels[x];
            reached[x] = true;
        }
    }

    let target = sol
        .s2
        .iter()
        .filter(|&x| !sol.s1.contains(x) && view.finalized[x])
        .min_by_key(|&x| (labels[x], x))
        .ok_or_else(|| {
            Error::NoStPath(format!(
                "no sink-side element reachable (|S1 \\ S2| = {})",
                r - sol.s1.intersection_len(&sol.s2)
            ))
        })?;

    let path = extract_path(ctx, sol, &labels, &reached, mult, target)?;

    let case1_bound_1 = r.div_ceil(view.tau) + 1;
    let case1_bound_2 = n.div_ceil(view.tau) + 1;
    if view.case1_fires[0] as usize > case1_bound_1 || view.case1_fires[1] as usize > case1_bound_2
    {
        return Err(Error::Invariant(format!(
            "buffer flush counts {:?} exceed bounds ({case1_bound_1}, {case1_bound_2})",
            view.case1_fires
        )));
    }

    let queries = ctx.stats.phase_total(Phase::Sssp) - queries_before;
    if ctx.config.buffer_exponent == 0.5 {
        let budget = 10.0 * (n as f64) * (view.tau as f64) * ((n as f64) + 2.0).log2().max(1.0);
        if queries as f64 > budget {
            return Err(Error::Invariant(format!(
                "sssp query budget exceeded: {queries} > {budget:.0} (n_hat={n}, tau={})",
                view.tau
            )));
        }
    }

    Ok(ShortestPathResult {
        t_label: exact::add(labels[target], 1),
        labels,
        sentinel,
        multiplier: mult,
        reached,
        target,
        path,
        queries,
        case1_fires: view.case1_fires,
        iterations: view.iterations,
    })
}

/// Walks backward from `target` along tight edges. At every vertex the
/// predecessor is chosen canonically — the minimal `(id, side)` among tight
/// incoming edges, preferring `E1` on a parallel tie — so the reported path
/// is a deterministic function of the labels alone. Verification oracles
/// reproduce the same rule.
fn extract_path(
    ctx: &SolveContext,
    sol: &PartialSolution,
    labels: &[Num],
    reached: &[bool],
    mult: Num,
    target: Element,
) -> Result<Vec<PathEdge>> {
    let w1 = &sol.split.w1;
    let w2 = &sol.split.w2;
    let n = ctx.n_hat;
    // pools of finalized potential tails, keyed by tight-edge key
    let tails1 = OrderedPool::from_priorities(
        Objective::Min,
        sol.s1
            .iter()
            .filter(|&u| reached[u])
            .map(|u| (u, exact::add(labels[u], exact::mul(mult, w1[u])))),
    );
    let tails2 = OrderedPool::from_priorities(
        Objective::Min,
        (0..n)
            .filter(|&u| !sol.s2.contains(u) && reached[u])
            .map(|u| (u, exact::sub(labels[u], exact::mul(mult, w2[u])))),
    );

    let mut rev = Vec::new();
    let mut cur = target;
    while labels[cur] != 0 {
        let mut best: Option<PathEdge> = None;
        if !sol.s1.contains(cur) {
            if let Some(u) = find_removal_exchange(ctx.m1, &sol.s1, cur, &tails1) {
                let key = exact::add(labels[u], exact::mul(mult, w1[u]));
                let need = exact::add(exact::sub(labels[cur], 1), exact::mul(mult, w1[cur]));
                if key == need {
                    best = Some(PathEdge {
                        from: u,
                        to: cur,
                        side: EdgeSide::E1,
                    });
                }
            }
        }
        if sol.s2.contains(cur) {
            if let Some(u) = find_insertion_exchange(ctx.m2, &sol.s2, cur, &tails2) {
                let key = exact::sub(labels[u], exact::mul(mult, w2[u]));
                let need = exact::sub(exact::sub(labels[cur], 1), exact::mul(mult, w2[cur]));
                if key == need {
                    let candidate = PathEdge {
                        from: u,
                        to: cur,
                        side: EdgeSide::E2,
                    };
                    best = match best {
                        Some(e1) if e1.from <= u => Some(e1),
                        _ => Some(candidate),
                    };
                }
            }
        }
        let edge = best.ok_or_else(|| {
            Error::Invariant(format!(
                "no tight predecessor at {cur} (label {})",
                labels[cur]
            ))
        })?;
        rev.push(edge);
        cur = edge.from;
        if rev.len() > n {
            return Err(Error::Invariant("path extraction did not terminate".into()));
        }
    }
    if !(sol.s1.contains(cur) && !sol.s2.contains(cur)) {
        return Err(Error::Invariant(format!(
            "path start {cur} is not in S1 \\ S2"
        )));
    }
    rev.reverse();
    for pair in rev.windows(2) {
        if pair[0].to != pair[1].from {
            return Err(Error::Invariant("path edges do not chain".into()));
        }
    }
    Ok(rev)
}
