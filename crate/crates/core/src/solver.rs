//! End-to-end pipeline: preprocessing, unweighted initialization, the
//! scaling loop, final rounding, and standalone optimality certification.

use std::collections::VecDeque;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use crate::augment::apply_augmentation;
use crate::error::{Error, Result};
use crate::exchange::{
    find_extension, find_insertion_exchange, find_removal_exchange, greedy_max_basis,
};
use crate::matroid::{
    discard_negative, ElemSet, Element, Phase, PhaseGuard, QueryStats, RankOracle, SetExpr,
};
use crate::pool::{Objective, OrderedPool};
use crate::report::{budget_ratio, QueryBreakdown, RoundTelemetry, RunReport};
use crate::splitting::{adjust_weights, initial_solution, PartialSolution};
use crate::sssp::shortest_path_tree;
use crate::{exact, Num};

/// How the power-of-two pre-multiplier for the input weights is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalePolicy {
    /// Smallest `s` with `2^s >= 4r`; makes the integer descent to `ε = 1`
    /// equivalent to the fractional descent below `1/(2r)`.
    Auto,
    /// Fixed exponent, validated against the same inequality.
    Fixed(u32),
}

/// Solver knobs. The defaults realize the headline query bound; overrides
/// exist for experiments and tests.
#[derive(Clone, Debug)]
pub struct SolveConfig {
    /// `k = max(1, ceil(r^k_exponent))` adjustment potential cap.
    pub k_exponent: f64,
    /// Buffer flush threshold `τ = max(1, ceil(r^buffer_exponent))`.
    pub buffer_exponent: f64,
    pub k_override: Option<usize>,
    pub scale_policy: ScalePolicy,
    /// 0 = contract checks only, 1 = invariant scans on small instances,
    /// 2 = per-step maximality spot checks as well.
    pub debug_assert_level: u8,
    /// Seed for randomized harnesses; the solve itself is deterministic.
    pub seed: u64,
    /// Adjustment processes eligible elements FIFO by default; a seeded
    /// random order exists to guard against order-dependent bugs (the exit
    /// bounds must hold for any order).
    pub adjustment_shuffle_seed: Option<u64>,
    /// Newline-delimited JSON trace of every Dijkstra iteration.
    pub trace_path: Option<PathBuf>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            k_exponent: 0.75,
            buffer_exponent: 0.5,
            k_override: None,
            scale_policy: ScalePolicy::Auto,
            debug_assert_level: 0,
            seed: 0,
            adjustment_shuffle_seed: None,
            trace_path: None,
        }
    }
}

impl SolveConfig {
    pub fn k_for(&self, r: usize) -> usize {
        let k = self
            .k_override
            .unwrap_or_else(|| (r as f64).powf(self.k_exponent).ceil() as usize);
        k.clamp(1, r.max(1))
    }

    pub fn buffer_threshold(&self, r: usize) -> usize {
        ((r as f64).powf(self.buffer_exponent).ceil() as usize).max(1)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k_exponent", self.k_exponent),
            ("buffer_exponent", self.buffer_exponent),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Contract(format!("{name} {v} outside (0, 1]")));
            }
        }
        Ok(())
    }
}

/// Shared per-solve state threaded through the phases.
pub struct SolveContext<'a> {
    pub m1: &'a RankOracle,
    pub m2: &'a RankOracle,
    /// Scaled non-negative weights over the padded ground set.
    pub w_scaled: &'a [Num],
    pub n_hat: usize,
    pub scale_exp: u32,
    pub config: &'a SolveConfig,
    pub stats: &'a QueryStats,
}

/// A standalone optimality proof: the final unit splitting, the common
/// basis, and everything needed to rebuild the transformed oracles.
#[derive(Clone, Debug)]
pub struct Certificate {
    /// Original ids the solve ran on (non-negative weight, non-loop),
    /// ascending.
    pub kept: Vec<Element>,
    pub r: usize,
    pub scale_exp: u32,
    /// Final splitting at ε = 1 scaled unit, over the padded domain.
    pub w1: Vec<Num>,
    pub w2: Vec<Num>,
    /// Padded-domain ids of the final common basis.
    pub s_star: Vec<Element>,
    /// Original-scale weight of the returned solution.
    pub claimed_weight: i128,
}

/// Reason codes for certificate rejection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertFailure {
    GroundMismatch(String),
    /// A discarded element is neither negative-weight nor a loop.
    DiscardUnjustified(Element),
    /// Recomputed max-cardinality intersection size differs.
    RankMismatch {
        claimed: usize,
        actual: usize,
    },
    SplitBound(Element),
    NotCommonBasis,
    /// 1 or 2: which side's greedy beat the certified basis.
    NotMaximum(u8),
    WeightMismatch,
}

impl std::fmt::Display for CertFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Full solve output.
#[derive(Clone, Debug)]
pub struct SolveOutput {
    /// Original-domain ids of a maximum-weight common independent set,
    /// ascending.
    pub solution: Vec<Element>,
    pub weight: i128,
    pub certificate: Certificate,
    pub report: RunReport,
}

/// Computes a maximum-cardinality common independent set by repeated
/// shortest augmenting paths over the unweighted exchange graph, after a
/// greedy warm start. Edge discovery extracts-and-removes candidates from
/// id-ordered pools, so each discovered vertex costs `O(log n)` queries.
pub fn max_cardinality_intersection(m1: &RankOracle, m2: &RankOracle) -> Result<(ElemSet, usize)> {
    assert_eq!(m1.ground_size(), m2.ground_size());
    let _p1 = PhaseGuard::new(m1.stats(), Phase::Init);
    let _p2 = PhaseGuard::new(m2.stats(), Phase::Init);
    let n = m1.ground_size();
    let mut s = ElemSet::new(n);

    // maximal common independent set greedily: at least half of optimum,
    // halving the number of augmenting-path searches
    for e in 0..n {
        if m1.rank(&SetExpr::of(&s).plus(e)) == s.len() + 1
            && m2.rank(&SetExpr::of(&s).plus(e)) == s.len() + 1
        {
            s.insert(e);
        }
    }

    loop {
        // BFS over the unweighted exchange graph of S, stopping at the
        // first sink-adjacent vertex (all augmenting paths found this way
        // are shortest in edge count)
        let mut parent: Vec<Option<Element>> = vec![None; n];
        let mut pool_out = OrderedPool::from_priorities(
            Objective::Min,
            (0..n).filter(|&e| !s.contains(e)).map(|e| (e, e as Num)),
        );
        let mut pool_in =
            OrderedPool::from_priorities(Objective::Min, s.iter().map(|e| (e, e as Num)));
        let mut queue: VecDeque<Element> = VecDeque::new();

        while let Some(x) = find_extension(m1, &s, &pool_out) {
            pool_out.remove(x, x as Num);
            queue.push_back(x);
        }

        let mut endpoint: Option<Element> = None;
        'bfs: while let Some(u) = queue.pop_front() {
            if !s.contains(u) {
                if m2.rank(&SetExpr::of(&s).plus(u)) == s.len() + 1 {
                    endpoint = Some(u);
                    break 'bfs;
                }
                while let Some(x) = find_removal_exchange(m2, &s, u, &pool_in) {
                    pool_in.remove(x, x as Num);
                    parent[x] = Some(u);
                    queue.push_back(x);
                }
            } else {
                while let Some(y) = find_insertion_exchange(m1, &s, u, &pool_out) {
                    pool_out.remove(y, y as Num);
                    parent[y] = Some(u);
                    queue.push_back(y);
                }
            }
        }

        let Some(endpoint) = endpoint else {
            break;
        };
        let mut cur = Some(endpoint);
        while let Some(e) = cur {
            if s.contains(e) {
                s.remove(e);
            } else {
                s.insert(e);
            }
            cur = parent[e];
        }
        if m1.rank(&SetExpr::of(&s)) != s.len() || m2.rank(&SetExpr::of(&s)) != s.len() {
            return Err(Error::Invariant(
                "augmenting path produced a dependent set".into(),
            ));
        }
    }

    let r = s.len();
    Ok((s, r))
}

/// Telemetry of one refine round.
#[derive(Clone, Debug)]
pub struct RefineReport {
    pub k: usize,
    pub adjustment_steps: u64,
    pub diff_after_adjust: usize,
    pub augmentations: u32,
    pub adjustment: crate::splitting::AdjustmentReport,
}

/// One scaling round: halve ε by weight adjustment, then augment along
/// shortest fewest-edge paths until the bases coincide.
pub fn refine(
    ctx: &SolveContext,
    sol: &PartialSolution,
    trace: &mut Option<Box<dyn Write>>,
) -> Result<(PartialSolution, RefineReport)> {
    let r = sol.s1.len();
    let k = ctx.config.k_for(r);
    let (mut cur, adj_report) = adjust_weights(ctx, sol, k)?;
    let diff_after_adjust = adj_report.exit_diff;
    let max_augmentations = (2 * r).div_ceil(k);
    let mut augmentations = 0u32;
    while !cur.is_solution() {
        let res = shortest_path_tree(ctx, &cur, trace.as_mut().map(|w| w as &mut dyn Write))?;
        let (next, _record) = apply_augmentation(ctx, &cur, &res)?;
        cur = next;
        augmentations += 1;
        if augmentations as usize > max_augmentations {
            return Err(Error::Invariant(format!(
                "{augmentations} augmentations exceed ceil(2r/k) = {max_augmentations}"
            )));
        }
    }
    Ok((
        cur,
        RefineReport {
            k,
            adjustment_steps: adj_report.steps,
            diff_after_adjust,
            augmentations,
            adjustment: adj_report,
        },
    ))
}

fn scale_exponent(policy: ScalePolicy, r: usize) -> Result<u32> {
    let auto = (4 * r.max(1)).next_power_of_two().trailing_zeros();
    match policy {
        ScalePolicy::Auto => Ok(auto),
        ScalePolicy::Fixed(s) => {
            if (1u128 << s) < 4 * r as u128 {
                return Err(Error::Contract(format!(
                    "fixed scale exponent {s} violates 2^s >= 4r (r = {r})"
                )));
            }
            Ok(s)
        }
    }
}

struct Preprocessed {
    /// Original ids surviving both discards, ascending.
    kept: Vec<Element>,
    w_kept: Vec<i64>,
    m1: RankOracle,
    m2: RankOracle,
}

/// Drops negative-weight elements, then elements of single-element rank zero
/// in either matroid. Neither kind can appear in any common independent set
/// (negatives never help, loops are in no independent set), and removing
/// loops keeps them out of every exchange graph where they would sit
/// permanently unreachable.
fn preprocess(
    m1: RankOracle,
    m2: RankOracle,
    w: &[i64],
    stats: &QueryStats,
) -> Result<Preprocessed> {
    let _phase = PhaseGuard::new(stats, Phase::Init);
    let nonneg = discard_negative(w);
    let m1 = m1.restrict_to(&nonneg.kept);
    let m2 = m2.restrict_to(&nonneg.kept);
    let mut kept = Vec::new();
    for (e, &orig) in nonneg.kept.iter().enumerate() {
        let singleton = [e];
        if m1.rank(&SetExpr::from_slice(&singleton)) == 1
            && m2.rank(&SetExpr::from_slice(&singleton)) == 1
        {
            kept.push(orig);
        }
    }
    let local: Vec<Element> = kept
        .iter()
        .map(|&orig| nonneg.old_to_new[orig].unwrap())
        .collect();
    let m1 = m1.restrict_to(&local);
    let m2 = m2.restrict_to(&local);
    let w_kept: Vec<i64> = kept.iter().map(|&orig| w[orig]).collect();
    Ok(Preprocessed {
        kept,
        w_kept,
        m1,
        m2,
    })
}

/// Exact maximum-weight common independent set through rank oracles.
///
/// Pipeline: preprocessing, max-cardinality initialization, truncation and
/// zero-weight padding to a common rank `r`, power-of-two weight scaling,
/// then one refine round per halving of ε down to one scaled unit, where
/// integrality certifies optimality.
pub fn solve(
    m1: RankOracle,
    m2: RankOracle,
    w: &[i64],
    config: &SolveConfig,
) -> Result<SolveOutput> {
    config.validate()?;
    let n = w.len();
    if m1.ground_size() != n || m2.ground_size() != n {
        return Err(Error::InstanceFormat(format!(
            "weights cover {n} elements but oracles cover {} and {}",
            m1.ground_size(),
            m2.ground_size()
        )));
    }
    let started = Instant::now();
    let stats = Arc::new(QueryStats::new());
    let mut m1 = m1;
    let mut m2 = m2;
    m1.attach_stats(Arc::clone(&stats), 0);
    m2.attach_stats(Arc::clone(&stats), 1);
    let w_max = w.iter().map(|&x| x.abs()).max().unwrap_or(0);

    let pre = preprocess(m1, m2, w, &stats)?;
    let m = pre.kept.len();
    if m == 0 {
        return Ok(trivial_output(n, w_max, &pre, 0, &stats, started));
    }

    let (s0, r) = max_cardinality_intersection(&pre.m1, &pre.m2)?;
    if r == 0 {
        return Ok(trivial_output(n, w_max, &pre, 0, &stats, started));
    }

    let m1p = pre.m1.clone().truncate(r).pad_with_free_elements(r);
    let m2p = pre.m2.clone().truncate(r).pad_with_free_elements(r);
    let n_hat = m + r;
    let scale_exp = scale_exponent(config.scale_policy, r)?;
    let unit: Num = 1i128 << scale_exp;
    let mut w_scaled = vec![0 as Num; n_hat];
    for (slot, &w) in w_scaled.iter_mut().zip(pre.w_kept.iter()) {
        *slot = exact::mul(w as Num, unit);
    }

    let ctx = SolveContext {
        m1: &m1p,
        m2: &m2p,
        w_scaled: &w_scaled,
        n_hat,
        scale_exp,
        config,
        stats: &stats,
    };

    let s0 = ElemSet::from_elems(n_hat, s0.iter());
    let mut sol = initial_solution(&ctx, &s0);
    let eps0 = sol.split.epsilon;
    let expected_rounds = eps0.trailing_zeros();

    let mut trace: Option<Box<dyn Write>> = match &config.trace_path {
        Some(p) => Some(Box::new(std::io::BufWriter::new(std::fs::File::create(p)?))),
        None => None,
    };

    let mut rounds: Vec<RoundTelemetry> = Vec::new();
    while sol.split.epsilon > 1 {
        let eps_before = sol.split.epsilon;
        let (next, round) = refine(&ctx, &sol, &mut trace)?;
        if next.split.epsilon * 2 != eps_before {
            return Err(Error::Invariant(format!(
                "refine moved epsilon {eps_before} -> {}, expected half",
                next.split.epsilon
            )));
        }
        rounds.push(RoundTelemetry {
            eps_log2: next.split.epsilon.trailing_zeros(),
            adjustment_steps: round.adjustment_steps,
            diff_after_adjust: round.diff_after_adjust,
            augmentations: round.augmentations,
        });
        sol = next;
    }
    if rounds.len() != expected_rounds as usize {
        return Err(Error::Invariant(format!(
            "{} refine rounds for eps0 = {eps0}, expected {expected_rounds}",
            rounds.len()
        )));
    }
    debug_assert!(sol.is_solution());
    sol.split.check_bound(&w_scaled)?;

    // strip padding, map back to original ids
    let mut solution: Vec<Element> = sol
        .s1
        .iter()
        .filter(|&e| e < m)
        .map(|e| pre.kept[e])
        .collect();
    solution.sort_unstable();
    let weight: i128 = solution.iter().map(|&e| w[e] as i128).sum();

    let certificate = Certificate {
        kept: pre.kept.clone(),
        r,
        scale_exp,
        w1: sol.split.w1.clone(),
        w2: sol.split.w2.clone(),
        s_star: sol.s1.to_vec(),
        claimed_weight: weight,
    };

    let queries = QueryBreakdown::from_stats(&stats);
    let augmentations_total = rounds.iter().map(|r| r.augmentations).sum();
    let report = RunReport {
        n,
        n_kept: m,
        n_hat,
        r,
        w_max,
        scale_exp,
        rounds,
        queries,
        queries_total: queries.total(),
        queries_algorithm: queries.total_algorithm(),
        augmentations_total,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        budget_ratio: budget_ratio(queries.total_algorithm(), n, r, n_hat, w_max),
        solution_size: solution.len(),
        solution_weight: i64::try_from(weight).expect("solution weight exceeds i64"),
    };

    Ok(SolveOutput {
        solution,
        weight,
        certificate,
        report,
    })
}

fn trivial_output(
    n: usize,
    w_max: i64,
    pre: &Preprocessed,
    r: usize,
    stats: &QueryStats,
    started: Instant,
) -> SolveOutput {
    debug_assert_eq!(r, 0);
    let queries = QueryBreakdown::from_stats(stats);
    let certificate = Certificate {
        kept: pre.kept.clone(),
        r: 0,
        scale_exp: 0,
        w1: pre.w_kept.iter().map(|&x| x as Num).collect(),
        w2: vec![0; pre.kept.len()],
        s_star: Vec::new(),
        claimed_weight: 0,
    };
    let report = RunReport {
        n,
        n_kept: pre.kept.len(),
        n_hat: pre.kept.len(),
        r: 0,
        w_max,
        scale_exp: 0,
        rounds: Vec::new(),
        queries,
        queries_total: queries.total(),
        queries_algorithm: queries.total_algorithm(),
        augmentations_total: 0,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        budget_ratio: 0.0,
        solution_size: 0,
        solution_weight: 0,
    };
    SolveOutput {
        solution: Vec::new(),
        weight: 0,
        certificate,
        report,
    }
}

/// Standalone optimality check: rebuilds the transformed oracles from the
/// certificate, re-justifies every discarded element, recomputes the
/// max-cardinality intersection size, and re-verifies the splitting bound
/// plus both greedy maximality witnesses. Sound without trusting any solver
/// state.
pub fn certify_optimality(
    cert: &Certificate,
    m1: &RankOracle,
    m2: &RankOracle,
    w: &[i64],
) -> std::result::Result<(), CertFailure> {
    let n = w.len();
    if m1.ground_size() != n || m2.ground_size() != n {
        return Err(CertFailure::GroundMismatch(format!(
            "oracles cover {} and {}, weights {n}",
            m1.ground_size(),
            m2.ground_size()
        )));
    }
    let m = cert.kept.len();
    if cert.kept.iter().any(|&e| e >= n) {
        return Err(CertFailure::GroundMismatch("kept id out of range".into()));
    }
    let n_hat = m + cert.r;
    if cert.w1.len() != n_hat || cert.w2.len() != n_hat || cert.s_star.len() != cert.r {
        return Err(CertFailure::GroundMismatch(format!(
            "splitting over {} and {} elements, basis {}; expected {n_hat} and r = {}",
            cert.w1.len(),
            cert.w2.len(),
            cert.s_star.len(),
            cert.r
        )));
    }

    let _p1 = PhaseGuard::new(m1.stats(), Phase::Verification);
    let _p2 = PhaseGuard::new(m2.stats(), Phase::Verification);

    // every dropped element must be negative-weight or a loop
    let kept_set = ElemSet::from_elems(n, cert.kept.iter().copied());
    for e in 0..n {
        if kept_set.contains(e) {
            if w[e] < 0 {
                return Err(CertFailure::DiscardUnjustified(e));
            }
            continue;
        }
        let justified = w[e] < 0
            || m1.rank(&SetExpr::from_slice(&[e])) == 0
            || m2.rank(&SetExpr::from_slice(&[e])) == 0;
        if !justified {
            return Err(CertFailure::DiscardUnjustified(e));
        }
    }

    let m1r = m1.clone().restrict_to(&cert.kept);
    let m2r = m2.clone().restrict_to(&cert.kept);
    let actual_r = match max_cardinality_intersection(&m1r, &m2r) {
        Ok((_, r)) => r,
        Err(_) => {
            return Err(CertFailure::RankMismatch {
                claimed: cert.r,
                actual: usize::MAX,
            })
        }
    };
    if actual_r != cert.r {
        return Err(CertFailure::RankMismatch {
            claimed: cert.r,
            actual: actual_r,
        });
    }
    if cert.r == 0 {
        return if cert.claimed_weight == 0 && cert.s_star.is_empty() {
            Ok(())
        } else {
            Err(CertFailure::WeightMismatch)
        };
    }

    let m1p = m1r.truncate(cert.r).pad_with_free_elements(cert.r);
    let m2p = m2r.truncate(cert.r).pad_with_free_elements(cert.r);

    // splitting bound at ε = 1 scaled unit
    let unit: Num = 1i128 << cert.scale_exp;
    for x in 0..n_hat {
        let w_scaled = if x < m {
            exact::mul(w[cert.kept[x]] as Num, unit)
        } else {
            0
        };
        let we = exact::add(cert.w1[x], cert.w2[x]);
        if we < w_scaled || we > exact::add(w_scaled, 1) {
            return Err(CertFailure::SplitBound(x));
        }
    }

    // S* must be a common basis
    let s_star = ElemSet::from_elems(n_hat, cert.s_star.iter().copied());
    if s_star.len() != cert.r
        || m1p.rank(&SetExpr::of(&s_star)) != cert.r
        || m2p.rank(&SetExpr::of(&s_star)) != cert.r
    {
        return Err(CertFailure::NotCommonBasis);
    }

    // greedy maximality witnesses
    let w1_star: Num = s_star.iter().fold(0, |acc, e| exact::add(acc, cert.w1[e]));
    let (_, best1) = greedy_max_basis(&m1p, &cert.w1);
    if w1_star != best1 {
        return Err(CertFailure::NotMaximum(1));
    }
    let w2_star: Num = s_star.iter().fold(0, |acc, e| exact::add(acc, cert.w2[e]));
    let (_, best2) = greedy_max_basis(&m2p, &cert.w2);
    if w2_star != best2 {
        return Err(CertFailure::NotMaximum(2));
    }

    // claimed weight consistency
    let weight: i128 = cert
        .s_star
        .iter()
        .filter(|&&e| e < m)
        .map(|&e| w[cert.kept[e]] as i128)
        .sum();
    if weight != cert.claimed_weight {
        return Err(CertFailure::WeightMismatch);
    }
    Ok(())
}
