//! Independent verification oracles: exhaustive brute force, explicit
//! exchange-graph construction, a reference shortest-path computation under
//! the same combined hop-augmented key, matroid-axiom sampling, and
//! linear-scan twins of the binary-search exchange finders.
//!
//! Everything here recomputes from scratch, sharing no state with the solver
//! path it checks. Rank queries are attributed to the verification phase.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matroid::{ElemSet, Element, Phase, PhaseGuard, RankOracle, SetExpr};
use crate::pool::OrderedPool;
use crate::splitting::PartialSolution;
use crate::sssp::{unreachable_sentinel, EdgeSide, PathEdge, ShortestPathResult};
use crate::{exact, Num};

/// Cost guard for subset enumeration.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// One edge of a materialized exchange graph.
#[derive(Clone, Copy, Debug)]
pub struct ExplicitEdge {
    pub from: Element,
    pub to: Element,
    pub true_weight: Num,
    pub side: EdgeSide,
}

/// The exchange graph of an ε-partial-solution, built by exhaustive
/// independence tests: `E1` edges `(x, y)` for valid swaps in matroid 1,
/// `E2` edges `(y, x)` for valid swaps in matroid 2, with the zero-weight
/// source side `S1 \ S2` and sink side `S2 \ S1`.
#[derive(Clone, Debug)]
pub struct ExplicitExchangeGraph {
    pub n_hat: usize,
    pub edges: Vec<ExplicitEdge>,
    pub sources: Vec<Element>,
    pub sinks: Vec<Element>,
}

/// `O(nr)` independence tests; every edge weight must be non-negative when
/// the bases are maximum, and a negative one is reported as such.
pub fn build_explicit_exchange_graph(
    m1: &RankOracle,
    m2: &RankOracle,
    sol: &PartialSolution,
) -> Result<ExplicitExchangeGraph> {
    if sol.is_solution() {
        return Err(Error::Contract(
            "explicit exchange graph requires S1 != S2".into(),
        ));
    }
    let _p1 = PhaseGuard::new(m1.stats(), Phase::Verification);
    let _p2 = PhaseGuard::new(m2.stats(), Phase::Verification);
    let n = m1.ground_size();
    let w1 = &sol.split.w1;
    let w2 = &sol.split.w2;
    let mut edges = Vec::new();
    for x in sol.s1.iter() {
        for y in 0..n {
            if sol.s1.contains(y) {
                continue;
            }
            if m1.rank(&SetExpr::of(&sol.s1).minus(x).plus(y)) == sol.s1.len() {
                let true_weight = exact::sub(w1[x], w1[y]);
                if true_weight < 0 {
                    return Err(Error::MaximalityViolated(format!(
                        "negative E1 edge ({x} -> {y}) in explicit graph"
                    )));
                }
                edges.push(ExplicitEdge {
                    from: x,
                    to: y,
                    true_weight,
                    side: EdgeSide::E1,
                });
            }
        }
    }
    for x in sol.s2.iter() {
        for y in 0..n {
            if sol.s2.contains(y) {
                continue;
            }
            if m2.rank(&SetExpr::of(&sol.s2).minus(x).plus(y)) == sol.s2.len() {
                let true_weight = exact::sub(w2[x], w2[y]);
                if true_weight < 0 {
                    return Err(Error::MaximalityViolated(format!(
                        "negative E2 edge ({y} -> {x}) in explicit graph"
                    )));
                }
                edges.push(ExplicitEdge {
                    from: y,
                    to: x,
                    true_weight,
                    side: EdgeSide::E2,
                });
            }
        }
    }
    let sources = sol.s1.difference(&sol.s2);
    let sinks = sol.s2.difference(&sol.s1);
    Ok(ExplicitExchangeGraph {
        n_hat: n,
        edges,
        sources,
        sinks,
    })
}

/// Textbook Dijkstra over the explicit graph under the combined
/// `(weight, hops)` key, with the same sentinel, sink selection and
/// canonical path rule as the buffered implementation: the reported path
/// walks backward from the sink choosing at each step the tight predecessor
/// with the smallest id, preferring `E1` on a parallel-edge tie.
pub fn reference_shortest_paths(
    g: &ExplicitExchangeGraph,
    sol: &PartialSolution,
) -> Result<ShortestPathResult> {
    let n = g.n_hat;
    let mult = n as Num + 1;
    let mut dist = vec![Num::MAX; n];
    let mut heap = std::collections::BinaryHeap::new();
    for &s in &g.sources {
        dist[s] = 0;
        heap.push(std::cmp::Reverse((0, s)));
    }
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ei, e) in g.edges.iter().enumerate() {
        outgoing[e.from].push(ei);
    }
    while let Some(std::cmp::Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &ei in &outgoing[v] {
            let e = &g.edges[ei];
            let cand = exact::add(d, exact::add(exact::mul(e.true_weight, mult), 1));
            if cand < dist[e.to] {
                dist[e.to] = cand;
                heap.push(std::cmp::Reverse((cand, e.to)));
            }
        }
    }

    let sentinel = unreachable_sentinel(n, &sol.split);
    let mut labels = vec![sentinel; n];
    let mut reached = vec![false; n];
    for x in 0..n {
        if dist[x] != Num::MAX {
            labels[x] = dist[x];
            reached[x] = true;
        }
    }
    let target = g
        .sinks
        .iter()
        .copied()
        .filter(|&x| reached[x])
        .min_by_key(|&x| (labels[x], x))
        .ok_or_else(|| Error::NoStPath("explicit graph has no reachable sink".into()))?;

    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ei, e) in g.edges.iter().enumerate() {
        incoming[e.to].push(ei);
    }
    let mut rev: Vec<PathEdge> = Vec::new();
    let mut cur = target;
    while labels[cur] != 0 {
        let mut best: Option<&ExplicitEdge> = None;
        for &ei in &incoming[cur] {
            let e = &g.edges[ei];
            if !reached[e.from] {
                continue;
            }
            let tight = exact::add(
                labels[e.from],
                exact::add(exact::mul(e.true_weight, mult), 1),
            ) == labels[cur];
            if !tight {
                continue;
            }
            best = match best {
                None => Some(e),
                Some(b) if e.from < b.from => Some(e),
                Some(b) if e.from == b.from && e.side == EdgeSide::E1 && b.side == EdgeSide::E2 => {
                    Some(e)
                }
                keep => keep,
            };
        }
        let e = best.ok_or_else(|| Error::Invariant(format!("reference walk stuck at {cur}")))?;
        rev.push(PathEdge {
            from: e.from,
            to: e.to,
            side: e.side,
        });
        cur = e.from;
        if rev.len() > n {
            return Err(Error::Invariant("reference walk did not terminate".into()));
        }
    }
    rev.reverse();

    Ok(ShortestPathResult {
        t_label: exact::add(labels[target], 1),
        labels,
        sentinel,
        multiplier: mult,
        reached,
        target,
        path: rev,
        queries: 0,
        case1_fires: [0, 0],
        iterations: 0,
    })
}

/// Enumerates all common independent sets by pruned depth-first search and
/// returns the maximum-weight one (ties: lexicographically smallest id set).
pub fn brute_force_best(
    m1: &RankOracle,
    m2: &RankOracle,
    w: &[i64],
) -> Result<(Vec<Element>, i128)> {
    let n = w.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            op: "brute_force_best",
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    assert_eq!(m1.ground_size(), n);
    assert_eq!(m2.ground_size(), n);
    let _p1 = PhaseGuard::new(m1.stats(), Phase::Verification);
    let _p2 = PhaseGuard::new(m2.stats(), Phase::Verification);

    let mut best: (i128, Vec<Element>) = (0, Vec::new());
    let mut cur: Vec<Element> = Vec::new();
    // downward closure makes prefix pruning exact: every common independent
    // set is reached through common independent prefixes
    fn dfs(
        m1: &RankOracle,
        m2: &RankOracle,
        w: &[i64],
        next: usize,
        cur: &mut Vec<Element>,
        cur_weight: i128,
        best: &mut (i128, Vec<Element>),
    ) {
        if cur_weight > best.0 || (cur_weight == best.0 && lex_less(cur, &best.1)) {
            *best = (cur_weight, cur.clone());
        }
        for e in next..w.len() {
            cur.push(e);
            if m1.is_independent_slice(cur) && m2.is_independent_slice(cur) {
                dfs(m1, m2, w, e + 1, cur, cur_weight + w[e] as i128, best);
            }
            cur.pop();
        }
    }
    dfs(m1, m2, w, 0, &mut cur, 0, &mut best);
    Ok((best.1, best.0))
}

fn lex_less(a: &[Element], b: &[Element]) -> bool {
    a < b
}

/// Linear-scan twin of `find_removal_exchange`: one independence test per
/// candidate in pool order, with the same dependence precheck.
pub fn scan_removal_exchange(
    oracle: &RankOracle,
    s: &ElemSet,
    x: Element,
    pool: &OrderedPool,
) -> Option<Element> {
    if pool.is_empty() {
        return None;
    }
    if oracle.rank(&SetExpr::of(s).plus(x)) == s.len() + 1 {
        return None;
    }
    pool.iter()
        .map(|(b, _)| b)
        .find(|&b| oracle.rank(&SetExpr::of(s).minus(b).plus(x)) == s.len())
}

/// Linear-scan twin of `find_insertion_exchange`.
pub fn scan_insertion_exchange(
    oracle: &RankOracle,
    s: &ElemSet,
    x: Element,
    pool: &OrderedPool,
) -> Option<Element> {
    pool.iter()
        .map(|(b, _)| b)
        .find(|&b| oracle.rank(&SetExpr::of(s).minus(x).plus(b)) == s.len())
}

/// Outcome of sampled axiom checking.
#[derive(Debug)]
pub struct AxiomReport {
    pub samples: usize,
    pub violations: Vec<String>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples random chains and pairs, testing monotonicity, unit increments,
/// submodularity, downward closure through rank equalities, and the exchange
/// property constructively (a missing witness is a violation).
pub fn check_matroid_axioms(oracle: &RankOracle, samples: usize, seed: u64) -> AxiomReport {
    let _p = PhaseGuard::new(oracle.stats(), Phase::Verification);
    let n = oracle.ground_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let complain = |v: &mut Vec<String>, msg: String| {
        if v.len() < 32 {
            v.push(msg);
        }
    };

    if oracle.rank(&SetExpr::from_slice(&[])) != 0 {
        complain(&mut violations, "rank(∅) != 0".into());
    }
    if n == 0 {
        return AxiomReport {
            samples,
            violations,
        };
    }

    // greedily thin a set to an independent subset, by rank queries
    let independent_subset = |rng: &mut ChaCha8Rng, oracle: &RankOracle| -> Vec<Element> {
        let density = rng.gen_range(0.2..0.9);
        let mut t: Vec<Element> = Vec::new();
        for e in 0..n {
            if rng.gen_bool(density) {
                t.push(e);
                if oracle.rank(&SetExpr::from_slice(&t)) != t.len() {
                    t.pop();
                }
            }
        }
        t
    };

    for round in 0..samples {
        match round % 4 {
            0 => {
                // bounds, monotonicity, unit increment
                let s: Vec<Element> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
                let r = oracle.rank(&SetExpr::from_slice(&s));
                if r > s.len() {
                    complain(&mut violations, format!("rank({s:?}) = {r} > |S|"));
                }
                let x = rng.gen_range(0..n);
                if !s.contains(&x) {
                    let mut sx = s.clone();
                    sx.push(x);
                    let rx = oracle.rank(&SetExpr::from_slice(&sx));
                    if rx < r || rx > r + 1 {
                        complain(
                            &mut violations,
                            format!("rank step at {x}: {r} -> {rx} not in {{0, +1}}"),
                        );
                    }
                }
            }
            1 => {
                // downward closure via rank equalities
                let t = independent_subset(&mut rng, oracle);
                let r: Vec<Element> = t.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                if oracle.rank(&SetExpr::from_slice(&r)) != r.len() {
                    complain(
                        &mut violations,
                        format!("subset {r:?} of independent {t:?} is dependent"),
                    );
                }
            }
            2 => {
                // exchange property, constructively
                let a = independent_subset(&mut rng, oracle);
                let b = independent_subset(&mut rng, oracle);
                let (small, large) = if a.len() < b.len() { (a, b) } else { (b, a) };
                if small.len() < large.len() {
                    let mut witness = false;
                    for &x in large.iter().filter(|x| !small.contains(x)) {
                        let mut sx = small.clone();
                        sx.push(x);
                        if oracle.rank(&SetExpr::from_slice(&sx)) == sx.len() {
                            witness = true;
                            break;
                        }
                    }
                    if !witness {
                        complain(
                            &mut violations,
                            format!("no exchange witness from {large:?} into {small:?}"),
                        );
                    }
                }
            }
            _ => {
                // submodularity
                let a: Vec<Element> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
                let b: Vec<Element> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
                let union: Vec<Element> =
                    (0..n).filter(|e| a.contains(e) || b.contains(e)).collect();
                let inter: Vec<Element> =
                    (0..n).filter(|e| a.contains(e) && b.contains(e)).collect();
                let ra = oracle.rank(&SetExpr::from_slice(&a));
                let rb = oracle.rank(&SetExpr::from_slice(&b));
                let ru = oracle.rank(&SetExpr::from_slice(&union));
                let ri = oracle.rank(&SetExpr::from_slice(&inter));
                if ra + rb < ru + ri {
                    complain(
                        &mut violations,
                        format!("submodularity: {ra} + {rb} < {ru} + {ri}"),
                    );
                }
            }
        }
    }
    AxiomReport {
        samples,
        violations,
    }
}
