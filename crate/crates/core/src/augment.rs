//! Augmentation along the shortest fewest-edge path: both bases exchange
//! along their path edges and both weight functions shift by the distance
//! labels, preserving the splitting sum pointwise and growing the
//! intersection strictly.

use crate::error::{Error, Result};
use crate::exchange::{find_removal_exchange, greedy_max_basis};
use crate::matroid::{ElemSet, Element, Phase, PhaseGuard, RankOracle};
use crate::pool::{Objective, OrderedPool};
use crate::solver::SolveContext;
use crate::splitting::{PartialSolution, WeightSplit};
use crate::sssp::{EdgeSide, PathEdge, ShortestPathResult};
use crate::{exact, Num};

/// Ground-set size above which post-augmentation maximality is verified by
/// sampled local exchanges instead of a full greedy rebuild.
const FULL_MAXIMALITY_CHECK_LIMIT: usize = 200;

/// What one augmentation did, attached to invariant failures for diagnosis.
#[derive(Clone, Debug)]
pub struct AugmentationRecord {
    pub path: Vec<PathEdge>,
    pub e1_edges: usize,
    pub e2_edges: usize,
    pub intersection_before: usize,
    pub intersection_after: usize,
    /// True-distance delta applied at the chosen sink.
    pub target_distance: Num,
}

/// Applies the found path to an ε-partial-solution: `S1` swaps the tails of
/// its `E1` edges for their heads, `S2` swaps the heads of its `E2` edges for
/// their tails, and the split moves to `w1 + d`, `w2 - d` (true distances;
/// sentinel-derived values for unreachable elements).
///
/// Postconditions are checked on every call: both new bases independent,
/// both weight-maximum (greedy equality up to `n_hat <= 200`, sampled local
/// exchanges above), the intersection strictly larger, and `w1 + w2`
/// pointwise unchanged.
pub fn apply_augmentation(
    ctx: &SolveContext,
    sol: &PartialSolution,
    res: &ShortestPathResult,
) -> Result<(PartialSolution, AugmentationRecord)> {
    let n = ctx.n_hat;
    let mut s1 = sol.s1.clone();
    let mut s2 = sol.s2.clone();
    let mut e1_edges = 0;
    let mut e2_edges = 0;
    {
        let _phase = PhaseGuard::new(ctx.stats, Phase::Augmentation);
        for edge in &res.path {
            match edge.side {
                EdgeSide::E1 => {
                    if !s1.remove(edge.from) || !s1.insert(edge.to) {
                        return Err(Error::Invariant(format!(
                            "E1 path edge {edge:?} does not match S1"
                        )));
                    }
                    e1_edges += 1;
                }
                EdgeSide::E2 => {
                    if !s2.remove(edge.to) || !s2.insert(edge.from) {
                        return Err(Error::Invariant(format!(
                            "E2 path edge {edge:?} does not match S2"
                        )));
                    }
                    e2_edges += 1;
                }
            }
        }
    }

    let mut w1 = sol.split.w1.clone();
    let mut w2 = sol.split.w2.clone();
    for x in 0..n {
        let d = res.true_distance(x);
        w1[x] = exact::add(w1[x], d);
        w2[x] = exact::sub(w2[x], d);
    }
    let split = WeightSplit {
        w1,
        w2,
        epsilon: sol.split.epsilon,
        scale_exp: sol.split.scale_exp,
    };

    let record = AugmentationRecord {
        path: res.path.clone(),
        e1_edges,
        e2_edges,
        intersection_before: sol.intersection_len(),
        intersection_after: s1.intersection_len(&s2),
        target_distance: res.true_distance(res.target),
    };

    // pointwise sum invariance
    for x in 0..n {
        if split.combined(x) != sol.split.combined(x) {
            return Err(Error::Invariant(format!(
                "w1 + w2 changed at element {x} during augmentation: {record:?}"
            )));
        }
    }
    if record.intersection_after <= record.intersection_before {
        return Err(Error::Invariant(format!(
            "intersection did not grow: {record:?}"
        )));
    }

    {
        let _phase = PhaseGuard::new(ctx.stats, Phase::Verification);
        if !ctx.m1.is_independent(&s1) {
            return Err(Error::Invariant(format!(
                "augmented S1 is dependent: {record:?}"
            )));
        }
        if !ctx.m2.is_independent(&s2) {
            return Err(Error::Invariant(format!(
                "augmented S2 is dependent: {record:?}"
            )));
        }
        check_maximality(ctx.m1, &s1, &split.w1, n, &record)?;
        check_maximality(ctx.m2, &s2, &split.w2, n, &record)?;
    }

    Ok((PartialSolution { split, s1, s2 }, record))
}

fn check_maximality(
    oracle: &RankOracle,
    basis: &ElemSet,
    w: &[Num],
    n: usize,
    record: &AugmentationRecord,
) -> Result<()> {
    if n <= FULL_MAXIMALITY_CHECK_LIMIT {
        let actual: Num = basis.iter().fold(0, |acc, e| exact::add(acc, w[e]));
        let (_, best) = greedy_max_basis(oracle, w);
        if actual != best {
            return Err(Error::MaximalityViolated(format!(
                "augmented basis weight {actual} below greedy maximum {best}: {record:?}"
            )));
        }
        return Ok(());
    }
    // sampled local-exchange check: for a deterministic spread of outside
    // elements, the cheapest removable circuit element must not be lighter
    let pool = OrderedPool::from_priorities(Objective::Min, basis.iter().map(|e| (e, w[e])));
    let outside: Vec<Element> = (0..n).filter(|&e| !basis.contains(e)).collect();
    let samples = 32.min(outside.len());
    for i in 0..samples {
        let y = outside[i * outside.len() / samples.max(1)];
        if let Some(x) = find_removal_exchange(oracle, basis, y, &pool) {
            if w[x] < w[y] {
                return Err(Error::MaximalityViolated(format!(
                    "improving exchange {x} -> {y} after augmentation: {record:?}"
                )));
            }
        }
    }
    Ok(())
}
