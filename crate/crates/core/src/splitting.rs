//! Weight splittings and the weight-adjustment procedure that drives one
//! scaling round: starting from a `2ε`-solution, it rebuilds both bases under
//! a refreshed `ε`-splitting and then adjusts per-element weights
//! auction-style until the bases largely agree.

use std::collections::VecDeque;

use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::exchange::{find_insertion_exchange, find_removal_exchange, greedy_max_basis};
use crate::matroid::{ElemSet, Element, Phase, PhaseGuard};
use crate::pool::{Objective, OrderedPool};
use crate::solver::SolveContext;
use crate::{exact, Num};

/// An ε-splitting of the scaled weights: `w(x) <= w1(x) + w2(x) <= w(x) + ε`
/// pointwise, with `ε` a positive power of two (in scaled units) so halving
/// stays exact. `scale_exp` records the power-of-two pre-multiplier applied
/// to the input weights.
#[derive(Clone, Debug)]
pub struct WeightSplit {
    pub w1: Vec<Num>,
    pub w2: Vec<Num>,
    pub epsilon: Num,
    pub scale_exp: u32,
}

impl WeightSplit {
    pub fn combined(&self, x: Element) -> Num {
        exact::add(self.w1[x], self.w2[x])
    }

    pub fn bound_holds_at(&self, w_scaled: &[Num], x: Element) -> bool {
        let we = self.combined(x);
        w_scaled[x] <= we && we <= exact::add(w_scaled[x], self.epsilon)
    }

    pub fn check_bound(&self, w_scaled: &[Num]) -> Result<()> {
        for x in 0..w_scaled.len() {
            if !self.bound_holds_at(w_scaled, x) {
                return Err(Error::Invariant(format!(
                    "splitting bound violated at element {x}: w={} w1={} w2={} eps={}",
                    w_scaled[x], self.w1[x], self.w2[x], self.epsilon
                )));
            }
        }
        Ok(())
    }
}

/// A splitting together with bases `s1`, `s2` maximal for `w1`, `w2`
/// respectively. When `s1 == s2` this is an ε-solution.
#[derive(Clone, Debug)]
pub struct PartialSolution {
    pub split: WeightSplit,
    pub s1: ElemSet,
    pub s2: ElemSet,
}

impl PartialSolution {
    pub fn is_solution(&self) -> bool {
        self.s1 == self.s2
    }

    pub fn intersection_len(&self) -> usize {
        self.s1.intersection_len(&self.s2)
    }
}

/// Mutable state of one adjustment run: per-element adjustment potentials and
/// the FIFO of eligible elements.
pub struct AdjustmentState {
    pub p: Vec<u32>,
    pub pending: VecDeque<Element>,
    in_queue: Vec<bool>,
}

impl AdjustmentState {
    fn new(n: usize) -> Self {
        AdjustmentState {
            p: vec![0; n],
            pending: VecDeque::new(),
            in_queue: vec![false; n],
        }
    }
}

/// Telemetry of one adjustment run, used by the invariant suites.
#[derive(Clone, Debug)]
pub struct AdjustmentReport {
    pub steps: u64,
    pub steps_per_element: Vec<u32>,
    pub p: Vec<u32>,
    pub exit_diff: usize,
    pub exit_diff_bound: usize,
}

fn next_power_of_two(v: Num) -> Num {
    let mut p: Num = 1;
    while p < v {
        p = exact::mul(p, 2);
    }
    p
}

/// Builds the trivial ε₀-solution around a common basis: both split halves
/// constant at `ε₀ / 2`, where `ε₀` is the smallest power of two at least
/// `max_x w_scaled(x)` (and at least 2, so the halves stay integral).
/// Constant weights make every basis maximum.
pub fn initial_solution(ctx: &SolveContext, s0: &ElemSet) -> PartialSolution {
    let max_w = ctx.w_scaled.iter().copied().max().unwrap_or(0);
    debug_assert!(ctx.w_scaled.iter().all(|&w| w >= 0));
    let eps0 = next_power_of_two(max_w).max(2);
    let half = eps0 / 2;
    let n = ctx.w_scaled.len();
    PartialSolution {
        split: WeightSplit {
            w1: vec![half; n],
            w2: vec![half; n],
            epsilon: eps0,
            scale_exp: ctx.scale_exp,
        },
        s1: s0.clone(),
        s2: s0.clone(),
    }
}

/// One weight-adjustment pass: turns a `2ε`-solution into an
/// ε-partial-solution whose bases differ in at most `ceil(2r / k)` elements.
///
/// The splitting is re-seeded as `(w1, w - w1 + ε)`, both bases are rebuilt
/// greedily, and then eligible elements `x ∈ S1 \ S2` with `p(x) < k` are
/// adjusted FIFO: when `w^ε(x) = w(x) + ε` the `w1` side drops by `ε` and
/// `S1` is repaired through the best insertion exchange; otherwise `p(x)`
/// and the `w2` side rise and `S2` is repaired through the cheapest removal
/// exchange. Swaps happen only on strict improvement.
pub fn adjust_weights(
    ctx: &SolveContext,
    sol: &PartialSolution,
    k: usize,
) -> Result<(PartialSolution, AdjustmentReport)> {
    assert!(k >= 1);
    assert!(
        sol.is_solution(),
        "adjust_weights requires a solution (S1 == S2) as input"
    );
    let eps2 = sol.split.epsilon;
    if eps2 < 2 || eps2 % 2 != 0 {
        return Err(Error::Invariant(format!(
            "adjust_weights: epsilon {eps2} is not an even positive integer"
        )));
    }
    let eps = eps2 / 2;
    let n = ctx.n_hat;
    let w = ctx.w_scaled;

    let _phase = PhaseGuard::new(ctx.stats, Phase::Adjustment);

    let w1 = sol.split.w1.clone();
    let w2: Vec<Num> = (0..n)
        .map(|x| exact::add(exact::sub(w[x], w1[x]), eps))
        .collect();
    let mut split = WeightSplit {
        w1,
        w2,
        epsilon: eps,
        scale_exp: sol.split.scale_exp,
    };

    let (mut s1, _) = greedy_max_basis(ctx.m1, &split.w1);
    let (mut s2, _) = greedy_max_basis(ctx.m2, &split.w2);
    let r = s1.len();
    if s2.len() != r {
        return Err(Error::Invariant(format!(
            "bases of unequal size after greedy: {} vs {}",
            r,
            s2.len()
        )));
    }

    let mut pool_not_s1 = OrderedPool::from_priorities(
        Objective::Max,
        (0..n)
            .filter(|&e| !s1.contains(e))
            .map(|e| (e, split.w1[e])),
    );
    let mut pool_s2 =
        OrderedPool::from_priorities(Objective::Min, s2.iter().map(|e| (e, split.w2[e])));

    let mut state = AdjustmentState::new(n);
    let mut steps_per_element = vec![0u32; n];
    let mut steps: u64 = 0;

    let eligible = |s1: &ElemSet, s2: &ElemSet, p: &[u32], e: Element| {
        s1.contains(e) && !s2.contains(e) && p[e] < k as u32
    };
    for e in 0..n {
        if eligible(&s1, &s2, &state.p, e) {
            state.pending.push_back(e);
            state.in_queue[e] = true;
        }
    }

    // 2p(x)+1 steps per element, with headroom for re-checks of stale entries
    let step_limit = (2 * k as u64 + 2) * n as u64 + 64;
    let mut shuffle_rng = ctx
        .config
        .adjustment_shuffle_seed
        .map(rand_chacha::ChaCha8Rng::seed_from_u64);

    loop {
        let x = match &mut shuffle_rng {
            None => match state.pending.pop_front() {
                Some(x) => x,
                None => break,
            },
            Some(rng) => {
                // randomized eligible order: pick any pending entry
                use rand::Rng;
                if state.pending.is_empty() {
                    break;
                }
                let i = rng.gen_range(0..state.pending.len());
                state.pending.swap_remove_back(i).unwrap()
            }
        };
        state.in_queue[x] = false;
        if !eligible(&s1, &s2, &state.p, x) {
            continue;
        }
        steps += 1;
        steps_per_element[x] += 1;
        if steps > step_limit {
            return Err(Error::Invariant(format!(
                "adjustment did not terminate within {step_limit} steps"
            )));
        }

        if split.combined(x) == exact::add(w[x], eps) {
            split.w1[x] = exact::sub(split.w1[x], eps);
            if let Some(y) = find_insertion_exchange(ctx.m1, &s1, x, &pool_not_s1) {
                if split.w1[x] < split.w1[y] {
                    s1.remove(x);
                    s1.insert(y);
                    pool_not_s1.remove(y, Objective::Max.key_for(split.w1[y]));
                    pool_not_s1.insert(x, Objective::Max.key_for(split.w1[x]));
                    maybe_enqueue(&mut state, &s1, &s2, k, y);
                }
            }
        } else {
            debug_assert_eq!(split.combined(x), w[x]);
            state.p[x] += 1;
            split.w2[x] = exact::add(split.w2[x], eps);
            if let Some(y) = find_removal_exchange(ctx.m2, &s2, x, &pool_s2) {
                if split.w2[x] > split.w2[y] {
                    s2.remove(y);
                    s2.insert(x);
                    pool_s2.remove(y, split.w2[y]);
                    pool_s2.insert(x, split.w2[x]);
                    maybe_enqueue(&mut state, &s1, &s2, k, y);
                }
            }
        }
        maybe_enqueue(&mut state, &s1, &s2, k, x);

        if !split.bound_holds_at(w, x) {
            return Err(Error::Invariant(format!(
                "splitting bound violated mid-adjustment at element {x}"
            )));
        }
        if ctx.config.debug_assert_level >= 2 && n <= 64 {
            spot_check_maximality(ctx, &split, &s1, &s2)?;
        }
    }

    let exit_diff = r - s1.intersection_len(&s2);
    let exit_diff_bound = (2 * r).div_ceil(k);
    if exit_diff > exit_diff_bound {
        return Err(Error::Invariant(format!(
            "|S1 \\ S2| = {exit_diff} exceeds bound {exit_diff_bound} (r={r}, k={k})"
        )));
    }
    for x in 0..n {
        if state.p[x] > k as u32 {
            return Err(Error::Invariant(format!(
                "p({x}) = {} exceeds k = {k}",
                state.p[x]
            )));
        }
        let cap = 2 * state.p[x] + 1;
        if steps_per_element[x] > cap {
            return Err(Error::Invariant(format!(
                "element {x} adjusted {} times, above 2p+1 = {cap}",
                steps_per_element[x]
            )));
        }
        if s1.contains(x) && !s2.contains(x) && steps_per_element[x] > 2 * state.p[x] {
            return Err(Error::Invariant(format!(
                "exit element {x} adjusted {} times, above 2p = {}",
                steps_per_element[x],
                2 * state.p[x]
            )));
        }
    }

    // exit maximality, always
    spot_check_maximality(ctx, &split, &s1, &s2)?;
    split.check_bound(w)?;

    let report = AdjustmentReport {
        steps,
        steps_per_element,
        p: state.p,
        exit_diff,
        exit_diff_bound,
    };
    Ok((PartialSolution { split, s1, s2 }, report))
}

fn maybe_enqueue(state: &mut AdjustmentState, s1: &ElemSet, s2: &ElemSet, k: usize, e: Element) {
    if s1.contains(e) && !s2.contains(e) && state.p[e] < k as u32 && !state.in_queue[e] {
        state.pending.push_back(e);
        state.in_queue[e] = true;
    }
}

/// Confirms both bases are weight-maximum by greedy weight comparison.
/// Counted as verification overhead.
fn spot_check_maximality(
    ctx: &SolveContext,
    split: &WeightSplit,
    s1: &ElemSet,
    s2: &ElemSet,
) -> Result<()> {
    let _phase = PhaseGuard::new(ctx.stats, Phase::Verification);
    for (side, (oracle, s, wi)) in [(ctx.m1, s1, &split.w1), (ctx.m2, s2, &split.w2)]
        .into_iter()
        .enumerate()
    {
        let actual: Num = s.iter().fold(0, |acc, e| exact::add(acc, wi[e]));
        let (_, best) = greedy_max_basis(oracle, wi);
        if actual != best {
            return Err(Error::MaximalityViolated(format!(
                "S{} has weight {actual}, greedy maximum is {best}",
                side + 1
            )));
        }
    }
    Ok(())
}
