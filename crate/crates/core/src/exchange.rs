//! Binary-search exchange finders over ordered pools, plus the greedy
//! maximum-weight basis.
//!
//! Both finders return the first valid element in pool order — the
//! objective-extreme candidate under the pool's `(key, id)` ordering — or
//! `None` when no candidate yields a valid exchange. They issue at most
//! `ceil(log2 |B|) + 2` rank queries per call.

use crate::matroid::{ElemSet, Element, RankOracle, SetExpr};
use crate::pool::OrderedPool;
use crate::{exact, Num};

/// Finds the first `b` in pool order with `(S \ {b}) ∪ {x}` independent,
/// for `B ⊆ S` and `x ∉ S`.
///
/// The decision predicate over prefixes `P_j` of the pool is
/// `rank((S ∪ {x}) \ P_j) = |S| + 1 - j`, which holds exactly when `P_j`
/// meets the unique circuit of `S ∪ {x}`; it is monotone in `j`, so a binary
/// search for the minimal flip index returns the first valid element.
///
/// If `S ∪ {x}` is independent there is no circuit to break and the finder
/// reports `None`; callers that need an exchange must have established
/// dependence (true whenever `S` is a basis).
pub fn find_removal_exchange(
    oracle: &RankOracle,
    s: &ElemSet,
    x: Element,
    pool: &OrderedPool,
) -> Option<Element> {
    debug_assert!(!s.contains(x), "find_removal_exchange: x must not be in S");
    let b = pool.len();
    if b == 0 {
        return None;
    }
    let target = |j: usize| s.len() + 1 - j;
    // j = 0 probe doubles as the dependence test
    if oracle.rank(&SetExpr::of(s).plus(x)) == target(0) {
        return None;
    }
    if oracle.rank(&SetExpr::of(s).plus(x).minus_slice(pool.prefix(b))) != target(b) {
        return None;
    }
    let mut lo = 0; // predicate false
    let mut hi = b; // predicate true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if oracle.rank(&SetExpr::of(s).plus(x).minus_slice(pool.prefix(mid))) == target(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(pool.kth(hi - 1).unwrap().0)
}

/// Finds the first `b` in pool order with `(S \ {x}) ∪ {b}` independent,
/// for `B ⊆ V \ S` and `x ∈ S`.
///
/// Predicate: `rank((S \ {x}) ∪ P_j) >= |S|` iff `P_j` contains a valid
/// element; monotone in `j`.
pub fn find_insertion_exchange(
    oracle: &RankOracle,
    s: &ElemSet,
    x: Element,
    pool: &OrderedPool,
) -> Option<Element> {
    debug_assert!(s.contains(x), "find_insertion_exchange: x must be in S");
    let b = pool.len();
    if b == 0 {
        return None;
    }
    if oracle.rank(&SetExpr::of(s).minus(x).plus_slice(pool.prefix(b))) < s.len() {
        return None;
    }
    let mut lo = 0;
    let mut hi = b;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if oracle.rank(&SetExpr::of(s).minus(x).plus_slice(pool.prefix(mid))) >= s.len() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(pool.kth(hi - 1).unwrap().0)
}

/// Finds the first `b` in pool order with `S ∪ {b}` independent, for
/// `B ⊆ V \ S`. Used to discover source and sink edges of unweighted
/// exchange graphs.
pub fn find_extension(oracle: &RankOracle, s: &ElemSet, pool: &OrderedPool) -> Option<Element> {
    let b = pool.len();
    if b == 0 {
        return None;
    }
    if oracle.rank(&SetExpr::of(s).plus_slice(pool.prefix(b))) <= s.len() {
        return None;
    }
    let mut lo = 0;
    let mut hi = b;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if oracle.rank(&SetExpr::of(s).plus_slice(pool.prefix(mid))) > s.len() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(pool.kth(hi - 1).unwrap().0)
}

/// Scans elements in descending `(f, id ascending)` order, keeping each one
/// whose addition preserves independence: an `f`-maximum basis in one rank
/// query per element.
pub fn greedy_max_basis(oracle: &RankOracle, f: &[Num]) -> (ElemSet, Num) {
    let n = oracle.ground_size();
    assert_eq!(f.len(), n, "priority vector length must match ground size");
    let mut order: Vec<Element> = (0..n).collect();
    order.sort_unstable_by_key(|&e| (std::cmp::Reverse(f[e]), e));
    let mut basis = ElemSet::new(n);
    let mut weight: Num = 0;
    for e in order {
        if oracle.rank(&SetExpr::of(&basis).plus(e)) == basis.len() + 1 {
            basis.insert(e);
            weight = exact::add(weight, f[e]);
        }
    }
    (basis, weight)
}
