//! Exact weighted matroid intersection through rank oracles.
//!
//! Given two matroids over a common ground set, accessed only through rank
//! oracles, `misect` computes a maximum-weight common independent set exactly
//! and counts every oracle invocation along the way. The solver combines
//! weight scaling over ε-splittings, an auction-style weight adjustment, and
//! a buffered Dijkstra over implicit exchange graphs whose edges are
//! discovered with binary-search exchange probes instead of being
//! materialized.
//!
//! The crate also ships concrete matroid families (uniform, partition,
//! graphic, binary-linear), brute-force verification oracles, and a CLI for
//! generating, solving and benchmarking instances.
//!
//! ```
//! use misect::{solve, RankOracle, SolveConfig};
//!
//! // spanning forests of a 4-cycle with a chord, versus block capacities
//! let m1 = RankOracle::graphic(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])?;
//! let m2 = RankOracle::partition(&[vec![0, 1], vec![2, 3], vec![4]], &[1, 2, 1])?;
//! let out = solve(m1, m2, &[3, -1, 5, 2, 4], &SolveConfig::default())?;
//! assert_eq!(out.weight, 12);
//! assert!(out.report.queries_total > 0);
//! # Ok::<(), misect::Error>(())
//! ```

pub mod augment;
pub mod error;
pub mod exchange;
pub mod instance;
pub mod matroid;
pub mod pool;
pub mod report;
pub mod solver;
pub mod splitting;
pub mod sssp;
pub mod verify;

pub use error::Error;
pub use matroid::{discard_negative, ElemSet, Element, Phase, QueryStats, RankOracle, SetExpr};
pub use pool::{Objective, OrderedPool};
pub use solver::{certify_optimality, solve, Certificate, SolveConfig, SolveOutput};

/// Exact integers for weights, splittings and distance labels.
///
/// All arithmetic on these goes through [`exact`] so that an overflow aborts
/// loudly instead of wrapping.
pub type Num = i128;

/// Checked arithmetic helpers for [`Num`].
pub mod exact {
    use super::Num;

    #[inline]
    pub fn add(a: Num, b: Num) -> Num {
        a.checked_add(b).expect("exact integer overflow in add")
    }

    #[inline]
    pub fn sub(a: Num, b: Num) -> Num {
        a.checked_sub(b).expect("exact integer overflow in sub")
    }

    #[inline]
    pub fn mul(a: Num, b: Num) -> Num {
        a.checked_mul(b).expect("exact integer overflow in mul")
    }
}
