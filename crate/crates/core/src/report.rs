//! Solve telemetry and benchmark rows.

use serde::{Deserialize, Serialize};

use crate::matroid::{Phase, QueryStats};

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct PhaseQueries {
    pub m1: u64,
    pub m2: u64,
}

impl PhaseQueries {
    pub fn total(self) -> u64 {
        self.m1 + self.m2
    }
}

/// Per-phase rank-query counts for one solve.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct QueryBreakdown {
    pub init: PhaseQueries,
    pub adjustment: PhaseQueries,
    pub sssp: PhaseQueries,
    pub augmentation: PhaseQueries,
    pub verification: PhaseQueries,
}

impl QueryBreakdown {
    pub fn from_stats(stats: &QueryStats) -> Self {
        let grab = |p: Phase| PhaseQueries {
            m1: stats.count(p, 0),
            m2: stats.count(p, 1),
        };
        QueryBreakdown {
            init: grab(Phase::Init),
            adjustment: grab(Phase::Adjustment),
            sssp: grab(Phase::Sssp),
            augmentation: grab(Phase::Augmentation),
            verification: grab(Phase::Verification),
        }
    }

    pub fn total(&self) -> u64 {
        self.init.total()
            + self.adjustment.total()
            + self.sssp.total()
            + self.augmentation.total()
            + self.verification.total()
    }

    /// Queries of the algorithm proper: adjustment + sssp + augmentation,
    /// excluding initialization and verification overhead.
    pub fn total_algorithm(&self) -> u64 {
        self.adjustment.total() + self.sssp.total() + self.augmentation.total()
    }
}

/// One scaling round.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RoundTelemetry {
    /// log2 of ε after the round (scaled units).
    pub eps_log2: u32,
    pub adjustment_steps: u64,
    /// |S1 \ S2| right after the adjustment.
    pub diff_after_adjust: usize,
    pub augmentations: u32,
}

/// Serializable solve telemetry.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub n: usize,
    /// Elements surviving preprocessing (non-negative weight, non-loop).
    pub n_kept: usize,
    /// Ground-set size after padding.
    pub n_hat: usize,
    pub r: usize,
    pub w_max: i64,
    pub scale_exp: u32,
    pub rounds: Vec<RoundTelemetry>,
    pub queries: QueryBreakdown,
    pub queries_total: u64,
    pub queries_algorithm: u64,
    pub augmentations_total: u32,
    pub wall_ms: f64,
    /// `queries_algorithm / (n * r^(3/4) * log2(n_hat + 2) * log2(r * W + 2))`.
    pub budget_ratio: f64,
    pub solution_size: usize,
    pub solution_weight: i64,
}

pub fn budget_ratio(queries_algorithm: u64, n: usize, r: usize, n_hat: usize, w_max: i64) -> f64 {
    if n == 0 || r == 0 {
        return 0.0;
    }
    let denom = (n as f64)
        * (r as f64).powf(0.75)
        * ((n_hat as f64) + 2.0).log2()
        * ((r as f64) * (w_max.max(0) as f64) + 2.0).log2();
    queries_algorithm as f64 / denom
}

/// One CSV row of a benchmark sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    pub n: usize,
    pub r: usize,
    #[serde(rename = "W")]
    pub w: i64,
    pub queries_init: u64,
    pub queries_adjust: u64,
    pub queries_sssp: u64,
    pub queries_total: u64,
    pub augmentations: u32,
    pub rounds: usize,
    pub wall_ms: f64,
    pub budget_ratio: f64,
}

impl BenchRow {
    pub fn from_report(name: String, report: &RunReport) -> Self {
        BenchRow {
            name,
            n: report.n,
            r: report.r,
            w: report.w_max,
            queries_init: report.queries.init.total(),
            queries_adjust: report.queries.adjustment.total(),
            queries_sssp: report.queries.sssp.total(),
            queries_total: report.queries_total,
            augmentations: report.augmentations_total,
            rounds: report.rounds.len(),
            wall_ms: report.wall_ms,
            budget_ratio: report.budget_ratio,
        }
    }
}
