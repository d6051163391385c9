//! Instance descriptions (JSON), oracle construction, and deterministic
//! instance generators.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::RankOracle;

/// Family-specific matroid description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MatroidDescriptor {
    Uniform {
        n: usize,
        k: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        caps: Vec<usize>,
    },
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    LinearGf2 {
        rows: usize,
        cols: Vec<String>,
    },
}

impl MatroidDescriptor {
    pub fn ground_size(&self) -> usize {
        match self {
            MatroidDescriptor::Uniform { n, .. } => *n,
            MatroidDescriptor::Partition { blocks, .. } => blocks.iter().map(Vec::len).sum(),
            MatroidDescriptor::Graphic { edges, .. } => edges.len(),
            MatroidDescriptor::LinearGf2 { cols, .. } => cols.len(),
        }
    }

    pub fn build(&self) -> Result<RankOracle> {
        match self {
            MatroidDescriptor::Uniform { n, k } => Ok(RankOracle::uniform(*n, *k)),
            MatroidDescriptor::Partition { blocks, caps } => RankOracle::partition(blocks, caps),
            MatroidDescriptor::Graphic { vertices, edges } => RankOracle::graphic(*vertices, edges),
            MatroidDescriptor::LinearGf2 { rows, cols } => {
                let mut parsed = Vec::with_capacity(cols.len());
                for (ci, col) in cols.iter().enumerate() {
                    let mut bits = Vec::with_capacity(col.len());
                    for ch in col.chars() {
                        match ch {
                            '0' => bits.push(false),
                            '1' => bits.push(true),
                            other => {
                                return Err(Error::InstanceFormat(format!(
                                    "linear_gf2 column {ci}: invalid character {other:?}"
                                )))
                            }
                        }
                    }
                    if bits.len() != *rows {
                        return Err(Error::InstanceFormat(format!(
                            "linear_gf2 column {ci}: {} bits, expected {rows}",
                            bits.len()
                        )));
                    }
                    parsed.push(bits);
                }
                RankOracle::linear_gf2(*rows, &parsed)
            }
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct InstanceMeta {
    pub name: String,
    pub seed: u64,
}

/// A solvable problem description: two matroids over the same ground set
/// plus integer element weights.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InstanceFile {
    pub matroid1: MatroidDescriptor,
    pub matroid2: MatroidDescriptor,
    pub weights: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<InstanceMeta>,
}

impl InstanceFile {
    pub fn validate(&self) -> Result<()> {
        let n = self.weights.len();
        let n1 = self.matroid1.ground_size();
        let n2 = self.matroid2.ground_size();
        if n1 != n || n2 != n {
            return Err(Error::InstanceFormat(format!(
                "ground-set sizes disagree: matroid1 covers {n1}, matroid2 covers {n2}, \
                 weights cover {n}"
            )));
        }
        Ok(())
    }

    /// Builds both oracles after validation.
    pub fn build_oracles(&self) -> Result<(RankOracle, RankOracle)> {
        self.validate()?;
        Ok((self.matroid1.build()?, self.matroid2.build()?))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: InstanceFile = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

/// Supported generator family pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyPair {
    /// Graphic matroid vs partition matroid; common rank exactly `r`.
    GraphicPartition,
    /// Bipartite matching encoded as two partition matroids over edges.
    Matching,
    /// Binary linear matroid vs graphic matroid.
    Gf2Graphic,
    /// Uniform vs uniform (a free problem).
    UniformUniform,
}

impl FamilyPair {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "graphic-partition" | "graphic_partition" => Ok(FamilyPair::GraphicPartition),
            "matching" | "partition-partition" | "partition_partition" => Ok(FamilyPair::Matching),
            "gf2-graphic" | "linear_gf2-graphic" | "gf2_graphic" => Ok(FamilyPair::Gf2Graphic),
            "uniform-uniform" | "uniform_uniform" => Ok(FamilyPair::UniformUniform),
            other => Err(Error::InstanceFormat(format!(
                "unknown family pair {other:?} (expected graphic-partition, matching, \
                 gf2-graphic, or uniform-uniform)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyPair::GraphicPartition => "graphic-partition",
            FamilyPair::Matching => "matching",
            FamilyPair::Gf2Graphic => "gf2-graphic",
            FamilyPair::UniformUniform => "uniform-uniform",
        }
    }
}

/// Deterministic instance generation: identical `(pair, n, r, w_max, seed)`
/// always produce byte-identical instances.
pub fn generate(
    pair: FamilyPair,
    n: usize,
    r: usize,
    w_max: i64,
    seed: u64,
) -> Result<InstanceFile> {
    if n == 0 || r == 0 {
        return Err(Error::InstanceFormat(
            "generators require n >= 1 and r >= 1".into(),
        ));
    }
    if r > n {
        return Err(Error::InstanceFormat(format!("r = {r} exceeds n = {n}")));
    }
    if w_max < 0 {
        return Err(Error::InstanceFormat("w_max must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=w_max)).collect();

    let (matroid1, matroid2) = match pair {
        FamilyPair::GraphicPartition => (
            random_graphic(n, r, &mut rng),
            spanning_partition(n, r, &mut rng),
        ),
        FamilyPair::Matching => {
            // row-major enumeration of an r x r bipartite pair grid; the
            // achieved matching number is min(r, ceil(n / r))
            if n > r * r {
                return Err(Error::InstanceFormat(format!(
                    "matching generator: n = {n} exceeds r^2 = {}",
                    r * r
                )));
            }
            if n.div_ceil(r) < r {
                return Err(Error::InstanceFormat(format!(
                    "matching generator: rank {r} unreachable with n = {n} edges \
                     (need n >= r(r-1)+1)"
                )));
            }
            let mut left_blocks = vec![Vec::new(); r];
            let mut right_blocks = vec![Vec::new(); r];
            for e in 0..n {
                left_blocks[e / r].push(e);
                right_blocks[e % r].push(e);
            }
            left_blocks.retain(|b| !b.is_empty());
            right_blocks.retain(|b| !b.is_empty());
            let lcaps = vec![1; left_blocks.len()];
            let rcaps = vec![1; right_blocks.len()];
            (
                MatroidDescriptor::Partition {
                    blocks: left_blocks,
                    caps: lcaps,
                },
                MatroidDescriptor::Partition {
                    blocks: right_blocks,
                    caps: rcaps,
                },
            )
        }
        FamilyPair::Gf2Graphic => {
            let cols: Vec<String> = (0..n)
                .map(|e| {
                    (0..r)
                        .map(|row| {
                            if e < r {
                                if row == e {
                                    '1'
                                } else {
                                    '0'
                                }
                            } else if rng.gen_bool(0.5) {
                                '1'
                            } else {
                                '0'
                            }
                        })
                        .collect()
                })
                .collect();
            (
                MatroidDescriptor::LinearGf2 { rows: r, cols },
                random_graphic(n, r, &mut rng),
            )
        }
        FamilyPair::UniformUniform => (
            MatroidDescriptor::Uniform { n, k: r },
            MatroidDescriptor::Uniform { n, k: r },
        ),
    };

    let inst = InstanceFile {
        matroid1,
        matroid2,
        weights,
        meta: Some(InstanceMeta {
            name: format!("{}-n{n}-r{r}-w{w_max}-s{seed}", pair.name()),
            seed,
        }),
    };
    inst.validate()?;
    Ok(inst)
}

/// `r + 1` vertices; the first `r` edges form a random spanning tree (rank
/// exactly `r`), the rest are random non-loop edges.
fn random_graphic(n: usize, r: usize, rng: &mut ChaCha8Rng) -> MatroidDescriptor {
    let vertices = r + 1;
    let mut edges = Vec::with_capacity(n);
    for v in 1..=r {
        let u = rng.gen_range(0..v);
        edges.push((u, v));
    }
    while edges.len() < n {
        let u = rng.gen_range(0..vertices);
        let v = rng.gen_range(0..vertices);
        if u != v {
            edges.push((u.min(v), u.max(v)));
        }
    }
    MatroidDescriptor::Graphic { vertices, edges }
}

/// `r` unit-capacity blocks; the i-th spanning-tree edge lands in block `i`,
/// every later element in a random block. The first `r` elements stay a
/// common independent set of both generated matroids.
fn spanning_partition(n: usize, r: usize, rng: &mut ChaCha8Rng) -> MatroidDescriptor {
    let mut blocks = vec![Vec::new(); r];
    for e in 0..n {
        if e < r {
            blocks[e].push(e);
        } else {
            blocks[rng.gen_range(0..r)].push(e);
        }
    }
    blocks.retain(|b| !b.is_empty());
    let caps = vec![1; blocks.len()];
    MatroidDescriptor::Partition { blocks, caps }
}
