//! Reproducible sampling of p-random subsets of lattice boxes.
//!
//! The generator identity is part of the reproducibility contract: streams come
//! from ChaCha8 (`rand_chacha 0.3`) keyed through `SeedableRng::seed_from_u64`,
//! and derived seeds (per-trial seeds in sweeps) use the SplitMix64 finalizer
//! in [`derive_seed`]. Identical spec, identical output, on any platform.

use crate::error::{Error, Result};
use crate::lattice::{GridBox, Point};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Parameters of one p-random draw.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSetSpec {
    pub dimension: usize,
    pub p: f64,
    pub boxx: GridBox,
    pub seed: u64,
    /// When set, the origin is a candidate cell like any other; by default it
    /// is excluded since `0` changes neither the closure nor the subset sums.
    pub include_origin: bool,
}

impl RandomSetSpec {
    pub fn new(p: f64, boxx: GridBox, seed: u64) -> Result<RandomSetSpec> {
        let spec = RandomSetSpec {
            dimension: boxx.dim(),
            p,
            boxx,
            seed,
            include_origin: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::POutOfRange);
        }
        if self.dimension != self.boxx.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.boxx.dim(),
                got: self.dimension,
            });
        }
        Ok(())
    }
}

/// The realized random subset, stored as strictly increasing row-major ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    pub spec: RandomSetSpec,
    ranks: Vec<u64>,
}

impl SampleResult {
    /// Ranks of the sampled points, strictly increasing.
    pub fn ranks(&self) -> &[u64] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Decoded points, in row-major order.
    pub fn points(&self) -> Vec<Point> {
        self.ranks
            .iter()
            .map(|&r| self.spec.boxx.point_at(r).unwrap())
            .collect()
    }
}

/// SplitMix64 finalizer used to derive independent seeds from a base seed and
/// a stream index; sweeps use `stream = cell_index << 32 | trial_index`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sample a p-random subset of the box. Each candidate cell is included
/// independently with probability exactly `p`; expected cost is
/// `O(p * cells)` through geometric skip lengths.
pub fn sample(spec: &RandomSetSpec) -> Result<SampleResult> {
    sample_restricted(spec, |_| true)
}

/// As [`sample`], but only cells whose point satisfies `allowed` are kept.
/// The random walk is identical to `sample`'s, so an always-true predicate
/// reproduces `sample` bit for bit under the same seed.
pub fn sample_restricted(
    spec: &RandomSetSpec,
    mut allowed: impl FnMut(&Point) -> bool,
) -> Result<SampleResult> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let cells = spec.boxx.cells();
    let start: u64 = if spec.include_origin { 0 } else { 1 };
    let ln_q = (-spec.p).ln_1p(); // ln(1 - p) < 0
    let mut ranks = Vec::new();
    let mut pos = start;
    while pos < cells {
        // failures before the next success, drawn directly
        let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let s = (u.ln() / ln_q).floor();
        if s >= (cells - pos) as f64 {
            break;
        }
        let skip = s as u64;
        pos += skip;
        if pos >= cells {
            break;
        }
        let point = spec.boxx.point_at(pos).unwrap();
        if allowed(&point) {
            ranks.push(pos);
        }
        pos += 1;
    }
    Ok(SampleResult {
        spec: spec.clone(),
        ranks,
    })
}
