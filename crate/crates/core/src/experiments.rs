//! Monte Carlo harness: per-trial invariants (genus with certificate verdict,
//! subset-sum gap counts, sparsity and containment statistics against the
//! inner/outer scaling regions), reproducible sweeps over (d, p) grids, and
//! the syndeticity checks.

use crate::error::{Error, Result};
use crate::hyperboloid::HyperboloidRegion;
use crate::lattice::{BitGrid, GridBox};
use crate::limits::Limits;
use crate::sample::{derive_seed, sample, RandomSetSpec};
use crate::semigroup::{
    closure_in_box_ranks, completeness_certificate, minimal_generators, subset_sums_in_box_ranks,
    ClosureGrid,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Semigroup,
    SubsetSums,
    Both,
}

impl Model {
    pub fn wants_semigroup(self) -> bool {
        matches!(self, Model::Semigroup | Model::Both)
    }
    pub fn wants_subset_sums(self) -> bool {
        matches!(self, Model::SubsetSums | Model::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoxPolicy {
    /// Per-axis extent `ceil(2 * outer_c * p^-1 * (log p^-1)^2)`, covering the
    /// outer region's axis intercept with a factor-2 margin for the
    /// completeness certificate.
    Auto,
    Extents(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub d: usize,
    pub p: f64,
    pub seed: u64,
    pub box_policy: BoxPolicy,
    pub model: Model,
    /// Constant c of the inner (sparsity) region `R_d(p, c * Z*)`.
    pub inner_c: f64,
    /// Constant C of the outer (containment) region `R_d(p, C * Z*)`.
    pub outer_c: f64,
    pub collect_embedding: bool,
}

impl TrialConfig {
    pub fn new(d: usize, p: f64, seed: u64) -> TrialConfig {
        TrialConfig {
            d,
            p,
            seed,
            box_policy: BoxPolicy::Auto,
            model: Model::Semigroup,
            inner_c: 0.05,
            outer_c: 20.0,
            collect_embedding: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::POutOfRange);
        }
        if !(self.inner_c > 0.0 && self.inner_c <= self.outer_c) {
            return Err(Error::InvalidParameter(
                "need 0 < inner_c <= outer_C".into(),
            ));
        }
        Ok(())
    }

    /// The scale factor `Z* = p^-1 (log p^-1)^(d+1)`.
    pub fn z_star(&self) -> f64 {
        let shift = (1.0 / self.p).ln();
        shift.powi(self.d as i32 + 1) / self.p
    }

    pub fn resolve_box(&self, limits: &Limits) -> Result<GridBox> {
        match &self.box_policy {
            BoxPolicy::Extents(e) => {
                let b = GridBox::new(e.clone())?;
                if b.cells() > limits.max_cells {
                    return Err(Error::BoxTooLarge {
                        required: e.clone(),
                        cells: b.cells() as u128,
                        cap: limits.max_cells,
                    });
                }
                Ok(b)
            }
            BoxPolicy::Auto => {
                let shift = (1.0 / self.p).ln();
                let extent = (2.0 * self.outer_c * shift * shift / self.p).ceil();
                if !extent.is_finite() || extent < 1.0 {
                    return Err(Error::InvalidParameter("auto box degenerate".into()));
                }
                let extent = extent as u64;
                let required = vec![extent; self.d];
                let cells = (extent as u128).pow(self.d as u32);
                if cells > limits.max_cells as u128 {
                    return Err(Error::BoxTooLarge {
                        required,
                        cells,
                        cap: limits.max_cells,
                    });
                }
                GridBox::new(required)
            }
        }
    }

    pub fn inner_region(&self) -> Result<HyperboloidRegion> {
        HyperboloidRegion::from_density(self.d, self.p, self.inner_c)
    }

    pub fn outer_region(&self) -> Result<HyperboloidRegion> {
        HyperboloidRegion::from_density(self.d, self.p, self.outer_c)
    }
}

/// Sparsity and containment statistics of one grid against the two regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeStats {
    /// Members inside the inner region.
    pub inner_overlap: u64,
    /// Lattice points of the inner region.
    pub inner_size: u64,
    pub inner_fraction: f64,
    /// Box points outside the outer region that are missing from the grid.
    pub outer_violations: u64,
}

/// Per-trial output. Optional fields are absent when the model or box policy
/// does not produce them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialResult {
    pub d: usize,
    pub p: f64,
    pub seed: u64,
    pub box_extents: Vec<u64>,
    pub sample_size: u64,
    pub gap_count_semigroup: Option<u64>,
    pub certified: Option<bool>,
    pub certificate_threshold: Option<u64>,
    pub gap_count_fs_in_box: Option<u64>,
    /// Whether the box's outer shell lies entirely in FS(A); a diagnostic,
    /// never a certificate.
    pub shell_contained: Option<bool>,
    pub shape_semigroup: Option<ShapeStats>,
    pub shape_fs: Option<ShapeStats>,
    pub embedding_dimension: Option<u64>,
    pub embedding_inside_region: Option<bool>,
    pub wall_ms: u64,
}

/// Run one trial: sample, build the requested grids, evaluate invariants.
pub fn run_trial(config: &TrialConfig, limits: &Limits) -> Result<TrialResult> {
    config.validate()?;
    let start = Instant::now();
    let boxx = config.resolve_box(limits)?;
    let spec = RandomSetSpec::new(config.p, boxx.clone(), config.seed)?;
    let sampled = sample(&spec)?;

    let mut out = TrialResult {
        d: config.d,
        p: config.p,
        seed: config.seed,
        box_extents: boxx.extents().to_vec(),
        sample_size: sampled.len() as u64,
        gap_count_semigroup: None,
        certified: None,
        certificate_threshold: None,
        gap_count_fs_in_box: None,
        shell_contained: None,
        shape_semigroup: None,
        shape_fs: None,
        embedding_dimension: None,
        embedding_inside_region: None,
        wall_ms: 0,
    };

    let outer = config.outer_region()?;
    let inner = config.inner_region()?;
    let box_covers_outer = box_covers_region(&boxx, &outer);

    if config.model.wants_semigroup() {
        let closure = closure_in_box_ranks(sampled.ranks(), &boxx)?;
        let cert = completeness_certificate(&closure)?;
        out.gap_count_semigroup = Some(closure.gap_count());
        out.certified = Some(cert.certified);
        out.certificate_threshold = cert.threshold;
        if box_covers_outer {
            out.shape_semigroup = Some(shape_report(&closure, &inner, &outer, limits)?);
        }
        if config.collect_embedding && cert.certified {
            let (count, inside) = embedding_dimension_report(&closure, true, &outer)?;
            out.embedding_dimension = Some(count);
            out.embedding_inside_region = Some(inside);
        }
    }

    if config.model.wants_subset_sums() {
        let fs = subset_sums_in_box_ranks(sampled.ranks(), &boxx)?;
        out.gap_count_fs_in_box = Some(fs.gap_count());
        out.shell_contained = Some(shell_contained(fs.grid()));
        if box_covers_outer {
            out.shape_fs = Some(shape_report(&fs, &inner, &outer, limits)?);
        }
    }

    out.wall_ms = start.elapsed().as_millis() as u64;
    Ok(out)
}

/// Does the box contain every lattice point of the region? By downward
/// closure it suffices that each axis intercept point just past the box is
/// outside the region.
pub fn box_covers_region(boxx: &GridBox, region: &HyperboloidRegion) -> bool {
    if boxx.dim() != region.dim() {
        return false;
    }
    for axis in 0..boxx.dim() {
        let mut coords = vec![0u64; boxx.dim()];
        coords[axis] = boxx.extents()[axis];
        if region.contains_coords(&coords) {
            return false;
        }
    }
    true
}

/// Sparsity inside the inner region and containment violations outside the
/// outer region, for one grid.
pub fn shape_report(
    grid: &ClosureGrid,
    inner: &HyperboloidRegion,
    outer: &HyperboloidRegion,
    limits: &Limits,
) -> Result<ShapeStats> {
    let boxx = grid.boxx();
    if !box_covers_region(boxx, outer) {
        return Err(Error::BoxDoesNotCoverRegion);
    }
    let inner_points = inner.enumerate(limits)?;
    let inner_size = inner_points.len() as u64;
    let mut inner_overlap = 0u64;
    for p in &inner_points {
        if grid.grid().get_point(p)? {
            inner_overlap += 1;
        }
    }
    let outer_violations = count_unset_outside(grid.grid(), outer);
    Ok(ShapeStats {
        inner_overlap,
        inner_size,
        inner_fraction: if inner_size == 0 {
            0.0
        } else {
            inner_overlap as f64 / inner_size as f64
        },
        outer_violations,
    })
}

/// Unset cells of the grid that lie outside the region; row-at-a-time since
/// the region boundary along the last axis is a single threshold per row.
fn count_unset_outside(grid: &BitGrid, region: &HyperboloidRegion) -> u64 {
    let boxx = grid.boxx();
    let d = boxx.dim();
    let row_len = boxx.row_len();
    let extents = boxx.extents().to_vec();
    let mut prefix = vec![0u64; d - 1];
    let mut coords = vec![0u64; d];
    let mut violations = 0u64;
    for row in 0..boxx.row_count() {
        if row > 0 {
            let mut i = prefix.len();
            while i > 0 {
                i -= 1;
                prefix[i] += 1;
                if prefix[i] < extents[i] {
                    break;
                }
                prefix[i] = 0;
            }
        }
        coords[..d - 1].copy_from_slice(&prefix);
        // first in-row offset outside the region (region is downward closed)
        coords[d - 1] = 0;
        let mut t = if region.contains_coords(&coords) {
            // estimate then fix up against the membership test
            let mut lo = 0u64;
            let mut hi = row_len;
            while lo + 1 < hi {
                let mid = lo + (hi - lo) / 2;
                coords[d - 1] = mid;
                if region.contains_coords(&coords) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo + 1
        } else {
            0
        };
        t = t.min(row_len);
        let outside = row_len - t;
        if outside > 0 {
            violations += outside - popcount_row_from(grid, row as usize, t);
        }
    }
    violations
}

/// Set bits of row `row` at offsets `[from, row_len)`.
fn popcount_row_from(grid: &BitGrid, row: usize, from: u64) -> u64 {
    let row_len = grid.boxx().row_len();
    let words = grid.words();
    let base = row * grid.row_words();
    let mut n = 0u64;
    let start_word = (from >> 6) as usize;
    let end_word = (row_len as usize).div_ceil(64);
    for w in start_word..end_word {
        let mut word = words[base + w];
        if w == start_word && from & 63 != 0 {
            word &= !((1u64 << (from & 63)) - 1);
        }
        n += word.count_ones() as u64;
    }
    n
}

/// Is the box's outer shell (cells with some coordinate at its maximum)
/// entirely contained in the grid?
pub fn shell_contained(grid: &BitGrid) -> bool {
    let boxx = grid.boxx();
    let d = boxx.dim();
    let row_len = boxx.row_len();
    let extents = boxx.extents().to_vec();
    let mut prefix = vec![0u64; d - 1];
    for row in 0..boxx.row_count() {
        if row > 0 {
            let mut i = prefix.len();
            while i > 0 {
                i -= 1;
                prefix[i] += 1;
                if prefix[i] < extents[i] {
                    break;
                }
                prefix[i] = 0;
            }
        }
        let on_boundary = prefix
            .iter()
            .zip(&extents[..d - 1])
            .any(|(&c, &e)| c + 1 == e);
        if on_boundary {
            // the whole row is shell
            if popcount_row_from(grid, row as usize, 0) != row_len {
                return false;
            }
        } else if !grid.get_rc(row as usize, row_len - 1) {
            return false;
        }
    }
    true
}

/// Embedding-dimension readout: count of minimal generators and whether they
/// all lie in the outer region. Requires a certified grid.
pub fn embedding_dimension_report(
    grid: &ClosureGrid,
    certified: bool,
    outer: &HyperboloidRegion,
) -> Result<(u64, bool)> {
    if !certified {
        return Err(Error::CertificateRequired);
    }
    let mins = minimal_generators(grid)?;
    let inside = mins.iter().all(|m| outer.contains(m));
    Ok((mins.len() as u64, inside))
}

/// Deterministic syndeticity check of a 1-d generator list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndeticityOutcome {
    pub hypothesis_holds: bool,
    pub conclusion_holds: bool,
}

/// `hypothesis_holds`: the chain condition `a_1 <= R`, `a_i <= a_1 + ... +
/// a_{i-1} + R` holds for every prefix until the partial sums reach
/// `horizon - R` (so the inductive covering argument reaches the horizon).
/// `conclusion_holds`: `FS(A) ∩ [0, horizon]` meets every length-R window in
/// `[0, horizon - R]`.
pub fn syndeticity_check(a: &[u64], r: u64, horizon: u64) -> Result<SyndeticityOutcome> {
    if r == 0 || horizon < r {
        return Err(Error::InvalidParameter("need horizon >= R >= 1".into()));
    }
    if a.windows(2).any(|w| w[0] >= w[1]) || a.first() == Some(&0) {
        return Err(Error::InvalidParameter(
            "generators must be strictly increasing positive integers".into(),
        ));
    }
    let target = (horizon - r) as u128;
    let mut sum: u128 = 0;
    let mut chain_ok = true;
    for &ai in a {
        if sum >= target {
            break;
        }
        if ai as u128 > sum + r as u128 {
            chain_ok = false;
            break;
        }
        sum += ai as u128;
    }
    let hypothesis_holds = chain_ok && sum >= target;

    let boxx = GridBox::new(vec![horizon + 1])?;
    let ranks: Vec<u64> = a.iter().copied().filter(|&x| x <= horizon).collect();
    let fs = subset_sums_in_box_ranks(&ranks, &boxx)?;
    let mut run = 0u64;
    let mut worst = 0u64;
    for x in 0..horizon {
        if fs.grid().get_rank(x) {
            run = 0;
        } else {
            run += 1;
            worst = worst.max(run);
        }
    }
    Ok(SyndeticityOutcome {
        hypothesis_holds,
        conclusion_holds: worst < r,
    })
}

/// One cell of a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub d: usize,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub cell_index: usize,
    pub trial_index: u64,
    pub seed: u64,
    pub result: Option<TrialResult>,
    pub error: Option<String>,
}

/// Per-cell aggregates; medians, not means, since gap counts are heavy-tailed
/// at desk scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellAggregate {
    pub d: usize,
    pub p: f64,
    pub trials: u64,
    pub errors: u64,
    pub certified_count: u64,
    pub genus_median: Option<f64>,
    pub genus_q1: Option<f64>,
    pub genus_q3: Option<f64>,
    pub fs_gap_median: Option<f64>,
    pub mean_inner_fraction: Option<f64>,
    pub zero_violation_fraction_semigroup: Option<f64>,
    pub zero_violation_fraction_fs: Option<f64>,
    pub embedding_median: Option<f64>,
    pub embedding_inside_fraction: Option<f64>,
}

/// Least-squares fit of `log(median genus)` against `log(p^-1 (log p^-1)^2d)`
/// across the cells sharing a dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingFit {
    pub d: usize,
    pub slope: f64,
    pub intercept: f64,
    pub cells_used: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub seed_base: u64,
    pub trials_per_cell: u64,
    pub cells: Vec<SweepCell>,
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<CellAggregate>,
    pub fits: Vec<ScalingFit>,
}

/// Run `trials_per_cell` trials for every cell. Trials execute in parallel;
/// per-trial seeds come from [`derive_seed`], so results are independent of
/// scheduling, and rows are merged in (cell, trial) order.
pub fn sweep(
    cells: &[SweepCell],
    trials_per_cell: u64,
    seed_base: u64,
    template: &TrialConfig,
    limits: &Limits,
) -> Result<SweepTable> {
    if cells.is_empty() {
        return Err(Error::InvalidParameter("sweep grid is empty".into()));
    }
    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..trials_per_cell).map(move |t| (c, t)))
        .collect();
    let rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(cell_index, trial_index)| {
            let cell = cells[cell_index];
            let seed = derive_seed(seed_base, ((cell_index as u64) << 32) | trial_index);
            let mut config = template.clone();
            config.d = cell.d;
            config.p = cell.p;
            config.seed = seed;
            match run_trial(&config, limits) {
                Ok(result) => SweepRow {
                    cell_index,
                    trial_index,
                    seed,
                    result: Some(result),
                    error: None,
                },
                Err(e) => SweepRow {
                    cell_index,
                    trial_index,
                    seed,
                    result: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let aggregates: Vec<CellAggregate> = cells
        .iter()
        .enumerate()
        .map(|(ci, cell)| aggregate_cell(ci, *cell, &rows))
        .collect();
    let fits = fit_scaling(cells, &aggregates);
    Ok(SweepTable {
        seed_base,
        trials_per_cell,
        cells: cells.to_vec(),
        rows,
        aggregates,
        fits,
    })
}

fn aggregate_cell(cell_index: usize, cell: SweepCell, rows: &[SweepRow]) -> CellAggregate {
    let mine: Vec<&SweepRow> = rows.iter().filter(|r| r.cell_index == cell_index).collect();
    let results: Vec<&TrialResult> = mine.iter().filter_map(|r| r.result.as_ref()).collect();
    let errors = (mine.len() - results.len()) as u64;
    let certified_genus: Vec<f64> = results
        .iter()
        .filter(|r| r.certified == Some(true))
        .filter_map(|r| r.gap_count_semigroup.map(|g| g as f64))
        .collect();
    let fs_gaps: Vec<f64> = results
        .iter()
        .filter_map(|r| r.gap_count_fs_in_box.map(|g| g as f64))
        .collect();
    let inner_fracs: Vec<f64> = results
        .iter()
        .filter_map(|r| r.shape_semigroup.map(|s| s.inner_fraction))
        .collect();
    let zero_viol_s: Vec<f64> = results
        .iter()
        .filter_map(|r| {
            r.shape_semigroup
                .map(|s| if s.outer_violations == 0 { 1.0 } else { 0.0 })
        })
        .collect();
    let zero_viol_fs: Vec<f64> = results
        .iter()
        .filter_map(|r| {
            r.shape_fs
                .map(|s| if s.outer_violations == 0 { 1.0 } else { 0.0 })
        })
        .collect();
    let embeddings: Vec<f64> = results
        .iter()
        .filter_map(|r| r.embedding_dimension.map(|e| e as f64))
        .collect();
    let inside: Vec<f64> = results
        .iter()
        .filter_map(|r| {
            r.embedding_inside_region
                .map(|b| if b { 1.0 } else { 0.0 })
        })
        .collect();
    CellAggregate {
        d: cell.d,
        p: cell.p,
        trials: mine.len() as u64,
        errors,
        certified_count: certified_genus.len() as u64,
        genus_median: median(&certified_genus),
        genus_q1: quantile(&certified_genus, 0.25),
        genus_q3: quantile(&certified_genus, 0.75),
        fs_gap_median: median(&fs_gaps),
        mean_inner_fraction: mean(&inner_fracs),
        zero_violation_fraction_semigroup: mean(&zero_viol_s),
        zero_violation_fraction_fs: mean(&zero_viol_fs),
        embedding_median: median(&embeddings),
        embedding_inside_fraction: mean(&inside),
    }
}

fn fit_scaling(cells: &[SweepCell], aggregates: &[CellAggregate]) -> Vec<ScalingFit> {
    let mut dims: Vec<usize> = cells.iter().map(|c| c.d).collect();
    dims.sort_unstable();
    dims.dedup();
    let mut fits = Vec::new();
    for d in dims {
        let pts: Vec<(f64, f64)> = aggregates
            .iter()
            .filter(|a| a.d == d)
            .filter_map(|a| {
                a.genus_median.and_then(|m| {
                    if m > 0.0 {
                        let shift = (1.0 / a.p).ln();
                        Some(((shift.powi(2 * d as i32) / a.p).ln(), m.ln()))
                    } else {
                        None
                    }
                })
            })
            .collect();
        if pts.len() < 2 {
            continue;
        }
        let n = pts.len() as f64;
        let xm = pts.iter().map(|q| q.0).sum::<f64>() / n;
        let ym = pts.iter().map(|q| q.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|q| (q.0 - xm) * (q.0 - xm)).sum();
        let sxy: f64 = pts.iter().map(|q| (q.0 - xm) * (q.1 - ym)).sum();
        if sxx == 0.0 {
            continue;
        }
        let slope = sxy / sxx;
        fits.push(ScalingFit {
            d,
            slope,
            intercept: ym - slope * xm,
            cells_used: pts.len(),
        });
    }
    fits
}

pub fn median(v: &[f64]) -> Option<f64> {
    quantile(v, 0.5)
}

pub fn mean(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Linear-interpolation quantile of an unsorted sample.
pub fn quantile(v: &[f64], q: f64) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        Some(s[lo])
    } else {
        Some(s[lo] + (pos - lo as f64) * (s[hi] - s[lo]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Point;

    #[test]
    fn high_density_trial_has_tiny_genus() {
        // p near 1: the first few integers are almost surely generators
        let mut config = TrialConfig::new(1, 0.9, 12345);
        config.box_policy = BoxPolicy::Extents(vec![64]);
        let r = run_trial(&config, &Limits::default()).unwrap();
        assert_eq!(r.certified, Some(true));
        assert!(r.gap_count_semigroup.unwrap() <= 5, "{r:?}");
    }

    #[test]
    fn both_model_containment() {
        for seed in 0..5 {
            let mut config = TrialConfig::new(1, 0.15, seed);
            config.box_policy = BoxPolicy::Extents(vec![400]);
            config.model = Model::Both;
            let r = run_trial(&config, &Limits::default()).unwrap();
            // FS(A) ⊆ <A>: the subset-sum gap count dominates
            assert!(r.gap_count_fs_in_box.unwrap() >= r.gap_count_semigroup.unwrap());
        }
    }

    #[test]
    fn auto_box_covers_outer_region() {
        let config = TrialConfig::new(2, 0.2, 7);
        let boxx = config.resolve_box(&Limits::default()).unwrap();
        assert!(box_covers_region(&boxx, &config.outer_region().unwrap()));
    }

    #[test]
    fn auto_box_respects_cap() {
        let limits = Limits {
            max_cells: 1000,
            ..Limits::default()
        };
        let config = TrialConfig::new(2, 0.05, 7);
        match config.resolve_box(&limits) {
            Err(Error::BoxTooLarge { required, .. }) => assert_eq!(required.len(), 2),
            other => panic!("expected BoxTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn shape_full_and_origin_grids() {
        use crate::semigroup::closure_in_box;
        let limits = Limits::default();
        let mut config = TrialConfig::new(2, 0.2, 0);
        config.inner_c = 2.0; // keep the inner region nonempty at this p
        let boxx = config.resolve_box(&limits).unwrap();
        let inner = config.inner_region().unwrap();
        let outer = config.outer_region().unwrap();
        // S = full orthant: generated by unit vectors
        let full = closure_in_box(
            &[Point::new(vec![1, 0]), Point::new(vec![0, 1])],
            &boxx,
        )
        .unwrap();
        let s = shape_report(&full, &inner, &outer, &limits).unwrap();
        assert_eq!(s.inner_fraction, 1.0);
        assert_eq!(s.outer_violations, 0);
        // S = {origin}
        let origin_only = closure_in_box(&[], &boxx).unwrap();
        let s = shape_report(&origin_only, &inner, &outer, &limits).unwrap();
        assert_eq!(s.inner_overlap, 1);
        let outside_origin: u64 = {
            // all non-origin box points outside the outer region
            let mut n = 0;
            for p in boxx.iter_points() {
                if !p.is_origin() && !outer.contains(&p) {
                    n += 1;
                }
            }
            n
        };
        assert_eq!(s.outer_violations, outside_origin);
    }

    #[test]
    fn shape_requires_covering_box() {
        use crate::semigroup::closure_in_box;
        let limits = Limits::default();
        let config = TrialConfig::new(1, 0.1, 0);
        let small = GridBox::new(vec![10]).unwrap();
        let g = closure_in_box(&[Point::new(vec![1])], &small).unwrap();
        let inner = config.inner_region().unwrap();
        let outer = config.outer_region().unwrap();
        assert_eq!(
            shape_report(&g, &inner, &outer, &limits).unwrap_err(),
            Error::BoxDoesNotCoverRegion
        );
    }

    #[test]
    fn syndeticity_powers_of_two() {
        let a: Vec<u64> = (0..10).map(|k| 1u64 << k).collect();
        let out = syndeticity_check(&a, 1, 1000).unwrap();
        assert!(out.hypothesis_holds);
        assert!(out.conclusion_holds);
    }

    #[test]
    fn syndeticity_single_large_element() {
        let out = syndeticity_check(&[5], 3, 20).unwrap();
        assert!(!out.hypothesis_holds);
        assert!(!out.conclusion_holds); // [1,3] misses FS = {0,5}
    }

    #[test]
    fn syndeticity_insufficient_mass() {
        // chain fine but sums stop far short of the horizon
        let out = syndeticity_check(&[1, 2], 2, 1000).unwrap();
        assert!(!out.hypothesis_holds);
    }

    #[test]
    fn embedding_requires_certificate() {
        use crate::semigroup::closure_in_box;
        let boxx = GridBox::new(vec![40]).unwrap();
        let g = closure_in_box(&[Point::new(vec![2]), Point::new(vec![3])], &boxx).unwrap();
        let outer = HyperboloidRegion::from_density(1, 0.1, 20.0).unwrap();
        assert_eq!(
            embedding_dimension_report(&g, false, &outer).unwrap_err(),
            Error::CertificateRequired
        );
        let (count, inside) = embedding_dimension_report(&g, true, &outer).unwrap();
        assert_eq!(count, 2);
        assert!(inside);
    }

    #[test]
    fn sweep_single_cell_matches_run_trial() {
        let limits = Limits::default();
        let mut template = TrialConfig::new(1, 0.5, 0);
        template.box_policy = BoxPolicy::Extents(vec![100]);
        let cells = [SweepCell { d: 1, p: 0.5 }];
        let table = sweep(&cells, 1, 99, &template, &limits).unwrap();
        assert_eq!(table.rows.len(), 1);
        let seed = derive_seed(99, 0);
        let mut config = template.clone();
        config.seed = seed;
        let direct = run_trial(&config, &limits).unwrap();
        let row = table.rows[0].result.as_ref().unwrap();
        assert_eq!(row.gap_count_semigroup, direct.gap_count_semigroup);
        assert_eq!(row.seed, seed);
    }

    #[test]
    fn sweep_reproducible_across_thread_counts() {
        let limits = Limits::default();
        let mut template = TrialConfig::new(1, 0.3, 0);
        template.box_policy = BoxPolicy::Extents(vec![200]);
        template.model = Model::Both;
        let cells = [SweepCell { d: 1, p: 0.3 }, SweepCell { d: 1, p: 0.2 }];
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| sweep(&cells, 4, 7, &template, &limits).unwrap())
        };
        let a = run(1);
        let b = run(2);
        let ga: Vec<_> = a
            .rows
            .iter()
            .map(|r| r.result.as_ref().unwrap().gap_count_semigroup)
            .collect();
        let gb: Vec<_> = b
            .rows
            .iter()
            .map(|r| r.result.as_ref().unwrap().gap_count_semigroup)
            .collect();
        assert_eq!(ga, gb);
    }

    #[test]
    fn sweep_records_trial_errors_per_row() {
        let limits = Limits {
            max_cells: 64,
            ..Limits::default()
        };
        let mut template = TrialConfig::new(1, 0.1, 0);
        template.box_policy = BoxPolicy::Auto; // needs far more than 64 cells
        let cells = [SweepCell { d: 1, p: 0.1 }];
        let table = sweep(&cells, 3, 5, &template, &limits).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert!(table.rows.iter().all(|r| r.error.is_some()));
        assert_eq!(table.aggregates[0].errors, 3);
    }

    #[test]
    fn quantile_interpolation() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(median(&v), Some(2.5));
        assert_eq!(quantile(&v, 0.0), Some(1.0));
        assert_eq!(quantile(&v, 1.0), Some(4.0));
        assert_eq!(median(&[]), None);
    }
}
