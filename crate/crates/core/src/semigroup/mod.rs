//! Exact in-box computation of additive closures and subset sums, gap-set
//! invariants with a deterministic completeness certificate, minimal
//! generating sets, and finite-abelian-group coverage checks.

mod kernels;

use crate::error::{Error, Result};
use crate::lattice::{BitGrid, GridBox, Point};
use crate::limits::Limits;
use kernels::{bucket_ranks, closure_kernel, subset_sums_kernel, BitVec};

/// Which set a [`ClosureGrid`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureKind {
    /// Sums with repetition allowed.
    Semigroup,
    /// Sums of distinct generators.
    SubsetSums,
}

/// Indicator of the closure (or subset-sum set) of a generator list over a box.
/// The origin cell is always set: it is the empty sum.
#[derive(Debug, Clone)]
pub struct ClosureGrid {
    kind: ClosureKind,
    grid: BitGrid,
    generator_ranks: Vec<u64>,
}

impl ClosureGrid {
    pub fn kind(&self) -> ClosureKind {
        self.kind
    }

    pub fn grid(&self) -> &BitGrid {
        &self.grid
    }

    pub fn boxx(&self) -> &GridBox {
        self.grid.boxx()
    }

    /// Generators actually used (filtered to the box, deduplicated, sorted by
    /// rank, origin removed).
    pub fn generator_ranks(&self) -> &[u64] {
        &self.generator_ranks
    }

    pub fn generators(&self) -> Vec<Point> {
        self.generator_ranks
            .iter()
            .map(|&r| self.boxx().point_at(r).unwrap())
            .collect()
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        self.grid.get_point(p)
    }

    pub fn member_count(&self) -> u64 {
        self.grid.popcount()
    }

    pub fn gap_count(&self) -> u64 {
        self.boxx().cells() - self.grid.popcount()
    }
}

fn prepare_ranks(a: &[Point], boxx: &GridBox) -> Result<Vec<u64>> {
    let mut ranks = Vec::with_capacity(a.len());
    for p in a {
        if p.dim() != boxx.dim() {
            return Err(Error::DimensionMismatch {
                expected: boxx.dim(),
                got: p.dim(),
            });
        }
        // points outside the box cannot appear as summands of an in-box sum
        if boxx.contains(p) {
            ranks.push(boxx.rank_of(p.coords()));
        }
    }
    normalize_ranks(&mut ranks);
    Ok(ranks)
}

fn normalize_ranks(ranks: &mut Vec<u64>) {
    ranks.sort_unstable();
    ranks.dedup();
    if ranks.first() == Some(&0) {
        ranks.remove(0); // the origin is the empty sum
    }
}

/// Exact `<A> ∩ box`: all sums of elements of `A` with repetition.
pub fn closure_in_box(a: &[Point], boxx: &GridBox) -> Result<ClosureGrid> {
    let ranks = prepare_ranks(a, boxx)?;
    Ok(closure_from_ranks(ranks, boxx))
}

/// Rank-slice fast path (ranks must lie in the box).
pub fn closure_in_box_ranks(ranks: &[u64], boxx: &GridBox) -> Result<ClosureGrid> {
    let mut ranks = validated_ranks(ranks, boxx)?;
    normalize_ranks(&mut ranks);
    Ok(closure_from_ranks(ranks, boxx))
}

fn closure_from_ranks(ranks: Vec<u64>, boxx: &GridBox) -> ClosureGrid {
    let buckets = bucket_ranks(&ranks, boxx);
    ClosureGrid {
        kind: ClosureKind::Semigroup,
        grid: closure_kernel(&buckets, boxx),
        generator_ranks: ranks,
    }
}

/// Exact `FS(A) ∩ box`: all sums of distinct elements of `A`.
pub fn subset_sums_in_box(a: &[Point], boxx: &GridBox) -> Result<ClosureGrid> {
    let ranks = prepare_ranks(a, boxx)?;
    Ok(subset_sums_from_ranks(ranks, boxx))
}

/// Rank-slice fast path (ranks must lie in the box).
pub fn subset_sums_in_box_ranks(ranks: &[u64], boxx: &GridBox) -> Result<ClosureGrid> {
    let mut ranks = validated_ranks(ranks, boxx)?;
    normalize_ranks(&mut ranks);
    Ok(subset_sums_from_ranks(ranks, boxx))
}

fn validated_ranks(ranks: &[u64], boxx: &GridBox) -> Result<Vec<u64>> {
    if ranks.iter().any(|&r| r >= boxx.cells()) {
        return Err(Error::PointOutsideBox);
    }
    Ok(ranks.to_vec())
}

fn subset_sums_from_ranks(ranks: Vec<u64>, boxx: &GridBox) -> ClosureGrid {
    ClosureGrid {
        kind: ClosureKind::SubsetSums,
        grid: subset_sums_kernel(&ranks, boxx),
        generator_ranks: ranks,
    }
}

/// Outcome of the deterministic completeness check.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateOutcome {
    pub certified: bool,
    /// Landing threshold `T`; gaps of a certified grid have every coordinate < T.
    pub threshold: Option<u64>,
    /// Per-axis Frobenius numbers of the axis semigroups, when all axes are cofinite.
    pub axis_frobenius: Option<Vec<u64>>,
    pub reason: Option<String>,
}

impl CertificateOutcome {
    fn fail(reason: &str) -> CertificateOutcome {
        CertificateOutcome {
            certified: false,
            threshold: None,
            axis_frobenius: None,
            reason: Some(reason.to_string()),
        }
    }
}

/// Deterministic sufficiency check making the in-box gap count exact.
///
/// For each axis the 1-d semigroup generated by the axis generators is
/// computed in-box; cofiniteness is declared once a run of consecutive
/// members at least as long as the smallest axis generator appears, which
/// pins the axis Frobenius number `F_i`. With `T_i = extent_i - F_i - 1` and
/// `T = min_i T_i`, any point outside the box reduces one oversized
/// coordinate at a time by an axis-semigroup element (every integer above
/// `F_i` is one) to a box point landing at coordinate `T_i >= T`. Certifying
/// that every box point with some coordinate >= T is a member therefore
/// proves every point outside the box is a member, so the in-box gap count is
/// the exact genus.
pub fn completeness_certificate(s: &ClosureGrid) -> Result<CertificateOutcome> {
    if s.kind != ClosureKind::Semigroup {
        return Err(Error::InvalidKind);
    }
    let boxx = s.boxx();
    let d = boxx.dim();
    let mut frob = Vec::with_capacity(d);
    for axis in 0..d {
        let stride = if axis + 1 == d {
            1
        } else {
            boxx.extents()[axis + 1..].iter().product::<u64>()
        };
        let extent = boxx.extents()[axis];
        let axis_gens: Vec<u64> = s
            .generator_ranks
            .iter()
            .filter(|&&r| r % stride == 0 && r / stride < extent)
            .map(|&r| r / stride)
            .collect();
        if axis_gens.is_empty() {
            return Ok(CertificateOutcome::fail(&format!(
                "axis {axis} semigroup not cofinite within box: no generators"
            )));
        }
        let axis_box = GridBox::new(vec![extent])?;
        let axis_grid = closure_from_ranks(axis_gens.clone(), &axis_box);
        let g_min = axis_gens[0];
        match axis_frobenius_in_box(axis_grid.grid(), extent, g_min) {
            Some(f) => frob.push(f),
            None => {
                return Ok(CertificateOutcome::fail(&format!(
                    "axis {axis} semigroup not cofinite within box"
                )))
            }
        }
    }
    let t = (0..d)
        .map(|i| boxx.extents()[i] as i64 - frob[i] as i64 - 1)
        .min()
        .unwrap();
    if t <= 0 {
        return Ok(CertificateOutcome {
            certified: false,
            threshold: None,
            axis_frobenius: Some(frob),
            reason: Some("box too small".to_string()),
        });
    }
    let t = t as u64;
    let certified = zeros_confined_below(s.grid(), t);
    Ok(CertificateOutcome {
        certified,
        threshold: Some(t),
        axis_frobenius: Some(frob),
        reason: if certified {
            None
        } else {
            Some("points above threshold missing from closure".to_string())
        },
    })
}

/// Frobenius number of a 1-d in-box semigroup, provided a run of `g_min`
/// consecutive members certifies cofiniteness; `None` when no such run exists.
fn axis_frobenius_in_box(grid: &BitGrid, extent: u64, g_min: u64) -> Option<u64> {
    let mut run = 0u64;
    for x in 0..extent {
        if grid.get_rank(x) {
            run += 1;
            if run >= g_min {
                // everything >= x - g_min + 1 is a member; largest gap below
                let mut y = x + 1 - run;
                while y > 0 {
                    y -= 1;
                    if !grid.get_rank(y) {
                        return Some(y);
                    }
                }
                return Some(0);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// True when every unset cell has all coordinates < t.
fn zeros_confined_below(grid: &BitGrid, t: u64) -> bool {
    let boxx = grid.boxx();
    let row_len = boxx.row_len();
    let total_zeros = boxx.cells() - grid.popcount();
    let mut inside_zeros = 0u64;
    let d = boxx.dim();
    let mut prefix = vec![0u64; d - 1];
    let extents = boxx.extents().to_vec();
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
        if prefix.iter().any(|&c| c >= t) {
            continue;
        }
        let cap = t.min(row_len);
        inside_zeros += cap - popcount_row_range(grid, row as usize, cap);
    }
    inside_zeros == total_zeros
}

/// Set bits in row `row` at offsets `[0, cap)`.
fn popcount_row_range(grid: &BitGrid, row: usize, cap: u64) -> u64 {
    let words = grid.words();
    let base = row * grid.row_words();
    let full = (cap >> 6) as usize;
    let mut n: u64 = words[base..base + full]
        .iter()
        .map(|w| w.count_ones() as u64)
        .sum();
    if cap & 63 != 0 {
        n += (words[base + full] & ((1u64 << (cap & 63)) - 1)).count_ones() as u64;
    }
    n
}

/// Gap-set invariants of a closure grid. There is no single "largest" gap in
/// dimension above 1, so alongside the count the report carries the max-norm
/// of the largest gap; for d = 1 and a certified grid that is the Frobenius
/// number.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub gap_count: u64,
    /// Largest infinity-norm among the gaps; absent when there are none.
    pub max_gap_norm: Option<u64>,
    pub gaps: Option<Vec<Point>>,
    pub gaps_truncated: bool,
    pub certified: bool,
    pub certificate_threshold: Option<u64>,
    pub axis_frobenius: Option<Vec<u64>>,
    pub certificate_reason: Option<String>,
}

/// Count (and optionally list) the gaps of a closure grid. For semigroup
/// grids the completeness certificate runs; when it passes, the count is the
/// exact genus of the infinite-lattice semigroup. Subset-sum grids are never
/// certified. Gap lists are capped by `limits.max_gap_points`; counts stay
/// exact regardless.
pub fn gap_report(s: &ClosureGrid, collect_points: bool, limits: &Limits) -> GapReport {
    let gap_count = s.gap_count();
    let (certified, threshold, frob, reason) = match s.kind {
        ClosureKind::Semigroup => {
            let c = completeness_certificate(s).expect("kind checked");
            (c.certified, c.threshold, c.axis_frobenius, c.reason)
        }
        ClosureKind::SubsetSums => (false, None, None, None),
    };
    let mut gaps = None;
    let mut truncated = false;
    if collect_points {
        let cap = limits.max_gap_points as usize;
        let mut pts = Vec::new();
        let boxx = s.boxx();
        'outer: for rank in 0..boxx.cells() {
            if !s.grid.get_rank(rank) {
                if pts.len() >= cap {
                    truncated = true;
                    break 'outer;
                }
                pts.push(boxx.point_at(rank).unwrap());
            }
        }
        gaps = Some(pts);
    }
    GapReport {
        gap_count,
        max_gap_norm: max_unset_norm(s.grid()),
        gaps,
        gaps_truncated: truncated,
        certified,
        certificate_threshold: threshold,
        axis_frobenius: frob,
        certificate_reason: reason,
    }
}

/// Largest infinity-norm among unset cells, scanning rows word-wise.
fn max_unset_norm(grid: &BitGrid) -> Option<u64> {
    let boxx = grid.boxx();
    let d = boxx.dim();
    let extents = boxx.extents().to_vec();
    let mut prefix = vec![0u64; d - 1];
    let mut best: Option<u64> = None;
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
        let prefix_norm = prefix.iter().copied().max().unwrap_or(0);
        if let Some(off) = top_unset_offset(grid, row as usize) {
            let norm = prefix_norm.max(off);
            if best.is_none_or(|b| norm > b) {
                best = Some(norm);
            }
        }
    }
    best
}

/// Highest in-row offset whose bit is unset, if any.
fn top_unset_offset(grid: &BitGrid, row: usize) -> Option<u64> {
    let row_len = grid.boxx().row_len();
    let words = grid.words();
    let base = row * grid.row_words();
    let n_words = (row_len as usize).div_ceil(64);
    for w in (0..n_words).rev() {
        let mut inv = !words[base + w];
        if w + 1 == n_words && !row_len.is_multiple_of(64) {
            inv &= (1u64 << (row_len % 64)) - 1;
        }
        if inv != 0 {
            return Some(((w as u64) << 6) + (63 - inv.leading_zeros() as u64));
        }
    }
    None
}

/// All nonzero in-box members that are not the sum of two nonzero in-box
/// members. For a certified grid whose gaps lie well inside the box this is
/// the unique minimal generating set; its size is the embedding dimension.
pub fn minimal_generators(s: &ClosureGrid) -> Result<Vec<Point>> {
    if s.kind != ClosureKind::Semigroup {
        return Err(Error::InvalidKind);
    }
    // every irreducible in-box member is a generator: any non-generator member
    // was set through a witness a + (x - a) with both parts nonzero members
    let boxx = s.boxx();
    let mut out = Vec::new();
    for &g in &s.generator_ranks {
        if !decomposable(s, g) {
            out.push(boxx.point_at(g).unwrap());
        }
    }
    Ok(out)
}

/// Is `x` (a member rank) the sum of two nonzero in-box members?
fn decomposable(s: &ClosureGrid, x: u64) -> bool {
    // if x = y + z with both members, one of them has rank <= rank(x)/2
    let boxx = s.boxx();
    let row_len = boxx.row_len();
    let x_row = x / row_len;
    let x_off = x % row_len;
    let x_coords = boxx.point_at(x).unwrap();
    let x_prefix = &x_coords.coords()[..boxx.dim() - 1];
    let half = x / 2;
    for row in 0..=x_row {
        let row_base = row * row_len;
        if row_base > half {
            break;
        }
        let prefix_pt = boxx.point_at(row * row_len).unwrap();
        let prefix = &prefix_pt.coords()[..boxx.dim() - 1];
        if prefix.iter().zip(x_prefix).any(|(&a, &b)| a > b) {
            continue;
        }
        let off_hi = x_off.min(half.saturating_sub(row_base)).min(row_len - 1);
        for off in 0..=off_hi {
            let y = row_base + off;
            if y == 0 {
                continue;
            }
            if s.grid.get_rc(row as usize, off) && s.grid.get_rank(x - y) {
                return true;
            }
        }
    }
    false
}

/// Residue classes of a product of cyclic groups hit by the subset sums of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupCoverage {
    pub moduli: Vec<u64>,
    pub covered_count: u64,
    pub full: bool,
}

/// Boolean DP over the `q = prod(moduli)` residue classes: a toroidal
/// shift-or per distinct element of `A`.
pub fn residue_coverage(a: &[Point], moduli: &[u64], limits: &Limits) -> Result<GroupCoverage> {
    if moduli.is_empty() || moduli.contains(&0) {
        return Err(Error::InvalidParameter("moduli must be >= 1".into()));
    }
    let mut q: u128 = 1;
    for &m in moduli {
        q *= m as u128;
    }
    if q > limits.max_residues as u128 {
        return Err(Error::TooManyResidues {
            q,
            cap: limits.max_residues,
        });
    }
    let q = q as u64;
    let m = moduli.len();
    let mut residues: Vec<u64> = Vec::new();
    for p in a {
        if p.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: p.dim(),
            });
        }
        let mut rank = 0u64;
        for (c, &modulus) in p.coords().iter().zip(moduli) {
            rank = rank * modulus + (c % modulus);
        }
        residues.push(rank);
    }
    residues.sort_unstable();
    residues.dedup();

    let mut covered = BitVec::new(q);
    covered.set(0);
    for &r in &residues {
        let snapshot: Vec<u64> = covered.iter_set().collect();
        for u in snapshot {
            covered.set(add_mod(u, r, moduli));
        }
        if covered.popcount() == q {
            break;
        }
    }
    let covered_count = covered.popcount();
    Ok(GroupCoverage {
        moduli: moduli.to_vec(),
        covered_count,
        full: covered_count == q,
    })
}

fn add_mod(u: u64, v: u64, moduli: &[u64]) -> u64 {
    // mixed-radix componentwise addition
    let mut out = 0u64;
    let mut u = u;
    let mut v = v;
    let mut scale = 1u64;
    for &m in moduli.iter().rev() {
        let du = u % m;
        let dv = v % m;
        u /= m;
        v /= m;
        out += ((du + dv) % m) * scale;
        scale *= m;
    }
    out
}

/// Does `FS(A)` restricted to `[0, ceil(p*Y*Y_1)] x ... x [0, ceil(p*Y*Y_m)]`
/// (with `Y = prod(Y_i)`) contain at least `Y` points?
pub fn dense_spot_check(a: &[Point], moduli: &[u64], p: f64, limits: &Limits) -> Result<bool> {
    if moduli.is_empty() || moduli.contains(&0) {
        return Err(Error::InvalidParameter("moduli must be >= 1".into()));
    }
    let mut y: u128 = 1;
    for &m in moduli {
        y *= m as u128;
    }
    let y = u64::try_from(y).map_err(|_| Error::BoxOverflow)?;
    let mut extents = Vec::with_capacity(moduli.len());
    let mut cells: u128 = 1;
    for &yi in moduli {
        let hi = (p * y as f64 * yi as f64).ceil();
        if !hi.is_finite() || hi < 0.0 {
            return Err(Error::InvalidParameter("degenerate spot box".into()));
        }
        let e = hi as u64 + 1;
        extents.push(e);
        cells *= e as u128;
    }
    if cells > limits.max_cells as u128 {
        return Err(Error::BoxTooLarge {
            required: extents,
            cells,
            cap: limits.max_cells,
        });
    }
    let boxx = GridBox::new(extents)?;
    let fs = subset_sums_in_box(a, &boxx)?;
    Ok(fs.member_count() >= y)
}
