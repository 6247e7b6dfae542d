//! The shifted-hyperboloid region, its volume and lattice-count estimates,
//! tetrahedral half-space regions, and the two dyadic covering nets.

use crate::error::{Error, Result};
use crate::lattice::Point;
use crate::limits::Limits;

/// Relative slack applied toward inclusion when membership falls back to
/// log-space; boundary ties are measure-zero for irrational shifts but must
/// be deterministic in code.
const LOG_SPACE_SLACK: f64 = 1e-12;

/// Slack for integer floor/ceil of float logarithms in the net index sets,
/// applied toward inclusion so the covering containments survive exact-power
/// parameters landing an ulp off an integer.
const ROUND_TOL: f64 = 1e-9;

/// The set of lattice points with `prod(x_i + L) <= Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidRegion {
    d: usize,
    shift: f64,
    level: f64,
}

impl HyperboloidRegion {
    pub fn new(d: usize, shift: f64, level: f64) -> Result<HyperboloidRegion> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if !(shift > 0.0) || !(level > 0.0) {
            return Err(Error::InvalidParameter(
                "region shift and level must be positive".into(),
            ));
        }
        Ok(HyperboloidRegion {
            d,
            shift,
            level,
        })
    }

    /// Region at the paper's scale: shift `log p^-1` and level
    /// `c * p^-1 (log p^-1)^(d+1)`.
    pub fn from_density(d: usize, p: f64, c: f64) -> Result<HyperboloidRegion> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::POutOfRange);
        }
        let shift = (1.0 / p).ln();
        let level = c / p * shift.powi(d as i32 + 1);
        HyperboloidRegion::new(d, shift, level)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    /// Membership test. The direct product is used while it stays finite;
    /// otherwise the test runs in log-space with a small slack toward
    /// inclusion.
    pub fn contains_coords(&self, coords: &[u64]) -> bool {
        debug_assert_eq!(coords.len(), self.d);
        let mut prod = 1.0f64;
        for &c in coords {
            prod *= c as f64 + self.shift;
        }
        if prod.is_finite() {
            return prod <= self.level;
        }
        let log_sum: f64 = coords.iter().map(|&c| (c as f64 + self.shift).ln()).sum();
        log_sum <= self.level.ln() * (1.0 + LOG_SPACE_SLACK)
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.d && self.contains_coords(p.coords())
    }

    /// Is the region empty of lattice points? True iff the origin is outside,
    /// i.e. `L^d > Z`.
    pub fn is_empty(&self) -> bool {
        !self.contains_coords(&vec![0; self.d])
    }

    /// All lattice points of the region in row-major order.
    pub fn enumerate(&self, limits: &Limits) -> Result<Vec<Point>> {
        let mut out = Vec::new();
        let mut coords = vec![0u64; self.d];
        self.enumerate_rec(0, 1.0, &mut coords, &mut out, limits)?;
        Ok(out)
    }

    fn enumerate_rec(
        &self,
        axis: usize,
        partial: f64,
        coords: &mut Vec<u64>,
        out: &mut Vec<Point>,
        limits: &Limits,
    ) -> Result<()> {
        let remaining = (self.d - axis - 1) as i32;
        // loop bound: partial * (x + L) * L^remaining <= Z, then verified
        let bound = self.level / (partial * self.shift.powi(remaining)) - self.shift;
        if bound < 0.0 {
            return Ok(());
        }
        let mut hi = bound.floor().max(0.0) as u64;
        // float fixup: the bound must agree with the membership test at the edge
        while hi > 0 && !self.feasible_prefix(axis, partial, hi) {
            hi -= 1;
        }
        while self.feasible_prefix(axis, partial, hi + 1) {
            hi += 1;
        }
        if !self.feasible_prefix(axis, partial, 0) {
            return Ok(());
        }
        for x in 0..=hi {
            coords[axis] = x;
            let p = partial * (x as f64 + self.shift);
            if axis + 1 == self.d {
                if out.len() as u64 >= limits.max_region_points {
                    return Err(Error::RegionTooLarge);
                }
                out.push(Point::new(coords.clone()));
            } else {
                self.enumerate_rec(axis + 1, p, coords, out, limits)?;
            }
        }
        coords[axis] = 0;
        Ok(())
    }

    /// Can the prefix ending with value `x` at `axis` be extended by zeros to
    /// a member?
    fn feasible_prefix(&self, axis: usize, partial: f64, x: u64) -> bool {
        let remaining = (self.d - axis - 1) as i32;
        let prod = partial * (x as f64 + self.shift) * self.shift.powi(remaining);
        prod <= self.level
    }

    /// Number of lattice points, without materializing them.
    pub fn count(&self, limits: &Limits) -> Result<u64> {
        // counting reuses enumeration; regions under the point cap stay cheap
        Ok(self.enumerate(limits)?.len() as u64)
    }
}

/// Volume of the continuous region `{x >= 0 : prod(x_i + L) <= Z}`:
/// `Z - L` in dimension 1, and for `d >= 2`, with `u = log Z - d log L`,
/// `Z * sum_{i=0}^{d-1} (-1)^i u^(d-1-i)/(d-1-i)!  +  (-1)^d L^d`.
///
/// The trailing `(-1)^d L^d` is the boundary term of the repeated
/// integration by parts of `L^d * int_0^u e^s s^(d-1)/(d-1)! ds`; dropping it
/// (an O(L^d) error, asymptotically invisible next to Z) breaks agreement
/// with direct quadrature at desk scale. The d = 1 case `Z - L` is the same
/// expression.
pub fn region_volume(d: usize, shift: f64, level: f64) -> Result<f64> {
    if d == 0 || !(shift > 0.0) || !(level > 0.0) {
        return Err(Error::InvalidParameter(
            "volume needs d >= 1 and positive shift/level".into(),
        ));
    }
    if level < shift.powi(d as i32) {
        return Err(Error::RegionDegenerate);
    }
    if d == 1 {
        return Ok(level - shift);
    }
    let u = level.ln() - d as f64 * shift.ln();
    let mut sum = 0.0f64;
    let mut sign = 1.0f64;
    for i in 0..d {
        let k = d - 1 - i;
        sum += sign * u.powi(k as i32) / factorial(k);
        sign = -sign;
    }
    let boundary = if d.is_multiple_of(2) { 1.0 } else { -1.0 } * shift.powi(d as i32);
    Ok(level * sum + boundary)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Volume sandwich around the exact lattice count at the paper's scale
/// `Z = C p^-1 (log p^-1)^(d+1)`: unit cubes anchored at the lattice points
/// give `Vol(L, Z) <= exact <= Vol(L - 1, Z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSandwich {
    pub lower: f64,
    pub upper: f64,
    pub exact: u64,
}

pub fn lattice_count_sandwich(d: usize, p: f64, c: f64, limits: &Limits) -> Result<CountSandwich> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::POutOfRange);
    }
    let shift = (1.0 / p).ln();
    if shift <= 1.0 {
        return Err(Error::UpperUndefined);
    }
    let level = c / p * shift.powi(d as i32 + 1);
    let region = HyperboloidRegion::new(d, shift, level)?;
    let lower = region_volume(d, shift, level)?;
    let upper = region_volume(d, shift - 1.0, level)?;
    let exact = region.count(limits)?;
    Ok(CountSandwich {
        lower,
        upper,
        exact,
    })
}

/// Tetrahedral half-space region: points with `sum(y_i / x_i) <= h`, either
/// over the closed orthant (allowing zero coordinates) or requiring every
/// coordinate positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Tetrahedron {
    pub thresholds: Vec<f64>,
    pub level: f64,
    pub allow_zero_coords: bool,
}

impl Tetrahedron {
    pub fn new(thresholds: Vec<f64>, level: f64, allow_zero_coords: bool) -> Result<Tetrahedron> {
        if thresholds.is_empty() || thresholds.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::InvalidParameter(
                "tetrahedron thresholds must be positive".into(),
            ));
        }
        Ok(Tetrahedron {
            thresholds,
            level,
            allow_zero_coords,
        })
    }

    pub fn contains_coords(&self, coords: &[u64]) -> bool {
        debug_assert_eq!(coords.len(), self.thresholds.len());
        if !self.allow_zero_coords && coords.contains(&0) {
            return false;
        }
        let sum: f64 = coords
            .iter()
            .zip(&self.thresholds)
            .map(|(&y, &x)| y as f64 / x)
            .sum();
        sum <= self.level
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.thresholds.len() && self.contains_coords(p.coords())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetKind {
    HyperplaneNet,
    BoxNet,
}

/// Integer exponent tuples indexing a family of dyadic regions, together with
/// the parameters that generated them.
#[derive(Debug, Clone)]
pub struct DyadicNet {
    pub kind: NetKind,
    pub exponent_tuples: Vec<Vec<i64>>,
    pub dim: usize,
    pub p: f64,
    pub level: f64,
    pub kappa: Option<f64>,
}

/// Index set for covering the region with tetrahedra under dyadic hyperplanes:
/// all integer tuples with `e_i >= log2 log p^-1` and
/// `sum e_i <= d + d log2 d + log2 Z`.
pub fn hyperplane_net(d: usize, p: f64, level: f64) -> Result<DyadicNet> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::POutOfRange);
    }
    let shift = (1.0 / p).ln();
    if shift <= 1.0 {
        return Err(Error::InvalidParameter(
            "hyperplane net needs log p^-1 > 1".into(),
        ));
    }
    if !(level > 0.0) {
        return Err(Error::InvalidParameter("level must be positive".into()));
    }
    // ties from float log2 resolve toward inclusion: extra tuples only add
    // tetrahedra and preserve the covering property
    let lo = (shift.log2() - ROUND_TOL).ceil() as i64;
    let sum_cap =
        (d as f64 + d as f64 * (d as f64).log2() + level.log2() + ROUND_TOL).floor() as i64;
    let mut tuples = Vec::new();
    let mut cur = vec![0i64; d];
    enumerate_tuples(&mut tuples, &mut cur, 0, d, lo, sum_cap, 0);
    Ok(DyadicNet {
        kind: NetKind::HyperplaneNet,
        exponent_tuples: tuples,
        dim: d,
        p,
        level,
        kappa: None,
    })
}

fn enumerate_tuples(
    out: &mut Vec<Vec<i64>>,
    cur: &mut Vec<i64>,
    axis: usize,
    d: usize,
    lo: i64,
    sum_cap: i64,
    sum_so_far: i64,
) {
    if axis == d {
        out.push(cur.clone());
        return;
    }
    let remaining_min = (d - axis - 1) as i64 * lo;
    let mut e = lo;
    while sum_so_far + e + remaining_min <= sum_cap {
        cur[axis] = e;
        enumerate_tuples(out, cur, axis + 1, d, lo, sum_cap, sum_so_far + e);
        e += 1;
    }
}

impl DyadicNet {
    /// The tetrahedra of a hyperplane net: thresholds `2^{e_i}`, level 1,
    /// zero coordinates allowed.
    pub fn tetrahedra(&self) -> Vec<Tetrahedron> {
        self.exponent_tuples
            .iter()
            .map(|t| Tetrahedron {
                thresholds: t.iter().map(|&e| (e as f64).exp2()).collect(),
                level: 1.0,
                allow_zero_coords: true,
            })
            .collect()
    }

    /// Exact dyadic membership: is `sum(y_i / 2^{e_i}) <= 1` for some tuple?
    /// Scaled to integers (`sum(y_i * 2^{emax - e_i}) <= 2^emax`) so boundary
    /// ties are exact.
    pub fn covers_point(&self, coords: &[u64]) -> bool {
        debug_assert_eq!(self.kind, NetKind::HyperplaneNet);
        'tuples: for t in &self.exponent_tuples {
            let emax = *t.iter().max().unwrap();
            debug_assert!((0..=120).contains(&emax));
            let cap: u128 = 1u128 << emax.clamp(0, 120);
            let mut sum: u128 = 0;
            for (&y, &e) in coords.iter().zip(t) {
                if y == 0 {
                    continue;
                }
                let sh = (emax - e) as u32;
                if sh >= 128 || (y as u128) > (u128::MAX >> sh) {
                    continue 'tuples; // the term alone exceeds any cap
                }
                sum = sum.saturating_add((y as u128) << sh);
                if sum > cap {
                    continue 'tuples;
                }
            }
            return true;
        }
        false
    }

    /// The orthant corners `W(2^{e_1}, ..., 2^{e_m})` of a box net.
    pub fn corner_contains(&self, coords: &[u64]) -> bool {
        debug_assert_eq!(self.kind, NetKind::BoxNet);
        self.exponent_tuples.iter().any(|t| {
            coords
                .iter()
                .zip(t)
                .all(|(&y, &e)| e <= 62 && y >= (1u64 << e))
        })
    }
}

/// Exhaustively check that every point of `R_d(p, Z)` lies under some net
/// hyperplane; returns the first uncovered point as witness on failure.
pub fn verify_hyperplane_cover(
    d: usize,
    p: f64,
    level: f64,
    limits: &Limits,
) -> Result<(bool, Option<Point>)> {
    let net = hyperplane_net(d, p, level)?;
    let region = HyperboloidRegion::new(d, (1.0 / p).ln(), level)?;
    if region.is_empty() {
        return Ok((true, None));
    }
    for pt in region.enumerate(limits)? {
        if !net.covers_point(pt.coords()) {
            return Ok((false, Some(pt)));
        }
    }
    Ok((true, None))
}

/// Index set for covering `{prod x_i >= Z, x_i >= kappa log p^-1}` with
/// orthant corners: tuples with
/// `log2(kappa log p^-1) - 1 <= e_i <= log2 Z` and `sum e_i >= log2 Z - m`.
pub fn box_net(m: usize, p: f64, level: f64, kappa: f64) -> Result<DyadicNet> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::POutOfRange);
    }
    let shift = (1.0 / p).ln();
    if kappa * shift < 2.0 {
        return Err(Error::InvalidParameter(
            "box net needs kappa * log p^-1 >= 2".into(),
        ));
    }
    if !(level > 1.0) {
        return Err(Error::InvalidParameter("level must exceed 1".into()));
    }
    let lo = ((kappa * shift).log2() - 1.0 - ROUND_TOL).ceil() as i64;
    let hi = (level.log2() + ROUND_TOL).floor() as i64;
    let sum_lo = (level.log2() - m as f64 - ROUND_TOL).ceil() as i64;
    let mut tuples = Vec::new();
    let mut cur = vec![0i64; m];
    enumerate_box_tuples(&mut tuples, &mut cur, 0, m, lo, hi, sum_lo, 0);
    Ok(DyadicNet {
        kind: NetKind::BoxNet,
        exponent_tuples: tuples,
        dim: m,
        p,
        level,
        kappa: Some(kappa),
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_box_tuples(
    out: &mut Vec<Vec<i64>>,
    cur: &mut Vec<i64>,
    axis: usize,
    m: usize,
    lo: i64,
    hi: i64,
    sum_lo: i64,
    sum_so_far: i64,
) {
    if axis == m {
        if sum_so_far >= sum_lo {
            out.push(cur.clone());
        }
        return;
    }
    let remaining_max = (m - axis - 1) as i64 * hi;
    for e in lo..=hi {
        // prune: even maximal later entries cannot reach the sum floor
        if sum_so_far + e + remaining_max < sum_lo {
            continue;
        }
        cur[axis] = e;
        enumerate_box_tuples(out, cur, axis + 1, m, lo, hi, sum_lo, sum_so_far + e);
    }
}

/// Scan a finite probe box and check that every lattice point with
/// `prod x_i >= Z` and `x_i >= kappa log p^-1` lies in some corner of the net.
pub fn verify_box_cover(
    m: usize,
    p: f64,
    level: f64,
    kappa: f64,
    probe_extent: u64,
) -> Result<(bool, Option<Point>)> {
    let net = box_net(m, p, level, kappa)?;
    let shift = (1.0 / p).ln();
    let floor_coord = kappa * shift;
    let mut coords = vec![0u64; m];
    loop {
        if coords.iter().all(|&c| (c as f64) >= floor_coord) {
            let prod: f64 = coords.iter().map(|&c| c as f64).product();
            if prod >= level && !net.corner_contains(&coords) {
                return Ok((false, Some(Point::new(coords))));
            }
        }
        // odometer over the probe box
        let mut i = m;
        loop {
            if i == 0 {
                return Ok((true, None));
            }
            i -= 1;
            coords[i] += 1;
            if coords[i] < probe_extent {
                break;
            }
            coords[i] = 0;
        }
    }
}
