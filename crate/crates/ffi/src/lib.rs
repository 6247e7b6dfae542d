//! C ABI over the gnslab core: opaque handles, status codes, and plain
//! buffers, so other languages can bind without touching Rust types.
//!
//! Conventions: every function returns a [`GnsStatus`]; results come back
//! through out-pointers. Handles are created by `*_create` functions and
//! released by the matching `*_free`; passing a handle to any other library's
//! free is undefined behavior. All pointers must be valid for the stated
//! lengths; null pointers are rejected with `GNS_STATUS_NULL_POINTER`.

use gnslab::error::Error;
use gnslab::experiments::{run_trial, BoxPolicy, Model, TrialConfig};
use gnslab::hyperboloid::{region_volume, HyperboloidRegion};
use gnslab::lattice::{GridBox, Point};
use gnslab::limits::Limits;
use gnslab::partitions::{ln_big, ptn_table, PartitionTable};
use gnslab::sample::{sample, RandomSetSpec, SampleResult};
use gnslab::semigroup::{
    closure_in_box, gap_report, residue_coverage, subset_sums_in_box, GapReport,
};
use libc::size_t;

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GnsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ResourceLimit = 3,
    Unavailable = 4,
}

fn status_of(e: &Error) -> GnsStatus {
    match e {
        Error::BoxTooLarge { .. }
        | Error::RegionTooLarge
        | Error::TooManyResidues { .. }
        | Error::BudgetTooLarge { .. } => GnsStatus::ResourceLimit,
        _ => GnsStatus::InvalidArgument,
    }
}

/// Human-readable name of a status code; static storage, do not free.
#[no_mangle]
pub extern "C" fn gns_status_name(status: GnsStatus) -> *const libc::c_char {
    let name: &'static [u8] = match status {
        GnsStatus::Ok => b"ok\0",
        GnsStatus::NullPointer => b"null pointer\0",
        GnsStatus::InvalidArgument => b"invalid argument\0",
        GnsStatus::ResourceLimit => b"resource limit\0",
        GnsStatus::Unavailable => b"unavailable\0",
    };
    name.as_ptr() as *const libc::c_char
}

/// Opaque realized random subset.
pub struct GnsSample {
    inner: SampleResult,
}

/// Opaque gap report.
pub struct GnsGapReport {
    inner: GapReport,
}

/// Opaque exact colored-partition table.
pub struct GnsPartitionTable {
    inner: PartitionTable,
}

unsafe fn slice_arg<'a, T>(ptr: *const T, len: size_t) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

fn box_from(extents: &[u64]) -> Result<GridBox, Error> {
    GridBox::new(extents.to_vec())
}

/// Sample a p-random subset of the box `[0, extents[0]) x ...`.
///
/// # Safety
/// `extents` must point to `dim` values and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gns_sample_create(
    dim: size_t,
    p: f64,
    seed: u64,
    extents: *const u64,
    include_origin: bool,
    out: *mut *mut GnsSample,
) -> GnsStatus {
    if out.is_null() {
        return GnsStatus::NullPointer;
    }
    let extents = match slice_arg(extents, dim) {
        Some(e) => e,
        None => return GnsStatus::NullPointer,
    };
    let boxx = match box_from(extents) {
        Ok(b) => b,
        Err(e) => return status_of(&e),
    };
    let mut spec = match RandomSetSpec::new(p, boxx, seed) {
        Ok(s) => s,
        Err(e) => return status_of(&e),
    };
    spec.include_origin = include_origin;
    match sample(&spec) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(GnsSample { inner: s }));
            GnsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Number of sampled points.
///
/// # Safety
/// `handle` must come from `gns_sample_create`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gns_sample_len(handle: *const GnsSample, out: *mut size_t) -> GnsStatus {
    if handle.is_null() || out.is_null() {
        return GnsStatus::NullPointer;
    }
    *out = (*handle).inner.len();
    GnsStatus::Ok
}

/// Copy the sampled points as row-major flattened coordinates
/// (`len * dim` values). `buf_len` is the buffer capacity in u64 slots.
///
/// # Safety
/// `handle` from `gns_sample_create`; `buf` valid for `buf_len` writes.
#[no_mangle]
pub unsafe extern "C" fn gns_sample_copy_points(
    handle: *const GnsSample,
    buf: *mut u64,
    buf_len: size_t,
) -> GnsStatus {
    if handle.is_null() || buf.is_null() {
        return GnsStatus::NullPointer;
    }
    let s = &(*handle).inner;
    let d = s.spec.boxx.dim();
    let needed = s.len() * d;
    if buf_len < needed {
        return GnsStatus::InvalidArgument;
    }
    let dst = std::slice::from_raw_parts_mut(buf, needed);
    for (i, p) in s.points().iter().enumerate() {
        dst[i * d..(i + 1) * d].copy_from_slice(p.coords());
    }
    GnsStatus::Ok
}

/// # Safety
/// `handle` must come from `gns_sample_create` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gns_sample_free(handle: *mut GnsSample) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Gap report over explicit generator points (flattened coordinates).
/// `model`: 0 = semigroup closure, 1 = subset sums.
///
/// # Safety
/// `coords` must hold `n_points * dim` values; `extents` holds `dim` values;
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gns_gap_report_create(
    coords: *const u64,
    n_points: size_t,
    dim: size_t,
    extents: *const u64,
    model: i32,
    out: *mut *mut GnsGapReport,
) -> GnsStatus {
    if out.is_null() {
        return GnsStatus::NullPointer;
    }
    if dim == 0 {
        return GnsStatus::InvalidArgument;
    }
    let coords = match slice_arg(coords, n_points * dim) {
        Some(c) => c,
        None => return GnsStatus::NullPointer,
    };
    let extents = match slice_arg(extents, dim) {
        Some(e) => e,
        None => return GnsStatus::NullPointer,
    };
    let boxx = match box_from(extents) {
        Ok(b) => b,
        Err(e) => return status_of(&e),
    };
    let points: Vec<Point> = coords
        .chunks_exact(dim)
        .map(|c| Point::new(c.to_vec()))
        .collect();
    let limits = Limits::from_env();
    let built = match model {
        0 => closure_in_box(&points, &boxx),
        1 => subset_sums_in_box(&points, &boxx),
        _ => return GnsStatus::InvalidArgument,
    };
    match built {
        Ok(grid) => {
            let rep = gap_report(&grid, false, &limits);
            *out = Box::into_raw(Box::new(GnsGapReport { inner: rep }));
            GnsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `handle` from `gns_gap_report_create`; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gns_gap_report_gap_count(
    handle: *const GnsGapReport,
    out: *mut u64,
) -> GnsStatus {
    if handle.is_null() || out.is_null() {
        return GnsStatus::NullPointer;
    }
    *out = (*handle).inner.gap_count;
    GnsStatus::Ok
}

/// # Safety
/// `handle` from `gns_gap_report_create`; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gns_gap_report_certified(
    handle: *const GnsGapReport,
    out: *mut bool,
) -> GnsStatus {
    if handle.is_null() || out.is_null() {
        return GnsStatus::NullPointer;
    }
    *out = (*handle).inner.certified;
    GnsStatus::Ok
}

/// Certificate threshold; `GNS_STATUS_UNAVAILABLE` when the certificate did
/// not produce one.
///
/// # Safety
/// `handle` from `gns_gap_report_create`; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gns_gap_report_threshold(
    handle: *const GnsGapReport,
    out: *mut u64,
) -> GnsStatus {
    if handle.is_null() || out.is_null() {
        return GnsStatus::NullPointer;
    }
    match (*handle).inner.certificate_threshold {
        Some(t) => {
            *out = t;
            GnsStatus::Ok
        }
        None => GnsStatus::Unavailable,
    }
}

/// # Safety
/// `handle` must come from `gns_gap_report_create` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gns_gap_report_free(handle: *mut GnsGapReport) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Volume of the continuous shifted-hyperboloid region.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gns_region_volume(
    dim: size_t,
    shift: f64,
    level: f64,
    out: *mut f64,
) -> GnsStatus {
    if out.is_null() {
        return GnsStatus::NullPointer;
    }
    match region_volume(dim, shift, level) {
        Ok(v) => {
            *out = v;
            GnsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Number of lattice points of the region.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gns_region_count(
    dim: size_t,
    shift: f64,
    level: f64,
    out: *mut u64,
) -> GnsStatus {
    if out.is_null() {
        return GnsStatus::NullPointer;
    }
    let region = match HyperboloidRegion::new(dim, shift, level) {
        Ok(r) => r,
        Err(e) => return status_of(&e),
    };
    match region.count(&Limits::from_env()) {
        Ok(n) => {
            *out = n;
            GnsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Build the exact table of `ptn_d(0..=n_max)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gns_ptn_create(
    dim: size_t,
    n_max: u64,
    out: *mut *mut GnsPartitionTable,
) -> GnsStatus {
    if out.is_null() {
        return GnsStatus::NullPointer;
    }
    if dim == 0 || n_max > 1_000_000 {
        return GnsStatus::InvalidArgument;
    }
    let table = ptn_table(dim, n_max);
    *out = Box::into_raw(Box::new(GnsPartitionTable { inner: table }));
    GnsStatus::Ok
}

/// Natural log of `ptn_d(n)` (0 maps to -inf is never produced; values are >= 1).
///
/// # Safety
/// `handle` from `gns_ptn_create`; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gns_ptn_ln_value(
    handle: *const GnsPartitionTable,
    n: u64,
    out: *mut f64,
) -> GnsStatus {
    if handle.is_null() || out.is_null() {
        return GnsStatus::NullPointer;
    }
    let t = &(*handle).inner;
    if n > t.n_max() {
        return GnsStatus::InvalidArgument;
    }
    *out = ln_big(t.value(n));
    GnsStatus::Ok
}

/// # Safety
/// `handle` must come from `gns_ptn_create` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gns_ptn_free(handle: *mut GnsPartitionTable) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Subset-sum residue coverage of the product group with the given moduli.
///
/// # Safety
/// `coords` must hold `n_points * m` values; `moduli` holds `m` values;
/// out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gns_residue_coverage(
    coords: *const u64,
    n_points: size_t,
    moduli: *const u64,
    m: size_t,
    out_covered: *mut u64,
    out_full: *mut bool,
) -> GnsStatus {
    if out_covered.is_null() || out_full.is_null() {
        return GnsStatus::NullPointer;
    }
    if m == 0 {
        return GnsStatus::InvalidArgument;
    }
    let coords = match slice_arg(coords, n_points * m) {
        Some(c) => c,
        None => return GnsStatus::NullPointer,
    };
    let moduli = match slice_arg(moduli, m) {
        Some(x) => x,
        None => return GnsStatus::NullPointer,
    };
    let points: Vec<Point> = coords
        .chunks_exact(m)
        .map(|c| Point::new(c.to_vec()))
        .collect();
    match residue_coverage(&points, moduli, &Limits::from_env()) {
        Ok(cov) => {
            *out_covered = cov.covered_count;
            *out_full = cov.full;
            GnsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// One Monte Carlo trial with the auto box policy; returns the certified gap
/// count. `certified` reports the certificate verdict; the gap count is exact
/// for the infinite lattice only when it is true.
///
/// # Safety
/// Out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gns_trial_gap_count(
    dim: size_t,
    p: f64,
    seed: u64,
    outer_c: f64,
    out_gap_count: *mut u64,
    out_certified: *mut bool,
) -> GnsStatus {
    if out_gap_count.is_null() || out_certified.is_null() {
        return GnsStatus::NullPointer;
    }
    let mut config = TrialConfig::new(dim, p, seed);
    config.outer_c = outer_c;
    config.model = Model::Semigroup;
    config.box_policy = BoxPolicy::Auto;
    match run_trial(&config, &Limits::from_env()) {
        Ok(r) => {
            *out_gap_count = r.gap_count_semigroup.unwrap_or(0);
            *out_certified = r.certified.unwrap_or(false);
            GnsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_round_trip() {
        unsafe {
            let extents = [100u64];
            let mut handle: *mut GnsSample = std::ptr::null_mut();
            let st = gns_sample_create(1, 0.5, 42, extents.as_ptr(), false, &mut handle);
            assert_eq!(st, GnsStatus::Ok);
            let mut len: usize = 0;
            assert_eq!(gns_sample_len(handle, &mut len), GnsStatus::Ok);
            assert!(len > 0);
            let mut buf = vec![0u64; len];
            assert_eq!(
                gns_sample_copy_points(handle, buf.as_mut_ptr(), buf.len()),
                GnsStatus::Ok
            );
            assert!(buf.windows(2).all(|w| w[0] < w[1]));
            gns_sample_free(handle);
        }
    }

    #[test]
    fn rejects_bad_p() {
        unsafe {
            let extents = [10u64];
            let mut handle: *mut GnsSample = std::ptr::null_mut();
            let st = gns_sample_create(1, 1.5, 0, extents.as_ptr(), false, &mut handle);
            assert_eq!(st, GnsStatus::InvalidArgument);
        }
    }
}
