//! Lattice points, origin-anchored truncation boxes, and dense bit grids.
//!
//! Layout is row-major with the last coordinate fastest-varying, so the 1-d
//! case is a flat array and shifts along the last axis are contiguous range
//! operations. Rank arithmetic is linear: for `q <= p` coordinatewise,
//! `rank(p - q) = rank(p) - rank(q)`, which the DP kernels rely on.

use crate::error::{Error, Result};

/// A point of the nonnegative integer lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    coords: Vec<u64>,
}

impl Point {
    /// A point with the given coordinates. The dimension must be at least 1.
    pub fn new(coords: Vec<u64>) -> Point {
        assert!(!coords.is_empty(), "points need dimension >= 1");
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl From<Vec<u64>> for Point {
    fn from(coords: Vec<u64>) -> Point {
        Point::new(coords)
    }
}

/// An axis-aligned truncation window anchored at the origin: all points with
/// `coords[i] < extents[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridBox {
    extents: Vec<u64>,
    strides: Vec<u64>,
    cells: u64,
}

impl GridBox {
    /// A box with the given per-axis extents. Every extent must be positive
    /// and the cell count must fit the platform's addressable size.
    pub fn new(extents: Vec<u64>) -> Result<GridBox> {
        if extents.is_empty() {
            return Err(Error::InvalidParameter("box needs dimension >= 1".into()));
        }
        if extents.contains(&0) {
            return Err(Error::InvalidParameter("box extents must be >= 1".into()));
        }
        let mut cells: u64 = 1;
        for &e in &extents {
            cells = cells.checked_mul(e).ok_or(Error::BoxOverflow)?;
        }
        if usize::try_from(cells).is_err() {
            return Err(Error::BoxOverflow);
        }
        let d = extents.len();
        let mut strides = vec![1u64; d];
        for i in (0..d - 1).rev() {
            strides[i] = strides[i + 1] * extents[i + 1];
        }
        Ok(GridBox {
            extents,
            strides,
            cells,
        })
    }

    /// Cubical box `[0, extent)^d`.
    pub fn cube(d: usize, extent: u64) -> Result<GridBox> {
        GridBox::new(vec![extent; d])
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[u64] {
        &self.extents
    }

    pub fn cells(&self) -> u64 {
        self.cells
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim() && p.coords().iter().zip(&self.extents).all(|(&c, &e)| c < e)
    }

    /// Row-major rank of a point inside the box.
    pub fn index(&self, p: &Point) -> Result<u64> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.dim(),
            });
        }
        if !self.contains(p) {
            return Err(Error::PointOutsideBox);
        }
        Ok(self.rank_of(p.coords()))
    }

    /// Rank of in-box coordinates; callers guarantee containment.
    pub fn rank_of(&self, coords: &[u64]) -> u64 {
        coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c * s)
            .sum()
    }

    /// Inverse of `index`.
    pub fn point_at(&self, rank: u64) -> Result<Point> {
        if rank >= self.cells {
            return Err(Error::PointOutsideBox);
        }
        let mut coords = vec![0u64; self.dim()];
        let mut r = rank;
        for (c, &stride) in coords.iter_mut().zip(&self.strides) {
            *c = r / stride;
            r %= stride;
        }
        Ok(Point::new(coords))
    }

    /// Extent of the fastest-varying axis (the in-row length).
    pub fn row_len(&self) -> u64 {
        *self.extents.last().unwrap()
    }

    /// Number of rows: one per combination of all-but-last coordinates.
    pub fn row_count(&self) -> u64 {
        self.cells / self.row_len()
    }

    /// Iterate over all points in row-major order.
    pub fn iter_points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.cells).map(move |r| self.point_at(r).unwrap())
    }
}

/// Odometer over the all-but-last coordinates of a box, tracking the prefix
/// coordinates alongside the row index.
pub(crate) struct RowCursor<'a> {
    boxx: &'a GridBox,
    coords: Vec<u64>,
    row: u64,
    done: bool,
}

impl<'a> RowCursor<'a> {
    pub fn new(boxx: &'a GridBox) -> RowCursor<'a> {
        RowCursor {
            boxx,
            coords: vec![0; boxx.dim().saturating_sub(1)],
            row: 0,
            done: false,
        }
    }

    pub fn advance(&mut self) -> Option<(u64, &[u64])> {
        if self.done {
            return None;
        }
        let row = self.row;
        if row >= self.boxx.row_count() {
            self.done = true;
            return None;
        }
        if row > 0 {
            // increment the prefix odometer (last prefix axis fastest)
            let d = self.coords.len();
            let mut i = d;
            while i > 0 {
                i -= 1;
                self.coords[i] += 1;
                if self.coords[i] < self.boxx.extents[i] {
                    break;
                }
                self.coords[i] = 0;
            }
        }
        self.row += 1;
        Some((row, &self.coords))
    }
}

/// Dense boolean indicator of a point set over a box. Rows are padded to word
/// boundaries internally; the abstract bit array has exactly `cells` entries
/// indexed by row-major rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitGrid {
    boxx: GridBox,
    row_words: usize,
    words: Vec<u64>,
}

impl BitGrid {
    pub fn empty(boxx: GridBox) -> BitGrid {
        let row_words = (boxx.row_len() as usize).div_ceil(64);
        let words = vec![0u64; row_words * boxx.row_count() as usize];
        BitGrid {
            boxx,
            row_words,
            words,
        }
    }

    pub fn boxx(&self) -> &GridBox {
        &self.boxx
    }

    pub fn len(&self) -> u64 {
        self.boxx.cells()
    }

    pub fn is_empty(&self) -> bool {
        self.popcount() == 0
    }

    #[inline]
    fn split(&self, rank: u64) -> (usize, u64) {
        let row_len = self.boxx.row_len();
        ((rank / row_len) as usize, rank % row_len)
    }

    #[inline]
    pub(crate) fn get_rc(&self, row: usize, off: u64) -> bool {
        let w = row * self.row_words + (off >> 6) as usize;
        self.words[w] >> (off & 63) & 1 != 0
    }

    #[inline]
    pub(crate) fn set_rc(&mut self, row: usize, off: u64) {
        let w = row * self.row_words + (off >> 6) as usize;
        self.words[w] |= 1u64 << (off & 63);
    }

    pub fn get_rank(&self, rank: u64) -> bool {
        assert!(rank < self.len(), "rank out of range");
        let (row, off) = self.split(rank);
        self.get_rc(row, off)
    }

    pub fn set_rank(&mut self, rank: u64) {
        assert!(rank < self.len(), "rank out of range");
        let (row, off) = self.split(rank);
        self.set_rc(row, off);
    }

    pub fn get_point(&self, p: &Point) -> Result<bool> {
        let rank = self.boxx.index(p)?;
        Ok(self.get_rank(rank))
    }

    pub fn set_point(&mut self, p: &Point) -> Result<()> {
        let rank = self.boxx.index(p)?;
        self.set_rank(rank);
        Ok(())
    }

    pub(crate) fn row_words(&self) -> usize {
        self.row_words
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    /// Number of set cells.
    pub fn popcount(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Number of set cells whose point satisfies the predicate.
    pub fn popcount_in(&self, mut predicate: impl FnMut(&[u64]) -> bool) -> u64 {
        let mut count = 0;
        self.for_each_set_point(|coords| {
            if predicate(coords) {
                count += 1;
            }
        });
        count
    }

    /// Visit the coordinates of every set cell in row-major order.
    pub fn for_each_set_point(&self, mut f: impl FnMut(&[u64])) {
        let d = self.boxx.dim();
        let row_len = self.boxx.row_len();
        let mut coords = vec![0u64; d];
        let mut cursor = RowCursor::new(&self.boxx);
        while let Some((row, prefix)) = cursor.advance() {
            coords[..d - 1].copy_from_slice(prefix);
            let base = row as usize * self.row_words;
            for wi in 0..self.row_words {
                let mut w = self.words[base + wi];
                while w != 0 {
                    let b = w.trailing_zeros() as u64;
                    let off = (wi as u64) << 6 | b;
                    debug_assert!(off < row_len);
                    coords[d - 1] = off;
                    f(&coords);
                    w &= w - 1;
                }
            }
        }
    }

    /// Ranks of all set cells, ascending.
    pub fn set_ranks(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let row_len = self.boxx.row_len();
        for row in 0..self.boxx.row_count() as usize {
            let base = row * self.row_words;
            for wi in 0..self.row_words {
                let mut w = self.words[base + wi];
                while w != 0 {
                    let b = w.trailing_zeros() as u64;
                    out.push(row as u64 * row_len + ((wi as u64) << 6 | b));
                    w &= w - 1;
                }
            }
        }
        out
    }

    /// Union with a translate: the result has `out[x] = self[x] OR self[x - offset]`
    /// where cells whose `x - offset` leaves the nonnegative orthant keep only
    /// `self[x]`.
    pub fn shift_or(&self, offset: &Point) -> Result<BitGrid> {
        if offset.dim() != self.boxx.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.boxx.dim(),
                got: offset.dim(),
            });
        }
        let mut out = self.clone();
        let d = self.boxx.dim();
        let off_prefix = &offset.coords()[..d - 1];
        let off_last = offset.coords()[d - 1];
        if off_last >= self.boxx.row_len() && d == 1 {
            return Ok(out);
        }
        let prefix_rank: u64 = off_prefix
            .iter()
            .zip(&self.boxx.strides[..d - 1])
            .map(|(&c, &s)| c * s)
            .sum::<u64>()
            / self.boxx.row_len();
        let mut cursor = RowCursor::new(&self.boxx);
        while let Some((row, prefix)) = cursor.advance() {
            if prefix.iter().zip(off_prefix).any(|(&c, &o)| c < o) {
                continue;
            }
            if off_last >= self.boxx.row_len() {
                continue;
            }
            let src_row = (row - prefix_rank) as usize;
            let dst_base = row as usize * self.row_words;
            or_shifted(
                &mut out.words[dst_base..dst_base + self.row_words],
                &self.words[src_row * self.row_words..src_row * self.row_words + self.row_words],
                off_last,
                self.boxx.row_len(),
            );
        }
        Ok(out)
    }
}

/// `dst |= src << shift` over a row of `len_bits` valid bits; bits shifted past
/// `len_bits` are discarded. `dst` and `src` must be distinct slices.
pub(crate) fn or_shifted(dst: &mut [u64], src: &[u64], shift: u64, len_bits: u64) {
    let n = dst.len();
    let wsh = (shift >> 6) as usize;
    let bsh = shift & 63;
    if bsh == 0 {
        for w in (wsh..n).rev() {
            dst[w] |= src[w - wsh];
        }
    } else {
        for w in (wsh..n).rev() {
            let lo = src[w - wsh] << bsh;
            let hi = if w - wsh > 0 {
                src[w - wsh - 1] >> (64 - bsh)
            } else {
                0
            };
            dst[w] |= lo | hi;
        }
    }
    mask_tail(dst, len_bits);
}

/// Zero all bits at positions >= len_bits.
pub(crate) fn mask_tail(dst: &mut [u64], len_bits: u64) {
    let last = len_bits.div_ceil(64) as usize;
    for w in dst.iter_mut().skip(last) {
        *w = 0;
    }
    if len_bits & 63 != 0 && last >= 1 {
        dst[last - 1] &= (1u64 << (len_bits & 63)) - 1;
    }
}
