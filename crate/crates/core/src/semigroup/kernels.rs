//! Dense-grid DP kernels for in-box closure and subset sums.
//!
//! Both kernels exploit the row-major layout: a "row" is the contiguous run of
//! cells sharing all-but-last coordinates, so last-axis work is word-parallel.

use crate::lattice::{mask_tail, BitGrid, GridBox};

/// Generators grouped by their all-but-last coordinates, buckets sorted by
/// prefix rank, offsets ascending within each bucket. Row-major rank order is
/// a linear extension of the coordinatewise order, so a scan over buckets with
/// prefix rank <= the target's can stop early without missing witnesses.
pub(crate) struct GenBuckets {
    pub buckets: Vec<Bucket>,
}

pub(crate) struct Bucket {
    pub prefix_row: u64,
    pub prefix: Vec<u64>,
    pub lasts: Vec<u64>,
}

fn decode_prefix(boxx: &GridBox, row: u64) -> Vec<u64> {
    let p = boxx.point_at(row * boxx.row_len()).unwrap();
    p.coords()[..boxx.dim() - 1].to_vec()
}

/// Build buckets from sorted, deduplicated ranks; rank 0 (the origin) is
/// dropped, being the empty sum.
pub(crate) fn bucket_ranks(ranks: &[u64], boxx: &GridBox) -> GenBuckets {
    let row_len = boxx.row_len();
    let mut buckets: Vec<Bucket> = Vec::new();
    for &r in ranks {
        if r == 0 {
            continue;
        }
        let row = r / row_len;
        let off = r % row_len;
        match buckets.last_mut() {
            Some(b) if b.prefix_row == row => b.lasts.push(off),
            _ => buckets.push(Bucket {
                prefix_row: row,
                prefix: decode_prefix(boxx, row),
                lasts: vec![off],
            }),
        }
    }
    GenBuckets { buckets }
}

/// Exact in-box additive closure: `grid[x] = true` iff `x` is a sum of
/// generators with repetition. Monotone recurrence in row-major order; each
/// cell subtracts one generator and exits on the first witness.
pub(crate) fn closure_kernel(gens: &GenBuckets, boxx: &GridBox) -> BitGrid {
    let mut grid = BitGrid::empty(boxx.clone());
    let d = boxx.dim();
    let row_len = boxx.row_len();
    let row_words = grid.row_words();
    let rows = boxx.row_count();
    let need_cw = d >= 3; // for d <= 2, prefix-rank order equals coordinatewise order
    let words = grid.words_mut();
    words[0] |= 1; // origin: the empty sum

    let mut prefix = vec![0u64; d.saturating_sub(1)];
    let extents = boxx.extents().to_vec();
    let mut admissible_end = 0usize;
    for row in 0..rows {
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
        while admissible_end < gens.buckets.len()
            && gens.buckets[admissible_end].prefix_row <= row
        {
            admissible_end += 1;
        }
        let admissible = &gens.buckets[..admissible_end];
        let base = row as usize * row_words;
        for xl in 0..row_len {
            if row == 0 && xl == 0 {
                continue;
            }
            'scan: for b in admissible {
                if need_cw && b.prefix.iter().zip(&prefix).any(|(&a, &x)| a > x) {
                    continue;
                }
                let src_base = (row - b.prefix_row) as usize * row_words;
                for &al in &b.lasts {
                    if al > xl {
                        break;
                    }
                    let off = xl - al;
                    if words[src_base + (off >> 6) as usize] >> (off & 63) & 1 != 0 {
                        words[base + (xl >> 6) as usize] |= 1u64 << (xl & 63);
                        break 'scan;
                    }
                }
            }
        }
    }
    grid
}

/// Exact in-box subset sums: the 0/1 knapsack DP `grid <- grid OR (grid + a)`
/// over generators in ascending rank order. Rows are updated in descending
/// order so each generator sees pre-update bits only. Two prunes keep the
/// dense case fast without changing the result: per-row saturation marks
/// (`sat[r]`: all bits at offsets >= sat[r] are already set) cap the OR range,
/// and a stale suffix-maximum of `sat` skips generators that can no longer
/// change any row. Staleness is safe because `sat` only ever decreases.
pub(crate) fn subset_sums_kernel(ranks_sorted: &[u64], boxx: &GridBox) -> BitGrid {
    let mut grid = BitGrid::empty(boxx.clone());
    let d = boxx.dim();
    let row_len = boxx.row_len();
    let row_words = grid.row_words();
    let rows = boxx.row_count() as usize;
    let need_cw = d >= 3;
    let words = grid.words_mut();
    words[0] |= 1;

    let mut sat: Vec<u64> = vec![row_len; rows];
    let mut smax: Vec<u64> = vec![row_len; rows];
    // rows that may contain set bits; ORing from a still-empty source row is a no-op
    let mut nonzero: Vec<bool> = vec![false; rows];
    nonzero[0] = true;
    let mut since_refresh = 0usize;
    let refresh_period = 512usize;

    for &g in ranks_sorted {
        if g == 0 {
            continue;
        }
        let g_row = (g / row_len) as usize;
        let g_off = g % row_len;
        if smax[g_row] <= g_off {
            continue;
        }
        since_refresh += 1;
        if since_refresh >= refresh_period {
            since_refresh = 0;
            let mut m = 0u64;
            for r in (0..rows).rev() {
                m = m.max(sat[r]);
                smax[r] = m;
            }
            if smax[g_row] <= g_off {
                continue;
            }
        }
        let g_prefix = if need_cw {
            Some(decode_prefix(boxx, g_row as u64))
        } else {
            None
        };
        for r in (g_row..rows).rev() {
            let src_row = r - g_row;
            if !nonzero[src_row] {
                continue;
            }
            let cap = sat[r];
            if cap <= g_off {
                continue;
            }
            if let Some(gp) = &g_prefix {
                let rp = decode_prefix(boxx, r as u64);
                if gp.iter().zip(&rp).any(|(&a, &x)| a > x) {
                    continue;
                }
            }
            let src_base = src_row * row_words;
            let dst_base = r * row_words;
            or_shift_capped(words, dst_base, src_base, g_off, cap, row_words);
            mask_tail(&mut words[dst_base..dst_base + row_words], row_len);
            nonzero[r] = true;
            // pull the saturation mark down past any new all-ones suffix
            let mut s = cap;
            while s > 0 {
                let idx = s - 1;
                let w = words[dst_base + (idx >> 6) as usize];
                if idx & 63 == 63 && w == u64::MAX {
                    s -= 64;
                    continue;
                }
                if w >> (idx & 63) & 1 != 0 {
                    s -= 1;
                } else {
                    break;
                }
            }
            sat[r] = s;
        }
    }
    grid
}

/// `words[dst..][g_off..cap] |= words[src..][0..cap-g_off]`, descending word
/// order so the in-place same-row case reads pre-update bits.
#[inline]
fn or_shift_capped(
    words: &mut [u64],
    dst_base: usize,
    src_base: usize,
    g_off: u64,
    cap: u64,
    row_words: usize,
) {
    let wsh = (g_off >> 6) as usize;
    let bsh = g_off & 63;
    let hi_word = (cap as usize).div_ceil(64).min(row_words);
    if bsh == 0 {
        for w in (wsh..hi_word).rev() {
            words[dst_base + w] |= words[src_base + w - wsh];
        }
    } else {
        for w in (wsh..hi_word).rev() {
            let lo = words[src_base + w - wsh] << bsh;
            let hi = if w - wsh > 0 {
                words[src_base + w - wsh - 1] >> (64 - bsh)
            } else {
                0
            };
            words[dst_base + w] |= lo | hi;
        }
    }
}

/// Plain bit vector for the toroidal residue DP.
pub(crate) struct BitVec {
    words: Vec<u64>,
}

impl BitVec {
    pub fn new(len: u64) -> BitVec {
        BitVec {
            words: vec![0; (len as usize).div_ceil(64)],
        }
    }

    #[inline]
    pub fn set(&mut self, i: u64) {
        self.words[(i >> 6) as usize] |= 1u64 << (i & 63);
    }

    pub fn popcount(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn iter_set(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w0)| {
            let mut w = w0;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as u64;
                    w &= w - 1;
                    Some(((i as u64) << 6) | b)
                }
            })
        })
    }
}
