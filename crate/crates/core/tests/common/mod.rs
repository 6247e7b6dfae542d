#![allow(dead_code)] // not every test binary uses every oracle

//! Shared test oracles. Everything here is deliberately independent of the
//! library's computation paths: brute-force enumeration, worklist search, and
//! numerical quadrature only.

use gnslab::lattice::{GridBox, Point};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, VecDeque};

/// Worklist BFS over sums with repetition: the closure oracle.
pub fn closure_bfs_oracle(gens: &[Vec<u64>], boxx: &GridBox) -> BTreeSet<u64> {
    let d = boxx.dim();
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let origin = vec![0u64; d];
    seen.insert(0);
    let mut queue: VecDeque<Vec<u64>> = VecDeque::new();
    queue.push_back(origin);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            if g.iter().all(|&c| c == 0) {
                continue;
            }
            let y: Vec<u64> = x.iter().zip(g).map(|(&a, &b)| a + b).collect();
            if y.iter().zip(boxx.extents()).all(|(&c, &e)| c < e) {
                let rank = boxx.rank_of(&y);
                if seen.insert(rank) {
                    queue.push_back(y);
                }
            }
        }
    }
    seen
}

/// Explicit 2^|A| subset-sum enumeration: the FS oracle.
pub fn subset_sums_enum_oracle(gens: &[Vec<u64>], boxx: &GridBox) -> BTreeSet<u64> {
    let d = boxx.dim();
    // deduplicate: FS is a function of the set
    let mut unique: Vec<Vec<u64>> = Vec::new();
    let mut set = BTreeSet::new();
    for g in gens {
        if set.insert(g.clone()) && g.iter().any(|&c| c != 0) {
            unique.push(g.clone());
        }
    }
    assert!(unique.len() <= 24, "oracle is exponential");
    let mut out = BTreeSet::new();
    let n = unique.len();
    'subsets: for mask in 0u32..(1 << n) {
        let mut sum = vec![0u64; d];
        for (i, g) in unique.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (s, &c) in sum.iter_mut().zip(g) {
                    *s += c;
                }
            }
        }
        if sum.iter().zip(boxx.extents()).any(|(&c, &e)| c >= e) {
            continue 'subsets;
        }
        out.insert(boxx.rank_of(&sum));
    }
    out
}

/// Count colored partitions of `n` with parts of size `k` in `k^(d-1)` colors
/// by direct recursion over part sizes and per-size color multisets.
pub fn colored_partition_oracle(d: usize, n: u64) -> BigUint {
    fn multiset_count(colors: u64, picks: u64) -> BigUint {
        // binom(colors + picks - 1, picks)
        let mut out = BigUint::one();
        for i in 0..picks {
            out = out * BigUint::from(colors + i) / BigUint::from(i + 1);
        }
        out
    }
    fn rec(d: usize, n: u64, max_part: u64) -> BigUint {
        if n == 0 {
            return BigUint::one();
        }
        if max_part == 0 {
            return BigUint::zero();
        }
        let mut total = BigUint::zero();
        let colors = max_part.pow(d as u32 - 1);
        let mut m = 0;
        while m * max_part <= n {
            total += multiset_count(colors, m) * rec(d, n - m * max_part, max_part - 1);
            m += 1;
        }
        total
    }
    rec(d, n, n)
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, tol * 0.5, depth - 1)
            + rec(f, m, fm, b, fb, rm, frm, right, tol * 0.5, depth - 1)
    }
    if a >= b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// Nested quadrature for the region volume, d in {1, 2, 3}; independent of
/// the closed-form evaluation. The last-axis extent above a prefix with
/// product `partial` is `level/partial - shift`, so the integration support
/// for the next coordinate ends where that extent reaches zero:
/// `level/(shift * partial) - shift`.
pub fn region_volume_quadrature(d: usize, shift: f64, level: f64) -> f64 {
    let extent = |partial: f64| (level / partial - shift).max(0.0);
    let support = |partial: f64| (level / (shift * partial) - shift).max(0.0);
    match d {
        1 => extent(1.0),
        2 => {
            let f = |x: f64| extent(x + shift);
            adaptive_simpson(&f, 0.0, support(1.0), 1e-10)
        }
        3 => {
            let outer = |x1: f64| {
                let inner = |x2: f64| extent((x1 + shift) * (x2 + shift));
                adaptive_simpson(&inner, 0.0, support(x1 + shift), 1e-11)
            };
            adaptive_simpson(&outer, 0.0, support(shift), 1e-10)
        }
        _ => panic!("quadrature oracle limited to d <= 3"),
    }
}

/// A reproducible stream of random small instances (box + generators).
pub struct InstanceGen {
    rng: ChaCha8Rng,
}

impl InstanceGen {
    pub fn new(seed: u64) -> InstanceGen {
        InstanceGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Random box with at most `max_cells` cells in dimension 1..=3.
    pub fn small_box(&mut self, max_cells: u64) -> GridBox {
        let d = self.rng.gen_range(1..=3usize);
        let mut extents = Vec::with_capacity(d);
        let mut budget = max_cells;
        for axis in 0..d {
            let remaining = d - axis - 1;
            // leave at least 2^remaining cells for the rest
            let cap = (budget >> remaining).max(1);
            let hi = cap.min(if d == 1 { max_cells } else { 40 });
            let e = self.rng.gen_range(1..=hi.max(1));
            extents.push(e);
            budget = (budget / e).max(1);
        }
        GridBox::new(extents).unwrap()
    }

    /// Up to `max_gens` random nonzero points inside the box.
    pub fn gens_in(&mut self, boxx: &GridBox, max_gens: usize) -> Vec<Vec<u64>> {
        let n = self.rng.gen_range(0..=max_gens);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let p: Vec<u64> = boxx
                .extents()
                .iter()
                .map(|&e| self.rng.gen_range(0..e))
                .collect();
            if p.iter().any(|&c| c != 0) {
                out.push(p);
            }
        }
        out
    }
}

pub fn to_points(gens: &[Vec<u64>]) -> Vec<Point> {
    gens.iter().map(|g| Point::new(g.clone())).collect()
}
