//! Acceptance suite. Every criterion runs at its stated tolerance and prints
//! one pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).
//! Criteria 4a, 6b, and 10b assert empirical targets that exact computation
//! shows to be out of reach at desk scale; they are implemented exactly as
//! stated and left red rather than loosened. Details sit next to each test.

mod common;

use common::{
    closure_bfs_oracle, colored_partition_oracle, region_volume_quadrature,
    subset_sums_enum_oracle, to_points, InstanceGen,
};
use gnslab::experiments::{sweep, Model, SweepCell, SyndeticityOutcome, TrialConfig};
use gnslab::hyperboloid::{lattice_count_sandwich, region_volume, verify_hyperplane_cover};
use gnslab::lattice::{GridBox, Point};
use gnslab::limits::Limits;
use gnslab::partitions::{
    meinardus_exponent_fit, partition_bound_count, ptn_table, ptn_table_with, PtnStrategy,
};
use gnslab::sample::{derive_seed, sample, sample_restricted, RandomSetSpec};
use gnslab::semigroup::{closure_in_box, residue_coverage, subset_sums_in_box};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use std::time::Instant;

fn check(name: &str, pass: bool, details: String, started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    let verdict = if pass && elapsed < budget_s {
        "PASS"
    } else {
        "FAIL"
    };
    println!("criterion {name}: {verdict} — {details} [{elapsed:.1}s / {budget_s:.0}s]");
    assert!(pass, "criterion {name}: {details}");
    assert!(
        elapsed < budget_s,
        "criterion {name} exceeded its {budget_s}s budget ({elapsed:.1}s)"
    );
}

#[test]
fn criterion_01_closure_oracle_equivalence() {
    let t0 = Instant::now();
    let mut gen = InstanceGen::new(0xACC1);
    let mut mismatches = 0;
    for _ in 0..200 {
        let boxx = gen.small_box(10_000);
        let gens = gen.gens_in(&boxx, 15);
        let grid = closure_in_box(&to_points(&gens), &boxx).unwrap();
        let oracle: Vec<u64> = closure_bfs_oracle(&gens, &boxx).into_iter().collect();
        if grid.grid().set_ranks() != oracle {
            mismatches += 1;
        }
    }
    check(
        "01 closure-oracle",
        mismatches == 0,
        format!("{mismatches} mismatches over 200 instances"),
        t0,
        60.0,
    );
}

#[test]
fn criterion_02_subset_sum_oracle_equivalence() {
    let t0 = Instant::now();
    let mut gen = InstanceGen::new(0xACC2);
    let mut mismatches = 0;
    let mut containment_violations = 0;
    for _ in 0..200 {
        let boxx = gen.small_box(10_000);
        let gens = gen.gens_in(&boxx, 15);
        let fs = subset_sums_in_box(&to_points(&gens), &boxx).unwrap();
        let oracle: Vec<u64> = subset_sums_enum_oracle(&gens, &boxx).into_iter().collect();
        if fs.grid().set_ranks() != oracle {
            mismatches += 1;
        }
        let s = closure_in_box(&to_points(&gens), &boxx).unwrap();
        if fs.grid().set_ranks().iter().any(|&r| !s.grid().get_rank(r)) {
            containment_violations += 1;
        }
    }
    check(
        "02 subset-sum-oracle",
        mismatches == 0 && containment_violations == 0,
        format!("{mismatches} mismatches, {containment_violations} containment violations over 200 instances"),
        t0,
        60.0,
    );
}

#[test]
fn criterion_03_partition_tables() {
    let t0 = Instant::now();
    let p1: Vec<u64> = ptn_table(1, 6)
        .values()
        .iter()
        .map(|v| v.try_into().unwrap())
        .collect();
    let p2: Vec<u64> = ptn_table(2, 6)
        .values()
        .iter()
        .map(|v| v.try_into().unwrap())
        .collect();
    let pinned_ok = p1 == [1, 1, 2, 3, 5, 7, 11] && p2 == [1, 1, 3, 6, 13, 24, 48];
    let mut oracle_ok = true;
    for d in 1..=3usize {
        let t = ptn_table(d, 12);
        for n in 0..=12u64 {
            oracle_ok &= t.value(n) == &colored_partition_oracle(d, n);
        }
    }
    let mut formulations_ok = true;
    for d in 1..=3usize {
        let a = ptn_table_with(d, 2000, PtnStrategy::DivisorSum);
        let b = ptn_table_with(d, 2000, PtnStrategy::EulerProduct);
        formulations_ok &= a == b;
    }
    check(
        "03 partition-tables",
        pinned_ok && oracle_ok && formulations_ok,
        format!("pinned={pinned_ok} oracle(n<=12,d<=3)={oracle_ok} formulations(n=2000,d<=3)={formulations_ok}"),
        t0,
        120.0,
    );
}

/// Expected red. The fit method is pinned (affine least squares of
/// `log log ptn` on `log n` over all integers in [200, 2000]) and exact
/// computation gives alpha ~= 0.554 for d = 1: the subleading `-log n` term
/// of the classical asymptotic inflates the finite-scale slope, and
/// [200, 2000] is far from the regime where it decays. No reading of the
/// stated method lands within 0.5 +/- 0.03.
#[test]
fn criterion_04a_meinardus_exponent_d1() {
    let t0 = Instant::now();
    let t = ptn_table(1, 2000);
    let fit = meinardus_exponent_fit(&t, 200, 2000).unwrap();
    check(
        "04a meinardus-exponent-d1",
        (fit.alpha - 0.5).abs() <= 0.03,
        format!("alpha={:.4} target 0.5 +/- 0.03 (r2={:.5})", fit.alpha, fit.r2),
        t0,
        120.0,
    );
}

#[test]
fn criterion_04b_meinardus_exponent_d2() {
    let t0 = Instant::now();
    let t = ptn_table(2, 2000);
    let fit = meinardus_exponent_fit(&t, 200, 2000).unwrap();
    check(
        "04b meinardus-exponent-d2",
        (fit.alpha - 2.0 / 3.0).abs() <= 0.05,
        format!(
            "alpha={:.4} target {:.4} +/- 0.05 (r2={:.5})",
            fit.alpha,
            2.0 / 3.0,
            fit.r2
        ),
        t0,
        120.0,
    );
}

#[test]
fn criterion_05_volume_formula() {
    let t0 = Instant::now();
    // d = 1 exact
    let mut ok = region_volume(1, 2.0, 10.0).unwrap() == 8.0;
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC5);
    for d in 2..=3usize {
        for _ in 0..20 {
            let shift: f64 = rng.gen_range(0.7..3.5);
            let level = shift.powi(d as i32) * rng.gen_range(1.2..60.0);
            let closed = region_volume(d, shift, level).unwrap();
            let quad = region_volume_quadrature(d, shift, level);
            let rel = (closed - quad).abs() / quad.abs().max(1e-30);
            worst = worst.max(rel);
            ok &= rel <= 1e-6;
        }
    }
    check(
        "05 volume-formula",
        ok,
        format!("worst relative deviation from quadrature: {worst:.2e} (tolerance 1e-6)"),
        t0,
        60.0,
    );
}

#[test]
fn criterion_06a_lattice_count_sandwich() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ok = true;
    let mut lines = Vec::new();
    for d in 1..=2usize {
        for p in [0.1, 0.05, 0.02] {
            let s = lattice_count_sandwich(d, p, 1.0, &limits).unwrap();
            let holds = s.lower <= s.exact as f64 && (s.exact as f64) <= s.upper;
            ok &= holds;
            lines.push(format!("d={d},p={p}: {:.1}<={}<={:.1}", s.lower, s.exact, s.upper));
        }
    }
    check(
        "06a count-sandwich",
        ok,
        lines.join("; "),
        t0,
        120.0,
    );
}

/// Expected red. The normalizer is pinned to `C p^-1 (log p^-1)^{2d}/(d-1)!`;
/// exact counts give ratios 1.142, 1.150, 1.163 for p = 0.1, 0.05, 0.02 at
/// d = 2, so |ratio - 1| grows as p falls. The dominant finite-scale
/// correction is (log log p^-1 - 1)/log p^-1, which increases until
/// log p^-1 = e^2 (p ~ 6e-4), far below the pinned ladder; the drift toward 1
/// is real but starts outside the stated parameter set.
#[test]
fn criterion_06b_sandwich_ratio_trend() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ratios = Vec::new();
    for p in [0.1, 0.05, 0.02] {
        let s = lattice_count_sandwich(2, p, 1.0, &limits).unwrap();
        let shift = (1.0f64 / p).ln();
        let predicted = shift.powi(4) / p;
        ratios.push(s.exact as f64 / predicted);
    }
    let toward_one = ratios
        .windows(2)
        .all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs());
    check(
        "06b sandwich-ratio-trend",
        toward_one,
        format!("ratios along p=0.1,0.05,0.02: {ratios:.4?} (must move toward 1)"),
        t0,
        120.0,
    );
}

#[test]
fn criterion_07_hyperplane_covering() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ok = true;
    let mut details = Vec::new();
    for (d, p, z) in [(2, 0.1, 200.0), (2, 0.05, 1e3), (3, 0.2, 500.0)] {
        let (holds, witness) = verify_hyperplane_cover(d, p, z, &limits).unwrap();
        ok &= holds;
        details.push(format!("(d={d},p={p},Z={z}): holds={holds} witness={witness:?}"));
    }
    check("07 hyperplane-cover", ok, details.join("; "), t0, 60.0);
}

#[test]
fn criterion_08_partition_bound_dominance() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC8);
    let mut violations = 0;
    let mut ran = 0;
    while ran < 50 {
        let d = if ran % 2 == 0 { 1usize } else { 2 };
        let extent = if d == 1 { 220u64 } else { 26 };
        let boxx = GridBox::cube(d, extent).unwrap();
        let lambda: Vec<f64> = (0..d).map(|_| rng.gen_range(0.6..1.8)).collect();
        // sample A0 inside the box
        let mut gens: Vec<Vec<u64>> = Vec::new();
        for rank in 1..boxx.cells() {
            if rng.gen::<f64>() < 0.12 {
                gens.push(boxx.point_at(rank).unwrap().coords().to_vec());
            }
        }
        if gens.is_empty() {
            continue;
        }
        ran += 1;
        // the tightest gamma satisfying the density hypothesis for this A0
        let mut dots: Vec<f64> = gens
            .iter()
            .map(|g| g.iter().zip(&lambda).map(|(&c, l)| c as f64 * l).sum())
            .collect();
        dots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let gamma = dots
            .iter()
            .enumerate()
            .map(|(i, &dot)| (i + 1) as f64 / dot.powi(d as i32))
            .fold(0.0f64, f64::max);
        // the half-space {x . lambda <= Y} must stay inside the box
        let y_cap = lambda
            .iter()
            .zip(boxx.extents())
            .map(|(l, &e)| l * (e - 1) as f64)
            .fold(f64::INFINITY, f64::min)
            * 0.9;
        let y = rng.gen_range(0.3 * y_cap..y_cap);
        let grid = closure_in_box(&to_points(&gens), &boxx).unwrap();
        let measured = grid.grid().popcount_in(|coords| {
            coords
                .iter()
                .zip(&lambda)
                .map(|(&c, l)| c as f64 * l)
                .sum::<f64>()
                <= y
        });
        let bound = partition_bound_count(gamma, y, d, &limits).unwrap();
        if BigUint::from(measured) > bound {
            violations += 1;
        }
    }
    check(
        "08 partition-bound-dominance",
        violations == 0,
        format!("{violations} violations over {ran} instances"),
        t0,
        120.0,
    );
}

#[test]
fn criterion_09_genus_scaling() {
    let t0 = Instant::now();
    let limits = Limits::default();

    // d = 1: fitted slope across three cells
    let template = TrialConfig::new(1, 0.05, 0);
    let cells1 = [
        SweepCell { d: 1, p: 0.05 },
        SweepCell { d: 1, p: 0.02 },
        SweepCell { d: 1, p: 0.01 },
    ];
    let table1 = sweep(&cells1, 50, 0x91, &template, &limits).unwrap();
    let fit = table1.fits.iter().find(|f| f.d == 1).unwrap();
    let slope_ok = fit.slope >= 0.8 && fit.slope <= 1.2;
    // the p = 0.02 cell sits within [0.1x, 10x] of p^-1 (log p^-1)^2
    let agg_002 = table1
        .aggregates
        .iter()
        .find(|a| (a.p - 0.02).abs() < 1e-12)
        .unwrap();
    let predicted = (1.0f64 / 0.02).ln().powi(2) / 0.02;
    let median = agg_002.genus_median.unwrap();
    let band_ok = median >= 0.1 * predicted && median <= 10.0 * predicted;

    // d = 2: cell-to-cell median ratio against the predicted ratio
    let template2 = TrialConfig::new(2, 0.1, 0);
    let cells2 = [SweepCell { d: 2, p: 0.1 }, SweepCell { d: 2, p: 0.05 }];
    let table2 = sweep(&cells2, 30, 0x92, &template2, &limits).unwrap();
    let m1 = table2.aggregates[0].genus_median.unwrap();
    let m2 = table2.aggregates[1].genus_median.unwrap();
    let predicted_ratio = {
        let x = |p: f64| (1.0f64 / p).ln().powi(4) / p;
        x(0.1) / x(0.05)
    };
    let measured_ratio = m1 / m2;
    let ratio_ok =
        measured_ratio >= predicted_ratio / 2.5 && measured_ratio <= predicted_ratio * 2.5;

    check(
        "09 genus-scaling",
        slope_ok && band_ok && ratio_ok,
        format!(
            "d1 slope={:.3} (certified {}/{} cells x50); d1 p=0.02 median={median:.0} vs {predicted:.0}; d2 ratio={measured_ratio:.3} vs predicted {predicted_ratio:.3}",
            fit.slope,
            table1.aggregates.iter().filter(|a| a.certified_count == a.trials).count(),
            cells1.len(),
        ),
        t0,
        900.0,
    );
}

fn shape_sweep() -> &'static gnslab::experiments::SweepTable {
    static TABLE: OnceLock<gnslab::experiments::SweepTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let limits = Limits::default();
        let mut template = TrialConfig::new(2, 0.05, 0);
        template.model = Model::Both;
        template.inner_c = 0.05;
        template.outer_c = 20.0;
        let cells = [SweepCell { d: 2, p: 0.05 }];
        sweep(&cells, 30, 0xA10, &template, &limits).unwrap()
    })
}

#[test]
fn criterion_10a_shape_containment() {
    let t0 = Instant::now();
    let agg = &shape_sweep().aggregates[0];
    let s_frac = agg.zero_violation_fraction_semigroup.unwrap();
    let fs_frac = agg.zero_violation_fraction_fs.unwrap();
    check(
        "10a shape-containment",
        s_frac >= 0.9 && fs_frac >= 0.8,
        format!("zero-violation fraction: semigroup {s_frac:.2} (need >=0.90), subset sums {fs_frac:.2} (need >=0.80), 30 trials"),
        t0,
        600.0,
    );
}

/// Expected red. The inner region R_2(0.05, 0.05 * Z*) has exactly 17 lattice
/// points and the origin is always a member (the empty sum), so every trial
/// has inner_fraction >= 1/17 = 0.0588 > 0.05; the measured mean is ~0.11.
/// The sparsity statement is asymptotic and the pinned inner_c = 0.05 leaves
/// the region too small for it to bite at p = 0.05.
#[test]
fn criterion_10b_shape_sparsity() {
    let t0 = Instant::now();
    let agg = &shape_sweep().aggregates[0];
    let mean_frac = agg.mean_inner_fraction.unwrap();
    check(
        "10b shape-sparsity",
        mean_frac <= 0.05,
        format!("mean inner_fraction {mean_frac:.4} (need <= 0.05; structural floor 1/17 = 0.0588)"),
        t0,
        600.0,
    );
}

#[test]
fn criterion_11_group_coverage() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut full = 0;
    let trials = 500;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(0xB11, t));
        let mut ranks: Vec<u64> = (0..64).collect();
        ranks.shuffle(&mut rng);
        let points: Vec<Point> = ranks[..40]
            .iter()
            .map(|&r| Point::new(vec![r / 8, r % 8]))
            .collect();
        let cov = residue_coverage(&points, &[8, 8], &limits).unwrap();
        if cov.full {
            full += 1;
        }
    }
    check(
        "11 group-coverage",
        full as f64 >= 0.99 * trials as f64,
        format!("{full}/{trials} runs covered all 64 residues (bound predicts ~all)"),
        t0,
        120.0,
    );
}

#[test]
fn criterion_12_syndeticity() {
    let t0 = Instant::now();
    // deterministic direction: hypothesis implies conclusion, zero tolerance
    let mut rng = ChaCha8Rng::seed_from_u64(0xB12);
    let mut hypothesis_true = 0;
    let mut implication_failures = 0;
    for _ in 0..300 {
        let r = rng.gen_range(1..=12u64);
        let horizon = r * rng.gen_range(4..=16u64);
        let mut a = Vec::new();
        let mut x = rng.gen_range(1..=2 * r);
        while x <= horizon {
            a.push(x);
            x += rng.gen_range(1..=r + 3);
        }
        if a.is_empty() {
            continue;
        }
        let out: SyndeticityOutcome =
            gnslab::experiments::syndeticity_check(&a, r, horizon).unwrap();
        if out.hypothesis_holds {
            hypothesis_true += 1;
            if !out.conclusion_holds {
                implication_failures += 1;
            }
        }
    }

    // random-support direction at p = 0.1
    let p = 0.1;
    let r = {
        let raw = 100.0 * (1.0 / p) * (1.0f64 / p).ln().ceil();
        let r = raw as u64;
        r - r % 4
    };
    let horizon = 4 * r;
    let mut conclusion_hits = 0;
    for seed in 0..50u64 {
        let spec = RandomSetSpec::new(
            p,
            GridBox::new(vec![horizon + 1]).unwrap(),
            derive_seed(0xB12B, seed),
        )
        .unwrap();
        let s = sample_restricted(&spec, |pt| {
            let x = pt.coords()[0];
            (x >= r / 4 && x <= r / 2) || x >= 2 * r
        })
        .unwrap();
        let out = gnslab::experiments::syndeticity_check(s.ranks(), r, horizon).unwrap();
        if out.conclusion_holds {
            conclusion_hits += 1;
        }
    }
    check(
        "12 syndeticity",
        implication_failures == 0 && hypothesis_true >= 30 && conclusion_hits >= 45,
        format!(
            "implication failures {implication_failures}/{hypothesis_true} hypothesis-true instances; random-support (R={r}) conclusion {conclusion_hits}/50 (need >=45)"
        ),
        t0,
        120.0,
    );
}

#[test]
fn criterion_13_pointwise_non_monotonicity() {
    let t0 = Instant::now();
    let p = 0.3;
    let trials: u64 = 200_000;
    let boxx = GridBox::new(vec![6]).unwrap();
    let mut hit4 = 0u64;
    let mut hit5 = 0u64;
    let mut sum_d = 0i64;
    let mut sum_d2 = 0i64;
    for t in 0..trials {
        let spec = RandomSetSpec::new(p, boxx.clone(), derive_seed(0xB13, t)).unwrap();
        let s = sample(&spec).unwrap();
        let grid = closure_in_box(&s.points(), &boxx).unwrap();
        let in4 = grid.grid().get_rank(4);
        let in5 = grid.grid().get_rank(5);
        hit4 += in4 as u64;
        hit5 += in5 as u64;
        let d = in4 as i64 - in5 as i64;
        sum_d += d;
        sum_d2 += d * d;
    }
    let n = trials as f64;
    let p4 = hit4 as f64 / n;
    let p5 = hit5 as f64 / n;
    let mean_d = sum_d as f64 / n;
    let var_d = sum_d2 as f64 / n - mean_d * mean_d;
    let se = (var_d / n).sqrt();
    // closed forms: P[4 in <A>] = 1-(1-p)^3, P[5 in <A>] = 1-(1-p)^2(1-p^2)
    let exact4 = 1.0 - (1.0 - p) * (1.0 - p) * (1.0 - p);
    let exact5 = 1.0 - (1.0 - p) * (1.0 - p) * (1.0 - p * p);
    let se4 = (exact4 * (1.0 - exact4) / n).sqrt();
    let se5 = (exact5 * (1.0 - exact5) / n).sqrt();
    let cross_check = (p4 - exact4).abs() <= 4.0 * se4 && (p5 - exact5).abs() <= 4.0 * se5;
    check(
        "13 pointwise-non-monotonicity",
        mean_d > 3.0 * se && cross_check,
        format!(
            "P[4]={p4:.4} P[5]={p5:.4} gap={mean_d:.4} (3SE={:.4}); closed forms {exact4:.4}/{exact5:.4} matched={cross_check}",
            3.0 * se
        ),
        t0,
        120.0,
    );
}

#[test]
fn criterion_14_embedding_dimension() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut template = TrialConfig::new(1, 0.05, 0);
    template.collect_embedding = true;
    let cells = [SweepCell { d: 1, p: 0.05 }, SweepCell { d: 1, p: 0.02 }];
    let table = sweep(&cells, 30, 0xE14, &template, &limits).unwrap();
    let m1 = table.aggregates[0].embedding_median.unwrap();
    let m2 = table.aggregates[1].embedding_median.unwrap();
    let predicted_ratio = (1.0f64 / 0.05).ln().powi(2) / (1.0f64 / 0.02).ln().powi(2);
    let measured_ratio = m1 / m2;
    let ratio_ok =
        measured_ratio >= predicted_ratio / 2.5 && measured_ratio <= predicted_ratio * 2.5;
    let inside1 = table.aggregates[0].embedding_inside_fraction.unwrap();
    let inside2 = table.aggregates[1].embedding_inside_fraction.unwrap();
    check(
        "14 embedding-dimension",
        ratio_ok && inside1 >= 0.9 && inside2 >= 0.9,
        format!(
            "medians {m1}/{m2} ratio={measured_ratio:.3} vs predicted {predicted_ratio:.3} (x2.5 band); inside-region fractions {inside1:.2}, {inside2:.2} (need >=0.90)"
        ),
        t0,
        300.0,
    );
}
