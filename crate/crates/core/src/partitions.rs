//! Exact colored-partition counting with weights `u_k = k^(d-1)`, the
//! growth-exponent fit, and the partition-style counting bound.
//!
//! Values are coefficients of `prod_{k>=1} (1 - z^k)^(-k^(d-1))`. Arbitrary
//! precision is mandatory: the d = 2 table at n = 2000 has hundreds of digits
//! and a float table would silently corrupt the exponent fit.

use crate::error::{Error, Result};
use crate::limits::Limits;
use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Exact table of `ptn_d(0..=n_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTable {
    pub d: usize,
    values: Vec<BigUint>,
}

/// The two equivalent DP formulations; they produce identical tables and the
/// test suite holds them to that.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtnStrategy {
    /// Single pass over the divisor-sum recurrence
    /// `n * ptn(n) = sum_j sigma_d(j) * ptn(n-j)` with `sigma_d(j) = sum_{k|j} k^d`.
    DivisorSum,
    /// Factor-by-factor application of each Euler factor `(1 - z^k)^(-k^(d-1))`.
    EulerProduct,
}

impl PartitionTable {
    pub fn n_max(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn value(&self, n: u64) -> &BigUint {
        &self.values[n as usize]
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }
}

/// Build the exact table with the default (divisor-sum) strategy.
pub fn ptn_table(d: usize, n_max: u64) -> PartitionTable {
    ptn_table_with(d, n_max, PtnStrategy::DivisorSum)
}

pub fn ptn_table_with(d: usize, n_max: u64, strategy: PtnStrategy) -> PartitionTable {
    assert!(d >= 1, "dimension must be >= 1");
    let values = match strategy {
        PtnStrategy::DivisorSum => divisor_sum_table(d, n_max as usize),
        PtnStrategy::EulerProduct => euler_product_table(d, n_max as usize),
    };
    PartitionTable { d, values }
}

fn divisor_sum_table(d: usize, n_max: usize) -> Vec<BigUint> {
    // sigma_d(j) = sum over divisors k of j of k^d, sieved
    let mut sigma = vec![BigUint::zero(); n_max + 1];
    for k in 1..=n_max {
        let kd = pow_u128(k as u128, d as u32);
        let kd = BigUint::from(kd);
        let mut j = k;
        while j <= n_max {
            sigma[j] += &kd;
            j += k;
        }
    }
    let mut values = vec![BigUint::zero(); n_max + 1];
    values[0] = BigUint::one();
    for n in 1..=n_max {
        let mut acc = BigUint::zero();
        for j in 1..=n {
            acc += &sigma[j] * &values[n - j];
        }
        values[n] = acc / BigUint::from(n as u64);
    }
    values
}

fn pow_u128(base: u128, exp: u32) -> u128 {
    let mut out: u128 = 1;
    for _ in 0..exp {
        out = out.checked_mul(base).expect("k^d overflows u128");
    }
    out
}

fn euler_product_table(d: usize, n_max: usize) -> Vec<BigUint> {
    let mut values = vec![BigUint::zero(); n_max + 1];
    values[0] = BigUint::one();
    for k in 1..=n_max {
        let multiplicity = pow_u128(k as u128, d as u32 - 1);
        if multiplicity <= 64 {
            // literal repeated prefix accumulation, one pass per unit of weight
            for _ in 0..multiplicity {
                for n in k..=n_max {
                    let (lo, hi) = values.split_at_mut(n);
                    hi[0] += &lo[n - k];
                }
            }
        } else {
            apply_factor_convolution(&mut values, k, multiplicity);
        }
    }
    values
}

/// Multiply the series by `(1 - z^k)^(-m)` in one shot: along each residue
/// class mod k, convolve with the negative-binomial coefficients
/// `binom(m - 1 + t, t)`.
fn apply_factor_convolution(values: &mut [BigUint], k: usize, m: u128) {
    let n_max = values.len() - 1;
    let terms = n_max / k;
    // binom(m-1+t, t), built incrementally by exact multiply/divide
    let mut binom = Vec::with_capacity(terms + 1);
    let mut c = BigUint::one();
    binom.push(c.clone());
    for t in 1..=terms {
        c = c * BigUint::from(m + t as u128 - 1) / BigUint::from(t as u128);
        binom.push(c.clone());
    }
    for r in 0..k.min(n_max + 1) {
        let len = (n_max - r) / k + 1;
        let mut out = vec![BigUint::zero(); len];
        for j in 0..len {
            let mut acc = BigUint::zero();
            for t in 0..=j {
                if !values[r + (j - t) * k].is_zero() {
                    acc += &binom[t] * &values[r + (j - t) * k];
                }
            }
            out[j] = acc;
        }
        for (j, v) in out.into_iter().enumerate() {
            values[r + j * k] = v;
        }
    }
}

/// Natural log of a positive big integer via its top bits; relative error is
/// at the f64 rounding level.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        let v: u64 = x.try_into().ok().unwrap_or(u64::MAX);
        return (v as f64).ln();
    }
    let shift = bits - 53;
    let top: BigUint = x >> shift;
    let mant: u64 = (&top).try_into().unwrap();
    (mant as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Affine least-squares fit of `log log ptn_d(n)` against `log n` over
/// `n in [n_lo, n_hi]`. `alpha` is the slope (the growth exponent),
/// `kappa_hat = exp(intercept)`, `r2` the coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub alpha: f64,
    pub kappa_hat: f64,
    pub r2: f64,
}

pub fn meinardus_exponent_fit(table: &PartitionTable, n_lo: u64, n_hi: u64) -> Result<ExponentFit> {
    if n_lo < 8 {
        return Err(Error::InvalidParameter("fit window must start at n >= 8".into()));
    }
    if n_hi > table.n_max() {
        return Err(Error::InvalidParameter("fit window beyond table".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for n in n_lo..=n_hi {
        let ln_v = ln_big(table.value(n));
        if ln_v <= 0.0 {
            continue;
        }
        xs.push((n as f64).ln());
        ys.push(ln_v.ln());
    }
    if xs.len() < 5 {
        return Err(Error::TooFewFitPoints);
    }
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let syy: f64 = ys.iter().map(|y| (y - ym) * (y - ym)).sum();
    let alpha = sxy / sxx;
    let intercept = ym - alpha * xm;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + alpha * x);
            e * e
        })
        .sum();
    let r2 = if syy == 0.0 { 0.0 } else { 1.0 - ss_res / syy };
    Ok(ExponentFit {
        alpha,
        kappa_hat: intercept.exp(),
        r2,
    })
}

/// The explicit counting bound `sum_{n=0}^{floor(2 gamma^(1/d) Y)} ptn_d(n)`:
/// the number of weighted tuples available to represent closure elements
/// under a hyperplane.
pub fn partition_bound_count(gamma: f64, y: f64, d: usize, limits: &Limits) -> Result<BigUint> {
    if !(gamma > 0.0) || !(y > 0.0) {
        return Err(Error::InvalidParameter("gamma and Y must be positive".into()));
    }
    let budget_f = 2.0 * gamma.powf(1.0 / d as f64) * y;
    if !budget_f.is_finite() {
        return Err(Error::InvalidParameter("budget not finite".into()));
    }
    let budget = budget_f.floor() as u64;
    if budget > limits.max_partition_budget {
        return Err(Error::BudgetTooLarge {
            budget,
            cap: limits.max_partition_budget,
        });
    }
    let table = ptn_table(d, budget);
    let mut total = BigUint::zero();
    for v in table.values() {
        total += v;
    }
    Ok(total)
}
