//! An exact-computation and Monte Carlo laboratory for random generalized
//! numerical semigroups on truncated lattices.
//!
//! A p-random subset `A` of the nonnegative lattice generates the semigroup
//! `<A>` (sums with repetition) and the subset-sum set `FS(A)` (sums of
//! distinct elements). This crate computes both exactly inside truncation
//! boxes, extracts gap-set invariants with a deterministic completeness
//! certificate, provides the shifted-hyperboloid scaling region with volume
//! and covering-net machinery, counts colored partitions exactly, and drives
//! reproducible Monte Carlo sweeps over (d, p) grids.

// validation guards use `!(x > 0.0)` so NaN parameters are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod hyperboloid;
pub mod lattice;
pub mod limits;
pub mod partitions;
pub mod sample;
pub mod schema;
pub mod semigroup;

pub use error::{Error, Result};
pub use lattice::{BitGrid, GridBox, Point};
pub use limits::Limits;
