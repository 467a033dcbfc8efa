//! Exact combinatorics of intersecting families of bounded multisets.
//!
//! A k-multiset of `[n]_m` draws k symbols from `{1, ..., n}` with each
//! symbol used at most m times. This crate computes the exact counting
//! data attached to such families — support-size coefficient rows, star
//! sizes, maximal intersecting families of the subset lattice — and
//! verifies, at desk scale and against independent brute-force oracles,
//! that the star is the largest intersecting family whenever
//! `n >= k + ceil(k/m)`, including the classification of the instances
//! where the star is not the unique extremal family.
//!
//! Modules follow the pipeline:
//!
//! * [`coeffs`] — exact coefficient rows by three independent algorithms;
//! * [`spectrum`] — unimodality profiles, window sets, row inequalities;
//! * [`multiset`] — multisets, families, stars, isomorphism;
//! * [`lattice`] — maximal intersecting families of proper subsets, the
//!   support map and its pre-image counting;
//! * [`verify`] — end-to-end instance verification, sweeps, the ledger;
//! * [`cli`] — the `mekr` command-line interface.

pub mod cli;
pub mod coeffs;
pub mod error;
pub mod lattice;
pub mod multiset;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
