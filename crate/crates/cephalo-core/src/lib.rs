//! Prediction pipeline for the direction of facial growth from longitudinal
//! cephalometric landmark data.
//!
//! The crate covers the full tabular pipeline:
//!
//! 1. **[`geometry`]**: landmark containers, angle/ratio math, the Sella-origin
//!    transform, and generalized Procrustes alignment across a cohort.
//! 2. **[`features`]**: the three feature families (cephalometric angles/ratios,
//!    Procrustes coordinates, Sella-transformed coordinates) across the 9, 12 and
//!    12-9 timestamp tags, target banding into growth classes, and column
//!    standardization.
//! 3. **[`augment`]**: SMOTE and five selective variants, Tomek/ENN cleaning
//!    compositions, and Gaussian-noise injection, all with equal-per-class
//!    factor semantics.
//! 4. **[`models`]**: from-scratch classifiers (softmax regression, MLP with
//!    Adam and early stopping, k-NN, CART trees, random forests) behind one
//!    config/fit/predict interface.
//! 5. **[`eval`]**: repeated stratified cross-validation, experiment
//!    orchestration, Student's t significance testing, staged forward feature
//!    selection, and rater-agreement metrics.
//! 6. **[`synth`]**: a seeded synthetic longitudinal cohort generator that
//!    stands in for the proprietary growth-study data and doubles as a
//!    ground-truth oracle for end-to-end tests.
//!
//! Everything here is deterministic under a fixed seed: RNG streams are
//! derived per unit of work (subject, repeat, fold, tree) so results do not
//! depend on evaluation order.
//!
//! The crate is `no_std`-compatible (requires `alloc`); file formats, the CLI
//! and plots live in the companion `cephalo-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod augment;
pub mod eval;
pub mod features;
pub mod geometry;
pub mod models;
pub mod rng;
pub mod stats;
pub mod synth;

pub use features::{GrowthClass, GrowthLabel};
pub use geometry::{Cephalogram, Landmark, LandmarkRegistry, Point};
