//! Item-fairness analysis for educational tests.
//!
//! Every item is represented by the coefficients `(b0, b1)` of the least-squares
//! line regressing its normalized score on the examinee's normalized total
//! score `g`. Fair items sit on the ideal line `b0 + b1 = 1` (an examinee with
//! `g = 1` answers them correctly); the signed distance
//! `d = (b0 + b1 - 1) / sqrt(2)` measures unfairness, negative on the unfair
//! side. [`consensus::detect_unfair`] removes items that fall outside the
//! fair-item consensus and repeats until the item set is stable.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing, reports and the
//! command-line tool live in the `itemfair` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod classic;
pub mod consensus;
pub mod groups;
pub mod irtgen;
pub mod matrix;
pub mod regression;
mod stats;

pub use classic::{
    classify_region, difficulty_profile, item_total_correlation, DifficultyBand, DifficultyBands,
    DifficultyEntry, ItemClassicStats, RegionLabel,
};
pub use consensus::{
    detect_unfair, find_cutoff, rescore, AnalysisResult, ConsensusConfig, ConsensusError,
    CutoffRule, Iteration, RescoredExaminee, UnfairItem,
};
pub use groups::{compare_groups, GroupCell, GroupComparison, GroupError, GroupRow};
pub use irtgen::{
    generate, icc, lords_paradox_check, CohortSpec, CrossingReport, GeneratedExam, IrtItem,
    ThetaDistribution, Truth,
};
pub use matrix::{normalize, total_scores, MatrixError, NormalizedMatrix, ScoreMatrix};
pub use regression::{distance, fit_all, fit_item, FitError, ItemPoint};
