//! Iterative elimination of items that fall outside the fair-item consensus.
//!
//! Fair items have distances clustered around zero; unfair items pile up at
//! the negative end. Each round fits every surviving item against totals
//! recomputed over the survivors, derives a cutoff `d_f` from the spread of
//! the distances, and removes every item with `d < -d_f`. The loop stops
//! when a round removes nothing.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{NormalizedMatrix, ScoreMatrix};
use crate::regression::{fit_all, FitError, ItemPoint};
use crate::stats::{mad, median};

/// Scale factor turning a MAD into a consistent estimate of a normal
/// standard deviation.
pub const MAD_NORMAL_SCALE: f64 = 1.4826;

/// The smallest item set a cutoff can be derived from.
pub const MIN_CONSENSUS_ITEMS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffRule {
    /// `max(floor, multiplier * 1.4826 * MAD(d))`.
    MadScaled,
    /// A constant `d_f`.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusConfig {
    pub cutoff_rule: CutoffRule,
    pub mad_multiplier: f64,
    pub cutoff_floor: f64,
    pub fixed_cutoff: f64,
    /// Defaults to the number of items, which the loop can never exceed.
    pub max_iterations: Option<usize>,
}

impl Default for ConsensusConfig {
    fn default() -> Self {
        Self {
            cutoff_rule: CutoffRule::MadScaled,
            mad_multiplier: 3.0,
            cutoff_floor: 0.1,
            fixed_cutoff: 0.2,
            max_iterations: None,
        }
    }
}

impl ConsensusConfig {
    pub fn fixed(cutoff: f64) -> Self {
        Self {
            cutoff_rule: CutoffRule::Fixed,
            fixed_cutoff: cutoff,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConsensusError> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConsensusError::InvalidConfig(name))
            }
        };
        positive("mad_multiplier", self.mad_multiplier)?;
        positive("cutoff_floor", self.cutoff_floor)?;
        positive("fixed_cutoff", self.fixed_cutoff)?;
        if self.max_iterations == Some(0) {
            return Err(ConsensusError::InvalidConfig("max_iterations"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConsensusError {
    #[error("consensus needs at least {MIN_CONSENSUS_ITEMS} items, found {0}")]
    TooFewItems(usize),
    #[error("invalid consensus configuration: `{0}` must be positive")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("consensus collapsed: only {remaining} item(s) left after elimination")]
    Collapse { remaining: usize },
    #[error("unknown item id `{0}`")]
    UnknownItem(String),
    #[error("no fair items to score")]
    EmptyFairSet,
}

/// Cutoff `d_f > 0` for one round of elimination.
pub fn find_cutoff(distances: &[f64], cfg: &ConsensusConfig) -> Result<f64, ConsensusError> {
    cfg.validate()?;
    if distances.len() < MIN_CONSENSUS_ITEMS {
        return Err(ConsensusError::TooFewItems(distances.len()));
    }
    Ok(match cfg.cutoff_rule {
        CutoffRule::Fixed => cfg.fixed_cutoff,
        CutoffRule::MadScaled => {
            let spread = cfg.mad_multiplier * MAD_NORMAL_SCALE * mad(distances);
            spread.max(cfg.cutoff_floor)
        }
    })
}

/// One elimination round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Iteration {
    /// 1-based round number.
    pub index: usize,
    pub d_f: f64,
    /// Median distance of the round, for reference.
    pub median_d: f64,
    pub points: Vec<ItemPoint>,
    pub removed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfairItem {
    pub id: String,
    pub b0: f64,
    pub b1: f64,
    /// Distance in the round that removed the item.
    pub d: f64,
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub config: ConsensusConfig,
    pub iterations: Vec<Iteration>,
    /// Surviving items in original column order.
    pub fair_items: Vec<String>,
    /// Removed items, by round and then by column order.
    pub unfair_items: Vec<UnfairItem>,
    /// Normalized totals recomputed over the fair items.
    pub final_totals: Vec<f64>,
}

impl AnalysisResult {
    /// The point and cutoff from the last round the item took part in.
    pub fn decisive_point(&self, item_id: &str) -> Option<(&ItemPoint, f64)> {
        self.iterations.iter().rev().find_map(|it| {
            it.points
                .iter()
                .find(|p| p.item_id == item_id)
                .map(|p| (p, it.d_f))
        })
    }

    pub fn is_unfair(&self, item_id: &str) -> bool {
        self.unfair_items.iter().any(|u| u.id == item_id)
    }

    /// Sum of positive distances over every item in the first round.
    pub fn sum_positive_distances_before(&self) -> f64 {
        self.iterations
            .first()
            .map(|it| positive_sum(it.points.iter()))
            .unwrap_or(0.0)
    }

    /// Sum of positive distances over the fair items in the last round.
    pub fn sum_positive_distances_after(&self) -> f64 {
        self.iterations
            .last()
            .map(|it| {
                positive_sum(
                    it.points
                        .iter()
                        .filter(|p| !it.removed.contains(&p.item_id)),
                )
            })
            .unwrap_or(0.0)
    }
}

fn positive_sum<'a>(points: impl Iterator<Item = &'a ItemPoint>) -> f64 {
    points.map(|p| p.d.max(0.0)).sum()
}

/// Runs the elimination loop over every item of `m`.
pub fn detect_unfair(
    m: &NormalizedMatrix,
    cfg: &ConsensusConfig,
) -> Result<AnalysisResult, ConsensusError> {
    cfg.validate()?;
    let n = m.n_items();
    if n < MIN_CONSENSUS_ITEMS {
        return Err(ConsensusError::TooFewItems(n));
    }
    let max_iterations = cfg.max_iterations.unwrap_or(n);
    let mut surviving: Vec<usize> = (0..n).collect();
    let mut iterations = Vec::new();
    let mut unfair_items = Vec::new();

    loop {
        let points = fit_all(m, &surviving)?;
        let distances: Vec<f64> = points.iter().map(|p| p.d).collect();
        let d_f = find_cutoff(&distances, cfg)?;
        let mut keep = Vec::with_capacity(surviving.len());
        let mut removed = Vec::new();
        for (&item, p) in surviving.iter().zip(&points) {
            // Exactly -d_f stays fair.
            if p.d < -d_f {
                removed.push(p.item_id.clone());
                unfair_items.push(UnfairItem {
                    id: p.item_id.clone(),
                    b0: p.b0,
                    b1: p.b1,
                    d: p.d,
                    iteration: iterations.len() + 1,
                });
            } else {
                keep.push(item);
            }
        }
        let done = removed.is_empty();
        iterations.push(Iteration {
            index: iterations.len() + 1,
            d_f,
            median_d: median(&distances),
            points,
            removed,
        });
        surviving = keep;
        if done || iterations.len() >= max_iterations {
            break;
        }
        if surviving.len() < MIN_CONSENSUS_ITEMS {
            return Err(ConsensusError::Collapse {
                remaining: surviving.len(),
            });
        }
    }

    if surviving.is_empty() {
        return Err(ConsensusError::Collapse { remaining: 0 });
    }
    Ok(AnalysisResult {
        config: cfg.clone(),
        iterations,
        fair_items: surviving.iter().map(|&i| m.item_ids()[i].clone()).collect(),
        unfair_items,
        final_totals: m.subset_totals(&surviving),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescoredExaminee {
    pub examinee_id: String,
    /// Sum of raw scores over the fair items.
    pub score: f64,
    /// Sum of the fair items' maxima.
    pub max_score: f64,
    pub percent: f64,
}

/// Final raw-weighted scores over the fair items.
pub fn rescore(
    raw: &ScoreMatrix,
    fair_items: &[String],
) -> Result<Vec<RescoredExaminee>, ConsensusError> {
    if fair_items.is_empty() {
        return Err(ConsensusError::EmptyFairSet);
    }
    let columns = fair_items
        .iter()
        .map(|id| {
            raw.item_index(id)
                .ok_or_else(|| ConsensusError::UnknownItem(id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let max_score: f64 = columns.iter().map(|&i| raw.max_scores()[i]).sum();
    Ok((0..raw.n_examinees())
        .map(|k| {
            let row = raw.row(k);
            let score: f64 = columns.iter().map(|&i| row[i]).sum();
            RescoredExaminee {
                examinee_id: raw.examinee_ids()[k].clone(),
                score,
                max_score,
                percent: 100.0 * score / max_score,
            }
        })
        .collect())
}
