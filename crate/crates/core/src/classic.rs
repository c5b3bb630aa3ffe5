//! Classical item statistics and the region classification that contrasts
//! the negative item-total correlation rule with the ideal-line distance.

use alloc::string::String;
use alloc::vec::Vec;

use libm::sqrt;
use serde::{Deserialize, Serialize};

use crate::regression::ItemPoint;
use crate::stats::{centered_moments, mean};

/// Pearson correlation between an item column and the totals. `None` when
/// either vector is constant (a trivial item has no discrimination).
pub fn item_total_correlation(column: &[f64], totals: &[f64]) -> Option<f64> {
    if column.len() != totals.len() || column.len() < 2 {
        return None;
    }
    let (sxx, sgg, sxg) = centered_moments(column, totals);
    if sxx <= 0.0 || sgg <= 0.0 {
        return None;
    }
    Some((sxg / sqrt(sxx * sgg)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemClassicStats {
    pub item_id: String,
    pub r: Option<f64>,
    /// Mean proportion of the item maximum attained.
    pub p_value: f64,
    /// Population standard deviation of the item column.
    pub s_p: f64,
    /// Population standard deviation of the totals.
    pub s_g: f64,
    /// Regression slope, `r * s_p / s_g` when `r` is defined.
    pub b1_difficulty: f64,
}

impl ItemClassicStats {
    pub fn compute(item_id: &str, column: &[f64], totals: &[f64]) -> Self {
        let k = column.len() as f64;
        let (sxx, sgg, sxg) = centered_moments(column, totals);
        Self {
            item_id: item_id.into(),
            r: item_total_correlation(column, totals),
            p_value: mean(column),
            s_p: sqrt(sxx / k),
            s_g: sqrt(sgg / k),
            b1_difficulty: if sgg > 0.0 { sxg / sgg } else { f64::NAN },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    Fair,
    /// Below the cutoff line but with non-negative correlation.
    ProposedOnly,
    Both,
    /// Negative correlation while near the ideal line.
    TraditionalOnly,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::Fair => "fair",
            RegionLabel::ProposedOnly => "proposed_only",
            RegionLabel::Both => "both",
            RegionLabel::TraditionalOnly => "traditional_only",
        }
    }
}

pub fn classify_region(point: &ItemPoint, r: Option<f64>, d_f: f64) -> RegionLabel {
    let proposed = point.d < -d_f;
    let traditional = matches!(r, Some(r) if r < 0.0);
    match (proposed, traditional) {
        (true, true) => RegionLabel::Both,
        (true, false) => RegionLabel::ProposedOnly,
        (false, true) => RegionLabel::TraditionalOnly,
        (false, false) => RegionLabel::Fair,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifficultyBand {
    TrivialOrEasy,
    Moderate,
    Hard,
}

/// Slope thresholds separating the difficulty bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifficultyBands {
    pub easy_below: f64,
    pub hard_from: f64,
}

impl Default for DifficultyBands {
    fn default() -> Self {
        Self {
            easy_below: 0.5,
            hard_from: 1.5,
        }
    }
}

impl DifficultyBands {
    pub fn band(&self, b1: f64) -> DifficultyBand {
        if b1 < self.easy_below {
            DifficultyBand::TrivialOrEasy
        } else if b1 < self.hard_from {
            DifficultyBand::Moderate
        } else {
            DifficultyBand::Hard
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultyEntry {
    pub item_id: String,
    pub b1: f64,
    pub band: DifficultyBand,
}

/// Items ordered from easiest to hardest by slope.
pub fn difficulty_profile(points: &[ItemPoint], bands: &DifficultyBands) -> Vec<DifficultyEntry> {
    let mut out: Vec<DifficultyEntry> = points
        .iter()
        .map(|p| DifficultyEntry {
            item_id: p.item_id.clone(),
            b1: p.b1,
            band: bands.band(p.b1),
        })
        .collect();
    out.sort_by(|a, b| a.b1.total_cmp(&b.b1));
    out
}
