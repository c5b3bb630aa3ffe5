//! JSON and text reports.

use std::fmt::Write as _;

use itemfair_core::classic::{DifficultyBand, DifficultyBands};
use itemfair_core::groups::GroupComparison;
use itemfair_core::{
    classify_region, detect_unfair, normalize, rescore, AnalysisResult, ConsensusConfig,
    ConsensusError, CutoffRule, ItemClassicStats, Iteration, RegionLabel, RescoredExaminee,
    ScoreMatrix, UnfairItem,
};
use serde::{Deserialize, Serialize};

/// Classical statistics and region for one item, computed against totals
/// over the full test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicEntry {
    pub id: String,
    pub r: Option<f64>,
    pub p_value: f64,
    pub s_p: f64,
    pub s_g: f64,
    pub b1: f64,
    pub band: DifficultyBand,
    pub region: RegionLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ConsensusConfig,
    pub n_examinees: usize,
    pub n_items: usize,
    pub iterations: Vec<Iteration>,
    pub fair_items: Vec<String>,
    pub unfair_items: Vec<UnfairItem>,
    pub classic: Vec<ClassicEntry>,
    pub rescored: Vec<RescoredExaminee>,
    pub sum_positive_distances_before: f64,
    pub sum_positive_distances_after: f64,
}

impl Report {
    pub fn build(raw: &ScoreMatrix, cfg: &ConsensusConfig) -> Result<Self, ConsensusError> {
        let nm = normalize(raw);
        let result = detect_unfair(&nm, cfg)?;
        let rescored = rescore(raw, &result.fair_items)?;
        let classic = classic_entries(&nm, &result);
        Ok(Self {
            config: cfg.clone(),
            n_examinees: raw.n_examinees(),
            n_items: raw.n_items(),
            sum_positive_distances_before: result.sum_positive_distances_before(),
            sum_positive_distances_after: result.sum_positive_distances_after(),
            iterations: result.iterations,
            fair_items: result.fair_items,
            unfair_items: result.unfair_items,
            classic,
            rescored,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let cfg = &self.config;
        let _ = writeln!(out, "Item fairness analysis");
        let _ = writeln!(
            out,
            "examinees: {}  items: {}",
            self.n_examinees, self.n_items
        );
        let _ = match cfg.cutoff_rule {
            CutoffRule::MadScaled => writeln!(
                out,
                "cutoff rule: mad (multiplier {}, floor {})",
                cfg.mad_multiplier, cfg.cutoff_floor
            ),
            CutoffRule::Fixed => writeln!(out, "cutoff rule: fixed d_f = {}", cfg.fixed_cutoff),
        };
        out.push('\n');
        for it in &self.iterations {
            let removed = if it.removed.is_empty() {
                "none".to_string()
            } else {
                it.removed.join(", ")
            };
            let _ = writeln!(
                out,
                "iteration {}: d_f = {:.3}, median d = {:.3}, removed: {}",
                it.index, it.d_f, it.median_d, removed
            );
        }
        out.push('\n');
        if self.unfair_items.is_empty() {
            let _ = writeln!(out, "unfair items: none");
        } else {
            let ids: Vec<&str> = self.unfair_items.iter().map(|u| u.id.as_str()).collect();
            let ds: Vec<String> = self
                .unfair_items
                .iter()
                .map(|u| format!("{:.2}", u.d))
                .collect();
            let _ = writeln!(out, "unfair items: {}", ids.join(", "));
            let _ = writeln!(out, "distances from the ideal line: {}", ds.join(", "));
        }
        let _ = writeln!(
            out,
            "sum of positive distances: {:.2} before elimination, {:.2} after",
            self.sum_positive_distances_before, self.sum_positive_distances_after
        );
        out.push('\n');
        let _ = writeln!(
            out,
            "{:<12} {:>8} {:>8} {:>8} {:>8} {:>8}  {:<16} band",
            "item", "b0", "b1", "d", "r", "p", "region"
        );
        for c in &self.classic {
            let point = self
                .iterations
                .iter()
                .rev()
                .find_map(|it| it.points.iter().find(|p| p.item_id == c.id));
            let (b0, b1, d) = point.map_or((f64::NAN, f64::NAN, f64::NAN), |p| (p.b0, p.b1, p.d));
            let r = c.r.map_or("undef".to_string(), |r| format!("{r:.3}"));
            let _ = writeln!(
                out,
                "{:<12} {:>8.3} {:>8.3} {:>8.3} {:>8} {:>8.3}  {:<16} {}",
                c.id,
                b0,
                b1,
                d,
                r,
                c.p_value,
                c.region.as_str(),
                band_name(c.band)
            );
        }
        out.push('\n');
        let _ = writeln!(out, "rescored over {} fair items:", self.fair_items.len());
        for r in &self.rescored {
            let _ = writeln!(
                out,
                "{:<12} {:>8} / {:<8} {:>7.2}%",
                r.examinee_id, r.score, r.max_score, r.percent
            );
        }
        out
    }
}

fn band_name(band: DifficultyBand) -> &'static str {
    match band {
        DifficultyBand::TrivialOrEasy => "trivial/easy",
        DifficultyBand::Moderate => "moderate",
        DifficultyBand::Hard => "hard",
    }
}

fn classic_entries(
    nm: &itemfair_core::NormalizedMatrix,
    result: &AnalysisResult,
) -> Vec<ClassicEntry> {
    let totals = nm.totals();
    let bands = DifficultyBands::default();
    nm.item_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let stats = ItemClassicStats::compute(id, &nm.column(i), totals);
            let (point, d_f) = result
                .decisive_point(id)
                .expect("every item is fitted in the first round");
            ClassicEntry {
                id: id.clone(),
                r: stats.r,
                p_value: stats.p_value,
                s_p: stats.s_p,
                s_g: stats.s_g,
                b1: point.b1,
                band: bands.band(point.b1),
                region: classify_region(point, stats.r, d_f),
            }
        })
        .collect()
}

pub fn groups_to_json(cmp: &GroupComparison) -> String {
    let mut s = serde_json::to_string_pretty(cmp).expect("comparison serializes");
    s.push('\n');
    s
}

/// Table layout: one row per group plus the pooled row; not-flagged cells
/// are wrapped in parentheses.
pub fn groups_to_text(cmp: &GroupComparison) -> String {
    let mut out = String::new();
    let width = cmp
        .rows
        .iter()
        .chain(std::iter::once(&cmp.pooled))
        .map(|r| r.label.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let _ = write!(out, "{:<width$}", "group");
    for id in &cmp.item_ids {
        let _ = write!(out, " {id:>9}");
    }
    out.push('\n');
    for row in cmp.rows.iter().chain(std::iter::once(&cmp.pooled)) {
        let _ = write!(out, "{:<width$}", row.label);
        for cell in &row.cells {
            let v = if cell.flagged {
                format!("{:.2}", cell.d)
            } else {
                format!("({:.2})", cell.d)
            };
            let _ = write!(out, " {v:>9}");
        }
        out.push('\n');
    }
    if cmp.item_ids.is_empty() {
        let _ = writeln!(out, "no item was flagged in any group");
    }
    out
}
