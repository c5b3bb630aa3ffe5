//! Side-by-side item distances for several groups sitting the same test,
//! plus the pooled cohort.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consensus::{detect_unfair, AnalysisResult, ConsensusConfig, ConsensusError};
use crate::matrix::{MatrixError, NormalizedMatrix};

pub const POOLED_LABEL: &str = "all groups";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("need at least 2 groups, found {0}")]
    TooFewGroups(usize),
    #[error("group label `{0}` is used twice")]
    DuplicateLabel(String),
    #[error("group `{0}` does not have the same item ids as the other groups")]
    MismatchedItems(String),
    #[error("group `{label}`: {source}")]
    Consensus {
        label: String,
        source: ConsensusError,
    },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCell {
    pub item_id: String,
    pub d: f64,
    /// The item was flagged unfair in this row's analysis.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub label: String,
    pub cells: Vec<GroupCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    /// Items flagged in at least one group, in column order.
    pub item_ids: Vec<String>,
    /// One row per group, in the order given.
    pub rows: Vec<GroupRow>,
    pub pooled: GroupRow,
}

fn row(label: &str, result: &AnalysisResult, item_ids: &[String]) -> GroupRow {
    GroupRow {
        label: label.into(),
        cells: item_ids
            .iter()
            .map(|id| GroupCell {
                item_id: id.clone(),
                d: result.decisive_point(id).map_or(f64::NAN, |(p, _)| p.d),
                flagged: result.is_unfair(id),
            })
            .collect(),
    }
}

/// Runs the consensus analysis per group and on the stacked cohort. The
/// pooled cohort is stacked in label order, so listing order does not affect
/// it.
pub fn compare_groups(
    groups: &[(String, NormalizedMatrix)],
    cfg: &ConsensusConfig,
) -> Result<GroupComparison, GroupError> {
    if groups.len() < 2 {
        return Err(GroupError::TooFewGroups(groups.len()));
    }
    let mut by_label: Vec<usize> = (0..groups.len()).collect();
    by_label.sort_by(|&a, &b| groups[a].0.cmp(&groups[b].0));
    for w in by_label.windows(2) {
        if groups[w[0]].0 == groups[w[1]].0 {
            return Err(GroupError::DuplicateLabel(groups[w[0]].0.clone()));
        }
    }

    let canonical: Vec<String> = groups[by_label[0]].1.item_ids().to_vec();
    let mut sorted_canonical = canonical.clone();
    sorted_canonical.sort();
    let aligned = groups
        .iter()
        .map(|(label, m)| {
            let mut ids = m.item_ids().to_vec();
            ids.sort();
            if ids != sorted_canonical {
                return Err(GroupError::MismatchedItems(label.clone()));
            }
            let order: Vec<usize> = canonical
                .iter()
                .map(|id| m.item_index(id).expect("id sets match"))
                .collect();
            Ok(m.select_items(&order)?)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let analyse = |label: &str, m: &NormalizedMatrix| {
        detect_unfair(m, cfg).map_err(|source| GroupError::Consensus {
            label: label.into(),
            source,
        })
    };
    let results = groups
        .iter()
        .zip(&aligned)
        .map(|((label, _), m)| analyse(label, m))
        .collect::<Result<Vec<_>, _>>()?;

    let parts: Vec<(&str, &NormalizedMatrix)> = by_label
        .iter()
        .map(|&g| (groups[g].0.as_str(), &aligned[g]))
        .collect();
    let pooled_matrix = NormalizedMatrix::stack(&parts)?;
    let pooled = analyse(POOLED_LABEL, &pooled_matrix)?;

    let item_ids: Vec<String> = canonical
        .iter()
        .filter(|id| results.iter().any(|r| r.is_unfair(id)))
        .cloned()
        .collect();
    Ok(GroupComparison {
        rows: groups
            .iter()
            .zip(&results)
            .map(|((label, _), r)| row(label, r, &item_ids))
            .collect(),
        pooled: row(POOLED_LABEL, &pooled, &item_ids),
        item_ids,
    })
}
