//! Person-by-item score matrices and their normalized form.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Violations of the score-matrix invariants. Positions are zero-based
/// examinee (row) and item (column) indices into the grid.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("need at least 2 examinees, found {0}")]
    TooFewExaminees(usize),
    #[error("need at least 2 items, found {0}")]
    TooFewItems(usize),
    #[error("score grid has {found} cells, expected {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("{found} maximum scores given for {expected} items")]
    MaxScoreCount { expected: usize, found: usize },
    #[error("duplicate examinee id `{id}` at examinee {index}")]
    DuplicateExaminee { index: usize, id: String },
    #[error("duplicate item id `{id}` at item {index}")]
    DuplicateItem { index: usize, id: String },
    #[error("maximum score {value} of item {item} must be positive and finite")]
    InvalidMaxScore { item: usize, value: f64 },
    #[error("score at examinee {examinee}, item {item} is not a finite number")]
    NonFinite { examinee: usize, item: usize },
    #[error("score {value} at examinee {examinee}, item {item} is negative")]
    NegativeScore {
        examinee: usize,
        item: usize,
        value: f64,
    },
    #[error("score {value} at examinee {examinee}, item {item} exceeds item maximum {max}")]
    ScoreAboveMax {
        examinee: usize,
        item: usize,
        value: f64,
        max: f64,
    },
    #[error("normalized entry {value} at examinee {examinee}, item {item} is outside [0, 1]")]
    OutOfUnitRange {
        examinee: usize,
        item: usize,
        value: f64,
    },
}

fn check_ids(
    ids: &[String],
    dup: impl Fn(usize, String) -> MatrixError,
) -> Result<(), MatrixError> {
    let mut seen = BTreeSet::new();
    for (index, id) in ids.iter().enumerate() {
        if !seen.insert(id.as_str()) {
            return Err(dup(index, id.clone()));
        }
    }
    Ok(())
}

fn check_shape(
    examinee_ids: &[String],
    item_ids: &[String],
    cells: usize,
) -> Result<(), MatrixError> {
    if examinee_ids.len() < 2 {
        return Err(MatrixError::TooFewExaminees(examinee_ids.len()));
    }
    if item_ids.len() < 2 {
        return Err(MatrixError::TooFewItems(item_ids.len()));
    }
    let expected = examinee_ids.len() * item_ids.len();
    if cells != expected {
        return Err(MatrixError::ShapeMismatch {
            expected,
            found: cells,
        });
    }
    check_ids(examinee_ids, |index, id| MatrixError::DuplicateExaminee {
        index,
        id,
    })?;
    check_ids(item_ids, |index, id| MatrixError::DuplicateItem {
        index,
        id,
    })
}

/// Raw scores, one row per examinee, one column per item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    examinee_ids: Vec<String>,
    item_ids: Vec<String>,
    /// Row-major `K x N` grid.
    scores: Vec<f64>,
    max_scores: Vec<f64>,
}

impl ScoreMatrix {
    /// Builds a validated matrix from a row-major score grid.
    pub fn new(
        examinee_ids: Vec<String>,
        item_ids: Vec<String>,
        scores: Vec<f64>,
        max_scores: Vec<f64>,
    ) -> Result<Self, MatrixError> {
        check_shape(&examinee_ids, &item_ids, scores.len())?;
        let n = item_ids.len();
        if max_scores.len() != n {
            return Err(MatrixError::MaxScoreCount {
                expected: n,
                found: max_scores.len(),
            });
        }
        for (item, &value) in max_scores.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(MatrixError::InvalidMaxScore { item, value });
            }
        }
        for (cell, &value) in scores.iter().enumerate() {
            let (examinee, item) = (cell / n, cell % n);
            if !value.is_finite() {
                return Err(MatrixError::NonFinite { examinee, item });
            }
            if value < 0.0 {
                return Err(MatrixError::NegativeScore {
                    examinee,
                    item,
                    value,
                });
            }
            if value > max_scores[item] {
                return Err(MatrixError::ScoreAboveMax {
                    examinee,
                    item,
                    value,
                    max: max_scores[item],
                });
            }
        }
        Ok(Self {
            examinee_ids,
            item_ids,
            scores,
            max_scores,
        })
    }

    /// Dichotomous matrix with every item maximum equal to 1.
    pub fn dichotomous(
        examinee_ids: Vec<String>,
        item_ids: Vec<String>,
        scores: Vec<f64>,
    ) -> Result<Self, MatrixError> {
        let max_scores = alloc::vec![1.0; item_ids.len()];
        Self::new(examinee_ids, item_ids, scores, max_scores)
    }

    pub fn n_examinees(&self) -> usize {
        self.examinee_ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn examinee_ids(&self) -> &[String] {
        &self.examinee_ids
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn max_scores(&self) -> &[f64] {
        &self.max_scores
    }

    pub fn score(&self, examinee: usize, item: usize) -> f64 {
        self.scores[examinee * self.n_items() + item]
    }

    pub fn row(&self, examinee: usize) -> &[f64] {
        let n = self.n_items();
        &self.scores[examinee * n..(examinee + 1) * n]
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.item_ids.iter().position(|x| x == id)
    }
}

/// Scores divided by their item maxima, with per-examinee normalized totals.
///
/// `totals[k]` is the mean of row `k` over all items, so `100 * g` is the
/// examinee's percentage score on an equally weighted test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedMatrix {
    examinee_ids: Vec<String>,
    item_ids: Vec<String>,
    entries: Vec<f64>,
    totals: Vec<f64>,
}

impl NormalizedMatrix {
    /// Builds a normalized matrix directly from entries in `[0, 1]`.
    pub fn from_entries(
        examinee_ids: Vec<String>,
        item_ids: Vec<String>,
        entries: Vec<f64>,
    ) -> Result<Self, MatrixError> {
        check_shape(&examinee_ids, &item_ids, entries.len())?;
        let n = item_ids.len();
        for (cell, &value) in entries.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(MatrixError::OutOfUnitRange {
                    examinee: cell / n,
                    item: cell % n,
                    value,
                });
            }
        }
        let totals = row_means(&entries, n, None);
        Ok(Self {
            examinee_ids,
            item_ids,
            entries,
            totals,
        })
    }

    pub fn n_examinees(&self) -> usize {
        self.examinee_ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn examinee_ids(&self) -> &[String] {
        &self.examinee_ids
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entry(&self, examinee: usize, item: usize) -> f64 {
        self.entries[examinee * self.n_items() + item]
    }

    pub fn row(&self, examinee: usize) -> &[f64] {
        let n = self.n_items();
        &self.entries[examinee * n..(examinee + 1) * n]
    }

    pub fn column(&self, item: usize) -> Vec<f64> {
        (0..self.n_examinees())
            .map(|k| self.entry(k, item))
            .collect()
    }

    /// Normalized totals over all items.
    pub fn totals(&self) -> &[f64] {
        &self.totals
    }

    /// Normalized totals recomputed over a subset of items: the row sum over
    /// `items` divided by `items.len()`.
    pub fn subset_totals(&self, items: &[usize]) -> Vec<f64> {
        row_means(&self.entries, self.n_items(), Some(items))
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.item_ids.iter().position(|x| x == id)
    }

    /// Copy restricted to (and ordered by) the given item columns.
    pub fn select_items(&self, items: &[usize]) -> Result<Self, MatrixError> {
        let item_ids = items.iter().map(|&i| self.item_ids[i].clone()).collect();
        let mut entries = Vec::with_capacity(self.n_examinees() * items.len());
        for k in 0..self.n_examinees() {
            let row = self.row(k);
            entries.extend(items.iter().map(|&i| row[i]));
        }
        Self::from_entries(self.examinee_ids.clone(), item_ids, entries)
    }

    /// Stacks matrices that share the same item columns. Examinee ids are
    /// prefixed with `label:` so they stay unique in the stacked matrix.
    pub fn stack(parts: &[(&str, &NormalizedMatrix)]) -> Result<Self, MatrixError> {
        let item_ids = parts
            .first()
            .map(|(_, m)| m.item_ids.clone())
            .unwrap_or_default();
        let mut examinee_ids = Vec::new();
        let mut entries = Vec::new();
        for (label, m) in parts {
            if m.item_ids != item_ids {
                return Err(MatrixError::ShapeMismatch {
                    expected: item_ids.len(),
                    found: m.n_items(),
                });
            }
            examinee_ids.extend(
                m.examinee_ids
                    .iter()
                    .map(|id| alloc::format!("{label}:{id}")),
            );
            entries.extend_from_slice(&m.entries);
        }
        Self::from_entries(examinee_ids, item_ids, entries)
    }
}

fn row_means(entries: &[f64], n: usize, items: Option<&[usize]>) -> Vec<f64> {
    entries
        .chunks_exact(n)
        .map(|row| match items {
            Some(items) => items.iter().map(|&i| row[i]).sum::<f64>() / items.len() as f64,
            None => row.iter().sum::<f64>() / n as f64,
        })
        .collect()
}

/// Divides every score by its item maximum and computes normalized totals.
pub fn normalize(m: &ScoreMatrix) -> NormalizedMatrix {
    let n = m.n_items();
    let entries: Vec<f64> = m
        .scores
        .iter()
        .enumerate()
        .map(|(cell, &s)| s / m.max_scores[cell % n])
        .collect();
    let totals = row_means(&entries, n, None);
    NormalizedMatrix {
        examinee_ids: m.examinee_ids.clone(),
        item_ids: m.item_ids.clone(),
        entries,
        totals,
    }
}

/// Normalized totals `g_k` in examinee order.
pub fn total_scores(m: &NormalizedMatrix) -> Vec<f64> {
    m.totals.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn ids(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| alloc::format!("{prefix}{i}")).collect()
    }

    #[test]
    fn partial_credit_normalizes_by_item_maximum() {
        let m = ScoreMatrix::new(
            ids("s", 2),
            ids("i", 2),
            vec![2.0, 1.0, 1.0, 0.0],
            vec![5.0, 1.0],
        )
        .unwrap();
        let nm = normalize(&m);
        assert_eq!(nm.entry(0, 0), 0.4);
        assert_eq!(nm.entry(1, 0), 0.2);
        assert_eq!(nm.entry(0, 1), 1.0);
        assert!((nm.totals()[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn mean_of_row() {
        let m = ScoreMatrix::dichotomous(
            ids("s", 2),
            ids("i", 4),
            vec![1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        assert_eq!(total_scores(&normalize(&m)), vec![0.75, 1.0]);
    }

    #[test]
    fn equally_weighted_forty_item_exam_tops_out_at_100_percent() {
        let scores = vec![2.5; 80];
        let m = ScoreMatrix::new(ids("s", 2), ids("i", 40), scores, vec![2.5; 40]).unwrap();
        let g = normalize(&m).totals()[0];
        assert_eq!(g, 1.0);
        assert_eq!(100.0 * g, 100.0);
    }

    #[test]
    fn dichotomous_passthrough_is_idempotent() {
        let raw = vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let m = ScoreMatrix::dichotomous(ids("s", 3), ids("i", 2), raw.clone()).unwrap();
        let nm = normalize(&m);
        assert_eq!(nm.entries(), &raw[..]);
        let again = ScoreMatrix::dichotomous(ids("s", 3), ids("i", 2), nm.entries().to_vec())
            .map(|m| normalize(&m))
            .unwrap();
        assert_eq!(again, nm);
    }

    #[test]
    fn invariant_violations_are_rejected() {
        assert_eq!(
            ScoreMatrix::dichotomous(ids("s", 1), ids("i", 2), vec![1.0, 0.0]),
            Err(MatrixError::TooFewExaminees(1))
        );
        assert_eq!(
            ScoreMatrix::dichotomous(ids("s", 2), ids("i", 1), vec![1.0, 0.0]),
            Err(MatrixError::TooFewItems(1))
        );
        assert!(matches!(
            ScoreMatrix::dichotomous(
                vec!["a".to_string(), "a".to_string()],
                ids("i", 2),
                vec![0.0; 4]
            ),
            Err(MatrixError::DuplicateExaminee { index: 1, .. })
        ));
        assert!(matches!(
            ScoreMatrix::dichotomous(ids("s", 2), ids("i", 2), vec![0.0, 2.0, 0.0, 0.0]),
            Err(MatrixError::ScoreAboveMax {
                examinee: 0,
                item: 1,
                ..
            })
        ));
        assert!(matches!(
            ScoreMatrix::new(ids("s", 2), ids("i", 2), vec![0.0; 4], vec![1.0, 0.0]),
            Err(MatrixError::InvalidMaxScore { item: 1, .. })
        ));
        assert!(matches!(
            ScoreMatrix::dichotomous(ids("s", 2), ids("i", 2), vec![0.0, 0.0, -1.0, 0.0]),
            Err(MatrixError::NegativeScore {
                examinee: 1,
                item: 0,
                ..
            })
        ));
    }

    #[test]
    fn subset_totals_use_subset_size() {
        let nm = NormalizedMatrix::from_entries(
            ids("s", 2),
            ids("i", 3),
            vec![1.0, 0.0, 1.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        assert_eq!(nm.subset_totals(&[0, 2]), vec![1.0, 0.5]);
        assert_eq!(nm.subset_totals(&[1]), vec![0.0, 0.0]);
    }
}
