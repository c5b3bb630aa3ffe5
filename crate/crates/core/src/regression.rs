//! Per-item least-squares lines `p(g) = b0 + b1 * g` and their signed
//! distance from the ideal line `b0 + b1 - 1 = 0`.
//!
//! The fit runs over individual examinees. That is the same as regressing
//! the proportion correct of each score group on `g` with weights equal to
//! the group sizes, and it makes the averaged coefficients over all items of
//! a test exactly `(0, 1)`.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::NormalizedMatrix;
use crate::stats::{centered_moments, mean};

/// Totals whose range is at most this wide are treated as tied.
pub const TIED_TOTALS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("need at least 2 examinees to fit a line, found {0}")]
    TooFewExaminees(usize),
    #[error("item column has {column} values but there are {totals} totals")]
    LengthMismatch { column: usize, totals: usize },
    #[error("degenerate cohort: every examinee has the same total score")]
    DegenerateCohort,
    #[error("item subset is empty")]
    EmptySubset,
    #[error("item index {0} is out of range")]
    UnknownItem(usize),
}

/// One item's position in the `b0`-`b1` plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemPoint {
    pub item_id: String,
    pub b0: f64,
    pub b1: f64,
    /// `(b0 + b1 - 1) / sqrt(2)`; negative below the ideal line.
    pub d: f64,
    pub mean_item_score: f64,
    pub n_examinees: usize,
    /// Mean squared residual of the fitted line. Informational only.
    pub residual_variance: f64,
}

/// Signed distance from `(b0, b1)` to the ideal line.
pub fn distance(b0: f64, b1: f64) -> f64 {
    (b0 + b1 - 1.0) / core::f64::consts::SQRT_2
}

fn check_inputs(column: &[f64], totals: &[f64]) -> Result<(), FitError> {
    if column.len() != totals.len() {
        return Err(FitError::LengthMismatch {
            column: column.len(),
            totals: totals.len(),
        });
    }
    if totals.len() < 2 {
        return Err(FitError::TooFewExaminees(totals.len()));
    }
    let (lo, hi) = totals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| {
            (lo.min(g), hi.max(g))
        });
    if hi - lo <= TIED_TOTALS_TOLERANCE {
        return Err(FitError::DegenerateCohort);
    }
    Ok(())
}

/// Ordinary least squares of an item column on the totals: returns
/// `(b0, b1)` with `b1 = cov(x, g) / var(g)` and `b0 = mean(x) - b1 * mean(g)`.
pub fn fit_item(column: &[f64], totals: &[f64]) -> Result<(f64, f64), FitError> {
    check_inputs(column, totals)?;
    let (sgg, _, sgx) = centered_moments(totals, column);
    let b1 = sgx / sgg;
    let b0 = mean(column) - b1 * mean(totals);
    Ok((b0, b1))
}

fn fit_point(item_id: &str, column: &[f64], totals: &[f64]) -> Result<ItemPoint, FitError> {
    check_inputs(column, totals)?;
    let (sgg, sxx, sgx) = centered_moments(totals, column);
    let b1 = sgx / sgg;
    let mean_item_score = mean(column);
    let b0 = mean_item_score - b1 * mean(totals);
    let residual_variance = ((sxx - b1 * sgx) / column.len() as f64).max(0.0);
    Ok(ItemPoint {
        item_id: item_id.into(),
        b0,
        b1,
        d: distance(b0, b1),
        mean_item_score,
        n_examinees: column.len(),
        residual_variance,
    })
}

/// Fits every item in `items` against the totals recomputed over `items`
/// alone. Points come back in the order of `items`.
pub fn fit_all(m: &NormalizedMatrix, items: &[usize]) -> Result<Vec<ItemPoint>, FitError> {
    if items.is_empty() {
        return Err(FitError::EmptySubset);
    }
    if let Some(&bad) = items.iter().find(|&&i| i >= m.n_items()) {
        return Err(FitError::UnknownItem(bad));
    }
    let totals = m.subset_totals(items);
    items
        .iter()
        .map(|&i| fit_point(&m.item_ids()[i], &m.column(i), &totals))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const G4: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

    #[test]
    fn trivial_and_all_wrong_items() {
        assert_eq!(fit_item(&[1.0; 4], &G4).unwrap(), (1.0, 0.0));
        assert_eq!(fit_item(&[0.0; 4], &G4).unwrap(), (0.0, 0.0));
        assert_eq!(distance(1.0, 0.0), 0.0);
        assert!((distance(0.0, 0.0) + core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn self_regression_is_the_identity_line() {
        let g = [0.1, 0.35, 0.4, 0.8, 0.95];
        let (b0, b1) = fit_item(&g, &g).unwrap();
        assert!(b0.abs() < 1e-15 && (b1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn four_point_example() {
        // Hand-computed: Sgg = 0.3125, Sgx = 0.5.
        let (b0, b1) = fit_item(&[0.0, 0.0, 1.0, 1.0], &G4).unwrap();
        assert!((b1 - 1.6).abs() < 1e-14);
        assert!((b0 + 0.5).abs() < 1e-14);
        assert!((distance(b0, b1) - 0.1 / core::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn tied_totals_are_degenerate() {
        assert_eq!(
            fit_item(&[0.0, 1.0, 1.0], &[0.5; 3]),
            Err(FitError::DegenerateCohort)
        );
        assert_eq!(fit_item(&[1.0], &[0.5]), Err(FitError::TooFewExaminees(1)));
        assert!(matches!(
            fit_item(&[1.0, 0.0], &[0.5, 0.2, 0.1]),
            Err(FitError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn ideal_exam_points_sit_at_zero_one() {
        let ids = |p: &str, n: usize| (0..n).map(|i| alloc::format!("{p}{i}")).collect();
        let mut entries = vec![];
        for g in [0.0, 0.25, 0.5, 1.0] {
            entries.extend([g; 3]);
        }
        let m = NormalizedMatrix::from_entries(ids("s", 4), ids("i", 3), entries).unwrap();
        for p in fit_all(&m, &[0, 1, 2]).unwrap() {
            assert!(p.b0.abs() < 1e-15 && (p.b1 - 1.0).abs() < 1e-15 && p.d.abs() < 1e-15);
            assert!(p.residual_variance < 1e-15);
        }
        assert_eq!(fit_all(&m, &[]), Err(FitError::EmptySubset));
        assert_eq!(fit_all(&m, &[5]), Err(FitError::UnknownItem(5)));
    }
}
