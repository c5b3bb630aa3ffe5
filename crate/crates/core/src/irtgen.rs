//! Synthetic exams drawn from the three-parameter logistic model, with
//! unfair items modelled by a ceiling on the probability of success.
//!
//! Responses are drawn from ChaCha8 seeded with the cohort seed; each
//! examinee row uses its own stream (stream index = row index), so a row
//! depends only on the seed, its index and the item list.

use alloc::string::String;
use alloc::vec::Vec;

use libm::exp;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{MatrixError, ScoreMatrix};

/// Logistic scaling constant.
pub const D: f64 = 1.701;

pub const RNG_ALGORITHM: &str =
    "ChaCha8Rng (rand_chacha 0.9), seed_from_u64(seed), stream = row index";

/// Rejection-sampling attempts for a truncated normal draw before falling
/// back to a uniform draw over the bounds.
const TRUNCATED_NORMAL_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrtItem {
    /// Discrimination.
    pub a: f64,
    /// Difficulty on the ability scale.
    pub b: f64,
    /// Pseudo-guessing.
    pub c: f64,
    /// Ceiling on the probability of success; below 1 marks an unfair item.
    #[serde(default = "unit_cap")]
    pub cap: f64,
}

fn unit_cap() -> f64 {
    1.0
}

impl IrtItem {
    pub fn new(a: f64, b: f64, c: f64, cap: f64) -> Result<Self, GenerateError> {
        let item = Self { a, b, c, cap };
        item.validate()
            .map_err(|reason| GenerateError::InvalidItem { index: 0, reason })?;
        Ok(item)
    }

    pub fn fair(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c, cap: 1.0 }
    }

    pub fn is_unfair(&self) -> bool {
        self.cap < 1.0
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err("discrimination a must be positive");
        }
        if !self.b.is_finite() {
            return Err("difficulty b must be finite");
        }
        if !(0.0..1.0).contains(&self.c) {
            return Err("guessing c must lie in [0, 1)");
        }
        if !(0.0..=1.0).contains(&self.cap) {
            return Err("cap must lie in [0, 1]");
        }
        if self.cap > 0.0 && self.c >= self.cap {
            return Err("guessing c must be below cap");
        }
        Ok(())
    }
}

/// Probability of success at ability `theta`:
/// `cap * (c + (1 - c) / (1 + exp(-D * a * (theta - b))))`.
pub fn icc(theta: f64, item: &IrtItem) -> f64 {
    let logistic = 1.0 / (1.0 + exp(-D * item.a * (theta - item.b)));
    item.cap * (item.c + (1.0 - item.c) * logistic)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaDistribution {
    Uniform,
    /// Standard normal truncated to the ability bounds.
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub n_examinees: usize,
    pub theta_low: f64,
    pub theta_high: f64,
    pub distribution: ThetaDistribution,
    pub seed: u64,
}

impl CohortSpec {
    pub fn new(n_examinees: usize, distribution: ThetaDistribution, seed: u64) -> Self {
        Self {
            n_examinees,
            theta_low: -3.0,
            theta_high: 3.0,
            distribution,
            seed,
        }
    }

    fn validate(&self) -> Result<(), GenerateError> {
        if self.n_examinees < 2 {
            return Err(GenerateError::InvalidCohort("need at least 2 examinees"));
        }
        if !(self.theta_low.is_finite() && self.theta_high.is_finite())
            || self.theta_low >= self.theta_high
        {
            return Err(GenerateError::InvalidCohort(
                "ability bounds must be finite with low < high",
            ));
        }
        Ok(())
    }

    fn draw_theta(&self, rng: &mut ChaCha8Rng) -> f64 {
        let (lo, hi) = (self.theta_low, self.theta_high);
        match self.distribution {
            ThetaDistribution::Uniform => rng.random_range(lo..hi),
            ThetaDistribution::Normal => {
                for _ in 0..TRUNCATED_NORMAL_ATTEMPTS {
                    let z: f64 = rng.sample(StandardNormal);
                    if (lo..=hi).contains(&z) {
                        return z;
                    }
                }
                rng.random_range(lo..hi)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("need at least 2 items, found {0}")]
    TooFewItems(usize),
    #[error("item {index}: {reason}")]
    InvalidItem { index: usize, reason: &'static str },
    #[error("invalid cohort: {0}")]
    InvalidCohort(&'static str),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Ground truth recorded next to a generated exam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub rng_algorithm: String,
    pub seed: u64,
    pub theta_distribution: ThetaDistribution,
    pub unfair_item_ids: Vec<String>,
    pub items: Vec<IrtItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedExam {
    pub matrix: ScoreMatrix,
    pub truth: Truth,
    pub thetas: Vec<f64>,
}

pub fn item_id(index: usize) -> String {
    alloc::format!("i{}", index + 1)
}

pub fn examinee_id(index: usize) -> String {
    alloc::format!("s{}", index + 1)
}

/// Dichotomous responses for `cohort` on `items`; item ids are `i1..iN`,
/// examinee ids `s1..sK`.
pub fn generate(items: &[IrtItem], cohort: &CohortSpec) -> Result<GeneratedExam, GenerateError> {
    if items.len() < 2 {
        return Err(GenerateError::TooFewItems(items.len()));
    }
    for (index, item) in items.iter().enumerate() {
        item.validate()
            .map_err(|reason| GenerateError::InvalidItem { index, reason })?;
    }
    cohort.validate()?;

    let mut scores = Vec::with_capacity(cohort.n_examinees * items.len());
    let mut thetas = Vec::with_capacity(cohort.n_examinees);
    for row in 0..cohort.n_examinees {
        let mut rng = ChaCha8Rng::seed_from_u64(cohort.seed);
        rng.set_stream(row as u64);
        let theta = cohort.draw_theta(&mut rng);
        thetas.push(theta);
        scores.extend(items.iter().map(|item| {
            let u: f64 = rng.random();
            if u < icc(theta, item) {
                1.0
            } else {
                0.0
            }
        }));
    }

    let item_ids: Vec<String> = (0..items.len()).map(item_id).collect();
    let unfair_item_ids = items
        .iter()
        .zip(&item_ids)
        .filter(|(item, _)| item.is_unfair())
        .map(|(_, id)| id.clone())
        .collect();
    let matrix = ScoreMatrix::dichotomous(
        (0..cohort.n_examinees).map(examinee_id).collect(),
        item_ids,
        scores,
    )?;
    Ok(GeneratedExam {
        matrix,
        truth: Truth {
            rng_algorithm: RNG_ALGORITHM.into(),
            seed: cohort.seed,
            theta_distribution: cohort.distribution,
            unfair_item_ids,
            items: items.to_vec(),
        },
        thetas,
    })
}

/// Uniform ranges for randomly drawn item parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItemPriors {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub c: (f64, f64),
}

impl Default for ItemPriors {
    fn default() -> Self {
        Self {
            a: (0.7, 1.6),
            b: (-2.0, 2.0),
            c: (0.0, 0.25),
        }
    }
}

impl ItemPriors {
    /// Draws `n` items; those whose index is in `unfair` get `cap`.
    pub fn sample(&self, n: usize, unfair: &[usize], cap: f64, seed: u64) -> Vec<IrtItem> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| IrtItem {
                a: rng.random_range(self.a.0..=self.a.1),
                b: rng.random_range(self.b.0..=self.b.1),
                c: rng.random_range(self.c.0..=self.c.1),
                cap: if unfair.contains(&i) { cap } else { 1.0 },
            })
            .collect()
    }
}

/// Where two item characteristic curves swap order on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    /// The curves agree to rounding at every grid point.
    pub coincide: bool,
    /// Grid brackets `(lo, hi)` over which the difference changes sign.
    pub crossings: Vec<(f64, f64)>,
}

impl CrossingReport {
    /// Neither item is uniformly harder.
    pub fn is_paradox(&self) -> bool {
        !self.coincide && !self.crossings.is_empty()
    }
}

pub fn lords_paradox_check(item_a: &IrtItem, item_b: &IrtItem, grid: &[f64]) -> CrossingReport {
    let diffs: Vec<(f64, f64)> = grid
        .iter()
        .map(|&t| (t, icc(t, item_a) - icc(t, item_b)))
        .collect();
    let coincide = diffs.iter().all(|&(_, d)| d.abs() <= 1e-15);
    let mut crossings = Vec::new();
    if !coincide {
        let mut last: Option<(f64, f64)> = None;
        for &(t, d) in diffs.iter().filter(|(_, d)| d.abs() > 1e-15) {
            if let Some((t0, d0)) = last {
                if (d0 < 0.0) != (d < 0.0) {
                    crossings.push((t0, t));
                }
            }
            last = Some((t, d));
        }
    }
    CrossingReport {
        coincide,
        crossings,
    }
}

/// A fitted item line `p(g) = intercept + slope * g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItemLine {
    pub intercept: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LineIntersection {
    Coincident,
    Parallel,
    At { g: f64, p: f64 },
}

impl ItemLine {
    /// On the ideal line: predicts full credit at `g = 1`.
    pub fn passes_through_perfect_score(&self, tol: f64) -> bool {
        (self.intercept + self.slope - 1.0).abs() <= tol
    }

    pub fn at(&self, g: f64) -> f64 {
        self.intercept + self.slope * g
    }

    pub fn intersection(&self, other: &ItemLine) -> LineIntersection {
        let ds = self.slope - other.slope;
        let di = other.intercept - self.intercept;
        if ds == 0.0 {
            if di == 0.0 {
                LineIntersection::Coincident
            } else {
                LineIntersection::Parallel
            }
        } else {
            let g = di / ds;
            LineIntersection::At { g, p: self.at(g) }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icc_at_difficulty() {
        assert_eq!(icc(0.3, &IrtItem::fair(1.2, 0.3, 0.2)), 0.2 + 0.8 / 2.0);
        assert_eq!(icc(-1.0, &IrtItem::fair(0.8, -1.0, 0.0)), 0.5);
    }

    #[test]
    fn item_validation() {
        assert!(IrtItem::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(IrtItem::new(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(IrtItem::new(1.0, 0.0, 0.5, 0.4).is_err());
        assert!(IrtItem::new(1.0, 0.0, 0.0, 0.0).is_ok());
        assert!(IrtItem::new(1.0, 0.0, 0.2, 0.45).is_ok());
    }

    #[test]
    fn zero_cap_item_is_never_answered() {
        let items = [
            IrtItem::fair(1.0, 0.0, 0.2),
            IrtItem::new(1.0, 0.0, 0.0, 0.0).unwrap(),
        ];
        let exam = generate(&items, &CohortSpec::new(200, ThetaDistribution::Uniform, 3)).unwrap();
        assert!((0..200).all(|k| exam.matrix.score(k, 1) == 0.0));
        assert_eq!(exam.truth.unfair_item_ids, ["i2"]);
    }

    #[test]
    fn seeded_generation_is_repeatable() {
        let items = ItemPriors::default().sample(5, &[1], 0.45, 9);
        let cohort = CohortSpec::new(30, ThetaDistribution::Normal, 42);
        let a = generate(&items, &cohort).unwrap();
        let b = generate(&items, &cohort).unwrap();
        assert_eq!(a, b);
        let other = generate(&items, &CohortSpec { seed: 43, ..cohort }).unwrap();
        assert_ne!(a.matrix, other.matrix);
    }

    #[test]
    fn rows_do_not_depend_on_cohort_size() {
        let items = ItemPriors::default().sample(6, &[], 1.0, 1);
        let small = generate(&items, &CohortSpec::new(10, ThetaDistribution::Uniform, 5)).unwrap();
        let large = generate(&items, &CohortSpec::new(20, ThetaDistribution::Uniform, 5)).unwrap();
        for k in 0..10 {
            assert_eq!(small.matrix.row(k), large.matrix.row(k));
        }
    }

    #[test]
    fn cohort_validation() {
        let items = [IrtItem::fair(1.0, 0.0, 0.0); 2];
        assert!(matches!(
            generate(&items, &CohortSpec::new(0, ThetaDistribution::Uniform, 1)),
            Err(GenerateError::InvalidCohort(_))
        ));
        assert!(matches!(
            generate(
                &items[..1],
                &CohortSpec::new(5, ThetaDistribution::Uniform, 1)
            ),
            Err(GenerateError::TooFewItems(1))
        ));
    }

    #[test]
    fn identical_items_never_cross() {
        let item = IrtItem::fair(1.0, 0.5, 0.1);
        let grid: Vec<f64> = (0..61).map(|i| -3.0 + 0.1 * i as f64).collect();
        let rep = lords_paradox_check(&item, &item, &grid);
        assert!(rep.coincide && !rep.is_paradox());
    }

    #[test]
    fn lines_through_perfect_score_meet_only_there() {
        let a = ItemLine {
            intercept: -0.5,
            slope: 1.5,
        };
        let b = ItemLine {
            intercept: 0.8,
            slope: 0.2,
        };
        assert!(a.passes_through_perfect_score(1e-12) && b.passes_through_perfect_score(1e-12));
        match a.intersection(&b) {
            LineIntersection::At { g, p } => {
                assert!((g - 1.0).abs() < 1e-12 && (p - 1.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(a.intersection(&a), LineIntersection::Coincident);
    }
}
