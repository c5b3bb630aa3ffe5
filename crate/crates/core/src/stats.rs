use alloc::vec::Vec;

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Centered sums of squares and cross products: `(Sxx, Syy, Sxy)`.
pub(crate) fn centered_moments(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let (mx, my) = (mean(x), mean(y));
    x.iter()
        .zip(y)
        .fold((0.0, 0.0, 0.0), |(sxx, syy, sxy), (&xi, &yi)| {
            let (dx, dy) = (xi - mx, yi - my);
            (sxx + dx * dx, syy + dy * dy, sxy + dx * dy)
        })
}

/// Median of a non-empty slice; the mean of the two middle values for even
/// lengths.
pub(crate) fn median(xs: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    }
}

/// Median absolute deviation about the median (unscaled).
pub(crate) fn mad(xs: &[f64]) -> f64 {
    let center = median(xs);
    let deviations: Vec<f64> = xs.iter().map(|x| (x - center).abs()).collect();
    median(&deviations)
}
