//! Small two-pass summary statistics shared by the metric and correlation code.

/// Mean with one correction pass, so a constant sequence returns its value exactly.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    m + xs.iter().map(|x| x - m).sum::<f64>() / n
}

/// Σ (x_i − x̄)(y_i − ȳ), computed from centered values.
pub fn centered_cross_sum(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let mx = mean(xs);
    let my = mean(ys);
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum()
}

/// Sample mean and standard deviation (n − 1 denominator). The deviation is
/// `None` with fewer than two values.
pub fn mean_sd(xs: &[f64]) -> (f64, Option<f64>) {
    let m = mean(xs);
    if xs.len() < 2 {
        return (m, None);
    }
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (m, Some((ss / (xs.len() - 1) as f64).sqrt()))
}

/// Least-squares slope of `ys` on `xs` (line with intercept). `None` when `xs`
/// has no spread.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let sxx = centered_cross_sum(xs, xs);
    if sxx == 0.0 {
        return None;
    }
    Some(centered_cross_sum(xs, ys) / sxx)
}

/// True when every element equals the first.
pub fn is_constant(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}
