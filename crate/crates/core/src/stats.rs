//! Small sample statistics used by the campaigns.

/// Sample mean and standard error (`stdev / sqrt(n)`, `n - 1` denominator).
/// Empty input gives `(NaN, NaN)`; a single sample has zero standard error.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    let sd = libm::sqrt(ss / (n - 1) as f64);
    (mean, sd / libm::sqrt(n as f64))
}

/// Two-sided one-sample Kolmogorov-Smirnov statistic `D_n` of `samples`
/// against `cdf`. Sorts `samples` in place.
pub fn ks_statistic<F: FnMut(f64) -> f64>(samples: &mut [f64], mut cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    d
}
