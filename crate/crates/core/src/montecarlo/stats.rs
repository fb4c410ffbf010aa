use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Sample moments from a single pass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Unbiased (n - 1) variance.
    pub variance: f64,
    /// Moment skewness `g1`; `None` below 4 values or for a constant sample.
    pub skewness: Option<f64>,
    /// Moment excess kurtosis `g2`; `None` below 4 values or for a constant sample.
    pub excess_kurtosis: Option<f64>,
}

/// Mean, unbiased variance, skewness and excess kurtosis, accumulated with
/// the streaming central-moment updates.
pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.len() < 2 {
        return Err(Error::invalid("need at least 2 values"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite value"));
    }
    let (mut n, mut mean, mut m2, mut m3, mut m4) = (0.0_f64, 0.0, 0.0, 0.0, 0.0);
    for &x in values {
        let n1 = n;
        n += 1.0;
        let delta = x - mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let term1 = delta * dn * n1;
        mean += dn;
        m4 += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2 - 4.0 * dn * m3;
        m3 += term1 * dn * (n - 2.0) - 3.0 * dn * m2;
        m2 += term1;
    }
    let shape = values.len() >= 4 && m2 > 0.0;
    Ok(Summary {
        n: values.len(),
        mean,
        variance: m2 / (n - 1.0),
        skewness: shape.then(|| n.sqrt() * m3 / m2.powf(1.5)),
        excess_kurtosis: shape.then(|| n * m4 / (m2 * m2) - 3.0),
    })
}

/// `(Z - mean_density * area) / area^alpha` for each `(area, z)`.
pub fn standardize_values(data: &[(f64, f64)], mean_density: f64, alpha: f64) -> Vec<f64> {
    data.iter().map(|&(a, z)| (z - mean_density * a) / a.powf(alpha)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub n: usize,
    pub statistic: f64,
    pub p_value: f64,
}

fn normal_cdf(x: f64, sd: f64) -> f64 {
    0.5 * libm::erfc(-x / (sd * std::f64::consts::SQRT_2))
}

/// Kolmogorov survival function `P(K > x) = 2 sum (-1)^(k-1) exp(-2 k^2 x^2)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Asymptotic critical value of the KS statistic at level `alpha`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.2, 5.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) / (n as f64).sqrt()
}

fn check_sample(sample: &[f64]) -> Result<()> {
    if sample.len() < 8 {
        return Err(Error::invalid(format!("need at least 8 values, got {}", sample.len())));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite value in sample"));
    }
    Ok(())
}

/// One-sample KS test against the fully specified law `N(0, sigma2)`.
pub fn ks_test(sample: &[f64], sigma2: f64) -> Result<KsResult> {
    check_sample(sample)?;
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::invalid("variance must be positive"));
    }
    let sd = sigma2.sqrt();
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = normal_cdf(x, sd);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(KsResult { n: xs.len(), statistic: d, p_value: kolmogorov_sf(n.sqrt() * d) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JbResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Jarque–Bera statistic with the chi-square(2) tail `exp(-x/2)`.
pub fn jarque_bera(sample: &[f64]) -> Result<JbResult> {
    check_sample(sample)?;
    let s = summarize(sample)?;
    let (Some(g1), Some(g2)) = (s.skewness, s.excess_kurtosis) else {
        return Err(Error::invalid("constant sample"));
    };
    let jb = s.n as f64 * (g1 * g1 / 6.0 + g2 * g2 / 24.0);
    Ok(JbResult { statistic: jb, p_value: (-jb / 2.0).exp() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
}

/// Least-squares fit of `log(variance)` on `log(area)`.
pub fn variance_rate_fit(pairs: &[(f64, f64)]) -> Result<RateFit> {
    if pairs.len() < 3 {
        return Err(Error::invalid("rate fit needs at least 3 points"));
    }
    if pairs.iter().any(|&(a, v)| !(a > 0.0) || !(v > 0.0)) {
        return Err(Error::invalid("areas and variances must be positive"));
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::invalid("rate fit needs distinct areas"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = if pairs.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    Ok(RateFit { slope, stderr, intercept })
}

/// Bootstrap interval for a statistic of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bootstrap {
    pub estimate: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Percentile bootstrap (95%) of `stat` over `resamples` resamples.
pub fn bootstrap<R: Rng + ?Sized>(
    values: &[f64],
    resamples: usize,
    rng: &mut R,
    stat: impl Fn(&[f64]) -> f64,
) -> Result<Bootstrap> {
    if values.len() < 2 || resamples < 2 {
        return Err(Error::invalid("bootstrap needs at least 2 values and 2 resamples"));
    }
    let estimate = stat(values);
    let mut buf = vec![0.0; values.len()];
    let mut reps = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        for b in buf.iter_mut() {
            *b = values[rng.random_range(0..values.len())];
        }
        reps.push(stat(&buf));
    }
    let s = summarize(&reps)?;
    reps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| reps[((p * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    Ok(Bootstrap { estimate, se: s.variance.sqrt(), ci_low: q(0.025), ci_high: q(0.975) })
}

pub(crate) fn unbiased_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tessellate::SeedStream;
    use rand_distr::{Distribution, Exp, StandardNormal};

    fn two_pass(v: &[f64]) -> (f64, f64, f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let c = |k: i32| v.iter().map(|x| (x - m).powi(k)).sum::<f64>() / n;
        (m, c(2) * n / (n - 1.0), c(3) / c(2).powf(1.5), c(4) / (c(2) * c(2)) - 3.0)
    }

    #[test]
    fn small_samples() {
        let s = summarize(&[3.0, 3.0, 3.0]).unwrap();
        assert_eq!(s.variance, 0.0);
        let s = summarize(&[0.0, 1.0]).unwrap();
        assert_eq!((s.mean, s.variance), (0.5, 0.5));
        assert!(s.skewness.is_none());
        assert!(summarize(&[1.0]).is_err());
    }

    #[test]
    fn streaming_matches_two_pass() {
        let mut rng = SeedStream::new(1).rng();
        let v: Vec<f64> = (0..5000).map(|_| Exp::new(1.0).unwrap().sample(&mut rng) + 1e3).collect();
        let s = summarize(&v).unwrap();
        let (m, var, g1, g2) = two_pass(&v);
        assert!(((s.mean - m) / m).abs() < 1e-10);
        assert!(((s.variance - var) / var).abs() < 1e-10);
        assert!(((s.skewness.unwrap() - g1) / g1).abs() < 1e-10);
        assert!(((s.excess_kurtosis.unwrap() - g2) / g2).abs() < 1e-10);
    }

    #[test]
    fn normal_shape_moments() {
        let mut rng = SeedStream::new(2).rng();
        let v: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let s = summarize(&v).unwrap();
        assert!(s.skewness.unwrap().abs() < 0.08);
        assert!(s.excess_kurtosis.unwrap().abs() < 0.16);
    }

    #[test]
    fn ks_on_exact_quantiles() {
        // normal quantiles by bisection on the CDF
        let n = 1000;
        let q: Vec<f64> = (0..n)
            .map(|i| {
                let p = (i as f64 + 0.5) / n as f64;
                let (mut lo, mut hi) = (-10.0, 10.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if normal_cdf(mid, 1.0) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        let r = ks_test(&q, 1.0).unwrap();
        assert!(r.statistic < 1e-3);
        assert!(r.p_value > 0.99);
        let z = ks_test(&[0.0; 20], 1.0).unwrap();
        assert!((z.statistic - 0.5).abs() < 1e-15);
        assert!(ks_test(&[0.0; 5], 1.0).is_err());
        assert!(ks_test(&[0.0; 20], 0.0).is_err());
    }

    #[test]
    fn ks_critical_value_matches_tables() {
        assert!((ks_critical_value(1000, 0.01) * 1000f64.sqrt() - 1.6276).abs() < 1e-3);
        assert!((ks_critical_value(1000, 0.05) * 1000f64.sqrt() - 1.3581).abs() < 1e-3);
        assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 1e-4);
    }

    #[test]
    fn jarque_bera_cases() {
        let mut rng = SeedStream::new(3).rng();
        let e: Vec<f64> = (0..10_000).map(|_| Exp::new(1.0).unwrap().sample(&mut rng)).collect();
        let jb = jarque_bera(&e).unwrap();
        assert!(jb.statistic > 9.21);
        assert!((((-9.21_f64) / 2.0).exp() - 0.01).abs() < 1e-4);
        // exact normal quantiles are symmetric and close to mesokurtic
        let n = 2000;
        let q: Vec<f64> = (1..=n)
            .map(|i| {
                let p = (i as f64 - 0.5) / n as f64;
                let (mut lo, mut hi) = (-10.0, 10.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if normal_cdf(mid, 1.0) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        assert!(jarque_bera(&q).unwrap().statistic < 1.0);
    }

    #[test]
    fn rate_fit_exact_power_laws() {
        let p15: Vec<(f64, f64)> = [100.0, 400.0, 900.0, 3600.0].iter().map(|&a: &f64| (a, 2.5 * a.powf(1.5))).collect();
        let f = variance_rate_fit(&p15).unwrap();
        assert!((f.slope - 1.5).abs() < 1e-10);
        let p1: Vec<(f64, f64)> = [100.0, 400.0, 900.0].iter().map(|&a| (a, 0.7 * a)).collect();
        assert!((variance_rate_fit(&p1).unwrap().slope - 1.0).abs() < 1e-10);
        assert!(variance_rate_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(variance_rate_fit(&[(1.0, 1.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn standardized_mean_is_zero() {
        let z = standardize_values(&[(100.0, 254.0), (400.0, 1016.0)], 2.54, 0.5);
        assert!(z.iter().all(|v| v.abs() < 1e-12));
    }
}
