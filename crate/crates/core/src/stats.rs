//! Sample comparators: Kolmogorov-Smirnov, Wasserstein-1, total variation
//! on the integers, Laplace transforms on a grid, censored exponential rate
//! tests and a binned chi-square for ladder jumps.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::ladder::Observed;
use crate::ladder_measure::LadderMeasure;
use crate::numerics;
use crate::rng::{replicate_seed, CounterRng, Domain};
use crate::walk::mean_sd;

/// Asymptotic 1% critical value of √N · KS.
pub const KS_COEFFICIENT: f64 = 1.63;
pub const TV_THRESHOLD: f64 = 0.02;
pub const BOOTSTRAP_RESAMPLES: usize = 200;
/// Minimum number of uncensored values for a rate test.
pub const MIN_UNCENSORED: usize = 1000;
/// Censoring above this fraction disables the KS half of the rate test.
pub const KS_MAX_CENSORED: f64 = 0.01;
pub const LAPLACE_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Ks,
    #[serde(rename = "wasserstein-1")]
    Wasserstein1,
    TvIntegers,
    LaplaceGridMaxGap,
    /// Binned chi-square statistic against its 1% critical value.
    ChiSquare,
    /// `max(|rate - λ| / 3 s.e., KS / KS threshold)` against 1.
    RateTest,
    /// `|mean - m| / s.e.` against 3.
    MeanZ,
    /// Absolute gap between a prelimit quantity and its limit.
    Gap,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Ks => "ks",
            Metric::Wasserstein1 => "wasserstein-1",
            Metric::TvIntegers => "tv-integers",
            Metric::LaplaceGridMaxGap => "laplace-grid-max-gap",
            Metric::ChiSquare => "chi-square",
            Metric::RateTest => "rate-test",
            Metric::MeanZ => "mean-z",
            Metric::Gap => "gap",
        }
    }
}

/// How a report enters the overall verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// Must pass at every n.
    #[default]
    Check,
    /// Followed over the n-grid; its threshold applies at the largest n only.
    Tracked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub label: String,
    pub metric: Metric,
    #[serde(default)]
    pub role: Role,
    pub n: u64,
    #[serde(with = "crate::csv::json_real")]
    pub value: f64,
    #[serde(with = "crate::csv::json_real")]
    pub threshold: f64,
    /// `value ≤ threshold`.
    pub pass: bool,
    pub sample_sizes: Vec<usize>,
    pub seed_base: u64,
    /// Point estimate behind the value, when there is one.
    pub estimate: Option<f64>,
    pub se: Option<f64>,
}

impl DistanceReport {
    pub fn new(label: impl Into<String>, metric: Metric, value: f64, threshold: f64, sample_sizes: Vec<usize>) -> Self {
        DistanceReport {
            label: label.into(),
            metric,
            role: Role::Check,
            n: 0,
            value,
            threshold,
            pass: value <= threshold,
            sample_sizes,
            seed_base: 0,
            estimate: None,
            se: None,
        }
    }

    pub fn at(self, n: u64, seed_base: u64) -> Self {
        DistanceReport { n, seed_base, ..self }
    }

    pub fn tracked(self) -> Self {
        DistanceReport {
            role: Role::Tracked,
            ..self
        }
    }

    pub fn with_estimate(self, estimate: f64, se: f64) -> Self {
        DistanceReport {
            estimate: Some(estimate),
            se: Some(se),
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Samples {
    Univariate(Vec<f64>),
    Bivariate(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub label: String,
    pub values: Samples,
    pub n_index: u64,
    /// Seeds the values were drawn from, `[first, last]` in replicate index.
    pub seed_range: (u64, u64),
}

impl SampleSet {
    pub fn univariate(label: impl Into<String>, values: Vec<f64>, n_index: u64) -> Result<Self> {
        Self::build(label.into(), Samples::Univariate(values), n_index)
    }

    pub fn bivariate(label: impl Into<String>, values: Vec<(f64, f64)>, n_index: u64) -> Result<Self> {
        Self::build(label.into(), Samples::Bivariate(values), n_index)
    }

    fn build(label: String, values: Samples, n_index: u64) -> Result<Self> {
        let (len, finite) = match &values {
            Samples::Univariate(v) => (v.len(), v.iter().all(|x| x.is_finite())),
            Samples::Bivariate(v) => (v.len(), v.iter().all(|(x, y)| x.is_finite() && y.is_finite())),
        };
        if len == 0 {
            return Err(Error::invalid(format!("sample set `{label}` is empty")));
        }
        if !finite {
            return Err(Error::invalid(format!("sample set `{label}` has non-finite values")));
        }
        Ok(SampleSet {
            label,
            values,
            n_index,
            seed_range: (0, len as u64 - 1),
        })
    }

    pub fn len(&self) -> usize {
        match &self.values {
            Samples::Univariate(v) => v.len(),
            Samples::Bivariate(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn univariate_values(&self) -> Result<&[f64]> {
        match &self.values {
            Samples::Univariate(v) => Ok(v),
            Samples::Bivariate(_) => Err(Error::Usage(format!(
                "`{}` is bivariate; only empirical_laplace accepts bivariate samples",
                self.label
            ))),
        }
    }
}

/// Reference laws for one-sample comparisons.
#[derive(Debug, Clone, Copy)]
pub enum Law<'a> {
    Exponential {
        rate: f64,
    },
    Poisson {
        rate: f64,
    },
    PointMass {
        at: f64,
    },
    /// One jump of μ⁺ normalized to a probability law.
    LadderJump(&'a LadderMeasure),
}

impl Law<'_> {
    fn cdf(&self) -> Result<Box<dyn Fn(f64) -> f64 + '_>> {
        match *self {
            Law::Exponential { rate } => Ok(Box::new(
                move |x: f64| if x <= 0.0 { 0.0 } else { -(-rate * x).exp_m1() },
            )),
            Law::LadderJump(lm) => {
                lm.overshoot_cdf(1.0)?;
                Ok(Box::new(move |x: f64| lm.overshoot_cdf(x).unwrap_or(f64::NAN)))
            }
            _ => Err(Error::Usage(
                "KS needs a continuous law (exponential or ladder jump)".into(),
            )),
        }
    }

    fn laplace(&self, lambda: f64) -> Result<f64> {
        Ok(match *self {
            Law::Exponential { rate } => rate / (rate + lambda),
            Law::Poisson { rate } => (rate * (-lambda).exp_m1()).exp(),
            Law::PointMass { at } => (-lambda * at).exp(),
            Law::LadderJump(lm) => 1.0 - lm.laplace_part(lambda, 0.0)? / lm.mu_plus_mass,
        })
    }
}

/// What a sample set is compared with.
#[derive(Debug, Clone, Copy)]
pub enum Against<'a> {
    Samples(&'a SampleSet),
    Law(Law<'a>),
}

/// Mean of `e^{-βx - γy}` and its bootstrap standard error.
pub fn empirical_laplace(samples: &SampleSet, beta: f64, gamma: f64, seed: u64) -> Result<(f64, f64)> {
    if !(beta >= 0.0 && gamma >= 0.0) {
        return Err(Error::invalid("β and γ must be nonnegative"));
    }
    let t: Vec<f64> = match &samples.values {
        Samples::Univariate(v) => v.iter().map(|x| (-beta * x).exp()).collect(),
        Samples::Bivariate(v) => v.iter().map(|(x, y)| (-beta * x - gamma * y).exp()).collect(),
    };
    let n = t.len();
    let estimate = t.iter().sum::<f64>() / n as f64;
    let means = crate::parallel::map_indexed(BOOTSTRAP_RESAMPLES, |r| {
        let mut rng = CounterRng::new(replicate_seed(seed, r as u64), Domain::Bootstrap);
        let mut s = 0.0;
        for _ in 0..n {
            let i = ((rng.open01() * n as f64) as usize).min(n - 1);
            s += t[i];
        }
        s / n as f64
    });
    let (_, sd) = mean_sd(&means);
    Ok((estimate, sd))
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_statistic(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let s = sorted(values);
    let n = s.len() as f64;
    s.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    })
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// `∫ |F_a - F_b|`, exact on the sorted samples.
pub fn wasserstein1(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut x = a[0].min(b[0]);
    let mut w = 0.0;
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        w += (next - x) * (i as f64 / na - j as f64 / nb).abs();
        x = next;
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
    }
    w
}

/// `∫ |F_n - F|` against Exp(rate), in closed form between order statistics.
fn wasserstein1_exponential(values: &[f64], rate: f64) -> f64 {
    let s = sorted(values);
    let n = s.len() as f64;
    // antiderivative of F
    let big_f = |x: f64| x + (-rate * x).exp() / rate;
    let quantile = |c: f64| -(-c).ln_1p() / rate;
    let mut w = 0.0;
    let mut lo = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let x = x.max(0.0);
        let c = i as f64 / n;
        let q = quantile(c).clamp(lo, x);
        // c ≥ F on [lo, q], c ≤ F on [q, x]
        w += c * (q - lo) - (big_f(q) - big_f(lo));
        w += (big_f(x) - big_f(q)) - c * (x - q);
        lo = x;
    }
    w + (-rate * lo).exp() / rate
}

fn integer_counts(values: &[f64]) -> Result<Vec<f64>> {
    let mut counts: Vec<f64> = Vec::new();
    for &v in values {
        if v < 0.0 || v.fract() != 0.0 || v > 1e7 {
            return Err(Error::Usage(format!(
                "TV on integers needs nonnegative integer values, got {v}"
            )));
        }
        let k = v as usize;
        if counts.len() <= k {
            counts.resize(k + 1, 0.0);
        }
        counts[k] += 1.0;
    }
    let n = values.len() as f64;
    Ok(counts.into_iter().map(|c| c / n).collect())
}

fn tv_against_pmf(p: &[f64], pmf: impl Fn(usize) -> f64) -> f64 {
    let mut covered = 0.0;
    let mut d = 0.0;
    for (k, pk) in p.iter().enumerate() {
        let q = pmf(k);
        covered += q;
        d += (pk - q).abs();
    }
    0.5 * (d + (1.0 - covered).max(0.0))
}

fn poisson_pmf(rate: f64) -> impl Fn(usize) -> f64 {
    move |k| {
        if rate == 0.0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        let k = k as f64;
        (k * rate.ln() - rate - statrs::function::gamma::ln_gamma(k + 1.0)).exp()
    }
}

/// Distance between `a` and `b`; `threshold` overrides the metric default
/// (KS: 1.63/√N, TV: 0.02; W1 and Laplace have none and need one).
pub fn distribution_distance(
    a: &SampleSet,
    b: Against<'_>,
    metric: Metric,
    threshold: Option<f64>,
) -> Result<DistanceReport> {
    let x = a.univariate_values()?;
    let mismatch = |what: &str| Error::Usage(format!("metric {} does not apply to {what}", metric.name()));
    let needed =
        || threshold.ok_or_else(|| Error::Usage(format!("metric {} needs an explicit threshold", metric.name())));
    let (value, sizes, default) = match (metric, b) {
        (Metric::Ks, Against::Law(law)) => {
            let cdf = law.cdf()?;
            let n = x.len() as f64;
            (ks_statistic(x, cdf), vec![x.len()], KS_COEFFICIENT / n.sqrt())
        }
        (Metric::Ks, Against::Samples(s)) => {
            let y = s.univariate_values()?;
            let (n, m) = (x.len() as f64, y.len() as f64);
            (
                ks_two_sample(x, y),
                vec![x.len(), y.len()],
                KS_COEFFICIENT * ((n + m) / (n * m)).sqrt(),
            )
        }
        (Metric::Wasserstein1, Against::Samples(s)) => {
            let y = s.univariate_values()?;
            (wasserstein1(x, y), vec![x.len(), y.len()], needed()?)
        }
        (Metric::Wasserstein1, Against::Law(Law::PointMass { at })) => {
            let w = x.iter().map(|v| (v - at).abs()).sum::<f64>() / x.len() as f64;
            (w, vec![x.len()], needed()?)
        }
        (Metric::Wasserstein1, Against::Law(Law::Exponential { rate })) => {
            (wasserstein1_exponential(x, rate), vec![x.len()], needed()?)
        }
        (Metric::Wasserstein1, _) => return Err(mismatch("this law")),
        (Metric::TvIntegers, Against::Samples(s)) => {
            let y = s.univariate_values()?;
            let (p, q) = (integer_counts(x)?, integer_counts(y)?);
            let len = p.len().max(q.len());
            let d: f64 = (0..len)
                .map(|k| (p.get(k).unwrap_or(&0.0) - q.get(k).unwrap_or(&0.0)).abs())
                .sum();
            (0.5 * d, vec![x.len(), y.len()], TV_THRESHOLD)
        }
        (Metric::TvIntegers, Against::Law(Law::Poisson { rate })) => (
            tv_against_pmf(&integer_counts(x)?, poisson_pmf(rate)),
            vec![x.len()],
            TV_THRESHOLD,
        ),
        (Metric::TvIntegers, Against::Law(Law::PointMass { at })) => {
            if at < 0.0 || at.fract() != 0.0 {
                return Err(mismatch("a non-integer point mass"));
            }
            let k = at as usize;
            (
                tv_against_pmf(&integer_counts(x)?, |j| (j == k) as u8 as f64),
                vec![x.len()],
                TV_THRESHOLD,
            )
        }
        (Metric::TvIntegers, _) => return Err(mismatch("a continuous law")),
        (Metric::LaplaceGridMaxGap, b) => {
            let mut gap = 0.0f64;
            for &l in &LAPLACE_GRID {
                let ex = x.iter().map(|v| (-l * v).exp()).sum::<f64>() / x.len() as f64;
                let other = match b {
                    Against::Law(law) => law.laplace(l)?,
                    Against::Samples(s) => {
                        let y = s.univariate_values()?;
                        y.iter().map(|v| (-l * v).exp()).sum::<f64>() / y.len() as f64
                    }
                };
                gap = gap.max((ex - other).abs());
            }
            let sizes = match b {
                Against::Samples(s) => vec![x.len(), s.len()],
                _ => vec![x.len()],
            };
            (gap, sizes, needed()?)
        }
        _ => return Err(mismatch("distribution_distance; use the dedicated test")),
    };
    Ok(DistanceReport::new(
        a.label.clone(),
        metric,
        value,
        threshold.unwrap_or(default),
        sizes,
    ))
}

/// Censored exponential rate test of `samples` against `rate`.
///
/// The MLE is `#uncensored / Σ exposure`, with s.e. `rate/√#uncensored`.
/// The report value is `max(|r̂ - rate| / (3 s.e.), KS / KS threshold)` and
/// passes at 1. The KS half runs on the uncensored values and is skipped
/// when more than 1% are censored, since those values are then biased.
pub fn exponential_rate_test(label: &str, samples: &[Observed], rate: f64) -> Result<DistanceReport> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::invalid(format!("rate must be positive, got {rate}")));
    }
    let uncensored: Vec<f64> = samples.iter().filter_map(|o| o.value()).collect();
    if uncensored.len() < MIN_UNCENSORED {
        return Err(Error::TooFewSamples {
            got: uncensored.len(),
            need: MIN_UNCENSORED,
        });
    }
    let exposure: f64 = samples.iter().map(|o| o.exposure()).sum();
    let d = uncensored.len() as f64;
    let mle = d / exposure;
    let se = mle / d.sqrt();
    let mut value = (mle - rate).abs() / (3.0 * se);
    let censored = 1.0 - d / samples.len() as f64;
    if censored <= KS_MAX_CENSORED {
        let ks = ks_statistic(&uncensored, |x| -(-rate * x).exp_m1());
        value = value.max(ks / (KS_COEFFICIENT / d.sqrt()));
    }
    Ok(DistanceReport::new(
        label,
        Metric::RateTest,
        value,
        1.0,
        vec![samples.len(), uncensored.len()],
    )
    .with_estimate(mle, se))
}

/// `|mean - expected| / s.e.` against 3.
pub fn mean_test(label: &str, values: &[f64], expected: f64) -> Result<DistanceReport> {
    if values.len() < 2 {
        return Err(Error::TooFewSamples {
            got: values.len(),
            need: 2,
        });
    }
    let (m, sd) = mean_sd(values);
    let se = sd / (values.len() as f64).sqrt();
    let z = if se > 0.0 {
        (m - expected).abs() / se
    } else if m == expected {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(DistanceReport::new(label, Metric::MeanZ, z, 3.0, vec![values.len()]).with_estimate(m, se))
}

/// Chi-square of `(undershoot, overshoot)` pairs on a `bins × bins` grid
/// whose edges are the analytic deciles (for 10 bins) of the two marginals
/// of the normalized ladder measure; passes at the 1% level.
pub fn ladder_chi_square(label: &str, pairs: &[(f64, f64)], lm: &LadderMeasure, bins: usize) -> Result<DistanceReport> {
    let mass = lm.mu_plus_mass;
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::UnsupportedMeasure(
            "chi-square needs a finite nonzero ladder measure".into(),
        ));
    }
    if bins < 2 {
        return Err(Error::invalid("need at least 2 bins"));
    }
    let under_cdf = |x: f64| lm.joint_cell_mass(0.0, x, 0.0, f64::INFINITY).map(|m| m / mass);
    let over_cdf = |y: f64| lm.overshoot_cdf(y);
    let x_edges = quantile_edges(&under_cdf, bins)?;
    let y_edges = quantile_edges(&over_cdf, bins)?;
    let locate = |edges: &[f64], v: f64| edges.partition_point(|e| *e <= v).saturating_sub(1).min(bins - 1);
    let mut observed = vec![0.0; bins * bins];
    for &(u, o) in pairs {
        observed[locate(&x_edges, u) * bins + locate(&y_edges, o)] += 1.0;
    }
    let n = pairs.len() as f64;
    let mut stat = 0.0;
    let mut cells = 0;
    for i in 0..bins {
        for j in 0..bins {
            let p = lm.joint_cell_mass(x_edges[i], x_edges[i + 1], y_edges[j], y_edges[j + 1])? / mass;
            if p <= 0.0 {
                continue;
            }
            let e = n * p;
            stat += (observed[i * bins + j] - e).powi(2) / e;
            cells += 1;
        }
    }
    let df = (cells - 1) as f64;
    let critical = ChiSquared::new(df)
        .map_err(|e| Error::invalid(format!("chi-square: {e}")))?
        .inverse_cdf(0.99);
    Ok(DistanceReport::new(
        label,
        Metric::ChiSquare,
        stat,
        critical,
        vec![pairs.len()],
    ))
}

/// `bins + 1` edges from 0 to ∞ at the quantiles `k / bins` of `cdf`.
fn quantile_edges(cdf: &dyn Fn(f64) -> Result<f64>, bins: usize) -> Result<Vec<f64>> {
    let failed = std::cell::Cell::new(false);
    let mut edges = vec![0.0];
    for k in 1..bins {
        let target = k as f64 / bins as f64;
        let below = |x: f64| match cdf(x) {
            Ok(c) => c < target,
            Err(_) => {
                failed.set(true);
                false
            }
        };
        let hi = numerics::expand_until(1e-3, |x| !below(x)).ok_or_else(|| Error::NumericFailure {
            context: "quantile bracket".into(),
            achieved: f64::INFINITY,
        })?;
        edges.push(numerics::bisect(below, 0.0, hi, 0.0));
    }
    if failed.get() {
        // surface the underlying error
        cdf(edges[1])?;
    }
    edges.push(f64::INFINITY);
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_draws(n: usize, rate: f64, seed: u64) -> Vec<f64> {
        let mut rng = CounterRng::new(seed, Domain::Aux);
        (0..n).map(|_| rng.exp(rate)).collect()
    }

    #[test]
    fn self_distances_are_zero() {
        let s = SampleSet::univariate("x", exp_draws(500, 1.0, 1), 1).unwrap();
        for m in [Metric::Ks, Metric::Wasserstein1, Metric::LaplaceGridMaxGap] {
            let r = distribution_distance(&s, Against::Samples(&s), m, Some(0.0)).unwrap();
            assert_eq!(r.value, 0.0);
            assert!(r.pass);
        }
    }

    #[test]
    fn wasserstein_by_hand() {
        assert_eq!(wasserstein1(&[0.0, 1.0], &[0.5]), 0.5);
        assert_eq!(wasserstein1(&[0.0], &[3.0]), 3.0);
        assert!((wasserstein1(&[0.0, 2.0], &[1.0, 1.0]) - 1.0).abs() < 1e-15);
        // W1 of a single point at x against Exp(1) is E|X - x|
        let x = 0.7f64;
        let exact = x - 1.0 + 2.0 * (-x).exp();
        assert!((wasserstein1_exponential(&[x], 1.0) - exact).abs() < 1e-14);
    }

    #[test]
    fn ks_two_sample_by_hand() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
        assert_eq!(ks_two_sample(&[1.0, 3.0], &[2.0, 4.0]), 0.5);
    }

    #[test]
    fn metric_law_mismatch_is_a_usage_error() {
        let s = SampleSet::univariate("x", vec![1.0, 2.5], 1).unwrap();
        let r = distribution_distance(&s, Against::Law(Law::Poisson { rate: 1.0 }), Metric::Ks, None);
        assert!(matches!(r, Err(Error::Usage(_))));
        let r = distribution_distance(&s, Against::Law(Law::Poisson { rate: 1.0 }), Metric::TvIntegers, None);
        assert!(matches!(r, Err(Error::Usage(_))));
        let r = distribution_distance(&s, Against::Samples(&s), Metric::Wasserstein1, None);
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn laplace_of_constants() {
        let z = SampleSet::bivariate("z", vec![(0.0, 0.0); 50], 1).unwrap();
        assert_eq!(empirical_laplace(&z, 1.0, 2.0, 3).unwrap(), (1.0, 0.0));
        let s = SampleSet::univariate("x", exp_draws(100, 1.0, 2), 1).unwrap();
        assert_eq!(empirical_laplace(&s, 0.0, 0.0, 3).unwrap().0, 1.0);
    }

    #[test]
    fn rate_test_needs_uncensored_values() {
        let obs = vec![Observed::Censored { exposure: 1.0 }; 5000];
        assert!(matches!(
            exponential_rate_test("e", &obs, 2.0),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn sample_sets_reject_bad_values() {
        assert!(SampleSet::univariate("e", vec![], 1).is_err());
        assert!(SampleSet::univariate("nan", vec![f64::NAN], 1).is_err());
    }
}
