//! Random walks read off paths, their strict ascending ladder with Poisson
//! subordination, Fristedt's normalization `α_n` and Monte Carlo ladder
//! exponents.

use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::calculus::{MarkRule, ProcessSpec, ScalingParams};
use crate::error::{Error, Result};
use crate::ladder_sim::{LadderSimulator, StopRule};
use crate::measure::{Density, JumpSampler};
use crate::path::{rescale_path, sample_marked_path, MarkedPath};
use crate::rng::{replicate_seed, CounterRng, Domain};

/// Functionals below this weight are treated as exactly zero, so walks
/// running past such a horizon do not count as censored.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-12;

/// Censoring tolerated by the ladder exponent estimators.
pub const MAX_CENSORED: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSample {
    /// Path time between consecutive values.
    pub step: f64,
    /// `S(0) = 0, S(1), …`.
    pub values: Vec<f64>,
    pub source_seed: u64,
}

/// `S(j) = X(j / k)` for `j ≤ k · horizon`, evaluated exactly as
/// [`MarkedPath::value`] would.
pub fn discretize_path(path: &MarkedPath, k: u64) -> Result<WalkSample> {
    let kf = k as f64;
    if k == 0 || kf * path.horizon < 1.0 {
        return Err(Error::invalid(format!(
            "need k · horizon ≥ 1, got k = {k}, horizon = {}",
            path.horizon
        )));
    }
    let last = (kf * path.horizon).floor() as u64;
    let mut values = Vec::with_capacity(last as usize + 1);
    let mut acc = 0.0;
    let mut next = 0;
    for j in 0..=last {
        let t = j as f64 / kf;
        while next < path.events.len() && path.events[next].time <= t {
            acc += path.events[next].size;
            next += 1;
        }
        values.push(path.drift * t + acc);
    }
    Ok(WalkSample {
        step: 1.0 / kf,
        values,
        source_seed: path.seed,
    })
}

/// A law of random walks, sampled lazily so that estimators stop reading
/// as soon as their functional is determined.
pub trait WalkLaw: Sync {
    type Steps<'a>: Iterator<Item = f64>
    where
        Self: 'a;

    /// Path time per step.
    fn step(&self) -> f64;

    /// `S(1), S(2), …` of the walk with the given seed.
    fn steps(&self, seed: u64) -> Self::Steps<'_>;

    fn sample(&self, len: usize, seed: u64) -> WalkSample {
        let mut values = Vec::with_capacity(len + 1);
        values.push(0.0);
        values.extend(self.steps(seed).take(len));
        WalkSample {
            step: self.step(),
            values,
            source_seed: seed,
        }
    }
}

/// Deterministic `S(j) = slope · j`.
#[derive(Debug, Clone, Copy)]
pub struct LinearWalk {
    pub slope: f64,
    pub step: f64,
}

pub struct LinearSteps {
    slope: f64,
    j: u64,
}

impl Iterator for LinearSteps {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.j += 1;
        Some(self.slope * self.j as f64)
    }
}

impl WalkLaw for LinearWalk {
    type Steps<'a> = LinearSteps;

    fn step(&self) -> f64 {
        self.step
    }

    fn steps(&self, _seed: u64) -> LinearSteps {
        LinearSteps {
            slope: self.slope,
            j: 0,
        }
    }
}

/// `S(j) = Z̃_n(j / k)` drawn through its i.i.d. increments: per step, a
/// Poisson number of jumps (summed as one Gamma draw for an exponential
/// measure) against the drift.
#[derive(Debug, Clone)]
pub struct IncrementWalk {
    drift_step: f64,
    count_mean: f64,
    sizes: Sizes,
    inv_n: f64,
    step: f64,
}

#[derive(Debug, Clone)]
enum Sizes {
    None,
    Gamma(f64),
    Each(JumpSampler),
}

impl IncrementWalk {
    pub fn new(spec: &ProcessSpec, scaling: &ScalingParams, k: u64) -> Result<Self> {
        spec.validate()?;
        scaling.validate()?;
        if k == 0 {
            return Err(Error::invalid("k must be positive"));
        }
        let dt = scaling.d_n / k as f64;
        let m = &spec.levy_measure;
        let sizes = match (m.atoms.as_slice(), m.densities.as_slice()) {
            ([], []) => Sizes::None,
            ([], [Density::Exponential { rate, .. }]) => Sizes::Gamma(*rate),
            _ => Sizes::Each(m.jump_sampler()?),
        };
        Ok(IncrementWalk {
            drift_step: spec.drift * dt,
            count_mean: m.total_mass() * dt,
            sizes,
            inv_n: 1.0 / scaling.n as f64,
            step: 1.0 / k as f64,
        })
    }

    fn increment(&self, rng: &mut CounterRng) -> f64 {
        let jumps = match &self.sizes {
            Sizes::None => 0.0,
            Sizes::Gamma(rate) => {
                let c = Poisson::new(self.count_mean).map(|p| p.sample(rng)).unwrap_or(0.0);
                if c == 0.0 {
                    0.0
                } else {
                    Gamma::new(c, 1.0 / rate).map(|g| g.sample(rng)).unwrap_or(0.0)
                }
            }
            Sizes::Each(s) => {
                let c = Poisson::new(self.count_mean).map(|p| p.sample(rng)).unwrap_or(0.0) as u64;
                (0..c).map(|_| s.sample(rng)).sum()
            }
        };
        (self.drift_step + jumps) * self.inv_n
    }
}

pub struct IncrementSteps<'a> {
    walk: &'a IncrementWalk,
    rng: CounterRng,
    value: f64,
}

impl Iterator for IncrementSteps<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.value += self.walk.increment(&mut self.rng);
        Some(self.value)
    }
}

impl WalkLaw for IncrementWalk {
    type Steps<'a> = IncrementSteps<'a>;

    fn step(&self) -> f64 {
        self.step
    }

    fn steps(&self, seed: u64) -> IncrementSteps<'_> {
        IncrementSteps {
            walk: self,
            rng: CounterRng::new(seed, Domain::Walk),
            value: 0.0,
        }
    }
}

/// Walks read off simulated rescaled paths with [`discretize_path`]; exact
/// but materializes `len` steps of path up front.
#[derive(Debug, Clone)]
pub struct PathWalk {
    spec: ProcessSpec,
    mark: MarkRule,
    scaling: ScalingParams,
    k: u64,
    len: usize,
}

impl PathWalk {
    /// Walks of `len` steps of size `1/k`.
    pub fn new(spec: &ProcessSpec, mark: &MarkRule, scaling: &ScalingParams, k: u64, len: usize) -> Result<Self> {
        spec.validate()?;
        mark.validate()?;
        scaling.validate()?;
        spec.levy_measure.jump_sampler()?;
        if k == 0 || len == 0 {
            return Err(Error::invalid("k and len must be positive"));
        }
        Ok(PathWalk {
            spec: spec.clone(),
            mark: *mark,
            scaling: *scaling,
            k,
            len,
        })
    }
}

impl WalkLaw for PathWalk {
    type Steps<'a> = std::iter::Skip<std::vec::IntoIter<f64>>;

    fn step(&self) -> f64 {
        1.0 / self.k as f64
    }

    fn steps(&self, seed: u64) -> Self::Steps<'_> {
        let target = self.len as f64 / self.k as f64;
        let walk = sample_marked_path(&self.spec, &self.mark, self.scaling.d_n * target, seed)
            .and_then(|p| rescale_path(&p, &self.scaling, target))
            .and_then(|p| discretize_path(&p, self.k))
            .expect("validated in PathWalk::new");
        walk.values.into_iter().skip(1)
    }
}

/// `Σ_{k > K} e^{-k/n} / k ≤ e^{-K/n} / (K (1 - e^{-1/n}))`.
pub fn fristedt_tail_bound(n: f64, k_max: usize) -> f64 {
    let k = k_max as f64;
    (-k / n).exp() / (k * -(-1.0 / n).exp_m1())
}

/// Smallest truncation with tail bound below `tol`.
pub fn fristedt_k_max(n: f64, tol: f64) -> usize {
    let mut k = 1;
    while fristedt_tail_bound(n, k) >= tol {
        k += 1;
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FristedtEstimate {
    pub alpha: f64,
    pub se: f64,
    pub log_alpha: f64,
    pub se_log: f64,
    pub k_max: usize,
    pub tail_bound: f64,
    pub replicates: usize,
}

impl FristedtEstimate {
    /// Errors when the relative standard error exceeds `rel`.
    pub fn require(self, rel: f64) -> Result<Self> {
        if self.se > rel * self.alpha {
            return Err(Error::Precision {
                achieved_se: self.se,
                requested: rel * self.alpha,
            });
        }
        Ok(self)
    }
}

/// `α_n = exp Σ_{k ≤ k_max} e^{-k/n} P(S(k) > 0) / k` with every probability
/// estimated from the same replicates; the standard error of the log comes
/// from the per-replicate sums, and `α`'s from the delta method.
pub fn fristedt_alpha<L: WalkLaw>(
    law: &L,
    n: f64,
    k_max: usize,
    replicates: usize,
    seed: u64,
) -> Result<FristedtEstimate> {
    let tail_bound = fristedt_tail_bound(n, k_max);
    if tail_bound >= 1e-6 {
        return Err(Error::invalid(format!(
            "k_max = {k_max} leaves a tail bound {tail_bound:e} ≥ 1e-6"
        )));
    }
    if replicates < 2 {
        return Err(Error::TooFewSamples {
            got: replicates,
            need: 2,
        });
    }
    let weights: Vec<f64> = (1..=k_max).map(|k| (-(k as f64) / n).exp() / k as f64).collect();
    let sums = crate::parallel::map_indexed(replicates, |i| {
        law.steps(replicate_seed(seed, i as u64))
            .zip(&weights)
            .filter(|(s, _)| *s > 0.0)
            .map(|(_, w)| w)
            .sum::<f64>()
    });
    let (mean, sd) = mean_sd(&sums);
    let se_log = sd / (replicates as f64).sqrt();
    let alpha = mean.exp();
    Ok(FristedtEstimate {
        alpha,
        se: alpha * se_log,
        log_alpha: mean,
        se_log,
        k_max,
        tail_bound,
        replicates,
    })
}

/// Exponent estimate with its Monte Carlo error and censoring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub exponent: f64,
    pub se: f64,
    /// Mean of the transform itself.
    pub transform: f64,
    pub censored_fraction: f64,
    pub replicates: usize,
}

fn finish(values: &[f64], censored: usize) -> Result<ExponentEstimate> {
    let r = values.len();
    let fraction = censored as f64 / r as f64;
    if fraction > MAX_CENSORED {
        return Err(Error::HorizonTooShort {
            fraction,
            limit: MAX_CENSORED,
        });
    }
    let (mean, sd) = mean_sd(values);
    let se = sd / (r as f64).sqrt();
    Ok(ExponentEstimate {
        exponent: -mean.ln(),
        se: se / mean,
        transform: mean,
        censored_fraction: fraction,
        replicates: r,
    })
}

/// `-log E[e^{-δ T(1) - β G(1)}]` for the Poisson-subordinated strict
/// ascending ladder of the walk: `T(1) = 𝚝(N)`, `G(1) = S(𝚝(N))`,
/// `N ~ Poisson(alpha)`. `T` is in path time (steps × step). Walks that do
/// not reach `N` ladder epochs within `max_steps` count as 0 and, unless
/// `e^{-δ · max_steps · step}` is negligible, as censored.
pub fn walk_ladder_exponent<L: WalkLaw>(
    law: &L,
    alpha: f64,
    delta: f64,
    beta: f64,
    replicates: usize,
    max_steps: usize,
    seed: u64,
) -> Result<ExponentEstimate> {
    if !(alpha > 0.0 && delta >= 0.0 && beta >= 0.0) {
        return Err(Error::invalid("need α > 0 and δ, β ≥ 0"));
    }
    if replicates == 0 {
        return Err(Error::TooFewSamples { got: 0, need: 1 });
    }
    let step = law.step();
    let negligible = (-delta * max_steps as f64 * step).exp() < NEGLIGIBLE_WEIGHT;
    let out = crate::parallel::map_indexed(replicates, |i| {
        let s = replicate_seed(seed, i as u64);
        let mut clock = CounterRng::new(s, Domain::Clock);
        let target = Poisson::new(alpha).map(|p| p.sample(&mut clock)).unwrap_or(0.0) as u64;
        if target == 0 {
            return (1.0, false);
        }
        let mut max = 0.0;
        let mut epochs = 0;
        for (j, v) in law.steps(s).take(max_steps).enumerate() {
            if v > max {
                max = v;
                epochs += 1;
                if epochs == target {
                    let t = (j + 1) as f64 * step;
                    return ((-delta * t - beta * max).exp(), false);
                }
            }
        }
        (0.0, !negligible)
    });
    let censored = out.iter().filter(|o| o.1).count();
    let values: Vec<f64> = out.into_iter().map(|o| o.0).collect();
    finish(&values, censored)
}

/// `-log E[e^{-δ L⁻¹(s) - β H⁺(s)}]` from ladders of the continuous path,
/// killed ladders contributing 0. The path-time cap is set where
/// `e^{-δ t}` becomes negligible.
pub fn continuous_ladder_exponent(
    sim: &LadderSimulator,
    d_n: f64,
    delta: f64,
    beta: f64,
    s: f64,
    replicates: usize,
    seed: u64,
) -> Result<ExponentEstimate> {
    if !(delta >= 0.0 && beta >= 0.0 && s >= 0.0) {
        return Err(Error::invalid("need δ, β, s ≥ 0"));
    }
    if replicates == 0 {
        return Err(Error::TooFewSamples { got: 0, need: 1 });
    }
    let mut stop = StopRule::local_time(s);
    if delta > 0.0 {
        stop.horizon = stop.horizon.min(d_n * (-NEGLIGIBLE_WEIGHT.ln()) / delta);
    }
    let negligible = delta > 0.0;
    let out = crate::parallel::map_indexed(replicates, |i| {
        let l = sim.simulate(replicate_seed(seed, i as u64), &stop);
        match l.inverse_local_time(s) {
            Some(t) if t.is_finite() => ((-delta * t - beta * l.h_plus(s)).exp(), false),
            Some(_) => (0.0, false),
            None => (0.0, !negligible),
        }
    });
    let censored = out.iter().filter(|o| o.1).count();
    let values: Vec<f64> = out.into_iter().map(|o| o.0).collect();
    finish(&values, censored)
}

pub(crate) fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LevyMeasureSpec;
    use crate::path::JumpEvent;

    fn hand_path() -> MarkedPath {
        MarkedPath {
            drift: -1.0,
            horizon: 2.0,
            events: vec![JumpEvent {
                time: 0.6,
                size: 3.0,
                mark: false,
            }],
            seed: 4,
        }
    }

    #[test]
    fn drift_walk() {
        let p = MarkedPath {
            drift: -1.0,
            horizon: 1.0,
            events: vec![],
            seed: 0,
        };
        let w = discretize_path(&p, 4).unwrap();
        assert_eq!(w.values, vec![0.0, -0.25, -0.5, -0.75, -1.0]);
        assert_eq!(w.step, 0.25);
    }

    #[test]
    fn single_jump_by_hand() {
        let w = discretize_path(&hand_path(), 2).unwrap();
        // t = 0, 0.5, 1, 1.5, 2 with the jump at 0.6
        assert_eq!(w.values, vec![0.0, -0.5, 2.0, 1.5, 1.0]);
    }

    #[test]
    fn refinement_agrees_on_common_points() {
        let spec = ProcessSpec::new(-1.0, LevyMeasureSpec::exponential(1.0, 1.0));
        let p = sample_marked_path(&spec, &MarkRule::always(), 30.0, 2).unwrap();
        let a = discretize_path(&p, 8).unwrap();
        let b = discretize_path(&p, 16).unwrap();
        for (j, v) in a.values.iter().enumerate() {
            assert_eq!(*v, b.values[2 * j]);
            assert_eq!(*v, p.value(j as f64 / 8.0));
        }
        assert!(discretize_path(&p, 0).is_err());
    }

    #[test]
    fn fristedt_trivial_walks() {
        let down = LinearWalk { slope: -1.0, step: 1.0 };
        let k = fristedt_k_max(1.0, 1e-7);
        let e = fristedt_alpha(&down, 1.0, k, 10, 0).unwrap();
        assert_eq!((e.alpha, e.se), (1.0, 0.0));
        let up = LinearWalk { slope: 1.0, step: 1.0 };
        let e = fristedt_alpha(&up, 1.0, k, 10, 0).unwrap();
        let exact = 1.0 / (1.0 - (-1.0f64).exp());
        assert!((e.alpha - exact).abs() < 1e-6 * exact);
        assert!(fristedt_alpha(&up, 1.0, 3, 10, 0).is_err());
    }

    #[test]
    fn tail_bound_controls_truncation() {
        for n in [1.0, 4.0, 64.0] {
            let k = fristedt_k_max(n, 1e-6);
            let direct: f64 = (k + 1..k + 200_000).map(|j| (-(j as f64) / n).exp() / j as f64).sum();
            assert!(direct <= fristedt_tail_bound(n, k));
            assert!(fristedt_tail_bound(n, k) < 1e-6 && fristedt_tail_bound(n, k - 1) >= 1e-6);
        }
    }

    #[test]
    fn zero_transform_exponent() {
        let up = LinearWalk { slope: 1.0, step: 0.5 };
        let e = walk_ladder_exponent(&up, 3.0, 0.0, 0.0, 100, 1000, 1).unwrap();
        assert_eq!((e.exponent, e.censored_fraction), (0.0, 0.0));
        let down = LinearWalk { slope: -1.0, step: 0.5 };
        let r = walk_ladder_exponent(&down, 3.0, 0.0, 0.0, 200, 1000, 1);
        assert!(matches!(r, Err(Error::HorizonTooShort { .. })));
    }

    #[test]
    fn increment_walk_matches_path_walk_in_mean() {
        let spec = ProcessSpec::new(-1.0, LevyMeasureSpec::exponential(1.0, 1.0));
        let sc = ScalingParams::new(2, 4.0);
        let inc = IncrementWalk::new(&spec, &sc, 2).unwrap();
        let pw = PathWalk::new(&spec, &MarkRule::always(), &sc, 2, 4).unwrap();
        // S(4) = Z̃(2) has mean 0 and variance 2 · 4 · 2 / 4 = 4
        for s in [inc.sample(4, 0).values.len(), pw.sample(4, 0).values.len()] {
            assert_eq!(s, 5);
        }
        let r = 20_000;
        let a: Vec<f64> = (0..r).map(|i| inc.sample(4, i).values[4]).collect();
        let b: Vec<f64> = (0..r).map(|i| pw.sample(4, i).values[4]).collect();
        for x in [a, b] {
            let (m, sd) = mean_sd(&x);
            assert!(m.abs() < 4.0 * 2.0 / (r as f64).sqrt(), "mean {m}");
            assert!((sd - 2.0).abs() < 0.1, "sd {sd}");
        }
    }
}
