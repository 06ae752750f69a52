//! Direct simulation of the ladder process, record by record, without
//! storing the path.
//!
//! Two engines produce the same law. The event engine draws jumps one at a
//! time. The block engine, for a single exponential jump component, works at
//! depth `D` below the supremum: over a block holding about `D·a/2` expected
//! jumps it draws the jump count `N ~ Poisson` and the total `G | N ~
//! Gamma(N, a)`. When `G < D` no record is possible inside the block and it
//! is skipped whole. Otherwise the block is halved with `N₁ ~ Bin(N, 1/2)`
//! and `G₁ = G · Beta(N₁, N - N₁)`, down to a handful of jumps which get
//! uniform order-statistic times and Dirichlet-split sizes. Critical
//! excursions have heavy-tailed durations, and this keeps the expected cost
//! per excursion logarithmic in the horizon.
//!
//! A subcritical ladder is declared killed once the depth exceeds the
//! clearance `ln(1/ε)/R`, `R` the Lundberg exponent, since any further
//! record then has probability at most `ε`.

use rand_distr::{Beta, Binomial, Distribution, Gamma, Poisson};

use crate::calculus::{self, MarkRule, ProcessSpec, ScalingParams};
use crate::error::{Error, Result};
use crate::ladder::{LadderPoint, LadderProcess};
use crate::measure::{Density, JumpSampler};
use crate::rng::{CounterRng, Domain};

/// Probability bound accepted when declaring a ladder killed.
pub const KILL_EPSILON: f64 = 1e-12;

/// Default cap on path time, in unscaled units.
pub const DEFAULT_HORIZON: f64 = 1e12;

const EXPAND_BELOW: u64 = 8;
const SINGLE_STEP_BELOW: f64 = 4.0;

/// When to stop generating ladder points: once every condition that is set
/// holds. With none set the ladder runs until it is killed or censored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    /// Local time has passed this value.
    pub local_time: Option<f64>,
    /// A marked point has been seen.
    pub first_mark: bool,
    pub max_records: Option<usize>,
    /// Cap on unscaled path time; reaching it censors the ladder.
    pub horizon: f64,
}

impl StopRule {
    pub fn local_time(s: f64) -> Self {
        StopRule {
            local_time: Some(s),
            ..Self::default()
        }
    }

    pub fn first_mark() -> Self {
        StopRule {
            first_mark: true,
            ..Self::default()
        }
    }

    pub fn records(k: usize) -> Self {
        StopRule {
            max_records: Some(k),
            ..Self::default()
        }
    }

    pub fn with_horizon(self, horizon: f64) -> Self {
        StopRule { horizon, ..self }
    }

    pub fn and_first_mark(self) -> Self {
        StopRule {
            first_mark: true,
            ..self
        }
    }

    fn holds(&self, l: f64, records: usize, marked: bool) -> bool {
        let mut any = false;
        let mut all = true;
        if let Some(s) = self.local_time {
            any = true;
            all &= l > s;
        }
        if let Some(k) = self.max_records {
            any = true;
            all &= records >= k;
        }
        if self.first_mark {
            any = true;
            all &= marked;
        }
        any && all
    }
}

impl Default for StopRule {
    /// Run until killed or until the default horizon.
    fn default() -> Self {
        StopRule {
            local_time: None,
            first_mark: false,
            max_records: None,
            horizon: DEFAULT_HORIZON,
        }
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Blocks { mass: f64, rate: f64 },
    Events(JumpSampler),
}

#[derive(Debug, Clone, Copy)]
enum Next {
    Record { time: f64, gap: f64, size: f64 },
    Killed,
    Censored,
}

#[derive(Debug, Clone, Copy)]
enum Block {
    Record { time: f64, gap: f64, size: f64 },
    Clear { depth: f64 },
}

/// Ladder sampler for one unscaled spec seen through one scaling.
#[derive(Debug, Clone)]
pub struct LadderSimulator {
    /// |drift| of the unscaled process.
    speed: f64,
    mark: MarkRule,
    engine: Engine,
    clearance: f64,
    /// Local-time rate α = d_n / n of the rescaled process.
    pub alpha: f64,
    inv_n: f64,
    inv_d: f64,
}

impl LadderSimulator {
    /// Picks the block engine when the measure is one exponential component.
    pub fn new(spec: &ProcessSpec, mark: &MarkRule, scaling: &ScalingParams) -> Result<Self> {
        let m = &spec.levy_measure;
        let engine = match (m.atoms.as_slice(), m.densities.as_slice()) {
            ([], [Density::Exponential { mass, rate }]) => Engine::Blocks {
                mass: *mass,
                rate: *rate,
            },
            _ => Engine::Events(m.jump_sampler()?),
        };
        Self::build(spec, mark, scaling, engine)
    }

    /// Forces the event engine.
    pub fn events_only(spec: &ProcessSpec, mark: &MarkRule, scaling: &ScalingParams) -> Result<Self> {
        let engine = Engine::Events(spec.levy_measure.jump_sampler()?);
        Self::build(spec, mark, scaling, engine)
    }

    fn build(spec: &ProcessSpec, mark: &MarkRule, scaling: &ScalingParams, engine: Engine) -> Result<Self> {
        spec.validate()?;
        mark.validate()?;
        scaling.validate()?;
        let clearance = match calculus::lundberg_exponent(spec) {
            Some(r) if r.is_infinite() => 0.0,
            Some(r) => (1.0 / KILL_EPSILON).ln() / r,
            None => f64::INFINITY,
        };
        let n = scaling.n as f64;
        Ok(LadderSimulator {
            speed: -spec.drift,
            mark: *mark,
            engine,
            clearance,
            alpha: scaling.d_n / n,
            inv_n: 1.0 / n,
            inv_d: 1.0 / scaling.d_n,
        })
    }

    pub fn uses_blocks(&self) -> bool {
        matches!(self.engine, Engine::Blocks { .. })
    }

    /// One ladder, in rescaled units, deterministic in `seed`.
    pub fn simulate(&self, seed: u64, stop: &StopRule) -> LadderProcess {
        let mut path_rng = CounterRng::new(seed, Domain::Path);
        let mut clock = CounterRng::new(seed, Domain::Clock);
        let mut points: Vec<LadderPoint> = Vec::new();
        let (mut t, mut depth, mut sup) = (0.0f64, 0.0f64, 0.0f64);
        let mut l = clock.exp(self.alpha);
        let mut marked = false;
        loop {
            if stop.holds(l, points.len(), marked) {
                return LadderProcess {
                    points,
                    total_local_time: l,
                    censored: true,
                };
            }
            match self.next_record(&mut path_rng, &mut t, &mut depth, stop.horizon) {
                Next::Record { time, gap, size } => {
                    let mark = path_rng.bernoulli(self.mark.prob(size));
                    marked |= mark;
                    sup += size - gap;
                    let mut p = LadderPoint::from_gap(
                        time * self.inv_d,
                        gap * self.inv_n,
                        size * self.inv_n,
                        sup * self.inv_n,
                        mark,
                    );
                    p.local_time = l;
                    points.push(p);
                    depth = 0.0;
                    l += clock.exp(self.alpha);
                }
                Next::Killed => {
                    return LadderProcess {
                        points,
                        total_local_time: l,
                        censored: false,
                    }
                }
                Next::Censored => {
                    return LadderProcess {
                        points,
                        total_local_time: l,
                        censored: true,
                    }
                }
            }
        }
    }

    fn next_record(&self, rng: &mut CounterRng, t: &mut f64, depth: &mut f64, cap: f64) -> Next {
        loop {
            if *depth > self.clearance {
                return Next::Killed;
            }
            if *t >= cap {
                return Next::Censored;
            }
            let (mass, rate, single) = match &self.engine {
                Engine::Blocks { mass, rate } => (*mass, *rate, *depth * rate / 2.0 < SINGLE_STEP_BELOW),
                Engine::Events(s) => (s.total_mass, 0.0, true),
            };
            if mass == 0.0 {
                // pure drift: the depth only grows
                *depth += self.speed * (cap - *t);
                *t = cap;
                continue;
            }
            if single {
                let w = rng.exp(mass);
                if *t + w > cap {
                    *depth += self.speed * (cap - *t);
                    *t = cap;
                    continue;
                }
                *t += w;
                *depth += self.speed * w;
                let size = match &self.engine {
                    Engine::Blocks { rate, .. } => rng.exp(*rate),
                    Engine::Events(s) => s.sample(rng),
                };
                if size > *depth {
                    return Next::Record {
                        time: *t,
                        gap: *depth,
                        size,
                    };
                }
                *depth -= size;
                continue;
            }
            let span = (*depth * rate / 2.0 / mass).min(cap - *t);
            let n = poisson(rng, mass * span);
            let g = if n == 0 { 0.0 } else { gamma(rng, n, rate) };
            match self.resolve(rng, *t, span, n, g, *depth) {
                Block::Record { time, gap, size } => {
                    *t = time;
                    return Next::Record { time, gap, size };
                }
                Block::Clear { depth: d } => {
                    *t += span;
                    *depth = d;
                }
            }
        }
    }

    /// First record inside a block of length `span` holding `n` jumps of total `g`.
    #[allow(clippy::too_many_arguments)]
    fn resolve(&self, rng: &mut CounterRng, t0: f64, span: f64, n: u64, g: f64, depth: f64) -> Block {
        if g < depth {
            return Block::Clear {
                depth: depth + self.speed * span - g,
            };
        }
        if n <= EXPAND_BELOW {
            let mut times: Vec<f64> = (0..n).map(|_| t0 + span * rng.open01()).collect();
            times.sort_by(|a, b| a.total_cmp(b));
            let e: Vec<f64> = (0..n).map(|_| rng.exp(1.0)).collect();
            let total: f64 = e.iter().sum();
            let (mut now, mut d) = (t0, depth);
            for (time, ei) in times.into_iter().zip(e) {
                d += self.speed * (time - now);
                now = time;
                let size = g * (ei / total);
                if size > d {
                    return Block::Record { time, gap: d, size };
                }
                d -= size;
            }
            return Block::Clear {
                depth: d + self.speed * (t0 + span - now),
            };
        }
        let n1 = binomial_half(rng, n);
        let g1 = if n1 == 0 {
            0.0
        } else if n1 == n {
            g
        } else {
            g * beta(rng, n1, n - n1)
        };
        let half = 0.5 * span;
        match self.resolve(rng, t0, half, n1, g1, depth) {
            Block::Record { time, gap, size } => Block::Record { time, gap, size },
            Block::Clear { depth: d } => self.resolve(rng, t0 + half, half, n - n1, (g - g1).max(0.0), d),
        }
    }
}

fn poisson(rng: &mut CounterRng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
}

fn gamma(rng: &mut CounterRng, shape: u64, rate: f64) -> f64 {
    Gamma::new(shape as f64, 1.0 / rate)
        .map(|g| g.sample(rng))
        .unwrap_or(0.0)
}

fn binomial_half(rng: &mut CounterRng, n: u64) -> u64 {
    Binomial::new(n, 0.5).map(|b| b.sample(rng)).unwrap_or(0)
}

fn beta(rng: &mut CounterRng, a: u64, b: u64) -> f64 {
    Beta::new(a as f64, b as f64).map(|d| d.sample(rng)).unwrap_or(0.5)
}

/// Ladders for replicates `0..count` with seeds `seed_of(i)`, in index order.
pub fn simulate_batch<S>(sim: &LadderSimulator, count: usize, stop: &StopRule, seed_of: S) -> Vec<LadderProcess>
where
    S: Fn(u64) -> u64 + Sync + Send,
{
    crate::parallel::map_indexed(count, |i| sim.simulate(seed_of(i as u64), stop))
}

/// Fraction of censored ladders; errors above `limit`.
pub fn check_censoring(
    ladders: &[LadderProcess],
    observed: impl Fn(&LadderProcess) -> bool,
    limit: f64,
) -> Result<f64> {
    if ladders.is_empty() {
        return Ok(0.0);
    }
    let censored = ladders.iter().filter(|l| !observed(l)).count();
    let fraction = censored as f64 / ladders.len() as f64;
    if fraction > limit {
        return Err(Error::HorizonTooShort { fraction, limit });
    }
    Ok(fraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LevyMeasureSpec;

    fn exp_spec(mass: f64) -> ProcessSpec {
        ProcessSpec::new(-1.0, LevyMeasureSpec::exponential(mass, 1.0))
    }

    #[test]
    fn engines_are_selected_by_measure() {
        let s = LadderSimulator::new(&exp_spec(1.0), &MarkRule::always(), &ScalingParams::identity()).unwrap();
        assert!(s.uses_blocks());
        let u = ProcessSpec::new(-1.0, LevyMeasureSpec::uniform(1.0, 0.0, 2.0));
        let s = LadderSimulator::new(&u, &MarkRule::always(), &ScalingParams::identity()).unwrap();
        assert!(!s.uses_blocks());
    }

    #[test]
    fn deterministic_and_exact_split() {
        let s = LadderSimulator::new(&exp_spec(1.0), &MarkRule::always(), &ScalingParams::new(4, 16.0)).unwrap();
        let a = s.simulate(11, &StopRule::records(50));
        assert_eq!(a, s.simulate(11, &StopRule::records(50)));
        assert_eq!(a.points.len(), 50);
        for w in a.points.windows(2) {
            assert!(w[0].local_time < w[1].local_time);
            assert!(w[0].record_time < w[1].record_time);
            assert!(w[0].level < w[1].level);
        }
        assert!(a.points.iter().all(|p| p.overshoot > 0.0 && p.undershoot >= 0.0));
    }

    #[test]
    fn drift_only_is_killed_immediately() {
        let spec = ProcessSpec::new(-1.0, LevyMeasureSpec::zero());
        let s = LadderSimulator::new(&spec, &MarkRule::always(), &ScalingParams::identity()).unwrap();
        let l = s.simulate(3, &StopRule::default());
        assert!(l.points.is_empty());
        assert!(!l.censored);
    }

    #[test]
    fn subcritical_ladders_end_killed() {
        let s = LadderSimulator::new(&exp_spec(0.5), &MarkRule::always(), &ScalingParams::identity()).unwrap();
        let ladders = simulate_batch(&s, 200, &StopRule::default(), |i| i);
        assert!(ladders.iter().all(|l| !l.censored));
    }

    #[test]
    fn block_engine_matches_event_engine_in_mean() {
        // mean number of records before local time 1 is μ⁺ mass = n for the critical preset
        let sc = ScalingParams::new(4, 16.0);
        let blocks = LadderSimulator::new(&exp_spec(1.0), &MarkRule::always(), &sc).unwrap();
        let events = LadderSimulator::events_only(&exp_spec(1.0), &MarkRule::always(), &sc).unwrap();
        let stop = StopRule::local_time(1.0).with_horizon(1e6);
        let count = 4000;
        for sim in [&blocks, &events] {
            let ls = simulate_batch(sim, count, &stop, |i| 1000 + i);
            let k: Vec<f64> = ls.iter().map(|l| l.count_until(1.0) as f64).collect();
            let mean = k.iter().sum::<f64>() / count as f64;
            let var = k.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / count as f64;
            assert!((mean - 4.0).abs() < 4.0 * (var / count as f64).sqrt(), "mean {mean}");
        }
    }
}
