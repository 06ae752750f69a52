//! The limit marked ladder height process: a possibly killed bivariate
//! subordinator `(H⁺, Hᴹ)` with drift `(drift_plus, 0)`, jumps from a ladder
//! measure and an independent stream of pure marks.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::csv;
use crate::error::{Error, Result};
use crate::ladder_measure::{g_eta, LadderMeasure};
use crate::measure::{Density, LevyMeasureSpec};
use crate::presets::LimitSpec;
use crate::rng::{CounterRng, Domain};

#[derive(Debug, Clone)]
pub struct SubordinatorSpec {
    pub drift_plus: f64,
    pub jump_measure: LadderMeasure,
    /// Rate of marks carried by no height increment.
    pub independent_mark_rate: f64,
    /// 0 means never killed.
    pub kill: f64,
}

impl SubordinatorSpec {
    pub fn new(drift_plus: f64, jump_measure: LadderMeasure, independent_mark_rate: f64, kill: f64) -> Self {
        SubordinatorSpec {
            drift_plus,
            jump_measure,
            independent_mark_rate,
            kill,
        }
    }

    /// Limit of a registered family. Only zero limit Lévy measures are
    /// supported, which covers every preset.
    pub fn from_limit(limit: &LimitSpec) -> Result<Self> {
        if !limit.limit_measure.is_zero() {
            return Err(Error::UnsupportedMeasure("limit with a nonzero Lévy measure".into()));
        }
        Ok(SubordinatorSpec {
            drift_plus: limit.b2 / 2.0,
            jump_measure: LadderMeasure::zero(),
            independent_mark_rate: limit.theta + limit.rho,
            kill: limit.kill,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x >= 0.0 && x.is_finite();
        if !(ok(self.drift_plus) && ok(self.independent_mark_rate) && ok(self.kill)) {
            return Err(Error::invalid(format!(
                "subordinator coefficients must be finite and nonnegative: drift {}, mark rate {}, kill {}",
                self.drift_plus, self.independent_mark_rate, self.kill
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorEvent {
    pub local_time: f64,
    pub dh_plus: f64,
    pub dh_mark: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorPath {
    pub horizon: f64,
    pub drift_plus: f64,
    /// Events strictly before both the horizon and the kill time.
    pub events: Vec<SubordinatorEvent>,
    pub kill_time: f64,
}

impl SubordinatorPath {
    pub fn alive_at(&self, t: f64) -> bool {
        t < self.kill_time
    }

    /// `(H⁺(t), Hᴹ(t))`; `None` once killed.
    pub fn value(&self, t: f64) -> Option<(f64, u64)> {
        if !self.alive_at(t) {
            return None;
        }
        let k = self.events.partition_point(|e| e.local_time <= t);
        let jumps: f64 = self.events[..k].iter().map(|e| e.dh_plus).sum();
        let marks = self.events[..k].iter().map(|e| e.dh_mark as u64).sum();
        Some((self.drift_plus * t + jumps, marks))
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let rows = self
            .events
            .iter()
            .map(|e| vec![csv::real(e.local_time), csv::real(e.dh_plus), e.dh_mark.to_string()]);
        csv::write_table(out, &["local_time", "dh_plus", "dh_mark"], rows)
    }
}

/// Exact sampler for a finite ladder measure.
///
/// A jump of μ is the tail `y = z - x` of a Λ-jump `z` entered at depth `x`.
/// Its total `z` has law `g_η(z) Λ(dz)` (normalized), the depth given `z` has
/// density ∝ `e^{-ηx}` on `[0, z]`, and the mark is `Bern(f(z))`.
#[derive(Debug, Clone)]
struct LadderJumpSampler {
    eta: f64,
    weights: Vec<f64>,
    parts: Vec<Part>,
    total: f64,
}

#[derive(Debug, Clone, Copy)]
enum Part {
    Atom(f64),
    Density(Density),
}

impl LadderJumpSampler {
    fn new(lm: &LadderMeasure) -> Result<Self> {
        if !lm.mu_plus_mass.is_finite() {
            return Err(Error::UnsupportedMeasure("ladder measure with infinite mass".into()));
        }
        let eta = lm.eta;
        let m: &LevyMeasureSpec = &lm.levy_measure;
        let mut weights = Vec::new();
        let mut parts = Vec::new();
        for a in &m.atoms {
            weights.push(a.mass * g_eta(eta, a.location));
            parts.push(Part::Atom(a.location));
        }
        for d in &m.densities {
            let w = if eta == 0.0 {
                d.first_moment()
            } else {
                d.laplace_part(eta)? / eta
            };
            if eta == 0.0 {
                if let Density::PowerCutoff { beta, .. } = *d {
                    if beta <= 2.0 {
                        return Err(Error::UnsupportedMeasure("size-biased power law needs beta > 2".into()));
                    }
                }
            } else if !d.mass().is_finite() {
                return Err(Error::UnsupportedMeasure(
                    "ladder sampling needs a finite Lévy measure when η > 0".into(),
                ));
            }
            weights.push(w);
            parts.push(Part::Density(*d));
        }
        let total = weights.iter().sum();
        Ok(LadderJumpSampler {
            eta,
            weights,
            parts,
            total,
        })
    }

    fn total_z(&self, rng: &mut CounterRng) -> f64 {
        let mut u = rng.open01() * self.total;
        let mut k = self.parts.len() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            if u < *w {
                k = i;
                break;
            }
            u -= w;
        }
        match self.parts[k] {
            Part::Atom(x) => x,
            Part::Density(d) if self.eta == 0.0 => size_biased(&d, rng),
            Part::Density(d) => loop {
                // Λ-proposal accepted with η g_η(z) = 1 - e^{-ηz}
                let z = d.sample(rng);
                if rng.open01() < -(-self.eta * z).exp_m1() {
                    break z;
                }
            },
        }
    }

    /// `(overshoot, mark)`.
    fn sample(&self, lm: &LadderMeasure, rng: &mut CounterRng) -> (f64, bool) {
        let z = self.total_z(rng);
        let u = rng.open01();
        let x = if self.eta == 0.0 {
            z * u
        } else {
            -(u * (-self.eta * z).exp_m1()).ln_1p() / self.eta
        };
        let y = (z - x).max(f64::MIN_POSITIVE);
        (y, rng.bernoulli(lm.mark.prob(z)))
    }
}

/// Draw from `r Λ_c(dr)` normalized.
fn size_biased(d: &Density, rng: &mut CounterRng) -> f64 {
    match *d {
        // Gamma(2, rate)
        Density::Exponential { rate, .. } => (rng.exp(1.0) + rng.exp(1.0)) / rate,
        Density::Uniform { lo, hi, .. } => (lo * lo + rng.open01() * (hi * hi - lo * lo)).sqrt(),
        Density::PowerCutoff { beta, cutoff, .. } => cutoff * rng.open01().powf(-1.0 / (beta - 2.0)),
    }
}

/// One path of the subordinator on `[0, horizon]`, deterministic in `seed`.
pub fn sample_subordinator(spec: &SubordinatorSpec, horizon: f64, seed: u64) -> Result<SubordinatorPath> {
    spec.validate()?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    let jumps = if spec.jump_measure.is_zero() {
        None
    } else {
        Some(LadderJumpSampler::new(&spec.jump_measure)?)
    };
    Ok(sample_with(spec, jumps.as_ref(), horizon, seed))
}

fn sample_with(
    spec: &SubordinatorSpec,
    jumps: Option<&LadderJumpSampler>,
    horizon: f64,
    seed: u64,
) -> SubordinatorPath {
    let mut rng = CounterRng::new(seed, Domain::Subordinator);
    let kill_time = if spec.kill > 0.0 {
        rng.exp(spec.kill)
    } else {
        f64::INFINITY
    };
    let end = horizon.min(kill_time);
    let jump_rate = jumps.map_or(0.0, |j| j.total);
    let rate = jump_rate + spec.independent_mark_rate;
    let mut events = Vec::new();
    if rate > 0.0 {
        let mut t = rng.exp(rate);
        while t < end {
            let event = match jumps {
                Some(j) if rng.open01() * rate < jump_rate => {
                    let (y, q) = j.sample(&spec.jump_measure, &mut rng);
                    SubordinatorEvent {
                        local_time: t,
                        dh_plus: y,
                        dh_mark: q as u8,
                    }
                }
                _ => SubordinatorEvent {
                    local_time: t,
                    dh_plus: 0.0,
                    dh_mark: 1,
                },
            };
            events.push(event);
            t += rng.exp(rate);
        }
    }
    SubordinatorPath {
        horizon,
        drift_plus: spec.drift_plus,
        events,
        kill_time,
    }
}

/// `(H⁺(t), Hᴹ(t))` for replicates `0..count` with seeds `base ^ i`; `None`
/// for replicates killed by `t`.
pub fn sample_values(spec: &SubordinatorSpec, t: f64, count: usize, base: u64) -> Result<Vec<Option<(f64, u64)>>> {
    spec.validate()?;
    let jumps = if spec.jump_measure.is_zero() {
        None
    } else {
        Some(LadderJumpSampler::new(&spec.jump_measure)?)
    };
    Ok(crate::parallel::map_indexed(count, |i| {
        sample_with(spec, jumps.as_ref(), t, crate::rng::replicate_seed(base, i as u64)).value(t)
    }))
}

/// `Φ(β, γ)` with `E[e^{-βH⁺(1) - γHᴹ(1)}; alive at 1] = e^{-Φ(β, γ)}`.
pub fn subordinator_exponent(spec: &SubordinatorSpec, beta: f64, gamma: f64) -> Result<f64> {
    if !(beta >= 0.0 && gamma >= 0.0) {
        return Err(Error::invalid("β and γ must be nonnegative"));
    }
    Ok(spec.kill
        + spec.drift_plus * beta
        + spec.independent_mark_rate * -(-gamma).exp_m1()
        + spec.jump_measure.laplace_part(beta, gamma)?)
}
