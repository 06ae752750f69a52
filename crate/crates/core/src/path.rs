//! Exact simulation of marked finite-variation paths as event lists.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::calculus::{MarkRule, ProcessSpec, ScalingParams};
use crate::csv;
use crate::error::{Error, Result};
use crate::rng::{CounterRng, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub time: f64,
    pub size: f64,
    pub mark: bool,
}

/// `X(t) = drift · t + Σ_{time ≤ t} size`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkedPath {
    pub drift: f64,
    pub horizon: f64,
    pub events: Vec<JumpEvent>,
    pub seed: u64,
}

impl MarkedPath {
    /// Number of events with time ≤ t.
    pub fn count_until(&self, t: f64) -> usize {
        self.events.partition_point(|e| e.time <= t)
    }

    /// X(t), summing sizes in event order.
    pub fn value(&self, t: f64) -> f64 {
        let k = self.count_until(t);
        let jumps: f64 = self.events[..k].iter().map(|e| e.size).sum();
        self.drift * t + jumps
    }

    /// `(X(t_i-), X(t_i-) + r_i)` for every event, in one pass. The running
    /// supremum and the record scan are both defined on these values.
    pub fn jump_values(&self) -> Vec<(f64, f64)> {
        let mut acc = 0.0;
        self.events
            .iter()
            .map(|e| {
                let before = self.drift * e.time + acc;
                acc += e.size;
                (before, before + e.size)
            })
            .collect()
    }

    /// sup_{s ≤ t} X(s); the drift is negative, so the supremum is 0 or a post-jump value.
    pub fn supremum(&self, t: f64) -> f64 {
        let k = self.count_until(t);
        self.jump_values()[..k].iter().fold(0.0, |m, v| m.max(v.1))
    }

    pub fn mark_count(&self) -> usize {
        self.events.iter().filter(|e| e.mark).count()
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let rows = self
            .events
            .iter()
            .map(|e| vec![csv::real(e.time), csv::real(e.size), (e.mark as u8).to_string()]);
        csv::write_table(out, &["time", "size", "mark"], rows)
    }
}

/// Compound Poisson jumps plus drift on `(0, horizon]`, deterministic in `seed`.
pub fn sample_marked_path(spec: &ProcessSpec, mark: &MarkRule, horizon: f64, seed: u64) -> Result<MarkedPath> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    spec.validate()?;
    mark.validate()?;
    let sampler = spec.levy_measure.jump_sampler()?;
    let mut events = Vec::new();
    if !sampler.is_empty() {
        let mut rng = CounterRng::new(seed, Domain::Path);
        let rate = sampler.total_mass;
        let mut t = rng.exp(rate);
        while t <= horizon {
            let size = sampler.sample(&mut rng);
            let m = rng.bernoulli(mark.prob(size));
            events.push(JumpEvent { time: t, size, mark: m });
            t += rng.exp(rate);
        }
    }
    Ok(MarkedPath {
        drift: spec.drift,
        horizon,
        events,
        seed,
    })
}

/// `(1/n) X(d_n t)`: times divided by d_n, sizes by n.
pub fn rescale_path(path: &MarkedPath, scaling: &ScalingParams, target_horizon: f64) -> Result<MarkedPath> {
    scaling.validate()?;
    let (n, d) = (scaling.n as f64, scaling.d_n);
    if path.horizon < d * target_horizon {
        return Err(Error::invalid(format!(
            "path horizon {} shorter than d_n · target = {}",
            path.horizon,
            d * target_horizon
        )));
    }
    let events = path
        .events
        .iter()
        .filter(|e| e.time / d <= target_horizon)
        .map(|e| JumpEvent {
            time: e.time / d,
            size: e.size / n,
            mark: e.mark,
        })
        .collect();
    Ok(MarkedPath {
        drift: path.drift * d / n,
        horizon: target_horizon,
        events,
        seed: path.seed,
    })
}
