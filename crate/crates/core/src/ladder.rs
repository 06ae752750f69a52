//! Records of a path, the local time at the supremum and the trivariate
//! ladder process `(H⁺, H⁻, Hᴹ)` indexed by local time.
//!
//! Local time is `L(t) = Σ_{i=0}^{ℓ(t)} τ_i` with `ℓ(t)` the number of
//! records up to `t` and `τ_i` i.i.d. Exp(α). The sum starts at `i = 0`, so
//! `L(0) = τ_0 > 0` and record `i` (0-based) sits at local time
//! `τ_0 + … + τ_i`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::csv;
use crate::error::{Error, Result};
use crate::path::MarkedPath;
use crate::rng::{CounterRng, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub record_time: f64,
    /// Assigned by [`trivariate_ladder`]; 0 straight out of the record scan.
    pub local_time: f64,
    pub overshoot: f64,
    pub undershoot: f64,
    pub mark: bool,
    /// Supremum right after the record.
    pub level: f64,
}

impl LadderPoint {
    /// Splits a record jump of size `r` from `value_before`, with old supremum
    /// `sup` and new supremum `level`.
    pub fn from_jump(record_time: f64, sup: f64, value_before: f64, r: f64, level: f64, mark: bool) -> LadderPoint {
        Self::from_gap(record_time, sup - value_before, r, level, mark)
    }

    /// Splits a record jump of size `r` that started `gap` below the old
    /// supremum, so that `overshoot + undershoot == r` holds exactly in
    /// floating point.
    pub fn from_gap(record_time: f64, gap: f64, r: f64, level: f64, mark: bool) -> LadderPoint {
        let u0 = gap.max(0.0);
        // a record has r > gap in exact arithmetic; keep it so after rounding
        let u0 = if u0 < r { u0 } else { r.next_down() };
        let overshoot = r - u0;
        let undershoot = r - overshoot;
        LadderPoint {
            record_time,
            local_time: 0.0,
            overshoot,
            undershoot,
            mark,
            level,
        }
    }
}

/// Record jumps of `path`: strict new maxima, scanning in time order.
pub fn record_decomposition(path: &MarkedPath) -> Vec<LadderPoint> {
    let mut sup = 0.0;
    let mut out = Vec::new();
    for (e, (before, after)) in path.events.iter().zip(path.jump_values()) {
        if after > sup {
            out.push(LadderPoint::from_jump(e.time, sup, before, e.size, after, e.mark));
            sup = after;
        }
    }
    out
}

/// Local-time clock driven by the record times.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTimeClock {
    pub alpha: f64,
    /// τ_0, …, τ_k for k records.
    pub weights: Vec<f64>,
    pub record_times: Vec<f64>,
    /// Partial sums τ_0 + … + τ_i.
    cumulative: Vec<f64>,
}

/// Draws the weights from the clock stream of `seed`.
pub fn local_time_clock(points: &[LadderPoint], alpha: f64, seed: u64) -> Result<LocalTimeClock> {
    let mut rng = CounterRng::new(seed, Domain::Clock);
    let weights: Vec<f64> = (0..=points.len()).map(|_| rng.exp(alpha)).collect();
    LocalTimeClock::from_weights(points.iter().map(|p| p.record_time).collect(), alpha, weights)
}

impl LocalTimeClock {
    pub fn from_weights(record_times: Vec<f64>, alpha: f64, weights: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
        }
        if weights.len() != record_times.len() + 1 {
            return Err(Error::invalid("need one weight per record plus τ_0"));
        }
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(LocalTimeClock {
            alpha,
            weights,
            record_times,
            cumulative,
        })
    }

    /// ℓ(t): records with time ≤ t.
    pub fn jump_count(&self, t: f64) -> usize {
        self.record_times.partition_point(|&r| r <= t)
    }

    /// L(t).
    pub fn local_time(&self, t: f64) -> f64 {
        self.cumulative[self.jump_count(t)]
    }

    /// Local time at which record `i` (0-based) happens.
    pub fn record_local_time(&self, i: usize) -> f64 {
        self.cumulative[i]
    }

    /// L⁻¹(s) = inf{u : L(u) > s}; `+∞` once the clock is exhausted.
    pub fn inverse(&self, s: f64) -> f64 {
        let j = self.cumulative.partition_point(|&c| c <= s);
        match j {
            0 => 0.0,
            j if j <= self.record_times.len() => self.record_times[j - 1],
            _ => f64::INFINITY,
        }
    }

    /// L at the end of observation.
    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }
}

/// Trivariate ladder with its censoring flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderProcess {
    pub points: Vec<LadderPoint>,
    /// L(∞) when not censored, else the local time reached before censoring.
    pub total_local_time: f64,
    /// Observation stopped before the process was known to be killed.
    pub censored: bool,
}

/// Attaches local times to `points`.
pub fn trivariate_ladder(points: &[LadderPoint], clock: &LocalTimeClock, censored: bool) -> LadderProcess {
    let points = points
        .iter()
        .enumerate()
        .map(|(i, p)| LadderPoint {
            local_time: clock.record_local_time(i),
            ..*p
        })
        .collect();
    LadderProcess {
        points,
        total_local_time: clock.total(),
        censored,
    }
}

/// Outcome of a first-passage style functional in local time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Observed {
    At(f64),
    /// Not seen within the observed local time `exposure`.
    Censored {
        exposure: f64,
    },
}

impl Observed {
    pub fn value(&self) -> Option<f64> {
        match self {
            Observed::At(t) => Some(*t),
            Observed::Censored { .. } => None,
        }
    }

    pub fn exposure(&self) -> f64 {
        match *self {
            Observed::At(t) => t,
            Observed::Censored { exposure } => exposure,
        }
    }
}

impl LadderProcess {
    /// Points with local time ≤ t.
    pub fn count_until(&self, t: f64) -> usize {
        self.points.partition_point(|p| p.local_time <= t)
    }

    /// H⁺(t), the supremum at L⁻¹(t).
    pub fn h_plus(&self, t: f64) -> f64 {
        match self.count_until(t) {
            0 => 0.0,
            k => self.points[k - 1].level,
        }
    }

    /// H⁻(t).
    pub fn h_minus(&self, t: f64) -> f64 {
        self.points[..self.count_until(t)].iter().map(|p| p.undershoot).sum()
    }

    /// Hᴹ(t).
    pub fn h_mark(&self, t: f64) -> u64 {
        self.points[..self.count_until(t)].iter().filter(|p| p.mark).count() as u64
    }

    /// Whether the values at local time `t` are known: `t` lies before the
    /// end of observation.
    pub fn observed_at(&self, t: f64) -> bool {
        !self.censored || t < self.total_local_time
    }

    /// L⁻¹(s): path time of the last record at local time ≤ s, `0` before
    /// the first one, `+∞` once killed. `None` when s lies past the end of a
    /// censored observation.
    pub fn inverse_local_time(&self, s: f64) -> Option<f64> {
        if !self.observed_at(s) {
            return None;
        }
        if s >= self.total_local_time {
            return Some(f64::INFINITY);
        }
        Some(match self.count_until(s) {
            0 => 0.0,
            k => self.points[k - 1].record_time,
        })
    }

    /// Killed before local time t.
    pub fn killed_by(&self, t: f64) -> bool {
        !self.censored && self.total_local_time <= t
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let rows = self.points.iter().map(|p| {
            vec![
                csv::real(p.local_time),
                csv::real(p.record_time),
                csv::real(p.overshoot),
                csv::real(p.undershoot),
                (p.mark as u8).to_string(),
            ]
        });
        csv::write_table(
            out,
            &["local_time", "record_time", "overshoot", "undershoot", "mark"],
            rows,
        )
    }
}

/// First marked ladder point, in local time.
pub fn first_mark_time(ladder: &LadderProcess) -> Observed {
    match ladder.points.iter().find(|p| p.mark) {
        Some(p) => Observed::At(p.local_time),
        None => Observed::Censored {
            exposure: ladder.total_local_time,
        },
    }
}

/// Total local time L(∞), censored when the ladder is.
pub fn lifetime(ladder: &LadderProcess) -> Observed {
    if ladder.censored {
        Observed::Censored {
            exposure: ladder.total_local_time,
        }
    } else {
        Observed::At(ladder.total_local_time)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::JumpEvent;

    fn path(events: &[(f64, f64, bool)]) -> MarkedPath {
        MarkedPath {
            drift: -1.0,
            horizon: 10.0,
            events: events
                .iter()
                .map(|&(time, size, mark)| JumpEvent { time, size, mark })
                .collect(),
            seed: 0,
        }
    }

    #[test]
    fn hand_traces() {
        assert!(record_decomposition(&path(&[])).is_empty());
        let p = record_decomposition(&path(&[(2.0, 5.0, true)]));
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].overshoot, p[0].undershoot, p[0].mark), (3.0, 2.0, true));
        let p = record_decomposition(&path(&[(1.0, 0.5, false), (1.2, 3.0, true)]));
        assert_eq!(p.len(), 1);
        assert!((p[0].overshoot - 2.3).abs() < 1e-15);
        assert!((p[0].undershoot - 0.7).abs() < 1e-15);
        assert_eq!(p[0].overshoot + p[0].undershoot, 3.0);
    }

    #[test]
    fn ties_are_not_records() {
        // value before the second jump is -3 + 2 = -1, landing exactly on the supremum 1
        let p = record_decomposition(&path(&[(1.0, 2.0, false), (3.0, 2.0, false)]));
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn clock_without_records() {
        let c = LocalTimeClock::from_weights(vec![], 1.0, vec![0.7]).unwrap();
        assert_eq!(c.local_time(0.0), 0.7);
        assert_eq!(c.local_time(100.0), 0.7);
        assert_eq!(c.inverse(0.5), 0.0);
        assert_eq!(c.inverse(0.8), f64::INFINITY);
    }

    #[test]
    fn single_point_ladder() {
        let pts = record_decomposition(&path(&[(2.0, 5.0, true)]));
        let c = LocalTimeClock::from_weights(vec![2.0], 1.0, vec![0.4, 1.0]).unwrap();
        let l = trivariate_ladder(&pts, &c, true);
        assert_eq!(l.h_plus(0.39), 0.0);
        assert_eq!((l.h_plus(0.4), l.h_minus(0.4), l.h_mark(0.4)), (3.0, 2.0, 1));
        assert_eq!(first_mark_time(&l), Observed::At(0.4));
        assert_eq!(c.inverse(0.4), 2.0);
        assert_eq!(c.inverse(0.3), 0.0);
        assert_eq!(c.local_time(1.99), 0.4);
        assert_eq!(c.local_time(2.0), 1.4);
    }

    #[test]
    fn empty_ladder_is_zero() {
        let c = local_time_clock(&[], 2.0, 3).unwrap();
        let l = trivariate_ladder(&[], &c, false);
        assert_eq!((l.h_plus(5.0), l.h_minus(5.0), l.h_mark(5.0)), (0.0, 0.0, 0));
        assert!(matches!(first_mark_time(&l), Observed::Censored { .. }));
        assert_eq!(lifetime(&l), Observed::At(c.weights[0]));
    }

    #[test]
    fn split_is_exact_near_rounding_edges() {
        let p = LadderPoint::from_jump(0.0, 1.0, 1.0 - 1e-17, 1e-300, 1.0, false);
        assert!(p.overshoot > 0.0);
        assert_eq!(p.overshoot + p.undershoot, 1e-300);
    }
}
