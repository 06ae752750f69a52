//! Registered scaling families and their limits.

use serde::{Deserialize, Serialize};

use crate::calculus::{self, Criticality, MarkRule, ProcessSpec, ScalingParams};
use crate::error::{Error, Result};
use crate::measure::LevyMeasureSpec;

/// How `d_n` grows with `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeScale {
    /// `d_n = n²`, the critical (Brownian) scaling.
    Square,
    /// `d_n = n`, the law-of-large-numbers scaling.
    Linear,
}

impl TimeScale {
    pub fn d_n(&self, n: u64) -> f64 {
        let n = n as f64;
        match self {
            TimeScale::Square => n * n,
            TimeScale::Linear => n,
        }
    }
}

/// Mark regime of a family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Assumption {
    /// Every jump marked.
    All,
    /// Constant `θ_n = θ n / d_n`, so `(d_n / n) θ_n = θ`.
    B1 { theta: f64 },
    /// `f_n(x) = 1 ∧ (κ x / n)`.
    B2 { kappa: f64 },
}

impl Assumption {
    pub fn mark_rule(&self, s: &ScalingParams) -> Result<MarkRule> {
        let n = s.n as f64;
        let rule = match *self {
            Assumption::All => MarkRule::always(),
            Assumption::B1 { theta } => MarkRule::Constant {
                theta: theta * n / s.d_n,
            },
            Assumption::B2 { kappa } => MarkRule::LinearCap { slope: kappa / n },
        };
        rule.validate()
            .map_err(|e| e.context(format!("mark rule at n = {}", s.n)))?;
        Ok(rule)
    }
}

/// A family `n ↦ (spec, d_n)` of unscaled processes sharing one spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    Scaled {
        spec: ProcessSpec,
        time_scale: TimeScale,
    },
    /// Arbitrary per-n specs; accepted for simulation, no limit theory.
    Tabulated {
        specs: Vec<(u64, ProcessSpec, f64)>,
    },
}

impl Family {
    pub fn spec(&self, n: u64) -> Result<(ProcessSpec, ScalingParams)> {
        match self {
            Family::Scaled { spec, time_scale } => Ok((spec.clone(), ScalingParams::new(n, time_scale.d_n(n)))),
            Family::Tabulated { specs } => specs
                .iter()
                .find(|(m, _, _)| *m == n)
                .map(|(m, s, d)| (s.clone(), ScalingParams::new(*m, *d)))
                .ok_or_else(|| Error::invalid(format!("no spec tabulated for n = {n}"))),
        }
    }

    /// The rescaled spec at index `n`.
    pub fn rescaled(&self, n: u64) -> Result<ProcessSpec> {
        let (s, sc) = self.spec(n)?;
        Ok(s.rescale(&sc))
    }
}

/// Parameters of the limit process and of its ladder subordinator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSpec {
    pub b2: f64,
    /// Truncated drift `d' + ∫(1 ∧ u) Λ(du)` of the limit.
    pub c: f64,
    pub limit_measure: LevyMeasureSpec,
    pub eta: f64,
    pub theta: f64,
    pub kappa_slope: f64,
    pub rho: f64,
    pub kill: f64,
}

/// Registered preset ids.
pub const PRESETS: &[&str] = &[
    "drift-only",
    "crit-exp",
    "crit-exp-B1-theta2",
    "crit-exp-B2",
    "subcrit-exp-half",
];

fn preset_list() -> String {
    PRESETS.join(", ")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub id: String,
    pub family: Family,
    pub assumption: Assumption,
}

impl Preset {
    pub fn lookup(id: &str) -> Result<Preset> {
        let exp = |mass| ProcessSpec::new(-1.0, LevyMeasureSpec::exponential(mass, 1.0));
        let (family, assumption) = match id {
            "drift-only" => (
                Family::Scaled {
                    spec: ProcessSpec::new(-1.0, LevyMeasureSpec::zero()),
                    time_scale: TimeScale::Linear,
                },
                Assumption::All,
            ),
            "crit-exp" => (
                Family::Scaled {
                    spec: exp(1.0),
                    time_scale: TimeScale::Square,
                },
                Assumption::All,
            ),
            "crit-exp-B1-theta2" => (
                Family::Scaled {
                    spec: exp(1.0),
                    time_scale: TimeScale::Square,
                },
                Assumption::B1 { theta: 2.0 },
            ),
            "crit-exp-B2" => (
                Family::Scaled {
                    spec: exp(1.0),
                    time_scale: TimeScale::Square,
                },
                Assumption::B2 { kappa: 1.0 },
            ),
            "subcrit-exp-half" => (
                Family::Scaled {
                    spec: exp(0.5),
                    time_scale: TimeScale::Linear,
                },
                Assumption::All,
            ),
            other => {
                return Err(Error::Usage(format!(
                    "unknown preset `{other}`; registered presets: {}",
                    preset_list()
                )));
            }
        };
        Ok(Preset {
            id: id.to_string(),
            family,
            assumption,
        })
    }

    /// `(unscaled spec, mark rule on the unscaled jumps, scaling)` at index n.
    pub fn at(&self, n: u64) -> Result<(ProcessSpec, MarkRule, ScalingParams)> {
        let (spec, sc) = self.family.spec(n)?;
        let mark = self.assumption.mark_rule(&sc)?;
        Ok((spec, mark, sc))
    }
}

fn not_supported(what: &str) -> Error {
    Error::NotImplemented {
        what: what.to_string(),
        presets: preset_list(),
    }
}

/// Limit of the rescaled processes alone: `(b², c, kill)`.
pub fn process_limit(family: &Family) -> Result<(f64, f64, f64)> {
    let (spec, time_scale) = match family {
        Family::Scaled { spec, time_scale } => (spec, *time_scale),
        Family::Tabulated { .. } => return Err(not_supported("limit of a tabulated family")),
    };
    spec.validate()?;
    Ok(match (time_scale, calculus::criticality(spec)) {
        // ψ̃_n(λ) = n² ψ(λ/n) → (∫ r² Λ(dr) / 2) λ²
        (TimeScale::Square, Criticality::Critical) => {
            let m2 = spec.levy_measure.integrate(|r| r * r, "second moment")?;
            if !m2.is_finite() {
                return Err(not_supported("critical family without a second moment"));
            }
            (m2, 0.0, 0.0)
        }
        // ψ̃_n(λ) = n ψ(λ/n) → ψ'(0+) λ, a pure drift killed at rate ψ'(0+)
        (TimeScale::Linear, Criticality::Subcritical) => {
            let k = calculus::psi_prime_zero(spec);
            (0.0, -k, k)
        }
        _ => return Err(not_supported("this combination of criticality and time scale")),
    })
}

/// Limit parameters of a registered family under a mark assumption.
pub fn limit_parameters(family: &Family, assumption: &Assumption) -> Result<LimitSpec> {
    let (b2, c, kill) = process_limit(family)?;
    let time_scale = match family {
        Family::Scaled { time_scale, .. } => *time_scale,
        Family::Tabulated { .. } => unreachable!("rejected by process_limit"),
    };
    let (theta, kappa) = match *assumption {
        Assumption::B1 { theta } => (theta, 0.0),
        Assumption::B2 { kappa } => (0.0, kappa),
        Assumption::All => match time_scale {
            // θ_n = 1 and d_n / n = 1
            TimeScale::Linear => (1.0, 0.0),
            TimeScale::Square => {
                return Err(not_supported(
                    "all-marked jumps under the n² scaling (mark rate diverges)",
                ))
            }
        },
    };
    Ok(LimitSpec {
        b2,
        c,
        limit_measure: LevyMeasureSpec::zero(),
        eta: 0.0,
        theta,
        kappa_slope: kappa,
        rho: kappa * b2,
        kill,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_exponential_limits() {
        let p = Preset::lookup("crit-exp-B1-theta2").unwrap();
        let l = limit_parameters(&p.family, &p.assumption).unwrap();
        assert!((l.b2 - 2.0).abs() < 1e-10);
        assert_eq!((l.eta, l.kill, l.theta), (0.0, 0.0, 2.0));
        assert!(l.limit_measure.is_zero());
        let p = Preset::lookup("crit-exp-B2").unwrap();
        let l = limit_parameters(&p.family, &p.assumption).unwrap();
        assert_eq!(l.kappa_slope, 1.0);
        assert!((l.rho - 2.0).abs() < 1e-10);
        assert!((l.rho - l.kappa_slope * l.b2).abs() < 1e-15);
    }

    #[test]
    fn linear_scaling_limits_are_killed_drifts() {
        let p = Preset::lookup("subcrit-exp-half").unwrap();
        let l = limit_parameters(&p.family, &p.assumption).unwrap();
        assert_eq!(l.b2, 0.0);
        assert!((l.kill - 0.5).abs() < 1e-15);
        let p = Preset::lookup("drift-only").unwrap();
        assert_eq!(limit_parameters(&p.family, &p.assumption).unwrap().kill, 1.0);
    }

    #[test]
    fn unsupported_families() {
        let t = Family::Tabulated { specs: vec![] };
        let e = limit_parameters(&t, &Assumption::All).unwrap_err();
        assert!(matches!(e, Error::NotImplemented { .. }));
        assert!(e.to_string().contains("crit-exp"));
        assert!(matches!(Preset::lookup("nope"), Err(Error::Usage(_))));
    }

    #[test]
    fn b1_marks_scale_with_n() {
        let p = Preset::lookup("crit-exp-B1-theta2").unwrap();
        let (_, mark, sc) = p.at(16).unwrap();
        assert_eq!(mark, MarkRule::Constant { theta: 0.125 });
        assert_eq!(sc.d_n, 256.0);
        assert!(Preset::lookup("crit-exp-B1-theta2").unwrap().at(1).is_err());
    }
}
