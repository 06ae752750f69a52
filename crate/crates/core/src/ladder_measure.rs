//! Jump measure of the marked ladder height process,
//!
//! `μ(dy, dq) = ∫_0^∞ dx e^{-ηx} Λ(x + dy) Bern(f(x + y))(dq)`.
//!
//! Writing `z = x + y` and integrating out the undershoot `x ∈ [0, z]`, every
//! total mass reduces to `∫ g_η(z) … Λ(dz)` with `g_η(z) = (1 - e^{-ηz})/η`
//! (`= z` when `η = 0`). An atom of Λ spreads over `y ∈ (0, a)` with density
//! `e^{-η(a-y)}`, so μ itself has no atoms.

use crate::calculus::{self, MarkRule, ProcessSpec, ScalingParams};
use crate::error::{Error, Result};
use crate::measure::{Density, LevyMeasureSpec};
use crate::numerics;

/// `(1 - e^{-ηz}) / η`, continuous at η = 0.
#[inline]
pub fn g_eta(eta: f64, z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else if eta == 0.0 {
        z
    } else {
        -(-eta * z).exp_m1() / eta
    }
}

/// `∫_0^z (z - x) e^{-ηx} dx`.
fn h_eta(eta: f64, z: f64) -> f64 {
    let t = eta * z;
    if t < 1e-4 {
        z * z * (0.5 - t / 6.0 + t * t / 24.0)
    } else {
        z / eta - g_eta(eta, z) / eta
    }
}

#[derive(Debug, Clone)]
pub struct LadderMeasure {
    /// Lévy measure the ladder measure is built from (already rescaled).
    pub levy_measure: LevyMeasureSpec,
    pub eta: f64,
    pub mark: MarkRule,
    /// μ⁺ total mass; `f64::INFINITY` marks an infinite measure.
    pub mu_plus_mass: f64,
    /// Mass of marked ladder jumps.
    pub lambda_rate: f64,
    pub kill_rate: f64,
}

/// μ for `spec` (rescaled first when `scaling` is given).
pub fn ladder_measure(spec: &ProcessSpec, mark: &MarkRule, scaling: Option<&ScalingParams>) -> Result<LadderMeasure> {
    spec.validate()?;
    mark.validate()?;
    let (spec, mark) = match scaling {
        Some(s) => {
            s.validate()?;
            (spec.rescale(s), mark.rescale(s.n as f64))
        }
        None => (spec.clone(), *mark),
    };
    let eta = calculus::eta_root(&spec)?;
    let m = &spec.levy_measure;
    let mu_plus_mass = if eta == 0.0 {
        m.first_moment()
    } else {
        m.laplace_part(eta)? / eta
    };
    let lambda_rate = match mark {
        MarkRule::Constant { theta: 0.0 } => 0.0,
        MarkRule::Constant { theta } => theta * mu_plus_mass,
        _ => m.integrate_with_breaks(
            |z| mark.prob(z) * g_eta(eta, z),
            &mark.breakpoints(),
            "ladder mark rate",
        )?,
    };
    Ok(LadderMeasure {
        levy_measure: spec.levy_measure.clone(),
        eta,
        mark,
        mu_plus_mass,
        lambda_rate,
        kill_rate: calculus::kill_rate(&spec),
    })
}

impl LadderMeasure {
    /// The zero measure (no ladder jumps).
    pub fn zero() -> Self {
        LadderMeasure {
            levy_measure: LevyMeasureSpec::zero(),
            eta: 0.0,
            mark: MarkRule::never(),
            mu_plus_mass: 0.0,
            lambda_rate: 0.0,
            kill_rate: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mu_plus_mass == 0.0
    }

    fn weighted_density(&self, y: f64, weight: impl Fn(f64) -> f64) -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        let eta = self.eta;
        let mut s: f64 = self
            .levy_measure
            .atoms
            .iter()
            .filter(|a| a.location > y)
            .map(|a| a.mass * (-eta * (a.location - y)).exp() * weight(a.location))
            .sum();
        let mut breaks: Vec<f64> = self.levy_measure.breakpoints();
        breaks.extend(self.mark.breakpoints());
        breaks.push(y + 1.0);
        for d in &self.levy_measure.densities {
            let hi = match *d {
                Density::Uniform { hi, .. } => hi,
                _ => f64::INFINITY,
            };
            if hi <= y {
                continue;
            }
            let f = |z: f64| (-eta * (z - y)).exp() * weight(z) * d.density(z);
            s += numerics::integrate(f, y, hi, &breaks, "ladder density")?;
        }
        Ok(s)
    }

    /// Density of μ(dy, {1}).
    pub fn mark_density(&self, y: f64) -> Result<f64> {
        let f = self.mark;
        self.weighted_density(y, |z| f.prob(z))
    }

    /// Density of μ(dy, {0}).
    pub fn nomark_density(&self, y: f64) -> Result<f64> {
        let f = self.mark;
        self.weighted_density(y, |z| 1.0 - f.prob(z))
    }

    /// Density of μ⁺(dy) = μ(dy, {0, 1}).
    pub fn mu_plus_density(&self, y: f64) -> Result<f64> {
        self.weighted_density(y, |_| 1.0)
    }

    /// μ⁺((y, ∞)) = ∫_0^∞ e^{-ηx} Λ̄(x + y) dx.
    pub fn mu_plus_tail(&self, y: f64) -> Result<f64> {
        let m = &self.levy_measure;
        let y = y.max(0.0);
        if self.eta == 0.0 {
            let total = m.first_moment();
            if !total.is_finite() {
                return Ok(f64::INFINITY);
            }
            return Ok((total - m.tail_integrals(y).0).max(0.0));
        }
        let eta = self.eta;
        let breaks: Vec<f64> = m.breakpoints().iter().map(|b| b - y).collect();
        numerics::integrate(
            |x| (-eta * x).exp() * m.tail(x + y),
            0.0,
            f64::INFINITY,
            &breaks,
            "ladder tail",
        )
    }

    /// CDF of the normalized μ⁺ (the law of one ladder jump).
    pub fn overshoot_cdf(&self, y: f64) -> Result<f64> {
        if !(self.mu_plus_mass > 0.0 && self.mu_plus_mass.is_finite()) {
            return Err(Error::UnsupportedMeasure(
                "ladder jump law needs finite positive μ⁺ mass".into(),
            ));
        }
        Ok(1.0 - self.mu_plus_tail(y)? / self.mu_plus_mass)
    }

    /// μ of the cell `[x0, x1) × [y0, y1)` in (undershoot, overshoot).
    pub fn joint_cell_mass(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<f64> {
        let m = &self.levy_measure;
        if self.eta == 0.0 {
            let f0 = |u: f64| {
                if u.is_finite() {
                    m.tail_integrals(u).0
                } else {
                    m.first_moment()
                }
            };
            let strip = |y: f64| f0(x1 + y) - f0(x0 + y);
            let upper = if y1.is_finite() { strip(y1) } else { 0.0 };
            return Ok((strip(y0) - upper).max(0.0));
        }
        let eta = self.eta;
        let mut breaks: Vec<f64> = m.breakpoints().iter().map(|b| b - y0).collect();
        if y1.is_finite() {
            breaks.extend(m.breakpoints().iter().map(|b| b - y1));
        }
        let f = |x: f64| {
            let upper = if y1.is_finite() { m.tail(x + y1) } else { 0.0 };
            (-eta * x).exp() * (m.tail(x + y0) - upper)
        };
        numerics::integrate(f, x0, x1, &breaks, "ladder cell")
    }

    /// ∫ y μ⁺(dy).
    pub fn mean_height(&self) -> Result<f64> {
        let eta = self.eta;
        self.levy_measure.integrate(|z| h_eta(eta, z), "ladder mean height")
    }

    /// ∫ (1 - e^{-βy - γq}) μ(dy, dq).
    pub fn laplace_part(&self, beta: f64, gamma: f64) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        let eta = self.eta;
        let f = self.mark;
        let eg = (-gamma).exp();
        // ∫_0^z e^{-ηx} e^{-β(z-x)} dx
        let inner = move |z: f64| {
            let d = eta - beta;
            let ebz = (-beta * z).exp();
            if d.abs() * z < 1e-8 {
                ebz * z
            } else {
                ebz * (-(-d * z).exp_m1()) / d
            }
        };
        self.levy_measure.integrate_with_breaks(
            |z| {
                let q = f.prob(z);
                g_eta(eta, z) - inner(z) * (q * eg + (1.0 - q))
            },
            &f.breakpoints(),
            "ladder transform",
        )
    }
}
