//! Laplace exponent, its roots and inverse, the scale function and the
//! killing rate of a spectrally positive finite-variation process
//! `X(t) = drift · t + (jumps)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::LevyMeasureSpec;
use crate::numerics::{bisect, expand_until};

fn default_drift() -> f64 {
    -1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    #[serde(default = "default_drift")]
    pub drift: f64,
    #[serde(default)]
    pub levy_measure: LevyMeasureSpec,
}

impl ProcessSpec {
    pub fn new(drift: f64, levy_measure: LevyMeasureSpec) -> Self {
        ProcessSpec { drift, levy_measure }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.drift < 0.0 && self.drift.is_finite()) {
            return Err(Error::invalid(format!("drift must be negative, got {}", self.drift)));
        }
        self.levy_measure.validate()
    }

    /// `W(0) = -1/drift`.
    pub fn w0(&self) -> f64 {
        -1.0 / self.drift
    }

    /// Spec of `Z(d t) / n`.
    pub fn rescale(&self, s: &ScalingParams) -> ProcessSpec {
        let n = s.n as f64;
        ProcessSpec {
            drift: self.drift * s.d_n / n,
            levy_measure: self.levy_measure.rescale(n, s.d_n),
        }
    }
}

/// Mark probability as a function of the jump size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MarkRule {
    Constant {
        theta: f64,
    },
    /// `1 ∧ (slope · r)`.
    LinearCap {
        slope: f64,
    },
    /// `1 - e^{-r/scale}`.
    Saturating {
        scale: f64,
    },
}

impl MarkRule {
    pub fn always() -> Self {
        MarkRule::Constant { theta: 1.0 }
    }

    pub fn never() -> Self {
        MarkRule::Constant { theta: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MarkRule::Constant { theta } => (0.0..=1.0).contains(&theta),
            MarkRule::LinearCap { slope } => slope >= 0.0 && slope.is_finite(),
            MarkRule::Saturating { scale } => scale > 0.0 && scale.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("bad mark rule {self:?}")))
        }
    }

    #[inline]
    pub fn prob(&self, r: f64) -> f64 {
        match *self {
            MarkRule::Constant { theta } => theta,
            MarkRule::LinearCap { slope } => (slope * r).min(1.0),
            MarkRule::Saturating { scale } => -(-r / scale).exp_m1(),
        }
    }

    /// Rule seen in the rescaled coordinates: `u ↦ f(n u)`.
    pub fn rescale(&self, n: f64) -> MarkRule {
        match *self {
            MarkRule::Constant { theta } => MarkRule::Constant { theta },
            MarkRule::LinearCap { slope } => MarkRule::LinearCap { slope: slope * n },
            MarkRule::Saturating { scale } => MarkRule::Saturating { scale: scale / n },
        }
    }

    /// `lim_{u→0} f(u)/u` for rules vanishing at 0.
    pub fn slope_at_zero(&self) -> Option<f64> {
        match *self {
            MarkRule::Constant { theta: 0.0 } => Some(0.0),
            MarkRule::Constant { .. } => None,
            MarkRule::LinearCap { slope } => Some(slope),
            MarkRule::Saturating { scale } => Some(1.0 / scale),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            MarkRule::LinearCap { slope } if slope > 0.0 => vec![1.0 / slope],
            _ => vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub n: u64,
    pub d_n: f64,
}

impl ScalingParams {
    pub fn new(n: u64, d_n: f64) -> Self {
        ScalingParams { n, d_n }
    }

    pub fn identity() -> Self {
        ScalingParams { n: 1, d_n: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || !(self.d_n > 0.0 && self.d_n.is_finite()) {
            return Err(Error::invalid(format!("bad scaling {self:?}")));
        }
        Ok(())
    }
}

/// Numerical tolerances of the analytic layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub root_abs: f64,
    pub scale_step: f64,
    pub scale_tol: f64,
    pub scale_max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_abs: 1e-12,
            scale_step: 1e-3,
            scale_tol: 1e-6,
            scale_max_steps: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criticality {
    /// Drifts to -∞.
    Subcritical,
    Critical,
    /// Drifts to +∞.
    Supercritical,
}

/// ψ(λ) = -d'λ - ∫(1 - e^{-λr}) Λ(dr).
pub fn laplace_exponent(spec: &ProcessSpec, lambda: f64) -> Result<f64> {
    if lambda < 0.0 {
        return Err(Error::invalid(format!("λ must be nonnegative, got {lambda}")));
    }
    Ok(-spec.drift * lambda - spec.levy_measure.laplace_part(lambda)?)
}

/// ψ'(0+) = -d' - ∫ r Λ(dr); `-∞` when the first moment diverges.
pub fn psi_prime_zero(spec: &ProcessSpec) -> f64 {
    -spec.drift - spec.levy_measure.first_moment()
}

pub fn criticality(spec: &ProcessSpec) -> Criticality {
    let p = psi_prime_zero(spec);
    let scale = -spec.drift;
    if p.abs() <= 1e-12 * scale {
        Criticality::Critical
    } else if p > 0.0 {
        Criticality::Subcritical
    } else {
        Criticality::Supercritical
    }
}

/// Largest root of ψ.
pub fn eta_root(spec: &ProcessSpec) -> Result<f64> {
    eta_root_with(spec, &Tolerances::default())
}

pub fn eta_root_with(spec: &ProcessSpec, tol: &Tolerances) -> Result<f64> {
    if criticality(spec) != Criticality::Supercritical {
        return Ok(0.0);
    }
    let psi = |x: f64| laplace_exponent(spec, x).unwrap_or(f64::NAN);
    let hi = expand_until(1.0, |x| psi(x) > 0.0).ok_or_else(|| Error::NumericFailure {
        context: "bracketing η".into(),
        achieved: f64::INFINITY,
    })?;
    // ψ ≤ 0 on (0, η]
    Ok(bisect(|x| psi(x) <= 0.0, 0.0, hi, tol.root_abs))
}

/// φ(a): the root of ψ(λ) = a in [η, ∞).
pub fn phi_inverse(spec: &ProcessSpec, a: f64) -> Result<f64> {
    if a < 0.0 {
        return Err(Error::invalid(format!("φ argument must be nonnegative, got {a}")));
    }
    let eta = eta_root(spec)?;
    if a == 0.0 {
        return Ok(eta);
    }
    let psi = |x: f64| laplace_exponent(spec, x).unwrap_or(f64::NAN);
    let hi = expand_until(eta.max(1e-3) * 2.0, |x| psi(x) > a).ok_or_else(|| Error::NumericFailure {
        context: "bracketing φ".into(),
        achieved: f64::INFINITY,
    })?;
    Ok(bisect(|x| psi(x) < a, eta, hi, 0.0))
}

/// ψ'(0+) when positive, else 0.
pub fn kill_rate(spec: &ProcessSpec) -> f64 {
    match criticality(spec) {
        Criticality::Subcritical => psi_prime_zero(spec),
        _ => 0.0,
    }
}

/// Positive root `R` of `d'θ + ∫(e^{θr} - 1)Λ(dr) = 0`, so that
/// `P(sup X > x) ≤ e^{-R x}`. `None` without exponential moments or when
/// the process does not drift to -∞; `Some(∞)` when there are no jumps.
pub fn lundberg_exponent(spec: &ProcessSpec) -> Option<f64> {
    if criticality(spec) != Criticality::Subcritical {
        return None;
    }
    let m = &spec.levy_measure;
    if m.is_zero() {
        return Some(f64::INFINITY);
    }
    if !m.exp_moment(1e-9).is_finite() {
        return None;
    }
    let k = |t: f64| spec.drift * t + m.exp_moment(t);
    let hi = expand_until(1e-3, |t| k(t) >= 0.0 || k(t).is_nan())?;
    let r = bisect(|t| k(t) < 0.0, 0.0, hi, 1e-13);
    // conservative side of the root
    Some(r * (1.0 - 1e-9))
}

/// W on `x_grid` (increasing, nonnegative).
pub fn scale_function(spec: &ProcessSpec, x_grid: &[f64]) -> Result<Vec<f64>> {
    scale_function_with(spec, x_grid, &Tolerances::default())
}

pub fn scale_function_with(spec: &ProcessSpec, x_grid: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    if x_grid.windows(2).any(|w| w[1] < w[0]) || x_grid.first().is_some_and(|&x| x < 0.0) {
        return Err(Error::invalid("x_grid must be nonnegative and increasing"));
    }
    let w = ScaleFunction::solve(spec, x_grid.last().copied().unwrap_or(0.0), tol)?;
    Ok(x_grid.iter().map(|&x| w.eval(x)).collect())
}

/// W on a uniform grid `0, h, …, x_max`, linearly interpolated between nodes.
#[derive(Debug, Clone)]
pub struct ScaleFunction {
    pub step: f64,
    pub values: Vec<f64>,
    pub error_estimate: f64,
}

impl ScaleFunction {
    pub fn solve(spec: &ProcessSpec, x_max: f64, tol: &Tolerances) -> Result<ScaleFunction> {
        spec.validate()?;
        let w0 = spec.w0();
        if x_max <= 0.0 || spec.levy_measure.is_zero() {
            let k = if x_max > 0.0 { 1 } else { 0 };
            return Ok(ScaleFunction {
                step: x_max.max(1.0),
                values: vec![w0; k + 1],
                error_estimate: 0.0,
            });
        }
        let mut k = (x_max / tol.scale_step).ceil().max(1.0) as usize;
        k = k.min(tol.scale_max_steps);
        let coarse = march(spec, x_max / k as f64, k);
        let fine = march(spec, x_max / (2 * k) as f64, 2 * k);
        let diff = (0..=k).map(|i| (coarse[i] - fine[2 * i]).abs()).fold(0.0, f64::max);
        // second-order scheme: error of the fine solution ≈ diff / 3
        let estimated = diff / 3.0;
        let scale = fine.iter().fold(1.0f64, |m, &v| m.max(v.abs()));
        if estimated > tol.scale_tol * scale {
            return Err(Error::RefinementNeeded {
                step: x_max / k as f64,
                estimated,
                tolerance: tol.scale_tol * scale,
            });
        }
        Ok(ScaleFunction {
            step: x_max / (2 * k) as f64,
            values: fine,
            error_estimate: estimated,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let last = self.values.len() - 1;
        let pos = (x / self.step).max(0.0);
        let i = (pos.floor() as usize).min(last);
        if i == last {
            return self.values[last];
        }
        let s = pos - i as f64;
        if s == 0.0 {
            self.values[i]
        } else {
            self.values[i] * (1.0 - s) + self.values[i + 1] * s
        }
    }
}

/// Product-trapezoid marching for `W(x) = W0 + W0 ∫_0^x W(x-u) Λ̄(u) du`.
fn march(spec: &ProcessSpec, h: f64, k: usize) -> Vec<f64> {
    let m = &spec.levy_measure;
    let w0 = spec.w0();
    // cell weights of Λ̄ against the linear hat functions
    let mut a = Vec::with_capacity(k);
    let mut b = Vec::with_capacity(k);
    let (mut f0_prev, mut f1_prev) = m.tail_integrals(0.0);
    for j in 0..k {
        let uj = j as f64 * h;
        let (f0, f1) = m.tail_integrals((j + 1) as f64 * h);
        let d0 = f0 - f0_prev;
        let d1 = f1 - f1_prev;
        let bj = (d1 - uj * d0) / h;
        a.push(d0 - bj);
        b.push(bj);
        f0_prev = f0;
        f1_prev = f1;
    }
    let mut w = vec![0.0; k + 1];
    w[0] = w0;
    for i in 1..=k {
        let mut s = 0.0;
        for j in 1..i {
            s += a[j] * w[i - j];
        }
        for j in 0..i {
            s += b[j] * w[i - j - 1];
        }
        w[i] = w0 * (1.0 + s) / (1.0 - w0 * a[0]);
    }
    w
}
