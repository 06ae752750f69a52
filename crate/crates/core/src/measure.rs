//! Lévy measures on (0, ∞) built from atoms and a few analytic density
//! families. Every quantity the analytic layer needs (tails, transforms,
//! moments, tail integrals) has a closed form per family; the power family
//! falls back to quadrature for its transform.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics;
use crate::rng::CounterRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Density component of a Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Density {
    /// `mass · rate · e^{-rate r}`.
    Exponential { mass: f64, rate: f64 },
    /// `mass / (hi - lo)` on `(lo, hi]`.
    Uniform { mass: f64, lo: f64, hi: f64 },
    /// `scale · r^{-beta}` on `r > cutoff`. Infinite mass when `cutoff = 0`.
    PowerCutoff { scale: f64, beta: f64, cutoff: f64 },
}

impl Density {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Density::Exponential { mass, rate } => mass > 0.0 && rate > 0.0 && mass.is_finite() && rate.is_finite(),
            Density::Uniform { mass, lo, hi } => {
                mass > 0.0 && mass.is_finite() && lo >= 0.0 && hi > lo && hi.is_finite()
            }
            Density::PowerCutoff { scale, beta, cutoff } => {
                let integrable_at_zero = cutoff > 0.0 || beta < 2.0;
                scale > 0.0
                    && scale.is_finite()
                    && beta > 1.0
                    && cutoff >= 0.0
                    && cutoff.is_finite()
                    && integrable_at_zero
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("bad density component {self:?}")))
        }
    }

    pub fn mass(&self) -> f64 {
        match *self {
            Density::Exponential { mass, .. } | Density::Uniform { mass, .. } => mass,
            Density::PowerCutoff { scale, beta, cutoff } => {
                if cutoff > 0.0 {
                    scale * cutoff.powf(1.0 - beta) / (beta - 1.0)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn density(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match *self {
            Density::Exponential { mass, rate } => mass * rate * (-rate * r).exp(),
            Density::Uniform { mass, lo, hi } => {
                if r > lo && r <= hi {
                    mass / (hi - lo)
                } else {
                    0.0
                }
            }
            Density::PowerCutoff { scale, beta, cutoff } => {
                if r > cutoff {
                    scale * r.powf(-beta)
                } else {
                    0.0
                }
            }
        }
    }

    /// Λ_c((u, ∞)).
    pub fn tail(&self, u: f64) -> f64 {
        let u = u.max(0.0);
        match *self {
            Density::Exponential { mass, rate } => mass * (-rate * u).exp(),
            Density::Uniform { mass, lo, hi } => {
                if u < lo {
                    mass
                } else if u < hi {
                    mass * (hi - u) / (hi - lo)
                } else {
                    0.0
                }
            }
            Density::PowerCutoff { scale, beta, cutoff } => {
                let v = u.max(cutoff);
                if v == 0.0 {
                    f64::INFINITY
                } else {
                    scale * v.powf(1.0 - beta) / (beta - 1.0)
                }
            }
        }
    }

    /// ∫ (1 - e^{-λr}) Λ_c(dr).
    pub fn laplace_part(&self, lambda: f64) -> Result<f64> {
        if lambda <= 0.0 {
            return Ok(0.0);
        }
        Ok(match *self {
            Density::Exponential { mass, rate } => mass * lambda / (rate + lambda),
            Density::Uniform { mass, lo, hi } => {
                let w = hi - lo;
                // (e^{-λ lo} - e^{-λ hi}) / (λ w), written to avoid cancellation
                let avg = (-lambda * lo).exp() * (-(-lambda * w).exp_m1()) / (lambda * w);
                mass * (1.0 - avg)
            }
            Density::PowerCutoff { scale, beta, cutoff } => {
                let f = |r: f64| -(-lambda * r).exp_m1() * scale * r.powf(-beta);
                numerics::integrate(
                    f,
                    cutoff,
                    f64::INFINITY,
                    &[cutoff.max(1.0 / lambda)],
                    "power-cutoff transform",
                )?
            }
        })
    }

    /// ∫ r Λ_c(dr), possibly infinite.
    pub fn first_moment(&self) -> f64 {
        match *self {
            Density::Exponential { mass, rate } => mass / rate,
            Density::Uniform { mass, lo, hi } => mass * 0.5 * (lo + hi),
            Density::PowerCutoff { scale, beta, cutoff } => {
                if beta > 2.0 && cutoff > 0.0 {
                    scale * cutoff.powf(2.0 - beta) / (beta - 2.0)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `(F0(u), F1(u)) = (∫_0^u Λ̄_c(v) dv, ∫_0^u v Λ̄_c(v) dv)`.
    pub fn tail_integrals(&self, u: f64) -> (f64, f64) {
        let u = u.max(0.0);
        match *self {
            Density::Exponential { mass, rate } => {
                let x = rate * u;
                let f0 = -mass * (-x).exp_m1() / rate;
                let f1 = mass * (-(-x).exp_m1() - x * (-x).exp()) / (rate * rate);
                (f0, f1)
            }
            Density::Uniform { mass, lo, hi } => {
                let w = hi - lo;
                let v = u.min(hi);
                if v <= lo {
                    (mass * v, mass * v * v / 2.0)
                } else {
                    let f0 = mass * lo + mass * (hi * (v - lo) - (v * v - lo * lo) / 2.0) / w;
                    let f1 = mass * lo * lo / 2.0
                        + mass * (hi * (v * v - lo * lo) / 2.0 - (v * v * v - lo * lo * lo) / 3.0) / w;
                    (f0, f1)
                }
            }
            Density::PowerCutoff { scale, beta, cutoff } => {
                let k = scale / (beta - 1.0);
                // ∫_a^b v^{p-1} dv
                let pint = |p: f64, a: f64, b: f64| {
                    if p.abs() < 1e-14 {
                        (b / a).ln()
                    } else {
                        (b.powf(p) - a.powf(p)) / p
                    }
                };
                if cutoff == 0.0 {
                    (
                        k * u.powf(2.0 - beta) / (2.0 - beta),
                        k * u.powf(3.0 - beta) / (3.0 - beta),
                    )
                } else {
                    let c = k * cutoff.powf(1.0 - beta);
                    if u <= cutoff {
                        (c * u, c * u * u / 2.0)
                    } else {
                        (
                            c * cutoff + k * pint(2.0 - beta, cutoff, u),
                            c * cutoff * cutoff / 2.0 + k * pint(3.0 - beta, cutoff, u),
                        )
                    }
                }
            }
        }
    }

    /// ∫ (e^{θr} - 1) Λ_c(dr) for θ ≥ 0; infinite outside the domain.
    pub fn exp_moment(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return 0.0;
        }
        match *self {
            Density::Exponential { mass, rate } => {
                if theta < rate {
                    mass * theta / (rate - theta)
                } else {
                    f64::INFINITY
                }
            }
            Density::Uniform { mass, lo, hi } => {
                let w = hi - lo;
                mass * ((theta * lo).exp() * (theta * w).exp_m1() / (theta * w) - 1.0)
            }
            Density::PowerCutoff { .. } => f64::INFINITY,
        }
    }

    /// Largest jump size, if bounded.
    pub fn max_size(&self) -> Option<f64> {
        match *self {
            Density::Uniform { hi, .. } => Some(hi),
            _ => None,
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Density::Exponential { .. } => vec![],
            Density::Uniform { lo, hi, .. } => vec![lo, hi],
            Density::PowerCutoff { cutoff, .. } => vec![cutoff],
        }
    }

    /// The component of `d · Λ_c(n ·)`.
    pub fn rescale(&self, n: f64, d: f64) -> Density {
        match *self {
            Density::Exponential { mass, rate } => Density::Exponential {
                mass: d * mass,
                rate: rate * n,
            },
            Density::Uniform { mass, lo, hi } => Density::Uniform {
                mass: d * mass,
                lo: lo / n,
                hi: hi / n,
            },
            Density::PowerCutoff { scale, beta, cutoff } => Density::PowerCutoff {
                scale: d * scale * n.powf(1.0 - beta),
                beta,
                cutoff: cutoff / n,
            },
        }
    }

    /// One draw from the normalized component (finite mass only).
    pub fn sample(&self, rng: &mut CounterRng) -> f64 {
        match *self {
            Density::Exponential { rate, .. } => rng.exp(rate),
            Density::Uniform { lo, hi, .. } => hi - (hi - lo) * rng.open01(),
            Density::PowerCutoff { beta, cutoff, .. } => cutoff * rng.open01().powf(-1.0 / (beta - 1.0)),
        }
    }
}

/// A Lévy measure: atoms plus a sum of density components.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LevyMeasureSpec {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub densities: Vec<Density>,
}

impl LevyMeasureSpec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn exponential(mass: f64, rate: f64) -> Self {
        LevyMeasureSpec {
            atoms: vec![],
            densities: vec![Density::Exponential { mass, rate }],
        }
    }

    pub fn uniform(mass: f64, lo: f64, hi: f64) -> Self {
        LevyMeasureSpec {
            atoms: vec![],
            densities: vec![Density::Uniform { mass, lo, hi }],
        }
    }

    pub fn atom(location: f64, mass: f64) -> Self {
        LevyMeasureSpec {
            atoms: vec![Atom { location, mass }],
            densities: vec![],
        }
    }

    pub fn power_cutoff(scale: f64, beta: f64, cutoff: f64) -> Self {
        LevyMeasureSpec {
            atoms: vec![],
            densities: vec![Density::PowerCutoff { scale, beta, cutoff }],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.densities.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.atoms {
            if !(a.location > 0.0 && a.location.is_finite() && a.mass > 0.0 && a.mass.is_finite()) {
                return Err(Error::invalid(format!("bad atom {a:?}")));
            }
        }
        for d in &self.densities {
            d.validate()?;
        }
        let small = self.integrate(|r| r.min(1.0), "small-jump integrability check")?;
        if !small.is_finite() {
            return Err(Error::invalid("∫(1∧r)Λ(dr) is not finite"));
        }
        Ok(())
    }

    /// Total mass; `f64::INFINITY` marks an infinite measure.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>() + self.densities.iter().map(|d| d.mass()).sum::<f64>()
    }

    /// Density of the absolutely continuous part.
    pub fn density(&self, r: f64) -> f64 {
        self.densities.iter().map(|d| d.density(r)).sum()
    }

    /// Λ((u, ∞)).
    pub fn tail(&self, u: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.location > u).map(|a| a.mass).sum();
        atoms + self.densities.iter().map(|d| d.tail(u)).sum::<f64>()
    }

    /// ∫ (1 - e^{-λr}) Λ(dr).
    pub fn laplace_part(&self, lambda: f64) -> Result<f64> {
        let mut s: f64 = self
            .atoms
            .iter()
            .map(|a| -a.mass * (-lambda * a.location).exp_m1())
            .sum();
        for d in &self.densities {
            s += d.laplace_part(lambda)?;
        }
        Ok(s)
    }

    pub fn first_moment(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass * a.location).sum::<f64>()
            + self.densities.iter().map(|d| d.first_moment()).sum::<f64>()
    }

    pub fn tail_integrals(&self, u: f64) -> (f64, f64) {
        let mut f0 = 0.0;
        let mut f1 = 0.0;
        for a in &self.atoms {
            let v = u.min(a.location).max(0.0);
            f0 += a.mass * v;
            f1 += a.mass * v * v / 2.0;
        }
        for d in &self.densities {
            let (g0, g1) = d.tail_integrals(u);
            f0 += g0;
            f1 += g1;
        }
        (f0, f1)
    }

    pub fn exp_moment(&self, theta: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.mass * (theta * a.location).exp_m1())
            .sum::<f64>()
            + self.densities.iter().map(|d| d.exp_moment(theta)).sum::<f64>()
    }

    /// Largest jump size, if every component is bounded.
    pub fn max_size(&self) -> Option<f64> {
        let mut m = self.atoms.iter().map(|a| a.location).fold(0.0, f64::max);
        for d in &self.densities {
            m = m.max(d.max_size()?);
        }
        Some(m)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.atoms.iter().map(|a| a.location).collect();
        for d in &self.densities {
            b.extend(d.breakpoints());
        }
        b.retain(|x| *x > 0.0);
        b.sort_by(|x, y| x.total_cmp(y));
        b.dedup();
        b
    }

    /// `d · Λ(n ·)`: the measure of the jumps of `Z(d t) / n`.
    pub fn rescale(&self, n: f64, d: f64) -> LevyMeasureSpec {
        LevyMeasureSpec {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    location: a.location / n,
                    mass: d * a.mass,
                })
                .collect(),
            densities: self.densities.iter().map(|c| c.rescale(n, d)).collect(),
        }
    }

    /// ∫ g dΛ, atoms exactly and densities by quadrature.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G, ctx: &str) -> Result<f64> {
        self.integrate_with_breaks(g, &[], ctx)
    }

    /// As [`integrate`](Self::integrate), with the kinks of `g` listed.
    pub fn integrate_with_breaks<G: Fn(f64) -> f64>(&self, g: G, g_breaks: &[f64], ctx: &str) -> Result<f64> {
        let mut s: f64 = self.atoms.iter().map(|a| a.mass * g(a.location)).sum();
        for d in &self.densities {
            let lo = match *d {
                Density::Uniform { lo, .. } => lo,
                Density::PowerCutoff { cutoff, .. } => cutoff,
                _ => 0.0,
            };
            let hi = match *d {
                Density::Uniform { hi, .. } => hi,
                _ => f64::INFINITY,
            };
            let mut breaks = vec![1.0];
            breaks.extend_from_slice(g_breaks);
            if let Density::Exponential { rate, .. } = *d {
                breaks.push(1.0 / rate);
            }
            s += numerics::integrate(|r| g(r) * d.density(r), lo, hi, &breaks, ctx)?;
        }
        Ok(s)
    }

    /// Sampler for the normalized measure; rejects infinite mass.
    pub fn jump_sampler(&self) -> Result<JumpSampler> {
        let mut comps = Vec::new();
        for a in &self.atoms {
            comps.push((a.mass, Component::Atom(a.location)));
        }
        for d in &self.densities {
            comps.push((d.mass(), Component::Density(*d)));
        }
        let total: f64 = comps.iter().map(|c| c.0).sum();
        if !total.is_finite() {
            return Err(Error::UnsupportedMeasure(
                "infinite total mass; use a truncated measure (power-cutoff with cutoff > 0)".into(),
            ));
        }
        let mut cumulative = Vec::with_capacity(comps.len());
        let mut acc = 0.0;
        for (m, _) in &comps {
            acc += m / total;
            cumulative.push(acc);
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Ok(JumpSampler {
            total_mass: total,
            cumulative,
            components: comps.into_iter().map(|c| c.1).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Component {
    Atom(f64),
    Density(Density),
}

/// Draws jump sizes from Λ / Λ(0, ∞).
#[derive(Debug, Clone)]
pub struct JumpSampler {
    pub total_mass: f64,
    cumulative: Vec<f64>,
    components: Vec<Component>,
}

impl JumpSampler {
    pub fn sample(&self, rng: &mut CounterRng) -> f64 {
        let k = if self.components.len() == 1 {
            0
        } else {
            let u = rng.open01();
            self.cumulative
                .partition_point(|&c| c < u)
                .min(self.components.len() - 1)
        };
        match self.components[k] {
            Component::Atom(x) => x,
            Component::Density(d) => d.sample(rng),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Domain;
    use approx::assert_relative_eq;

    fn all_families() -> Vec<LevyMeasureSpec> {
        vec![
            LevyMeasureSpec::exponential(0.7, 1.3),
            LevyMeasureSpec::uniform(0.4, 0.5, 2.0),
            LevyMeasureSpec::atom(1.5, 0.3),
            LevyMeasureSpec::power_cutoff(0.2, 2.5, 0.1),
            LevyMeasureSpec::power_cutoff(0.2, 1.5, 0.0),
        ]
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for m in all_families() {
            for &lam in &[0.1, 1.0, 7.0] {
                let q = m.integrate(|r| -(-lam * r).exp_m1(), "t").unwrap();
                assert_relative_eq!(m.laplace_part(lam).unwrap(), q, max_relative = 1e-8);
            }
            if m.total_mass().is_finite() {
                let q = m.integrate(|_| 1.0, "t").unwrap();
                assert_relative_eq!(m.total_mass(), q, max_relative = 1e-9);
                let q = m.integrate(|r| r, "t").unwrap();
                assert_relative_eq!(m.first_moment(), q, max_relative = 1e-9);
            }
            for &u in &[0.05, 0.3, 1.0, 2.5] {
                let q = m.integrate(|r| if r > u { 1.0 } else { 0.0 }, "t");
                if let Ok(q) = q {
                    if m.total_mass().is_finite() {
                        assert_relative_eq!(m.tail(u), q, max_relative = 1e-6, epsilon = 1e-9);
                    }
                }
                let f0 = numerics::integrate(|v| m.tail(v), 0.0, u, &m.breakpoints(), "t").unwrap();
                let f1 = numerics::integrate(|v| v * m.tail(v), 0.0, u, &m.breakpoints(), "t").unwrap();
                let (g0, g1) = m.tail_integrals(u);
                assert_relative_eq!(g0, f0, max_relative = 1e-8);
                assert_relative_eq!(g1, f1, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn exp_moment_matches_quadrature() {
        for m in all_families().into_iter().take(3) {
            let q = m.integrate(|r| (0.4 * r).exp_m1(), "t").unwrap();
            assert_relative_eq!(m.exp_moment(0.4), q, max_relative = 1e-9);
        }
    }

    #[test]
    fn rescale_is_d_times_measure_at_n() {
        let (n, d) = (4.0, 16.0);
        for m in all_families() {
            let r = m.rescale(n, d);
            for &u in &[0.01, 0.1, 0.4] {
                assert_relative_eq!(r.tail(u), d * m.tail(n * u), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn infinite_mass_is_flagged_and_not_sampled() {
        let m = LevyMeasureSpec::power_cutoff(1.0, 1.5, 0.0);
        assert!(m.total_mass().is_infinite());
        assert!(m.validate().is_ok());
        assert!(matches!(m.jump_sampler(), Err(Error::UnsupportedMeasure(_))));
        assert!(LevyMeasureSpec::power_cutoff(1.0, 2.5, 0.0).validate().is_err());
    }

    #[test]
    fn sampler_mean_matches_first_moment() {
        let m = LevyMeasureSpec {
            atoms: vec![Atom {
                location: 2.0,
                mass: 0.5,
            }],
            densities: vec![
                Density::Exponential { mass: 1.0, rate: 2.0 },
                Density::Uniform {
                    mass: 0.5,
                    lo: 1.0,
                    hi: 3.0,
                },
            ],
        };
        let s = m.jump_sampler().unwrap();
        let mut rng = CounterRng::new(5, Domain::Aux);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| s.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let expect = m.first_moment() / m.total_mass();
        assert!((mean - expect).abs() < 4.0 * (var / n as f64).sqrt());
    }
}
