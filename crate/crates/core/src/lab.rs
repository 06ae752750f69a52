//! Convergence checks over an n-grid: analytic characteristic gaps and
//! Monte Carlo distances between prelimit ladders and their limit laws.

use serde::{Deserialize, Serialize};

use crate::calculus::{self, ProcessSpec};
use crate::error::{Error, Result};
use crate::ladder::{first_mark_time, lifetime, LadderProcess};
use crate::ladder_measure::{ladder_measure, LadderMeasure};
use crate::ladder_sim::{check_censoring, simulate_batch, LadderSimulator, StopRule, DEFAULT_HORIZON};
use crate::presets::{limit_parameters, process_limit, Assumption, Family, LimitSpec, Preset, TimeScale};
use crate::rng::{replicate_seed, work_item_seed};
use crate::stats::{
    distribution_distance, empirical_laplace, exponential_rate_test, ladder_chi_square, mean_test, Against,
    DistanceReport, Law, Metric, Role, SampleSet, KS_COEFFICIENT, TV_THRESHOLD,
};
use crate::subordinator::{sample_values, subordinator_exponent, SubordinatorSpec};

/// Truncation function used throughout.
pub fn truncation(u: f64) -> f64 {
    u.min(1.0)
}

/// A bounded test function vanishing near 0, with its kinks.
#[derive(Clone, Copy)]
pub struct TestFunction {
    pub name: &'static str,
    pub g: fn(f64) -> f64,
    pub breaks: &'static [f64],
}

pub const TEST_BANK: [TestFunction; 3] = [
    TestFunction {
        name: "shifted-ramp",
        g: |u| if u > 1.0 { (u - 1.0).min(1.0) } else { 0.0 },
        breaks: &[1.0, 2.0],
    },
    TestFunction {
        name: "half-ramp",
        g: |u| (2.0 * u - 1.0).clamp(0.0, 1.0),
        breaks: &[0.5, 1.0],
    },
    TestFunction {
        name: "step-2",
        g: |u| if u > 2.0 { 1.0 } else { 0.0 },
        breaks: &[2.0],
    },
];

/// Gap of one characteristic at one n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicGap {
    pub name: String,
    pub n: u64,
    pub value: f64,
    pub limit: f64,
    pub gap: f64,
}

/// Endpoint comparison of a tracked quantity over the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendCheck {
    pub label: String,
    pub first_n: u64,
    pub last_n: u64,
    pub first: f64,
    pub last: f64,
    pub pass: bool,
}

/// `last < first`, or `last` already at the floor (so exact zeros pass).
pub fn trend(label: impl Into<String>, points: &[(u64, f64)], floor: f64) -> Option<TrendCheck> {
    let (&(first_n, first), &(last_n, last)) = (points.first()?, points.last()?);
    if points.len() < 2 {
        return None;
    }
    Some(TrendCheck {
        label: label.into(),
        first_n,
        last_n,
        first,
        last,
        pass: last < first || last <= floor,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsReport {
    pub gaps: Vec<CharacteristicGap>,
    pub trends: Vec<TrendCheck>,
}

impl JsReport {
    pub fn gaps_named(&self, name: &str) -> Vec<(u64, f64)> {
        self.gaps
            .iter()
            .filter(|g| g.name == name)
            .map(|g| (g.n, g.gap))
            .collect()
    }

    /// Gaps as tracked distance reports with threshold `threshold`.
    pub fn reports(&self, threshold: f64) -> Vec<DistanceReport> {
        self.gaps
            .iter()
            .map(|g| {
                DistanceReport::new(format!("js {}", g.name), Metric::Gap, g.gap, threshold, vec![])
                    .at(g.n, 0)
                    .tracked()
            })
            .collect()
    }
}

/// Characteristics `(c, ∫h², ∫g₁, …)` of a spec with Gaussian part `b2`.
fn characteristics(spec: &ProcessSpec, b2: f64) -> Result<Vec<(String, f64)>> {
    let m = &spec.levy_measure;
    let mut out = vec![
        (
            "c".to_string(),
            spec.drift + m.integrate_with_breaks(truncation, &[1.0], "∫h dΛ")?,
        ),
        (
            "h2".to_string(),
            b2 + m.integrate_with_breaks(|u| truncation(u).powi(2), &[1.0], "∫h² dΛ")?,
        ),
    ];
    for t in TEST_BANK {
        out.push((t.name.to_string(), m.integrate_with_breaks(t.g, t.breaks, t.name)?));
    }
    Ok(out)
}

/// Gaps of the rescaled specs' characteristics to those of `limit`, per
/// n, with an endpoint trend for each characteristic.
pub fn js_condition_check(family: &[(u64, ProcessSpec)], limit: &LimitSpec, floor: f64) -> Result<JsReport> {
    let mut target = characteristics(&ProcessSpec::new(0.0, limit.limit_measure.clone()), limit.b2)?;
    target[0].1 = limit.c;
    let mut gaps = Vec::new();
    for (n, spec) in family {
        spec.validate()?;
        let here = characteristics(spec, 0.0).map_err(|e| e.context(format!("characteristics at n = {n}")))?;
        for ((name, v), (_, l)) in here.into_iter().zip(&target) {
            gaps.push(CharacteristicGap {
                name,
                n: *n,
                value: v,
                limit: *l,
                gap: (v - l).abs(),
            });
        }
    }
    let mut report = JsReport { gaps, trends: vec![] };
    report.trends = target
        .iter()
        .filter_map(|(name, _)| trend(format!("js {name}"), &report.gaps_named(name), floor))
        .collect();
    Ok(report)
}

/// Analytic parameters of a preset at one n, on the rescaled process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRow {
    pub n: u64,
    pub d_n: f64,
    pub psi_1: f64,
    pub eta: f64,
    pub phi_1: f64,
    #[serde(with = "crate::csv::json_real")]
    pub mu_plus_mass: f64,
    #[serde(with = "crate::csv::json_real")]
    pub lambda_n: f64,
    pub kill_rate: f64,
    #[serde(with = "crate::csv::json_real")]
    pub mean_height: f64,
    /// Limit coefficients, where the family has a limit.
    pub b2: Option<f64>,
    pub theta: Option<f64>,
    pub rho: Option<f64>,
}

pub fn analytic_row(preset: &Preset, n: u64) -> Result<AnalyticRow> {
    let (spec, mark, sc) = preset.at(n)?;
    let r = spec.rescale(&sc);
    let lm = ladder_measure(&spec, &mark, Some(&sc))?;
    let (b2, theta, rho) = match limit_parameters(&preset.family, &preset.assumption) {
        Ok(l) => (Some(l.b2), Some(l.theta), Some(l.rho)),
        Err(_) => (process_limit(&preset.family).ok().map(|p| p.0), None, None),
    };
    Ok(AnalyticRow {
        n,
        d_n: sc.d_n,
        psi_1: calculus::laplace_exponent(&r, 1.0)?,
        eta: lm.eta,
        phi_1: calculus::phi_inverse(&r, 1.0)?,
        // `+ 0.0` folds the -0 of empty measures
        mu_plus_mass: lm.mu_plus_mass + 0.0,
        lambda_n: lm.lambda_rate + 0.0,
        kill_rate: lm.kill_rate,
        mean_height: lm.mean_height()? + 0.0,
        b2,
        theta,
        rho,
    })
}

/// Thresholds and knobs of a convergence run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub ks_coefficient: f64,
    pub tv: f64,
    /// Thresholds of tracked marginals, applied at the largest n.
    pub tracked_tv: f64,
    pub tracked_w1: f64,
    pub js_gap: f64,
    /// Trend values at or below this count as converged.
    pub trend_floor: f64,
    pub chi_square_bins: usize,
    pub max_censored: f64,
    pub horizon: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ks_coefficient: KS_COEFFICIENT,
            tv: TV_THRESHOLD,
            tracked_tv: 0.05,
            tracked_w1: 0.25,
            js_gap: 0.1,
            trend_floor: 1e-9,
            chi_square_bins: 10,
            max_censored: 0.05,
            horizon: DEFAULT_HORIZON,
        }
    }
}

/// Sample size at which the TV threshold is calibrated.
pub const TV_REFERENCE_SIZE: f64 = 1e5;

/// `tv` at the reference size, widened like `1/√N` for smaller samples,
/// since TV noise between a sample and its own law scales that way.
pub fn tv_threshold(tv: f64, samples: usize) -> f64 {
    tv * (TV_REFERENCE_SIZE / samples.max(1) as f64).sqrt().max(1.0)
}

/// Reports of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NRun {
    pub n: u64,
    pub analytic: AnalyticRow,
    pub reports: Vec<DistanceReport>,
}

/// Whether the limit mark count is tracked: the mark rate converges only
/// under the n² scaling with a B1 or B2 rule.
fn marks_tracked(preset: &Preset) -> bool {
    matches!(
        (&preset.family, preset.assumption),
        (
            Family::Scaled {
                time_scale: TimeScale::Square,
                ..
            },
            Assumption::B1 { .. } | Assumption::B2 { .. }
        )
    )
}

fn ladder_points(ladders: &[LadderProcess], upto: f64) -> Vec<(f64, f64)> {
    ladders
        .iter()
        .flat_map(|l| {
            l.points
                .iter()
                .filter(move |p| p.local_time <= upto)
                .map(|p| (p.undershoot, p.overshoot))
        })
        .collect()
}

/// Simulate `paths` ladders of `preset` at index `n` and compare them with
/// the analytic prelimit laws and with the limit laws at local time `t`.
pub fn run_n(preset: &Preset, n: u64, paths: usize, seed_base: u64, t: f64, tol: &Tolerances) -> Result<NRun> {
    let ctx = |e: Error| e.context(format!("{} at n = {n}", preset.id));
    let analytic = analytic_row(preset, n).map_err(ctx)?;
    let (spec, mark, sc) = preset.at(n).map_err(ctx)?;
    let lm = ladder_measure(&spec, &mark, Some(&sc)).map_err(ctx)?;
    let sim = LadderSimulator::new(&spec, &mark, &sc).map_err(ctx)?;
    let killed = lm.kill_rate > 0.0;
    let stop = if killed {
        StopRule::default()
    } else if lm.lambda_rate > 0.0 {
        StopRule::local_time(t).and_first_mark()
    } else {
        StopRule::local_time(t)
    }
    .with_horizon(tol.horizon);
    let ladders = simulate_batch(&sim, paths, &stop, |i| work_item_seed(seed_base, n, i));
    let observed = |l: &LadderProcess| l.observed_at(t);
    check_censoring(&ladders, observed, tol.max_censored).map_err(ctx)?;

    let mut reports = fixed_checks(&ladders, &lm, killed, t, tol).map_err(ctx)?;
    reports.extend(tracked_marginals(preset, &ladders, t, tol).map_err(ctx)?);
    let reports = reports.into_iter().map(|r| r.at(n, seed_base)).collect();
    Ok(NRun { n, analytic, reports })
}

fn fixed_checks(
    ladders: &[LadderProcess],
    lm: &LadderMeasure,
    killed: bool,
    t: f64,
    tol: &Tolerances,
) -> Result<Vec<DistanceReport>> {
    let mut out = Vec::new();
    let pairs = ladder_points(ladders, if killed { f64::INFINITY } else { t });
    if pairs.len() >= 20 {
        let over = pairs.iter().map(|p| p.1).collect::<Vec<_>>();
        let threshold = tol.ks_coefficient / (over.len() as f64).sqrt();
        let set = SampleSet::univariate("overshoot", over, 0)?;
        out.push(distribution_distance(
            &set,
            Against::Law(Law::LadderJump(lm)),
            Metric::Ks,
            Some(threshold),
        )?);
    }
    // at least ~10 expected per cell
    if pairs.len() >= 10 * tol.chi_square_bins.pow(2) {
        out.push(ladder_chi_square(
            "undershoot-overshoot",
            &pairs,
            lm,
            tol.chi_square_bins,
        )?);
    }
    if lm.lambda_rate > 0.0 {
        let e: Vec<_> = ladders.iter().map(first_mark_time).collect();
        out.push(exponential_rate_test("first-mark time", &e, lm.lambda_rate)?);
    }
    if killed {
        let l: Vec<_> = ladders.iter().map(lifetime).collect();
        out.push(exponential_rate_test("lifetime", &l, lm.kill_rate)?);
    } else {
        let alive: Vec<&LadderProcess> = ladders.iter().filter(|l| l.observed_at(t)).collect();
        if !lm.is_zero() {
            let h: Vec<f64> = alive.iter().map(|l| l.h_plus(t)).collect();
            out.push(mean_test("mean H+(t)", &h, t * lm.mean_height()?)?);
        }
        if lm.lambda_rate > 0.0 {
            let m: Vec<f64> = alive.iter().map(|l| l.h_mark(t) as f64).collect();
            let threshold = tv_threshold(tol.tv, m.len());
            let set = SampleSet::univariate("HM(t) prelimit", m, 0)?;
            let law = Law::Poisson {
                rate: lm.lambda_rate * t,
            };
            out.push(distribution_distance(
                &set,
                Against::Law(law),
                Metric::TvIntegers,
                Some(threshold),
            )?);
        }
    }
    Ok(out)
}

fn tracked_marginals(
    preset: &Preset,
    ladders: &[LadderProcess],
    t: f64,
    tol: &Tolerances,
) -> Result<Vec<DistanceReport>> {
    let (b2, _, _) = process_limit(&preset.family)?;
    let mut out = Vec::new();
    let alive: Vec<&LadderProcess> = ladders.iter().filter(|l| l.observed_at(t) && !l.killed_by(t)).collect();
    if !alive.is_empty() {
        let h = alive.iter().map(|l| l.h_plus(t)).collect();
        let set = SampleSet::univariate("H+(t)", h, 0)?;
        let law = Law::PointMass { at: b2 / 2.0 * t };
        out.push(distribution_distance(&set, Against::Law(law), Metric::Wasserstein1, Some(tol.tracked_w1))?.tracked());
    }
    if marks_tracked(preset) {
        let limit = limit_parameters(&preset.family, &preset.assumption)?;
        let m = alive.iter().map(|l| l.h_mark(t) as f64).collect();
        let set = SampleSet::univariate("HM(t)", m, 0)?;
        let law = Law::Poisson {
            rate: (limit.theta + limit.rho) * t,
        };
        out.push(distribution_distance(&set, Against::Law(law), Metric::TvIntegers, Some(tol.tracked_tv))?.tracked());
    }
    Ok(out)
}

/// Outcome of a grid run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NoOp,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NoOp => "no-op",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Fail => 1,
            _ => 0,
        }
    }
}

/// Endpoint trends of every tracked report present at both ends of the grid.
pub fn tracked_trends(runs: &[NRun], floor: f64) -> Vec<TrendCheck> {
    let mut labels: Vec<(String, Metric)> = Vec::new();
    for r in runs.iter().flat_map(|r| &r.reports) {
        if r.role == Role::Tracked && !labels.iter().any(|(l, m)| *l == r.label && *m == r.metric) {
            labels.push((r.label.clone(), r.metric));
        }
    }
    labels
        .into_iter()
        .filter_map(|(label, metric)| {
            let points: Vec<(u64, f64)> = runs
                .iter()
                .flat_map(|r| &r.reports)
                .filter(|r| r.label == label && r.metric == metric)
                .map(|r| (r.n, r.value))
                .collect();
            trend(label, &points, floor)
        })
        .collect()
}

/// Check reports must pass everywhere, tracked reports at the largest n,
/// and every trend must hold.
pub fn verdict<'a>(reports: impl IntoIterator<Item = &'a DistanceReport>, trends: &[TrendCheck]) -> Verdict {
    let reports: Vec<_> = reports.into_iter().collect();
    if reports.is_empty() && trends.is_empty() {
        return Verdict::NoOp;
    }
    let last_n = reports.iter().map(|r| r.n).max().unwrap_or(0);
    let ok = reports
        .iter()
        .all(|r| r.pass || (r.role == Role::Tracked && r.n != last_n))
        && trends.iter().all(|t| t.pass);
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Analytic condition gaps of a preset over `n_grid`, if its limit is known.
pub fn preset_js(preset: &Preset, n_grid: &[u64], floor: f64) -> Result<Option<JsReport>> {
    let Ok((b2, c, kill)) = process_limit(&preset.family) else {
        return Ok(None);
    };
    let limit = LimitSpec {
        b2,
        c,
        limit_measure: crate::measure::LevyMeasureSpec::zero(),
        eta: 0.0,
        theta: 0.0,
        kappa_slope: 0.0,
        rho: 0.0,
        kill,
    };
    let family = n_grid
        .iter()
        .map(|&n| Ok((n, preset.family.rescaled(n)?)))
        .collect::<Result<Vec<_>>>()?;
    js_condition_check(&family, &limit, floor).map(Some)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub runs: Vec<NRun>,
    pub js: Option<JsReport>,
    pub trends: Vec<TrendCheck>,
    pub verdict: Verdict,
}

impl ConvergenceReport {
    /// All distance reports in grid order, analytic gaps included.
    pub fn reports(&self, tol: &Tolerances) -> Vec<DistanceReport> {
        let mut out: Vec<_> = self.runs.iter().flat_map(|r| r.reports.clone()).collect();
        if let Some(js) = &self.js {
            out.extend(js.reports(tol.js_gap));
        }
        out
    }
}

/// Assemble a report from finished grid points.
pub fn assemble(runs: Vec<NRun>, js: Option<JsReport>, tol: &Tolerances) -> ConvergenceReport {
    let mut trends = tracked_trends(&runs, tol.trend_floor);
    if let Some(js) = &js {
        trends.extend(js.trends.iter().cloned());
    }
    let mut report = ConvergenceReport {
        runs,
        js,
        trends,
        verdict: Verdict::NoOp,
    };
    let all = report.reports(tol);
    report.verdict = verdict(&all, &report.trends);
    report
}

/// Run `preset` over `n_grid` at local time `t`.
pub fn convergence_report(
    preset_id: &str,
    n_grid: &[u64],
    paths: usize,
    seed_base: u64,
    t: f64,
    tol: &Tolerances,
) -> Result<ConvergenceReport> {
    let preset = Preset::lookup(preset_id)?;
    let mut runs = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        runs.push(run_n(&preset, n, paths, seed_base, t, tol)?);
    }
    let js = preset_js(&preset, n_grid, tol.trend_floor)?;
    Ok(assemble(runs, js, tol))
}

/// `(β, γ)` grid of the limit sampler check.
pub const LAPLACE_CHECK_GRID: [(f64, f64); 9] = [
    (0.5, 0.5),
    (0.5, 1.0),
    (0.5, 2.0),
    (1.0, 0.5),
    (1.0, 1.0),
    (1.0, 2.0),
    (2.0, 0.5),
    (2.0, 1.0),
    (2.0, 2.0),
];

/// Empirical `E[e^{-βH⁺(t) - γHᴹ(t)}]` of `draws` sampled limit values at
/// each grid point against `e^{-tΦ(β, γ)}`, as z-scores on the bootstrap
/// s.e. (passing at 3). Killed draws are placed at +∞ in both coordinates,
/// so every grid point needs `β + γ > 0`.
pub fn limit_laplace_check(
    spec: &SubordinatorSpec,
    t: f64,
    draws: usize,
    seed: u64,
    grid: &[(f64, f64)],
) -> Result<Vec<DistanceReport>> {
    if grid.iter().any(|&(b, g)| !(b >= 0.0 && g >= 0.0 && b + g > 0.0)) {
        return Err(Error::invalid("grid points need β, γ ≥ 0 with β + γ > 0"));
    }
    let values = sample_values(spec, t, draws, seed)?
        .into_iter()
        .map(|v| v.map_or((f64::MAX, f64::MAX), |(h, m)| (h, m as f64)))
        .collect();
    let set = SampleSet::bivariate("limit (H+, HM)", values, 0)?;
    grid.iter()
        .enumerate()
        .map(|(k, &(b, g))| {
            let (m, se) = empirical_laplace(&set, b, g, replicate_seed(seed, k as u64))?;
            let exact = (-t * subordinator_exponent(spec, b, g)?).exp();
            let z = if se > 0.0 {
                (m - exact).abs() / se
            } else {
                f64::INFINITY * (m - exact).abs()
            };
            Ok(
                DistanceReport::new(format!("laplace({b},{g})"), Metric::MeanZ, z.max(0.0), 3.0, vec![draws])
                    .at(0, seed)
                    .with_estimate(m, se),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LevyMeasureSpec;

    #[test]
    fn constant_family_has_zero_gaps() {
        let spec = ProcessSpec::new(-0.5, LevyMeasureSpec::uniform(1.0, 0.0, 3.0));
        let family: Vec<_> = [4, 16, 64].iter().map(|&n| (n, spec.clone())).collect();
        let limit = LimitSpec {
            b2: 0.0,
            c: -0.5
                + spec
                    .levy_measure
                    .integrate_with_breaks(truncation, &[1.0], "c")
                    .unwrap(),
            limit_measure: spec.levy_measure.clone(),
            eta: 0.0,
            theta: 0.0,
            kappa_slope: 0.0,
            rho: 0.0,
            kill: 0.0,
        };
        let r = js_condition_check(&family, &limit, 1e-9).unwrap();
        assert!(r.gaps.iter().all(|g| g.gap < 1e-12), "{:?}", r.gaps);
        assert!(r.trends.iter().all(|t| t.pass));
    }

    #[test]
    fn critical_exponential_gaps_match_closed_forms() {
        let p = Preset::lookup("crit-exp").unwrap();
        let js = preset_js(&p, &[4, 16, 64], 1e-9).unwrap().unwrap();
        for (n, gap) in js.gaps_named("h2") {
            let n = n as f64;
            let exact = 2.0 * (1.0 + n) * (-n).exp();
            assert!((gap - exact).abs() < 1e-9 * exact.max(1e-6), "n={n}: {gap} vs {exact}");
        }
        for (n, gap) in js.gaps_named("c") {
            let exact = n as f64 * (-(n as f64)).exp();
            assert!((gap - exact).abs() < 1e-9, "n={n}: {gap} vs {exact}");
        }
        assert!(js.trends.iter().all(|t| t.pass), "{:?}", js.trends);
    }

    #[test]
    fn trend_needs_two_points_and_honours_floor() {
        assert!(trend("x", &[(4, 1.0)], 0.0).is_none());
        assert!(trend("x", &[(4, 1.0), (64, 0.5)], 0.0).unwrap().pass);
        assert!(!trend("x", &[(4, 0.5), (64, 1.0)], 0.0).unwrap().pass);
        assert!(trend("x", &[(4, 0.0), (64, 0.0)], 1e-9).unwrap().pass);
    }

    #[test]
    fn drift_only_gives_empty_ladders_and_passes() {
        let r = convergence_report("drift-only", &[4, 16], 2000, 7, 1.0, &Tolerances::default()).unwrap();
        for run in &r.runs {
            let w = run.reports.iter().find(|r| r.label == "H+(t)").unwrap();
            assert_eq!(w.value, 0.0);
        }
        assert_eq!(r.verdict, Verdict::Pass, "{:#?}", r);
    }

    #[test]
    fn tracked_reports_only_count_at_the_last_n() {
        let bad = DistanceReport::new("w", Metric::Wasserstein1, 2.0, 1.0, vec![1])
            .at(4, 0)
            .tracked();
        let good = DistanceReport::new("w", Metric::Wasserstein1, 0.5, 1.0, vec![1])
            .at(64, 0)
            .tracked();
        assert_eq!(verdict([&bad, &good], &[]), Verdict::Pass);
        let check = DistanceReport::new("k", Metric::Ks, 2.0, 1.0, vec![1]).at(4, 0);
        assert_eq!(verdict([&bad, &good, &check], &[]), Verdict::Fail);
        assert_eq!(verdict([], &[]), Verdict::NoOp);
    }

    #[test]
    fn limit_sampler_matches_its_exponent() {
        let spec = SubordinatorSpec::new(1.0, LadderMeasure::zero(), 2.0, 0.5);
        let r = limit_laplace_check(&spec, 1.0, 20_000, 3, &LAPLACE_CHECK_GRID).unwrap();
        assert_eq!(r.len(), 9);
        assert!(r.iter().all(|x| x.pass), "{r:#?}");
        assert!(limit_laplace_check(&spec, 1.0, 10, 3, &[(0.0, 0.0)]).is_err());
    }
}
