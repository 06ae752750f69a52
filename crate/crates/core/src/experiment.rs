//! Experiment orchestration: configuration, per-n resumable runs, report
//! bundles and their CSV / JSON emission.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::csv;
use crate::error::{Error, Result};
use crate::lab::{
    self, analytic_row, limit_laplace_check, preset_js, run_n, AnalyticRow, CharacteristicGap, NRun, Tolerances,
    TrendCheck, Verdict, LAPLACE_CHECK_GRID,
};
use crate::ladder_sim::{LadderSimulator, StopRule};
use crate::path::{rescale_path, sample_marked_path};
use crate::presets::{limit_parameters, Assumption, Preset};
use crate::rng::{mix64, work_item_seed, GENERATOR_ID};
use crate::stats::{DistanceReport, Role};
use crate::subordinator::SubordinatorSpec;

pub const DEFAULT_PATHS: usize = 100_000;

/// Experiment configuration, read from JSON. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: String,
    /// Overrides the preset's mark assumption.
    pub assumption: Option<Assumption>,
    pub n_grid: Vec<u64>,
    pub paths_per_n: Option<usize>,
    /// Local time at which marginals are read.
    pub horizon: f64,
    pub seed_base: u64,
    pub tolerances: Tolerances,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            preset: "crit-exp-B1-theta2".into(),
            assumption: None,
            n_grid: vec![4, 16, 64],
            paths_per_n: None,
            horizon: 1.0,
            seed_base: 20_240_601,
            tolerances: Tolerances::default(),
            output_dir: PathBuf::from("fluctlab-out"),
        }
    }
}

impl ExperimentConfig {
    /// Parses JSON; malformed input and unknown keys are usage errors.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn paths(&self) -> usize {
        self.paths_per_n.unwrap_or(DEFAULT_PATHS)
    }

    pub fn resolve_preset(&self) -> Result<Preset> {
        let mut p = Preset::lookup(&self.preset)?;
        if let Some(a) = self.assumption {
            p.assumption = a;
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<Preset> {
        let preset = self.resolve_preset()?;
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(Error::Usage(
                "n_grid must be a nonempty list of positive integers".into(),
            ));
        }
        if self.paths() == 0 {
            return Err(Error::Usage("paths_per_n must be positive".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Usage(format!(
                "horizon must be a positive real, got {}",
                self.horizon
            )));
        }
        Ok(preset)
    }

    /// Hash of everything that affects results (the output directory does not).
    fn fingerprint(&self, stage: Stage) -> u64 {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&(c, stage)).expect("config serializes");
        bytes.chunks(8).fold(0x6A09_E667_F3BC_C909, |h, chunk| {
            let mut w = [0u8; 8];
            w[..chunk.len()].copy_from_slice(chunk);
            mix64(h ^ u64::from_le_bytes(w))
        })
    }
}

/// What an experiment computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    /// Analytic tables and characteristic gaps only.
    Calc,
    /// Fixed-n Monte Carlo checks.
    Verify,
    /// Fixed-n checks plus tracked marginals and trends.
    Converge,
    /// `Converge` plus the limit sampler check.
    All,
}

impl Stage {
    fn name(&self) -> &'static str {
        match self {
            Stage::Calc => "calc",
            Stage::Verify => "verify",
            Stage::Converge => "converge",
            Stage::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub generator: String,
}

impl Default for Metadata {
    fn default() -> Self {
        Metadata {
            version: env!("CARGO_PKG_VERSION").into(),
            generator: GENERATOR_ID.into(),
        }
    }
}

/// A module error recorded in the bundle instead of aborting emission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub message: String,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub verdict: Verdict,
    pub stage: Stage,
    pub config: ExperimentConfig,
    pub metadata: Metadata,
    pub analytic: Vec<AnalyticRow>,
    pub reports: Vec<DistanceReport>,
    pub js_gaps: Vec<CharacteristicGap>,
    pub trends: Vec<TrendCheck>,
    pub failure: Option<Failure>,
}

impl ReportBundle {
    pub fn empty(config: ExperimentConfig, stage: Stage) -> Self {
        ReportBundle {
            verdict: Verdict::NoOp,
            stage,
            config,
            metadata: Metadata::default(),
            analytic: vec![],
            reports: vec![],
            js_gaps: vec![],
            trends: vec![],
            failure: None,
        }
    }

    /// 0 pass or no-op, 1 verdict fail, else the failure's code.
    pub fn exit_code(&self) -> i32 {
        match &self.failure {
            Some(f) => f.exit_code,
            None => self.verdict.exit_code(),
        }
    }

    fn settle(&mut self) {
        self.verdict = if self.failure.is_some() {
            Verdict::Fail
        } else {
            lab::verdict(&self.reports, &self.trends)
        };
    }
}

#[derive(Serialize, Deserialize)]
struct Partial {
    fingerprint: u64,
    run: NRun,
}

fn partial_path(dir: &Path, stage: Stage, n: u64) -> PathBuf {
    dir.join("partial").join(format!("{}-n{n}.json", stage.name()))
}

/// A grid point, loaded from a matching partial file when one exists.
fn grid_point(
    config: &ExperimentConfig,
    preset: &Preset,
    stage: Stage,
    n: u64,
    resume_dir: Option<&Path>,
) -> Result<NRun> {
    let fingerprint = config.fingerprint(stage);
    let file = resume_dir.map(|d| partial_path(d, stage, n));
    if let Some(f) = &file {
        if let Ok(text) = fs::read_to_string(f) {
            if let Ok(p) = serde_json::from_str::<Partial>(&text) {
                if p.fingerprint == fingerprint && p.run.n == n {
                    return Ok(p.run);
                }
            }
        }
    }
    let mut run = run_n(
        preset,
        n,
        config.paths(),
        config.seed_base,
        config.horizon,
        &config.tolerances,
    )?;
    if stage == Stage::Verify {
        run.reports.retain(|r| r.role == Role::Check);
    }
    if let Some(f) = &file {
        fs::create_dir_all(f.parent().expect("partial dir"))?;
        let tmp = f.with_extension("tmp");
        fs::write(
            &tmp,
            serde_json::to_vec(&Partial {
                fingerprint,
                run: run.clone(),
            })?,
        )?;
        fs::rename(&tmp, f)?;
    }
    Ok(run)
}

/// Run the pipeline for `stage`. With `resume_dir`, finished grid points
/// are flushed there and reused on a rerun with the same configuration.
///
/// An invalid configuration is returned as an error; failures inside the
/// pipeline are recorded in the bundle.
pub fn run_experiment(config: &ExperimentConfig, stage: Stage, resume_dir: Option<&Path>) -> Result<ReportBundle> {
    let preset = config.validate()?;
    let mut bundle = ReportBundle::empty(config.clone(), stage);
    if let Err(e) = fill(&mut bundle, &preset, stage, resume_dir) {
        bundle.failure = Some(Failure {
            message: e.to_string(),
            exit_code: e.exit_code(),
        });
    }
    bundle.settle();
    Ok(bundle)
}

fn fill(bundle: &mut ReportBundle, preset: &Preset, stage: Stage, resume_dir: Option<&Path>) -> Result<()> {
    let config = bundle.config.clone();
    let tol = &config.tolerances;
    let js = if stage == Stage::Verify {
        None
    } else {
        preset_js(preset, &config.n_grid, tol.trend_floor)?
    };
    if stage == Stage::Calc {
        for &n in &config.n_grid {
            bundle
                .analytic
                .push(analytic_row(preset, n).map_err(|e| e.context(format!("analytic row at n = {n}")))?);
        }
        if let Some(js) = js {
            bundle.reports = js.reports(tol.js_gap);
            bundle.trends = js.trends.clone();
            bundle.js_gaps = js.gaps;
        }
        return Ok(());
    }
    let mut runs = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let run = grid_point(&config, preset, stage, n, resume_dir)?;
        // keep what has finished visible if a later n fails
        bundle.analytic.push(run.analytic.clone());
        bundle.reports.extend(run.reports.iter().cloned());
        runs.push(run);
    }
    if stage == Stage::Verify {
        return Ok(());
    }
    let report = lab::assemble(runs, js, tol);
    bundle.reports = report.reports(tol);
    bundle.trends = report.trends;
    bundle.js_gaps = report.js.map(|j| j.gaps).unwrap_or_default();
    if stage == Stage::All {
        if let Ok(limit) = limit_parameters(&preset.family, &preset.assumption) {
            let spec = SubordinatorSpec::from_limit(&limit)?;
            let draws = config.paths();
            let seed = work_item_seed(config.seed_base, 0, 0);
            bundle.reports.extend(limit_laplace_check(
                &spec,
                config.horizon,
                draws,
                seed,
                &LAPLACE_CHECK_GRID,
            )?);
        }
    }
    Ok(())
}

/// Output file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Parses a comma separated list such as `csv,json`.
    pub fn parse_list(s: &str) -> Result<Vec<Format>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| match t {
                "csv" => Ok(Format::Csv),
                "json" => Ok(Format::Json),
                other => Err(Error::Usage(format!("unknown format `{other}` (expected csv or json)"))),
            })
            .collect()
    }
}

fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let f = fs::File::create(path).map_err(|e| Error::Io(e).context(format!("creating {}", path.display())))?;
    let mut w = BufWriter::new(f);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(csv::real).unwrap_or_default()
}

/// Write the bundle's tables into `dir`; returns the files written.
pub fn emit_outputs(bundle: &ReportBundle, formats: &[Format], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(e).context(format!("creating {}", dir.display())))?;
    let mut written = Vec::new();
    if formats.contains(&Format::Csv) {
        let path = dir.join("reports.csv");
        write_file(&path, |w| {
            let header = [
                "label",
                "metric",
                "role",
                "n",
                "value",
                "threshold",
                "pass",
                "N",
                "seed_base",
                "estimate",
                "se",
            ];
            let rows = bundle.reports.iter().map(|r| {
                vec![
                    r.label.clone(),
                    r.metric.name().into(),
                    if r.role == Role::Check { "check" } else { "tracked" }.into(),
                    r.n.to_string(),
                    csv::real(r.value),
                    csv::real(r.threshold),
                    r.pass.to_string(),
                    r.sample_sizes
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join(";"),
                    r.seed_base.to_string(),
                    opt(r.estimate),
                    opt(r.se),
                ]
            });
            csv::write_table(w, &header, rows)
        })?;
        written.push(path);

        let path = dir.join("analytic.csv");
        write_file(&path, |w| {
            let header = [
                "n",
                "d_n",
                "psi_1",
                "eta",
                "phi_1",
                "mu_plus_mass",
                "lambda_n",
                "kill_rate",
                "mean_height",
                "b2",
                "theta",
                "rho",
            ];
            let rows = bundle.analytic.iter().map(|a| {
                let mut row = vec![a.n.to_string()];
                row.extend(
                    [
                        a.d_n,
                        a.psi_1,
                        a.eta,
                        a.phi_1,
                        a.mu_plus_mass,
                        a.lambda_n,
                        a.kill_rate,
                        a.mean_height,
                    ]
                    .map(csv::real),
                );
                row.extend([a.b2, a.theta, a.rho].map(opt));
                row
            });
            csv::write_table(w, &header, rows)
        })?;
        written.push(path);

        if !bundle.js_gaps.is_empty() {
            let path = dir.join("js_gaps.csv");
            write_file(&path, |w| {
                let rows = bundle.js_gaps.iter().map(|g| {
                    vec![
                        g.name.clone(),
                        g.n.to_string(),
                        csv::real(g.value),
                        csv::real(g.limit),
                        csv::real(g.gap),
                    ]
                });
                csv::write_table(w, &["name", "n", "value", "limit", "gap"], rows)
            })?;
            written.push(path);
        }
        if !bundle.trends.is_empty() {
            let path = dir.join("trends.csv");
            write_file(&path, |w| {
                let rows = bundle.trends.iter().map(|t| {
                    vec![
                        t.label.clone(),
                        t.first_n.to_string(),
                        t.last_n.to_string(),
                        csv::real(t.first),
                        csv::real(t.last),
                        t.pass.to_string(),
                    ]
                });
                csv::write_table(w, &["label", "first_n", "last_n", "first", "last", "pass"], rows)
            })?;
            written.push(path);
        }
    }
    if formats.contains(&Format::Json) {
        let path = dir.join("summary.json");
        write_file(&path, |w| {
            serde_json::to_writer_pretty(&mut *w, bundle)?;
            writeln!(w)?;
            Ok(())
        })?;
        written.push(path);
    }
    Ok(written)
}

/// Rescaled sample paths on `[0, horizon]`, one CSV per n.
pub fn dump_paths(config: &ExperimentConfig, count: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    let preset = config.validate()?;
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for &n in &config.n_grid {
        let (spec, mark, sc) = preset.at(n)?;
        let paths = crate::parallel::try_map_indexed(count, |i| {
            let seed = work_item_seed(config.seed_base, n, i as u64);
            let p = sample_marked_path(&spec, &mark, sc.d_n * config.horizon, seed)?;
            rescale_path(&p, &sc, config.horizon)
        })?;
        let path = dir.join(format!("paths-n{n}.csv"));
        write_file(&path, |w| {
            let rows = paths.iter().enumerate().flat_map(|(i, p)| {
                p.events.iter().map(move |e| {
                    vec![
                        i.to_string(),
                        csv::real(p.drift),
                        csv::real(e.time),
                        csv::real(e.size),
                        (e.mark as u8).to_string(),
                    ]
                })
            });
            csv::write_table(w, &["replicate", "drift", "time", "size", "mark"], rows)
        })?;
        written.push(path);
    }
    Ok(written)
}

/// Ladder points up to local time `horizon`, one CSV per n.
pub fn dump_ladders(config: &ExperimentConfig, count: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    let preset = config.validate()?;
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for &n in &config.n_grid {
        let (spec, mark, sc) = preset.at(n)?;
        let sim = LadderSimulator::new(&spec, &mark, &sc)?;
        let stop = StopRule::local_time(config.horizon).with_horizon(config.tolerances.horizon);
        let ladders = crate::ladder_sim::simulate_batch(&sim, count, &stop, |i| work_item_seed(config.seed_base, n, i));
        let path = dir.join(format!("ladders-n{n}.csv"));
        write_file(&path, |w| {
            let rows = ladders.iter().enumerate().flat_map(|(i, l)| {
                l.points
                    .iter()
                    .filter(|p| p.local_time <= config.horizon)
                    .map(move |p| {
                        vec![
                            i.to_string(),
                            csv::real(p.local_time),
                            csv::real(p.record_time),
                            csv::real(p.undershoot),
                            csv::real(p.overshoot),
                            csv::real(p.level),
                            (p.mark as u8).to_string(),
                        ]
                    })
            });
            csv::write_table(
                w,
                &[
                    "replicate",
                    "local_time",
                    "record_time",
                    "undershoot",
                    "overshoot",
                    "level",
                    "mark",
                ],
                rows,
            )
        })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(preset: &str) -> ExperimentConfig {
        ExperimentConfig {
            preset: preset.into(),
            n_grid: vec![4, 16],
            paths_per_n: Some(2000),
            ..Default::default()
        }
    }

    #[test]
    fn unknown_keys_and_presets_are_usage_errors() {
        let e = ExperimentConfig::from_json(r#"{"preset": "crit-exp", "bogus": 1}"#).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let c = ExperimentConfig::from_json(r#"{"preset": "nope"}"#).unwrap();
        let e = run_experiment(&c, Stage::Calc, None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("crit-exp-B2"));
    }

    #[test]
    fn fingerprint_ignores_output_dir() {
        let a = small("crit-exp");
        let b = ExperimentConfig {
            output_dir: "elsewhere".into(),
            ..a.clone()
        };
        assert_eq!(a.fingerprint(Stage::Converge), b.fingerprint(Stage::Converge));
        let c = ExperimentConfig {
            seed_base: 1,
            ..a.clone()
        };
        assert_ne!(a.fingerprint(Stage::Converge), c.fingerprint(Stage::Converge));
        assert_ne!(a.fingerprint(Stage::Converge), a.fingerprint(Stage::Verify));
    }

    #[test]
    fn calc_stage_reports_gaps() {
        let b = run_experiment(&small("crit-exp"), Stage::Calc, None).unwrap();
        assert_eq!(b.analytic.len(), 2);
        assert!(b.js_gaps.iter().any(|g| g.name == "h2"));
        assert!(b.failure.is_none());
    }

    #[test]
    fn failures_are_recorded_not_raised() {
        // too few paths for the rate test
        let c = ExperimentConfig {
            paths_per_n: Some(10),
            ..small("crit-exp-B1-theta2")
        };
        let b = run_experiment(&c, Stage::Verify, None).unwrap();
        assert_eq!(b.verdict, Verdict::Fail);
        assert_eq!(b.exit_code(), 3);
        assert!(b.failure.unwrap().message.contains("n = 4"));
    }

    #[test]
    fn format_lists() {
        assert_eq!(Format::parse_list("csv,json").unwrap(), vec![Format::Csv, Format::Json]);
        assert!(Format::parse_list("xml").is_err());
    }
}
