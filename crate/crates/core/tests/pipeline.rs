use fluctlab::calculus::{MarkRule, ProcessSpec, ScalingParams};
use fluctlab::experiment::{emit_outputs, run_experiment, ExperimentConfig, Format, ReportBundle, Stage};
use fluctlab::lab::Verdict;
use fluctlab::ladder::record_decomposition;
use fluctlab::ladder_sim::{simulate_batch, LadderSimulator, StopRule};
use fluctlab::measure::LevyMeasureSpec;
use fluctlab::path::sample_marked_path;
use fluctlab::presets::{limit_parameters, Preset};
use fluctlab::rng::replicate_seed;
use fluctlab::stats::{distribution_distance, Against, Metric, SampleSet};
use fluctlab::subordinator::{sample_values, SubordinatorSpec};
use fluctlab::walk::{fristedt_alpha, fristedt_k_max, IncrementWalk};
use statrs::distribution::{ContinuousCDF, Discrete, Gamma, Poisson};

fn exp_spec(mass: f64) -> ProcessSpec {
    ProcessSpec::new(-1.0, LevyMeasureSpec::exponential(mass, 1.0))
}

#[test]
fn block_and_event_engines_agree() {
    let p = Preset::lookup("crit-exp-B2").unwrap();
    let (spec, mark, sc) = p.at(8).unwrap();
    let blocks = LadderSimulator::new(&spec, &mark, &sc).unwrap();
    let events = LadderSimulator::events_only(&spec, &mark, &sc).unwrap();
    assert!(blocks.uses_blocks() && !events.uses_blocks());
    // critical excursions have infinite mean length, which the event engine
    // pays for in full; a common path-time cap keeps the two laws equal
    let stop = StopRule::local_time(1.0).with_horizon(2000.0);
    let a = simulate_batch(&blocks, 20_000, &stop, |i| replicate_seed(1, i));
    let b = simulate_batch(&events, 20_000, &stop, |i| replicate_seed(2, i));
    let h = |v: &[fluctlab::ladder::LadderProcess], label: &str| {
        SampleSet::univariate(label, v.iter().map(|l| l.h_plus(1.0)).collect(), 8).unwrap()
    };
    let (ha, hb) = (h(&a, "blocks"), h(&b, "events"));
    let ks = distribution_distance(&ha, Against::Samples(&hb), Metric::Ks, None).unwrap();
    assert!(ks.pass, "{ks:?}");
    let m = |v: &[fluctlab::ladder::LadderProcess], label: &str| {
        SampleSet::univariate(label, v.iter().map(|l| l.h_mark(1.0) as f64).collect(), 8).unwrap()
    };
    let (ma, mb) = (m(&a, "blocks"), m(&b, "events"));
    let tv = distribution_distance(&ma, Against::Samples(&mb), Metric::TvIntegers, Some(0.03)).unwrap();
    assert!(tv.pass, "{tv:?}");
}

#[test]
fn simulator_matches_brute_force_record_counts() {
    // subcritical, unscaled: records of a stored path up to T against the
    // direct simulator censored at the same T
    let spec = exp_spec(0.5);
    let mark = MarkRule::always();
    let horizon = 60.0;
    let sim = LadderSimulator::new(&spec, &mark, &ScalingParams::identity()).unwrap();
    let direct = simulate_batch(&sim, 20_000, &StopRule::default().with_horizon(horizon), |i| {
        replicate_seed(3, i)
    });
    let direct: Vec<f64> = direct.iter().map(|l| l.points.len() as f64).collect();
    let brute: Vec<f64> = (0..20_000)
        .map(|i| {
            let p = sample_marked_path(&spec, &mark, horizon, replicate_seed(4, i)).unwrap();
            record_decomposition(&p).len() as f64
        })
        .collect();
    let a = SampleSet::univariate("direct", direct, 1).unwrap();
    let b = SampleSet::univariate("brute", brute, 1).unwrap();
    let tv = distribution_distance(&a, Against::Samples(&b), Metric::TvIntegers, Some(0.03)).unwrap();
    assert!(tv.pass, "{tv:?}");
}

/// `P(X(t) > 0)` for drift `-speed`, jumps at `mass` per unit time, sizes Exp(rate).
fn positive_prob(mass: f64, rate: f64, speed: f64, t: f64) -> f64 {
    let pois = Poisson::new(mass * t).unwrap();
    let mut p = 0.0;
    for m in 1..2000u64 {
        let w = pois.pmf(m);
        if w < 1e-18 && m as f64 > mass * t {
            break;
        }
        p += w * (1.0 - Gamma::new(m as f64, rate).unwrap().cdf(speed * t));
    }
    p
}

#[test]
fn fristedt_alpha_matches_quadrature_oracle() {
    let n = 8u64;
    let p = Preset::lookup("crit-exp").unwrap();
    let (spec, _, sc) = p.at(n).unwrap();
    let k_max = fristedt_k_max(n as f64, 1e-7);
    let law = IncrementWalk::new(&spec, &sc, n).unwrap();
    let est = fristedt_alpha(&law, n as f64, k_max, 40_000, 9).unwrap();
    // S(k) is the unscaled process at time d_n k / n
    let nf = n as f64;
    let log_alpha: f64 = (1..=k_max)
        .map(|k| {
            let kf = k as f64;
            (-kf / nf).exp() / kf * positive_prob(1.0, 1.0, 1.0, sc.d_n * kf / nf)
        })
        .sum();
    assert!(
        (est.log_alpha - log_alpha).abs() < 4.0 * est.se_log,
        "{est:?} vs {log_alpha}"
    );
}

#[test]
fn limit_sampler_has_the_limit_mean() {
    let p = Preset::lookup("crit-exp-B2").unwrap();
    let l = limit_parameters(&p.family, &p.assumption).unwrap();
    let s = SubordinatorSpec::from_limit(&l).unwrap();
    let v = sample_values(&s, 2.0, 50_000, 5).unwrap();
    assert!(v.iter().all(|x| x.map(|(h, _)| (h - 2.0).abs() < 1e-12).unwrap()));
    let marks = v.iter().map(|x| x.unwrap().1 as f64).sum::<f64>() / v.len() as f64;
    assert!((marks - 4.0).abs() < 4.0 * (4.0f64 / 50_000.0).sqrt(), "{marks}");
}

#[test]
fn bundle_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        preset: "subcrit-exp-half".into(),
        n_grid: vec![4, 16],
        paths_per_n: Some(5000),
        ..Default::default()
    };
    let bundle = run_experiment(&config, Stage::Converge, None).unwrap();
    assert_ne!(bundle.verdict, Verdict::NoOp);
    emit_outputs(&bundle, &[Format::Csv, Format::Json], dir.path()).unwrap();
    let back: ReportBundle =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(back, bundle);
    let csv = std::fs::read_to_string(dir.path().join("reports.csv")).unwrap();
    assert_eq!(csv.lines().count(), bundle.reports.len() + 1);
}

#[test]
fn empty_bundle_is_a_no_op() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = ReportBundle::empty(ExperimentConfig::default(), Stage::Converge);
    emit_outputs(&bundle, &[Format::Json], dir.path()).unwrap();
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(v["verdict"], "no-op");
    assert_eq!(bundle.exit_code(), 0);
}

#[test]
fn resumed_run_reproduces_the_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        preset: "crit-exp-B1-theta2".into(),
        n_grid: vec![4, 8],
        paths_per_n: Some(3000),
        ..Default::default()
    };
    let first = run_experiment(&config, Stage::Converge, Some(dir.path())).unwrap();
    std::fs::remove_file(dir.path().join("partial/converge-n4.json")).unwrap();
    let second = run_experiment(&config, Stage::Converge, Some(dir.path())).unwrap();
    assert_eq!(first, second);
    // a changed seed must not reuse the stored grid point
    let other = ExperimentConfig {
        seed_base: 99,
        ..config
    };
    let third = run_experiment(&other, Stage::Converge, Some(dir.path())).unwrap();
    assert_ne!(third.reports, first.reports);
}
