use std::path::{Path, PathBuf};

use agg_density::config::{EstimatorSpec, ExperimentConfig, GridSpec, SchemeSpec, FAST_REPLICATIONS};
use agg_density::BenchError;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn parse(text: &str) -> Result<ExperimentConfig, BenchError> {
    ExperimentConfig::from_json(text, Path::new("inline.json"))
}

#[test]
fn checked_in_configs_load_and_validate() {
    let mut count = 0;
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let (cfg, base) = ExperimentConfig::load(&path).unwrap();
        cfg.validate(base.as_deref()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 10);
}

#[test]
fn defaults_are_filled_in() {
    let cfg = parse(r#"{"density":"gaussian","sample_sizes":[100],"seed":1}"#).unwrap();
    assert_eq!(cfg.replications, 200);
    assert_eq!(cfg.estimators, vec![EstimatorSpec::AggPure, EstimatorSpec::Oracle]);
    assert_eq!(cfg.grid, GridSpec::Paper7);
    assert_eq!(cfg.split.scheme, SchemeSpec::Equal);
    assert_eq!(cfg.split.count, 10);
    assert_eq!(cfg.kernel, "gaussian");
    let (truth, _) = cfg.validate(None).unwrap();
    let echo = cfg.resolved(&truth);
    assert_eq!(echo["effective_replications"], 200);
    assert!(echo.get("grids").is_some());
}

#[test]
fn fast_caps_replications() {
    let mut cfg = parse(r#"{"density":"gaussian","sample_sizes":[100],"seed":1,"replications":500}"#).unwrap();
    assert_eq!(cfg.effective_replications(), 500);
    cfg.fast = true;
    assert_eq!(cfg.effective_replications(), FAST_REPLICATIONS);
}

#[test]
fn estimator_labels() {
    let cfg = parse(r#"{"density":"gaussian","sample_sizes":[100],"seed":1,
        "estimators":["agg_pure","agg_linear","oracle","ucv","nrd0","nrd",{"kde":{"h":0.25}}]}"#)
    .unwrap();
    let labels: Vec<String> = cfg.estimators.iter().map(EstimatorSpec::label).collect();
    assert_eq!(labels[..6], ["AggPure", "AggLinear", "Oracle", "UCV", "Nrd0", "Nrd"]);
    assert!(labels[6].starts_with("KDE(h=0.25"));
}

#[test]
fn invalid_configs_fail_before_compute() {
    assert!(parse(r#"{"density":"gaussian","sample_sizes":[100],"seed":1,"typo":3}"#).is_err());
    assert!(parse(r#"{"density":"gaussian","sample_sizes":[100]}"#).is_err());
    let bad = [
        r#"{"density":"nowhere","sample_sizes":[100],"seed":1}"#,
        r#"{"density":"gaussian","sample_sizes":[2],"seed":1}"#,
        r#"{"density":"gaussian","sample_sizes":[],"seed":1}"#,
        r#"{"density":"gaussian","sample_sizes":[100],"seed":1,"replications":1}"#,
        r#"{"density":"gaussian","sample_sizes":[100],"seed":1,"kernel":"epanechnikov"}"#,
        r#"{"density":"gaussian","sample_sizes":[100],"seed":1,"estimators":[]}"#,
        r#"{"density":"gaussian","sample_sizes":[100],"seed":1,"split":{"scheme":"equal","count":0}}"#,
        r#"{"density":"gaussian","sample_sizes":[100],"seed":1,"split_sensitivity":{"split_counts":[1],"train_fractions":[1.5]}}"#,
        r#"{"density":"missing.json","sample_sizes":[100],"seed":1}"#,
    ];
    for text in bad {
        let r = parse(text).and_then(|c| c.validate(None).map(|_| ()));
        assert!(r.is_err(), "{text}");
    }
}
