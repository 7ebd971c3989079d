use std::path::{Path, PathBuf};

use agg_density::bench::{run_experiment, split_sensitivity, write_outputs, CellStatus};
use agg_density::config::{EstimatorSpec, ExperimentConfig, MinimaxSpec, SweepSpec};
use agg_density::mc::with_threads;
use agg_density::report::{emit_table, parse_table};
use agg_density::bench::minimax_experiment;
use agg_density_core::DensityModel;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn inline(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(text, Path::new("inline.json")).unwrap()
}

fn roster() -> ExperimentConfig {
    inline(
        r#"{"density":"claw","sample_sizes":[40,80],"replications":6,"seed":11,
            "estimators":["agg_pure","agg_linear","oracle","ucv","nrd0","nrd",{"kde":{"h":0.2}}]}"#,
    )
}

#[test]
fn smoke_config_runs_and_writes_outputs() {
    let (cfg, base) = ExperimentConfig::load(&configs().join("smoke.json")).unwrap();
    let report = run_experiment(&cfg, base.as_deref()).unwrap();
    assert!(report.all_ok());
    assert_eq!(report.cells.len(), 1);
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&report, dir.path()).unwrap();
    let table = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    let rows = parse_table(&table).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].estimator.as_str(), rows[0].n, rows[0].seed), ("AggPure", 50, 7));
    assert!(rows[0].mise > 0.0 && rows[0].stderr >= 0.0);
    for f in ["plot_data.csv", "report.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["effective_replications"], 2);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = roster();
    let one = with_threads(Some(1), || run_experiment(&cfg, None).unwrap());
    let four = with_threads(Some(4), || run_experiment(&cfg, None).unwrap());
    assert_eq!(emit_table(&one.table_rows()), emit_table(&four.table_rows()));
    for (a, b) in one.cells.iter().zip(&four.cells) {
        match (&a.status, &b.status) {
            (CellStatus::Ok { ises: x, .. }, CellStatus::Ok { ises: y, .. }) => assert_eq!(x, y),
            other => panic!("{other:?}"),
        }
    }
    assert_eq!(one.oracle_curves, four.oracle_curves);
}

#[test]
fn seed_controls_the_results() {
    let cfg = roster();
    let a = run_experiment(&cfg, None).unwrap();
    let b = run_experiment(&cfg, None).unwrap();
    assert_eq!(a.table_rows(), b.table_rows());
    let mut other = cfg.clone();
    other.seed = 12;
    let c = run_experiment(&other, None).unwrap();
    assert_ne!(a.table_rows()[0].mise, c.table_rows()[0].mise);
}

#[test]
fn estimators_share_samples_within_a_cell() {
    let cfg = roster();
    let report = run_experiment(&cfg, None).unwrap();
    for n in [40, 80] {
        let oracle = report.cell("Oracle", n).unwrap();
        let CellStatus::Ok { best_h: Some(h), mise, .. } = oracle.status else { panic!() };
        let curve = report.oracle_curves.iter().find(|c| c.n == n).unwrap();
        assert!(curve.points.iter().all(|p| p[1] >= mise));
        let mut single = cfg.clone();
        single.estimators = vec![EstimatorSpec::Kde { h }];
        let kde = run_experiment(&single, None).unwrap();
        assert_eq!(kde.cells.iter().find(|c| c.n == n).unwrap().mise().unwrap().0, mise);
    }
}

#[test]
fn failed_cells_are_reported_not_raised() {
    let cfg = inline(r#"{"density":"gaussian","sample_sizes":[30],"replications":3,"seed":1,"estimators":["nrd0",{"kde":{"h":-1.0}}]}"#);
    let report = run_experiment(&cfg, None).unwrap();
    assert!(!report.all_ok());
    assert!(report.cells[0].mise().is_some());
    assert!(matches!(report.cells[1].status, CellStatus::Failed { .. }));
}

#[test]
fn single_cell_sweep_matches_the_experiment() {
    let cfg = inline(
        r#"{"density":"dens1","sample_sizes":[60],"replications":5,"seed":3,"estimators":["agg_pure"],
            "split":{"scheme":{"fraction":0.6},"count":3}}"#,
    );
    let cell = run_experiment(&cfg, None).unwrap().cells[0].mise().unwrap();
    let sweep = split_sensitivity(&cfg, None, &SweepSpec { split_counts: vec![3], train_fractions: vec![0.6] }).unwrap();
    assert_eq!(sweep.len(), 1);
    assert_eq!((sweep[0].mise, sweep[0].stderr), cell);
}

#[test]
fn twenty_splits_are_about_as_good_as_forty() {
    let cfg = inline(
        r#"{"density":"dens1","sample_sizes":[200],"replications":40,"seed":2007,"estimators":[],
            "split_sensitivity":{"split_counts":[20,40],"train_fractions":[0.5]}}"#,
    );
    let cells = split_sensitivity(&cfg, None, cfg.split_sensitivity.as_ref().unwrap()).unwrap();
    let (a, b) = (&cells[0], &cells[1]);
    let gap = (a.mise - b.mise).abs();
    // soft assertion: reported, and only a gross violation fails
    eprintln!("20 splits {:.6e} ± {:.1e}, 40 splits {:.6e} ± {:.1e}", a.mise, a.stderr, b.mise, b.stderr);
    if gap > b.stderr {
        eprintln!("note: 20/40-split gap {gap:.3e} exceeds one stderr");
    }
    assert!(gap <= 3.0 * b.stderr.max(a.stderr), "{gap}");
}

#[test]
fn minimax_rejects_radius_below_the_truth() {
    let truth = DensityModel::standard_gaussian();
    let spec = MinimaxSpec { beta: 2.0, q: Some(1e-6), aggregate: None };
    assert!(minimax_experiment(&truth, &spec, &[100], 3, 1).is_err());
    let spec = MinimaxSpec { beta: 2.0, q: None, aggregate: None };
    let m = minimax_experiment(&truth, &spec, &[200], 4, 1).unwrap();
    let row = &m.rows[0];
    assert!(row.h_star > 0.0 && row.bound > 0.0);
    assert!((row.ratio - row.mise / row.bound).abs() < 1e-15);
    assert!(row.exact_ratio > 0.3 && row.exact_ratio < 1.2);
}
