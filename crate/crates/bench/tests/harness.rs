use std::fs;
use std::path::Path;

use relaxproj::operators::{run_fixed_point, GcarpaStepper, RunOptions};
use relaxproj::problems::{make_subspace_instance, CsSetting};
use relaxproj::SolverParams;
use relaxproj_bench::commands;
use relaxproj_bench::config::BenchConfig;
use relaxproj_bench::experiments;
use relaxproj_bench::output::Table;
use relaxproj_bench::rates::{fit_empirical_rate, RateFitError};
use relaxproj_bench::Method;

/// A subspace and ball-line configuration small enough for a unit test.
fn small_config(out: &Path) -> BenchConfig {
    let mut cfg = BenchConfig { out: out.to_path_buf(), ..BenchConfig::default() };
    cfg.subspace.n = 20;
    cfg.subspace.p = 10;
    cfg.subspace.angles_deg = vec![30.0];
    cfg.subspace.starts = 2;
    cfg.ball_line.starts = 20;
    cfg.ball_line.kmax = 500;
    cfg.ball_line.methods = vec![Method::Dr, Method::Carpa, Method::NsGcarpa];
    cfg.ball_line.tolerances = vec![1e-4, 1e-6];
    cfg
}

fn read_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(root).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn same_config_writes_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [a.path(), b.path()] {
        let cfg = small_config(dir);
        commands::predict_rates(&cfg).unwrap();
        commands::run_subspace(&cfg).unwrap();
        commands::run_ball_line(&cfg).unwrap();
        commands::trajectory(&cfg).unwrap();
    }
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    assert!(ta.len() > 10);
    assert_eq!(ta, tb);
}

#[test]
fn emitted_csv_parses_back_to_the_same_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    commands::run_subspace(&cfg).unwrap();
    let text = fs::read_to_string(dir.path().join("run-subspace/summary.csv")).unwrap();
    let table = Table::from_csv(&text).unwrap();
    assert_eq!(table.to_csv().unwrap(), text);
    let r = table.column("r_hat").unwrap();
    for row in &table.rows {
        if row[r] != "n/a" {
            let v: f64 = row[r].parse().unwrap();
            assert_eq!(relaxproj_bench::output::fmt_real(v), row[r]);
        }
    }
    let manifest = fs::read_to_string(dir.path().join("run-subspace/manifest.json")).unwrap();
    assert!(manifest.contains(&cfg.hash()));
}

#[test]
fn counts_agree_with_residual_histories() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    for cell in experiments::run_subspace(&cfg).unwrap() {
        for (rec, count) in cell.records.iter().zip(cell.iterations()) {
            assert_eq!(count, rec.first_below(cfg.tolerance), "{} at {}", cell.method, cell.angle_deg);
        }
    }
    let report = experiments::run_ball_line(&cfg).unwrap();
    for c in &report.cells {
        assert_eq!(c.converged + c.failures, cfg.ball_line.starts);
        assert_eq!(c.mean.is_some(), c.failures == 0);
        assert!(c.capped_mean <= report.kmax as f64);
    }
    // a coarser tolerance never needs more steps
    for m in &cfg.ball_line.methods {
        assert!(report.cell(*m, 1e-4).unwrap().capped_mean <= report.cell(*m, 1e-6).unwrap().capped_mean);
    }
}

#[test]
fn rate_fit_recovers_a_geometric_rate() {
    let fpr: Vec<f64> = (0..300).map(|k| 0.9f64.powi(k)).collect();
    let fit = fit_empirical_rate(&fpr).unwrap();
    assert!((fit.r_hat - 0.9).abs() < 1e-12);
    assert!(matches!(fit_empirical_rate(&fpr[..30]), Err(RateFitError::InsufficientData { found: 30 })));
}

#[test]
fn zero_start_converges_at_once() {
    let inst = make_subspace_instance(10, 5, 0.4).unwrap();
    let mut s = GcarpaStepper { x: &inst.x, y: &inst.y, params: SolverParams::new(1.0, 0.3, 0.7, 0.7).unwrap() };
    let rec = run_fixed_point(&mut s, &[0.0; 10], &RunOptions::new(1e-12, 100)).unwrap();
    assert_eq!(rec.iterations, 1);
    assert_eq!(rec.fpr, vec![0.0]);
}

#[test]
fn trajectories_show_rotation_only_for_dr() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let trs = experiments::run_trajectory(&cfg).unwrap();
    let dr = trs.iter().find(|t| t.method == "dr").unwrap();
    let flips = |c: usize| dr.path[..=10].windows(2).any(|w| w[0][c] * w[1][c] < 0.0);
    assert!(flips(0) || flips(1), "DR should change sign within 10 steps");

    let g = trs.iter().find(|t| t.method == "gcarpa").unwrap();
    for c in 0..2 {
        let tail = &g.path[3..];
        let sign = tail[0][c].signum();
        assert!(tail.iter().all(|z| z[c] == 0.0 || z[c].signum() == sign), "coordinate {c} changes sign");
        assert!(tail.windows(2).all(|w| w[1][c].abs() <= w[0][c].abs()), "coordinate {c} grows");
    }
}

#[test]
fn cs_toy_support_settles_at_sparsity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BenchConfig { out: dir.path().to_path_buf(), ..BenchConfig::default() };
    let inst = relaxproj::problems::make_cs_instance(CsSetting::Toy, cfg.cs.instance_seed).unwrap();
    let run = experiments::run_cs_method(&cfg, &inst, Method::Gcarpa, &cfg.cs.params_for(CsSetting::Toy)).unwrap();
    assert!(run.iterations().is_some());
    assert_eq!(run.record.support.as_ref().unwrap().last(), Some(&inst.kappa));
    assert!(run.equation_residual <= 1e-8 && run.l1_excess <= 1e-8);
}

#[test]
fn config_round_trips_through_toml() {
    let cfg = BenchConfig::default();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    fs::write(&path, cfg.to_toml()).unwrap();
    let back = BenchConfig::load(&path).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.hash(), cfg.hash());
    fs::write(&path, "tolerance = 1e-8\nbogus = 1\n").unwrap();
    assert!(BenchConfig::load(&path).is_err());
}
