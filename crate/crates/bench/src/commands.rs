//! One function per CLI subcommand: run the experiment, write CSV files and
//! the manifest under `<out>/<experiment>/`.

use std::path::PathBuf;

use anyhow::Result;
use relaxproj::problems::CsSetting;
use relaxproj::spectral::{self, PrincipalAngleSpec};

use crate::config::BenchConfig;
use crate::experiments;
use crate::output::{fmt_count, fmt_params, fmt_real, history_table, OutputDir, Table};

pub fn predict_rates(cfg: &BenchConfig) -> Result<PathBuf> {
    let mut out = OutputDir::create(&cfg.out.join("predict-rates"))?;
    let mut t = Table::new(["method", "angle_deg", "xi", "gamma", "theta", "eta"]);
    for e in experiments::predict_rates(&cfg.predict)? {
        let mut row = vec![e.method.clone(), fmt_real(e.angle_deg), fmt_real(e.xi)];
        row.extend(fmt_params(e.params));
        t.push(row);
    }
    out.write_table("summary.csv", &t)?;
    out.finish("predict-rates", &cfg.hash())
}

pub fn run_subspace(cfg: &BenchConfig) -> Result<PathBuf> {
    let mut out = OutputDir::create(&cfg.out.join("run-subspace"))?;
    let mut t = Table::new([
        "angle_deg", "method", "gamma", "theta", "eta", "xi_predicted", "start", "iterations", "r_hat", "window_start", "window_end",
    ]);
    let mut means = Table::new(["angle_deg", "method", "mean_iterations"]);
    for cell in experiments::run_subspace(cfg)? {
        let p = &cell.tuned.params;
        for (i, (rec, fit)) in cell.records.iter().zip(&cell.fits).enumerate() {
            let (r, ws, we) = match fit {
                Ok(f) => (fmt_real(f.r_hat), f.window_start.to_string(), f.window_end.to_string()),
                Err(_) => ("n/a".into(), String::new(), String::new()),
            };
            t.push(vec![
                fmt_real(cell.angle_deg),
                cell.method.to_string(),
                fmt_real(p.gamma()),
                fmt_real(p.theta()),
                fmt_real(p.eta()),
                fmt_real(cell.tuned.xi),
                i.to_string(),
                fmt_count(cell.iterations()[i]),
                r,
                ws,
                we,
            ]);
            out.write_table(&format!("histories/{}deg/{}/start{i}.csv", cell.angle_deg, cell.method), &history_table(rec))?;
        }
        means.push(vec![
            fmt_real(cell.angle_deg),
            cell.method.to_string(),
            cell.mean_iterations().map_or_else(|| "fail".into(), fmt_real),
        ]);
    }
    out.write_table("summary.csv", &t)?;
    out.write_table("iterations.csv", &means)?;
    out.finish("run-subspace", &cfg.hash())
}

pub fn run_ball_line(cfg: &BenchConfig) -> Result<PathBuf> {
    let mut out = OutputDir::create(&cfg.out.join("run-ball-line"))?;
    let report = experiments::run_ball_line(cfg)?;
    let mut t = Table::new(["method", "tol", "average", "capped_average", "failures", "starts"]);
    for c in &report.cells {
        t.push(vec![
            c.method.to_string(),
            fmt_real(c.tol),
            c.mean.map_or_else(|| "--".into(), fmt_real),
            fmt_real(c.capped_mean),
            c.failures.to_string(),
            report.starts.to_string(),
        ]);
    }
    out.write_table("summary.csv", &t)?;
    out.finish("run-ball-line", &cfg.hash())
}

pub fn run_cs(cfg: &BenchConfig, settings: &[CsSetting]) -> Result<PathBuf> {
    let mut out = OutputDir::create(&cfg.out.join("run-cs"))?;
    let mut t = Table::new([
        "setting", "method", "gamma", "theta", "eta", "iterations", "final_support", "equation_residual", "l1_excess",
    ]);
    for &s in settings {
        for run in experiments::run_cs_setting(cfg, s)? {
            let support = run.record.support.as_ref().and_then(|v| v.last().copied());
            let mut row = vec![s.name().to_string(), run.method.to_string()];
            row.extend(fmt_params(experiments::method_triple(run.method, &run.params)));
            row.extend([
                fmt_count(run.iterations()),
                support.map_or_else(String::new, |v| v.to_string()),
                fmt_real(run.equation_residual),
                fmt_real(run.l1_excess),
            ]);
            t.push(row);
            out.write_table(&format!("histories/{}/{}.csv", s.name(), run.method), &history_table(&run.record))?;
        }
    }
    out.write_table("summary.csv", &t)?;
    out.finish("run-cs", &cfg.hash())
}

/// Which grid search to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridFamily {
    /// Spectral grid-best over every configured angle.
    Subspace,
    /// Iteration-count search for stationary gCARPA on the validation instance.
    Cs,
}

pub fn grid_search(cfg: &BenchConfig, family: GridFamily, settings: &[CsSetting]) -> Result<PathBuf> {
    let mut out = OutputDir::create(&cfg.out.join("grid-search"))?;
    match family {
        GridFamily::Subspace => {
            let mut t = Table::new(["angle_deg", "gamma", "theta", "eta", "xi"]);
            let mut angles: Vec<f64> = cfg.predict.angles_deg.iter().chain(&cfg.subspace.angles_deg).copied().collect();
            angles.sort_by(f64::total_cmp);
            angles.dedup();
            for deg in angles {
                let spec = PrincipalAngleSpec::schedule(cfg.predict.n, cfg.predict.p, deg.to_radians())?;
                let b = spectral::grid_best(&spec, &cfg.predict.grid.to_grid())?;
                t.push(vec![fmt_real(deg), fmt_real(b.gamma), fmt_real(b.theta), fmt_real(b.eta), fmt_real(b.xi)]);
            }
            out.write_table("summary.csv", &t)?;
        }
        GridFamily::Cs => {
            let mut best = Table::new(["setting", "gamma", "theta", "eta", "iterations"]);
            for &s in settings {
                let (entries, winner) = experiments::tune_cs_gcarpa(cfg, s)?;
                let mut t = Table::new(["gamma", "theta", "eta", "iterations"]);
                for e in &entries {
                    t.push(vec![fmt_real(e.gamma), fmt_real(e.theta), fmt_real(e.eta), fmt_count(e.iterations)]);
                }
                out.write_table(&format!("cs/{}.csv", s.name()), &t)?;
                if let Some(w) = winner {
                    best.push(vec![s.name().into(), fmt_real(w.gamma), fmt_real(w.theta), fmt_real(w.eta), fmt_count(w.iterations)]);
                } else {
                    best.push(vec![s.name().into(), String::new(), String::new(), String::new(), "fail".into()]);
                }
            }
            out.write_table("summary.csv", &best)?;
        }
    }
    out.finish("grid-search", &cfg.hash())
}

pub fn trajectory(cfg: &BenchConfig) -> Result<PathBuf> {
    let mut out = OutputDir::create(&cfg.out.join("trajectory"))?;
    let mut summary = Table::new(["method", "gamma", "theta", "eta", "steps"]);
    for tr in experiments::run_trajectory(cfg)? {
        let mut t = Table::new(["k", "z1", "z2"]);
        for (k, z) in tr.path.iter().enumerate() {
            t.push(vec![k.to_string(), fmt_real(z[0]), fmt_real(z[1])]);
        }
        out.write_table(&format!("{}.csv", tr.method), &t)?;
        let p = &tr.params;
        summary.push(vec![
            tr.method.to_string(),
            fmt_real(p.gamma()),
            fmt_real(p.theta()),
            fmt_real(p.eta()),
            (tr.path.len() - 1).to_string(),
        ]);
    }
    out.write_table("summary.csv", &summary)?;
    out.finish("trajectory", &cfg.hash())
}
