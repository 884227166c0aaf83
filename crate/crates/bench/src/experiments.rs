//! Experiment drivers: predicted factors, subspace runs, the ball–line
//! sweep, compressed sensing, grid searches and 2-D trajectories.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use relaxproj::linalg;
use relaxproj::operators::{run_fixed_point, trace_iterates, GcarpaStepper, RunOptions, RunRecord, SolverParams, Termination};
use relaxproj::problems::{
    make_ball_line_instance, make_cs_instance, BallLineInstance, make_subspace_instance, random_unit_vector, seeded_rng, CsInstance, CsSetting,
};
use relaxproj::spectral::{self, critical_gamma, minimax_gamma, PrincipalAngleSpec};

use crate::config::{BenchConfig, GridConfig, MethodParams, PredictConfig};
use crate::methods::{make_stepper, Method};
use crate::rates::{fit_empirical_rate, RateFit, RateFitError};

/// Stationary parameters with the factor the spectral model predicts for
/// them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TunedParams {
    pub params: SolverParams,
    pub xi: f64,
}

fn stationary(gamma: f64, theta: f64, eta: f64) -> Result<SolverParams> {
    Ok(SolverParams::new(1.0, gamma, theta, eta)?)
}

/// The four subspace methods: DR, CARPA-opt, fixed-weight gCARPA-opt and
/// gCARPA grid-best, in table order.
pub fn subspace_methods(spec: &PrincipalAngleSpec, weights: [f64; 2], grid: &GridConfig) -> Result<Vec<(&'static str, TunedParams)>> {
    let (tf, tp) = (spec.t_friedrichs(), spec.t_largest());
    let dr = SolverParams::douglas_rachford();
    let carpa = minimax_gamma(tf, tp, 1.0, 1.0, 1.0)?;
    let fixed = minimax_gamma(tf, tp, weights[0], weights[1], 1.0)?;
    let best = spectral::grid_best(spec, &grid.to_grid())?;
    Ok(vec![
        ("dr", TunedParams { params: dr, xi: spectral::subdominant_modulus(spec, &dr)? }),
        ("carpa-opt", TunedParams { params: SolverParams::carpa(carpa.gamma)?, xi: carpa.xi }),
        ("gcarpa-opt", TunedParams { params: stationary(fixed.gamma, weights[0], weights[1])?, xi: fixed.xi }),
        ("gcarpa-grid", TunedParams { params: stationary(best.gamma, best.theta, best.eta)?, xi: best.xi }),
    ])
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictEntry {
    pub method: String,
    pub angle_deg: f64,
    pub xi: f64,
    /// `(γ, θ, η)` behind the factor; `None` for the closed-form rows.
    pub params: Option<[f64; 3]>,
}

/// Predicted factors: MAP `cos²φ_F`, DR `cos φ_F`, then the tuned rows.
pub fn predict_rates(cfg: &PredictConfig) -> Result<Vec<PredictEntry>> {
    let mut out = Vec::new();
    for &deg in &cfg.angles_deg {
        let spec = PrincipalAngleSpec::schedule(cfg.n, cfg.p, deg.to_radians())?;
        out.push(PredictEntry { method: "map".into(), angle_deg: deg, xi: spectral::map_rate(&spec), params: None });
        for (name, tp) in subspace_methods(&spec, cfg.fixed_weights, &cfg.grid)? {
            let p = &tp.params;
            let (label, xi, params) = match name {
                "dr" => ("dr", spectral::dr_rate(&spec), None),
                "carpa-opt" | "gcarpa-opt" => (name, tp.xi, Some([p.gamma(), p.theta(), p.eta()])),
                _ => ("grid-best", tp.xi, Some([p.gamma(), p.theta(), p.eta()])),
            };
            out.push(PredictEntry { method: label.into(), angle_deg: deg, xi, params });
        }
    }
    Ok(out)
}

pub fn run_options(cfg: &BenchConfig, kmax: usize, track_support: bool) -> RunOptions {
    RunOptions { tol: cfg.tolerance, kmax: cfg.cap(kmax), track_support, gate_feasibility: cfg.gate_feasibility }
}

fn converged_count(rec: &RunRecord) -> Option<usize> {
    (rec.termination == Termination::Converged).then_some(rec.iterations)
}

#[derive(Clone, Debug)]
pub struct SubspaceCell {
    pub angle_deg: f64,
    pub method: &'static str,
    pub tuned: TunedParams,
    pub records: Vec<RunRecord>,
    pub fits: Vec<Result<RateFit, RateFitError>>,
}

impl SubspaceCell {
    pub fn iterations(&self) -> Vec<Option<usize>> {
        self.records.iter().map(converged_count).collect()
    }

    /// Mean count over the starts, `None` if any start failed.
    pub fn mean_iterations(&self) -> Option<f64> {
        let its: Option<Vec<usize>> = self.iterations().into_iter().collect();
        its.map(|v| v.iter().sum::<usize>() as f64 / v.len() as f64)
    }
}

/// Runs every subspace method from `starts` unit-normal starting points
/// (the same points for every method at a given angle).
pub fn run_subspace(cfg: &BenchConfig) -> Result<Vec<SubspaceCell>> {
    let sc = &cfg.subspace;
    let opts = run_options(cfg, sc.kmax, false);
    let mut cells = Vec::new();
    for &deg in &sc.angles_deg {
        let inst = make_subspace_instance(sc.n, sc.p, deg.to_radians())?;
        let mut rng = seeded_rng(cfg.seed);
        let starts: Vec<Vec<f64>> = (0..sc.starts).map(|_| random_unit_vector(&mut rng, sc.n)).collect();
        for (method, tuned) in subspace_methods(&inst.spec, sc.fixed_weights, &sc.grid)? {
            let records = starts
                .par_iter()
                .map(|z0| run_fixed_point(&mut GcarpaStepper { x: &inst.x, y: &inst.y, params: tuned.params }, z0, &opts))
                .collect::<relaxproj::Result<Vec<_>>>()?;
            let fits = records.iter().map(|r| fit_empirical_rate(&r.fpr)).collect();
            cells.push(SubspaceCell { angle_deg: deg, method, tuned, records, fits });
        }
    }
    Ok(cells)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallLineCell {
    pub method: Method,
    pub tol: f64,
    pub converged: usize,
    pub failures: usize,
    /// Average over the starts, or `None` ("--") when any start hit the cap.
    pub mean: Option<f64>,
    /// Average with capped starts counted as `kmax`.
    pub capped_mean: f64,
}

#[derive(Clone, Debug)]
pub struct BallLineReport {
    pub starts: usize,
    pub kmax: usize,
    pub cells: Vec<BallLineCell>,
    /// Worst increment-bound excess over every run of each scheduled method.
    pub increment_excess: Vec<(Method, f64)>,
}

impl BallLineReport {
    pub fn cell(&self, method: Method, tol: f64) -> Option<&BallLineCell> {
        self.cells.iter().find(|c| c.method == method && c.tol == tol)
    }
}

/// `X` is the line and `Y` the ball.
fn ball_line_run(
    inst: &BallLineInstance,
    method: Method,
    params: &MethodParams,
    z0: &[f64],
    opts: &RunOptions,
) -> Result<(RunRecord, Option<f64>)> {
    let mut driver = make_stepper(method, params, &inst.line, &inst.ball)?;
    let rec = run_fixed_point(&mut driver, z0, opts)?;
    Ok((rec, driver.increment_excess()))
}

/// Each start is run once at the finest tolerance; coarser counts are read
/// off the same residual history.
pub fn run_ball_line(cfg: &BenchConfig) -> Result<BallLineReport> {
    let bl = &cfg.ball_line;
    if bl.tolerances.is_empty() {
        bail!("ball-line sweep needs at least one tolerance");
    }
    let kmax = cfg.cap(bl.kmax);
    let finest = bl.tolerances.iter().copied().fold(f64::INFINITY, f64::min);
    let opts = RunOptions { tol: finest, kmax, track_support: false, gate_feasibility: cfg.gate_feasibility };
    let inst = make_ball_line_instance();
    let mut rng = seeded_rng(cfg.seed);
    let starts: Vec<Vec<f64>> = (0..bl.starts).map(|_| inst.random_start(&mut rng)).collect();

    let mut cells = Vec::new();
    let mut increment_excess = Vec::new();
    for &method in &bl.methods {
        let per_start = starts
            .par_iter()
            .map(|z0| {
                let (rec, excess) = ball_line_run(&inst, method, &bl.params, z0, &opts)?;
                let counts: Vec<Option<usize>> = bl
                    .tolerances
                    .iter()
                    .map(|&t| if opts.gate_feasibility { gated_first_below(&rec, t) } else { rec.first_below(t) })
                    .collect();
                Ok((counts, excess))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(worst) = per_start.iter().filter_map(|p| p.1).reduce(f64::max) {
            increment_excess.push((method, worst));
        }
        for (j, &tol) in bl.tolerances.iter().enumerate() {
            let counts: Vec<Option<usize>> = per_start.iter().map(|p| p.0[j]).collect();
            let converged = counts.iter().flatten().count();
            let failures = counts.len() - converged;
            let capped: f64 = counts.iter().map(|c| c.unwrap_or(kmax) as f64).sum();
            let n = counts.len().max(1) as f64;
            let mean = (failures == 0).then(|| capped / n);
            cells.push(BallLineCell { method, tol, converged, failures, mean, capped_mean: capped / n });
        }
    }
    Ok(BallLineReport { starts: bl.starts, kmax, cells, increment_excess })
}

fn gated_first_below(rec: &RunRecord, tol: f64) -> Option<usize> {
    rec.fpr.iter().zip(&rec.feas).position(|(&r, &f)| r <= tol && f <= tol).map(|i| i + 1)
}

#[derive(Clone, Debug)]
pub struct CsRun {
    pub setting: CsSetting,
    pub method: Method,
    pub params: MethodParams,
    pub record: RunRecord,
    /// `‖A y − b‖` at the final `Y`-projection.
    pub equation_residual: f64,
    /// `‖y‖₁ − c` at the final `Y`-projection.
    pub l1_excess: f64,
    pub increment_excess: Option<f64>,
}

impl CsRun {
    pub fn iterations(&self) -> Option<usize> {
        converged_count(&self.record)
    }
}

/// Stationary `(γ, θ, η)` a method runs with, if it has one.
pub fn method_triple(method: Method, params: &MethodParams) -> Option<[f64; 3]> {
    match method {
        Method::Dr => Some([0.0, 1.0, 1.0]),
        Method::Carpa => Some([params.carpa_gamma, 1.0, 1.0]),
        Method::Gcarpa => Some(params.gcarpa),
        _ => None,
    }
}

pub fn cs_start(cfg: &BenchConfig, n: usize) -> Vec<f64> {
    random_unit_vector(&mut seeded_rng(cfg.cs.start_seed), n)
}

fn cs_solution_residuals(inst: &CsInstance, y: &[f64]) -> Result<(f64, f64)> {
    let ay = inst.operator().apply(y)?;
    let r: Vec<f64> = ay.iter().zip(&inst.b).map(|(a, b)| a - b).collect();
    Ok((linalg::norm(&r), linalg::norm_l1(y) - inst.radius))
}

pub fn run_cs_method(cfg: &BenchConfig, inst: &CsInstance, method: Method, params: &MethodParams) -> Result<CsRun> {
    let opts = run_options(cfg, cfg.cs.kmax, true);
    let z0 = cs_start(cfg, inst.n);
    let mut driver = make_stepper(method, params, &inst.x, &inst.y)?;
    let record = run_fixed_point(&mut driver, &z0, &opts)
        .with_context(|| format!("{} on {}", method, inst.setting.name()))?;
    let (equation_residual, l1_excess) = cs_solution_residuals(inst, &record.final_y)?;
    Ok(CsRun {
        setting: inst.setting,
        method,
        params: params.clone(),
        record,
        equation_residual,
        l1_excess,
        increment_excess: driver.increment_excess(),
    })
}

pub fn run_cs_setting(cfg: &BenchConfig, setting: CsSetting) -> Result<Vec<CsRun>> {
    let inst = make_cs_instance(setting, cfg.cs.instance_seed)?;
    let params = cfg.cs.params_for(setting);
    cfg.cs.methods.iter().map(|&m| run_cs_method(cfg, &inst, m, &params)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsGridEntry {
    pub gamma: f64,
    pub theta: f64,
    pub eta: f64,
    pub iterations: Option<usize>,
}

/// Stationary gCARPA over the grid on the validation instance; entries come
/// back sorted by `(γ, θ, η)` and the winner is the smallest converged
/// count (ties keep the earlier triple).
///
/// The search is pruned: each triple runs only until it would tie the best
/// count so far, so an entry's count is `None` both when it hit `kmax` and
/// when it could not beat an earlier triple.
pub fn tune_cs_gcarpa(cfg: &BenchConfig, setting: CsSetting) -> Result<(Vec<CsGridEntry>, Option<CsGridEntry>)> {
    let inst = make_cs_instance(setting, cfg.cs.validation_seed)?;
    let mut opts = run_options(cfg, cfg.cs.kmax, false);
    let z0 = cs_start(cfg, inst.n);
    let mut triples = Vec::new();
    for &g in &cfg.cs.grid.gammas {
        for &th in &cfg.cs.grid.thetas {
            for &et in &cfg.cs.grid.etas {
                triples.push((g, th, et));
            }
        }
    }
    triples.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    let mut entries = Vec::with_capacity(triples.len());
    let mut best: Option<CsGridEntry> = None;
    for (gamma, theta, eta) in triples {
        let iterations = if opts.kmax == 0 {
            None
        } else {
            let mut s = GcarpaStepper { x: &inst.x, y: &inst.y, params: stationary(gamma, theta, eta)? };
            converged_count(&run_fixed_point(&mut s, &z0, &opts)?)
        };
        let e = CsGridEntry { gamma, theta, eta, iterations };
        if let Some(n) = iterations {
            opts.kmax = n - 1;
            best = Some(e.clone());
        }
        entries.push(e);
    }
    Ok((entries, best))
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub method: &'static str,
    pub params: SolverParams,
    pub path: Vec<Vec<f64>>,
}

/// Iterates of DR, CARPA and gCARPA on two lines in the plane at the
/// configured angle, started from `(1, 1)/√2`. CARPA and gCARPA share `γ`.
pub fn run_trajectory(cfg: &BenchConfig) -> Result<Vec<Trajectory>> {
    let tc = &cfg.trajectory;
    let inst = make_subspace_instance(2, 1, tc.angle_deg.to_radians())?;
    if inst.n != 2 {
        bail!("trajectories are only drawn in the plane");
    }
    let [theta, eta] = tc.weights;
    let gamma = match tc.gamma {
        Some(g) => g,
        None => {
            let t = inst.spec.t_friedrichs();
            let set = critical_gamma(t, theta, eta)?;
            match set.admissible.first() {
                Some(c) => c.gamma,
                None => bail!("no admissible critical weight at {} degrees for weights ({theta}, {eta})", tc.angle_deg),
            }
        }
    };
    let z0 = vec![std::f64::consts::FRAC_1_SQRT_2; 2];
    let mut out = Vec::new();
    for (method, params) in [
        ("dr", SolverParams::douglas_rachford()),
        ("carpa", SolverParams::carpa(gamma)?),
        ("gcarpa", stationary(gamma, theta, eta)?),
    ] {
        let path = trace_iterates(&mut GcarpaStepper { x: &inst.x, y: &inst.y, params }, &z0, tc.steps)?;
        out.push(Trajectory { method, params, path });
    }
    Ok(out)
}
