//! Composed fixed-point operators and the iteration driver.
//!
//! With `R_S^θ = (1−θ)Id + θ(2P_S − Id)` the generalized scheme iterates
//!
//! ```text
//! A = ½(Id + R_Y^η R_X^θ)        B = P_Y R_X^θ
//! F = (1−μ)Id + μ((1−γ)A + γB)
//! ```
//!
//! `γ = 0, θ = η = 1, μ = 1` is Douglas–Rachford; `θ = ½` turns `B` into the
//! alternating-projection composite.

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::sets::{reflect_from_projection, ConvexSet};

/// Iterates whose norm exceeds this are treated as divergent.
pub const DIVERGENCE_NORM: f64 = 1e12;

/// Relative threshold for counting an entry of `y` as nonzero.
pub const SUPPORT_EPS: f64 = 1e-10;

/// Stationary parameters `(μ, γ, θ, η)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverParams {
    mu: f64,
    gamma: f64,
    theta: f64,
    eta: f64,
}

impl SolverParams {
    /// Requires `γ ∈ [0,1)`, `θ, η ∈ (0,1]` and `μ ∈ (0, 2/(1+γ))`.
    pub fn new(mu: f64, gamma: f64, theta: f64, eta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!("gamma {gamma} outside [0, 1)")));
        }
        for (name, v) in [("theta", theta), ("eta", eta)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidParameter(format!("{name} {v} outside (0, 1]")));
            }
        }
        let mu_max = 2.0 / (1.0 + gamma);
        if !(mu > 0.0 && mu < mu_max) {
            return Err(Error::InvalidParameter(format!("mu {mu} outside (0, {mu_max})")));
        }
        Ok(Self { mu, gamma, theta, eta })
    }

    /// `μ = 1`, `θ = η = 1`: the composed scheme with a single mixing weight.
    pub fn carpa(gamma: f64) -> Result<Self> {
        Self::new(1.0, gamma, 1.0, 1.0)
    }

    /// `μ = 1`, `γ = 0`, `θ = η = 1`.
    pub fn douglas_rachford() -> Self {
        Self { mu: 1.0, gamma: 0.0, theta: 1.0, eta: 1.0 }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Averagedness constant `(1+γ)μ/2`.
    pub fn averagedness(&self) -> f64 {
        (1.0 + self.gamma) * self.mu / 2.0
    }
}

fn relaxed(theta: f64, set: &ConvexSet, w: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = set.project(w)?;
    let r = reflect_from_projection(theta, w, &p);
    Ok((p, r))
}

fn check_weight(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} {v} outside (0, 1]")))
    }
}

/// `½(z + R_Y^η R_X^θ z)`
pub fn apply_a(x: &ConvexSet, y: &ConvexSet, theta: f64, eta: f64, z: &[f64]) -> Result<Vec<f64>> {
    check_weight("theta", theta)?;
    check_weight("eta", eta)?;
    let (_, u) = relaxed(theta, x, z)?;
    let (_, v) = relaxed(eta, y, &u)?;
    Ok(z.iter().zip(&v).map(|(a, b)| 0.5 * (a + b)).collect())
}

/// `P_Y R_X^θ z`
pub fn apply_b(x: &ConvexSet, y: &ConvexSet, theta: f64, z: &[f64]) -> Result<Vec<f64>> {
    check_weight("theta", theta)?;
    let (_, u) = relaxed(theta, x, z)?;
    y.project(&u)
}

/// `(1−μ)z + μ((1−γ)A z + γ B z)`
pub fn apply_f(x: &ConvexSet, y: &ConvexSet, p: &SolverParams, z: &[f64]) -> Result<Vec<f64>> {
    let a = apply_a(x, y, p.theta, p.eta, z)?;
    let b = apply_b(x, y, p.theta, z)?;
    Ok(z.iter()
        .zip(a.iter().zip(&b))
        .map(|(zi, (ai, bi))| (1.0 - p.mu) * zi + p.mu * ((1.0 - p.gamma) * ai + p.gamma * bi))
        .collect())
}

/// Intermediate vectors of one step of the generalized scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateState {
    pub z: Vec<f64>,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    pub v: Vec<f64>,
    pub k: usize,
}

impl IterateState {
    /// A state whose intermediates all equal `z0`.
    pub fn new(z0: Vec<f64>) -> Self {
        Self { x: z0.clone(), u: z0.clone(), y: z0.clone(), v: z0.clone(), z: z0, k: 0 }
    }
}

/// One step of the stationary scheme, written out line by line:
///
/// ```text
/// x = P_X z
/// u = (1−θ) z + θ(2x − z)
/// y = P_Y u
/// v = (1−η) u + η(2y − u)
/// z⁺ = (1−μ) z + μ((1−γ)·½(z + v) + γ y)
/// ```
pub fn step_gcarpa(
    x_set: &ConvexSet,
    y_set: &ConvexSet,
    p: &SolverParams,
    state: &IterateState,
) -> Result<IterateState> {
    let z = &state.z;
    let x = x_set.project(z)?;
    let u = reflect_from_projection(p.theta, z, &x);
    let y = y_set.project(&u)?;
    let v = reflect_from_projection(p.eta, &u, &y);
    let (mu, g) = (p.mu, p.gamma);
    let z_next = (0..z.len())
        .map(|i| (1.0 - mu) * z[i] + mu * ((1.0 - g) * 0.5 * (z[i] + v[i]) + g * y[i]))
        .collect();
    Ok(IterateState { z: z_next, x, u, y, v, k: state.k + 1 })
}

/// The same step as [`step_gcarpa`], keeping only `z⁺` and `y` and reusing
/// buffers; the arithmetic is identical, so results agree bit for bit.
pub(crate) fn gcarpa_step(x_set: &ConvexSet, y_set: &ConvexSet, p: &SolverParams, z: &[f64]) -> Result<Step> {
    let mut u = x_set.project(z)?;
    for (ui, zi) in u.iter_mut().zip(z) {
        *ui = (1.0 - p.theta) * zi + p.theta * (2.0 * *ui - zi);
    }
    let y = y_set.project(&u)?;
    let (mu, g, et) = (p.mu, p.gamma, p.eta);
    for i in 0..z.len() {
        let v = (1.0 - et) * u[i] + et * (2.0 * y[i] - u[i]);
        u[i] = (1.0 - mu) * z[i] + mu * ((1.0 - g) * 0.5 * (z[i] + v) + g * y[i]);
    }
    Ok(Step { z: u, y })
}

/// `P_Y P_X z`
pub fn step_map(x: &ConvexSet, y: &ConvexSet, z: &[f64]) -> Result<Vec<f64>> {
    y.project(&x.project(z)?)
}

/// `½(z + R_Y R_X z)`
pub fn step_dr(x: &ConvexSet, y: &ConvexSet, z: &[f64]) -> Result<Vec<f64>> {
    apply_a(x, y, 1.0, 1.0, z)
}

/// Relaxed-projection parameters of the GRAP baseline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrapParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for GrapParams {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.9 }
    }
}

impl GrapParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("GRAP alpha {alpha} outside (0, 1]")));
        }
        if !(beta > 0.0 && beta < 2.0) {
            return Err(Error::InvalidParameter(format!("GRAP beta {beta} outside (0, 2)")));
        }
        Ok(Self { alpha, beta })
    }
}

fn relaxed_projection(beta: f64, w: &[f64], p: &[f64]) -> Vec<f64> {
    w.iter().zip(p).map(|(a, b)| (1.0 - beta) * a + beta * b).collect()
}

/// `(1−α)z + α T_Y T_X z` with `T_S = (1−β)Id + βP_S`.
pub fn step_grap(x: &ConvexSet, y: &ConvexSet, gp: GrapParams, z: &[f64]) -> Result<Vec<f64>> {
    Ok(grap_parts(x, y, GrapParams::new(gp.alpha, gp.beta)?, z)?.0)
}

fn grap_parts(x: &ConvexSet, y: &ConvexSet, gp: GrapParams, z: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let tx = relaxed_projection(gp.beta, z, &x.project(z)?);
    let py = y.project(&tx)?;
    let ty = relaxed_projection(gp.beta, &tx, &py);
    Ok((linalg::lincomb(1.0 - gp.alpha, z, gp.alpha, &ty), py))
}

/// Output of one driven step: the new iterate and the `Y`-projection used
/// to produce it.
#[derive(Clone, Debug)]
pub struct Step {
    pub z: Vec<f64>,
    pub y: Vec<f64>,
}

/// A fixed-point map driven by [`run_fixed_point`].
///
/// Steppers may carry internal state (non-stationary schedules), hence
/// `&mut self`.
pub trait Stepper {
    fn set_x(&self) -> &ConvexSet;
    fn set_y(&self) -> &ConvexSet;
    fn step(&mut self, z: &[f64]) -> Result<Step>;
}

#[derive(Clone, Copy, Debug)]
pub struct GcarpaStepper<'a> {
    pub x: &'a ConvexSet,
    pub y: &'a ConvexSet,
    pub params: SolverParams,
}

impl Stepper for GcarpaStepper<'_> {
    fn set_x(&self) -> &ConvexSet {
        self.x
    }
    fn set_y(&self) -> &ConvexSet {
        self.y
    }
    fn step(&mut self, z: &[f64]) -> Result<Step> {
        gcarpa_step(self.x, self.y, &self.params, z)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MapStepper<'a> {
    pub x: &'a ConvexSet,
    pub y: &'a ConvexSet,
}

impl Stepper for MapStepper<'_> {
    fn set_x(&self) -> &ConvexSet {
        self.x
    }
    fn set_y(&self) -> &ConvexSet {
        self.y
    }
    fn step(&mut self, z: &[f64]) -> Result<Step> {
        let y = step_map(self.x, self.y, z)?;
        Ok(Step { z: y.clone(), y })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DrStepper<'a> {
    pub x: &'a ConvexSet,
    pub y: &'a ConvexSet,
}

impl Stepper for DrStepper<'_> {
    fn set_x(&self) -> &ConvexSet {
        self.x
    }
    fn set_y(&self) -> &ConvexSet {
        self.y
    }
    fn step(&mut self, z: &[f64]) -> Result<Step> {
        gcarpa_step(self.x, self.y, &SolverParams::douglas_rachford(), z)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GrapStepper<'a> {
    pub x: &'a ConvexSet,
    pub y: &'a ConvexSet,
    pub params: GrapParams,
}

impl Stepper for GrapStepper<'_> {
    fn set_x(&self) -> &ConvexSet {
        self.x
    }
    fn set_y(&self) -> &ConvexSet {
        self.y
    }
    fn step(&mut self, z: &[f64]) -> Result<Step> {
        let (z, y) = grap_parts(self.x, self.y, self.params, z)?;
        Ok(Step { z, y })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub tol: f64,
    pub kmax: usize,
    pub track_support: bool,
    /// Also require the feasibility residual to be below `tol`.
    pub gate_feasibility: bool,
}

impl RunOptions {
    pub fn new(tol: f64, kmax: usize) -> Self {
        Self { tol, kmax, track_support: false, gate_feasibility: false }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance {} must be positive", self.tol)));
        }
        if self.kmax == 0 {
            return Err(Error::InvalidParameter("kmax must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    /// `‖z^{k+1} − z^k‖ / max(1, ‖z^k‖)` for each performed step.
    pub fpr: Vec<f64>,
    /// `max(dist(z^{k+1}, X), dist(z^{k+1}, Y))`
    pub feas: Vec<f64>,
    /// Number of entries of the step's `Y`-projection above the support threshold.
    pub support: Option<Vec<usize>>,
    pub iterations: usize,
    pub termination: Termination,
    pub final_z: Vec<f64>,
    /// `Y`-projection from the last step; the solution estimate for
    /// DR-type maps, whose governing sequence need not be feasible.
    pub final_y: Vec<f64>,
}

impl RunRecord {
    /// Step count at which the residual first drops to `tol`, if it does.
    pub fn first_below(&self, tol: f64) -> Option<usize> {
        self.fpr.iter().position(|&r| r <= tol).map(|i| i + 1)
    }
}

/// Number of entries with `|y_i| > SUPPORT_EPS · max(1, ‖y‖∞)`.
pub fn support_size(y: &[f64]) -> usize {
    let thr = SUPPORT_EPS * linalg::norm_inf(y).max(1.0);
    y.iter().filter(|v| v.abs() > thr).count()
}

pub(crate) fn check_iterate(step: usize, z: &[f64]) -> Result<f64> {
    let nz = linalg::norm(z);
    if !nz.is_finite() {
        return Err(Error::NumericDivergence { step, reason: "non-finite iterate".into() });
    }
    if nz > DIVERGENCE_NORM {
        return Err(Error::NumericDivergence { step, reason: format!("iterate norm {nz:.3e}") });
    }
    Ok(nz)
}

/// Iterates `stepper` from `z0` until the fixed-point residual reaches
/// `opts.tol` or `opts.kmax` steps have been taken.
pub fn run_fixed_point<S: Stepper + ?Sized>(stepper: &mut S, z0: &[f64], opts: &RunOptions) -> Result<RunRecord> {
    opts.validate()?;
    check_dim(stepper.set_x().dim(), z0.len())?;
    let mut z = z0.to_vec();
    let mut nz = check_iterate(0, &z)?;
    let mut fpr = Vec::new();
    let mut feas = Vec::new();
    let mut support = opts.track_support.then(Vec::new);
    let mut termination = Termination::MaxIterations;
    let mut final_y = Vec::new();

    for k in 0..opts.kmax {
        let step = stepper.step(&z)?;
        let n_next = check_iterate(k + 1, &step.z)?;
        let r = linalg::dist(&step.z, &z) / nz.max(1.0);
        let f = stepper
            .set_x()
            .membership_residual(&step.z)?
            .max(stepper.set_y().membership_residual(&step.z)?);
        fpr.push(r);
        feas.push(f);
        if let Some(s) = support.as_mut() {
            s.push(support_size(&step.y));
        }
        z = step.z;
        final_y = step.y;
        nz = n_next;
        if r <= opts.tol && (!opts.gate_feasibility || f <= opts.tol) {
            termination = Termination::Converged;
            break;
        }
    }
    Ok(RunRecord { iterations: fpr.len(), fpr, feas, support, termination, final_z: z, final_y })
}

/// The first `steps + 1` iterates `z^0, …, z^steps`.
pub fn trace_iterates<S: Stepper + ?Sized>(stepper: &mut S, z0: &[f64], steps: usize) -> Result<Vec<Vec<f64>>> {
    check_dim(stepper.set_x().dim(), z0.len())?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(z0.to_vec());
    for k in 0..steps {
        let next = stepper.step(&out[k])?.z;
        check_iterate(k + 1, &next)?;
        out.push(next);
    }
    Ok(out)
}
