//! Non-stationary parameter laws.
//!
//! The fully non-stationary scheme runs the stationary step with iteration
//! dependent `(γ_k, θ_k, η_k)`. Each update is a multiplicative trial driven
//! by the residual ratio `ρ_k = ‖z^{k+1}−z^k‖ / ‖z^k−z^{k−1}‖`, damped by
//! `α_k = (k+1)^{−(2+δ)}` and clipped to the parameter intervals, so the
//! increments are summable.

use crate::error::{Error, Result};
use crate::linalg;
use crate::operators::{apply_a, gcarpa_step, step_gcarpa, IterateState, SolverParams, Step, Stepper};
use crate::sets::ConvexSet;

/// Clip `v` to `[lo, hi]`.
fn clip(v: f64, lo: f64, hi: f64) -> f64 {
    v.max(lo).min(hi)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamIntervals {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub eta_min: f64,
    pub eta_max: f64,
    pub mu: f64,
}

impl Default for ParamIntervals {
    fn default() -> Self {
        Self { gamma_min: 0.05, gamma_max: 0.95, theta_min: 0.5, theta_max: 1.0, eta_min: 0.5, eta_max: 1.0, mu: 1.0 }
    }
}

impl ParamIntervals {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(0.0 < self.gamma_min && self.gamma_min <= self.gamma_max && self.gamma_max < 1.0) {
            return bad(format!("gamma interval [{}, {}] not inside (0, 1)", self.gamma_min, self.gamma_max));
        }
        for (name, lo, hi) in [("theta", self.theta_min, self.theta_max), ("eta", self.eta_min, self.eta_max)] {
            if !(0.0 < lo && lo <= hi && hi <= 1.0) {
                return bad(format!("{name} interval [{lo}, {hi}] not inside (0, 1]"));
            }
        }
        let mu_max = 2.0 / (1.0 + self.gamma_max);
        if !(self.mu > 0.0 && self.mu < mu_max) {
            return bad(format!("mu {} outside (0, {mu_max})", self.mu));
        }
        Ok(())
    }

    /// Intervals with `θ` and `η` pinned to 1, leaving only `γ` free.
    pub fn gamma_only(mut self) -> Self {
        self.theta_min = 1.0;
        self.theta_max = 1.0;
        self.eta_min = 1.0;
        self.eta_max = 1.0;
        self
    }

    pub fn widths(&self) -> [f64; 3] {
        [self.gamma_max - self.gamma_min, self.theta_max - self.theta_min, self.eta_max - self.eta_min]
    }
}

/// Current parameters and the constants of the trial/damping rule.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleState {
    pub k: usize,
    pub gamma: f64,
    pub theta: f64,
    pub eta: f64,
    /// Increment constants `(c_γ, c_θ, c_η)`.
    pub bounds: [f64; 3],
    pub delta: f64,
    /// Shrink factors `(ς_γ, ς_θ, ς_η)`.
    pub shrink: [f64; 3],
    pub c1: f64,
    /// `‖z^k − z^{k−1}‖`, absent before the first step.
    pub prev_step_norm: Option<f64>,
}

impl ScheduleState {
    /// Starts at the midpoint of the `γ` interval with `θ` and `η` at their
    /// upper ends, `δ = 0.5`, `ς = 0.95`, `c₁ = 0.9` and increment constants
    /// equal to the interval widths.
    pub fn initial(iv: &ParamIntervals) -> Self {
        Self {
            k: 0,
            gamma: 0.5 * (iv.gamma_min + iv.gamma_max),
            theta: iv.theta_max,
            eta: iv.eta_max,
            bounds: iv.widths(),
            delta: 0.5,
            shrink: [0.95; 3],
            c1: 0.9,
            prev_step_norm: None,
        }
    }

    pub fn params(&self, mu: f64) -> Result<SolverParams> {
        SolverParams::new(mu, self.gamma, self.theta, self.eta)
    }

    /// Damping weight `α_k = (k+1)^{−(2+δ)}`.
    pub fn damping(&self) -> f64 {
        damping_weight(self.k, self.delta)
    }

    /// Residual ratio for the step just taken; 1 when no previous step
    /// exists or the previous step was zero.
    pub fn ratio(&self, step_norm: f64) -> f64 {
        match self.prev_step_norm {
            Some(prev) if prev > 0.0 => step_norm / prev,
            _ => 1.0,
        }
    }
}

pub fn damping_weight(k: usize, delta: f64) -> f64 {
    ((k + 1) as f64).powf(-(2.0 + delta))
}

/// Multiplicative trial values: shrink every parameter when `ρ < c₁`,
/// otherwise expand it towards its upper bound.
///
/// Trials are kept inside the intervals so that a damped step never moves a
/// parameter by more than `α_k` times the interval width.
pub fn trial_params(state: &ScheduleState, rho: f64, iv: &ParamIntervals) -> (f64, f64, f64) {
    let [sg, st, se] = state.shrink;
    if rho < state.c1 {
        ((state.gamma * sg).max(iv.gamma_min), (state.theta * st).max(iv.theta_min), (state.eta * se).max(iv.eta_min))
    } else {
        ((state.gamma / sg).min(iv.gamma_max), (state.theta / st).min(iv.theta_max), (state.eta / se).min(iv.eta_max))
    }
}

/// Moves each parameter a fraction `α_k` towards its trial value, clips to
/// the intervals and advances `k`.
pub fn damp_and_clip(state: &ScheduleState, trial: (f64, f64, f64), iv: &ParamIntervals) -> ScheduleState {
    let a = state.damping();
    let mix = |cur: f64, t: f64| (1.0 - a) * cur + a * t;
    ScheduleState {
        k: state.k + 1,
        gamma: clip(mix(state.gamma, trial.0), iv.gamma_min, iv.gamma_max),
        theta: clip(mix(state.theta, trial.1), iv.theta_min, iv.theta_max),
        eta: clip(mix(state.eta, trial.2), iv.eta_min, iv.eta_max),
        ..state.clone()
    }
}

/// `Π_[lo,hi](base + amp/(k+1)^exponent)`; requires `exponent > 1`.
pub fn deterministic_schedule(k: usize, base: f64, amp: f64, exponent: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(exponent > 1.0) {
        return Err(Error::InvalidParameter(format!("schedule exponent {exponent} must exceed 1")));
    }
    Ok(clip(base + amp / ((k + 1) as f64).powf(exponent), lo, hi))
}

/// Power-law parameters `(base, amp, exponent)` of a deterministic schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLaw {
    pub base: f64,
    pub amp: f64,
    pub exponent: f64,
}

/// How the parameters move from one step to the next.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScheduleLaw {
    /// Residual-driven multiplicative trial, damped and clipped.
    Multiplicative,
    /// Trial equal to the current value: parameters never move.
    Frozen,
    Deterministic { gamma: PowerLaw, theta: PowerLaw, eta: PowerLaw },
}

/// One step of the fully non-stationary scheme with the multiplicative law.
///
/// The iterate is advanced with the current parameters; the schedule is then
/// updated from the residual ratio of that step.
pub fn step_ns_gcarpa(
    x: &ConvexSet,
    y: &ConvexSet,
    iv: &ParamIntervals,
    state: &ScheduleState,
    iter: &IterateState,
) -> Result<(IterateState, ScheduleState)> {
    let next = step_gcarpa(x, y, &state.params(iv.mu)?, iter)?;
    let sched = update_schedule(iv, ScheduleLaw::Multiplicative, state, linalg::dist(&next.z, &iter.z))?;
    Ok((next, sched))
}

/// Next schedule state after a step of length `step_norm`.
fn update_schedule(iv: &ParamIntervals, law: ScheduleLaw, state: &ScheduleState, step_norm: f64) -> Result<ScheduleState> {
    let mut sched = match law {
        ScheduleLaw::Multiplicative => {
            let trial = trial_params(state, state.ratio(step_norm), iv);
            damp_and_clip(state, trial, iv)
        }
        ScheduleLaw::Frozen => ScheduleState { k: state.k + 1, ..state.clone() },
        ScheduleLaw::Deterministic { gamma, theta, eta } => {
            let k = state.k + 1;
            ScheduleState {
                k,
                gamma: deterministic_schedule(k, gamma.base, gamma.amp, gamma.exponent, iv.gamma_min, iv.gamma_max)?,
                theta: deterministic_schedule(k, theta.base, theta.amp, theta.exponent, iv.theta_min, iv.theta_max)?,
                eta: deterministic_schedule(k, eta.base, eta.amp, eta.exponent, iv.eta_min, iv.eta_max)?,
                ..state.clone()
            }
        }
    };
    sched.prev_step_norm = Some(step_norm);
    Ok(sched)
}

/// Driver adapter for the fully non-stationary scheme. The parameter
/// trajectory `(γ_k, θ_k, η_k)` is kept for inspection.
#[derive(Clone, Debug)]
pub struct NsGcarpaStepper<'a> {
    pub x: &'a ConvexSet,
    pub y: &'a ConvexSet,
    pub intervals: ParamIntervals,
    pub law: ScheduleLaw,
    pub state: ScheduleState,
    pub history: Vec<[f64; 3]>,
}

impl<'a> NsGcarpaStepper<'a> {
    pub fn new(x: &'a ConvexSet, y: &'a ConvexSet, intervals: ParamIntervals, law: ScheduleLaw) -> Result<Self> {
        Self::with_state(x, y, intervals, law, ScheduleState::initial(&intervals))
    }

    pub fn with_state(
        x: &'a ConvexSet,
        y: &'a ConvexSet,
        intervals: ParamIntervals,
        law: ScheduleLaw,
        state: ScheduleState,
    ) -> Result<Self> {
        intervals.validate()?;
        let history = vec![[state.gamma, state.theta, state.eta]];
        Ok(Self { x, y, intervals, law, state, history })
    }

    /// Largest violation of `|p_{k+1} − p_k| ≤ c_p/(k+1)^{2+δ}` over the
    /// recorded trajectory (non-positive when the bound holds everywhere).
    pub fn worst_increment_excess(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (k, w) in self.history.windows(2).enumerate() {
            let a = damping_weight(k, self.state.delta);
            for j in 0..3 {
                // a few ulps of slack: the damped step is formed in floating point
                let slack = 4.0 * f64::EPSILON * w[0][j].abs().max(w[1][j].abs());
                worst = worst.max((w[1][j] - w[0][j]).abs() - self.state.bounds[j] * a - slack);
            }
        }
        worst
    }
}

impl Stepper for NsGcarpaStepper<'_> {
    fn set_x(&self) -> &ConvexSet {
        self.x
    }
    fn set_y(&self) -> &ConvexSet {
        self.y
    }
    fn step(&mut self, z: &[f64]) -> Result<Step> {
        let next = gcarpa_step(self.x, self.y, &self.state.params(self.intervals.mu)?, z)?;
        self.state = update_schedule(&self.intervals, self.law, &self.state, linalg::dist(&next.z, z))?;
        self.history.push([self.state.gamma, self.state.theta, self.state.eta]);
        Ok(next)
    }
}

/// Over-relaxation law `λ_k = Π_(0, cap](1 + amp/(k+1)^exponent)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxationLaw {
    pub amp: f64,
    pub exponent: f64,
    pub cap: f64,
}

impl Default for RelaxationLaw {
    fn default() -> Self {
        Self { amp: 0.9, exponent: 0.5, cap: 1.99 }
    }
}

impl RelaxationLaw {
    pub fn at(&self, k: usize) -> f64 {
        (1.0 + self.amp / ((k + 1) as f64).powf(self.exponent)).min(self.cap)
    }
}

/// `(1−λ)z + λ·½(z + R_Y R_X z)` with `λ ∈ (0, 2)`.
pub fn step_ns_dr(x: &ConvexSet, y: &ConvexSet, lambda: f64, z: &[f64]) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda < 2.0) {
        return Err(Error::InvalidParameter(format!("relaxation {lambda} outside (0, 2)")));
    }
    let t = apply_a(x, y, 1.0, 1.0, z)?;
    Ok(linalg::lincomb(1.0 - lambda, z, lambda, &t))
}

#[derive(Clone, Copy, Debug)]
pub struct NsDrStepper<'a> {
    pub x: &'a ConvexSet,
    pub y: &'a ConvexSet,
    pub law: RelaxationLaw,
    pub k: usize,
}

impl<'a> NsDrStepper<'a> {
    pub fn new(x: &'a ConvexSet, y: &'a ConvexSet, law: RelaxationLaw) -> Self {
        Self { x, y, law, k: 0 }
    }
}

impl Stepper for NsDrStepper<'_> {
    fn set_x(&self) -> &ConvexSet {
        self.x
    }
    fn set_y(&self) -> &ConvexSet {
        self.y
    }
    fn step(&mut self, z: &[f64]) -> Result<Step> {
        let lambda = self.law.at(self.k);
        if !(lambda > 0.0 && lambda < 2.0) {
            return Err(Error::InvalidParameter(format!("relaxation {lambda} outside (0, 2)")));
        }
        let dr = gcarpa_step(self.x, self.y, &SolverParams::douglas_rachford(), z)?;
        self.k += 1;
        Ok(Step { z: linalg::lincomb(1.0 - lambda, z, lambda, &dr.z), y: dr.y })
    }
}
