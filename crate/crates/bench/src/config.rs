//! Benchmark configuration. Every field has a default equal to the setting
//! used for the published tables, so an empty file (or no file) reproduces
//! them.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use relaxproj::operators::GrapParams;
use relaxproj::problems::CsSetting;
use relaxproj::schedules::{ParamIntervals, RelaxationLaw};
use relaxproj::spectral::SearchGrid;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::methods::Method;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub tolerance: f64,
    /// Overrides every experiment's own cap when set.
    pub kmax: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
    pub gate_feasibility: bool,
    pub predict: PredictConfig,
    pub subspace: SubspaceConfig,
    pub ball_line: BallLineConfig,
    pub cs: CsConfig,
    pub trajectory: TrajectoryConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            kmax: None,
            seed: 0,
            out: PathBuf::from("results"),
            gate_feasibility: false,
            predict: PredictConfig::default(),
            subspace: SubspaceConfig::default(),
            ball_line: BallLineConfig::default(),
            cs: CsConfig::default(),
            trajectory: TrajectoryConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub gammas: Vec<f64>,
    pub thetas: Vec<f64>,
    pub etas: Vec<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = SearchGrid::default();
        Self { gammas: g.gammas, thetas: g.thetas, etas: g.etas }
    }
}

impl GridConfig {
    pub fn to_grid(&self) -> SearchGrid {
        SearchGrid { gammas: self.gammas.clone(), thetas: self.thetas.clone(), etas: self.etas.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictConfig {
    pub n: usize,
    pub p: usize,
    pub angles_deg: Vec<f64>,
    /// `(θ, η)` of the fixed-weight minimax row.
    pub fixed_weights: [f64; 2],
    pub grid: GridConfig,
}

impl Default for PredictConfig {
    fn default() -> Self {
        Self { n: 100, p: 50, angles_deg: vec![5.0, 10.0, 15.0, 20.0], fixed_weights: [0.7, 0.7], grid: GridConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubspaceConfig {
    pub n: usize,
    pub p: usize,
    pub angles_deg: Vec<f64>,
    pub starts: usize,
    pub kmax: usize,
    pub fixed_weights: [f64; 2],
    pub grid: GridConfig,
}

impl Default for SubspaceConfig {
    fn default() -> Self {
        Self {
            n: 100,
            p: 50,
            angles_deg: vec![10.0, 20.0, 45.0, 60.0],
            starts: 10,
            kmax: 5000,
            fixed_weights: [0.7, 0.7],
            grid: GridConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrapConfig {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for GrapConfig {
    fn default() -> Self {
        let d = GrapParams::default();
        Self { alpha: d.alpha, beta: d.beta }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntervalConfig {
    pub gamma: [f64; 2],
    pub theta: [f64; 2],
    pub eta: [f64; 2],
    pub mu: f64,
}

impl Default for IntervalConfig {
    fn default() -> Self {
        let d = ParamIntervals::default();
        Self { gamma: [d.gamma_min, d.gamma_max], theta: [d.theta_min, d.theta_max], eta: [d.eta_min, d.eta_max], mu: d.mu }
    }
}

impl IntervalConfig {
    pub fn to_intervals(&self) -> ParamIntervals {
        ParamIntervals {
            gamma_min: self.gamma[0],
            gamma_max: self.gamma[1],
            theta_min: self.theta[0],
            theta_max: self.theta[1],
            eta_min: self.eta[0],
            eta_max: self.eta[1],
            mu: self.mu,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelaxationConfig {
    pub amp: f64,
    pub exponent: f64,
    pub cap: f64,
}

impl Default for RelaxationConfig {
    fn default() -> Self {
        let d = RelaxationLaw::default();
        Self { amp: d.amp, exponent: d.exponent, cap: d.cap }
    }
}

impl RelaxationConfig {
    pub fn to_law(&self) -> RelaxationLaw {
        RelaxationLaw { amp: self.amp, exponent: self.exponent, cap: self.cap }
    }
}

/// Parameters shared by the method factory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodParams {
    pub carpa_gamma: f64,
    /// `(γ, θ, η)` of stationary gCARPA.
    pub gcarpa: [f64; 3],
    pub grap: GrapConfig,
    pub intervals: IntervalConfig,
    pub ns_dr: RelaxationConfig,
}

impl Default for MethodParams {
    fn default() -> Self {
        Self {
            carpa_gamma: 0.5,
            gcarpa: [0.0, 1.0, 1.0],
            grap: GrapConfig::default(),
            intervals: IntervalConfig::default(),
            ns_dr: RelaxationConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BallLineConfig {
    pub starts: usize,
    pub kmax: usize,
    pub tolerances: Vec<f64>,
    pub methods: Vec<Method>,
    pub params: MethodParams,
}

impl Default for BallLineConfig {
    fn default() -> Self {
        Self {
            starts: 10_000,
            kmax: 10_000,
            tolerances: vec![1e-4, 1e-6, 1e-8, 1e-10],
            methods: Method::ALL.to_vec(),
            params: MethodParams { grap: GrapConfig { alpha: 1.0, beta: 1.4 }, ..MethodParams::default() },
        }
    }
}

/// Tuned stationary gCARPA triple for one compressed-sensing setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsTuning {
    pub setting: CsSetting,
    pub gcarpa: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CsConfig {
    pub settings: Vec<CsSetting>,
    pub instance_seed: u64,
    pub start_seed: u64,
    /// Instance seed used by the grid search that produced `tuned`.
    pub validation_seed: u64,
    pub kmax: usize,
    pub methods: Vec<Method>,
    pub params: MethodParams,
    /// Per-setting gCARPA triples; settings not listed use `params.gcarpa`.
    pub tuned: Vec<CsTuning>,
    pub grid: GridConfig,
}

impl Default for CsConfig {
    fn default() -> Self {
        Self {
            settings: vec![CsSetting::Toy, CsSetting::P1, CsSetting::P2, CsSetting::P3, CsSetting::P4],
            instance_seed: 0,
            start_seed: 1,
            validation_seed: 100,
            kmax: 5000,
            methods: Method::ALL.to_vec(),
            params: MethodParams { gcarpa: [0.5, 1.0, 1.0], grap: GrapConfig { alpha: 1.0, beta: 1.5 }, ..MethodParams::default() },
            tuned: default_cs_tuning(),
            grid: GridConfig::default(),
        }
    }
}

/// Grid-search winners on the validation instances (see `grid-search --family cs`).
fn default_cs_tuning() -> Vec<CsTuning> {
    [
        (CsSetting::Toy, 0.35),
        (CsSetting::P1, 0.5),
        (CsSetting::P2, 0.5),
        (CsSetting::P3, 0.25),
        (CsSetting::P4, 0.55),
    ]
    .into_iter()
    .map(|(setting, gamma)| CsTuning { setting, gcarpa: [gamma, 1.0, 1.0] })
    .collect()
}

impl CsConfig {
    pub fn params_for(&self, setting: CsSetting) -> MethodParams {
        let mut p = self.params.clone();
        if let Some(t) = self.tuned.iter().find(|t| t.setting == setting) {
            p.gcarpa = t.gcarpa;
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub angle_deg: f64,
    pub steps: usize,
    pub weights: [f64; 2],
    /// Shared `γ` of CARPA and gCARPA; defaults to the critical weight of
    /// the plane at `weights`.
    pub gamma: Option<f64>,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self { angle_deg: 45.0, steps: 40, weights: [0.7, 0.7], gamma: None }
    }
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            bail!("tolerance must be positive, got {}", self.tolerance);
        }
        if self.kmax == Some(0) {
            bail!("kmax must be at least 1");
        }
        if self.subspace.kmax == 0 || self.ball_line.kmax == 0 || self.cs.kmax == 0 {
            bail!("experiment kmax must be at least 1");
        }
        if self.ball_line.methods.is_empty() || self.cs.methods.is_empty() {
            bail!("at least one method is required");
        }
        if self.ball_line.tolerances.iter().any(|t| !(*t > 0.0)) {
            bail!("ball-line tolerances must be positive");
        }
        for p in [&self.ball_line.params, &self.cs.params] {
            p.intervals.to_intervals().validate()?;
            GrapParams::new(p.grap.alpha, p.grap.beta)?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical TOML serialization. The output directory is
    /// left out: it says where results go, not what they are.
    pub fn hash(&self) -> String {
        let canonical = Self { out: PathBuf::new(), ..self.clone() };
        hex::encode(Sha256::digest(canonical.to_toml().as_bytes()))
    }

    pub fn cap(&self, experiment_kmax: usize) -> usize {
        self.kmax.unwrap_or(experiment_kmax)
    }
}
