//! Spectral model of the generalized scheme on two subspaces.
//!
//! In principal-angle coordinates the linear map splits into 2×2 blocks, one
//! per angle `φ_i` with `t_i = sin²φ_i`, plus two scalar blocks. With
//! `a = 1−2θ`, `κ = γ + (1−γ)η`, `c = √(1−t)` and `s = √t` the block is
//!
//! ```text
//! M(t) = [ 1 − μκt           μaκcs              ]
//!        [ μκcs              1 − μ((1+γ)θ + aκc²) ]
//! ```
//!
//! Its eigenvalues are `1 − (μ/2)((1+γ)θ + κ(1−2θc²)) ± (μ/2)√Δ` with
//! `Δ = 4κ²θ²(t−τ)² + Δ_min`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eig_2x2, Eig2x2};
use crate::operators::SolverParams;

/// Denominators of the critical-damping formula smaller than this are
/// treated as degenerate.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-14;

/// Largest mixing weight tried when searching towards the open end of
/// `γ ∈ [0, 1)`.
pub const GAMMA_SUP: f64 = 1.0 - 1e-6;

/// Tolerance of the endpoint-worst identity.
pub const ENDPOINT_TOL: f64 = 1e-12;

/// Samples of the `γ` scan used to bracket crossings of the two endpoint
/// radii.
const CROSSING_SCAN: usize = 4000;

/// `sin²φ`, computed from `sin` directly to stay accurate for small angles.
pub fn angle_to_t(phi: f64) -> f64 {
    let s = phi.sin();
    s * s
}

/// Principal angles between `X` (dimension `p`) and `Y` (dimension `p`) in
/// `ℝⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalAngleSpec {
    n: usize,
    p: usize,
    angles: Vec<f64>,
}

impl PrincipalAngleSpec {
    pub fn new(n: usize, angles: Vec<f64>) -> Result<Self> {
        let p = angles.len();
        if p == 0 {
            return Err(Error::InvalidInput("no principal angles".into()));
        }
        if 2 * p > n {
            return Err(Error::InvalidInput(format!("need n >= 2p, got n={n}, p={p}")));
        }
        if angles.iter().any(|a| !(a.is_finite() && *a > 0.0 && *a <= std::f64::consts::FRAC_PI_2)) {
            return Err(Error::InvalidInput("principal angles must lie in (0, pi/2]".into()));
        }
        if angles.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput("principal angles must be nondecreasing".into()));
        }
        Ok(Self { n, p, angles })
    }

    /// `φ_i = φ_F + (i−1)/(p−1)·(π/2 − φ_F)`, so the angles run from the
    /// Friedrichs angle up to `π/2`.
    pub fn schedule(n: usize, p: usize, phi_f: f64) -> Result<Self> {
        if !(phi_f > 0.0 && phi_f <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidInput(format!("Friedrichs angle {phi_f} outside (0, pi/2]")));
        }
        let angles = match p {
            0 => Vec::new(),
            1 => vec![phi_f],
            _ => (0..p)
                .map(|i| {
                    if i + 1 == p {
                        std::f64::consts::FRAC_PI_2
                    } else {
                        phi_f + i as f64 / (p - 1) as f64 * (std::f64::consts::FRAC_PI_2 - phi_f)
                    }
                })
                .collect(),
        };
        Self::new(n, angles)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn t_values(&self) -> Vec<f64> {
        self.angles.iter().map(|&a| angle_to_t(a)).collect()
    }

    /// `t` of the smallest angle.
    pub fn t_friedrichs(&self) -> f64 {
        angle_to_t(self.angles[0])
    }

    /// `t` of the largest angle.
    pub fn t_largest(&self) -> f64 {
        angle_to_t(self.angles[self.p - 1])
    }

    /// Multiplicity of the free scalar block, `n − 2p`.
    pub fn free_dim(&self) -> usize {
        self.n - 2 * self.p
    }
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("t = {t} outside [0, 1]")))
    }
}

fn kappa(p: &SolverParams) -> f64 {
    p.gamma() + (1.0 - p.gamma()) * p.eta()
}

pub fn block_matrix(t: f64, p: &SolverParams) -> Result<[[f64; 2]; 2]> {
    check_t(t)?;
    let (mu, g, th) = (p.mu(), p.gamma(), p.theta());
    let a = 1.0 - 2.0 * th;
    let k = kappa(p);
    let c2 = 1.0 - t;
    let cs = (t * (1.0 - t)).sqrt();
    Ok([
        [1.0 - mu * k * t, mu * a * k * cs],
        [mu * k * cs, 1.0 - mu * ((1.0 + g) * th + a * k * c2)],
    ])
}

/// Closed-form spectrum of one principal-angle block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpectrum {
    pub block: [[f64; 2]; 2],
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    /// `Δ` without the `μ²` factor, so `λ± = m ± (μ/2)√Δ`.
    pub discriminant: f64,
    pub tau: f64,
    pub delta_min: f64,
}

impl BlockSpectrum {
    pub fn spectral_radius(&self) -> f64 {
        self.lambda_plus.norm().max(self.lambda_minus.norm())
    }
}

/// `τ` and `Δ_min` of the vertex form.
pub fn vertex(p: &SolverParams) -> (f64, f64) {
    let (g, th, et) = (p.gamma(), p.theta(), p.eta());
    let a = 1.0 - 2.0 * th;
    let k = kappa(p);
    let tau = ((1.0 + g) * (1.0 - th) - a * k) / (2.0 * k * th);
    let delta_min = (1.0 - g * g) * (2.0 * th - 1.0) * (1.0 - 2.0 * et);
    (tau, delta_min)
}

/// `Δ(t) = ((1+γ)θ + aκ − 2(1−θ)κt)² + 4aκ²t(1−t)`
pub fn discriminant(t: f64, p: &SolverParams) -> f64 {
    let (g, th) = (p.gamma(), p.theta());
    let a = 1.0 - 2.0 * th;
    let k = kappa(p);
    let lin = (1.0 + g) * th + a * k - 2.0 * (1.0 - th) * k * t;
    lin * lin + 4.0 * a * k * k * t * (1.0 - t)
}

pub fn block_eigs(t: f64, p: &SolverParams) -> Result<BlockSpectrum> {
    let block = block_matrix(t, p)?;
    let (mu, g, th) = (p.mu(), p.gamma(), p.theta());
    let k = kappa(p);
    let mid = 1.0 - 0.5 * mu * ((1.0 + g) * th + k * (1.0 - 2.0 * th * (1.0 - t)));
    let disc = discriminant(t, p);
    let (lambda_plus, lambda_minus) = if disc >= 0.0 {
        let h = 0.5 * mu * disc.sqrt();
        (Complex64::new(mid + h, 0.0), Complex64::new(mid - h, 0.0))
    } else {
        let h = 0.5 * mu * (-disc).sqrt();
        (Complex64::new(mid, h), Complex64::new(mid, -h))
    };
    let (tau, delta_min) = vertex(p);
    Ok(BlockSpectrum { block, lambda_plus, lambda_minus, discriminant: disc, tau, delta_min })
}

/// Spectral radius of the block at `t` from the closed form.
pub fn block_radius(t: f64, p: &SolverParams) -> Result<f64> {
    Ok(block_eigs(t, p)?.spectral_radius())
}

/// Numerical spectrum of the block, for cross-checking the closed form.
pub fn block_eigs_numeric(t: f64, p: &SolverParams) -> Result<Eig2x2> {
    eig_2x2(block_matrix(t, p)?)
}

/// `(λ_{q−p}, λ_{n−p−q})`: the eigenvalues on `X ∩ Y^⊥` and on `X^⊥ ∩ Y^⊥`.
pub fn scalar_eigs(p: &SolverParams) -> (f64, f64) {
    let (mu, g, th, et) = (p.mu(), p.gamma(), p.theta(), p.eta());
    let b = 1.0 - th - et + 2.0 * th * et;
    (1.0 - mu * (1.0 + g) * th, (1.0 - mu) + mu * (1.0 - g) * b)
}

/// Subdominant eigenvalue modulus of the scheme on `spec`.
///
/// Only blocks with `t > 0` contribute (`t = 0` is an intersection
/// direction with eigenvalue 1). The free scalar block enters when
/// `n > 2p`; `X` and `Y` have equal dimension, so the other scalar block is
/// always absent.
pub fn subdominant_modulus(spec: &PrincipalAngleSpec, p: &SolverParams) -> Result<f64> {
    let mut xi: f64 = 0.0;
    for t in spec.t_values() {
        if t > 0.0 {
            xi = xi.max(block_radius(t, p)?);
        }
    }
    if spec.free_dim() > 0 {
        xi = xi.max(scalar_eigs(p).1.abs());
    }
    Ok(xi)
}

/// `max_i cos²φ_i`
pub fn map_rate(spec: &PrincipalAngleSpec) -> f64 {
    spec.angles.iter().map(|a| a.cos().powi(2)).fold(0.0, f64::max)
}

/// `max_i cos φ_i`
pub fn dr_rate(spec: &PrincipalAngleSpec) -> f64 {
    spec.angles.iter().map(|a| a.cos()).fold(0.0, f64::max)
}

fn check_symmetric_weights(theta: f64, eta: f64) -> Result<()> {
    if (0.5..=1.0).contains(&theta) && (0.5..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::UnsupportedRegime(format!("theta={theta}, eta={eta} outside [1/2, 1]")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// A mixing weight at which the block at `t` is critically damped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalCandidate {
    pub t: f64,
    pub branch: Branch,
    pub gamma: f64,
    /// `w_±(t)`
    pub w: f64,
    /// The coalesced eigenvalue `1 − κ*ψ_±(t)`.
    pub lambda_star: f64,
}

/// Admissible critical-damping weights at one `t`, plus the denominators of
/// branches dropped as degenerate.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CriticalSet {
    pub admissible: Vec<CriticalCandidate>,
    pub degenerate: Vec<f64>,
}

/// `ψ(t) = t + √(2θ−1)√(t(1−t))`
pub fn psi(t: f64, theta: f64) -> f64 {
    psi_branch(t, theta, Branch::Plus)
}

/// `ψ_±(t) = t ± √(2θ−1)√(t(1−t))`. The coalesced eigenvalue on the
/// `w_−` branch is `1 − κ*ψ_−(t)`; the single `ψ` above only covers `w_+`.
pub fn psi_branch(t: f64, theta: f64, branch: Branch) -> f64 {
    let r = (2.0 * theta - 1.0).sqrt() * (t * (1.0 - t)).sqrt();
    match branch {
        Branch::Plus => t + r,
        Branch::Minus => t - r,
    }
}

/// `w_±(t) = (2θ−1) + 2(1−θ)t ± 2√(2θ−1)√(t(1−t))`
pub fn w_branch(t: f64, theta: f64, branch: Branch) -> f64 {
    let r = 2.0 * (2.0 * theta - 1.0).sqrt() * (t * (1.0 - t)).sqrt();
    let base = (2.0 * theta - 1.0) + 2.0 * (1.0 - theta) * t;
    match branch {
        Branch::Plus => base + r,
        Branch::Minus => base - r,
    }
}

/// `γ_±(t) = (η w_± − θ) / (θ − (1−η) w_±)`, possibly outside `[0, 1)`.
pub fn critical_gamma_branch(t: f64, theta: f64, eta: f64, branch: Branch) -> Result<CriticalCandidate> {
    let w = w_branch(t, theta, branch);
    let den = theta - (1.0 - eta) * w;
    if den.abs() < DEGENERATE_DENOMINATOR {
        return Err(Error::DegenerateCandidate { denominator: den });
    }
    let gamma = (eta * w - theta) / den;
    let kappa_star = eta + (1.0 - eta) * gamma;
    Ok(CriticalCandidate { t, branch, gamma, w, lambda_star: 1.0 - kappa_star * psi_branch(t, theta, branch) })
}

/// Critical-damping weights at `t` that fall in `[0, 1)`.
pub fn critical_gamma(t: f64, theta: f64, eta: f64) -> Result<CriticalSet> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidInput(format!("t = {t} outside (0, 1]")));
    }
    check_symmetric_weights(theta, eta)?;
    let mut out = CriticalSet::default();
    for branch in [Branch::Plus, Branch::Minus] {
        match critical_gamma_branch(t, theta, eta, branch) {
            Ok(c) if (0.0..1.0).contains(&c.gamma) => {
                // θ = ½ makes both branches coincide
                if !out.admissible.iter().any(|o| o.gamma == c.gamma) {
                    out.admissible.push(c)
                }
            }
            Ok(_) => {}
            Err(Error::DegenerateCandidate { denominator }) => out.degenerate.push(denominator),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Where a minimax winner came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CandidateSource {
    Critical { t: f64, branch: Branch },
    Endpoint,
    Crossing,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimaxChoice {
    pub gamma: f64,
    /// `max(ρ(M(t_F, γ)), ρ(M(t_P, γ)))`
    pub xi: f64,
    pub source: CandidateSource,
    /// No closed-form candidate was admissible.
    pub fallback: bool,
}

fn endpoint_worst(t_f: f64, t_p: f64, theta: f64, eta: f64, gamma: f64) -> Result<f64> {
    let p = SolverParams::new(1.0, gamma, theta, eta)?;
    Ok(block_radius(t_f, &p)?.max(block_radius(t_p, &p)?))
}

/// Minimax choice of `γ` for the endpoint angles `t_F ≤ t_P` at `μ = 1`.
///
/// Candidates are the admissible critical weights at both endpoints, the
/// ends `0` and [`GAMMA_SUP`] of the range, and every `γ` where the two
/// endpoint radii cross (bracketed on a uniform scan and refined by
/// bisection). The candidate with the smallest worst-endpoint radius wins;
/// ties keep the earlier candidate in that order.
pub fn minimax_gamma(t_f: f64, t_p: f64, theta: f64, eta: f64, mu: f64) -> Result<MinimaxChoice> {
    if mu != 1.0 {
        return Err(Error::UnsupportedRegime(format!("minimax recipe assumes mu = 1, got {mu}")));
    }
    if !(t_f > 0.0 && t_f <= t_p && t_p <= 1.0) {
        return Err(Error::InvalidInput(format!("need 0 < tF <= tP <= 1, got tF={t_f}, tP={t_p}")));
    }
    check_symmetric_weights(theta, eta)?;

    let mut cands: Vec<(f64, CandidateSource)> = Vec::new();
    for t in [t_f, t_p] {
        for c in critical_gamma(t, theta, eta)?.admissible {
            cands.push((c.gamma, CandidateSource::Critical { t, branch: c.branch }));
        }
    }
    let fallback = cands.is_empty();
    cands.push((0.0, CandidateSource::Endpoint));
    cands.push((GAMMA_SUP, CandidateSource::Endpoint));

    let gap = |g: f64| -> Result<f64> {
        let p = SolverParams::new(1.0, g, theta, eta)?;
        Ok(block_radius(t_f, &p)? - block_radius(t_p, &p)?)
    };
    let mut g_prev = 0.0;
    let mut d_prev = gap(g_prev)?;
    for i in 1..=CROSSING_SCAN {
        let g = GAMMA_SUP * i as f64 / CROSSING_SCAN as f64;
        let d = gap(g)?;
        if d_prev == 0.0 {
            cands.push((g_prev, CandidateSource::Crossing));
        } else if d_prev * d < 0.0 {
            let (mut lo, mut hi, mut d_lo) = (g_prev, g, d_prev);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let dm = gap(mid)?;
                if dm * d_lo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    d_lo = dm;
                }
            }
            cands.push((0.5 * (lo + hi), CandidateSource::Crossing));
        }
        g_prev = g;
        d_prev = d;
    }

    let mut best: Option<MinimaxChoice> = None;
    for (gamma, source) in cands {
        let xi = endpoint_worst(t_f, t_p, theta, eta, gamma)?;
        if best.map_or(true, |b| xi < b.xi) {
            best = Some(MinimaxChoice { gamma, xi, source, fallback });
        }
    }
    Ok(best.expect("candidate list always holds the range ends"))
}

/// Parameter grids for the exhaustive search.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchGrid {
    pub gammas: Vec<f64>,
    pub thetas: Vec<f64>,
    pub etas: Vec<f64>,
}

impl Default for SearchGrid {
    /// `θ, η ∈ {0.5, 0.6, …, 1.0}`, `γ ∈ {0, 0.05, …, 0.95}`.
    fn default() -> Self {
        let weights: Vec<f64> = (5..=10).map(|i| i as f64 / 10.0).collect();
        Self { gammas: (0..20).map(|i| i as f64 / 20.0).collect(), thetas: weights.clone(), etas: weights }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridChoice {
    pub gamma: f64,
    pub theta: f64,
    pub eta: f64,
    pub xi: f64,
}

/// Exhaustive minimization of [`subdominant_modulus`] at `μ = 1`.
///
/// Ties go to the lexicographically smallest `(γ, θ, η)`.
pub fn grid_best(spec: &PrincipalAngleSpec, grid: &SearchGrid) -> Result<GridChoice> {
    if grid.gammas.is_empty() {
        return Err(Error::EmptyGrid("gamma"));
    }
    if grid.thetas.is_empty() {
        return Err(Error::EmptyGrid("theta"));
    }
    if grid.etas.is_empty() {
        return Err(Error::EmptyGrid("eta"));
    }
    let mut triples: Vec<(f64, f64, f64)> = Vec::new();
    for &g in &grid.gammas {
        for &th in &grid.thetas {
            for &et in &grid.etas {
                triples.push((g, th, et));
            }
        }
    }
    triples.sort_by(|a, b| a.partial_cmp(b).expect("grid values are finite"));
    let mut best: Option<GridChoice> = None;
    for (gamma, theta, eta) in triples {
        let xi = subdominant_modulus(spec, &SolverParams::new(1.0, gamma, theta, eta)?)?;
        if best.map_or(true, |b| xi < b.xi) {
            best = Some(GridChoice { gamma, theta, eta, xi });
        }
    }
    Ok(best.expect("grids are nonempty"))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointCheck {
    pub holds: bool,
    /// Index of the interior angle whose block radius exceeds both
    /// endpoints, with the excess.
    pub witness: Option<(usize, f64)>,
}

/// Checks that the worst block radius over the angle list is attained at
/// the smallest or the largest angle.
pub fn endpoint_worst_check(spec: &PrincipalAngleSpec, p: &SolverParams) -> Result<EndpointCheck> {
    if p.mu() != 1.0 {
        return Err(Error::UnsupportedRegime(format!("endpoint property assumes mu = 1, got {}", p.mu())));
    }
    check_symmetric_weights(p.theta(), p.eta())?;
    let ts = spec.t_values();
    let radii = ts.iter().map(|&t| block_radius(t, p)).collect::<Result<Vec<_>>>()?;
    let ends = radii[0].max(radii[radii.len() - 1]);
    let (idx, worst) = radii
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    if worst - ends <= ENDPOINT_TOL {
        Ok(EndpointCheck { holds: true, witness: None })
    } else {
        Ok(EndpointCheck { holds: false, witness: Some((idx, worst - ends)) })
    }
}
