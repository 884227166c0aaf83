//! Seedable generators for the benchmark instances.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, a
//! counter-based stream that is identical on every platform.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dct_pair, DenseMatrix, LinearOperator};
use crate::sets::{AffineSystem, ConvexSet, CoordinateSubspace};
use crate::spectral::PrincipalAngleSpec;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal vector scaled to unit length (zero stays zero).
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let nv = linalg::norm(&v);
    if nv > 0.0 {
        v.iter_mut().for_each(|x| *x /= nv);
    }
    v
}

/// `X = span{e_1..e_p}` and `Y = span{cos φ_i e_i + sin φ_i e_{p+i}}` in
/// `ℝ^{2p}`.
#[derive(Clone, Debug)]
pub struct SubspaceInstance {
    pub n: usize,
    pub p: usize,
    pub spec: PrincipalAngleSpec,
    pub x: ConvexSet,
    pub y: ConvexSet,
    /// Projector onto `X ∩ Y`, which is `{0}` here.
    pub intersection_projector: DenseMatrix,
}

impl SubspaceInstance {
    pub fn projectors(&self) -> (DenseMatrix, DenseMatrix) {
        match (&self.x, &self.y) {
            (ConvexSet::CoordinateSubspace(x), ConvexSet::CoordinateSubspace(y)) => {
                (x.projector_matrix(), y.projector_matrix())
            }
            _ => unreachable!("subspace instances hold coordinate subspaces"),
        }
    }
}

/// Angles follow the schedule from `phi_f` up to `π/2`; only `n = 2p` is
/// supported.
pub fn make_subspace_instance(n: usize, p: usize, phi_f: f64) -> Result<SubspaceInstance> {
    if n != 2 * p {
        return Err(Error::UnsupportedRegime(format!("only n = 2p is supported, got n={n}, p={p}")));
    }
    if !(phi_f > 0.0 && phi_f < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidInput(format!("Friedrichs angle {phi_f} outside (0, pi/2)")));
    }
    let spec = PrincipalAngleSpec::schedule(n, p, phi_f)?;
    let x = ConvexSet::CoordinateSubspace(CoordinateSubspace::canonical(n, p)?);
    let y = ConvexSet::CoordinateSubspace(CoordinateSubspace::rotated(n, spec.angles())?);
    Ok(SubspaceInstance { n, p, spec, x, y, intersection_projector: DenseMatrix::zeros(n, n) })
}

/// Unit disc and the tangent line `aᵀx = 1`, `a = (1,1)/√2`; they meet only
/// at `a`.
#[derive(Clone, Debug)]
pub struct BallLineInstance {
    pub ball: ConvexSet,
    pub line: ConvexSet,
    pub solution: Vec<f64>,
}

impl BallLineInstance {
    /// `solution + 10·u` for a direction `u` (normalized here).
    pub fn start_from(&self, u: &[f64]) -> Vec<f64> {
        let nu = linalg::norm(u);
        self.solution.iter().zip(u).map(|(s, d)| s + 10.0 * d / nu).collect()
    }

    pub fn random_start<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        loop {
            let u = random_unit_vector(rng, 2);
            if linalg::norm(&u) > 0.0 {
                return self.start_from(&u);
            }
        }
    }
}

pub fn make_ball_line_instance() -> BallLineInstance {
    let a = vec![std::f64::consts::FRAC_1_SQRT_2; 2];
    BallLineInstance {
        ball: ConvexSet::l2_ball(vec![0.0, 0.0], 1.0).expect("unit radius is valid"),
        line: ConvexSet::hyperplane(a.clone(), 1.0).expect("normal is nonzero"),
        solution: a,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsSetting {
    Toy,
    P1,
    P2,
    P3,
    P4,
}

impl CsSetting {
    pub const REALISTIC: [CsSetting; 4] = [CsSetting::P1, CsSetting::P2, CsSetting::P3, CsSetting::P4];

    /// `(m, n, κ)`
    pub fn dims(self) -> (usize, usize, usize) {
        match self {
            CsSetting::Toy => (500, 2000, 50),
            CsSetting::P1 => (1024, 2048, 120),
            CsSetting::P2 => (600, 2560, 20),
            CsSetting::P3 => (256, 1024, 32),
            CsSetting::P4 => (200, 1000, 3),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CsSetting::Toy => "toy",
            CsSetting::P1 => "p1",
            CsSetting::P2 => "p2",
            CsSetting::P3 => "p3",
            CsSetting::P4 => "p4",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "toy" => Ok(CsSetting::Toy),
            "p1" | "1" => Ok(CsSetting::P1),
            "p2" | "2" => Ok(CsSetting::P2),
            "p3" | "3" => Ok(CsSetting::P3),
            "p4" | "4" => Ok(CsSetting::P4),
            other => Err(Error::InvalidInput(format!("unknown compressed-sensing setting {other:?}"))),
        }
    }
}

/// `X = {x : A x = b}` and `Y = {‖x‖₁ ≤ c}` with a known sparse point in
/// both.
#[derive(Clone, Debug)]
pub struct CsInstance {
    pub setting: CsSetting,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub kappa: usize,
    pub x: ConvexSet,
    pub y: ConvexSet,
    pub b: Vec<f64>,
    pub radius: f64,
    pub ground_truth: Vec<f64>,
}

impl CsInstance {
    pub fn operator(&self) -> &LinearOperator {
        match &self.x {
            ConvexSet::AffineSystem(s) => s.operator(),
            _ => unreachable!("compressed-sensing instances hold an affine system"),
        }
    }
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> Result<DenseMatrix> {
    let scale = 1.0 / (m as f64).sqrt();
    let data = (0..m * n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
    DenseMatrix::new(m, n, data)
}

fn sorted_sample<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut idx = index::sample(rng, n, k).into_vec();
    idx.sort_unstable();
    idx
}

/// Draws, in order: the sensing operator, the support, then the nonzero
/// values of the ground truth.
///
/// - `Toy`, `P2`, `P3`: Gaussian `A` with entries `N(0, 1/m)`.
/// - `P1`: `m` random samples of a DCT-sparse signal, `A = R·Cᵀ`.
/// - `P4`: `m` random rows of the DCT, `A = R·C`.
pub fn make_cs_instance(setting: CsSetting, seed: u64) -> Result<CsInstance> {
    let (m, n, kappa) = setting.dims();
    let mut rng = seeded_rng(seed);
    let op = match setting {
        CsSetting::Toy | CsSetting::P2 | CsSetting::P3 => LinearOperator::Dense(gaussian_matrix(&mut rng, m, n)?),
        CsSetting::P1 => LinearOperator::SampledDct { dct: dct_pair(n)?, rows: sorted_sample(&mut rng, n, m), synthesis: true },
        CsSetting::P4 => LinearOperator::SampledDct { dct: dct_pair(n)?, rows: sorted_sample(&mut rng, n, m), synthesis: false },
    };
    let support = sorted_sample(&mut rng, n, kappa);
    let mut ground_truth = vec![0.0; n];
    for &i in &support {
        let mut v: f64 = rng.sample(StandardNormal);
        while v == 0.0 {
            v = rng.sample(StandardNormal);
        }
        ground_truth[i] = v;
    }
    let b = op.apply(&ground_truth)?;
    let radius = linalg::norm_l1(&ground_truth);
    let x = ConvexSet::AffineSystem(AffineSystem::new(op, b.clone())?);
    let y = ConvexSet::l1_ball(n, radius)?;
    Ok(CsInstance { setting, seed, m, n, kappa, x, y, b, radius, ground_truth })
}
