//! Projectable convex sets.
//!
//! Every set exposes its exact Euclidean projection; relaxed reflections and
//! distance residuals are derived from it.

use std::cmp::Ordering;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, DenseMatrix, GramFactorization, LinearOperator};

/// `{x : A x = b}` with `A` of full row rank.
#[derive(Clone, Debug)]
pub struct AffineSystem {
    op: LinearOperator,
    b: Vec<f64>,
    gram: GramFactorization,
}

impl AffineSystem {
    /// Factors `A Aᵀ` once; fails when `A` is not of full row rank.
    pub fn new(op: LinearOperator, b: Vec<f64>) -> Result<Self> {
        check_dim(op.rows(), b.len())?;
        let gram = GramFactorization::from_gram(&op.gram()?)?;
        Ok(Self { op, b, gram })
    }

    pub fn from_dense(a: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        Self::new(LinearOperator::Dense(a), b)
    }

    pub fn operator(&self) -> &LinearOperator {
        &self.op
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn gram(&self) -> &GramFactorization {
        &self.gram
    }

    /// `A w − b`
    pub fn residual(&self, w: &[f64]) -> Result<Vec<f64>> {
        let aw = self.op.apply(w)?;
        Ok(aw.iter().zip(&self.b).map(|(x, y)| x - y).collect())
    }

    fn project(&self, w: &[f64]) -> Result<Vec<f64>> {
        let r = self.residual(w)?;
        let y = self.gram.solve(&r)?;
        let corr = self.op.adjoint(&y)?;
        Ok(w.iter().zip(&corr).map(|(x, c)| x - c).collect())
    }
}

/// Subspaces of the canonical two-subspace construction in `ℝⁿ`.
///
/// Without angles this is `span{e_1, …, e_p}`; with angles `φ_i` it is
/// `span{cos φ_i e_i + sin φ_i e_{p+i}}` and requires `n ≥ 2p`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateSubspace {
    n: usize,
    p: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
    rotated: bool,
}

impl CoordinateSubspace {
    pub fn canonical(n: usize, p: usize) -> Result<Self> {
        if p > n {
            return Err(Error::InvalidInput(format!("subspace dimension {p} exceeds ambient {n}")));
        }
        Ok(Self { n, p, cos: Vec::new(), sin: Vec::new(), rotated: false })
    }

    pub fn rotated(n: usize, angles: &[f64]) -> Result<Self> {
        let p = angles.len();
        if 2 * p > n {
            return Err(Error::InvalidInput(format!("need n >= 2p, got n={n}, p={p}")));
        }
        if let Some(a) = angles
            .iter()
            .find(|a| !(a.is_finite() && **a > 0.0 && **a <= std::f64::consts::FRAC_PI_2))
        {
            return Err(Error::InvalidInput(format!("principal angle {a} outside (0, pi/2]")));
        }
        Ok(Self {
            n,
            p,
            cos: angles.iter().map(|a| a.cos()).collect(),
            sin: angles.iter().map(|a| a.sin()).collect(),
            rotated: true,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn subspace_dim(&self) -> usize {
        self.p
    }

    fn project(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        if !self.rotated {
            out[..self.p].copy_from_slice(&w[..self.p]);
            return out;
        }
        let p = self.p;
        for i in 0..p {
            let d = self.cos[i] * w[i] + self.sin[i] * w[p + i];
            out[i] = self.cos[i] * d;
            out[p + i] = self.sin[i] * d;
        }
        out
    }

    /// Dense orthogonal projector.
    pub fn projector_matrix(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        if !self.rotated {
            for i in 0..self.p {
                m.set(i, i, 1.0);
            }
            return m;
        }
        let p = self.p;
        for i in 0..p {
            let (c, s) = (self.cos[i], self.sin[i]);
            m.set(i, i, c * c);
            m.set(i, p + i, c * s);
            m.set(p + i, i, c * s);
            m.set(p + i, p + i, s * s);
        }
        m
    }
}

#[derive(Clone, Debug)]
pub enum ConvexSet {
    AffineSystem(AffineSystem),
    /// `{x : aᵀx = beta}` with `‖a‖ = 1`.
    Hyperplane { normal: Vec<f64>, offset: f64 },
    L2Ball { center: Vec<f64>, radius: f64 },
    /// `{x ∈ ℝ^dim : ‖x‖₁ ≤ radius}`
    L1Ball { dim: usize, radius: f64 },
    CoordinateSubspace(CoordinateSubspace),
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("radius must be positive, got {radius}")))
    }
}

impl ConvexSet {
    /// Normalizes `a` (and rescales `beta`) so the stored normal is unit length.
    pub fn hyperplane(a: Vec<f64>, beta: f64) -> Result<Self> {
        let na = linalg::norm(&a);
        if !(na.is_finite() && na > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidInput("hyperplane normal must be finite and nonzero".into()));
        }
        Ok(ConvexSet::Hyperplane { normal: a.iter().map(|x| x / na).collect(), offset: beta / na })
    }

    pub fn l2_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(ConvexSet::L2Ball { center, radius })
    }

    pub fn l1_ball(dim: usize, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(ConvexSet::L1Ball { dim, radius })
    }

    pub fn affine(a: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        Ok(ConvexSet::AffineSystem(AffineSystem::from_dense(a, b)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::AffineSystem(s) => s.op.cols(),
            ConvexSet::Hyperplane { normal, .. } => normal.len(),
            ConvexSet::L2Ball { center, .. } => center.len(),
            ConvexSet::L1Ball { dim, .. } => *dim,
            ConvexSet::CoordinateSubspace(s) => s.n,
        }
    }

    pub fn project(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), w.len())?;
        Ok(match self {
            ConvexSet::AffineSystem(s) => s.project(w)?,
            ConvexSet::Hyperplane { normal, offset } => {
                let shift = linalg::dot(normal, w) - offset;
                w.iter().zip(normal).map(|(x, a)| x - shift * a).collect()
            }
            ConvexSet::L2Ball { center, radius } => {
                let d = linalg::dist(w, center);
                if d <= *radius {
                    w.to_vec()
                } else {
                    let s = radius / d;
                    w.iter().zip(center).map(|(x, c)| c + s * (x - c)).collect()
                }
            }
            ConvexSet::L1Ball { radius, .. } => project_l1_ball(w, *radius),
            ConvexSet::CoordinateSubspace(s) => s.project(w),
        })
    }

    /// `(1−θ) w + θ (2 P w − w)`
    pub fn relaxed_reflect(&self, rp: ReflectionParams, w: &[f64]) -> Result<Vec<f64>> {
        let p = self.project(w)?;
        Ok(reflect_from_projection(rp.theta(), w, &p))
    }

    /// `‖w − P w‖`
    pub fn membership_residual(&self, w: &[f64]) -> Result<f64> {
        check_dim(self.dim(), w.len())?;
        match self {
            // ‖Aᵀ(AAᵀ)⁻¹r‖² = rᵀ(AAᵀ)⁻¹r, which avoids the adjoint
            ConvexSet::AffineSystem(s) => {
                let r = s.residual(w)?;
                let y = s.gram.solve(&r)?;
                Ok(linalg::dot(&r, &y).max(0.0).sqrt())
            }
            ConvexSet::Hyperplane { normal, offset } => Ok((linalg::dot(normal, w) - offset).abs()),
            ConvexSet::L2Ball { center, radius } => Ok((linalg::dist(w, center) - radius).max(0.0)),
            _ => {
                let p = self.project(w)?;
                Ok(linalg::dist(w, &p))
            }
        }
    }
}

pub(crate) fn reflect_from_projection(theta: f64, w: &[f64], p: &[f64]) -> Vec<f64> {
    w.iter().zip(p).map(|(x, q)| (1.0 - theta) * x + theta * (2.0 * q - x)).collect()
}

/// Euclidean projection onto `{‖x‖₁ ≤ radius}` by the sorted-threshold rule.
///
/// Points already inside the ball are returned unchanged.
pub fn project_l1_ball(w: &[f64], radius: f64) -> Vec<f64> {
    if linalg::norm_l1(w) <= radius {
        return w.to_vec();
    }
    let tau = l1_threshold(w, radius);
    w.iter().map(|&x| x.signum() * (x.abs() - tau).max(0.0)).collect()
}

/// Soft-threshold level `τ` with `Σ max(|w_i| − τ, 0) = radius`; assumes
/// `‖w‖₁ > radius`.
fn l1_threshold(w: &[f64], radius: f64) -> f64 {
    let mut mags: Vec<f64> = w.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &u) in mags.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - radius) / (k + 1) as f64;
        if u > t {
            tau = t;
        } else {
            break;
        }
    }
    tau.max(0.0)
}

/// Relaxation weight `θ ∈ (0, 1]` of a relaxed reflection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReflectionParams(f64);

impl ReflectionParams {
    pub fn new(theta: f64) -> Result<Self> {
        if theta > 0.0 && theta <= 1.0 {
            Ok(Self(theta))
        } else {
            Err(Error::InvalidParameter(format!("reflection weight {theta} outside (0, 1]")))
        }
    }

    pub fn theta(self) -> f64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(t: f64) -> ReflectionParams {
        ReflectionParams::new(t).unwrap()
    }

    #[test]
    fn l1_single_coordinate() {
        let s = ConvexSet::l1_ball(2, 1.0).unwrap();
        assert_eq!(s.project(&[3.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn l1_residual_of_ones() {
        let s = ConvexSet::l1_ball(2, 1.0).unwrap();
        let p = s.project(&[1.0, 1.0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let r = s.membership_residual(&[1.0, 1.0]).unwrap();
        assert!((r - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn l1_ties_zero_together() {
        // |w| = (3, 1, 1, 1), radius 1.5: threshold 1.5 zeroes the tied entries
        let p = project_l1_ball(&[3.0, -1.0, 1.0, 1.0], 1.5);
        assert!((p[0] - 1.5).abs() < 1e-15);
        assert!(p[1..].iter().all(|&x| x == 0.0));
        // equal magnitudes all shrink by the same amount
        let p = project_l1_ball(&[1.0, -1.0, 1.0], 1.5);
        for x in &p {
            assert!((x.abs() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn hyperplane_residual_and_mirror() {
        let h = ConvexSet::hyperplane(vec![1.0, 0.0], 1.0).unwrap();
        assert_eq!(h.membership_residual(&[0.0, 0.0]).unwrap(), 1.0);
        let h0 = ConvexSet::hyperplane(vec![1.0, 0.0], 0.0).unwrap();
        assert_eq!(h0.relaxed_reflect(rp(1.0), &[2.0, 3.0]).unwrap(), vec![-2.0, 3.0]);
    }

    #[test]
    fn hyperplane_constructor_normalizes() {
        let h = ConvexSet::hyperplane(vec![3.0, 4.0], 10.0).unwrap();
        match &h {
            ConvexSet::Hyperplane { normal, offset } => {
                assert!((linalg::norm(normal) - 1.0).abs() < 1e-12);
                assert!((offset - 2.0).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
        assert!(ConvexSet::hyperplane(vec![0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn ball_relaxed_reflection() {
        let b = ConvexSet::l2_ball(vec![0.0, 0.0], 1.0).unwrap();
        let r = b.relaxed_reflect(rp(0.7), &[2.0, 0.0]).unwrap();
        // 0.3 (2,0) + 0.7 (2 (1,0) − (2,0)) = (0.6, 0)
        assert!((r[0] - 0.6).abs() < 1e-15 && r[1] == 0.0);
        let half = b.relaxed_reflect(rp(0.5), &[2.0, 0.0]).unwrap();
        assert_eq!(half, b.project(&[2.0, 0.0]).unwrap());
    }

    #[test]
    fn inside_points_returned_exactly() {
        let b = ConvexSet::l2_ball(vec![1.0, 1.0], 2.0).unwrap();
        assert_eq!(b.project(&[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(b.project(&[0.3, 2.1]).unwrap(), vec![0.3, 2.1]);
        let l1 = ConvexSet::l1_ball(3, 1.0).unwrap();
        assert_eq!(l1.project(&[0.2, -0.3, 0.1]).unwrap(), vec![0.2, -0.3, 0.1]);
    }

    #[test]
    fn subspace_projectors_agree_with_matrices() {
        let angles = [0.3, 0.9, std::f64::consts::FRAC_PI_2];
        let y = CoordinateSubspace::rotated(6, &angles).unwrap();
        let x = CoordinateSubspace::canonical(6, 3).unwrap();
        let w = [0.3, -1.2, 0.5, 2.0, 0.1, -0.7];
        for s in [&x, &y] {
            let dense = s.projector_matrix().matvec(&w).unwrap();
            assert!(linalg::dist(&dense, &s.project(&w)) < 1e-15);
        }
        assert!(CoordinateSubspace::rotated(5, &angles).is_err());
        assert!(CoordinateSubspace::rotated(6, &[0.0]).is_err());
    }

    #[test]
    fn affine_projection_lands_on_system() {
        let a = DenseMatrix::new(2, 3, vec![1.0, 2.0, 0.0, 0.0, 1.0, -1.0]).unwrap();
        let s = ConvexSet::affine(a.clone(), vec![1.0, 2.0]).unwrap();
        let p = s.project(&[0.5, 0.5, 0.5]).unwrap();
        let ap = a.matvec(&p).unwrap();
        assert!((ap[0] - 1.0).abs() < 1e-14 && (ap[1] - 2.0).abs() < 1e-14);
        assert!(matches!(s.project(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn invalid_radii_and_weights() {
        assert!(ConvexSet::l1_ball(2, 0.0).is_err());
        assert!(ConvexSet::l2_ball(vec![0.0], -1.0).is_err());
        assert!(ReflectionParams::new(0.0).is_err());
        assert!(ReflectionParams::new(1.5).is_err());
    }
}
