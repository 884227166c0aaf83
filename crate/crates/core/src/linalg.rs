//! Dense kernels shared by the rest of the crate.
//!
//! Everything here is double precision and allocation-light; vectors are
//! plain `&[f64]` slices so callers never need a wrapper type.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_dim, Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn norm_l1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

/// `out = alpha * a + beta * b`
pub fn lincomb(alpha: f64, a: &[f64], beta: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect()
}

/// Row-major dense matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix({}x{})", self.rows, self.cols)
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(rows * cols, data.len())?;
        if let Some(bad) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite matrix entry at {bad}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// `A x`
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.cols, x.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `Aᵀ y`
    pub fn matvec_t(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim(self.cols, other.rows)?;
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `A Aᵀ`, exploiting symmetry.
    pub fn gram_rows(&self) -> DenseMatrix {
        let m = self.rows;
        let mut g = DenseMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let v = dot(self.row(i), self.row(j));
                g.data[i * m + j] = v;
                g.data[j * m + i] = v;
            }
        }
        g
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim(self.rows, other.rows)?;
        check_dim(self.cols, other.cols)?;
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }
}

/// Cholesky factor `L` of a Gram matrix `A Aᵀ = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct GramFactorization {
    dimension: usize,
    lower: DenseMatrix,
    // Lᵀ, kept so the backward sweep reads rows
    upper: DenseMatrix,
}

/// Relative pivot floor below which the Gram matrix is declared singular.
pub const GRAM_PIVOT_FLOOR: f64 = 1e-12;

impl GramFactorization {
    /// Factor `A Aᵀ` for a full-row-rank `A`.
    pub fn from_rows(a: &DenseMatrix) -> Result<Self> {
        Self::from_gram(&a.gram_rows())
    }

    /// Factor an already assembled symmetric positive-definite matrix.
    pub fn from_gram(gram: &DenseMatrix) -> Result<Self> {
        let n = gram.rows();
        check_dim(n, gram.cols())?;
        if n == 0 {
            return Err(Error::InvalidInput("empty Gram matrix".into()));
        }
        let max_diag = (0..n).map(|i| gram.get(i, i)).fold(0.0_f64, f64::max);
        let floor = GRAM_PIVOT_FLOOR * max_diag.max(f64::MIN_POSITIVE);
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let lj = l.row(j);
            let pivot = gram.get(j, j) - dot(&lj[..j], &lj[..j]);
            if !(pivot > floor) {
                return Err(Error::RankDeficient { row: j, pivot });
            }
            let d = pivot.sqrt();
            l.set(j, j, d);
            for i in j + 1..n {
                let s = gram.get(i, j) - dot(&l.row(i)[..j], &l.row(j)[..j]);
                l.set(i, j, s / d);
            }
        }
        let upper = l.transpose();
        Ok(Self { dimension: n, lower: l, upper })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lower_factor(&self) -> &DenseMatrix {
        &self.lower
    }

    /// Solve `(A Aᵀ) y = rhs` by forward then backward substitution.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dimension, rhs.len())?;
        let n = self.dimension;
        let l = &self.lower;
        let mut w = vec![0.0; n];
        for i in 0..n {
            let s = rhs[i] - dot(&l.row(i)[..i], &w[..i]);
            w[i] = s / l.get(i, i);
        }
        let u = &self.upper;
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let s = w[i] - dot(&u.row(i)[i + 1..], &y[i + 1..]);
            y[i] = s / u.get(i, i);
        }
        Ok(y)
    }
}

pub fn solve_gram(fact: &GramFactorization, rhs: &[f64]) -> Result<Vec<f64>> {
    fact.solve(rhs)
}

/// Eigenvalues of a real 2×2 block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eig2x2 {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    /// `tr² − 4 det`
    pub discriminant: f64,
}

impl Eig2x2 {
    pub fn spectral_radius(&self) -> f64 {
        self.lambda_plus.norm().max(self.lambda_minus.norm())
    }

    pub fn is_real(&self) -> bool {
        self.discriminant >= 0.0
    }
}

pub fn eig_2x2(m: [[f64; 2]; 2]) -> Result<Eig2x2> {
    if m.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite 2x2 block".into()));
    }
    let tr = m[0][0] + m[1][1];
    // (a-d)^2 + 4bc avoids the cancellation in tr^2 - 4det
    let diff = m[0][0] - m[1][1];
    let disc = diff * diff + 4.0 * m[0][1] * m[1][0];
    let half = 0.5 * tr;
    let (lp, lm) = if disc >= 0.0 {
        let r = 0.5 * disc.sqrt();
        (Complex64::new(half + r, 0.0), Complex64::new(half - r, 0.0))
    } else {
        let r = 0.5 * (-disc).sqrt();
        (Complex64::new(half, r), Complex64::new(half, -r))
    };
    Ok(Eig2x2 { lambda_plus: lp, lambda_minus: lm, discriminant: disc })
}

/// Orthonormal type-II DCT and its transpose (type-III), via a length-2n FFT.
#[derive(Clone)]
pub struct DctPair {
    n: usize,
    forward_fft: Arc<dyn Fft<f64>>,
    inverse_fft: Arc<dyn Fft<f64>>,
    twiddle: Vec<Complex64>,
    weights: Vec<f64>,
}

impl fmt::Debug for DctPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DctPair(n={})", self.n)
    }
}

pub fn dct_pair(n: usize) -> Result<DctPair> {
    if n == 0 {
        return Err(Error::InvalidInput("DCT length must be at least 1".into()));
    }
    let mut planner = FftPlanner::new();
    let len = 2 * n;
    let twiddle = (0..n)
        .map(|k| Complex64::from_polar(1.0, -std::f64::consts::PI * k as f64 / len as f64))
        .collect();
    let mut weights = vec![(2.0 / n as f64).sqrt(); n];
    weights[0] = (1.0 / n as f64).sqrt();
    Ok(DctPair {
        n,
        forward_fft: planner.plan_fft_forward(len),
        inverse_fft: planner.plan_fft_inverse(len),
        twiddle,
        weights,
    })
}

impl DctPair {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `X_k = w_k Σ_j x_j cos(π k (2j+1) / 2n)`
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, x.len())?;
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * self.n];
        for (b, &v) in buf.iter_mut().zip(x) {
            b.re = v;
        }
        self.forward_fft.process(&mut buf);
        Ok((0..self.n)
            .map(|k| self.weights[k] * (self.twiddle[k] * buf[k]).re)
            .collect())
    }

    /// Transpose of [`DctPair::forward`]; equal to its inverse.
    pub fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, y.len())?;
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * self.n];
        for k in 0..self.n {
            buf[k] = self.twiddle[k].conj() * (self.weights[k] * y[k]);
        }
        self.inverse_fft.process(&mut buf);
        Ok(buf[..self.n].iter().map(|c| c.re).collect())
    }
}

/// A linear map `A: ℝⁿ → ℝᵐ` given either densely or as a row-sampled
/// orthonormal DCT, with its adjoint.
#[derive(Clone, Debug)]
pub enum LinearOperator {
    Dense(DenseMatrix),
    /// `A = R·C` (`synthesis == false`) or `A = R·Cᵀ` (`synthesis == true`),
    /// where `C` is the orthonormal DCT-II and `R` keeps the listed rows.
    SampledDct { dct: DctPair, rows: Vec<usize>, synthesis: bool },
}

impl LinearOperator {
    pub fn rows(&self) -> usize {
        match self {
            LinearOperator::Dense(a) => a.rows(),
            LinearOperator::SampledDct { rows, .. } => rows.len(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            LinearOperator::Dense(a) => a.cols(),
            LinearOperator::SampledDct { dct, .. } => dct.len(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            LinearOperator::Dense(a) => a.matvec(x),
            LinearOperator::SampledDct { dct, rows, synthesis } => {
                let full = if *synthesis { dct.adjoint(x)? } else { dct.forward(x)? };
                Ok(rows.iter().map(|&r| full[r]).collect())
            }
        }
    }

    pub fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        match self {
            LinearOperator::Dense(a) => a.matvec_t(y),
            LinearOperator::SampledDct { dct, rows, synthesis } => {
                check_dim(rows.len(), y.len())?;
                let mut full = vec![0.0; dct.len()];
                for (&r, &v) in rows.iter().zip(y) {
                    full[r] += v;
                }
                if *synthesis {
                    dct.forward(&full)
                } else {
                    dct.adjoint(&full)
                }
            }
        }
    }

    /// Assemble `A Aᵀ` column by column.
    pub fn gram(&self) -> Result<DenseMatrix> {
        match self {
            LinearOperator::Dense(a) => Ok(a.gram_rows()),
            _ => {
                let m = self.rows();
                let mut g = DenseMatrix::zeros(m, m);
                let mut e = vec![0.0; m];
                for j in 0..m {
                    e[j] = 1.0;
                    let col = self.apply(&self.adjoint(&e)?)?;
                    e[j] = 0.0;
                    for (i, v) in col.into_iter().enumerate() {
                        g.set(i, j, v);
                    }
                }
                // symmetrize away round-off
                for i in 0..m {
                    for j in 0..i {
                        let v = 0.5 * (g.get(i, j) + g.get(j, i));
                        g.set(i, j, v);
                        g.set(j, i, v);
                    }
                }
                Ok(g)
            }
        }
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        match self {
            LinearOperator::Dense(a) => Ok(a.clone()),
            _ => {
                let (m, n) = (self.rows(), self.cols());
                let mut a = DenseMatrix::zeros(m, n);
                let mut e = vec![0.0; m];
                for i in 0..m {
                    e[i] = 1.0;
                    let row = self.adjoint(&e)?;
                    e[i] = 0.0;
                    for (j, v) in row.into_iter().enumerate() {
                        a.set(i, j, v);
                    }
                }
                Ok(a)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn dense_lu_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
            a.swap(c, p);
            b.swap(c, p);
            for r in c + 1..n {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    #[test]
    fn gram_identity_and_scalar() {
        let f = GramFactorization::from_rows(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(solve_gram(&f, &[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        let two = DenseMatrix::new(2, 2, vec![2.0, 0.0, 0.0, 2.0]).unwrap();
        let f = GramFactorization::from_rows(&two).unwrap();
        let y = f.solve(&[4.0, 8.0]).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-15 && (y[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gram_matches_dense_lu() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = DenseMatrix::from_fn(5, 12, |_, _| rng.sample(StandardNormal));
        let rhs: Vec<f64> = (0..5).map(|_| rng.sample(StandardNormal)).collect();
        let f = GramFactorization::from_rows(&a).unwrap();
        let y = f.solve(&rhs).unwrap();
        let g = a.gram_rows();
        let rows: Vec<Vec<f64>> = (0..5).map(|i| g.row(i).to_vec()).collect();
        let oracle = dense_lu_solve(rows, rhs.clone());
        let err = dist(&y, &oracle) / norm(&oracle);
        assert!(err < 1e-10, "{err}");
        let res = lincomb(1.0, &g.matvec(&y).unwrap(), -1.0, &rhs);
        assert!(norm(&res) / norm(&rhs) < 1e-10);
        let l = f.lower_factor();
        for i in 0..5 {
            for j in i + 1..5 {
                assert_eq!(l.get(i, j), 0.0);
            }
        }
        let rec = l.matmul(&l.transpose()).unwrap();
        assert!(rec.sub(&g).unwrap().frobenius_norm() / g.frobenius_norm() < 1e-10);
    }

    #[test]
    fn gram_rejects_rank_deficient_and_bad_rhs() {
        let a = DenseMatrix::new(2, 3, vec![1.0, 2.0, 3.0, 2.0, 4.0, 6.0]).unwrap();
        assert!(matches!(GramFactorization::from_rows(&a), Err(Error::RankDeficient { .. })));
        let f = GramFactorization::from_rows(&DenseMatrix::identity(3)).unwrap();
        assert!(matches!(f.solve(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dense_matrix_rejects_bad_input() {
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn eig_identity_and_rotation() {
        let e = eig_2x2([[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(e.lambda_plus, Complex64::new(1.0, 0.0));
        assert_eq!(e.lambda_minus, Complex64::new(1.0, 0.0));
        assert_eq!(e.discriminant, 0.0);
        let e = eig_2x2([[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(e.discriminant, -4.0);
        assert_eq!(e.lambda_plus, Complex64::new(0.0, 1.0));
        assert_eq!(e.lambda_minus, Complex64::new(0.0, -1.0));
        assert!(eig_2x2([[f64::INFINITY, 0.0], [0.0, 1.0]]).is_err());
    }

    #[test]
    fn eig_trace_det_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let m: [[f64; 2]; 2] = [
                [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
                [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            ];
            let e = eig_2x2(m).unwrap();
            let tr = m[0][0] + m[1][1];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            let s = e.lambda_plus + e.lambda_minus;
            let p = e.lambda_plus * e.lambda_minus;
            assert!((s.re - tr).abs() < 1e-12 && s.im.abs() < 1e-12);
            assert!((p.re - det).abs() < 1e-12 && p.im.abs() < 1e-12);
            if e.discriminant >= 0.0 {
                assert_eq!(e.lambda_plus.im, 0.0);
                assert_eq!(e.lambda_minus.im, 0.0);
            }
        }
    }

    /// Unshifted QR iteration on the 2×2 block; converges to a quasi-triangular
    /// form whose diagonal (or 2×2 bump) carries the eigenvalues.
    fn qr_oracle(m: [[f64; 2]; 2]) -> (Complex64, Complex64) {
        let mut a = m;
        for _ in 0..20_000 {
            let (x, y) = (a[0][0], a[1][0]);
            let r = x.hypot(y);
            if r == 0.0 {
                break;
            }
            let (c, s) = (x / r, y / r);
            // Q = [[c,-s],[s,c]], R = Qᵀ A, A' = R Q
            let r00 = c * a[0][0] + s * a[1][0];
            let r01 = c * a[0][1] + s * a[1][1];
            let r11 = -s * a[0][1] + c * a[1][1];
            a = [[r00 * c + r01 * s, -r00 * s + r01 * c], [r11 * s, r11 * c]];
        }
        if a[1][0].abs() < 1e-14 {
            let (p, q) = (a[0][0], a[1][1]);
            (Complex64::new(p.max(q), 0.0), Complex64::new(p.min(q), 0.0))
        } else {
            // complex pair: trace/det of the (still rotating) block
            let tr = a[0][0] + a[1][1];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            let im = (det - tr * tr / 4.0).max(0.0).sqrt();
            (Complex64::new(tr / 2.0, im), Complex64::new(tr / 2.0, -im))
        }
    }

    #[test]
    fn eig_matches_qr_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        for _ in 0..2000 {
            let m: [[f64; 2]; 2] = [
                [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
                [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            ];
            let e = eig_2x2(m).unwrap();
            // near-coalesced pairs converge too slowly for unshifted QR
            if e.discriminant.abs() < 1e-3 {
                continue;
            }
            let (op, om) = qr_oracle(m);
            let (cp, cm) = (e.lambda_plus, e.lambda_minus);
            if e.is_real() && (cp.re - cm.re).abs() > 1e-3 && (cp.re.abs() - cm.re.abs()).abs() > 1e-2 {
                assert!((cp - op).norm() < 1e-12, "{m:?} {cp} {op}");
                assert!((cm - om).norm() < 1e-12, "{m:?} {cm} {om}");
                checked += 1;
            } else if !e.is_real() {
                assert!((cp - op).norm() < 1e-12, "{m:?} {cp} {op}");
                checked += 1;
            }
        }
        assert!(checked > 500);
    }

    fn dense_dct(n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |k, j| {
            let w = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
            w * (std::f64::consts::PI * k as f64 * (2 * j + 1) as f64 / (2 * n) as f64).cos()
        })
    }

    #[test]
    fn dct_small_cases() {
        let d = dct_pair(1).unwrap();
        assert!((d.forward(&[5.0]).unwrap()[0] - 5.0).abs() < 1e-15);
        let d4 = dct_pair(4).unwrap();
        let got = d4.forward(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let want = dense_dct(4).column(0);
        assert!(dist(&got, &want) < 1e-14);
        assert!(dct_pair(0).is_err());
    }

    #[test]
    fn dct_matches_dense_matrix_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for &n in &[7, 64, 100] {
            let d = dct_pair(n).unwrap();
            let c = dense_dct(n);
            let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let fx = d.forward(&x).unwrap();
            assert!(dist(&fx, &c.matvec(&x).unwrap()) < 1e-12);
            assert!(dist(&d.adjoint(&x).unwrap(), &c.matvec_t(&x).unwrap()) < 1e-12);
            assert!(dist(&d.adjoint(&fx).unwrap(), &x) < 1e-12);
            assert!((norm(&fx) - norm(&x)).abs() < 1e-12);
        }
    }
}
