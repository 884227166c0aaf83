//! On subspaces every map is linear; these tests build the matrices by hand
//! from the projectors and compare against the iteration code and the
//! closed-form block spectra.

use proptest::prelude::*;
use relaxproj::linalg::{self, eig_2x2, DenseMatrix};
use relaxproj::operators::{apply_a, apply_b, apply_f, step_gcarpa, step_grap, GrapParams, IterateState};
use relaxproj::problems::make_subspace_instance;
use relaxproj::spectral::{
    angle_to_t, block_eigs, critical_gamma, discriminant, minimax_gamma, subdominant_modulus, vertex, PrincipalAngleSpec,
};
use relaxproj::{ConvexSet, SolverParams};

fn lin(a: f64, p: &DenseMatrix, b: f64, q: &DenseMatrix) -> DenseMatrix {
    let n = p.rows();
    DenseMatrix::from_fn(n, n, |i, j| a * p.get(i, j) + b * q.get(i, j))
}

/// `(1−θ)I + θ(2P − I)`
fn relaxed_reflector(p: &DenseMatrix, theta: f64) -> DenseMatrix {
    let id = DenseMatrix::identity(p.rows());
    lin(1.0 - 2.0 * theta, &id, 2.0 * theta, p)
}

fn a_matrix(px: &DenseMatrix, py: &DenseMatrix, th: f64, et: f64) -> DenseMatrix {
    let r = relaxed_reflector(py, et).matmul(&relaxed_reflector(px, th)).unwrap();
    lin(0.5, &DenseMatrix::identity(px.rows()), 0.5, &r)
}

fn b_matrix(px: &DenseMatrix, py: &DenseMatrix, th: f64) -> DenseMatrix {
    py.matmul(&relaxed_reflector(px, th)).unwrap()
}

fn f_matrix(px: &DenseMatrix, py: &DenseMatrix, p: &SolverParams) -> DenseMatrix {
    let mixed = lin(1.0 - p.gamma(), &a_matrix(px, py, p.theta(), p.eta()), p.gamma(), &b_matrix(px, py, p.theta()));
    lin(1.0 - p.mu(), &DenseMatrix::identity(px.rows()), p.mu(), &mixed)
}

fn params() -> impl Strategy<Value = SolverParams> {
    (0.0..0.99f64, 0.05..=1.0f64, 0.05..=1.0f64, 0.1..1.0f64)
        .prop_map(|(g, th, et, s)| SolverParams::new(s * 2.0 / (1.0 + g), g, th, et).unwrap())
}

fn instance() -> impl Strategy<Value = (usize, f64)> {
    (1usize..5, 0.05..1.4f64)
}

/// `X = span{e₁}` and `Y = span{(cos φ, sin φ)}`.
fn lines(phi: f64) -> (ConvexSet, ConvexSet, DenseMatrix, DenseMatrix) {
    let x = ConvexSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
    let y = ConvexSet::hyperplane(vec![-phi.sin(), phi.cos()], 0.0).unwrap();
    let px = DenseMatrix::new(2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
    let (c, s) = (phi.cos(), phi.sin());
    let py = DenseMatrix::new(2, 2, vec![c * c, c * s, c * s, s * s]).unwrap();
    (x, y, px, py)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maps_match_dense_oracles((p, phi) in instance(), sp in params(), z in prop::collection::vec(-2.0..2.0f64, 8)) {
        let inst = make_subspace_instance(2 * p, p, phi).unwrap();
        let (px, py) = inst.projectors();
        let z = &z[..2 * p];
        let (th, et) = (sp.theta(), sp.eta());
        let tol = 1e-13;
        let a = apply_a(&inst.x, &inst.y, th, et, z).unwrap();
        prop_assert!(linalg::dist(&a, &a_matrix(&px, &py, th, et).matvec(z).unwrap()) <= tol);
        let b = apply_b(&inst.x, &inst.y, th, z).unwrap();
        prop_assert!(linalg::dist(&b, &b_matrix(&px, &py, th).matvec(z).unwrap()) <= tol);
        let fz = f_matrix(&px, &py, &sp).matvec(z).unwrap();
        prop_assert!(linalg::dist(&apply_f(&inst.x, &inst.y, &sp, z).unwrap(), &fz) <= tol);
        let s = step_gcarpa(&inst.x, &inst.y, &sp, &IterateState::new(z.to_vec())).unwrap();
        prop_assert!(linalg::dist(&s.z, &fz) <= tol);
    }

    #[test]
    fn grap_matches_dense_oracle((p, phi) in instance(), al in 0.05..=1.0f64, be in 0.05..1.95f64, z in prop::collection::vec(-2.0..2.0f64, 8)) {
        let inst = make_subspace_instance(2 * p, p, phi).unwrap();
        let (px, py) = inst.projectors();
        let id = DenseMatrix::identity(2 * p);
        let t = lin(1.0 - be, &id, be, &py).matmul(&lin(1.0 - be, &id, be, &px)).unwrap();
        let m = lin(1.0 - al, &id, al, &t);
        let z = &z[..2 * p];
        let got = step_grap(&inst.x, &inst.y, GrapParams::new(al, be).unwrap(), z).unwrap();
        prop_assert!(linalg::dist(&got, &m.matvec(z).unwrap()) <= 1e-13);
    }

    #[test]
    fn block_spectrum_matches_plane_operator(phi in 0.02..1.55f64, sp in params()) {
        let (_, _, px, py) = lines(phi);
        let f = f_matrix(&px, &py, &sp);
        let num = eig_2x2([[f.get(0, 0), f.get(0, 1)], [f.get(1, 0), f.get(1, 1)]]).unwrap();
        let closed = block_eigs(angle_to_t(phi), &sp).unwrap();
        let sum = (num.lambda_plus + num.lambda_minus - closed.lambda_plus - closed.lambda_minus).norm();
        let prod = (num.lambda_plus * num.lambda_minus - closed.lambda_plus * closed.lambda_minus).norm();
        prop_assert!(sum <= 1e-12 && prod <= 1e-12, "sum {sum:e}, prod {prod:e}");
    }

    #[test]
    fn discriminant_has_vertex_form(t in 0.0..=1.0f64, sp in params()) {
        let (tau, dmin) = vertex(&sp);
        let k = sp.gamma() + (1.0 - sp.gamma()) * sp.eta();
        let want = 4.0 * (sp.theta() * k).powi(2) * (t - tau).powi(2) + dmin;
        prop_assert!((discriminant(t, &sp) - want).abs() <= 1e-12);
    }

    #[test]
    fn critical_weights_zero_the_discriminant(t in 0.01..0.99f64, th in 0.5..=1.0f64, et in 0.5..=1.0f64) {
        for c in critical_gamma(t, th, et).unwrap().admissible {
            let sp = SolverParams::new(1.0, c.gamma, th, et).unwrap();
            prop_assert!(discriminant(t, &sp).abs() <= 1e-10, "gamma {}", c.gamma);
            let e = block_eigs(t, &sp).unwrap();
            prop_assert!((e.lambda_plus.re - c.lambda_star).abs() <= 1e-7);
        }
    }
}

#[test]
fn principal_angles_are_recovered_from_projectors() {
    let inst = make_subspace_instance(20, 10, 0.3).unwrap();
    let (px, py) = inst.projectors();
    let m = px.matmul(&py).unwrap().matmul(&px).unwrap();
    for (i, &phi) in inst.spec.angles().iter().enumerate() {
        assert!((m.get(i, i) - phi.cos().powi(2)).abs() < 1e-14);
    }
    assert!((inst.spec.angles()[0] - 0.3).abs() < 1e-15);
}

#[test]
fn carpa_critical_weight_has_closed_form() {
    for i in 1..50 {
        let t = i as f64 / 100.0;
        let root = (t * (1.0 - t)).sqrt();
        let set = critical_gamma(t, 1.0, 1.0).unwrap();
        assert!(
            set.admissible.iter().any(|c| (c.gamma - 2.0 * root).abs() < 1e-12 && (c.lambda_star - (1.0 - t - root)).abs() < 1e-12),
            "t = {t}: {set:?}"
        );
    }
}

#[test]
fn subdominant_modulus_bounds_observed_contraction() {
    let inst = make_subspace_instance(40, 20, 0.25).unwrap();
    let (px, py) = inst.projectors();
    let sp = SolverParams::new(1.0, 0.3, 0.8, 0.9).unwrap();
    let xi = subdominant_modulus(&inst.spec, &sp).unwrap();
    let f = f_matrix(&px, &py, &sp);
    let mut z: Vec<f64> = (0..40).map(|i| ((i * 7 % 11) as f64) - 5.0).collect();
    let mut norms = Vec::new();
    for _ in 0..400 {
        z = f.matvec(&z).unwrap();
        norms.push(linalg::norm(&z));
    }
    let rate = (norms[399] / norms[299]).powf(1.0 / 100.0);
    assert!(rate <= xi + 1e-3 && rate >= xi - 2e-2, "rate {rate} vs {xi}");
}

#[test]
fn minimax_matches_dense_scan_at_endpoints() {
    let spec = PrincipalAngleSpec::schedule(100, 50, 20f64.to_radians()).unwrap();
    let choice = minimax_gamma(spec.t_friedrichs(), spec.t_largest(), 0.7, 0.7, 1.0).unwrap();
    let worst = |g: f64| {
        let p = SolverParams::new(1.0, g, 0.7, 0.7).unwrap();
        subdominant_modulus(&spec, &p).unwrap()
    };
    let scan = (0..999).map(|i| worst(i as f64 / 1000.0)).fold(f64::INFINITY, f64::min);
    assert!(worst(choice.gamma) <= scan + 1e-9, "{} vs {scan}", worst(choice.gamma));
}
