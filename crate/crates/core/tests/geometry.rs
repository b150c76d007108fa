use std::f64::consts::{FRAC_PI_2, SQRT_2};

use jordan_geom::geometry::{
    cja_check, coassociative_frame, connection_coeffs, frame_at, mean_curvature, rt_tensor, sample_params,
    ut_tensor, v_from_jacobian, v_function, verify_identity, w_function, AngleStructure, FdConfig, FramedPoint,
    IdentityId, Immersion,
};
use jordan_geom::linalg::{dot, norm, sub};
use jordan_geom::models::{self, lo_cone_frame, Affine, CatenoidCrossR, Circle, LoCone, LoGraph, ModelKind, ModelSpec};
use jordan_geom::{Error, Matrix, Quaternion, Subspace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 77;

fn fd() -> FdConfig {
    FdConfig::default()
}

fn framed(imm: &dyn Immersion, u: &[f64]) -> FramedPoint {
    frame_at(imm, u, &fd(), &imm.reference_plane()).unwrap()
}

fn all_models() -> Vec<Box<dyn Immersion + Send>> {
    ModelKind::ALL
        .iter()
        .map(|&k| models::build(&ModelSpec::new(k)).unwrap())
        .collect()
}

fn lo_cone() -> LoCone {
    LoCone::new(Quaternion::i(), Quaternion::one()).unwrap()
}

fn lo_graph() -> LoGraph {
    LoGraph::new(Quaternion::i()).unwrap()
}

fn sig_close(got: &[(f64, usize)], want: &[(f64, usize)], tol: f64) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(a, b)| a.1 == b.1 && (a.0 - b.0).abs() <= tol)
}

/// `x ↦ x` placed in the given coordinates of ℝ⁷, measured against Im ℍ.
struct Plane4 {
    axes: [usize; 4],
}

impl Immersion for Plane4 {
    fn name(&self) -> &str {
        "plane4"
    }
    fn param_dim(&self) -> usize {
        4
    }
    fn ambient_dim(&self) -> usize {
        7
    }
    fn evaluate(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; 7];
        for (a, x) in self.axes.iter().zip(u) {
            out[*a] = *x;
        }
        out
    }
    fn contains(&self, u: &[f64]) -> bool {
        u.iter().all(|x| x.abs() <= 1.0)
    }
    fn sample_param(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..4).map(|_| rng.random_range(-0.9..0.9)).collect()
    }
    fn reference_plane(&self) -> Subspace {
        Subspace::coordinate(7, &[0, 1, 2])
    }
}

/// `(x, y) ↦ (x, x, 0)`: rank one everywhere.
struct Folded;

impl Immersion for Folded {
    fn name(&self) -> &str {
        "folded"
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn evaluate(&self, u: &[f64]) -> Vec<f64> {
        vec![u[0] + u[1], u[0] + u[1], 0.0]
    }
    fn contains(&self, _u: &[f64]) -> bool {
        true
    }
    fn sample_param(&self, _rng: &mut ChaCha8Rng) -> Vec<f64> {
        vec![0.0, 0.0]
    }
    fn reference_plane(&self) -> Subspace {
        Subspace::coordinate(3, &[2])
    }
}

#[test]
fn frames_are_consistent_on_every_model() {
    for imm in all_models() {
        for u in sample_params(imm.as_ref(), 8, SEED) {
            let fp = framed(imm.as_ref(), &u);
            assert!(fp.h_asymmetry() < 1e-6, "{}: asymmetry {}", imm.name(), fp.h_asymmetry());
            for e in &fp.tangent_frame {
                for nu in &fp.normal_frame {
                    assert!(dot(e, nu).abs() < 1e-10, "{}", imm.name());
                }
            }
            let all: Vec<&Vec<f64>> = fp.tangent_frame.iter().chain(&fp.normal_frame).collect();
            assert_eq!(all.len(), imm.ambient_dim());
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(a, b) - want).abs() < 1e-9, "{}", imm.name());
                }
            }
            if let Ok(v) = v_function(&fp) {
                assert!((v * w_function(&fp) - 1.0).abs() < 1e-10, "{}", imm.name());
            }
            // Weingarten: ⟨B(e_i, e_j), ν_α⟩ = h_{α,ij} = ⟨A^{ν_α} e_i, e_j⟩
            for (al, nu) in fp.normal_frame.iter().enumerate() {
                for (i, ei) in fp.tangent_frame.iter().enumerate() {
                    for (j, ej) in fp.tangent_frame.iter().enumerate() {
                        let h = fp.h[al][(i, j)];
                        assert!((dot(&fp.b(ei, ej), nu) - h).abs() < 1e-12);
                        assert!((dot(&fp.shape(nu, ei), ej) - h).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn halving_the_second_step_barely_moves_b() {
    let coarse = fd();
    let fine = FdConfig {
        step_second: coarse.step_second / 2.0,
        ..coarse
    };
    for imm in all_models() {
        let q0 = imm.reference_plane();
        for u in sample_params(imm.as_ref(), 4, SEED + 1) {
            let a = frame_at(imm.as_ref(), &u, &coarse, &q0).unwrap();
            let b = frame_at(imm.as_ref(), &u, &fine, &q0).unwrap();
            // compare B as an ambient bilinear map so the frame choice drops out
            for x in &a.tangent_frame {
                for y in &a.tangent_frame {
                    let d = norm(&sub(&a.b(x, y), &b.b(x, y)));
                    assert!(d < 1e-5, "{}: {d}", imm.name());
                }
            }
        }
    }
}

#[test]
fn affine_graphs_are_flat() {
    let plane = Affine::new(Matrix::zeros(2, 3));
    for u in sample_params(&plane, 5, SEED) {
        let fp = framed(&plane, &u);
        assert!(fp.h.iter().all(|h| h.max_abs() < 1e-9));
        assert!(norm(&mean_curvature(&fp)) < 1e-9);
    }
    // tilted planes: the second difference only sees rounding, about eps·|F|/h²
    let slope = Matrix::from_rows(&[vec![0.3, -1.2, 0.5], vec![2.0, 0.1, -0.4]]).unwrap();
    let imm = Affine::new(slope);
    for u in sample_params(&imm, 5, SEED) {
        let fp = framed(&imm, &u);
        assert!(fp.h.iter().all(|h| h.max_abs() < 1e-7));
        assert!(norm(&mean_curvature(&fp)) < 1e-7);
    }
}

#[test]
fn circle_has_unit_curvature() {
    for u in sample_params(&Circle, 10, SEED) {
        let fp = framed(&Circle, &u);
        let nonzero: Vec<f64> = fp.h.iter().map(|h| h[(0, 0)]).filter(|x| x.abs() > 1e-6).collect();
        assert_eq!(nonzero.len(), 1);
        assert!((nonzero[0].abs() - 1.0).abs() < 1e-6);
        assert!((norm(&mean_curvature(&fp)) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn minimal_models_have_vanishing_mean_curvature() {
    let g = lo_graph();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..10 {
        // |x| = 1
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = norm(&x);
        let x: Vec<f64> = x.iter().map(|c| c / n).collect();
        assert!(norm(&mean_curvature(&framed(&g, &x))) < 1e-5);
    }
    for u in sample_params(&CatenoidCrossR, 10, SEED) {
        assert!(norm(&mean_curvature(&framed(&CatenoidCrossR, &u))) < 1e-5);
    }
}

#[test]
fn v_function_examples() {
    let zero = Affine::new(Matrix::zeros(2, 2));
    assert_eq!(v_function(&framed(&zero, &[0.1, 0.2])).unwrap(), 1.0);

    let line = Affine::new(Matrix::from_rows(&[vec![1.0]]).unwrap());
    assert!((v_function(&framed(&line, &[0.3])).unwrap() - SQRT_2).abs() < 1e-12);

    let cone = lo_cone();
    for u in sample_params(&cone, 100, SEED) {
        assert!((v_function(&framed(&cone, &u)).unwrap() - 9.0).abs() < 1e-6);
    }

    // circle: a normal angle is π/2
    assert_eq!(v_function(&framed(&Circle, &[0.4])), Err(Error::VInfinite));
}

#[test]
fn v_from_jacobian_examples() {
    assert_eq!(v_from_jacobian(&Matrix::zeros(3, 2)).unwrap(), 1.0);
    let g = Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
    assert!((v_from_jacobian(&g).unwrap() - SQRT_2).abs() < 1e-15);
}

/// Jacobian of η by Richardson-extrapolated central differences.
fn eta_jacobian(x: &[f64]) -> Matrix {
    let eps = Quaternion::i();
    let f = |y: &[f64]| {
        let q = models::eta(Quaternion::new(y[0], y[1], y[2], y[3]), eps).unwrap();
        [q.x, q.y, q.z]
    };
    let h = 1e-3;
    let mut m = Matrix::zeros(3, 4);
    for j in 0..4 {
        let diff = |s: f64| {
            let mut p = x.to_vec();
            let mut q = x.to_vec();
            p[j] += s;
            q[j] -= s;
            let (a, b) = (f(&p), f(&q));
            [0, 1, 2].map(|i| (a[i] - b[i]) / (2.0 * s))
        };
        let (d1, d2) = (diff(h), diff(2.0 * h));
        for i in 0..3 {
            m[(i, j)] = (4.0 * d1[i] - d2[i]) / 3.0;
        }
    }
    m
}

#[test]
fn v_agrees_with_jacobian_formula_on_graphs() {
    let slope = Matrix::from_rows(&[vec![0.7, -0.2], vec![0.4, 1.5], vec![-0.3, 0.9]]).unwrap();
    let affine = Affine::new(slope.clone());
    for u in sample_params(&affine, 5, SEED) {
        let v = v_function(&framed(&affine, &u)).unwrap();
        assert!((v - v_from_jacobian(&slope).unwrap()).abs() < 1e-8);
    }
    let g = lo_graph();
    for u in sample_params(&g, 10, SEED) {
        let v = v_function(&framed(&g, &u)).unwrap();
        let vj = v_from_jacobian(&eta_jacobian(&u)).unwrap();
        assert!((v - vj).abs() < 1e-8, "{v} vs {vj}");
        assert!((v - 9.0).abs() < 1e-6);
    }
}

#[test]
fn cone_planes_are_constant_along_rays() {
    let cone = lo_cone();
    for u in sample_params(&cone, 10, SEED) {
        let a = framed(&cone, &u);
        for r in [0.15, 0.8, 1.9] {
            let b = framed(&cone, &[u[0], u[1], u[2], r]);
            assert!(a.tangent.projector_distance(&b.tangent).unwrap() < 1e-8);
            assert!(a.normal.projector_distance(&b.normal).unwrap() < 1e-8);
        }
    }
}

#[test]
fn frame_errors() {
    let cone = lo_cone();
    assert!(matches!(
        frame_at(&cone, &[0.0, 0.0, 0.0, 0.1], &fd(), &cone.reference_plane()),
        Err(Error::OutsideDomain(_))
    ));
    assert!(matches!(
        frame_at(&cone, &[0.0, 0.0, 1.0], &fd(), &cone.reference_plane()),
        Err(Error::DimensionMismatch { .. })
    ));
    assert_eq!(
        frame_at(&Folded, &[0.0, 0.0], &fd(), &Folded.reference_plane()).unwrap_err(),
        Error::ImmersionSingular
    );
}

#[test]
fn connection_examples() {
    let affine = Affine::new(Matrix::from_rows(&[vec![0.5, 1.0], vec![-2.0, 0.3]]).unwrap());
    let fp = framed(&affine, &[0.2, -0.4]);
    let c = connection_coeffs(&affine, &fp, &fd()).unwrap();
    let flat = c.gamma.iter().chain(&c.gamma_bar).flatten().flatten();
    assert!(flat.into_iter().all(|x| *x == 0.0));

    let cone = lo_cone();
    for u in sample_params(&cone, 10, SEED) {
        let fp = framed(&cone, &u);
        let c = connection_coeffs(&cone, &fp, &fd()).unwrap();
        for g in &c.gamma {
            for (j, row) in g.iter().enumerate() {
                assert!(row[j].abs() < 1e-5);
            }
        }
        assert!(c.antisymmetry_defect() < 1e-5);
    }

    let q = models::QuadraticGraph;
    let fp = framed(&q, &[0.1, 0.2]);
    assert_eq!(connection_coeffs(&q, &fp, &fd()), Err(Error::NoFrameField));
}

/// Groups unit vectors by their angle against `q0` and returns the spans.
fn classes_by_angle(vs: &[Vec<f64>], q0: &Subspace) -> Vec<(f64, Subspace)> {
    let mut groups: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
    for v in vs {
        let a = norm(&q0.project(v).unwrap()).min(1.0).acos();
        match groups.iter_mut().find(|(b, _)| (a - b).abs() < 1e-6) {
            Some((_, g)) => g.push(v.clone()),
            None => groups.push((a, vec![v.clone()])),
        }
    }
    groups.sort_by(|x, y| x.0.total_cmp(&y.0));
    groups
        .into_iter()
        .map(|(a, g)| (a, Subspace::from_vectors(&g).unwrap()))
        .collect()
}

fn same_classes(a: &[Vec<f64>], b: &[Vec<f64>], q0: &Subspace, tol: f64) {
    let ca = classes_by_angle(a, q0);
    let cb = classes_by_angle(b, q0);
    assert_eq!(ca.len(), cb.len());
    for ((x, s), (y, t)) in ca.iter().zip(&cb) {
        assert!((x - y).abs() < 1e-6);
        assert_eq!(s.dim(), t.dim());
        let d = s.projector_distance(t).unwrap();
        assert!(d < tol, "class at {x}: {d}");
    }
}

#[test]
fn coassociative_frame_matches_cone_frame() {
    let cone = lo_cone();
    let fp = framed(&cone, &[0.0, 0.0, 0.0, 1.0]);
    let cf = coassociative_frame(&fp).unwrap();
    let analytic = lo_cone_frame(Quaternion::one(), 1.0, Quaternion::i()).unwrap();
    let imh = cone.reference_plane();
    let he = Subspace::coordinate(7, &[3, 4, 5, 6]);
    same_classes(&cf.normal, &analytic.normal, &imh, 1e-8);
    same_classes(&cf.tangent, &analytic.tangent, &he, 1e-8);
    assert_eq!(cf.theta.len(), 3);
    let t = &cf.theta;
    assert!((t[2] - t[0] - t[1]).abs() < 1e-8);
}

#[test]
fn coassociative_frame_relates_tangent_and_normal_through_phi() {
    let cone = lo_cone();
    for u in sample_params(&cone, 5, SEED) {
        let fp = framed(&cone, &u);
        let cf = coassociative_frame(&fp).unwrap();
        let st = AngleStructure::new(&fp).unwrap();
        for al in 0..3 {
            let e = &cf.tangent[al];
            let nu = &cf.normal[al];
            let theta = norm(&fp.reference_perp.project(e).unwrap()).min(1.0).acos();
            let phi = st.phi(theta, e).unwrap();
            let plus = norm(&sub(&phi, nu));
            let minus = norm(&sub(&phi, &nu.iter().map(|x| -x).collect::<Vec<_>>()));
            if al < 2 {
                assert!(plus < 1e-8, "alpha {al}: {plus}");
            } else {
                assert!(plus.min(minus) < 1e-8, "alpha {al}: {plus} {minus}");
            }
        }
    }
}

#[test]
fn coassociative_frame_of_the_octonion_plane() {
    let he = Plane4 { axes: [3, 4, 5, 6] };
    let fp = framed(&he, &[0.1, 0.2, 0.3, 0.4]);
    let cf = coassociative_frame(&fp).unwrap();
    assert!(cf.theta.is_empty());
    let e4 = &cf.tangent[3];
    assert!(norm(&e4[..3]) < 1e-12);
    for nu in &cf.normal {
        assert!(norm(&nu[3..]) < 1e-12);
    }
}

#[test]
fn coassociative_frame_on_the_eta_graph() {
    let g = lo_graph();
    for u in sample_params(&g, 20, SEED) {
        let fp = framed(&g, &u);
        let cf = coassociative_frame(&fp).unwrap();
        for e in &cf.tangent {
            assert!(norm(&fp.tangent.reject(e).unwrap()) < 1e-8);
        }
        for nu in &cf.normal {
            assert!(norm(&fp.normal.reject(nu).unwrap()) < 1e-8);
        }
    }
}

#[test]
fn coassociative_frame_rejects_other_planes() {
    // normal space span{i, j, e} is not associative
    let bad = Plane4 { axes: [2, 4, 5, 6] };
    let fp = framed(&bad, &[0.0; 4]);
    assert_eq!(coassociative_frame(&fp), Err(Error::NotCoassociative));
    let fp = framed(&Circle, &[0.0]);
    assert!(matches!(coassociative_frame(&fp), Err(Error::Inapplicable(_))));
}

#[test]
fn cja_examples() {
    let cone = lo_cone();
    let r = cja_check(&cone, &cone.reference_plane(), 20, SEED, 1e-6, &fd()).unwrap();
    assert!(r.is_cja);
    let s6 = 6f64.sqrt() / 6.0;
    assert!(sig_close(&r.reference_normal, &[((2.0f64 / 3.0).acos(), 1), (s6.acos(), 2)], 1e-8));
    assert_eq!((r.g_n, r.g_t, r.r), (2, 3, 3));
    assert!(r.samples.iter().all(|s| (s.v.unwrap() - 9.0).abs() < 1e-6));

    let cat = CatenoidCrossR;
    let r = cja_check(&cat, &cat.reference_plane(), 20, SEED, 1e-6, &fd()).unwrap();
    assert!(r.is_cja);
    assert!(sig_close(&r.reference_normal, &[(0.0, 1), (FRAC_PI_2, 1)], 1e-8));
    assert!(sig_close(&r.reference_tangent, &[(0.0, 2), (FRAC_PI_2, 1)], 1e-8));

    let r = cja_check(&Circle, &Circle.reference_plane(), 10, SEED, 1e-6, &fd()).unwrap();
    assert!(r.is_cja);
    assert!(sig_close(&r.reference_normal, &[(0.0, 1), (FRAC_PI_2, 1)], 1e-8));
    assert!(sig_close(&r.reference_tangent, &[(FRAC_PI_2, 1)], 1e-8));

    let cyl = models::Cylinder;
    let r = cja_check(&cyl, &cyl.reference_plane(), 10, SEED, 1e-6, &fd()).unwrap();
    assert!(r.is_cja);
    assert!(sig_close(&r.reference_normal, &[(FRAC_PI_2, 1)], 1e-8));
    assert!(sig_close(&r.reference_tangent, &[(0.0, 1), (FRAC_PI_2, 1)], 1e-8));

    let q = models::QuadraticGraph;
    let r = cja_check(&q, &q.reference_plane(), 10, SEED, 1e-6, &fd()).unwrap();
    assert!(!r.is_cja);
    assert!(r.max_deviation > 1e-2);

    assert!(matches!(
        cja_check(&q, &q.reference_plane(), 1, SEED, 1e-6, &fd()),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn cja_reports_are_reproducible() {
    let cone = lo_cone();
    let a = cja_check(&cone, &cone.reference_plane(), 16, 5, 1e-6, &fd()).unwrap();
    let b = cja_check(&cone, &cone.reference_plane(), 16, 5, 1e-6, &fd()).unwrap();
    assert_eq!(a, b);
    let c = cja_check(&cone, &cone.reference_plane(), 16, 6, 1e-6, &fd()).unwrap();
    assert_ne!(a.samples[0].param, c.samples[0].param);
}

#[test]
fn identity_examples() {
    let plane = Affine::new(Matrix::zeros(2, 2));
    let r = verify_identity(&plane, IdentityId::NullPhi, &[0.1, 0.1], &fd()).unwrap();
    assert_eq!(r.residual, 0.0);
    assert!(r.pass);
    let tilted = Affine::new(Matrix::from_rows(&[vec![0.5, 1.0], vec![-2.0, 0.3]]).unwrap());
    let r = verify_identity(&tilted, IdentityId::NullPhi, &[0.1, 0.1], &fd()).unwrap();
    assert!(r.residual < 1e-7);

    let cone = lo_cone();
    let u = [0.0, 0.0, 0.0, 1.0];
    let r = verify_identity(&cone, IdentityId::CoassocH, &u, &fd()).unwrap();
    assert!(r.residual < 1e-5 && r.pass);
    let r = verify_identity(&cone, IdentityId::Constraint, &u, &fd()).unwrap();
    assert!(r.residual < 1e-4 && r.pass);

    let r = verify_identity(&Circle, IdentityId::NullBoundary, &[1.0], &fd()).unwrap();
    assert!(r.residual < 1e-6);

    assert!(matches!(
        verify_identity(&Circle, IdentityId::CoassocH, &[1.0], &fd()),
        Err(Error::Inapplicable(_))
    ));
    assert_eq!(
        verify_identity(&models::QuadraticGraph, IdentityId::STangent, &[0.1, 0.1], &fd()).unwrap_err(),
        Error::NoFrameField
    );
}

#[test]
fn every_identity_holds_on_the_cone() {
    let cone = lo_cone();
    for u in sample_params(&cone, 5, SEED) {
        for id in IdentityId::ALL {
            let r = verify_identity(&cone, id, &u, &fd()).unwrap();
            assert!(r.pass, "{id}: {}", r.residual);
            assert_eq!(r.pass, r.residual <= r.tolerance);
        }
    }
}

#[test]
fn curvature_tensors_vanish_on_repeated_arguments() {
    let cone = lo_cone();
    let fp = framed(&cone, &[0.2, -0.1, 0.3, 0.7]);
    let st = AngleStructure::new(&fp).unwrap();
    let theta = (6f64.sqrt() / 6.0).acos();
    let sigma = (2.0f64 / 3.0).acos();
    let class = st.tangent_class(theta).unwrap();
    assert_eq!(class.basis.len(), 2);
    let (v, w) = (&class.basis[0], &class.basis[1]);
    for s in [theta, sigma] {
        assert!(rt_tensor(&fp, &st, theta, s, [v, v, w, v]).unwrap().abs() < 1e-12);
        assert!(ut_tensor(&fp, &st, theta, s, [v, v, w, v]).unwrap().abs() < 1e-12);
    }
    // one-dimensional tangent class
    let e1 = &st.tangent_class(sigma).unwrap().basis[0];
    assert!(rt_tensor(&fp, &st, sigma, theta, [e1, e1, e1, e1]).unwrap().abs() < 1e-12);
    // a vector from another class is rejected
    assert!(matches!(
        rt_tensor(&fp, &st, theta, sigma, [v, e1, v, w]),
        Err(Error::NotInAngleSpace(_))
    ));
}
