use jordan_geom::linalg::{orthonormalize, svd_thin, sym_eigen, Matrix};
use jordan_geom::Error;
use proptest::prelude::*;

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn orthonormalize_spec_examples() {
    let b = orthonormalize(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-10).unwrap();
    assert!(close(b.column(0), &[1.0, 0.0], 0.0) && close(b.column(1), &[0.0, 1.0], 0.0));

    let b = orthonormalize(&[vec![1.0, 0.0], vec![1.0, 1.0]], 1e-10).unwrap();
    assert!(close(b.column(1), &[0.0, 1.0], 1e-15));

    let b = orthonormalize(&[vec![1.0, 0.0], vec![2.0, 0.0]], 1e-10).unwrap();
    assert_eq!(b.dim(), 1);
    assert!(close(b.column(0), &[1.0, 0.0], 0.0));
}

#[test]
fn orthonormalize_errors() {
    assert_eq!(orthonormalize::<f64>(&[], 1e-10), Err(Error::EmptySpan));
    assert_eq!(
        orthonormalize(&[vec![0.0, 0.0, 0.0]], 1e-10),
        Err(Error::ZeroSubspace)
    );
}

#[test]
fn eigen_spec_examples() {
    let (vals, _) = sym_eigen(&Matrix::<f64>::identity(3)).unwrap();
    assert_eq!(vals, vec![1.0; 3]);

    let (vals, vecs) = sym_eigen(&Matrix::diag(&[4.0, 1.0])).unwrap();
    assert_eq!(vals, vec![4.0, 1.0]);
    assert!(close(vecs.column(0), &[1.0, 0.0], 0.0));
    assert!(close(vecs.column(1), &[0.0, 1.0], 0.0));

    let s = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
    let (vals, vecs) = sym_eigen(&s).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!(close(&vals, &[3.0, 1.0], 1e-14));
    assert!(close(vecs.column(0), &[h, h], 1e-14));
    // first significant entry positive
    assert!(close(vecs.column(1), &[h, -h], 1e-14));
}

#[test]
fn eigen_rejects_asymmetric() {
    let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
    assert!(matches!(sym_eigen(&s), Err(Error::Asymmetric(_))));
}

#[test]
fn svd_spec_examples() {
    assert_eq!(svd_thin(&Matrix::<f64>::identity(2)).singular_values, vec![1.0, 1.0]);
    assert_eq!(svd_thin(&Matrix::diag(&[3.0, 0.0])).singular_values, vec![3.0, 0.0]);
    let swap = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    assert!(close(&svd_thin(&swap).singular_values, &[1.0, 1.0], 1e-15));
}

#[test]
fn matrix_rejects_non_finite() {
    assert_eq!(Matrix::new(1, 2, vec![1.0, f64::NAN]), Err(Error::NonFinite));
    assert!(Matrix::new(2, 2, vec![1.0; 3]).is_err());
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<f64>> {
    prop::collection::vec(-3.0..3.0f64, rows * cols).prop_map(move |e| Matrix::new(rows, cols, e).unwrap())
}

fn symmetric() -> impl Strategy<Value = Matrix<f64>> {
    (1usize..=8).prop_flat_map(|n| matrix(n, n)).prop_map(|a| {
        let t = a.transpose();
        let n = a.rows();
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] = 0.5 * (a[(i, j)] + t[(i, j)]);
            }
        }
        s
    })
}

fn reconstruct(vals: &[f64], vecs: &Matrix<f64>) -> Matrix<f64> {
    vecs.matmul(&Matrix::diag(vals)).unwrap().matmul(&vecs.transpose()).unwrap()
}

proptest! {
    #[test]
    fn orthonormalize_is_idempotent(m in (1usize..=6).prop_flat_map(|d| (1usize..=d).prop_flat_map(move |k| matrix(k, d)))) {
        let rows: Vec<Vec<f64>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        if let Ok(b) = orthonormalize(&rows, 1e-8) {
            let again = orthonormalize(b.columns(), 1e-8).unwrap();
            prop_assert_eq!(again.dim(), b.dim());
            for (x, y) in again.columns().iter().zip(b.columns()) {
                prop_assert!(close(x, y, 1e-14));
            }
            prop_assert!(b.orthonormality_error() < 1e-10);
        }
    }

    #[test]
    fn eigen_reconstructs(s in symmetric()) {
        let (vals, vecs) = sym_eigen(&s).unwrap();
        let err = reconstruct(&vals, &vecs.to_matrix()).sub(&s).unwrap().frobenius_norm();
        prop_assert!(err <= 1e-11 * s.frobenius_norm().max(1e-300));
        prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        for (k, v) in vecs.columns().iter().enumerate() {
            let sv = s.matvec(v).unwrap();
            for (a, b) in sv.iter().zip(v) {
                prop_assert!((a - vals[k] * b).abs() <= 1e-12 * s.frobenius_norm());
            }
        }
    }

    #[test]
    fn svd_reconstructs(m in (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| matrix(r, c))) {
        let s = svd_thin(&m);
        let rebuilt = s.left.to_matrix()
            .matmul(&Matrix::diag(&s.singular_values)).unwrap()
            .matmul(&s.right.to_matrix().transpose()).unwrap();
        prop_assert!(rebuilt.sub(&m).unwrap().frobenius_norm() <= 1e-12 * m.frobenius_norm().max(1.0));
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.singular_values.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn svd_of_orthonormal_columns_is_one(m in (2usize..=7).prop_flat_map(|d| (1usize..d).prop_flat_map(move |k| matrix(k, d)))) {
        let rows: Vec<Vec<f64>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        if let Ok(b) = orthonormalize(&rows, 1e-6) {
            let s = svd_thin(&b.to_matrix());
            prop_assert!(s.singular_values.iter().all(|x| (x - 1.0).abs() < 1e-12));
        }
    }
}
