//! Small dense kernels: orthonormalization, symmetric eigendecomposition and
//! thin SVD, all deterministic and sized for dimensions up to about 16.

use std::cmp::Ordering;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled<T: Scalar>(alpha: T, x: &[T]) -> Vec<T> {
    x.iter().map(|&v| alpha * v).collect()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn unit_vector<T: Scalar>(dim: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); dim];
    v[i] = T::one();
    v
}

/// Dense row-major matrix with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, entries)
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
            for (i, &v) in c.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite);
                }
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn frobenius_norm(&self) -> T {
        norm(&self.entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.entries.len(),
                found: other.entries.len(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: sub(&self.entries, &other.entries),
        })
    }

    pub fn scale(&self, alpha: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: scaled(alpha, &self.entries),
        }
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Largest `|S_ij − S_ji|`, or an error for non-square input.
    pub fn asymmetry(&self) -> Result<T> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        Ok(worst)
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.cols,
            });
        }
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r1, &r2| {
                    a[(r1, col)]
                        .abs()
                        .partial_cmp(&a[(r2, col)].abs())
                        .unwrap_or(Ordering::Equal)
                })
                .unwrap_or(col);
            if a[(pivot, col)].abs() <= T::epsilon() * scale * T::lit(n as f64) {
                return Err(Error::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.entries.swap(pivot * n + j, col * n + j);
                    inv.entries.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let (av, iv) = (a[(col, j)], inv[(col, j)]);
                    a[(r, j)] -= f * av;
                    inv[(r, j)] -= f * iv;
                }
            }
        }
        Ok(inv)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.entries[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.entries[i * self.cols + j]
    }
}

/// Orthonormal vectors in a common ambient space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalBasis<T> {
    ambient_dim: usize,
    columns: Vec<Vec<T>>,
}

impl<T: Scalar> OrthonormalBasis<T> {
    /// Wraps columns that the caller guarantees to be orthonormal.
    pub(crate) fn from_orthonormal(ambient_dim: usize, columns: Vec<Vec<T>>) -> Self {
        debug_assert!(columns.iter().all(|c| c.len() == ambient_dim));
        Self {
            ambient_dim,
            columns,
        }
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            columns: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<T>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.columns[j]
    }

    pub fn into_columns(self) -> Vec<Vec<T>> {
        self.columns
    }

    /// The `ambient_dim × dim` matrix with the basis as columns.
    pub fn to_matrix(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.ambient_dim, self.dim());
        for (j, c) in self.columns.iter().enumerate() {
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Max entrywise deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.columns.iter().enumerate() {
            for (j, b) in self.columns.iter().enumerate() {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}

/// Modified Gram-Schmidt with one reorthogonalization pass. A vector is
/// dropped when its residual after projection is below `tol` (relative to
/// its own norm when that exceeds one).
pub fn orthonormalize<T: Scalar>(vectors: &[Vec<T>], tol: T) -> Result<OrthonormalBasis<T>> {
    let first = vectors.first().ok_or(Error::EmptySpan)?;
    let d = first.len();
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = norm(v).max(T::one());
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
        }
        let n = norm(&w);
        if n > tol * scale {
            basis.push(scaled(T::one() / n, &w));
        }
    }
    if basis.is_empty() {
        return Err(Error::ZeroSubspace);
    }
    Ok(OrthonormalBasis {
        ambient_dim: d,
        columns: basis,
    })
}

/// Flip `v` so its first entry with magnitude above `1e-12` is positive.
/// Returns whether a flip happened.
pub(crate) fn fix_sign<T: Scalar>(v: &mut [T]) -> bool {
    let thr = T::tol_floor(1e-12, 10.0);
    if let Some(&x) = v.iter().find(|x| x.abs() > thr) {
        if x < T::zero() {
            v.iter_mut().for_each(|e| *e = -*e);
            return true;
        }
    }
    false
}

fn lex_cmp<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues are descending; equal eigenvalues are ordered by their
/// (sign-fixed) eigenvectors lexicographically, descending.
pub fn sym_eigen<T: Scalar>(s: &Matrix<T>) -> Result<(Vec<T>, OrthonormalBasis<T>)> {
    let n = s.rows();
    let asym = s.asymmetry()?;
    let snorm = s.frobenius_norm();
    if asym > T::tol_floor(1e-12, 100.0) * snorm.max(T::min_positive_value()) {
        return Err(Error::Asymmetric(asym.to_f64().unwrap_or(f64::NAN)));
    }
    let mut a = s.clone();
    // symmetrize exactly so rotations act on a symmetric matrix
    for i in 0..n {
        for j in 0..i {
            let m = (a[(i, j)] + a[(j, i)]) * T::lit(0.5);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    let mut v = Matrix::<T>::identity(n);
    let thr = T::tol_floor(1e-14, 10.0) * snorm;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..i {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= thr || snorm == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut pairs: Vec<(T, Vec<T>)> = (0..n)
        .map(|j| {
            let mut col = v.column(j);
            fix_sign(&mut col);
            (a[(j, j)], col)
        })
        .collect();
    let tie = T::tol_floor(1e-12, 100.0) * snorm.max(T::one());
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(Ordering::Equal));
    // reorder each run of (numerically) equal eigenvalues by eigenvector
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && (pairs[end - 1].0 - pairs[end].0).abs() <= tie {
            end += 1;
        }
        pairs[start..end].sort_by(|x, y| lex_cmp(&y.1, &x.1));
        start = end;
    }
    let (values, vectors): (Vec<T>, Vec<Vec<T>>) = pairs.into_iter().unzip();
    Ok((values, OrthonormalBasis::from_orthonormal(n, vectors)))
}

/// Thin SVD result: `m = left · diag(singular_values) · rightᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd<T> {
    pub left: OrthonormalBasis<T>,
    pub singular_values: Vec<T>,
    pub right: OrthonormalBasis<T>,
}

/// Thin SVD by one-sided (Hestenes) Jacobi rotations. Small singular values
/// keep high relative accuracy, which the sine-based angle path relies on.
pub fn svd_thin<T: Scalar>(m: &Matrix<T>) -> Svd<T> {
    if m.rows() < m.cols() {
        let t = svd_thin(&m.transpose());
        return Svd {
            left: t.right,
            singular_values: t.singular_values,
            right: t.left,
        };
    }
    let (rows, n) = (m.rows(), m.cols());
    let mut u = m.columns();
    let mut v: Vec<Vec<T>> = (0..n).map(|j| unit_vector(n, j)).collect();
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                let gamma = dot(&u[p], &u[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for k in 0..rows {
                    let (x, y) = (u[p][k], u[q][k]);
                    u[p][k] = c * x - s * y;
                    u[q][k] = s * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (v[p][k], v[q][k]);
                    v[p][k] = c * x - s * y;
                    v[q][k] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut triples: Vec<(T, Vec<T>, Vec<T>)> = (0..n)
        .map(|j| (norm(&u[j]), u[j].clone(), v[j].clone()))
        .collect();
    triples.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(Ordering::Equal));
    let smax = triples.first().map_or(T::zero(), |t| t.0);
    let negligible = smax * eps * T::lit(rows.max(1) as f64);
    let mut left: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut right: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for (j, (s, uc, mut vc)) in triples.into_iter().enumerate() {
        if s > negligible && s > T::zero() {
            let mut lc = scaled(T::one() / s, &uc);
            if fix_sign(&mut vc) {
                lc.iter_mut().for_each(|e| *e = -*e);
            }
            left.push(lc);
            sigma.push(s);
        } else {
            fix_sign(&mut vc);
            left.push(Vec::new());
            pending.push(j);
            sigma.push(T::zero());
        }
        right.push(vc);
    }
    // left vectors of zero singular values: any orthonormal completion
    if !pending.is_empty() {
        let mut known: Vec<Vec<T>> = left.iter().filter(|c| !c.is_empty()).cloned().collect();
        let extra = complete_basis(rows, &mut known, pending.len());
        for (slot, col) in pending.into_iter().zip(extra) {
            left[slot] = col;
        }
    }
    Svd {
        left: OrthonormalBasis::from_orthonormal(rows, left),
        singular_values: sigma,
        right: OrthonormalBasis::from_orthonormal(n, right),
    }
}

/// Extends the orthonormal set `known` by `count` vectors taken greedily from
/// the standard basis; returns only the new vectors.
pub(crate) fn complete_basis<T: Scalar>(dim: usize, known: &mut Vec<Vec<T>>, count: usize) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(count);
    // pick candidates with the largest residual first for stability
    while out.len() < count {
        let mut best: Option<(T, Vec<T>)> = None;
        for i in 0..dim {
            let mut w = unit_vector::<T>(dim, i);
            for _ in 0..2 {
                for b in known.iter() {
                    let c = dot(b, &w);
                    axpy(-c, b, &mut w);
                }
            }
            let n = norm(&w);
            if best.as_ref().is_none_or(|(bn, _)| n > *bn + T::tol_floor(1e-12, 100.0)) {
                best = Some((n, w));
            }
        }
        match best {
            Some((n, w)) if n > T::tol_floor(1e-8, 1000.0) => {
                let w = scaled(T::one() / n, &w);
                known.push(w.clone());
                out.push(w);
            }
            _ => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn orthonormalize_examples() {
        let b = orthonormalize(&[vec![1.0, 0.0], vec![1.0, 1.0]], 1e-10).unwrap();
        assert_eq!(b.dim(), 2);
        assert!((b.column(1)[1] - 1.0f64).abs() < 1e-15);
        let b = orthonormalize(&[vec![1.0, 0.0], vec![2.0, 0.0]], 1e-10).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(orthonormalize::<f64>(&[], 1e-10), Err(Error::EmptySpan));
        assert_eq!(
            orthonormalize(&[vec![0.0, 0.0]], 1e-10),
            Err(Error::ZeroSubspace)
        );
    }

    #[test]
    fn eigen_examples() {
        let (vals, vecs) = sym_eigen(&Matrix::<f64>::identity(3)).unwrap();
        assert_eq!(vals, vec![1.0, 1.0, 1.0]);
        assert_eq!(vecs.column(0), &[1.0, 0.0, 0.0]);
        let (vals, vecs) = sym_eigen(&m(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let h = 0.5f64.sqrt();
        assert!((vecs.column(0)[0] - h).abs() < 1e-14 && (vecs.column(0)[1] - h).abs() < 1e-14);
        assert!((vecs.column(1)[0] - h).abs() < 1e-14 && (vecs.column(1)[1] + h).abs() < 1e-14);
        assert!(matches!(
            sym_eigen(&m(&[&[1.0, 2.0], &[0.0, 1.0]])),
            Err(Error::Asymmetric(_))
        ));
    }

    #[test]
    fn svd_examples() {
        let s = svd_thin(&m(&[&[3.0, 0.0], &[0.0, 0.0]]));
        assert_eq!(s.singular_values, vec![3.0, 0.0]);
        assert!(s.left.orthonormality_error() < 1e-15);
        let s = svd_thin(&m(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert!(s.singular_values.iter().all(|x| (x - 1.0).abs() < 1e-15));
        let wide = m(&[&[1.0, 2.0, 3.0]]);
        let s = svd_thin(&wide);
        assert_eq!(s.left.dim(), 1);
        assert!((s.singular_values[0] - 14f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[4.0, 1.0, 0.5], &[0.0, 2.0, 1.0], &[1.0, 0.0, 3.0]]);
        let prod = a.matmul(&a.inverse().unwrap()).unwrap();
        assert!(prod.sub(&Matrix::identity(3)).unwrap().max_abs() < 1e-14);
        assert_eq!(m(&[&[1.0, 2.0], &[2.0, 4.0]]).inverse(), Err(Error::Singular));
    }

    #[test]
    fn works_in_single_precision() {
        let a = Matrix::<f32>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let (vals, _) = sym_eigen(&a).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-6);
    }
}
