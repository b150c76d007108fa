//! Linear subspaces and their Jordan (principal) angles.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    self, axpy, complete_basis, dot, norm, orthonormalize, scaled, svd_thin, Matrix, OrthonormalBasis,
};
use crate::scalar::Scalar;

/// Cluster tolerance for exact (non finite-difference) input.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-9;

/// Orthonormality tolerance used when building subspaces from raw vectors.
pub const ORTHO_TOL: f64 = 1e-10;

/// Cosines above this are recomputed from sines.
const SINE_REFINE_ABOVE: f64 = 0.99;

/// A subspace of ℝ^d stored by an orthonormal basis. Dimension zero is
/// allowed so that empty angle spaces have a representation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Subspace<T> {
    basis: OrthonormalBasis<T>,
}

impl<T: Scalar> Subspace<T> {
    pub fn from_vectors(vectors: &[Vec<T>]) -> Result<Self> {
        Self::from_vectors_tol(vectors, T::lit(ORTHO_TOL))
    }

    pub fn from_vectors_tol(vectors: &[Vec<T>], tol: T) -> Result<Self> {
        Ok(Self {
            basis: orthonormalize(vectors, tol)?,
        })
    }

    pub fn from_basis(basis: OrthonormalBasis<T>) -> Self {
        Self { basis }
    }

    /// Like `from_vectors` but an empty list gives the zero subspace.
    pub(crate) fn span_or_zero(ambient_dim: usize, vectors: &[Vec<T>]) -> Result<Self> {
        if vectors.is_empty() {
            return Ok(Self::zero(ambient_dim));
        }
        Self::from_vectors(vectors)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: OrthonormalBasis::empty(ambient_dim),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::coordinate(ambient_dim, &(0..ambient_dim).collect::<Vec<_>>())
    }

    /// Span of the given standard basis vectors.
    pub fn coordinate(ambient_dim: usize, axes: &[usize]) -> Self {
        let cols = axes.iter().map(|&i| linalg::unit_vector(ambient_dim, i)).collect();
        Self {
            basis: OrthonormalBasis::from_orthonormal(ambient_dim, cols),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &OrthonormalBasis<T> {
        &self.basis
    }

    pub fn vectors(&self) -> &[Vec<T>] {
        self.basis.columns()
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: d,
            });
        }
        Ok(())
    }

    /// Orthogonal projection `B Bᵀ x`.
    pub fn project(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_dim(x.len())?;
        let mut out = vec![T::zero(); x.len()];
        for b in self.vectors() {
            axpy(dot(b, x), b, &mut out);
        }
        Ok(out)
    }

    /// `x` minus its projection.
    pub fn reject(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(linalg::sub(x, &self.project(x)?))
    }

    /// Coordinates of `x` in the stored basis.
    pub fn coordinates(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_dim(x.len())?;
        Ok(self.vectors().iter().map(|b| dot(b, x)).collect())
    }

    pub fn projector(&self) -> Matrix<T> {
        let b = self.basis.to_matrix();
        b.matmul(&b.transpose()).expect("shapes agree")
    }

    /// Frobenius distance between orthogonal projectors.
    pub fn projector_distance(&self, other: &Self) -> Result<T> {
        self.check_dim(other.ambient_dim())?;
        Ok(self.projector().sub(&other.projector())?.frobenius_norm())
    }

    /// Image under a linear map given as a square matrix.
    pub fn transformed(&self, t: &Matrix<T>) -> Result<Self> {
        if self.dim() == 0 {
            return Ok(self.clone());
        }
        let cols = self
            .vectors()
            .iter()
            .map(|v| t.matvec(v))
            .collect::<Result<Vec<_>>>()?;
        Self::from_vectors(&cols)
    }
}

pub fn orthogonal_complement<T: Scalar>(s: &Subspace<T>) -> Result<Subspace<T>> {
    let d = s.ambient_dim();
    if s.dim() >= d {
        return Err(Error::EmptyComplement);
    }
    let mut known = s.vectors().to_vec();
    let extra = complete_basis(d, &mut known, d - s.dim());
    Ok(Subspace::from_basis(OrthonormalBasis::from_orthonormal(d, extra)))
}

/// One Jordan angle with its angle spaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleClass<T> {
    pub angle: T,
    pub multiplicity: usize,
    pub directions_in_p: Subspace<T>,
    /// Empty for the right-angle class.
    pub partners_in_q: Subspace<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JordanSpectrum<T> {
    pub classes: Vec<AngleClass<T>>,
    pub cluster_tol: T,
}

impl<T: Scalar> JordanSpectrum<T> {
    pub fn angles(&self) -> Vec<T> {
        self.classes.iter().map(|c| c.angle).collect()
    }

    /// `(angle, multiplicity)` pairs in ascending angle order.
    pub fn signature(&self) -> Vec<(T, usize)> {
        self.classes.iter().map(|c| (c.angle, c.multiplicity)).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.classes.iter().map(|c| c.multiplicity).sum()
    }

    /// Same multiplicities and angles pairwise within `tol`.
    pub fn matches(&self, other: &Self, tol: T) -> bool {
        signatures_match(&self.signature(), &other.signature(), tol)
    }

    /// Class whose angle is within `tol` of `angle`.
    pub fn class_near(&self, angle: T, tol: T) -> Option<&AngleClass<T>> {
        self.classes.iter().find(|c| (c.angle - angle).abs() <= tol)
    }

    /// Largest angle difference between matching classes, or `None` when
    /// the class structure differs.
    pub fn max_deviation(&self, other: &Self) -> Option<T> {
        if self.classes.len() != other.classes.len() {
            return None;
        }
        let mut worst = T::zero();
        for (a, b) in self.classes.iter().zip(&other.classes) {
            if a.multiplicity != b.multiplicity {
                return None;
            }
            worst = worst.max((a.angle - b.angle).abs());
        }
        Some(worst)
    }
}

pub fn signatures_match<T: Scalar>(a: &[(T, usize)], b: &[(T, usize)], tol: T) -> bool {
    a.len() == b.len()
        && a
            .iter()
            .zip(b)
            .all(|(x, y)| x.1 == y.1 && (x.0 - y.0).abs() <= tol)
}

/// A single principal direction of P, before clustering.
#[derive(Debug, Clone)]
pub(crate) struct PrincipalDirection<T> {
    pub angle: T,
    pub in_p: Vec<T>,
    /// Unit partner in Q, absent at the right angle.
    pub in_q: Option<Vec<T>>,
}

/// All principal directions of `p` relative to `q`, ascending by angle.
pub(crate) fn principal_directions<T: Scalar>(
    p: &Subspace<T>,
    q: &Subspace<T>,
) -> Result<Vec<PrincipalDirection<T>>> {
    p.check_dim(q.ambient_dim())?;
    let k = p.dim();
    if k == 0 {
        return Ok(Vec::new());
    }
    let d = p.ambient_dim();
    let a = p.basis.to_matrix();
    let half_pi = T::FRAC_PI_2();
    if q.dim() == 0 {
        return Ok(p
            .vectors()
            .iter()
            .map(|v| PrincipalDirection {
                angle: half_pi,
                in_p: v.clone(),
                in_q: None,
            })
            .collect());
    }
    let b = q.basis.to_matrix();
    let c = a.transpose().matmul(&b)?;
    let svd = svd_thin(&c);
    let mut left: Vec<Vec<T>> = svd.left.columns().to_vec();
    let mut cosines: Vec<T> = svd.singular_values.iter().map(|s| s.min(T::one()).max(T::zero())).collect();
    let right: Vec<Vec<T>> = svd.right.columns().to_vec();
    if left.len() < k {
        let extra = complete_basis(k, &mut left.clone(), k - left.len());
        for e in extra {
            left.push(e);
            cosines.push(T::zero());
        }
    }
    // sines of P's directions against Q, ascending; index-aligned with the
    // descending cosines
    let refine = cosines.iter().any(|&c| c > T::lit(SINE_REFINE_ABOVE));
    let sines: Vec<T> = if refine {
        let proj_b = b.matmul(&b.transpose())?;
        let resid = a.sub(&proj_b.matmul(&a)?)?;
        let mut s = svd_thin(&resid).singular_values;
        s.reverse();
        s
    } else {
        Vec::new()
    };
    let mut out = Vec::with_capacity(k);
    for (i, l) in left.iter().enumerate() {
        let cos = cosines[i];
        let angle = if cos > T::lit(SINE_REFINE_ABOVE) {
            sines[i].min(T::one()).asin()
        } else {
            cos.acos()
        };
        let in_p = a.matvec(l)?;
        let in_q = if i < right.len() && cos > T::zero() {
            let v = b.matvec(&right[i])?;
            let n = norm(&v);
            Some(scaled(T::one() / n, &v))
        } else {
            None
        };
        debug_assert_eq!(in_p.len(), d);
        out.push(PrincipalDirection { angle, in_p, in_q });
    }
    out.sort_by(|x, y| x.angle.partial_cmp(&y.angle).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Jordan angles of `p` relative to `q0`, grouped into classes whose
/// consecutive angles differ by at most `cluster_tol`.
pub fn jordan_spectrum<T: Scalar>(
    p: &Subspace<T>,
    q0: &Subspace<T>,
    cluster_tol: T,
) -> Result<JordanSpectrum<T>> {
    let dirs = principal_directions(p, q0)?;
    let d = p.ambient_dim();
    let half_pi = T::FRAC_PI_2();
    let mut classes = Vec::new();
    let mut start = 0;
    while start < dirs.len() {
        let mut end = start + 1;
        while end < dirs.len() && dirs[end].angle - dirs[end - 1].angle <= cluster_tol {
            end += 1;
        }
        let group = &dirs[start..end];
        let mult = group.len();
        let angle = group.iter().fold(T::zero(), |s, x| s + x.angle) / T::lit(mult as f64);
        let in_p: Vec<Vec<T>> = group.iter().map(|x| x.in_p.clone()).collect();
        let partners: Vec<Vec<T>> = if half_pi - angle <= cluster_tol {
            Vec::new()
        } else {
            group.iter().filter_map(|x| x.in_q.clone()).collect()
        };
        classes.push(AngleClass {
            angle,
            multiplicity: mult,
            directions_in_p: Subspace::from_basis(OrthonormalBasis::from_orthonormal(d, in_p)),
            partners_in_q: Subspace::span_or_zero(d, &partners)?,
        });
        start = end;
    }
    Ok(JordanSpectrum {
        classes,
        cluster_tol,
    })
}

/// The isometry Φ_θ on `P_θ ⊕ P_θ^⊥` with square minus the identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntiInvolution<T> {
    pub theta: T,
    pub domain: Subspace<T>,
    /// Matrix of Φ in the domain basis.
    pub matrix: Matrix<T>,
}

impl<T: Scalar> AntiInvolution<T> {
    /// Φ applied to the projection of `x` onto the domain.
    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        let c = self.domain.coordinates(x)?;
        let mc = self.matrix.matvec(&c)?;
        let mut out = vec![T::zero(); x.len()];
        for (b, &w) in self.domain.vectors().iter().zip(&mc) {
            axpy(w, b, &mut out);
        }
        Ok(out)
    }
}

/// Builds Φ_θ for an interior angle class of `(p, q0)`. The P part uses
/// `(cos θ u − sec θ 𝒫₀u)/sin θ`, the P^⊥ part `(cos θ v − sec θ 𝒫₀^⊥v)/sin θ`.
pub fn anti_involution<T: Scalar>(
    p: &Subspace<T>,
    q0: &Subspace<T>,
    class: &AngleClass<T>,
) -> Result<AntiInvolution<T>> {
    p.check_dim(q0.ambient_dim())?;
    let theta = class.angle;
    let edge = T::tol_floor(1e-12, 100.0);
    if theta <= edge || theta >= T::FRAC_PI_2() - edge {
        return Err(Error::BoundaryAngle);
    }
    let (s, c) = theta.sin_cos();
    let phi_raw = |x: &[T]| -> Result<Vec<T>> {
        let xp = p.project(x)?;
        let xperp = linalg::sub(x, &xp);
        let p0xp = q0.project(&xp)?;
        let p0perp_xperp = q0.reject(&xperp)?;
        let mut out = vec![T::zero(); x.len()];
        axpy(c / s, &xp, &mut out);
        axpy(-T::one() / (c * s), &p0xp, &mut out);
        axpy(c / s, &xperp, &mut out);
        axpy(-T::one() / (c * s), &p0perp_xperp, &mut out);
        Ok(out)
    };
    let mut spanning: Vec<Vec<T>> = class.directions_in_p.vectors().to_vec();
    for u in class.directions_in_p.vectors() {
        spanning.push(phi_raw(u)?);
    }
    let domain = Subspace::from_vectors(&spanning)?;
    let n = domain.dim();
    let mut matrix = Matrix::zeros(n, n);
    for (j, dj) in domain.vectors().iter().enumerate() {
        let img = phi_raw(dj)?;
        for (i, di) in domain.vectors().iter().enumerate() {
            matrix[(i, j)] = dot(di, &img);
        }
    }
    Ok(AntiInvolution {
        theta,
        domain,
        matrix,
    })
}

/// Orthonormal frame adapted to the pair: for each principal direction `p_i`
/// at an interior angle also the unit normal `n_i` to P in the plane of
/// `p_i` and its partner, then Q ∩ P^⊥, then the joint complement.
fn adapted_frame<T: Scalar>(p: &Subspace<T>, q: &Subspace<T>, tol: T) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let d = p.ambient_dim();
    let dirs = principal_directions(p, q)?;
    let half_pi = T::FRAC_PI_2();
    let mut frame: Vec<Vec<T>> = Vec::with_capacity(d);
    let mut angles = Vec::with_capacity(dirs.len());
    for dir in &dirs {
        angles.push(dir.angle);
        frame.push(dir.in_p.clone());
        if dir.angle > tol && dir.angle < half_pi - tol {
            let qv = dir.in_q.as_ref().ok_or(Error::ZeroSubspace)?;
            let (s, c) = dir.angle.sin_cos();
            let mut n = qv.clone();
            axpy(-c, &dir.in_p, &mut n);
            frame.push(scaled(T::one() / s, &n));
        }
    }
    // the part of Q orthogonal to P
    for back in principal_directions(q, p)? {
        if back.angle >= half_pi - tol {
            frame.push(back.in_p);
        }
    }
    let frame = orthonormalize(&frame, T::lit(1e-6))?.into_columns();
    let missing = d - frame.len();
    let mut known = frame;
    complete_basis(d, &mut known, missing);
    Ok((angles, known))
}

/// An orthogonal `T` with `T·P1 = P2` and `T·Q1 = Q2`, or `None` when the two
/// pairs have different Jordan spectra.
pub fn align_pairs<T: Scalar>(
    p1: &Subspace<T>,
    q1: &Subspace<T>,
    p2: &Subspace<T>,
    q2: &Subspace<T>,
    cluster_tol: T,
) -> Result<Option<Matrix<T>>> {
    let d = p1.ambient_dim();
    for s in [q1, p2, q2] {
        p1.check_dim(s.ambient_dim())?;
    }
    if p1.dim() != p2.dim() || q1.dim() != q2.dim() {
        return Err(Error::DimensionMismatch {
            expected: p1.dim(),
            found: p2.dim(),
        });
    }
    let s1 = jordan_spectrum(p1, q1, cluster_tol)?;
    let s2 = jordan_spectrum(p2, q2, cluster_tol)?;
    if !s1.matches(&s2, cluster_tol) {
        return Ok(None);
    }
    let (a1, f1) = adapted_frame(p1, q1, cluster_tol)?;
    let (a2, f2) = adapted_frame(p2, q2, cluster_tol)?;
    if f1.len() != d || f2.len() != d || a1.len() != a2.len() {
        return Ok(None);
    }
    let m1 = Matrix::from_columns(d, &f1)?;
    let m2 = Matrix::from_columns(d, &f2)?;
    Ok(Some(m2.matmul(&m1.transpose())?))
}
