//! Quaternions and octonions as Cayley-Dickson pairs, and associative
//! 3-planes of the imaginary octonions.
//!
//! Flat octonion coordinates are `(1, i, j, k, e, ie, je, ke)`; imaginary
//! octonions map to ℝ⁷ as `(i, j, k, e, ie, je, ke)`, so the imaginary
//! quaternions are coordinates 0-2 and ℍe is 3-6.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Num;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, orthonormalize};
use crate::scalar::Scalar;
use crate::subspace::{principal_directions, Subspace};

/// Coefficient types the algebra is defined over. Integer types give exact
/// multiplication tables.
pub trait Ring: Copy + Num + Neg<Output = Self> {}
impl<R: Copy + Num + Neg<Output = R>> Ring for R {}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion<R> {
    pub w: R,
    pub x: R,
    pub y: R,
    pub z: R,
}

impl<R: Ring> Quaternion<R> {
    pub fn new(w: R, x: R, y: R, z: R) -> Self {
        Self { w, x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(R::zero(), R::zero(), R::zero(), R::zero())
    }

    pub fn one() -> Self {
        Self::new(R::one(), R::zero(), R::zero(), R::zero())
    }

    pub fn i() -> Self {
        Self::new(R::zero(), R::one(), R::zero(), R::zero())
    }

    pub fn j() -> Self {
        Self::new(R::zero(), R::zero(), R::one(), R::zero())
    }

    pub fn k() -> Self {
        Self::new(R::zero(), R::zero(), R::zero(), R::one())
    }

    pub fn from_array(c: [R; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [R; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Pure imaginary quaternion `x i + y j + z k`.
    pub fn imaginary(v: [R; 3]) -> Self {
        Self::new(R::zero(), v[0], v[1], v[2])
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn re(self) -> R {
        self.w
    }

    pub fn im(self) -> Self {
        Self::new(R::zero(), self.x, self.y, self.z)
    }

    pub fn norm_sqr(self) -> R {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn dot(self, o: Self) -> R {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn scale(self, s: R) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Scalar> Quaternion<T> {
    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(self) -> Self {
        self.scale(T::one() / self.norm())
    }

    /// Exponential of an imaginary quaternion.
    pub fn exp_imaginary(b: [T; 3]) -> Self {
        let t = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        if t == T::zero() {
            return Self::one();
        }
        let (s, c) = t.sin_cos();
        Self::new(c, s * b[0] / t, s * b[1] / t, s * b[2] / t)
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

impl<R: Ring> Add for Quaternion<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<R: Ring> Sub for Quaternion<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<R: Ring> Neg for Quaternion<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<R: Ring> Mul for Quaternion<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self, o);
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

/// The octonion `a + b e`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Octonion<R> {
    pub a: Quaternion<R>,
    pub b: Quaternion<R>,
}

impl<R: Ring> Octonion<R> {
    pub fn new(a: Quaternion<R>, b: Quaternion<R>) -> Self {
        Self { a, b }
    }

    pub fn zero() -> Self {
        Self::new(Quaternion::zero(), Quaternion::zero())
    }

    pub fn one() -> Self {
        Self::new(Quaternion::one(), Quaternion::zero())
    }

    pub fn e() -> Self {
        Self::new(Quaternion::zero(), Quaternion::one())
    }

    pub fn from_quaternion(q: Quaternion<R>) -> Self {
        Self::new(q, Quaternion::zero())
    }

    /// Standard basis element `k` of the flat coordinates.
    pub fn basis(k: usize) -> Self {
        let mut c = [R::zero(); 8];
        c[k] = R::one();
        Self::from_flat(c)
    }

    pub fn from_flat(c: [R; 8]) -> Self {
        Self::new(
            Quaternion::new(c[0], c[1], c[2], c[3]),
            Quaternion::new(c[4], c[5], c[6], c[7]),
        )
    }

    pub fn flat(self) -> [R; 8] {
        let (a, b) = (self.a, self.b);
        [a.w, a.x, a.y, a.z, b.w, b.x, b.y, b.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.a.conj(), -self.b)
    }

    pub fn re(self) -> R {
        self.a.w
    }

    pub fn im(self) -> Self {
        Self::new(self.a.im(), self.b)
    }

    pub fn norm_sqr(self) -> R {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    /// `⟨x, y⟩ = Re(x ȳ)`.
    pub fn inner(self, o: Self) -> R {
        (self * o.conj()).re()
    }

    pub fn scale(self, s: R) -> Self {
        Self::new(self.a.scale(s), self.b.scale(s))
    }
}

impl<T: Scalar> Octonion<T> {
    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(self) -> Self {
        self.scale(T::one() / self.norm())
    }

    /// Imaginary octonion from its ℝ⁷ coordinates.
    pub fn from_im7(v: &[T]) -> Self {
        assert_eq!(v.len(), 7, "imaginary octonions have 7 coordinates");
        Self::from_flat([T::zero(), v[0], v[1], v[2], v[3], v[4], v[5], v[6]])
    }

    /// ℝ⁷ coordinates of the imaginary part.
    pub fn to_im7(self) -> Vec<T> {
        self.flat()[1..].to_vec()
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }
}

impl<R: Ring> Add for Octonion<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

impl<R: Ring> Sub for Octonion<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b)
    }
}

impl<R: Ring> Neg for Octonion<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl<R: Ring> Mul for Octonion<R> {
    type Output = Self;
    /// `(a + be)(c + de) = (ac − d̄b) + (da + bc̄)e`
    fn mul(self, o: Self) -> Self {
        let (a, b, c, d) = (self.a, self.b, o.a, o.b);
        Self::new(a * c - d.conj() * b, d * a + b * c.conj())
    }
}

/// Product of two imaginary octonions given in ℝ⁷ coordinates, returned in
/// ℝ⁷ coordinates (the real part is dropped).
pub fn im7_mul<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    (Octonion::from_im7(x) * Octonion::from_im7(y)).to_im7()
}

fn check_im_plane<T: Scalar>(p: &Subspace<T>) -> Result<()> {
    if p.ambient_dim() != 7 || p.dim() != 3 {
        return Err(Error::WrongDimensions(format!(
            "expected a 3-plane in R^7, got a {}-plane in R^{}",
            p.dim(),
            p.ambient_dim()
        )));
    }
    Ok(())
}

/// Closure test on the stored orthonormal basis `{x, y, z}`: the residual is
/// `min(‖z − xy‖, ‖z + xy‖)` and the plane is associative when it is below
/// `tol`.
pub fn is_associative<T: Scalar>(p: &Subspace<T>, tol: T) -> Result<(bool, T)> {
    check_im_plane(p)?;
    let v = p.vectors();
    let xy = Octonion::from_im7(&v[0]) * Octonion::from_im7(&v[1]);
    let z = Octonion::from_im7(&v[2]);
    let residual = z.dist(xy).min(z.dist(-xy));
    Ok((residual < tol, residual))
}

/// `span{x, y, xy}` for Gaussian `x, y ∈ Im 𝕆` made orthonormal.
pub fn random_associative<T: Scalar>(seed: u64) -> Subspace<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut draw = || -> Vec<T> {
            (0..7)
                .map(|_| T::lit(StandardNormal.sample(&mut rng)))
                .collect()
        };
        let (x, y) = (draw(), draw());
        if let Ok(b) = orthonormalize(&[x, y], T::lit(1e-3)) {
            if b.dim() == 2 {
                return associative_span(b.column(0), b.column(1));
            }
        }
    }
}

/// `span{x, y, xy}` for orthonormal imaginary `x, y` in ℝ⁷ coordinates.
pub fn associative_span<T: Scalar>(x: &[T], y: &[T]) -> Subspace<T> {
    let z = im7_mul(x, y);
    let n = norm(&z);
    let z: Vec<T> = z.iter().map(|&c| c / n).collect();
    // already orthonormal up to rounding; re-orthonormalize to clean it
    Subspace::from_vectors(&[x.to_vec(), y.to_vec(), z]).expect("independent")
}

/// Frame of a generic associative 3-plane relative to Im ℍ:
/// `x_α = cos θ_α a_α + sin θ_α a_α ε` for α = 1, 2 and
/// `x₃ = x₁x₂ = cos θ₃ a₃ − sin θ₃ a₃ε` with `a₃ = a₁a₂`, `θ₃ = θ₁ + θ₂`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociativeFrame<T> {
    pub theta: [T; 3],
    pub a: [Octonion<T>; 3],
    pub epsilon: Octonion<T>,
    pub x: [Octonion<T>; 3],
}

impl<T: Scalar> AssociativeFrame<T> {
    /// Largest deviation from the displayed form and from `x₃ = x₁x₂`,
    /// `a₃ = a₁a₂`, `θ₃ = θ₁ + θ₂`.
    pub fn defect(&self) -> T {
        let mut worst = T::zero();
        for k in 0..3 {
            let (s, c) = self.theta[k].sin_cos();
            let s = if k == 2 { -s } else { s };
            let form = self.a[k].scale(c) + (self.a[k] * self.epsilon).scale(s);
            worst = worst.max(form.dist(self.x[k]));
        }
        worst = worst.max(self.x[2].dist(self.x[0] * self.x[1]));
        worst = worst.max(self.a[2].dist(self.a[0] * self.a[1]));
        worst.max((self.theta[2] - self.theta[0] - self.theta[1]).abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum AssociativeCase<T> {
    /// The plane is Im ℍ; every angle is zero.
    ImaginaryQuaternions { angles: Vec<T> },
    /// Angles `{0, π/2, π/2}`.
    RightAngled { angles: Vec<T> },
    Generic(AssociativeFrame<T>),
}

fn split_imh<T: Scalar>(x: Octonion<T>) -> (Octonion<T>, Octonion<T>) {
    (
        Octonion::new(x.a, Quaternion::zero()),
        Octonion::new(Quaternion::zero(), x.b),
    )
}

/// Classifies an associative plane by its Jordan angles against Im ℍ and,
/// in the generic case, reconstructs the adapted frame.
pub fn associative_frame<T: Scalar>(p: &Subspace<T>, tol: T) -> Result<AssociativeCase<T>> {
    let (ok, residual) = is_associative(p, tol.max(T::lit(1e-8)))?;
    if !ok {
        return Err(Error::NotAssociative(residual.to_f64().unwrap_or(f64::NAN)));
    }
    let imh = Subspace::coordinate(7, &[0, 1, 2]);
    let dirs = principal_directions(p, &imh)?;
    let angles: Vec<T> = dirs.iter().map(|d| d.angle).collect();
    let half_pi = T::FRAC_PI_2();
    let at_zero = angles.iter().filter(|&&a| a <= tol).count();
    let at_right = angles.iter().filter(|&&a| a >= half_pi - tol).count();
    if at_zero >= 2 {
        return Ok(AssociativeCase::ImaginaryQuaternions { angles });
    }
    if at_right >= 2 {
        return Ok(AssociativeCase::RightAngled { angles });
    }
    let interior: Vec<Octonion<T>> = dirs
        .iter()
        .filter(|d| d.angle > tol && d.angle < half_pi - tol)
        .map(|d| Octonion::from_im7(&d.in_p))
        .collect();
    if interior.len() < 2 {
        return Err(Error::NotAssociative(residual.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(AssociativeCase::Generic(frame_from_pair(interior[0], interior[1])))
}

/// Frame built from two orthonormal angle directions of an associative
/// plane, relabeled when `y₂ε̄ = −a₂` so that `θ₃ = θ₁ + θ₂` still holds.
fn frame_from_pair<T: Scalar>(mut x1: Octonion<T>, mut x2: Octonion<T>) -> AssociativeFrame<T> {
    let split = |x: Octonion<T>| {
        let (h, he) = split_imh(x);
        (h.norm(), he.norm(), h.normalized(), he.normalized())
    };
    // ε from x₁, then b = y₂ε̄ is ±a₂
    let frame_from = |x1: Octonion<T>, x2: Octonion<T>| {
        let (c1, s1, a1, y1) = split(x1);
        let (c2, s2, a2, y2) = split(x2);
        let eps = a1.conj() * y1;
        let b = y2 * eps.conj();
        let positive = b.dist(a2) <= b.dist(-a2);
        (s1.atan2(c1), s2.atan2(c2), a1, a2, eps, positive)
    };
    let (mut t1, mut t2, mut a1, mut a2, mut eps, positive) = frame_from(x1, x2);
    if !positive && t1 < t2 {
        std::mem::swap(&mut x1, &mut x2);
        (t1, t2, a1, a2, eps, _) = frame_from(x1, x2);
    }
    // x₁ and x₂ are unit and orthogonal, so x₁x₂ is the third direction
    let x3 = x1 * x2;
    let a3 = a1 * a2;
    if positive {
        AssociativeFrame {
            theta: [t1, t2, t1 + t2],
            a: [a1, a2, a3],
            epsilon: eps,
            x: [x1, x2, x3],
        }
    } else {
        AssociativeFrame {
            theta: [t2, t1 - t2, t1],
            a: [a2, a3, a1],
            epsilon: -eps,
            x: [x2, x3, x1],
        }
    }
}
