//! Extrinsic geometry of parametrized immersions by finite differences:
//! frames, second fundamental form, Jordan angle structure and the identity
//! checks built on them.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, orthonormalize, scaled, sub, sym_eigen, Matrix};
use crate::octonion::{associative_frame, im7_mul, is_associative, AssociativeCase};
use crate::subspace::{self, anti_involution, jordan_spectrum, orthogonal_complement, AntiInvolution, JordanSpectrum};

type Subspace = subspace::Subspace<f64>;

/// Angle clustering tolerance for spectra of finite-difference subspaces.
pub const FD_CLUSTER_TOL: f64 = 1e-4;

/// Tolerance for B-only identities.
pub const B_IDENTITY_TOL: f64 = 1e-5;

/// Tolerance for identities involving connection coefficients or products
/// of second fundamental form entries.
pub const CONNECTION_IDENTITY_TOL: f64 = 1e-4;

/// Tangent and normal orthonormal frames at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub tangent: Vec<Vec<f64>>,
    pub normal: Vec<Vec<f64>>,
}

/// A parametrized submanifold `F: U ⊂ ℝ^n → ℝ^d`. `evaluate` must be pure.
pub trait Immersion: Sync {
    fn name(&self) -> &str;
    fn param_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn evaluate(&self, u: &[f64]) -> Vec<f64>;
    /// Whether `u` lies in the closed parameter domain.
    fn contains(&self, u: &[f64]) -> bool;
    /// Draws a parameter from the sampling region, which sits strictly
    /// inside the domain.
    fn sample_param(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
    /// Per-coordinate scale that finite-difference steps are multiplied by.
    fn param_scales(&self, u: &[f64]) -> Vec<f64> {
        vec![1.0; u.len()]
    }
    /// Jordan-aligned frames, for models that know them in closed form.
    fn analytic_frame(&self, _u: &[f64]) -> Option<Frame> {
        None
    }
    /// The fixed plane Jordan angles are measured against.
    fn reference_plane(&self) -> Subspace;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    pub step_first: f64,
    pub step_second: f64,
    /// One level of Richardson extrapolation from steps `h` and `2h`.
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            step_first: 6e-6,
            step_second: 1.2e-4,
            richardson: true,
        }
    }
}

/// A point with orthonormal frames and second fundamental form
/// coefficients `h[α][(i, j)] = ⟨B(e_i, e_j), ν_α⟩`.
#[derive(Debug, Clone)]
pub struct FramedPoint {
    pub param: Vec<f64>,
    pub point: Vec<f64>,
    /// Tangent space spanned by the finite-difference Jacobian.
    pub tangent: Subspace,
    pub normal: Subspace,
    pub tangent_frame: Vec<Vec<f64>>,
    pub normal_frame: Vec<Vec<f64>>,
    pub h: Vec<Matrix<f64>>,
    pub reference: Subspace,
    pub reference_perp: Subspace,
    /// Tangent space against the orthogonal complement of the reference.
    pub tangent_spectrum: JordanSpectrum<f64>,
    /// Normal space against the reference.
    pub normal_spectrum: JordanSpectrum<f64>,
    pub analytic: bool,
    /// `e_i = Σ_a coord_to_frame[(a, i)] ∂_a F`.
    pub coord_to_frame: Matrix<f64>,
}

impl FramedPoint {
    pub fn dim(&self) -> usize {
        self.tangent_frame.len()
    }

    pub fn codim(&self) -> usize {
        self.normal_frame.len()
    }

    fn frame_coords(&self, x: &[f64]) -> Vec<f64> {
        self.tangent_frame.iter().map(|e| dot(e, x)).collect()
    }

    /// Second fundamental form on ambient tangent vectors.
    pub fn b(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let cx = self.frame_coords(x);
        let cy = self.frame_coords(y);
        let mut out = vec![0.0; self.point.len()];
        for (h, nu) in self.h.iter().zip(&self.normal_frame) {
            let hy = h.matvec(&cy).expect("square");
            axpy(dot(&cx, &hy), nu, &mut out);
        }
        out
    }

    /// Shape operator `A^ν x = Σ_j ⟨B(x, e_j), ν⟩ e_j`.
    pub fn shape(&self, nu: &[f64], x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.point.len()];
        for e in &self.tangent_frame {
            axpy(dot(&self.b(x, e), nu), e, &mut out);
        }
        out
    }

    /// Largest `|h_{α,ij} − h_{α,ji}|`.
    pub fn h_asymmetry(&self) -> f64 {
        self.h.iter().map(|m| m.asymmetry().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }
}

fn check_param(imm: &dyn Immersion, u: &[f64]) -> Result<()> {
    if u.len() != imm.param_dim() {
        return Err(Error::DimensionMismatch {
            expected: imm.param_dim(),
            found: u.len(),
        });
    }
    if !imm.contains(u) {
        return Err(Error::OutsideDomain(format!("{u:?}")));
    }
    Ok(())
}

struct Stencil<'a> {
    imm: &'a dyn Immersion,
    u: &'a [f64],
    steps: Vec<f64>,
    richardson: bool,
}

impl Stencil<'_> {
    fn eval_at(&self, offsets: &[(usize, f64)]) -> Result<Vec<f64>> {
        let mut x = self.u.to_vec();
        for &(a, t) in offsets {
            x[a] += t;
        }
        if !self.imm.contains(&x) {
            return Err(Error::OutsideDomain(format!(
                "stencil point {x:?} leaves the domain"
            )));
        }
        Ok(self.imm.evaluate(&x))
    }

    fn extrapolate(&self, f: impl Fn(f64) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
        let d1 = f(1.0)?;
        if !self.richardson {
            return Ok(d1);
        }
        let d2 = f(2.0)?;
        Ok(d1.iter().zip(&d2).map(|(a, b)| (4.0 * a - b) / 3.0).collect())
    }

    fn first(&self, a: usize) -> Result<Vec<f64>> {
        self.extrapolate(|m| {
            let h = self.steps[a] * m;
            let p = self.eval_at(&[(a, h)])?;
            let q = self.eval_at(&[(a, -h)])?;
            Ok(p.iter().zip(&q).map(|(x, y)| (x - y) / (2.0 * h)).collect())
        })
    }

    fn second(&self, a: usize, b: usize, f0: &[f64]) -> Result<Vec<f64>> {
        self.extrapolate(|m| {
            let ha = self.steps[a] * m;
            if a == b {
                let p = self.eval_at(&[(a, ha)])?;
                let q = self.eval_at(&[(a, -ha)])?;
                return Ok((0..f0.len())
                    .map(|k| (p[k] - 2.0 * f0[k] + q[k]) / (ha * ha))
                    .collect());
            }
            let hb = self.steps[b] * m;
            let pp = self.eval_at(&[(a, ha), (b, hb)])?;
            let pm = self.eval_at(&[(a, ha), (b, -hb)])?;
            let mp = self.eval_at(&[(a, -ha), (b, hb)])?;
            let mm = self.eval_at(&[(a, -ha), (b, -hb)])?;
            Ok((0..f0.len())
                .map(|k| (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * ha * hb))
                .collect())
        })
    }
}

/// Angle of a tangent vector against `Q₀^⊥`.
fn tangent_angle(fp_ref: &Subspace, x: &[f64]) -> f64 {
    let inside = fp_ref.project(x).expect("dims");
    let outside = sub(x, &inside);
    norm(&inside).atan2(norm(&outside))
}

/// Angle of a normal vector against `Q₀`.
fn normal_angle(fp_ref: &Subspace, x: &[f64]) -> f64 {
    let inside = fp_ref.project(x).expect("dims");
    let outside = sub(x, &inside);
    norm(&outside).atan2(norm(&inside))
}

fn spectrum_frame(s: &JordanSpectrum<f64>) -> Vec<Vec<f64>> {
    s.classes
        .iter()
        .flat_map(|c| c.directions_in_p.vectors().to_vec())
        .collect()
}

/// Frames and second fundamental form at `u`.
pub fn frame_at(imm: &dyn Immersion, u: &[f64], fd: &FdConfig, q0: &Subspace) -> Result<FramedPoint> {
    check_param(imm, u)?;
    let n = imm.param_dim();
    let d = imm.ambient_dim();
    if q0.ambient_dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: q0.ambient_dim(),
        });
    }
    let scales = imm.param_scales(u);
    let first = Stencil {
        imm,
        u,
        steps: scales.iter().map(|s| s * fd.step_first).collect(),
        richardson: fd.richardson,
    };
    let second = Stencil {
        imm,
        u,
        steps: scales.iter().map(|s| s * fd.step_second).collect(),
        richardson: fd.richardson,
    };
    let f0 = imm.evaluate(u);
    let jac = (0..n).map(|a| first.first(a)).collect::<Result<Vec<_>>>()?;
    let tangent = Subspace::from_basis(orthonormalize(&jac, 1e-8).map_err(|_| Error::ImmersionSingular)?);
    if tangent.dim() < n {
        return Err(Error::ImmersionSingular);
    }
    let normal = if n < d {
        orthogonal_complement(&tangent)?
    } else {
        Subspace::zero(d)
    };
    let reference_perp = if q0.dim() < d {
        orthogonal_complement(q0)?
    } else {
        Subspace::zero(d)
    };
    let tangent_spectrum = jordan_spectrum(&tangent, &reference_perp, FD_CLUSTER_TOL)?;
    let normal_spectrum = jordan_spectrum(&normal, q0, FD_CLUSTER_TOL)?;

    let analytic = imm.analytic_frame(u);
    let (tangent_frame, normal_frame) = match &analytic {
        Some(fr) => {
            if fr.tangent.len() != n || fr.normal.len() != d - n {
                return Err(Error::WrongDimensions("analytic frame has the wrong size".into()));
            }
            let span = Subspace::from_vectors(&fr.tangent)?;
            let gap = span.projector_distance(&tangent)?;
            if gap > 1e-6 {
                return Err(Error::Inapplicable(format!(
                    "analytic tangent frame is off the tangent space by {gap:e}"
                )));
            }
            (fr.tangent.clone(), fr.normal.clone())
        }
        None => (spectrum_frame(&tangent_spectrum), spectrum_frame(&normal_spectrum)),
    };

    let mut g = Matrix::zeros(n, n);
    for (i, e) in tangent_frame.iter().enumerate() {
        for (a, ja) in jac.iter().enumerate() {
            g[(i, a)] = dot(e, ja);
        }
    }
    let ginv = g.inverse().map_err(|_| Error::ImmersionSingular)?;
    let mut hess = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in a..n {
            let v = second.second(a, b, &f0)?;
            hess[b][a] = v.clone();
            hess[a][b] = v;
        }
    }
    let mut h = Vec::with_capacity(normal_frame.len());
    for nu in &normal_frame {
        let coord: Vec<Vec<f64>> = (0..n)
            .map(|a| (0..n).map(|b| dot(nu, &hess[a][b])).collect())
            .collect();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        s += ginv[(a, i)] * ginv[(b, j)] * coord[a][b];
                    }
                }
                m[(i, j)] = s;
            }
        }
        h.push(m);
    }
    Ok(FramedPoint {
        param: u.to_vec(),
        point: f0,
        tangent,
        normal,
        tangent_frame,
        normal_frame,
        h,
        reference: q0.clone(),
        reference_perp,
        tangent_spectrum,
        normal_spectrum,
        analytic: analytic.is_some(),
        coord_to_frame: ginv,
    })
}

/// `H = Σ_α (Σ_i h_{α,ii}) ν_α`
pub fn mean_curvature(fp: &FramedPoint) -> Vec<f64> {
    let mut out = vec![0.0; fp.point.len()];
    for (h, nu) in fp.h.iter().zip(&fp.normal_frame) {
        let tr: f64 = (0..h.rows()).map(|i| h[(i, i)]).sum();
        axpy(tr, nu, &mut out);
    }
    out
}

/// Product of secants of the normal Jordan angles, with multiplicity.
pub fn v_function(fp: &FramedPoint) -> Result<f64> {
    let mut v = 1.0;
    for c in &fp.normal_spectrum.classes {
        if FRAC_PI_2 - c.angle <= 1e-9 {
            return Err(Error::VInfinite);
        }
        v /= c.angle.cos().powi(c.multiplicity as i32);
    }
    Ok(v)
}

/// Product of cosines of the normal Jordan angles, `1/v`.
pub fn w_function(fp: &FramedPoint) -> f64 {
    fp.normal_spectrum
        .classes
        .iter()
        .map(|c| c.angle.cos().powi(c.multiplicity as i32))
        .product()
}

/// `sqrt(det(I + ∇fᵀ∇f))` for the `m × n` gradient of a graph map.
pub fn v_from_jacobian(grad: &Matrix<f64>) -> Result<f64> {
    let n = grad.cols();
    let gram = grad.transpose().matmul(grad)?;
    let mut m = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] += gram[(i, j)];
        }
    }
    let (vals, _) = sym_eigen(&m)?;
    Ok(vals.iter().product::<f64>().sqrt())
}

/// `κ_{θσ} = sin 2θ / (cos 2θ − cos 2σ)`
pub fn kappa(theta: f64, sigma: f64) -> Result<f64> {
    let den = (2.0 * theta).cos() - (2.0 * sigma).cos();
    if den.abs() <= 1e-12 {
        return Err(Error::KappaUndefined);
    }
    Ok((2.0 * theta).sin() / den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CjaSample {
    pub param: Vec<f64>,
    pub normal: Vec<(f64, usize)>,
    pub tangent: Vec<(f64, usize)>,
    pub v: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CjaReport {
    pub samples: Vec<CjaSample>,
    pub is_cja: bool,
    pub reference_normal: Vec<(f64, usize)>,
    pub reference_tangent: Vec<(f64, usize)>,
    /// Largest angle deviation from the reference; infinite when some
    /// sample has a different class structure.
    pub max_deviation: f64,
    pub angle_tol: f64,
    pub g_n: usize,
    pub g_t: usize,
    /// Total multiplicity of the nonzero normal angles.
    pub r: usize,
}

fn signature_deviation(a: &[(f64, usize)], b: &[(f64, usize)]) -> f64 {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.1 != y.1) {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x.0 - y.0).abs()).fold(0.0, f64::max)
}

/// Seeded parameter samples; generation is sequential so that the list does
/// not depend on thread scheduling.
pub fn sample_params(imm: &dyn Immersion, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| imm.sample_param(&mut rng)).collect()
}

/// Checks whether the normal Jordan spectrum is the same at seeded random
/// points.
pub fn cja_check(
    imm: &dyn Immersion,
    q0: &Subspace,
    samples: usize,
    seed: u64,
    angle_tol: f64,
    fd: &FdConfig,
) -> Result<CjaReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter("cja_check needs at least 2 samples".into()));
    }
    let params = sample_params(imm, samples, seed);
    let results: Vec<CjaSample> = params
        .par_iter()
        .map(|u| {
            let fp = frame_at(imm, u, fd, q0)?;
            Ok(CjaSample {
                param: u.clone(),
                normal: fp.normal_spectrum.signature(),
                tangent: fp.tangent_spectrum.signature(),
                v: v_function(&fp).ok(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let reference_normal = results[0].normal.clone();
    let reference_tangent = results[0].tangent.clone();
    let max_deviation = results
        .iter()
        .map(|s| signature_deviation(&reference_normal, &s.normal))
        .fold(0.0, f64::max);
    let r = reference_normal
        .iter()
        .filter(|(a, _)| *a > FD_CLUSTER_TOL)
        .map(|(_, m)| m)
        .sum();
    Ok(CjaReport {
        is_cja: max_deviation <= angle_tol,
        g_n: reference_normal.len(),
        g_t: reference_tangent.len(),
        r,
        reference_normal,
        reference_tangent,
        max_deviation,
        angle_tol,
        samples: results,
    })
}

/// Vectors of one angle class, with their positions in the frame when the
/// frame is analytic.
#[derive(Debug, Clone)]
pub struct ClassFrame {
    pub angle: f64,
    pub basis: Vec<Vec<f64>>,
    pub indices: Vec<usize>,
}

impl ClassFrame {
    fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for b in &self.basis {
            axpy(dot(b, x), b, &mut out);
        }
        out
    }

    fn is_boundary(&self) -> bool {
        is_boundary(self.angle)
    }
}

fn is_boundary(angle: f64) -> bool {
    angle <= FD_CLUSTER_TOL || angle >= FRAC_PI_2 - FD_CLUSTER_TOL
}

fn snap(angle: f64) -> f64 {
    if angle <= FD_CLUSTER_TOL {
        0.0
    } else if angle >= FRAC_PI_2 - FD_CLUSTER_TOL {
        FRAC_PI_2
    } else {
        angle
    }
}

fn same_angle(a: f64, b: f64) -> bool {
    (a - b).abs() <= FD_CLUSTER_TOL
}

/// Tangent and normal angle classes at a point together with the
/// anti-involutions of the interior classes. Boundary angles are pinned to
/// 0 or π/2 and carry the zero map.
#[derive(Debug, Clone)]
pub struct AngleStructure {
    pub tangent: Vec<ClassFrame>,
    pub normal: Vec<ClassFrame>,
    phis: Vec<AntiInvolution<f64>>,
}

impl AngleStructure {
    pub fn new(fp: &FramedPoint) -> Result<Self> {
        let classes = |spec: &JordanSpectrum<f64>, frame: &[Vec<f64>], measure: &dyn Fn(&[f64]) -> f64| {
            let mut out: Vec<ClassFrame> = spec
                .classes
                .iter()
                .map(|c| ClassFrame {
                    angle: snap(c.angle),
                    basis: if fp.analytic {
                        Vec::new()
                    } else {
                        c.directions_in_p.vectors().to_vec()
                    },
                    indices: Vec::new(),
                })
                .collect();
            if fp.analytic {
                for (i, v) in frame.iter().enumerate() {
                    let a = measure(v);
                    let slot = spec
                        .classes
                        .iter()
                        .position(|c| same_angle(c.angle, a))
                        .ok_or_else(|| {
                            Error::Inapplicable(format!("frame vector {i} at angle {a} matches no class"))
                        })?;
                    out[slot].basis.push(v.clone());
                    out[slot].indices.push(i);
                }
                for (c, s) in out.iter().zip(&spec.classes) {
                    if c.basis.len() != s.multiplicity {
                        return Err(Error::Inapplicable(
                            "analytic frame is not aligned with the angle classes".into(),
                        ));
                    }
                }
            } else {
                let mut next = 0;
                for c in out.iter_mut() {
                    c.indices = (next..next + c.basis.len()).collect();
                    next += c.basis.len();
                }
            }
            Ok(out)
        };
        let tangent = classes(&fp.tangent_spectrum, &fp.tangent_frame, &|v| {
            tangent_angle(&fp.reference, v)
        })?;
        let normal = classes(&fp.normal_spectrum, &fp.normal_frame, &|v| {
            normal_angle(&fp.reference, v)
        })?;
        let mut phis = Vec::new();
        for c in &fp.normal_spectrum.classes {
            if !is_boundary(c.angle) {
                phis.push(anti_involution(&fp.normal, &fp.reference, c)?);
            }
        }
        Ok(Self { tangent, normal, phis })
    }

    /// Φ_θ applied to `x`; the zero map at boundary angles.
    pub fn phi(&self, theta: f64, x: &[f64]) -> Result<Vec<f64>> {
        if is_boundary(theta) {
            return Ok(vec![0.0; x.len()]);
        }
        let phi = self
            .phis
            .iter()
            .find(|p| same_angle(p.theta, theta))
            .ok_or_else(|| Error::Inapplicable(format!("no normal angle class at {theta}")))?;
        phi.apply(x)
    }

    pub fn tangent_class(&self, theta: f64) -> Option<&ClassFrame> {
        self.tangent.iter().find(|c| same_angle(c.angle, theta))
    }

    pub fn normal_class(&self, theta: f64) -> Option<&ClassFrame> {
        self.normal.iter().find(|c| same_angle(c.angle, theta))
    }
}

fn check_in_class(class: &ClassFrame, vs: &[&[f64]]) -> Result<()> {
    for v in vs {
        let off = norm(&sub(v, &class.project(v)));
        if off > 1e-6 * norm(v).max(1.0) {
            return Err(Error::NotInAngleSpace(off));
        }
    }
    Ok(())
}

/// `R_{θσ}(v₁,v₂,v₃,v₄) = ⟨B^σ_{v₁v₃}, B^σ_{v₂v₄}⟩ − ⟨B^σ_{v₁v₄}, B^σ_{v₂v₃}⟩`
/// with `B^σ` the component in the normal angle space of σ.
pub fn rt_tensor(fp: &FramedPoint, st: &AngleStructure, theta: f64, sigma: f64, v: [&[f64]; 4]) -> Result<f64> {
    let tc = st
        .tangent_class(theta)
        .ok_or_else(|| Error::Inapplicable(format!("no tangent class at {theta}")))?;
    check_in_class(tc, &v)?;
    let ns = st
        .normal_class(sigma)
        .ok_or_else(|| Error::Inapplicable(format!("no normal class at {sigma}")))?;
    let bs = |x: &[f64], y: &[f64]| ns.project(&fp.b(x, y));
    Ok(dot(&bs(v[0], v[2]), &bs(v[1], v[3])) - dot(&bs(v[0], v[3]), &bs(v[1], v[2])))
}

/// `U_{θσ}(v₁,v₂,v₃,v₄) = ⟨(A^{Φθ(v₃)}v₁)_σ, (A^{Φθ(v₄)}v₂)_σ⟩ − ⟨(A^{Φθ(v₄)}v₁)_σ, (A^{Φθ(v₃)}v₂)_σ⟩`
/// with `(·)_σ` the component in the tangent angle space of σ.
pub fn ut_tensor(fp: &FramedPoint, st: &AngleStructure, theta: f64, sigma: f64, v: [&[f64]; 4]) -> Result<f64> {
    let tc = st
        .tangent_class(theta)
        .ok_or_else(|| Error::Inapplicable(format!("no tangent class at {theta}")))?;
    check_in_class(tc, &v)?;
    let ts = st
        .tangent_class(sigma)
        .ok_or_else(|| Error::Inapplicable(format!("no tangent class at {sigma}")))?;
    let phi3 = st.phi(theta, v[2])?;
    let phi4 = st.phi(theta, v[3])?;
    let a = |nu: &[f64], x: &[f64]| ts.project(&fp.shape(nu, x));
    Ok(dot(&a(&phi3, v[0]), &a(&phi4, v[1])) - dot(&a(&phi4, v[0]), &a(&phi3, v[1])))
}

/// Connection coefficients of the analytic frame:
/// `gamma[i][j][k] = ⟨∇_{e_i} e_j, e_k⟩`, `gamma_bar[i][α][β] = ⟨∇_{e_i} ν_α, ν_β⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    pub gamma: Vec<Vec<Vec<f64>>>,
    pub gamma_bar: Vec<Vec<Vec<f64>>>,
}

impl Connection {
    /// Largest `|Γ_{ij}^k + Γ_{ik}^j|` and `|Γ̄_{iα}^β + Γ̄_{iβ}^α|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for table in [&self.gamma, &self.gamma_bar] {
            for g in table {
                for j in 0..g.len() {
                    for k in 0..g.len() {
                        worst = worst.max((g[j][k] + g[k][j]).abs());
                    }
                }
            }
        }
        worst
    }
}

fn flatten(fr: &Frame) -> Vec<f64> {
    fr.tangent.iter().chain(&fr.normal).flatten().copied().collect()
}

pub fn connection_coeffs(imm: &dyn Immersion, fp: &FramedPoint, fd: &FdConfig) -> Result<Connection> {
    let u = &fp.param;
    if imm.analytic_frame(u).is_none() {
        return Err(Error::NoFrameField);
    }
    let n = fp.dim();
    let m = fp.codim();
    let d = fp.point.len();
    let scales = imm.param_scales(u);
    // ∂_a of every frame vector, flattened
    let mut partials = Vec::with_capacity(n);
    for a in 0..n {
        let frame_at_offset = |t: f64| -> Result<Vec<f64>> {
            let mut x = u.clone();
            x[a] += t;
            if !imm.contains(&x) {
                return Err(Error::OutsideDomain(format!("{x:?}")));
            }
            imm.analytic_frame(&x).map(|f| flatten(&f)).ok_or(Error::NoFrameField)
        };
        let central = |mult: f64| -> Result<Vec<f64>> {
            let h = scales[a] * fd.step_first * mult;
            let p = frame_at_offset(h)?;
            let q = frame_at_offset(-h)?;
            Ok(p.iter().zip(&q).map(|(x, y)| (x - y) / (2.0 * h)).collect())
        };
        let d1 = central(1.0)?;
        partials.push(if fd.richardson {
            let d2 = central(2.0)?;
            d1.iter().zip(&d2).map(|(x, y)| (4.0 * x - y) / 3.0).collect()
        } else {
            d1
        });
    }
    // derivative of frame vector `slot` along e_i
    let along = |i: usize, slot: usize| -> Vec<f64> {
        let mut out = vec![0.0; d];
        for (a, p) in partials.iter().enumerate() {
            axpy(fp.coord_to_frame[(a, i)], &p[slot * d..(slot + 1) * d], &mut out);
        }
        out
    };
    let gamma = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let dj = along(i, j);
                    fp.tangent_frame.iter().map(|ek| dot(&dj, ek)).collect()
                })
                .collect()
        })
        .collect();
    let gamma_bar = (0..n)
        .map(|i| {
            (0..m)
                .map(|al| {
                    let dn = along(i, n + al);
                    fp.normal_frame.iter().map(|nb| dot(&dn, nb)).collect()
                })
                .collect()
        })
        .collect();
    Ok(Connection { gamma, gamma_bar })
}

/// A frame adapted to a coassociative 4-fold: `ν₃ = ν₁ν₂`, `e₄ ∈ ℍe` and
/// `e_α = −ν_α e₄`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoassociativeFrame {
    pub tangent: Vec<Vec<f64>>,
    pub normal: Vec<Vec<f64>>,
    /// Angles of `ν₁, ν₂, ν₃` with `θ₃ = θ₁ + θ₂`; empty in the degenerate
    /// cases.
    pub theta: Vec<f64>,
}

pub fn coassociative_frame(fp: &FramedPoint) -> Result<CoassociativeFrame> {
    if fp.point.len() != 7 || fp.dim() != 4 {
        return Err(Error::Inapplicable("needs a 4-fold in R^7".into()));
    }
    let (ok, _) = is_associative(&fp.normal, 1e-8)?;
    if !ok {
        return Err(Error::NotCoassociative);
    }
    let (nu, e4, theta) = match associative_frame(&fp.normal, FD_CLUSTER_TOL)? {
        AssociativeCase::Generic(f) => (
            f.x.iter().map(|x| x.to_im7()).collect::<Vec<_>>(),
            f.epsilon.to_im7(),
            f.theta.to_vec(),
        ),
        _ => {
            let v = fp.normal.vectors();
            let nu3 = im7_mul(&v[0], &v[1]);
            let he = Subspace::coordinate(7, &[3, 4, 5, 6]);
            let s = jordan_spectrum(&fp.tangent, &he, FD_CLUSTER_TOL)?;
            let zero = s
                .classes
                .first()
                .filter(|c| c.angle <= FD_CLUSTER_TOL)
                .ok_or(Error::NotCoassociative)?;
            let e4 = zero.directions_in_p.vectors()[0].clone();
            (vec![v[0].clone(), v[1].clone(), nu3], e4, Vec::new())
        }
    };
    let mut tangent: Vec<Vec<f64>> = nu.iter().map(|n| scaled(-1.0, &im7_mul(n, &e4))).collect();
    tangent.push(e4);
    for e in &tangent {
        if norm(&fp.tangent.reject(e)?) > 1e-8 {
            return Err(Error::NotCoassociative);
        }
    }
    Ok(CoassociativeFrame {
        tangent,
        normal: nu,
        theta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IdentityId {
    NullPhi,
    NullSame,
    NullBoundary,
    STangent,
    SNormal,
    Constraint,
    CoassocH,
    GammaLo,
}

impl IdentityId {
    pub const ALL: [IdentityId; 8] = [
        IdentityId::NullPhi,
        IdentityId::NullSame,
        IdentityId::NullBoundary,
        IdentityId::STangent,
        IdentityId::SNormal,
        IdentityId::Constraint,
        IdentityId::CoassocH,
        IdentityId::GammaLo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::NullPhi => "NULL_PHI",
            IdentityId::NullSame => "NULL_SAME",
            IdentityId::NullBoundary => "NULL_BOUNDARY",
            IdentityId::STangent => "S_TANGENT",
            IdentityId::SNormal => "S_NORMAL",
            IdentityId::Constraint => "CONSTRAINT",
            IdentityId::CoassocH => "COASSOC_H",
            IdentityId::GammaLo => "GAMMA_LO",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            IdentityId::NullPhi | IdentityId::NullSame | IdentityId::NullBoundary | IdentityId::CoassocH => {
                B_IDENTITY_TOL
            }
            IdentityId::STangent | IdentityId::SNormal | IdentityId::Constraint | IdentityId::GammaLo => {
                CONNECTION_IDENTITY_TOL
            }
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == norm)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown identity id {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub identity_id: IdentityId,
    pub param: Vec<f64>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Everything identity checks at one point share.
pub struct PointContext<'a> {
    pub imm: &'a dyn Immersion,
    pub fd: FdConfig,
    pub fp: FramedPoint,
    pub structure: AngleStructure,
    connection: Option<Connection>,
}

impl<'a> PointContext<'a> {
    pub fn new(imm: &'a dyn Immersion, u: &[f64], fd: &FdConfig) -> Result<Self> {
        let fp = frame_at(imm, u, fd, &imm.reference_plane())?;
        let structure = AngleStructure::new(&fp)?;
        let connection = if fp.analytic {
            Some(connection_coeffs(imm, &fp, fd)?)
        } else {
            None
        };
        Ok(Self {
            imm,
            fd: *fd,
            fp,
            structure,
            connection,
        })
    }

    fn connection(&self) -> Result<&Connection> {
        self.connection.as_ref().ok_or(Error::NoFrameField)
    }

    pub fn residual(&self, id: IdentityId) -> Result<f64> {
        match id {
            IdentityId::NullPhi => self.null_phi(),
            IdentityId::NullSame => self.null_same(),
            IdentityId::NullBoundary => self.null_boundary(),
            IdentityId::STangent => self.s_tangent(),
            IdentityId::SNormal => self.s_normal(),
            IdentityId::Constraint => self.constraint(),
            IdentityId::CoassocH => self.coassoc_h(),
            IdentityId::GammaLo => self.gamma_lo(),
        }
    }

    pub fn verify(&self, id: IdentityId) -> Result<IdentityResidual> {
        let residual = self.residual(id)?;
        let tolerance = id.default_tolerance();
        Ok(IdentityResidual {
            identity_id: id,
            param: self.fp.param.clone(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        })
    }

    fn interior_normal_angles(&self) -> Vec<f64> {
        self.structure
            .normal
            .iter()
            .filter(|c| !c.is_boundary())
            .map(|c| c.angle)
            .collect()
    }

    fn tangent_class(&self, theta: f64) -> Result<&ClassFrame> {
        self.structure
            .tangent_class(theta)
            .ok_or_else(|| Error::Inapplicable(format!("no tangent class at {theta}")))
    }

    fn null_phi(&self) -> Result<f64> {
        let st = &self.structure;
        let mut worst: f64 = 0.0;
        for theta in self.interior_normal_angles() {
            let tc = self.tangent_class(theta)?;
            let phis = tc
                .basis
                .iter()
                .map(|v| st.phi(theta, v))
                .collect::<Result<Vec<_>>>()?;
            for u in &self.fp.tangent_frame {
                for (j, v) in tc.basis.iter().enumerate() {
                    let buv = self.fp.b(u, v);
                    worst = worst.max(dot(&buv, &phis[j]).abs());
                    for (k, w) in tc.basis.iter().enumerate() {
                        let buw = self.fp.b(u, w);
                        worst = worst.max((dot(&buv, &phis[k]) + dot(&buw, &phis[j])).abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    fn null_same(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for theta in self.interior_normal_angles() {
            let tc = self.tangent_class(theta)?;
            let nc = self.structure.normal_class(theta).expect("interior class exists");
            for u in &tc.basis {
                for v in &tc.basis {
                    let b = self.fp.b(u, v);
                    for nu in &nc.basis {
                        worst = worst.max(dot(&b, nu).abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    fn null_boundary(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for nc in self.structure.normal.iter().filter(|c| c.is_boundary()) {
            let Some(tc) = self.structure.tangent_class(nc.angle) else {
                continue;
            };
            for u in &self.fp.tangent_frame {
                for v in &tc.basis {
                    let b = self.fp.b(u, v);
                    for nu in &nc.basis {
                        worst = worst.max(dot(&b, nu).abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    fn s_tangent(&self) -> Result<f64> {
        let g = &self.connection()?.gamma;
        let st = &self.structure;
        let e = &self.fp.tangent_frame;
        let mut worst: f64 = 0.0;
        for ct in &st.tangent {
            for cs in &st.tangent {
                if same_angle(ct.angle, cs.angle) {
                    continue;
                }
                let k_st = kappa(cs.angle, ct.angle)?;
                let k_ts = kappa(ct.angle, cs.angle)?;
                for &j in &ct.indices {
                    let phi_v = st.phi(ct.angle, &e[j])?;
                    for &k in &cs.indices {
                        let phi_w = st.phi(cs.angle, &e[k])?;
                        for (i, ei) in e.iter().enumerate() {
                            let rhs = k_st * dot(&self.fp.b(ei, &e[j]), &phi_w)
                                - k_ts * dot(&self.fp.b(ei, &e[k]), &phi_v);
                            worst = worst.max((g[i][j][k] - rhs).abs());
                        }
                    }
                }
            }
        }
        Ok(worst)
    }

    fn s_normal(&self) -> Result<f64> {
        let gb = &self.connection()?.gamma_bar;
        let st = &self.structure;
        let e = &self.fp.tangent_frame;
        let nu = &self.fp.normal_frame;
        let mut worst: f64 = 0.0;
        for ct in &st.normal {
            for cs in &st.normal {
                if same_angle(ct.angle, cs.angle) {
                    continue;
                }
                let k_ts = kappa(ct.angle, cs.angle)?;
                let k_st = kappa(cs.angle, ct.angle)?;
                for &a in &ct.indices {
                    let phi_mu = st.phi(ct.angle, &nu[a])?;
                    for &b in &cs.indices {
                        let phi_nu = st.phi(cs.angle, &nu[b])?;
                        for (i, ei) in e.iter().enumerate() {
                            let rhs = k_ts * dot(&self.fp.b(ei, &phi_mu), &nu[b])
                                - k_st * dot(&self.fp.b(ei, &phi_nu), &nu[a]);
                            worst = worst.max((gb[i][a][b] - rhs).abs());
                        }
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Both sides of the constraint equation for one interior tangent angle
    /// and one pair `v, w` from its angle space.
    pub fn constraint_sides(&self, theta: f64, v: &[f64], w: &[f64]) -> Result<(f64, f64)> {
        let st = &self.structure;
        let mut lhs = 0.0;
        for ns in &st.normal {
            if same_angle(ns.angle, theta) {
                continue;
            }
            lhs += kappa(theta, ns.angle)? * rt_tensor(&self.fp, st, theta, ns.angle, [v, w, v, w])?;
        }
        let mut rhs = 0.0;
        for ts in &st.tangent {
            if same_angle(ts.angle, theta) {
                continue;
            }
            rhs += kappa(theta, ts.angle)? * ut_tensor(&self.fp, st, theta, ts.angle, [v, w, v, w])?;
        }
        Ok((lhs, 3.0 * rhs))
    }

    fn constraint(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for tc in self.structure.tangent.iter().filter(|c| !c.is_boundary()) {
            for v in &tc.basis {
                for w in &tc.basis {
                    let (l, r) = self.constraint_sides(tc.angle, v, w)?;
                    worst = worst.max((l - r).abs());
                }
            }
        }
        Ok(worst)
    }

    fn coassoc_h(&self) -> Result<f64> {
        let cf = coassociative_frame(&self.fp)?;
        let h = |a: usize, i: usize, j: usize| dot(&self.fp.b(&cf.tangent[i], &cf.tangent[j]), &cf.normal[a]);
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            let rels = [
                h(2, i, 0) - (h(0, i, 2) - h(1, i, 3)),
                h(2, i, 1) - (h(0, i, 3) + h(1, i, 2)),
                h(2, i, 2) - (-h(0, i, 0) - h(1, i, 1)),
                h(2, i, 3) - (-h(0, i, 1) + h(1, i, 0)),
            ];
            for r in rels {
                worst = worst.max(r.abs());
            }
        }
        Ok(worst)
    }

    /// Relations for the frame `e₁ (θ₁), e₂, e₃ (θ), e₄ (0)` with
    /// `ν_α = Φ(e_α)`, where `cos θ₁ = 2/3` and `cos θ = 1/√6`.
    pub fn gamma_lo_terms(&self) -> Result<Vec<(f64, f64)>> {
        let conn = self.connection()?;
        let (g, gb) = (&conn.gamma, &conn.gamma_bar);
        let fp = &self.fp;
        let t1 = (2.0f64 / 3.0).acos();
        let t = (1.0f64 / 6.0f64.sqrt()).acos();
        let expected = [t1, t, t, 0.0];
        if fp.dim() != 4 || fp.codim() != 3 {
            return Err(Error::Inapplicable("needs a 4-fold in R^7".into()));
        }
        for (e, want) in fp.tangent_frame.iter().zip(expected) {
            let got = tangent_angle(&fp.reference, e);
            if (got - want).abs() > FD_CLUSTER_TOL {
                return Err(Error::Inapplicable(format!(
                    "frame angles do not follow the expected labelling ({got} vs {want})"
                )));
            }
        }
        let e = &fp.tangent_frame;
        let nu = &fp.normal_frame;
        for a in 0..3 {
            let phi = self.structure.phi(expected[a], &e[a])?;
            if norm(&sub(&phi, &nu[a])) > 1e-6 {
                return Err(Error::Inapplicable("normal frame is not Φ of the tangent frame".into()));
            }
        }
        let h = |a: usize, i: usize, j: usize| dot(&fp.b(&e[i], &e[j]), &nu[a]);
        let k10 = kappa(t1, 0.0)?;
        let k_tt1 = kappa(t, t1)?;
        let k_t1t = kappa(t1, t)?;
        let k_t0 = kappa(t, 0.0)?;
        let mut terms = Vec::new();
        for i in 0..4 {
            terms.push((g[i][0][3], -k10 * h(0, i, 3)));
            terms.push((g[i][0][1], k_tt1 * h(1, i, 0) - k_t1t * h(0, i, 1)));
            terms.push((g[i][1][3], -k_t0 * h(1, i, 3)));
            terms.push((g[i][0][2], k_tt1 * h(2, i, 0) - k_t1t * h(0, i, 2)));
            terms.push((g[i][2][3], -k_t0 * h(2, i, 3)));
        }
        terms.push((gb[1][0][2], k_tt1 * h(0, 1, 2) - k_t1t * h(2, 1, 0)));
        terms.push((gb[1][0][2], 0.0));
        Ok(terms)
    }

    fn gamma_lo(&self) -> Result<f64> {
        let conn = self.connection()?;
        let terms = self.gamma_lo_terms()?;
        let worst = terms.iter().map(|(l, r)| (l - r).abs()).fold(0.0, f64::max);
        Ok(worst.max(conn.antisymmetry_defect()))
    }
}

/// Evaluates one identity at `u`.
pub fn verify_identity(imm: &dyn Immersion, id: IdentityId, u: &[f64], fd: &FdConfig) -> Result<IdentityResidual> {
    PointContext::new(imm, u, fd)?.verify(id)
}
