//! Built-in immersions: an affine baseline, circle, cylinder, catenoid × ℝ,
//! the Lawson–Osserman cone over Sp₁ and its description as the graph of η,
//! plus a quadratic graph that does not have constant Jordan angles.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Frame, Immersion};
use crate::linalg::{complete_basis, norm, svd_thin, Matrix};
use crate::octonion::{Octonion, Quaternion};
use crate::subspace;

type Subspace = subspace::Subspace<f64>;
type Quat = Quaternion<f64>;
type Oct = Octonion<f64>;

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Affine,
    Circle,
    Cylinder,
    CatenoidCrossR,
    LoCone,
    LoGraph,
    QuadraticGraph,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::Affine,
        ModelKind::Circle,
        ModelKind::Cylinder,
        ModelKind::CatenoidCrossR,
        ModelKind::LoCone,
        ModelKind::LoGraph,
        ModelKind::QuadraticGraph,
    ];

    /// Name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            ModelKind::Affine => "affine",
            ModelKind::Circle => "circle",
            ModelKind::Cylinder => "cylinder",
            ModelKind::CatenoidCrossR => "catenoid-cross-r",
            ModelKind::LoCone => "lo-cone",
            ModelKind::LoGraph => "lo-graph",
            ModelKind::QuadraticGraph => "quadratic-graph",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ModelKind::Affine => "graph of a linear map x -> Sx; params n, m, slope or slopes (row-major)",
            ModelKind::Circle => "unit circle in the xy-plane of R^3, Q0 = xy-plane",
            ModelKind::Cylinder => "circular cylinder in R^3, Q0 = z-axis",
            ModelKind::CatenoidCrossR => "catenoid times a line in R^5, Q0 = last two coordinates",
            ModelKind::LoCone => "cone r[(sqrt5/2) q a q* + q* e] over Sp1 in Im O; params a, q0",
            ModelKind::LoGraph => "graph of eta(x) = (sqrt5/(2|x|)) x* eps x over |x| in [0.5, 2]; param eps",
            ModelKind::QuadraticGraph => "graph (x, y, x^2, 0, 0); angles vary from point to point",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Affine => &["n", "m", "slope", "slopes"],
            ModelKind::LoCone => &["a", "q0"],
            ModelKind::LoGraph => &["eps"],
            _ => &[],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        ModelKind::ALL
            .into_iter()
            .find(|k| k.cli_name() == key)
            .ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

/// A model name with raw `name=value` parameters, in the order given.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub params: Vec<(String, String)>,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        Self { kind, params: Vec::new() }
    }

    pub fn parse(name: &str, params: &[String]) -> Result<Self> {
        let kind = name.parse()?;
        let params = params
            .iter()
            .map(|p| {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidParameter(format!("expected name=value, got {p:?}")))?;
                Ok((k.trim().to_string(), v.trim().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kind, params })
    }

    pub fn with(mut self, name: &str, value: &str) -> Self {
        self.params.push((name.to_string(), value.to_string()));
        self
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.params.iter().rev().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    fn check_names(&self) -> Result<()> {
        let known = self.kind.param_names();
        for (k, _) in &self.params {
            if !known.contains(&k.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "model {} has no parameter {k:?}",
                    self.kind
                )));
            }
        }
        Ok(())
    }
}

fn parse_real(name: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{name}: not a number: {v:?}")))?;
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("{name}: not finite")));
    }
    Ok(x)
}

fn parse_count(name: &str, v: &str) -> Result<usize> {
    match v.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(Error::InvalidParameter(format!("{name}: expected a positive integer, got {v:?}"))),
    }
}

/// Quaternion literal: `1`, `i`, `j`, `k` with an optional sign, or a
/// 4-tuple `w,x,y,z` (parentheses or brackets allowed).
pub fn parse_quaternion(s: &str) -> Result<Quat> {
    let t = s.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, t.strip_prefix('+').unwrap_or(t).trim()),
    };
    let unit = match body {
        "1" => Some(Quat::one()),
        "i" => Some(Quat::i()),
        "j" => Some(Quat::j()),
        "k" => Some(Quat::k()),
        _ => None,
    };
    if let Some(q) = unit {
        return Ok(q.scale(sign));
    }
    let inner = t.trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::InvalidParameter(format!("not a quaternion literal: {s:?}")));
    }
    let mut c = [0.0; 4];
    for (ci, p) in c.iter_mut().zip(&parts) {
        *ci = parse_real("quaternion", p)?;
    }
    Ok(Quat::from_array(c))
}

fn unit_imaginary(name: &str, q: Quat) -> Result<Quat> {
    if q.re().abs() > UNIT_TOL || (q.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidParameter(format!("{name} must be a unit imaginary quaternion")));
    }
    Ok(q)
}

fn unit_quaternion(name: &str, q: Quat) -> Result<Quat> {
    if (q.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidParameter(format!("{name} must be a unit quaternion")));
    }
    Ok(q)
}

/// Builds the immersion described by `spec`.
pub fn build(spec: &ModelSpec) -> Result<Box<dyn Immersion + Send>> {
    spec.check_names()?;
    Ok(match spec.kind {
        ModelKind::Affine => {
            let n = spec.get("n").map(|v| parse_count("n", v)).transpose()?.unwrap_or(2);
            let m = spec.get("m").map(|v| parse_count("m", v)).transpose()?.unwrap_or(2);
            let slope = match (spec.get("slope"), spec.get("slopes")) {
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidParameter("give slope or slopes, not both".into()));
                }
                (_, Some(list)) => {
                    let vals = list
                        .trim_matches(['[', ']', '(', ')'])
                        .split(',')
                        .map(|p| parse_real("slopes", p.trim()))
                        .collect::<Result<Vec<_>>>()?;
                    Matrix::new(m, n, vals).map_err(|_| {
                        Error::InvalidParameter(format!("slopes needs {} entries (row-major {m}x{n})", m * n))
                    })?
                }
                (Some(s), None) => {
                    let s = parse_real("slope", s)?;
                    let mut a = Matrix::zeros(m, n);
                    for i in 0..m.min(n) {
                        a[(i, i)] = s;
                    }
                    a
                }
                (None, None) => Matrix::zeros(m, n),
            };
            Box::new(Affine::new(slope))
        }
        ModelKind::Circle => Box::new(Circle),
        ModelKind::Cylinder => Box::new(Cylinder),
        ModelKind::CatenoidCrossR => Box::new(CatenoidCrossR),
        ModelKind::LoCone => {
            let a = spec.get("a").map(parse_quaternion).transpose()?.unwrap_or(Quat::i());
            let q0 = spec.get("q0").map(parse_quaternion).transpose()?.unwrap_or(Quat::one());
            Box::new(LoCone::new(a, q0)?)
        }
        ModelKind::LoGraph => {
            let eps = spec.get("eps").map(parse_quaternion).transpose()?.unwrap_or(Quat::i());
            Box::new(LoGraph::new(eps)?)
        }
        ModelKind::QuadraticGraph => Box::new(QuadraticGraph),
    })
}

/// Graph `x ↦ (x, Sx)` of a linear map `S: ℝⁿ → ℝᵐ` over `[−1, 1]ⁿ`,
/// measured against the target coordinate plane.
#[derive(Debug, Clone)]
pub struct Affine {
    slope: Matrix<f64>,
    frame: Frame,
}

impl Affine {
    pub fn new(slope: Matrix<f64>) -> Self {
        let (m, n) = (slope.rows(), slope.cols());
        let svd = svd_thin(&slope);
        let lift = |a: &[f64], b: &[f64]| a.iter().chain(b).copied().collect::<Vec<_>>();
        let mut tangent = Vec::with_capacity(n);
        let mut normal = Vec::with_capacity(m);
        let mut right: Vec<Vec<f64>> = svd.right.columns().to_vec();
        let mut left: Vec<Vec<f64>> = svd.left.columns().to_vec();
        for ((v, u), s) in right.iter().zip(&left).zip(&svd.singular_values) {
            let c = 1.0 / (1.0 + s * s).sqrt();
            tangent.push(lift(v, &u.iter().map(|x| x * s).collect::<Vec<_>>()).iter().map(|x| x * c).collect());
            normal.push(lift(&v.iter().map(|x| -x * s).collect::<Vec<_>>(), u).iter().map(|x| x * c).collect());
        }
        let k = svd.singular_values.len();
        for w in complete_basis(n, &mut right, n - k) {
            tangent.push(lift(&w, &vec![0.0; m]));
        }
        for w in complete_basis(m, &mut left, m - k) {
            normal.push(lift(&vec![0.0; n], &w));
        }
        Self {
            slope,
            frame: Frame { tangent, normal },
        }
    }

    pub fn slope(&self) -> &Matrix<f64> {
        &self.slope
    }
}

impl Immersion for Affine {
    fn name(&self) -> &str {
        "affine"
    }
    fn param_dim(&self) -> usize {
        self.slope.cols()
    }
    fn ambient_dim(&self) -> usize {
        self.slope.rows() + self.slope.cols()
    }
    fn evaluate(&self, u: &[f64]) -> Vec<f64> {
        let mut out = u.to_vec();
        out.extend(self.slope.matvec(u).expect("dims"));
        out
    }
    fn contains(&self, u: &[f64]) -> bool {
        u.iter().all(|x| x.abs() <= 1.0)
    }
    fn sample_param(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.param_dim()).map(|_| rng.random_range(-0.99..0.99)).collect()
    }
    fn analytic_frame(&self, _u: &[f64]) -> Option<Frame> {
        Some(self.frame.clone())
    }
    fn reference_plane(&self) -> Subspace {
        let n = self.slope.cols();
        let axes: Vec<usize> = (n..n + self.slope.rows()).collect();
        Subspace::coordinate(self.ambient_dim(), &axes)
    }
}

/// `t ↦ (cos t, sin t, 0)`, periodic in t; Q₀ is the xy-plane.
#[derive(Debug, Clone, Copy)]
pub struct Circle;

impl Immersion for Circle {
    fn name(&self) -> &str {
        "circle"
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn evaluate(&self, u: &[f64]) -> Vec<f64> {
        vec![u[0].cos(), u[0].sin(), 0.0]
    }
    fn contains(&self, u: &[f64]) -> bool {
        u[0].is_finite()
    }
    fn sample_param(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        vec![rng.random_range(0.0..TAU)]
    }
    fn analytic_frame(&self, u: &[f64]) -> Option<Frame> {
        let (s, c) = u[0].sin_cos();
        Some(Frame {
            tangent: vec![vec![-s, c, 0.0]],
            normal: vec![vec![c, s, 0.0], vec![0.0, 0.0, 1.0]],
        })
    }
    fn reference_plane(&self) -> Subspace {
        Subspace::coordinate(3, &[0, 1])
    }
}

/// `(t, z) ↦ (cos t, sin t, z)` with `|z| ≤ 1`; Q₀ is the z-axis.
#[derive(Debug, Clone, Copy)]
pub struct Cylinder;

impl Immersion for Cylinder {
    fn name(&self) -> &str {
        "cylinder"
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn evaluate(&self, u: &[f64]) -> Vec<f64> {
        vec![u[0].cos(), u[0].sin(), u[1]]
    }
    fn contains(&self, u: &[f64]) -> bool {
        u[0].is_finite() && u[1].abs() <= 1.0
    }
    fn sample_param(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        vec![rng.random_range(0.0..TAU), rng.random_range(-0.99..0.99)]
    }
    fn analytic_frame(&self, u: &[f64]) -> Option<Frame> {
        let (s, c) = u[0].sin_cos();
        Some(Frame {
            tangent: vec![vec![-s, c, 0.0], vec![0.0, 0.0, 1.0]],
            normal: vec![vec![c, s, 0.0]],
        })
    }
    fn reference_plane(&self) -> Subspace {
        Subspace::coordinate(3, &[2])
    }
}

/// `(s, φ, t) ↦ (cosh s cos φ, cosh s sin φ, s, t, 0)` with `|s|, |t| ≤ 1`;
/// Q₀ is spanned by the last two coordinates.
#[derive(Debug, Clone, Copy)]
pub struct CatenoidCrossR;

impl Immersion for CatenoidCrossR {
    fn name(&self) -> &str {
        "catenoid_cross_r"
    }
    fn param_dim(&self) -> usize {
        3
    }
    fn ambient_dim(&self) -> usize {
        5
    }
    fn evaluate(&self, u: &[f64]) -> Vec<f64> {
        let (s, phi, t) = (u[0], u[1], u[2]);
        vec![s.cosh() * phi.cos(), s.cosh() * phi.sin(), s, t, 0.0]
    }
    fn contains(&self, u: &[f64]) -> bool {
        u[0].abs() <= 1.0 && u[1].is_finite() && u[2].abs() <= 1.0
    }
    fn sample_param(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        vec![
            rng.random_range(-0.99..0.99),
            rng.random_range(0.0..TAU),
            rng.random_range(-0.99..0.99),
        ]
    }
    fn analytic_frame(&self, u: &[f64]) -> Option<Frame> {
        let (s, phi) = (u[0], u[1]);
        let (sp, cp) = phi.sin_cos();
        let ch = s.cosh();
        let sh = s.sinh();
        Some(Frame {
            tangent: vec![
                vec![sh * cp / ch, sh * sp / ch, 1.0 / ch, 0.0, 0.0],
                vec![-sp, cp, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0, 0.0],
            ],
            normal: vec![
                vec![cp / ch, sp / ch, -sh / ch, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, 0.0, 1.0],
            ],
        })
    }
    fn reference_plane(&self) -> Subspace {
        Subspace::coordinate(5, &[3, 4])
    }
}

/// `r[(√5/2) q a q̄ + q̄ e]` in Im 𝕆 coordinates.
pub fn lo_cone_point(q: Quat, r: f64, a: Quat) -> Result<Vec<f64>> {
    unit_quaternion("q", q)?;
    unit_imaginary("a", a)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter("r must be positive".into()));
    }
    Ok(cone_point(q, r, a))
}

fn cone_point(q: Quat, r: f64, a: Quat) -> Vec<f64> {
    let half_sqrt5 = 5f64.sqrt() / 2.0;
    Oct::new((q * a * q.conj()).scale(half_sqrt5), q.conj()).scale(r).to_im7()
}

/// The orthonormal frame of the cone at `(q, r)`: tangent `e₁..e₄` with
/// angles `arccos(2/3), arccos(√6/6), arccos(√6/6), 0` against ℍe and
/// normal `ν_α = Φ(e_α)`.
pub fn lo_cone_frame(q: Quat, r: f64, a: Quat) -> Result<Frame> {
    lo_cone_point(q, r, a)?;
    Ok(cone_frame(q, a))
}

fn cone_frame(q: Quat, a: Quat) -> Frame {
    let a1 = q * a * q.conj();
    let mut a2 = Quat::j() - a1.scale(a1.dot(Quat::j()));
    if a2.norm() < 1e-6 {
        a2 = Quat::k() - a1.scale(a1.dot(Quat::k()));
    }
    let a2 = a2.normalized();
    let a3 = a1 * a2;
    let eps = Oct::new(Quat::zero(), q.conj());
    let (o1, o2, o3) = (Oct::from_quaternion(a1), Oct::from_quaternion(a2), Oct::from_quaternion(a3));
    let s5 = 5f64.sqrt();
    let s30 = 30f64.sqrt();
    let s6 = 6f64.sqrt();
    let e = [
        o1.scale(s5 / 3.0) + eps.scale(2.0 / 3.0),
        o3.scale(-s30 / 6.0) - (o2 * eps).scale(s6 / 6.0),
        o2.scale(s30 / 6.0) - (o3 * eps).scale(s6 / 6.0),
        -(o1 * eps),
    ];
    let cosines = [2.0 / 3.0, s6 / 6.0, s6 / 6.0];
    let normal = e[..3]
        .iter()
        .zip(cosines)
        .map(|(&x, c)| {
            let s = (1.0 - c * c).sqrt();
            let he = Oct::new(Quat::zero(), x.b);
            (x.scale(c) - he.scale(1.0 / c)).scale(1.0 / s).to_im7()
        })
        .collect();
    Frame {
        tangent: e.iter().map(|x| x.to_im7()).collect(),
        normal,
    }
}

/// `η(x) = (√5/(2|x|)) x̄εx`
pub fn eta(x: Quat, eps: Quat) -> Result<Quat> {
    unit_imaginary("eps", eps)?;
    let n = x.norm();
    if n == 0.0 {
        return Err(Error::ConeVertex);
    }
    Ok((x.conj() * eps * x).scale(5f64.sqrt() / (2.0 * n)))
}

/// The cone over Sp₁ in the chart `(b, r) ↦ (exp(b) q₀, r)`, `b ∈ Im ℍ`,
/// `|b| < 1`, `r ∈ [0.1, 2]`. Q₀ = Im ℍ.
#[derive(Debug, Clone, Copy)]
pub struct LoCone {
    a: Quat,
    q0: Quat,
}

impl LoCone {
    pub const R_MIN: f64 = 0.1;
    pub const R_MAX: f64 = 2.0;

    pub fn new(a: Quat, q0: Quat) -> Result<Self> {
        Ok(Self {
            a: unit_imaginary("a", a)?,
            q0: unit_quaternion("q0", q0)?,
        })
    }

    pub fn axis(&self) -> Quat {
        self.a
    }

    /// The unit quaternion and radius at a chart point.
    pub fn chart(&self, u: &[f64]) -> (Quat, f64) {
        (Quat::exp_imaginary([u[0], u[1], u[2]]) * self.q0, u[3])
    }
}

impl Immersion for LoCone {
    fn name(&self) -> &str {
        "lo_cone"
    }
    fn param_dim(&self) -> usize {
        4
    }
    fn ambient_dim(&self) -> usize {
        7
    }
    fn evaluate(&self, u: &[f64]) -> Vec<f64> {
        let (q, r) = self.chart(u);
        cone_point(q, r, self.a)
    }
    fn contains(&self, u: &[f64]) -> bool {
        norm(&u[..3]) < 1.0 && (Self::R_MIN..=Self::R_MAX).contains(&u[3])
    }
    fn sample_param(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let b = loop {
            let b: Vec<f64> = (0..3).map(|_| rng.random_range(-0.95..0.95)).collect();
            if norm(&b) <= 0.95 {
                break b;
            }
        };
        let r = rng.random_range(0.101..1.999);
        vec![b[0], b[1], b[2], r]
    }
    fn param_scales(&self, u: &[f64]) -> Vec<f64> {
        vec![1.0, 1.0, 1.0, u[3]]
    }
    fn analytic_frame(&self, u: &[f64]) -> Option<Frame> {
        let (q, _) = self.chart(u);
        Some(cone_frame(q, self.a))
    }
    fn reference_plane(&self) -> Subspace {
        Subspace::coordinate(7, &[0, 1, 2])
    }
}

/// `x ↦ (η(x), x)` for `x ∈ ℍ ≅ ℍe`, `|x| ∈ [0.5, 2]`, with η in the Im ℍ
/// coordinates. Q₀ = Im ℍ.
#[derive(Debug, Clone, Copy)]
pub struct LoGraph {
    eps: Quat,
}

impl LoGraph {
    pub const R_MIN: f64 = 0.5;
    pub const R_MAX: f64 = 2.0;

    pub fn new(eps: Quat) -> Result<Self> {
        Ok(Self {
            eps: unit_imaginary("eps", eps)?,
        })
    }
}

impl Immersion for LoGraph {
    fn name(&self) -> &str {
        "lo_graph"
    }
    fn param_dim(&self) -> usize {
        4
    }
    fn ambient_dim(&self) -> usize {
        7
    }
    fn evaluate(&self, u: &[f64]) -> Vec<f64> {
        let x = Quat::new(u[0], u[1], u[2], u[3]);
        let y = eta(x, self.eps).expect("domain excludes the vertex");
        vec![y.x, y.y, y.z, u[0], u[1], u[2], u[3]]
    }
    fn contains(&self, u: &[f64]) -> bool {
        (Self::R_MIN..=Self::R_MAX).contains(&norm(u))
    }
    fn sample_param(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let dir = loop {
            let v: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n = norm(&v);
            if n > 0.1 && n <= 1.0 {
                break v.iter().map(|x| x / n).collect::<Vec<_>>();
            }
        };
        let r = rng.random_range(0.505..1.995);
        dir.iter().map(|x| x * r).collect()
    }
    fn param_scales(&self, u: &[f64]) -> Vec<f64> {
        vec![norm(u); 4]
    }
    fn reference_plane(&self) -> Subspace {
        Subspace::coordinate(7, &[0, 1, 2])
    }
}

/// `(x, y) ↦ (x, y, x², 0, 0)` on `[−1, 1]²`; Q₀ is spanned by the last
/// three coordinates.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticGraph;

impl Immersion for QuadraticGraph {
    fn name(&self) -> &str {
        "quadratic_graph"
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        5
    }
    fn evaluate(&self, u: &[f64]) -> Vec<f64> {
        vec![u[0], u[1], u[0] * u[0], 0.0, 0.0]
    }
    fn contains(&self, u: &[f64]) -> bool {
        u.iter().all(|x| x.abs() <= 1.0)
    }
    fn sample_param(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..2).map(|_| rng.random_range(-0.99..0.99)).collect()
    }
    fn reference_plane(&self) -> Subspace {
        Subspace::coordinate(5, &[2, 3, 4])
    }
}

/// One line per model: CLI name and description.
pub fn list() -> Vec<(&'static str, &'static str)> {
    ModelKind::ALL.iter().map(|k| (k.cli_name(), k.description())).collect()
}
