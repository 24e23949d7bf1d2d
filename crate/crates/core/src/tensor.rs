//! Fixed-dimension multilinear algebra in four dimensions.
//!
//! Vectors and covectors carry their variance in the type so that the natural
//! pairing `k · z` is only available between opposite variances. Levi-Civita
//! contractions are generated by permutation loops instead of materialised
//! `ε` arrays.

use std::fmt::Debug;
use std::ops::Neg;
use std::sync::OnceLock;

use nalgebra::Matrix4;
use num_complex::Complex64;
use num_traits::NumAssign;
use serde::{Deserialize, Serialize};

use crate::error::{QeiError, Result};

pub type C64 = Complex64;
pub type Mat4<T> = [[T; 4]; 4];

/// Real or complex component type.
pub trait Scalar:
    Copy + NumAssign + Neg<Output = Self> + From<f64> + Debug + Send + Sync + 'static
{
    fn modulus(self) -> f64;
    fn conj(self) -> Self;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn conj(self) -> Self {
        self
    }
}

impl Scalar for C64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
}

pub fn zero_mat<T: Scalar>() -> Mat4<T> {
    [[T::zero(); 4]; 4]
}

pub fn to_complex(m: &Mat4<f64>) -> Mat4<C64> {
    let mut out = zero_mat::<C64>();
    for a in 0..4 {
        for b in 0..4 {
            out[a][b] = C64::new(m[a][b], 0.0);
        }
    }
    out
}

/// max-abs entry
pub fn mat_norm<T: Scalar>(m: &Mat4<T>) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .fold(0.0, |acc, x| acc.max(x.modulus()))
}

pub fn mat_mul<T: Scalar>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut out = zero_mat::<T>();
    for i in 0..4 {
        for j in 0..4 {
            let mut s = T::zero();
            for k in 0..4 {
                s += a[i][k] * b[k][j];
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn transpose<T: Scalar>(a: &Mat4<T>) -> Mat4<T> {
    let mut out = zero_mat::<T>();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn lift<T: Scalar>(v: &[f64; 4]) -> [T; 4] {
    [v[0].into(), v[1].into(), v[2].into(), v[3].into()]
}

pub fn dot<T: Scalar>(a: &[T; 4], b: &[T; 4]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub fn euclid_norm(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec4(pub [f64; 4]);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Covec4(pub [f64; 4]);

impl Vec4 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Vec4([a, b, c, d])
    }
    pub fn scale(&self, s: f64) -> Self {
        Vec4(self.0.map(|x| s * x))
    }
    pub fn norm(&self) -> f64 {
        euclid_norm(&self.0)
    }
}

impl Covec4 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Covec4([a, b, c, d])
    }
    /// The natural pairing `k_a z^a`.
    pub fn contract(&self, z: &Vec4) -> f64 {
        dot(&self.0, &z.0)
    }
    pub fn scale(&self, s: f64) -> Self {
        Covec4(self.0.map(|x| s * x))
    }
    pub fn add(&self, o: &Covec4) -> Self {
        Covec4([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }
    pub fn norm(&self) -> f64 {
        euclid_norm(&self.0)
    }
}

fn check_symmetric(g: &Mat4<f64>) -> Result<()> {
    for a in 0..4 {
        for b in 0..a {
            if g[a][b] != g[b][a] {
                return Err(QeiError::InvalidInput(format!(
                    "metric components ({a},{b}) and ({b},{a}) differ"
                )));
            }
        }
    }
    Ok(())
}

fn signature_of(g: &Mat4<f64>) -> (usize, usize, usize) {
    let eig = Matrix4::from_fn(|i, j| g[i][j]).symmetric_eigenvalues();
    let scale = eig.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut s = (0, 0, 0);
    for &e in eig.iter() {
        if e.abs() <= 1e-12 * scale {
            s.2 += 1;
        } else if e < 0.0 {
            s.0 += 1;
        } else {
            s.1 += 1;
        }
    }
    s
}

fn invert(g: &Mat4<f64>) -> Result<Mat4<f64>> {
    let m = Matrix4::from_fn(|i, j| g[i][j]);
    let inv = m
        .try_inverse()
        .ok_or_else(|| QeiError::DegenerateInput("singular 4x4 matrix".into()))?;
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = inv[(i, j)];
        }
    }
    Ok(out)
}

/// Symmetric bilinear form on vectors, `g_{ab}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric4 {
    g: Mat4<f64>,
}

/// Symmetric bilinear form on covectors, `g^{ab}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseMetric4 {
    g: Mat4<f64>,
}

impl Metric4 {
    pub fn new(g: Mat4<f64>) -> Result<Self> {
        check_symmetric(&g)?;
        Ok(Metric4 { g })
    }
    pub fn minkowski() -> Self {
        Metric4 {
            g: diag(-1.0, 1.0, 1.0, 1.0),
        }
    }
    pub fn components(&self) -> &Mat4<f64> {
        &self.g
    }
    pub fn eval(&self, u: &Vec4, v: &Vec4) -> f64 {
        bilinear(&self.g, &u.0, &v.0)
    }
    pub fn lower(&self, v: &Vec4) -> Covec4 {
        Covec4(apply(&self.g, &v.0))
    }
    pub fn inverse(&self) -> Result<InverseMetric4> {
        let mut g = invert(&self.g)?;
        symmetrize(&mut g);
        Ok(InverseMetric4 { g })
    }
    /// (negative, positive, null) eigenvalue counts.
    pub fn signature(&self) -> (usize, usize, usize) {
        signature_of(&self.g)
    }
}

impl InverseMetric4 {
    pub fn new(g: Mat4<f64>) -> Result<Self> {
        check_symmetric(&g)?;
        Ok(InverseMetric4 { g })
    }
    pub fn minkowski() -> Self {
        InverseMetric4 {
            g: diag(-1.0, 1.0, 1.0, 1.0),
        }
    }
    pub fn components(&self) -> &Mat4<f64> {
        &self.g
    }
    pub fn eval(&self, k: &Covec4, l: &Covec4) -> f64 {
        bilinear(&self.g, &k.0, &l.0)
    }
    pub fn eval_generic<T: Scalar>(&self, k: &[T; 4], l: &[T; 4]) -> T {
        let mut s = T::zero();
        for a in 0..4 {
            for b in 0..4 {
                if self.g[a][b] != 0.0 {
                    s += T::from(self.g[a][b]) * k[a] * l[b];
                }
            }
        }
        s
    }
    pub fn raise(&self, k: &Covec4) -> Vec4 {
        Vec4(apply(&self.g, &k.0))
    }
    pub fn raise_generic<T: Scalar>(&self, k: &[T; 4]) -> [T; 4] {
        let mut out = [T::zero(); 4];
        for a in 0..4 {
            for b in 0..4 {
                out[a] += T::from(self.g[a][b]) * k[b];
            }
        }
        out
    }
    pub fn inverse(&self) -> Result<Metric4> {
        let mut g = invert(&self.g)?;
        symmetrize(&mut g);
        Ok(Metric4 { g })
    }
    pub fn signature(&self) -> (usize, usize, usize) {
        signature_of(&self.g)
    }
}

fn symmetrize(g: &mut Mat4<f64>) {
    for a in 0..4 {
        for b in 0..a {
            let m = 0.5 * (g[a][b] + g[b][a]);
            g[a][b] = m;
            g[b][a] = m;
        }
    }
}

pub fn diag(a: f64, b: f64, c: f64, d: f64) -> Mat4<f64> {
    let mut g = [[0.0; 4]; 4];
    g[0][0] = a;
    g[1][1] = b;
    g[2][2] = c;
    g[3][3] = d;
    g
}

fn bilinear(g: &Mat4<f64>, u: &[f64; 4], v: &[f64; 4]) -> f64 {
    let mut s = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            s += g[a][b] * u[a] * v[b];
        }
    }
    s
}

fn apply(g: &Mat4<f64>, v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for a in 0..4 {
        for b in 0..4 {
            out[a] += g[a][b] * v[b];
        }
    }
    out
}

#[inline]
fn idx(a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * 4 + b) * 4 + c) * 4 + d
}

/// Plain rank-4 component array `T^{abcd}` (no symmetry assumed).
#[derive(Clone, Debug, PartialEq)]
pub struct Rank4 {
    c: Box<[f64; 256]>,
}

impl Rank4 {
    pub fn zeros() -> Self {
        Rank4 {
            c: Box::new([0.0; 256]),
        }
    }
    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        t.c[idx(a, b, c, d)] = f(a, b, c, d);
                    }
                }
            }
        }
        t
    }
    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.c[idx(a, b, c, d)]
    }
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
    pub fn scale(&self, s: f64) -> Self {
        Rank4::from_fn(|a, b, c, d| s * self.get(a, b, c, d))
    }
    pub fn add(&self, o: &Rank4) -> Self {
        Rank4::from_fn(|a, b, c, d| self.get(a, b, c, d) + o.get(a, b, c, d))
    }
    /// `T^{abcd} F_{ab} G_{cd}` for antisymmetric component matrices.
    pub fn bilinear<T: Scalar>(&self, f: &Mat4<T>, g: &Mat4<T>) -> T {
        let mut s = T::zero();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let x = self.get(a, b, c, d);
                        if x != 0.0 {
                            s += T::from(x) * f[a][b] * g[c][d];
                        }
                    }
                }
            }
        }
        s
    }
}

/// Constitutive density `χ^{abcd}` of weight +1 with pair antisymmetry and
/// pair-exchange symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstitutiveDensity {
    t: Rank4,
}

impl ConstitutiveDensity {
    /// Wraps a component array after checking both symmetry invariants to
    /// `1e-12` relative.
    pub fn new(t: Rank4) -> Result<Self> {
        let chi = ConstitutiveDensity { t };
        let v = chi.symmetry_violation();
        if v > 1e-12 * chi.t.max_abs().max(1.0) {
            return Err(QeiError::InvalidInput(format!(
                "constitutive density violates symmetries by {v:e}"
            )));
        }
        Ok(chi)
    }

    /// `χ^{abcd} = g^{ca}g^{bd} − g^{cb}g^{ad}`, i.e. `2 g^{c[a} g^{b]d}`.
    pub fn from_inverse_metric(g: &InverseMetric4) -> Self {
        let g = g.components();
        let t = Rank4::from_fn(|a, b, c, d| g[c][a] * g[b][d] - g[c][b] * g[a][d]);
        ConstitutiveDensity { t }
    }

    /// Vacuum Maxwell density for the Minkowski metric.
    pub fn maxwell() -> Self {
        Self::from_inverse_metric(&InverseMetric4::minkowski())
    }

    /// `2 δ^{c[a} δ^{b]d}` — not hyperbolic, useful as a negative control.
    pub fn euclidean() -> Self {
        Self::from_inverse_metric(&InverseMetric4 {
            g: diag(1.0, 1.0, 1.0, 1.0),
        })
    }

    pub fn tensor(&self) -> &Rank4 {
        &self.t
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.t.get(a, b, c, d)
    }

    pub fn max_abs(&self) -> f64 {
        self.t.max_abs()
    }

    /// Largest absolute deviation from `χ^{abcd} = −χ^{bacd} = −χ^{abdc} = χ^{cdab}`.
    pub fn symmetry_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let x = self.get(a, b, c, d);
                        worst = worst
                            .max((x + self.get(b, a, c, d)).abs())
                            .max((x + self.get(a, b, d, c)).abs())
                            .max((x - self.get(c, d, a, b)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Constitutive density of the uniaxial crystal,
/// `2 η^{c[a} η^{b]d} + 4 X^{[a} U^{b]} X^{[d} U^{c]}`.
///
/// Requires `η(U,U) = −1`, `η(X,U) = 0` and `η(X,X) = ξ²` to 1e-12.
pub fn build_uniaxial_chi(xi: f64, u: &Vec4, x: &Vec4) -> Result<ConstitutiveDensity> {
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(QeiError::InvalidInput(format!("xi must be >= 0, got {xi}")));
    }
    let eta = Metric4::minkowski();
    if (eta.eval(u, u) + 1.0).abs() > 1e-12 {
        return Err(QeiError::InvalidInput("U is not unit timelike".into()));
    }
    if eta.eval(x, u).abs() > 1e-12 {
        return Err(QeiError::InvalidInput("X is not orthogonal to U".into()));
    }
    if (eta.eval(x, x) - xi * xi).abs() > 1e-12 * (1.0 + xi * xi) {
        return Err(QeiError::InvalidInput("eta(X,X) differs from xi^2".into()));
    }
    let g = *InverseMetric4::minkowski().components();
    let (u, x) = (u.0, x.0);
    let t = Rank4::from_fn(|a, b, c, d| {
        g[c][a] * g[b][d] - g[c][b] * g[a][d]
            + (x[a] * u[b] - x[b] * u[a]) * (x[d] * u[c] - x[c] * u[d])
    });
    Ok(ConstitutiveDensity { t })
}

/// `𝓜^{ab}(k) = χ^{acbd} k_c k_d`.
pub fn principal_symbol<T: Scalar>(chi: &ConstitutiveDensity, k: &[T; 4]) -> Mat4<T> {
    let mut m = zero_mat::<T>();
    for a in 0..4 {
        for b in 0..4 {
            let mut s = T::zero();
            for c in 0..4 {
                for d in 0..4 {
                    let x = chi.get(a, c, b, d);
                    if x != 0.0 {
                        s += T::from(x) * k[c] * k[d];
                    }
                }
            }
            m[a][b] = s;
        }
    }
    m
}

/// All 24 permutations of (0,1,2,3) with their signs.
pub fn permutations4() -> &'static [([usize; 4], f64); 24] {
    static PERMS: OnceLock<[([usize; 4], f64); 24]> = OnceLock::new();
    PERMS.get_or_init(|| {
        let mut out = [([0usize; 4], 0.0); 24];
        let mut n = 0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let p = [a, b, c, d];
                        if a == b || a == c || a == d || b == c || b == d || c == d {
                            continue;
                        }
                        let mut inv = 0;
                        for i in 0..4 {
                            for j in i + 1..4 {
                                if p[i] > p[j] {
                                    inv += 1;
                                }
                            }
                        }
                        out[n] = (p, if inv % 2 == 0 { 1.0 } else { -1.0 });
                        n += 1;
                    }
                }
            }
        }
        out
    })
}

/// Levi-Civita value `ε̂_{abcd}` with `ε̂_{0123} = 1`.
pub fn levi_civita(a: usize, b: usize, c: usize, d: usize) -> f64 {
    permutations4()
        .iter()
        .find(|(p, _)| *p == [a, b, c, d])
        .map_or(0.0, |(_, s)| *s)
}

/// `adj(M)_{ab} = (1/3!) ε̂_{acde} ε̂_{bfgh} M^{cf} M^{dg} M^{eh}`.
pub fn adjugate<T: Scalar>(m: &Mat4<T>) -> Mat4<T> {
    let perms = permutations4();
    let mut out = zero_mat::<T>();
    for (p, sp) in perms.iter() {
        for (q, sq) in perms.iter() {
            // p = (a, c, d, e), q = (b, f, g, h); every (p, q) pair is one
            // term of the double sum, each cofactor is counted 3! times.
            let term = m[p[1]][q[1]] * m[p[2]][q[2]] * m[p[3]][q[3]];
            out[p[0]][q[0]] += T::from(sp * sq) * term;
        }
    }
    let sixth = T::from(1.0 / 6.0);
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= sixth;
        }
    }
    out
}

pub type Rank4G<T> = [[[[T; 4]; 4]; 4]; 4];

/// `adj₂(M)_{abcd} = ½ ε̂_{acij} ε̂_{bdkl} M^{ik} M^{jl}`.
pub fn second_adjugate<T: Scalar>(m: &Mat4<T>) -> Rank4G<T> {
    let perms = permutations4();
    let mut out = [[[[T::zero(); 4]; 4]; 4]; 4];
    for (p, sp) in perms.iter() {
        for (q, sq) in perms.iter() {
            let term = m[p[2]][q[2]] * m[p[3]][q[3]];
            out[p[0]][q[0]][p[1]][q[1]] += T::from(sp * sq) * term;
        }
    }
    let half = T::from(0.5);
    for x in out.iter_mut().flatten().flatten().flatten() {
        *x *= half;
    }
    out
}

pub fn det4(m: &Mat4<f64>) -> f64 {
    Matrix4::from_fn(|i, j| m[i][j]).determinant()
}

/// Frame `{e_a}` with dual coframe `{e^{*a}}` and density factor `ε(e)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub e: [Vec4; 4],
    pub dual: [Covec4; 4],
    pub density: f64,
}

impl Frame {
    pub fn from_vectors(e: [Vec4; 4]) -> Result<Self> {
        // columns are the frame vectors
        let mut m = [[0.0; 4]; 4];
        for a in 0..4 {
            for i in 0..4 {
                m[i][a] = e[a].0[i];
            }
        }
        let inv = invert(&m)?;
        let dual = [0, 1, 2, 3].map(|a| Covec4(inv[a]));
        Ok(Frame {
            e,
            dual,
            density: det4(&m),
        })
    }

    pub fn identity() -> Self {
        Self::from_vectors([0, 1, 2, 3].map(|a| {
            let mut v = [0.0; 4];
            v[a] = 1.0;
            Vec4(v)
        }))
        .expect("identity frame")
    }

    /// `e_0`, the observer velocity.
    pub fn u(&self) -> Vec4 {
        self.e[0]
    }

    /// `e^{*0}`
    pub fn n(&self) -> Covec4 {
        self.dual[0]
    }

    pub fn duality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((self.dual[a].contract(&self.e[b]) - want).abs());
            }
        }
        worst
    }
}

/// Frame adapted to the worldline `ℵτ(cosh α, sinh α cos β, 0, sinh α sin β)`.
///
/// Legs are `{ℵu, ℵ⁻¹w, q, p}` with `w` the boost-direction unit vector,
/// `q = ∂_y` and `p = (0, −sin β, 0, cos β)`; this ordering has unit
/// determinant and reduces to the identity tetrad at rest.
pub fn frame_from_worldline(alpha: f64, beta: f64, aleph: f64) -> Result<Frame> {
    if !(aleph > 0.0) || !aleph.is_finite() {
        return Err(QeiError::InvalidInput(format!("aleph must be > 0, got {aleph}")));
    }
    let (ch, sh) = (alpha.cosh(), alpha.sinh());
    let (cb, sb) = (beta.cos(), beta.sin());
    let u = Vec4::new(ch, sh * cb, 0.0, sh * sb);
    let w = Vec4::new(sh, ch * cb, 0.0, ch * sb);
    let q = Vec4::new(0.0, 0.0, 1.0, 0.0);
    let p = Vec4::new(0.0, -sb, 0.0, cb);
    Frame::from_vectors([u.scale(aleph), w.scale(1.0 / aleph), q, p])
}
