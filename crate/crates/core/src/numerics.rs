//! Shared numeric kernels: polynomial roots, Gauss–Legendre rules, contour
//! residues, discrete Fourier transforms and deterministic reductions.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Schur};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{QeiError, Result};
use crate::tensor::{Mat4, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: C64,
    pub real: bool,
    /// Size of the cluster this root was grouped into.
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyRoots {
    /// Effective degree after dropping negligible leading coefficients.
    pub degree: usize,
    pub roots: Vec<Root>,
}

impl PolyRoots {
    pub fn all_real(&self) -> bool {
        self.roots.iter().all(|r| r.real)
    }
    pub fn real_values(&self) -> Vec<f64> {
        self.roots.iter().filter(|r| r.real).map(|r| r.value.re).collect()
    }
    /// Root with the largest relative imaginary part.
    pub fn worst(&self) -> Option<C64> {
        self.roots
            .iter()
            .map(|r| r.value)
            .max_by(|a, b| {
                let fa = a.im.abs() / (1.0 + a.re.abs());
                let fb = b.im.abs() / (1.0 + b.re.abs());
                fa.total_cmp(&fb)
            })
    }
}

pub const REAL_ROOT_TOL: f64 = 1e-8;

/// Roots of `c[0] + c[1] t + … + c[n] tⁿ` from companion-matrix eigenvalues.
///
/// Leading coefficients below `1e-14·max|c|` are dropped (degree fallback).
/// A root is flagged real when `|Im| ≤ tol·(1+|Re|)`; in addition, a cluster
/// of `m` roots within `100·ε^{1/m}·(1+|c|)` of a real centroid is accepted as
/// an `m`-fold real root, since the eigenvalues of an exact `m`-fold root
/// spread by `O(ε^{1/m})`.
pub fn poly_roots(c: &[f64], tol: f64) -> PolyRoots {
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut n = c.len();
    while n > 0 && c[n - 1].abs() <= 1e-14 * scale {
        n -= 1;
    }
    if n <= 1 {
        return PolyRoots {
            degree: 0,
            roots: vec![],
        };
    }
    let deg = n - 1;
    let lead = c[deg];
    let comp = DMatrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -c[deg - 1 - j] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eig = companion_eigenvalues(comp);
    let mut roots: Vec<Root> = eig
        .iter()
        .map(|&z| Root {
            value: z,
            real: z.im.abs() <= tol * (1.0 + z.re.abs()),
            multiplicity: 1,
        })
        .collect();
    // cluster detection
    let eps = f64::EPSILON;
    let mut assigned = vec![false; deg];
    for i in 0..deg {
        if assigned[i] {
            continue;
        }
        for m in (2..=deg).rev() {
            let radius = 100.0 * eps.powf(1.0 / m as f64) * (1.0 + eig[i].norm());
            let members: Vec<usize> = (0..deg)
                .filter(|&j| !assigned[j] && (eig[j] - eig[i]).norm() <= 2.0 * radius)
                .collect();
            if members.len() < m {
                continue;
            }
            let members = &members[..m];
            let centroid = members.iter().map(|&j| eig[j]).sum::<C64>() / m as f64;
            if members.iter().all(|&j| (eig[j] - centroid).norm() <= radius) {
                let is_real = centroid.im.abs() <= tol * (1.0 + centroid.re.abs());
                for &j in members {
                    assigned[j] = true;
                    roots[j].multiplicity = m;
                    if is_real {
                        roots[j].real = true;
                        roots[j].value = C64::new(centroid.re, 0.0);
                    }
                }
                break;
            }
        }
    }
    roots.sort_by(|a, b| a.value.re.total_cmp(&b.value.re));
    PolyRoots { degree: deg, roots }
}

/// Eigenvalues via real Schur form. Companion matrices of symmetric root
/// patterns (e.g. `t⁴ + 1`) can stall the QR sweep, so on non-convergence the
/// matrix is conjugated by a fixed Householder reflection and retried.
fn companion_eigenvalues(comp: DMatrix<f64>) -> Vec<C64> {
    let n = comp.nrows();
    let eps = f64::EPSILON;
    if let Some(s) = Schur::try_new(comp.clone(), eps, 500) {
        return s.complex_eigenvalues().iter().copied().collect();
    }
    for attempt in 1..=8 {
        let v = DVector::from_fn(n, |i, _| 1.0 + (attempt * (i + 1)) as f64 * 0.618_033_988_749_895);
        let v = v.normalize();
        let h = DMatrix::identity(n, n) - 2.0 * &v * v.transpose();
        let conj = &h * &comp * &h;
        if let Some(s) = Schur::try_new(conj, eps, 1000) {
            return s.complex_eigenvalues().iter().copied().collect();
        }
    }
    comp.complex_eigenvalues().iter().copied().collect()
}

/// Quartic `c0 + c1 t + c2 t² + c3 t³ + c4 t⁴`.
pub fn quartic_real_roots(c: [f64; 5], tol: f64) -> PolyRoots {
    poly_roots(&c, tol)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss–Legendre nodes and weights on [−1, 1] (Newton on the three-term
/// recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let (h, c) = (0.5 * (b - a), 0.5 * (b + a));
    (
        x.iter().map(|t| c + h * t).collect(),
        w.iter().map(|v| h * v).collect(),
    )
}

/// Kahan-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reduction {
    Sequential,
    /// Fixed-size chunks evaluated on `threads` workers, combined in chunk
    /// order, so the result does not depend on the thread count.
    CompensatedParallel { threads: usize },
}

const CHUNK: usize = 2048;

/// `Σ_{i<n} f(i)` componentwise with compensated, thread-count independent
/// reduction.
pub fn deterministic_sum<const N: usize>(
    n: usize,
    reduction: Reduction,
    f: impl Fn(usize) -> [f64; N] + Sync,
) -> [f64; N] {
    let chunk_sum = |lo: usize, hi: usize| {
        let mut acc = [KahanSum::default(); N];
        for i in lo..hi {
            let v = f(i);
            for (a, x) in acc.iter_mut().zip(v) {
                a.add(x);
            }
        }
        acc
    };
    let nchunks = n.div_ceil(CHUNK);
    let threads = match reduction {
        Reduction::Sequential => 1,
        Reduction::CompensatedParallel { threads } => threads.max(1),
    };
    let mut partials = vec![[KahanSum::default(); N]; nchunks];
    if threads == 1 || nchunks <= 1 {
        for (ci, p) in partials.iter_mut().enumerate() {
            *p = chunk_sum(ci * CHUNK, ((ci + 1) * CHUNK).min(n));
        }
    } else {
        let per = nchunks.div_ceil(threads);
        std::thread::scope(|s| {
            for (t, slot) in partials.chunks_mut(per).enumerate() {
                let chunk_sum = &chunk_sum;
                s.spawn(move || {
                    for (j, p) in slot.iter_mut().enumerate() {
                        let ci = t * per + j;
                        *p = chunk_sum(ci * CHUNK, ((ci + 1) * CHUNK).min(n));
                    }
                });
            }
        });
    }
    let mut total = [KahanSum::default(); N];
    for p in &partials {
        for (t, a) in total.iter_mut().zip(p) {
            t.add(a.value());
        }
    }
    total.map(|k| k.value())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Mapping {
    Linear,
    /// `x = R·artanh(s·tanh a)/a`, clustering nodes towards the centre.
    Tanh { a: f64 },
}

/// Product-rule specification for 3D cube quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes: [usize; 3],
    pub mapping: Mapping,
    /// Half-widths of the integration box per axis.
    pub radius: [f64; 3],
    pub reduction: Reduction,
}

impl QuadratureSpec {
    pub fn cube(n: usize, radius: [f64; 3]) -> Self {
        QuadratureSpec {
            nodes: [n; 3],
            mapping: Mapping::Linear,
            radius,
            reduction: Reduction::Sequential,
        }
    }

    fn axis(&self, i: usize) -> (Vec<f64>, Vec<f64>) {
        let (s, w) = gauss_legendre(self.nodes[i]);
        let r = self.radius[i];
        match self.mapping {
            Mapping::Linear => (s.iter().map(|t| r * t).collect(), w.iter().map(|v| r * v).collect()),
            Mapping::Tanh { a } => {
                let ta = a.tanh();
                let x = s.iter().map(|t| r * (t * ta).atanh() / a).collect();
                let wx = s
                    .iter()
                    .zip(&w)
                    .map(|(t, v)| v * r * ta / (a * (1.0 - t * t * ta * ta)))
                    .collect();
                (x, wx)
            }
        }
    }

    /// `∫ f(x) d³x` over the box, componentwise for `N` outputs.
    pub fn integrate<const N: usize>(&self, f: impl Fn([f64; 3]) -> [f64; N] + Sync) -> [f64; N] {
        let axes = [self.axis(0), self.axis(1), self.axis(2)];
        let [n0, n1, n2] = self.nodes;
        deterministic_sum(n0 * n1 * n2, self.reduction, |idx| {
            let i = idx / (n1 * n2);
            let j = (idx / n2) % n1;
            let k = idx % n2;
            let w = axes[0].1[i] * axes[1].1[j] * axes[2].1[k];
            let v = f([axes[0].0[i], axes[1].0[j], axes[2].0[k]]);
            v.map(|x| w * x)
        })
    }
}

fn trapezoid_circle(
    f: &dyn Fn(C64) -> Vec<C64>,
    center: C64,
    radius: f64,
    nodes: usize,
) -> Vec<C64> {
    let mut acc: Vec<C64> = Vec::new();
    for j in 0..nodes {
        let th = 2.0 * PI * j as f64 / nodes as f64;
        let e = C64::from_polar(1.0, th);
        let vals = f(center + radius * e);
        if acc.is_empty() {
            acc = vec![C64::new(0.0, 0.0); vals.len()];
        }
        // (1/2πi)∮ f dz with dz = i r e^{iθ} dθ
        for (a, v) in acc.iter_mut().zip(vals) {
            *a += v * radius * e;
        }
    }
    acc.iter().map(|a| a / nodes as f64).collect()
}

/// `(1/2πi) ∮ f(z) dz` on a circle, trapezoid rule; errors when doubling the
/// node count changes the result by more than `1e-8·max(1, |result|)`.
pub fn contour_residue_vec(
    f: &dyn Fn(C64) -> Vec<C64>,
    center: C64,
    radius: f64,
    nodes: usize,
) -> Result<Vec<C64>> {
    let coarse = trapezoid_circle(f, center, radius, nodes);
    let fine = trapezoid_circle(f, center, radius, 2 * nodes);
    let scale = fine.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let change = coarse
        .iter()
        .zip(&fine)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    if change > 1e-8 * scale {
        return Err(QeiError::NonConvergent { change });
    }
    Ok(fine)
}

pub fn contour_residue(f: impl Fn(C64) -> C64, center: C64, radius: f64, nodes: usize) -> Result<C64> {
    let g = |z: C64| vec![f(z)];
    Ok(contour_residue_vec(&g, center, radius, nodes)?[0])
}

pub fn contour_residue_mat(
    f: impl Fn(C64) -> Mat4<C64>,
    center: C64,
    radius: f64,
    nodes: usize,
) -> Result<Mat4<C64>> {
    let g = |z: C64| f(z).iter().flatten().copied().collect::<Vec<_>>();
    let v = contour_residue_vec(&g, center, radius, nodes)?;
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            out[a][b] = v[4 * a + b];
        }
    }
    Ok(out)
}

/// Samples of `ĝ(θ) = ∫ g(τ) e^{iθτ} dτ` at `θ_j = j·2π/(N h)`, `j < N`
/// (indices above `N/2` are the negative frequencies), for samples
/// `g(t0 + i h)` zero-padded to length `N`.
pub fn fourier_transform(samples: &[f64], h: f64, t0: f64, padded_len: usize) -> (f64, Vec<C64>) {
    let n = padded_len.max(samples.len());
    let mut buf: Vec<C64> = samples.iter().map(|&x| C64::new(x, 0.0)).collect();
    buf.resize(n, C64::new(0.0, 0.0));
    // unnormalised inverse transform computes Σ x_j e^{+2πi jk/N}
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let dtheta = 2.0 * PI / (n as f64 * h);
    for (k, z) in buf.iter_mut().enumerate() {
        let theta = frequency(k, n, dtheta);
        *z *= h * C64::from_polar(1.0, theta * t0);
    }
    (dtheta, buf)
}

/// Signed frequency of bin `k` out of `n`.
pub fn frequency(k: usize, n: usize, dtheta: f64) -> f64 {
    if k <= n / 2 {
        k as f64 * dtheta
    } else {
        -((n - k) as f64) * dtheta
    }
}

/// Second derivative by transform–multiply–inverse with ×4 zero padding.
///
/// Errors with `GridTooCoarse` if the endpoints are not negligible or more
/// than 1% of the `∫|g''|²` energy sits in the upper half of the resolved band.
pub fn spectral_second_derivative(samples: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = samples.len();
    if n < 4 {
        return Err(QeiError::GridTooCoarse("need at least 4 samples".into()));
    }
    let max = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return Ok(vec![0.0; n]);
    }
    if samples[0].abs() > 1e-12 * max || samples[n - 1].abs() > 1e-12 * max {
        return Err(QeiError::GridTooCoarse(
            "samples do not vanish at the grid ends".into(),
        ));
    }
    let len = 4 * n;
    let mut buf: Vec<C64> = samples.iter().map(|&x| C64::new(x, 0.0)).collect();
    buf.resize(len, C64::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    let dtheta = 2.0 * PI / (len as f64 * h);
    let (mut total, mut tail) = (0.0, 0.0);
    let nyq = (len / 2) as f64 * dtheta;
    for (k, z) in buf.iter_mut().enumerate() {
        let th = frequency(k, len, dtheta);
        *z *= -th * th;
        let e = z.norm_sqr();
        total += e;
        if th.abs() > 0.5 * nyq {
            tail += e;
        }
    }
    if total > 0.0 && tail > 0.01 * total {
        return Err(QeiError::GridTooCoarse(format!(
            "{:.2}% of the derivative energy lies in the upper half band",
            100.0 * tail / total
        )));
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    Ok(buf[..n].iter().map(|z| z.re / len as f64).collect())
}
