//! QEI bound for the uniaxial crystal: the point-split coefficient `C`,
//! smearing functions, closed-form and Fourier-pipeline bounds, and the
//! momentum-integral identity behind the vacuum kernel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::causal::{require_subluminal, transverse_rapidity_sq, vector_forms};
use crate::error::{QeiError, Result};
use crate::numerics::{deterministic_sum, fourier_transform, gauss_legendre_on, spectral_second_derivative, Reduction};
use crate::observer_norm::{aleph_uc, NormMode};
use crate::tensor::{frame_from_worldline, Vec4};

/// Relative guard band around the extraordinary-cone pole of `C`.
pub const POLE_GUARD: f64 = 1e-9;

/// `C = 1 + (1+ξ²)(1 − ξ²sinh²α sin²β)⁻²`.
pub fn c_coefficient(xi: f64, alpha: f64, beta: f64) -> Result<f64> {
    let d = 1.0 - xi * xi * transverse_rapidity_sq(alpha, beta);
    if d.abs() <= POLE_GUARD {
        return Err(QeiError::OnExtraordinaryCone);
    }
    Ok(1.0 + (1.0 + xi * xi) / (d * d))
}

/// `C` rebuilt from frame data,
/// `ℵ⁴(n·γ̇/η(γ̇,γ̇)² + n·γ̇/((1+ξ²)ζ(γ̇,γ̇)²))` with `γ̇ = ℵû` and `n = e^{*0}`.
pub fn c_coefficient_frame(xi: f64, alpha: f64, beta: f64, aleph: f64) -> Result<f64> {
    let frame = frame_from_worldline(alpha, beta, aleph)?;
    let g = frame.u();
    let ng = frame.n().contract(&g);
    let f = vector_forms(xi, &g);
    if f.zeta.abs() <= POLE_GUARD * aleph * aleph {
        return Err(QeiError::OnExtraordinaryCone);
    }
    Ok(aleph.powi(4) * (ng / (f.eta * f.eta) + ng / ((1.0 + xi * xi) * f.zeta * f.zeta)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmearingFunction {
    /// `g(τ) = exp(−(τ−center)²/(2σ²))`
    Gaussian { sigma: f64, center: f64 },
    /// Samples `g(t0 + j h)`.
    Sampled { h: f64, t0: f64, samples: Vec<f64> },
}

impl SmearingFunction {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(QeiError::InvalidInput(format!("sigma must be > 0, got {sigma}")));
        }
        Ok(SmearingFunction::Gaussian { sigma, center: 0.0 })
    }

    /// Validated sampled function: at least 64 interior points and values
    /// below `1e-12·max` at both ends.
    pub fn sampled(h: f64, t0: f64, samples: Vec<f64>) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) || samples.iter().any(|x| !x.is_finite()) {
            return Err(QeiError::InvalidInput("sampled smearing needs h > 0 and finite samples".into()));
        }
        if samples.len() < 66 {
            return Err(QeiError::GridTooCoarse(format!(
                "{} samples; at least 64 interior points required",
                samples.len()
            )));
        }
        let max = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let n = samples.len();
        if samples[0].abs() > 1e-12 * max || samples[n - 1].abs() > 1e-12 * max {
            return Err(QeiError::GridTooCoarse("samples do not vanish at the grid ends".into()));
        }
        Ok(SmearingFunction::Sampled { h, t0, samples })
    }

    /// The Gaussian sampled on `[center − width·σ, center + width·σ]` with
    /// spacing `σ/per_sigma`; the two end samples are set to zero.
    pub fn sample_gaussian(sigma: f64, center: f64, width: f64, per_sigma: usize) -> Result<Self> {
        let h = sigma / per_sigma as f64;
        let m = (width * per_sigma as f64).round() as usize;
        let t0 = center - m as f64 * h;
        let mut s: Vec<f64> = (0..=2 * m)
            .map(|j| {
                let t = (t0 + j as f64 * h - center) / sigma;
                (-0.5 * t * t).exp()
            })
            .collect();
        let last = s.len() - 1;
        s[0] = 0.0;
        s[last] = 0.0;
        Self::sampled(h, t0, s)
    }

    fn to_sampled(&self) -> Result<(f64, f64, Vec<f64>)> {
        match self {
            SmearingFunction::Sampled { h, t0, samples } => Ok((*h, *t0, samples.clone())),
            SmearingFunction::Gaussian { sigma, center } => match Self::sample_gaussian(*sigma, *center, 8.0, 64)? {
                SmearingFunction::Sampled { h, t0, samples } => Ok((h, t0, samples)),
                SmearingFunction::Gaussian { .. } => unreachable!(),
            },
        }
    }
}

/// `‖g″‖²₂`: closed form `3√π/(4σ³)` for the Gaussian, spectral derivative
/// otherwise.
pub fn gpp_norm_sq(g: &SmearingFunction) -> Result<f64> {
    match g {
        SmearingFunction::Gaussian { sigma, .. } => Ok(3.0 * PI.sqrt() / (4.0 * sigma.powi(3))),
        SmearingFunction::Sampled { h, samples, .. } => {
            let d = spectral_second_derivative(samples, *h)?;
            Ok(h * d.iter().map(|x| x * x).sum::<f64>())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `ℵ = 1`
    Sr,
    /// `ℵ = ℵ_UC`
    Uc,
    Explicit(f64),
}

impl Normalization {
    pub fn resolve(&self, xi: f64, alpha: f64, beta: f64) -> Result<f64> {
        match *self {
            Normalization::Sr => Ok(1.0),
            Normalization::Uc => Ok(aleph_uc(xi, alpha, beta, NormMode::Numeric)?.aleph),
            Normalization::Explicit(a) if a > 0.0 && a.is_finite() => Ok(a),
            Normalization::Explicit(a) => Err(QeiError::InvalidInput(format!("aleph must be > 0, got {a}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QeiBoundResult {
    pub xi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub normalization: Normalization,
    pub c: f64,
    pub aleph: f64,
    pub gpp_norm_sq: f64,
    pub bound: f64,
}

impl QeiBoundResult {
    pub const CSV_HEADER: [&'static str; 7] = ["xi", "alpha", "beta", "aleph", "C", "gpp_norm_sq", "bound"];

    pub fn csv_row(&self) -> [f64; 7] {
        [self.xi, self.alpha, self.beta, self.aleph, self.c, self.gpp_norm_sq, self.bound]
    }
}

/// `−C‖g″‖²/(4(2π)²ℵ⁴)`.
pub fn bound_from_parts(c: f64, aleph: f64, gpp: f64) -> f64 {
    -c * gpp / (4.0 * (2.0 * PI).powi(2) * aleph.powi(4))
}

pub fn qei_bound(
    xi: f64,
    alpha: f64,
    beta: f64,
    normalization: Normalization,
    g: &SmearingFunction,
) -> Result<QeiBoundResult> {
    check_params(xi, alpha, beta)?;
    require_subluminal(xi, alpha, beta)?;
    let c = c_coefficient(xi, alpha, beta)?;
    let aleph = normalization.resolve(xi, alpha, beta)?;
    let gpp = gpp_norm_sq(g)?;
    Ok(QeiBoundResult {
        xi,
        alpha,
        beta,
        normalization,
        c,
        aleph,
        gpp_norm_sq: gpp,
        bound: bound_from_parts(c, aleph, gpp),
    })
}

pub(crate) fn check_params(xi: f64, alpha: f64, beta: f64) -> Result<()> {
    if !(xi >= 0.0 && xi.is_finite() && alpha.is_finite() && beta.is_finite()) {
        return Err(QeiError::InvalidInput(format!(
            "need finite xi >= 0, alpha, beta; got ({xi}, {alpha}, {beta})"
        )));
    }
    Ok(())
}

/// `−(1/π)·C/((2π)²ℵ⁴)·∫₀^∞dβ′∫₀^∞κ³|ĝ(κ+β′)|²dκ` on the frequency grid of the
/// zero-padded discrete transform, with `C` taken from frame data.
pub fn qei_bound_pipeline(xi: f64, alpha: f64, beta: f64, aleph: f64, g: &SmearingFunction) -> Result<f64> {
    check_params(xi, alpha, beta)?;
    require_subluminal(xi, alpha, beta)?;
    let c = c_coefficient_frame(xi, alpha, beta, aleph)?;
    let (h, t0, samples) = g.to_sampled()?;
    // ‖g″‖ must be resolvable on this grid
    spectral_second_derivative(&samples, h)?;
    if samples.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let padded = (16 * samples.len()).next_power_of_two();
    let (dtheta, ghat) = fourier_transform(&samples, h, t0, padded);
    let w: Vec<f64> = ghat[..=padded / 2].iter().map(|z| z.norm_sqr()).collect();
    let max = w.iter().fold(0.0f64, |m, &x| m.max(x));
    // |ĝ| ≥ 1e-12 max  ⇔  |ĝ|² ≥ 1e-24 max²
    let m = w.iter().rposition(|&x| x >= 1e-24 * max).unwrap_or(0) + 1;
    let trap = |i: usize, n: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
    let mut outer = 0.0;
    for b in 0..m {
        let n_inner = m - b;
        let mut inner = 0.0;
        for k in 0..n_inner {
            let kappa = k as f64 * dtheta;
            inner += trap(k, n_inner) * kappa.powi(3) * w[k + b];
        }
        outer += trap(b, m) * inner * dtheta;
    }
    outer *= dtheta;
    Ok(-c * outer / (PI * (2.0 * PI).powi(2) * aleph.powi(4)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WhichMetric {
    Eta,
    Zeta,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixAReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs|/|rhs|`, or the absolute difference when `rhs = 0`.
    pub error: f64,
}

/// Nodes per axis of the spherical rule (64³ effective nodes).
pub const APPENDIX_A_NODES: usize = 64;

/// `(2π)⁻³∫(k·u)(k·v)/(2ω)f̂(k·u)d³k` against `−g(u,v)/(4π²g(u,u)²)∫₀^∞κ³f̂(κ)dκ`
/// for the centred Gaussian `f̂(κ) = √(2π)σe^{−σ²κ²/2}`; `ω` and `g` belong
/// to the selected metric of the crystal with parameter `xi`.
pub fn appendix_a_oracle(xi: f64, u: &Vec4, v: &Vec4, sigma: f64, which: WhichMetric) -> Result<AppendixAReport> {
    appendix_a_oracle_with(xi, u, v, sigma, which, APPENDIX_A_NODES)
}

pub fn appendix_a_oracle_with(
    xi: f64,
    u: &Vec4,
    v: &Vec4,
    sigma: f64,
    which: WhichMetric,
    nodes: usize,
) -> Result<AppendixAReport> {
    if !(sigma > 0.0) {
        return Err(QeiError::InvalidInput(format!("sigma must be > 0, got {sigma}")));
    }
    let s = match which {
        WhichMetric::Eta => 1.0,
        WhichMetric::Zeta => 1.0 + xi * xi,
    };
    let gform = |a: &Vec4, b: &Vec4| -> f64 {
        let [a0, a1, a2, a3] = a.0;
        let [b0, b1, b2, b3] = b.0;
        (-a0 * b0 + a1 * b1) / s + a2 * b2 + a3 * b3
    };
    let guu = gform(u, u);
    if !(guu < 0.0 && u.0[0] > 0.0) {
        return Err(QeiError::NotTimelike);
    }
    let fhat = |k: f64| (2.0 * PI).sqrt() * sigma * (-0.5 * sigma * sigma * k * k).exp();

    // one-dimensional side
    let (kn, kw) = gauss_legendre_on(nodes, 0.0, 12.0 / sigma);
    let moment: f64 = kn.iter().zip(&kw).map(|(k, w)| w * k.powi(3) * fhat(*k)).sum();
    let rhs = -gform(u, v) / (4.0 * PI * PI * guu * guu) * moment;

    // three-dimensional side: polar axis along u⃗
    let spatial = [u.0[1], u.0[2], u.0[3]];
    let un = (spatial.iter().map(|x| x * x).sum::<f64>()).sqrt();
    let ez = if un > 0.0 { spatial.map(|x| x / un) } else { [0.0, 0.0, 1.0] };
    let helper = if ez[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let p = dot(&helper, &ez);
    let ex0 = [0, 1, 2].map(|i| helper[i] - p * ez[i]);
    let exn = dot(&ex0, &ex0).sqrt();
    let ex = ex0.map(|x| x / exn);
    let ey = [ez[1] * ex[2] - ez[2] * ex[1], ez[2] * ex[0] - ez[0] * ex[2], ez[0] * ex[1] - ez[1] * ex[0]];

    let (ct, ctw) = gauss_legendre_on(nodes, -1.0, 1.0);
    let (ph, phw) = gauss_legendre_on(nodes, 0.0, 2.0 * PI);
    let (rn, rw) = crate::numerics::gauss_legendre(nodes);
    let total = deterministic_sum(nodes * nodes, Reduction::Sequential, |idx| {
        let (i, j) = (idx / nodes, idx % nodes);
        let (c, sn) = (ct[i], (1.0 - ct[i] * ct[i]).sqrt());
        let d = [0, 1, 2].map(|a| sn * ph[j].cos() * ex[a] + sn * ph[j].sin() * ey[a] + c * ez[a]);
        // ω(d̂) for the chosen metric: k₀ with g⁻¹(k,k) = 0 per unit |k⃗|
        let w = (d[0] * d[0] + (d[1] * d[1] + d[2] * d[2]) / s).sqrt();
        let a_u = w * u.0[0] + dot(&d, &spatial);
        let a_v = w * v.0[0] + d[0] * v.0[1] + d[1] * v.0[2] + d[2] * v.0[3];
        let rmax = 12.0 / (sigma * a_u);
        let radial: f64 = rn
            .iter()
            .zip(&rw)
            .map(|(t, wt)| {
                let r = 0.5 * rmax * (t + 1.0);
                // (k·u)(k·v)/(2ω)·f̂(k·u)·r² with k = r(w, d̂)
                0.5 * rmax * wt * r.powi(3) * a_u * a_v / (2.0 * w) * fhat(r * a_u)
            })
            .sum();
        [ctw[i] * phw[j] * radial]
    })[0];
    let lhs = total / (2.0 * PI).powi(3);
    let error = if rhs != 0.0 { (lhs - rhs).abs() / rhs.abs() } else { (lhs - rhs).abs() };
    Ok(AppendixAReport { lhs, rhs, error })
}
