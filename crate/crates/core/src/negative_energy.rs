//! Interluminal counterexample: an explicit extraordinary-mode wave packet
//! whose energy density at the origin is negative, plus the diagonal of the
//! positivity kernel for subluminal observers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::causal::{frequencies, vector_forms};
use crate::energy::{classical_rho_complex, ComplexFieldStrength, PAIRS};
use crate::error::{QeiError, Result};
use crate::medium::polarizations;
use crate::numerics::{gauss_legendre_on, QuadratureSpec, Reduction};
use crate::qei::SmearingFunction;
use crate::tensor::{build_uniaxial_chi, frame_from_worldline, Covec4, Frame, Vec4, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavePacketSpec {
    pub tau0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub xi: f64,
}

impl WavePacketSpec {
    pub fn new(tau0: f64, alpha: f64, beta: f64, xi: f64) -> Result<Self> {
        if !(tau0 > 0.0 && tau0.is_finite() && xi >= 0.0 && xi.is_finite() && alpha.is_finite() && beta.is_finite()) {
            return Err(QeiError::InvalidInput(format!(
                "need tau0 > 0, xi >= 0 and finite angles; got tau0 = {tau0}, xi = {xi}"
            )));
        }
        Ok(WavePacketSpec { tau0, alpha, beta, xi })
    }

    /// Default momentum rule: product Gauss–Legendre, half-widths
    /// `8/τ₀·(1, √(1+ξ²), √(1+ξ²))`. Even node counts keep the optic axis
    /// off the grid.
    pub fn default_quadrature(&self, nodes: usize) -> QuadratureSpec {
        let r = 8.0 / self.tau0;
        let t = r * (1.0 + self.xi * self.xi).sqrt();
        let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        QuadratureSpec {
            reduction: Reduction::CompensatedParallel { threads },
            ..QuadratureSpec::cube(nodes, [r, t, t])
        }
    }

    /// Unit-speed worldline point `τ(cosh α, sinh α cos β, 0, sinh α sin β)`.
    pub fn worldline_point(&self, tau: f64) -> [f64; 4] {
        let (ch, sh) = (self.alpha.cosh(), self.alpha.sinh());
        [tau * ch, tau * sh * self.beta.cos(), 0.0, tau * sh * self.beta.sin()]
    }
}

pub const DEFAULT_NODES: usize = 48;

/// The three printed profile terms `(f₀₁, f₀₃, f₃₁)`.
pub fn profile_terms(spec: &WavePacketSpec, kvec: &[f64; 3]) -> [C64; 3] {
    let [k1, _, k3] = *kvec;
    let s = 1.0 + spec.xi * spec.xi;
    let (_, wt) = frequencies(spec.xi, kvec);
    let t = spec.tau0;
    let pi32 = PI.powf(1.5);
    let g = (-(wt * t).powi(2)).exp();
    [
        C64::new(0.0, t.powi(3) / (pi32 * s) * g),
        C64::new(0.0, -4.0 * k1 * k3 * t.powi(5) / (pi32 * s * s) * g),
        C64::new(0.0, 4.0 * wt * k3 * t.powi(5) / (5.0 * pi32 * s * s) * g),
    ]
}

/// `f = −f₀₁ sinh α sin β + f₀₃ sinh α cos β + f₃₁ cosh α`.
pub fn packet_profile(spec: &WavePacketSpec, kvec: &[f64; 3]) -> C64 {
    let [f01, f03, f31] = profile_terms(spec, kvec);
    let (ch, sh) = (spec.alpha.cosh(), spec.alpha.sinh());
    -f01 * sh * spec.beta.sin() + f03 * sh * spec.beta.cos() + f31 * ch
}

/// Integrand of `F_{ab}(x) = −i∫k⊥ f (K_a ṽ_b − K_b ṽ_a) e^{−i(k⃗·x⃗ + ω̃t)} d³k`,
/// `K = (ω̃, k⃗)`, as (re, im) pairs in the six-component order.
fn field_integrand(spec: &WavePacketSpec, kvec: &[f64; 3], x: &[f64; 4]) -> [f64; 12] {
    let kp = (kvec[1] * kvec[1] + kvec[2] * kvec[2]).sqrt();
    if kp == 0.0 {
        return [0.0; 12];
    }
    let (_, wt) = frequencies(spec.xi, kvec);
    let (_, vt, _) = polarizations(spec.xi, kvec).expect("nonzero momentum");
    let kk = [wt, kvec[0], kvec[1], kvec[2]];
    let phase = C64::from_polar(1.0, -(kvec[0] * x[1] + kvec[1] * x[2] + kvec[2] * x[3] + wt * x[0]));
    let pre = C64::new(0.0, -kp) * packet_profile(spec, kvec) * phase;
    let mut out = [0.0; 12];
    for (i, &(a, b)) in PAIRS.iter().enumerate() {
        let z = pre * (kk[a] * vt.0[b] - kk[b] * vt.0[a]);
        out[2 * i] = z.re;
        out[2 * i + 1] = z.im;
    }
    out
}

/// `F_{ab}` of the packet at spacetime point `x` by momentum quadrature.
pub fn field_strength_at(spec: &WavePacketSpec, x: &[f64; 4], quad: &QuadratureSpec) -> ComplexFieldStrength {
    let v = quad.integrate(|k| field_integrand(spec, &k, x));
    ComplexFieldStrength([0, 1, 2, 3, 4, 5].map(|i| C64::new(v[2 * i], v[2 * i + 1])))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldMethod {
    Quadrature,
    ClosedForm,
}

/// `F_{ab}(0)`; closed form `τ₀⁻²(−sinh α sin β, 0, sinh α cos β, 0, cosh α, 0)`.
pub fn field_strength_origin(spec: &WavePacketSpec, method: FieldMethod) -> ComplexFieldStrength {
    match method {
        FieldMethod::ClosedForm => {
            let (ch, sh) = (spec.alpha.cosh(), spec.alpha.sinh());
            let s = spec.tau0.powi(-2);
            let re = [-sh * spec.beta.sin(), 0.0, sh * spec.beta.cos(), 0.0, ch, 0.0];
            ComplexFieldStrength(re.map(|x| C64::new(s * x, 0.0)))
        }
        FieldMethod::Quadrature => {
            field_strength_at(spec, &[0.0; 4], &spec.default_quadrature(DEFAULT_NODES))
        }
    }
}

/// Largest componentwise difference relative to the largest closed-form
/// component.
pub fn field_mismatch(a: &ComplexFieldStrength, b: &ComplexFieldStrength) -> f64 {
    let scale = b.0.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let diff = a.0.iter().zip(&b.0).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    diff / scale
}

fn spec_frame(spec: &WavePacketSpec) -> Result<(crate::tensor::ConstitutiveDensity, Frame)> {
    let chi = build_uniaxial_chi(
        spec.xi,
        &Vec4::new(1.0, 0.0, 0.0, 0.0),
        &Vec4::new(0.0, spec.xi, 0.0, 0.0),
    )?;
    Ok((chi, frame_from_worldline(spec.alpha, spec.beta, 1.0)?))
}

/// Classical energy density of the packet field at the origin, in the frame
/// of the `(α, β)` worldline.
pub fn rho_origin(spec: &WavePacketSpec, method: FieldMethod) -> Result<f64> {
    let (chi, frame) = spec_frame(spec)?;
    Ok(classical_rho_complex(&chi, &frame, &field_strength_origin(spec, method)))
}

/// `ρ(τ)` along the worldline, the phase shifted inside the quadrature.
pub fn rho_along_worldline(spec: &WavePacketSpec, tau: f64, quad: &QuadratureSpec) -> Result<f64> {
    let (chi, frame) = spec_frame(spec)?;
    let f = field_strength_at(spec, &spec.worldline_point(tau), quad);
    Ok(classical_rho_complex(&chi, &frame, &f))
}

/// `(2π)³∫2ω̃(k₂²+k₃²)|f|²d³k`.
pub fn packet_norm_sq(spec: &WavePacketSpec, quad: &QuadratureSpec) -> f64 {
    let v = quad.integrate(|k| {
        let (_, wt) = frequencies(spec.xi, &k);
        [2.0 * wt * (k[1] * k[1] + k[2] * k[2]) * packet_profile(spec, &k).norm_sqr()]
    });
    (2.0 * PI).powi(3) * v[0]
}

/// Time nodes and weights for `∫g(τ)²·(…)dτ`: 16-point Gauss–Legendre over
/// `center ± 6σ` for a Gaussian, the sample grid (trapezoid) otherwise.
fn smearing_rule(g: &SmearingFunction) -> Vec<(f64, f64)> {
    match g {
        SmearingFunction::Gaussian { sigma, center } => {
            let (x, w) = gauss_legendre_on(16, center - 6.0 * sigma, center + 6.0 * sigma);
            x.iter()
                .zip(&w)
                .map(|(t, w)| (*t, w * (-((t - center) / sigma).powi(2)).exp()))
                .collect()
        }
        SmearingFunction::Sampled { h, t0, samples } => samples
            .iter()
            .enumerate()
            .filter(|(_, g)| **g != 0.0)
            .map(|(j, g)| (t0 + j as f64 * h, h * g * g))
            .collect(),
    }
}

/// One-particle expectation `2∫g²ρ dτ/‖Ψ‖²` of the smeared energy density.
pub fn single_packet_energy(spec: &WavePacketSpec, g: &SmearingFunction, quad: &QuadratureSpec) -> Result<f64> {
    let norm = packet_norm_sq(spec, quad);
    let mut acc = 0.0;
    for (t, w) in smearing_rule(g) {
        acc += w * rho_along_worldline(spec, t, quad)?;
    }
    Ok(2.0 * acc / norm)
}

/// Energy in `Ψ^{⊗n}`: `n` times the single-packet value.
pub fn n_particle_energy(single: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(QeiError::InvalidInput("n must be >= 1".into()));
    }
    Ok(n as f64 * single)
}

/// `r(k⃗,k⃗) = −η⁻¹(k,n)(k·γ̇)/(2ω)` for `k = (ω, k⃗)` and the frame's `γ̇ = e₀`, `n = e^{*0}`.
pub fn rs_kernel_diagonal(xi: f64, kvec: &[f64; 3], frame: &Frame) -> Result<f64> {
    let u = frame.u();
    let f = vector_forms(xi, &u);
    if !(u.0[0] > 0.0 && f.eta < 0.0 && f.zeta < 0.0) {
        return Err(QeiError::NotSubluminal {
            criterion: format!("frame velocity has eta = {}, zeta = {}", f.eta, f.zeta),
        });
    }
    let (w, _) = frequencies(xi, kvec);
    if w == 0.0 {
        return Err(QeiError::ZeroMomentum);
    }
    let k = Covec4([w, kvec[0], kvec[1], kvec[2]]);
    let n = frame.n().0;
    let eta_kn = -k.0[0] * n[0] + k.0[1] * n[1] + k.0[2] * n[2] + k.0[3] * n[3];
    Ok(-eta_kn * k.contract(&u) / (2.0 * w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::random_direction;
    use proptest::prelude::{prop_assert, proptest};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn interluminal() -> WavePacketSpec {
        WavePacketSpec::new(1.0, 2f64.asinh(), FRAC_PI_2, 1.0).unwrap()
    }

    #[test]
    fn profile_term_oracle() {
        // independent transcription of the three printed profiles
        let (xi, tau, k): (f64, f64, [f64; 3]) = (1.0, 1.0, [1.0, 0.0, 1.0]);
        let s = 1.0 + xi * xi;
        let wt = (k[0] * k[0] + (k[1] * k[1] + k[2] * k[2]) / s).sqrt();
        let e = (-wt * wt * tau * tau).exp();
        let p = PI * PI.sqrt();
        let f01 = tau.powi(3) / (p * s) * e;
        let f03 = -4.0 * k[0] * k[2] * tau.powi(5) / (p * s * s) * e;
        let f31 = 4.0 * wt * k[2] * tau.powi(5) / (5.0 * p * s * s) * e;
        let spec = WavePacketSpec::new(tau, 0.3, 0.9, xi).unwrap();
        let t = profile_terms(&spec, &k);
        for (got, want) in t.iter().zip([f01, f03, f31]) {
            assert!(got.re == 0.0 && (got.im - want).abs() < 1e-15);
        }
        let f = packet_profile(&spec, &k);
        let want = -f01 * 0.3f64.sinh() * 0.9f64.sin() + f03 * 0.3f64.sinh() * 0.9f64.cos() + f31 * 0.3f64.cosh();
        assert!((f.im - want).abs() < 1e-15);
    }

    #[test]
    fn profile_parity_and_rest() {
        let spec = WavePacketSpec::new(0.7, 0.0, 0.4, 0.6).unwrap();
        let k = [0.3, -0.5, 0.8];
        let t = profile_terms(&spec, &k);
        assert_eq!(packet_profile(&spec, &k), t[2]);
        let flipped = profile_terms(&spec, &[k[0], k[1], -k[2]]);
        assert_eq!(flipped[0], t[0]);
        assert_eq!(flipped[1], -t[1]);
        assert_eq!(flipped[2], -t[2]);
    }

    #[test]
    fn closed_form_examples() {
        let f = field_strength_origin(&interluminal(), FieldMethod::ClosedForm);
        assert!((f.0[0].re + 2.0).abs() < 1e-12);
        assert!((f.0[4].re - 5f64.sqrt()).abs() < 1e-12);
        assert!(f.0[2].re.abs() < 1e-12);
        let rest = WavePacketSpec::new(2.0, 0.0, 1.0, 1.0).unwrap();
        let f = field_strength_origin(&rest, FieldMethod::ClosedForm);
        for (i, z) in f.0.iter().enumerate() {
            assert_eq!(z.re, if i == 4 { 0.25 } else { 0.0 });
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..2 {
            let spec = WavePacketSpec::new(
                rng.gen_range(0.5..2.0),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(0.0..6.0),
                rng.gen_range(0.0..1.5),
            )
            .unwrap();
            let q = field_strength_at(&spec, &[0.0; 4], &spec.default_quadrature(48));
            let c = field_strength_origin(&spec, FieldMethod::ClosedForm);
            assert!(field_mismatch(&q, &c) < 1e-4, "{q:?} {c:?}");
        }
    }

    #[test]
    fn rho_origin_values() {
        // ½(1 − ξ²S)τ₀⁻⁴ from the defining density and the F(0) closed form
        let r = rho_origin(&interluminal(), FieldMethod::ClosedForm).unwrap();
        assert!((r + 1.5).abs() < 1e-12, "{r}");
        for (xi, sa, be, tau) in [(1.0, 0.5, 1.0, 1.0), (0.5, 1.0, 0.7, 2.0), (0.0, 0.0, 0.0, 0.5)] {
            let spec = WavePacketSpec::new(tau, f64::asinh(sa), be, xi).unwrap();
            let s = (sa * f64::sin(be)).powi(2);
            let r = rho_origin(&spec, FieldMethod::ClosedForm).unwrap();
            let want = 0.5 * (1.0 - xi * xi * s) / tau.powi(4);
            assert!((r - want).abs() < 1e-10 * want.abs(), "{r} {want}");
        }
        let b = WavePacketSpec::new(1.0, 1f64.asinh(), FRAC_PI_2, 1.0).unwrap();
        assert!(rho_origin(&b, FieldMethod::ClosedForm).unwrap().abs() < 1e-12);
    }

    #[test]
    fn norm_properties() {
        // pure f₃₁ at α = 0: |f|²·ω̃k⊥² ∝ τ₀¹⁰k⁷ and d³k ∝ τ₀⁻³, so the norm is τ₀-independent
        let n = |tau: f64| {
            let spec = WavePacketSpec::new(tau, 0.0, 0.0, 1.0).unwrap();
            packet_norm_sq(&spec, &spec.default_quadrature(48))
        };
        let (n1, n2) = (n(1.0), n(2.0));
        assert!(n1 > 0.0 && n1.is_finite());
        assert!((n2 / n1 - 1.0).abs() < 1e-9);
        // at fixed prefactors the Gaussian alone suppresses the norm
        assert!(n2 / 2f64.powi(10) < n1);
        let spec = interluminal();
        assert!(packet_norm_sq(&spec, &spec.default_quadrature(48)) > 0.0);
    }

    #[test]
    fn negative_near_origin_and_n_scaling() {
        let spec = interluminal();
        let q = spec.default_quadrature(48);
        for t in [-0.02, 0.0, 0.02] {
            assert!(rho_along_worldline(&spec, t, &q).unwrap() < 0.0);
        }
        let g = SmearingFunction::Gaussian { sigma: 0.02, center: 0.0 };
        let single = single_packet_energy(&spec, &g, &q).unwrap();
        assert!(single < 0.0);
        let mut last = 0.0;
        for n in 1..=10 {
            let e = n_particle_energy(single, n).unwrap();
            assert!(e < last);
            last = e;
        }
        assert_eq!(n_particle_energy(single, 1).unwrap(), single);
        assert!(n_particle_energy(single, 0).is_err());
    }

    #[test]
    fn kernel_rest_value_and_positivity() {
        let r = rs_kernel_diagonal(1.0, &[0.0, 0.0, 1.0], &Frame::identity()).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for _ in 0..10 {
            let xi = rng.gen_range(0.0..2.0);
            let (a, b) = loop {
                let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(0.0..6.0));
                if crate::causal::require_subluminal(xi, a, b).is_ok() {
                    break (a, b);
                }
            };
            let frame = frame_from_worldline(a, b, rng.gen_range(0.5..2.0)).unwrap();
            for _ in 0..100 {
                let d = random_direction(&mut rng);
                let s = rng.gen_range(0.01..5.0);
                let k = d.map(|x| s * x);
                let r = rs_kernel_diagonal(xi, &k, &frame).unwrap();
                assert!(r > 0.0);
                let r2 = rs_kernel_diagonal(xi, &k.map(|x| 2.0 * x), &frame).unwrap();
                assert!((r2 - 2.0 * r).abs() < 1e-12 * r);
            }
        }
        let bad = frame_from_worldline(2f64.asinh(), FRAC_PI_2, 1.0).unwrap();
        assert!(matches!(rs_kernel_diagonal(1.0, &[0.0, 0.0, 1.0], &bad), Err(QeiError::NotSubluminal { .. })));
    }

    proptest! {
        #[test]
        fn closed_form_rho_sign(xi in 0.0f64..2.0, a in -2.0f64..2.0, b in 0.0f64..6.3, tau in 0.2f64..3.0) {
            let spec = WavePacketSpec::new(tau, a, b, xi).unwrap();
            let r = rho_origin(&spec, FieldMethod::ClosedForm).unwrap();
            let d = 1.0 - xi * xi * (a.sinh() * b.sin()).powi(2);
            prop_assert!((r - 0.5 * d / tau.powi(4)).abs() <= 1e-9 * (1.0 + r.abs()));
        }
    }
}
