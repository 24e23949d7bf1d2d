//! Dual Lagrangian `P*` of the uniaxial crystal and the intrinsic clock
//! normalization `ℵ_UC`.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::causal::{legendre_bimetric, legendre_jacobian, require_subluminal, vector_forms, worldline_direction};
use crate::error::{QeiError, Result};
use crate::fresnel::BiMetric;
use crate::tensor::{Covec4, Vec4};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    Numeric,
    Series,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationResult {
    pub aleph: f64,
    pub mode: NormMode,
    /// `|P*(ℵû) − 1|`, numeric mode only.
    pub residual: Option<f64>,
    /// Truncation order of the series, series mode only.
    pub order: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LegendreInverse {
    pub k: Covec4,
    pub iterations: usize,
    pub residual: f64,
}

const MAX_ITER: usize = 50;

fn require_subluminal_vector(xi: f64, x: &Vec4) -> Result<()> {
    let f = vector_forms(xi, x);
    if !(x.0[0] > 0.0 && f.eta < 0.0 && f.zeta < 0.0) {
        return Err(QeiError::NotSubluminal {
            criterion: format!(
                "need future-directed x with eta(x,x) < 0 and zeta(x,x) < 0; got x0 = {}, eta = {}, zeta = {}",
                x.0[0], f.eta, f.zeta
            ),
        });
    }
    Ok(())
}

/// O(ξ²) inverse of the Legendre map, used as the Newton seed.
pub fn legendre_inverse_seed(xi: f64, x: &Vec4) -> Covec4 {
    let [t, x1, y, z] = x.0;
    let e = -t * t + x1 * x1 + y * y + z * z;
    let xu = -t; // η(ẋ, U)
    let xx = xi * x1; // η(ẋ, X)
    let low = [-t, x1, y, z];
    let u_low = [-1.0, 0.0, 0.0, 0.0];
    let x_low = [0.0, xi, 0.0, 0.0];
    let c = (xx * xx - xi * xi * xu * xu) / (2.0 * e * e);
    Covec4([0, 1, 2, 3].map(|a| {
        low[a] / e + c * low[a] + (xi * xi * xu * u_low[a] - xx * x_low[a]) / (2.0 * e)
    }))
}

/// Damped Newton inversion of `k ↦ ½η⁻¹k/η⁻¹(k,k) + ½ζ⁻¹k/ζ⁻¹(k,k)`.
pub fn legendre_inverse(xi: f64, x: &Vec4) -> Result<LegendreInverse> {
    require_subluminal_vector(xi, x)?;
    let bm = BiMetric::uniaxial(xi);
    let target = Vector4::from_row_slice(&x.0);
    let scale = target.norm();
    let resid = |k: &Covec4| Vector4::from_row_slice(&legendre_bimetric(&bm, k).0) - target;
    let mut k = legendre_inverse_seed(xi, x);
    let mut r = resid(&k);
    for it in 0..=MAX_ITER {
        let rn = r.norm();
        if rn <= 1e-12 * scale {
            return Ok(LegendreInverse { k, iterations: it, residual: rn / scale });
        }
        if it == MAX_ITER {
            break;
        }
        let jac = legendre_jacobian(&bm, &k);
        let j = Matrix4::from_fn(|a, b| jac[a][b]);
        let step = j.lu().solve(&r).ok_or_else(|| QeiError::NewtonDiverged {
            last: k.0,
            residual: rn,
            iterations: it,
        })?;
        let mut damp = 1.0;
        loop {
            let trial = Covec4([0, 1, 2, 3].map(|a| k.0[a] - damp * step[a]));
            let tr = resid(&trial);
            if tr.norm().is_finite() && tr.norm() < rn {
                k = trial;
                r = tr;
                break;
            }
            damp *= 0.5;
            if damp < 1e-8 {
                return Err(QeiError::NewtonDiverged { last: k.0, residual: rn, iterations: it });
            }
        }
    }
    Err(QeiError::NewtonDiverged { last: k.0, residual: r.norm(), iterations: MAX_ITER })
}

/// `P*(ẋ) = P(k(ẋ))^{-1/4}` with `P = η⁻¹(k,k)ζ⁻¹(k,k)`.
pub fn pstar(xi: f64, x: &Vec4, mode: NormMode) -> Result<f64> {
    require_subluminal_vector(xi, x)?;
    match mode {
        NormMode::Numeric => {
            let inv = legendre_inverse(xi, x)?;
            Ok(BiMetric::uniaxial(xi).fresnel(&inv.k).powf(-0.25))
        }
        NormMode::Series => {
            let e = vector_forms(0.0, x).eta.abs().sqrt();
            let xu = x.0[0];
            let xx = xi * x.0[1];
            Ok(e - (xi * xi * xu * xu - xx * xx) / (4.0 * e))
        }
    }
}

/// `ℵ_UC`: the `ℵ > 0` with `P*(ℵû) = 1`.
pub fn aleph_uc(xi: f64, alpha: f64, beta: f64, mode: NormMode) -> Result<NormalizationResult> {
    require_subluminal(xi, alpha, beta)?;
    let u = worldline_direction(alpha, beta);
    match mode {
        NormMode::Numeric => {
            let aleph = 1.0 / pstar(xi, &u, NormMode::Numeric)?;
            let residual = (pstar(xi, &u.scale(aleph), NormMode::Numeric)? - 1.0).abs();
            Ok(NormalizationResult { aleph, mode, residual: Some(residual), order: None })
        }
        NormMode::Series => {
            let s = (alpha.sinh() * beta.sin()).powi(2);
            Ok(NormalizationResult {
                aleph: 1.0 + xi * xi / 4.0 * (1.0 + s),
                mode,
                residual: None,
                order: Some("O(xi^4)".into()),
            })
        }
    }
}
