//! Momentum-space data of the uniaxial crystal: q-covector, closed-form
//! quasi-inverse in the meromorphic gauge, residue tensors and polarizations.

use serde::{Deserialize, Serialize};

use crate::causal::frequencies;
use crate::error::{QeiError, Result};
use crate::fresnel::{q_covector, quasi_inverse, FresnelContext, GaugeRule};
use crate::numerics::contour_residue_mat;
use crate::tensor::{mat_norm, zero_mat, Covec4, Mat4, Vec4, C64};

const ETA: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

pub fn q_vector(xi: f64, k: &Covec4) -> Covec4 {
    Covec4(q_covector(xi, &k.0))
}

/// `η_{ab}/η⁻¹(k,k) − (k+iq)_a(k+iq)_b/(ζ⁻¹(k,k)η⁻¹(k,k))`.
pub fn closed_form_quasi_inverse(xi: f64, k: &[C64; 4]) -> Result<Mat4<C64>> {
    let s = 1.0 + xi * xi;
    let ne = -k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + k[3] * k[3];
    let nz = s * (-k[0] * k[0] + k[1] * k[1]) + k[2] * k[2] + k[3] * k[3];
    if ne.norm() == 0.0 || nz.norm() == 0.0 {
        return Err(QeiError::NearNullCovector { g: (ne * nz).norm(), tol: 0.0 });
    }
    let q = q_covector(xi, k);
    let kq: [C64; 4] = [0, 1, 2, 3].map(|a| k[a] + C64::i() * q[a]);
    let mut e = zero_mat::<C64>();
    for a in 0..4 {
        for b in 0..4 {
            let d = if a == b { ETA[a] } else { 0.0 };
            e[a][b] = d / ne - kq[a] * kq[b] / (nz * ne);
        }
    }
    Ok(e)
}

/// Mode data for one spatial momentum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeData {
    pub kvec: [f64; 3],
    pub omega: f64,
    pub omega_tilde: f64,
    pub v: Covec4,
    pub v_tilde: Covec4,
    /// `𝒰_{ab}`; absent where `ξ²(k₂²+k₃²) = 0`.
    pub u_tensor: Option<Mat4<C64>>,
    pub u_tilde_tensor: Option<Mat4<C64>>,
    /// On the optic axis the polarizations are the `φ = 0` azimuth limits.
    pub axis_degenerate: bool,
}

impl ModeData {
    /// `(ω, k⃗)`
    pub fn k_ordinary(&self) -> Covec4 {
        Covec4([self.omega, self.kvec[0], self.kvec[1], self.kvec[2]])
    }
    /// `(ω̃, k⃗)`
    pub fn k_extraordinary(&self) -> Covec4 {
        Covec4([self.omega_tilde, self.kvec[0], self.kvec[1], self.kvec[2]])
    }
}

/// `(k + iq)_a (k + iq)_b` at a real covector.
fn kq_outer(xi: f64, k: &Covec4) -> Mat4<C64> {
    let q = q_covector(xi, &k.0);
    let kq: [C64; 4] = [0, 1, 2, 3].map(|a| C64::new(k.0[a], q[a]));
    let mut m = zero_mat::<C64>();
    for a in 0..4 {
        for b in 0..4 {
            m[a][b] = kq[a] * kq[b];
        }
    }
    m
}

/// `v = (0, 0, k₃, −k₂)/k⊥`, `ṽ = (0, k⊥²/(1+ξ²), −k₁k₂, −k₁k₃)/(ω̃k⊥)`.
pub fn polarizations(xi: f64, kvec: &[f64; 3]) -> Result<(Covec4, Covec4, bool)> {
    let [k1, k2, k3] = *kvec;
    let (_, wt) = frequencies(xi, kvec);
    if wt == 0.0 {
        return Err(QeiError::ZeroMomentum);
    }
    let kp = (k2 * k2 + k3 * k3).sqrt();
    if kp == 0.0 {
        let s = if k1 >= 0.0 { 1.0 } else { -1.0 };
        return Ok((Covec4::new(0.0, 0.0, 0.0, -1.0), Covec4::new(0.0, 0.0, -s, 0.0), true));
    }
    let v = Covec4::new(0.0, 0.0, k3 / kp, -k2 / kp);
    let n = wt * kp;
    let vt = Covec4::new(0.0, kp * kp / (1.0 + xi * xi) / n, -k1 * k2 / n, -k1 * k3 / n);
    Ok((v, vt, false))
}

pub fn mode_data(xi: f64, kvec: &[f64; 3]) -> Result<ModeData> {
    let (omega, omega_tilde) = frequencies(xi, kvec);
    let (v, v_tilde, axis_degenerate) = polarizations(xi, kvec)?;
    let perp2 = kvec[1] * kvec[1] + kvec[2] * kvec[2];
    let denom = xi * xi * perp2;
    let (u_tensor, u_tilde_tensor) = if denom > 0.0 {
        let k = Covec4([omega, kvec[0], kvec[1], kvec[2]]);
        let kt = Covec4([omega_tilde, kvec[0], kvec[1], kvec[2]]);
        let mut u = kq_outer(xi, &k);
        let mut ut = kq_outer(xi, &kt);
        for a in 0..4 {
            for b in 0..4 {
                u[a][b] /= denom;
                ut[a][b] /= -denom;
            }
            u[a][a] += ETA[a];
        }
        (Some(u), Some(ut))
    } else {
        (None, None)
    };
    Ok(ModeData {
        kvec: *kvec,
        omega,
        omega_tilde,
        v,
        v_tilde,
        u_tensor,
        u_tilde_tensor,
        axis_degenerate,
    })
}

/// Relative residuals of the contour residues of `𝓔` at `k₀ = ω` and
/// `k₀ = ω̃` against `−𝒰/(2ω)` and `−𝒰̃/(2ω̃)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueCheck {
    pub ordinary: f64,
    pub extraordinary: f64,
}

pub fn residue_check(xi: f64, kvec: &[f64; 3]) -> Result<ResidueCheck> {
    let md = mode_data(xi, kvec)?;
    let gap = (md.omega - md.omega_tilde).abs();
    if gap <= 1e-8 * (1.0 + md.omega) {
        return Err(QeiError::PolesMerged { gap });
    }
    let (u, ut) = match (md.u_tensor, md.u_tilde_tensor) {
        (Some(u), Some(ut)) => (u, ut),
        _ => return Err(QeiError::PolesMerged { gap }),
    };
    let ctx = FresnelContext::uniaxial(xi)?;
    let rule = GaugeRule::Meromorphic { xi };
    let e_at = |k0: C64| -> Mat4<C64> {
        let k = [k0, C64::from(kvec[0]), C64::from(kvec[1]), C64::from(kvec[2])];
        rule.kappa(&k)
            .and_then(|kap| quasi_inverse(&ctx, &k, &kap))
            .unwrap_or_else(|_| [[C64::new(f64::NAN, 0.0); 4]; 4])
    };
    let radius = 0.25 * gap;
    let rel = |center: f64, tensor: &Mat4<C64>| -> Result<f64> {
        let num = contour_residue_mat(e_at, C64::from(center), radius, 64)?;
        let mut diff = zero_mat::<C64>();
        let mut want = zero_mat::<C64>();
        for a in 0..4 {
            for b in 0..4 {
                want[a][b] = -tensor[a][b] / (2.0 * center);
                diff[a][b] = num[a][b] - want[a][b];
            }
        }
        Ok(mat_norm(&diff) / mat_norm(&want))
    };
    Ok(ResidueCheck {
        ordinary: rel(md.omega, &u)?,
        extraordinary: rel(md.omega_tilde, &ut)?,
    })
}

/// `|v·ĵ(k)|²/(2ω) + |ṽ·ĵ(k̃)|²/(2ω̃)`.
pub fn vacuum_mode_weight(xi: f64, kvec: &[f64; 3], j: &[C64; 4], j_tilde: &[C64; 4]) -> Result<f64> {
    let md = mode_data(xi, kvec)?;
    let c = |v: &Covec4, j: &[C64; 4]| -> C64 { (0..4).map(|a| j[a] * v.0[a]).sum() };
    Ok(c(&md.v, j).norm_sqr() / (2.0 * md.omega) + c(&md.v_tilde, j_tilde).norm_sqr() / (2.0 * md.omega_tilde))
}

/// Three vectors spanning `{V : k·V = 0}` (Gram–Schmidt on coordinate axes).
pub fn transverse_basis(k: &Covec4) -> [Vec4; 3] {
    let kn = k.norm();
    let kh: [f64; 4] = k.0.map(|x| x / kn);
    let mut out: Vec<[f64; 4]> = Vec::new();
    for i in 0..4 {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        let p: f64 = (0..4).map(|a| kh[a] * v[a]).sum();
        for a in 0..4 {
            v[a] -= p * kh[a];
        }
        for w in &out {
            let p: f64 = (0..4).map(|a| w[a] * v[a]).sum();
            for a in 0..4 {
                v[a] -= p * w[a];
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 && out.len() < 3 {
            out.push(v.map(|x| x / n));
        }
    }
    [Vec4(out[0]), Vec4(out[1]), Vec4(out[2])]
}
