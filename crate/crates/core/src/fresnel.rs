//! Fresnel polynomial, second adjugate, quasi-inverse and hyperbolicity.

use nalgebra::{Matrix5, Vector5};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QeiError, Result};
use crate::numerics::{quartic_real_roots, PolyRoots, REAL_ROOT_TOL};
use crate::tensor::{
    adjugate, build_uniaxial_chi, diag, principal_symbol, second_adjugate, zero_mat,
    ConstitutiveDensity, Covec4, InverseMetric4, Mat4, Scalar, Vec4, C64,
};

/// Bi-metric factorization `𝒢 = θ·η⁻¹(k,k)·ζ⁻¹(k,k)` of the uniaxial crystal
/// in its rest frame, optic axis along x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiMetric {
    pub xi: f64,
    pub eta_inv: InverseMetric4,
    pub zeta_inv: InverseMetric4,
    pub theta: f64,
}

impl BiMetric {
    pub fn uniaxial(xi: f64) -> Self {
        let s = 1.0 + xi * xi;
        BiMetric {
            xi,
            eta_inv: InverseMetric4::minkowski(),
            zeta_inv: InverseMetric4::new(diag(-s, s, 1.0, 1.0)).expect("symmetric"),
            theta: 1.0,
        }
    }

    pub fn eta(&self, k: &Covec4) -> f64 {
        self.eta_inv.eval(k, k)
    }

    pub fn zeta(&self, k: &Covec4) -> f64 {
        self.zeta_inv.eval(k, k)
    }

    pub fn fresnel(&self, k: &Covec4) -> f64 {
        self.theta * self.eta(k) * self.zeta(k)
    }
}

/// A constitutive density with an orientation covector `n₀` selecting the
/// hyperbolicity cone, normalised so that `𝒢(n₀) > 0`.
#[derive(Clone, Debug)]
pub struct FresnelContext {
    chi: ConstitutiveDensity,
    bimetric: Option<BiMetric>,
    n0: Covec4,
    sign: f64,
}

impl FresnelContext {
    /// Crystal at rest with `U = ∂_t`, `X = ξ ∂_x`, oriented by `(1,0,0,0)`.
    pub fn uniaxial(xi: f64) -> Result<Self> {
        let chi = build_uniaxial_chi(xi, &Vec4::new(1.0, 0.0, 0.0, 0.0), &Vec4::new(0.0, xi, 0.0, 0.0))?;
        Ok(FresnelContext {
            chi,
            bimetric: Some(BiMetric::uniaxial(xi)),
            n0: Covec4::new(1.0, 0.0, 0.0, 0.0),
            sign: 1.0,
        })
    }

    /// Arbitrary density; the overall sign is fixed by `𝒢(n₀) > 0`.
    pub fn generic(chi: ConstitutiveDensity, n0: Covec4) -> Result<Self> {
        let raw = fresnel_raw(&chi, &n0.0, &generic_kappa(&n0.0)?);
        let tol = null_tolerance(&chi, &n0.0);
        if raw.abs() <= tol {
            return Err(QeiError::NearNullCovector { g: raw, tol });
        }
        Ok(FresnelContext {
            chi,
            bimetric: None,
            n0,
            sign: raw.signum(),
        })
    }

    pub fn chi(&self) -> &ConstitutiveDensity {
        &self.chi
    }

    pub fn bimetric(&self) -> Option<&BiMetric> {
        self.bimetric.as_ref()
    }

    pub fn n0(&self) -> Covec4 {
        self.n0
    }

    pub fn xi(&self) -> Option<f64> {
        self.bimetric.map(|b| b.xi)
    }
}

/// Rule producing the gauge vector `κ(k)` with `k·κ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GaugeRule {
    /// `e_i/k_i` for the coordinate direction maximising `|k_i|`.
    Generic,
    /// `e_i/k_i` for a fixed coordinate direction.
    Axis(usize),
    /// `(k♯ + i q♯)/η⁻¹(k,k)` of the crystal.
    Meromorphic { xi: f64 },
}

fn generic_kappa<T: Scalar>(k: &[T; 4]) -> Result<[T; 4]> {
    let i = (0..4)
        .max_by(|&a, &b| k[a].modulus().total_cmp(&k[b].modulus()))
        .unwrap();
    axis_kappa(k, i)
}

fn axis_kappa<T: Scalar>(k: &[T; 4], i: usize) -> Result<[T; 4]> {
    if i > 3 {
        return Err(QeiError::InvalidInput(format!("axis index {i} out of range")));
    }
    if k[i].modulus() == 0.0 {
        return Err(QeiError::DegenerateInput(format!("k_{i} = 0, axis gauge undefined")));
    }
    let mut out = [T::zero(); 4];
    out[i] = T::one() / k[i];
    Ok(out)
}

/// `q_a = (k·X)U_a − (k·U)X_a` for `U^a = (1,0,0,0)`, `X^a = (0,ξ,0,0)`,
/// i.e. `q = (−ξk₁, −ξk₀, 0, 0)`.
pub fn q_covector<T: Scalar>(xi: f64, k: &[T; 4]) -> [T; 4] {
    let x = T::from(xi);
    [-(x * k[1]), -(x * k[0]), T::zero(), T::zero()]
}

impl GaugeRule {
    pub fn kappa(&self, k: &[C64; 4]) -> Result<[C64; 4]> {
        match *self {
            GaugeRule::Generic => generic_kappa(k),
            GaugeRule::Axis(i) => axis_kappa(k, i),
            GaugeRule::Meromorphic { xi } => {
                let eta = InverseMetric4::minkowski();
                let n = eta.eval_generic(k, k);
                if n.norm() == 0.0 {
                    return Err(QeiError::DegenerateInput("eta^-1(k,k) = 0".into()));
                }
                let q = q_covector(xi, k);
                let ks = eta.raise_generic(k);
                let qs = eta.raise_generic(&q);
                let i = C64::i();
                Ok([0, 1, 2, 3].map(|a| (ks[a] + i * qs[a]) / n))
            }
        }
    }

    /// Real gauge vector; fails for the meromorphic rule.
    pub fn kappa_real(&self, k: &[f64; 4]) -> Result<[f64; 4]> {
        match *self {
            GaugeRule::Generic => generic_kappa(k),
            GaugeRule::Axis(i) => axis_kappa(k, i),
            GaugeRule::Meromorphic { .. } => Err(QeiError::InvalidInput(
                "the meromorphic gauge vector is complex".into(),
            )),
        }
    }
}

fn fresnel_raw<T: Scalar>(chi: &ConstitutiveDensity, k: &[T; 4], kappa: &[T; 4]) -> T {
    let adj = adjugate(&principal_symbol(chi, k));
    let mut s = T::zero();
    for a in 0..4 {
        for b in 0..4 {
            s += adj[a][b] * kappa[a] * kappa[b];
        }
    }
    -s
}

fn null_tolerance<T: Scalar>(chi: &ConstitutiveDensity, k: &[T; 4]) -> f64 {
    let kn2: f64 = k.iter().map(|x| x.modulus().powi(2)).sum();
    1e-9 * chi.max_abs().powi(3) * kn2 * kn2
}

/// `𝒢(k)` evaluated with an explicit gauge vector (complex-capable).
pub fn fresnel_with<T: Scalar>(ctx: &FresnelContext, k: &[T; 4], kappa: &[T; 4]) -> T {
    fresnel_raw(&ctx.chi, k, kappa) * T::from(ctx.sign)
}

/// `𝒢(k)` computed from `χ` (generic gauge). Zero at `k = 0`.
pub fn fresnel_eval(ctx: &FresnelContext, k: &Covec4) -> f64 {
    match generic_kappa(&k.0) {
        Ok(kappa) => fresnel_with(ctx, &k.0, &kappa),
        Err(_) => 0.0,
    }
}

/// `𝒬_{ab} = −adj₂(𝓜)_{acbd} κ^c κ^d` (times the context sign).
pub fn second_adjugate_q<T: Scalar>(ctx: &FresnelContext, k: &[T; 4], kappa: &[T; 4]) -> Mat4<T> {
    let a2 = second_adjugate(&principal_symbol(&ctx.chi, k));
    let s = T::from(-ctx.sign);
    let mut q = zero_mat::<T>();
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = T::zero();
            for c in 0..4 {
                for d in 0..4 {
                    acc += a2[a][b][c][d] * kappa[c] * kappa[d];
                }
            }
            q[a][b] = s * acc;
        }
    }
    q
}

/// `π^c_b = δ^c_b − κ^c k_b`, stored as `p[c][b]`.
pub fn projector<T: Scalar>(k: &[T; 4], kappa: &[T; 4]) -> Mat4<T> {
    let mut p = zero_mat::<T>();
    for c in 0..4 {
        for b in 0..4 {
            p[c][b] = if c == b { T::one() } else { T::zero() } - kappa[c] * k[b];
        }
    }
    p
}

/// Quasi-inverse `𝓔_{ab} = π^c_a 𝒬_{cd} π^d_b / 𝒢` with `𝓜𝓔 = π`.
pub fn quasi_inverse<T: Scalar>(ctx: &FresnelContext, k: &[T; 4], kappa: &[T; 4]) -> Result<Mat4<T>> {
    let g = fresnel_with(ctx, k, kappa);
    let tol = null_tolerance(&ctx.chi, k);
    if g.modulus() <= tol {
        return Err(QeiError::NearNullCovector { g: g.modulus(), tol });
    }
    let q = second_adjugate_q(ctx, k, kappa);
    let p = projector(k, kappa);
    let mut qp = zero_mat::<T>();
    for c in 0..4 {
        for b in 0..4 {
            let mut s = T::zero();
            for d in 0..4 {
                s += q[c][d] * p[d][b];
            }
            qp[c][b] = s;
        }
    }
    let mut e = zero_mat::<T>();
    for a in 0..4 {
        for b in 0..4 {
            let mut s = T::zero();
            for c in 0..4 {
                s += p[c][a] * qp[c][b];
            }
            e[a][b] = s / g;
        }
    }
    Ok(e)
}

/// Coefficients of `t ↦ 𝒢(k + t·n)` (ascending powers), by exact
/// interpolation of the quartic at five nodes.
pub fn line_polynomial(ctx: &FresnelContext, k: &Covec4, n: &Covec4) -> [f64; 5] {
    let ts = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let v = Matrix5::from_fn(|i, j| f64::powi(ts[i], j as i32));
    let y = Vector5::from_fn(|i, _| fresnel_eval(ctx, &k.add(&n.scale(ts[i]))));
    let c = v.lu().solve(&y).expect("Vandermonde nodes are distinct");
    [c[0], c[1], c[2], c[3], c[4]]
}

fn line_roots(ctx: &FresnelContext, k: &Covec4, n: &Covec4) -> PolyRoots {
    quartic_real_roots(line_polynomial(ctx, k, n), REAL_ROOT_TOL)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub hyperbolic: bool,
    pub trials: usize,
    /// Trial covector at which the worst root was seen.
    pub witness: Option<Covec4>,
    /// Root with the largest relative imaginary part over all trials.
    pub worst_root: Option<C64>,
}

/// Randomised test that `t ↦ 𝒢(ξ + t n)` has only real roots.
pub fn is_hyperbolic(ctx: &FresnelContext, n: &Covec4, trial_count: usize, seed: u64) -> Result<HyperbolicityReport> {
    let gn = fresnel_eval(ctx, n);
    let tol = null_tolerance(&ctx.chi, &n.0);
    if gn.abs() <= tol {
        return Err(QeiError::NearNullCovector { g: gn.abs(), tol });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = HyperbolicityReport {
        hyperbolic: true,
        trials: trial_count,
        witness: None,
        worst_root: None,
    };
    let mut worst = -1.0f64;
    for _ in 0..trial_count {
        let k = Covec4([0; 4].map(|_| rng.gen_range(-1.0..1.0)));
        let roots = line_roots(ctx, &k, n);
        let all_real = roots.all_real() && roots.degree == 4;
        if let Some(z) = roots.worst() {
            let score = z.im.abs() / (1.0 + z.re.abs()) + if all_real { 0.0 } else { 1e6 };
            if score > worst {
                worst = score;
                report.worst_root = Some(z);
                report.witness = Some(k);
            }
        }
        if !all_real {
            report.hyperbolic = false;
        }
    }
    Ok(report)
}

/// Gårding test: all roots of `s ↦ 𝒢(k + s n₀)` real and strictly negative.
pub fn in_hyperbolicity_cone(ctx: &FresnelContext, k: &Covec4) -> bool {
    let roots = line_roots(ctx, k, &ctx.n0);
    let scale = k.norm() / ctx.n0.norm().max(f64::MIN_POSITIVE);
    roots.degree == 4
        && roots.all_real()
        && roots.roots.iter().all(|r| r.value.re < -1e-9 * scale)
}

/// Cone membership from the factorization: `η⁻¹(k,k) < 0` with `k₀` on the
/// side of `n₀`.
pub fn in_cone_bimetric(bm: &BiMetric, n0: &Covec4, k: &Covec4) -> bool {
    bm.eta(k) < 0.0 && bm.zeta(k) < 0.0 && k.0[0] * n0.0[0] > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{levi_civita, lift, mat_mul};

    fn rand_k(rng: &mut ChaCha8Rng) -> Covec4 {
        Covec4([0; 4].map(|_| rng.gen_range(-2.0..2.0)))
    }

    #[test]
    fn fresnel_examples() {
        let ctx = FresnelContext::uniaxial(1.0).unwrap();
        for k in [[1.0, 0.0, 0.0, 1.0], [1.0, 0.0, 0.0, 2f64.sqrt()], [1.0, 1.0, 0.0, 0.0]] {
            assert!(fresnel_eval(&ctx, &Covec4(k)).abs() < 1e-12, "{k:?}");
        }
        // double root in k₀ at the optic axis: 𝒢(k₀,1,0,0) = (1−k₀²)²·2
        let c = line_polynomial(&ctx, &Covec4::new(0.0, 1.0, 0.0, 0.0), &Covec4::new(1.0, 0.0, 0.0, 0.0));
        let r = quartic_real_roots(c, REAL_ROOT_TOL);
        assert!(r.all_real());
        assert!(r.roots.iter().all(|x| x.multiplicity == 2));
        assert!(fresnel_eval(&ctx, &Covec4::new(1.0, 0.0, 0.0, 0.0)) > 0.0);
    }

    #[test]
    fn factorization_and_gauge_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for xi in [0.0, 0.5, 1.0, 2.0] {
            let ctx = FresnelContext::uniaxial(xi).unwrap();
            let bm = *ctx.bimetric().unwrap();
            for _ in 0..200 {
                let k = rand_k(&mut rng);
                let g = fresnel_eval(&ctx, &k);
                let n4 = k.norm().powi(4);
                assert!((g - bm.fresnel(&k)).abs() <= 1e-9 * (1.0 + n4));
                for i in 0..4 {
                    let kap = GaugeRule::Axis(i).kappa_real(&k.0).unwrap();
                    assert!((fresnel_with(&ctx, &k.0, &kap) - g).abs() <= 1e-9 * (1.0 + n4));
                }
                let kc = lift::<C64>(&k.0);
                let mer = GaugeRule::Meromorphic { xi }.kappa(&kc).unwrap();
                assert!((fresnel_with(&ctx, &kc, &mer) - g).norm() <= 1e-9 * (1.0 + n4));
            }
        }
    }

    #[test]
    fn kappa_normalisation() {
        let k = lift::<C64>(&[0.3, -1.2, 0.5, 0.7]);
        for rule in [GaugeRule::Generic, GaugeRule::Axis(2), GaugeRule::Meromorphic { xi: 0.7 }] {
            let kap = rule.kappa(&k).unwrap();
            let s: C64 = (0..4).map(|a| k[a] * kap[a]).sum();
            assert!((s - 1.0).norm() < 1e-12);
        }
        assert!(GaugeRule::Axis(2).kappa_real(&[1.0, 0.0, 0.0, 0.0]).is_err());
    }

    /// `Σ ε̂ ε̂ χ χ χ k k k k / 24`, with the sign flip of the convention.
    fn fresnel_eps_oracle(chi: &ConstitutiveDensity, k: &[f64; 4]) -> f64 {
        // chk[A][C][E] = χ^{ACEx} k_x
        let mut chk = [[[0.0; 4]; 4]; 4];
        for a in 0..4 {
            for c in 0..4 {
                for e in 0..4 {
                    chk[a][c][e] = (0..4).map(|x| chi.get(a, c, e, x) * k[x]).sum();
                }
            }
        }
        // 'CABD,dEFH,ACEx,ByFg,DzHd,x,y,g,z'
        let mut s = 0.0;
        let nz: Vec<[usize; 4]> = (0..256)
            .map(|i| [i / 64, (i / 16) % 4, (i / 4) % 4, i % 4])
            .filter(|p| levi_civita(p[0], p[1], p[2], p[3]) != 0.0)
            .collect();
        for &[c, a, b, dd] in &nz {
            let e1 = levi_civita(c, a, b, dd);
            for &[d, e, f, h] in &nz {
                let e2 = levi_civita(d, e, f, h);
                let t1 = chk[a][c][e];
                if t1 == 0.0 {
                    continue;
                }
                // χ^{ByFg}k_y k_g and χ^{DzHd}k_z
                let mut t2 = 0.0;
                for y in 0..4 {
                    for g in 0..4 {
                        t2 += chi.get(b, y, f, g) * k[y] * k[g];
                    }
                }
                let t3: f64 = (0..4).map(|z| chi.get(dd, z, h, d) * k[z]).sum();
                s += e1 * e2 * t1 * t2 * t3;
            }
        }
        -s / 24.0
    }

    #[test]
    fn fresnel_matches_epsilon_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for xi in [0.4, 1.3] {
            let ctx = FresnelContext::uniaxial(xi).unwrap();
            for _ in 0..3 {
                let k = rand_k(&mut rng);
                let o = fresnel_eps_oracle(ctx.chi(), &k.0);
                assert!((fresnel_eval(&ctx, &k) - o).abs() < 1e-9 * (1.0 + o.abs()), "{o}");
            }
        }
    }

    /// `Σ ε̂_{bCAB} ε̂_{aDEF} χ^{ACEx} χ^{ByFD} k_x k_y / 8`.
    fn q_eps_oracle(chi: &ConstitutiveDensity, k: &[f64; 4]) -> Mat4<f64> {
        let mut chk = [[[0.0; 4]; 4]; 4];
        for a in 0..4 {
            for c in 0..4 {
                for e in 0..4 {
                    chk[a][c][e] = (0..4).map(|x| chi.get(a, c, e, x) * k[x]).sum();
                }
            }
        }
        let mut out = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                let mut s = 0.0;
                for c in 0..4 {
                    for aa in 0..4 {
                        for bb in 0..4 {
                            let e1 = levi_civita(b, c, aa, bb);
                            if e1 == 0.0 {
                                continue;
                            }
                            for d in 0..4 {
                                for e in 0..4 {
                                    for f in 0..4 {
                                        let e2 = levi_civita(a, d, e, f);
                                        if e2 == 0.0 {
                                            continue;
                                        }
                                        // χ^{ByFD} k_y
                                        let t2: f64 = (0..4).map(|y| chi.get(bb, y, f, d) * k[y]).sum();
                                        s += e1 * e2 * chk[aa][c][e] * t2;
                                    }
                                }
                            }
                        }
                    }
                }
                out[a][b] = s / 8.0;
            }
        }
        out
    }

    #[test]
    fn second_adjugate_matches_epsilon_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ctx = FresnelContext::uniaxial(0.8).unwrap();
        for _ in 0..4 {
            let k = rand_k(&mut rng);
            let kap = GaugeRule::Generic.kappa_real(&k.0).unwrap();
            let q = second_adjugate_q(&ctx, &k.0, &kap);
            let p = projector(&k.0, &kap);
            let pqp = mat_mul(&crate::tensor::transpose(&p), &mat_mul(&q, &p));
            let pt = crate::tensor::transpose(&p);
            let o = mat_mul(&pt, &mat_mul(&q_eps_oracle(ctx.chi(), &k.0), &p));
            for a in 0..4 {
                for b in 0..4 {
                    assert!((pqp[a][b] + o[a][b]).abs() < 1e-9 * (1.0 + o[a][b].abs()));
                }
            }
        }
        let z = second_adjugate_q(&ctx, &[0.0; 4], &[1.0, 0.0, 0.0, 0.0]);
        assert!(z.iter().flatten().all(|x| *x == 0.0));
    }

    #[test]
    fn quasi_inverse_identity() {
        let ctx = FresnelContext::uniaxial(1.0).unwrap();
        let k = [2.0, 0.0, 0.0, 1.0];
        let kap = GaugeRule::Generic.kappa_real(&k).unwrap();
        let e = quasi_inverse(&ctx, &k, &kap).unwrap();
        let m = principal_symbol(ctx.chi(), &k);
        let me = mat_mul(&m, &e);
        let p = projector(&k, &kap);
        for c in 0..4 {
            for b in 0..4 {
                assert!((me[c][b] - p[c][b]).abs() < 1e-8);
            }
        }
        let bad = [1.0, 0.0, 0.0, 1.0];
        let kap = GaugeRule::Generic.kappa_real(&bad).unwrap();
        assert!(matches!(
            quasi_inverse(&ctx, &bad, &kap),
            Err(QeiError::NearNullCovector { .. })
        ));
    }

    #[test]
    fn quasi_inverse_meromorphic_closed_form() {
        let xi = 0.9;
        let ctx = FresnelContext::uniaxial(xi).unwrap();
        let k = lift::<C64>(&[1.7, 0.4, -0.3, 0.8]);
        let kap = GaugeRule::Meromorphic { xi }.kappa(&k).unwrap();
        let e = quasi_inverse(&ctx, &k, &kap).unwrap();
        let bm = ctx.bimetric().unwrap();
        let ne = bm.eta_inv.eval_generic(&k, &k);
        let nz = bm.zeta_inv.eval_generic(&k, &k);
        let q = q_covector(xi, &k);
        let i = C64::i();
        let eta = [-1.0, 1.0, 1.0, 1.0];
        for a in 0..4 {
            for b in 0..4 {
                let d = if a == b { eta[a] } else { 0.0 };
                let want = d / ne - (k[a] + i * q[a]) * (k[b] + i * q[b]) / (nz * ne);
                assert!((e[a][b] - want).norm() < 1e-10, "{a}{b}");
            }
        }
    }

    #[test]
    fn hyperbolicity() {
        let ctx = FresnelContext::uniaxial(1.0).unwrap();
        let r = is_hyperbolic(&ctx, &Covec4::new(1.0, 0.0, 0.0, 0.0), 200, 7).unwrap();
        assert!(r.hyperbolic);
        let r = is_hyperbolic(&ctx, &Covec4::new(0.0, 0.0, 1.0, 0.0), 200, 7).unwrap();
        assert!(!r.hyperbolic);
        assert!(r.witness.is_some());
        let e = FresnelContext::generic(ConstitutiveDensity::euclidean(), Covec4::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        let r = is_hyperbolic(&e, &Covec4::new(1.0, 0.0, 0.0, 0.0), 50, 7).unwrap();
        assert!(!r.hyperbolic);
    }

    #[test]
    fn cone_membership() {
        let ctx = FresnelContext::uniaxial(1.0).unwrap();
        assert!(in_hyperbolicity_cone(&ctx, &Covec4::new(1.0, 0.0, 0.0, 0.0)));
        assert!(!in_hyperbolicity_cone(&ctx, &Covec4::new(1.0, 0.0, 0.0, 1.2)));
        assert!(!in_hyperbolicity_cone(&ctx, &Covec4::new(-1.0, 0.0, 0.0, 0.0)));
        let bm = ctx.bimetric().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let k = rand_k(&mut rng);
            if bm.eta(&k).abs() < 1e-3 || bm.zeta(&k).abs() < 1e-3 {
                continue;
            }
            assert_eq!(in_hyperbolicity_cone(&ctx, &k), in_cone_bimetric(bm, &ctx.n0(), &k), "{k:?}");
        }
    }
}
