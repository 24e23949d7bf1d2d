//! Covector/vector classification against the two light cones of the
//! crystal, the Legendre map, and mode frequencies.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QeiError, Result};
use crate::fresnel::{fresnel_eval, BiMetric, FresnelContext};
use crate::tensor::{Covec4, Mat4, Vec4};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovectorClass {
    HyperbolicFuture,
    HyperbolicPast,
    OrdinaryNull,
    ExtraordinaryNull,
    /// On the optic axis, null for both cones.
    DoublyNull,
    /// Between the two cotangent cones.
    Interstitial,
    Spacelike,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorClass {
    SubluminalFuture,
    SubluminalPast,
    InterluminalFuture,
    InterluminalPast,
    /// Null for the slow (extraordinary, ζ) cone.
    SlowNull,
    /// Null for the fast (ordinary, η) cone.
    FastNull,
    Superluminal,
}

impl VectorClass {
    pub fn is_future(&self) -> bool {
        matches!(self, VectorClass::SubluminalFuture | VectorClass::InterluminalFuture)
    }
    pub fn is_past(&self) -> bool {
        matches!(self, VectorClass::SubluminalPast | VectorClass::InterluminalPast)
    }
    pub fn is_subluminal(&self) -> bool {
        matches!(self, VectorClass::SubluminalFuture | VectorClass::SubluminalPast)
    }
}

/// Values of the two quadratic forms that decided a classification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForms {
    pub eta: f64,
    pub zeta: f64,
}

fn require_bimetric(ctx: &FresnelContext) -> Result<&BiMetric> {
    ctx.bimetric()
        .ok_or_else(|| QeiError::InvalidInput("classification needs a bi-metric context".into()))
}

/// `(η(z,z), ζ(z,z))` on vectors, with `ζ_{ab}` the inverse of `ζ⁻¹`.
pub fn vector_forms(xi: f64, z: &Vec4) -> QuadraticForms {
    let s = 1.0 + xi * xi;
    let [t, x, y, w] = z.0;
    QuadraticForms {
        eta: -t * t + x * x + y * y + w * w,
        zeta: (-t * t + x * x) / s + y * y + w * w,
    }
}

pub fn covector_forms(bm: &BiMetric, k: &Covec4) -> QuadraticForms {
    QuadraticForms {
        eta: bm.eta(k),
        zeta: bm.zeta(k),
    }
}

/// Sign of `q` with `|q| ≤ thr` mapped to 0.
fn sign_tol(q: f64, thr: f64) -> i8 {
    if q.abs() <= thr {
        0
    } else if q < 0.0 {
        -1
    } else {
        1
    }
}

pub fn classify_covector(ctx: &FresnelContext, k: &Covec4, tol: f64) -> Result<CovectorClass> {
    let bm = require_bimetric(ctx)?;
    let n2 = k.norm().powi(2);
    if n2 == 0.0 {
        return Err(QeiError::DegenerateInput("zero covector".into()));
    }
    let f = covector_forms(bm, k);
    let thr = tol * n2;
    let future = k.0[0] * ctx.n0().0[0] > 0.0;
    Ok(match (sign_tol(f.eta, thr), sign_tol(f.zeta, thr)) {
        (0, 0) => {
            let [k0, k1, k2, k3] = k.0;
            let on_axis = (k2 * k2 + k3 * k3) <= tol * n2 && (k0 * k0 - k1 * k1).abs() <= tol * n2;
            if !on_axis {
                return Err(QeiError::DegenerateInput(
                    "both cones null but covector is off the optic axis (xi ~ 0?)".into(),
                ));
            }
            CovectorClass::DoublyNull
        }
        (-1, _) if future => CovectorClass::HyperbolicFuture,
        (-1, _) => CovectorClass::HyperbolicPast,
        (0, _) => CovectorClass::OrdinaryNull,
        (1, 0) => CovectorClass::ExtraordinaryNull,
        (1, -1) => CovectorClass::Interstitial,
        _ => CovectorClass::Spacelike,
    })
}

pub fn classify_vector(ctx: &FresnelContext, z: &Vec4, tol: f64) -> Result<VectorClass> {
    let bm = require_bimetric(ctx)?;
    let n2 = z.norm().powi(2);
    if n2 == 0.0 {
        return Err(QeiError::DegenerateInput("zero vector".into()));
    }
    let f = vector_forms(bm.xi, z);
    let thr = tol * n2;
    let future = z.0[0] > 0.0;
    Ok(match (sign_tol(f.zeta, thr), sign_tol(f.eta, thr)) {
        (-1, _) if future => VectorClass::SubluminalFuture,
        (-1, _) => VectorClass::SubluminalPast,
        (0, _) => VectorClass::SlowNull,
        (_, -1) if future => VectorClass::InterluminalFuture,
        (_, -1) => VectorClass::InterluminalPast,
        (_, 0) => VectorClass::FastNull,
        _ => VectorClass::Superluminal,
    })
}

/// Legendre map `(1/4𝒢) ∂𝒢/∂k`: analytic for a factorised context, 4th-order
/// central differences with `h = 1e-5‖k‖` otherwise.
pub fn legendre_map(ctx: &FresnelContext, k: &Covec4) -> Result<Vec4> {
    let g = fresnel_eval(ctx, k);
    let kn = k.norm();
    let tol = 1e-12 * ctx.chi().max_abs().powi(3) * kn.powi(4);
    if g.abs() <= tol || kn == 0.0 {
        return Err(QeiError::NearNullCovector { g: g.abs(), tol });
    }
    if let Some(bm) = ctx.bimetric() {
        return Ok(legendre_bimetric(bm, k));
    }
    let h = 1e-5 * kn;
    let mut out = [0.0; 4];
    for (a, o) in out.iter_mut().enumerate() {
        let shifted = |s: f64| {
            let mut kk = k.0;
            kk[a] += s * h;
            fresnel_eval(ctx, &Covec4(kk))
        };
        let d = (-shifted(2.0) + 8.0 * shifted(1.0) - 8.0 * shifted(-1.0) + shifted(-2.0)) / (12.0 * h);
        *o = d / (4.0 * g);
    }
    Ok(Vec4(out))
}

/// `½ η⁻¹k/η⁻¹(k,k) + ½ ζ⁻¹k/ζ⁻¹(k,k)`.
pub fn legendre_bimetric(bm: &BiMetric, k: &Covec4) -> Vec4 {
    let (ek, zk) = (bm.eta_inv.raise(k), bm.zeta_inv.raise(k));
    let (e, z) = (bm.eta(k), bm.zeta(k));
    Vec4([0, 1, 2, 3].map(|a| 0.5 * ek.0[a] / e + 0.5 * zk.0[a] / z))
}

/// `∂L^a/∂k_b = Σ_M ½(M^{ab}/q_M − 2(Mk)^a(Mk)^b/q_M²)` over `M ∈ {η⁻¹, ζ⁻¹}`.
pub fn legendre_jacobian(bm: &BiMetric, k: &Covec4) -> Mat4<f64> {
    let mut j = [[0.0; 4]; 4];
    for m in [&bm.eta_inv, &bm.zeta_inv] {
        let q = m.eval(k, k);
        let mk = m.raise(k).0;
        let c = m.components();
        for a in 0..4 {
            for b in 0..4 {
                j[a][b] += 0.5 * (c[a][b] / q - 2.0 * mk[a] * mk[b] / (q * q));
            }
        }
    }
    j
}

/// Ordinary and extraordinary frequencies `(ω, ω̃)` of a spatial momentum.
pub fn frequencies(xi: f64, kvec: &[f64; 3]) -> (f64, f64) {
    let [k1, k2, k3] = *kvec;
    let perp = k2 * k2 + k3 * k3;
    ((k1 * k1 + perp).sqrt(), (k1 * k1 + perp / (1.0 + xi * xi)).sqrt())
}

/// Uniform direction on the unit 2-sphere.
pub fn random_direction(rng: &mut impl Rng) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Positive-frequency null covectors `(ω(n̂), n̂)` and `(ω̃(n̂), n̂)` for
/// random directions `n̂`: samples of both sheets of `𝒩⁺`.
pub fn sample_null_covectors(xi: f64, count: usize, rng: &mut impl Rng) -> Vec<Covec4> {
    let mut out = Vec::with_capacity(2 * count);
    for _ in 0..count {
        let d = random_direction(rng);
        let (w, wt) = frequencies(xi, &d);
        out.push(Covec4([w, d[0], d[1], d[2]]));
        out.push(Covec4([wt, d[0], d[1], d[2]]));
    }
    out
}

/// Unit-rapidity worldline direction `(cosh α, sinh α cos β, 0, sinh α sin β)`.
pub fn worldline_direction(alpha: f64, beta: f64) -> Vec4 {
    let (ch, sh) = (alpha.cosh(), alpha.sinh());
    Vec4::new(ch, sh * beta.cos(), 0.0, sh * beta.sin())
}

/// `S = sinh²α sin²β`.
pub fn transverse_rapidity_sq(alpha: f64, beta: f64) -> f64 {
    (alpha.sinh() * beta.sin()).powi(2)
}

/// Guard for operations that only apply to subluminal worldlines.
pub fn require_subluminal(xi: f64, alpha: f64, beta: f64) -> Result<()> {
    let s = transverse_rapidity_sq(alpha, beta);
    if xi * xi * s >= 1.0 {
        return Err(QeiError::NotSubluminal {
            criterion: format!(
                "sinh^2(alpha) sin^2(beta) = {s} >= xi^-2 = {}",
                if xi == 0.0 { f64::INFINITY } else { 1.0 / (xi * xi) }
            ),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert_eq, prop_assume, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-10;

    #[test]
    fn covector_examples() {
        let ctx = FresnelContext::uniaxial(1.0).unwrap();
        let c = |k: [f64; 4]| classify_covector(&ctx, &Covec4(k), TOL).unwrap();
        assert_eq!(c([1.0, 0.0, 0.0, 0.0]), CovectorClass::HyperbolicFuture);
        assert_eq!(c([-1.0, 0.0, 0.0, 0.0]), CovectorClass::HyperbolicPast);
        assert_eq!(c([1.0, 1.0, 0.0, 0.0]), CovectorClass::DoublyNull);
        assert_eq!(c([1.0, 0.0, 0.0, 1.2]), CovectorClass::Interstitial);
        assert_eq!(c([1.0, 0.0, 0.0, 1.0]), CovectorClass::OrdinaryNull);
        assert_eq!(c([1.0, 0.0, 0.0, 2f64.sqrt()]), CovectorClass::ExtraordinaryNull);
        assert_eq!(c([0.0, 0.0, 1.0, 0.0]), CovectorClass::Spacelike);
        let maxwell = FresnelContext::uniaxial(0.0).unwrap();
        assert!(matches!(
            classify_covector(&maxwell, &Covec4::new(1.0, 0.0, 0.0, 1.0), TOL),
            Err(QeiError::DegenerateInput(_))
        ));
    }

    #[test]
    fn vector_examples() {
        let ctx = FresnelContext::uniaxial(1.0).unwrap();
        let c = |z: [f64; 4]| classify_vector(&ctx, &Vec4(z), TOL).unwrap();
        assert_eq!(c([1.0, 0.0, 0.0, 0.0]), VectorClass::SubluminalFuture);
        let a = 2f64.asinh();
        assert_eq!(c([a.cosh(), 0.0, 0.0, a.sinh()]), VectorClass::InterluminalFuture);
        assert_eq!(c([1.0, 0.0, 0.0, 2.0]), VectorClass::Superluminal);
        assert_eq!(c([1.0, 0.0, 0.0, 1.0]), VectorClass::FastNull);
        assert_eq!(c([2f64.sqrt(), 0.0, 0.0, 1.0]), VectorClass::SlowNull);
        assert!(classify_vector(&ctx, &Vec4([0.0; 4]), TOL).is_err());
    }

    #[test]
    fn legendre_examples() {
        let maxwell = FresnelContext::uniaxial(0.0).unwrap();
        let l = legendre_map(&maxwell, &Covec4::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert!((l.0[0] - 1.0).abs() < 1e-14 && l.0[1..].iter().all(|x| x.abs() < 1e-14));
        let l = legendre_map(&maxwell, &Covec4::new(2.0, 1.0, 0.0, 0.0)).unwrap();
        for (a, b) in l.0.iter().zip([2.0 / 3.0, -1.0 / 3.0, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let ctx = FresnelContext::uniaxial(1.0).unwrap();
        let z = legendre_map(&ctx, &Covec4::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut hits = 0;
        while hits < 100 {
            let k = Covec4([0; 4].map(|_| rng.gen_range(-1.0..1.0)));
            if crate::fresnel::in_cone_bimetric(ctx.bimetric().unwrap(), &ctx.n0(), &k) {
                assert!(k.contract(&z) > 0.0);
                hits += 1;
            }
        }
    }

    #[test]
    fn generic_legendre_matches_factored() {
        let xi = 0.8;
        let ctx = FresnelContext::uniaxial(xi).unwrap();
        let generic = FresnelContext::generic(ctx.chi().clone(), ctx.n0()).unwrap();
        let k = Covec4::new(1.3, 0.2, -0.4, 0.3);
        let a = legendre_map(&ctx, &k).unwrap();
        let b = legendre_map(&generic, &k).unwrap();
        for i in 0..4 {
            assert!((a.0[i] - b.0[i]).abs() < 1e-8, "{a:?} {b:?}");
        }
    }

    #[test]
    fn jacobian_matches_differences() {
        let bm = BiMetric::uniaxial(0.6);
        let k = Covec4::new(1.5, 0.3, 0.2, -0.4);
        let j = legendre_jacobian(&bm, &k);
        let h = 1e-6;
        for b in 0..4 {
            let mut kp = k.0;
            let mut km = k.0;
            kp[b] += h;
            km[b] -= h;
            let (lp, lm) = (legendre_bimetric(&bm, &Covec4(kp)), legendre_bimetric(&bm, &Covec4(km)));
            for a in 0..4 {
                assert!(((lp.0[a] - lm.0[a]) / (2.0 * h) - j[a][b]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn frequency_examples() {
        let (w, wt) = frequencies(1.0, &[0.0, 1.0, 1.0]);
        assert!((w - 2f64.sqrt()).abs() < 1e-15 && (wt - 1.0).abs() < 1e-15);
        assert_eq!(frequencies(0.7, &[1.0, 0.0, 0.0]), (1.0, 1.0));
        let (w, wt) = frequencies(0.0, &[0.3, 0.4, 1.2]);
        assert_eq!(w, wt);
    }

    #[test]
    fn subluminal_characterisation() {
        let xi = 1.0;
        let ctx = FresnelContext::uniaxial(xi).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ks = sample_null_covectors(xi, 1000, &mut rng);
        let mut sub = 0;
        let mut inter = 0;
        while sub < 200 || inter < 50 {
            let z = Vec4([1.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            match classify_vector(&ctx, &z, TOL).unwrap() {
                VectorClass::SubluminalFuture if sub < 200 => {
                    sub += 1;
                    assert!(ks.iter().all(|k| k.contract(&z) > 0.0));
                }
                VectorClass::InterluminalFuture if inter < 50 => {
                    inter += 1;
                    assert!(ks.iter().any(|k| k.contract(&z) < 0.0));
                }
                _ => {}
            }
        }
    }

    #[test]
    fn nesting() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10_000 {
            let xi = rng.gen_range(0.01..3.0);
            let z = Vec4([0; 4].map(|_| rng.gen_range(-1.0..1.0)));
            let f = vector_forms(xi, &z);
            if f.zeta < 0.0 {
                assert!(f.eta < 0.0);
            }
        }
    }

    #[test]
    fn subluminal_guard() {
        assert!(require_subluminal(1.0, 0.0, 0.3).is_ok());
        assert!(matches!(
            require_subluminal(1.0, 2f64.asinh(), std::f64::consts::FRAC_PI_2),
            Err(QeiError::NotSubluminal { .. })
        ));
    }

    proptest! {
        #[test]
        fn time_reversal_swaps_orientation(
            xi in 0.0f64..3.0,
            z in proptest::array::uniform4(-2.0f64..2.0),
        ) {
            let ctx = FresnelContext::uniaxial(xi).unwrap();
            let z = Vec4(z);
            prop_assume!(z.norm() > 1e-3);
            let a = classify_vector(&ctx, &z, TOL).unwrap();
            let b = classify_vector(&ctx, &z.scale(-1.0), TOL).unwrap();
            let swapped = match a {
                VectorClass::SubluminalFuture => VectorClass::SubluminalPast,
                VectorClass::SubluminalPast => VectorClass::SubluminalFuture,
                VectorClass::InterluminalFuture => VectorClass::InterluminalPast,
                VectorClass::InterluminalPast => VectorClass::InterluminalFuture,
                other => other,
            };
            prop_assert_eq!(b, swapped);
        }

        #[test]
        fn superluminal_iff_eta_spacelike(
            xi in 0.01f64..3.0,
            z in proptest::array::uniform4(-2.0f64..2.0),
        ) {
            let ctx = FresnelContext::uniaxial(xi).unwrap();
            let z = Vec4(z);
            let f = vector_forms(xi, &z);
            prop_assume!(f.eta.abs() > 1e-6 && f.zeta.abs() > 1e-6);
            let c = classify_vector(&ctx, &z, TOL).unwrap();
            prop_assert_eq!(c == VectorClass::Superluminal, f.eta > 0.0);
        }
    }
}
