//! Classical energy density along a worldline, the χ₁/χ₂ split, the
//! magnetic/electric 2-form frame and the X/Y matrices.

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{QeiError, Result};
use crate::tensor::{
    build_uniaxial_chi, frame_from_worldline, ConstitutiveDensity, Frame, Mat4, Rank4, Vec4, C64,
};

/// Index pairs of the six stored components.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];

/// Real 2-form, components `(01, 02, 03, 23, 31, 12)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldStrength(pub [f64; 6]);

/// Complex 2-form, same component order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexFieldStrength(pub [C64; 6]);

impl FieldStrength {
    pub fn zero() -> Self {
        FieldStrength([0.0; 6])
    }

    pub fn to_matrix(&self) -> Mat4<f64> {
        let mut m = [[0.0; 4]; 4];
        for (&(a, b), &x) in PAIRS.iter().zip(&self.0) {
            m[a][b] = x;
            m[b][a] = -x;
        }
        m
    }

    pub fn from_matrix(m: &Mat4<f64>) -> Self {
        FieldStrength(PAIRS.map(|(a, b)| 0.5 * (m[a][b] - m[b][a])))
    }

    /// Full double contraction `F^{ab}G_{ab}` (twice the pair sum).
    pub fn contract(&self, g: &FieldStrength) -> f64 {
        2.0 * self.0.iter().zip(&g.0).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn scale(&self, s: f64) -> Self {
        FieldStrength(self.0.map(|x| s * x))
    }

    pub fn add(&self, o: &FieldStrength) -> Self {
        let mut out = self.0;
        for (a, b) in out.iter_mut().zip(o.0) {
            *a += b;
        }
        FieldStrength(out)
    }
}

impl ComplexFieldStrength {
    pub fn to_matrix(&self) -> Mat4<C64> {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for (&(a, b), &x) in PAIRS.iter().zip(&self.0) {
            m[a][b] = x;
            m[b][a] = -x;
        }
        m
    }

    pub fn re(&self) -> FieldStrength {
        FieldStrength(self.0.map(|z| z.re))
    }

    pub fn im(&self) -> FieldStrength {
        FieldStrength(self.0.map(|z| z.im))
    }
}

/// `λ[a][e] = δ_{ae} − n_a u^e`.
fn lambda(frame: &Frame) -> Mat4<f64> {
    let (n, u) = (frame.n().0, frame.u().0);
    let mut l = [[0.0; 4]; 4];
    for a in 0..4 {
        for e in 0..4 {
            l[a][e] = if a == e { 1.0 } else { 0.0 } - n[a] * u[e];
        }
    }
    l
}

/// Contract each slot of a rank-4 array with a 4×4 matrix: `T^{abcd}A[a][e]B[b][f]C[c][g]D[d][h]`.
fn transform4(t: &Rank4, m: [&Mat4<f64>; 4]) -> Rank4 {
    let mut s1 = vec![0.0; 256];
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * 4 + b) * 4 + c) * 4 + d;
    for e in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    s1[idx(e, b, c, d)] = (0..4).map(|a| t.get(a, b, c, d) * m[0][a][e]).sum();
                }
            }
        }
    }
    let mut s2 = vec![0.0; 256];
    for e in 0..4 {
        for f in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    s2[idx(e, f, c, d)] = (0..4).map(|b| s1[idx(e, b, c, d)] * m[1][b][f]).sum();
                }
            }
        }
    }
    for e in 0..4 {
        for f in 0..4 {
            for g in 0..4 {
                for d in 0..4 {
                    s1[idx(e, f, g, d)] = (0..4).map(|c| s2[idx(e, f, c, d)] * m[2][c][g]).sum();
                }
            }
        }
    }
    Rank4::from_fn(|e, f, g, h| (0..4).map(|d| s1[idx(e, f, g, d)] * m[3][d][h]).sum())
}

/// `χ₁ = χλλλλ` and `χ₂ = −4 χ (n⊗u⊗λ)(n⊗u⊗λ)`, so that
/// `ρ(F) = (1/8)(χ₁ + χ₂)FF` for a unit-density frame.
pub fn chi12_split(chi: &ConstitutiveDensity, frame: &Frame) -> (Rank4, Rank4) {
    let l = lambda(frame);
    let chi1 = transform4(chi.tensor(), [&l; 4]);
    let (n, u) = (frame.n().0, frame.u().0);
    let mut nu = [[0.0; 4]; 4];
    for a in 0..4 {
        for e in 0..4 {
            nu[a][e] = n[a] * u[e];
        }
    }
    let chi2 = transform4(chi.tensor(), [&nu, &l, &nu, &l]).scale(-4.0);
    (chi1, chi2)
}

/// `(1/8)ε(e)⁻¹ χ^{abcd}(F_{ab}F_{cd} − 4 n_a u^e F_{eb} F_{cd})`.
pub fn classical_rho(chi: &ConstitutiveDensity, frame: &Frame, f: &FieldStrength) -> f64 {
    let fm = f.to_matrix();
    let (n, u) = (frame.n().0, frame.u().0);
    // uF_b = u^e F_{eb}
    let uf: [f64; 4] = [0, 1, 2, 3].map(|b| (0..4).map(|e| u[e] * fm[e][b]).sum());
    let mut nuf = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            nuf[a][b] = n[a] * uf[b];
        }
    }
    let t = chi.tensor();
    (t.bilinear(&fm, &fm) - 4.0 * t.bilinear(&nuf, &fm)) / (8.0 * frame.density)
}

/// `(1/8)ε(e)⁻¹ χ^{abcd}(F̄_{ab}F_{cd} − 4 n_a u^e Re(F̄_{eb}F_{cd}))`.
pub fn classical_rho_complex(chi: &ConstitutiveDensity, frame: &Frame, f: &ComplexFieldStrength) -> f64 {
    // Re(F̄F) = RR + II; the imaginary cross terms cancel by pair symmetry of χ
    classical_rho(chi, frame, &f.re()) + classical_rho(chi, frame, &f.im())
}

/// Magnetic `𝔟_A` and electric `𝔢_A` 2-form frames (contravariant components).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmBasis {
    pub b: [FieldStrength; 3],
    pub e: [FieldStrength; 3],
}

pub fn em_basis(alpha: f64, beta: f64) -> EmBasis {
    let (ca, sa) = (alpha.cosh(), alpha.sinh());
    let (cb, sb) = (beta.cos(), beta.sin());
    let c = 1.0 + sa * sa * sb * sb;
    let rc = 1.0 / c.sqrt();
    EmBasis {
        b: [
            FieldStrength([0.0, -sa * sb, 0.0, 1.0 + (ca - 1.0) * sb * sb, 0.0, (1.0 - ca) * cb * sb]),
            FieldStrength([sa * sb, 0.0, -sa * cb, 0.0, ca, 0.0]),
            FieldStrength([0.0, sa * cb, 0.0, (1.0 - ca) * cb * sb, 0.0, 1.0 + (ca - 1.0) * cb * cb]),
        ],
        e: [
            FieldStrength([c, 0.0, -sa * sa * cb * sb, 0.0, ca * sa * sb, 0.0]).scale(rc),
            FieldStrength([0.0, ca, 0.0, -sa * sb, 0.0, sa * cb]),
            FieldStrength([0.0, 0.0, -ca, 0.0, sa * cb, 0.0]).scale(rc),
        ],
    }
}

pub type Mat3 = [[f64; 3]; 3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyMatrices {
    pub x1: Mat3,
    pub x2: Mat3,
    /// Principal square roots; `None` when the matrix is indefinite.
    pub y1: Option<Mat3>,
    pub y2: Option<Mat3>,
    pub basis: EmBasis,
    /// `max |BᵀXB − S|` of the 6×6 reconstruction, for both blocks.
    pub residual: f64,
}

fn unit_form(i: usize) -> FieldStrength {
    let mut f = [0.0; 6];
    f[i] = 1.0;
    FieldStrength(f)
}

/// Solves `χ_r(F,F) = X^{AB}(f_A·F)(f_B·F)` for all `F` in the least-squares
/// sense from the six coordinate 2-forms.
fn reduce(chi_r: &Rank4, basis: &[FieldStrength; 3]) -> (Mat3, f64) {
    let forms: Vec<Mat4<f64>> = (0..6).map(|i| unit_form(i).to_matrix()).collect();
    let s = DMatrix::from_fn(6, 6, |i, j| chi_r.bilinear(&forms[i], &forms[j]));
    let b = DMatrix::from_fn(3, 6, |a, i| basis[a].contract(&unit_form(i)));
    let bbt_inv = (&b * b.transpose()).try_inverse().expect("2-form basis is independent");
    let x = &bbt_inv * &b * &s * b.transpose() * &bbt_inv;
    let resid = (b.transpose() * &x * &b - &s).amax();
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = 0.5 * (x[(i, j)] + x[(j, i)]);
        }
    }
    (out, resid)
}

fn to_na(m: &Mat3) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[i][j])
}

fn trace(m: &Mat3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

/// Eigenvalues in ascending order.
pub fn eigenvalues(m: &Mat3) -> [f64; 3] {
    let mut e: Vec<f64> = to_na(m).symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    [e[0], e[1], e[2]]
}

/// Principal square root of a symmetric positive semi-definite 3×3 matrix;
/// eigenvalues above `−1e-12·trace` are clamped to zero.
pub fn matrix_sqrt(m: &Mat3) -> Result<Mat3> {
    let eig = to_na(m).symmetric_eigen();
    let tol = 1e-12 * trace(m).abs();
    let ev = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
    if ev.iter().any(|&l| l < -tol) {
        let mut s = ev;
        s.sort_by(f64::total_cmp);
        return Err(QeiError::NotPositive { eigenvalues: s });
    }
    let d = Matrix3::from_diagonal(&nalgebra::Vector3::from_fn(|i, _| ev[i].max(0.0).sqrt()));
    let r = eig.eigenvectors * d * eig.eigenvectors.transpose();
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = 0.5 * (r[(i, j)] + r[(j, i)]);
        }
    }
    Ok(out)
}

/// `X₁`, `X₂` of the crystal along `(α, β)`, derived from the χ split.
pub fn energy_matrices(xi: f64, alpha: f64, beta: f64) -> Result<EnergyMatrices> {
    let chi = build_uniaxial_chi(xi, &Vec4::new(1.0, 0.0, 0.0, 0.0), &Vec4::new(0.0, xi, 0.0, 0.0))?;
    let frame = frame_from_worldline(alpha, beta, 1.0)?;
    let (c1, c2) = chi12_split(&chi, &frame);
    let basis = em_basis(alpha, beta);
    let (x1, r1) = reduce(&c1, &basis.b);
    let (x2, r2) = reduce(&c2, &basis.e);
    Ok(EnergyMatrices {
        y1: matrix_sqrt(&x1).ok(),
        y2: matrix_sqrt(&x2).ok(),
        x1,
        x2,
        basis,
        residual: r1.max(r2),
    })
}

/// Closed forms `diag(1, 1−ξ²S, 1)` and `diag(1+ξ²(1+S), 1, 1)`, `S = sinh²α sin²β`.
pub fn energy_matrices_closed_form(xi: f64, alpha: f64, beta: f64) -> (Mat3, Mat3) {
    let s = (alpha.sinh() * beta.sin()).powi(2);
    let x2 = xi * xi;
    (
        [[1.0, 0.0, 0.0], [0.0, 1.0 - x2 * s, 0.0], [0.0, 0.0, 1.0]],
        [[1.0 + x2 * (1.0 + s), 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwecReport {
    pub holds: bool,
    /// Smallest eigenvalue within tolerance of zero.
    pub boundary: bool,
    pub eigenvalues_x1: [f64; 3],
    pub eigenvalues_x2: [f64; 3],
    pub tolerance: f64,
    /// `sinh²α sin²β < ξ⁻²`
    pub closed_form: bool,
}

/// sWEC verdict; `tol` defaults to `1e-12·trace`.
pub fn swec_check(xi: f64, alpha: f64, beta: f64, tol: Option<f64>) -> Result<SwecReport> {
    let m = energy_matrices(xi, alpha, beta)?;
    let (e1, e2) = (eigenvalues(&m.x1), eigenvalues(&m.x2));
    let tolerance = tol.unwrap_or(1e-12 * trace(&m.x1).abs().max(trace(&m.x2).abs()));
    let min = e1[0].min(e2[0]);
    let s = (alpha.sinh() * beta.sin()).powi(2);
    Ok(SwecReport {
        holds: min > tolerance,
        boundary: min.abs() <= tolerance,
        eigenvalues_x1: e1,
        eigenvalues_x2: e2,
        tolerance,
        closed_form: xi * xi * s < 1.0,
    })
}

/// Bisection in `α` (fixed `β`) for the sWEC flip; returns `sinh α sin β` at
/// the located boundary.
pub fn locate_swec_boundary(xi: f64, beta: f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let holds = |a: f64| swec_check(xi, a, beta, Some(0.0)).map(|r| r.holds);
    if holds(lo)? == holds(hi)? {
        return Err(QeiError::InvalidInput("bracket does not straddle the sWEC boundary".into()));
    }
    let want_lo = holds(lo)?;
    while (hi.sinh() - lo.sinh()).abs() * beta.sin().abs() > tol {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? == want_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).sinh() * beta.sin())
}

/// `(𝔈, 𝔅)` with `𝔈^B = ½(F·𝔢_A)Y₂^{AB}`, `𝔅^B = ½(F·𝔟_A)Y₁^{AB}`, so that
/// `ρ = ½(𝔈·𝔈 + 𝔅·𝔅)`.
pub fn sum_of_squares_fields(f: &FieldStrength, m: &EnergyMatrices) -> Result<([f64; 3], [f64; 3])> {
    let y1 = m.y1.ok_or(QeiError::NotPositive { eigenvalues: eigenvalues(&m.x1) })?;
    let y2 = m.y2.ok_or(QeiError::NotPositive { eigenvalues: eigenvalues(&m.x2) })?;
    let fe: [f64; 3] = m.basis.e.map(|e| e.contract(f));
    let fb: [f64; 3] = m.basis.b.map(|b| b.contract(f));
    let mut ee = [0.0; 3];
    let mut bb = [0.0; 3];
    for b in 0..3 {
        for a in 0..3 {
            ee[b] += 0.5 * fe[a] * y2[a][b];
            bb[b] += 0.5 * fb[a] * y1[a][b];
        }
    }
    Ok((ee, bb))
}

/// Classical point-split density `½(𝔈(τ)·𝔈(τ′) + 𝔅(τ)·𝔅(τ′))`.
pub fn classical_point_split(f: &FieldStrength, f_prime: &FieldStrength, m: &EnergyMatrices) -> Result<f64> {
    let (e1, b1) = sum_of_squares_fields(f, m)?;
    let (e2, b2) = sum_of_squares_fields(f_prime, m)?;
    Ok(0.5 * (0..3).map(|i| e1[i] * e2[i] + b1[i] * b2[i]).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, proptest};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn crystal(xi: f64) -> ConstitutiveDensity {
        build_uniaxial_chi(xi, &Vec4::new(1.0, 0.0, 0.0, 0.0), &Vec4::new(0.0, xi, 0.0, 0.0)).unwrap()
    }

    fn rand_f(rng: &mut ChaCha8Rng) -> FieldStrength {
        FieldStrength([0; 6].map(|_| rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn split_reproduces_direct_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (xi, al, be, aleph) in [(1.0, 0.5f64.asinh(), FRAC_PI_2, 1.0), (0.7, 0.9, 1.1, 1.3), (1.3, -0.4, 2.5, 0.8)] {
            let chi = crystal(xi);
            let frame = frame_from_worldline(al, be, aleph).unwrap();
            let (c1, c2) = chi12_split(&chi, &frame);
            let sum = c1.add(&c2);
            for _ in 0..100 {
                let f = rand_f(&mut rng);
                let m = f.to_matrix();
                let direct = classical_rho(&chi, &frame, &f);
                let split = sum.bilinear(&m, &m) / 8.0;
                assert!((direct - split).abs() <= 1e-10 * direct.abs().max(1.0));
            }
            // χ₁ kills the electric subspace
            let basis = em_basis(al, be);
            let lf = |f: &FieldStrength| -> Mat4<f64> {
                let n = frame.n().0;
                let u = frame.u().0;
                let fm = f.to_matrix();
                let uf: [f64; 4] = [0, 1, 2, 3].map(|b| (0..4).map(|e| u[e] * fm[e][b]).sum());
                let mut g = [[0.0; 4]; 4];
                for a in 0..4 {
                    for b in 0..4 {
                        g[a][b] = n[a] * uf[b] - n[b] * uf[a];
                    }
                }
                g
            };
            for _ in 0..10 {
                let el = lf(&rand_f(&mut rng));
                let other = rand_f(&mut rng).to_matrix();
                assert!(c1.bilinear(&el, &other).abs() < 1e-10);
                for b in &basis.b {
                    assert!(b.contract(&FieldStrength::from_matrix(&el)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn maxwell_rest_frame() {
        let chi = crystal(0.0);
        let frame = Frame::identity();
        let f = FieldStrength([0.3, -0.2, 0.5, 0.7, 0.1, -0.4]);
        let e2: f64 = f.0[..3].iter().map(|x| x * x).sum();
        let b2: f64 = f.0[3..].iter().map(|x| x * x).sum();
        assert!((classical_rho(&chi, &frame, &f) - 0.5 * (e2 + b2)).abs() < 1e-14);
        assert_eq!(classical_rho(&chi, &frame, &FieldStrength::zero()), 0.0);
    }

    #[test]
    fn basis_examples() {
        let b = em_basis(0.0, 0.7);
        let unit = |i: usize| unit_form(i).0;
        assert_eq!(b.b.map(|f| f.0), [unit(3), unit(4), unit(5)]);
        assert_eq!(b.e[0].0, unit(0));
        assert_eq!(b.e[1].0, unit(1));
        assert_eq!(b.e[2].0, unit(2).map(|x| -x));
        let b = em_basis(1.3, 0.0);
        assert_eq!(b.b[0].0, unit(3));
        let (a, be) = (0.8f64, 1.2f64);
        let b = em_basis(a, be);
        let want = [a.sinh() * be.sin(), 0.0, -a.sinh() * be.cos(), 0.0, a.cosh(), 0.0];
        assert_eq!(b.b[1].0, want);
    }

    #[test]
    fn matrices_match_closed_form() {
        for xi in [0.0, 0.5, 1.0, 1.7] {
            for al in [-1.5, 0.0, 0.4, 1.2] {
                for be in [0.0, 0.6, FRAC_PI_2, 2.8] {
                    let m = energy_matrices(xi, al, be).unwrap();
                    let (x1, x2) = energy_matrices_closed_form(xi, al, be);
                    for i in 0..3 {
                        for j in 0..3 {
                            assert!((m.x1[i][j] - x1[i][j]).abs() < 1e-10);
                            assert!((m.x2[i][j] - x2[i][j]).abs() < 1e-10);
                        }
                    }
                    assert!(m.residual < 1e-10);
                }
            }
        }
        let m = energy_matrices(1.0, 0.5f64.asinh(), FRAC_PI_2).unwrap();
        assert!((m.x1[1][1] - 0.75).abs() < 1e-12);
        let m = energy_matrices(1.0, 2f64.asinh(), FRAC_PI_2).unwrap();
        assert!((eigenvalues(&m.x1)[0] + 3.0).abs() < 1e-10);
        assert!(m.y1.is_none());
    }

    #[test]
    fn rho_on_b2() {
        let (xi, al, be) = (1.0, 0.5f64.asinh(), FRAC_PI_2);
        let m = energy_matrices(xi, al, be).unwrap();
        let chi = crystal(xi);
        let frame = frame_from_worldline(al, be, 1.0).unwrap();
        // covariant 2-form with F·𝔟₂ = 1 and F·𝔟₁ = F·𝔟₃ = F·𝔢_A = 0
        let b = m.basis;
        let forms: Vec<FieldStrength> = b.b.iter().chain(b.e.iter()).copied().collect();
        let g = DMatrix::from_fn(6, 6, |i, j| forms[i].contract(&unit_form(j)));
        let mut rhs = nalgebra::DVector::zeros(6);
        rhs[1] = 1.0;
        let sol = g.lu().solve(&rhs).unwrap();
        let f = FieldStrength([0, 1, 2, 3, 4, 5].map(|i| sol[i]));
        let rho = classical_rho(&chi, &frame, &f);
        assert!((rho - m.x1[1][1] / 8.0).abs() < 1e-12);
    }

    #[test]
    fn swec_verdicts() {
        assert!(swec_check(1.0, 0.0, 1.0, None).unwrap().holds);
        let r = swec_check(1.0, 2f64.asinh(), FRAC_PI_2, None).unwrap();
        assert!(!r.holds && !r.closed_form);
        let r = swec_check(0.5, 2f64.asinh(), FRAC_PI_2, None).unwrap();
        assert!(r.boundary && !r.holds);
    }

    #[test]
    fn swec_grid_agrees_with_closed_form() {
        for xi in [0.5, 1.0] {
            for i in 0..20 {
                for j in 0..20 {
                    let al = -3.0 + 6.0 * (i as f64 + 0.5) / 20.0;
                    let be = std::f64::consts::TAU * (j as f64 + 0.5) / 20.0;
                    let r = swec_check(xi, al, be, None).unwrap();
                    if !r.boundary {
                        assert_eq!(r.holds, r.closed_form);
                    }
                }
            }
        }
    }

    #[test]
    fn bisection_finds_boundary() {
        for (xi, be) in [(1.0, FRAC_PI_2), (0.5, 1.0), (2.0, 0.4)] {
            let x = locate_swec_boundary(xi, be, 0.0, 6.0, 1e-9).unwrap();
            assert!((x - 1.0 / xi).abs() < 1e-6, "{x}");
        }
    }

    #[test]
    fn sum_of_squares_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for (xi, al, be) in [(1.0, 0.3, 1.0), (0.6, -1.1, 2.2), (0.0, 0.7, 0.3)] {
            let m = energy_matrices(xi, al, be).unwrap();
            let chi = crystal(xi);
            let frame = frame_from_worldline(al, be, 1.0).unwrap();
            for _ in 0..50 {
                let f = rand_f(&mut rng);
                let (e, b) = sum_of_squares_fields(&f, &m).unwrap();
                let recon = 0.5 * (0..3).map(|i| e[i] * e[i] + b[i] * b[i]).sum::<f64>();
                let rho = classical_rho(&chi, &frame, &f);
                assert!((recon - rho).abs() < 1e-10 * rho.abs().max(1.0));
                assert!((classical_point_split(&f, &f, &m).unwrap() - rho).abs() < 1e-10 * rho.abs().max(1.0));
            }
            let (e, _) = sum_of_squares_fields(&m.basis.b[0].scale(0.0).add(&magnetic(&m, 0.4)), &m).unwrap();
            assert!(e.iter().all(|x| x.abs() < 1e-12));
        }
        let m = energy_matrices(1.0, 2f64.asinh(), FRAC_PI_2).unwrap();
        assert!(matches!(sum_of_squares_fields(&FieldStrength::zero(), &m), Err(QeiError::NotPositive { .. })));
    }

    /// A covariant 2-form in the magnetic subspace: annihilated by every 𝔢_A.
    fn magnetic(m: &EnergyMatrices, s: f64) -> FieldStrength {
        let forms: Vec<FieldStrength> = m.basis.b.iter().chain(m.basis.e.iter()).copied().collect();
        let g = DMatrix::from_fn(6, 6, |i, j| forms[i].contract(&unit_form(j)));
        let rhs = nalgebra::DVector::from_vec(vec![s, 1.0, -s, 0.0, 0.0, 0.0]);
        let sol = g.lu().solve(&rhs).unwrap();
        FieldStrength([0, 1, 2, 3, 4, 5].map(|i| sol[i]))
    }

    #[test]
    fn complex_rho_is_sum_of_parts() {
        let chi = crystal(0.8);
        let frame = frame_from_worldline(0.4, 0.9, 1.0).unwrap();
        let f = ComplexFieldStrength([0.3, -0.1, 0.2, 0.5, -0.7, 0.1].map(|x| C64::new(x, 0.5 * x + 0.1)));
        let direct = {
            // (1/8)χ(F̄F − 4 n u Re(F̄F)) evaluated component-wise
            let fm = f.to_matrix();
            let (n, u) = (frame.n().0, frame.u().0);
            let mut s = C64::new(0.0, 0.0);
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            let x = chi.get(a, b, c, d);
                            if x == 0.0 {
                                continue;
                            }
                            s += x * fm[a][b].conj() * fm[c][d];
                            let mut re = 0.0;
                            for e in 0..4 {
                                re += u[e] * (fm[e][b].conj() * fm[c][d]).re;
                            }
                            s -= 4.0 * x * n[a] * re;
                        }
                    }
                }
            }
            s.re / 8.0
        };
        assert!((classical_rho_complex(&chi, &frame, &f) - direct).abs() < 1e-12);
    }

    #[test]
    fn rotation_of_spatial_legs_leaves_rho_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let chi = crystal(0.9);
        let base = frame_from_worldline(0.6, 1.3, 1.2).unwrap();
        let f = rand_f(&mut rng);
        let rho = classical_rho(&chi, &base, &f);
        for _ in 0..50 {
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            let (c, s) = (th.cos(), th.sin());
            let [e0, e1, e2, e3] = base.e;
            let comb = |x: &Vec4, y: &Vec4, a: f64, b: f64| Vec4([0, 1, 2, 3].map(|i| a * x.0[i] + b * y.0[i]));
            let rotated = Frame::from_vectors([e0, comb(&e1, &e2, c, s), comb(&e1, &e2, -s, c), e3]).unwrap();
            assert!((rotated.density - 1.0).abs() < 1e-12);
            assert!((classical_rho(&chi, &rotated, &f) - rho).abs() < 1e-10 * rho.abs().max(1.0));
        }
    }

    proptest! {
        #[test]
        fn x2_positive_definite(xi in 0.0f64..3.0, al in -3.0f64..3.0, be in 0.0f64..std::f64::consts::TAU) {
            let m = energy_matrices(xi, al, be).unwrap();
            prop_assert!(eigenvalues(&m.x2)[0] > 0.0);
            let y = m.y2.unwrap();
            let yy = to_na(&y) * to_na(&y);
            prop_assert!((yy - to_na(&m.x2)).amax() < 1e-10 * trace(&m.x2));
        }
    }
}
