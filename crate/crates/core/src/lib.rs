//! Numerical toolkit for pre-metric linear electrodynamics: Fresnel causal
//! structure, energy-density positivity, and quantum energy inequality (QEI)
//! bounds for the uniaxial birefringent crystal.
//!
//! Conventions used throughout:
//!
//! * signature −+++, natural units, coordinates (t, x, y, z) with the optic
//!   axis along x;
//! * 2-forms are stored in the component order (01, 02, 03, 23, 31, 12);
//! * the Fresnel polynomial is `𝒢(k) = −adj(𝓜)_{ab} κ^a κ^b` so that it is
//!   positive on the chosen hyperbolicity cone;
//! * Fourier transforms are `f̂(θ) = ∫ f(τ) e^{iθτ} dτ`.

pub mod causal;
pub mod cli;
pub mod energy;
pub mod error;
pub mod fresnel;
pub mod medium;
pub mod negative_energy;
pub mod numerics;
pub mod observer_norm;
pub mod qei;
pub mod tensor;
pub mod verify;

pub use error::{QeiError, Result};
