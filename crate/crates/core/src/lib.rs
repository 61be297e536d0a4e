//! Supersymmetric (Darboux/Crum) partner Hamiltonians and their propagators.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: Jacobi θ₃, the complex error function, rescaled Hermite polynomials.
//! - [`jets`]: closed-form solution families with exact derivative jets.
//! - [`darboux`]: Wronskians, intertwiners, transformed potentials, chain admissibility.
//! - [`propagators`]: base-model kernels, the propagator mapping theorems evaluated by
//!   quadrature, and the closed-form box / oscillator / transparent kernels.
//! - [`oracle`]: brute-force finite-difference spectra and algebraic identity checks.
//!
//! Time arguments are complex, `t = t_r - i·τ_w`; every comparison against a spectral
//! sum is carried out at `τ_w > 0`.

pub mod darboux;
pub mod error;
pub mod jets;
pub mod linalg;
pub mod oracle;
pub mod propagators;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex amplitude used throughout the crate.
pub type ComplexValue = Complex64;
