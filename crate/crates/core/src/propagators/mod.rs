//! Propagators `K(x, y; t)` and Green functions `G(x, y; E)`.
//!
//! [`base`] holds the closed-form kernels of the three solvable models, [`green`] their
//! resolvents, [`theorems`] the propagator mappings evaluated by quadrature and
//! [`closed`] the closed-form partner kernels (box without its ground state,
//! oscillator pairs, transparent potentials).

use num_complex::Complex64;

use crate::darboux::{BaseModel, DarbouxChain};
use crate::{Error, Result};

pub mod base;
pub mod closed;
pub mod green;
pub mod theorems;

pub use base::{box_propagator0, free_propagator, oscillator_propagator, BoxKernel0, FreeKernel, OscillatorKernel};
pub use closed::{
    box_removed_ground_kernel, intertwined_spectral_kernel, ClosedKernel, oscillator_generating_s, oscillator_pair_kernel,
    transparent_eigenfunction, transparent_i, transparent_k1_route, transparent_propagator,
};
pub use green::{
    box_green, free_green, spectral_green, AnalyticEigenbasis, Eigenbasis, GreenFn, DEFAULT_CONTOUR_POINTS,
};
pub use theorems::{
    general_poly_kernel, theorem1_kernel, theorem2_kernel, theorem3_kernel, theorem4_kernel, Branch,
    PartialFractions, Side, Theorem1Kind, TheoremOptions,
};

/// Time argument `t = t_r - i τ_w` with `τ_w ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexTime {
    real_part: f64,
    wick_part: f64,
}

impl ComplexTime {
    pub fn new(real_part: f64, wick_part: f64) -> Result<Self> {
        if !real_part.is_finite() || !wick_part.is_finite() {
            return Err(Error::Argument("non-finite time".into()));
        }
        if wick_part < 0.0 {
            return Err(Error::Domain(format!("Wick part must be non-negative, got {wick_part}")));
        }
        Ok(Self { real_part, wick_part })
    }

    /// Pure imaginary time `t = -iτ`.
    pub fn wick(tau: f64) -> Result<Self> {
        Self::new(0.0, tau)
    }

    pub fn real(t: f64) -> Result<Self> {
        Self::new(t, 0.0)
    }

    pub fn real_part(&self) -> f64 {
        self.real_part
    }

    pub fn wick_part(&self) -> f64 {
        self.wick_part
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.real_part, -self.wick_part)
    }

    pub fn is_zero(&self) -> bool {
        self.real_part == 0.0 && self.wick_part == 0.0
    }

    /// `e^{-iEt}`.
    pub fn phase(&self, energy: f64) -> Complex64 {
        (-Complex64::i() * energy * self.value()).exp()
    }

    pub(crate) fn require_wick(&self, what: &str) -> Result<()> {
        if self.wick_part > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("{what} needs a positive Wick part, got t = {}", self.value())))
        }
    }
}

/// How a kernel value is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    TheoremQuadrature,
    SpectralSum,
}

/// An evaluable propagator. Implementations are immutable and shareable across
/// threads.
pub trait Kernel: Send + Sync {
    fn eval(&self, x: f64, y: f64, t: ComplexTime) -> Result<Complex64>;
    fn base_model(&self) -> BaseModel;
    fn method(&self) -> Method;
    fn chain(&self) -> Option<&DarbouxChain> {
        None
    }
}

/// A base-model kernel that also supplies `∂_x^k K₀(x, y; t)`.
pub trait BaseKernel: Kernel {
    fn jet_x(&self, x: f64, y: f64, t: ComplexTime, order: usize) -> Result<Vec<Complex64>>;
}

/// Base kernel of a model.
pub fn base_kernel(model: BaseModel) -> Box<dyn BaseKernel> {
    match model {
        BaseModel::FreeLine => Box::new(FreeKernel),
        BaseModel::Box => Box::new(BoxKernel0::default()),
        BaseModel::Oscillator => Box::new(OscillatorKernel),
    }
}
