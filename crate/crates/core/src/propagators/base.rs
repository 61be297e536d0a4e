//! Propagators of the free particle, the oscillator `V₀ = x²/4` and the unit box.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{BaseKernel, ComplexTime, Kernel, Method};
use crate::darboux::BaseModel;
use crate::specfun::{theta3_jet, ThetaArgs};
use crate::{Error, Result};

/// Derivatives of `P·e^{g(x)}` for quadratic `g`, from `f^{(k+1)} = g' f^{(k)} + k g'' f^{(k-1)}`.
fn gaussian_jet(value: Complex64, g1: Complex64, g2: Complex64, order: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(order + 1);
    out.push(value);
    for k in 0..order {
        let mut next = g1 * out[k];
        if k > 0 {
            next += g2 * k as f64 * out[k - 1];
        }
        out.push(next);
    }
    out
}

/// `(4πit)^{-1/2} e^{i(x-y)²/4t}`.
pub fn free_propagator(x: f64, y: f64, t: ComplexTime) -> Result<Complex64> {
    Ok(FreeKernel.jet_x(x, y, t, 0)?[0])
}

/// Free particle on the line.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeKernel;

impl Kernel for FreeKernel {
    fn eval(&self, x: f64, y: f64, t: ComplexTime) -> Result<Complex64> {
        free_propagator(x, y, t)
    }

    fn base_model(&self) -> BaseModel {
        BaseModel::FreeLine
    }

    fn method(&self) -> Method {
        Method::ClosedForm
    }
}

impl BaseKernel for FreeKernel {
    fn jet_x(&self, x: f64, y: f64, t: ComplexTime, order: usize) -> Result<Vec<Complex64>> {
        if t.is_zero() {
            return Err(Error::Domain("free propagator at t = 0".into()));
        }
        let tc = t.value();
        let it = Complex64::i() * tc;
        let pre = (4.0 * PI * it).sqrt().inv();
        let d = x - y;
        let g = Complex64::i() / (4.0 * tc);
        if !(g.re * d * d > -745.0) && g.re < 0.0 {
            // the Gaussian has underflowed, and so have all its derivatives
            return Ok(vec![Complex64::new(0.0, 0.0); order + 1]);
        }
        let value = pre * (g * (d * d)).exp();
        let g1 = Complex64::i() * d / (2.0 * tc);
        let g2 = Complex64::i() / (2.0 * tc);
        Ok(gaussian_jet(value, g1, g2, order))
    }
}

/// `(4πi sin t)^{-1/2} exp{i[(x²+y²) cos t - 2xy] / 4 sin t}`.
pub fn oscillator_propagator(x: f64, y: f64, t: ComplexTime) -> Result<Complex64> {
    Ok(OscillatorKernel.jet_x(x, y, t, 0)?[0])
}

/// Oscillator `h₀ = -∂² + x²/4`.
#[derive(Debug, Clone, Copy, Default)]
pub struct OscillatorKernel;

impl Kernel for OscillatorKernel {
    fn eval(&self, x: f64, y: f64, t: ComplexTime) -> Result<Complex64> {
        oscillator_propagator(x, y, t)
    }

    fn base_model(&self) -> BaseModel {
        BaseModel::Oscillator
    }

    fn method(&self) -> Method {
        Method::ClosedForm
    }
}

impl BaseKernel for OscillatorKernel {
    fn jet_x(&self, x: f64, y: f64, t: ComplexTime, order: usize) -> Result<Vec<Complex64>> {
        let tc = t.value();
        let s = tc.sin();
        let c = tc.cos();
        if t.wick_part() == 0.0 && s.norm() < 1e-14 {
            return Err(Error::Domain(format!("caustic of the oscillator propagator at t = {tc}")));
        }
        let i = Complex64::i();
        let pre = (4.0 * PI * i * s).sqrt().inv();
        let value = pre * (i * ((x * x + y * y) * c - 2.0 * x * y) / (4.0 * s)).exp();
        let g1 = i * (2.0 * x * c - 2.0 * y) / (4.0 * s);
        let g2 = i * c / (2.0 * s);
        Ok(gaussian_jet(value, g1, g2, order))
    }
}

/// Box propagator `½[ϑ₃(π(x-y)/2 | -πt) - ϑ₃(π(x+y)/2 | -πt)]`, which is the spectral
/// sum `Σ 2 sin(nπx) sin(nπy) e^{-in²π²t}`.
pub fn box_propagator0(x: f64, y: f64, t: ComplexTime) -> Result<Complex64> {
    BoxKernel0::default().eval(x, y, t)
}

/// Particle in the unit box with Dirichlet walls.
#[derive(Debug, Clone, Copy)]
pub struct BoxKernel0 {
    /// Relative truncation tolerance of the θ₃ series.
    pub series_tol: f64,
}

impl Default for BoxKernel0 {
    fn default() -> Self {
        Self { series_tol: 1e-16 }
    }
}

impl Kernel for BoxKernel0 {
    fn eval(&self, x: f64, y: f64, t: ComplexTime) -> Result<Complex64> {
        Ok(self.jet_x(x, y, t, 0)?[0])
    }

    fn base_model(&self) -> BaseModel {
        BaseModel::Box
    }

    fn method(&self) -> Method {
        Method::ClosedForm
    }
}

impl BaseKernel for BoxKernel0 {
    fn jet_x(&self, x: f64, y: f64, t: ComplexTime, order: usize) -> Result<Vec<Complex64>> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::Domain(format!("({x}, {y}) outside the box [0, 1]²")));
        }
        t.require_wick("box propagator")?;
        let tau = -PI * t.value();
        let minus = theta3_jet(ThetaArgs::new(Complex64::new(PI * (x - y) / 2.0, 0.0), tau)?, order, self.series_tol)?;
        let plus = theta3_jet(ThetaArgs::new(Complex64::new(PI * (x + y) / 2.0, 0.0), tau)?, order, self.series_tol)?;
        let mut scale = 0.5;
        Ok(minus
            .iter()
            .zip(&plus)
            .map(|(m, p)| {
                let v = (m - p) * scale;
                scale *= PI / 2.0;
                v
            })
            .collect())
    }
}
