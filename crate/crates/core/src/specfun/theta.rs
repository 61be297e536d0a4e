use num_complex::Complex64;
use std::f64::consts::PI;

use crate::{Error, Result};

/// Arguments of ϑ₃(z | τ) with nome `q = exp(iπτ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaArgs {
    z: Complex64,
    tau: Complex64,
}

impl ThetaArgs {
    /// Rejects lattice parameters whose nome lies on or outside the unit circle.
    pub fn new(z: Complex64, tau: Complex64) -> Result<Self> {
        if !(z.is_finite() && tau.is_finite()) {
            return Err(Error::Domain("non-finite theta argument".into()));
        }
        if tau.im <= 0.0 {
            return Err(Error::Domain(format!(
                "theta series diverges: |q| = exp(-pi Im tau) >= 1 for tau = {tau}"
            )));
        }
        Ok(Self { z, tau })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn nome(&self) -> Complex64 {
        (Complex64::i() * PI * self.tau).exp()
    }
}

/// Third Jacobi theta function, `1 + 2 Σ_{n≥1} q^{n²} cos(2nz)`.
pub fn theta3(args: ThetaArgs, tol: f64) -> Result<Complex64> {
    Ok(theta3_jet(args, 0, tol)?[0])
}

/// ϑ₃ and its first `order` derivatives with respect to `z`.
///
/// The series is summed until the magnitude bound of the next term drops below
/// `tol` times the magnitude of the partial sum.
pub fn theta3_jet(args: ThetaArgs, order: usize, tol: f64) -> Result<Vec<Complex64>> {
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    let log_q = Complex64::i() * PI * args.tau;
    let decay = -log_q.re; // -ln|q| > 0
    let z = args.z;
    let grow = 2.0 * z.im.abs();

    let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
    out[0] = Complex64::new(1.0, 0.0);
    // terms keep growing while n·decay < grow (when Im z ≠ 0); stop only past that point
    let n_turn = (grow / (2.0 * decay)).ceil() as u64 + 1;
    let max_terms: u64 = 5_000_000;
    let mut n: u64 = 1;
    loop {
        let nf = n as f64;
        let qn = (log_q * (nf * nf)).exp();
        let phase = 2.0 * nf * z;
        let mut scale = 2.0;
        let mut bound = 0.0_f64;
        for (m, slot) in out.iter_mut().enumerate() {
            // d^m/dz^m cos(2nz) = (2n)^m cos(2nz + mπ/2)
            let c = match m % 4 {
                0 => phase.cos(),
                1 => -phase.sin(),
                2 => -phase.cos(),
                _ => phase.sin(),
            };
            let term = qn * c * scale;
            *slot += term;
            bound = bound.max(qn.norm() * scale * (grow * nf).exp());
            scale *= 2.0 * nf;
        }
        let mag = out.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if n >= n_turn && bound <= tol * mag.max(f64::MIN_POSITIVE) {
            break;
        }
        if bound == 0.0 && n >= n_turn {
            break;
        }
        n += 1;
        if n > max_terms {
            return Err(Error::Convergence(format!(
                "theta series needs more than {max_terms} terms (|q| = {})",
                (-decay).exp()
            )));
        }
    }
    Ok(out)
}
