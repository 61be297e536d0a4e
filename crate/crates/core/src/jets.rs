//! Closed-form solution families of the base Schrödinger equations and their
//! exact derivative jets.

use num_complex::Complex64;
use std::f64::consts::{PI, SQRT_2};

use crate::quad::{gauss_kronrod_real, QuadOptions};
use crate::specfun::hermite_p_all;
use crate::{Error, Result};

/// Value and derivatives `f, f', …, f^{(m)}` of a function at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub base_point: f64,
    pub derivs: Vec<Complex64>,
}

impl Jet {
    pub fn new(base_point: f64, derivs: Vec<Complex64>) -> Self {
        assert!(!derivs.is_empty(), "a jet carries at least the value");
        Self { base_point, derivs }
    }

    pub fn from_real(base_point: f64, derivs: &[f64]) -> Self {
        Self::new(base_point, derivs.iter().map(|&d| Complex64::new(d, 0.0)).collect())
    }

    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.derivs[0]
    }

    pub fn is_finite(&self) -> bool {
        self.derivs.iter().all(|d| d.is_finite())
    }
}

/// A member of one of the closed-form families used as transformation function
/// or eigenfunction. Each solves `-u'' + V₀u = E u` for its base potential.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisFunction {
    /// `√2 sin(nπx)` on the unit box, energy `n²π²`.
    TrigBox { n: u32 },
    /// `cosh(a x + b)` for `V₀ = 0`, energy `-a²`.
    Cosh { a: f64, b: f64 },
    /// `sinh(a x + b)` for `V₀ = 0`, energy `-a²`.
    Sinh { a: f64, b: f64 },
    /// `p_k(x) e^{-x²/4}` for `V₀ = x²/4`, energy `k + ½` (unnormalised).
    HermiteGaussian { k: u32 },
    /// `e^{sign·a·x}` for `V₀ = 0`, energy `-a²`.
    PlaneExp { sign: i8, a: f64 },
    /// Second solution `u(x) ∫_{x₀}^x dy / u(y)²` at the energy of `inner`.
    Constantx0Integral { inner: Box<BasisFunction>, x0: f64 },
}

impl BasisFunction {
    pub fn trig_box(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("box level index starts at 1".into()));
        }
        Ok(Self::TrigBox { n })
    }

    pub fn cosh(a: f64, b: f64) -> Result<Self> {
        check_wavenumber(a)?;
        Ok(Self::Cosh { a, b })
    }

    pub fn sinh(a: f64, b: f64) -> Result<Self> {
        check_wavenumber(a)?;
        Ok(Self::Sinh { a, b })
    }

    pub fn hermite_gaussian(k: u32) -> Self {
        Self::HermiteGaussian { k }
    }

    pub fn plane_exp(sign: i8, a: f64) -> Result<Self> {
        check_wavenumber(a)?;
        if sign != 1 && sign != -1 {
            return Err(Error::Argument(format!("exponential sign must be ±1, got {sign}")));
        }
        Ok(Self::PlaneExp { sign, a })
    }

    /// Spectral parameter `E` with `h₀ u = E u`.
    pub fn energy(&self) -> f64 {
        match self {
            Self::TrigBox { n } => (*n as f64 * PI).powi(2),
            Self::Cosh { a, .. } | Self::Sinh { a, .. } | Self::PlaneExp { a, .. } => -a * a,
            Self::HermiteGaussian { k } => *k as f64 + 0.5,
            Self::Constantx0Integral { inner, .. } => inner.energy(),
        }
    }

    /// Base potential the family solves.
    pub fn base_potential(&self, x: f64) -> f64 {
        match self {
            Self::HermiteGaussian { .. } => x * x / 4.0,
            Self::Constantx0Integral { inner, .. } => inner.base_potential(x),
            _ => 0.0,
        }
    }

    /// Real derivatives `u(x), …, u^{(order)}(x)`.
    pub fn derivs(&self, x: f64, order: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(order + 1);
        match self {
            Self::TrigBox { n } => {
                let k = *n as f64 * PI;
                let s = (k * x).sin();
                let c = (k * x).cos();
                let mut scale = SQRT_2;
                for m in 0..=order {
                    let v = match m % 4 {
                        0 => s,
                        1 => c,
                        2 => -s,
                        _ => -c,
                    };
                    out.push(scale * v);
                    scale *= k;
                }
            }
            Self::Cosh { a, b } | Self::Sinh { a, b } => {
                let arg = a * x + b;
                let (even, odd) = match self {
                    Self::Cosh { .. } => (arg.cosh(), arg.sinh()),
                    _ => (arg.sinh(), arg.cosh()),
                };
                let mut scale = 1.0;
                for m in 0..=order {
                    out.push(scale * if m % 2 == 0 { even } else { odd });
                    scale *= a;
                }
            }
            Self::PlaneExp { sign, a } => {
                let k = *sign as f64 * a;
                let e = (k * x).exp();
                let mut scale = 1.0;
                for _ in 0..=order {
                    out.push(scale * e);
                    scale *= k;
                }
            }
            Self::HermiteGaussian { k } => {
                let k = *k as usize;
                let p = hermite_p_all(k, x)?;
                // Gaussian derivatives: g^{(i+1)} = -(x/2) g^{(i)} - (i/2) g^{(i-1)}
                let mut g = Vec::with_capacity(order + 1);
                g.push((-x * x / 4.0).exp());
                if order >= 1 {
                    g.push(-x / 2.0 * g[0]);
                }
                for i in 1..order {
                    let next = -x / 2.0 * g[i] - i as f64 / 2.0 * g[i - 1];
                    g.push(next);
                }
                // p_k^{(j)} = k!/(k-j)! p_{k-j}
                let mut dp = Vec::with_capacity(order + 1);
                let mut falling = 1.0;
                for j in 0..=order {
                    if j > k {
                        dp.push(0.0);
                    } else {
                        dp.push(falling * p[k - j]);
                        falling *= (k - j) as f64;
                    }
                }
                for m in 0..=order {
                    let mut binom = 1.0;
                    let mut acc = 0.0;
                    for j in 0..=m {
                        acc += binom * dp[j] * g[m - j];
                        binom = binom * (m - j) as f64 / (j + 1) as f64;
                    }
                    out.push(acc);
                }
            }
            Self::Constantx0Integral { inner, x0 } => {
                out = second_solution_derivs(inner, *x0, x, order)?;
            }
        }
        Ok(out)
    }
}

fn check_wavenumber(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!("wavenumber must be positive, got {a}")))
    }
}

/// Derivatives of `u · I` with `I(x) = ∫_{x₀}^x u^{-2}`: only the value of `I`
/// needs quadrature, its derivatives are algebraic in `u`.
fn second_solution_derivs(inner: &BasisFunction, x0: f64, x: f64, order: usize) -> Result<Vec<f64>> {
    ensure_no_node_between(inner, x0, x)?;
    let u = inner.derivs(x, order)?;
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-13, max_intervals: 2000 };
    let integral = gauss_kronrod_real(
        |y| {
            let v = inner.derivs(y, 0).map(|d| d[0]).unwrap_or(f64::NAN);
            1.0 / (v * v)
        },
        x0,
        x,
        opts,
    )?;
    // Taylor coefficients of u, then of u^{-2}
    let taylor_u = to_taylor(&u);
    let recip = taylor_reciprocal(&taylor_u);
    let inv_sq = taylor_mul(&recip, &recip);
    // I = integral + Σ_{j≥1} inv_sq[j-1] h^j / j
    let mut taylor_i = vec![0.0; order + 1];
    taylor_i[0] = integral;
    for j in 1..=order {
        taylor_i[j] = inv_sq[j - 1] / j as f64;
    }
    Ok(from_taylor(&taylor_mul(&taylor_u, &taylor_i)))
}

fn ensure_no_node_between(inner: &BasisFunction, x0: f64, x: f64) -> Result<()> {
    let samples = 128;
    let mut prev = inner.derivs(x0, 0)?[0];
    if prev == 0.0 {
        return Err(Error::Singularity(format!("base point x0 = {x0} is a node")));
    }
    for i in 1..=samples {
        let y = x0 + (x - x0) * i as f64 / samples as f64;
        let v = inner.derivs(y, 0)?[0];
        if v == 0.0 || v.signum() != prev.signum() {
            return Err(Error::Singularity(format!(
                "inner function has a node between x0 = {x0} and x = {x}"
            )));
        }
        prev = v;
    }
    Ok(())
}

pub(crate) fn to_taylor(derivs: &[f64]) -> Vec<f64> {
    let mut fact = 1.0;
    derivs
        .iter()
        .enumerate()
        .map(|(i, d)| {
            if i > 0 {
                fact *= i as f64;
            }
            d / fact
        })
        .collect()
}

pub(crate) fn from_taylor(coeffs: &[f64]) -> Vec<f64> {
    let mut fact = 1.0;
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i > 0 {
                fact *= i as f64;
            }
            c * fact
        })
        .collect()
}

pub(crate) fn taylor_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().min(b.len());
    (0..n).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
}

pub(crate) fn taylor_reciprocal(a: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; a.len()];
    r[0] = 1.0 / a[0];
    for k in 1..a.len() {
        let s: f64 = (1..=k).map(|j| a[j] * r[k - j]).sum();
        r[k] = -s / a[0];
    }
    r
}

/// Jet of `f` at `x` up to `order`.
pub fn eval_jet(f: &BasisFunction, x: f64, order: usize) -> Result<Jet> {
    Ok(Jet::from_real(x, &f.derivs(x, order)?))
}

/// `|-f'' + V₀ f - E f| / max(1, |E f|)` at `x`.
pub fn schrodinger_residual_of(f: &BasisFunction, v0: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    let d = f.derivs(x, 2)?;
    let e = f.energy();
    Ok((-d[2] + v0(x) * d[0] - e * d[0]).abs() / (e * d[0]).abs().max(1.0))
}

/// Second, non-normalisable solution `ũ` at the energy of `partner_of`, normalised by
/// `W(u, ũ) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnphysicalPartner {
    pub partner_of: BasisFunction,
    pub x0: f64,
}

impl UnphysicalPartner {
    pub fn new(partner_of: BasisFunction, x0: f64) -> Self {
        Self { partner_of, x0 }
    }

    pub fn as_basis(&self) -> BasisFunction {
        BasisFunction::Constantx0Integral { inner: Box::new(self.partner_of.clone()), x0: self.x0 }
    }

    /// `u ũ' - u' ũ` at `x`; equals 1 wherever defined.
    pub fn wronskian(&self, x: f64) -> Result<f64> {
        let u = self.partner_of.derivs(x, 1)?;
        let w = self.as_basis().derivs(x, 1)?;
        Ok(u[0] * w[1] - u[1] * w[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn cosh_jet_at_origin() {
        let j = eval_jet(&BasisFunction::cosh(1.0, 0.0).unwrap(), 0.0, 3).unwrap();
        let re: Vec<f64> = j.derivs.iter().map(|c| c.re).collect();
        assert_eq!(re, vec![1.0, 0.0, 1.0, 0.0]);
        assert_eq!(j.order(), 3);
    }

    #[test]
    fn trig_box_jet() {
        let d = BasisFunction::trig_box(1).unwrap().derivs(0.5, 2).unwrap();
        assert!(close(d[0], SQRT_2, 1e-15));
        assert!(d[1].abs() < 1e-15);
        assert!(close(d[2], -SQRT_2 * PI * PI, 1e-15));
    }

    #[test]
    fn hermite_gaussian_node() {
        let d = BasisFunction::hermite_gaussian(2).derivs(1.0, 0).unwrap();
        assert_eq!(d[0], 0.0);
    }

    #[test]
    fn residuals_vanish() {
        let f = BasisFunction::cosh(2.0, 1.0).unwrap();
        for &x in &[-1.3, 0.0, 0.4, 2.2] {
            assert!(schrodinger_residual_of(&f, |_| 0.0, x).unwrap() < 1e-12);
        }
        let hg = BasisFunction::hermite_gaussian(3);
        assert!(schrodinger_residual_of(&hg, |x| x * x / 4.0, 0.7).unwrap() <= 1e-10);
        let tb = BasisFunction::trig_box(2).unwrap();
        assert!(schrodinger_residual_of(&tb, |_| 0.0, 0.3).unwrap() <= 1e-12);
    }

    #[test]
    fn constructors_validate() {
        assert!(BasisFunction::trig_box(0).is_err());
        assert!(BasisFunction::cosh(0.0, 1.0).is_err());
        assert!(BasisFunction::sinh(-1.0, 1.0).is_err());
        assert!(BasisFunction::plane_exp(2, 1.0).is_err());
    }

    #[test]
    fn partner_wronskian_is_one() {
        let p = UnphysicalPartner::new(BasisFunction::trig_box(1).unwrap(), 0.5);
        for &x in &[0.1, 0.33, 0.5, 0.77, 0.95] {
            assert!((p.wronskian(x).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn partner_refuses_to_cross_a_node() {
        let p = UnphysicalPartner::new(BasisFunction::trig_box(2).unwrap(), 0.25);
        assert!(matches!(p.as_basis().derivs(0.75, 1), Err(Error::Singularity(_))));
    }

    #[test]
    fn taylor_reciprocal_roundtrip() {
        let a = [2.0, -1.0, 0.5, 3.0];
        let r = taylor_reciprocal(&a);
        let one = taylor_mul(&a, &r);
        assert!((one[0] - 1.0).abs() < 1e-15);
        assert!(one[1..].iter().all(|c| c.abs() < 1e-14));
    }
}
