//! Resolvent kernels `G(x, y; E)` of `h₀ - E` and their pole-subtracted versions.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::darboux::BaseModel;
use crate::{Error, Result};

/// Trapezoid points on the circle used to subtract a pole.
pub const DEFAULT_CONTOUR_POINTS: usize = 32;

fn free_kappa(e: Complex64) -> Result<Complex64> {
    let mut k = e.sqrt();
    if k.im < 0.0 {
        k = -k;
    }
    if k.im <= 0.0 {
        return Err(Error::Domain(format!("E = {e} lies on the continuous spectrum of the free line")));
    }
    Ok(k)
}

/// `G₀ = (i/2κ) e^{iκ|x-y|}` with `E = κ²`, `Im κ > 0`.
pub fn free_green(x: f64, y: f64, e: Complex64) -> Result<Complex64> {
    Ok(free_green_jet_y(x, y, e, 0)?[0])
}

/// `∂_y^j G₀(z, y)` away from `z = y`.
fn free_green_jet_y(z: f64, y: f64, e: Complex64, order: usize) -> Result<Vec<Complex64>> {
    let k = free_kappa(e)?;
    let i = Complex64::i();
    let g = i / (2.0 * k) * (i * k * (z - y).abs()).exp();
    let step = i * k * (y - z).signum();
    let mut out = Vec::with_capacity(order + 1);
    let mut v = g;
    for _ in 0..=order {
        out.push(v);
        v *= step;
    }
    Ok(out)
}

/// Dirichlet Green function of the unit box, `sin(k z_<) sin(k(1 - z_>)) / (k sin k)`.
pub fn box_green(x: f64, y: f64, e: Complex64) -> Result<Complex64> {
    Ok(box_green_jet_y(x, y, e, 0)?[0])
}

fn box_green_jet_y(z: f64, y: f64, e: Complex64, order: usize) -> Result<Vec<Complex64>> {
    if !(0.0..=1.0).contains(&z) || !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!("({z}, {y}) outside the box [0, 1]²")));
    }
    let k = e.sqrt();
    let den = if k.norm() < 1e-8 {
        // k sin k → k² as E → 0; the numerator carries the matching k²
        None
    } else {
        Some(k * k.sin())
    };
    let mut out = Vec::with_capacity(order + 1);
    for j in 0..=order {
        let shift = j as f64 * PI / 2.0;
        let v = match den {
            Some(d) => {
                if d.norm() < 1e-300 {
                    return Err(Error::Pole { energy: e.re });
                }
                if y >= z {
                    (k * z).sin() * (-k).powu(j as u32) * (k * (1.0 - y) + shift).sin() / d
                } else {
                    (k * (1.0 - z)).sin() * k.powu(j as u32) * (k * y + shift).sin() / d
                }
            }
            None => {
                // E = 0 limit: z_<(1 - z_>)
                let (lo, hi) = if y >= z { (z, y) } else { (y, z) };
                let v = match (j, y >= z) {
                    (0, _) => lo * (1.0 - hi),
                    (1, true) => -z,
                    (1, false) => 1.0 - z,
                    _ => 0.0,
                };
                Complex64::new(v, 0.0)
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// A Green function of a base model at a fixed real energy, optionally with the
/// pole of one bound state removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenFn {
    /// Free line at `E < 0`.
    Free { energy: f64 },
    /// Unit box at an energy off the spectrum.
    Box { energy: f64 },
    /// Unit box at `E_n = (n+1)²π²` with the level-`n` pole subtracted.
    BoxRegularized { level: usize, contour_points: usize },
}

impl GreenFn {
    pub fn free(energy: f64) -> Result<Self> {
        if !(energy < 0.0) {
            return Err(Error::Domain(format!("free Green function needs E < 0, got {energy}")));
        }
        Ok(Self::Free { energy })
    }

    pub fn box_at(energy: f64) -> Result<Self> {
        let n = (energy.max(0.0).sqrt() / PI).round();
        if n >= 1.0 && (energy - (n * PI).powi(2)).abs() <= 1e-12 * energy.abs() {
            return Err(Error::Pole { energy });
        }
        Ok(Self::Box { energy })
    }

    pub fn box_regularized(level: usize) -> Self {
        Self::BoxRegularized { level, contour_points: DEFAULT_CONTOUR_POINTS }
    }

    pub fn model(&self) -> BaseModel {
        match self {
            Self::Free { .. } => BaseModel::FreeLine,
            _ => BaseModel::Box,
        }
    }

    pub fn energy(&self) -> f64 {
        match self {
            Self::Free { energy } | Self::Box { energy } => *energy,
            Self::BoxRegularized { level, .. } => ((*level + 1) as f64 * PI).powi(2),
        }
    }

    pub fn regularized_at(&self) -> Option<usize> {
        match self {
            Self::BoxRegularized { level, .. } => Some(*level),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<Complex64> {
        Ok(self.jet_y(x, y, 0)?[0])
    }

    /// `∂_y^j G(z, y)` for `j = 0..=order`, pointwise for `z ≠ y` (the distributional
    /// parts at `z = y` are not included).
    pub fn jet_y(&self, z: f64, y: f64, order: usize) -> Result<Vec<Complex64>> {
        match *self {
            Self::Free { energy } => free_green_jet_y(z, y, Complex64::new(energy, 0.0), order),
            Self::Box { energy } => box_green_jet_y(z, y, Complex64::new(energy, 0.0), order),
            Self::BoxRegularized { level, contour_points } => {
                // The mean of G over a circle around E_n is the regular part at E_n:
                // the simple pole averages to zero exactly on equispaced nodes.
                let e_n = ((level + 1) as f64 * PI).powi(2);
                let lower_gap = if level == 0 { f64::INFINITY } else { e_n - (level as f64 * PI).powi(2) };
                let upper_gap = ((level + 2) as f64 * PI).powi(2) - e_n;
                let radius = 0.3 * lower_gap.min(upper_gap);
                let mut acc = vec![Complex64::new(0.0, 0.0); order + 1];
                for m in 0..contour_points {
                    let phi = 2.0 * PI * (m as f64 + 0.5) / contour_points as f64;
                    let e = e_n + radius * Complex64::from_polar(1.0, phi);
                    for (a, v) in acc.iter_mut().zip(box_green_jet_y(z, y, e, order)?) {
                        *a += v;
                    }
                }
                Ok(acc.into_iter().map(|v| v / contour_points as f64).collect())
            }
        }
    }
}

/// A discrete orthonormal eigenbasis `(E_m, ψ_m)`.
pub trait Eigenbasis {
    fn len(&self) -> usize;
    fn energy(&self, m: usize) -> f64;
    /// `ψ_0(x), …, ψ_{len-1}(x)`.
    fn eigenfunctions_at(&self, x: f64) -> Vec<f64>;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Exact eigenbases of the box and the oscillator, truncated to `levels`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticEigenbasis {
    Box { levels: usize },
    Oscillator { levels: usize },
}

impl AnalyticEigenbasis {
    /// `ψ_m^{(j)}(x)` for every level `m` and `j = 0..=order`.
    pub fn eigenfunction_jets(&self, x: f64, order: usize) -> Result<Vec<Vec<f64>>> {
        match *self {
            Self::Box { levels } => Ok((0..levels)
                .map(|m| {
                    let k = (m + 1) as f64 * PI;
                    (0..=order)
                        .map(|j| std::f64::consts::SQRT_2 * k.powi(j as i32) * (k * x + j as f64 * PI / 2.0).sin())
                        .collect()
                })
                .collect()),
            Self::Oscillator { levels } => {
                // ψ_m' = (√m ψ_{m-1} - √(m+1) ψ_{m+1}) / 2
                let top = levels + order;
                let mut cur = Self::Oscillator { levels: top }.eigenfunctions_at(x);
                let mut out: Vec<Vec<f64>> = (0..levels).map(|m| vec![cur[m]]).collect();
                for j in 1..=order {
                    let width = top - j;
                    let next: Vec<f64> = (0..width)
                        .map(|m| {
                            let down = if m > 0 { (m as f64).sqrt() * cur[m - 1] } else { 0.0 };
                            0.5 * (down - ((m + 1) as f64).sqrt() * cur[m + 1])
                        })
                        .collect();
                    for (m, row) in out.iter_mut().enumerate() {
                        row.push(next[m]);
                    }
                    cur = next;
                }
                Ok(out)
            }
        }
    }
}

impl Eigenbasis for AnalyticEigenbasis {
    fn len(&self) -> usize {
        match self {
            Self::Box { levels } | Self::Oscillator { levels } => *levels,
        }
    }

    fn energy(&self, m: usize) -> f64 {
        match self {
            Self::Box { .. } => ((m + 1) as f64 * PI).powi(2),
            Self::Oscillator { .. } => m as f64 + 0.5,
        }
    }

    fn eigenfunctions_at(&self, x: f64) -> Vec<f64> {
        match *self {
            Self::Box { levels } => {
                // sin((m+1)πx) by the Chebyshev recurrence
                let (s1, c1) = (PI * x).sin_cos();
                let mut out = Vec::with_capacity(levels);
                let (mut prev, mut cur) = (0.0, s1);
                for _ in 0..levels {
                    out.push(std::f64::consts::SQRT_2 * cur);
                    let next = 2.0 * c1 * cur - prev;
                    prev = cur;
                    cur = next;
                }
                out
            }
            Self::Oscillator { levels } => {
                // ψ_{k+1} = (x ψ_k - √k ψ_{k-1}) / √(k+1)
                let mut out = Vec::with_capacity(levels);
                let mut prev = 0.0;
                let mut cur = (-x * x / 4.0).exp() / (2.0 * PI).powf(0.25);
                for k in 0..levels {
                    out.push(cur);
                    let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
                    prev = cur;
                    cur = next;
                }
                out
            }
        }
    }
}

/// `Σ' ψ_m(x) ψ_m(y) / (E_m - E)`, the prime omitting `exclude`.
pub fn spectral_green(eigs: &dyn Eigenbasis, x: f64, y: f64, e: Complex64, exclude: Option<usize>) -> Result<Complex64> {
    let px = eigs.eigenfunctions_at(x);
    let py = eigs.eigenfunctions_at(y);
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..eigs.len() {
        if Some(m) == exclude {
            continue;
        }
        let em = eigs.energy(m);
        let d = em - e;
        if d.norm() <= 1e-12 * em.abs().max(1.0) {
            return Err(Error::Pole { energy: em });
        }
        sum += px[m] * py[m] / d;
    }
    Ok(sum)
}
