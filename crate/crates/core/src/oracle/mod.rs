//! Brute-force references: a finite-difference eigensolver with the spectral
//! propagator built from it, the algebraic identities behind the transparent and
//! Wronskian constructions, and numerical checks of the physical kernel invariants.
//!
//! Nothing here calls the closed-form partner kernels.

use num_complex::Complex64;

use crate::darboux::{minor_wronskian, wronskian, DarbouxChain, apply_intertwiner};
use crate::jets::BasisFunction;
use crate::propagators::{ComplexTime, Eigenbasis, Kernel};
use crate::quad::{integrate_fallible, Bound, QuadOptions};
use crate::{Error, Result};

/// Uniform grid `a = x_0 < … < x_{n-1} = b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    a: f64,
    b: f64,
    n_points: usize,
}

impl GridSpec {
    pub fn new(a: f64, b: f64, n_points: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Argument(format!("bad interval [{a}, {b}]")));
        }
        if n_points < 3 {
            return Err(Error::Argument(format!("grid needs at least 3 points, got {n_points}")));
        }
        Ok(Self { a, b, n_points })
    }

    /// Grid over `[a, b]` with spacing as close to `h` as divides the interval.
    pub fn with_spacing(a: f64, b: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Argument(format!("spacing must be positive, got {h}")));
        }
        Self::new(a, b, ((b - a) / h).round() as usize + 1)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.b
        } else {
            self.a + i as f64 * self.h()
        }
    }
}

/// Lowest eigenpairs of a Dirichlet finite-difference Hamiltonian, normalised under
/// the trapezoid rule.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    grid: GridSpec,
    energies: Vec<f64>,
    // wavefunctions[m][i], endpoints included (zero)
    wavefunctions: Vec<Vec<f64>>,
}

impl EigenSystem {
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn wavefunction(&self, m: usize) -> &[f64] {
        &self.wavefunctions[m]
    }

    /// Piecewise-linear interpolation of `ψ_m`; zero outside the grid.
    pub fn value_at(&self, m: usize, x: f64) -> f64 {
        let (i, w) = match self.locate(x) {
            Some(v) => v,
            None => return 0.0,
        };
        let psi = &self.wavefunctions[m];
        if w == 0.0 {
            psi[i]
        } else {
            (1.0 - w) * psi[i] + w * psi[i + 1]
        }
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let g = self.grid;
        if !(x >= g.a && x <= g.b) {
            return None;
        }
        let u = (x - g.a) / g.h();
        let i = (u.floor() as usize).min(g.n_points - 2);
        let mut w = u - i as f64;
        if w.abs() < 1e-9 {
            w = 0.0;
        } else if (1.0 - w).abs() < 1e-9 {
            return Some((i + 1, 0.0));
        }
        Some((i, w))
    }
}

impl Eigenbasis for EigenSystem {
    fn len(&self) -> usize {
        self.energies.len()
    }

    fn energy(&self, m: usize) -> f64 {
        self.energies[m]
    }

    fn eigenfunctions_at(&self, x: f64) -> Vec<f64> {
        (0..self.len()).map(|m| self.value_at(m, x)).collect()
    }
}

/// Lowest `m_states` eigenpairs of `-(ψ_{i+1} - 2ψ_i + ψ_{i-1})/h² + V_i ψ_i` on the
/// interior grid points with `ψ = 0` at both ends (LAPACK `dstemr`).
pub fn fd_eigensolve(v: &dyn Fn(f64) -> f64, grid: GridSpec, m_states: usize) -> Result<EigenSystem> {
    let n = grid.n_points - 2;
    if m_states == 0 || m_states > n {
        return Err(Error::Argument(format!(
            "requested {m_states} states from {n} interior points"
        )));
    }
    let h = grid.h();
    let inv_h2 = 1.0 / (h * h);
    let mut d: Vec<f64> = (1..=n)
        .map(|i| {
            let vi = v(grid.point(i));
            2.0 * inv_h2 + vi
        })
        .collect();
    if let Some(bad) = d.iter().position(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("potential is not finite at x = {}", grid.point(bad + 1))));
    }
    let mut e = vec![-inv_h2; n];
    let mut found = 0;
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n * m_states];
    let mut isuppz = vec![0i32; 2 * m_states];
    let mut tryrac = 1;
    let lwork = 18 * n;
    let liwork = 10 * n;
    let mut work = vec![0.0; lwork];
    let mut iwork = vec![0i32; liwork];
    let mut info = 0;
    // SAFETY: every buffer is sized as dstemr documents for N = n, M ≤ m_states.
    unsafe {
        lapack::dstemr(
            b'V', b'I', n as i32, &mut d, &mut e, 0.0, 0.0, 1, m_states as i32, &mut found, &mut w, &mut z,
            n as i32, &[m_states as i32], &mut isuppz, &mut tryrac, &mut work, lwork as i32, &mut iwork,
            liwork as i32, &mut info,
        );
    }
    if info != 0 || found as usize != m_states {
        return Err(Error::Convergence(format!("dstemr failed (info = {info}, found {found})")));
    }
    let wavefunctions = (0..m_states)
        .map(|m| {
            let col = &z[m * n..(m + 1) * n];
            let norm = (col.iter().map(|c| c * c).sum::<f64>() * h).sqrt();
            // fix the sign by the first sizeable component
            let peak = col.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
            let first = col.iter().find(|c| c.abs() > 1e-3 * peak).copied().unwrap_or(1.0);
            let s = first.signum() / norm;
            let mut psi = Vec::with_capacity(n + 2);
            psi.push(0.0);
            psi.extend(col.iter().map(|c| c * s));
            psi.push(0.0);
            psi
        })
        .collect();
    Ok(EigenSystem { grid, energies: w[..m_states].to_vec(), wavefunctions })
}

/// `Σ_m ψ_m(x) ψ_m(y) e^{-E_m τ}`, bilinear in `(x, y)` between grid points.
pub fn spectral_kernel(eigs: &EigenSystem, x: f64, y: f64, tau: f64) -> Result<Complex64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("spectral kernel needs τ > 0, got {tau}")));
    }
    let s: f64 = (0..eigs.len())
        .map(|m| eigs.value_at(m, x) * eigs.value_at(m, y) * (-eigs.energies[m] * tau).exp())
        .sum();
    Ok(Complex64::new(s, 0.0))
}

/// Richardson combination `(4K_{h/2} - K_h)/3` of the spectral kernels on two grids
/// over the same interval, the second with half the spacing of the first. It removes
/// the `O(h²)` error of the three-point Laplacian.
pub fn extrapolated_spectral_kernel(coarse: &EigenSystem, fine: &EigenSystem, x: f64, y: f64, tau: f64) -> Result<Complex64> {
    let (gc, gf) = (coarse.grid(), fine.grid());
    if gc.a != gf.a || gc.b != gf.b || (gc.h() - 2.0 * gf.h()).abs() > 1e-12 * gc.h() {
        return Err(Error::Argument("Richardson step needs the same interval at spacings h and h/2".into()));
    }
    Ok((4.0 * spectral_kernel(fine, x, y, tau)? - spectral_kernel(coarse, x, y, tau)?) / 3.0)
}

fn check_distinct(alphas: &[f64]) -> Result<()> {
    for (i, a) in alphas.iter().enumerate() {
        if !a.is_finite() {
            return Err(Error::Argument(format!("non-finite α = {a}")));
        }
        if alphas[..i].contains(a) {
            return Err(Error::Degenerate(format!("coincident α = {a}")));
        }
    }
    Ok(())
}

/// `|Σ_i α_iⁿ ∏_{j≠i} 1/(α_i - α_j) - δ_{n,N-1}|`.
pub fn lemma3_identity(alphas: &[f64], n: usize) -> Result<f64> {
    check_distinct(alphas)?;
    if alphas.is_empty() || n >= alphas.len() {
        return Err(Error::Argument(format!("power {n} outside 0..{}", alphas.len())));
    }
    let sum: f64 = alphas
        .iter()
        .enumerate()
        .map(|(i, ai)| {
            let p: f64 = alphas.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, aj)| ai - aj).product();
            ai.powi(n as i32) / p
        })
        .sum();
    let target = if n + 1 == alphas.len() { 1.0 } else { 0.0 };
    Ok((sum - target).abs())
}

/// `|(1/W) Σ_n (-1)ⁿ W_n u_n^{(j)} - (-1)^{N-1} δ_{j,N-1}|`, the sign being that of the
/// expansion of `W` along its last row.
pub fn identity_id(chain: &DarbouxChain, j: usize, x: f64) -> Result<f64> {
    let n = chain.len();
    if j >= n {
        return Err(Error::Argument(format!("derivative order {j} outside 0..{n}")));
    }
    let w = wronskian(chain.functions(), x, 0)?.value;
    if w == 0.0 {
        return Err(Error::NodelessViolation { x });
    }
    let mut sum = 0.0;
    for (i, u) in chain.functions().iter().enumerate() {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * minor_wronskian(chain.functions(), i, x, 0)?.value * u.derivs(x, j)?[j];
    }
    let target = if j + 1 == n { if n % 2 == 1 { 1.0 } else { -1.0 } } else { 0.0 };
    Ok((sum / w - target).abs())
}

fn transparent_params(chain: &DarbouxChain) -> Result<Vec<f64>> {
    chain
        .functions()
        .iter()
        .map(|u| match u {
            BasisFunction::Cosh { a, b } | BasisFunction::Sinh { a, b } if *b == 0.0 => Ok(*a),
            _ => Err(Error::Configuration("expected a transparent chain with zero offsets".into())),
        })
        .collect()
}

/// `L_x e^{±a_n x}` against `(∓1)^n (-1)^{N+n-1} a_n ∏_{j≠n}(a_j² - a_n²) W_n/W` (levels
/// counted from 1 in the sign factors), as a relative deviation.
pub fn s0_identity(chain: &DarbouxChain, n: usize, sign: i8, x: f64) -> Result<f64> {
    let a = transparent_params(chain)?;
    if n >= a.len() {
        return Err(Error::Argument(format!("level {n} out of range for N = {}", a.len())));
    }
    let e = BasisFunction::plane_exp(sign, a[n])?;
    let lhs = apply_intertwiner(chain, &e, x)?.re;
    let rhs = s0_rhs(chain, &a, n, sign, x)?;
    Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300))
}

fn s0_rhs(chain: &DarbouxChain, a: &[f64], n: usize, sign: i8, x: f64) -> Result<f64> {
    let big_n = a.len();
    let idx = n + 1;
    let mp = if sign > 0 { -1.0_f64 } else { 1.0 };
    let s = mp.powi(idx as i32) * (-1.0_f64).powi((big_n + idx - 1) as i32);
    let prod: f64 = a.iter().enumerate().filter(|(j, _)| *j != n).map(|(_, aj)| aj * aj - a[n] * a[n]).product();
    let w = wronskian(chain.functions(), x, 0)?.value;
    if w == 0.0 {
        return Err(Error::NodelessViolation { x });
    }
    Ok(s * a[n] * prod * minor_wronskian(chain.functions(), n, x, 0)?.value / w)
}

/// `L_x L_y e^{±a_n(x-y)}` against `(-1)^n a_n² ∏_{j≠n}(a_n² - a_j²)² W_n(x)W_n(y)/W(x)W(y)`.
pub fn sl_identity(chain: &DarbouxChain, n: usize, sign: i8, x: f64, y: f64) -> Result<f64> {
    let a = transparent_params(chain)?;
    if n >= a.len() {
        return Err(Error::Argument(format!("level {n} out of range for N = {}", a.len())));
    }
    let lhs = apply_intertwiner(chain, &BasisFunction::plane_exp(sign, a[n])?, x)?.re
        * apply_intertwiner(chain, &BasisFunction::plane_exp(-sign, a[n])?, y)?.re;
    let prod: f64 = a.iter().enumerate().filter(|(j, _)| *j != n).map(|(_, aj)| (a[n] * a[n] - aj * aj).powi(2)).product();
    let frac = |p: f64| -> Result<f64> {
        Ok(minor_wronskian(chain.functions(), n, p, 0)?.value / wronskian(chain.functions(), p, 0)?.value)
    };
    let rhs = (-1.0_f64).powi((n + 1) as i32) * a[n] * a[n] * prod * frac(x)? * frac(y)?;
    Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300))
}

/// Errors of `∫K(x, y; -iε) f(y) dy - f(x)` and their log-log slope against `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    pub eps: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Initial-condition check for a kernel with a test function supported in `support`.
pub fn delta_sequence_check(
    k: &dyn Kernel,
    f: &dyn Fn(f64) -> f64,
    support: (f64, f64),
    x: f64,
    eps_list: &[f64],
) -> Result<DeltaReport> {
    if eps_list.len() < 2 || eps_list.windows(2).any(|w| !(w[0] > w[1] && w[1] > 0.0)) {
        return Err(Error::Argument("ε list must be positive and strictly descending".into()));
    }
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-11, max_intervals: 8000 };
    let mut errors = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let t = ComplexTime::wick(eps)?;
        let width = 12.0 * eps.sqrt();
        let bps = [x - width, x - width / 4.0, x, x + width / 4.0, x + width];
        let q = integrate_fallible(
            |y| Ok(k.eval(x, y, t)? * f(y)),
            Bound::Finite(support.0),
            Bound::Finite(support.1),
            &bps,
            opts,
        )?;
        errors.push((q.value - f(x)).norm());
    }
    Ok(DeltaReport { eps: eps_list.to_vec(), slope: loglog_slope(eps_list, &errors), errors })
}

/// `|∫K(x,z;-iτ₁)K(z,y;-iτ₂)dz - K(x,y;-i(τ₁+τ₂))| / |K(x,y;-i(τ₁+τ₂))|`.
pub fn semigroup_deviation(k: &dyn Kernel, x: f64, y: f64, tau1: f64, tau2: f64) -> Result<f64> {
    let (t1, t2, t12) = (ComplexTime::wick(tau1)?, ComplexTime::wick(tau2)?, ComplexTime::wick(tau1 + tau2)?);
    let (lo, hi) = k.base_model().domain();
    let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 8000 };
    let q = integrate_fallible(|z| Ok(k.eval(x, z, t1)? * k.eval(z, y, t2)?), lo, hi, &[x, y], opts)?;
    let direct = k.eval(x, y, t12)?;
    Ok((q.value - direct).norm() / direct.norm())
}

fn d2_5pt(f: &dyn Fn(f64) -> Result<Complex64>, x: f64, h: f64) -> Result<Complex64> {
    Ok((-f(x + 2.0 * h)? + 16.0 * f(x + h)? - 30.0 * f(x)? + 16.0 * f(x - h)? - f(x - 2.0 * h)?) / (12.0 * h * h))
}

fn d1_5pt(f: &dyn Fn(f64) -> Result<Complex64>, x: f64, h: f64) -> Result<Complex64> {
    Ok((-f(x + 2.0 * h)? + 8.0 * f(x + h)? - 8.0 * f(x - h)? + f(x - 2.0 * h)?) / (12.0 * h))
}

/// Relative residual of `∂_τ K = -(-∂² + V) K` at Wick time `τ`, with five-point
/// stencils of step `h` in `τ` and in the chosen spatial argument.
pub fn schrodinger_residual(
    k: &dyn Kernel,
    v: &dyn Fn(f64) -> f64,
    x: f64,
    y: f64,
    tau: f64,
    h: f64,
    in_y: bool,
) -> Result<f64> {
    if !(tau > 2.0 * h) {
        return Err(Error::Argument(format!("τ = {tau} too small for step {h}")));
    }
    let t = ComplexTime::wick(tau)?;
    let kt = |s: f64| k.eval(x, y, ComplexTime::wick(s)?);
    let kp = |p: f64| if in_y { k.eval(x, p, t) } else { k.eval(p, y, t) };
    let p = if in_y { y } else { x };
    let dt = d1_5pt(&kt, tau, h)?;
    let dpp = d2_5pt(&kp, p, h)?;
    let k0 = k.eval(x, y, t)?;
    let vk = v(p) * k0;
    // |K|/τ keeps the scale honest where ∂_τK and ∂²K vanish together
    let scale = dt.norm().max(dpp.norm()).max(vk.norm()).max(k0.norm() / tau);
    Ok((dt - dpp + vk).norm() / scale)
}
