//! Closed-form partner propagators: the box without its ground state, the
//! oscillator pairs `(k, k+1)` and the reflectionless potentials.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::base::FreeKernel;
use super::green::{AnalyticEigenbasis, Eigenbasis};
use super::theorems::{Branch, PartialFractions};
use super::{BaseKernel, ComplexTime, Kernel, Method};
use crate::darboux::{kernel_solution, Action, BaseModel, DarbouxChain, Intertwiner};
use crate::jets::BasisFunction;
use crate::quad::{gauss_kronrod, QuadOptions};
use crate::specfun::{erfcx_complex, exp_erfc, hermite_p_all, theta3, ThetaArgs};
use crate::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn open_unit(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} = {v} must lie in (0, 1)")))
    }
}

/// Partner of the unit box with the ground level removed, `V₁ = 2π²/sin²πx`:
///
/// `K₁ = π cot(πx)/(2 sin πy) ∫₀^y [ϑ₃⁻ - ϑ₃⁺] sin πz dz
///      - π/(2 sin πy) ∫₀^y [ϑ₃⁻ + ϑ₃⁺] cos πz dz + ½[ϑ₃⁻ + ϑ₃⁺](x, y)`.
pub fn box_removed_ground_kernel(x: f64, y: f64, t: ComplexTime) -> Result<Complex64> {
    open_unit(x, "x")?;
    open_unit(y, "y")?;
    t.require_wick("box propagator")?;
    let tau = -PI * t.value();
    let theta = |arg: f64| -> Result<Complex64> { theta3(ThetaArgs::new(c(PI * arg / 2.0), tau)?, 1e-16) };
    let pair = |z: f64| -> Result<(Complex64, Complex64)> { Ok((theta(x - z)?, theta(x + z)?)) };
    // ϑ₃ peaks at (πτ_w)^{-1/2} and the odd part is a difference of two such peaks
    let opts = QuadOptions { abs_tol: 1e-15 * (1.0 + 1.0 / t.wick_part().sqrt()), rel_tol: 1e-14, max_intervals: 2000 };
    let mut failure = None;
    let mut integrand = |z: f64, odd: bool| match pair(z) {
        Ok((m, p)) => {
            if odd {
                (m - p) * (PI * z).sin()
            } else {
                (m + p) * (PI * z).cos()
            }
        }
        Err(e) => {
            failure.get_or_insert(e);
            c(0.0)
        }
    };
    let bps: Vec<f64> = [0.0, x.min(y), y].into_iter().collect();
    let mut pieces = |odd: bool| -> Result<Complex64> {
        let mut acc = c(0.0);
        for w in bps.windows(2) {
            if w[1] > w[0] {
                acc += gauss_kronrod(|z| integrand(z, odd), w[0], w[1], opts)?.value;
            }
        }
        Ok(acc)
    };
    let sin_part = pieces(true)?;
    let cos_part = pieces(false)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let (m, p) = pair(y)?;
    let sy = (PI * y).sin();
    Ok(PI / (PI * x).tan() / (2.0 * sy) * sin_part - PI / (2.0 * sy) * cos_part + 0.5 * (m + p))
}

/// Spectral sum `Σ_m φ_m(x) φ_m(y) e^{-iE_m t}` over the first `terms` base levels,
/// with `φ_m = N_m L ψ_m` and the removed levels skipped. Only deletion chains on the
/// box or the oscillator are accepted.
pub fn intertwined_spectral_kernel(chain: &DarbouxChain, x: f64, y: f64, t: ComplexTime, terms: usize) -> Result<Complex64> {
    t.require_wick("spectral sum")?;
    if chain.actions().iter().any(|a| *a != Action::RemoveLevel) {
        return Err(Error::Configuration("spectral sum over L ψ_m needs a pure deletion chain".into()));
    }
    let eigs = match chain.base_model() {
        BaseModel::Box => AnalyticEigenbasis::Box { levels: terms },
        BaseModel::Oscillator => AnalyticEigenbasis::Oscillator { levels: terms },
        BaseModel::FreeLine => {
            return Err(Error::Configuration("the free line has no discrete base spectrum".into()))
        }
    };
    let order = chain.len() + 1;
    let lx = Intertwiner::at(chain.functions(), x)?;
    let ly = Intertwiner::at(chain.functions(), y)?;
    let jx = eigs.eigenfunction_jets(x, chain.len())?;
    let jy = eigs.eigenfunction_jets(y, chain.len())?;
    debug_assert!(order > chain.len());
    let mut sum = c(0.0);
    for m in 0..eigs.len() {
        let e = eigs.energy(m);
        let denom: f64 = chain.alphas().iter().map(|a| e - a).product();
        if denom.abs() <= 1e-12 * e.abs().max(1.0).powi(chain.len() as i32) {
            continue;
        }
        sum += lx.apply_real(&jx[m]) * ly.apply_real(&jy[m]) / denom * t.phase(e);
    }
    Ok(sum)
}

/// Taylor coefficients helper: `∂_J^m S(J, x, y; t)` at `J` for `m = 0..=order`, where
/// `S = (4πi sin t)^{-1/2} ∫_y^∞ exp{i[(x²+z²) cos t - 2xz]/4 sin t - z²/4 + Jz} dz`.
pub fn oscillator_generating_s(j: f64, x: f64, y: f64, t: ComplexTime, order: usize) -> Result<Vec<Complex64>> {
    generating_s(j, x, y, t, order, Branch::Upper)
}

/// `∂_J^m` of the generating integral over `[y, ∞)` (`Upper`) or `(-∞, y]` (`Lower`).
fn generating_s(j: f64, x: f64, y: f64, t: ComplexTime, order: usize, branch: Branch) -> Result<Vec<Complex64>> {
    let tc = t.value();
    let sn = tc.sin();
    let cs = tc.cos();
    if sn.norm() < 1e-14 {
        return Err(Error::Domain(format!("caustic of the oscillator propagator at t = {tc}")));
    }
    let i = Complex64::i();
    let pre = (4.0 * PI * i * sn).sqrt().inv();
    let a = i * cs / (4.0 * sn) - 0.25;
    let b = -i * x / (2.0 * sn) + j;
    let cc = i * x * x * cs / (4.0 * sn);
    let w = (-a).sqrt();
    if w.re <= 0.0 {
        return Err(Error::Domain("generating integral diverges".into()));
    }
    let s = w * y - b / (2.0 * w);
    // ∫_y^∞ ∝ erfc(s) and ∫_{-∞}^y ∝ erfc(-s). With σ = sign Re s the jet of
    // erfcx(σs) is always safe; the other branch is 2e^{s²} minus it, and the e^{s²}
    // factor joins the exponent instead of overflowing.
    let sigma = if s.re >= 0.0 { 1.0 } else { -1.0 };
    let direct = (branch == Branch::Upper) == (sigma > 0.0);
    let mut xs = Vec::with_capacity(order + 1);
    let mut es = Vec::with_capacity(order + 1);
    xs.push(erfcx_complex(sigma * s));
    es.push(c(1.0));
    if order >= 1 {
        xs.push(2.0 * s * xs[0] - sigma * 2.0 * FRAC_1_SQRT_PI);
        es.push(2.0 * s);
    }
    for m in 1..order {
        let next = 2.0 * s * xs[m] + 2.0 * m as f64 * xs[m - 1];
        xs.push(next);
        let next = 2.0 * s * es[m] + 2.0 * m as f64 * es[m - 1];
        es.push(next);
    }
    let lead = cc + w * w * y * y - 2.0 * w * y * s;
    let lead_e = cc + b * b / (4.0 * w * w);
    if !lead.is_finite() || lead.re > 700.0 || (!direct && lead_e.re > 700.0) {
        return Err(Error::Domain(format!("generating function overflows at y = {y}")));
    }
    let scale = pre * (PI.sqrt() / (2.0 * w));
    let k = -2.0 * w * y;
    let ds = -1.0 / (2.0 * w);
    let leibniz = |jet: &[Complex64], m: usize| {
        // Σ_j C(m, j) k^{m-j} X^{(j)}
        let mut f = c(0.0);
        let mut binom = 1.0;
        for (jj, xj) in jet.iter().enumerate().take(m + 1) {
            f += binom * k.powu((m - jj) as u32) * xj;
            binom *= (m - jj) as f64 / (jj + 1) as f64;
        }
        f
    };
    let mut out = Vec::with_capacity(order + 1);
    let mut dsm = c(1.0);
    for m in 0..=order {
        let d = lead.exp() * leibniz(&xs, m);
        let f = if direct { d } else { 2.0 * lead_e.exp() * leibniz(&es, m) - d };
        out.push(scale * dsm * f);
        dsm *= ds;
    }
    Ok(out)
}

/// Coefficients of `p_k` in ascending powers.
fn hermite_coeffs(k: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for n in 1..k {
        let mut next = vec![0.0; n + 2];
        for (p, v) in cur.iter().enumerate() {
            next[p + 1] += v;
        }
        for (p, v) in prev.iter().enumerate() {
            next[p] -= n as f64 * v;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Partner of the oscillator after deleting the levels `k` and `k+1`:
///
/// `K = e^{y²/4}/Q_k(y) · L_x[p_k(y) p_{k+1}(∂_J)S - p_{k+1}(y) p_k(∂_J)S]_{J=0}`
/// with `Q_k = p_{k+1}² - p_k p_{k+2}`.
///
/// The bracket over the whole line is annihilated by `L_x`, so for `y < x` the
/// integral over `(-∞, y]` is used with the opposite sign; that side avoids the
/// cancellation against the peak of `K₀` at `z = x`.
pub fn oscillator_pair_kernel(k: u32, x: f64, y: f64, t: ComplexTime) -> Result<Complex64> {
    let k = k as usize;
    if x * x / 4.0 > 745.0 || y * y / 4.0 > 745.0 {
        // the Hermite–Gaussians underflow and W vanishes numerically; so does K
        t.require_wick("far-field oscillator kernel")?;
        return Ok(c(0.0));
    }
    let chain = DarbouxChain::oscillator_pair(k as u32)?;
    let lx = Intertwiner::at(chain.functions(), x)?;
    let branch = if y < x { Branch::Lower } else { Branch::Upper };
    let s = generating_s(0.0, x, y, t, k + 3, branch)?;
    let sign = if branch == Branch::Lower { -1.0 } else { 1.0 };
    let tc = t.value();
    let i = Complex64::i();
    let sn = tc.sin();
    let cs = tc.cos();
    // ∂_x S = (α + β ∂_J) S
    let alpha = i * x * cs / (2.0 * sn);
    let alpha1 = i * cs / (2.0 * sn);
    let beta = -i / (2.0 * sn);
    let p = hermite_p_all(k + 2, y)?;
    let q = p[k + 1] * p[k + 1] - p[k] * p[k + 2];
    let weights = {
        let mut w = vec![0.0; k + 2];
        for (m, v) in hermite_coeffs(k + 1).iter().enumerate() {
            w[m] += p[k] * v;
        }
        for (m, v) in hermite_coeffs(k).iter().enumerate() {
            w[m] -= p[k + 1] * v;
        }
        w
    };
    let mut g = [c(0.0); 3];
    for (m, wm) in weights.iter().enumerate() {
        if *wm == 0.0 {
            continue;
        }
        g[0] += *wm * s[m];
        g[1] += *wm * (alpha * s[m] + beta * s[m + 1]);
        g[2] += *wm * ((alpha1 + alpha * alpha) * s[m] + 2.0 * alpha * beta * s[m + 1] + beta * beta * s[m + 2]);
    }
    Ok(sign * (y * y / 4.0).exp() / q * lx.apply(&g))
}

fn transparent_only(chain: &DarbouxChain) -> Result<()> {
    let ok = chain.base_model() == BaseModel::FreeLine
        && chain.functions().iter().all(|u| matches!(u, BasisFunction::Cosh { .. } | BasisFunction::Sinh { .. }));
    if ok {
        Ok(())
    } else {
        Err(Error::Configuration("expected a transparent (cosh/sinh) chain on the free line".into()))
    }
}

fn transparent_prefactor(a: &[f64], n: usize) -> f64 {
    a.iter()
        .enumerate()
        .filter(|(j, _)| *j != n)
        .map(|(_, aj)| (a[n] * a[n] - aj * aj).abs())
        .product::<f64>()
        * a[n]
}

/// Normalised bound state `φ_n = [a_n/2 ∏_{j≠n} |a_n² - a_j²|]^{1/2} W_n/W` at
/// energy `-a_n²`.
pub fn transparent_eigenfunction(chain: &DarbouxChain, n: usize, x: f64) -> Result<f64> {
    transparent_only(chain)?;
    if n >= chain.len() {
        return Err(Error::Argument(format!("level {n} out of range for N = {}", chain.len())));
    }
    let a = chain.wavenumbers();
    let v = (transparent_prefactor(&a, n) / 2.0).sqrt() * kernel_solution(chain, n, x)?;
    // the hyperbolic Wronskians overflow long after φ_n has dropped below e^{-a_n|x|}
    if !v.is_finite() && a.iter().sum::<f64>() * x.abs() > 700.0 {
        return Ok(0.0);
    }
    Ok(v)
}

fn sqrt_it(t: ComplexTime) -> Result<Complex64> {
    if t.is_zero() {
        return Err(Error::Domain("t = 0".into()));
    }
    Ok((Complex64::i() * t.value()).sqrt())
}

/// `∂_s^m I` for `m = 0..=order` with `s = x - y`, where
/// `I(a, s; t) = (4πit)^{-1/2} ∫ e^{i(s-z)²/4t - a|z|} dz/(2a)`.
fn transparent_i_jet(a: f64, x: f64, y: f64, t: ComplexTime, order: usize) -> Result<Vec<Complex64>> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Argument(format!("wavenumber must be positive, got {a}")));
    }
    let r = sqrt_it(t)?;
    let s = x - y;
    let p = Complex64::i() * a * a * t.value();
    let up = exp_erfc(p + a * s, a * r + s / (2.0 * r));
    let dn = exp_erfc(p - a * s, a * r - s / (2.0 * r));
    let mut out = vec![(up + dn) / (4.0 * a)];
    if order >= 1 {
        out.push((up - dn) / 4.0);
    }
    if order >= 2 {
        // I'' = a² I - K₀
        let k0 = FreeKernel.jet_x(x, y, t, order - 2)?;
        for m in 2..=order {
            let v = a * a * out[m - 2] - k0[m - 2];
            out.push(v);
        }
    }
    Ok(out)
}

/// `I(a, x, y; t) = (e^{ia²t}/4a)[e^{a(x-y)} erfc(a√(it) + (x-y)/2√(it)) + e^{a(y-x)} erfc(a√(it) - (x-y)/2√(it))]`.
pub fn transparent_i(a: f64, x: f64, y: f64, t: ComplexTime) -> Result<Complex64> {
    Ok(transparent_i_jet(a, x, y, t, 0)?[0])
}

/// Propagator of the `N`-level reflectionless potential,
/// `K_N = K₀ + Σ_n [a_n/4 ∏_{j≠n}|a_n² - a_j²|] (W_n W_n / W W)(x, y) e^{ia_n²t} [erf₊ + erf₋]`.
pub fn transparent_propagator(chain: &DarbouxChain, x: f64, y: f64, t: ComplexTime) -> Result<Complex64> {
    transparent_only(chain)?;
    let r = sqrt_it(t)?;
    // erf₊ + erf₋ = erfc(|s|/2r - ar) - erfc(|s|/2r + ar); avoids 2 - erfc(z) for z ≪ 0
    let s = (x - y).abs();
    let a = chain.wavenumbers();
    let mut k = FreeKernel.jet_x(x, y, t, 0)?[0];
    for n in 0..a.len() {
        let p = Complex64::i() * a[n] * a[n] * t.value();
        let bracket = exp_erfc(p, s / (2.0 * r) - a[n] * r) - exp_erfc(p, s / (2.0 * r) + a[n] * r);
        k += transparent_prefactor(&a, n) / 4.0 * kernel_solution(chain, n, x)? * kernel_solution(chain, n, y)? * bracket;
    }
    Ok(k)
}

/// The same propagator assembled as continuous plus discrete parts,
/// `L_x L_y Σ_n [∏_{j≠n} 1/(α_n - α_j)] I(a_n) + Σ_n φ_n(x) φ_n(y) e^{-iα_n t}`.
pub fn transparent_k1_route(chain: &DarbouxChain, x: f64, y: f64, t: ComplexTime) -> Result<Complex64> {
    transparent_only(chain)?;
    let n = chain.len();
    let lx = Intertwiner::at(chain.functions(), x)?;
    let ly = Intertwiner::at(chain.functions(), y)?;
    let a = chain.wavenumbers();
    let weights = PartialFractions::default().weights(chain.alphas());
    let mut cont = c(0.0);
    for (an, wn) in a.iter().zip(&weights) {
        let jet = transparent_i_jet(*an, x, y, t, 2 * n)?;
        let mut acc = c(0.0);
        for (kx, cx) in lx.coeffs.iter().enumerate() {
            for (jy, dy) in ly.coeffs.iter().enumerate() {
                let sign = if jy % 2 == 0 { 1.0 } else { -1.0 };
                acc += cx * dy * sign * jet[kx + jy];
            }
        }
        cont += *wn * acc;
    }
    let mut disc = c(0.0);
    for m in 0..n {
        disc += transparent_eigenfunction(chain, m, x)? * transparent_eigenfunction(chain, m, y)? * t.phase(chain.alphas()[m]);
    }
    Ok(cont + disc)
}

/// The closed-form partner kernels behind the [`Kernel`] interface.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedKernel {
    BoxGroundRemoved { chain: DarbouxChain },
    OscillatorPair { k: u32, chain: DarbouxChain },
    Transparent { chain: DarbouxChain },
}

impl ClosedKernel {
    pub fn box_ground_removed() -> Result<Self> {
        Ok(Self::BoxGroundRemoved { chain: DarbouxChain::box_deletion(1)? })
    }

    pub fn oscillator_pair(k: u32) -> Result<Self> {
        Ok(Self::OscillatorPair { k, chain: DarbouxChain::oscillator_pair(k)? })
    }

    pub fn transparent(chain: DarbouxChain) -> Result<Self> {
        transparent_only(&chain)?;
        Ok(Self::Transparent { chain })
    }

    /// Recognises a chain with a closed-form kernel.
    pub fn for_chain(chain: &DarbouxChain) -> Result<Self> {
        let f = chain.functions();
        match chain.base_model() {
            BaseModel::Box if f == [BasisFunction::TrigBox { n: 1 }] => Self::box_ground_removed(),
            BaseModel::Oscillator => match f {
                [BasisFunction::HermiteGaussian { k }, BasisFunction::HermiteGaussian { k: k1 }] if *k1 == k + 1 => {
                    Self::oscillator_pair(*k)
                }
                _ => Err(Error::Configuration("closed form exists only for oscillator pairs (k, k+1)".into())),
            },
            BaseModel::FreeLine => Self::transparent(chain.clone()),
            BaseModel::Box => Err(Error::Configuration("closed form exists only for the box without its ground level".into())),
        }
    }
}

impl Kernel for ClosedKernel {
    fn eval(&self, x: f64, y: f64, t: ComplexTime) -> Result<Complex64> {
        match self {
            Self::BoxGroundRemoved { .. } => box_removed_ground_kernel(x, y, t),
            Self::OscillatorPair { k, .. } => oscillator_pair_kernel(*k, x, y, t),
            Self::Transparent { chain } => transparent_propagator(chain, x, y, t),
        }
    }

    fn base_model(&self) -> BaseModel {
        match self {
            Self::BoxGroundRemoved { .. } => BaseModel::Box,
            Self::OscillatorPair { .. } => BaseModel::Oscillator,
            Self::Transparent { .. } => BaseModel::FreeLine,
        }
    }

    fn method(&self) -> Method {
        Method::ClosedForm
    }

    fn chain(&self) -> Option<&DarbouxChain> {
        match self {
            Self::BoxGroundRemoved { chain } | Self::OscillatorPair { chain, .. } | Self::Transparent { chain } => Some(chain),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagators::base::{oscillator_propagator, BoxKernel0, OscillatorKernel};
    use crate::propagators::theorems::{theorem2_kernel, theorem3_kernel, Branch, TheoremOptions};
    use crate::quad::{integrate, Bound};

    fn wick(tau: f64) -> ComplexTime {
        ComplexTime::wick(tau).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn box_closed_form_matches_theorem_route_and_spectral_sum() {
        let chain = DarbouxChain::box_deletion(1).unwrap();
        let t = wick(0.05);
        let closed = box_removed_ground_kernel(0.3, 0.6, t).unwrap();
        for branch in [Branch::Lower, Branch::Upper] {
            let q = theorem2_kernel(&BoxKernel0::default(), &chain, 0.3, 0.6, t, branch, TheoremOptions::default()).unwrap();
            assert!(rel(q, closed) < 1e-7, "{branch:?}: {q} vs {closed}");
        }
        let spectral = intertwined_spectral_kernel(&chain, 0.3, 0.6, t, 200).unwrap();
        assert!(rel(spectral, closed) < 1e-9, "{spectral} vs {closed}");
    }

    #[test]
    fn box_closed_form_is_symmetric() {
        let t = wick(0.05);
        for &(x, y) in &[(0.1, 0.7), (0.25, 0.35), (0.9, 0.45), (0.5, 0.02)] {
            let a = box_removed_ground_kernel(x, y, t).unwrap();
            let b = box_removed_ground_kernel(y, x, t).unwrap();
            assert!((a - b).norm() <= 1e-8 * a.norm(), "({x},{y}): {a} vs {b}");
        }
        assert!(matches!(box_removed_ground_kernel(0.0, 0.5, t), Err(Error::Domain(_))));
        assert!(box_removed_ground_kernel(0.5, 0.5, ComplexTime::real(0.1).unwrap()).is_err());
    }

    fn s_by_quadrature(x: f64, y: f64, t: ComplexTime, power: i32) -> Complex64 {
        let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-14, max_intervals: 4000 };
        integrate(
            |z| oscillator_propagator(x, z, t).unwrap() * (-z * z / 4.0).exp() * z.powi(power),
            Bound::Finite(y),
            Bound::PosInf,
            &[x],
            opts,
        )
        .unwrap()
        .value
    }

    #[test]
    fn generating_function_matches_its_integral() {
        let t = wick(0.3);
        for &(x, y) in &[(0.4, -0.2), (-1.0, 0.5), (1.5, 1.2)] {
            let s = oscillator_generating_s(0.0, x, y, t, 3).unwrap();
            for m in 0..=3 {
                let q = s_by_quadrature(x, y, t, m as i32);
                assert!(rel(s[m], q) < 1e-8, "m={m} ({x},{y}): {} vs {q}", s[m]);
            }
        }
    }

    #[test]
    fn generating_function_matches_printed_closed_form() {
        // ½ exp((-2it - x²)/4 + (iJ² sin t + Jx) e^{-it}) (1 + erf[-√i e^{-it/2}(2J sin t + i(y e^{it} - x)) / 2√(sin t)])
        let i = Complex64::i();
        let t = ComplexTime::new(0.2, 0.4).unwrap();
        let tc = t.value();
        for &(j, x, y) in &[(0.0, 0.3, -0.4), (0.2, -0.5, 0.1), (-0.3, 1.0, 0.8)] {
            let pre = ((-2.0 * i * tc - x * x) / 4.0 + (i * j * j * tc.sin() + j * x) * (-i * tc).exp()).exp();
            let arg = -i.sqrt() * (-i * tc / 2.0).exp() * (2.0 * j * tc.sin() + i * (y * (i * tc).exp() - x)) / (2.0 * tc.sin().sqrt());
            let printed = 0.5 * pre * crate::specfun::erfc_complex(arg, 1e-13).unwrap();
            let ours = oscillator_generating_s(j, x, y, t, 0).unwrap()[0];
            assert!(rel(ours, printed) < 1e-10, "J={j}: {ours} vs {printed}");
        }
    }

    #[test]
    fn generating_function_full_line_limit() {
        // ∫ K_osc(x, z) e^{-z²/4} dz = e^{-it/2} e^{-x²/4}
        let t = wick(0.7);
        let s = oscillator_generating_s(0.0, 0.6, -15.0, t, 0).unwrap()[0];
        let target = t.phase(0.5) * (-0.36_f64 / 4.0).exp();
        assert!(rel(s, target) < 1e-6, "{s} vs {target}");
    }

    #[test]
    fn generating_function_j_derivatives_match_finite_differences() {
        let t = wick(0.5);
        let h = 1e-4;
        let jet = oscillator_generating_s(0.1, 0.2, 0.3, t, 2).unwrap();
        let f = |j: f64| oscillator_generating_s(j, 0.2, 0.3, t, 0).unwrap()[0];
        let d1 = (f(0.1 + h) - f(0.1 - h)) / (2.0 * h);
        assert!(rel(d1, jet[1]) < 1e-7);
    }

    #[test]
    fn oscillator_pair_matches_theorem_route_and_spectral_sum() {
        for k in [0u32, 2, 3] {
            let chain = DarbouxChain::oscillator_pair(k).unwrap();
            let t = wick(0.5);
            for &(x, y) in &[(0.3, -0.7), (1.2, 0.4), (-1.8, 1.5)] {
                let closed = oscillator_pair_kernel(k, x, y, t).unwrap();
                let spectral = intertwined_spectral_kernel(&chain, x, y, t, 60).unwrap();
                assert!(rel(closed, spectral) < 1e-9, "k={k} ({x},{y}): {closed} vs {spectral}");
                let q = theorem3_kernel(&OscillatorKernel, &chain, x, y, t, Branch::Upper, TheoremOptions::default()).unwrap();
                assert!(rel(closed, q) < 1e-8, "k={k} ({x},{y}): {closed} vs {q}");
            }
        }
    }

    #[test]
    fn oscillator_pair_is_symmetric() {
        let t = wick(0.5);
        for &(x, y) in &[(0.3, -0.7), (1.2, 0.4), (-1.8, 1.5), (0.0, 2.0)] {
            let a = oscillator_pair_kernel(2, x, y, t).unwrap();
            let b = oscillator_pair_kernel(2, y, x, t).unwrap();
            assert!((a - b).norm() <= 1e-9 * a.norm());
        }
    }

    #[test]
    fn transparent_bound_states_are_orthonormal() {
        let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 2000 };
        let one = DarbouxChain::transparent(&[1.0]).unwrap();
        let v = transparent_eigenfunction(&one, 0, 0.7).unwrap();
        assert!((v.abs() - (0.7_f64).cosh().recip() / 2f64.sqrt()).abs() < 1e-14);
        let two = DarbouxChain::transparent(&[1.0, 2.0]).unwrap();
        let shifted = DarbouxChain::transparent_with_offsets(&[(1.0, 0.3), (2.0, -0.5)]).unwrap();
        for chain in [&one, &two, &shifted] {
            for n in 0..chain.len() {
                for m in 0..chain.len() {
                    let q = integrate(
                        |x| c(transparent_eigenfunction(chain, n, x).unwrap() * transparent_eigenfunction(chain, m, x).unwrap()),
                        Bound::Finite(-30.0),
                        Bound::Finite(30.0),
                        &[0.0],
                        opts,
                    )
                    .unwrap()
                    .value
                    .re;
                    let target = if n == m { 1.0 } else { 0.0 };
                    assert!((q - target).abs() < 1e-8, "N={} <{n}|{m}> = {q}", chain.len());
                }
            }
        }
    }

    #[test]
    fn transparent_i_matches_quadrature() {
        let t = wick(0.4);
        let (a, x, y) = (1.0, 0.5, -0.3);
        let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-14, max_intervals: 4000 };
        let q = integrate(
            |z| FreeKernel.jet_x(x, z, t, 0).unwrap()[0] * (-a * (z - y).abs()).exp() / (2.0 * a),
            Bound::NegInf,
            Bound::PosInf,
            &[x, y],
            opts,
        )
        .unwrap()
        .value;
        let i = transparent_i(a, x, y, t).unwrap();
        assert!(rel(i, q) < 1e-8, "{i} vs {q}");
        assert_eq!(i, transparent_i(a, y, x, t).unwrap());
        // derivative jet against finite differences
        let h = 1e-4;
        let jet = transparent_i_jet(a, x, y, t, 3).unwrap();
        let f = |xx: f64| transparent_i(a, xx, y, t).unwrap();
        assert!(rel((f(x + h) - f(x - h)) / (2.0 * h), jet[1]) < 1e-7);
        assert!(rel((f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h), jet[2]) < 1e-5);
    }

    #[test]
    fn transparent_i_decays_monotonically_deep_in_wick_time() {
        let mut prev = f64::INFINITY;
        for k in 0..=8 {
            let tau = 1.0 + 0.5 * k as f64;
            // e^{-a²τ} I is the free-continuum weight and must shrink
            let v = transparent_i(1.0, 0.2, -0.1, wick(tau)).unwrap().norm() * (-tau).exp();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn transparent_closed_form_matches_k1_assembly() {
        let t = wick(0.5);
        for a in [vec![1.0], vec![1.0, 2.0], vec![0.8, 1.5, 2.1]] {
            let chain = DarbouxChain::transparent(&a).unwrap();
            for &(x, y) in &[(0.0, 0.0), (0.5, -1.0), (2.0, 1.3), (-2.5, 0.7), (1.0, 3.0)] {
                let k = transparent_propagator(&chain, x, y, t).unwrap();
                let r = transparent_k1_route(&chain, x, y, t).unwrap();
                assert!(rel(k, r) < 1e-6, "{a:?} ({x},{y}): {k} vs {r}");
            }
        }
    }

    #[test]
    fn transparent_unitarity_symmetry_in_real_time() {
        let chain = DarbouxChain::transparent(&[1.0, 2.0]).unwrap();
        for &(x, y, tr) in &[(0.3, -0.4, 0.7), (1.0, 2.0, 0.2), (-0.5, 0.5, 1.3)] {
            let a = transparent_propagator(&chain, x, y, ComplexTime::real(-tr).unwrap()).unwrap().conj();
            let b = transparent_propagator(&chain, y, x, ComplexTime::real(tr).unwrap()).unwrap();
            assert!((a - b).norm() <= 1e-9 * b.norm(), "{a} vs {b}");
        }
    }
}
