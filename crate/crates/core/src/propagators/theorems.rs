//! Partner propagators assembled from `K₀` by quadrature, one function per mapping
//! theorem.
//!
//! Every route has the shape `∫ (L_x K₀)(x, z; t) · H(z, y) dz`: the intertwiner in
//! `x` acts on the exact derivative jet of `K₀` and the `y`-dependence is carried by
//! a Green function or by the transformation functions themselves.

use num_complex::Complex64;

use super::green::GreenFn;
use super::{BaseKernel, ComplexTime};
use crate::darboux::{kernel_solution, Action, BaseModel, DarbouxChain, Intertwiner};
use crate::jets::BasisFunction;
use crate::quad::{integrate_fallible, Bound, QuadOptions};
use crate::{Error, Result};

/// Quadrature settings shared by the theorem routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremOptions {
    pub quad: QuadOptions,
}

impl Default for TheoremOptions {
    fn default() -> Self {
        Self { quad: QuadOptions { abs_tol: 1e-13, rel_tol: 1e-13, max_intervals: 6000 } }
    }
}

/// The three first-order spectral relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem1Kind {
    /// (i) `u = ψ₀`, the ground level is removed.
    RemoveGround,
    /// (ii) `1/u` is normalisable and a level `α` below the spectrum appears.
    CreateLevel,
    /// (iii) the spectra coincide.
    Isospectral,
}

/// Which of the two equivalent integral forms to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `∫_a^y`.
    Lower,
    /// `∫_y^b`.
    Upper,
}

/// Infinity at which a transformation function vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Vanishes as `x → -∞`; integrated over `(-∞, y]`.
    Lower,
    /// Vanishes as `x → +∞`; integrated over `[y, ∞)`.
    Upper,
}

/// Ordering of the partial-fraction weights `∏_{j≠n} 1/(α_n - α_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PartialFractions {
    /// `∏_{j≠n} 1/(α_n - α_j)`, the expansion of `∏ 1/(E - α_j)`.
    #[default]
    NMinusJ,
    /// `∏_{j≠n} 1/(α_j - α_n)`, differs by `(-1)^{N-1}`.
    JMinusN,
}

impl PartialFractions {
    pub fn weights(self, alphas: &[f64]) -> Vec<f64> {
        (0..alphas.len())
            .map(|n| {
                alphas
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != n)
                    .map(|(_, a)| match self {
                        Self::NMinusJ => 1.0 / (alphas[n] - a),
                        Self::JMinusN => 1.0 / (a - alphas[n]),
                    })
                    .product()
            })
            .collect()
    }
}

pub(crate) fn domain_bounds(model: BaseModel) -> (Bound, Bound) {
    model.domain()
}

fn check_models(k0: &dyn BaseKernel, chain: &DarbouxChain) -> Result<()> {
    if k0.base_model() != chain.base_model() {
        return Err(Error::Configuration(format!(
            "kernel of {:?} paired with a chain over {:?}",
            k0.base_model(),
            chain.base_model()
        )));
    }
    Ok(())
}

/// Splits around the peak of `K₀(x, z; t)`, whose width is `~√|t|`, so no piece
/// (in particular an exp-sinh tail) starts on a feature it cannot resolve.
fn peak_points(x: f64, t: ComplexTime, extra: &[f64]) -> Vec<f64> {
    let w = 12.0 * t.value().norm().sqrt();
    let mut p = vec![x - w, x, x + w];
    p.extend_from_slice(extra);
    p
}

fn check_point(model: BaseModel, x: f64, what: &str) -> Result<()> {
    if model.contains(x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} = {x} is outside the open domain of {model:?}")))
    }
}

fn lx_k0(k0: &dyn BaseKernel, lx: &Intertwiner, x: f64, z: f64, t: ComplexTime) -> Result<Complex64> {
    Ok(lx.apply(&k0.jet_x(x, z, t, lx.order())?))
}

/// `∫ f²` over the model domain, for normalising a bound state at `alpha`. On the
/// line the integral stops where `f` has decayed by `e^{-40}` or where the chain's
/// functions would overflow, whichever comes first.
pub(crate) fn norm_squared(
    chain: &DarbouxChain,
    alpha: f64,
    f: &dyn Fn(f64) -> Result<f64>,
    opts: QuadOptions,
) -> Result<f64> {
    let (lo, hi) = match chain.base_model() {
        BaseModel::FreeLine if alpha < 0.0 => {
            let steepest = chain.alphas().iter().fold(0.0_f64, |m, a| m.max((-a).max(0.0).sqrt()));
            let window = (40.0 / (-alpha).sqrt()).min(700.0 / steepest.max(1e-300));
            (Bound::Finite(-window), Bound::Finite(window))
        }
        model => domain_bounds(model),
    };
    let q = integrate_fallible(
        |z| {
            let v = f(z)?;
            Ok(Complex64::new(v * v, 0.0))
        },
        lo,
        hi,
        &[0.0, 0.5],
        opts,
    )?;
    if !q.value.re.is_finite() || q.value.re <= 0.0 {
        return Err(Error::Convergence("bound state is not normalisable".into()));
    }
    Ok(q.value.re)
}

/// `∫ (L_x K₀)(x, z; t) · Σ_n w_n (L_y G_n)(z, y) dz` over the whole domain.
fn resolvent_route(
    k0: &dyn BaseKernel,
    chain: &DarbouxChain,
    greens: &[GreenFn],
    weights: &[f64],
    x: f64,
    y: f64,
    t: ComplexTime,
    opts: TheoremOptions,
) -> Result<Complex64> {
    t.require_wick("quadrature propagator route")?;
    let model = chain.base_model();
    check_point(model, x, "x")?;
    check_point(model, y, "y")?;
    let n = chain.len();
    let lx = Intertwiner::at(chain.functions(), x)?;
    let ly = Intertwiner::at(chain.functions(), y)?;
    // The distributional parts of ∂_y^j G at z = y carry factors Σ_n w_n E_n^k with
    // k ≤ N - 2, which vanish for partial-fraction weights; the pointwise jets suffice.
    let (lo, hi) = domain_bounds(model);
    let q = integrate_fallible(
        |z| {
            let mut h = Complex64::new(0.0, 0.0);
            for (g, w) in greens.iter().zip(weights) {
                h += *w * ly.apply(&g.jet_y(z, y, n)?);
            }
            if h == Complex64::new(0.0, 0.0) {
                return Ok(h);
            }
            Ok(lx_k0(k0, &lx, x, z, t)? * h)
        },
        lo,
        hi,
        &peak_points(x, t, &[y]),
        opts.quad,
    )?;
    Ok(q.value)
}

/// First-order mapping `K₁ = L_x L_y ∫ K₀(x, z; t) G(z, y) dz` (plus the new bound
/// state for kind (ii)). `green` must be `G` at `α`, or `G̃` at `E₀` for kind (i).
pub fn theorem1_kernel(
    kind: Theorem1Kind,
    k0: &dyn BaseKernel,
    green: &GreenFn,
    chain: &DarbouxChain,
    x: f64,
    y: f64,
    t: ComplexTime,
    opts: TheoremOptions,
) -> Result<Complex64> {
    if chain.len() != 1 {
        return Err(Error::Configuration(format!("first-order mapping needs N = 1, got N = {}", chain.len())));
    }
    check_models(k0, chain)?;
    if green.model() != chain.base_model() {
        return Err(Error::Configuration("Green function of a different model".into()));
    }
    let alpha = chain.alphas()[0];
    let same_energy = (green.energy() - alpha).abs() <= 1e-12 * alpha.abs().max(1.0);
    match kind {
        Theorem1Kind::RemoveGround => {
            let e0 = chain.base_model().point_spectrum(1);
            if green.regularized_at() != Some(0) || e0.first() != Some(&alpha) || !same_energy {
                return Err(Error::Configuration(
                    "kind (i) needs u = ψ₀ and the Green function regularised at E₀".into(),
                ));
            }
        }
        Theorem1Kind::CreateLevel | Theorem1Kind::Isospectral => {
            if green.regularized_at().is_some() || !same_energy {
                return Err(Error::Configuration(format!(
                    "kinds (ii)/(iii) need the plain Green function at α = {alpha}"
                )));
            }
        }
    }
    let mut value = resolvent_route(k0, chain, &[*green], &[1.0], x, y, t, opts)?;
    if kind == Theorem1Kind::CreateLevel {
        let u = &chain.functions()[0];
        let inv = |z: f64| -> Result<f64> { Ok(1.0 / u.derivs(z, 0)?[0]) };
        let norm = norm_squared(chain, alpha, &inv, opts.quad)?;
        value += inv(x)? * inv(y)? / norm * t.phase(alpha);
    }
    Ok(value)
}

/// Per-function integral sides, `(-1)^N (-1)^n` for lower and `(-1)^{N-1} (-1)^n`
/// for upper integrals.
fn sided_route(
    k0: &dyn BaseKernel,
    chain: &DarbouxChain,
    sides: &[Side],
    x: f64,
    y: f64,
    t: ComplexTime,
    opts: TheoremOptions,
) -> Result<Complex64> {
    t.require_wick("quadrature propagator route")?;
    check_models(k0, chain)?;
    let model = chain.base_model();
    check_point(model, x, "x")?;
    check_point(model, y, "y")?;
    let n = chain.len();
    let lx = Intertwiner::at(chain.functions(), x)?;
    let mut lower: Vec<(f64, &BasisFunction)> = Vec::new();
    let mut upper: Vec<(f64, &BasisFunction)> = Vec::new();
    for (i, (u, side)) in chain.functions().iter().zip(sides).enumerate() {
        let v = kernel_solution(chain, i, y).map_err(|e| match e {
            Error::NodelessViolation { x } => Error::Singularity(format!("W(y) = 0 at y = {x}")),
            other => other,
        })?;
        let parity = if i % 2 == 0 { 1.0 } else { -1.0 };
        match side {
            Side::Lower => lower.push((if n % 2 == 0 { 1.0 } else { -1.0 } * parity * v, u)),
            Side::Upper => upper.push((if n % 2 == 0 { -1.0 } else { 1.0 } * parity * v, u)),
        }
    }
    let (lo, hi) = domain_bounds(model);
    let mut total = Complex64::new(0.0, 0.0);
    for (terms, a, b) in [(&lower, lo, Bound::Finite(y)), (&upper, Bound::Finite(y), hi)] {
        if terms.is_empty() {
            continue;
        }
        let q = integrate_fallible(
            |z| {
                let mut h = 0.0;
                for (c, u) in terms.iter() {
                    h += c * u.derivs(z, 0)?[0];
                }
                Ok(lx_k0(k0, &lx, x, z, t)? * h)
            },
            a,
            b,
            &peak_points(x, t, &[]),
            opts.quad,
        )?;
        total += q.value;
    }
    Ok(total)
}

/// Ground-state removal `K₁ = -(1/u(y)) L_x ∫_a^y K₀ u dz = (1/u(y)) L_x ∫_y^b K₀ u dz`.
pub fn theorem2_kernel(
    k0: &dyn BaseKernel,
    chain: &DarbouxChain,
    x: f64,
    y: f64,
    t: ComplexTime,
    branch: Branch,
    opts: TheoremOptions,
) -> Result<Complex64> {
    if chain.len() != 1 {
        return Err(Error::Configuration(format!("ground-state removal needs N = 1, got N = {}", chain.len())));
    }
    let e0 = chain.base_model().point_spectrum(1);
    if e0.first() != Some(&chain.alphas()[0]) {
        return Err(Error::Configuration("transformation function must be the ground state".into()));
    }
    theorem3_kernel(k0, chain, x, y, t, branch, opts)
}

/// Removal of the lowest `N` levels,
/// `K_N = (-1)^N L_x Σ_n (-1)^n (W_n/W)(y) ∫_a^y K₀ u_n dz` or the `∫_y^b` form with
/// `(-1)^{N-1}`.
pub fn theorem3_kernel(
    k0: &dyn BaseKernel,
    chain: &DarbouxChain,
    x: f64,
    y: f64,
    t: ComplexTime,
    branch: Branch,
    opts: TheoremOptions,
) -> Result<Complex64> {
    let side = match branch {
        Branch::Lower => Side::Lower,
        Branch::Upper => Side::Upper,
    };
    sided_route(k0, chain, &vec![side; chain.len()], x, y, t, opts)
}

/// Infinity at which a closed-form family vanishes, `None` if it vanishes at both or
/// the family is not recognised.
fn vanishing_sides(u: &BasisFunction) -> (bool, bool) {
    match u {
        BasisFunction::PlaneExp { sign, .. } => (*sign > 0, *sign < 0),
        BasisFunction::Cosh { .. } | BasisFunction::Sinh { .. } => (false, false),
        _ => (true, true),
    }
}

/// Isospectral mapping with transformation functions that vanish at one infinity
/// each; `sides[n]` records which one.
pub fn theorem4_kernel(
    k0: &dyn BaseKernel,
    chain: &DarbouxChain,
    sides: &[Side],
    x: f64,
    y: f64,
    t: ComplexTime,
    opts: TheoremOptions,
) -> Result<Complex64> {
    if sides.len() != chain.len() {
        return Err(Error::Configuration("one side per transformation function".into()));
    }
    if chain.base_model() == BaseModel::Box {
        return Err(Error::Configuration("the one-sided mapping is formulated on the real line".into()));
    }
    for (n, (u, side)) in chain.functions().iter().zip(sides).enumerate() {
        let (at_minus, at_plus) = vanishing_sides(u);
        let ok = match side {
            Side::Lower => at_minus,
            Side::Upper => at_plus,
        };
        if !ok {
            return Err(Error::Configuration(format!(
                "u_{n} does not vanish at the {} infinity assigned to it",
                if *side == Side::Lower { "negative" } else { "positive" }
            )));
        }
    }
    sided_route(k0, chain, sides, x, y, t, opts)
}

/// General polynomial mapping: `L_x L_y Σ_n w_n ∫ K₀ G̃(·, y; α_n) dz` plus the bound
/// states of created and preserved levels. `chain = None` returns `K₀`.
pub fn general_poly_kernel(
    k0: &dyn BaseKernel,
    chain: Option<&DarbouxChain>,
    x: f64,
    y: f64,
    t: ComplexTime,
    convention: PartialFractions,
    opts: TheoremOptions,
) -> Result<Complex64> {
    let Some(chain) = chain else {
        return k0.eval(x, y, t);
    };
    check_models(k0, chain)?;
    let model = chain.base_model();
    let spectrum = model.point_spectrum(crate::darboux::SPECTRUM_CHECK_LEVELS);
    let level_of = |alpha: f64| spectrum.iter().position(|e| (e - alpha).abs() <= 1e-12 * e.abs().max(1.0));
    let mut greens = Vec::with_capacity(chain.len());
    let mut bound = Vec::new();
    for (n, (&alpha, action)) in chain.alphas().iter().zip(chain.actions()).enumerate() {
        let level = level_of(alpha);
        let regularize = match (action, level) {
            (Action::RemoveLevel, Some(m)) => Some(m),
            (Action::RemoveLevel, None) => {
                return Err(Error::Configuration(format!("α_{n} = {alpha} is not a level of {model:?} and cannot be removed")))
            }
            (Action::CreateLevel, Some(_)) => {
                return Err(Error::Configuration(format!("α_{n} = {alpha} is already a level of {model:?}")))
            }
            (Action::CreateLevel, None) => {
                bound.push(n);
                None
            }
            (Action::Isospectral, Some(m)) => {
                bound.push(n);
                Some(m)
            }
            (Action::Isospectral, None) => None,
        };
        let g = match (model, regularize) {
            (BaseModel::FreeLine, None) => GreenFn::free(alpha)?,
            (BaseModel::Box, None) => GreenFn::box_at(alpha)?,
            (BaseModel::Box, Some(m)) => GreenFn::box_regularized(m),
            _ => {
                return Err(Error::Configuration(format!(
                    "no closed-form Green function for {model:?}; use the one-sided route"
                )))
            }
        };
        greens.push(g);
    }
    let weights = convention.weights(chain.alphas());
    let mut value = resolvent_route(k0, chain, &greens, &weights, x, y, t, opts)?;
    for n in bound {
        let v = |z: f64| kernel_solution(chain, n, z);
        let norm = norm_squared(chain, chain.alphas()[n], &v, opts.quad)?;
        value += v(x)? * v(y)? / norm * t.phase(chain.alphas()[n]);
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagators::base::{BoxKernel0, FreeKernel};
    use crate::propagators::closed::{
        intertwined_spectral_kernel, transparent_eigenfunction, transparent_propagator,
    };
    use crate::propagators::Kernel;

    fn wick(tau: f64) -> ComplexTime {
        ComplexTime::wick(tau).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    fn opts() -> TheoremOptions {
        TheoremOptions::default()
    }

    #[test]
    fn partial_fraction_conventions_differ_by_parity() {
        let a = [1.0, 3.0, 4.5];
        let w1 = PartialFractions::NMinusJ.weights(&a);
        let w2 = PartialFractions::JMinusN.weights(&a);
        for (x, y) in w1.iter().zip(&w2) {
            assert!((x - y).abs() < 1e-15);
        }
        let w1 = PartialFractions::NMinusJ.weights(&a[..2]);
        let w2 = PartialFractions::JMinusN.weights(&a[..2]);
        assert_eq!(w1, vec![-0.5, 0.5]);
        assert_eq!(w2, vec![0.5, -0.5]);
    }

    #[test]
    fn ground_removal_branches_agree_and_match_spectral_sum() {
        let chain = DarbouxChain::box_deletion(1).unwrap();
        let k0 = BoxKernel0::default();
        let t = wick(0.05);
        let lower = theorem2_kernel(&k0, &chain, 0.3, 0.6, t, Branch::Lower, opts()).unwrap();
        let upper = theorem2_kernel(&k0, &chain, 0.3, 0.6, t, Branch::Upper, opts()).unwrap();
        assert!(rel(lower, upper) < 1e-8, "{lower} vs {upper}");
        let spectral = intertwined_spectral_kernel(&chain, 0.3, 0.6, t, 200).unwrap();
        assert!(rel(lower, spectral) < 1e-6);
        let three = theorem3_kernel(&k0, &chain, 0.3, 0.6, t, Branch::Lower, opts()).unwrap();
        assert_eq!(three, lower);
        let wall = theorem2_kernel(&k0, &chain, 1e-3, 0.6, t, Branch::Lower, opts()).unwrap();
        assert!(wall.norm() < 1e-4 * lower.norm(), "{wall}");
        assert!(matches!(
            theorem2_kernel(&k0, &chain, 0.3, 1.0, t, Branch::Lower, opts()),
            Err(Error::Domain(_) | Error::Singularity(_))
        ));
    }

    #[test]
    fn theorem1_remove_ground_matches_theorem2() {
        let chain = DarbouxChain::box_deletion(1).unwrap();
        let k0 = BoxKernel0::default();
        let t = wick(0.05);
        let g = GreenFn::box_regularized(0);
        let k1 = theorem1_kernel(Theorem1Kind::RemoveGround, &k0, &g, &chain, 0.3, 0.6, t, opts()).unwrap();
        let k2 = theorem2_kernel(&k0, &chain, 0.3, 0.6, t, Branch::Upper, opts()).unwrap();
        assert!(rel(k1, k2) < 1e-6, "{k1} vs {k2}");
        let plain = GreenFn::box_at(1.0).unwrap();
        assert!(matches!(
            theorem1_kernel(Theorem1Kind::RemoveGround, &k0, &plain, &chain, 0.3, 0.6, t, opts()),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn deletion_of_two_box_levels() {
        let chain = DarbouxChain::box_deletion(2).unwrap();
        let k0 = BoxKernel0::default();
        let t = wick(0.05);
        for &(x, y) in &[(0.3, 0.6), (0.15, 0.2), (0.8, 0.45), (0.5, 0.5), (0.62, 0.91)] {
            let lower = theorem3_kernel(&k0, &chain, x, y, t, Branch::Lower, opts()).unwrap();
            let upper = theorem3_kernel(&k0, &chain, x, y, t, Branch::Upper, opts()).unwrap();
            assert!(rel(lower, upper) < 1e-7, "({x},{y}): {lower} vs {upper}");
            let spectral = intertwined_spectral_kernel(&chain, x, y, t, 200).unwrap();
            assert!(rel(lower, spectral) < 1e-5, "({x},{y}): {lower} vs {spectral}");
            let poly = general_poly_kernel(&k0, Some(&chain), x, y, t, PartialFractions::NMinusJ, opts()).unwrap();
            assert!(rel(poly, lower) < 1e-5, "({x},{y}): {poly} vs {lower}");
        }
    }

    fn cosh_chain(action: Action) -> DarbouxChain {
        DarbouxChain::new(BaseModel::FreeLine, vec![BasisFunction::cosh(1.0, 0.0).unwrap()], vec![action]).unwrap()
    }

    #[test]
    fn first_order_free_line_kinds_reproduce_the_transparent_kernel() {
        let t = wick(0.5);
        let g = GreenFn::free(-1.0).unwrap();
        let transparent = DarbouxChain::transparent(&[1.0]).unwrap();
        for &(x, y) in &[(0.0, 0.4), (1.2, -0.3), (-2.0, 1.5)] {
            let full = transparent_propagator(&transparent, x, y, t).unwrap();
            let bound = transparent_eigenfunction(&transparent, 0, x).unwrap()
                * transparent_eigenfunction(&transparent, 0, y).unwrap()
                * t.phase(-1.0);
            let iso = theorem1_kernel(Theorem1Kind::Isospectral, &FreeKernel, &g, &cosh_chain(Action::Isospectral), x, y, t, opts()).unwrap();
            assert!(rel(iso, full - bound) < 1e-5, "({x},{y}): {iso} vs {}", full - bound);
            let created = theorem1_kernel(Theorem1Kind::CreateLevel, &FreeKernel, &g, &cosh_chain(Action::CreateLevel), x, y, t, opts()).unwrap();
            assert!(rel(created, full) < 1e-5, "({x},{y}): {created} vs {full}");
        }
    }

    #[test]
    fn one_sided_exponential_is_isospectral_to_the_free_line() {
        // W(e^{ax}) gives V₁ = 0: every route must return K₀
        let t = wick(0.5);
        let up = BasisFunction::plane_exp(1, 1.0).unwrap();
        let chain = DarbouxChain::new(BaseModel::FreeLine, vec![up], vec![Action::Isospectral]).unwrap();
        let g = GreenFn::free(-1.0).unwrap();
        for &(x, y) in &[(0.0, 0.4), (1.2, -0.3), (-2.0, 1.5)] {
            let k0 = FreeKernel.eval(x, y, t).unwrap();
            let four = theorem4_kernel(&FreeKernel, &chain, &[Side::Lower], x, y, t, opts()).unwrap();
            let one = theorem1_kernel(Theorem1Kind::Isospectral, &FreeKernel, &g, &chain, x, y, t, opts()).unwrap();
            assert!(rel(four, one) < 1e-6, "{four} vs {one}");
            assert!(rel(four, k0) < 1e-6, "{four} vs {k0}");
        }
        assert!(matches!(
            theorem4_kernel(&FreeKernel, &chain, &[Side::Upper], 0.0, 0.0, t, opts()),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn mixed_sides() {
        let t = wick(0.5);
        let chain = DarbouxChain::new(
            BaseModel::FreeLine,
            vec![BasisFunction::plane_exp(1, 1.0).unwrap(), BasisFunction::plane_exp(-1, 2.0).unwrap()],
            vec![Action::Isospectral; 2],
        )
        .unwrap();
        for &(x, y) in &[(0.0, 0.4), (1.2, -0.3)] {
            let k = theorem4_kernel(&FreeKernel, &chain, &[Side::Lower, Side::Upper], x, y, t, opts()).unwrap();
            let k0 = FreeKernel.eval(x, y, t).unwrap();
            assert!(rel(k, k0) < 1e-6, "{k} vs {k0}");
        }
    }

    #[test]
    fn pure_creation_pair_matches_transparent_kernel() {
        let t = wick(0.5);
        let chain = DarbouxChain::transparent(&[1.0, 2.0]).unwrap();
        for &(x, y) in &[(0.0, 0.4), (1.2, -0.3), (-2.0, 1.5)] {
            let poly = general_poly_kernel(&FreeKernel, Some(&chain), x, y, t, PartialFractions::NMinusJ, opts()).unwrap();
            let closed = transparent_propagator(&chain, x, y, t).unwrap();
            assert!(rel(poly, closed) < 1e-5, "({x},{y}): {poly} vs {closed}");
        }
    }

    #[test]
    fn empty_chain_is_the_base_kernel() {
        let t = wick(0.5);
        let v = general_poly_kernel(&FreeKernel, None, 0.3, -0.2, t, PartialFractions::NMinusJ, opts()).unwrap();
        assert_eq!(v, FreeKernel.eval(0.3, -0.2, t).unwrap());
    }

    #[test]
    fn oscillator_has_no_resolvent_route() {
        let chain = DarbouxChain::oscillator_pair(2).unwrap();
        let r = general_poly_kernel(&crate::propagators::OscillatorKernel, Some(&chain), 0.1, 0.2, wick(0.5), PartialFractions::NMinusJ, opts());
        assert!(matches!(r, Err(Error::Configuration(_))));
    }
}
