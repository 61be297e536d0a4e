//! Crum–Krein transformation engine.
//!
//! A chain of transformation functions `u_0 … u_{N-1}` defines the intertwiner
//! `L f = W(u_0, …, u_{N-1}, f) / W(u_0, …, u_{N-1})`, the partner potential
//! `V_N = V_0 - 2 (ln W)''` and the kernel solutions `v_n = W_n / W`.

use num_complex::Complex64;
use std::collections::BTreeMap;

use crate::jets::{from_taylor, taylor_mul, taylor_reciprocal, to_taylor, BasisFunction, Jet, UnphysicalPartner};
use crate::linalg::SquareMatrix;
use crate::quad::Bound;
use crate::{Error, Result};

/// Solvable Hamiltonian the chain starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseModel {
    /// `V₀ = 0` on the real line.
    FreeLine,
    /// `V₀ = 0` on `(0, 1)` with Dirichlet walls.
    Box,
    /// `V₀ = x²/4` on the real line.
    Oscillator,
}

impl BaseModel {
    pub fn potential(&self, x: f64) -> f64 {
        match self {
            Self::Oscillator => x * x / 4.0,
            _ => 0.0,
        }
    }

    pub fn domain(&self) -> (Bound, Bound) {
        match self {
            Self::Box => (Bound::Finite(0.0), Bound::Finite(1.0)),
            _ => (Bound::NegInf, Bound::PosInf),
        }
    }

    /// Lowest `count` bound-state energies (the free line has none).
    pub fn point_spectrum(&self, count: usize) -> Vec<f64> {
        match self {
            Self::FreeLine => Vec::new(),
            Self::Box => (1..=count).map(|n| (n as f64 * std::f64::consts::PI).powi(2)).collect(),
            Self::Oscillator => (0..count).map(|k| k as f64 + 0.5).collect(),
        }
    }

    /// Normalised eigenfunction of the given level (0-based), if the model has one.
    pub fn eigenfunction(&self, level: usize) -> Option<(BasisFunction, f64)> {
        match self {
            Self::FreeLine => None,
            Self::Box => Some((BasisFunction::TrigBox { n: level as u32 + 1 }, 1.0)),
            Self::Oscillator => {
                // ∫ p_k² e^{-x²/2} = √(2π) k!
                let fact: f64 = (1..=level).map(|j| j as f64).product();
                let norm = ((2.0 * std::f64::consts::PI).sqrt() * fact).sqrt();
                Some((BasisFunction::HermiteGaussian { k: level as u32 }, 1.0 / norm))
            }
        }
    }

    /// Whether `x` lies strictly inside the domain.
    pub fn contains(&self, x: f64) -> bool {
        match self {
            Self::Box => x > 0.0 && x < 1.0,
            _ => x.is_finite(),
        }
    }

    /// Interior sample grid used for admissibility checks.
    pub fn working_grid(&self) -> Vec<f64> {
        match self {
            Self::Box => (1..2000).map(|i| i as f64 / 2000.0).collect(),
            _ => (0..=4000).map(|i| -10.0 + 20.0 * i as f64 / 4000.0).collect(),
        }
    }
}

/// Spectral effect of one transformation function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    RemoveLevel,
    CreateLevel,
    Isospectral,
}

/// Ordered transformation functions with their factorisation constants.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxChain {
    base_model: BaseModel,
    functions: Vec<BasisFunction>,
    alphas: Vec<f64>,
    actions: Vec<Action>,
}

/// Number of base-model levels checked against the spectral sign condition.
pub const SPECTRUM_CHECK_LEVELS: usize = 400;

impl DarbouxChain {
    /// Validated construction: distinct factorisation constants, the spectral sign
    /// condition and a nodeless Wronskian on the model's working grid.
    pub fn new(base_model: BaseModel, functions: Vec<BasisFunction>, actions: Vec<Action>) -> Result<Self> {
        let chain = Self::new_unchecked(base_model, functions, actions)?;
        let spectrum = base_model.point_spectrum(SPECTRUM_CHECK_LEVELS);
        if !check_usl(&spectrum, &chain.alphas) {
            return Err(Error::ConditionViolation(format!(
                "(E - α_0)…(E - α_{{N-1}}) < 0 for some level of {base_model:?} with α = {:?}",
                chain.alphas
            )));
        }
        if !check_nodeless(&chain.functions, &base_model.working_grid()) {
            return Err(Error::ConditionViolation(
                "Wronskian of the transformation functions has a node".into(),
            ));
        }
        Ok(chain)
    }

    /// Construction without the admissibility scan, for deliberately inadmissible
    /// chains. Still rejects empty chains, length mismatches and repeated constants.
    pub fn new_unchecked(base_model: BaseModel, functions: Vec<BasisFunction>, actions: Vec<Action>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::Argument("a chain needs at least one transformation function".into()));
        }
        if functions.len() != actions.len() {
            return Err(Error::Argument("one action per transformation function".into()));
        }
        let alphas: Vec<f64> = functions.iter().map(BasisFunction::energy).collect();
        for i in 0..alphas.len() {
            for j in 0..i {
                if alphas[i] == alphas[j] {
                    return Err(Error::Degenerate(format!(
                        "factorisation constants must be simple, α_{j} = α_{i} = {}",
                        alphas[i]
                    )));
                }
            }
        }
        Ok(Self { base_model, functions, alphas, actions })
    }

    /// Removes the lowest `levels` box levels with the eigenfunctions `√2 sin(nπx)`.
    pub fn box_deletion(levels: usize) -> Result<Self> {
        let functions = (1..=levels as u32).map(BasisFunction::trig_box).collect::<Result<Vec<_>>>()?;
        Self::new(BaseModel::Box, functions, vec![Action::RemoveLevel; levels])
    }

    /// Oscillator eigenfunction pair `(u_k, u_{k+1})`.
    pub fn oscillator_pair(k: u32) -> Result<Self> {
        Self::new(
            BaseModel::Oscillator,
            vec![BasisFunction::hermite_gaussian(k), BasisFunction::hermite_gaussian(k + 1)],
            vec![Action::RemoveLevel; 2],
        )
    }

    /// Reflectionless chain with bound states at `-a_n²`, `b_n = 0`.
    pub fn transparent(a: &[f64]) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = a.iter().map(|&a| (a, 0.0)).collect();
        Self::transparent_with_offsets(&pairs)
    }

    /// Reflectionless chain from `(a_n, b_n)` pairs. Wavenumbers are sorted
    /// ascending and alternate `cosh, sinh, cosh, …`, which keeps `W` nodeless.
    pub fn transparent_with_offsets(params: &[(f64, f64)]) -> Result<Self> {
        let mut sorted = params.to_vec();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Degenerate(format!("coincident wavenumbers a = {}", w[0].0)));
            }
        }
        let functions = sorted
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| if i % 2 == 0 { BasisFunction::cosh(a, b) } else { BasisFunction::sinh(a, b) })
            .collect::<Result<Vec<_>>>()?;
        let n = functions.len();
        Self::new(BaseModel::FreeLine, functions, vec![Action::CreateLevel; n])
    }

    pub fn base_model(&self) -> BaseModel {
        self.base_model
    }

    pub fn functions(&self) -> &[BasisFunction] {
        &self.functions
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Wavenumbers `a_n` of a free-line chain (`α_n = -a_n²`).
    pub fn wavenumbers(&self) -> Vec<f64> {
        self.alphas.iter().map(|a| (-a).max(0.0).sqrt()).collect()
    }

    /// Same chain with the transformation functions reordered.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::Argument("permutation length mismatch".into()));
        }
        let functions = order.iter().map(|&i| self.functions[i].clone()).collect();
        let actions = order.iter().map(|&i| self.actions[i]).collect();
        Self::new_unchecked(self.base_model, functions, actions)
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if self.base_model.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!("x = {x} is outside the open domain of {:?}", self.base_model)))
        }
    }
}

/// `W` and its derivatives `W', W'', …` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct WronskianJet {
    pub value: f64,
    pub derivs: Vec<f64>,
}

impl WronskianJet {
    /// `d^k W / dx^k` for `k = 0..=order`.
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            self.value
        } else {
            self.derivs[k - 1]
        }
    }
}

/// Derivative tables `jets[j][m] = u_j^{(m)}(x)`.
fn function_jets(functions: &[BasisFunction], x: f64, order: usize) -> Result<Vec<Vec<f64>>> {
    functions.iter().map(|f| f.derivs(x, order)).collect()
}

/// Determinant of the matrix whose row `r` holds the `rows[r]`-th derivatives.
fn det_rows(jets: &[Vec<f64>], rows: &[usize]) -> f64 {
    let n = rows.len();
    let mut m = SquareMatrix::zeros(n);
    for (r, &order) in rows.iter().enumerate() {
        for (c, jet) in jets.iter().enumerate() {
            m.set(r, c, jet[order]);
        }
    }
    m.determinant()
}

/// `d^k W` as a sum of determinants with raised rows (row-differentiation rule).
fn wronskian_derivs_from_jets(jets: &[Vec<f64>], deriv_order: usize) -> Vec<f64> {
    let n = jets.len();
    let mut terms: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    terms.insert((0..n).collect(), 1.0);
    let mut out = Vec::with_capacity(deriv_order + 1);
    for k in 0..=deriv_order {
        if k > 0 {
            let mut next: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            for (rows, coeff) in &terms {
                for i in 0..n {
                    let raised = rows[i] + 1;
                    if i + 1 < n && rows[i + 1] == raised {
                        continue;
                    }
                    let mut r = rows.clone();
                    r[i] = raised;
                    *next.entry(r).or_insert(0.0) += coeff;
                }
            }
            terms = next;
        }
        out.push(terms.iter().map(|(rows, c)| c * det_rows(jets, rows)).sum());
    }
    out
}

/// Wronskian of `functions` and its first `deriv_order` derivatives at `x`.
pub fn wronskian(functions: &[BasisFunction], x: f64, deriv_order: usize) -> Result<WronskianJet> {
    let n = functions.len();
    if n == 0 {
        return Ok(WronskianJet { value: 1.0, derivs: vec![0.0; deriv_order] });
    }
    let jets = function_jets(functions, x, n - 1 + deriv_order)?;
    if jets.iter().all(|j| j[0] == 0.0) {
        return Err(Error::Degenerate(format!("all transformation functions vanish at x = {x}")));
    }
    Ok(wronskian_from_jets(&jets, deriv_order))
}

fn wronskian_from_jets(jets: &[Vec<f64>], deriv_order: usize) -> WronskianJet {
    let all = wronskian_derivs_from_jets(jets, deriv_order);
    WronskianJet { value: all[0], derivs: all[1..].to_vec() }
}

/// Wronskian with the `omit`-th function removed (`W_n`); the empty Wronskian is 1.
pub fn minor_wronskian(functions: &[BasisFunction], omit: usize, x: f64, deriv_order: usize) -> Result<WronskianJet> {
    if omit >= functions.len() {
        return Err(Error::Argument(format!("omit index {omit} out of range for N = {}", functions.len())));
    }
    let rest: Vec<BasisFunction> = functions
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != omit)
        .map(|(_, f)| f.clone())
        .collect();
    // a minor may vanish at x without anything being singular
    if rest.is_empty() {
        return wronskian(&rest, x, deriv_order);
    }
    let jets = function_jets(&rest, x, rest.len() - 1 + deriv_order)?;
    Ok(wronskian_from_jets(&jets, deriv_order))
}

/// `V_N(x) = V₀(x) - 2 (W'' W - W'²) / W²`.
pub fn transformed_potential(chain: &DarbouxChain, x: f64) -> Result<f64> {
    chain.check_point(x)?;
    let w = wronskian(&chain.functions, x, 2)?;
    if w.value == 0.0 {
        return Err(Error::NodelessViolation { x });
    }
    let log_dd = (w.get(2) * w.value - w.get(1) * w.get(1)) / (w.value * w.value);
    Ok(chain.base_model.potential(x) - 2.0 * log_dd)
}

/// Coefficients of the Crum–Krein intertwiner at one point, `L = Σ_k c_k ∂^k`
/// with `c_N = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Intertwiner {
    pub x: f64,
    pub coeffs: Vec<f64>,
}

impl Intertwiner {
    /// Expands `W(u_0, …, u_{N-1}, f)` along its last column.
    pub fn at(functions: &[BasisFunction], x: f64) -> Result<Self> {
        let n = functions.len();
        let jets = function_jets(functions, x, n)?;
        let w = det_rows(&jets, &(0..n).collect::<Vec<_>>());
        if w == 0.0 {
            return Err(Error::NodelessViolation { x });
        }
        let coeffs = (0..=n)
            .map(|k| {
                let rows: Vec<usize> = (0..=n).filter(|&r| r != k).collect();
                let sign = if (k + n) % 2 == 0 { 1.0 } else { -1.0 };
                sign * det_rows(&jets, &rows) / w
            })
            .collect();
        Ok(Self { x, coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `L f` from the derivatives `f, f', …` (at least `N + 1` of them).
    pub fn apply(&self, derivs: &[Complex64]) -> Complex64 {
        assert!(derivs.len() > self.order(), "jet too short for an order-{} intertwiner", self.order());
        self.coeffs.iter().zip(derivs).map(|(c, d)| d * c).sum()
    }

    pub fn apply_real(&self, derivs: &[f64]) -> f64 {
        assert!(derivs.len() > self.order(), "jet too short for an order-{} intertwiner", self.order());
        self.coeffs.iter().zip(derivs).map(|(c, d)| c * d).sum()
    }
}

/// Anything that can supply a derivative jet at a point.
pub trait JetSource {
    fn jet(&self, x: f64, order: usize) -> Result<Jet>;
}

impl JetSource for BasisFunction {
    fn jet(&self, x: f64, order: usize) -> Result<Jet> {
        Ok(Jet::from_real(x, &self.derivs(x, order)?))
    }
}

impl JetSource for UnphysicalPartner {
    fn jet(&self, x: f64, order: usize) -> Result<Jet> {
        self.as_basis().jet(x, order)
    }
}

impl<F> JetSource for F
where
    F: Fn(f64, usize) -> Result<Jet>,
{
    fn jet(&self, x: f64, order: usize) -> Result<Jet> {
        self(x, order)
    }
}

/// `L f (x) = W(u_0, …, u_{N-1}, f) / W(u_0, …, u_{N-1})`.
pub fn apply_intertwiner(chain: &DarbouxChain, f: &dyn JetSource, x: f64) -> Result<Complex64> {
    chain.check_point(x)?;
    let l = Intertwiner::at(&chain.functions, x)?;
    let jet = f.jet(x, chain.len())?;
    Ok(l.apply(&jet.derivs))
}

/// `v_n = W_n / W`, a solution of `h_N v = α_n v`.
pub fn kernel_solution(chain: &DarbouxChain, n: usize, x: f64) -> Result<f64> {
    chain.check_point(x)?;
    let w = wronskian(&chain.functions, x, 0)?.value;
    if w == 0.0 {
        return Err(Error::NodelessViolation { x });
    }
    Ok(minor_wronskian(&chain.functions, n, x, 0)?.value / w)
}

/// `v_n = W_n / W` with its first `order` derivatives.
pub fn kernel_solution_derivs(functions: &[BasisFunction], n: usize, x: f64, order: usize) -> Result<Vec<f64>> {
    let w = wronskian(functions, x, order)?;
    if w.value == 0.0 {
        return Err(Error::NodelessViolation { x });
    }
    let wn = minor_wronskian(functions, n, x, order)?;
    let num: Vec<f64> = (0..=order).map(|k| wn.get(k)).collect();
    let den: Vec<f64> = (0..=order).map(|k| w.get(k)).collect();
    let q = taylor_mul(&to_taylor(&num), &taylor_reciprocal(&to_taylor(&den)));
    Ok(from_taylor(&q))
}

/// `N_m = [∏ (E - α_i)]^{-1/2}`.
pub fn normalization_constant(energy: f64, alphas: &[f64]) -> Result<f64> {
    let p: f64 = alphas.iter().map(|a| energy - a).product();
    if p > 0.0 {
        Ok(p.powf(-0.5))
    } else {
        Err(Error::ConditionViolation(format!(
            "∏(E - α_i) = {p} is not positive at E = {energy}"
        )))
    }
}

/// `(E - α_0)…(E - α_{N-1}) ≥ 0` for every listed level (exact coincidences count
/// as zero).
pub fn check_usl(point_spectrum: &[f64], alphas: &[f64]) -> bool {
    point_spectrum.iter().all(|&e| {
        let mut negative = false;
        for &a in alphas {
            let d = e - a;
            if d.abs() <= 1e-12 * e.abs().max(1.0) {
                return true;
            }
            if d < 0.0 {
                negative = !negative;
            }
        }
        !negative
    })
}

/// Whether `W` keeps one sign and stays away from zero across `grid`, with local
/// refinement wherever `|W|` dips below `1e-10` of its Hadamard bound (the product of
/// the column norms of the Wronskian matrix), which tracks exponential growth or
/// decay of the functions themselves.
pub fn check_nodeless(functions: &[BasisFunction], grid: &[f64]) -> bool {
    let n = functions.len();
    if n == 0 {
        return true;
    }
    let w_at = |x: f64| -> (f64, f64) {
        let Ok(jets) = function_jets(functions, x, n - 1) else {
            return (0.0, 1.0);
        };
        let hadamard: f64 = jets.iter().map(|j| j.iter().map(|v| v * v).sum::<f64>().sqrt()).product();
        let w = wronskian_from_jets(&jets, 0).value;
        (w, if hadamard > 0.0 { w.abs() / hadamard } else { 0.0 })
    };
    let all: Vec<(f64, f64)> = grid.iter().map(|&x| w_at(x)).collect();
    // at the ends of the grid W may decay into the rounding level of the
    // determinant (Dirichlet walls); its sign there carries no information
    let noise = |p: &(f64, f64)| p.1 < 1e-12;
    let first = all.iter().position(|p| !noise(p)).unwrap_or(all.len());
    let last = all.iter().rposition(|p| !noise(p)).map_or(first, |i| i + 1);
    if first >= last {
        return false;
    }
    let grid = &grid[first..last];
    let values = &all[first..last];
    if values.iter().any(|(v, _)| *v == 0.0 || !v.is_finite()) {
        return false;
    }
    let sign = values[0].0.signum();
    if values.iter().any(|(v, _)| v.signum() != sign) {
        return false;
    }
    for i in 0..grid.len().saturating_sub(1) {
        if values[i].1.min(values[i + 1].1) < 1e-10 && !refine_interval(&w_at, grid[i], grid[i + 1], sign, 4) {
            return false;
        }
    }
    true
}

fn refine_interval(w_at: &dyn Fn(f64) -> (f64, f64), a: f64, b: f64, sign: f64, depth: u32) -> bool {
    let samples = 32;
    let vals: Vec<(f64, (f64, f64))> = (0..=samples)
        .map(|i| {
            let x = a + (b - a) * i as f64 / samples as f64;
            (x, w_at(x))
        })
        .collect();
    if vals.iter().any(|(_, (v, _))| *v == 0.0 || v.signum() != sign) {
        return false;
    }
    // descend into the sub-interval holding the smallest relative |W|
    let (k, _) = vals
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .1 .1.total_cmp(&y.1 .1 .1))
        .expect("samples");
    if depth == 0 {
        // a minimum pinned to the end of the interval is decay towards a wall
        return k == 0 || k == samples || vals[k].1 .1 > 1e-14;
    }
    let lo = vals[k.saturating_sub(1)].0;
    let hi = vals[(k + 1).min(samples)].0;
    refine_interval(w_at, lo, hi, sign, depth - 1)
}

/// Outcome of [`chain_compose_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComposeReport {
    pub ok: bool,
    /// Largest relative deviation between the direct and the step-by-step intertwiner.
    pub sequential_deviation: f64,
    /// Largest relative deviation across reorderings of the chain.
    pub permutation_deviation: f64,
    pub details: Vec<String>,
}

/// `L_{N,0} f` evaluated as the product of first-order steps `L_{k+1,k}`, each built
/// from the transformed function `u_{k,k} = L_{k,0} u_k`.
pub fn sequential_intertwiner(functions: &[BasisFunction], f: &BasisFunction, x: f64) -> Result<f64> {
    let n = functions.len();
    // Taylor jets long enough to survive n differentiations
    let len = n + 1;
    let mut work: Vec<Vec<f64>> = functions
        .iter()
        .map(|u| u.derivs(x, len - 1).map(|d| to_taylor(&d)))
        .collect::<Result<_>>()?;
    let mut target = to_taylor(&f.derivs(x, len - 1)?);
    for k in 0..n {
        let v = work[k].clone();
        if v[0] == 0.0 {
            return Err(Error::NodelessViolation { x });
        }
        let log_d = taylor_mul(&taylor_derivative(&v), &taylor_reciprocal(&v));
        let step = |g: &[f64]| -> Vec<f64> {
            let dg = taylor_derivative(g);
            let prod = taylor_mul(&log_d, g);
            dg.iter().zip(&prod).map(|(a, b)| a - b).collect()
        };
        for w in work.iter_mut().skip(k + 1) {
            *w = step(w);
        }
        target = step(&target);
    }
    Ok(target[0])
}

fn taylor_derivative(t: &[f64]) -> Vec<f64> {
    (1..t.len()).map(|i| t[i] * i as f64).collect()
}

/// Checks the composition rule (direct `N`-th order intertwiner versus first-order
/// steps) and invariance under reordering of the transformation functions.
pub fn chain_compose_check(chain: &DarbouxChain, f: &BasisFunction, points: &[f64], tol: f64) -> Result<ComposeReport> {
    let mut report = ComposeReport { ok: true, sequential_deviation: 0.0, permutation_deviation: 0.0, details: Vec::new() };
    if chain.len() < 2 {
        return Ok(report);
    }
    let n = chain.len();
    let reversed: Vec<usize> = (0..n).rev().collect();
    let rotated: Vec<usize> = (1..n).chain(std::iter::once(0)).collect();
    let perms = [chain.permuted(&reversed)?, chain.permuted(&rotated)?];
    for &x in points {
        let direct = apply_intertwiner(chain, f, x)?.re;
        let scale = direct.abs().max(1e-300);
        let seq = sequential_intertwiner(chain.functions(), f, x)?;
        let d = (seq - direct).abs() / scale;
        report.sequential_deviation = report.sequential_deviation.max(d);
        if d > tol {
            report.ok = false;
            report.details.push(format!("x = {x}: sequential {seq} vs direct {direct}"));
        }
        for p in &perms {
            let other = apply_intertwiner(p, f, x)?.re;
            let d = (other - direct).abs() / scale;
            report.permutation_deviation = report.permutation_deviation.max(d);
            if d > tol {
                report.ok = false;
                report.details.push(format!("x = {x}: permuted {other} vs direct {direct}"));
            }
        }
    }
    Ok(report)
}

/// Both sides of the Wronskian-fraction representation of the auxiliary solutions
/// `u_{N,n} = L_{N,0} ũ_{0,n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixPair {
    /// `L_{N,0} ũ_{0,n}` with `ũ` built by quadrature from `x₀`.
    pub intertwined: Complex64,
    /// `C_{N,n} W_n / W`.
    pub wronskian_fraction: f64,
    pub x0: f64,
}

/// Evaluates `u_{N,n}` both through the intertwiner acting on the unphysical partner
/// and through `C_{N,n} W_n/W`, `C_{N,n} = ∏_{j>n}(E_j - E_n) ∏_{j<n}(E_n - E_j)`.
///
/// The second product comes from reducing `W(u_0, …, u_{N-1}, ũ_n)` with the
/// Schrödinger equation; it is 1 for `n = 0`.
///
/// `x0` defaults to the midpoint between the nodes of `u_{0,n}` that bracket `x`.
pub fn appendix_un(chain: &DarbouxChain, n: usize, x0: Option<f64>, x: f64) -> Result<AppendixPair> {
    chain.check_point(x)?;
    if n >= chain.len() {
        return Err(Error::Argument(format!("index {n} out of range for N = {}", chain.len())));
    }
    let u = &chain.functions[n];
    let x0 = match x0 {
        Some(v) => v,
        None => bracketing_midpoint(chain.base_model, u, x)?,
    };
    let partner = UnphysicalPartner::new(u.clone(), x0);
    let intertwined = apply_intertwiner(chain, &partner, x)?;
    let above: f64 = chain.alphas[n + 1..].iter().map(|e| e - chain.alphas[n]).product();
    let below: f64 = chain.alphas[..n].iter().map(|e| chain.alphas[n] - e).product();
    let c = above * below;
    let fraction = c * kernel_solution(chain, n, x)?;
    Ok(AppendixPair { intertwined, wronskian_fraction: fraction, x0 })
}

fn bracketing_midpoint(model: BaseModel, u: &BasisFunction, x: f64) -> Result<f64> {
    let value = |y: f64| u.derivs(y, 0).map(|d| d[0]);
    let v = value(x)?;
    if v == 0.0 {
        return Err(Error::Singularity(format!("x = {x} is a node of the transformation function")));
    }
    let (lo_lim, hi_lim) = match model {
        BaseModel::Box => (0.0, 1.0),
        _ => (x - 20.0, x + 20.0),
    };
    let find = |limit: f64| -> Result<f64> {
        let steps = 4000;
        let mut prev = x;
        for i in 1..=steps {
            let y = x + (limit - x) * i as f64 / steps as f64;
            let vy = value(y)?;
            if vy == 0.0 {
                return Ok(y);
            }
            if vy.signum() != v.signum() {
                let (mut a, mut b) = (prev, y);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if value(m)?.signum() == v.signum() {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                return Ok(0.5 * (a + b));
            }
            prev = y;
        }
        Ok(limit)
    };
    Ok(0.5 * (find(lo_lim)? + find(hi_lim)?))
}
