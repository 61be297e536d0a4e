//! Numerical integration of complex-valued integrands.
//!
//! Finite pieces use globally adaptive 21-point Gauss–Kronrod; semi-infinite tails
//! use the exp-sinh (double exponential) substitution `z = a ± exp(π/2 · sinh s)`,
//! truncated once the integrand contribution falls below 1e-16 of the running sum.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];
// Gauss weights for XGK[1], XGK[3], …, XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Tolerances and limits for one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-12, max_intervals: 4000 }
    }
}

impl QuadOptions {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self { abs_tol, ..Self::default() }
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

/// Integral estimate with its error bound and the number of integrand calls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Integration limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    NegInf,
    Finite(f64),
    PosInf,
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut abs_sum = fc.norm() * WGK[10];
    let mut vals = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        vals[j] = (f1, f2);
        kron += (f1 + f2) * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut asc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        asc += WGK[j] * ((vals[j].0 - mean).norm() + (vals[j].1 - mean).norm());
    }
    let value = kron * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kron - gauss) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err, res_abs)
}

/// Globally adaptive Gauss–Kronrod integration over the finite interval `[a, b]`.
pub fn gauss_kronrod<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Quadrature>
where
    F: FnMut(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Argument(format!("finite limits required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Quadrature { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 });
    }
    let mut evaluations = 21;
    let (value, error, abs) = kronrod21(&mut f, a, b);
    if !value.is_finite() {
        return Err(Error::Convergence(format!("non-finite integrand on [{a}, {b}]")));
    }
    let mut total = value;
    let mut total_err = error;
    let mut total_abs = abs;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error, abs });
    let mut frozen_err = 0.0;
    let mut frozen_value = Complex64::new(0.0, 0.0);
    let min_width = 1e-14 * (b - a).abs().max(a.abs().max(b.abs()) * 1e-2);

    // nothing below the rounding level of ∫|f| can be resolved
    let target = |v: Complex64, abs: f64| opts.target(v).max(100.0 * f64::EPSILON * abs);
    while total_err + frozen_err > target(total, total_abs) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::Convergence(format!(
                "Gauss-Kronrod on [{a}, {b}]: error {:.3e} after {} intervals",
                total_err + frozen_err,
                heap.len()
            )));
        }
        let Some(worst) = heap.pop() else { break };
        if (worst.b - worst.a).abs() < min_width {
            // cannot refine further; keep its contribution
            frozen_err += worst.error;
            frozen_value += worst.value;
            total_err -= worst.error;
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1, a1) = kronrod21(&mut f, worst.a, mid);
        let (v2, e2, a2) = kronrod21(&mut f, mid, worst.b);
        evaluations += 42;
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::Convergence(format!(
                "non-finite integrand on [{}, {}]",
                worst.a, worst.b
            )));
        }
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_abs += a1 + a2 - worst.abs;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1, abs: a1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2, abs: a2 });
    }
    // re-sum to shed accumulated update round-off
    let value = heap.iter().map(|s| s.value).sum::<Complex64>() + frozen_value;
    let error = heap.iter().map(|s| s.error).sum::<f64>() + frozen_err;
    if error > target(value, total_abs) {
        return Err(Error::Convergence(format!(
            "Gauss-Kronrod on [{a}, {b}]: interval width limit reached with error {error:.3e}"
        )));
    }
    Ok(Quadrature { value, error, evaluations })
}

/// Exp-sinh quadrature of `∫_a^{±∞} f`, `direction` = +1 or -1.
pub fn exp_sinh<F>(mut f: F, a: f64, direction: f64, opts: QuadOptions) -> Result<Quadrature>
where
    F: FnMut(f64) -> Complex64,
{
    let dir = direction.signum();
    // z - a = exp(π/2 sinh s), dz = π/2 cosh s · exp(π/2 sinh s) ds
    let mut eval = |s: f64| -> Complex64 {
        let e = (FRAC_PI_2 * s.sinh()).exp();
        if e == 0.0 || !e.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        let w = FRAC_PI_2 * s.cosh() * e;
        let v = f(a + dir * e);
        if v == Complex64::new(0.0, 0.0) {
            v
        } else {
            v * w
        }
    };
    let mut evaluations = 0usize;
    // sum over s = k·h for the given parity pattern, walking outwards until negligible
    let mut sweep = |h: f64, odd_only: bool, eval: &mut dyn FnMut(f64) -> Complex64| {
        let mut sum = Complex64::new(0.0, 0.0);
        let step = if odd_only { 2 } else { 1 };
        let start = if odd_only { 1 } else { 0 };
        if !odd_only {
            sum += eval(0.0);
            evaluations += 1;
        }
        for sign in [1.0, -1.0] {
            let mut k = if odd_only { start } else { 1 };
            let mut small = 0;
            while k < 4000 {
                let s = sign * k as f64 * h;
                let v = eval(s);
                evaluations += 1;
                sum += v;
                if v.norm() <= 1e-16 * sum.norm().max(opts.abs_tol * 1e-6) {
                    small += 1;
                    if small >= 2 {
                        break;
                    }
                } else {
                    small = 0;
                }
                if s.abs() > 6.5 {
                    break;
                }
                k += step;
            }
        }
        sum
    };
    let mut h = 0.5;
    let mut raw = sweep(h, false, &mut eval);
    let mut estimate = raw * h;
    for _level in 0..9 {
        h *= 0.5;
        raw += sweep(h, true, &mut eval);
        let next = raw * h;
        let diff = (next - estimate).norm();
        estimate = next;
        if !estimate.is_finite() {
            return Err(Error::Convergence("non-finite integrand in semi-infinite tail".into()));
        }
        if diff <= opts.target(estimate) * 0.1 {
            return Ok(Quadrature { value: estimate * dir, error: diff, evaluations });
        }
    }
    Err(Error::Convergence(format!(
        "exp-sinh tail from {a} did not converge (last estimate {estimate})"
    )))
}

/// Integrates over `(lower, upper)`, splitting at the interior `breakpoints`.
///
/// Finite pieces use Gauss–Kronrod; an infinite end is handled with an exp-sinh
/// tail starting at the outermost finite point (the nearest breakpoint).
pub fn integrate<F>(mut f: F, lower: Bound, upper: Bound, breakpoints: &[f64], opts: QuadOptions) -> Result<Quadrature>
where
    F: FnMut(f64) -> Complex64,
{
    let lo = match lower {
        Bound::Finite(v) => Some(v),
        Bound::NegInf => None,
        Bound::PosInf => return Err(Error::Argument("lower limit +inf".into())),
    };
    let hi = match upper {
        Bound::Finite(v) => Some(v),
        Bound::PosInf => None,
        Bound::NegInf => return Err(Error::Argument("upper limit -inf".into())),
    };
    if let (Some(l), Some(h)) = (lo, hi) {
        if h < l {
            let r = integrate(f, Bound::Finite(h), Bound::Finite(l), breakpoints, opts)?;
            return Ok(Quadrature { value: -r.value, ..r });
        }
    }
    let mut points: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|p| p.is_finite() && lo.is_none_or(|l| *p > l) && hi.is_none_or(|h| *p < h))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    if let Some(l) = lo {
        points.insert(0, l);
    }
    if let Some(h) = hi {
        points.push(h);
    }
    if points.is_empty() {
        points.push(0.0);
    }
    // split the tolerance budget over the pieces
    let pieces = points.len() + 1;
    let piece_opts = QuadOptions { abs_tol: opts.abs_tol / pieces as f64, ..opts };
    let mut total = Quadrature { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 };
    let mut add = |q: Quadrature| {
        total.value += q.value;
        total.error += q.error;
        total.evaluations += q.evaluations;
    };
    if lo.is_none() {
        let q = exp_sinh(&mut f, points[0], -1.0, piece_opts)?;
        add(Quadrature { value: -q.value, ..q });
    }
    for w in points.windows(2) {
        add(gauss_kronrod(&mut f, w[0], w[1], piece_opts)?);
    }
    if hi.is_none() {
        add(exp_sinh(&mut f, *points.last().expect("non-empty"), 1.0, piece_opts)?);
    }
    Ok(total)
}

/// [`integrate`] for integrands that can fail; the first error aborts the integral.
pub fn integrate_fallible<F>(mut f: F, lower: Bound, upper: Bound, breakpoints: &[f64], opts: QuadOptions) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mut failure: Option<Error> = None;
    let q = integrate(
        |z| {
            if failure.is_some() {
                return Complex64::new(0.0, 0.0);
            }
            match f(z) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        lower,
        upper,
        breakpoints,
        opts,
    );
    match failure {
        Some(e) => Err(e),
        None => q,
    }
}

/// Real-valued convenience wrapper around [`gauss_kronrod`].
pub fn gauss_kronrod_real<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    Ok(gauss_kronrod(|x| Complex64::new(f(x), 0.0), a, b, opts)?.value.re)
}
