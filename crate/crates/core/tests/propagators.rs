use std::f64::consts::PI;

use proptest::prelude::*;
use susy_core::darboux::{transformed_potential, Action, BaseModel, DarbouxChain};
use susy_core::jets::BasisFunction;
use susy_core::oracle::{delta_sequence_check, schrodinger_residual};
use susy_core::propagators::{
    box_green, box_propagator0, box_removed_ground_kernel, free_green, free_propagator, general_poly_kernel,
    intertwined_spectral_kernel, oscillator_generating_s, oscillator_pair_kernel, oscillator_propagator,
    spectral_green, theorem1_kernel, theorem2_kernel, theorem3_kernel, theorem4_kernel, transparent_eigenfunction,
    transparent_i, transparent_k1_route, transparent_propagator, AnalyticEigenbasis, BoxKernel0, Branch,
    ClosedKernel, ComplexTime, FreeKernel, GreenFn, Kernel, OscillatorKernel, PartialFractions, Side, Theorem1Kind,
    TheoremOptions,
};
use susy_core::quad::{integrate, Bound, QuadOptions};
use susy_core::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn wick(tau: f64) -> ComplexTime {
    ComplexTime::wick(tau).unwrap()
}

fn line_integral(f: impl FnMut(f64) -> Complex64, a: f64, b: f64) -> Complex64 {
    let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 4000 };
    integrate(f, Bound::Finite(a), Bound::Finite(b), &[], opts).unwrap().value
}

fn opts() -> TheoremOptions {
    TheoremOptions::default()
}

#[test]
fn free_kernel() {
    let k = free_propagator(0.4, 0.4, wick(1.0)).unwrap();
    assert!((k - c((4.0 * PI).powf(-0.5))).norm() < 1e-15);
    let mass = line_integral(|y| free_propagator(0.3, y, wick(0.5)).unwrap(), -20.0, 20.0);
    assert!((mass - 1.0).norm() <= 1e-10);
    let ck = line_integral(|z| free_propagator(0.3, z, wick(0.25)).unwrap() * free_propagator(z, -0.5, wick(0.25)).unwrap(), -20.0, 20.0);
    assert!(rel(ck, free_propagator(0.3, -0.5, wick(0.5)).unwrap()) <= 1e-8);
    assert!(free_propagator(0.0, 0.0, ComplexTime::new(0.0, 0.0).unwrap()).is_err());
}

#[test]
fn free_green_function() {
    assert!((free_green(0.7, 0.7, c(-1.0)).unwrap() - 0.5).norm() < 1e-15);
    assert!((free_green(0.2, 1.2, c(-4.0)).unwrap() - (-2.0f64).exp() / 4.0).norm() < 1e-15);
    // ∫ G(x, y) (-f'' + f) dy = f(x) for a bump f
    let f = |y: f64| if y.abs() < 1.0 { (-1.0 / (1.0 - y * y)).exp() } else { 0.0 };
    let f2 = |y: f64| {
        let d = 1.0 - y * y;
        let g1 = -2.0 * y / (d * d);
        let g2 = -2.0 / (d * d) - 8.0 * y * y / (d * d * d);
        f(y) * (g1 * g1 + g2)
    };
    let x = 0.3;
    let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 4000 };
    let v = integrate(|y| free_green(x, y, c(-1.0)).unwrap() * (-f2(y) + f(y)), Bound::Finite(-1.0), Bound::Finite(1.0), &[x], opts)
        .unwrap()
        .value;
    assert!((v.re - f(x)).abs() <= 1e-6);
}

#[test]
fn oscillator_kernel() {
    let tau = 1e-4;
    let r = oscillator_propagator(0.3, 0.3, wick(tau)).unwrap() / free_propagator(0.3, 0.3, wick(tau)).unwrap();
    assert!((r - 1.0).norm() <= 1e-3);
    let trace = line_integral(|x| oscillator_propagator(x, x, wick(1.0)).unwrap(), -30.0, 30.0);
    assert!((trace.re - 1.0 / (2.0 * 0.5f64.sinh())).abs() <= 1e-8);
    let a = oscillator_propagator(0.3, -1.1, ComplexTime::new(0.4, 0.2).unwrap()).unwrap();
    let b = oscillator_propagator(-1.1, 0.3, ComplexTime::new(0.4, 0.2).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn box_kernel() {
    let t = wick(0.05);
    assert_eq!(box_propagator0(0.0, 0.4, t).unwrap_or(c(0.0)), c(0.0));
    let k = box_propagator0(0.5, 0.5, t).unwrap();
    let sum: f64 = (1..=400).map(|n| 2.0 * (n as f64 * PI / 2.0).sin().powi(2) * (-((n * n) as f64) * PI * PI * 0.05).exp()).sum();
    assert!((k.re - sum).abs() <= 1e-10 * sum);
    let a = box_propagator0(0.2, 0.7, t).unwrap();
    let b = box_propagator0(0.8, 0.3, t).unwrap();
    assert!(rel(a, b) <= 1e-13);
}

#[test]
fn spectral_and_closed_box_green() {
    let eigs = AnalyticEigenbasis::Box { levels: 4_000_000 };
    let g = spectral_green(&eigs, 0.5, 0.5, c(-1.0), None).unwrap();
    let closed = box_green(0.5, 0.5, c(-1.0)).unwrap();
    let two = (0.5f64.sinh() * 0.5f64.sinh()) / 1f64.sinh();
    assert!((closed.re - two).abs() < 1e-14);
    assert!(rel(g, closed) <= 1e-6);
    let a = spectral_green(&AnalyticEigenbasis::Box { levels: 200 }, 0.2, 0.6, c(3.0), None).unwrap();
    let b = spectral_green(&AnalyticEigenbasis::Box { levels: 200 }, 0.6, 0.2, c(3.0), None).unwrap();
    assert_eq!(a, b);
    let reg = spectral_green(&AnalyticEigenbasis::Box { levels: 200 }, 0.3, 0.6, c(PI * PI), Some(0)).unwrap();
    assert!(reg.is_finite());
}

#[test]
fn first_order_routes_agree() {
    let t = wick(0.05);
    let chain = DarbouxChain::box_deletion(1).unwrap();
    let k0 = BoxKernel0::default();
    let t2 = theorem2_kernel(&k0, &chain, 0.3, 0.6, t, Branch::Lower, opts()).unwrap();
    let t2u = theorem2_kernel(&k0, &chain, 0.3, 0.6, t, Branch::Upper, opts()).unwrap();
    assert!(rel(t2, t2u) <= 1e-8);
    let t1 = theorem1_kernel(Theorem1Kind::RemoveGround, &k0, &GreenFn::box_regularized(0), &chain, 0.3, 0.6, t, opts()).unwrap();
    assert!(rel(t1, t2) <= 1e-6, "{t1} vs {t2}");
    let closed = box_removed_ground_kernel(0.3, 0.6, t).unwrap();
    assert!(rel(closed, t2) <= 1e-7);
    let spectral = intertwined_spectral_kernel(&chain, 0.3, 0.6, t, 200).unwrap();
    assert!(rel(spectral, t2) <= 1e-6);
    let t3 = theorem3_kernel(&k0, &chain, 0.3, 0.6, t, Branch::Lower, opts()).unwrap();
    assert!(rel(t3, t2) <= 1e-12);
    // partner states vanish like x² at the wall
    let near = theorem2_kernel(&k0, &chain, 1e-2, 0.6, t, Branch::Lower, opts()).unwrap();
    let nearer = theorem2_kernel(&k0, &chain, 1e-3, 0.6, t, Branch::Lower, opts()).unwrap();
    assert!(nearer.norm() <= 2e-2 * near.norm() && near.norm() <= 1e-2 * t2.norm());
}

#[test]
fn level_creation_on_the_free_line() {
    let t = wick(0.5);
    let chain = DarbouxChain::new(BaseModel::FreeLine, vec![BasisFunction::cosh(1.0, 0.0).unwrap()], vec![Action::CreateLevel]).unwrap();
    for (x, y) in [(0.0, 0.4), (1.2, -0.3), (-2.0, 1.5)] {
        let k = theorem1_kernel(Theorem1Kind::CreateLevel, &FreeKernel, &GreenFn::free(-1.0).unwrap(), &chain, x, y, t, opts()).unwrap();
        let closed = transparent_propagator(&chain, x, y, t).unwrap();
        assert!(rel(k, closed) <= 1e-5);
    }
}

#[test]
fn two_level_deletion_matches_spectral_sum() {
    let t = wick(0.05);
    let chain = DarbouxChain::box_deletion(2).unwrap();
    let k0 = BoxKernel0::default();
    for (x, y) in [(0.3, 0.6), (0.15, 0.2), (0.8, 0.45)] {
        let k = theorem3_kernel(&k0, &chain, x, y, t, Branch::Upper, opts()).unwrap();
        let s = intertwined_spectral_kernel(&chain, x, y, t, 200).unwrap();
        assert!(rel(k, s) <= 1e-5);
    }
}

#[test]
fn one_sided_mixed_chain() {
    let chain = DarbouxChain::new(
        BaseModel::FreeLine,
        vec![BasisFunction::plane_exp(1, 1.0).unwrap(), BasisFunction::plane_exp(-1, 2.0).unwrap()],
        vec![Action::Isospectral; 2],
    )
    .unwrap();
    struct Mixed(DarbouxChain);
    impl Kernel for Mixed {
        fn eval(&self, x: f64, y: f64, t: ComplexTime) -> susy_core::Result<Complex64> {
            theorem4_kernel(&FreeKernel, &self.0, &[Side::Lower, Side::Upper], x, y, t, TheoremOptions::default())
        }
        fn base_model(&self) -> BaseModel {
            BaseModel::FreeLine
        }
        fn method(&self) -> susy_core::propagators::Method {
            susy_core::propagators::Method::TheoremQuadrature
        }
        fn chain(&self) -> Option<&DarbouxChain> {
            Some(&self.0)
        }
    }
    let k = Mixed(chain.clone());
    let v = |x: f64| transformed_potential(&chain, x).unwrap();
    for (x, y) in [(0.3, -0.2), (-0.5, 0.7), (1.0, 0.1), (0.0, 0.0), (-1.2, -0.4)] {
        let r = schrodinger_residual(&k, &v, x, y, 0.5, 1e-3, true).unwrap();
        assert!(r <= 1e-4, "({x}, {y}): {r}");
    }
    let f = |x: f64| if x.abs() < 1.0 { (-1.0 / (1.0 - x * x)).exp() } else { 0.0 };
    let report = delta_sequence_check(&k, &f, (-1.0, 1.0), 0.2, &[1e-3, 5e-4, 2.5e-4]).unwrap();
    assert!(report.slope >= 0.9, "{report:?}");
    assert!(report.errors[0] <= 1e-2);
}

#[test]
fn general_mapping_degenerations() {
    let t = wick(0.5);
    let k = general_poly_kernel(&FreeKernel, None, 0.3, -0.4, t, PartialFractions::NMinusJ, opts()).unwrap();
    assert_eq!(k, free_propagator(0.3, -0.4, t).unwrap());
    let chain = DarbouxChain::transparent(&[1.0, 2.0]).unwrap();
    let a = general_poly_kernel(&FreeKernel, Some(&chain), 0.3, -0.4, t, PartialFractions::NMinusJ, opts()).unwrap();
    assert!(rel(a, transparent_propagator(&chain, 0.3, -0.4, t).unwrap()) <= 1e-5);
}

#[test]
fn transparent_integral_against_quadrature() {
    let (a, x, y) = (1.0, 0.5, -0.3);
    let t = wick(0.4);
    let tc = t.value();
    let i = Complex64::i();
    let pre = (4.0 * PI * i * tc).sqrt().inv() / (2.0 * a);
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_intervals: 4000 };
    let q = integrate(
        |z| pre * (i * (x - z) * (x - z) / (4.0 * tc) - a * (z - y).abs()).exp(),
        Bound::NegInf,
        Bound::PosInf,
        &[y, x],
        opts,
    )
    .unwrap()
    .value;
    assert!(rel(transparent_i(a, x, y, t).unwrap(), q) <= 1e-8);
    assert_eq!(transparent_i(a, x, y, t).unwrap(), transparent_i(a, y, x, t).unwrap());
    let mut prev = f64::INFINITY;
    for k in 0..=8 {
        let m = transparent_i(a, x, y, wick(1.0 + 0.5 * k as f64)).unwrap().norm();
        assert!(m < prev);
        prev = m;
    }
}

#[test]
fn transparent_bound_states() {
    let one = DarbouxChain::transparent(&[1.0]).unwrap();
    for x in [-2.0f64, 0.0, 1.3] {
        assert!((transparent_eigenfunction(&one, 0, x).unwrap() - 0.5f64.sqrt() / x.cosh()).abs() < 1e-15);
    }
    let two = DarbouxChain::transparent(&[1.0, 2.0]).unwrap();
    let phi = |n: usize, x: f64| transparent_eigenfunction(&two, n, x).unwrap();
    let norm = |f: &dyn Fn(f64) -> f64| line_integral(|x| c(f(x)), -30.0, 30.0).re;
    assert!((norm(&|x| phi(0, x).powi(2)) - 1.0).abs() <= 1e-8);
    assert!((norm(&|x| phi(1, x).powi(2)) - 1.0).abs() <= 1e-8);
    assert!(norm(&|x| phi(0, x) * phi(1, x)).abs() <= 1e-8);
    assert!((line_integral(|x| c(transparent_eigenfunction(&one, 0, x).unwrap().powi(2)), -30.0, 30.0).re - 1.0).abs() <= 1e-8);
    assert_eq!(transparent_eigenfunction(&two, 0, 1e4).unwrap(), 0.0);
}

#[test]
fn transparent_routes_agree() {
    let chain = DarbouxChain::transparent(&[1.0, 2.0]).unwrap();
    for (x, y, tau) in [(0.0, 0.4, 0.5), (1.2, -0.3, 0.2), (-2.0, 1.5, 1.0), (0.7, 0.7, 0.3), (-0.4, 2.2, 0.8)] {
        let a = transparent_propagator(&chain, x, y, wick(tau)).unwrap();
        let b = transparent_k1_route(&chain, x, y, wick(tau)).unwrap();
        assert!(rel(a, b) <= 1e-6);
    }
}

#[test]
fn generating_function_far_limit() {
    // ∫ K_osc(x, z) e^{-z²/4} dz = e^{-τ/2} e^{-x²/4}
    for x in [-1.0f64, 0.0, 0.8] {
        let s = oscillator_generating_s(0.0, x, -40.0, wick(0.7), 1).unwrap();
        let want = (-0.35f64).exp() * (-x * x / 4.0).exp();
        assert!((s[0] - want).norm() <= 1e-6 * want);
    }
}

#[test]
fn generating_function_jet_against_quadrature() {
    let t = wick(0.3);
    let (x, y) = (0.4, -0.2);
    let s = oscillator_generating_s(0.0, x, y, t, 1).unwrap();
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_intervals: 4000 };
    for m in 0..2 {
        let q = integrate(|z| oscillator_propagator(x, z, t).unwrap() * z.powi(m as i32) * (-z * z / 4.0).exp(), Bound::Finite(y), Bound::PosInf, &[x], opts)
            .unwrap()
            .value;
        assert!(rel(s[m], q) <= 1e-8);
    }
}

#[test]
fn closed_kernels_are_dispatched() {
    let osc = DarbouxChain::oscillator_pair(2).unwrap();
    assert!(matches!(ClosedKernel::for_chain(&osc).unwrap(), ClosedKernel::OscillatorPair { k: 2, .. }));
    let lone = DarbouxChain::new(BaseModel::Oscillator, vec![BasisFunction::hermite_gaussian(0)], vec![Action::RemoveLevel]).unwrap();
    assert!(ClosedKernel::for_chain(&lone).is_err());
    let k = ClosedKernel::oscillator_pair(2).unwrap();
    assert_eq!(k.eval(0.3, 0.1, wick(0.5)).unwrap(), oscillator_pair_kernel(2, 0.3, 0.1, wick(0.5)).unwrap());
}

#[test]
fn real_time_unitarity_symmetry() {
    let chain = DarbouxChain::transparent(&[1.0, 2.0]).unwrap();
    for (x, y) in [(0.3, -0.7), (1.5, 0.2)] {
        let f = ComplexTime::real(0.4).unwrap();
        let b = ComplexTime::real(-0.4).unwrap();
        let pairs = [
            (free_propagator(x, y, b).unwrap(), free_propagator(y, x, f).unwrap()),
            (oscillator_propagator(x, y, b).unwrap(), oscillator_propagator(y, x, f).unwrap()),
            (transparent_propagator(&chain, x, y, b).unwrap(), transparent_propagator(&chain, y, x, f).unwrap()),
        ];
        for (a, b) in pairs {
            assert!(rel(a.conj(), b) <= 1e-9, "{a} vs {b}");
        }
    }
}

fn shipped() -> Vec<(Box<dyn Kernel>, f64, f64, f64)> {
    vec![
        (Box::new(ClosedKernel::box_ground_removed().unwrap()), 0.02, 0.98, 0.05),
        (Box::new(ClosedKernel::oscillator_pair(2).unwrap()), -3.0, 3.0, 0.5),
        (Box::new(ClosedKernel::transparent(DarbouxChain::transparent(&[1.0, 2.0, 3.0]).unwrap()).unwrap()), -4.0, 4.0, 0.5),
        (Box::new(OscillatorKernel), -3.0, 3.0, 0.5),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernels_are_symmetric(idx in 0usize..4, u in 0.0..1.0f64, v in 0.0..1.0f64, s in 0.5..2.0f64) {
        let (k, lo, hi, tau) = &shipped()[idx];
        let (x, y) = (lo + (hi - lo) * u, lo + (hi - lo) * v);
        let a = k.eval(x, y, wick(tau * s)).unwrap();
        let b = k.eval(y, x, wick(tau * s)).unwrap();
        prop_assert!((a - b).norm() <= 1e-8 * a.norm().max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn wick_kernels_are_real(u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let k = ClosedKernel::transparent(DarbouxChain::transparent(&[1.0]).unwrap()).unwrap();
        let val = k.eval(-3.0 + 6.0 * u, -3.0 + 6.0 * v, wick(0.5)).unwrap();
        prop_assert!(val.im.abs() <= 1e-12 * val.norm());
    }
}
