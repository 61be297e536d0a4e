use std::f64::consts::PI;

use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use susy_core::darboux::{transformed_potential, DarbouxChain};
use susy_core::oracle::{
    delta_sequence_check, extrapolated_spectral_kernel, fd_eigensolve, identity_id, lemma3_identity, loglog_slope, s0_identity, semigroup_deviation,
    sl_identity, spectral_kernel, GridSpec,
};
use susy_core::propagators::{free_propagator, ClosedKernel, ComplexTime, FreeKernel};

fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (-1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

#[test]
fn box_ground_level() {
    let e = fd_eigensolve(&|_| 0.0, GridSpec::new(0.0, 1.0, 2001).unwrap(), 3).unwrap();
    assert!((e.energies()[0] / (PI * PI) - 1.0).abs() < 1e-3);
    // orthonormal on the grid
    let h = e.grid().h();
    let dot = |a: usize, b: usize| e.wavefunction(a).iter().zip(e.wavefunction(b)).map(|(p, q)| p * q).sum::<f64>() * h;
    assert!((dot(0, 0) - 1.0).abs() < 1e-10 && dot(0, 1).abs() < 1e-10);
}

#[test]
fn single_bound_state_of_the_sech_well() {
    let chain = DarbouxChain::transparent(&[1.0]).unwrap();
    let v = |x: f64| transformed_potential(&chain, x).unwrap();
    let e = fd_eigensolve(&v, GridSpec::with_spacing(-25.0, 25.0, 0.01).unwrap(), 5).unwrap();
    let negative: Vec<f64> = e.energies().iter().copied().filter(|v| *v < 0.0).collect();
    assert_eq!(negative.len(), 1);
    assert!((negative[0] + 1.0).abs() < 5e-3);
}

#[test]
fn oscillator_levels() {
    let e = fd_eigensolve(&|x| x * x / 4.0, GridSpec::with_spacing(-15.0, 15.0, 0.01).unwrap(), 6).unwrap();
    for k in 0..6 {
        assert!((e.energies()[k] / (k as f64 + 0.5) - 1.0).abs() < 1e-3, "k = {k}");
    }
}

#[test]
fn heat_kernel_from_the_spectrum() {
    let e = fd_eigensolve(&|_| 0.0, GridSpec::with_spacing(-25.0, 25.0, 0.01).unwrap(), 1200).unwrap();
    let coarse = fd_eigensolve(&|_| 0.0, GridSpec::with_spacing(-25.0, 25.0, 0.02).unwrap(), 600).unwrap();
    let t = ComplexTime::wick(0.5).unwrap();
    for (x, y) in [(0.0, 0.0), (0.5, -0.7), (2.0, 1.0)] {
        let k = extrapolated_spectral_kernel(&coarse, &e, x, y, 0.5).unwrap();
        let f = free_propagator(x, y, t).unwrap();
        assert!((k - f).norm() <= 1e-5 * f.norm(), "({x}, {y}): {k} vs {f}");
    }
    let taus = [0.1, 0.05, 0.025];
    let diag: Vec<f64> = taus.iter().map(|&tau| spectral_kernel(&e, 0.3, 0.3, tau).unwrap().re).collect();
    assert!((loglog_slope(&taus, &diag) + 0.5).abs() <= 0.05);
    for tau in [0.01, 0.3, 3.0] {
        for x in [-3.0, 0.0, 1.7] {
            assert!(spectral_kernel(&e, x, x, tau).unwrap().re > 0.0);
        }
    }
}

#[test]
fn lemma_small_cases() {
    assert!(lemma3_identity(&[2.0, 5.0], 0).unwrap() < 1e-15);
    assert!(lemma3_identity(&[2.0, 5.0], 1).unwrap() < 1e-15);
    assert!(lemma3_identity(&[2.0, 2.0], 0).is_err());
}

#[test]
fn lemma_exact_rational_cross_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut alphas: Vec<i64> = Vec::new();
    while alphas.len() < 7 {
        let a = rng.random_range(-10..=10);
        if !alphas.contains(&a) {
            alphas.push(a);
        }
    }
    let n_alpha = alphas.len();
    for n in 0..n_alpha {
        let mut sum = Ratio::<i128>::from_integer(0);
        for (i, &ai) in alphas.iter().enumerate() {
            let mut term = Ratio::from_integer((ai as i128).pow(n as u32));
            for (j, &aj) in alphas.iter().enumerate() {
                if i != j {
                    term /= Ratio::from_integer((ai - aj) as i128);
                }
            }
            sum += term;
        }
        let expected = if n == n_alpha - 1 { 1 } else { 0 };
        assert_eq!(sum, Ratio::from_integer(expected));
        let as_f: Vec<f64> = alphas.iter().map(|&a| a as f64).collect();
        assert!(lemma3_identity(&as_f, n).unwrap() <= 1e-10);
    }
}

#[test]
fn row_expansion_identity() {
    let one = DarbouxChain::transparent(&[1.0]).unwrap();
    assert!(identity_id(&one, 0, 0.4).unwrap() < 1e-15);
    let two = DarbouxChain::transparent(&[1.0, 2.0]).unwrap();
    for j in 0..2 {
        assert!(identity_id(&two, j, 0.7).unwrap() <= 1e-10);
    }
    let three = DarbouxChain::transparent(&[0.5, 1.0, 1.7]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let x = rng.random_range(-2.0..2.0);
        for j in 0..3 {
            assert!(identity_id(&three, j, x).unwrap() <= 1e-9);
        }
    }
}

#[test]
fn exponential_images() {
    let one = DarbouxChain::transparent(&[1.0]).unwrap();
    for x in [-1.0, 0.0, 0.8] {
        assert!(s0_identity(&one, 0, 1, x).unwrap() <= 1e-10);
    }
    let two = DarbouxChain::transparent(&[1.0, 2.0]).unwrap();
    for (x, y) in [(0.3, -0.2), (1.1, 0.4), (-0.9, 1.6)] {
        for n in 0..2 {
            for s in [1, -1] {
                assert!(sl_identity(&two, n, s, x, y).unwrap() <= 1e-9);
            }
        }
    }
    assert!(s0_identity(&two, 2, 1, 0.0).is_err());
}

#[test]
fn delta_sequences() {
    let r = delta_sequence_check(&FreeKernel, &bump, (-1.0, 1.0), 0.0, &[1e-3, 5e-4, 2.5e-4]).unwrap();
    assert!((r.slope - 1.0).abs() <= 0.2, "{r:?}");
    let t = ClosedKernel::transparent(DarbouxChain::transparent(&[1.0]).unwrap()).unwrap();
    assert!(delta_sequence_check(&t, &bump, (-1.0, 1.0), 0.2, &[1e-2, 1e-3, 1e-4]).unwrap().slope >= 0.9);
    let b = ClosedKernel::box_ground_removed().unwrap();
    let f = |x: f64| bump((x - 0.5) / 0.3);
    assert!(delta_sequence_check(&b, &f, (0.2, 0.8), 0.5, &[1e-3, 5e-4, 2.5e-4]).unwrap().slope >= 0.9);
    assert!(delta_sequence_check(&FreeKernel, &bump, (-1.0, 1.0), 0.0, &[1e-4, 1e-3]).is_err());
}

#[test]
fn semigroup() {
    let t = ClosedKernel::transparent(DarbouxChain::transparent(&[1.0]).unwrap()).unwrap();
    assert!(semigroup_deviation(&t, 0.3, -0.7, 0.2, 0.3).unwrap() <= 1e-5);
    let b = ClosedKernel::box_ground_removed().unwrap();
    assert!(semigroup_deviation(&b, 0.45, 0.6, 0.02, 0.03).unwrap() <= 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lemma_holds_for_random_sets(raw in proptest::collection::vec(-10.0..10.0f64, 1..=8)) {
        let mut alphas: Vec<f64> = Vec::new();
        for a in raw {
            if alphas.iter().all(|b| (a - b).abs() >= 0.1) {
                alphas.push(a);
            }
        }
        for n in 0..alphas.len() {
            prop_assert!(lemma3_identity(&alphas, n).unwrap() <= 1e-10);
        }
    }
}
