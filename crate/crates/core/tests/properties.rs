use std::f64::consts::{PI, TAU};

use chirpfit::baselines::dechirp_transform;
use chirpfit::estimators::profile_rss;
use chirpfit::experiments::match_to_truth;
use chirpfit::periodogram::{ptf_value, ptf_value_expanded};
use chirpfit::signal::{add, chirp_phasor};
use chirpfit::*;
use proptest::prelude::*;

fn signal(n: usize, comps: &[(f64, f64, f64)], sigma2: f64, seed: u64) -> ComplexSignal {
    let model = ChirpModel::new(comps.iter().map(|&(r, i, b)| ChirpComponent::new(r, i, b)).collect()).unwrap();
    let clean = synthesize_clean(&model, n).unwrap();
    if sigma2 == 0.0 {
        clean
    } else {
        add(&clean, &generate_noise(&NoiseSpec::iid(sigma2, seed), n).unwrap()).unwrap()
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn synthesis_is_two_pi_periodic(n in 2usize..400, a in -5.0..5.0f64, beta in 0.0..TAU) {
        let y0 = signal(n, &[(a, 1.0, beta)], 0.0, 0);
        let y1 = signal(n, &[(a, 1.0, beta + TAU)], 0.0, 0);
        for t in 1..=n {
            prop_assert!((y0.at(t) - y1.at(t)).norm() < 1e-7);
        }
    }

    #[test]
    fn synthesis_is_linear(n in 2usize..300, b1 in 0.0..TAU, b2 in 0.0..TAU, a in -3.0..3.0f64) {
        let both = signal(n, &[(a, 0.5, b1), (1.0, -a, b2)], 0.0, 0);
        let first = signal(n, &[(a, 0.5, b1)], 0.0, 0);
        let second = signal(n, &[(1.0, -a, b2)], 0.0, 0);
        for t in 1..=n {
            prop_assert!((both.at(t) - first.at(t) - second.at(t)).norm() < 1e-12);
        }
    }

    #[test]
    fn ptf_is_two_pi_periodic(n in 4usize..300, beta in 0.0..TAU, seed in 0u64..1000) {
        let y = signal(n, &[(2.0, 0.0, 0.7)], 1.0, seed);
        prop_assert!(close(ptf_value(&y, beta), ptf_value(&y, beta + TAU), 1e-7));
    }

    #[test]
    fn projection_splits_energy(n in 8usize..300, beta in 0.0..TAU, b0 in 0.0..TAU, seed in 0u64..1000) {
        let y = signal(n, &[(3.0, -1.0, b0)], 2.0, seed);
        let rss = profile_rss(&y, &[beta]).unwrap();
        prop_assert!(close(rss + ptf_value(&y, beta), y.energy(), 1e-8));
    }

    #[test]
    fn expanded_ptf_agrees(n in 4usize..300, beta in 0.0..TAU, seed in 0u64..1000) {
        let y = signal(n, &[(1.0, 2.0, 1.3), (0.5, 0.0, 2.9)], 1.0, seed);
        prop_assert!(close(ptf_value(&y, beta), ptf_value_expanded(&y, beta), 1e-10));
    }

    #[test]
    fn simplex_is_translation_equivariant(c0 in -50.0..50.0f64, c1 in -50.0..50.0f64, s in 0.5..4.0f64) {
        let cfg = SimplexConfig { init_step: Some(vec![1.0, 1.0]), ..Default::default() };
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + s * (x[1] + 2.0).powi(2) + 0.3 * (x[0] - 1.0) * (x[1] + 2.0);
        let base = minimize(f, &[0.0, 0.0], &cfg).unwrap();
        let shifted = minimize(|x: &[f64]| f(&[x[0] - c0, x[1] - c1]), &[c0, c1], &cfg).unwrap();
        prop_assert!((shifted.argmin[0] - c0 - base.argmin[0]).abs() < 1e-4);
        prop_assert!((shifted.argmin[1] - c1 - base.argmin[1]).abs() < 1e-4);
        prop_assert!(base.best_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn one_component_lse_matches_alse(n in 40usize..160, beta in 0.1..3.0f64, seed in 0u64..10_000) {
        let y = signal(n, &[(4.0, 1.0, beta)], 1.0, seed);
        let cfg = SimplexConfig::default();
        let l = &lse_one(&y, Init::Scan, &cfg).unwrap().components[0];
        let a = &alse_one(&y, Init::Scan, &cfg).unwrap().components[0];
        prop_assert!(chirpfit::signal::circular_distance(l.beta, a.beta, PI) < 10.0 * cfg.x_tol);
        prop_assert!((l.amplitude() - a.amplitude()).norm() < 1e-6);
    }

    #[test]
    fn dechirped_chirp_has_affine_phase(n in 3usize..200, beta in 0.0..(PI / 2.0 - 1e-3)) {
        let y = signal(n, &[(1.0, 0.0, beta)], 0.0, 0);
        let z = dechirp_transform(&y).unwrap();
        // z(t) = y(t) conj(y(t+1)) = exp(-iβ(2t+1))
        for (i, v) in z.samples().iter().enumerate() {
            let t = (i + 1) as f64;
            let want = Complex64::from_polar(1.0, -beta * (2.0 * t + 1.0));
            prop_assert!((v - want).norm() < 1e-8);
        }
    }

    #[test]
    fn cpf_products_carry_the_rate(n in 11usize..120, beta in 0.0..TAU) {
        let y = signal(n, &[(1.0, 0.0, beta)], 0.0, 0);
        let t = (n + 1) / 2;
        for m in 0..t.min(n - t + 1) {
            let prod = y.at(t + m) * y.at(t - m);
            let phase = 2.0 * beta * ((t * t + m * m) as f64);
            prop_assert!((prod - Complex64::from_polar(1.0, phase)).norm() < 1e-7);
        }
    }

    #[test]
    fn rate_variance_depends_only_on_modulus(r in 0.2..20.0f64, phi in 0.0..TAU) {
        let c = ChirpComponent::new(r * phi.cos(), r * phi.sin(), 1.0);
        let inv = sigma_inv_matrix(&c).unwrap();
        prop_assert!(close(inv[(2, 2)], 45.0 / (8.0 * r * r), 1e-12));
        prop_assert!(close(inv[(0, 0)] + inv[(1, 1)], 1.0 + 5.0 / 8.0, 1e-12));
        prop_assert!(inv.cholesky().is_some());
    }

    #[test]
    fn matching_follows_relabeling(truth in prop::collection::vec(0.0..3.0f64, 1..5), noise in 0.0..1e-4f64) {
        let est: Vec<f64> = truth.iter().enumerate().map(|(i, b)| b + noise * i as f64).collect();
        let forward = match_to_truth(&est, &truth);
        let reversed_truth: Vec<f64> = truth.iter().rev().cloned().collect();
        let backward = match_to_truth(&est, &reversed_truth);
        let k = truth.len();
        for (e, m) in forward.iter().enumerate() {
            let j = m.expect("every estimate matched");
            prop_assert_eq!(backward[e], Some(k - 1 - j));
        }
    }
}

// |(1/N) Σ exp(i(β₁−β₂)t²)| ≤ c·N^{-1/2}: report the smallest such c over a
// fixed set of rate differences away from rational multiples of π.
#[test]
fn cross_sums_decay_like_root_n() {
    let mut c: f64 = 0.0;
    for n in (100..=1000).step_by(100) {
        for d in [0.37, 0.91, 1.6180339887, 2.4, 2.71828] {
            let s: Complex64 = (1..=n).map(|t| chirp_phasor(d, t)).sum();
            c = c.max(s.norm() / n as f64 * (n as f64).sqrt());
        }
    }
    println!("fitted orthogonality constant c = {c:.3}");
    assert!(c < 5.0, "c = {c}");
}
