use dyadic_core::selfsimilar::{
    backward_truncated, build_selfsimilar, divergence_classify, find_l_star, kp_sequence, selfsimilar_forward,
    shoot_selfsimilar, strong_from_weak, weak_from_strong, zeta, zeta_sum, DivergenceProfile,
};
use dyadic_core::shell::{normalized, selfsimilar_residual_relative};
use dyadic_core::Params;
use proptest::prelude::*;

/// `−a_n = rhs_n(a)` written out from the model, relative to the largest term.
fn residual_oracle(a: &[f64], p: &Params) -> f64 {
    residual_oracle_from(a, p, 1)
}

fn residual_oracle_from(a: &[f64], p: &Params, first: usize) -> f64 {
    let (b, d1, d2) = (p.beta(), p.delta1(), p.delta2());
    let k = |n: i64| (b * n as f64).exp2();
    (first..a.len() - 1)
        .map(|n| {
            let m = n as i64;
            let t = [
                a[n],
                d1 * k(m) * a[n - 1] * a[n - 1],
                -d1 * k(m + 1) * a[n] * a[n + 1],
                -d2 * k(m) * a[n + 1] * a[n + 1],
                d2 * k(m - 1) * a[n] * a[n - 1],
            ];
            let mag = t.iter().fold(0.0f64, |s, x| s.max(x.abs()));
            t.iter().sum::<f64>().abs() / mag
        })
        .fold(0.0, f64::max)
}

fn band_params(frac: f64) -> Params {
    // ratio between k_1^{-4} and k_1^{-4/3} for β = 1
    let (lo, hi) = (2f64.powi(-4), 2f64.powf(-4.0 / 3.0));
    Params::new(1.0, lo + frac * (hi - lo), 1.0, 0.0, 200).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn forward_generation_matches_residual(frac in 0.0..0.999f64, la1 in -2.0..2.0f64) {
        let p = band_params(frac);
        let seq = build_selfsimilar(10f64.powf(la1), &p, 200).unwrap();
        prop_assert!(residual_oracle(seq.values(), &p) < 1e-12);
        let core = selfsimilar_residual_relative(seq.values(), &p).into_iter().fold(0.0, f64::max);
        prop_assert!(core < 1e-12);
    }

    #[test]
    fn weak_strong_duality(values in prop::collection::vec(1e-3..10.0f64, 3..60)) {
        let back = strong_from_weak(&weak_from_strong(&values));
        for (x, y) in values.iter().zip(&back) {
            prop_assert!((x - y).abs() <= 1e-15 * x.abs());
        }
    }

    #[test]
    fn pull_back_confinement(l in 0.0..4.0f64, n in 10usize..80) {
        prop_assume!(l > 0.0);
        let w = backward_truncated(l, n).unwrap();
        if w.well_defined {
            let m = zeta_sum::<f64>();
            prop_assert!(w.values.windows(2).all(|p| p[0] <= p[1]));
            prop_assert!(w.values.iter().all(|&x| x >= l - m && x <= l));
        }
    }

    #[test]
    fn kp_recursion_satisfies_weak_relation(la1 in -1.0..1.0f64) {
        // strong KP sequence from the pull-back normalization (δ1 = 1, δ2 = 0)
        let p = Params::new(1.0, 1.0, 0.0, 0.0, 30).unwrap();
        let a = selfsimilar_forward(10f64.powf(la1), &p, 12, 0).unwrap();
        let w = weak_from_strong(&a);
        for n in 1..a.len() - 1 {
            if w[n] > 0.0 && w[n + 1].is_finite() {
                let rhs = w[n - 1] * w[n - 1] / w[n] + zeta::<f64>(n);
                prop_assert!((w[n + 1] - rhs).abs() <= 1e-13 * w[n + 1].abs().max(1.0), "shell {}", n);
            }
        }
    }
}

#[test]
fn pull_back_solves_the_kp_relations() {
    let (l_star, w) = find_l_star::<f64>(60, 1e-12).unwrap();
    assert!(w.is_confined());
    let mut a = strong_from_weak(&w.values);
    a[0] = 0.0;
    let p = Params::new(1.0, 1.0, 0.0, 0.0, 60).unwrap();
    assert!(residual_oracle_from(&a[..=60], &p, 2) < 1e-12);
    // shell 1 only sees the truncation through the bracket width on L
    assert!(residual_oracle(&a[..=60], &p) < 1e-10);
    // a slightly smaller start fails, a larger one stays well defined
    assert!(!backward_truncated(l_star * (1.0 - 1e-9), 60).unwrap().well_defined);
    assert!(backward_truncated(l_star * (1.0 + 1e-9), 60).unwrap().well_defined);
}

#[test]
fn leading_zeros_propagate_positivity() {
    let p = band_params(0.3);
    for n0 in 0..=3 {
        let a = selfsimilar_forward(0.7, &p, 120, n0).unwrap();
        assert_eq!(a.len(), 121);
        assert!(a[..=n0].iter().all(|&x| x == 0.0));
        assert!(a[n0 + 1..].iter().all(|&x| x > 0.0 && x.is_finite()), "n0 = {n0}");
        assert!(residual_oracle_from(&a, &p, n0 + 1) < 1e-12);
    }
    let kp = kp_sequence(0.4, 1.0, 20).unwrap();
    assert_eq!(kp[0], 0.0);
    assert!(kp[1..].iter().all(|&x| x > 0.0));
}

#[test]
fn k41_universality() {
    let mut plateaus = Vec::new();
    for a1 in [0.3, 3.0] {
        let p = band_params(0.5);
        let seq = build_selfsimilar(a1, &p, 200).unwrap();
        let t = normalized(seq.values(), &p);
        plateaus.push((150..=200).map(|n| (t[n] - t[200]).abs() / t[200]).fold(0.0, f64::max));
    }
    for (d1, d2) in [(1.0, 1.0), (0.6, 1.0), (2.0, 1.0), (1.0, 0.0)] {
        let p = Params::new(1.0, d1, d2, 0.0, 60).unwrap();
        let shot = shoot_selfsimilar(&p, 60).unwrap();
        let t = normalized(shot.sequence.values(), &p);
        let last = t.len() - 1;
        plateaus.push(((3 * last / 4)..=last).map(|n| (t[n] - t[last]).abs() / t[last]).fold(0.0, f64::max));
    }
    assert!(plateaus.iter().all(|&d| d < 1e-4), "{plateaus:?}");
}

#[test]
fn uniqueness_dichotomy() {
    // multi-solution band: every seed converges to its own K41 profile
    let p = band_params(0.4);
    for a1 in [0.05, 0.5, 5.0, 50.0] {
        let seq = build_selfsimilar(a1, &p, 200).unwrap();
        let a = seq.values();
        let c = seq.k41_constant().unwrap();
        let reference: Vec<f64> = (0..a.len()).map(|n| c * p.k(n).powf(-1.0 / 3.0)).collect();
        assert_eq!(divergence_classify(&a[1..], &reference[1..]).unwrap(), DivergenceProfile::Converged, "a1 = {a1}");
    }
    // unique band: the root converges, seeds outside the bracket run away
    let p = Params::new(1.0, 1.0, 1.0, 0.0, 120).unwrap();
    let shot = shoot_selfsimilar(&p, 60).unwrap();
    let reference: Vec<f64> = (0..=120).map(|n| shot.k41.constant * p.k(n).powf(-1.0 / 3.0)).collect();
    let root_seq = selfsimilar_forward(shot.root, &p, 50, 0).unwrap();
    assert_eq!(divergence_classify(&root_seq[1..], &reference[1..=50]).unwrap(), DivergenceProfile::Converged);
    for off in [1e-6, 1e-3, 1e-1] {
        for sign in [1.0, -1.0] {
            let mut a = selfsimilar_forward(shot.root * (1.0 + sign * off), &p, 120, 0).unwrap();
            a.resize(121, f64::NAN);
            let profile = divergence_classify(&a[1..], &reference[1..]).unwrap();
            assert_ne!(profile, DivergenceProfile::Converged, "offset {sign}·{off}");
        }
    }
}
