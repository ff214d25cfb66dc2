use std::f64::consts::LN_2;

use fermient::fcs::{charge_distribution, gaussian_bound, generating_function, measurement_entropy};
use fermient::spectrum::{cumulants, entropy_from_spectrum, report_from_spectrum};
use fermient::OccupationSpectrum;
use proptest::prelude::*;

/// p_n of a sum of independent Bernoulli(ν_j), by repeated convolution.
fn poisson_binomial(nu: &[f64]) -> Vec<f64> {
    let mut p = vec![1.0];
    for &v in nu {
        let mut next = vec![0.0; p.len() + 1];
        for (n, &q) in p.iter().enumerate() {
            next[n] += q * (1.0 - v);
            next[n + 1] += q * v;
        }
        p = next;
    }
    p
}

fn occupations(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    let value = prop_oneof![
        8 => 0.0..=1.0f64,
        1 => Just(0.0),
        1 => Just(1.0),
        1 => Just(0.5),
    ];
    prop::collection::vec(value, 1..=max_len)
}

fn spec(v: &[f64]) -> OccupationSpectrum {
    OccupationSpectrum::new(v.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn distribution_matches_convolution(nu in occupations(64)) {
        let d = charge_distribution(&spec(&nu)).unwrap();
        let oracle = poisson_binomial(&nu);
        prop_assert_eq!(d.probabilities().len(), oracle.len());
        for (a, b) in d.probabilities().iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }
    }

    #[test]
    fn moments_match_cumulants(nu in occupations(64)) {
        let s = spec(&nu);
        let d = charge_distribution(&s).unwrap();
        let (c1, c2) = cumulants(&s);
        let total: f64 = d.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!((d.mean() - c1).abs() < 1e-9);
        prop_assert!((d.variance() - c2).abs() < 1e-9);
    }

    #[test]
    fn fourier_round_trip(nu in occupations(40), lambda in -std::f64::consts::PI..std::f64::consts::PI) {
        let s = spec(&nu);
        let d = charge_distribution(&s).unwrap();
        let err = (d.characteristic(lambda) - generating_function(&s, lambda)).norm();
        prop_assert!(err < 1e-12, "err {}", err);
    }

    #[test]
    fn union_is_additive(a in occupations(20), b in occupations(20)) {
        let (sa, sb) = (spec(&a), spec(&b));
        let u = sa.union(&sb);
        prop_assert!((entropy_from_spectrum(&u) - entropy_from_spectrum(&sa) - entropy_from_spectrum(&sb)).abs() < 1e-12);
        let (ca, cb, cu) = (cumulants(&sa), cumulants(&sb), cumulants(&u));
        prop_assert!((cu.0 - ca.0 - cb.0).abs() < 1e-12);
        prop_assert!((cu.1 - ca.1 - cb.1).abs() < 1e-12);
        // The number distribution of the union is the convolution.
        let (da, db, du) = (
            charge_distribution(&sa).unwrap(),
            charge_distribution(&sb).unwrap(),
            charge_distribution(&u).unwrap(),
        );
        for (n, &p) in du.probabilities().iter().enumerate() {
            let conv: f64 = da
                .probabilities()
                .iter()
                .enumerate()
                .filter(|(k, _)| *k <= n && n - k < db.probabilities().len())
                .map(|(k, q)| q * db.probabilities()[n - k])
                .sum();
            prop_assert!((p - conv).abs() < 1e-12);
        }
    }

    #[test]
    fn order_does_not_matter(nu in occupations(30), seed in any::<u64>()) {
        let mut shuffled = nu.clone();
        // Deterministic Fisher-Yates driven by the seed.
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(report_from_spectrum(&spec(&nu)).unwrap(), report_from_spectrum(&spec(&shuffled)).unwrap());
    }

    #[test]
    fn particle_hole_symmetry(nu in occupations(40)) {
        let s = spec(&nu);
        let h = s.complement();
        let (r, rh) = (report_from_spectrum(&s).unwrap(), report_from_spectrum(&h).unwrap());
        prop_assert!((r.s_a - rh.s_a).abs() < 1e-12);
        prop_assert!((r.c_2 - rh.c_2).abs() < 1e-12);
        prop_assert!((r.c_1 + rh.c_1 - nu.len() as f64).abs() < 1e-9);
        prop_assert!((r.s_m - rh.s_m).abs() < 1e-11);
        let (d, dh) = (charge_distribution(&s).unwrap(), charge_distribution(&h).unwrap());
        for (a, b) in d.probabilities().iter().zip(dh.probabilities().iter().rev()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bounds_hold(nu in occupations(64)) {
        let s = spec(&nu);
        let r = report_from_spectrum(&s).unwrap();
        prop_assert!(r.s_a >= 4.0 * LN_2 * r.c_2 - 1e-12);
        prop_assert!(r.s_m <= gaussian_bound(r.c_2).unwrap());
        prop_assert!(r.sandwich_holds(), "{:?}", r);
        prop_assert!(r.bound_gaussian_ok && r.bound_variance_ok);
        prop_assert!((r.s_m - measurement_entropy(&charge_distribution(&s).unwrap())).abs() == 0.0);
    }
}
