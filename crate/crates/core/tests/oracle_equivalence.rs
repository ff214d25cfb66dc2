//! Brute-force Fock-space results against the correlation-matrix route.

use fermient::fcs::charge_distribution;
use fermient::oracle::{
    one_body_matrix, oracle_entropies, random_slater, reduced_density_matrix_modes, sector_decomposition,
};
use fermient::spectrum::{occupation_spectrum, report};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn six_mode_slater_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 1..6 {
        let (orbitals, state) = random_slater(6, n, &mut rng).unwrap();
        let direct = oracle_entropies(&state, 3).unwrap();
        let c = one_body_matrix(&orbitals).unwrap().restrict(&[0, 1, 2]).unwrap();
        let r = report(&c).unwrap();
        assert!((direct.s_a - r.s_a).abs() < 1e-9, "S_A {} vs {}", direct.s_a, r.s_a);
        assert!((direct.s_m - r.s_m).abs() < 1e-9, "S_m {} vs {}", direct.s_m, r.s_m);
        assert!((direct.s_res_direct - r.s_res).abs() < 1e-9);
        assert!(direct.identity_error() < 1e-9);
    }
}

#[test]
fn scattered_region() {
    // A = modes {1, 4, 5} of a 7-mode state, not a prefix of the ordering.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let modes = [1, 4, 5];
    for n in [2, 3, 4] {
        let (orbitals, state) = random_slater(7, n, &mut rng).unwrap();
        // Relabel so that A becomes the low modes 0, 1, 2.
        let perm = [3, 0, 4, 5, 1, 2, 6];
        let moved = state.permute_modes(&perm).unwrap();
        let rho = reduced_density_matrix_modes(&moved, &[0, 1, 2]).unwrap();
        let dec = sector_decomposition(&rho, n).unwrap();
        let spec = occupation_spectrum(&one_body_matrix(&orbitals).unwrap().restrict(&modes).unwrap()).unwrap();
        let c = one_body_matrix(&orbitals).unwrap().restrict(&modes).unwrap();
        assert!((rho.entropy() - report(&c).unwrap().s_a).abs() < 1e-9);
        let p = charge_distribution(&spec).unwrap();
        for (a, b) in dec.probabilities.probabilities().iter().zip(p.probabilities()) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn correlation_from_amplitudes_matches_projector() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (orbitals, state) = random_slater(5, 2, &mut rng).unwrap();
    let brute = state.correlation_matrix().unwrap();
    let projector = one_body_matrix(&orbitals).unwrap();
    let diff = (brute.entries() - projector.entries()).map(|z| z.norm()).max();
    assert!(diff < 1e-12, "max deviation {diff}");
}
