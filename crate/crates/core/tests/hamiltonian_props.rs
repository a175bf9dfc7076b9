use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use statqpe::hamiltonian::{eigh, select_tau, spectral_measure, to_dense, PauliString, PauliSum};

fn pauli_sum(n: usize) -> impl Strategy<Value = PauliSum> {
    let term = (
        -2.0f64..2.0,
        proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], n),
    );
    proptest::collection::vec(term, 1..7).prop_map(move |terms| {
        PauliSum::new(
            n,
            terms
                .into_iter()
                .map(|(c, l)| (c, l.into_iter().collect::<String>().parse::<PauliString>().unwrap())),
            0.0,
        )
        .unwrap()
    })
}

fn sized_sum() -> impl Strategy<Value = PauliSum> {
    (1usize..=4).prop_flat_map(pauli_sum)
}

fn random_state(n: usize, seed: &[f64]) -> Vec<Complex64> {
    let dim = 1 << n;
    let v: Vec<Complex64> = (0..dim)
        .map(|i| Complex64::new(seed[(2 * i) % seed.len()] + 0.1, seed[(2 * i + 1) % seed.len()]))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dense_is_hermitian(h in sized_sum()) {
        let m = to_dense(&h).unwrap();
        let diff: DMatrix<Complex64> = &m - m.adjoint();
        prop_assert!(diff.iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn spectrum_invariant_under_relabeling(h in sized_sum(), shift in 0usize..4) {
        let n = h.n_qubits();
        let perm: Vec<usize> = (0..n).map(|q| (q + shift) % n).collect();
        let (a, _) = eigh(&to_dense(&h).unwrap());
        let (b, _) = eigh(&to_dense(&h.relabel(&perm).unwrap()).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn overlaps_sum_to_one(h in sized_sum(), seed in proptest::collection::vec(-1.0f64..1.0, 8)) {
        prop_assume!(!h.is_zero());
        let psi = random_state(h.n_qubits(), &seed);
        let sm = spectral_measure(&h, 0.7, &psi).unwrap();
        prop_assert!((sm.overlaps.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn select_tau_bounds_scaled_spectrum(h in sized_sum(), bound in 0.1f64..std::f64::consts::FRAC_PI_2) {
        prop_assume!(!h.is_zero());
        let tau = select_tau(&h, bound).unwrap();
        let (ev, _) = eigh(&to_dense(&h).unwrap());
        prop_assert!(ev.iter().all(|l| (tau * l).abs() <= bound * (1.0 + 1e-12)));
    }
}
