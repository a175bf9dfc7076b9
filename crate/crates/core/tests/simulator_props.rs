use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use statqpe::hamiltonian::{basis_state, spectral_measure, PauliString, PauliSum};
use statqpe::simulator::circuit::{GateLayer, LayeredCircuit};
use statqpe::simulator::gates::Euler;
use statqpe::simulator::hadamard::{controlled_evolution_unitary, hadamard_expectations, ControlledOp};
use statqpe::simulator::noise::NoiseModel;
use statqpe::simulator::state::simulate;
use statqpe::simulator::trotter::trotter_circuit;

fn random_sum(n: usize, rng: &mut impl Rng) -> PauliSum {
    let letters = ['I', 'X', 'Y', 'Z'];
    let terms: Vec<(f64, PauliString)> = (0..5)
        .map(|_| {
            let s: String = (0..n).map(|_| letters[rng.gen_range(0..4)]).collect();
            (rng.gen_range(-1.0..1.0), s.parse().unwrap())
        })
        .collect();
    PauliSum::new(n, terms, 0.0).unwrap()
}

#[test]
fn exact_hadamard_tests_reproduce_spectral_g() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    for n in 1..=3 {
        for _ in 0..3 {
            let h = random_sum(n, &mut rng);
            if h.is_zero() {
                continue;
            }
            let tau = 0.9;
            let bits: String = (0..n).map(|_| if rng.gen::<bool>() { '1' } else { '0' }).collect();
            let psi = basis_state(&bits).unwrap();
            let sm = spectral_measure(&h, tau, &psi).unwrap();
            for k in 0..=50 {
                let u = controlled_evolution_unitary(&h, tau, k).unwrap();
                let [re, im] = hadamard_expectations(ControlledOp::Unitary(&u), &psi, None, false).unwrap();
                let g = sm.g(k);
                assert!((re - g.re).abs() < 1e-12 && (im - g.im).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }
}

#[test]
fn depolarizing_decay_is_single_exponential() {
    let (c1, c2) = (0.121256, 0.259138);
    let tau = 1.5 / (c1 + c2);
    let psi = basis_state("1").unwrap();
    let noise = NoiseModel::depolarizing(0.01);
    let mut points = Vec::new();
    for k in 1..=25 {
        let c = trotter_circuit(c1, c2, tau, k).unwrap();
        let clean = hadamard_expectations(ControlledOp::Circuit(&c), &psi, None, false).unwrap();
        let noisy = hadamard_expectations(ControlledOp::Circuit(&c), &psi, Some(&noise), false).unwrap();
        let ratio = Complex64::new(noisy[0], noisy[1]).norm() / Complex64::new(clean[0], clean[1]).norm();
        points.push((k as f64, ratio.ln()));
    }
    // least-squares line through (k, ln ratio)
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let icept = my - slope * mx;
    assert!(slope < 0.0);
    for (k, y) in &points {
        let fit = (icept + slope * k).exp();
        assert!((y.exp() - fit).abs() / fit < 0.01, "k={k}");
    }
}

fn random_circuit(n: usize, depth: usize, rng: &mut impl Rng) -> LayeredCircuit {
    let mut layers = Vec::new();
    for l in 0..depth {
        layers.push(GateLayer::SingleQubit(
            (0..n)
                .map(|_| Euler {
                    theta: rng.gen_range(0.0..3.0),
                    phi: rng.gen_range(-3.0..3.0),
                    lambda: rng.gen_range(-3.0..3.0),
                })
                .collect(),
        ));
        let pairs: Vec<(usize, usize)> = (l % 2..n - 1).step_by(2).map(|a| (a, a + 1)).collect();
        layers.push(GateLayer::EntanglingCz(if pairs.is_empty() { vec![(0, 1)] } else { pairs }));
    }
    LayeredCircuit::new(n, layers, 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn noisy_density_stays_physical(seed in any::<u64>(), n in 2usize..=4, p in 0.0f64..0.3, theta in -0.5f64..0.5) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(n, 4, &mut rng);
        let mut input = vec![Complex64::new(0.0, 0.0); 1 << n];
        input[rng.gen_range(0..1 << n)] = Complex64::new(1.0, 0.0);
        let noise = NoiseModel { depolarizing_p: p, coherent_zz_theta: theta, readout: vec![] };
        let state = simulate(&c, input, Some(&noise)).unwrap().into_density().unwrap();
        prop_assert!((state.trace() - 1.0).abs() < 1e-12);
        let dim = 1 << n;
        let rho = nalgebra::DMatrix::from_row_slice(dim, dim, &state.density_matrix().unwrap());
        let ev = rho.symmetric_eigenvalues();
        prop_assert!(ev.iter().all(|v| *v >= -1e-10));
    }
}
