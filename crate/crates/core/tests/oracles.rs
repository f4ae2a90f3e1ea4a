// SPDX-License-Identifier: Apache-2.0

//! Cross-checks against independently computed reference values.

mod common;

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use producibility_lab::dynamics::DensityMatrix;
use producibility_lab::estimators::{m_term, qfi, qfi_pure, r_term, SpectralState};
use producibility_lab::linalg::{eigh, ComplexMatrix};
use producibility_lab::spin::{collective_operator, xxz_hamiltonian, Axis, SpinChainSpec};
use serde_json::Value;

fn load_oracle() -> Value {
    let text = std::fs::read_to_string(common::data_dir().join("two_qubit_oracle.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn matrix_from(case: &Value) -> ComplexMatrix {
    let re = case["re"].as_array().unwrap();
    let im = case["im"].as_array().unwrap();
    let data = re
        .iter()
        .zip(im)
        .map(|(a, b)| Complex64::new(a.as_f64().unwrap(), b.as_f64().unwrap()))
        .collect();
    ComplexMatrix::new(4, data).unwrap()
}

#[test]
fn random_two_qubit_states_match_brute_force() {
    let oracle = load_oracle();
    let cases = oracle["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 50);
    let ranks: std::collections::BTreeSet<u64> =
        cases.iter().map(|c| c["rank"].as_u64().unwrap()).collect();
    assert_eq!(ranks.into_iter().collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    for (i, case) in cases.iter().enumerate() {
        let axis: Axis = case["axis"].as_str().unwrap().parse().unwrap();
        let o = collective_operator(2, axis).unwrap();
        let rho = DensityMatrix::new(matrix_from(case)).unwrap();
        let state = SpectralState::from_density(&rho).unwrap();
        for (name, got) in [
            ("qfi", qfi(&state, &o).unwrap()),
            ("m_term", m_term(&state, &o).unwrap()),
            ("r_term", r_term(&state, &o).unwrap()),
        ] {
            let want = case[name].as_f64().unwrap();
            assert!(
                (got - want).abs() < 1e-9,
                "case {i} {name}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn werner_state_matches_brute_force() {
    let oracle = load_oracle();
    let w = &oracle["werner_q05_sz"];
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let phi = [
        Complex64::new(r, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(r, 0.0),
    ];
    let mut rho = ComplexMatrix::outer(&phi).unwrap().scale_real(0.5);
    rho.axpy(Complex64::new(0.125, 0.0), &ComplexMatrix::identity(4))
        .unwrap();
    let state = SpectralState::from_density(&DensityMatrix::new(rho).unwrap()).unwrap();
    let sz = collective_operator(2, Axis::Z).unwrap();
    assert_abs_diff_eq!(
        qfi(&state, &sz).unwrap(),
        w["qfi"].as_f64().unwrap(),
        epsilon = 1e-9
    );
    assert_abs_diff_eq!(qfi(&state, &sz).unwrap(), 4.0 / 3.0, epsilon = 1e-9);
    assert_abs_diff_eq!(m_term(&state, &sz).unwrap(), 5.0 / 12.0, epsilon = 1e-9);
    assert_abs_diff_eq!(
        r_term(&state, &sz).unwrap(),
        w["r_term"].as_f64().unwrap(),
        epsilon = 1e-9
    );
}

#[test]
fn ghz_variance_by_bit_counting() {
    // ⟨S_z^k⟩ from the magnetization of each populated basis state.
    for n in [2usize, 3, 4, 6] {
        let psi = common::ghz(n);
        let (mut m1, mut m2) = (0.0, 0.0);
        for (idx, amp) in psi.iter().enumerate() {
            let w = amp.norm_sqr();
            let sz = 0.5 * (n as f64 - 2.0 * idx.count_ones() as f64);
            m1 += w * sz;
            m2 += w * sz * sz;
        }
        let oracle = 4.0 * (m2 - m1 * m1);
        let sz = collective_operator(n, Axis::Z).unwrap();
        assert_abs_diff_eq!(qfi_pure(&psi, &sz).unwrap(), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(oracle, (n * n) as f64, epsilon = 1e-12);
    }
}

/// Characteristic polynomial coefficients c_0..c_n (monic, c_n = 1) by the
/// Faddeev–LeVerrier recursion.
fn char_poly(a: &ComplexMatrix) -> Vec<Complex64> {
    let n = a.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut m = ComplexMatrix::zeros(n);
    for k in 1..=n {
        let mut next = a.matmul(&m).unwrap();
        next.axpy(coeffs[n - k + 1], &ComplexMatrix::identity(n))
            .unwrap();
        m = next;
        coeffs[n - k] = -a.matmul(&m).unwrap().trace() / k as f64;
    }
    coeffs
}

/// All roots of a monic polynomial by Durand–Kerner iteration.
fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| {
        coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..5000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

fn sorted_real(roots: &[Complex64]) -> Vec<f64> {
    let mut v: Vec<f64> = roots.iter().map(|z| z.re).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn xxz_dimer_spectrum_from_characteristic_polynomial() {
    let h = xxz_hamiltonian(&SpinChainSpec::new(2, 1.0, 0.8, 0.0).unwrap()).unwrap();
    let roots = durand_kerner(&char_poly(&h));
    // The triplet pair at −0.2 is a double root, so Durand–Kerner only
    // converges to about the square root of machine precision there.
    for (got, want) in sorted_real(&roots).iter().zip([-0.3, -0.2, -0.2, 0.7]) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-6);
    }
    for (got, want) in eigh(&h)
        .unwrap()
        .eigenvalues()
        .iter()
        .zip([-0.3, -0.2, -0.2, 0.7])
    {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
    }
}

#[test]
fn trimer_with_field_matches_characteristic_polynomial() {
    let h = xxz_hamiltonian(&SpinChainSpec::new(3, 0.9, 0.35, 0.27).unwrap()).unwrap();
    let coeffs = char_poly(&h);
    for c in &coeffs {
        assert!(c.im.abs() < 1e-12);
    }
    let roots = sorted_real(&durand_kerner(&coeffs));
    let eig = eigh(&h).unwrap();
    for (a, b) in roots.iter().zip(eig.eigenvalues()) {
        assert_abs_diff_eq!(*a, *b, epsilon = 1e-7);
    }
}
