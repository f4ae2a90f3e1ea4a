// SPDX-License-Identifier: Apache-2.0

//! Random states and fixtures shared by the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64;
use producibility_lab::cli::{load_config, ScenarioConfig};
use producibility_lab::linalg::{norm, ComplexMatrix};
use producibility_lab::spin::Axis;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
}

pub fn shipped_config(name: &str) -> ScenarioConfig {
    load_config(configs_dir().join(format!("{name}.cfg"))).unwrap()
}

/// Haar-distributed pure state: a normalized complex Gaussian vector.
pub fn haar_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Random mixture of `rank` Haar vectors with random weights.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> ComplexMatrix {
    let weights: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = ComplexMatrix::zeros(dim);
    for w in weights {
        let v = haar_vector(rng, dim);
        rho.axpy(
            Complex64::new(w / total, 0.0),
            &ComplexMatrix::outer(&v).unwrap(),
        )
        .unwrap();
    }
    rho.hermitian_part()
}

pub fn ghz(n_sites: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << n_sites];
    let r = std::f64::consts::FRAC_1_SQRT_2;
    v[0] = Complex64::new(r, 0.0);
    v[(1 << n_sites) - 1] = Complex64::new(r, 0.0);
    v
}

pub fn axis(k: usize) -> Axis {
    [Axis::X, Axis::Y, Axis::Z][k % 3]
}
