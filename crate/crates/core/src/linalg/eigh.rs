// SPDX-License-Identifier: Apache-2.0

//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation zeroes one off-diagonal pair (p, q) with the unitary
//! `U = D R D†`, where `D = diag(1, e^{-iφ})` strips the phase of `a_pq` and
//! `R` is the real Jacobi rotation of the resulting symmetric 2×2 block.
//! Only rows and columns p, q are touched, so exact zero blocks (symmetry
//! sectors) are never mixed.
//!
//! Output conventions:
//! - eigenvalues ascending, ties kept in the order the sweep left them;
//! - eigenvectors inside clusters closer than [`DEGENERACY_TOL`] are
//!   re-orthonormalized by Gram–Schmidt in index order;
//! - every eigenvector is rotated so its largest-magnitude component is real
//!   and positive (lowest index wins a tie).

use num_complex::Complex64;

use super::{inner, ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Sweep cap before reporting non-convergence.
pub const MAX_SWEEPS: usize = 100;

/// Relative off-diagonal threshold, scaled by the matrix max-abs.
const REL_TOL: f64 = 1e-13;

/// Eigenvalues closer than this form a degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Spectral data of a Hermitian matrix.
///
/// Column `j` of [`vectors`](Self::vectors) pairs with `eigenvalues()[j]`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    vectors: ComplexMatrix,
    sweeps: usize,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    pub fn eigenvector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j)
    }

    /// Number of Jacobi sweeps that were needed.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// V Λ V†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(&self.eigenvalues)
    }

    /// V diag(values) V†, for a modified spectrum on the same eigenbasis.
    pub fn reconstruct_with(&self, values: &[f64]) -> ComplexMatrix {
        let n = self.dim();
        assert_eq!(values.len(), n);
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for (k, &lam) in values.iter().enumerate() {
                    acc += v[(i, k)] * v[(j, k)].conj() * lam;
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// `V† A V`: the matrix elements ⟨λ|A|ν⟩ in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let av = a.matmul(&self.vectors)?;
        self.vectors.adjoint().matmul(&av)
    }
}

/// Diagonalizes a Hermitian matrix.
///
/// The input is symmetrized as (h + h†)/2 before iterating, so tiny
/// anti-Hermitian noise is discarded rather than propagated.
pub fn eigh(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let tol = REL_TOL * a.max_abs();
    let mut sweeps = 0;
    loop {
        let off = max_off_diagonal(&a);
        if off <= tol {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged {
                sweeps,
                residual: off,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut columns: Vec<Vec<Complex64>> = order.iter().map(|&k| v.column(k)).collect();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] < DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(&mut columns[start..end]);
        }
        start = end;
    }

    for col in columns.iter_mut() {
        fix_phase(col);
    }

    let mut vectors = ComplexMatrix::zeros(n);
    for (j, col) in columns.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            vectors[(i, j)] = z;
        }
    }

    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
        sweeps,
    })
}

fn max_off_diagonal(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut off: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            off = off.max(a[(i, j)].norm());
        }
    }
    off
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let s_ph = phase * s;
    let s_ph_conj = phase.conj() * s;
    let n = a.dim();

    // A <- A U
    for k in 0..n {
        let x = a[(k, p)];
        let y = a[(k, q)];
        a[(k, p)] = x * c - s_ph_conj * y;
        a[(k, q)] = s_ph * x + y * c;
    }
    // A <- U† A
    for k in 0..n {
        let x = a[(p, k)];
        let y = a[(q, k)];
        a[(p, k)] = x * c - s_ph * y;
        a[(q, k)] = s_ph_conj * x + y * c;
    }
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;

    // V <- V U
    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * c - s_ph_conj * y;
        v[(k, q)] = s_ph * x + y * c;
    }
}

fn gram_schmidt(cols: &mut [Vec<Complex64>]) {
    for j in 0..cols.len() {
        let (done, rest) = cols.split_at_mut(j);
        let current = &mut rest[0];
        for prev in done.iter() {
            let proj = inner(prev, current);
            for (c, p) in current.iter_mut().zip(prev) {
                *c -= proj * p;
            }
        }
        let norm = super::norm(current);
        for c in current.iter_mut() {
            *c /= norm;
        }
    }
}

fn fix_phase(col: &mut [Complex64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in col.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let rot = col[best].conj() / best_mag;
    for z in col.iter_mut() {
        *z *= rot;
    }
    col[best] = Complex64::new(best_mag, 0.0);
}
