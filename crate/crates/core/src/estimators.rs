// SPDX-License-Identifier: Apache-2.0

//! Producibility estimators for mixed states.
//!
//! Everything is evaluated from the spectral decomposition ρ = Σ p_λ |λ⟩⟨λ|
//! with a collective generator Ô = Σ_x ô(x):
//!
//! | quantity      | definition                                                    |
//! |---------------|---------------------------------------------------------------|
//! | `qfi`         | 2 Σ_{λν} (p_λ − p_ν)²/(p_λ + p_ν) · \|⟨λ\|Ô\|ν⟩\|²            |
//! | `m_term`      | Σ_λ p_λ Σ_ν 2p_ν/(p_λ + p_ν) · \|⟨λ\|Ô\|ν⟩\|²                 |
//! | `r_term`      | M − Σ_λ p_λ ⟨λ\|Ô\|λ⟩²                                         |
//! | `f1`          | 4 Tr[ρ Ô²]                                                     |
//! | `f2_diag`     | 4 Σ_λ p_λ ⟨λ\|Ô\|λ⟩²                                           |
//! | `f_tilde`     | 4 Σ_λ p_λ Σ_{x,y} C_λ(x, y)                                    |
//! | `abs_f_tilde` | 4 Σ_{x,y} \|Σ_λ p_λ C_λ(x, y)\|                                |
//! | `f_bar`       | 4 Σ_λ p_λ Σ_{x,y} \|C_λ(x, y)\|                                |
//! | `variance4`   | 4 (Tr[ρ Ô²] − Tr[ρ Ô]²)                                        |
//!
//! where C_λ(x, y) = ⟨λ|ô(x)ô(y)|λ⟩ − ⟨λ|ô(x)|λ⟩⟨λ|ô(y)|λ⟩ is the connected
//! correlation in eigenstate λ.
//!
//! On a finite chain the asymptotic two-point term of the F̃ definition has no
//! meaning, so F̃ is evaluated with the one-point products subtracted per
//! eigenvector, i.e. what that term reduces to under cluster decomposition.
//! F̃ is therefore tied to the eigenbasis of ρ and is not covariant in general.
//!
//! The double site sum in `qfi`, `m_term` and `r_term` collapses exactly to
//! matrix elements of Ô, so those cost O(d³); the F̃ family keeps the per-site
//! loop.

use num_complex::Complex64;

use crate::dynamics::{DensityMatrix, TOL_POS};
use crate::error::{Error, Result};
use crate::linalg::{inner, norm, ComplexMatrix, EigenDecomposition};
use crate::spin::SiteOperatorSet;

/// Default probability below which an eigenstate counts as unpopulated.
pub const DEFAULT_P_FLOOR: f64 = 1e-12;

/// Tolerance for the imaginary residue of real expectation values.
pub const IMAG_TOL: f64 = 1e-8;

/// Spectral data of a state with probabilities clipped to [0, 1] and
/// renormalized.
#[derive(Clone, Debug)]
pub struct SpectralState {
    eig: EigenDecomposition,
    probabilities: Vec<f64>,
    p_floor: f64,
    clipped: usize,
}

impl SpectralState {
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        Self::from_decomposition(rho.spectrum().clone())
    }

    /// Eigenvalues in [−TOL_POS, 0) are set to zero and counted in
    /// [`clipped_count`](Self::clipped_count); anything more negative is an
    /// error.
    pub fn from_decomposition(eig: EigenDecomposition) -> Result<Self> {
        let mut clipped = 0;
        let mut probabilities = Vec::with_capacity(eig.dim());
        for &p in eig.eigenvalues() {
            if p < -TOL_POS {
                return Err(Error::NotPositive {
                    min_eigenvalue: p,
                    tol: TOL_POS,
                });
            }
            if p < 0.0 {
                clipped += 1;
            }
            probabilities.push(p.clamp(0.0, 1.0));
        }
        let total: f64 = probabilities.iter().sum();
        if total <= 0.0 {
            return Err(Error::TraceMismatch {
                trace: total,
                tol: 0.0,
            });
        }
        for p in probabilities.iter_mut() {
            *p /= total;
        }
        Ok(Self {
            eig,
            probabilities,
            p_floor: DEFAULT_P_FLOOR,
            clipped,
        })
    }

    pub fn with_p_floor(mut self, p_floor: f64) -> Self {
        self.p_floor = p_floor;
        self
    }

    pub fn dim(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn p_floor(&self) -> f64 {
        self.p_floor
    }

    /// Number of slightly negative eigenvalues that were set to zero.
    pub fn clipped_count(&self) -> usize {
        self.clipped
    }

    /// Indices of eigenstates with p_λ above the floor.
    pub fn populated(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probabilities
            .iter()
            .copied()
            .enumerate()
            .filter(move |&(_, p)| p > self.p_floor)
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: dim,
            });
        }
        Ok(())
    }
}

/// Ô in the eigenbasis of ρ, shared by the pair-sum estimators.
struct Projected<'a> {
    state: &'a SpectralState,
    elems: ComplexMatrix,
}

impl<'a> Projected<'a> {
    fn new(state: &'a SpectralState, big_o: &ComplexMatrix) -> Result<Self> {
        state.check_dim(big_o.dim())?;
        Ok(Self {
            state,
            elems: state.eig.to_eigenbasis(big_o)?,
        })
    }

    fn pair_sum(&self, weight: impl Fn(f64, f64) -> f64) -> f64 {
        let p = &self.state.probabilities;
        let floor = self.state.p_floor;
        let mut total = 0.0;
        for (l, &pl) in p.iter().enumerate() {
            for (n, &pn) in p.iter().enumerate() {
                if pl + pn <= floor {
                    continue;
                }
                total += weight(pl, pn) * self.elems[(l, n)].norm_sqr();
            }
        }
        total
    }

    fn qfi(&self) -> f64 {
        2.0 * self.pair_sum(|pl, pn| (pl - pn).powi(2) / (pl + pn))
    }

    fn m_term(&self) -> f64 {
        self.pair_sum(|pl, pn| pl * 2.0 * pn / (pl + pn))
    }

    /// Σ_λ p_λ ⟨λ|Ô|λ⟩² over populated eigenstates.
    fn diagonal_term(&self) -> f64 {
        self.state
            .populated()
            .map(|(l, p)| p * self.elems[(l, l)].re.powi(2))
            .sum()
    }
}

fn real_expectation(value: Complex64) -> Result<f64> {
    if value.im.abs() > IMAG_TOL {
        return Err(Error::ComplexExpectation {
            imag: value.im,
            tol: IMAG_TOL,
        });
    }
    Ok(value.re)
}

/// 4 Var_ψ(Ô) for a normalized pure state.
pub fn qfi_pure(psi: &[Complex64], big_o: &ComplexMatrix) -> Result<f64> {
    let n = norm(psi);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized {
            norm: n,
            tol: 1e-10,
        });
    }
    let o_psi = big_o.apply(psi)?;
    let second = norm(&o_psi).powi(2);
    let first = real_expectation(inner(psi, &o_psi))?;
    Ok(4.0 * (second - first * first))
}

/// Mixed-state QFI from the spectral formula.
pub fn qfi(state: &SpectralState, big_o: &ComplexMatrix) -> Result<f64> {
    Ok(Projected::new(state, big_o)?.qfi())
}

pub fn m_term(state: &SpectralState, big_o: &ComplexMatrix) -> Result<f64> {
    Ok(Projected::new(state, big_o)?.m_term())
}

pub fn r_term(state: &SpectralState, big_o: &ComplexMatrix) -> Result<f64> {
    let proj = Projected::new(state, big_o)?;
    Ok(proj.m_term() - proj.diagonal_term())
}

/// 4 Σ_λ p_λ ⟨λ|Ô|λ⟩² in the eigenbasis of ρ.
pub fn f2_diag(state: &SpectralState, big_o: &ComplexMatrix) -> Result<f64> {
    Ok(4.0 * Projected::new(state, big_o)?.diagonal_term())
}

/// Tr[ρ A] for a Hermitian A, with the imaginary residue checked.
fn trace_product(rho: &ComplexMatrix, a: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: a.dim(),
        });
    }
    let n = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho[(i, j)] * a[(j, i)];
        }
    }
    real_expectation(acc)
}

/// 4 Tr[ρ Ô²].
pub fn f1(rho: &DensityMatrix, big_o: &ComplexMatrix) -> Result<f64> {
    let o2 = big_o.matmul(big_o)?;
    Ok(4.0 * trace_product(rho.matrix(), &o2)?)
}

/// 4 (Tr[ρ Ô²] − Tr[ρ Ô]²).
pub fn variance4(rho: &DensityMatrix, big_o: &ComplexMatrix) -> Result<f64> {
    let o2 = big_o.matmul(big_o)?;
    let second = trace_product(rho.matrix(), &o2)?;
    let first = trace_product(rho.matrix(), big_o)?;
    Ok(4.0 * (second - first * first))
}

/// Connected two-point function C(x, y) = ⟨ô(x)ô(y)⟩ − ⟨ô(x)⟩⟨ô(y)⟩ of one
/// pure state, for every pair of sites.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectedCorrelations {
    n_sites: usize,
    values: Vec<f64>,
}

impl ConnectedCorrelations {
    pub fn of_state(psi: &[Complex64], sites: &SiteOperatorSet) -> Result<Self> {
        let n = sites.n_sites();
        let applied = sites
            .operators()
            .iter()
            .map(|op| op.apply(psi))
            .collect::<Result<Vec<_>>>()?;
        let one_point: Vec<f64> = applied.iter().map(|v| inner(psi, v).re).collect();
        let mut values = vec![0.0; n * n];
        for x in 0..n {
            for y in x..n {
                // ô Hermitian: ⟨ψ|ô(x)ô(y)|ψ⟩ = ⟨ô(x)ψ|ô(y)ψ⟩. Sites commute, so
                // the value is real and symmetric in (x, y).
                let c = inner(&applied[x], &applied[y]).re - one_point[x] * one_point[y];
                values[x * n + y] = c;
                values[y * n + x] = c;
            }
        }
        Ok(Self { n_sites: n, values })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.n_sites + y]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn abs_sum(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }
}

/// Per-eigenstate connected correlations with their weights.
struct CorrelationTable {
    n_sites: usize,
    entries: Vec<(f64, ConnectedCorrelations)>,
}

impl CorrelationTable {
    fn new(state: &SpectralState, sites: &SiteOperatorSet) -> Result<Self> {
        state.check_dim(sites.dim())?;
        let entries = state
            .populated()
            .map(|(l, p)| {
                Ok((
                    p,
                    ConnectedCorrelations::of_state(&state.eig.eigenvector(l), sites)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n_sites: sites.n_sites(),
            entries,
        })
    }

    fn f_tilde(&self) -> f64 {
        4.0 * self.entries.iter().map(|(p, c)| p * c.sum()).sum::<f64>()
    }

    fn abs_f_tilde(&self) -> f64 {
        let n = self.n_sites;
        let mut averaged = vec![0.0; n * n];
        for (p, c) in &self.entries {
            for (a, v) in averaged.iter_mut().zip(c.values()) {
                *a += p * v;
            }
        }
        4.0 * averaged.iter().map(|v| v.abs()).sum::<f64>()
    }

    fn f_bar(&self) -> f64 {
        4.0 * self
            .entries
            .iter()
            .map(|(p, c)| p * c.abs_sum())
            .sum::<f64>()
    }
}

/// F̃: weighted sum of per-eigenstate connected correlations.
pub fn f_tilde(state: &SpectralState, sites: &SiteOperatorSet) -> Result<f64> {
    Ok(CorrelationTable::new(state, sites)?.f_tilde())
}

/// |F̃|: absolute value per site pair, taken after the eigenstate average.
pub fn abs_f_tilde(state: &SpectralState, sites: &SiteOperatorSet) -> Result<f64> {
    Ok(CorrelationTable::new(state, sites)?.abs_f_tilde())
}

/// F̄: absolute value per eigenstate and site pair.
pub fn f_bar(state: &SpectralState, sites: &SiteOperatorSet) -> Result<f64> {
    Ok(CorrelationTable::new(state, sites)?.f_bar())
}

/// Every estimator at one time point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorReport {
    pub t: f64,
    pub qfi: f64,
    pub f1: f64,
    pub f2_diag: f64,
    pub f_tilde: f64,
    pub m_term: f64,
    pub r_term: f64,
    pub var4: f64,
    pub abs_f_tilde: f64,
    pub f_bar: f64,
}

/// Tolerance for the internal consistency relations of a report.
pub const IDENTITY_TOL: f64 = 1e-9;

impl EstimatorReport {
    /// Evaluates all estimators for Ô = Σ_x ô(x) built from `sites`.
    pub fn evaluate(t: f64, rho: &DensityMatrix, sites: &SiteOperatorSet) -> Result<Self> {
        let big_o = sites.collective();
        let state = SpectralState::from_density(rho)?;
        let proj = Projected::new(&state, &big_o)?;
        let table = CorrelationTable::new(&state, sites)?;
        let m = proj.m_term();
        let diag = proj.diagonal_term();
        Ok(Self {
            t,
            qfi: proj.qfi(),
            f1: f1(rho, &big_o)?,
            f2_diag: 4.0 * diag,
            f_tilde: table.f_tilde(),
            m_term: m,
            r_term: m - diag,
            var4: variance4(rho, &big_o)?,
            abs_f_tilde: table.abs_f_tilde(),
            f_bar: table.f_bar(),
        })
    }

    /// Re-checks the algebraic relations between the fields.
    pub fn check_identities(&self, tol: f64) -> Result<()> {
        let checks: [(&'static str, f64); 8] = [
            (
                "f_tilde = f1 - f2_diag",
                self.f_tilde - (self.f1 - self.f2_diag),
            ),
            (
                "f2_diag = 4(m - r)",
                self.f2_diag - 4.0 * (self.m_term - self.r_term),
            ),
            (
                "qfi = f_tilde - 4r",
                self.qfi - (self.f_tilde - 4.0 * self.r_term),
            ),
            ("qfi = f1 - 4m", self.qfi - (self.f1 - 4.0 * self.m_term)),
            (
                "f_tilde <= abs_f_tilde",
                (self.f_tilde - self.abs_f_tilde).max(0.0),
            ),
            (
                "abs_f_tilde <= f_bar",
                (self.abs_f_tilde - self.f_bar).max(0.0),
            ),
            ("m >= 0", (-self.m_term - 1e-12).max(0.0)),
            ("r >= 0", (-self.r_term - 1e-12).max(0.0)),
        ];
        for (identity, deviation) in checks {
            if deviation.abs() > tol || !deviation.is_finite() {
                return Err(Error::IdentityViolated {
                    identity,
                    deviation,
                    t: self.t,
                });
            }
        }
        Ok(())
    }
}
