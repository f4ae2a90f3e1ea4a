// SPDX-License-Identifier: Apache-2.0

//! Spin-1/2 chains: site operators, collective operators, the open XXZ
//! Hamiltonian with a transverse field, jump operators and S_z-sector ground
//! states.
//!
//! Basis convention: computational z basis with site 0 as the most
//! significant bit; bit value 0 is |↑⟩ (s^z = +1/2).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, pauli, ComplexMatrix, DEGENERACY_TOL};

/// Largest chain the dense representation supports (2^12 = 4096).
pub const MAX_SITES: usize = 12;

/// Commutation tolerance for sector-restricted ground states.
pub const SECTOR_COMMUTATOR_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// s^axis = σ^axis / 2.
    pub fn spin_half(self) -> ComplexMatrix {
        let sigma = match self {
            Axis::X => pauli::sigma_x(),
            Axis::Y => pauli::sigma_y(),
            Axis::Z => pauli::sigma_z(),
        };
        sigma.scale_real(0.5)
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            _ => Err(format!("unknown axis `{s}` (expected x, y or z)")),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Single-site jump operator families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JumpKind {
    Sx,
    Sz,
}

impl JumpKind {
    pub fn axis(self) -> Axis {
        match self {
            JumpKind::Sx => Axis::X,
            JumpKind::Sz => Axis::Z,
        }
    }
}

impl fmt::Display for JumpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JumpKind::Sx => "sx",
            JumpKind::Sz => "sz",
        })
    }
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(Error::InvalidParameter {
            name: "n_sites",
            reason: format!("must be in 1..={MAX_SITES}, got {n_sites}"),
        });
    }
    Ok(())
}

/// I ⊗ … ⊗ s^axis ⊗ … ⊗ I with the spin operator in slot `site`.
pub fn site_operator(n_sites: usize, site: usize, axis: Axis) -> Result<ComplexMatrix> {
    check_sites(n_sites)?;
    if site >= n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    let id = ComplexMatrix::identity(2);
    let s = axis.spin_half();
    let mut out = if site == 0 { s.clone() } else { id.clone() };
    for j in 1..n_sites {
        out = out.kron(if j == site { &s } else { &id })?;
    }
    Ok(out)
}

/// S_axis = Σ_j s^axis_j.
pub fn collective_operator(n_sites: usize, axis: Axis) -> Result<ComplexMatrix> {
    Ok(SiteOperatorSet::new(n_sites, axis)?.collective())
}

/// The N embedded single-site operators ô(j) along one axis.
#[derive(Clone, Debug)]
pub struct SiteOperatorSet {
    n_sites: usize,
    axis: Axis,
    operators: Vec<ComplexMatrix>,
}

impl SiteOperatorSet {
    pub fn new(n_sites: usize, axis: Axis) -> Result<Self> {
        let operators = (0..n_sites)
            .map(|j| site_operator(n_sites, j, axis))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n_sites,
            axis,
            operators,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Σ_j ô(j).
    pub fn collective(&self) -> ComplexMatrix {
        let mut total = ComplexMatrix::zeros(self.dim());
        for op in &self.operators {
            total.axpy(Complex64::new(1.0, 0.0), op).unwrap();
        }
        total
    }
}

/// Parameters of the open XXZ chain
/// H = −Σ_i [ (J_x/2)(s⁺_i s⁻_{i+1} + s⁻_i s⁺_{i+1}) + J_z s^z_i s^z_{i+1} ] − h_x S_x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinChainSpec {
    pub n_sites: usize,
    pub j_x: f64,
    pub j_z: f64,
    pub h_x: f64,
}

impl SpinChainSpec {
    pub fn new(n_sites: usize, j_x: f64, j_z: f64, h_x: f64) -> Result<Self> {
        let spec = Self {
            n_sites,
            j_x,
            j_z,
            h_x,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 || self.n_sites > MAX_SITES {
            return Err(Error::InvalidParameter {
                name: "n_sites",
                reason: format!("a chain needs 2..={MAX_SITES} sites, got {}", self.n_sites),
            });
        }
        for (name, v) in [("j_x", self.j_x), ("j_z", self.j_z), ("h_x", self.h_x)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }
}

/// Builds the XXZ Hamiltonian. With s± = s^x ± i s^y the flip-flop term
/// s⁺s⁻ + s⁻s⁺ equals 2(s^x s^x + s^y s^y), which is what gets assembled.
pub fn xxz_hamiltonian(spec: &SpinChainSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let n = spec.n_sites;
    let sx = SiteOperatorSet::new(n, Axis::X)?;
    let sy = SiteOperatorSet::new(n, Axis::Y)?;
    let sz = SiteOperatorSet::new(n, Axis::Z)?;

    let mut h = ComplexMatrix::zeros(spec.dim());
    for i in 0..n - 1 {
        let xx = sx.operators()[i].matmul(&sx.operators()[i + 1])?;
        let yy = sy.operators()[i].matmul(&sy.operators()[i + 1])?;
        let zz = sz.operators()[i].matmul(&sz.operators()[i + 1])?;
        h.axpy(Complex64::new(-spec.j_x, 0.0), &xx)?;
        h.axpy(Complex64::new(-spec.j_x, 0.0), &yy)?;
        h.axpy(Complex64::new(-spec.j_z, 0.0), &zz)?;
    }
    if spec.h_x != 0.0 {
        h.axpy(Complex64::new(-spec.h_x, 0.0), &sx.collective())?;
    }
    Ok(h)
}

/// The N single-site jump operators of one family.
pub fn jump_operators(n_sites: usize, kind: JumpKind) -> Result<Vec<ComplexMatrix>> {
    Ok(SiteOperatorSet::new(n_sites, kind.axis())?.operators)
}

/// Spin-flip parity P = Π_j (2 s^z_j), diagonal with entries (−1)^{#down}.
pub fn spin_flip_parity(n_sites: usize) -> Result<ComplexMatrix> {
    check_sites(n_sites)?;
    let diag: Vec<f64> = (0..1usize << n_sites)
        .map(|b| if b.count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    Ok(ComplexMatrix::from_diagonal(&diag))
}

/// 2·S_z of a computational basis state.
pub fn twice_magnetization(n_sites: usize, basis_index: usize) -> i64 {
    n_sites as i64 - 2 * basis_index.count_ones() as i64
}

/// Basis indices with the requested 2·S_z, in ascending order.
pub fn sector_basis(n_sites: usize, sector: i64) -> Vec<usize> {
    (0..1usize << n_sites)
        .filter(|&b| twice_magnetization(n_sites, b) == sector)
        .collect()
}

fn sites_for_dim(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::InvalidParameter {
            name: "hamiltonian",
            reason: format!("dimension {dim} is not 2^N for a chain"),
        });
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Lowest eigenvector of `h`, optionally restricted to the 2·S_z = `sector`
/// eigenspace. Fails on a degenerate lowest level rather than choosing.
pub fn ground_state_vector(h: &ComplexMatrix, sector: Option<i64>) -> Result<Vec<Complex64>> {
    let dim = h.dim();
    let n_sites = sites_for_dim(dim)?;

    let Some(sector) = sector else {
        let e = eigh(h)?;
        check_gap(e.eigenvalues())?;
        return Ok(e.eigenvector(0));
    };

    let sz = collective_operator(n_sites, Axis::Z)?;
    let comm = h.commutator(&sz)?.frobenius_norm();
    if comm > SECTOR_COMMUTATOR_TOL {
        return Err(Error::SectorNotConserved { norm: comm });
    }
    let basis = sector_basis(n_sites, sector);
    if basis.is_empty() {
        return Err(Error::EmptySector { sector, n_sites });
    }
    let block = ComplexMatrix::from_fn(basis.len(), |a, b| h[(basis[a], basis[b])])?;
    let e = eigh(&block)?;
    check_gap(e.eigenvalues())?;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    for (k, &idx) in basis.iter().enumerate() {
        psi[idx] = e.vectors()[(k, 0)];
    }
    Ok(psi)
}

/// ρ = |g⟩⟨g| for the (sector-restricted) ground state.
pub fn ground_state(h: &ComplexMatrix, sector: Option<i64>) -> Result<ComplexMatrix> {
    ComplexMatrix::outer(&ground_state_vector(h, sector)?)
}

fn check_gap(eigenvalues: &[f64]) -> Result<()> {
    if eigenvalues.len() > 1 {
        let gap = eigenvalues[1] - eigenvalues[0];
        if gap < DEGENERACY_TOL {
            return Err(Error::DegenerateGroundState { gap });
        }
    }
    Ok(())
}
