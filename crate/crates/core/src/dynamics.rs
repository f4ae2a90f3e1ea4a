// SPDX-License-Identifier: Apache-2.0

//! GKSL (Lindblad) time evolution of density matrices with fixed-step RK4.
//!
//! The generator is dρ/dt = −i[H, ρ] + Σ_m γ_m (L_m ρ L_m† − ½{L_m† L_m, ρ})
//! with ħ = 1. It is evaluated through the effective non-Hermitian
//! Hamiltonian H_eff = H − (i/2) Σ γ L†L, so each call costs two products
//! with H_eff plus two sparse products per jump operator.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, write_cmx, ComplexMatrix, EigenDecomposition, I};
use crate::spin::{jump_operators, JumpKind};

/// Entrywise Hermiticity tolerance for a valid state.
pub const TOL_HERM: f64 = 1e-10;
/// Allowed deviation of the trace from 1.
pub const TOL_TRACE: f64 = 1e-9;
/// Most negative eigenvalue still accepted as rounding noise.
pub const TOL_POS: f64 = 1e-9;

/// A validated density matrix: Hermitian, unit trace, positive semidefinite
/// within the tolerances above. The spectrum computed during validation is
/// kept so estimators do not diagonalize twice.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: EigenDecomposition,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermiticity_deviation();
        if deviation > TOL_HERM {
            return Err(Error::NotHermitian {
                deviation,
                tol: TOL_HERM,
            });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TOL_TRACE {
            return Err(Error::TraceMismatch {
                trace,
                tol: TOL_TRACE,
            });
        }
        let spectrum = eigh(&matrix)?;
        let min_eigenvalue = spectrum.eigenvalues()[0];
        if min_eigenvalue < -TOL_POS {
            return Err(Error::NotPositive {
                min_eigenvalue,
                tol: TOL_POS,
            });
        }
        Ok(Self { matrix, spectrum })
    }

    /// |ψ⟩⟨ψ| for a normalized state vector.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let norm = crate::linalg::norm(psi);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Unnormalized { norm, tol: 1e-10 });
        }
        Self::new(ComplexMatrix::outer(psi)?)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
            .expect("I/d is a valid state")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &EigenDecomposition {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum.eigenvalues()[0]
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.spectrum.eigenvalues().iter().map(|p| p * p).sum()
    }
}

/// One dissipation channel: a family of single-site jump operators and its
/// rate in units of J_x/ħ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Channel {
    pub kind: JumpKind,
    pub rate: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DissipationSpec {
    channels: Vec<Channel>,
}

impl DissipationSpec {
    /// Rate used by the shipped scenarios for whichever channel they enable.
    pub const DEFAULT_RATE: f64 = 0.1;

    pub fn new(channels: Vec<Channel>) -> Result<Self> {
        for ch in &channels {
            check_rate(ch.rate)?;
        }
        Ok(Self { channels })
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn single(kind: JumpKind, rate: f64) -> Result<Self> {
        Self::new(vec![Channel { kind, rate }])
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn rate(&self, kind: JumpKind) -> f64 {
        self.channels
            .iter()
            .filter(|c| c.kind == kind)
            .map(|c| c.rate)
            .sum()
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "rate",
            reason: format!("dissipation rates must be finite and non-negative, got {rate}"),
        });
    }
    Ok(())
}

/// Fixed-step integration settings. Time is in units of ħ/J_x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub sample_every: usize,
    pub sanitize_every: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            n_steps: 1000,
            sample_every: 10,
            sanitize_every: 1,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt", format!("must be positive, got {}", self.dt));
        }
        if self.sample_every == 0 {
            return bad("sample_every", "must be positive".into());
        }
        if self.sanitize_every == 0 {
            return bad("sanitize_every", "must be positive".into());
        }
        if self.n_steps > 0 && self.sample_every > self.n_steps {
            return bad(
                "sample_every",
                format!("{} exceeds n_steps = {}", self.sample_every, self.n_steps),
            );
        }
        Ok(())
    }
}

/// The Lindblad generator for a fixed Hamiltonian and set of jump operators.
#[derive(Clone, Debug)]
pub struct Lindbladian {
    h_eff: ComplexMatrix,
    jumps: Vec<(f64, ComplexMatrix)>,
}

impl Lindbladian {
    /// Builds the generator for a spin chain: every channel in `diss` adds
    /// its N single-site operators at the channel rate.
    pub fn new(h: &ComplexMatrix, diss: &DissipationSpec) -> Result<Self> {
        let dim = h.dim();
        if !dim.is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "hamiltonian",
                reason: format!("dimension {dim} is not 2^N"),
            });
        }
        let n_sites = dim.trailing_zeros() as usize;
        let mut jumps = Vec::new();
        for ch in diss.channels() {
            if ch.rate == 0.0 {
                continue;
            }
            for op in jump_operators(n_sites, ch.kind)? {
                jumps.push((ch.rate, op));
            }
        }
        Self::from_jumps(h, jumps)
    }

    /// Generator with explicit (rate, L) pairs.
    pub fn from_jumps(h: &ComplexMatrix, jumps: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        let mut h_eff = h.clone();
        for (rate, l) in &jumps {
            check_rate(*rate)?;
            let ldl = l.adjoint().matmul(l)?;
            h_eff.axpy(Complex64::new(0.0, -0.5 * rate), &ldl)?;
        }
        Ok(Self { h_eff, jumps })
    }

    pub fn dim(&self) -> usize {
        self.h_eff.dim()
    }

    /// dρ/dt for an arbitrary (not necessarily Hermitian) matrix argument.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: rho.dim(),
            });
        }
        Ok(self.rhs(rho))
    }

    fn rhs(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        // −i H_eff ρ + i ρ H_eff†, with ρ H_eff† = (H_eff ρ†)†.
        let left = self.h_eff.matmul(rho).unwrap();
        let right = self.h_eff.matmul(&rho.adjoint()).unwrap().adjoint();
        let mut out = left.scale(-I);
        out.axpy(I, &right).unwrap();
        for (rate, l) in &self.jumps {
            // L ρ L† = (L (L ρ)†)†
            let l_rho = l.matmul(rho).unwrap();
            let sandwich = l.matmul(&l_rho.adjoint()).unwrap().adjoint();
            out.axpy(Complex64::new(*rate, 0.0), &sandwich).unwrap();
        }
        out
    }
}

/// dρ/dt under the spin-chain generator built from `h` and `diss`.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    h: &ComplexMatrix,
    diss: &DissipationSpec,
) -> Result<ComplexMatrix> {
    Lindbladian::new(h, diss)?.apply(rho.matrix())
}

/// One classical RK4 step ρ + dt (k₁ + 2k₂ + 2k₃ + k₄)/6.
pub fn rk4_step<F>(rho: &ComplexMatrix, dt: f64, mut rhs: F) -> ComplexMatrix
where
    F: FnMut(&ComplexMatrix) -> ComplexMatrix,
{
    let half = Complex64::new(0.5 * dt, 0.0);
    let k1 = rhs(rho);
    let mut stage = rho.clone();
    stage.axpy(half, &k1).unwrap();
    let k2 = rhs(&stage);
    let mut stage = rho.clone();
    stage.axpy(half, &k2).unwrap();
    let k3 = rhs(&stage);
    let mut stage = rho.clone();
    stage.axpy(Complex64::new(dt, 0.0), &k3).unwrap();
    let k4 = rhs(&stage);

    let mut incr = k1;
    incr.axpy(Complex64::new(2.0, 0.0), &k2).unwrap();
    incr.axpy(Complex64::new(2.0, 0.0), &k3).unwrap();
    incr.axpy(Complex64::new(1.0, 0.0), &k4).unwrap();
    let mut out = rho.clone();
    out.axpy(Complex64::new(dt / 6.0, 0.0), &incr).unwrap();
    out
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub step: usize,
    pub t: f64,
    pub state: DensityMatrix,
}

/// Drift measured during integration, before any sanitation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EvolutionDiagnostics {
    /// Largest |Tr ρ_{n+1} − Tr ρ_n| over all steps.
    pub max_trace_drift_per_step: f64,
    /// Largest growth of the entrywise Hermiticity deviation in one step.
    pub max_hermiticity_drift_per_step: f64,
    /// Largest |Tr ρ − 1| seen at a sample time.
    pub max_sample_trace_error: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub diagnostics: EvolutionDiagnostics,
}

impl Trajectory {
    /// Writes every sample as `<prefix>_t<step>.cmx`.
    pub fn write_checkpoints(&self, prefix: &str) -> Result<Vec<String>> {
        self.samples
            .iter()
            .map(|s| {
                let path = format!("{prefix}_t{}.cmx", s.step);
                write_cmx(Path::new(&path), s.state.matrix())?;
                Ok(path)
            })
            .collect()
    }
}

/// Symmetrizes and renormalizes the trace; negative eigenvalues are left
/// alone for the estimators to handle.
pub fn sanitize(rho: &ComplexMatrix) -> ComplexMatrix {
    let h = rho.hermitian_part();
    let tr = h.trace().re;
    h.scale_real(1.0 / tr)
}

/// Integrates from `rho0` and samples every `cfg.sample_every` steps,
/// starting with t = 0.
pub fn evolve(
    rho0: &DensityMatrix,
    generator: &Lindbladian,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    if rho0.dim() != generator.dim() {
        return Err(Error::DimensionMismatch {
            left: generator.dim(),
            right: rho0.dim(),
        });
    }
    let mut diagnostics = EvolutionDiagnostics::default();
    let mut samples = vec![Sample {
        step: 0,
        t: 0.0,
        state: rho0.clone(),
    }];

    let mut rho = rho0.matrix().clone();
    for step in 1..=cfg.n_steps {
        let next = rk4_step(&rho, cfg.dt, |r| generator.rhs(r));
        if !next.is_finite() {
            let pos = next
                .as_slice()
                .iter()
                .position(|z| !z.re.is_finite() || !z.im.is_finite())
                .unwrap_or(0);
            let dim = next.dim();
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            }
            .at_stage("evolve", step));
        }
        diagnostics.max_trace_drift_per_step = diagnostics
            .max_trace_drift_per_step
            .max((next.trace() - rho.trace()).norm());
        diagnostics.max_hermiticity_drift_per_step = diagnostics
            .max_hermiticity_drift_per_step
            .max(next.hermiticity_deviation() - rho.hermiticity_deviation());
        rho = next;

        let sample_now = step % cfg.sample_every == 0;
        if sample_now {
            diagnostics.max_sample_trace_error = diagnostics
                .max_sample_trace_error
                .max((rho.trace().re - 1.0).abs());
        }
        if step % cfg.sanitize_every == 0 {
            rho = sanitize(&rho);
        }
        if sample_now {
            let state =
                DensityMatrix::new(sanitize(&rho)).map_err(|e| e.at_stage("evolve", step))?;
            samples.push(Sample {
                step,
                t: step as f64 * cfg.dt,
                state,
            });
        }
    }
    Ok(Trajectory {
        samples,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use crate::spin::{site_operator, xxz_hamiltonian, Axis, SpinChainSpec};

    fn plus_state() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]])).unwrap()
    }

    fn dephasing_qubit() -> Lindbladian {
        let sz = site_operator(1, 0, Axis::Z).unwrap();
        Lindbladian::from_jumps(&ComplexMatrix::zeros(2), vec![(1.0, sz)]).unwrap()
    }

    #[test]
    fn density_matrix_validation() {
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::from_real_rows(&[[0.5, 0.1], [0.0, 0.5]])),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::from_real_rows(&[[0.5, 0.0], [0.0, 0.6]])),
            Err(Error::TraceMismatch { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::from_real_rows(&[[1.1, 0.0], [0.0, -0.1]])),
            Err(Error::NotPositive { .. })
        ));
        assert!(DensityMatrix::from_pure(&[ONE, ONE]).is_err());
        let mm = DensityMatrix::maximally_mixed(4);
        assert!((mm.purity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn stationary_state_has_zero_rhs() {
        // H = S_z commutes with a z-basis mixture; no dissipation.
        let h = crate::spin::collective_operator(2, Axis::Z).unwrap();
        let rho = DensityMatrix::new(ComplexMatrix::from_diagonal(&[0.1, 0.2, 0.3, 0.4])).unwrap();
        let diss = DissipationSpec::single(JumpKind::Sx, 0.0).unwrap();
        let d = lindblad_rhs(&rho, &h, &diss).unwrap();
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn dephasing_rhs_by_hand() {
        // L = σ_z/2: L ρ L − ½{L², ρ} on |+⟩⟨+| removes ρ₀₁/2 per unit rate.
        let d = dephasing_qubit().apply(plus_state().matrix()).unwrap();
        assert!((d[(0, 1)] - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
        assert!((d[(1, 0)] - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
        assert!(d[(0, 0)].norm() < 1e-15 && d[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn rhs_is_traceless_and_hermitian() {
        let h = xxz_hamiltonian(&SpinChainSpec::new(3, 1.0, 0.8, 0.3).unwrap()).unwrap();
        let diss = DissipationSpec::new(vec![
            Channel {
                kind: JumpKind::Sx,
                rate: 0.2,
            },
            Channel {
                kind: JumpKind::Sz,
                rate: 0.7,
            },
        ])
        .unwrap();
        let gen = Lindbladian::new(&h, &diss).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = ComplexMatrix::from_fn(8, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .unwrap();
            let rho = a.matmul(&a.adjoint()).unwrap();
            let rho = rho.scale_real(1.0 / rho.trace().re);
            let d = gen.apply(&rho).unwrap();
            assert!(d.trace().norm() < 1e-12);
            assert!(d.hermiticity_deviation() < 1e-12);
        }
    }

    #[test]
    fn negative_rate_rejected() {
        assert!(DissipationSpec::single(JumpKind::Sz, -0.1).is_err());
        let l = site_operator(1, 0, Axis::Z).unwrap();
        assert!(Lindbladian::from_jumps(&ComplexMatrix::zeros(2), vec![(-1.0, l)]).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let gen = dephasing_qubit();
        assert!(gen.apply(&ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn rk4_with_zero_rhs_is_identity() {
        let rho = plus_state();
        let out = rk4_step(rho.matrix(), 0.01, |r| ComplexMatrix::zeros(r.dim()));
        assert_eq!(&out, rho.matrix());
    }

    #[test]
    fn dephasing_decay_matches_analytic() {
        let cfg = EvolutionConfig {
            dt: 0.01,
            n_steps: 100,
            sample_every: 100,
            sanitize_every: 1,
        };
        let traj = evolve(&plus_state(), &dephasing_qubit(), &cfg).unwrap();
        let last = traj.samples.last().unwrap();
        assert!((last.t - 1.0).abs() < 1e-12);
        let want = 0.5 * (-0.5f64).exp();
        assert!((last.state.matrix()[(0, 1)].re - want).abs() < 1e-6);
        assert!((last.state.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unitary_evolution_conserves_purity() {
        let spec = SpinChainSpec::new(3, 1.0, 0.8, 0.4).unwrap();
        let h = xxz_hamiltonian(&spec).unwrap();
        let gen = Lindbladian::new(&h, &DissipationSpec::none()).unwrap();
        let mut psi = vec![ZERO; 8];
        psi[0b010] = ONE;
        // Stepped directly: RK4 is not exactly unitary, and over 1000 steps
        // the near-zero eigenvalues of a pure state drift to about -1e-9.
        let mut rho = ComplexMatrix::outer(&psi).unwrap();
        for step in 1..=1000 {
            rho = rk4_step(&rho, 0.01, |r| gen.apply(r).unwrap());
            if step % 100 == 0 {
                let purity = rho.matmul(&rho).unwrap().trace().re;
                assert!((purity - 1.0).abs() < 1e-8, "step {step}: {purity}");
            }
        }
    }

    #[test]
    fn zero_steps_returns_initial_state() {
        let cfg = EvolutionConfig {
            n_steps: 0,
            ..Default::default()
        };
        let traj = evolve(&plus_state(), &dephasing_qubit(), &cfg).unwrap();
        assert_eq!(traj.samples.len(), 1);
        assert_eq!(traj.samples[0].t, 0.0);
        assert_eq!(traj.samples[0].state.matrix(), plus_state().matrix());
    }

    #[test]
    fn config_validation() {
        let mut cfg = EvolutionConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.dt = 0.0;
        assert!(cfg.validate().is_err());
        cfg = EvolutionConfig {
            sample_every: 2000,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg = EvolutionConfig {
            sanitize_every: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn checkpoints_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = EvolutionConfig {
            dt: 0.01,
            n_steps: 4,
            sample_every: 2,
            sanitize_every: 1,
        };
        let traj = evolve(&plus_state(), &dephasing_qubit(), &cfg).unwrap();
        let prefix = dir.path().join("deph");
        let paths = traj.write_checkpoints(prefix.to_str().unwrap()).unwrap();
        assert_eq!(paths.len(), 3);
        assert!(paths[2].ends_with("deph_t4.cmx"));
        let back = crate::linalg::read_cmx(&paths[2]).unwrap();
        assert_eq!(&back, traj.samples[2].state.matrix());
    }
}
