// SPDX-License-Identifier: Apache-2.0

//! Scenario pipeline: model, initial state, evolution, per-sample estimators
//! and depth certificates, CSV output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::bounds::{witness_depth, BoundConvention, BoundFamily, DepthCertificate};
use crate::dynamics::{evolve, DensityMatrix, EvolutionDiagnostics, Lindbladian, Sample};
use crate::error::{Error, Result};
use crate::estimators::{EstimatorReport, IDENTITY_TOL};
use crate::linalg::{read_cmx, write_cmx};
use crate::spin::{ground_state, xxz_hamiltonian, SiteOperatorSet, SpinChainSpec};

use super::config::{InitialState, ScenarioConfig};

/// Environment variable capping the per-sample fan-out.
pub const THREADS_ENV: &str = "PRODUCIBILITY_LAB_THREADS";

pub const CSV_HEADER: &str =
    "t,qfi,f1,f2_diag,f_tilde,m_term,r_term,var4,abs_f_tilde,f_bar,depth_qfi,depth_f_tilde";

/// One CSV row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportRow {
    pub report: EstimatorReport,
    pub depth_qfi: DepthCertificate,
    pub depth_f_tilde: DepthCertificate,
}

impl ReportRow {
    pub fn new(report: EstimatorReport, n_sites: usize, conv: &BoundConvention) -> Result<Self> {
        Ok(Self {
            report,
            depth_qfi: witness_depth(report.qfi, n_sites, conv, BoundFamily::Partition)?,
            depth_f_tilde: witness_depth(report.f_tilde, n_sites, conv, BoundFamily::Partition)?,
        })
    }

    pub fn to_csv_line(&self) -> String {
        let r = &self.report;
        let mut line = String::with_capacity(256);
        for v in [
            r.t,
            r.qfi,
            r.f1,
            r.f2_diag,
            r.f_tilde,
            r.m_term,
            r.r_term,
            r.var4,
            r.abs_f_tilde,
            r.f_bar,
        ] {
            write!(line, "{v:.16e},").unwrap();
        }
        write!(
            line,
            "{},{}",
            self.depth_qfi.witnessed_depth, self.depth_f_tilde.witnessed_depth
        )
        .unwrap();
        line
    }
}

/// Row-level consistency checks, evaluated from the emitted numbers alone.
pub fn check_row(row: &ReportRow, tol: f64) -> Result<()> {
    let r = &row.report;
    let relations: [(&'static str, f64, f64); 6] = [
        ("f_tilde = f1 - f2_diag", r.f_tilde, r.f1 - r.f2_diag),
        ("f2_diag = 4(m - r)", r.f2_diag, 4.0 * (r.m_term - r.r_term)),
        ("qfi = f1 - 4m", r.qfi, r.f1 - 4.0 * r.m_term),
        ("qfi = f_tilde - 4r", r.qfi, r.f_tilde - 4.0 * r.r_term),
        (
            "f_tilde <= abs_f_tilde",
            r.f_tilde.min(r.abs_f_tilde),
            r.f_tilde,
        ),
        (
            "abs_f_tilde <= f_bar",
            r.abs_f_tilde.min(r.f_bar),
            r.abs_f_tilde,
        ),
    ];
    for (identity, lhs, rhs) in relations {
        let deviation = lhs - rhs;
        if deviation.is_nan() || deviation.abs() > tol {
            return Err(Error::IdentityViolated {
                identity,
                deviation,
                t: r.t,
            });
        }
    }
    Ok(())
}

pub fn csv_string(rows: &[ReportRow]) -> String {
    let mut out = String::with_capacity(256 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

/// Initial density matrix for the chain.
pub fn initial_density(chain: &SpinChainSpec, initial: &InitialState) -> Result<DensityMatrix> {
    match initial {
        InitialState::GroundSector(sector) => {
            // The sector is defined for the zero-field chain; a transverse
            // field then acts as a quench.
            let h0 = xxz_hamiltonian(&SpinChainSpec { h_x: 0.0, ..*chain })?;
            DensityMatrix::new(ground_state(&h0, Some(*sector))?)
        }
        InitialState::GroundGlobal => {
            DensityMatrix::new(ground_state(&xxz_hamiltonian(chain)?, None)?)
        }
        InitialState::File(path) => load_density(path, chain.n_sites),
    }
}

/// Reads a cmx density matrix and checks it against the chain size.
pub fn load_density(path: &Path, n_sites: usize) -> Result<DensityMatrix> {
    let what = || format!("state file {}", path.display());
    let m = read_cmx(path).map_err(|e| match e {
        Error::Io { .. } => e,
        other => other.invalid_input(what()),
    })?;
    let expected = 1usize << n_sites;
    if m.dim() != expected {
        return Err(Error::DimensionMismatch {
            left: expected,
            right: m.dim(),
        }
        .invalid_input(what()));
    }
    DensityMatrix::new(m).map_err(|e| e.invalid_input(what()))
}

/// Fan-out width from the environment; unset means 1.
pub fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(1),
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::ConfigValue {
                key: THREADS_ENV.to_owned(),
                reason: format!("expected a positive integer, found `{raw}`"),
            }),
    }
}

fn evaluate_sample(
    sample: &Sample,
    sites: &SiteOperatorSet,
    conv: &BoundConvention,
) -> Result<ReportRow> {
    let stage = |e: Error| e.at_stage("estimate", sample.step);
    let report = EstimatorReport::evaluate(sample.t, &sample.state, sites).map_err(stage)?;
    let row = ReportRow::new(report, sites.n_sites(), conv).map_err(stage)?;
    check_row(&row, IDENTITY_TOL).map_err(stage)?;
    Ok(row)
}

/// Evaluates every sample, split into contiguous chunks across at most
/// `threads` workers. Row order and values do not depend on `threads`.
pub fn evaluate_samples(
    samples: &[Sample],
    sites: &SiteOperatorSet,
    conv: &BoundConvention,
    threads: usize,
) -> Result<Vec<ReportRow>> {
    let threads = threads.clamp(1, samples.len().max(1));
    if threads == 1 {
        return samples
            .iter()
            .map(|s| evaluate_sample(s, sites, conv))
            .collect();
    }
    let chunk = samples.len().div_ceil(threads);
    let chunks: Vec<Result<Vec<ReportRow>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = samples
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|s| evaluate_sample(s, sites, conv))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("estimator worker panicked"))
            .collect()
    });
    let mut rows = Vec::with_capacity(samples.len());
    for part in chunks {
        rows.extend(part?);
    }
    Ok(rows)
}

/// Output of one scenario run.
#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub rows: Vec<ReportRow>,
    pub samples: Vec<Sample>,
    pub diagnostics: EvolutionDiagnostics,
}

impl ScenarioRun {
    pub fn csv(&self) -> String {
        csv_string(&self.rows)
    }
}

/// Runs the pipeline without touching the filesystem (except to read a
/// `file:` initial state).
pub fn compute_scenario(cfg: &ScenarioConfig, threads: usize) -> Result<ScenarioRun> {
    let h = xxz_hamiltonian(&cfg.chain).map_err(|e| e.at_stage("model", 0))?;
    let generator = Lindbladian::new(&h, &cfg.dissipation).map_err(|e| e.at_stage("model", 0))?;
    let rho0 = initial_density(&cfg.chain, &cfg.initial_state)
        .map_err(|e| e.at_stage("initial state", 0))?;
    let trajectory = evolve(&rho0, &generator, &cfg.evolution)?;
    let sites = SiteOperatorSet::new(cfg.chain.n_sites, cfg.generator_axis)
        .map_err(|e| e.at_stage("model", 0))?;
    let conv = BoundConvention::spin_half(cfg.bound_convention);
    let rows = evaluate_samples(&trajectory.samples, &sites, &conv, threads)?;
    Ok(ScenarioRun {
        rows,
        samples: trajectory.samples,
        diagnostics: trajectory.diagnostics,
    })
}

/// Files written by [`run_scenario`].
#[derive(Clone, Debug)]
pub struct ScenarioOutput {
    pub csv_path: PathBuf,
    pub checkpoints: Vec<PathBuf>,
    pub run: ScenarioRun,
}

/// Runs the scenario and writes `<output_prefix>.csv`, plus one
/// `<output_prefix>_t<step>.cmx` per sample when `checkpoints` is set.
pub fn run_scenario(cfg: &ScenarioConfig, checkpoints: bool) -> Result<ScenarioOutput> {
    let run = compute_scenario(cfg, thread_count()?)?;
    let prefix = cfg.output_prefix.as_os_str().to_string_lossy().into_owned();
    let csv_path = PathBuf::from(format!("{prefix}.csv"));
    std::fs::write(&csv_path, run.csv()).map_err(|e| Error::io(&csv_path, e))?;
    let mut written = Vec::new();
    if checkpoints {
        for s in &run.samples {
            let path = PathBuf::from(format!("{prefix}_t{}.cmx", s.step));
            write_cmx(&path, s.state.matrix())?;
            written.push(path);
        }
    }
    Ok(ScenarioOutput {
        csv_path,
        checkpoints: written,
        run,
    })
}

/// Single-shot evaluation of a stored density matrix.
pub fn estimate_file(
    rho_path: &Path,
    chain: &SpinChainSpec,
    axis: crate::spin::Axis,
    conv: &BoundConvention,
) -> Result<ReportRow> {
    let rho = load_density(rho_path, chain.n_sites)?;
    let sites = SiteOperatorSet::new(chain.n_sites, axis)?;
    let report = EstimatorReport::evaluate(0.0, &rho, &sites)?;
    let row = ReportRow::new(report, chain.n_sites, conv)?;
    check_row(&row, IDENTITY_TOL)?;
    Ok(row)
}
