// SPDX-License-Identifier: Apache-2.0

//! Producibility bounds and witnessed entanglement depth.
//!
//! For a c-producible state of N sites and single-site operators with
//! spectrum in [n, m]:
//!
//! - linear:    F ≤ 4ckN
//! - partition: F ≤ 4k[s c² + (N − s c)²], s = ⌊N/c⌋
//! - general:   F ≤ 4k[c(N − p) + N] for a product of p blocks
//!
//! Exceeding the bound at c certifies entanglement depth of at least c + 1.
//! The linear form is the finite-N version of an asymptotic density bound.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Margin by which a value must exceed a bound to count as a violation.
pub const WITNESS_TOL: f64 = 1e-9;

/// How k is derived from the single-site spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum KConvention {
    /// k = ((m − n)/2)², the largest single-site variance. GHZ blocks
    /// saturate the partition bound.
    #[default]
    Tight,
    /// k = (m − n)². Every bound is 4× looser for spin-1/2.
    PaperLiteral,
}

impl fmt::Display for KConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tight => "tight",
            Self::PaperLiteral => "paper_literal",
        })
    }
}

impl FromStr for KConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tight" => Ok(Self::Tight),
            "paper_literal" => Ok(Self::PaperLiteral),
            other => Err(Error::InvalidParameter {
                name: "k_convention",
                reason: format!("expected `tight` or `paper_literal`, found `{other}`"),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundConvention {
    m: f64,
    n: f64,
    label: KConvention,
}

impl BoundConvention {
    pub fn new(m: f64, n: f64, label: KConvention) -> Result<Self> {
        if !(m.is_finite() && n.is_finite() && m > n) {
            return Err(Error::InvalidParameter {
                name: "m, n",
                reason: format!("need finite m > n, got m = {m}, n = {n}"),
            });
        }
        Ok(Self { m, n, label })
    }

    /// ô(x) = σ/2, spectrum {−½, ½}.
    pub fn spin_half(label: KConvention) -> Self {
        Self {
            m: 0.5,
            n: -0.5,
            label,
        }
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn label(&self) -> KConvention {
        self.label
    }

    pub fn k(&self) -> f64 {
        let width = self.m - self.n;
        match self.label {
            KConvention::Tight => 0.25 * width * width,
            KConvention::PaperLiteral => width * width,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum BoundFamily {
    Linear,
    #[default]
    Partition,
    /// Product of `p` blocks.
    General {
        p: usize,
    },
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear => f.write_str("linear"),
            Self::Partition => f.write_str("partition"),
            Self::General { p } => write!(f, "general(p={p})"),
        }
    }
}

impl BoundFamily {
    /// Bound at producibility `c` for `n_sites`.
    pub fn bound(&self, c: usize, n_sites: usize, conv: &BoundConvention) -> Result<f64> {
        match *self {
            Self::Linear => bound_linear(c, n_sites, conv),
            Self::Partition => bound_partition(c, n_sites, conv),
            Self::General { p } => bound_general(c, n_sites, p, conv),
        }
    }

    pub fn p(&self) -> Option<usize> {
        match *self {
            Self::General { p } => Some(p),
            _ => None,
        }
    }
}

fn check_range(name: &'static str, value: usize, n_sites: usize) -> Result<()> {
    if value == 0 || value > n_sites {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("{value} outside [1, {n_sites}]"),
        });
    }
    Ok(())
}

/// 4ckN.
pub fn bound_linear(c: usize, n_sites: usize, conv: &BoundConvention) -> Result<f64> {
    check_range("c", c, n_sites)?;
    Ok(4.0 * conv.k() * (c * n_sites) as f64)
}

/// 4k[s c² + (N − s c)²] with s = ⌊N/c⌋.
pub fn bound_partition(c: usize, n_sites: usize, conv: &BoundConvention) -> Result<f64> {
    check_range("c", c, n_sites)?;
    let s = n_sites / c;
    let r = n_sites - s * c;
    Ok(4.0 * conv.k() * (s * c * c + r * r) as f64)
}

/// 4k[c(N − p) + N].
pub fn bound_general(c: usize, n_sites: usize, p: usize, conv: &BoundConvention) -> Result<f64> {
    check_range("c", c, n_sites)?;
    check_range("p", p, n_sites)?;
    Ok(4.0 * conv.k() * (c * (n_sites - p) + n_sites) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepthCertificate {
    pub estimator_value: f64,
    pub n_sites: usize,
    /// 1 means no entanglement witnessed.
    pub witnessed_depth: usize,
    pub family: BoundFamily,
    pub convention: BoundConvention,
}

impl DepthCertificate {
    pub fn p_partitions(&self) -> Option<usize> {
        self.family.p()
    }
}

/// Largest depth certified by `f_value`: 1 + max{c < N : F > bound(c) + tol}.
///
/// Fails only for parameters outside the bound's domain (N = 0, p out of
/// range) or a non-finite value.
pub fn witness_depth(
    f_value: f64,
    n_sites: usize,
    conv: &BoundConvention,
    family: BoundFamily,
) -> Result<DepthCertificate> {
    if !f_value.is_finite() {
        return Err(Error::InvalidParameter {
            name: "f_value",
            reason: format!("non-finite estimator value {f_value}"),
        });
    }
    if n_sites == 0 {
        return Err(Error::InvalidParameter {
            name: "n_sites",
            reason: "must be positive".into(),
        });
    }
    if let BoundFamily::General { p } = family {
        check_range("p", p, n_sites)?;
    }
    // Bounds are non-decreasing in c, so scan from the top.
    let mut depth = 1;
    for c in (1..n_sites).rev() {
        if f_value > family.bound(c, n_sites, conv)? + WITNESS_TOL {
            depth = c + 1;
            break;
        }
    }
    Ok(DepthCertificate {
        estimator_value: f_value,
        n_sites,
        witnessed_depth: depth,
        family,
        convention: *conv,
    })
}
