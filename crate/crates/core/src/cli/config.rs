// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` scenario files.
//!
//! ```text
//! # dephasing run
//! n_sites  = 6
//! j_x      = 1
//! j_z      = 0.8
//! gamma_sz = 0.1
//! initial  = ground_sector:0
//! ```
//!
//! `#` starts a comment. Unknown or repeated keys are errors.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bounds::KConvention;
use crate::dynamics::{Channel, DissipationSpec, EvolutionConfig};
use crate::error::{Error, Result};
use crate::spin::{Axis, JumpKind, SpinChainSpec};

pub const KEYS: [&str; 13] = [
    "n_sites",
    "j_x",
    "j_z",
    "h_x",
    "gamma_sx",
    "gamma_sz",
    "dt",
    "n_steps",
    "sample_every",
    "initial",
    "generator_axis",
    "k_convention",
    "output_prefix",
];

/// Where the evolution starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InitialState {
    /// Ground state within the 2S_z = `sector` block of the zero-field
    /// Hamiltonian. With h_x ≠ 0 the run is a quench into the field.
    GroundSector(i64),
    /// Ground state of the full Hamiltonian; must be non-degenerate.
    GroundGlobal,
    /// Density matrix from a cmx file.
    File(PathBuf),
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GroundSector(s) => write!(f, "ground_sector:{s}"),
            Self::GroundGlobal => f.write_str("ground_global"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub chain: SpinChainSpec,
    pub dissipation: DissipationSpec,
    pub evolution: EvolutionConfig,
    pub initial_state: InitialState,
    pub generator_axis: Axis,
    pub bound_convention: KConvention,
    pub output_prefix: PathBuf,
}

/// Parses a config whose relative `file:` paths are taken as given and whose
/// default output prefix is `scenario`.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    parse_config_in(text, None, "scenario")
}

/// Reads a config file. Relative `file:` paths resolve against the config's
/// directory; the output prefix defaults to the file stem.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario")
        .to_owned();
    parse_config_in(&text, path.parent(), &stem)
}

fn value_err(key: &str, reason: impl Into<String>) -> Error {
    Error::ConfigValue {
        key: key.to_owned(),
        reason: reason.into(),
    }
}

fn parse_entries(text: &str) -> Result<HashMap<String, (usize, String)>> {
    let mut entries = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |reason: String| Error::ConfigSyntax { line, reason };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected `key = value`, found `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(syntax(format!("empty key or value in `{content}`")));
        }
        if !KEYS.contains(&key) {
            return Err(syntax(format!("unknown key `{key}`")));
        }
        if let Some((first, _)) = entries.insert(key.to_owned(), (line, value.to_owned())) {
            return Err(syntax(format!("`{key}` already set on line {first}")));
        }
    }
    Ok(entries)
}

struct Entries(HashMap<String, (usize, String)>);

impl Entries {
    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some((line, raw)) => raw
                .parse()
                .map(Some)
                .map_err(|_| value_err(key, format!("cannot parse `{raw}` (line {line})"))),
        }
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| value_err(key, "required key is missing"))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|(_, v)| v.as_str())
    }
}

fn parse_initial(raw: &str, base_dir: Option<&Path>) -> Result<InitialState> {
    if raw == "ground_global" {
        return Ok(InitialState::GroundGlobal);
    }
    if let Some(sector) = raw.strip_prefix("ground_sector:") {
        return sector
            .trim()
            .parse()
            .map(InitialState::GroundSector)
            .map_err(|_| value_err("initial", format!("invalid sector `{sector}`")));
    }
    if let Some(file) = raw.strip_prefix("file:") {
        let file = Path::new(file.trim());
        let path = match base_dir {
            Some(dir) if file.is_relative() => dir.join(file),
            _ => file.to_path_buf(),
        };
        return Ok(InitialState::File(path));
    }
    Err(value_err(
        "initial",
        format!("expected ground_sector:<2Sz>, ground_global or file:<path>, found `{raw}`"),
    ))
}

/// Re-labels an invariant violation with the config key it came from.
fn as_key_error(err: Error) -> Error {
    match err {
        Error::InvalidParameter { name, reason } => value_err(name, reason),
        other => other,
    }
}

fn parse_config_in(text: &str, base_dir: Option<&Path>, stem: &str) -> Result<ScenarioConfig> {
    let e = Entries(parse_entries(text)?);

    let chain = SpinChainSpec::new(
        e.require("n_sites")?,
        e.require("j_x")?,
        e.require("j_z")?,
        e.get("h_x")?.unwrap_or(0.0),
    )
    .map_err(as_key_error)?;

    let mut channels = Vec::new();
    for (key, kind) in [("gamma_sx", JumpKind::Sx), ("gamma_sz", JumpKind::Sz)] {
        let rate: f64 = e.get(key)?.unwrap_or(0.0);
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(value_err(
                key,
                format!("must be finite and non-negative, got {rate}"),
            ));
        }
        if rate > 0.0 {
            channels.push(Channel { kind, rate });
        }
    }
    let dissipation = DissipationSpec::new(channels).map_err(as_key_error)?;

    let defaults = EvolutionConfig::default();
    let evolution = EvolutionConfig {
        dt: e.get("dt")?.unwrap_or(defaults.dt),
        n_steps: e.get("n_steps")?.unwrap_or(defaults.n_steps),
        sample_every: e.get("sample_every")?.unwrap_or(defaults.sample_every),
        sanitize_every: defaults.sanitize_every,
    };
    evolution.validate().map_err(as_key_error)?;

    let initial_state = match e.raw("initial") {
        Some(raw) => parse_initial(raw, base_dir)?,
        None => InitialState::GroundSector(0),
    };
    let generator_axis = match e.raw("generator_axis") {
        Some(raw) => raw
            .parse::<Axis>()
            .map_err(|reason| value_err("generator_axis", reason))?,
        None => Axis::X,
    };
    let bound_convention = match e.raw("k_convention") {
        Some(raw) => raw.parse::<KConvention>().map_err(as_key_error)?,
        None => KConvention::Tight,
    };
    let output_prefix = PathBuf::from(e.raw("output_prefix").unwrap_or(stem));

    Ok(ScenarioConfig {
        chain,
        dissipation,
        evolution,
        initial_state,
        generator_axis,
        bound_convention,
        output_prefix,
    })
}
