// SPDX-License-Identifier: Apache-2.0

//! gnuplot script for a scenario CSV.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Columns drawn against t.
pub const PLOTTED: [&str; 5] = ["qfi", "var4", "f_tilde", "abs_f_tilde", "f_bar"];

fn csv_error(path: &Path, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: "csv",
        reason: format!("{}: {}", path.display(), reason.into()),
    }
}

/// Writes `<csv stem>.gp` next to the CSV and returns its path. Running the
/// script from that directory renders `<csv stem>.png`.
pub fn emit_plot_script(csv_path: impl AsRef<Path>) -> Result<PathBuf> {
    let csv_path = csv_path.as_ref();
    let text = std::fs::read_to_string(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| csv_error(csv_path, "empty file"))?;
    if lines.next().is_none() {
        return Err(csv_error(csv_path, "no data rows"));
    }
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let index = |name: &str| {
        columns
            .iter()
            .position(|c| *c == name)
            .map(|i| i + 1)
            .ok_or_else(|| csv_error(csv_path, format!("missing column `{name}`")))
    };
    let t_col = index("t")?;

    let file_name = csv_path
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| csv_error(csv_path, "path has no file name"))?;
    let stem = csv_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(file_name);

    let mut script = String::new();
    writeln!(script, "set datafile separator ','").unwrap();
    writeln!(script, "set terminal pngcairo size 900,600").unwrap();
    writeln!(script, "set output '{stem}.png'").unwrap();
    writeln!(script, "set xlabel 't J_x / hbar'").unwrap();
    writeln!(script, "set ylabel 'estimator'").unwrap();
    writeln!(script, "set key top left").unwrap();
    let mut parts = Vec::new();
    for (k, name) in PLOTTED.iter().enumerate() {
        let col = index(name)?;
        let source = if k == 0 {
            format!("'{file_name}'")
        } else {
            "''".to_owned()
        };
        // Dashes keep coinciding curves distinguishable.
        parts.push(format!(
            "{source} every ::1 using {t_col}:{col} with lines dt {} lw 2 title '{name}'",
            k + 1
        ));
    }
    writeln!(script, "plot {}", parts.join(", \\\n     ")).unwrap();

    let out = csv_path.with_extension("gp");
    std::fs::write(&out, script).map_err(|e| Error::io(&out, e))?;
    Ok(out)
}
