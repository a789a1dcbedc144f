//! Plain-text matrix assets and the bundled experiment data.
//!
//! A matrix file holds one row per line with whitespace-separated decimals.
//! Blank lines and lines starting with `#` are ignored.

use std::path::Path;

use crate::error::{Error, Result};

/// Largest row-sum deviation the asset loader absorbs by rescaling.
///
/// Published matrices are printed with four decimals, so their rows are
/// off by a few units in the fourth place.
pub const ASSET_ROW_SLACK: f64 = 1e-3;

const BUNDLED: &[(&str, &str)] = &[
    ("appendix_g/arm1.mat", include_str!("../../assets/appendix_g/arm1.mat")),
    ("appendix_g/arm2.mat", include_str!("../../assets/appendix_g/arm2.mat")),
    ("appendix_g/arm3.mat", include_str!("../../assets/appendix_g/arm3.mat")),
    ("appendix_g/arm4.mat", include_str!("../../assets/appendix_g/arm4.mat")),
    ("appendix_g/arm5.mat", include_str!("../../assets/appendix_g/arm5.mat")),
    ("fig4.cfg", include_str!("../../assets/fig4.cfg")),
    ("fig5.cfg", include_str!("../../assets/fig5.cfg")),
];

/// Looks up a bundled asset by its relative name, e.g. `appendix_g/arm1.mat`.
pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

/// Parses the matrix text format. Rows are not checked for stochasticity.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("line {}: `{tok}` is not a number", line_no + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Reads a matrix from `path`, falling back to the bundled asset of that name.
pub fn load_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    match std::fs::read_to_string(path) {
        Ok(text) => parse_matrix(&text),
        Err(source) => match path.to_str().and_then(bundled) {
            Some(text) => parse_matrix(text),
            None => Err(Error::Io { path: path.display().to_string(), source }),
        },
    }
}

/// The five 20-state matrices of the large-state-space experiment.
pub fn twenty_state(arm: usize) -> Option<Vec<Vec<f64>>> {
    let text = bundled(&format!("appendix_g/arm{arm}.mat"))?;
    parse_matrix(text).ok()
}
