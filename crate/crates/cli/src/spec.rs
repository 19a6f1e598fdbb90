//! Loading curve specs from files or the bundled set.

use std::path::Path;

use anyhow::{bail, Context, Result};
use fraclen_core::{make_curve, Curve, CurveSpec};
use sha2::{Digest, Sha256};

/// Specs shipped with the binary, addressable by name.
pub const BUNDLED: [(&str, &str); 4] = [
    ("segment", include_str!("../specs/segment.toml")),
    ("circle", include_str!("../specs/circle.toml")),
    ("helix", include_str!("../specs/helix.toml")),
    ("fourier4", include_str!("../specs/fourier4.toml")),
];

pub struct LoadedCurve {
    pub curve: Curve,
    /// What the user passed to `--curve`.
    pub source: String,
    /// Hex SHA-256 of the spec text.
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Parses TOML, or JSON when the text starts with `{`.
pub fn parse_spec(text: &str) -> Result<CurveSpec> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).context("curve spec is not valid JSON")
    } else {
        toml::from_str(text).context("curve spec is not valid TOML")
    }
}

/// Reads `name_or_path` as a file if it exists, otherwise as a bundled name.
pub fn load(name_or_path: &str) -> Result<LoadedCurve> {
    let path = Path::new(name_or_path);
    let text = if path.exists() {
        std::fs::read_to_string(path)
            .with_context(|| format!("cannot read curve spec '{name_or_path}'"))?
    } else if let Some((_, text)) = BUNDLED.iter().find(|(name, _)| *name == name_or_path) {
        text.to_string()
    } else {
        let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
        bail!(
            "curve spec '{name_or_path}' is neither a file nor a bundled spec ({})",
            names.join(", ")
        );
    };
    let spec = parse_spec(&text).with_context(|| format!("in curve spec '{name_or_path}'"))?;
    let curve = make_curve(&spec).with_context(|| format!("in curve spec '{name_or_path}'"))?;
    Ok(LoadedCurve {
        curve,
        source: name_or_path.to_string(),
        digest: sha256_hex(text.as_bytes()),
    })
}
