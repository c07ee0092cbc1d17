//! Field snapshots: row-major little-endian `f64` samples in `<name>` and a
//! JSON sidecar `{d, n, h, delta, params}` in `<name>.json`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use vmo_lab_core::fields::{ExampleParams, ScalarField};

use crate::output::write_all_atomic;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub d: usize,
    pub n: usize,
    pub h: f64,
    pub delta: f64,
    pub params: Option<ExampleParams>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn save(path: &Path, field: &ScalarField, delta: f64) -> Result<()> {
    let sidecar = Sidecar {
        d: 2,
        n: field.n(),
        h: field.h(),
        delta,
        params: field.params().cloned(),
    };
    let bytes: Vec<u8> = field.values().iter().flat_map(|v| v.to_le_bytes()).collect();
    let json = serde_json::to_vec_pretty(&sidecar)?;
    write_all_atomic(&[(path, &bytes), (&sidecar_path(path), &json)])
}

pub fn load(path: &Path) -> Result<(ScalarField, Sidecar)> {
    let side = sidecar_path(path);
    let sidecar: Sidecar = serde_json::from_slice(
        &std::fs::read(&side).with_context(|| format!("reading {}", side.display()))?,
    )
    .with_context(|| format!("parsing {}", side.display()))?;
    if sidecar.d != 2 {
        bail!("snapshot dimension {} is not supported", sidecar.d);
    }
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if bytes.len() != 8 * sidecar.n * sidecar.n {
        bail!(
            "{} holds {} bytes, expected {} for n = {}",
            path.display(),
            bytes.len(),
            8 * sidecar.n * sidecar.n,
            sidecar.n
        );
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let field = ScalarField::from_values(sidecar.n, values)?;
    Ok((field, sidecar))
}
