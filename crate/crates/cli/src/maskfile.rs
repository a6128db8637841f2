//! JSON mask files: `{"dim": m, "lo": k, "taps": [[[[re, im], ...], ...], ...]}`.

use std::fs;
use std::path::Path;

use hermite_core::seqs::MatrixMask;
use hermite_core::{CMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskFile {
    pub dim: usize,
    pub lo: i64,
    /// `taps[k][i][j] = [re, im]` of `A(lo + k)`.
    pub taps: Vec<Vec<Vec<[f64; 2]>>>,
}

impl MaskFile {
    pub fn from_mask(mask: &MatrixMask) -> Self {
        let dim = mask.dim();
        let taps = mask
            .taps()
            .iter()
            .map(|t| {
                (0..dim)
                    .map(|i| (0..dim).map(|j| [t[(i, j)].re, t[(i, j)].im]).collect())
                    .collect()
            })
            .collect();
        Self {
            dim,
            lo: mask.lo(),
            taps,
        }
    }

    /// JSON with one matrix row per line.
    pub fn to_json(&self) -> CliResult<String> {
        let mut taps = Vec::with_capacity(self.taps.len());
        for tap in &self.taps {
            let rows = tap
                .iter()
                .map(serde_json::to_string)
                .collect::<Result<Vec<_>, _>>()?;
            taps.push(format!("    [\n      {}\n    ]", rows.join(",\n      ")));
        }
        Ok(format!(
            "{{\n  \"dim\": {},\n  \"lo\": {},\n  \"taps\": [\n{}\n  ]\n}}\n",
            self.dim,
            self.lo,
            taps.join(",\n")
        ))
    }

    /// Validates the shape and builds the mask.
    pub fn to_mask(&self) -> Result<MatrixMask, String> {
        let mut taps = Vec::with_capacity(self.taps.len());
        for (k, tap) in self.taps.iter().enumerate() {
            if tap.len() != self.dim || tap.iter().any(|row| row.len() != self.dim) {
                return Err(format!("tap {k} is not {0}x{0}", self.dim));
            }
            if tap.iter().flatten().flatten().any(|x| !x.is_finite()) {
                return Err(format!("tap {k} has a non-finite entry"));
            }
            taps.push(CMatrix::from_fn(self.dim, self.dim, |i, j| {
                let [re, im] = tap[i][j];
                C64::new(re, im)
            }));
        }
        if self.dim == 0 {
            return Err("dim must be positive".into());
        }
        MatrixMask::new(self.dim, self.lo, taps).map_err(|e| e.to_string())
    }
}

pub fn read_mask(path: &Path) -> CliResult<MatrixMask> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let bad = |reason: String| CliError::MaskFile {
        path: path.display().to_string(),
        reason,
    };
    let file: MaskFile = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    file.to_mask().map_err(bad)
}

pub fn write_mask(path: &Path, mask: &MatrixMask) -> CliResult<()> {
    let text = MaskFile::from_mask(mask).to_json()?;
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}
