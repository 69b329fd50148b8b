//! Project-wide text file formats (JSON documents).
//!
//! Matrix file: `{ "local_dims": [..], "matrix": [[re, im], ..] }` with the
//! matrix stored row-major.
//!
//! Record file: `{ "local_dims": [..], "observables": { name: [[re, im], ..] },
//! "means": { name: value } }`. Observable names must match between the two
//! maps; entries enter the measurement record sorted by name.
//!
//! Golden examples live in `docs/golden/`; the grammar is documented in
//! `docs/FORMATS.md`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{CMatrix, MeasurementRecord, Observable, TensorStructure, C64};

/// A single matrix with its tensor structure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub local_dims: Vec<usize>,
    /// Row-major [re, im] pairs, length total_dim^2.
    pub matrix: Vec<[f64; 2]>,
}

/// A measurement record: named observables and their measured means.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecordFile {
    pub local_dims: Vec<usize>,
    pub observables: BTreeMap<String, Vec<[f64; 2]>>,
    pub means: BTreeMap<String, f64>,
}

fn matrix_from_pairs(pairs: &[[f64; 2]], structure: &TensorStructure) -> Result<CMatrix> {
    let d = structure.total_dim();
    if pairs.len() != d * d {
        return Err(Error::Parse(format!(
            "matrix has {} entries, expected {}",
            pairs.len(),
            d * d
        )));
    }
    Ok(CMatrix::from_fn(d, d, |i, j| {
        let [re, im] = pairs[i * d + j];
        C64::new(re, im)
    }))
}

fn pairs_from_matrix(m: &CMatrix) -> Vec<[f64; 2]> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

impl MatrixFile {
    pub fn from_observable(op: &Observable) -> Self {
        Self {
            local_dims: op.structure().local_dims().to_vec(),
            matrix: pairs_from_matrix(op.matrix()),
        }
    }

    pub fn to_observable(&self) -> Result<Observable> {
        let structure = TensorStructure::new(self.local_dims.clone())?;
        let m = matrix_from_pairs(&self.matrix, &structure)?;
        Observable::new(m, structure)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

impl RecordFile {
    pub fn from_record(record: &MeasurementRecord, names: &[String]) -> Result<Self> {
        if names.len() != record.len() {
            return Err(Error::DimensionMismatch {
                expected: record.len(),
                got: names.len(),
            });
        }
        let mut observables = BTreeMap::new();
        let mut means = BTreeMap::new();
        for (name, (op, mean)) in names.iter().zip(record.entries()) {
            observables.insert(name.clone(), pairs_from_matrix(op.matrix()));
            means.insert(name.clone(), *mean);
        }
        Ok(Self {
            local_dims: record.structure().local_dims().to_vec(),
            observables,
            means,
        })
    }

    /// Builds the measurement record, entries sorted by observable name.
    pub fn to_record(&self) -> Result<MeasurementRecord> {
        let structure = TensorStructure::new(self.local_dims.clone())?;
        if self.observables.is_empty() {
            return Err(Error::EmptyRecord);
        }
        let mut entries = Vec::new();
        for (name, pairs) in &self.observables {
            let mean = self.means.get(name).ok_or_else(|| {
                Error::Parse(format!("observable '{name}' has no entry in 'means'"))
            })?;
            let m = matrix_from_pairs(pairs, &structure)
                .map_err(|e| Error::Parse(format!("observable '{name}': {e}")))?;
            let op = Observable::new(m, structure.clone())
                .map_err(|e| Error::Parse(format!("observable '{name}': {e}")))?;
            entries.push((op, *mean));
        }
        for name in self.means.keys() {
            if !self.observables.contains_key(name) {
                return Err(Error::Parse(format!(
                    "mean '{name}' has no matching observable"
                )));
            }
        }
        MeasurementRecord::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Formats a float with ten significant digits for CSV emission.
pub fn fmt_csv(x: f64) -> String {
    format!("{x:.9e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::isotropic_witness;

    #[test]
    fn matrix_round_trip() {
        let w = isotropic_witness(2).unwrap();
        let file = MatrixFile::from_observable(&w);
        let back = file.to_observable().unwrap();
        assert!((back.matrix() - w.matrix()).norm() < 1e-15);
    }

    #[test]
    fn record_requires_matching_names() {
        let w = isotropic_witness(2).unwrap();
        let mut observables = BTreeMap::new();
        observables.insert("w".to_string(), pairs_from_matrix(w.matrix()));
        let rf = RecordFile {
            local_dims: vec![2, 2],
            observables: observables.clone(),
            means: BTreeMap::new(),
        };
        assert!(matches!(rf.to_record(), Err(Error::Parse(_))));
        let mut means = BTreeMap::new();
        means.insert("w".to_string(), -0.3);
        let rf = RecordFile {
            local_dims: vec![2, 2],
            observables,
            means,
        };
        let record = rf.to_record().unwrap();
        assert_eq!(record.len(), 1);
    }

    #[test]
    fn csv_format_is_ten_significant_digits() {
        assert_eq!(fmt_csv(1.0 / 3.0), "3.333333333e-1");
        assert_eq!(fmt_csv(0.0), "0.000000000e0");
    }
}
