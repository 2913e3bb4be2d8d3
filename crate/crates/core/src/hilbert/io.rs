//! JSON exchange format for operators and states.
//!
//! ```json
//! {"space": {"kind": "fock", "dim": 2},
//!  "entries": [[0, 0], [1, 0], [1, 0], [0, 0]]}
//! ```
//!
//! `entries` is the row-major matrix as `[re, im]` pairs; nested rows are also
//! accepted on input. States use `amplitudes` in place of `entries`.

use std::fs;
use std::path::Path;

use faer::c64;
use serde::{Deserialize, Serialize};

use super::{HilbertSpec, Operator, StateVector, HERMITIAN_TOL};
use crate::{Error, Result};

/// Matrices whose asymmetry is below this (relative) bound are treated as
/// Hermitian matrices damaged by a decimal round-trip and symmetrized.
const SYMMETRIZE_TOL: f64 = 1e-8;

#[derive(Serialize, Deserialize)]
struct OperatorFile {
    space: HilbertSpec,
    entries: Entries,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entries {
    Flat(Vec<[f64; 2]>),
    Rows(Vec<Vec<[f64; 2]>>),
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    space: HilbertSpec,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Clone, Debug)]
pub struct LoadedOperator {
    pub operator: Operator,
    /// Set when `(M + M†)/2` replaced the stored matrix.
    pub symmetrized: bool,
    /// `max|M - M†|` of the matrix as stored in the file.
    pub asymmetry: f64,
}

impl LoadedOperator {
    pub fn warning(&self) -> Option<String> {
        self.symmetrized.then(|| {
            format!(
                "matrix symmetrized on load (max |M - M^dagger| = {:.3e})",
                self.asymmetry
            )
        })
    }
}

pub fn operator_from_json(text: &str) -> Result<LoadedOperator> {
    let file: OperatorFile = serde_json::from_str(text)?;
    file.space.validate()?;
    let d = file.space.dimension();
    let flat: Vec<[f64; 2]> = match file.entries {
        Entries::Flat(v) => v,
        Entries::Rows(rows) => {
            if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
                return Err(Error::InvalidDimension(format!(
                    "row {i} has {} entries, {} declares {d}",
                    r.len(),
                    file.space
                )));
            }
            rows.into_iter().flatten().collect()
        }
    };
    if flat.len() != d * d {
        return Err(Error::InvalidDimension(format!(
            "{} entries given, {} needs {}",
            flat.len(),
            file.space,
            d * d
        )));
    }
    let triplets = flat
        .iter()
        .enumerate()
        .map(|(k, &[re, im])| (k / d, k % d, c64::new(re, im)));
    let op = Operator::from_triplets(file.space, triplets)?;
    let asymmetry = op.max_asymmetry();
    let scale = op
        .entries()
        .data()
        .iter()
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    let near_hermitian = asymmetry > HERMITIAN_TOL * scale && asymmetry <= SYMMETRIZE_TOL * scale;
    let operator = if near_hermitian {
        op.hermitian_part()
    } else {
        op
    };
    Ok(LoadedOperator {
        operator,
        symmetrized: near_hermitian,
        asymmetry,
    })
}

pub fn operator_to_json(op: &Operator) -> Result<String> {
    let d = op.dimension();
    let entries = (0..d * d)
        .map(|k| {
            let z = op.get(k / d, k % d);
            [z.re, z.im]
        })
        .collect();
    let file = OperatorFile {
        space: op.space(),
        entries: Entries::Flat(entries),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn state_from_json(text: &str) -> Result<StateVector> {
    let file: StateFile = serde_json::from_str(text)?;
    let amps = file
        .amplitudes
        .iter()
        .map(|&[re, im]| c64::new(re, im))
        .collect();
    StateVector::new(file.space, amps)
}

pub fn state_to_json(state: &StateVector) -> Result<String> {
    let file = StateFile {
        space: state.space(),
        amplitudes: state.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn read_operator(path: &Path) -> Result<LoadedOperator> {
    fs::read_to_string(path)
        .map_err(Error::from)
        .and_then(|text| operator_from_json(&text))
        .map_err(|e| e.in_file(path))
}

pub fn write_operator(path: &Path, op: &Operator) -> Result<()> {
    fs::write(path, operator_to_json(op)?).map_err(|e| Error::from(e).in_file(path))
}

pub fn read_state(path: &Path) -> Result<StateVector> {
    fs::read_to_string(path)
        .map_err(Error::from)
        .and_then(|text| state_from_json(&text))
        .map_err(|e| e.in_file(path))
}

pub fn write_state(path: &Path, state: &StateVector) -> Result<()> {
    fs::write(path, state_to_json(state)?).map_err(|e| Error::from(e).in_file(path))
}
