//! JSON state files: `{"dims": [...], "amplitudes": [[re, im], ...]}` for pure
//! states and `{"dims": [...], "matrix": [[[re, im], ...], ...]}` for density
//! matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{QecError, Result};
use crate::linalg::C64;
use crate::qstate::{DensityMatrix, Marginals, PartyDims, PureState, DEFAULT_DIM_CAP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn as_marginals(&self) -> &dyn Marginals {
        match self {
            State::Pure(p) => p,
            State::Mixed(m) => m,
        }
    }

    pub fn dims(&self) -> &PartyDims {
        match self {
            State::Pure(p) => p.dims(),
            State::Mixed(m) => m.dims(),
        }
    }
}

fn pair(c: &C64) -> [f64; 2] {
    [c.re, c.im]
}

impl From<&PureState> for StateJson {
    fn from(psi: &PureState) -> Self {
        Self {
            dims: psi.dims().as_slice().to_vec(),
            amplitudes: Some(psi.amplitudes().iter().map(pair).collect()),
            matrix: None,
        }
    }
}

impl From<&DensityMatrix> for StateJson {
    fn from(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        Self {
            dims: rho.dims().as_slice().to_vec(),
            amplitudes: None,
            matrix: Some((0..m.nrows()).map(|r| (0..m.ncols()).map(|c| pair(&m[(r, c)])).collect()).collect()),
        }
    }
}

impl StateJson {
    pub fn into_state(self, cap: usize) -> Result<State> {
        let dims = PartyDims::with_cap(self.dims, cap)?;
        match (self.amplitudes, self.matrix) {
            (Some(a), None) => {
                let amps = a.into_iter().map(|[re, im]| C64::new(re, im)).collect();
                Ok(State::Pure(PureState::from_amplitudes(dims, amps)?))
            }
            (None, Some(rows)) => {
                let d = dims.total();
                if rows.len() != d {
                    return Err(QecError::InvalidArgument(format!("field `matrix`: expected {d} rows, got {}", rows.len())));
                }
                if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != d) {
                    return Err(QecError::InvalidArgument(format!(
                        "field `matrix`: row {r} has {} entries, expected {d}",
                        row.len()
                    )));
                }
                let m = DMatrix::from_fn(d, d, |r, c| C64::new(rows[r][c][0], rows[r][c][1]));
                Ok(State::Mixed(DensityMatrix::from_matrix(dims, m)?))
            }
            (Some(_), Some(_)) => {
                Err(QecError::InvalidArgument("fields `amplitudes` and `matrix` are mutually exclusive".into()))
            }
            (None, None) => Err(QecError::InvalidArgument("missing field `amplitudes` or `matrix`".into())),
        }
    }
}

/// Parse errors from serde_json carry the offending field name and position.
pub fn parse_state(text: &str, cap: usize) -> Result<State> {
    let raw: StateJson = serde_json::from_str(text).map_err(|e| QecError::InvalidArgument(e.to_string()))?;
    raw.into_state(cap)
}

pub fn parse_state_default(text: &str) -> Result<State> {
    parse_state(text, DEFAULT_DIM_CAP)
}

pub fn pure_to_json(psi: &PureState) -> String {
    serde_json::to_string(&StateJson::from(psi)).expect("state serializes")
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&StateJson::from(rho)).expect("state serializes")
}
