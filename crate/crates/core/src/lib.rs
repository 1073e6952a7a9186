//! Entropy vectors of multipartite quantum states, the polyhedral cone cut out
//! by strong subadditivity and weak monotonicity, and numerical checks of the
//! bounds near its apex.

pub mod cone;
pub mod constructions;
pub mod entropy;
pub mod error;
pub mod io;
pub mod lemma_lab;
pub mod linalg;
pub mod qstate;
pub mod tip_probe;

pub use cone::{membership, tip_bounds, ConeReport, Halfspace, TipReport};
pub use entropy::{binary_entropy, entropy_vector, mutual_information, EntropyVector};
pub use error::{QecError, Result};
pub use qstate::{DensityMatrix, PartyDims, PureState, SubsystemMask};
