//! Symmetric eigendecomposition, the canonical split `H = H⁺ - H⁻`, nuclear
//! norms and positive-semidefiniteness indices.

mod eigen;
mod matrix;
mod oracle;
mod split;

pub use eigen::{eigendecompose, EigenDecomposition, MAX_SWEEPS};
pub use matrix::SymmetricMatrix;
pub use oracle::{nuclear_distance_to_psd_oracle, small_nuclear_norm, OracleBudget, OracleOutcome, ORACLE_MAX_DIM};
pub use split::{
    canonical_split, canonical_split_with_threshold, is_psd, nuclear_norm, psd_indices, psd_tolerance,
    trace_bound_check, CanonicalSplit, PsdIndexReport,
};
