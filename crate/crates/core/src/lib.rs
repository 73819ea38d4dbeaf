//! Convexity diagnostics for smooth scalar fields.
//!
//! The Hessian `H` of a field is split into its positive and negative
//! semidefinite parts, `H = H⁺ − H⁻`. Nuclear norms of the parts give
//! pointwise indices (how much of the curvature is concave), and integrating
//! them over boxes gives a global index in `[0, 1]`.
//!
//! ```
//! use convexity::{builtin, pointwise_indices, BuiltinParams, FdConfig};
//!
//! let f = builtin("h_cos", &BuiltinParams::default()).unwrap();
//! let r = pointwise_indices(&f, &[0.0, std::f64::consts::PI], &FdConfig::default()).unwrap();
//! assert!((r.conv - 0.5).abs() < 1e-6);
//! ```

// NaN-rejecting checks are written as `!(a < b)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod field;
pub mod hessian;
pub mod indices;
pub mod quadrature;
pub mod risk;
pub mod scalar;
pub mod symcore;

pub use error::{Error, Result};
pub use field::{builtin, BuiltinParams, ScalarField};
pub use hessian::{analytic_hessian, hessian_fd, BoundaryMode, FdConfig};
pub use indices::{index_of_increase_1d, pointwise_indices, ConvexityReport, IncreaseIndex, IncreaseOptions};
pub use quadrature::{global_convexity_index, region_map, sweep_conv_a, GlobalIndex, HyperRect, Square, SweepResult};
pub use scalar::Scalar;
pub use symcore::{
    canonical_split, eigendecompose, is_psd, nuclear_distance_to_psd_oracle, nuclear_norm, psd_indices,
    trace_bound_check, OracleBudget,
};

pub type SymmetricMatrix64 = symcore::SymmetricMatrix<f64>;
pub type SymmetricMatrix32 = symcore::SymmetricMatrix<f32>;
pub type EigenDecomposition64 = symcore::EigenDecomposition<f64>;
pub type EigenDecomposition32 = symcore::EigenDecomposition<f32>;
pub type CanonicalSplit64 = symcore::CanonicalSplit<f64>;
pub type CanonicalSplit32 = symcore::CanonicalSplit<f32>;
pub type PsdIndexReport64 = symcore::PsdIndexReport<f64>;
pub type PsdIndexReport32 = symcore::PsdIndexReport<f32>;
