//! Computation of Popp's volume and the canonical sub-Laplacian for
//! sub-Riemannian structures given by polynomial orthonormal frames on R^n.
//!
//! Lie brackets, adapted frames and all symbolic work use exact rational
//! arithmetic; floating point enters only in the pointwise linear algebra.
//! The Gram-matrix route to the density is cross-validated by an
//! independent minimum-norm quotient oracle.

pub mod builtin;
pub mod error;
pub mod field;
pub mod file;
pub mod flag;
pub mod linalg;
pub mod maps;
pub mod parse;
pub mod poly;
pub mod popp;
pub mod report;
pub mod structure;
pub mod sublap;

pub use error::{Error, Result};
pub use field::VectorField;
pub use file::{GridSpec, StructureFile};
pub use flag::{
    check_equiregular, growth_vector, hausdorff_dimension, AdaptedFrame, BracketWord,
    EquiregularityReport, FrameSource, FrameVector, WordTable, DEFAULT_RANK_TOL,
};
pub use maps::{
    check_volume_preserving, check_volume_preserving_weighted, is_isometry, pushforward_field,
    IsometryReport, PolyMap, VolumeReport,
};
pub use parse::parse_poly;
pub use poly::{Monomial, Poly};
pub use popp::{
    adapted_constants, contact_invariant, gram_matrices, oracle_gram_deviation,
    popp_density_adapted, popp_density_coordinates, quotient_norm_oracle, AdaptedConstants,
    GramData,
};
pub use report::{popp_report, PoppReport, ReportOptions, SublaplacianReport};
pub use structure::SrStructure;
pub use sublap::{
    apply_sublaplacian, frame_divergence, gradient, mu_divergence_shift, structure_constants,
    sublaplacian_coeffs, symmetry_check, SublapContext, SublaplacianData, DEFAULT_FD_STEP,
};
