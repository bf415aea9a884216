//! Dirichlet eigenpairs of `-Δ + V(‖x‖)` on planar domains containing the
//! origin, by the method of particular solutions.
//!
//! Radial basis functions come from a weighted 1D finite element solve per
//! angular index; eigenvalues show up as minima in `λ` of the quotient of
//! boundary and interior norms of the synthesised field.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod geometry;
pub mod oracle;
pub mod potential;
pub mod quotient;
pub mod radial_fem;
pub mod scanner;

pub use error::{Error, Result};
pub use field::{BasisBundle, CoefficientVector, PolarGrid, eval_field, eval_radial, sample_grid};
pub use geometry::{BoundaryNodeSet, Domain, FourierProfile, InteriorSampleSet, Point, Shape};
pub use potential::{RadialPotential, Smoothness};
pub use quotient::{CollocationMatrices, QuotientOptions, QuotientSolution, Regularization};
pub use radial_fem::{Grid1D, RadialAssembler, RadialBasis};
pub use scanner::{
    Discretization, EigenpairApprox, ScanConfig, ScanResult, Stage, detect_multiplicity, find_minima, refine, scan,
};
