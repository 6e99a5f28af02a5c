//! Bratteli-diagram calculus for AF-algebras: exact E-matrix arithmetic,
//! Glimm-Bratteli symbols, equivalence witnesses and certificates, and a
//! finite-resolution operator model of the one-dimensional integro-differential
//! algebra.

mod error;
mod linalg;

pub mod ematrix;
pub mod equivalence;
pub mod operator_model;
pub mod render;
pub mod supernatural;
pub mod symbol;
pub mod triangular;

pub use ematrix::{Dim, DimVector, EMatrix, ShapeVector};
pub use equivalence::{
    certify, find_telescoping_witness, nonisomorphism_certificate, sigma_check, solve_intertwiner,
    unitary_equivalence_check, Certificate, Witness,
};
pub use error::{Error, Result};
pub use operator_model::{OperatorModel, RationalMatrix, Report, ShiftConvention};
pub use render::{parse_text, to_dot, to_text, Diagram, DotOptions};
pub use supernatural::{Multiplicity, SupernaturalNumber};
pub use symbol::{FiniteSymbol, Generator, SymbolSpec};
pub use triangular::{triangular_profile, Profile, Triangular, TriangularPair};
