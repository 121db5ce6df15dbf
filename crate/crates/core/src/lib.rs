//! Invariants of mixed quiver representations: trace expressions, the `tr*`
//! map, the relation generators `σ_r` and `σ_{r,s}`, and exact randomized
//! verification over the rationals and prime fields.

pub mod error;
pub mod expr;
pub mod field;
pub mod generators;
pub mod hat;
pub mod matrix;
pub mod paths;
pub mod perm;
pub mod quiver;
pub mod relations;
pub mod rep;
pub mod special;
pub mod trstar;
pub mod word;

pub use error::{Error, Result};
pub use expr::{TraceExpression, TraceMonomial};
pub use field::{Field, FieldSpec, Fp, PrimeField, Rationals};
pub use matrix::Matrix;
pub use paths::CyclePath;
pub use perm::Permutation;
pub use quiver::{Arrow, ArrowClass, DimensionVector, PathStep, Quiver};
pub use rep::{GroupElement, RepPoint};
pub use relations::{PathElement, VerificationReport};
pub use special::{Flavor, SpecializationMap};
