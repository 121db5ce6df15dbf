//! Dimension specializations and the orthogonal and symplectic applications.

pub mod identities;
pub mod ortho;
pub mod poly;
pub mod specialization;

pub use ortho::{ortho_quiver, Flavor};
pub use poly::Poly;
pub use specialization::{Mode, Placement, SpecializationMap};
