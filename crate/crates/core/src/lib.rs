//! Generalized complex geometry on principal torus bundles and its behaviour
//! under T-duality: invariant forms, Courant brackets, pure spinors, the
//! spinor transform and the induced Courant isomorphism.

pub mod duality;
pub mod error;
pub mod bundle;
pub mod courant;
pub mod exterior;
pub mod linalg;
pub mod models;
pub mod pointwise;
pub mod random;
pub mod reduction;
pub mod scalar;
pub mod scenario;
pub mod structures;

pub use error::{Error, Result};
