//! The T-duality transforms between a pair of torus bundles: the spinor map
//! τ, the Courant isomorphism φ, and the transport of spinors, metrics and
//! complex structures across them.

mod pair;
mod transport;

pub use pair::{basis_section, DualityPair, PAIR_TOL};
pub use transport::{
    buscher, complex_orientation, dual_type, dual_type_consistent, transport_bihermitian, transport_metric,
    transport_section_compat, transport_spinor, transport_uk, CircleMetric, DualType,
};

#[cfg(test)]
mod tests;
