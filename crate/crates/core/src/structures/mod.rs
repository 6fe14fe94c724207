//! Pure spinors, generalized complex structures and generalized metrics,
//! evaluated pointwise on the form space of a chart.

mod frame;
mod gcs;
mod metric;
mod spinor;

pub use frame::PointFrame;
pub use gcs::{fiber_geometry, gcs_endomorphism, is_nondegenerate, FiberKind, StructureKind};
pub use metric::{c_pm, gb_from_cplus, metric_endomorphism, GeneralizedMetric};
pub use spinor::{
    annihilator, check_integrable, relative_mukai_norm, spinor_type, symplectic_uk, uk_spaces, Decomposition, Integrability,
    PureSpinor, COMPONENT_TOL,
};

#[cfg(test)]
mod tests;
