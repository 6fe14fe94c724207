//! Chart models of principal torus bundles with connection and invariant
//! flux, and of the correspondence space of a T-dual pair.

mod chart;
mod config;
mod correspondence;

pub use chart::{BundleChart, Chart, ChartReport};
pub use config::ChartConfig;
pub use correspondence::{build_dual_chart, dual_name, CorrespondenceChart, PairReport};
