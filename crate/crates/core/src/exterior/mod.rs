//! Exterior algebra of invariant forms over a named coframe: wedge and
//! interior products, the Clifford action of `T ⊕ T*`, reversal, the Mukai
//! pairing, truncated exponentials and integration along torus fibers.

mod coframe;
mod form;
mod ops;
mod text;
mod vector;

pub use coframe::{bits, sort_indices, wedge_sign, Coframe, Generator, Tag};
pub use form::Form;
pub use ops::{clifford, drop_tag, exp_form, fiber_integrate, mukai, mukai_top, reversal, sup_norm};
pub use text::{parse_form, parse_vector};
pub use vector::FrameVector;
