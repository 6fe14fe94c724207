//! Coefficient functions on the base: expressions, complex pairs, sampling domains.

mod complex;
mod domain;
mod expr;
mod parse;
mod point;

pub use complex::CScalar;
pub use domain::{Domain, Exclusion};
pub use expr::{Func, Named, Node, Scalar};
pub use parse::{cscalar_from_sexp, parse_cscalar, parse_scalar, read_sexp, scalar_from_sexp, Sexp};
pub use point::Point;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

pub const DEFAULT_SAMPLES: usize = 16;
pub const DEFAULT_TOL: f64 = 1e-9;

/// Seeded generator used for every sampling decision in the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Decides `a == b` by evaluation at `n` seeded sample points of `d`, with
/// the relative criterion `|a - b| <= tol * (1 + |a|)`.
pub fn equal_numeric(a: &Scalar, b: &Scalar, d: &Domain, n: usize, tol: f64, seed: u64) -> Result<bool> {
    assert!(n >= 1 && tol > 0.0, "equal_numeric needs n >= 1 and tol > 0");
    let points = d.sample(&mut rng(seed), n)?;
    for p in &points {
        let (x, y) = (a.eval(p)?, b.eval(p)?);
        if (x - y).abs() > tol * (1.0 + x.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Complex version of [`equal_numeric`] using the modulus.
pub fn equal_numeric_c(a: &CScalar, b: &CScalar, d: &Domain, n: usize, tol: f64, seed: u64) -> Result<bool> {
    assert!(n >= 1 && tol > 0.0, "equal_numeric needs n >= 1 and tol > 0");
    let points = d.sample(&mut rng(seed), n)?;
    for p in &points {
        let (x, y) = (a.eval(p)?, b.eval(p)?);
        if (x - y).norm() > tol * (1.0 + x.norm()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Domain {
        Domain::new(&[("t", -0.9, 0.9)]).unwrap()
    }

    #[test]
    fn equal_numeric_examples() {
        let t = Scalar::var("t");
        let one = Scalar::one();
        let a = &one - &t.powi(2);
        let b = &(&one - &t) * &(&one + &t);
        assert!(equal_numeric(&a, &b, &unit(), 16, 1e-9, 3).unwrap());
        let s = &t.sin().powi(2) + &t.cos().powi(2);
        assert!(equal_numeric(&s, &one, &unit(), 16, 1e-9, 3).unwrap());
        let shifted = &t + &Scalar::ratio(1, 1000);
        assert!(!equal_numeric(&t, &shifted, &unit(), 16, 1e-9, 3).unwrap());
    }
}
