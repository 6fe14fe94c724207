//! Seeded generators of random invariant data for property checks.

use std::sync::Arc;

use rand::Rng;

use crate::courant::Section;
use crate::exterior::{Coframe, Form, FrameVector};
use crate::scalar::{CScalar, Scalar};

fn small_rational<R: Rng>(rng: &mut R) -> Scalar {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-8i64..=8);
    }
    Scalar::ratio(n, rng.gen_range(1i64..=4))
}

/// A low-degree polynomial in `vars`, sometimes with a trigonometric term.
pub fn scalar<R: Rng>(rng: &mut R, vars: &[String]) -> Scalar {
    let mut terms = vec![small_rational(rng)];
    for v in vars {
        if rng.gen_bool(0.6) {
            terms.push(small_rational(rng) * Scalar::var(v));
        }
    }
    if !vars.is_empty() {
        if rng.gen_bool(0.5) {
            let a = Scalar::var(&vars[rng.gen_range(0..vars.len())]);
            let b = Scalar::var(&vars[rng.gen_range(0..vars.len())]);
            terms.push(Scalar::product([small_rational(rng), a, b]));
        }
        if rng.gen_bool(0.3) {
            let a = Scalar::var(&vars[rng.gen_range(0..vars.len())]);
            terms.push(small_rational(rng) * a.sin());
        }
    }
    Scalar::sum(terms)
}

pub fn cscalar<R: Rng>(rng: &mut R, vars: &[String]) -> CScalar {
    let re = scalar(rng, vars);
    let im = if rng.gen_bool(0.5) { scalar(rng, vars) } else { Scalar::zero() };
    CScalar::new(re, im)
}

/// Random form whose monomials have degrees in `degrees`, each monomial
/// present with probability `density`.
pub fn form<R: Rng>(rng: &mut R, cf: &Arc<Coframe>, degrees: &[usize], density: f64, complex: bool) -> Form {
    let vars = cf.base_vars();
    let mut out = Form::zero(cf);
    for m in 0..=cf.full_mask() {
        if degrees.contains(&(m.count_ones() as usize)) && rng.gen_bool(density) {
            let c = if complex { cscalar(rng, &vars) } else { CScalar::real(scalar(rng, &vars)) };
            out.add_term(m, c);
        }
    }
    out
}

/// Random real form restricted to the given generator mask.
pub fn form_on<R: Rng>(rng: &mut R, cf: &Arc<Coframe>, allowed: u64, degree: usize, density: f64) -> Form {
    let vars = cf.base_vars();
    let mut out = Form::zero(cf);
    for m in 0..=cf.full_mask() {
        if m & !allowed == 0 && m.count_ones() as usize == degree && rng.gen_bool(density) {
            out.add_term(m, CScalar::real(scalar(rng, &vars)));
        }
    }
    out
}

pub fn vector<R: Rng>(rng: &mut R, cf: &Arc<Coframe>, complex: bool) -> FrameVector {
    let vars = cf.base_vars();
    let comps = (0..cf.dim())
        .map(|_| if complex { cscalar(rng, &vars) } else { CScalar::real(scalar(rng, &vars)) })
        .collect();
    FrameVector::new(cf, comps).expect("component count matches")
}

pub fn section<R: Rng>(rng: &mut R, cf: &Arc<Coframe>, complex: bool) -> Section {
    let x = vector(rng, cf, complex);
    let xi = form(rng, cf, &[1], 0.8, complex);
    Section::new(x, xi).expect("same coframe")
}
