use std::sync::Arc;

use super::coframe::{wedge_sign, Coframe, Tag};
use super::form::{signed, Form};
use super::vector::FrameVector;
use crate::error::{Error, Result};
use crate::scalar::{CScalar, Point, Scalar};

/// Clifford action `(X + ξ)·ρ = i_X ρ + ξ ∧ ρ`.
pub fn clifford(x: &FrameVector, xi: &Form, rho: &Form) -> Result<Form> {
    if !xi.is_zero() && xi.degree() != Some(1) {
        return Err(Error::Degree(format!("Clifford action needs a 1-form, got degrees {:?}", xi.degrees())));
    }
    rho.contract(x)?.checked_add(&xi.wedge(rho)?)
}

/// Reversal anti-automorphism: `(-1)^{k(k-1)/2}` on degree `k`.
pub fn reversal(rho: &Form) -> Form {
    let mut out = Form::zero(rho.coframe());
    for (m, c) in rho.terms() {
        let k = m.count_ones();
        out.add_term(*m, signed(c, if (k * k.saturating_sub(1) / 2) % 2 == 0 { 1 } else { -1 }));
    }
    out
}

/// Mukai pairing `(σ(ρ₁) ∧ ρ₂)_top`.
pub fn mukai(a: &Form, b: &Form) -> Result<Form> {
    let top = a.coframe().dim();
    Ok(reversal(a).wedge(b)?.part(top))
}

/// The top coefficient of the Mukai pairing as a scalar.
pub fn mukai_top(a: &Form, b: &Form) -> Result<CScalar> {
    Ok(mukai(a, b)?.coeff(a.coframe().full_mask()))
}

/// Truncated exponential `Σ_j B^j / j!` of an even form without constant term.
pub fn exp_form(b: &Form, topdeg: usize) -> Result<Form> {
    if b.terms().keys().any(|m| m.count_ones() % 2 == 1) {
        return Err(Error::Degree("exponential of a form with odd-degree part".into()));
    }
    if !b.coeff(0).is_zero() {
        return Err(Error::Degree("exponential of a form with a constant term".into()));
    }
    let mut out = Form::one(b.coframe());
    let mut power = Form::one(b.coframe());
    let limit = topdeg.min(b.coframe().dim());
    for j in 1..=limit / 2 {
        power = power.wedge(b)?.scale_real(&Scalar::ratio(1, j as i64));
        if power.is_zero() {
            break;
        }
        out = &out + &power.filter(|m| m.count_ones() as usize <= limit);
    }
    Ok(out)
}

/// Integration along the generators carrying `tag`: each term is written as
/// `α ∧ θ_1 ∧ ... ∧ θ_k` (fiber generators moved to the right, in coframe
/// order) and `α` is kept; terms without the full fiber volume drop out.
/// The result lives on the same coframe and avoids the fiber generators.
pub fn fiber_integrate(rho: &Form, tag: Tag) -> Form {
    let fib = rho.coframe().tag_mask(tag);
    let mut out = Form::zero(rho.coframe());
    for (m, c) in rho.terms() {
        if m & fib != fib {
            continue;
        }
        let alpha = m & !fib;
        out.add_term(alpha, signed(c, wedge_sign(alpha, fib)));
    }
    out
}

/// Largest coefficient modulus of `rho` over the given points.
pub fn sup_norm(rho: &Form, points: &[Point]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in points {
        for c in rho.terms().values() {
            worst = worst.max(c.eval(p)?.norm());
        }
    }
    Ok(worst)
}

/// Coframe obtained by deleting all generators with the given tag.
pub fn drop_tag(cf: &Arc<Coframe>, tag: Tag) -> Result<Arc<Coframe>> {
    Coframe::new(cf.gens().iter().filter(|g| g.tag != tag).cloned().collect())
}
