//! Sections of `T ⊕ T*` over a bundle chart: natural pairing, twisted
//! Courant (Dorfman) bracket, B-field transforms and the spinor form of the
//! bracket.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::bundle::BundleChart;
use crate::error::{Error, Result};
use crate::exterior::{clifford, sup_norm, Coframe, Form, FrameVector};
use crate::scalar::{CScalar, Point, Scalar};

/// An invariant section `X + ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub x: FrameVector,
    pub xi: Form,
}

impl Section {
    pub fn new(x: FrameVector, xi: Form) -> Result<Self> {
        if x.coframe() != xi.coframe() {
            return Err(Error::CoframeMismatch("vector and form parts of a section".into()));
        }
        if !xi.is_zero() && xi.degree() != Some(1) {
            return Err(Error::Degree("the form part of a section must be a 1-form".into()));
        }
        Ok(Section { x, xi })
    }

    pub fn zero(cf: &Arc<Coframe>) -> Self {
        Section { x: FrameVector::zero(cf), xi: Form::zero(cf) }
    }

    pub fn vector(x: FrameVector) -> Self {
        let xi = Form::zero(x.coframe());
        Section { x, xi }
    }

    pub fn covector(xi: Form) -> Result<Self> {
        Section::new(FrameVector::zero(xi.coframe()), xi)
    }

    pub fn coframe(&self) -> &Arc<Coframe> {
        self.x.coframe()
    }

    /// Clifford action on forms.
    pub fn act(&self, rho: &Form) -> Result<Form> {
        clifford(&self.x, &self.xi, rho)
    }

    pub fn add(&self, other: &Section) -> Result<Section> {
        Section::new(self.x.checked_add(&other.x)?, self.xi.checked_add(&other.xi)?)
    }

    pub fn sub(&self, other: &Section) -> Result<Section> {
        self.add(&other.scale(&CScalar::from(-1)))
    }

    pub fn scale(&self, c: &CScalar) -> Section {
        Section { x: self.x.scale(c), xi: self.xi.scale(c) }
    }

    pub fn conj(&self) -> Section {
        Section { x: self.x.conj(), xi: self.xi.conj() }
    }

    /// Components `(X^1..X^N, ξ_1..ξ_N)` at `p`.
    pub fn eval(&self, p: &Point) -> Result<DVector<Complex64>> {
        let n = self.coframe().dim();
        let mut v = DVector::zeros(2 * n);
        v.rows_mut(0, n).copy_from(&self.x.eval(p)?);
        for i in 0..n {
            v[n + i] = self.xi.coeff(1 << i).eval(p)?;
        }
        Ok(v)
    }

    /// Rewrites the section over another coframe by generator name.
    pub fn transfer(&self, target: &Arc<Coframe>) -> Result<Section> {
        Section::new(self.x.transfer(target)?, self.xi.transfer(target)?)
    }
}

/// `ξ(X)` for a 1-form and a vector.
pub fn evaluate(xi: &Form, x: &FrameVector) -> Result<CScalar> {
    Ok(xi.contract(x)?.coeff(0))
}

/// Natural pairing `⟨X+ξ, Y+η⟩ = ½(η(X) + ξ(Y))`.
pub fn pairing(v: &Section, w: &Section) -> Result<CScalar> {
    let s = &evaluate(&w.xi, &v.x)? + &evaluate(&v.xi, &w.x)?;
    Ok(s.scale(&Scalar::ratio(1, 2)))
}

/// Twisted Dorfman bracket
/// `[X+ξ, Y+η]_H = [X,Y] + L_X η - i_Y dξ - i_Y i_X H`.
///
/// The sign of the flux term makes this the derived bracket of
/// `d_H = d + H∧`; see [`bracket_spinor_residual`].
pub fn courant_bracket(v: &Section, w: &Section, ch: &BundleChart) -> Result<Section> {
    let chart = ch.chart();
    let xy = chart.lie_bracket(&v.x, &w.x)?;
    let lie_eta = &ch.d(&w.xi)?.contract(&v.x)? + &ch.d(&w.xi.contract(&v.x)?)?;
    let dxi = ch.d(&v.xi)?.contract(&w.x)?;
    let flux = ch.flux().contract(&v.x)?.contract(&w.x)?;
    Section::new(xy, &(&lie_eta - &dxi) - &flux)
}

/// `e^{-B}(X + ξ) = X + ξ - i_X B`.
pub fn b_transform(b: &Form, v: &Section) -> Result<Section> {
    if !b.is_zero() && b.degree() != Some(2) {
        return Err(Error::Degree("B-field must be a 2-form".into()));
    }
    Section::new(v.x.clone(), &v.xi - &b.contract(&v.x)?)
}

/// Residual of `[v,w]_H · ρ = [[d_H, v], w] · ρ` with graded commutators:
/// `[d_H, v] = d_H v + v d_H` and `[D, w] = D w - w D`.
pub fn bracket_spinor_residual(v: &Section, w: &Section, rho: &Form, ch: &BundleChart, points: &[Point]) -> Result<f64> {
    let lhs = courant_bracket(v, w, ch)?.act(rho)?;
    let dv = |s: &Form| -> Result<Form> { Ok(&ch.d_h(&v.act(s)?)? + &v.act(&ch.d_h(s)?)?) };
    let rhs = &dv(&w.act(rho)?)? - &w.act(&dv(rho)?)?;
    sup_norm(&(&lhs - &rhs), points)
}

/// Residual of the lift condition `i_X H = dξ` over sampled points.
pub fn lift_splitting_residual(x: &FrameVector, xi: &Form, ch: &BundleChart, points: &[Point]) -> Result<f64> {
    let defect = &ch.flux().contract(x)? - &ch.d(xi)?;
    sup_norm(&defect, points)
}

/// True iff `i_X H - dξ` vanishes (to `tol`) at the sampled points.
pub fn check_lift_splitting(x: &FrameVector, xi: &Form, ch: &BundleChart, points: &[Point], tol: f64) -> Result<bool> {
    Ok(lift_splitting_residual(x, xi, ch, points)? <= tol)
}

/// Residual of `π(v)⟨w₁,w₂⟩ = ⟨[v,w₁],w₂⟩ + ⟨w₁,[v,w₂]⟩`.
pub fn derivation_residual(v: &Section, w1: &Section, w2: &Section, ch: &BundleChart, points: &[Point]) -> Result<f64> {
    let lhs = ch.chart().apply_vector(&v.x, &pairing(w1, w2)?);
    let rhs = &pairing(&courant_bracket(v, w1, ch)?, w2)? + &pairing(w1, &courant_bracket(v, w2, ch)?)?;
    let diff = &lhs - &rhs;
    let mut worst: f64 = 0.0;
    for p in points {
        worst = worst.max(diff.eval(p)?.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{parse_form, Tag};
    use crate::scalar::Domain;

    fn flat(flux: &str) -> BundleChart {
        let dom = Domain::new(&[("x", -1.0, 1.0), ("y", -1.0, 1.0), ("z", -1.0, 1.0)]).unwrap();
        let cf = BundleChart::make_coframe(&dom, Tag::Fiber, &[]).unwrap();
        let h = parse_form(&cf, flux).unwrap();
        BundleChart::new("flat", cf, dom, vec![], h).unwrap()
    }

    fn vec_of(ch: &BundleChart, name: &str) -> Section {
        Section::vector(FrameVector::basis(ch.coframe(), name).unwrap())
    }

    #[test]
    fn pairing_examples() {
        let ch = flat("(form)");
        let px = vec_of(&ch, "dx");
        let dx = Section::covector(Form::gen(ch.coframe(), "dx").unwrap()).unwrap();
        assert_eq!(pairing(&px, &dx).unwrap(), CScalar::real(Scalar::ratio(1, 2)));
        assert!(pairing(&px, &px).unwrap().is_zero());
        let v = px.add(&dx).unwrap();
        assert_eq!(pairing(&v, &v).unwrap(), CScalar::one());
    }

    #[test]
    fn bracket_examples() {
        let ch = flat("(form)");
        let cf = ch.coframe().clone();
        let (px, py) = (vec_of(&ch, "dx"), vec_of(&ch, "dy"));
        let br = courant_bracket(&px, &py, &ch).unwrap();
        assert!(br.x.is_zero() && br.xi.is_zero());
        let fdy = Section::covector(parse_form(&cf, "(form (term (* x (sin y)) dy))").unwrap()).unwrap();
        let br = courant_bracket(&px, &fdy, &ch).unwrap();
        assert_eq!(br.xi, parse_form(&cf, "(form (term (sin y) dy))").unwrap());

        let twisted = flat("(form (term 1 dx dy dz))");
        let br = courant_bracket(&vec_of(&twisted, "dx"), &vec_of(&twisted, "dy"), &twisted).unwrap();
        assert_eq!(br.xi, parse_form(twisted.coframe(), "(form (term -1 dz))").unwrap());
        let pts = twisted.sample(1, 4).unwrap();
        let rho = parse_form(twisted.coframe(), "(form (term 1) (term x dy))").unwrap();
        let r = bracket_spinor_residual(&vec_of(&twisted, "dx"), &vec_of(&twisted, "dy"), &rho, &twisted, &pts);
        assert!(r.unwrap() < 1e-12);
    }

    #[test]
    fn b_transform_examples() {
        let ch = flat("(form)");
        let cf = ch.coframe().clone();
        let v = vec_of(&ch, "dx");
        assert_eq!(b_transform(&Form::zero(&cf), &v).unwrap(), v);
        let b = parse_form(&cf, "(form (term 1 dx dy))").unwrap();
        assert_eq!(b_transform(&b, &v).unwrap().xi, parse_form(&cf, "(form (term -1 dy))").unwrap());
    }

    #[test]
    fn lift_splitting_examples() {
        let ch = flat("(form)");
        let cf = ch.coframe().clone();
        let pts = ch.sample(2, 8).unwrap();
        let closed = parse_form(&cf, "(form (term (* 2 x) dx))").unwrap();
        assert!(check_lift_splitting(&FrameVector::basis(&cf, "dx").unwrap(), &closed, &ch, &pts, 1e-12).unwrap());
        let open = parse_form(&cf, "(form (term x dy))").unwrap();
        assert!(!check_lift_splitting(&FrameVector::basis(&cf, "dx").unwrap(), &open, &ch, &pts, 1e-12).unwrap());
    }
}
