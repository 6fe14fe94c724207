use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use super::coframe::{bits, sort_indices, wedge_sign, Coframe, Tag};
use super::vector::FrameVector;
use crate::error::{Error, Result};
use crate::scalar::{CScalar, Point, Scalar};

/// An inhomogeneous differential form with complex symbolic coefficients,
/// written in the monomial basis of a coframe.
#[derive(Clone, PartialEq)]
pub struct Form {
    cf: Arc<Coframe>,
    terms: BTreeMap<u64, CScalar>,
}

pub(crate) fn signed(c: &CScalar, sign: i32) -> CScalar {
    if sign < 0 {
        -c
    } else {
        c.clone()
    }
}

pub(crate) fn same_coframe(a: &Arc<Coframe>, b: &Arc<Coframe>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::CoframeMismatch(format!(
            "{:?} vs {:?}",
            a.names(a.full_mask()),
            b.names(b.full_mask())
        )))
    }
}

impl Form {
    pub fn zero(cf: &Arc<Coframe>) -> Self {
        Form { cf: cf.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(cf: &Arc<Coframe>, c: CScalar) -> Self {
        Form::monomial(cf, 0, c)
    }

    pub fn one(cf: &Arc<Coframe>) -> Self {
        Form::constant(cf, CScalar::one())
    }

    pub fn function(cf: &Arc<Coframe>, f: Scalar) -> Self {
        Form::constant(cf, CScalar::real(f))
    }

    pub fn monomial(cf: &Arc<Coframe>, mask: u64, c: CScalar) -> Self {
        let mut f = Form::zero(cf);
        f.add_term(mask, c);
        f
    }

    /// The generator `name` as a 1-form.
    pub fn gen(cf: &Arc<Coframe>, name: &str) -> Result<Self> {
        let i = cf.require(name)?;
        Ok(Form::monomial(cf, 1 << i, CScalar::one()))
    }

    /// `c · g_1 ∧ ... ∧ g_k` for generator names in any order.
    pub fn wedge_of(cf: &Arc<Coframe>, names: &[&str], c: CScalar) -> Result<Self> {
        let idx: Vec<usize> = names.iter().map(|n| cf.require(n)).collect::<Result<_>>()?;
        Ok(match sort_indices(&idx) {
            Some((sign, mask)) => Form::monomial(cf, mask, signed(&c, sign)),
            None => Form::zero(cf),
        })
    }

    pub fn coframe(&self) -> &Arc<Coframe> {
        &self.cf
    }

    pub fn terms(&self) -> &BTreeMap<u64, CScalar> {
        &self.terms
    }

    pub fn coeff(&self, mask: u64) -> CScalar {
        self.terms.get(&mask).cloned().unwrap_or_else(CScalar::zero)
    }

    /// Coefficient of the monomial named by `names` (in any order, with sign).
    pub fn coeff_of(&self, names: &[&str]) -> Result<CScalar> {
        let idx: Vec<usize> = names.iter().map(|n| self.cf.require(n)).collect::<Result<_>>()?;
        Ok(match sort_indices(&idx) {
            Some((sign, mask)) => signed(&self.coeff(mask), sign),
            None => CScalar::zero(),
        })
    }

    pub fn add_term(&mut self, mask: u64, c: CScalar) {
        assert!(mask & !self.cf.full_mask() == 0, "monomial outside the coframe");
        let v = match self.terms.remove(&mask) {
            Some(old) => &old + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(mask, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|m| m.count_ones() as usize).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// The degree if the form is homogeneous and nonzero.
    pub fn degree(&self) -> Option<usize> {
        match self.degrees().as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    pub fn part(&self, k: usize) -> Form {
        self.filter(|m| m.count_ones() as usize == k)
    }

    pub fn filter(&self, keep: impl Fn(u64) -> bool) -> Form {
        Form {
            cf: self.cf.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(**m)).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&CScalar) -> CScalar) -> Form {
        let mut out = Form::zero(&self.cf);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    pub fn scale(&self, c: &CScalar) -> Form {
        self.map_coeffs(|x| x * c)
    }

    pub fn scale_real(&self, s: &Scalar) -> Form {
        self.map_coeffs(|x| x.scale(s))
    }

    pub fn conj(&self) -> Form {
        self.map_coeffs(CScalar::conj)
    }

    pub fn re(&self) -> Form {
        self.map_coeffs(|c| CScalar::real(c.re.clone()))
    }

    pub fn im(&self) -> Form {
        self.map_coeffs(|c| CScalar::real(c.im.clone()))
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(CScalar::is_real)
    }

    /// True when no term involves a generator with one of the given tags.
    pub fn avoids(&self, tags: &[Tag]) -> bool {
        let mask = tags.iter().fold(0, |m, t| m | self.cf.tag_mask(*t));
        self.terms.keys().all(|m| m & mask == 0)
    }

    pub fn checked_add(&self, other: &Form) -> Result<Form> {
        same_coframe(&self.cf, &other.cf)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        same_coframe(&self.cf, &other.cf)?;
        let mut out = Form::zero(&self.cf);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let s = wedge_sign(*ma, *mb);
                if s != 0 {
                    out.add_term(ma | mb, signed(&(ca * cb), s));
                }
            }
        }
        Ok(out)
    }

    /// Interior product `i_X`.
    pub fn contract(&self, x: &FrameVector) -> Result<Form> {
        same_coframe(&self.cf, x.coframe())?;
        let mut out = Form::zero(&self.cf);
        for (m, c) in &self.terms {
            for (pos, i) in bits(*m).enumerate() {
                let xi = x.comp(i);
                if xi.is_zero() {
                    continue;
                }
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                out.add_term(m & !(1 << i), signed(&(c * xi), sign));
            }
        }
        Ok(out)
    }

    /// Rewrites the form over another coframe, matching generators by name.
    pub fn transfer(&self, target: &Arc<Coframe>) -> Result<Form> {
        if Arc::ptr_eq(&self.cf, target) {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> = self.cf.gens().iter().map(|g| target.index(&g.name)).collect();
        let mut out = Form::zero(target);
        for (m, c) in &self.terms {
            let idx: Vec<usize> = bits(*m)
                .map(|i| {
                    map[i].ok_or_else(|| {
                        Error::CoframeMismatch(format!("generator {:?} absent from target", self.cf.gen(i).name))
                    })
                })
                .collect::<Result<_>>()?;
            let (sign, mask) = sort_indices(&idx).expect("distinct generators map to distinct targets");
            out.add_term(mask, signed(c, sign));
        }
        Ok(out)
    }

    /// Coefficient vector in the monomial basis (index = bitmask) at `p`.
    pub fn eval(&self, p: &Point) -> Result<DVector<Complex64>> {
        let n = self.cf.dim();
        assert!(n <= 16, "dense evaluation limited to 16 generators");
        let mut v = DVector::zeros(1 << n);
        for (m, c) in &self.terms {
            v[*m as usize] = c.eval(p)?;
        }
        Ok(v)
    }
}

impl Add<&Form> for &Form {
    type Output = Form;
    /// Panics on coframe mismatch; use [`Form::checked_add`] for fallible addition.
    fn add(self, rhs: &Form) -> Form {
        self.checked_add(rhs).expect("adding forms over different coframes")
    }
}

impl Sub<&Form> for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self + &(-rhs)
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.map_coeffs(|c| -c)
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, rhs: Form) -> Form {
        &self + &rhs
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        &self - &rhs
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}

/// Serializes as `(form (term <coeff> gen ...) ...)`; read back by
/// [`super::parse_form`].
impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(form")?;
        for (m, c) in &self.terms {
            write!(f, " (term {c}")?;
            for name in self.cf.names(*m) {
                write!(f, " {name}")?;
            }
            write!(f, ")")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
