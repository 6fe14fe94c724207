use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use super::coframe::Coframe;
use super::form::same_coframe;
use crate::error::{Error, Result};
use crate::scalar::{CScalar, Point, Scalar};

/// A vector in the frame dual to a coframe: component `i` is the value of
/// generator `i` on the vector.
#[derive(Clone, PartialEq)]
pub struct FrameVector {
    cf: Arc<Coframe>,
    comps: Vec<CScalar>,
}

impl FrameVector {
    pub fn zero(cf: &Arc<Coframe>) -> Self {
        FrameVector { cf: cf.clone(), comps: vec![CScalar::zero(); cf.dim()] }
    }

    pub fn new(cf: &Arc<Coframe>, comps: Vec<CScalar>) -> Result<Self> {
        if comps.len() != cf.dim() {
            return Err(Error::CoframeMismatch(format!(
                "{} components for a coframe of dimension {}",
                comps.len(),
                cf.dim()
            )));
        }
        Ok(FrameVector { cf: cf.clone(), comps })
    }

    /// The frame vector dual to generator `name`.
    pub fn basis(cf: &Arc<Coframe>, name: &str) -> Result<Self> {
        let i = cf.require(name)?;
        Ok(FrameVector::unit(cf, i))
    }

    pub fn unit(cf: &Arc<Coframe>, i: usize) -> Self {
        let mut v = FrameVector::zero(cf);
        v.comps[i] = CScalar::one();
        v
    }

    pub fn coframe(&self) -> &Arc<Coframe> {
        &self.cf
    }

    pub fn comp(&self, i: usize) -> &CScalar {
        &self.comps[i]
    }

    pub fn comps(&self) -> &[CScalar] {
        &self.comps
    }

    pub fn comp_of(&self, name: &str) -> Result<CScalar> {
        Ok(self.comps[self.cf.require(name)?].clone())
    }

    pub fn set(&mut self, i: usize, c: CScalar) {
        self.comps[i] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(CScalar::is_zero)
    }

    pub fn scale(&self, c: &CScalar) -> Self {
        FrameVector { cf: self.cf.clone(), comps: self.comps.iter().map(|x| x * c).collect() }
    }

    pub fn scale_real(&self, s: &Scalar) -> Self {
        FrameVector { cf: self.cf.clone(), comps: self.comps.iter().map(|x| x.scale(s)).collect() }
    }

    pub fn conj(&self) -> Self {
        FrameVector { cf: self.cf.clone(), comps: self.comps.iter().map(CScalar::conj).collect() }
    }

    pub fn checked_add(&self, other: &FrameVector) -> Result<Self> {
        same_coframe(&self.cf, &other.cf)?;
        Ok(FrameVector {
            cf: self.cf.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        })
    }

    /// Rewrites the vector over another coframe by generator name. Components
    /// along generators missing from the target must vanish.
    pub fn transfer(&self, target: &Arc<Coframe>) -> Result<Self> {
        let mut out = FrameVector::zero(target);
        for (i, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = &self.cf.gen(i).name;
            let j = target
                .index(name)
                .ok_or_else(|| Error::CoframeMismatch(format!("generator {name:?} absent from target")))?;
            out.comps[j] = c.clone();
        }
        Ok(out)
    }

    /// Like [`FrameVector::transfer`] but silently drops components along
    /// generators missing from the target (a pushforward along the fibers).
    pub fn project(&self, target: &Arc<Coframe>) -> Self {
        let mut out = FrameVector::zero(target);
        for (i, c) in self.comps.iter().enumerate() {
            if let Some(j) = target.index(&self.cf.gen(i).name) {
                out.comps[j] = c.clone();
            }
        }
        out
    }

    pub fn eval(&self, p: &Point) -> Result<DVector<Complex64>> {
        let vals: Vec<Complex64> = self.comps.iter().map(|c| c.eval(p)).collect::<Result<_>>()?;
        Ok(DVector::from_vec(vals))
    }
}

impl Add<&FrameVector> for &FrameVector {
    type Output = FrameVector;
    fn add(self, rhs: &FrameVector) -> FrameVector {
        self.checked_add(rhs).expect("adding vectors over different coframes")
    }
}

impl Sub<&FrameVector> for &FrameVector {
    type Output = FrameVector;
    fn sub(self, rhs: &FrameVector) -> FrameVector {
        self + &(-rhs)
    }
}

impl Neg for &FrameVector {
    type Output = FrameVector;
    fn neg(self) -> FrameVector {
        FrameVector { cf: self.cf.clone(), comps: self.comps.iter().map(|c| -c).collect() }
    }
}

/// Serializes as `(vector (comp <coeff> gen) ...)`.
impl fmt::Display for FrameVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(vector")?;
        for (i, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                write!(f, " (comp {c} {})", self.cf.gen(i).name)?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for FrameVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
