use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{Point, Scalar};
use crate::error::Result;

/// A complex coefficient `re + i im` with symbolic real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CScalar {
    pub re: Scalar,
    pub im: Scalar,
}

impl CScalar {
    pub fn new(re: Scalar, im: Scalar) -> Self {
        CScalar { re, im }
    }

    pub fn real(re: Scalar) -> Self {
        CScalar { re, im: Scalar::zero() }
    }

    pub fn imag(im: Scalar) -> Self {
        CScalar { re: Scalar::zero(), im }
    }

    pub fn zero() -> Self {
        CScalar::real(Scalar::zero())
    }

    pub fn one() -> Self {
        CScalar::real(Scalar::one())
    }

    pub fn i() -> Self {
        CScalar::imag(Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CScalar { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        CScalar { re: &self.re * s, im: &self.im * s }
    }

    pub fn eval(&self, p: &Point) -> Result<Complex64> {
        let re = self.re.eval(p)?;
        let im = if self.im.is_zero() { 0.0 } else { self.im.eval(p)? };
        Ok(Complex64::new(re, im))
    }

    pub fn diff(&self, var: &str) -> Self {
        CScalar { re: self.re.diff(var), im: self.im.diff(var) }
    }

    /// Complex quotient, expanded as `a conj(b) / |b|^2`.
    pub fn div(&self, rhs: &CScalar) -> CScalar {
        if rhs.is_real() {
            return CScalar { re: &self.re / &rhs.re, im: &self.im / &rhs.re };
        }
        let norm = &(&rhs.re * &rhs.re) + &(&rhs.im * &rhs.im);
        let num = self * &rhs.conj();
        CScalar { re: &num.re / &norm, im: &num.im / &norm }
    }
}

impl From<Scalar> for CScalar {
    fn from(s: Scalar) -> Self {
        CScalar::real(s)
    }
}

impl From<i64> for CScalar {
    fn from(n: i64) -> Self {
        CScalar::real(Scalar::int(n))
    }
}

impl Add<&CScalar> for &CScalar {
    type Output = CScalar;
    fn add(self, rhs: &CScalar) -> CScalar {
        CScalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub<&CScalar> for &CScalar {
    type Output = CScalar;
    fn sub(self, rhs: &CScalar) -> CScalar {
        CScalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul<&CScalar> for &CScalar {
    type Output = CScalar;
    fn mul(self, rhs: &CScalar) -> CScalar {
        if self.is_real() && rhs.is_real() {
            return CScalar::real(&self.re * &rhs.re);
        }
        CScalar {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl Neg for &CScalar {
    type Output = CScalar;
    fn neg(self) -> CScalar {
        CScalar { re: -&self.re, im: -&self.im }
    }
}

impl fmt::Display for CScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "(complex {} {})", self.re, self.im)
        }
    }
}

impl fmt::Debug for CScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_arithmetic_under_eval() {
        let t = Scalar::var("t");
        let a = CScalar::new(t.sin(), &t * &t);
        let b = CScalar::new(Scalar::int(2) + &t, t.cos());
        let p = Point::from_pairs([("t", 0.37)]);
        let (za, zb) = (a.eval(&p).unwrap(), b.eval(&p).unwrap());
        assert!(((&a * &b).eval(&p).unwrap() - za * zb).norm() < 1e-14);
        assert!(((&a - &b).eval(&p).unwrap() - (za - zb)).norm() < 1e-14);
        assert!((a.div(&b).eval(&p).unwrap() - za / zb).norm() < 1e-14);
        assert!((a.conj().eval(&p).unwrap() - za.conj()).norm() < 1e-14);
    }
}
